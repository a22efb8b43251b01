//! The `romik` command line: sequence tables, residue grids, verification
//! suites, the periodicity scan and cache management.

use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::exact::{mod_floor_u64, SequenceCache};
use crate::persist::{self, CACHE_DIR_ENV};
use crate::residues::{is_prime, ResidueGrid, ValuationBudget};
use crate::verify::{self, SuiteKind, SuiteSpec};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_RUNTIME: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "romik", version, about = "Exact Romik sequence computations and congruence checks")]
pub struct CliConfig {
    /// Directory holding the persistent sequence cache.
    #[arg(long, global = true, env = CACHE_DIR_ENV)]
    pub cache_dir: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Sequence {
    U,
    V,
    D,
    S,
    R,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Csv,
    Pgm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SuiteArg {
    Parity,
    Mod5,
    ModP,
    Uv,
    EvenOdd,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CacheAction {
    Store,
    Load,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print u, v, d (indices 0..=max) or s, r (1 ≤ k ≤ n ≤ max).
    Compute {
        #[arg(long, value_enum)]
        seq: Sequence,
        #[arg(long)]
        max: usize,
        /// Reduce every value modulo this prime.
        #[arg(long = "mod")]
        modulus: Option<u64>,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Export the grid of r(n,k) mod p for 1 ≤ k ≤ n ≤ max-n.
    Grid {
        #[arg(long)]
        prime: u64,
        #[arg(long = "max-n")]
        max_n: usize,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        #[arg(long)]
        output: Option<PathBuf>,
        /// Write `<output>.n0.csv` marking the block 1 ≤ k ≤ n0 < n.
        #[arg(long = "highlight-n0")]
        highlight_n0: bool,
    },
    /// Run verification suites; exits 1 if any suite fails.
    Verify {
        #[arg(long, value_enum)]
        suite: SuiteArg,
        #[arg(long)]
        max: Option<usize>,
        #[arg(long)]
        prime: Option<u64>,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
    },
    /// Look for eventual periodicity of d(n) mod p, p ≡ 1 (mod 4).
    ScanPeriod {
        #[arg(long)]
        prime: u64,
        #[arg(long)]
        bound: usize,
    },
    /// Build and store the cache through --max, or load and validate it.
    Cache {
        #[arg(value_enum)]
        action: CacheAction,
        #[arg(long)]
        max: Option<usize>,
    },
}

fn usage(message: impl Into<String>) -> Error {
    Error::Usage(message.into())
}

/// Maps an error to the process exit status.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Usage(_) | Error::Domain(_) => EXIT_USAGE,
        _ => EXIT_RUNTIME,
    }
}

fn open_output<'a>(path: Option<&Path>, stdout: &'a mut dyn Write) -> Result<Box<dyn Write + 'a>> {
    match path {
        Some(p) => {
            let file = fs::File::create(p).map_err(|e| Error::io(p, e))?;
            Ok(Box::new(BufWriter::new(file)))
        }
        None => Ok(Box::new(stdout)),
    }
}

fn io_context<'a>(path: Option<&'a Path>) -> impl Fn(io::Error) -> Error + 'a {
    move |e| Error::io(path.unwrap_or(Path::new("<stdout>")), e)
}

struct Session {
    cache: SequenceCache,
    cache_dir: Option<PathBuf>,
    stored_bound: usize,
}

impl Session {
    fn open(cache_dir: Option<PathBuf>) -> Result<Self> {
        let cache = match &cache_dir {
            Some(dir) => persist::load(dir)?,
            None => SequenceCache::new(),
        };
        let stored_bound = cache.bound();
        Ok(Session {
            cache,
            cache_dir,
            stored_bound,
        })
    }

    fn ensure(&mut self, bound: usize) -> Result<&SequenceCache> {
        self.cache.ensure(bound)?;
        Ok(&self.cache)
    }

    fn close(self) -> Result<()> {
        if let Some(dir) = &self.cache_dir {
            if self.cache.bound() > self.stored_bound {
                persist::store(dir, &self.cache)?;
            }
        }
        Ok(())
    }
}

/// Executes a parsed command, writing results to `stdout` and diagnostics
/// to `stderr`. Returns the process exit status.
pub fn run(config: CliConfig, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    match execute(config, stdout, stderr) {
        Ok(code) => code,
        Err(err) => {
            let _ = writeln!(stderr, "romik: {err}");
            exit_code(&err)
        }
    }
}

fn execute(config: CliConfig, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32> {
    validate(&config)?;
    let mut session = Session::open(config.cache_dir.clone())?;
    let code = match config.command {
        Command::Compute {
            seq,
            max,
            modulus,
            format,
            output,
        } => {
            let cache = session.ensure(max)?;
            let mut out = open_output(output.as_deref(), stdout)?;
            write_sequence(cache, seq, max, modulus, format, &mut out)
                .and_then(|_| out.flush())
                .map_err(io_context(output.as_deref()))?;
            EXIT_OK
        }
        Command::Grid {
            prime,
            max_n,
            format,
            output,
            highlight_n0,
        } => {
            let cache = session.ensure(max_n)?;
            let grid = ResidueGrid::build(prime, max_n, cache)?;
            let mut out = open_output(output.as_deref(), stdout)?;
            match format {
                Format::Csv => grid.write_csv(&mut out),
                Format::Pgm => grid.write_pgm(&mut out),
                Format::Table => grid.write_table(&mut out),
            }
            .and_then(|_| out.flush())
            .map_err(io_context(output.as_deref()))?;
            drop(out);
            if highlight_n0 {
                let path = output.as_deref().expect("validated");
                write_highlight(path, prime, max_n)?;
            }
            EXIT_OK
        }
        Command::Verify {
            suite,
            max,
            prime,
            format,
        } => {
            let specs = suite_specs(suite, max, prime)?;
            let bound = specs.iter().map(|s| s.max_n).max().unwrap_or(0);
            let cache = session.ensure(bound)?;
            let reports = verify::run_suites(cache, &specs)?;
            let to_io = io_context(None);
            if format == Format::Csv {
                writeln!(stdout, "{}", verify::VerificationReport::CSV_HEADER).map_err(&to_io)?;
            }
            for report in &reports {
                match format {
                    Format::Csv => writeln!(stdout, "{}", report.to_csv_row()),
                    _ => writeln!(stdout, "{report}"),
                }
                .map_err(&to_io)?;
                if let Some(note) = &report.note {
                    let _ = writeln!(stderr, "NOTE {}: {note}", report.suite_name);
                }
            }
            if reports.iter().all(|r| r.passed()) {
                EXIT_OK
            } else {
                EXIT_FAILURE
            }
        }
        Command::ScanPeriod { prime, bound } => {
            let cache = session.ensure(bound)?;
            let scan = verify::scan_periodicity(cache, prime, bound)?;
            writeln!(stdout, "{scan}").map_err(io_context(None))?;
            EXIT_OK
        }
        Command::Cache { action, max } => {
            match action {
                CacheAction::Store => {
                    let max = max.ok_or_else(|| usage("`cache store` needs --max"))?;
                    session.ensure(max)?;
                    let dir = session.cache_dir.clone().expect("validated");
                    persist::store(&dir, &session.cache)?;
                    writeln!(stdout, "stored n ≤ {} in {}", session.cache.bound(), dir.display())
                        .map_err(io_context(None))?;
                }
                CacheAction::Load => {
                    let c = &session.cache;
                    writeln!(
                        stdout,
                        "u: {} values, v: {} values, d: {} values, s: {} rows, complete through n = {}",
                        c.u_values().len(),
                        c.v_values().len(),
                        c.d_values().len(),
                        c.s_rows().len(),
                        c.bound()
                    )
                    .map_err(io_context(None))?;
                }
            }
            // the explicit store above already persisted everything
            return Ok(EXIT_OK);
        }
    };
    session.close()?;
    Ok(code)
}

fn validate(config: &CliConfig) -> Result<()> {
    match &config.command {
        Command::Compute {
            format, modulus, ..
        } => {
            if *format == Format::Pgm {
                return Err(usage("pgm output is only available for `grid`"));
            }
            if let Some(p) = modulus {
                if !is_prime(*p) {
                    return Err(usage(format!("--mod {p} is not prime")));
                }
            }
        }
        Command::Grid {
            prime,
            max_n,
            output,
            highlight_n0,
            ..
        } => {
            if !is_prime(*prime) {
                return Err(usage(format!("--prime {prime} is not prime")));
            }
            if *max_n == 0 {
                return Err(usage("--max-n must be at least 1"));
            }
            if *highlight_n0 {
                if prime % 4 != 3 {
                    return Err(usage("--highlight-n0 needs a prime congruent to 3 mod 4"));
                }
                if output.is_none() {
                    return Err(usage("--highlight-n0 needs --output"));
                }
            }
        }
        Command::Verify { format, .. } => {
            if *format == Format::Pgm {
                return Err(usage("pgm output is only available for `grid`"));
            }
        }
        Command::ScanPeriod { .. } => {}
        Command::Cache { .. } => {
            if config.cache_dir.is_none() {
                return Err(usage(format!(
                    "`cache` needs --cache-dir or {CACHE_DIR_ENV}"
                )));
            }
        }
    }
    Ok(())
}

fn suite_specs(suite: SuiteArg, max: Option<usize>, prime: Option<u64>) -> Result<Vec<SuiteSpec>> {
    let kind = match suite {
        SuiteArg::All => {
            if max.is_some() || prime.is_some() {
                return Err(usage("`--suite all` runs default bounds; drop --max/--prime"));
            }
            return Ok(SuiteSpec::all());
        }
        SuiteArg::Parity => SuiteKind::Parity,
        SuiteArg::Mod5 => SuiteKind::Mod5,
        SuiteArg::ModP => SuiteKind::ModPVanishing,
        SuiteArg::Uv => SuiteKind::UvStructure,
        SuiteArg::EvenOdd => SuiteKind::EvenOddSums,
    };
    let needs_prime = matches!(kind, SuiteKind::ModPVanishing | SuiteKind::UvStructure);
    match (needs_prime, prime) {
        (true, None) => return Err(usage("this suite needs --prime")),
        (false, Some(_)) => return Err(usage("this suite does not take --prime")),
        _ => {}
    }
    Ok(vec![SuiteSpec {
        kind,
        prime,
        max_n: max.unwrap_or_else(|| SuiteSpec::default_bound(kind, prime)),
    }])
}

fn render(value: &BigInt, modulus: Option<u64>) -> String {
    match modulus {
        Some(p) => mod_floor_u64(value, p).to_string(),
        None => value.to_string(),
    }
}

fn write_sequence(
    cache: &SequenceCache,
    seq: Sequence,
    max: usize,
    modulus: Option<u64>,
    format: Format,
    out: &mut dyn Write,
) -> io::Result<()> {
    let linear = match seq {
        Sequence::U => Some(cache.u_values()),
        Sequence::V => Some(cache.v_values()),
        Sequence::D => Some(cache.d_values()),
        Sequence::S | Sequence::R => None,
    };
    match linear {
        Some(values) => {
            if format == Format::Csv {
                writeln!(out, "n,value")?;
            }
            for (n, x) in values[..=max].iter().enumerate() {
                let x = render(x, modulus);
                match format {
                    Format::Csv => writeln!(out, "{n},{x}")?,
                    _ => writeln!(out, "{n} {x}")?,
                }
            }
        }
        None => {
            if format == Format::Csv {
                writeln!(out, "n,k,value")?;
            }
            for n in 1..=max {
                for k in 1..=n {
                    let x = match seq {
                        Sequence::S => cache.s(n, k).clone(),
                        _ => cache.r(n, k),
                    };
                    let x = render(&x, modulus);
                    match format {
                        Format::Csv => writeln!(out, "{n},{k},{x}")?,
                        _ => writeln!(out, "{n} {k} {x}")?,
                    }
                }
            }
        }
    }
    Ok(())
}

/// Sidecar marking the block `1 ≤ k ≤ n₀ < n ≤ max_n` of the grid.
pub fn highlight_path(output: &Path) -> PathBuf {
    let mut name = output.as_os_str().to_owned();
    name.push(".n0.csv");
    PathBuf::from(name)
}

fn write_highlight(output: &Path, prime: u64, max_n: usize) -> Result<()> {
    let n0 = ValuationBudget::for_prime(prime)?.n0;
    let path = highlight_path(output);
    let text = format!("n0,n_lo,n_hi,k_lo,k_hi\n{n0},{},{max_n},1,{n0}\n", n0 + 1);
    fs::write(&path, text).map_err(|e| Error::io(&path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let mut full = vec!["romik"];
        full.extend_from_slice(args);
        let config = CliConfig::try_parse_from(full).expect("parse");
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run(config, &mut out, &mut err);
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn compute_d() {
        let (code, out, _) = run_args(&["compute", "--seq", "d", "--max", "8"]);
        assert_eq!(code, 0);
        let values: Vec<&str> = out.lines().map(|l| l.split(' ').nth(1).unwrap()).collect();
        assert_eq!(
            values.join(","),
            "1,1,-1,51,849,-26199,1341999,82018251,18703396449"
        );
    }

    #[test]
    fn compute_mod_matches_reduction() {
        let (_, plain, _) = run_args(&["compute", "--seq", "d", "--max", "30", "--format", "csv"]);
        let (_, reduced, _) = run_args(&[
            "compute", "--seq", "d", "--max", "30", "--format", "csv", "--mod", "7",
        ]);
        for (a, b) in plain.lines().skip(1).zip(reduced.lines().skip(1)) {
            let x: BigInt = a.split(',').nth(1).unwrap().parse().unwrap();
            let y: u64 = b.split(',').nth(1).unwrap().parse().unwrap();
            assert_eq!(mod_floor_u64(&x, 7), y);
        }
    }

    #[test]
    fn compute_triangular() {
        let (code, out, _) = run_args(&["compute", "--seq", "r", "--max", "3", "--format", "csv"]);
        assert_eq!(code, 0);
        assert_eq!(out, "n,k,value\n1,1,1\n2,1,48\n2,2,1\n3,1,7584\n3,2,240\n3,3,1\n");
    }

    #[test]
    fn usage_errors() {
        assert_eq!(run_args(&["compute", "--seq", "d", "--max", "3", "--format", "pgm"]).0, 2);
        assert_eq!(run_args(&["compute", "--seq", "d", "--max", "3", "--mod", "4"]).0, 2);
        assert_eq!(run_args(&["verify", "--suite", "mod-p", "--prime", "5"]).0, 2);
        assert_eq!(run_args(&["verify", "--suite", "mod-p"]).0, 2);
        assert_eq!(run_args(&["verify", "--suite", "parity", "--prime", "3"]).0, 2);
        assert_eq!(run_args(&["scan-period", "--prime", "7", "--bound", "40"]).0, 2);
        assert_eq!(
            run_args(&["grid", "--prime", "5", "--max-n", "9", "--highlight-n0"]).0,
            2
        );
        assert!(CliConfig::try_parse_from(["romik", "grid", "--max-n", "4"]).is_err());
    }

    #[test]
    fn verify_exit_status() {
        let (code, out, _) = run_args(&["verify", "--suite", "mod5", "--max", "40"]);
        assert_eq!(code, 0);
        assert_eq!(out, "SUITE mod5 RANGE 1..40 PRIME 5 RESULT PASS\n");
        let (code, out, _) = run_args(&["verify", "--suite", "even-odd", "--format", "csv"]);
        assert_eq!(code, 0);
        assert_eq!(
            out,
            format!("{}\neven-odd,3,60,5,PASS,,,,\n", verify::VerificationReport::CSV_HEADER)
        );
    }

    #[test]
    fn grid_formats_agree() {
        let (_, csv, _) = run_args(&["grid", "--prime", "7", "--max-n", "12"]);
        let (_, pgm, _) = run_args(&["grid", "--prime", "7", "--max-n", "12", "--format", "pgm"]);
        let pixels: Vec<Vec<u64>> = pgm
            .lines()
            .skip(3)
            .map(|l| l.split(' ').map(|x| x.parse().unwrap()).collect())
            .collect();
        assert_eq!(pixels.len(), 12);
        for line in csv.lines().skip(1) {
            let f: Vec<usize> = line.split(',').map(|x| x.parse().unwrap()).collect();
            assert_eq!(pixels[f[0] - 1][f[1] - 1], f[2] as u64);
        }
        for (n, row) in pixels.iter().enumerate() {
            assert!(row[n + 1..].iter().all(|&x| x == 6));
        }
    }

    #[test]
    fn highlight_sidecar() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("g7.csv");
        let (code, _, _) = run_args(&[
            "grid",
            "--prime",
            "7",
            "--max-n",
            "30",
            "--output",
            out.to_str().unwrap(),
            "--highlight-n0",
        ]);
        assert_eq!(code, 0);
        let marker = fs::read_to_string(highlight_path(&out)).unwrap();
        assert_eq!(marker, "n0,n_lo,n_hi,k_lo,k_hi\n24,25,30,1,24\n");
        assert!(fs::read_to_string(&out).unwrap().starts_with("n,k,residue\n"));
    }
}

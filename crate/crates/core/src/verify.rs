//! Congruence suites over a built [`SequenceCache`], each producing a
//! [`VerificationReport`] with the smallest counterexample on failure.

use std::fmt;
use std::time::{Duration, Instant};

use num_integer::Integer;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exact::{mod_floor_u64, SequenceCache};
use crate::residues::{is_prime, require_odd_prime, ValuationBudget};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    /// Which quantity failed, e.g. `d`, `v`, `r`, `sum_even`.
    pub quantity: String,
    pub n: usize,
    pub k: Option<usize>,
    pub expected: String,
    pub actual: String,
}

#[derive(Debug, Clone)]
pub struct VerificationReport {
    pub suite_name: String,
    pub range: (usize, usize),
    pub prime: Option<u64>,
    pub counterexample: Option<Counterexample>,
    pub elapsed: Duration,
    /// Free-form observations from exploratory suites. Never affects the result.
    pub note: Option<String>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.counterexample.is_none()
    }

    pub const CSV_HEADER: &'static str =
        "suite,range_lo,range_hi,prime,result,ce_n,ce_k,ce_expected,ce_actual";

    pub fn to_csv_row(&self) -> String {
        let prime = self.prime.map_or("-".to_string(), |p| p.to_string());
        let result = if self.passed() { "PASS" } else { "FAIL" };
        let (n, k, e, a) = match &self.counterexample {
            Some(ce) => (
                ce.n.to_string(),
                ce.k.map_or("-".to_string(), |k| k.to_string()),
                ce.expected.clone(),
                ce.actual.clone(),
            ),
            None => Default::default(),
        };
        format!(
            "{},{},{},{prime},{result},{n},{k},{e},{a}",
            self.suite_name, self.range.0, self.range.1
        )
    }
}

/// `SUITE <name> RANGE <lo>..<hi> PRIME <p|-> RESULT <PASS|FAIL> [CE …]`
impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "SUITE {} RANGE {}..{} PRIME ",
            self.suite_name, self.range.0, self.range.1
        )?;
        match self.prime {
            Some(p) => write!(f, "{p}")?,
            None => f.write_str("-")?,
        }
        match &self.counterexample {
            None => f.write_str(" RESULT PASS"),
            Some(ce) => {
                write!(f, " RESULT FAIL CE n={} k=", ce.n)?;
                match ce.k {
                    Some(k) => write!(f, "{k}")?,
                    None => f.write_str("-")?,
                }
                write!(f, " expected={} actual={}", ce.expected, ce.actual)
            }
        }
    }
}

fn require_bound(cache: &SequenceCache, n: usize) -> Result<()> {
    if cache.bound() < n {
        return Err(Error::Domain(format!(
            "cache is built through n = {}, suite needs {n}",
            cache.bound()
        )));
    }
    Ok(())
}

fn ce(quantity: &str, n: usize, k: Option<usize>, expected: u64, actual: u64) -> Counterexample {
    Counterexample {
        quantity: quantity.to_string(),
        n,
        k,
        expected: expected.to_string(),
        actual: actual.to_string(),
    }
}

struct Run {
    name: &'static str,
    range: (usize, usize),
    prime: Option<u64>,
    start: Instant,
}

impl Run {
    fn new(name: &'static str, range: (usize, usize), prime: Option<u64>) -> Self {
        Run {
            name,
            range,
            prime,
            start: Instant::now(),
        }
    }

    fn finish(self, counterexample: Option<Counterexample>) -> VerificationReport {
        VerificationReport {
            suite_name: self.name.to_string(),
            range: self.range,
            prime: self.prime,
            counterexample,
            elapsed: self.start.elapsed(),
            note: None,
        }
    }
}

/// `d(n)` odd, `v(n)` odd and `r(n,k)` even for `k < n`, for `n ≤ max_n`.
pub fn verify_parity(cache: &SequenceCache, max_n: usize) -> Result<VerificationReport> {
    require_bound(cache, max_n)?;
    let run = Run::new("parity", (0, max_n), Some(2));
    let found = (0..=max_n).find_map(|n| {
        if cache.d(n).is_even() {
            return Some(ce("d", n, None, 1, 0));
        }
        if cache.v(n).is_even() {
            return Some(ce("v", n, None, 1, 0));
        }
        (1..n)
            .find(|&k| cache.r(n, k).is_odd())
            .map(|k| ce("r", n, Some(k), 0, 1))
    });
    Ok(run.finish(found))
}

/// `d(n) ≡ (-1)^{n+1} (mod 5)` for `1 ≤ n ≤ max_n`.
pub fn verify_mod5(cache: &SequenceCache, max_n: usize) -> Result<VerificationReport> {
    if max_n == 0 {
        return Err(Error::Domain("mod5 suite needs max_n ≥ 1".into()));
    }
    require_bound(cache, max_n)?;
    let run = Run::new("mod5", (1, max_n), Some(5));
    let found = (1..=max_n).find_map(|n| {
        let expected = if n % 2 == 1 { 1 } else { 4 };
        let actual = mod_floor_u64(cache.d(n), 5);
        (actual != expected).then(|| ce("d", n, None, expected, actual))
    });
    Ok(run.finish(found))
}

/// For `p ≡ 3 (mod 4)`: `d(n) ≡ 0` for `n₀ < n ≤ max_n`, and `r(n,k) ≡ 0`
/// for `1 ≤ k ≤ n₀ < n ≤ max_n`.
pub fn verify_mod_p_vanishing(
    cache: &SequenceCache,
    p: u64,
    max_n: usize,
) -> Result<VerificationReport> {
    let budget = ValuationBudget::for_prime(p)?;
    let n0 = budget.n0;
    if max_n <= n0 {
        return Err(Error::Domain(format!(
            "max_n = {max_n} must exceed n0 = {n0} for p = {p}"
        )));
    }
    require_bound(cache, max_n)?;
    let run = Run::new("mod-p", (n0 + 1, max_n), Some(p));
    let found = (n0 + 1..=max_n).find_map(|n| {
        let d = mod_floor_u64(cache.d(n), p);
        if d != 0 {
            return Some(ce("d", n, None, 0, d));
        }
        (1..=n0).find_map(|k| {
            let r = mod_floor_u64(&cache.r(n, k), p);
            (r != 0).then(|| ce("r", n, Some(k), 0, r))
        })
    });
    Ok(run.finish(found))
}

/// Vanishing structure of `u` and `v` modulo `p`.
///
/// For `p = 5` the residues must start `u ≡ 1,1,1,0,0,…` and
/// `v ≡ 1,1,2,0,0,…`. For `p ≡ 3 (mod 4)`: `u((p-1)/2) ≡ 0`,
/// `u(n) ≡ 0` for `n ≥ n₀` and `v(n) ≡ 0` for `n > n₀`. Other primes are
/// scanned only, with the observed onset of vanishing recorded in the note.
pub fn verify_uv_structure(
    cache: &SequenceCache,
    p: u64,
    max_n: usize,
) -> Result<VerificationReport> {
    require_odd_prime(p)?;
    require_bound(cache, max_n)?;
    let run = Run::new("uv", (0, max_n), Some(p));
    let u = |n| mod_floor_u64(cache.u(n), p);
    let v = |n| mod_floor_u64(cache.v(n), p);

    if p == 5 {
        let expect_u = |n: usize| if n <= 2 { 1 } else { 0 };
        let expect_v = |n: usize| match n {
            0 | 1 => 1,
            2 => 2,
            _ => 0,
        };
        let found = (0..=max_n).find_map(|n| {
            if u(n) != expect_u(n) {
                return Some(ce("u", n, None, expect_u(n), u(n)));
            }
            (v(n) != expect_v(n)).then(|| ce("v", n, None, expect_v(n), v(n)))
        });
        return Ok(run.finish(found));
    }

    if p % 4 == 3 {
        let n0 = ValuationBudget::for_prime(p)?.n0;
        let half = (p as usize - 1) / 2;
        let found = (0..=max_n).find_map(|n| {
            let u_must_vanish = n == half || n >= n0;
            if u_must_vanish && u(n) != 0 {
                return Some(ce("u", n, None, 0, u(n)));
            }
            (n > n0 && v(n) != 0).then(|| ce("v", n, None, 0, v(n)))
        });
        return Ok(run.finish(found));
    }

    let onset = |f: &dyn Fn(usize) -> u64| {
        (0..=max_n)
            .rev()
            .take_while(|&n| f(n) == 0)
            .last()
            .map_or("none".to_string(), |n| n.to_string())
    };
    let mut report = run.finish(None);
    report.note = Some(format!(
        "exploratory: u vanishes from n = {}, v vanishes from n = {} (through {max_n}); (p+1)/2 = {}",
        onset(&u),
        onset(&v),
        (p + 1) / 2
    ));
    Ok(report)
}

/// Both sums `Σ r(n,k)` over `n/5 ≤ k ≤ n` restricted to even `k` and to
/// odd `k` vanish mod 5, for `3 ≤ n ≤ max_n`.
pub fn verify_even_odd_sums(cache: &SequenceCache, max_n: usize) -> Result<VerificationReport> {
    if max_n < 3 {
        return Err(Error::Domain("even-odd suite needs max_n ≥ 3".into()));
    }
    require_bound(cache, max_n)?;
    let run = Run::new("even-odd", (3, max_n), Some(5));
    let found = (3..=max_n).find_map(|n| {
        let lowest = n.div_ceil(5).max(1);
        let mut sums = [0u64; 2];
        for k in lowest..=n {
            sums[k % 2] = (sums[k % 2] + mod_floor_u64(&cache.r(n, k), 5)) % 5;
        }
        if sums[0] != 0 {
            return Some(ce("sum_even", n, None, 0, sums[0]));
        }
        (sums[1] != 0).then(|| ce("sum_odd", n, None, 0, sums[1]))
    });
    Ok(run.finish(found))
}

/// Observed eventual periodicity of `d(n) mod p` over `0..=scan_bound`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PeriodScanResult {
    pub prime: u64,
    pub preperiod: Option<usize>,
    pub period: Option<usize>,
    pub residue_cycle: Vec<u64>,
    pub scan_bound: usize,
}

impl PeriodScanResult {
    pub fn is_conclusive(&self) -> bool {
        self.period.is_some()
    }
}

impl fmt::Display for PeriodScanResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SCAN PRIME {} BOUND {} ", self.prime, self.scan_bound)?;
        match (self.preperiod, self.period) {
            (Some(mu), Some(lambda)) => {
                let cycle: Vec<String> = self.residue_cycle.iter().map(u64::to_string).collect();
                write!(
                    f,
                    "PREPERIOD {mu} PERIOD {lambda} CYCLE {}",
                    cycle.join(",")
                )
            }
            _ => f.write_str("INCONCLUSIVE"),
        }
    }
}

/// Smallest `(μ, λ)`, searched by increasing `μ` then increasing `λ`, with
/// `d(n+λ) ≡ d(n) (mod p)` for every `μ ≤ n ≤ scan_bound - λ`. A candidate
/// only counts when the window after `μ` holds at least three periods, so
/// the repetition is confirmed over two full cycles.
pub fn scan_periodicity(
    cache: &SequenceCache,
    p: u64,
    scan_bound: usize,
) -> Result<PeriodScanResult> {
    if !is_prime(p) || p % 4 != 1 {
        return Err(Error::Domain(format!("{p} is not a prime congruent to 1 mod 4")));
    }
    if scan_bound < 4 * p as usize {
        return Err(Error::Domain(format!(
            "scan bound {scan_bound} is below 4p = {}",
            4 * p
        )));
    }
    require_bound(cache, scan_bound)?;
    let residues: Vec<u64> = (0..=scan_bound)
        .map(|n| mod_floor_u64(cache.d(n), p))
        .collect();
    let len = residues.len();

    for mu in 0..len {
        let window = len - mu;
        for lambda in 1..=window / 3 {
            if (mu..len - lambda).all(|n| residues[n] == residues[n + lambda]) {
                return Ok(PeriodScanResult {
                    prime: p,
                    preperiod: Some(mu),
                    period: Some(lambda),
                    residue_cycle: residues[mu..mu + lambda].to_vec(),
                    scan_bound,
                });
            }
        }
    }
    Ok(PeriodScanResult {
        prime: p,
        preperiod: None,
        period: None,
        residue_cycle: Vec::new(),
        scan_bound,
    })
}

/// The suites runnable from a [`SuiteSpec`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SuiteKind {
    Parity,
    Mod5,
    ModPVanishing,
    UvStructure,
    EvenOddSums,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SuiteSpec {
    pub kind: SuiteKind,
    pub prime: Option<u64>,
    pub max_n: usize,
}

impl SuiteSpec {
    /// Default range bound for a suite: 150 for parity and mod 5, 60 for the
    /// even/odd sums, 40 for p = 3, 60 for p = 7, 90 for p = 11 and
    /// `n₀ + 30` for other `p ≡ 3 (mod 4)`.
    pub fn default_bound(kind: SuiteKind, prime: Option<u64>) -> usize {
        match (kind, prime) {
            (SuiteKind::Parity | SuiteKind::Mod5, _) => 150,
            (SuiteKind::EvenOddSums, _) => 60,
            (SuiteKind::ModPVanishing, Some(3)) => 40,
            (SuiteKind::ModPVanishing, Some(7)) => 60,
            (SuiteKind::ModPVanishing, Some(11)) => 90,
            (SuiteKind::ModPVanishing, Some(p)) => ((p * p - 1) / 2) as usize + 30,
            (SuiteKind::UvStructure, Some(5)) => 40,
            (SuiteKind::UvStructure, Some(p)) if p % 4 == 3 => ((p * p - 1) / 2) as usize + 20,
            (SuiteKind::UvStructure, _) => 60,
            (SuiteKind::ModPVanishing, None) => 0,
        }
    }

    /// The full battery with default bounds.
    pub fn all() -> Vec<SuiteSpec> {
        let with = |kind, prime| SuiteSpec {
            kind,
            prime,
            max_n: Self::default_bound(kind, prime),
        };
        vec![
            with(SuiteKind::Parity, None),
            with(SuiteKind::Mod5, None),
            with(SuiteKind::ModPVanishing, Some(3)),
            with(SuiteKind::ModPVanishing, Some(7)),
            with(SuiteKind::ModPVanishing, Some(11)),
            with(SuiteKind::UvStructure, Some(5)),
            with(SuiteKind::UvStructure, Some(3)),
            with(SuiteKind::UvStructure, Some(7)),
            with(SuiteKind::EvenOddSums, None),
        ]
    }

    pub fn run(&self, cache: &SequenceCache) -> Result<VerificationReport> {
        let prime = || {
            self.prime
                .ok_or_else(|| Error::Usage("this suite needs --prime".into()))
        };
        match self.kind {
            SuiteKind::Parity => verify_parity(cache, self.max_n),
            SuiteKind::Mod5 => verify_mod5(cache, self.max_n),
            SuiteKind::ModPVanishing => verify_mod_p_vanishing(cache, prime()?, self.max_n),
            SuiteKind::UvStructure => verify_uv_structure(cache, prime()?, self.max_n),
            SuiteKind::EvenOddSums => verify_even_odd_sums(cache, self.max_n),
        }
    }
}

/// Runs suites concurrently against one shared cache; reports come back in
/// the order of `specs`.
pub fn run_suites(
    cache: &SequenceCache,
    specs: &[SuiteSpec],
) -> Result<Vec<VerificationReport>> {
    specs.par_iter().map(|spec| spec.run(cache)).collect()
}

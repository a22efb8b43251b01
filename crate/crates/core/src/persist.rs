//! On-disk cache files.
//!
//! Sequence files (`u.txt`, `v.txt`, `d.txt`) start with the header
//! `ROMIKCACHE v1 seq=<u|v|d>` followed by `<n> <decimal value>` lines for
//! `n = 0, 1, 2, …` with no gaps. The triangular table (`s.txt`) uses the
//! header `ROMIKCACHE v1 seq=s` and lines `<n> <k> <decimal value>` in
//! row-major order starting from `1 1`.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::exact::SequenceCache;

const MAGIC: &str = "ROMIKCACHE";
const VERSION: &str = "v1";

/// Environment variable naming the default cache directory.
pub const CACHE_DIR_ENV: &str = "ROMIK_CACHE_DIR";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StoredSequence {
    U,
    V,
    D,
    S,
}

impl StoredSequence {
    pub fn tag(self) -> &'static str {
        match self {
            StoredSequence::U => "u",
            StoredSequence::V => "v",
            StoredSequence::D => "d",
            StoredSequence::S => "s",
        }
    }

    pub fn file_name(self) -> String {
        format!("{}.txt", self.tag())
    }

    fn header(self) -> String {
        format!("{MAGIC} {VERSION} seq={}", self.tag())
    }
}

pub fn write_sequence<W: Write>(
    mut out: W,
    seq: StoredSequence,
    values: &[BigInt],
) -> std::io::Result<()> {
    writeln!(out, "{}", seq.header())?;
    for (n, x) in values.iter().enumerate() {
        writeln!(out, "{n} {x}")?;
    }
    Ok(())
}

pub fn write_table<W: Write>(mut out: W, rows: &[Vec<BigInt>]) -> std::io::Result<()> {
    writeln!(out, "{}", StoredSequence::S.header())?;
    for (i, row) in rows.iter().enumerate() {
        for (j, x) in row.iter().enumerate() {
            writeln!(out, "{} {} {x}", i + 1, j + 1)?;
        }
    }
    Ok(())
}

fn parse_error(path: &Path, line: usize, message: impl Into<String>) -> Error {
    Error::CacheParse {
        path: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

fn check_header(path: &Path, first: Option<&str>, seq: StoredSequence) -> Result<()> {
    let Some(line) = first else {
        return Err(parse_error(path, 1, "empty file, missing header"));
    };
    let fields: Vec<&str> = line.split_whitespace().collect();
    if fields.first() != Some(&MAGIC) {
        return Err(parse_error(path, 1, format!("not a cache header: `{line}`")));
    }
    if fields.get(1) != Some(&VERSION) {
        return Err(Error::CacheVersion {
            path: path.to_path_buf(),
            found: line.to_string(),
        });
    }
    let expected = format!("seq={}", seq.tag());
    if fields.len() != 3 || fields[2] != expected {
        return Err(parse_error(
            path,
            1,
            format!("expected `{expected}` in header, found `{line}`"),
        ));
    }
    Ok(())
}

fn parse_index(path: &Path, line: usize, field: Option<&str>) -> Result<usize> {
    field
        .ok_or_else(|| parse_error(path, line, "missing index"))?
        .parse()
        .map_err(|_| parse_error(path, line, "index is not a natural number"))
}

fn parse_value(path: &Path, line: usize, field: Option<&str>) -> Result<BigInt> {
    field
        .ok_or_else(|| parse_error(path, line, "missing value"))?
        .parse()
        .map_err(|_| parse_error(path, line, "value is not a decimal integer"))
}

/// Parses a sequence file's text, validating header and index contiguity.
pub fn parse_sequence(path: &Path, text: &str, seq: StoredSequence) -> Result<Vec<BigInt>> {
    let mut lines = text.lines();
    check_header(path, lines.next(), seq)?;
    let mut values = Vec::new();
    for (i, line) in lines.enumerate() {
        let line_no = i + 2;
        let mut fields = line.split_whitespace();
        let n = parse_index(path, line_no, fields.next())?;
        let value = parse_value(path, line_no, fields.next())?;
        if fields.next().is_some() {
            return Err(parse_error(path, line_no, "trailing fields"));
        }
        if n != values.len() {
            return Err(parse_error(
                path,
                line_no,
                format!("gap: expected index {}, found {n}", values.len()),
            ));
        }
        values.push(value);
    }
    Ok(values)
}

/// Parses the triangular table, validating header and `(n,k)` contiguity.
/// A trailing incomplete row is rejected.
pub fn parse_table(path: &Path, text: &str) -> Result<Vec<Vec<BigInt>>> {
    let mut lines = text.lines();
    check_header(path, lines.next(), StoredSequence::S)?;
    let mut rows: Vec<Vec<BigInt>> = Vec::new();
    let mut last_line = 1;
    for (i, line) in lines.enumerate() {
        let line_no = i + 2;
        last_line = line_no;
        let mut fields = line.split_whitespace();
        let n = parse_index(path, line_no, fields.next())?;
        let k = parse_index(path, line_no, fields.next())?;
        let value = parse_value(path, line_no, fields.next())?;
        if fields.next().is_some() {
            return Err(parse_error(path, line_no, "trailing fields"));
        }
        let expected = match rows.last() {
            Some(row) if row.len() < rows.len() => (rows.len(), row.len() + 1),
            _ => (rows.len() + 1, 1),
        };
        if (n, k) != expected {
            return Err(parse_error(
                path,
                line_no,
                format!(
                    "gap: expected ({}, {}), found ({n}, {k})",
                    expected.0, expected.1
                ),
            ));
        }
        if k == 1 {
            rows.push(Vec::with_capacity(n));
        }
        rows.last_mut().expect("row pushed").push(value);
    }
    if let Some(row) = rows.last() {
        if row.len() < rows.len() {
            return Err(parse_error(
                path,
                last_line,
                format!("row {} ends after {} entries", rows.len(), row.len()),
            ));
        }
    }
    Ok(rows)
}

fn read(path: &Path) -> Result<Option<String>> {
    match fs::read_to_string(path) {
        Ok(text) => Ok(Some(text)),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(None),
        Err(e) => Err(Error::io(path, e)),
    }
}

fn store_file(path: PathBuf, write: impl FnOnce(&mut BufWriter<fs::File>) -> std::io::Result<()>) -> Result<()> {
    let file = fs::File::create(&path).map_err(|e| Error::io(&path, e))?;
    let mut out = BufWriter::new(file);
    write(&mut out)
        .and_then(|_| out.flush())
        .map_err(|e| Error::io(&path, e))
}

/// Writes all four files into `dir`, creating it if needed.
pub fn store(dir: &Path, cache: &SequenceCache) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    for (seq, values) in [
        (StoredSequence::U, cache.u_values()),
        (StoredSequence::V, cache.v_values()),
        (StoredSequence::D, cache.d_values()),
    ] {
        store_file(dir.join(seq.file_name()), |out| {
            write_sequence(out, seq, values)
        })?;
    }
    store_file(dir.join(StoredSequence::S.file_name()), |out| {
        write_table(out, cache.s_rows())
    })
}

/// Loads whatever cache files exist in `dir`; missing files start empty.
/// Returns a fresh cache if the directory holds none of them.
pub fn load(dir: &Path) -> Result<SequenceCache> {
    let mut seqs = Vec::new();
    for seq in [StoredSequence::U, StoredSequence::V, StoredSequence::D] {
        let path = dir.join(seq.file_name());
        let values = match read(&path)? {
            Some(text) => parse_sequence(&path, &text, seq)?,
            None => Vec::new(),
        };
        seqs.push(values);
    }
    let path = dir.join(StoredSequence::S.file_name());
    let rows = match read(&path)? {
        Some(text) => parse_table(&path, &text)?,
        None => Vec::new(),
    };
    let [mut u, mut v, mut d]: [Vec<BigInt>; 3] = seqs.try_into().expect("three sequences");
    for seq in [&mut u, &mut v, &mut d] {
        if seq.is_empty() {
            seq.push(BigInt::from(1));
        }
    }
    SequenceCache::from_parts(u, v, d, rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> PathBuf {
        PathBuf::from("mem.txt")
    }

    #[test]
    fn sequence_round_trip_text() {
        let cache = SequenceCache::with_bound(8).unwrap();
        let mut buf = Vec::new();
        write_sequence(&mut buf, StoredSequence::D, cache.d_values()).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("ROMIKCACHE v1 seq=d\n0 1\n1 1\n2 -1\n3 51\n"));
        let back = parse_sequence(&p(), &text, StoredSequence::D).unwrap();
        assert_eq!(back, cache.d_values());
    }

    #[test]
    fn rejects_bad_headers() {
        let err = parse_sequence(&p(), "ROMIKCACHE v2 seq=d\n0 1\n", StoredSequence::D);
        assert!(matches!(err, Err(Error::CacheVersion { .. })));
        let err = parse_sequence(&p(), "ROMIKCACHE v1 seq=u\n0 1\n", StoredSequence::D);
        assert!(matches!(err, Err(Error::CacheParse { line: 1, .. })));
        let err = parse_sequence(&p(), "", StoredSequence::D);
        assert!(matches!(err, Err(Error::CacheParse { line: 1, .. })));
        let err = parse_sequence(&p(), "hello\n", StoredSequence::D);
        assert!(matches!(err, Err(Error::CacheParse { line: 1, .. })));
    }

    #[test]
    fn rejects_gaps_and_garbage() {
        let err = parse_sequence(&p(), "ROMIKCACHE v1 seq=d\n0 1\n2 -1\n", StoredSequence::D)
            .unwrap_err();
        match err {
            Error::CacheParse { line, message, .. } => {
                assert_eq!(line, 3);
                assert!(message.contains("gap"), "{message}");
                assert!(message.contains("expected index 1"), "{message}");
            }
            other => panic!("unexpected {other:?}"),
        }
        let err = parse_sequence(&p(), "ROMIKCACHE v1 seq=d\n0 x\n", StoredSequence::D);
        assert!(matches!(err, Err(Error::CacheParse { line: 2, .. })));
        let err = parse_sequence(&p(), "ROMIKCACHE v1 seq=d\n0 1 2\n", StoredSequence::D);
        assert!(matches!(err, Err(Error::CacheParse { line: 2, .. })));
    }

    #[test]
    fn table_parsing() {
        let text = "ROMIKCACHE v1 seq=s\n1 1 1\n2 1 24\n2 2 1\n";
        let rows = parse_table(&p(), text).unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[1][0], BigInt::from(24));

        let truncated = "ROMIKCACHE v1 seq=s\n1 1 1\n2 1 24\n";
        assert!(matches!(
            parse_table(&p(), truncated),
            Err(Error::CacheParse { line: 3, .. })
        ));
        let skipped = "ROMIKCACHE v1 seq=s\n1 1 1\n2 2 1\n";
        assert!(matches!(
            parse_table(&p(), skipped),
            Err(Error::CacheParse { line: 3, .. })
        ));
    }
}

//! Interchange formats: Gramian JSON, descent trace CSV, content hashes and
//! `key = value` configuration files.
//!
//! Gramian JSON:
//!
//! ```json
//! {"n": 3, "k": 2, "field": "real", "entries": [[0.666, 0.0], [-0.333, 0.0], ...]}
//! ```
//!
//! `entries` is row-major of length `n²`, each entry a `[re, im]` pair.
//! Components are written as decimal strings with 17 significant digits, so
//! reading a file back reproduces every bit. Plain JSON numbers are accepted
//! on input as well.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::Tolerances;
use crate::error::{FrameError, Result};
use crate::gram::{GramMatrix, HermMatrix};
use crate::matrix::{cx, CMat};
use crate::optimizer::TraceRow;
use crate::scalar::{Field, Real};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
enum Number {
    Float(f64),
    Text(String),
}

impl Number {
    fn value(&self) -> Result<f64> {
        match self {
            Number::Float(v) => Ok(*v),
            Number::Text(s) => s.trim().parse().map_err(|_| FrameError::Parse(format!("not a number: {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct MatrixFile {
    n: usize,
    k: usize,
    field: Field,
    entries: Vec<[Number; 2]>,
}

fn decimal(v: f64) -> Number {
    Number::Text(format!("{v:.16e}"))
}

pub fn gram_to_json<T: Real>(g: &GramMatrix<T>) -> String {
    let file = MatrixFile {
        n: g.n(),
        k: g.k(),
        field: g.field(),
        entries: g.matrix().iter().map(|z| [decimal(z.re.as_f64()), decimal(z.im.as_f64())]).collect(),
    };
    serde_json::to_string(&file).expect("matrix file serializes")
}

/// Parses a Gramian file without checking membership in the manifold.
pub fn matrix_from_json<T: Real>(text: &str) -> Result<(CMat<T>, usize, Field)> {
    let file: MatrixFile = serde_json::from_str(text).map_err(|e| FrameError::Parse(e.to_string()))?;
    if file.entries.len() != file.n * file.n {
        return Err(FrameError::DimensionMismatch { expected: file.n * file.n, found: file.entries.len() });
    }
    let mut data = Vec::with_capacity(file.entries.len());
    for [re, im] in &file.entries {
        data.push(cx::<T>(re.value()?, im.value()?));
    }
    let m = CMat::from_row_major(file.n, file.n, data).expect("length checked");
    Ok((m, file.k, file.field))
}

/// Parses and validates a Gramian file.
pub fn gram_from_json<T: Real>(text: &str, tol: &Tolerances) -> Result<GramMatrix<T>> {
    let (m, k, field) = matrix_from_json(text)?;
    GramMatrix::validate(HermMatrix::new(m, field, tol)?, k, tol)
}

pub fn read_gram<T: Real>(path: &Path, tol: &Tolerances) -> Result<GramMatrix<T>> {
    let text = std::fs::read_to_string(path).map_err(|e| FrameError::Parse(format!("{}: {e}", path.display())))?;
    gram_from_json(&text, tol)
}

pub const TRACE_HEADER: &str = "iter,value,grad_norm,step,mu";

pub fn trace_to_csv(rows: &[TraceRow]) -> String {
    let mut out = String::with_capacity(32 * (rows.len() + 1));
    out.push_str(TRACE_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(out, "{},{},{},{},{}", r.iter, r.value, r.grad_norm, r.step, r.mu);
    }
    out
}

pub fn trace_from_csv(text: &str) -> Result<Vec<TraceRow>> {
    let mut lines = text.lines();
    if lines.next().map(str::trim) != Some(TRACE_HEADER) {
        return Err(FrameError::Parse(format!("trace header must be `{TRACE_HEADER}`")));
    }
    lines
        .filter(|l| !l.trim().is_empty())
        .enumerate()
        .map(|(i, line)| {
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 5 {
                return Err(FrameError::Parse(format!("trace row {}: expected 5 fields", i + 1)));
            }
            let num =
                |s: &str| s.trim().parse::<f64>().map_err(|_| FrameError::Parse(format!("trace row {}: {s:?}", i + 1)));
            Ok(TraceRow {
                iter: f[0].trim().parse().map_err(|_| FrameError::Parse(format!("trace row {}: bad iter", i + 1)))?,
                value: num(f[1])?,
                grad_norm: num(f[2])?,
                step: num(f[3])?,
                mu: num(f[4])?,
            })
        })
        .collect()
}

/// SHA-256 of `"blob <len>\0" ‖ content`, as git would hash the file with
/// SHA-256 object ids. Lowercase hex.
pub fn blob_hash(content: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(format!("blob {}\0", content.len()).as_bytes());
    h.update(content);
    h.finalize().iter().fold(String::with_capacity(64), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

/// Parses `key = value` lines. `#` starts a comment, blank lines are
/// skipped, and values may be wrapped in double quotes.
pub fn parse_key_values(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (no, raw) in text.lines().enumerate() {
        let line = match raw.find('#') {
            Some(i) if !raw[..i].contains('"') => &raw[..i],
            _ => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) =
            line.split_once('=').ok_or_else(|| FrameError::Parse(format!("line {}: expected key = value", no + 1)))?;
        let key = key.trim();
        if key.is_empty() {
            return Err(FrameError::Parse(format!("line {}: empty key", no + 1)));
        }
        let value = value.trim();
        let value = value.strip_prefix('"').and_then(|v| v.strip_suffix('"')).unwrap_or(value);
        out.insert(key.to_string(), value.to_string());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructors::mubs_6_4_gramian;

    #[test]
    fn json_round_trip_is_exact() {
        let g: GramMatrix<f64> = mubs_6_4_gramian().unwrap();
        let back: GramMatrix<f64> = gram_from_json(&gram_to_json(&g), &Tolerances::default()).unwrap();
        assert_eq!(back.matrix(), g.matrix());
        assert_eq!(back.k(), 4);
    }

    #[test]
    fn json_writes_seventeen_digits() {
        let g: GramMatrix<f64> = GramMatrix::identity(1, Field::Real);
        assert!(gram_to_json(&g).contains(r#"["1.0000000000000000e0","0.0000000000000000e0"]"#));
    }

    #[test]
    fn json_accepts_decimal_strings() {
        let text = r#"{"n":2,"k":1,"field":"real","entries":[["1.0","0"],[0,0],[0,0],[0,0]]}"#;
        let g: GramMatrix<f64> = gram_from_json(text, &Tolerances::default()).unwrap();
        assert_eq!(g.entry(0, 0).re, 1.0);
    }

    #[test]
    fn json_length_mismatch() {
        let text = r#"{"n":2,"k":1,"field":"real","entries":[[1,0]]}"#;
        assert!(matches!(
            gram_from_json::<f64>(text, &Tolerances::default()),
            Err(FrameError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn csv_round_trip() {
        let rows = vec![
            TraceRow { iter: 0, value: 10.5, grad_norm: 0.25, step: 0.0, mu: 0.4 },
            TraceRow { iter: 1, value: 10.057671618677, grad_norm: 1e-9, step: 0.125, mu: 1.0 / 3.0 },
        ];
        let text = trace_to_csv(&rows);
        assert!(text.starts_with("iter,value,grad_norm,step,mu\n"));
        assert_eq!(trace_from_csv(&text).unwrap(), rows);
    }

    #[test]
    fn blob_hash_of_empty_input() {
        // git hash-object --object-format=sha256 on an empty file
        assert_eq!(blob_hash(b""), "473a0f4c3be8a93681a267e3b1e9a7dcda1185436fe141f7749120a303721813");
    }

    #[test]
    fn key_values() {
        let kv = parse_key_values("# comment\neta = 2.5\nname = \"a # b\"\n\nseed=7 # trailing\n").unwrap();
        assert_eq!(kv["eta"], "2.5");
        assert_eq!(kv["name"], "a # b");
        assert_eq!(kv["seed"], "7");
        assert!(parse_key_values("novalue").is_err());
    }
}

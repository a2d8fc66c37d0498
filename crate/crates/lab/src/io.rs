//! Plain-text artifacts: ASCII bitsets, one-image-per-line permutations and
//! density trace CSVs.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use stochlab_core::{format_decimal, BitPrefix, FinitePermutation, Rational};

use crate::error::{io_error, LabError, LabResult};

fn format_error(path: &Path, message: String) -> LabError {
    LabError::Format { path: path.to_path_buf(), message }
}

/// `#len N`, then the `N` bits on one line.
pub fn render_bitset(a: &BitPrefix) -> String {
    format!("#len {}\n{a}\n", a.len())
}

/// Parses the bitset format; errors give the byte offset into `text`.
pub fn parse_bitset(text: &str) -> Result<BitPrefix, String> {
    let header_end = text.find('\n').ok_or("byte 0: missing \"#len N\" header line")?;
    let header = &text[..header_end];
    let len: u64 = header
        .strip_prefix("#len ")
        .and_then(|n| n.parse().ok())
        .ok_or_else(|| format!("byte 0: expected \"#len N\", found {header:?}"))?;
    let body_start = header_end + 1;
    let rest = &text[body_start..];
    let body = rest.strip_suffix('\n').unwrap_or(rest);
    if let Some(extra) = body.find('\n') {
        return Err(format!("byte {}: unexpected extra line", body_start + extra));
    }
    let bits: BitPrefix = body.parse().map_err(|e| match e {
        stochlab_core::Error::Parse { offset, message } => format!("byte {}: {message}", body_start + offset),
        other => other.to_string(),
    })?;
    if bits.len() != len {
        return Err(format!("byte {}: header declares {len} bits, body has {}", body_start, bits.len()));
    }
    Ok(bits)
}

pub fn save_bitset(path: &Path, a: &BitPrefix) -> LabResult<()> {
    fs::write(path, render_bitset(a)).map_err(io_error(path))
}

pub fn load_bitset(path: &Path) -> LabResult<BitPrefix> {
    let text = fs::read_to_string(path).map_err(io_error(path))?;
    parse_bitset(&text).map_err(|m| format_error(path, m))
}

pub fn render_permutation(pi: &FinitePermutation) -> String {
    let mut out = String::new();
    for v in pi.forward() {
        writeln!(out, "{v}").expect("writing to a string");
    }
    out
}

/// One decimal image per line; errors name the 1-based line.
pub fn parse_permutation(text: &str) -> Result<FinitePermutation, String> {
    let lines: Vec<&str> = text.lines().collect();
    let size = lines.len() as u64;
    let mut first_seen = vec![None; lines.len()];
    let mut forward = Vec::with_capacity(lines.len());
    for (i, line) in lines.iter().enumerate() {
        let n = i + 1;
        let v: u64 = line.trim().parse().map_err(|_| format!("line {n}: {line:?} is not a natural number"))?;
        if v >= size {
            return Err(format!("line {n}: image {v} is outside [0, {size})"));
        }
        if let Some(first) = first_seen[v as usize] {
            return Err(format!("line {n}: image {v} already appears on line {first}"));
        }
        first_seen[v as usize] = Some(n);
        forward.push(v);
    }
    FinitePermutation::from_forward(forward).map_err(|e| e.to_string())
}

pub fn save_permutation(path: &Path, pi: &FinitePermutation) -> LabResult<()> {
    fs::write(path, render_permutation(pi)).map_err(io_error(path))
}

pub fn load_permutation(path: &Path) -> LabResult<FinitePermutation> {
    let text = fs::read_to_string(path).map_err(io_error(path))?;
    parse_permutation(&text).map_err(|m| format_error(path, m))
}

/// One row of a density trace.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceRow {
    pub n: u64,
    pub rho: Rational,
}

/// `n,rho_exact,rho_decimal`; rows must be strictly increasing in `n`.
pub fn render_trace(rows: &[TraceRow]) -> Result<String, String> {
    if let Some(w) = rows.windows(2).find(|w| w[0].n >= w[1].n) {
        return Err(format!("trace rows not increasing: {} then {}", w[0].n, w[1].n));
    }
    let mut out = String::from("n,rho_exact,rho_decimal\n");
    for row in rows {
        writeln!(out, "{},{}/{},{}", row.n, row.rho.numer(), row.rho.denom(), format_decimal(&row.rho, 6))
            .expect("writing to a string");
    }
    Ok(out)
}

pub fn save_trace(path: &Path, rows: &[TraceRow]) -> LabResult<()> {
    let text = render_trace(rows).map_err(|m| format_error(path, m))?;
    fs::write(path, text).map_err(io_error(path))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bitset_format() {
        let a: BitPrefix = "1010".parse().unwrap();
        assert_eq!(render_bitset(&a), "#len 4\n1010\n");
        assert_eq!(render_bitset(&BitPrefix::default()), "#len 0\n\n");
        assert_eq!(parse_bitset("#len 0\n\n").unwrap(), BitPrefix::default());
        assert_eq!(parse_bitset("#len 4\n1010\n").unwrap(), a);
    }

    #[test]
    fn bitset_errors_carry_offsets() {
        assert_eq!(parse_bitset("#len 4\n10x0\n").unwrap_err(), "byte 9: expected '0' or '1', found 'x'");
        assert!(parse_bitset("#len 5\n1010\n").unwrap_err().starts_with("byte 7:"));
        assert!(parse_bitset("len 4\n1010\n").unwrap_err().starts_with("byte 0:"));
        assert!(parse_bitset("#len 4").is_err());
    }

    #[test]
    fn permutation_format() {
        assert_eq!(render_permutation(&FinitePermutation::identity(3)), "0\n1\n2\n");
        assert_eq!(render_permutation(&FinitePermutation::reversal(3)), "2\n1\n0\n");
        assert_eq!(parse_permutation("2\n1\n0\n").unwrap(), FinitePermutation::reversal(3));
    }

    #[test]
    fn permutation_errors_name_the_line() {
        assert_eq!(parse_permutation("0\n1\n1\n").unwrap_err(), "line 3: image 1 already appears on line 2");
        assert_eq!(parse_permutation("0\n3\n1\n").unwrap_err(), "line 2: image 3 is outside [0, 3)");
        assert!(parse_permutation("0\nx\n").unwrap_err().starts_with("line 2:"));
    }

    #[test]
    fn trace_rows() {
        let rows = vec![TraceRow { n: 3, rho: Rational::new(2, 3) }, TraceRow { n: 8, rho: Rational::new(1, 16) }];
        assert_eq!(render_trace(&rows).unwrap(), "n,rho_exact,rho_decimal\n3,2/3,0.666667\n8,1/16,0.062500\n");
        assert!(render_trace(&[rows[1].clone(), rows[0].clone()]).is_err());
    }
}

//! `lo:hi:step` ranges and exact decimal parsing.
//!
//! A range holds `lo, lo + step, ...` up to and including `hi` when `hi` lies
//! on the grid; values are exact rationals, so `2:3:0.1` has eleven points.
//! A single value or a comma-separated list is accepted wherever a range is.

use num_rational::Ratio;
use requant_core::Rational;

use crate::{LabError, Result};

const MAX_POINTS: usize = 1_000_000;

fn range_err(input: &str, reason: &'static str) -> LabError {
    LabError::Range {
        input: input.to_string(),
        reason,
    }
}

/// Exact value of a decimal (`-12.25`) or fraction (`49/4`) literal.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let bad = |reason| LabError::Value {
        input: s.to_string(),
        reason,
    };
    let t = s.trim();
    if let Some((n, d)) = t.split_once('/') {
        let n: i64 = n.trim().parse().map_err(|_| bad("bad numerator"))?;
        let d: i64 = d.trim().parse().map_err(|_| bad("bad denominator"))?;
        if d == 0 {
            return Err(bad("zero denominator"));
        }
        return Ok(Ratio::new(n, d));
    }
    let (neg, body) = match t.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, t.strip_prefix('+').unwrap_or(t)),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if int.is_empty() && frac.is_empty() {
        return Err(bad("empty number"));
    }
    if !int.bytes().chain(frac.bytes()).all(|b| b.is_ascii_digit()) {
        return Err(bad("not a decimal number"));
    }
    if frac.len() > 12 {
        return Err(bad("too many decimal places"));
    }
    let scale = 10i64.pow(frac.len() as u32);
    let digits = format!("{int}{frac}");
    let numer: i64 = if digits.is_empty() {
        0
    } else {
        digits.parse().map_err(|_| bad("number too large"))?
    };
    let v = Ratio::new(numer, scale);
    Ok(if neg { -v } else { v })
}

pub fn parse_range(s: &str) -> Result<Vec<Rational>> {
    if s.contains(',') {
        return s.split(',').map(parse_rational).collect();
    }
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        [one] => Ok(vec![parse_rational(one)?]),
        [lo, hi, step] => {
            let (lo, hi, step) = (
                parse_rational(lo)?,
                parse_rational(hi)?,
                parse_rational(step)?,
            );
            if step <= Rational::from_integer(0) {
                return Err(range_err(s, "step must be positive"));
            }
            if lo > hi {
                return Err(range_err(s, "lo exceeds hi"));
            }
            let count = ((hi - lo) / step).floor().to_integer() as u128 + 1;
            if count > MAX_POINTS as u128 {
                return Err(range_err(s, "too many points"));
            }
            Ok((0..count as i64).map(|k| lo + step * k).collect())
        }
        _ => Err(range_err(s, "expected lo:hi:step")),
    }
}

/// Integer range, every point within `lo_bound..=hi_bound`.
pub fn parse_int_range(s: &str, lo_bound: i64, hi_bound: i64) -> Result<Vec<i64>> {
    let vals = parse_range(s)?;
    vals.iter()
        .map(|v| {
            if !v.is_integer() {
                return Err(range_err(s, "values must be integers"));
            }
            let v = v.to_integer();
            if v < lo_bound || v > hi_bound {
                return Err(range_err(s, "value out of bounds"));
            }
            Ok(v)
        })
        .collect()
}

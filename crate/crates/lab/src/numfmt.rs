//! Fixed six-significant-digit rendering for CSV fields.

use requant_core::Rational;

const SIG: i32 = 6;

/// `x` with six significant digits: positional notation for exponents in
/// `-5..6`, scientific outside. Zero prints as `0.00000`.
pub fn sig6(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return format!("{:.*}", (SIG - 1) as usize, 0.0);
    }
    // the exponent after rounding to six digits
    let sci = format!("{:.*e}", (SIG - 1) as usize, x);
    let exp: i32 = sci[sci.find('e').unwrap() + 1..].parse().unwrap();
    if (-5..SIG).contains(&exp) {
        format!("{:.*}", (SIG - 1 - exp) as usize, x)
    } else {
        sci
    }
}

pub fn opt_sig6(x: Option<f64>) -> String {
    x.map(sig6).unwrap_or_default()
}

pub fn rational(r: Rational) -> String {
    sig6(*r.numer() as f64 / *r.denom() as f64)
}

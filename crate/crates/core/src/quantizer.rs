//! Dead-zone uniform scalar quantizer.
//!
//! A coefficient `x` maps to the level `sign(x) * floor(|x| / step + offset)` and
//! a level reconstructs to `level * step`. Step and offset are exact rationals so
//! that decision boundaries of two quantizers can be compared without rounding
//! noise; integer and rational inputs are quantized with integer arithmetic only.

use alloc::vec::Vec;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::CoefficientDomain;

/// Exact rational number used for steps, offsets and reconstructions.
pub type Rational = Ratio<i64>;

/// Highest QP accepted by [`qp_to_qstep`].
pub const MAX_QP: i32 = 51;

/// What to do when `|x| / step + offset` lands exactly on an integer.
///
/// Only meaningful for a nonzero offset. With `offset == 0` the quantizer is
/// pure truncation and every multiple of the step reconstructs to itself.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum TieBreak {
    /// The tie goes to the smaller magnitude level.
    #[default]
    TowardZero,
    /// The tie goes to the larger magnitude level.
    AwayFromZero,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Quantizer {
    step: Rational,
    offset: Rational,
    tie_break: TieBreak,
    // level(|x| = n / d) = floor((n * scale + d * bias) / (d * divisor))
    scale: i64,
    bias: i64,
    divisor: i64,
}

impl Quantizer {
    pub fn new(step: Rational, offset: Rational, tie_break: TieBreak) -> Result<Self> {
        if !step.is_positive() {
            return Err(Error::NonPositiveStep);
        }
        if offset.is_negative() || offset >= Rational::from_integer(1) {
            return Err(Error::OffsetOutOfRange);
        }
        let (sn, sd) = (*step.numer(), *step.denom());
        let (fn_, fd) = (*offset.numer(), *offset.denom());
        let scale = sd.checked_mul(fd).ok_or(Error::NonPositiveStep)?;
        let bias = fn_.checked_mul(sn).ok_or(Error::NonPositiveStep)?;
        let divisor = sn.checked_mul(fd).ok_or(Error::NonPositiveStep)?;
        Ok(Self {
            step,
            offset,
            tie_break,
            scale,
            bias,
            divisor,
        })
    }

    /// Truncating quantizer (offset 0) with an integer step.
    pub fn truncating(step: i64) -> Result<Self> {
        Self::new(
            Rational::from_integer(step),
            Rational::zero(),
            TieBreak::default(),
        )
    }

    /// Same offset and tie rule, different step.
    pub fn with_step(&self, step: Rational) -> Result<Self> {
        Self::new(step, self.offset, self.tie_break)
    }

    pub fn step(&self) -> Rational {
        self.step
    }

    pub fn offset(&self) -> Rational {
        self.offset
    }

    pub fn tie_break(&self) -> TieBreak {
        self.tie_break
    }

    /// Magnitude level for the nonnegative value `num / den` (`den > 0`).
    #[inline]
    pub(crate) fn magnitude_level(&self, num: i64, den: i64) -> i64 {
        debug_assert!(num >= 0 && den > 0);
        let fast = num
            .checked_mul(self.scale)
            .and_then(|a| den.checked_mul(self.bias).and_then(|b| a.checked_add(b)))
            .zip(den.checked_mul(self.divisor));
        let (q, r) = match fast {
            Some((n, d)) => n.div_rem(&d),
            None => {
                let n = num as i128 * self.scale as i128 + den as i128 * self.bias as i128;
                let d = den as i128 * self.divisor as i128;
                let (q, r) = n.div_rem(&d);
                (q as i64, r as i64)
            }
        };
        if r == 0 && q > 0 && self.bias != 0 && self.tie_break == TieBreak::TowardZero {
            q - 1
        } else {
            q
        }
    }

    /// Quantizes an integer coefficient.
    #[inline]
    pub fn quantize(&self, x: i64) -> i64 {
        let level = self.magnitude_level(x.unsigned_abs() as i64, 1);
        if x < 0 {
            -level
        } else {
            level
        }
    }

    /// Quantizes an exact rational coefficient.
    pub fn quantize_rational(&self, x: Rational) -> i64 {
        let level = self.magnitude_level(x.numer().abs(), *x.denom());
        if x.is_negative() {
            -level
        } else {
            level
        }
    }

    #[inline]
    pub fn dequantize(&self, level: i64) -> Rational {
        self.step * level
    }

    /// `dequantize(quantize(x))`.
    pub fn reconstruct(&self, x: i64) -> Rational {
        self.dequantize(self.quantize(x))
    }

    /// `|x - dequantize(quantize(x))|`.
    pub fn pointwise_error(&self, x: i64) -> Rational {
        (Rational::from_integer(x) - self.reconstruct(x)).abs()
    }

    pub fn pointwise_error_rational(&self, x: Rational) -> Rational {
        (x - self.dequantize(self.quantize_rational(x))).abs()
    }

    /// Largest pointwise error over every integer of `domain`.
    pub fn max_error(&self, domain: CoefficientDomain) -> Rational {
        domain
            .iter()
            .map(|x| self.pointwise_error(x))
            .max()
            .unwrap_or_else(Rational::zero)
    }

    /// Inputs in `[lo, hi]` at which the output level changes, ascending.
    ///
    /// The positive thresholds are `(k - offset) * step` for `k >= 1`; the
    /// negative ones mirror them.
    pub fn decision_boundaries(&self, lo: Rational, hi: Rational) -> Result<Vec<Rational>> {
        if lo >= hi {
            return Err(Error::EmptyDomain {
                lo: lo.floor().to_integer(),
                hi: hi.floor().to_integer(),
            });
        }
        let zero = Rational::zero();
        let mut out = Vec::new();
        if lo < zero {
            let upper = -lo;
            let lower = if hi < zero { -hi } else { zero };
            let mut neg: Vec<Rational> =
                self.positive_thresholds(lower, upper).map(|b| -b).collect();
            neg.reverse();
            out.extend(neg);
        }
        if hi > zero {
            let lower = if lo > zero { lo } else { zero };
            out.extend(self.positive_thresholds(lower, hi));
        }
        Ok(out)
    }

    /// Thresholds `(k - offset) * step` lying in `[a, b]`, `0 <= a`.
    fn positive_thresholds(&self, a: Rational, b: Rational) -> impl Iterator<Item = Rational> {
        let first = (a / self.step + self.offset).ceil().to_integer().max(1);
        let last = (b / self.step + self.offset).floor().to_integer();
        let (step, offset) = (self.step, self.offset);
        (first..=last).map(move |k| (Rational::from_integer(k) - offset) * step)
    }
}

// 2^(k/6) for k in 0..6.
const SIXTH_ROOTS: [f64; 6] = [
    1.0,
    1.122_462_048_309_373,
    1.259_921_049_894_873_2,
    core::f64::consts::SQRT_2,
    1.587_401_051_968_199_4,
    1.781_797_436_280_678_5,
];

/// Step size for a QP in `0..=51`: `2^((qp - 4) / 6)`.
///
/// Every +6 in QP doubles the step exactly.
pub fn qp_to_qstep(qp: i32) -> Result<f64> {
    if !(0..=MAX_QP).contains(&qp) {
        return Err(Error::QpOutOfRange(qp));
    }
    let (octave, sixth) = (qp - 4).div_mod_floor(&6);
    Ok(libm::ldexp(SIXTH_ROOTS[sixth as usize], octave))
}

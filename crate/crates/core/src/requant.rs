//! Exhaustive two-stage quantization experiments.
//!
//! Every integer of a coefficient domain is quantized directly with the target
//! quantizer (error `E_a`) and through the source-then-target chain (error
//! `E_b`). Errors of one run share the target step's denominator, so the sums
//! are kept as exact integers and an error ratio of one can be decided exactly.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::quantizer::{Quantizer, Rational, TieBreak};

/// Inclusive integer interval of coefficient values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CoefficientDomain {
    lo: i64,
    hi: i64,
}

impl CoefficientDomain {
    /// Signed 16-bit range.
    pub const I16: CoefficientDomain = CoefficientDomain {
        lo: i16::MIN as i64,
        hi: i16::MAX as i64,
    };

    pub fn new(lo: i64, hi: i64) -> Result<Self> {
        if lo > hi {
            return Err(Error::EmptyDomain { lo, hi });
        }
        Ok(Self { lo, hi })
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    pub fn hi(&self) -> i64 {
        self.hi
    }

    pub fn len(&self) -> u64 {
        (self.hi - self.lo) as u64 + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn iter(&self) -> core::ops::RangeInclusive<i64> {
        self.lo..=self.hi
    }
}

impl Default for CoefficientDomain {
    fn default() -> Self {
        Self::I16
    }
}

impl fmt::Display for CoefficientDomain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum ErrorMetric {
    #[default]
    MeanAbs,
    Rms,
    Mse,
}

impl ErrorMetric {
    pub const ALL: [ErrorMetric; 3] = [ErrorMetric::MeanAbs, ErrorMetric::Rms, ErrorMetric::Mse];

    pub fn name(self) -> &'static str {
        match self {
            ErrorMetric::MeanAbs => "mean-abs",
            ErrorMetric::Rms => "rms",
            ErrorMetric::Mse => "mse",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|m| m.name() == name)
    }
}

impl fmt::Display for ErrorMetric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Exact error accumulator: each error is `numerator / denom`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ErrorTally {
    count: u64,
    denom: i64,
    sum_abs: i128,
    sum_sq: i128,
}

impl ErrorTally {
    fn new(denom: i64) -> Self {
        Self {
            count: 0,
            denom,
            sum_abs: 0,
            sum_sq: 0,
        }
    }

    #[inline]
    fn push(&mut self, numer: i64) {
        let e = numer.abs() as i128;
        self.count += 1;
        self.sum_abs += e;
        self.sum_sq += e * e;
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn value(&self, metric: ErrorMetric) -> f64 {
        if self.count == 0 {
            return 0.0;
        }
        let n = self.count as f64;
        let d = self.denom as f64;
        match metric {
            ErrorMetric::MeanAbs => self.sum_abs as f64 / (n * d),
            ErrorMetric::Mse => self.sum_sq as f64 / (n * d * d),
            ErrorMetric::Rms => libm::sqrt(self.sum_sq as f64 / n) / d,
        }
    }

    fn key(&self, metric: ErrorMetric) -> i128 {
        match metric {
            ErrorMetric::MeanAbs => self.sum_abs,
            ErrorMetric::Rms | ErrorMetric::Mse => self.sum_sq,
        }
    }

    /// `self / other` under `metric`; `None` when `other` is zero.
    ///
    /// Tallies from the same target quantizer and domain share count and
    /// denominator, so equal sums give exactly `1.0`.
    pub fn ratio_to(&self, other: &ErrorTally, metric: ErrorMetric) -> Option<f64> {
        if other.key(metric) == 0 {
            return None;
        }
        if self.same_value(other, metric) {
            return Some(1.0);
        }
        if self.count != other.count || self.denom != other.denom {
            return Some(self.value(metric) / other.value(metric));
        }
        let ratio = self.key(metric) as f64 / other.key(metric) as f64;
        Some(match metric {
            ErrorMetric::Rms => libm::sqrt(ratio),
            _ => ratio,
        })
    }

    /// Exact equality of the metric value.
    pub fn same_value(&self, other: &ErrorTally, metric: ErrorMetric) -> bool {
        let lhs = self.key(metric)
            * other.count as i128
            * (other.denom as i128).pow(metric_power(metric));
        let rhs =
            other.key(metric) * self.count as i128 * (self.denom as i128).pow(metric_power(metric));
        lhs == rhs
    }
}

fn metric_power(metric: ErrorMetric) -> u32 {
    match metric {
        ErrorMetric::MeanAbs => 1,
        _ => 2,
    }
}

/// Both error tallies of one (source, target) pair, computed in a single pass.
pub fn tally_pair(
    q_s: &Quantizer,
    q_t: &Quantizer,
    domain: CoefficientDomain,
) -> (ErrorTally, ErrorTally) {
    let (sn_s, sd_s) = (*q_s.step().numer(), *q_s.step().denom());
    let (sn_t, sd_t) = (*q_t.step().numer(), *q_t.step().denom());
    let mut direct = ErrorTally::new(sd_t);
    let mut chain = ErrorTally::new(sd_t);
    for x in domain.iter() {
        // both chains are odd-symmetric, so errors only depend on |x|
        let mag = x.unsigned_abs() as i64;
        let target = mag * sd_t;
        let one = q_t.magnitude_level(mag, 1);
        direct.push(target - one * sn_t);
        let first = q_s.magnitude_level(mag, 1);
        let two = q_t.magnitude_level(first * sn_s, sd_s);
        chain.push(target - two * sn_t);
    }
    (direct, chain)
}

/// Error of quantizing every domain value directly with `q_t` (`E_a`).
pub fn direct_tally(q_t: &Quantizer, domain: CoefficientDomain) -> ErrorTally {
    let (sn, sd) = (*q_t.step().numer(), *q_t.step().denom());
    let mut tally = ErrorTally::new(sd);
    for x in domain.iter() {
        let mag = x.unsigned_abs() as i64;
        tally.push(mag * sd - q_t.magnitude_level(mag, 1) * sn);
    }
    tally
}

pub fn direct_error(q_t: &Quantizer, domain: CoefficientDomain, metric: ErrorMetric) -> f64 {
    direct_tally(q_t, domain).value(metric)
}

/// Error of the `q_s` then `q_t` chain (`E_b`).
pub fn requant_error(
    q_s: &Quantizer,
    q_t: &Quantizer,
    domain: CoefficientDomain,
    metric: ErrorMetric,
) -> f64 {
    tally_pair(q_s, q_t, domain).1.value(metric)
}

/// `E_b / E_a`.
pub fn error_ratio(
    q_s: &Quantizer,
    q_t: &Quantizer,
    domain: CoefficientDomain,
    metric: ErrorMetric,
) -> Result<f64> {
    let (direct, chain) = tally_pair(q_s, q_t, domain);
    chain.ratio_to(&direct, metric).ok_or(Error::UndefinedRatio)
}

/// One (source step, target step) sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RequantPoint {
    pub qstep_s: Rational,
    pub qstep_t: Rational,
    pub metric: ErrorMetric,
    pub e_a: f64,
    pub e_b: f64,
    /// `None` when `e_a` is zero.
    pub ratio: Option<f64>,
    pub direct: ErrorTally,
    pub requant: ErrorTally,
}

impl RequantPoint {
    pub fn compute(
        q_s: &Quantizer,
        q_t: &Quantizer,
        domain: CoefficientDomain,
        metric: ErrorMetric,
    ) -> Self {
        let (direct, requant) = tally_pair(q_s, q_t, domain);
        Self {
            qstep_s: q_s.step(),
            qstep_t: q_t.step(),
            metric,
            e_a: direct.value(metric),
            e_b: requant.value(metric),
            ratio: requant.ratio_to(&direct, metric),
            direct,
            requant,
        }
    }

    /// Two-stage and direct errors are exactly equal.
    pub fn is_identity(&self) -> bool {
        self.requant.same_value(&self.direct, self.metric)
    }
}

/// Shared settings of sweeps and surfaces.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RequantConfig {
    pub domain: CoefficientDomain,
    pub metric: ErrorMetric,
    pub offset: Rational,
    pub tie_break: TieBreak,
}

impl RequantConfig {
    pub fn quantizer(&self, step: Rational) -> Result<Quantizer> {
        Quantizer::new(step, self.offset, self.tie_break)
    }

    pub fn point(&self, qstep_s: Rational, qstep_t: Rational) -> Result<RequantPoint> {
        let q_s = self.quantizer(qstep_s)?;
        let q_t = self.quantizer(qstep_t)?;
        Ok(RequantPoint::compute(&q_s, &q_t, self.domain, self.metric))
    }
}

/// Ratio curve for a fixed source step, one point per target step in input order.
pub fn sweep_qstep_t(
    qstep_s: Rational,
    qstep_t: &[Rational],
    cfg: &RequantConfig,
) -> Result<Vec<RequantPoint>> {
    if qstep_t.is_empty() {
        return Err(Error::EmptyInput);
    }
    qstep_t
        .iter()
        .map(|&t| {
            let p = cfg.point(qstep_s, t)?;
            p.ratio.ok_or(Error::UndefinedRatio)?;
            Ok(p)
        })
        .collect()
}

/// Grid of requantization samples, row-major with one row per source step.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorSurface {
    pub qstep_s_axis: Vec<Rational>,
    pub qstep_t_axis: Vec<Rational>,
    pub points: Vec<RequantPoint>,
}

impl ErrorSurface {
    pub fn from_points(
        qstep_s_axis: Vec<Rational>,
        qstep_t_axis: Vec<Rational>,
        points: Vec<RequantPoint>,
    ) -> Self {
        assert_eq!(points.len(), qstep_s_axis.len() * qstep_t_axis.len());
        Self {
            qstep_s_axis,
            qstep_t_axis,
            points,
        }
    }

    pub fn get(&self, s: usize, t: usize) -> &RequantPoint {
        &self.points[s * self.qstep_t_axis.len() + t]
    }

    /// Cells whose direct error is zero.
    pub fn flagged(&self) -> impl Iterator<Item = &RequantPoint> {
        self.points.iter().filter(|p| p.ratio.is_none())
    }
}

/// Every (source, target) cell; cells with a zero direct error carry `ratio: None`.
pub fn error_surface(
    qstep_s_axis: &[Rational],
    qstep_t_axis: &[Rational],
    cfg: &RequantConfig,
) -> Result<ErrorSurface> {
    if qstep_s_axis.is_empty() || qstep_t_axis.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut points = Vec::with_capacity(qstep_s_axis.len() * qstep_t_axis.len());
    for &s in qstep_s_axis {
        for &t in qstep_t_axis {
            points.push(cfg.point(s, t)?);
        }
    }
    Ok(ErrorSurface::from_points(
        qstep_s_axis.to_vec(),
        qstep_t_axis.to_vec(),
        points,
    ))
}

/// How many first-stage bins a second-stage boundary cuts, per repeating period.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SplitPeriod {
    pub split_bins: u64,
    pub period_bins: u64,
}

impl fmt::Display for SplitPeriod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.split_bins == 0 {
            write!(
                f,
                "no first-stage bin split (period {} bins)",
                self.period_bins
            )
        } else {
            write!(
                f,
                "{} of every {} first-stage bins split",
                self.split_bins, self.period_bins
            )
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OverlapReport {
    /// Share of target boundaries that are also source boundaries, counted over
    /// the whole periods of the joint boundary pattern that fit in the domain
    /// (the whole domain when none fits).
    pub aligned_fraction: f64,
    pub aligned_boundaries: u64,
    pub target_boundaries: u64,
    /// `None` when the boundary pattern repeats only after an impractically long period.
    pub split: Option<SplitPeriod>,
    /// Worst two-stage error minus worst direct error over the domain, floored at zero.
    pub max_extra_error: Rational,
}

const MAX_PERIOD_BINS: i64 = 1 << 20;

/// Compares the decision boundaries of two quantizers with the same offset.
pub fn boundary_overlap(
    q_s: &Quantizer,
    q_t: &Quantizer,
    domain: CoefficientDomain,
) -> Result<OverlapReport> {
    if q_s.offset() != q_t.offset() {
        return Err(Error::MismatchedOffsets);
    }
    let offset = q_s.offset();
    let lo = Rational::from_integer(domain.lo());
    let hi = Rational::from_integer(domain.hi());

    let is_source_boundary = |b: Rational| {
        let idx = b.abs() / q_s.step() + offset;
        idx.is_integer() && idx.to_integer() >= 1
    };
    let split = split_period(q_s, q_t);
    let (mut target, mut aligned) = (0u64, 0u64);
    for (a, b) in counting_spans(lo, hi, split.map(|sp| q_s.step() * sp.period_bins as i64)) {
        for x in q_t.decision_boundaries(a, b)? {
            target += 1;
            if is_source_boundary(x) {
                aligned += 1;
            }
        }
    }
    let aligned_fraction = if target == 0 {
        1.0
    } else {
        aligned as f64 / target as f64
    };

    let mut worst_direct = Rational::zero();
    let mut worst_chain = Rational::zero();
    for x in domain.iter() {
        let xr = Rational::from_integer(x);
        worst_direct = worst_direct.max(q_t.pointwise_error(x));
        let first = q_s.reconstruct(x);
        let two = q_t.dequantize(q_t.quantize_rational(first));
        worst_chain = worst_chain.max((xr - two).abs());
    }
    let max_extra_error = (worst_chain - worst_direct).max(Rational::zero());

    Ok(OverlapReport {
        aligned_fraction,
        aligned_boundaries: aligned,
        target_boundaries: target,
        split,
        max_extra_error,
    })
}

/// Sub-ranges of `[lo, hi]` holding whole periods on each side of zero.
fn counting_spans(
    lo: Rational,
    hi: Rational,
    period: Option<Rational>,
) -> Vec<(Rational, Rational)> {
    let zero = Rational::zero();
    if lo >= hi {
        return Vec::new();
    }
    let Some(p) = period else {
        return vec![(lo, hi)];
    };
    let whole = |len: Rational| (len / p).floor() * p;
    let up = if hi > zero { whole(hi) } else { zero };
    let down = if lo < zero { whole(-lo) } else { zero };
    if up.is_zero() && down.is_zero() {
        return vec![(lo, hi)];
    }
    let mut spans = Vec::new();
    if !down.is_zero() {
        spans.push((-down, zero));
    }
    if !up.is_zero() {
        spans.push((zero, up));
    }
    spans
}

fn split_period(q_s: &Quantizer, q_t: &Quantizer) -> Option<SplitPeriod> {
    let (s, t, f) = (q_s.step(), q_t.step(), q_s.offset());
    // both boundary sets are invariant under a shift by lcm(s, t) = numer(t/s) * s
    let period = *(t / s).numer();
    if period > MAX_PERIOD_BINS {
        return None;
    }
    let one = Rational::from_integer(1);
    let start = (one - f) * s;
    let mut split = 0u64;
    for i in 0..period {
        let a = start + s * i;
        let c = a + s;
        // first target boundary strictly above a
        let j = (a / t + f).floor().to_integer() + 1;
        let b = (Rational::from_integer(j) - f) * t;
        if b < c {
            split += 1;
        }
    }
    Some(SplitPeriod {
        split_bins: split,
        period_bins: period.to_u64()?,
    })
}

/// Reduces a positive step pair to its ratio `t / s` in lowest terms.
pub fn step_ratio(qstep_s: Rational, qstep_t: Rational) -> (i64, i64) {
    let r = qstep_t / qstep_s;
    let g = r.numer().gcd(r.denom());
    (r.numer() / g, r.denom() / g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn int(n: i64) -> Rational {
        Rational::from_integer(n)
    }

    fn trunc(step: i64) -> Quantizer {
        Quantizer::truncating(step).unwrap()
    }

    /// Straight floating-point reference: floor-based quantizers, no shortcuts.
    fn oracle(step_s: f64, step_t: f64, lo: i64, hi: i64) -> (f64, f64) {
        let (mut ea, mut eb) = (0.0, 0.0);
        for x in lo..=hi {
            let xf = x as f64;
            let q = |v: f64, s: f64| v.signum() * (v.abs() / s).floor() * s;
            ea += (xf - q(xf, step_t)).abs();
            eb += (xf - q(q(xf, step_s), step_t)).abs();
        }
        let n = (hi - lo + 1) as f64;
        (ea / n, eb / n)
    }

    #[test]
    fn direct_error_examples() {
        assert_eq!(
            direct_error(
                &trunc(1),
                CoefficientDomain::default(),
                ErrorMetric::MeanAbs
            ),
            0.0
        );
        let dom = CoefficientDomain::new(0, 19_999).unwrap();
        let (ea, _) = oracle(10.0, 20.0, 0, 19_999);
        assert_eq!(ea, 9.5);
        assert_eq!(direct_error(&trunc(20), dom, ErrorMetric::MeanAbs), 9.5);
    }

    #[test]
    fn requant_error_examples() {
        let dom = CoefficientDomain::default();
        for step in [3, 7, 20] {
            let q = trunc(step);
            assert_eq!(
                requant_error(&q, &q, dom, ErrorMetric::Rms),
                direct_error(&q, dom, ErrorMetric::Rms)
            );
        }
        let dom = CoefficientDomain::new(0, 19_999).unwrap();
        let (_, eb) = oracle(10.0, 20.0, 0, 19_999);
        assert_eq!(eb, 9.5);
        assert_eq!(
            requant_error(&trunc(10), &trunc(20), dom, ErrorMetric::MeanAbs),
            9.5
        );
    }

    #[test]
    fn ratio_examples() {
        let dom = CoefficientDomain::default();
        assert_eq!(
            error_ratio(&trunc(9), &trunc(9), dom, ErrorMetric::MeanAbs),
            Ok(1.0)
        );
        assert_eq!(
            error_ratio(&trunc(12), &trunc(24), dom, ErrorMetric::MeanAbs),
            Ok(1.0)
        );
        assert_eq!(
            error_ratio(&trunc(5), &trunc(1), dom, ErrorMetric::MeanAbs),
            Err(Error::UndefinedRatio)
        );
    }

    #[test]
    fn matches_float_oracle_on_sweep() {
        let dom = CoefficientDomain::new(-3000, 3000).unwrap();
        for t in 2..=40 {
            let (ea, eb) = oracle(12.0, t as f64, -3000, 3000);
            let p = RequantPoint::compute(&trunc(12), &trunc(t), dom, ErrorMetric::MeanAbs);
            assert!((p.e_a - ea).abs() < 1e-9, "t={t}");
            assert!((p.e_b - eb).abs() < 1e-9, "t={t}");
        }
    }

    #[test]
    fn sweep_shape() {
        let cfg = RequantConfig::default();
        let t: Vec<Rational> = [12, 24, 36, 13].into_iter().map(int).collect();
        let pts = sweep_qstep_t(int(12), &t, &cfg).unwrap();
        assert_eq!(pts.len(), 4);
        for p in &pts[..3] {
            assert!(p.is_identity());
            assert_eq!(p.ratio, Some(1.0));
        }
        assert!(pts[3].ratio.unwrap() > 1.0);
        assert_eq!(sweep_qstep_t(int(12), &[], &cfg), Err(Error::EmptyInput));
        assert_eq!(
            sweep_qstep_t(int(12), &[int(1)], &cfg),
            Err(Error::UndefinedRatio)
        );
    }

    #[test]
    fn surface_flags_degenerate_cells() {
        let cfg = RequantConfig {
            domain: CoefficientDomain::new(-500, 500).unwrap(),
            ..Default::default()
        };
        let axis = vec![int(1), int(2), int(5)];
        let surf = error_surface(&axis, &axis, &cfg).unwrap();
        assert_eq!(surf.points.len(), 9);
        assert_eq!(surf.flagged().count(), 3);
        for i in 0..3 {
            let p = surf.get(i, i);
            if p.ratio.is_some() {
                assert_eq!(p.ratio, Some(1.0));
            }
        }
        let single = error_surface(&[int(7)], &[int(11)], &cfg).unwrap();
        let direct = error_ratio(&trunc(7), &trunc(11), cfg.domain, cfg.metric).unwrap();
        assert_eq!(single.points[0].ratio, Some(direct));
        assert!(error_surface(&[], &axis, &cfg).is_err());
    }

    #[test]
    fn overlap_examples() {
        let dom = CoefficientDomain::default();
        let same = boundary_overlap(&trunc(10), &trunc(10), dom).unwrap();
        assert_eq!(same.aligned_fraction, 1.0);
        assert_eq!(same.max_extra_error, int(0));
        let double = boundary_overlap(&trunc(10), &trunc(20), dom).unwrap();
        assert_eq!(double.aligned_fraction, 1.0);
        assert_eq!(double.max_extra_error, int(0));
        let half = boundary_overlap(&trunc(10), &trunc(25), dom).unwrap();
        assert_eq!(half.aligned_fraction, 0.5);
        assert_eq!(half.max_extra_error, int(5));
        assert_eq!(
            half.split,
            Some(SplitPeriod {
                split_bins: 1,
                period_bins: 5
            })
        );
        let q = Quantizer::new(int(10), Rational::new(1, 2), TieBreak::TowardZero).unwrap();
        assert_eq!(
            boundary_overlap(&trunc(10), &q, dom),
            Err(Error::MismatchedOffsets)
        );
    }

    #[test]
    fn finer_target_splits_every_bin() {
        let rep = boundary_overlap(
            &trunc(12),
            &trunc(4),
            CoefficientDomain::new(-1200, 1200).unwrap(),
        )
        .unwrap();
        assert_eq!(
            rep.split,
            Some(SplitPeriod {
                split_bins: 1,
                period_bins: 1
            })
        );
        // every third target boundary lands on a source boundary
        assert!((rep.aligned_fraction - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn fraction_ignores_partial_periods() {
        let dom = CoefficientDomain::default();
        for s in [10, 12, 20, 40] {
            let rep = boundary_overlap(&trunc(s), &trunc(s * 5 / 2), dom).unwrap();
            assert_eq!(rep.aligned_fraction, 0.5, "q_s = {s}");
            assert_eq!(rep.max_extra_error, int(s) / 2);
            assert_eq!(rep.target_boundaries, 2 * rep.aligned_boundaries);
        }
        // domain narrower than one period: counted as is
        let tiny = boundary_overlap(
            &trunc(20),
            &trunc(50),
            CoefficientDomain::new(-60, 60).unwrap(),
        )
        .unwrap();
        assert_eq!((tiny.aligned_boundaries, tiny.target_boundaries), (0, 2));
    }

    #[test]
    fn tally_ratio_with_different_denominators() {
        let a = ErrorTally {
            count: 4,
            denom: 2,
            sum_abs: 8,
            sum_sq: 20,
        };
        let b = ErrorTally {
            count: 4,
            denom: 1,
            sum_abs: 4,
            sum_sq: 5,
        };
        assert!(a.same_value(&b, ErrorMetric::MeanAbs));
        assert!(a.same_value(&b, ErrorMetric::Mse));
        assert_eq!(a.ratio_to(&b, ErrorMetric::MeanAbs), Some(1.0));
    }

    #[test]
    fn domain_validation() {
        assert!(CoefficientDomain::new(3, 2).is_err());
        assert_eq!(CoefficientDomain::default().len(), 65_536);
    }
}

//! Cascaded pixel-domain transcoding harness.
//!
//! An original plane `O` is encoded at `qp_s` and decoded into `R`; `R` is
//! re-encoded at `qp_t` and decoded into `T`. The quality of `T` is compared
//! with a direct encoding `C` of `O` at the same rate, read off the direct
//! rate-distortion curve by interpolating PSNR against `log2(rate)`.

use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use crate::codec::{decode_plane, encode_plane_with, estimate_rate, psnr, CodecConfig, Plane};
use crate::error::{Error, Result};
use crate::quantizer::MAX_QP;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RDPoint {
    pub qp: u8,
    /// Bits per sample.
    pub rate: f64,
    /// dB against the original.
    pub psnr: f64,
}

/// Direct-encoding curve, cleaned so that rate and PSNR both strictly increase.
#[derive(Debug, Clone, PartialEq)]
pub struct RDCurve {
    points: Vec<RDPoint>,
    raw: Vec<RDPoint>,
}

impl RDCurve {
    /// Sorts by rate, drops zero-rate points, merges equal rates keeping the
    /// best PSNR and removes points that a cheaper point already beats.
    pub fn from_points(raw: Vec<RDPoint>) -> Result<Self> {
        let mut pts: Vec<RDPoint> = raw.iter().copied().filter(|p| p.rate > 0.0).collect();
        pts.sort_by(|a, b| {
            a.rate
                .total_cmp(&b.rate)
                .then(b.psnr.total_cmp(&a.psnr))
                .then(a.qp.cmp(&b.qp))
        });
        let mut points: Vec<RDPoint> = Vec::with_capacity(pts.len());
        for p in pts {
            match points.last() {
                Some(last) if last.rate == p.rate => continue,
                Some(last) if last.psnr >= p.psnr => continue,
                _ => points.push(p),
            }
        }
        if points.is_empty() {
            return Err(Error::EmptyCurve);
        }
        Ok(Self { points, raw })
    }

    pub fn points(&self) -> &[RDPoint] {
        &self.points
    }

    /// Every encoded point, in the order the QPs were given.
    pub fn raw(&self) -> &[RDPoint] {
        &self.raw
    }

    pub fn min_rate(&self) -> f64 {
        self.points[0].rate
    }

    pub fn max_rate(&self) -> f64 {
        self.points[self.points.len() - 1].rate
    }

    /// PSNR at `rate`, linear in `log2(rate)` between bracketing points.
    pub fn psnr_at(&self, rate: f64) -> Result<f64> {
        let (min, max) = (self.min_rate(), self.max_rate());
        if !(rate >= min && rate <= max) {
            return Err(Error::OutOfSpan { rate, min, max });
        }
        let idx = self.points.partition_point(|p| p.rate < rate);
        let hi = self.points[idx];
        if hi.rate == rate {
            return Ok(hi.psnr);
        }
        let lo = self.points[idx - 1];
        let (l0, l1) = (libm::log2(lo.rate), libm::log2(hi.rate));
        let t = (libm::log2(rate) - l0) / (l1 - l0);
        Ok(lo.psnr + t * (hi.psnr - lo.psnr))
    }
}

pub fn interp_psnr_at_rate(curve: &RDCurve, rate: f64) -> Result<f64> {
    curve.psnr_at(rate)
}

fn check_qp(qp: i32) -> Result<u8> {
    if (0..=MAX_QP).contains(&qp) {
        Ok(qp as u8)
    } else {
        Err(Error::QpOutOfRange(qp))
    }
}

/// Encodes and decodes `plane` at `qp`.
pub fn rd_point(plane: &Plane, qp: i32, cfg: &CodecConfig) -> Result<(RDPoint, Plane)> {
    let qp8 = check_qp(qp)?;
    let enc = encode_plane_with(plane, qp, cfg)?;
    let dec = decode_plane(&enc)?;
    let point = RDPoint {
        qp: qp8,
        rate: estimate_rate(&enc),
        psnr: psnr(plane, &dec)?,
    };
    Ok((point, dec))
}

pub fn build_rd_curve(plane: &Plane, qps: &[i32], cfg: &CodecConfig) -> Result<RDCurve> {
    if qps.is_empty() {
        return Err(Error::EmptyInput);
    }
    let raw = qps
        .iter()
        .map(|&qp| rd_point(plane, qp, cfg).map(|(p, _)| p))
        .collect::<Result<Vec<_>>>()?;
    RDCurve::from_points(raw)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RecordFlag {
    Ok,
    /// Target rate outside the direct curve; no ΔPSNR.
    OutOfSpan,
    /// Source or target rate is zero; the transcoding ratio is undefined.
    ZeroRate,
}

impl RecordFlag {
    pub fn name(self) -> &'static str {
        match self {
            RecordFlag::Ok => "",
            RecordFlag::OutOfSpan => "out_of_span",
            RecordFlag::ZeroRate => "zero_rate",
        }
    }
}

impl fmt::Display for RecordFlag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One O -> R -> T run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TranscodeRecord {
    pub plane_id: u32,
    pub qp_s: u8,
    pub qp_t: u8,
    pub source_rate: f64,
    pub target_rate: f64,
    /// `target_rate / source_rate`.
    pub ratio: Option<f64>,
    /// R against O.
    pub psnr_r: f64,
    /// T against O.
    pub psnr_t: f64,
    /// Direct encoding of O at `target_rate`.
    pub psnr_c: Option<f64>,
    /// `psnr_t - psnr_c`.
    pub delta_psnr: Option<f64>,
    pub flag: RecordFlag,
}

impl TranscodeRecord {
    pub fn is_usable(&self) -> bool {
        self.flag == RecordFlag::Ok
    }
}

/// First-stage result shared by every target QP.
#[derive(Debug, Clone)]
pub struct SourceEncoding {
    pub qp_s: u8,
    pub rate: f64,
    pub psnr: f64,
    pub decoded: Plane,
}

impl SourceEncoding {
    pub fn new(original: &Plane, qp_s: i32, cfg: &CodecConfig) -> Result<Self> {
        let (point, decoded) = rd_point(original, qp_s, cfg)?;
        Ok(Self {
            qp_s: point.qp,
            rate: point.rate,
            psnr: point.psnr,
            decoded,
        })
    }

    /// Re-encodes the decoded source at `qp_t` and scores it against `original`.
    pub fn transcode(
        &self,
        original: &Plane,
        plane_id: u32,
        qp_t: i32,
        direct: &RDCurve,
        cfg: &CodecConfig,
    ) -> Result<TranscodeRecord> {
        let qp_t8 = check_qp(qp_t)?;
        let enc = encode_plane_with(&self.decoded, qp_t, cfg)?;
        let target_rate = estimate_rate(&enc);
        let psnr_t = psnr(original, &decode_plane(&enc)?)?;
        let ratio = (self.rate > 0.0 && target_rate > 0.0).then(|| target_rate / self.rate);
        let (flag, psnr_c) = match (ratio, direct.psnr_at(target_rate)) {
            (None, _) => (RecordFlag::ZeroRate, None),
            (Some(_), Ok(c)) => (RecordFlag::Ok, Some(c)),
            (Some(_), Err(_)) => (RecordFlag::OutOfSpan, None),
        };
        Ok(TranscodeRecord {
            plane_id,
            qp_s: self.qp_s,
            qp_t: qp_t8,
            source_rate: self.rate,
            target_rate,
            ratio,
            psnr_r: self.psnr,
            psnr_t,
            psnr_c,
            delta_psnr: psnr_c.map(|c| psnr_t - c),
            flag,
        })
    }
}

/// Single O -> R -> T run.
pub fn transcode(
    original: &Plane,
    qp_s: i32,
    qp_t: i32,
    direct: &RDCurve,
    cfg: &CodecConfig,
) -> Result<TranscodeRecord> {
    SourceEncoding::new(original, qp_s, cfg)?.transcode(original, 0, qp_t, direct, cfg)
}

/// Direct curve over every QP.
pub fn full_curve(plane: &Plane, cfg: &CodecConfig) -> Result<RDCurve> {
    let qps: Vec<i32> = (0..=MAX_QP).collect();
    build_rd_curve(plane, &qps, cfg)
}

/// One record per `(qp_s, qp_t)` pair, `qp_s`-major, against the full direct curve.
pub fn full_sweep(
    plane: &Plane,
    plane_id: u32,
    qp_s_set: &[i32],
    qp_t_set: &[i32],
    cfg: &CodecConfig,
) -> Result<Vec<TranscodeRecord>> {
    let curve = full_curve(plane, cfg)?;
    full_sweep_with_curve(plane, plane_id, &curve, qp_s_set, qp_t_set, cfg)
}

pub fn full_sweep_with_curve(
    plane: &Plane,
    plane_id: u32,
    curve: &RDCurve,
    qp_s_set: &[i32],
    qp_t_set: &[i32],
    cfg: &CodecConfig,
) -> Result<Vec<TranscodeRecord>> {
    if qp_s_set.is_empty() || qp_t_set.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut out = Vec::with_capacity(qp_s_set.len() * qp_t_set.len());
    for &qp_s in qp_s_set {
        let src = SourceEncoding::new(plane, qp_s, cfg)?;
        for &qp_t in qp_t_set {
            out.push(src.transcode(plane, plane_id, qp_t, curve, cfg)?);
        }
    }
    Ok(out)
}

/// Order-independent mean: values are summed in sorted order.
fn stable_mean(values: &mut [f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_by(f64::total_cmp);
    Some(values.iter().sum::<f64>() / values.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioBin {
    pub ratio_lo: f64,
    pub ratio_hi: f64,
    /// `None` for an empty bin.
    pub mean_delta_psnr: Option<f64>,
    pub count: usize,
}

/// Mean ΔPSNR per transcoding-ratio bin; all usable records are pooled.
#[derive(Debug, Clone, PartialEq)]
pub struct RatioProfile {
    pub bin_width: f64,
    pub bins: Vec<RatioBin>,
}

impl RatioProfile {
    pub fn total_count(&self) -> usize {
        self.bins.iter().map(|b| b.count).sum()
    }
}

/// Default bin width of ratio profiles (5 percentage points).
pub const DEFAULT_BIN_WIDTH: f64 = 0.05;

/// Buckets usable records into `[i w, (i + 1) w)` bins from 0 up to the
/// highest occupied bin. Flagged records are excluded.
pub fn aggregate_by_ratio(records: &[TranscodeRecord], bin_width: f64) -> Result<RatioProfile> {
    if !(bin_width > 0.0 && bin_width.is_finite()) {
        return Err(Error::InvalidBinWidth);
    }
    let usable: Vec<(usize, f64)> = records
        .iter()
        .filter_map(|r| {
            let ratio = r.ratio?;
            let delta = r.delta_psnr?;
            r.is_usable()
                .then(|| (libm::floor(ratio / bin_width) as usize, delta))
        })
        .collect();
    let nbins = usable.iter().map(|&(i, _)| i + 1).max().unwrap_or(0);
    let mut groups: Vec<Vec<f64>> = (0..nbins).map(|_| Vec::new()).collect();
    for (i, d) in usable {
        groups[i].push(d);
    }
    let bins = groups
        .into_iter()
        .enumerate()
        .map(|(i, mut vals)| RatioBin {
            ratio_lo: i as f64 * bin_width,
            ratio_hi: (i + 1) as f64 * bin_width,
            count: vals.len(),
            mean_delta_psnr: stable_mean(&mut vals),
        })
        .collect();
    Ok(RatioProfile { bin_width, bins })
}

/// Pooled mean `|ΔPSNR|` over usable records with `lo <= ratio < hi`.
pub fn mean_abs_delta<'a, I>(records: I, lo: f64, hi: f64) -> Option<f64>
where
    I: IntoIterator<Item = &'a TranscodeRecord>,
{
    let mut vals: Vec<f64> = records
        .into_iter()
        .filter(|r| r.is_usable())
        .filter_map(|r| {
            let ratio = r.ratio?;
            (ratio >= lo && ratio < hi).then_some(libm::fabs(r.delta_psnr?))
        })
        .collect();
    stable_mean(&mut vals)
}

/// Best target QP near one source QP.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalMinimum {
    pub plane_id: u32,
    pub qp_s: u8,
    /// Argmin of `|ΔPSNR|` over the usable neighbours; ties go to the lower QP.
    pub best_qp_t: Option<u8>,
    pub best_delta_psnr: Option<f64>,
    pub delta_at_qp_s: Option<f64>,
}

impl LocalMinimum {
    pub fn at_source_qp(&self) -> bool {
        self.best_qp_t == Some(self.qp_s)
    }
}

/// QPs whose neighbourhoods are reported by default.
pub const REPORT_QPS: [u8; 4] = [22, 28, 32, 38];
/// Default half-width of the target-QP neighbourhood.
pub const REPORT_RADIUS: u8 = 2;

/// For every plane in `records` and every `qp_s` in `qp_s_list`, the `qp_t`
/// within `qp_s ± radius` (clamped to valid QPs) minimizing `|ΔPSNR|`.
pub fn local_minimum_report(
    records: &[TranscodeRecord],
    qp_s_list: &[u8],
    radius: u8,
) -> Result<Vec<LocalMinimum>> {
    let mut planes: Vec<u32> = records.iter().map(|r| r.plane_id).collect();
    planes.sort_unstable();
    planes.dedup();
    let mut out = Vec::new();
    for &plane_id in &planes {
        for &qp_s in qp_s_list {
            let lo = qp_s.saturating_sub(radius);
            let hi = (qp_s as u16 + radius as u16).min(MAX_QP as u16) as u8;
            let mut best: Option<(u8, f64)> = None;
            let mut at_qp_s = None;
            for qp_t in lo..=hi {
                let rec = records
                    .iter()
                    .find(|r| r.plane_id == plane_id && r.qp_s == qp_s && r.qp_t == qp_t)
                    .ok_or(Error::MissingNeighbor {
                        plane_id,
                        qp_s,
                        qp_t,
                    })?;
                if qp_t == qp_s {
                    at_qp_s = rec.delta_psnr;
                }
                let Some(d) = rec.delta_psnr.filter(|_| rec.is_usable()) else {
                    continue;
                };
                let better = match best {
                    None => true,
                    Some((_, b)) => libm::fabs(d).total_cmp(&libm::fabs(b)) == Ordering::Less,
                };
                if better {
                    best = Some((qp_t, d));
                }
            }
            out.push(LocalMinimum {
                plane_id,
                qp_s,
                best_qp_t: best.map(|b| b.0),
                best_delta_psnr: best.map(|b| b.1),
                delta_at_qp_s: at_qp_s,
            });
        }
    }
    Ok(out)
}

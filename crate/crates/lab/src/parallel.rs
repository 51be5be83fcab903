//! Rayon-backed drivers for the exhaustive experiments. Results match the
//! sequential functions in `requant-core` element for element.

use rayon::prelude::*;
use requant_core::codec::CodecConfig;
use requant_core::cpdt::{rd_point, RDCurve, SourceEncoding, TranscodeRecord};
use requant_core::requant::{ErrorSurface, RequantConfig, RequantPoint};
use requant_core::{Error, Plane, Rational};

type CoreResult<T> = Result<T, Error>;

pub fn sweep_qstep_t(
    qstep_s: Rational,
    qstep_t: &[Rational],
    cfg: &RequantConfig,
) -> CoreResult<Vec<RequantPoint>> {
    if qstep_t.is_empty() {
        return Err(Error::EmptyInput);
    }
    qstep_t
        .par_iter()
        .map(|&t| {
            let p = cfg.point(qstep_s, t)?;
            p.ratio.ok_or(Error::UndefinedRatio)?;
            Ok(p)
        })
        .collect()
}

pub fn error_surface(
    s_axis: &[Rational],
    t_axis: &[Rational],
    cfg: &RequantConfig,
) -> CoreResult<ErrorSurface> {
    if s_axis.is_empty() || t_axis.is_empty() {
        return Err(Error::EmptyInput);
    }
    let cells: Vec<(Rational, Rational)> = s_axis
        .iter()
        .flat_map(|&s| t_axis.iter().map(move |&t| (s, t)))
        .collect();
    let points = cells
        .par_iter()
        .map(|&(s, t)| cfg.point(s, t))
        .collect::<CoreResult<Vec<_>>>()?;
    Ok(ErrorSurface::from_points(
        s_axis.to_vec(),
        t_axis.to_vec(),
        points,
    ))
}

pub fn build_rd_curve(plane: &Plane, qps: &[i32], cfg: &CodecConfig) -> CoreResult<RDCurve> {
    if qps.is_empty() {
        return Err(Error::EmptyInput);
    }
    let raw = qps
        .par_iter()
        .map(|&qp| rd_point(plane, qp, cfg).map(|(p, _)| p))
        .collect::<CoreResult<Vec<_>>>()?;
    RDCurve::from_points(raw)
}

/// `qp_s`-major records for every pair, scored against `curve`.
pub fn full_sweep_with_curve(
    plane: &Plane,
    plane_id: u32,
    curve: &RDCurve,
    qp_s_set: &[i32],
    qp_t_set: &[i32],
    cfg: &CodecConfig,
) -> CoreResult<Vec<TranscodeRecord>> {
    if qp_s_set.is_empty() || qp_t_set.is_empty() {
        return Err(Error::EmptyInput);
    }
    let sources = qp_s_set
        .par_iter()
        .map(|&qp| SourceEncoding::new(plane, qp, cfg))
        .collect::<CoreResult<Vec<_>>>()?;
    let pairs: Vec<(usize, i32)> = (0..sources.len())
        .flat_map(|s| qp_t_set.iter().map(move |&t| (s, t)))
        .collect();
    pairs
        .par_iter()
        .map(|&(s, qp_t)| sources[s].transcode(plane, plane_id, qp_t, curve, cfg))
        .collect()
}

/// Full 0..=51 direct curve and sweep over the given QP sets.
pub fn full_sweep(
    plane: &Plane,
    plane_id: u32,
    qp_s_set: &[i32],
    qp_t_set: &[i32],
    cfg: &CodecConfig,
) -> CoreResult<(RDCurve, Vec<TranscodeRecord>)> {
    let all: Vec<i32> = requant_core::codec::all_qps().collect();
    let curve = build_rd_curve(plane, &all, cfg)?;
    let records = full_sweep_with_curve(plane, plane_id, &curve, qp_s_set, qp_t_set, cfg)?;
    Ok((curve, records))
}

//! Reproduction checks run by `requant-lab verify`.
//!
//! Each check returns an [`Outcome`]; a failed check is reported, not raised.

use std::time::{Duration, Instant};

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use requant_core::codec::{synth_content, CodecConfig, ContentSpec};
use requant_core::cpdt::{mean_abs_delta, TranscodeRecord, REPORT_QPS};
use requant_core::quantizer::Quantizer;
use requant_core::requant::{boundary_overlap, RequantConfig};
use requant_core::transform::{roundtrip_error_stats, Block};
use requant_core::{ErrorMetric, Rational};

use crate::{commands, parallel, Result};

#[derive(Debug, Clone)]
pub struct Outcome {
    pub id: u8,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
}

#[derive(Debug, Clone)]
pub struct VerifyConfig {
    pub plane_size: usize,
    pub seeds: [u64; 3],
    pub complexities: [f64; 3],
    pub transform_blocks: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            plane_size: 128,
            seeds: [1, 2, 3],
            complexities: [0.3, 0.6, 0.9],
            transform_blocks: 100_000,
        }
    }
}

fn int(n: i64) -> Rational {
    Rational::from_integer(n)
}

fn frac(n: i64, d: i64) -> Rational {
    Rational::new(n, d)
}

fn truncating() -> RequantConfig {
    RequantConfig::default()
}

fn timed(
    id: u8,
    title: &'static str,
    budget: Option<Duration>,
    f: impl FnOnce() -> Result<(bool, String)>,
) -> Outcome {
    let start = Instant::now();
    let (mut passed, mut detail) = f().unwrap_or_else(|e| (false, format!("error: {e}")));
    let elapsed = start.elapsed();
    if let Some(b) = budget {
        if elapsed > b {
            passed = false;
            detail.push_str(&format!("; over the {}s budget", b.as_secs()));
        }
    }
    Outcome {
        id,
        title,
        passed,
        detail,
        elapsed,
    }
}

pub fn integer_multiple_identity() -> Outcome {
    timed(
        1,
        "integer-multiple identity",
        Some(Duration::from_secs(5)),
        || {
            let cfg = truncating();
            let mut ok = true;
            let mut parts = Vec::new();
            for t in [12, 24, 36] {
                let p = cfg.point(int(12), int(t))?;
                ok &= p.is_identity() && p.ratio == Some(1.0);
                parts.push(format!("q_t={t}: {:?}", p.ratio));
            }
            Ok((ok, parts.join(", ")))
        },
    )
}

pub fn pointwise_dominance() -> Outcome {
    timed(2, "pointwise dominance", None, || {
        let axis: Vec<Rational> = (2..=40).map(int).collect();
        let cfg = truncating();
        let surface = parallel::error_surface(&axis, &axis, &cfg)?;
        let mut ratio_violations = 0;
        for p in &surface.points {
            for m in ErrorMetric::ALL {
                if p.requant.ratio_to(&p.direct, m).is_some_and(|r| r < 1.0) {
                    ratio_violations += 1;
                }
            }
        }
        let mut point_violations = 0u64;
        let q_s = Quantizer::truncating(12)?;
        for t in 2..=40 {
            let q_t = Quantizer::truncating(t)?;
            for x in cfg.domain.iter() {
                let two = q_t.dequantize(q_t.quantize_rational(q_s.reconstruct(x)));
                let d = int(x) - two;
                let e = if d < int(0) { -d } else { d };
                if e < q_t.pointwise_error(x) {
                    point_violations += 1;
                }
            }
        }
        Ok((
            ratio_violations == 0 && point_violations == 0,
            format!(
                "{} cells x 3 metrics: {ratio_violations} ratio violations; q_s=12 row: {point_violations} pointwise violations",
                surface.points.len()
            ),
        ))
    })
}

fn ratio(q_s: Rational, q_t: Rational) -> Result<f64> {
    Ok(truncating()
        .point(q_s, q_t)?
        .ratio
        .ok_or(requant_core::Error::UndefinedRatio)?)
}

pub fn off_multiple_spike() -> Outcome {
    timed(3, "off-multiple spike", None, || {
        let t: Vec<Rational> = (2..=40).map(int).collect();
        let pts = parallel::sweep_qstep_t(int(12), &t, &truncating())?;
        let max = pts.iter().filter_map(|p| p.ratio).fold(f64::MIN, f64::max);
        let r13 = pts[11].ratio.unwrap_or(0.0);
        Ok((
            max > 2.0 && r13 > 1.0,
            format!("max ratio {max:.4}, ratio(13) {r13:.4}"),
        ))
    })
}

pub fn decreasing_trend() -> Outcome {
    timed(4, "decreasing off-multiple trend", None, || {
        let (r13, r25, r37) = (
            ratio(int(12), int(13))?,
            ratio(int(12), int(25))?,
            ratio(int(12), int(37))?,
        );
        Ok((
            r37 < r25 && r25 < r13,
            format!("ratio(37) {r37:.4} < ratio(25) {r25:.4} < ratio(13) {r13:.4}"),
        ))
    })
}

pub fn half_integer_minima() -> Outcome {
    timed(5, "half-integer minima", None, || {
        let mut ok = true;
        let mut parts = Vec::new();
        for s in [10, 12, 20] {
            let qs = int(s);
            let at = |k: i64| ratio(qs, qs * frac(k, 10));
            let (lo, mid, hi) = (at(23)?, at(25)?, at(27)?);
            let q_s = Quantizer::truncating(s)?;
            let q_t = truncating().quantizer(qs * frac(5, 2))?;
            let ov = boundary_overlap(&q_s, &q_t, truncating().domain)?;
            let good = mid < lo
                && mid < hi
                && mid > 1.0
                && ov.aligned_fraction == 0.5
                && ov.max_extra_error == qs / 2;
            ok &= good;
            parts.push(format!(
                "q_s={s}: {lo:.4}/{mid:.4}/{hi:.4} aligned {} extra {}",
                ov.aligned_fraction, ov.max_extra_error
            ));
        }
        Ok((ok, parts.join("; ")))
    })
}

pub fn convention_audit() -> Outcome {
    timed(
        6,
        "published-example convention audit",
        Some(Duration::from_secs(30)),
        || {
            let rows = commands::audit_rows(&truncating())?;
            let complete =
                rows.len() == 12 && rows.iter().all(|r| r.e_a.is_finite() && r.e_b.is_finite());
            let matches: Vec<String> = rows
                .iter()
                .filter(|r| r.matches_published())
                .map(|r| format!("offset {} {}", r.offset, r.metric))
                .collect();
            let zero = &rows[0];
            Ok((
                complete,
                format!(
                    "{} conventions tabulated, {} match (offset 0 mean-abs gives {:.4}/{:.4})",
                    rows.len(),
                    matches.len(),
                    zero.e_a,
                    zero.e_b
                ),
            ))
        },
    )
}

pub fn transform_near_lossless(blocks: usize) -> Outcome {
    timed(
        7,
        "transform near-losslessness",
        Some(Duration::from_secs(60)),
        || {
            let mut rng = ChaCha8Rng::seed_from_u64(0x7a11);
            let mut list = Vec::with_capacity(blocks);
            for i in 0..blocks {
                let n = if i % 2 == 0 { 4 } else { 8 };
                let samples = (0..n * n)
                    .map(|_| (rng.next_u32() % 511) as i32 - 255)
                    .collect();
                list.push(Block::new(n, samples)?);
            }
            let stats = roundtrip_error_stats(&list)?;
            Ok((
                stats.max_abs <= 2 && stats.max_abs >= 1,
                format!(
                    "{} blocks, max error {}, mean {:.4}",
                    blocks, stats.max_abs, stats.mean_abs
                ),
            ))
        },
    )
}

/// Records of the full 52 x 52 sweep for each test plane.
pub struct PlaneSweeps {
    pub planes: Vec<Vec<TranscodeRecord>>,
    pub elapsed: Duration,
}

pub fn sweep_planes(cfg: &VerifyConfig) -> Result<PlaneSweeps> {
    let start = Instant::now();
    let qps: Vec<i32> = (0..=51).collect();
    let codec = CodecConfig::default();
    let mut planes = Vec::new();
    for (i, (&seed, &complexity)) in cfg.seeds.iter().zip(&cfg.complexities).enumerate() {
        let plane = synth_content(&ContentSpec {
            seed,
            complexity,
            width: cfg.plane_size,
            height: cfg.plane_size,
        })?;
        planes.push(parallel::full_sweep(&plane, i as u32, &qps, &qps, &codec)?.1);
    }
    Ok(PlaneSweeps {
        planes,
        elapsed: start.elapsed(),
    })
}

fn find(recs: &[TranscodeRecord], qp_s: u8, qp_t: u8) -> Option<&TranscodeRecord> {
    recs.iter().find(|r| r.qp_s == qp_s && r.qp_t == qp_t)
}

pub fn local_minimum(sweeps: &PlaneSweeps) -> Outcome {
    let elapsed = sweeps.elapsed;
    let mut o = timed(8, "same-QP local minimum", None, || {
        let (mut hits, mut cases, mut negative) = (0, 0, 0);
        let mut deltas = Vec::new();
        for recs in &sweeps.planes {
            for qp_s in REPORT_QPS {
                cases += 1;
                let mut best: Option<(u8, f64)> = None;
                for qp_t in qp_s - 2..=qp_s + 2 {
                    if let Some(d) = find(recs, qp_s, qp_t).and_then(|r| r.delta_psnr) {
                        if best.is_none_or(|(_, b)| d.abs() < b.abs()) {
                            best = Some((qp_t, d));
                        }
                    }
                }
                if best.map(|b| b.0) == Some(qp_s) {
                    hits += 1;
                }
                let d = find(recs, qp_s, qp_s).and_then(|r| r.delta_psnr);
                if d.is_some_and(|d| d < 0.0) {
                    negative += 1;
                }
                deltas.push(d.map(|d| format!("{d:.3}")).unwrap_or("-".into()));
            }
        }
        let ok = hits * 4 >= cases * 3 && negative == cases;
        Ok((
            ok,
            format!(
                "argmin at qp_s in {hits}/{cases}; delta at qp_s < 0 in {negative}/{cases} [{}]",
                deltas.join(" ")
            ),
        ))
    });
    o.elapsed += elapsed;
    if elapsed > Duration::from_secs(600) {
        o.passed = false;
        o.detail.push_str("; sweep over the 600s budget");
    }
    o
}

pub fn high_ratio_degradation(sweeps: &PlaneSweeps) -> Outcome {
    timed(9, "degradation above ratio 100%", None, || {
        let all: Vec<TranscodeRecord> = sweeps.planes.iter().flatten().copied().collect();
        let high = mean_abs_delta(&all, 1.2, f64::INFINITY);
        let band = mean_abs_delta(&all, 0.8, 1.0);
        let ok = matches!((high, band), (Some(h), Some(b)) if h > b);
        Ok((
            ok,
            format!("mean |dPSNR| ratio>=1.2: {high:.4?}, 0.8..1.0: {band:.4?}"),
        ))
    })
}

pub fn source_rate_dependence(sweeps: &PlaneSweeps) -> Outcome {
    timed(10, "source-bitrate dependence", None, || {
        let mut ok = true;
        let mut parts = Vec::new();
        for (i, recs) in sweeps.planes.iter().enumerate() {
            let m = |q: u8| mean_abs_delta(recs.iter().filter(|r| r.qp_s == q), 1.0, f64::INFINITY);
            let (m22, m38) = (m(22), m(38));
            ok &= matches!((m22, m38), (Some(a), Some(b)) if b > a);
            parts.push(format!("plane {i}: qp_s 38 {m38:.4?} vs qp_s 22 {m22:.4?}"));
        }
        Ok((ok, parts.join("; ")))
    })
}

pub fn determinism(sweeps: &PlaneSweeps) -> Outcome {
    timed(11, "determinism and record count", None, || {
        let cfg = truncating();
        let t: Vec<Rational> = (2..=40).map(int).collect();
        let twice = |f: &dyn Fn() -> Result<Vec<u8>>| -> Result<bool> { Ok(f()? == f()?) };
        let spec = ContentSpec {
            seed: 5,
            complexity: 0.5,
            width: 48,
            height: 40,
        };
        let plane = synth_content(&spec)?;
        let codec = CodecConfig::default();
        let qps: Vec<i32> = (0..=51).collect();
        let same = twice(&|| commands::requant_sweep(int(12), &t, &cfg)?.to_bytes())?
            && twice(&|| commands::gen_content(&spec))?
            && twice(&|| commands::rd_curve(&plane, &qps, &codec)?.to_bytes())?
            && twice(&|| {
                let o = commands::cpdt_sweep(
                    std::slice::from_ref(&plane),
                    &["p".into()],
                    &qps[20..30],
                    &qps[18..32],
                    &codec,
                    0.05,
                )?;
                Ok([
                    o.records.to_bytes()?,
                    o.profile.to_bytes()?,
                    o.local_minimum.to_bytes()?,
                ]
                .concat())
            })?;
        let counts: Vec<usize> = sweeps.planes.iter().map(Vec::len).collect();
        Ok((
            same && counts.iter().all(|&c| c == 2704),
            format!("reruns identical: {same}; records per plane {counts:?}"),
        ))
    })
}

pub fn run_all(cfg: &VerifyConfig) -> Vec<Outcome> {
    let mut out = vec![
        integer_multiple_identity(),
        pointwise_dominance(),
        off_multiple_spike(),
        decreasing_trend(),
        half_integer_minima(),
        convention_audit(),
        transform_near_lossless(cfg.transform_blocks),
    ];
    match sweep_planes(cfg) {
        Ok(s) => {
            out.push(local_minimum(&s));
            out.push(high_ratio_degradation(&s));
            out.push(source_rate_dependence(&s));
            out.push(determinism(&s));
        }
        Err(e) => {
            for (id, title) in [
                (8, "same-QP local minimum"),
                (9, "degradation above ratio 100%"),
                (10, "source-bitrate dependence"),
                (11, "determinism and record count"),
            ] {
                out.push(Outcome {
                    id,
                    title,
                    passed: false,
                    detail: format!("sweep failed: {e}"),
                    elapsed: Duration::ZERO,
                });
            }
        }
    }
    out
}

//! Bodies of the command-line subcommands. Each returns the finished output
//! documents; writing them is left to the caller.

use requant_core::codec::{synth_content, CodecConfig, ContentSpec, PSNR_CAP};
use requant_core::cpdt::{
    aggregate_by_ratio, local_minimum_report, TranscodeRecord, REPORT_QPS, REPORT_RADIUS,
};
use requant_core::quantizer::TieBreak;
use requant_core::reference;
use requant_core::requant::{boundary_overlap, RequantConfig, RequantPoint};
use requant_core::{ErrorMetric, Plane, Rational};

use crate::numfmt::{opt_sig6, rational, sig6};
use crate::table::CsvDoc;
use crate::{parallel, Result};

pub fn tie_break_name(t: TieBreak) -> &'static str {
    match t {
        TieBreak::TowardZero => "toward-zero",
        TieBreak::AwayFromZero => "away-from-zero",
    }
}

fn requant_meta(doc: &mut CsvDoc, cfg: &RequantConfig) {
    doc.meta("domain", cfg.domain)
        .meta("metric", cfg.metric)
        .meta("offset", cfg.offset)
        .meta("tie_break", tie_break_name(cfg.tie_break));
}

fn point_row(p: &RequantPoint, offset: Rational) -> Vec<String> {
    vec![
        rational(p.qstep_s),
        rational(p.qstep_t),
        sig6(p.e_a),
        sig6(p.e_b),
        opt_sig6(p.ratio),
        p.metric.name().into(),
        rational(offset),
    ]
}

const POINT_HEADER: [&str; 7] = [
    "qstep_s", "qstep_t", "e_a", "e_b", "ratio", "metric", "offset",
];

pub fn requant_sweep(
    qstep_s: Rational,
    qstep_t: &[Rational],
    cfg: &RequantConfig,
) -> Result<CsvDoc> {
    let points = parallel::sweep_qstep_t(qstep_s, qstep_t, cfg)?;
    let mut doc = CsvDoc::new("requant sweep", &POINT_HEADER);
    requant_meta(&mut doc, cfg);
    for p in &points {
        doc.push(point_row(p, cfg.offset));
    }
    Ok(doc)
}

pub fn requant_surface(
    s_axis: &[Rational],
    t_axis: &[Rational],
    cfg: &RequantConfig,
) -> Result<CsvDoc> {
    let surface = parallel::error_surface(s_axis, t_axis, cfg)?;
    let mut header = POINT_HEADER.to_vec();
    header.push("flag");
    let mut doc = CsvDoc::new("requant surface", &header);
    requant_meta(&mut doc, cfg);
    doc.meta("cells", surface.points.len())
        .meta("flagged_cells", surface.flagged().count());
    for p in &surface.points {
        let mut row = point_row(p, cfg.offset);
        row.push(
            if p.ratio.is_none() {
                "undefined_ratio"
            } else {
                ""
            }
            .into(),
        );
        doc.push(row);
    }
    Ok(doc)
}

pub fn requant_overlap(pairs: &[(Rational, Rational)], cfg: &RequantConfig) -> Result<CsvDoc> {
    let mut doc = CsvDoc::new(
        "requant overlap",
        &[
            "qstep_s",
            "qstep_t",
            "offset",
            "aligned_fraction",
            "aligned_boundaries",
            "target_boundaries",
            "split_bins",
            "period_bins",
            "max_extra_error",
        ],
    );
    requant_meta(&mut doc, cfg);
    for &(s, t) in pairs {
        let r = boundary_overlap(&cfg.quantizer(s)?, &cfg.quantizer(t)?, cfg.domain)?;
        let (split, period) = match r.split {
            Some(sp) => (sp.split_bins.to_string(), sp.period_bins.to_string()),
            None => (String::new(), String::new()),
        };
        doc.push(vec![
            rational(s),
            rational(t),
            rational(cfg.offset),
            sig6(r.aligned_fraction),
            r.aligned_boundaries.to_string(),
            r.target_boundaries.to_string(),
            split,
            period,
            rational(r.max_extra_error),
        ]);
    }
    Ok(doc)
}

/// Offsets tried when looking for the convention behind the published
/// single/two-stage example.
pub const AUDIT_OFFSETS: [(i64, i64); 4] = [(0, 1), (1, 6), (1, 3), (1, 2)];

/// One row of the convention audit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuditRow {
    pub offset: Rational,
    pub metric: ErrorMetric,
    pub e_a: f64,
    pub e_b: f64,
    pub ratio: Option<f64>,
}

impl AuditRow {
    /// Agreement to the precision the published values are given in.
    pub fn matches_published(&self) -> bool {
        let round1 = |x: f64| (x * 10.0).round() / 10.0;
        self.e_a.round() == reference::PUBLISHED_E_A
            && round1(self.e_b) == reference::PUBLISHED_E_B
            && self.ratio.map(round1) == Some(reference::PUBLISHED_RATIO)
    }
}

pub fn audit_rows(base: &RequantConfig) -> Result<Vec<AuditRow>> {
    let s = Rational::from_integer(reference::PUBLISHED_STEP_S);
    let t = Rational::from_integer(reference::PUBLISHED_STEP_T);
    let mut rows = Vec::new();
    for (n, d) in AUDIT_OFFSETS {
        for metric in ErrorMetric::ALL {
            let cfg = RequantConfig {
                offset: Rational::new(n, d),
                metric,
                ..*base
            };
            let p = cfg.point(s, t)?;
            rows.push(AuditRow {
                offset: cfg.offset,
                metric,
                e_a: p.e_a,
                e_b: p.e_b,
                ratio: p.ratio,
            });
        }
    }
    Ok(rows)
}

pub fn requant_audit(base: &RequantConfig) -> Result<CsvDoc> {
    let rows = audit_rows(base)?;
    let mut doc = CsvDoc::new(
        "requant audit",
        &[
            "qstep_s",
            "qstep_t",
            "offset",
            "metric",
            "e_a",
            "e_b",
            "ratio",
            "published_e_a",
            "published_e_b",
            "published_ratio",
            "matches_published",
        ],
    );
    doc.meta("domain", base.domain)
        .meta("tie_break", tie_break_name(base.tie_break))
        .meta(
            "matching_conventions",
            rows.iter().filter(|r| r.matches_published()).count(),
        );
    for r in &rows {
        doc.push(vec![
            reference::PUBLISHED_STEP_S.to_string(),
            reference::PUBLISHED_STEP_T.to_string(),
            rational(r.offset),
            r.metric.name().into(),
            sig6(r.e_a),
            sig6(r.e_b),
            opt_sig6(r.ratio),
            sig6(reference::PUBLISHED_E_A),
            sig6(reference::PUBLISHED_E_B),
            sig6(reference::PUBLISHED_RATIO),
            if r.matches_published() { "yes" } else { "no" }.into(),
        ]);
    }
    Ok(doc)
}

pub fn gen_content(spec: &ContentSpec) -> Result<Vec<u8>> {
    Ok(crate::pgm::encode(&synth_content(spec)?))
}

fn codec_meta(doc: &mut CsvDoc, cfg: &CodecConfig) {
    doc.meta("block_size", cfg.block_size.len())
        .meta("prediction", cfg.prediction)
        .meta("offset", cfg.offset)
        .meta("rate_unit", "bits per sample, zeroth-order entropy");
}

/// Raw rate/PSNR per QP in QP order.
pub fn rd_curve(plane: &Plane, qps: &[i32], cfg: &CodecConfig) -> Result<CsvDoc> {
    let curve = parallel::build_rd_curve(plane, qps, cfg)?;
    let mut raw = curve.raw().to_vec();
    raw.sort_by_key(|p| p.qp);
    let mut doc = CsvDoc::new("rd-curve", &["qp", "rate", "psnr", "flag"]);
    doc.meta("width", plane.width())
        .meta("height", plane.height());
    codec_meta(&mut doc, cfg);
    doc.meta("psnr_cap", sig6(PSNR_CAP));
    for p in raw {
        doc.push(vec![
            p.qp.to_string(),
            sig6(p.rate),
            sig6(p.psnr),
            if p.psnr == PSNR_CAP { "lossless" } else { "" }.into(),
        ]);
    }
    Ok(doc)
}

pub struct CpdtOutputs {
    pub records: CsvDoc,
    pub profile: CsvDoc,
    pub local_minimum: CsvDoc,
    pub all_records: Vec<TranscodeRecord>,
}

pub fn record_row(r: &TranscodeRecord) -> Vec<String> {
    vec![
        r.plane_id.to_string(),
        r.qp_s.to_string(),
        r.qp_t.to_string(),
        sig6(r.source_rate),
        sig6(r.target_rate),
        opt_sig6(r.ratio),
        sig6(r.psnr_r),
        sig6(r.psnr_t),
        opt_sig6(r.psnr_c),
        opt_sig6(r.delta_psnr),
        r.flag.name().into(),
    ]
}

pub const RECORD_HEADER: [&str; 11] = [
    "plane_id",
    "qp_s",
    "qp_t",
    "source_rate",
    "target_rate",
    "ratio",
    "psnr_r",
    "psnr_t",
    "psnr_c",
    "delta_psnr",
    "flag",
];

/// Transcoding sweep over every plane; `names[i]` labels plane id `i`.
pub fn cpdt_sweep(
    planes: &[Plane],
    names: &[String],
    qp_s: &[i32],
    qp_t: &[i32],
    cfg: &CodecConfig,
    bin_width: f64,
) -> Result<CpdtOutputs> {
    let mut all = Vec::new();
    for (id, plane) in planes.iter().enumerate() {
        let (_, recs) = parallel::full_sweep(plane, id as u32, qp_s, qp_t, cfg)?;
        all.extend(recs);
    }
    let profile = aggregate_by_ratio(&all, bin_width)?;

    let plane_meta = names
        .iter()
        .enumerate()
        .map(|(i, n)| format!("{i}={n}"))
        .collect::<Vec<_>>()
        .join(" ");
    let common = |doc: &mut CsvDoc| {
        doc.meta("planes", &plane_meta);
        codec_meta(doc, cfg);
    };

    let mut records = CsvDoc::new("cpdt-sweep records", &RECORD_HEADER);
    common(&mut records);
    records
        .meta("flagged", all.iter().filter(|r| !r.is_usable()).count())
        .meta("interpolation", "linear psnr against log2(rate)");
    for r in &all {
        records.push(record_row(r));
    }

    let mut prof = CsvDoc::new(
        "cpdt-sweep profile",
        &["ratio_lo", "ratio_hi", "mean_delta_psnr", "count"],
    );
    common(&mut prof);
    prof.meta("bin_width", sig6(bin_width))
        .meta(
            "aggregation",
            "pooled mean over all usable records of all planes",
        )
        .meta("reference_min_loss_db", sig6(reference::HM_MIN_LOSS_DB))
        .meta(
            "reference_min_loss_ratio",
            sig6(reference::HM_MIN_LOSS_RATIO),
        )
        .meta(
            "reference_local_max_loss_db",
            sig6(reference::HM_LOCAL_MAX_LOSS_DB),
        )
        .meta(
            "reference_local_max_loss_ratio",
            sig6(reference::HM_LOCAL_MAX_LOSS_RATIO),
        )
        .meta(
            "reference_avg_max_loss_db",
            sig6(reference::HM_AVG_MAX_LOSS_DB),
        )
        .meta(
            "reference_practical_max_loss_db",
            sig6(reference::HM_PRACTICAL_MAX_LOSS_DB),
        );
    for b in &profile.bins {
        prof.push(vec![
            sig6(b.ratio_lo),
            sig6(b.ratio_hi),
            opt_sig6(b.mean_delta_psnr),
            b.count.to_string(),
        ]);
    }

    // only source QPs whose whole neighbourhood was swept
    let report_qps: Vec<u8> = REPORT_QPS
        .iter()
        .copied()
        .filter(|&q| {
            let q = q as i32;
            let r = REPORT_RADIUS as i32;
            qp_s.contains(&q) && (q - r..=q + r).all(|t| qp_t.contains(&t))
        })
        .collect();
    let minima = local_minimum_report(&all, &report_qps, REPORT_RADIUS)?;
    let mut lm = CsvDoc::new(
        "cpdt-sweep local-minimum",
        &[
            "plane_id",
            "qp_s",
            "best_qp_t",
            "best_delta_psnr",
            "delta_at_qp_s",
            "at_source_qp",
        ],
    );
    common(&mut lm);
    lm.meta("radius", REPORT_RADIUS).meta(
        "hits",
        format!(
            "{}/{}",
            minima.iter().filter(|m| m.at_source_qp()).count(),
            minima.len()
        ),
    );
    for m in &minima {
        lm.push(vec![
            m.plane_id.to_string(),
            m.qp_s.to_string(),
            m.best_qp_t.map(|q| q.to_string()).unwrap_or_default(),
            opt_sig6(m.best_delta_psnr),
            opt_sig6(m.delta_at_qp_s),
            if m.at_source_qp() { "yes" } else { "no" }.into(),
        ]);
    }

    Ok(CpdtOutputs {
        records,
        profile: prof,
        local_minimum: lm,
        all_records: all,
    })
}

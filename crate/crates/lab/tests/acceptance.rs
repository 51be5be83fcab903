//! Reproduction suite: one PASS/FAIL line per criterion, nonzero exit when any fails.
//!
//! Expected values come from oracles written here against plain integers and
//! floats, not from the library under test.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use requant_core::codec::{decode_plane, encode_plane_with, estimate_rate, synth_content};
use requant_core::cpdt::{mean_abs_delta, RecordFlag};
use requant_core::requant::{boundary_overlap, RequantConfig};
use requant_core::transform::{forward_transform, inverse_transform, roundtrip_error_stats, Block};
use requant_core::{
    CodecConfig, ContentSpec, ErrorMetric, Plane, Quantizer, Rational, TranscodeRecord,
};
use requant_lab::{commands, parallel};

const SEEDS: [u64; 3] = [1, 2, 3];
const COMPLEXITIES: [f64; 3] = [0.3, 0.6, 0.9];
const PLANE: usize = 128;
const I16: (i64, i64) = (-32768, 32767);

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn budget(start: Instant, limit: Duration) -> Result<(), String> {
    let t = start.elapsed();
    ensure(t <= limit, format!("took {t:.1?}, budget {limit:?}"))
}

// ---- scalar oracle: integer truncating quantizer on a scaled grid ----

/// Truncating reconstruction `sign(x) * floor(|x| / s) * s`.
fn trunc(x: i64, s: i64) -> i64 {
    x.signum() * (x.abs() / s) * s
}

/// Integer sums of |e| and e^2 for direct and two-stage quantization, with
/// every value multiplied by `scale` so fractional steps stay integral.
#[derive(Clone, Copy, Debug)]
struct Sums {
    abs_a: i128,
    sq_a: i128,
    abs_b: i128,
    sq_b: i128,
}

fn sums(s: i64, t: i64, scale: i64) -> Sums {
    let mut out = Sums {
        abs_a: 0,
        sq_a: 0,
        abs_b: 0,
        sq_b: 0,
    };
    for x in I16.0..=I16.1 {
        let x = x * scale;
        let a = (x - trunc(x, t)) as i128;
        let b = (x - trunc(trunc(x, s), t)) as i128;
        out.abs_a += a.abs();
        out.sq_a += a * a;
        out.abs_b += b.abs();
        out.sq_b += b * b;
    }
    out
}

fn mean_abs_ratio(s: i64, t: i64, scale: i64) -> f64 {
    let v = sums(s, t, scale);
    v.abs_b as f64 / v.abs_a as f64
}

fn truncating() -> RequantConfig {
    RequantConfig::default()
}

fn int(n: i64) -> Rational {
    Rational::from_integer(n)
}

fn lib_ratio(s: Rational, t: Rational) -> Result<f64, String> {
    truncating()
        .point(s, t)
        .map_err(|e| e.to_string())?
        .ratio
        .ok_or_else(|| "undefined ratio".to_string())
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * b.abs().max(1.0)
}

fn c1_identity() -> Check {
    let start = Instant::now();
    let mut parts = Vec::new();
    for t in [12, 24, 36] {
        let v = sums(12, t, 1);
        ensure(
            v.abs_a == v.abs_b && v.sq_a == v.sq_b,
            format!("oracle: q_t={t} not identical"),
        )?;
        let p = truncating()
            .point(int(12), int(t))
            .map_err(|e| e.to_string())?;
        ensure(
            p.ratio == Some(1.0) && p.is_identity(),
            format!("q_t={t}: ratio {:?}", p.ratio),
        )?;
        parts.push(format!("q_t={t} ratio 1"));
    }
    budget(start, Duration::from_secs(5))?;
    Ok(parts.join(", "))
}

fn c2_dominance() -> Check {
    let axis: Vec<Rational> = (2..=40).map(int).collect();
    let surface =
        parallel::error_surface(&axis, &axis, &truncating()).map_err(|e| e.to_string())?;
    let mut checked = 0;
    for p in &surface.points {
        for m in ErrorMetric::ALL {
            let r = p.requant.ratio_to(&p.direct, m);
            ensure(
                r.is_none_or(|r| r >= 1.0),
                format!("{} at {}/{}: {r:?}", m, p.qstep_s, p.qstep_t),
            )?;
            checked += 1;
        }
    }
    // pointwise on the q_s = 12 row
    let mut points = 0u64;
    for t in 2..=40 {
        for x in I16.0..=I16.1 {
            let direct = (x - trunc(x, t)).abs();
            let two = (x - trunc(trunc(x, 12), t)).abs();
            ensure(two >= direct, format!("x={x} q_t={t}: {two} < {direct}"))?;
            points += 1;
        }
        let v = sums(12, t, 1);
        let lib = surface.get(10, (t - 2) as usize);
        ensure(
            close(lib.ratio.unwrap(), v.abs_b as f64 / v.abs_a as f64),
            format!("row q_s=12 q_t={t}: ratio mismatch"),
        )?;
    }
    Ok(format!(
        "{checked} cell-metric ratios >= 1; {points} pointwise comparisons hold"
    ))
}

fn c3_spike() -> Check {
    let mut max: f64 = 0.0;
    for t in 2..=40 {
        let r = mean_abs_ratio(12, t, 1);
        ensure(
            close(lib_ratio(int(12), int(t))?, r),
            format!("q_t={t}: library disagrees with oracle"),
        )?;
        max = max.max(r);
    }
    let r13 = mean_abs_ratio(12, 13, 1);
    ensure(max > 2.0, format!("max ratio {max}"))?;
    ensure(r13 > 1.0, format!("ratio(13) {r13}"))?;
    Ok(format!("max ratio {max:.4}, ratio(13) {r13:.4}"))
}

fn c4_trend() -> Check {
    let r: Vec<f64> = [13, 25, 37]
        .iter()
        .map(|&t| mean_abs_ratio(12, t, 1))
        .collect();
    for (&t, &o) in [13, 25, 37].iter().zip(&r) {
        ensure(
            close(lib_ratio(int(12), int(t))?, o),
            format!("q_t={t}: library disagrees with oracle"),
        )?;
    }
    ensure(r[2] < r[1] && r[1] < r[0], format!("{r:?}"))?;
    Ok(format!("{:.4} > {:.4} > {:.4}", r[0], r[1], r[2]))
}

fn c5_half_integer() -> Check {
    let mut parts = Vec::new();
    for s in [10, 12, 20] {
        // steps scaled by 10: q_s -> 10 q_s, k/10 * q_s -> k q_s
        let r = |k: i64| mean_abs_ratio(10 * s, k * s, 10);
        let (lo, mid, hi) = (r(23), r(25), r(27));
        for (k, o) in [(23, lo), (25, mid), (27, hi)] {
            let lib = lib_ratio(int(s), Rational::new(k * s, 10))?;
            ensure(
                close(lib, o),
                format!("q_s={s} k={k}: library {lib} vs oracle {o}"),
            )?;
        }
        ensure(
            mid < lo && mid < hi && mid > 1.0,
            format!("q_s={s}: {lo}/{mid}/{hi}"),
        )?;
        let q_t = truncating()
            .quantizer(Rational::new(5 * s, 2))
            .map_err(|e| e.to_string())?;
        let q_s = Quantizer::truncating(s).map_err(|e| e.to_string())?;
        let ov = boundary_overlap(&q_s, &q_t, truncating().domain).map_err(|e| e.to_string())?;
        ensure(
            ov.aligned_fraction == 0.5 && ov.max_extra_error == Rational::new(s, 2),
            format!(
                "q_s={s}: aligned {} extra {}",
                ov.aligned_fraction, ov.max_extra_error
            ),
        )?;
        parts.push(format!("q_s={s}: {lo:.4} > {mid:.4} < {hi:.4}"));
    }
    // worst extra error oracle for 12 -> 30
    let (mut worst_a, mut worst_b) = (0, 0);
    for x in I16.0..=I16.1 {
        worst_a = worst_a.max((2 * x - trunc(2 * x, 60)).abs());
        worst_b = worst_b.max((2 * x - trunc(trunc(2 * x, 24), 60)).abs());
    }
    ensure(
        worst_b - worst_a == 12,
        format!("oracle extra for 12->30: {}/2", worst_b - worst_a),
    )?;
    parts.push("aligned 0.5 and extra q_s/2".into());
    Ok(parts.join("; "))
}

fn c6_audit() -> Check {
    let start = Instant::now();
    let rows = commands::audit_rows(&truncating()).map_err(|e| e.to_string())?;
    ensure(rows.len() == 12, format!("{} rows", rows.len()))?;
    let doc = commands::requant_audit(&truncating()).map_err(|e| e.to_string())?;
    ensure(doc.rows().len() == 12, "csv rows")?;
    // offset 0 at 10 -> 20 is an integer multiple, so both errors agree
    let v = sums(10, 20, 1);
    let e = v.abs_a as f64 / 65536.0;
    ensure(
        close(rows[0].e_a, e) && close(rows[0].e_b, e),
        format!("offset 0 mean-abs {} vs oracle {e}", rows[0].e_a),
    )?;
    let matching = rows.iter().filter(|r| r.matches_published()).count();
    budget(start, Duration::from_secs(30))?;
    Ok(format!(
        "12 conventions tabulated, {matching} match the published figures"
    ))
}

// ---- transform oracle: integer DCT written out from its basis ----

const M4: [[i64; 4]; 4] = [
    [64, 64, 64, 64],
    [83, 36, -36, -83],
    [64, -64, -64, 64],
    [36, -83, 83, -36],
];
const M8: [[i64; 8]; 8] = [
    [64, 64, 64, 64, 64, 64, 64, 64],
    [89, 75, 50, 18, -18, -50, -75, -89],
    [83, 36, -36, -83, -83, -36, 36, 83],
    [75, -18, -89, -50, 50, 89, 18, -75],
    [64, -64, -64, 64, 64, -64, -64, 64],
    [50, -89, 18, 75, -75, -18, 89, -50],
    [36, -83, 83, -36, -36, 83, -83, 36],
    [18, -50, 75, -89, 89, -75, 50, -18],
];

fn basis(n: usize, k: usize, i: usize) -> i64 {
    if n == 4 {
        M4[k][i]
    } else {
        M8[k][i]
    }
}

fn round_shift(v: i64, sh: u32) -> i64 {
    (v + (1 << (sh - 1))) >> sh
}

fn clip16(v: i64) -> i64 {
    v.clamp(-32768, 32767)
}

/// Separable pass: `out[r][k] = sum_i coef(k, i) in[r][i]`, transposed.
fn pass(n: usize, x: &[i64], sh: u32, inverse: bool) -> Vec<i64> {
    let mut out = vec![0; n * n];
    for r in 0..n {
        for k in 0..n {
            let acc: i64 = (0..n)
                .map(|i| {
                    let c = if inverse {
                        basis(n, i, k)
                    } else {
                        basis(n, k, i)
                    };
                    c * x[r * n + i]
                })
                .sum();
            out[k * n + r] = clip16(round_shift(acc, sh));
        }
    }
    out
}

fn oracle_forward(n: usize, x: &[i64]) -> Vec<i64> {
    let log2 = n.trailing_zeros();
    pass(n, &pass(n, x, log2 - 1, false), log2 + 6, false)
}

/// Output is held to the 9-bit residual range.
fn oracle_inverse(n: usize, c: &[i64]) -> Vec<i64> {
    pass(n, &pass(n, c, 7, true), 12, true)
        .into_iter()
        .map(|v| v.clamp(-256, 255))
        .collect()
}

fn c7_transform() -> Check {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut blocks = Vec::new();
    let (mut max, mut nonzero) = (0, 0u64);
    for i in 0..100_000 {
        let n = if i % 2 == 0 { 4 } else { 8 };
        let x: Vec<i64> = (0..n * n)
            .map(|_| (rng.next_u32() % 511) as i64 - 255)
            .collect();
        let back = oracle_inverse(n, &oracle_forward(n, &x));
        for (a, b) in x.iter().zip(&back) {
            let e = (a - b).abs();
            max = max.max(e);
            nonzero += (e > 0) as u64;
        }
        let block =
            Block::new(n, x.iter().map(|&v| v as i32).collect()).map_err(|e| e.to_string())?;
        if i < 2000 {
            let lib: Vec<i64> = forward_transform(&block)
                .coeffs()
                .iter()
                .map(|&c| c as i64)
                .collect();
            ensure(
                lib == oracle_forward(n, &x),
                format!("block {i}: forward differs from oracle"),
            )?;
            let lib_back: Vec<i64> = inverse_transform(&forward_transform(&block))
                .samples()
                .iter()
                .map(|&c| c as i64)
                .collect();
            ensure(
                lib_back == back,
                format!("block {i}: roundtrip differs from oracle"),
            )?;
        }
        blocks.push(block);
    }
    let stats = roundtrip_error_stats(&blocks).map_err(|e| e.to_string())?;
    ensure(
        stats.max_abs as i64 == max,
        format!("library max {} vs oracle {max}", stats.max_abs),
    )?;
    ensure(max <= 2, format!("max error {max}"))?;
    ensure(nonzero > 0, "transform was exactly lossless")?;
    budget(start, Duration::from_secs(60))?;
    Ok(format!(
        "100000 blocks, max error {max}, {nonzero} nonzero samples"
    ))
}

// ---- transcoding sweeps ----

struct Sweeps {
    planes: Vec<Plane>,
    records: Vec<Vec<TranscodeRecord>>,
    elapsed: Duration,
}

fn run_sweeps() -> Result<Sweeps, String> {
    let start = Instant::now();
    let qps: Vec<i32> = (0..=51).collect();
    let (mut planes, mut records) = (Vec::new(), Vec::new());
    for (i, (&seed, &complexity)) in SEEDS.iter().zip(&COMPLEXITIES).enumerate() {
        let plane = synth_content(&ContentSpec {
            seed,
            complexity,
            width: PLANE,
            height: PLANE,
        })
        .map_err(|e| e.to_string())?;
        let (_, recs) = parallel::full_sweep(&plane, i as u32, &qps, &qps, &CodecConfig::default())
            .map_err(|e| e.to_string())?;
        planes.push(plane);
        records.push(recs);
    }
    Ok(Sweeps {
        planes,
        records,
        elapsed: start.elapsed(),
    })
}

fn oracle_psnr(a: &Plane, b: &Plane) -> f64 {
    let sse: u64 = a
        .samples()
        .iter()
        .zip(b.samples())
        .map(|(&x, &y)| (x as i64 - y as i64).pow(2) as u64)
        .sum();
    if sse == 0 {
        return 99.99;
    }
    10.0 * (255.0f64 * 255.0 * a.samples().len() as f64 / sse as f64).log10()
}

fn encode(p: &Plane, qp: u8) -> (f64, Plane) {
    let enc = encode_plane_with(p, qp as i32, &CodecConfig::default()).unwrap();
    (estimate_rate(&enc), decode_plane(&enc).unwrap())
}

/// Independent PSNR and interpolation for a handful of records.
fn cross_check(plane: &Plane, recs: &[TranscodeRecord]) -> Result<usize, String> {
    let direct: Vec<(f64, f64)> = (0..=51u8)
        .map(|q| {
            let (r, d) = encode(plane, q);
            (r, oracle_psnr(plane, &d))
        })
        .collect();
    // cheapest-first, keep only points that beat every cheaper one
    let mut sorted: Vec<(f64, f64)> = direct.iter().copied().filter(|p| p.0 > 0.0).collect();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0).then(b.1.total_cmp(&a.1)));
    let mut hull: Vec<(f64, f64)> = Vec::new();
    for p in sorted {
        if hull.last().is_none_or(|l| p.0 > l.0 && p.1 > l.1) {
            hull.push(p);
        }
    }
    let interp = |rate: f64| -> Option<f64> {
        let i = hull.iter().position(|p| p.0 >= rate)?;
        if hull[i].0 == rate {
            return Some(hull[i].1);
        }
        let (lo, hi) = (hull.get(i.checked_sub(1)?)?, hull[i]);
        let w = (rate.log2() - lo.0.log2()) / (hi.0.log2() - lo.0.log2());
        Some(lo.1 + w * (hi.1 - lo.1))
    };
    let mut n = 0;
    for (qs, qt) in [
        (22u8, 22u8),
        (28, 30),
        (32, 27),
        (38, 44),
        (12, 20),
        (45, 40),
    ] {
        let rec = recs
            .iter()
            .find(|r| r.qp_s == qs && r.qp_t == qt)
            .ok_or("missing record")?;
        let (rate_r, r) = encode(plane, qs);
        let (rate_t, t) = encode(&r, qt);
        let (psnr_r, psnr_t) = (oracle_psnr(plane, &r), oracle_psnr(plane, &t));
        ensure(
            close(rec.psnr_r, psnr_r) && close(rec.psnr_t, psnr_t),
            format!("{qs}/{qt}: psnr mismatch"),
        )?;
        ensure(
            close(rec.source_rate, rate_r) && close(rec.target_rate, rate_t),
            format!("{qs}/{qt}: rate mismatch"),
        )?;
        ensure(
            rec.ratio.is_some_and(|x| close(x, rate_t / rate_r)),
            format!("{qs}/{qt}: ratio"),
        )?;
        match (interp(rate_t), rec.flag) {
            (Some(c), RecordFlag::Ok) => {
                ensure(
                    rec.psnr_c.is_some_and(|x| (x - c).abs() < 1e-9),
                    format!("{qs}/{qt}: psnr_c"),
                )?;
                ensure(
                    rec.delta_psnr
                        .is_some_and(|d| (d - (psnr_t - c)).abs() < 1e-9),
                    format!("{qs}/{qt}: delta"),
                )?;
            }
            (None, RecordFlag::OutOfSpan) => {}
            (c, f) => return Err(format!("{qs}/{qt}: oracle {c:?} vs flag {f:?}")),
        }
        n += 1;
    }
    Ok(n)
}

fn delta(recs: &[TranscodeRecord], qs: u8, qt: u8) -> Option<f64> {
    recs.iter()
        .find(|r| r.qp_s == qs && r.qp_t == qt && r.flag == RecordFlag::Ok)?
        .delta_psnr
}

fn c8_local_minimum(sw: &Sweeps) -> Check {
    ensure(
        sw.elapsed <= Duration::from_secs(600),
        format!("sweeps took {:.1?}", sw.elapsed),
    )?;
    let mut checked = 0;
    for (plane, recs) in sw.planes.iter().zip(&sw.records) {
        checked += cross_check(plane, recs)?;
    }
    let (mut hits, mut cases) = (0, 0);
    let mut deltas = Vec::new();
    for (p, recs) in sw.records.iter().enumerate() {
        for qs in [22u8, 28, 32, 38] {
            let at = delta(recs, qs, qs).ok_or(format!("plane {p} qp {qs}: no delta"))?;
            ensure(
                at < 0.0,
                format!("plane {p} qp {qs}: delta {at} not negative"),
            )?;
            let mut best = (qs - 2, f64::INFINITY);
            for qt in qs - 2..=qs + 2 {
                if let Some(d) = delta(recs, qs, qt) {
                    if d.abs() < best.1 {
                        best = (qt, d.abs());
                    }
                }
            }
            hits += (best.0 == qs) as u32;
            cases += 1;
            deltas.push(format!("{at:.3}"));
        }
    }
    ensure(
        hits * 4 >= cases * 3,
        format!("argmin at qp_s in {hits}/{cases}"),
    )?;
    Ok(format!(
        "argmin at qp_s in {hits}/{cases}, deltas [{}], {checked} records cross-checked, sweeps {:.1?}",
        deltas.join(" "),
        sw.elapsed
    ))
}

/// Plain mean of |delta| over usable records with ratio in `[lo, hi)`.
fn oracle_mean<'a>(
    recs: impl Iterator<Item = &'a TranscodeRecord>,
    lo: f64,
    hi: f64,
) -> Option<f64> {
    let v: Vec<f64> = recs
        .filter(|r| r.flag == RecordFlag::Ok)
        .filter(|r| r.ratio.is_some_and(|x| x >= lo && x < hi))
        .filter_map(|r| r.delta_psnr.map(f64::abs))
        .collect();
    (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
}

fn c9_high_ratio(sw: &Sweeps) -> Check {
    let all = || sw.records.iter().flatten();
    let high = oracle_mean(all(), 1.2, f64::INFINITY).ok_or("no records above 1.2")?;
    let band = oracle_mean(all(), 0.8, 1.0).ok_or("no records in 0.8..1.0")?;
    let lib = mean_abs_delta(all(), 1.2, f64::INFINITY).unwrap();
    ensure(
        (lib - high).abs() < 1e-9,
        format!("library mean {lib} vs oracle {high}"),
    )?;
    ensure(high > band, format!("{high} <= {band}"))?;
    Ok(format!(
        "mean |dPSNR| {high:.3} above 1.2 vs {band:.3} in 0.8..1.0"
    ))
}

fn c10_source_rate(sw: &Sweeps) -> Check {
    let mut parts = Vec::new();
    let mut ok = true;
    for (p, recs) in sw.records.iter().enumerate() {
        let m = |qs: u8| oracle_mean(recs.iter().filter(|r| r.qp_s == qs), 1.0, f64::INFINITY);
        let (m22, m38) = (
            m(22).ok_or("no qp 22 records")?,
            m(38).ok_or("no qp 38 records")?,
        );
        ok &= m38 > m22;
        parts.push(format!("plane {p}: qp_s 38 {m38:.3} vs qp_s 22 {m22:.3}"));
    }
    let line = parts.join("; ");
    if ok {
        Ok(line)
    } else {
        Err(line)
    }
}

fn lab(args: &[&str]) -> Result<Vec<u8>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_requant-lab"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    ensure(
        out.status.success(),
        format!("{args:?}: {}", String::from_utf8_lossy(&out.stderr)),
    )?;
    Ok(out.stdout)
}

fn c11_determinism(sw: &Sweeps) -> Check {
    for (p, recs) in sw.records.iter().enumerate() {
        ensure(
            recs.len() == 2704,
            format!("plane {p}: {} records", recs.len()),
        )?;
    }
    let sweep = ["requant", "sweep", "--qstep-s", "12", "--qstep-t", "2:40:1"];
    ensure(
        lab(&sweep)? == lab(&sweep)?,
        "requant sweep output differs between runs",
    )?;

    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let pgm = dir.path().join("p.pgm");
    let pgm_s = pgm.to_str().unwrap();
    let gen = [
        "gen-content",
        "--width",
        "64",
        "--height",
        "48",
        "--seed",
        "7",
        "--complexity",
        "0.4",
        "-o",
        pgm_s,
    ];
    lab(&gen)?;
    let first_pgm = std::fs::read(&pgm).map_err(|e| e.to_string())?;
    lab(&gen)?;
    ensure(
        std::fs::read(&pgm).map_err(|e| e.to_string())? == first_pgm,
        "gen-content differs between runs",
    )?;

    let mut outputs = Vec::new();
    for run in ["a", "b"] {
        let out = dir.path().join(run);
        lab(&[
            "cpdt-sweep",
            "--input",
            pgm_s,
            "--out-dir",
            out.to_str().unwrap(),
        ])?;
        let files: Vec<Vec<u8>> = ["records.csv", "profile.csv", "local_minimum.csv"]
            .iter()
            .map(|f| std::fs::read(out.join(f)).unwrap())
            .collect();
        outputs.push(files);
    }
    ensure(
        outputs[0] == outputs[1],
        "cpdt-sweep output differs between runs",
    )?;
    let rows = String::from_utf8_lossy(&outputs[0][0])
        .lines()
        .filter(|l| !l.starts_with('#'))
        .count()
        - 1;
    ensure(rows == 2704, format!("cli sweep wrote {rows} records"))?;
    Ok("reruns byte-identical; 2704 records per plane".into())
}

fn main() -> ExitCode {
    let mut results: Vec<(u8, &str, Check)> = vec![
        (1, "integer-multiple identity", c1_identity()),
        (2, "pointwise dominance", c2_dominance()),
        (3, "off-multiple spike", c3_spike()),
        (4, "decreasing off-multiple trend", c4_trend()),
        (5, "half-integer minima", c5_half_integer()),
        (6, "convention audit", c6_audit()),
        (7, "transform near-losslessness", c7_transform()),
    ];
    match run_sweeps() {
        Ok(sw) => {
            results.push((8, "same-QP local minimum", c8_local_minimum(&sw)));
            results.push((9, "degradation above ratio 100%", c9_high_ratio(&sw)));
            results.push((10, "source-bitrate dependence", c10_source_rate(&sw)));
            results.push((11, "determinism and record count", c11_determinism(&sw)));
        }
        Err(e) => {
            for (id, name) in [
                (8, "same-QP local minimum"),
                (9, "degradation above ratio 100%"),
                (10, "source-bitrate dependence"),
                (11, "determinism and record count"),
            ] {
                results.push((id, name, Err(format!("sweep failed: {e}"))));
            }
        }
    }
    let mut failed = 0;
    for (id, name, r) in &results {
        match r {
            Ok(d) => println!("criterion {id:>2} PASS  {name}: {d}"),
            Err(d) => {
                failed += 1;
                println!("criterion {id:>2} FAIL  {name}: {d}");
            }
        }
    }
    println!("{} passed, {failed} failed", results.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

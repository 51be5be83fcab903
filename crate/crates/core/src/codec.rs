//! Intra block codec used as the encode/decode primitive of the transcoding
//! experiments.
//!
//! Each plane is tiled into `N x N` blocks (edge blocks padded by replicating
//! the last row/column). A block is predicted, the residual is transformed
//! with the integer core transform and quantized with a dead-zone quantizer
//! whose step is `qp_to_qstep(qp)` scaled by the transform's coefficient gain.
//! Without prediction the predictor is the constant 128, which reduces the
//! codec to a JPEG-like transform coder. With intra prediction each block picks
//! a DC, horizontal or vertical predictor from already reconstructed
//! neighbours by minimum SAD. There is no in-loop filtering. Rate is the
//! zeroth-order entropy of the level symbols plus that of the mode symbols.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::Zero;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::error::{Error, Result};
use crate::quantizer::{qp_to_qstep, Quantizer, Rational, TieBreak, MAX_QP};
use crate::transform::{forward_transform, inverse_transform, Block, CoeffBlock, TransformSize};

pub const DEFAULT_BLOCK_SIZE: usize = 8;
/// Dead-zone offset of the codec quantizer (HEVC intra convention).
pub const CODEC_OFFSET: (i64, i64) = (1, 3);
/// PSNR reported for identical planes.
pub const PSNR_CAP: f64 = 99.99;
/// Denominator of the rational approximation of codec step sizes.
pub const STEP_DENOM: i64 = 1 << 16;

const CENTER: i32 = 128;

/// 8-bit luma plane, row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Plane {
    width: usize,
    height: usize,
    samples: Vec<u8>,
}

impl Plane {
    pub fn new(width: usize, height: usize, samples: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 || samples.len() != width * height {
            return Err(Error::PlaneDimensions {
                width,
                height,
                len: samples.len(),
            });
        }
        Ok(Self {
            width,
            height,
            samples,
        })
    }

    pub fn filled(width: usize, height: usize, value: u8) -> Result<Self> {
        Self::new(width, height, vec![value; width * height])
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn samples(&self) -> &[u8] {
        &self.samples
    }

    /// Sample at `(x, y)` with coordinates clamped into the plane.
    #[inline]
    pub fn clamped(&self, x: usize, y: usize) -> u8 {
        let x = x.min(self.width - 1);
        let y = y.min(self.height - 1);
        self.samples[y * self.width + x]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Prediction {
    /// Every block is predicted by mid-grey.
    None,
    /// Per-block DC / horizontal / vertical prediction from reconstructed neighbours.
    #[default]
    Intra,
}

impl Prediction {
    pub fn name(self) -> &'static str {
        match self {
            Self::None => "none",
            Self::Intra => "intra",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "none" => Some(Self::None),
            "intra" => Some(Self::Intra),
            _ => None,
        }
    }
}

impl core::fmt::Display for Prediction {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u8)]
pub enum IntraMode {
    Dc = 0,
    Horizontal = 1,
    Vertical = 2,
}

impl IntraMode {
    pub const ALL: [IntraMode; 3] = [Self::Dc, Self::Horizontal, Self::Vertical];

    fn from_u8(v: u8) -> Option<Self> {
        Self::ALL.get(v as usize).copied()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CodecConfig {
    pub block_size: TransformSize,
    pub offset: Rational,
    pub prediction: Prediction,
}

impl Default for CodecConfig {
    fn default() -> Self {
        Self {
            block_size: TransformSize::N8,
            offset: Rational::new(CODEC_OFFSET.0, CODEC_OFFSET.1),
            prediction: Prediction::default(),
        }
    }
}

impl CodecConfig {
    pub fn with_block_size(n: usize) -> Result<Self> {
        Ok(Self {
            block_size: TransformSize::from_len(n)?,
            ..Self::default()
        })
    }

    /// Quantizer for `qp`: `qp_to_qstep(qp) * coefficient gain`, rounded to a
    /// multiple of `1 / STEP_DENOM`.
    pub fn quantizer(&self, qp: i32) -> Result<Quantizer> {
        let step = qp_to_qstep(qp)? * self.block_size.coefficient_gain() as f64;
        let numer = libm::round(step * STEP_DENOM as f64) as i64;
        Quantizer::new(
            Rational::new(numer, STEP_DENOM),
            self.offset,
            TieBreak::TowardZero,
        )
    }
}

/// Quantized levels of every block of a plane.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EncodedPlane {
    pub qp: u8,
    pub config_offset: Rational,
    pub block_size: TransformSize,
    pub prediction: Prediction,
    pub width: usize,
    pub height: usize,
    /// Blocks in raster order, each `N * N` row-major levels.
    pub levels: Vec<i64>,
    /// One [`IntraMode`] per block in raster order; empty without prediction.
    pub modes: Vec<u8>,
}

impl EncodedPlane {
    pub fn blocks_x(&self) -> usize {
        self.width.div_ceil(self.block_size.len())
    }

    pub fn blocks_y(&self) -> usize {
        self.height.div_ceil(self.block_size.len())
    }

    pub fn nonzero_levels(&self) -> usize {
        self.levels.iter().filter(|&&l| l != 0).count()
    }

    pub fn config(&self) -> CodecConfig {
        CodecConfig {
            block_size: self.block_size,
            offset: self.config_offset,
            prediction: self.prediction,
        }
    }
}

/// Reconstructed samples of the padded block grid.
struct Canvas {
    n: usize,
    stride: usize,
    samples: Vec<u8>,
}

impl Canvas {
    fn new(n: usize, bx: usize, by: usize) -> Self {
        Self {
            n,
            stride: bx * n,
            samples: vec![0; bx * n * by * n],
        }
    }

    /// Reference samples above and to the left of block `(row, col)`.
    fn neighbours(&self, row: usize, col: usize) -> (Option<&[u8]>, Option<Vec<u8>>) {
        let (n, stride) = (self.n, self.stride);
        let top = (row > 0).then(|| {
            let start = (row * n - 1) * stride + col * n;
            &self.samples[start..start + n]
        });
        let left = (col > 0).then(|| {
            (0..n)
                .map(|y| self.samples[(row * n + y) * stride + col * n - 1])
                .collect()
        });
        (top, left)
    }

    fn predict(
        &self,
        row: usize,
        col: usize,
        prediction: Prediction,
        mode: IntraMode,
        out: &mut [i32],
    ) {
        let n = self.n;
        if prediction == Prediction::None {
            out.fill(CENTER);
            return;
        }
        let (top, left) = self.neighbours(row, col);
        let left = left.as_deref();
        let dc = {
            let (sum, count) = top
                .into_iter()
                .chain(left)
                .flatten()
                .fold((0u32, 0u32), |(s, c), &v| (s + v as u32, c + 1));
            (sum + count / 2).checked_div(count).map_or(CENTER, |v| v as i32)
        };
        for y in 0..n {
            for x in 0..n {
                out[y * n + x] = match (mode, top, left) {
                    (IntraMode::Horizontal, _, Some(l)) => l[y] as i32,
                    (IntraMode::Vertical, Some(t), _) => t[x] as i32,
                    _ => dc,
                };
            }
        }
    }

    fn store(&mut self, row: usize, col: usize, pred: &[i32], residual: &Block) {
        let n = self.n;
        for y in 0..n {
            for x in 0..n {
                let v = pred[y * n + x] + residual.samples()[y * n + x];
                self.samples[(row * n + y) * self.stride + col * n + x] = v.clamp(0, 255) as u8;
            }
        }
    }

    fn crop(&self, width: usize, height: usize) -> Result<Plane> {
        let mut out = Vec::with_capacity(width * height);
        for y in 0..height {
            out.extend_from_slice(&self.samples[y * self.stride..y * self.stride + width]);
        }
        Plane::new(width, height, out)
    }
}

fn sad(src: &[i32], pred: &[i32]) -> u32 {
    src.iter().zip(pred).map(|(a, b)| a.abs_diff(*b)).sum()
}

pub fn encode_plane(plane: &Plane, qp: i32, block_size: usize) -> Result<EncodedPlane> {
    encode_plane_with(plane, qp, &CodecConfig::with_block_size(block_size)?)
}

pub fn encode_plane_with(plane: &Plane, qp: i32, cfg: &CodecConfig) -> Result<EncodedPlane> {
    let quant = cfg.quantizer(qp)?;
    let n = cfg.block_size.len();
    let bx = plane.width.div_ceil(n);
    let by = plane.height.div_ceil(n);
    let mut levels = Vec::with_capacity(bx * by * n * n);
    let mut modes = Vec::new();
    let mut canvas = Canvas::new(n, bx, by);
    let mut src = vec![0i32; n * n];
    let mut pred = vec![0i32; n * n];
    let mut best = vec![0i32; n * n];
    for row in 0..by {
        for col in 0..bx {
            for y in 0..n {
                for x in 0..n {
                    src[y * n + x] = plane.clamped(col * n + x, row * n + y) as i32;
                }
            }
            let mut best_mode = IntraMode::Dc;
            let mut best_cost = u32::MAX;
            let candidates: &[IntraMode] = match cfg.prediction {
                Prediction::None => &IntraMode::ALL[..1],
                Prediction::Intra => &IntraMode::ALL,
            };
            for &mode in candidates {
                canvas.predict(row, col, cfg.prediction, mode, &mut pred);
                let cost = sad(&src, &pred);
                if cost < best_cost {
                    best_cost = cost;
                    best_mode = mode;
                    best.copy_from_slice(&pred);
                }
            }
            let residual: Vec<i32> = src.iter().zip(&best).map(|(s, p)| s - p).collect();
            let coeffs = forward_transform(&Block::new(n, residual)?);
            let start = levels.len();
            levels.extend(coeffs.coeffs().iter().map(|&c| quant.quantize(c as i64)));
            canvas.store(
                row,
                col,
                &best,
                &reconstruct_residual(&quant, n, &levels[start..])?,
            );
            if cfg.prediction == Prediction::Intra {
                modes.push(best_mode as u8);
            }
        }
    }
    Ok(EncodedPlane {
        qp: qp as u8,
        config_offset: cfg.offset,
        block_size: cfg.block_size,
        prediction: cfg.prediction,
        width: plane.width,
        height: plane.height,
        levels,
        modes,
    })
}

/// Reconstructed coefficient: `level * step` rounded half away from zero.
#[inline]
fn dequantize_coeff(quant: &Quantizer, level: i64) -> i32 {
    let step = quant.step();
    let (sn, sd) = (*step.numer() as i128, *step.denom() as i128);
    let mag = (level.unsigned_abs() as i128 * sn * 2 + sd) / (2 * sd);
    let v = if level < 0 { -mag } else { mag };
    v.clamp(i16::MIN as i128, i16::MAX as i128) as i32
}

fn reconstruct_residual(quant: &Quantizer, n: usize, levels: &[i64]) -> Result<Block> {
    let coeffs: Vec<i32> = levels.iter().map(|&l| dequantize_coeff(quant, l)).collect();
    Ok(inverse_transform(&CoeffBlock::new(n, coeffs)?))
}

pub fn decode_plane(enc: &EncodedPlane) -> Result<Plane> {
    let quant = enc.config().quantizer(enc.qp as i32)?;
    let n = enc.block_size.len();
    let (bx, by) = (enc.blocks_x(), enc.blocks_y());
    if enc.levels.len() != bx * by * n * n {
        return Err(Error::BlockLength {
            expected: bx * by * n * n,
            got: enc.levels.len(),
        });
    }
    let want_modes = match enc.prediction {
        Prediction::None => 0,
        Prediction::Intra => bx * by,
    };
    if enc.modes.len() != want_modes {
        return Err(Error::BlockLength {
            expected: want_modes,
            got: enc.modes.len(),
        });
    }
    let mut canvas = Canvas::new(n, bx, by);
    let mut pred = vec![0i32; n * n];
    for (idx, lv) in enc.levels.chunks_exact(n * n).enumerate() {
        let (row, col) = (idx / bx, idx % bx);
        let mode = match enc.modes.get(idx) {
            Some(&m) => IntraMode::from_u8(m).ok_or(Error::InvalidMode(m))?,
            None => IntraMode::Dc,
        };
        canvas.predict(row, col, enc.prediction, mode, &mut pred);
        canvas.store(row, col, &pred, &reconstruct_residual(&quant, n, lv)?);
    }
    canvas.crop(enc.width, enc.height)
}

fn entropy_bits<T: Copy + Ord>(symbols: &[T]) -> f64 {
    let mut sorted = symbols.to_vec();
    sorted.sort_unstable();
    let total = sorted.len() as f64;
    let mut bits = 0.0;
    for run in sorted.chunk_by(|a, b| a == b) {
        let p = run.len() as f64 / total;
        bits -= run.len() as f64 * libm::log2(p);
    }
    bits
}

/// Zeroth-order entropy of the level symbols, plus that of the mode symbols,
/// in bits per plane sample.
pub fn estimate_rate(enc: &EncodedPlane) -> f64 {
    (entropy_bits(&enc.levels) + entropy_bits(&enc.modes)) / (enc.width * enc.height) as f64
}

pub fn mse(a: &Plane, b: &Plane) -> Result<f64> {
    if a.width != b.width || a.height != b.height {
        return Err(Error::DimensionMismatch(
            a.width, a.height, b.width, b.height,
        ));
    }
    let sum: u64 = a
        .samples
        .iter()
        .zip(&b.samples)
        .map(|(&x, &y)| {
            let d = x as i64 - y as i64;
            (d * d) as u64
        })
        .sum();
    Ok(sum as f64 / a.samples.len() as f64)
}

/// `10 log10(255^2 / MSE)`; identical planes give [`PSNR_CAP`].
pub fn psnr(a: &Plane, b: &Plane) -> Result<f64> {
    let mse = mse(a, b)?;
    if mse.is_zero() {
        return Ok(PSNR_CAP);
    }
    Ok(10.0 * libm::log10(255.0 * 255.0 / mse))
}

/// Parameters of a synthetic test plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContentSpec {
    pub seed: u64,
    /// Spatial detail knob in `[0, 1]`.
    pub complexity: f64,
    pub width: usize,
    pub height: usize,
}

/// Blur radius at complexity 0; it falls linearly to 0 at complexity 1.
pub const CONTENT_MAX_BLUR: f64 = 6.0;
/// Texture standard deviation is `BASE + SPAN * complexity` grey levels.
pub const CONTENT_TEXTURE_BASE: f64 = 6.0;
pub const CONTENT_TEXTURE_SPAN: f64 = 42.0;
/// The diagonal ramp runs from `RAMP_LO` to `RAMP_LO + RAMP_SPAN`.
pub const CONTENT_RAMP_LO: f64 = 40.0;
pub const CONTENT_RAMP_SPAN: f64 = 176.0;

/// Deterministic texture: a diagonal ramp plus low-pass filtered noise.
///
/// Noise is uniform in `[-1, 1)` from a ChaCha8 stream seeded with
/// `spec.seed`, box-blurred twice with radius `round(6 (1 - c))`, normalized
/// to unit variance and scaled by `6 + 42 c`, so high-frequency energy grows
/// with the complexity `c`.
pub fn synth_content(spec: &ContentSpec) -> Result<Plane> {
    if !(0.0..=1.0).contains(&spec.complexity) {
        return Err(Error::InvalidComplexity);
    }
    let (w, h) = (spec.width, spec.height);
    if w == 0 || h == 0 {
        return Err(Error::PlaneDimensions {
            width: w,
            height: h,
            len: 0,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut noise: Vec<f64> = (0..w * h)
        .map(|_| rng.next_u32() as f64 / 2_147_483_648.0 - 1.0)
        .collect();
    let radius = libm::round(CONTENT_MAX_BLUR * (1.0 - spec.complexity)) as usize;
    for _ in 0..2 {
        box_blur(&mut noise, w, h, radius);
    }
    let n = noise.len() as f64;
    let mean = noise.iter().sum::<f64>() / n;
    let var = noise.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    let norm = if var > 0.0 {
        1.0 / libm::sqrt(var)
    } else {
        0.0
    };
    let amp = CONTENT_TEXTURE_BASE + CONTENT_TEXTURE_SPAN * spec.complexity;
    let wd = (w.max(2) - 1) as f64;
    let hd = (h.max(2) - 1) as f64;
    let mut samples = Vec::with_capacity(w * h);
    for y in 0..h {
        for x in 0..w {
            let ramp = CONTENT_RAMP_LO + CONTENT_RAMP_SPAN * 0.5 * (x as f64 / wd + y as f64 / hd);
            let v = ramp + amp * (noise[y * w + x] - mean) * norm;
            samples.push(libm::round(v).clamp(0.0, 255.0) as u8);
        }
    }
    Plane::new(w, h, samples)
}

fn box_blur(data: &mut [f64], w: usize, h: usize, radius: usize) {
    if radius == 0 {
        return;
    }
    let r = radius as isize;
    let norm = 1.0 / (2 * radius + 1) as f64;
    let mut tmp = vec![0.0; data.len()];
    for y in 0..h {
        for x in 0..w {
            let mut acc = 0.0;
            for d in -r..=r {
                let xx = (x as isize + d).clamp(0, w as isize - 1) as usize;
                acc += data[y * w + xx];
            }
            tmp[y * w + x] = acc * norm;
        }
    }
    for y in 0..h {
        for x in 0..w {
            let mut acc = 0.0;
            for d in -r..=r {
                let yy = (y as isize + d).clamp(0, h as isize - 1) as usize;
                acc += tmp[yy * w + x];
            }
            data[y * w + x] = acc * norm;
        }
    }
}

/// Mean squared difference between horizontally and vertically adjacent samples.
pub fn gradient_energy(p: &Plane) -> f64 {
    let (w, h) = (p.width, p.height);
    let mut sum = 0.0;
    let mut count = 0usize;
    for y in 0..h {
        for x in 0..w {
            let v = p.samples[y * w + x] as f64;
            if x + 1 < w {
                let d = p.samples[y * w + x + 1] as f64 - v;
                sum += d * d;
                count += 1;
            }
            if y + 1 < h {
                let d = p.samples[(y + 1) * w + x] as f64 - v;
                sum += d * d;
                count += 1;
            }
        }
    }
    if count == 0 {
        0.0
    } else {
        sum / count as f64
    }
}

/// All QPs accepted by the codec.
pub fn all_qps() -> impl Iterator<Item = i32> + Clone {
    0..=MAX_QP
}

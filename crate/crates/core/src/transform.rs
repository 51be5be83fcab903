//! Integer DCT-like core transform with 16-bit intermediate clipping.
//!
//! Basis matrices and shift schedule follow the HEVC core transform
//! (ITU-T H.265 clause 8.6.4.2 for the inverse; the matching forward stages are
//! those of the HM reference encoder). Every stage output is rounded, shifted
//! and clipped to the signed 16-bit range.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Bit depth of the video samples the transform is configured for.
pub const SAMPLE_BIT_DEPTH: u32 = 8;
/// Inverse transform outputs are clipped to signed `SAMPLE_BIT_DEPTH + 1` bits.
pub const RESIDUAL_MIN: i32 = -(1 << SAMPLE_BIT_DEPTH);
pub const RESIDUAL_MAX: i32 = (1 << SAMPLE_BIT_DEPTH) - 1;
pub const COEFF_MIN: i32 = i16::MIN as i32;
pub const COEFF_MAX: i32 = i16::MAX as i32;
/// Right shift after the first inverse stage.
pub const INVERSE_SHIFT_1: u32 = 7;
/// Right shift after the second inverse stage, `20 - bit depth`.
pub const INVERSE_SHIFT_2: u32 = 20 - SAMPLE_BIT_DEPTH;

#[rustfmt::skip]
const DCT4: [i32; 16] = [
    64,  64,  64,  64,
    83,  36, -36, -83,
    64, -64, -64,  64,
    36, -83,  83, -36,
];

#[rustfmt::skip]
const DCT8: [i32; 64] = [
    64,  64,  64,  64,  64,  64,  64,  64,
    89,  75,  50,  18, -18, -50, -75, -89,
    83,  36, -36, -83, -83, -36,  36,  83,
    75, -18, -89, -50,  50,  89,  18, -75,
    64, -64, -64,  64,  64, -64, -64,  64,
    50, -89,  18,  75, -75, -18,  89, -50,
    36, -83,  83, -36, -36,  83, -83,  36,
    18, -50,  75, -89,  89, -75,  50, -18,
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TransformSize {
    N4,
    N8,
}

impl TransformSize {
    pub fn from_len(n: usize) -> Result<Self> {
        match n {
            4 => Ok(Self::N4),
            8 => Ok(Self::N8),
            _ => Err(Error::UnsupportedSize(n)),
        }
    }

    pub fn len(self) -> usize {
        match self {
            Self::N4 => 4,
            Self::N8 => 8,
        }
    }

    pub fn is_empty(self) -> bool {
        false
    }

    pub fn area(self) -> usize {
        self.len() * self.len()
    }

    pub fn log2(self) -> u32 {
        self.len().trailing_zeros()
    }

    fn matrix(self) -> &'static [i32] {
        match self {
            Self::N4 => &DCT4,
            Self::N8 => &DCT8,
        }
    }

    /// `log2(N) - 1 + (bit depth - 8)`.
    pub fn forward_shift_1(self) -> u32 {
        self.log2() - 1 + (SAMPLE_BIT_DEPTH - 8)
    }

    /// `log2(N) + 6`.
    pub fn forward_shift_2(self) -> u32 {
        self.log2() + 6
    }

    /// Factor between these coefficients and an orthonormal DCT, `2^(7 - log2 N)`.
    pub fn coefficient_gain(self) -> i64 {
        1 << (15 - SAMPLE_BIT_DEPTH - self.log2())
    }
}

/// Square block of residual samples.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Block {
    size: TransformSize,
    samples: Vec<i32>,
}

impl Block {
    /// Row-major samples; each must fit in 16 bits.
    pub fn new(n: usize, samples: Vec<i32>) -> Result<Self> {
        let size = TransformSize::from_len(n)?;
        if samples.len() != size.area() {
            return Err(Error::BlockLength {
                expected: size.area(),
                got: samples.len(),
            });
        }
        Ok(Self {
            size,
            samples: samples.into_iter().map(clip16).collect(),
        })
    }

    pub fn zeros(size: TransformSize) -> Self {
        Self {
            size,
            samples: vec![0; size.area()],
        }
    }

    pub fn size(&self) -> TransformSize {
        self.size
    }

    pub fn samples(&self) -> &[i32] {
        &self.samples
    }
}

/// Square block of 16-bit transform coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CoeffBlock {
    size: TransformSize,
    coeffs: Vec<i32>,
}

impl CoeffBlock {
    /// Row-major coefficients, clipped to 16 bits.
    pub fn new(n: usize, coeffs: Vec<i32>) -> Result<Self> {
        let size = TransformSize::from_len(n)?;
        if coeffs.len() != size.area() {
            return Err(Error::BlockLength {
                expected: size.area(),
                got: coeffs.len(),
            });
        }
        Ok(Self {
            size,
            coeffs: coeffs.into_iter().map(clip16).collect(),
        })
    }

    pub fn size(&self) -> TransformSize {
        self.size
    }

    pub fn coeffs(&self) -> &[i32] {
        &self.coeffs
    }
}

#[inline]
fn clip16(v: i32) -> i32 {
    v.clamp(COEFF_MIN, COEFF_MAX)
}

#[inline]
fn round_shift(v: i64, shift: u32) -> i64 {
    (v + (1 << (shift - 1))) >> shift
}

/// One 1-D stage over every row of `src`, written transposed into `dst`.
///
/// `dst[k][i] = sum_j basis(k, j) * src[i][j]`; two calls yield `B X B^T`.
fn stage(
    src: &[i32],
    dst: &mut [i32],
    size: TransformSize,
    inverse: bool,
    shift: u32,
    lo: i32,
    hi: i32,
) {
    let n = size.len();
    let m = size.matrix();
    for i in 0..n {
        let row = &src[i * n..(i + 1) * n];
        for k in 0..n {
            let mut acc = 0i64;
            for (j, &v) in row.iter().enumerate() {
                let b = if inverse { m[j * n + k] } else { m[k * n + j] };
                acc += b as i64 * v as i64;
            }
            dst[k * n + i] = round_shift(acc, shift).clamp(lo as i64, hi as i64) as i32;
        }
    }
}

pub fn forward_transform(block: &Block) -> CoeffBlock {
    let size = block.size;
    let mut tmp = vec![0; size.area()];
    let mut out = vec![0; size.area()];
    stage(
        &block.samples,
        &mut tmp,
        size,
        false,
        size.forward_shift_1(),
        COEFF_MIN,
        COEFF_MAX,
    );
    stage(
        &tmp,
        &mut out,
        size,
        false,
        size.forward_shift_2(),
        COEFF_MIN,
        COEFF_MAX,
    );
    CoeffBlock { size, coeffs: out }
}

pub fn inverse_transform(coeffs: &CoeffBlock) -> Block {
    let size = coeffs.size;
    let mut tmp = vec![0; size.area()];
    let mut out = vec![0; size.area()];
    stage(
        &coeffs.coeffs,
        &mut tmp,
        size,
        true,
        INVERSE_SHIFT_1,
        COEFF_MIN,
        COEFF_MAX,
    );
    stage(
        &tmp,
        &mut out,
        size,
        true,
        INVERSE_SHIFT_2,
        RESIDUAL_MIN,
        RESIDUAL_MAX,
    );
    Block { size, samples: out }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoundtripStats {
    pub max_abs: i32,
    pub mean_abs: f64,
    pub samples: u64,
}

/// Sample error statistics of `inverse(forward(b))` against `b`.
pub fn roundtrip_error_stats<'a, I>(blocks: I) -> Result<RoundtripStats>
where
    I: IntoIterator<Item = &'a Block>,
{
    let (mut max_abs, mut sum, mut count) = (0i32, 0u64, 0u64);
    for b in blocks {
        let back = inverse_transform(&forward_transform(b));
        for (&x, &y) in b.samples.iter().zip(&back.samples) {
            let e = (x - y).abs();
            max_abs = max_abs.max(e);
            sum += e as u64;
            count += 1;
        }
    }
    if count == 0 {
        return Err(Error::EmptyInput);
    }
    Ok(RoundtripStats {
        max_abs,
        mean_abs: sum as f64 / count as f64,
        samples: count,
    })
}

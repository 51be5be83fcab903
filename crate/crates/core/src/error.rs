use thiserror::Error;

/// Errors produced by the analysis core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("quantization step must be positive")]
    NonPositiveStep,
    #[error("rounding offset must lie in [0, 1)")]
    OffsetOutOfRange,
    #[error("QP {0} outside 0..=51")]
    QpOutOfRange(i32),
    #[error("empty coefficient domain [{lo}, {hi}]")]
    EmptyDomain { lo: i64, hi: i64 },
    #[error("direct error is zero, the error ratio is undefined")]
    UndefinedRatio,
    #[error("quantizers use different rounding offsets")]
    MismatchedOffsets,
    #[error("unsupported transform size {0}")]
    UnsupportedSize(usize),
    #[error("block has {got} samples, expected {expected}")]
    BlockLength { expected: usize, got: usize },
    #[error("plane dimensions {width}x{height} do not match {len} samples")]
    PlaneDimensions {
        width: usize,
        height: usize,
        len: usize,
    },
    #[error("planes differ in size: {0}x{1} vs {2}x{3}")]
    DimensionMismatch(usize, usize, usize, usize),
    #[error("rate {rate} outside curve span [{min}, {max}]")]
    OutOfSpan { rate: f64, min: f64, max: f64 },
    #[error("rate-distortion curve has no usable points")]
    EmptyCurve,
    #[error("empty input")]
    EmptyInput,
    #[error("bin width must be positive")]
    InvalidBinWidth,
    #[error("unknown intra mode {0}")]
    InvalidMode(u8),
    #[error("complexity must lie in [0, 1]")]
    InvalidComplexity,
    #[error("records for plane {plane_id}, qp_s {qp_s} miss qp_t {qp_t}")]
    MissingNeighbor { plane_id: u32, qp_s: u8, qp_t: u8 },
}

pub type Result<T> = core::result::Result<T, Error>;

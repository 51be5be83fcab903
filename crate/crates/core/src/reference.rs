//! Reference numbers measured with the HM 15.0 encoder ('main_randomaccess',
//! six full-HD sequences, 200 frames each) and with the published two-stage
//! quantizer example. They are printed next to toy-codec results for
//! comparison and are never used as pass/fail thresholds: the toy codec is a
//! single-plane intra coder without in-loop filters or a real entropy coder.

/// Average of the per-sequence maximum ΔPSNR loss over all ratios, dB.
pub const HM_AVG_MAX_LOSS_DB: f64 = 1.4;
/// Same, restricted to ratios below 100%, dB (reported as an upper bound).
pub const HM_PRACTICAL_MAX_LOSS_DB: f64 = 0.7;
/// Local minimum of the averaged loss curve, dB, and the ratio where it sits.
pub const HM_MIN_LOSS_DB: f64 = 0.35;
pub const HM_MIN_LOSS_RATIO: f64 = 0.95;
/// Local maximum of the averaged loss curve, dB, and its approximate ratio.
pub const HM_LOCAL_MAX_LOSS_DB: f64 = 0.63;
pub const HM_LOCAL_MAX_LOSS_RATIO: f64 = 0.75;
/// Average loss of the `qp_t = qp_s - 1` transcodes that land at ratio 100%, dB.
pub const HM_UNIT_RATIO_LOSS_DB: f64 = 0.5;

/// Published example of single versus two-stage mean error for source step
/// 10 and target step 20 (averaging convention not stated).
pub const PUBLISHED_STEP_S: i64 = 10;
pub const PUBLISHED_STEP_T: i64 = 20;
pub const PUBLISHED_E_A: f64 = 12.0;
pub const PUBLISHED_E_B: f64 = 14.5;
pub const PUBLISHED_RATIO: f64 = 1.2;

//! Quality-loss analysis for cascaded requantization.
//!
//! The crate is `no_std` with `alloc`. It contains
//!
//! * [`quantizer`]: the dead-zone scalar quantizer and QP mapping,
//! * [`requant`]: exhaustive single- versus two-stage quantization error
//!   experiments, ratio sweeps, surfaces and boundary overlap,
//! * [`transform`]: the 16-bit integer DCT-like core transform,
//! * [`codec`]: an intra block codec (optionally prediction-free) with entropy-estimated
//!   rate, PSNR and synthetic test content,
//! * [`cpdt`]: the cascaded pixel-domain transcoding harness (RD curves,
//!   transcode records, ratio profiles, local-minimum reports).
#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod codec;
pub mod cpdt;
pub mod error;
pub mod quantizer;
pub mod reference;
pub mod requant;
pub mod transform;

pub use codec::{CodecConfig, ContentSpec, EncodedPlane, Plane, Prediction};
pub use cpdt::{RDCurve, RDPoint, RatioProfile, TranscodeRecord};
pub use error::{Error, Result};
pub use quantizer::{qp_to_qstep, Quantizer, Rational, TieBreak};
pub use requant::{CoefficientDomain, ErrorMetric, ErrorSurface, OverlapReport, RequantPoint};
pub use transform::{Block, CoeffBlock, TransformSize};

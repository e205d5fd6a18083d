//! Pure building blocks for the violence-screening pipeline.
//!
//! Everything here is `no_std` (with `alloc`): clip and frame types, the raw
//! IISV container and binary PPM codecs, the five frame samplers, single-level
//! Lucas-Kanade flow, super-image layout and composition, and the evaluation
//! arithmetic. Filesystem access, timing and serving live in the `iis` crate.
#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod analysis;
pub mod flow;
pub mod frame;
pub mod iisv;
pub mod manifest;
pub mod ppm;
pub mod rng;
pub mod sampling;
pub mod super_image;

pub use analysis::{
    calibrate_threshold, clip_motion_energy, confusion, detect, metrics, AnalysisError,
    BenchmarkReport, ConfusionCounts, Detection, Detector, Label, MetricsReport,
    MotionEnergyDetector,
};
pub use flow::{lk_flow, motion_score, spatial_gradients, FlowError, FlowField, FlowParams};
pub use frame::{resize_bilinear, to_grayscale, Clip, Frame, FrameError, GrayFrame, Rgb};
pub use iisv::{decode_iisv, encode_iisv, IisvError};
pub use manifest::{
    parse_manifest, validate_manifest, ManifestEntry, ManifestError, ManifestWarning,
};
pub use ppm::{read_ppm, write_ppm, PpmError};
pub use rng::SplitMix64;
pub use sampling::{sample, SampleError, SampleResult, SamplerKind, SamplerSpec};
pub use super_image::{
    build_super_image, choose_grid, compose, GridLayout, SuperImage, SuperImageError,
};

/// Stable, machine-readable name of an error variant (`"BadMagic"`, `"KTooLarge"`, ...).
pub trait ErrorName {
    fn name(&self) -> &'static str;
}

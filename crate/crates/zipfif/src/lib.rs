//! Fractal interpolation with hidden variables over zipper-ordered interval
//! maps: build the system from data, render the interpolant pair exactly,
//! derive closed-form feasibility intervals on the scaling factors for shape
//! guarantees, and verify those guarantees on rendered samples.

pub mod config;
pub mod error;
pub mod model;
pub mod render;
pub mod shape;
pub mod system;
pub mod verify;

pub use config::{load_config, LoadedRun, RunConfig};
pub use error::{ConfigError, ModelError, RenderError, ShapeError, SystemError, VerifyError};
pub use model::{ContractionMode, ExtendedDataSet, FactorFunction, ScalingFamily, Signature};
pub use render::{evaluate_at, refine_orbit, sample_uniform, CurveSample};
pub use shape::{
    check_family, positivity_intervals, rectangle_intervals, slope_intervals, FeasibleInterval,
    ShapeMode, ShapeSpec, Stage,
};
pub use system::ZipperSystem;
pub use verify::{
    check_interpolation, check_lines, check_positive, check_rectangle, l1_error, weierstrass,
    VerificationReport,
};

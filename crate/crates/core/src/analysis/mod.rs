//! Error norms, convergence orders, run configuration and the weighted-parameter sweep.

pub mod config;
pub mod errors;
pub mod order;
pub mod region;
pub mod report;
pub mod study;

pub use config::{parse_angle, RunConfig, CACHE_ENV};
pub use errors::{field_errors, pressure_shift, FieldErrors};
pub use order::{convergence_order, ConvergenceTable};
pub use region::{PointErrors, RegionMap, DEFAULT_THRESHOLD};
pub use study::{
    convergence_study, run_cached, run_many, run_spec, run_sweep, Cache, ConvergenceStudy, ErrorReport, RunSpec,
    SweepResult,
};

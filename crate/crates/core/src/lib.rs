//! Random toric surfaces.
//!
//! A complete fan `Σ_h` is built from every primitive lattice vector of
//! sup-norm at most `h`. Random fans keep each of those rays independently
//! with probability `p` and complete the result. This crate provides the
//! exact lattice geometry, fan completion and singularity indices, the
//! blowdown analysis of `Σ_h`, seeded sampling, and Monte Carlo sweeps with
//! byte-stable CSV/JSON output.

pub mod blowdown;
pub mod error;
pub mod experiments;
pub mod fan;
pub mod lattice;
pub mod random;
pub mod reports;
pub mod table;

pub use blowdown::{
    band_bounds, blowdown_index, blowdown_table, epsilon_of, neighbors, ratio_geq, smooth_partners, Band, BlowdownTable,
};
pub use error::{Error, Result};
pub use experiments::{
    run_density_sweep, run_threshold_sweep, ExperimentSpec, QSchedule, Regime, SweepRow, TrialRecord,
};
pub use fan::{complete_fan, cone_index, delta_k, is_smooth, spectrum, Cone2, Fan, FanRecord, SingularitySpectrum};
pub use lattice::{angular_compare, enumerate_rays, is_primitive, sup_norm, wedge, RayUniverse, RayVec, MAX_HEIGHT};
pub use random::{prob_complete, sample_fan, sample_rays, SampleConfig};
pub use reports::{conjecture_report, conjectured_limit, space_report, ConjectureReport};
pub use table::{emit, Cell, Format, Table};

pub use num_rational::Ratio;

//! Time integration of `ρ ∂_t^2 u = Au + N(u, u)` from compactly supported data,
//! with manufactured-solution checks and the no-contact horizon.

mod checkpoint;
mod data;
mod manufactured;
mod params;
mod run;
mod stepper;

pub use checkpoint::{read_checkpoint, write_checkpoint, Checkpoint, CHECKPOINT_SCHEMA_VERSION};
pub use data::{envelope, make_cauchy_data, profile_fields, CauchyData, Profile};
pub use manufactured::{
    integrate_manufactured, measure_phase_speed, run_manufactured, ManufacturedRun, PhaseSpeed,
    PlaneWave, WaveKind,
};
pub use params::MaterialParams;
pub use run::{
    boundary_sup, run, run_with, stability_scan, BoundaryMode, RunConfig, RunOutcome, StabilityScan,
    DEFAULT_SENTINEL, SENTINEL_LAYERS,
};
pub use stepper::{cfl_dt, first_step, step, Boundary, ExactFn, Stepper, DRIVEN_LAYERS};

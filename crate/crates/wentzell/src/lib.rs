//! Size-structured population dynamics with diffusion and dynamic
//! (Wentzell-Robin) boundary conditions.
//!
//! Individuals are distributed over a size interval `[0, max_size]` and
//! drift (growth), diffuse, die, and recruit offspring through a birth
//! kernel. Both endpoints carry their own population mass, coupled to the
//! interior through the boundary flux; the resulting generator is Metzler,
//! mass bookkeeping is exact for conservative boundary constants, and the
//! long-run behaviour is asynchronous exponential growth at the dominant
//! eigenvalue.
//!
//! The crate exposes the pieces in layers: [`model`] describes coefficients
//! and admissibility, [`generator`] discretizes, [`evolution`] integrates in
//! time, [`resolvent`] and [`spectral`] cover the stationary theory, and
//! [`sampling`] draws random admissible models for stress tests. See the
//! `examples/` directory for runnable tours of each capability.

// Validation guards are written `!(x > 0.0)` on purpose: the negation also
// rejects NaN, which `x <= 0.0` would let through.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod app;
pub mod config;
pub mod error;
pub mod evolution;
pub mod generator;
pub mod grid;
pub mod linalg;
pub mod model;
pub mod output;
pub mod resolvent;
pub mod sampling;
pub mod spectral;
pub mod state;

pub use config::{parse_config, serialize_config, RunConfig};
pub use error::{Error, Result};
pub use evolution::{
    simulate, step_count, step_crank_nicolson, step_implicit_euler, step_warnings, Scheme, Stepper,
    Trajectory,
};
pub use generator::GeneratorMatrix;
pub use grid::Grid;
pub use model::{
    conservative_constants, norm_weights, validate, BoundaryConstants, Coefficient, Kernel, Model,
    NormWeights, ValidationReport,
};
pub use output::{write_outputs, OutputBundle};
pub use resolvent::{
    dissipativity_check, omega_min, solve_resolvent, DissipativityReport, ResolventOperator,
};
pub use sampling::{
    positivity_safe_dt, random_conservative_model, random_nonnegative_state, random_signed_state,
    BetaMode,
};
pub use spectral::{
    aeg_diagnostic, growth_rate_from_trajectory, irreducibility_check, spectral_bound,
    SpectralResult,
};
pub use state::PopulationState;

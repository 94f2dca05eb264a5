//! Radial ground and bound states of coupled elliptic systems with Hardy
//! potentials and critical Hardy–Sobolev nonlinearities.
//!
//! The crate computes positive radial solutions of
//!
//! ```text
//! -Δu - λ₁ u/|x|²  =  u^(2*₁ - 1)/|x|^s₁ + ν α h(|x|) u^(α-1) v^β / |x|^s₃
//! -Δv - λ₂ v/|x|²  =  v^(2*₂ - 1)/|x|^s₂ + ν β h(|x|) u^α v^(β-1) / |x|^s₃
//! ```
//!
//! on `R^N` by constrained minimization over the Nehari manifold and by a
//! deformation search along mountain-pass paths, on a log-radial mesh.
//!
//! Organization:
//! - [`analytic`]: closed forms — Hardy constants, critical exponents,
//!   extremal profiles, best constants, energy levels, coupling calculus,
//!   weight admissibility, and the scalar threshold `sigma_inf`.
//! - [`grid`]: the log-radial mesh, quadrature, differentiation, norms,
//!   field sampling, and plain-text field I/O.
//! - [`energy`]: the energy functional, its gradient, the Nehari manifold
//!   projection, and the coupling-term Hölder bound.
//! - [`solve`]: preconditioned Nehari descent, multistart, the semitrivial
//!   states, the mountain-pass deformation search, and concentration
//!   diagnostics.
//! - [`driver`]: flat `key = value` run configs, regime classification,
//!   coupling-strength sweeps, and the output files behind the `hsolve`
//!   binary.

// Validation code writes `!(x > 0.0)` deliberately: it rejects NaN along
// with out-of-range values, which `x <= 0.0` would silently admit.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod driver;
pub mod energy;
pub mod grid;
pub mod solve;

pub use analytic::{
    best_constant, coupling_exponents, critical_exponent, critical_level, hardy_constant,
    origin_rate, profile_amplitude, sigma_inf, sphere_area, validate_weight, CouplingExponents,
    CouplingRegime, CouplingWeight, ParamError, ProfileParams, SystemParams, WeightReport,
};
pub use driver::{
    classify_regime, nu_sweep, run_config, run_with_command, Command, Config, ConfigError,
    LevelOrder, RegimeReport, RunError, SaddleWindow, SmallNuGround, SweepRow, CONFIG_KEYS,
};
pub use energy::{
    EnergyBreakdown, EnergyError, HolderReport, NehariProjection, StatePair, SystemFunctional,
};
pub use grid::{read_field, write_field, FieldData, FieldIoError, GridError, RadialGrid};
pub use solve::{
    concentration_report, ground_state, mountain_pass, multistart_ground_state, semitrivial,
    Classification, ConcentrationReport, MultistartOutcome, Side, SolveError, SolveResult,
    SolverConfig, TraceRow,
};

//! Phase-space toolkit for the one-dimensional harmonic oscillator with an
//! inverse-square core (the radial/isotonic oscillator family).
//!
//! The crate evaluates exact Wigner functions and Wigner currents for the
//! half-line eigenstates and their even "bounce" extension, integrates the
//! quantum corrections to the phase-space current along exact classical
//! orbits, and reduces them to three flux-based classicality quantifiers
//! (probability, von Neumann entropy, purity). Every closed-form evaluator
//! has an independent quadrature oracle and the two are cross-checked in the
//! test suite.

// Numerical kernels index arrays by the subscripts of the recurrences and
// sums they implement, and tabulated constants keep their published digit
// counts; iterator rewrites and digit truncation would obscure the
// correspondence with the formulas.
#![allow(clippy::needless_range_loop, clippy::excessive_precision)]

pub mod checks;
pub mod classical;
pub mod flow;
pub mod io;
pub mod quadrature;
pub mod quantifiers;
pub mod quantum;
pub mod specfun;

pub use checks::{run_all, CheckOutcome};
pub use classical::{
    hamiltonian, trajectory, ClassicalError, ClassicalTrajectory, TrajectorySample,
};
pub use flow::{
    current_k, current_k_classical, current_x, delta_current_k, divergence_residual,
    evaluate_field, find_stagnation_points, StagnationClass, StagnationInventory, StagnationPoint,
};
pub use io::{
    write_currents, write_field, write_json_pretty, write_stagnation, write_sweep,
    write_trajectory, ExportFormat, IoError,
};
pub use quantifiers::{
    find_flux_zero, flux_report, flux_report_at, flux_sweep, FluxReport, QuantifierError, RateKind,
    SweepEntry,
};

pub use quantum::{
    eigenstate, energy_residual, wigner_closed, wigner_quadrature, wigner_y_closed,
    y_kernel_closed, y_kernel_quadrature, FieldLabel, PhaseGrid, QuantumError, ScalarField,
    SupportMode, SystemConfig,
};
pub use specfun::jet::TaylorJet;
pub use specfun::SpecFunError;

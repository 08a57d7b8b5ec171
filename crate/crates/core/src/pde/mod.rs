//! Two-particle Schrödinger oracle on a 1D×1D grid.
//!
//! Works in its own units (`ħ = m = 1` by default) with a softened
//! `1/√(r² + ε²)` kernel and periodic spectral kinetics. Used to check, on
//! the full wave function, that separable potentials sourced by `|ψ|²` or by
//! Bohmian positions keep product states unentangled while the pairwise
//! Newtonian potential entangles them.

mod bohm;
mod dyson;
mod evolve;
mod grid;
mod potential;
pub mod scenario;
mod spectral;

pub use bohm::{bohmian_velocity, born_sample, born_samples, step_bohmian, VelocityField, NODE_GUARD};
pub use dyson::{dyson_factorization_check, phase_rank1_residual, DysonReport};
pub use evolve::{
    evolve, evolve_with, replay_backward, schmidt_entropy, Propagator, RunRecord, Sample, EDGE_MASS_LIMIT,
    NORM_DRIFT_LIMIT,
};
pub use grid::{
    entangled_pair, gaussian_product, superposition_1d, superposition_product, Grid1D, Packet, Wavefunction2D,
};
pub use potential::{potential_grid, BohmianConfig, OracleModel, OracleParams, PotentialBuilder, PotentialField};
pub use spectral::{gradient, Fft2, KernelConvolution};

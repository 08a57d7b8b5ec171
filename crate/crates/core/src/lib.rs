//! Semi-classical gravity models of the BMV entanglement experiment.
//!
//! The crate has two tiers. The qubit tier ([`phase`], [`diagnostics`])
//! treats each wave-packet branch as a qubit basis state that only picks up
//! a phase, and evaluates the entanglement witness, entropy and partial
//! transpose for each gravity model. The grid tier ([`pde`]) integrates the
//! two-particle Schrödinger equation on a 1D×1D grid with potentials rebuilt
//! from the current wave function or Bohmian configuration, and checks that
//! additively separable potentials never create entanglement.

pub mod diagnostics;
pub mod error;
pub mod geometry;
pub mod pde;
pub mod phase;
pub mod state;

pub use error::{Error, Result};
pub use geometry::{
    branch_centers, branch_pairs, pair_separations, BranchCenters, BranchLabel, ExperimentGeometry,
    PhysicalConstants,
};
pub use state::{
    BranchPhaseFamily, PhaseTable, PotentialModel, SeparableRates, TwoQubitMixedState,
    TwoQubitPureState,
};

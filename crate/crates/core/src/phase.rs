//! Branch phases and two-qubit states in the static-bulk picture.
//!
//! Each wave-packet branch `(k, l)` only picks up a phase `exp(-iΔ_kl t/ħ)`
//! where `Δ_kl` is the potential evaluated at the branch centers. The
//! functions here evaluate those phases in closed form for each model and
//! assemble the corresponding states and mixtures.

use crate::geometry::{branch_pairs, BranchLabel, ExperimentGeometry, PhysicalConstants};
use crate::state::{
    BranchPhaseFamily, PhaseTable, PotentialModel, SeparableRates, TwoQubitMixedState,
    TwoQubitPureState,
};

/// Pairwise Newtonian phases `γ_kl = γ t / r_kl`.
pub fn newton_phases(geom: &ExperimentGeometry, consts: &PhysicalConstants, t: f64) -> PhaseTable {
    let gt = geom.coupling_rate(consts) * t;
    let mut gamma = [[0.0; 2]; 2];
    for (k, l) in branch_pairs() {
        gamma[k.index()][l.index()] = gt / geom.separation(k, l);
    }
    PhaseTable::general(gamma)
}

/// Per-particle rates reproducing the Newton–Schrödinger product state
/// with the overall `2γt/d` phase split evenly between the two factors.
pub fn ns_rates(geom: &ExperimentGeometry, consts: &PhysicalConstants) -> SeparableRates {
    let g = geom.coupling_rate(consts);
    let (d, delta) = (geom.d, geom.delta);
    let near = g / (d - delta);
    let far = g / (d + delta);
    let mid = g / d;
    SeparableRates { particle1: [far + mid, near + mid], particle2: [near + mid, far + mid] }
}

pub fn ns_phases(geom: &ExperimentGeometry, consts: &PhysicalConstants, t: f64) -> PhaseTable {
    ns_rates(geom, consts).phases_at(t)
}

/// Rates when the actual configuration sits at branch `(m, n)`: particle 1
/// feels particle 2 at `X_{2n}`, particle 2 feels particle 1 at `X_{1m}`.
pub fn nsb_rates(
    geom: &ExperimentGeometry,
    consts: &PhysicalConstants,
    branch: (BranchLabel, BranchLabel),
) -> SeparableRates {
    let g = geom.coupling_rate(consts);
    let (m, n) = branch;
    let x1 = |k| geom.center(1, k);
    let x2 = |l| geom.center(2, l);
    let p1 = BranchLabel::ALL.map(|k| g / (x1(k) - x2(n)).abs());
    let p2 = BranchLabel::ALL.map(|l| g / (x1(m) - x2(l)).abs());
    SeparableRates { particle1: p1, particle2: p2 }
}

pub fn nsb_branch_phases(
    geom: &ExperimentGeometry,
    consts: &PhysicalConstants,
    branch: (BranchLabel, BranchLabel),
    t: f64,
) -> PhaseTable {
    nsb_rates(geom, consts, branch).phases_at(t)
}

/// The branch family generated by the Bohmian-sourced potential.
pub fn nsb_family(geom: &ExperimentGeometry, consts: &PhysicalConstants) -> BranchPhaseFamily {
    let r = |m, n| nsb_rates(geom, consts, (m, n));
    use BranchLabel::*;
    BranchPhaseFamily { rates: [[r(L, L), r(L, R)], [r(R, L), r(R, R)]] }
}

/// Phase table for any model at time `t`.
pub fn phases_for(
    model: &PotentialModel,
    geom: &ExperimentGeometry,
    consts: &PhysicalConstants,
    t: f64,
) -> PhaseTable {
    match model {
        PotentialModel::Newton => newton_phases(geom, consts, t),
        PotentialModel::NewtonSchrodinger => ns_phases(geom, consts, t),
        PotentialModel::NewtonSchrodingerBohm { branch } => nsb_branch_phases(geom, consts, *branch, t),
        PotentialModel::SeparableGeneric(rates) => rates.phases_at(t),
        PotentialModel::DgDiagonal(family) => diagonal_phases(family, t),
    }
}

/// `amps[k][l] = ½ exp(i γ_kl(t))`.
pub fn state_at(
    model: &PotentialModel,
    geom: &ExperimentGeometry,
    consts: &PhysicalConstants,
    t: f64,
) -> TwoQubitPureState {
    TwoQubitPureState::from_phases(&phases_for(model, geom, consts, t))
}

/// Equal-weight mixture of the four Bohmian branch states.
pub fn nsb_mixture(geom: &ExperimentGeometry, consts: &PhysicalConstants, t: f64) -> TwoQubitMixedState {
    let comps: Vec<_> = branch_pairs()
        .map(|b| (0.25, TwoQubitPureState::from_phases(&nsb_branch_phases(geom, consts, b, t))))
        .collect();
    TwoQubitMixedState::mixture(&comps).expect("equal-weight mixture of pure states is a valid density matrix")
}

/// The four product states `|ψ^{mn}_t⟩`, in `(LL, LR, RL, RR)` order of `(m, n)`.
pub fn dg_branch_states(family: &BranchPhaseFamily, t: f64) -> [TwoQubitPureState; 4] {
    let mut out = [TwoQubitPureState::initial(); 4];
    for (i, (m, n)) in branch_pairs().enumerate() {
        out[i] = TwoQubitPureState::from_phases(&family.branch(m, n).phases_at(t));
    }
    out
}

fn diagonal_phases(family: &BranchPhaseFamily, t: f64) -> PhaseTable {
    let mut gamma = [[0.0; 2]; 2];
    for (k, l) in branch_pairs() {
        gamma[k.index()][l.index()] = family.branch(k, l).phases_at(t).get(k, l);
    }
    PhaseTable::general(gamma)
}

/// A state built from the diagonal phases `γ^{kl}_{kl}` of a branch family.
///
/// It takes each branch's phase from the configuration sitting in that same
/// branch, so it is *not* a solution of the family's dynamics; it is kept to
/// show that such a state can be entangled while every actual branch state
/// is a product.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiagonalPhaseState {
    pub state: TwoQubitPureState,
}

impl DiagonalPhaseState {
    pub const fn satisfies_dynamics(&self) -> bool {
        false
    }
}

pub fn dg_diagonal_state(family: &BranchPhaseFamily, t: f64) -> DiagonalPhaseState {
    DiagonalPhaseState { state: TwoQubitPureState::from_phases(&diagonal_phases(family, t)) }
}

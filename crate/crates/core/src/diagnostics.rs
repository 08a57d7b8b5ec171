//! Entanglement witness, entanglement entropy and the partial-transpose
//! test for two-qubit states.

use nalgebra::{Matrix2, Matrix4};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::geometry::{ExperimentGeometry, PhysicalConstants};
use crate::state::{hermitian_eigenvalues, PhaseTable, TwoQubitMixedState, TwoQubitPureState, STATE_TOL};

/// Maximum imaginary residue tolerated in an expectation value of a
/// Hermitian operator.
const IMAG_TOL: f64 = 1e-12;

/// `W = I⊗I − σx⊗σx − σy⊗σz − σz⊗σy` in the `(LL, LR, RL, RR)` basis.
#[derive(Clone, Debug, PartialEq)]
pub struct WitnessOperator {
    matrix: Matrix4<C64>,
}

impl WitnessOperator {
    pub fn matrix(&self) -> &Matrix4<C64> {
        &self.matrix
    }
}

fn pauli() -> [Matrix2<C64>; 4] {
    let o = C64::new(0.0, 0.0);
    let one = C64::new(1.0, 0.0);
    let i = C64::new(0.0, 1.0);
    [
        Matrix2::identity(),
        Matrix2::new(o, one, one, o),
        Matrix2::new(o, -i, i, o),
        Matrix2::new(one, o, o, -one),
    ]
}

fn kron(a: &Matrix2<C64>, b: &Matrix2<C64>) -> Matrix4<C64> {
    Matrix4::from_fn(|r, c| a[(r / 2, c / 2)] * b[(r % 2, c % 2)])
}

pub fn witness_operator() -> WitnessOperator {
    let [id, x, y, z] = pauli();
    WitnessOperator { matrix: kron(&id, &id) - kron(&x, &x) - kron(&y, &z) - kron(&z, &y) }
}

fn real_part(z: C64) -> f64 {
    assert!(
        z.im.abs() <= IMAG_TOL,
        "expectation of a Hermitian operator has imaginary part {:e}",
        z.im
    );
    z.re
}

/// `⟨ψ|W|ψ⟩`. Negative values certify entanglement.
pub fn witness_pure(state: &TwoQubitPureState) -> Result<f64> {
    let v = state.to_vector();
    let norm_sqr = v.norm_squared();
    if (norm_sqr - 1.0).abs() > STATE_TOL {
        return Err(Error::Normalization { norm_sqr });
    }
    let w = witness_operator();
    Ok(real_part(v.dotc(&(w.matrix * v))))
}

/// `Tr(ρ W)`.
pub fn witness_mixed(rho: &TwoQubitMixedState) -> Result<f64> {
    let checked = TwoQubitMixedState::new(*rho.matrix())?;
    let w = witness_operator();
    Ok(real_part((checked.matrix() * w.matrix).trace()))
}

/// The witness of `½ Σ exp(iγ_kl)|kl⟩` written directly in the phases.
pub fn witness_general(table: &PhaseTable) -> f64 {
    let [[ll, lr], [rl, rr]] = table.gamma;
    1.0 - 0.5
        * ((ll - rr).cos()
            + (lr - rl).cos()
            + (lr - ll).sin()
            + (lr - rr).sin()
            + (rl - ll).sin()
            + (rl - rr).sin())
}

/// Witness of a product of two single-qubit phase states; never negative.
pub fn witness_separable(g1l: f64, g1r: f64, g2l: f64, g2r: f64) -> f64 {
    1.0 - (g1l - g1r).cos() * (g2l - g2r).cos()
}

struct ClosedPhases {
    near: f64,
    far: f64,
    mid: f64,
}

fn closed_phases(geom: &ExperimentGeometry, consts: &PhysicalConstants, t: f64) -> ClosedPhases {
    let gt = geom.coupling_rate(consts) * t;
    ClosedPhases { near: gt / (geom.d - geom.delta), far: gt / (geom.d + geom.delta), mid: gt / geom.d }
}

/// Newtonian pair potential.
pub fn witness_closed_newton(geom: &ExperimentGeometry, consts: &PhysicalConstants, t: f64) -> f64 {
    let p = closed_phases(geom, consts, t);
    0.5 - 0.5 * (p.far - p.near).cos() + (p.mid - p.far).sin() + (p.mid - p.near).sin()
}

/// Newton–Schrödinger mean field.
pub fn witness_closed_ns(geom: &ExperimentGeometry, consts: &PhysicalConstants, t: f64) -> f64 {
    let p = closed_phases(geom, consts, t);
    1.0 - (p.far - p.near).cos().powi(2)
}

/// Equal-weight average over the four Bohmian branches.
pub fn witness_closed_nsb(geom: &ExperimentGeometry, consts: &PhysicalConstants, t: f64) -> f64 {
    let p = closed_phases(geom, consts, t);
    1.0 - 0.25 * ((p.mid - p.far).cos() + (p.mid - p.near).cos()).powi(2)
}

/// Schmidt coefficients squared of a 2×2 coefficient matrix, largest first,
/// from the trace and determinant of `M†M`. The small one is taken as
/// `|det M|² / s₁²` so product states give an exact zero-ish value instead
/// of a cancellation residue.
pub fn schmidt_weights(m: &Matrix2<C64>) -> [f64; 2] {
    let frob: f64 = m.iter().map(|z| z.norm_sqr()).sum();
    let det = (m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)]).norm_sqr();
    let disc = (frob * frob - 4.0 * det).max(0.0).sqrt();
    let big = 0.5 * (frob + disc);
    let small = if big > 0.0 { det / big } else { 0.0 };
    [big, small]
}

/// `−Σ p ln p` over weights summing to one, with `0 ln 0 = 0`.
pub fn shannon_nats<I: IntoIterator<Item = f64>>(weights: I) -> f64 {
    weights
        .into_iter()
        .filter(|&p| p > 0.0)
        .map(|p| -p * p.ln())
        .sum::<f64>()
        .max(0.0)
}

/// Entanglement entropy in nats; ranges over `[0, ln 2]`.
pub fn entanglement_entropy(state: &TwoQubitPureState) -> Result<f64> {
    let v = state.to_vector();
    let norm_sqr = v.norm_squared();
    if (norm_sqr - 1.0).abs() > STATE_TOL {
        return Err(Error::Normalization { norm_sqr });
    }
    let w = schmidt_weights(&state.coefficient_matrix());
    let total = w[0] + w[1];
    Ok(shannon_nats(w.map(|p| p / total)))
}

/// Partial transpose over the second qubit.
pub fn partial_transpose(rho: &Matrix4<C64>) -> Matrix4<C64> {
    Matrix4::from_fn(|r, c| {
        let (a, b) = (r / 2, r % 2);
        let (ap, bp) = (c / 2, c % 2);
        rho[(2 * a + bp, 2 * ap + b)]
    })
}

/// Smallest eigenvalue of the partial transpose. For two qubits a value
/// `≥ −10⁻¹²` certifies separability.
pub fn ppt_min_eigenvalue(rho: &TwoQubitMixedState) -> Result<f64> {
    let checked = TwoQubitMixedState::new(*rho.matrix())?;
    Ok(hermitian_eigenvalues(&partial_transpose(checked.matrix()))[0])
}

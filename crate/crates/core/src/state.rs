//! Two-qubit states over the branch basis and the phase tables that
//! generate them.
//!
//! Basis order is fixed as `(LL, LR, RL, RR)`, i.e. index `2k + l` for
//! particle-1 branch `k` and particle-2 branch `l`. `L` maps to the first
//! computational basis vector (σz = +1).

use nalgebra::{Matrix2, Matrix4, Vector4};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::geometry::{branch_pairs, BranchLabel};

pub(crate) const STATE_TOL: f64 = 1e-12;

#[inline]
pub fn basis_index(k: BranchLabel, l: BranchLabel) -> usize {
    2 * k.index() + l.index()
}

/// Accumulated branch phases `γ_kl(t) = -Δ_kl t / ħ` (radians).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhaseTable {
    pub gamma: [[f64; 2]; 2],
    /// `(γ_{1,k}, γ_{2,l})`, present iff the generating model is additively
    /// separable.
    pub separable_parts: Option<([f64; 2], [f64; 2])>,
}

impl PhaseTable {
    pub fn general(gamma: [[f64; 2]; 2]) -> Self {
        Self { gamma, separable_parts: None }
    }

    /// Builds `γ_kl = γ_{1,k} + γ_{2,l}`.
    pub fn separable(particle1: [f64; 2], particle2: [f64; 2]) -> Self {
        let mut gamma = [[0.0; 2]; 2];
        for k in 0..2 {
            for l in 0..2 {
                gamma[k][l] = particle1[k] + particle2[l];
            }
        }
        Self { gamma, separable_parts: Some((particle1, particle2)) }
    }

    pub fn get(&self, k: BranchLabel, l: BranchLabel) -> f64 {
        self.gamma[k.index()][l.index()]
    }

    pub fn is_finite(&self) -> bool {
        let parts_ok = self
            .separable_parts
            .map_or(true, |(a, b)| a.iter().chain(b.iter()).all(|v| v.is_finite()));
        self.gamma.iter().flatten().all(|v| v.is_finite()) && parts_ok
    }

    /// Largest deviation `|γ_kl - (γ_{1,k} + γ_{2,l})|` relative to the
    /// table's scale. `None` for non-separable tables.
    pub fn separable_residual(&self) -> Option<f64> {
        let (p1, p2) = self.separable_parts?;
        let scale = self.gamma.iter().flatten().fold(1.0f64, |m, v| m.max(v.abs()));
        let worst = branch_pairs()
            .map(|(k, l)| {
                (self.get(k, l) - (p1[k.index()] + p2[l.index()])).abs()
            })
            .fold(0.0, f64::max);
        Some(worst / scale)
    }
}

/// Normalized 4-amplitude state in `(LL, LR, RL, RR)` order.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwoQubitPureState {
    amps: [C64; 4],
}

impl TwoQubitPureState {
    pub fn new(amps: [C64; 4]) -> Result<Self> {
        let norm_sqr: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if !norm_sqr.is_finite() || (norm_sqr - 1.0).abs() > STATE_TOL {
            return Err(Error::Normalization { norm_sqr });
        }
        Ok(Self { amps })
    }

    /// Rescales to unit norm; rejects the zero vector.
    pub fn normalized(amps: [C64; 4]) -> Result<Self> {
        let norm_sqr: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if !(norm_sqr.is_finite() && norm_sqr > 0.0) {
            return Err(Error::Normalization { norm_sqr });
        }
        let s = norm_sqr.sqrt().recip();
        Ok(Self { amps: amps.map(|a| a * s) })
    }

    /// The initial product state `½(|L⟩+|R⟩)(|L⟩+|R⟩)`.
    pub fn initial() -> Self {
        Self { amps: [C64::new(0.5, 0.0); 4] }
    }

    /// `½ exp(i γ_kl)` for every branch pair.
    pub fn from_phases(table: &PhaseTable) -> Self {
        let mut amps = [C64::new(0.0, 0.0); 4];
        for (k, l) in branch_pairs() {
            amps[basis_index(k, l)] = C64::from_polar(0.5, table.get(k, l));
        }
        Self { amps }
    }

    /// `a ⊗ b` for normalized single-qubit vectors.
    pub fn product(a: [C64; 2], b: [C64; 2]) -> Result<Self> {
        Self::new([a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1]])
    }

    pub fn amps(&self) -> &[C64; 4] {
        &self.amps
    }

    pub fn amp(&self, k: BranchLabel, l: BranchLabel) -> C64 {
        self.amps[basis_index(k, l)]
    }

    pub fn to_vector(&self) -> Vector4<C64> {
        Vector4::from_column_slice(&self.amps)
    }

    /// Amplitudes reshaped as `M[k][l]`; its singular values are the
    /// Schmidt coefficients.
    pub fn coefficient_matrix(&self) -> Matrix2<C64> {
        Matrix2::new(self.amps[0], self.amps[1], self.amps[2], self.amps[3])
    }

    /// Multiplies branch `(k, l)` by `exp(i(θ₁_k + θ₂_l))`, a product of
    /// single-qubit diagonal unitaries.
    pub fn with_local_phases(&self, theta1: [f64; 2], theta2: [f64; 2]) -> Self {
        let mut amps = self.amps;
        for (k, l) in branch_pairs() {
            amps[basis_index(k, l)] *= C64::from_polar(1.0, theta1[k.index()] + theta2[l.index()]);
        }
        Self { amps }
    }

    pub fn projector(&self) -> Matrix4<C64> {
        let v = self.to_vector();
        &v * v.adjoint()
    }
}

/// 4×4 density matrix in `(LL, LR, RL, RR)` order.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoQubitMixedState {
    rho: Matrix4<C64>,
}

impl TwoQubitMixedState {
    /// Validates Hermiticity, unit trace and positivity, each to 10⁻¹².
    pub fn new(rho: Matrix4<C64>) -> Result<Self> {
        if rho.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::DensityMatrix("non-finite entry".into()));
        }
        let herm = (rho - rho.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if herm > STATE_TOL {
            return Err(Error::DensityMatrix(format!("not Hermitian (deviation {herm:e})")));
        }
        let tr = rho.trace();
        if (tr.re - 1.0).abs() > STATE_TOL || tr.im.abs() > STATE_TOL {
            return Err(Error::DensityMatrix(format!("trace {tr} differs from 1")));
        }
        let min_eig = hermitian_eigenvalues(&rho).into_iter().fold(f64::INFINITY, f64::min);
        if min_eig < -STATE_TOL {
            return Err(Error::DensityMatrix(format!("negative eigenvalue {min_eig:e}")));
        }
        Ok(Self { rho })
    }

    pub fn pure(state: &TwoQubitPureState) -> Self {
        Self { rho: state.projector() }
    }

    pub fn maximally_mixed() -> Self {
        Self { rho: Matrix4::identity().scale(0.25) }
    }

    /// Convex combination `Σ wᵢ |ψᵢ⟩⟨ψᵢ|`. Weights must be non-negative and
    /// sum to one.
    pub fn mixture(components: &[(f64, TwoQubitPureState)]) -> Result<Self> {
        if components.iter().any(|(w, _)| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::DensityMatrix("mixture weights must be non-negative".into()));
        }
        let total: f64 = components.iter().map(|(w, _)| w).sum();
        if (total - 1.0).abs() > STATE_TOL {
            return Err(Error::DensityMatrix(format!("mixture weights sum to {total}")));
        }
        let rho = components
            .iter()
            .fold(Matrix4::zeros(), |acc, (w, s)| acc + s.projector().scale(*w));
        Self::new(rho)
    }

    pub fn matrix(&self) -> &Matrix4<C64> {
        &self.rho
    }

    pub fn eigenvalues(&self) -> [f64; 4] {
        hermitian_eigenvalues(&self.rho)
    }
}

/// Ascending eigenvalues of a Hermitian 4×4 matrix.
pub(crate) fn hermitian_eigenvalues(m: &Matrix4<C64>) -> [f64; 4] {
    let sym = (m + m.adjoint()).scale(0.5);
    let ev = sym.symmetric_eigenvalues();
    let mut out = [ev[0], ev[1], ev[2], ev[3]];
    out.sort_by(|a, b| a.total_cmp(b));
    out
}

/// Per-particle phase rates (rad/s) indexed by branch label. Accumulated
/// phases are `rate · t`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeparableRates {
    pub particle1: [f64; 2],
    pub particle2: [f64; 2],
}

impl SeparableRates {
    pub fn phases_at(&self, t: f64) -> PhaseTable {
        PhaseTable::separable(self.particle1.map(|r| r * t), self.particle2.map(|r| r * t))
    }
}

/// Additively separable branch-phase family: for every actual-configuration
/// branch `(m, n)` a pair of per-particle rates, so that
/// `γ^{mn}_{kl}(t) = (r1^{mn}_k + r2^{mn}_l) t`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BranchPhaseFamily {
    pub rates: [[SeparableRates; 2]; 2],
}

impl BranchPhaseFamily {
    /// Every branch accumulates the same rate `rate`, split evenly.
    pub fn constant(rate: f64) -> Self {
        let r = SeparableRates { particle1: [0.5 * rate; 2], particle2: [0.5 * rate; 2] };
        Self { rates: [[r; 2]; 2] }
    }

    pub fn branch(&self, m: BranchLabel, n: BranchLabel) -> &SeparableRates {
        &self.rates[m.index()][n.index()]
    }
}

/// The semi-classical potential driving the branch phases.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PotentialModel {
    /// Pairwise Newtonian potential; not separable.
    Newton,
    /// Mean-field potential sourced by |ψ|², self-interaction dropped.
    NewtonSchrodinger,
    /// Potential sourced by the actual positions, which occupy branch `(m, n)`.
    NewtonSchrodingerBohm { branch: (BranchLabel, BranchLabel) },
    /// Arbitrary separable potential given as per-particle phase rates.
    SeparableGeneric(SeparableRates),
    /// The diagonal-phase state of a separable branch family. This is not a
    /// solution of the family's dynamics.
    DgDiagonal(BranchPhaseFamily),
}

impl PotentialModel {
    pub fn is_separable(&self) -> bool {
        !matches!(self, PotentialModel::Newton | PotentialModel::DgDiagonal(_))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn separable_table_is_consistent() {
        let t = PhaseTable::separable([0.1, -2.0], [3.5, 0.25]);
        assert_eq!(t.separable_residual(), Some(0.0));
        assert_eq!(t.get(BranchLabel::R, BranchLabel::L), 1.5);
        assert_eq!(PhaseTable::general([[0.0; 2]; 2]).separable_residual(), None);
    }

    #[test]
    fn initial_state_has_equal_amplitudes() {
        let s = TwoQubitPureState::initial();
        assert!(s.amps().iter().all(|a| *a == c(0.5, 0.0)));
        assert_eq!(TwoQubitPureState::from_phases(&PhaseTable::general([[0.0; 2]; 2])), s);
    }

    #[test]
    fn rejects_unnormalized() {
        let err = TwoQubitPureState::new([c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        assert!(matches!(err, Err(Error::Normalization { .. })));
        assert!(TwoQubitPureState::normalized([c(0.0, 0.0); 4]).is_err());
    }

    #[test]
    fn density_matrix_validation() {
        let s = TwoQubitPureState::initial();
        let rho = TwoQubitMixedState::pure(&s);
        assert!(TwoQubitMixedState::new(*rho.matrix()).is_ok());

        let mut bad = *rho.matrix();
        bad[(0, 1)] += c(0.0, 0.1);
        assert!(TwoQubitMixedState::new(bad).is_err());

        let twice = rho.matrix().scale(2.0);
        assert!(TwoQubitMixedState::new(twice).is_err());

        let neg = Matrix4::from_diagonal(&Vector4::new(c(1.5, 0.0), c(-0.5, 0.0), c(0.0, 0.0), c(0.0, 0.0)));
        assert!(TwoQubitMixedState::new(neg).unwrap_err().to_string().contains("negative"));

        let mm = TwoQubitMixedState::maximally_mixed();
        assert!(mm.eigenvalues().iter().all(|e| (e - 0.25).abs() < 1e-15));
    }

    #[test]
    fn mixture_weights_checked() {
        let s = TwoQubitPureState::initial();
        assert!(TwoQubitMixedState::mixture(&[(0.5, s), (0.4, s)]).is_err());
        assert!(TwoQubitMixedState::mixture(&[(1.5, s), (-0.5, s)]).is_err());
        let m = TwoQubitMixedState::mixture(&[(0.25, s); 4]).unwrap();
        assert!((m.matrix() - s.projector()).norm() < 1e-15);
    }

    #[test]
    fn separability_flags() {
        assert!(!PotentialModel::Newton.is_separable());
        assert!(PotentialModel::NewtonSchrodinger.is_separable());
        assert!(!PotentialModel::DgDiagonal(BranchPhaseFamily::constant(1.0)).is_separable());
    }
}

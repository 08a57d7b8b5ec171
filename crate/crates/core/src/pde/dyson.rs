//! Tensor-factorization check for separable runs.
//!
//! With the fields `(ψ̄, X̄)` frozen to those of a reference run, each
//! particle evolves under its own Hamiltonian `Tᵢ + Vᵢ(xᵢ, t)`. Re-running
//! the two single-particle problems and multiplying the results must give
//! back the full two-particle solution.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

use super::evolve::RunRecord;
use super::grid::{Grid1D, Wavefunction2D};
use super::potential::OracleParams;
use super::spectral::Fft2;

/// Largest relative rank-one residual accepted for the initial state.
const PRODUCT_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DysonReport {
    /// `‖ψ₁(t) ⊗ ψ₂(t) − ψ(t)‖` at the final time.
    pub l2_error: f64,
    pub max_entropy: f64,
    /// Worst rank-one residual of the exponentiated per-step potential
    /// phases `exp(-iV dt/ħ)`.
    pub max_phase_rank1_residual: f64,
}

struct SingleParticle {
    fft: Fft2,
    kinetic_half: Option<Vec<C64>>,
    tau: f64,
}

impl SingleParticle {
    fn new(grid: &Grid1D, params: &OracleParams, mass: f64) -> Self {
        let kinetic_half = params.kinetic.then(|| {
            let c = params.hbar / (2.0 * mass);
            grid.wavenumbers().iter().map(|k| C64::from_polar(1.0, -c * k * k * 0.5 * params.dt)).collect()
        });
        Self { fft: Fft2::new(grid.n()), kinetic_half, tau: params.dt / params.hbar }
    }

    fn half_kinetic(&mut self, f: &mut [C64]) {
        if let Some(k) = &self.kinetic_half {
            self.fft.forward_1d(f);
            f.iter_mut().zip(k).for_each(|(z, q)| *z *= q);
            self.fft.inverse_1d(f);
        }
    }

    fn step(&mut self, f: &mut [C64], v: &[f64]) {
        self.half_kinetic(f);
        f.iter_mut().zip(v).for_each(|(z, v)| *z *= C64::from_polar(1.0, -v * self.tau));
        self.half_kinetic(f);
    }
}

/// Largest deviation of `exp(-i(V₁+V₂)τ)` from the outer product of its
/// first column and first row. Zero up to rounding for a sum of
/// single-particle terms.
pub fn phase_rank1_residual(potential: &[f64], n: usize, tau: f64) -> f64 {
    let p = |a: usize, b: usize| C64::from_polar(1.0, -potential[a * n + b] * tau);
    let p00 = p(0, 0);
    let mut worst: f64 = 0.0;
    for a in 0..n {
        let pa0 = p(a, 0);
        for b in 0..n {
            worst = worst.max((p(a, b) - pa0 * p(0, b) / p00).norm());
        }
    }
    worst
}

pub fn dyson_factorization_check(record: &RunRecord) -> Result<DysonReport> {
    let params = &record.params;
    if !params.model.is_separable() {
        return Err(Error::Usage(format!(
            "factorization check needs a separable model, got '{}'",
            params.model.name()
        )));
    }
    let grid = *record.initial.grid();
    let n = grid.n();
    let (mut f1, mut f2, resid) = record.initial.product_factors();
    if resid > PRODUCT_TOL {
        return Err(Error::Usage(format!("reference run did not start from a product state (residual {resid:e})")));
    }
    let mut p1 = SingleParticle::new(&grid, params, params.mass1);
    let mut p2 = SingleParticle::new(&grid, params, params.mass2);
    let mut max_resid: f64 = 0.0;
    let tau = params.dt / params.hbar;
    for (i, field) in record.fields.iter().enumerate() {
        let (v1, v2) = field
            .parts()
            .ok_or_else(|| Error::Usage("reference run recorded a non-separable potential".into()))?;
        p1.step(&mut f1, v1);
        p2.step(&mut f2, v2);
        // The full grid check is O(n²); sampling a few steps keeps it cheap.
        if i % 50 == 0 || i + 1 == record.fields.len() {
            max_resid = max_resid.max(phase_rank1_residual(&field.to_grid(), n, tau));
        }
    }
    let product = Wavefunction2D::from_factors(grid, &f1, &f2)?;
    Ok(DysonReport {
        l2_error: product.l2_distance(&record.final_wf),
        max_entropy: record.max_entropy(),
        max_phase_rank1_residual: max_resid,
    })
}

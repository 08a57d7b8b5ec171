//! Strang-split time stepping of the two-particle Schrödinger equation.
//!
//! One step is: build the potential from the current `(ψ, X)`, half a
//! kinetic step in Fourier space, a full potential phase, and another half
//! kinetic step. For the Bohmian-sourced model the configuration is then
//! moved with RK4 through the velocity field of the mid-step wave function
//! `exp(-iV dt/2ħ) exp(-iT dt/2ħ) ψ`, held fixed over the sub-stages.

use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::diagnostics::shannon_nats;
use crate::error::{Error, Result};

use super::bohm::VelocityField;
use super::grid::{Grid1D, Wavefunction2D};
use super::potential::{BohmianConfig, OracleParams, PotentialBuilder, PotentialField};
use super::spectral::Fft2;

/// Per-step norm change above which a run is aborted.
pub const NORM_DRIFT_LIMIT: f64 = 1e-6;
/// Probability mass allowed within two grid points of the boundary.
pub const EDGE_MASS_LIMIT: f64 = 1e-8;

/// Diagnostics recorded at a sampled step.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sample {
    pub step: usize,
    pub t: f64,
    pub norm: f64,
    pub entropy: f64,
    pub config: Option<BohmianConfig>,
    pub energy: f64,
}

/// Everything a finished run leaves behind.
#[derive(Clone, Debug)]
pub struct RunRecord {
    pub params: OracleParams,
    pub initial: Wavefunction2D,
    pub final_wf: Wavefunction2D,
    pub final_config: Option<BohmianConfig>,
    pub samples: Vec<Sample>,
    /// The potential applied at each step, in order.
    pub fields: Vec<PotentialField>,
}

impl RunRecord {
    pub fn max_entropy(&self) -> f64 {
        self.samples.iter().map(|s| s.entropy).fold(0.0, f64::max)
    }

    pub fn max_norm_error(&self) -> f64 {
        self.samples.iter().map(|s| (1.0 - s.norm).abs()).fold(0.0, f64::max)
    }
}

/// Von Neumann entropy (nats) of either particle's reduced state, from the
/// singular values of the amplitude matrix.
pub fn schmidt_entropy(wf: &Wavefunction2D) -> f64 {
    let n = wf.grid().n();
    let m = DMatrix::from_row_slice(n, n, wf.amps());
    let sv = m.singular_values();
    let weights: Vec<f64> = sv.iter().map(|s| s * s).collect();
    let total: f64 = weights.iter().sum();
    if total <= 0.0 {
        return 0.0;
    }
    shannon_nats(weights.into_iter().map(|w| w / total))
}

/// Kinetic and potential propagators for a fixed time step.
pub struct Propagator {
    grid: Grid1D,
    fft: Fft2,
    hbar: f64,
    dt: f64,
    kinetic_half: Option<Vec<C64>>,
    full_phase_cache: Option<(Arc<Vec<f64>>, f64, Vec<C64>)>,
}

impl Propagator {
    /// `dt` may be negative for backward propagation.
    pub fn new(grid: &Grid1D, params: &OracleParams, dt: f64) -> Self {
        let n = grid.n();
        let kinetic_half = params.kinetic.then(|| {
            let k = grid.wavenumbers();
            let (c1, c2) = (params.hbar / (2.0 * params.mass1), params.hbar / (2.0 * params.mass2));
            let mut out = Vec::with_capacity(n * n);
            for a in 0..n {
                for b in 0..n {
                    let omega = c1 * k[a] * k[a] + c2 * k[b] * k[b];
                    out.push(C64::from_polar(1.0, -omega * 0.5 * dt));
                }
            }
            out
        });
        Self { grid: *grid, fft: Fft2::new(n), hbar: params.hbar, dt, kinetic_half, full_phase_cache: None }
    }

    pub fn fft(&mut self) -> &mut Fft2 {
        &mut self.fft
    }

    pub fn half_kinetic(&mut self, amps: &mut [C64]) {
        if let Some(k) = &self.kinetic_half {
            self.fft.forward(amps);
            amps.iter_mut().zip(k).for_each(|(z, f)| *z *= f);
            self.fft.inverse(amps);
        }
    }

    /// Multiplies by `exp(-i V τ/ħ)` with `τ = fraction · dt`.
    pub fn potential_phase(&mut self, amps: &mut [C64], field: &PotentialField, fraction: f64) {
        let n = self.grid.n();
        let tau = fraction * self.dt / self.hbar;
        match field {
            PotentialField::Separable { v1, v2 } => {
                let e1: Vec<C64> = v1.iter().map(|v| C64::from_polar(1.0, -v * tau)).collect();
                let e2: Vec<C64> = v2.iter().map(|v| C64::from_polar(1.0, -v * tau)).collect();
                for (a, row) in amps.chunks_exact_mut(n).enumerate() {
                    for (z, q) in row.iter_mut().zip(&e2) {
                        *z *= e1[a] * q;
                    }
                }
            }
            PotentialField::Full(v) => {
                let fresh = match &self.full_phase_cache {
                    Some((cached, t, _)) => !(Arc::ptr_eq(cached, v) && *t == tau),
                    None => true,
                };
                if fresh {
                    let ph = v.iter().map(|x| C64::from_polar(1.0, -x * tau)).collect();
                    self.full_phase_cache = Some((v.clone(), tau, ph));
                }
                let ph = &self.full_phase_cache.as_ref().expect("cache filled").2;
                amps.iter_mut().zip(ph).for_each(|(z, p)| *z *= p);
            }
        }
    }

    /// One Strang step; returns the mid-step wave function when requested.
    pub fn step(&mut self, wf: &mut Wavefunction2D, field: &PotentialField, want_mid: bool) -> Option<Wavefunction2D> {
        self.half_kinetic(&mut wf.amps);
        let mid = want_mid.then(|| {
            let mut m = wf.clone();
            self.potential_phase(&mut m.amps, field, 0.5);
            m
        });
        self.potential_phase(&mut wf.amps, field, 1.0);
        self.half_kinetic(&mut wf.amps);
        mid
    }

    /// `⟨T⟩ + ⟨V⟩` normalized by the norm.
    fn energy(&mut self, wf: &Wavefunction2D, field: &PotentialField, params: &OracleParams) -> f64 {
        let n = self.grid.n();
        let nrm = wf.norm();
        let dx2 = self.grid.dx().powi(2);
        let potential: f64 = match field {
            PotentialField::Separable { v1, v2 } => {
                let (m1, m2) = (wf.marginal1(), wf.marginal2());
                let dx = self.grid.dx();
                m1.iter().zip(v1).map(|(p, v)| p * v * dx).sum::<f64>()
                    + m2.iter().zip(v2).map(|(p, v)| p * v * dx).sum::<f64>()
            }
            PotentialField::Full(v) => wf.amps.iter().zip(v.iter()).map(|(z, v)| z.norm_sqr() * v * dx2).sum(),
        };
        let kinetic = if params.kinetic {
            let k = self.grid.wavenumbers();
            let mut hat = wf.amps.clone();
            self.fft.forward(&mut hat);
            let (c1, c2) = (params.hbar.powi(2) / (2.0 * params.mass1), params.hbar.powi(2) / (2.0 * params.mass2));
            let mut num = 0.0;
            let mut den = 0.0;
            for a in 0..n {
                for b in 0..n {
                    let w = hat[a * n + b].norm_sqr();
                    num += w * (c1 * k[a] * k[a] + c2 * k[b] * k[b]);
                    den += w;
                }
            }
            if den > 0.0 {
                num / den * nrm
            } else {
                0.0
            }
        } else {
            0.0
        };
        (kinetic + potential) / nrm
    }
}

/// Integrates `params.steps` steps from `wf0`. `config0` is required iff the
/// model is Bohmian-sourced. `observer` sees every sampled state.
pub fn evolve_with(
    wf0: &Wavefunction2D,
    params: &OracleParams,
    config0: Option<BohmianConfig>,
    observer: &mut dyn FnMut(&Sample, &Wavefunction2D),
) -> Result<RunRecord> {
    let grid = *wf0.grid();
    params.validate(&grid)?;
    match (params.model.needs_config(), config0) {
        (true, None) => {
            return Err(Error::Usage("the Bohmian-sourced model needs an initial configuration".into()))
        }
        (false, Some(_)) => {
            return Err(Error::Usage(format!("model '{}' takes no configuration", params.model.name())))
        }
        _ => {}
    }
    let builder = PotentialBuilder::new(&grid, params);
    let mut prop = Propagator::new(&grid, params, params.dt);
    let mut wf = wf0.clone();
    let mut config = config0;
    let mut samples = Vec::new();
    let mut fields = Vec::with_capacity(params.steps);

    let mut field = builder.build(&wf, config.as_ref())?;
    let sample = |step: usize, wf: &Wavefunction2D, config, field: &PotentialField, prop: &mut Propagator| Sample {
        step,
        t: step as f64 * params.dt,
        norm: wf.norm(),
        entropy: schmidt_entropy(wf),
        config,
        energy: prop.energy(wf, field, params),
    };
    let s0 = sample(0, &wf, config, &field, &mut prop);
    observer(&s0, &wf);
    samples.push(s0);

    for step in 1..=params.steps {
        let before = wf.norm();
        let mid = prop.step(&mut wf, &field, config.is_some());
        if wf.amps.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::NonFinite { step });
        }
        let after = wf.norm();
        if (after - before).abs() > NORM_DRIFT_LIMIT {
            return Err(Error::NormDrift { step, drift: (after - before).abs() });
        }
        let edge = wf.edge_mass(2);
        if edge > EDGE_MASS_LIMIT {
            return Err(Error::BoundaryMass { step, mass: edge });
        }
        if let (Some(c), Some(mid)) = (config, mid) {
            let v = VelocityField::new(prop.fft(), &mid, params.hbar, params.mass1, params.mass2);
            config = Some(v.rk4(&c, params.dt)?);
        }
        fields.push(field);
        field = builder.build(&wf, config.as_ref())?;
        if step % params.sample_every == 0 || step == params.steps {
            let s = sample(step, &wf, config, &field, &mut prop);
            observer(&s, &wf);
            samples.push(s);
        }
    }

    Ok(RunRecord {
        params: params.clone(),
        initial: wf0.clone(),
        final_wf: wf,
        final_config: config,
        samples,
        fields,
    })
}

pub fn evolve(wf0: &Wavefunction2D, params: &OracleParams, config0: Option<BohmianConfig>) -> Result<RunRecord> {
    evolve_with(wf0, params, config0, &mut |_, _| {})
}

/// Runs the recorded steps backwards from the final state, replaying the
/// stored potentials with `dt → −dt`.
pub fn replay_backward(record: &RunRecord) -> Wavefunction2D {
    let grid = *record.final_wf.grid();
    let mut prop = Propagator::new(&grid, &record.params, -record.params.dt);
    let mut wf = record.final_wf.clone();
    for field in record.fields.iter().rev() {
        prop.step(&mut wf, field, false);
    }
    wf
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pde::grid::{entangled_pair, gaussian_product, superposition_product};
    use crate::pde::potential::OracleModel;
    use approx::assert_relative_eq;

    #[test]
    fn entropy_of_products_and_pairs() {
        let grid = Grid1D::new(256, 8.0).unwrap();
        let wf = gaussian_product((-2.0, 2.0), (0.5, 0.5), &grid).unwrap();
        assert!(schmidt_entropy(&wf) <= 1e-10);
        let sup = superposition_product([-3.0, -1.0], [1.0, 3.0], 0.3, &grid).unwrap();
        assert!(schmidt_entropy(&sup) <= 1e-10);
        let pair = entangled_pair((-3.0, 1.0), (-1.0, 3.0), 0.2, &grid).unwrap();
        assert_relative_eq!(schmidt_entropy(&pair), std::f64::consts::LN_2, epsilon = 1e-6);
    }

    #[test]
    fn entropy_ignores_local_phases() {
        let grid = Grid1D::new(128, 8.0).unwrap();
        let mut wf = entangled_pair((-3.0, 1.0), (-1.0, 2.5), 0.5, &grid).unwrap();
        let before = schmidt_entropy(&wf);
        wf.apply_local_phases(|x| 0.7 * x * x - x.sin(), |x| 3.0 * x.cos());
        assert_relative_eq!(schmidt_entropy(&wf), before, epsilon = 1e-10);
    }

    #[test]
    fn free_evolution_stays_separable_and_unitary() {
        let grid = Grid1D::new(128, 12.0).unwrap();
        let wf = gaussian_product((-2.0, 2.0), (0.5, 0.5), &grid).unwrap();
        let mut p = OracleParams::dimensionless(&grid, OracleModel::Newton);
        p.g = 0.0;
        p.steps = 200;
        p.sample_every = 50;
        let run = evolve(&wf, &p, None).unwrap();
        assert!(run.max_entropy() <= 1e-8);
        assert!(run.max_norm_error() <= 1e-8);
        assert_eq!(run.samples.len(), 5);
        assert_eq!(run.fields.len(), 200);
    }

    #[test]
    fn config_contract() {
        let grid = Grid1D::new(64, 8.0).unwrap();
        let wf = gaussian_product((-2.0, 2.0), (0.5, 0.5), &grid).unwrap();
        let p = OracleParams::dimensionless(&grid, OracleModel::NewtonSchrodingerBohm);
        assert!(matches!(evolve(&wf, &p, None), Err(Error::Usage(_))));
        let p = OracleParams::dimensionless(&grid, OracleModel::Newton);
        assert!(matches!(evolve(&wf, &p, Some(BohmianConfig::new(0.0, 0.0))), Err(Error::Usage(_))));
    }

    #[test]
    fn boundary_monitor_aborts() {
        let grid = Grid1D::new(64, 4.0).unwrap();
        let wf = gaussian_product((-1.5, 1.5), (0.5, 0.5), &grid).unwrap();
        let mut p = OracleParams::dimensionless(&grid, OracleModel::Newton);
        p.steps = 2000;
        p.dt = 1e-2;
        let err = evolve(&wf, &p, None).unwrap_err();
        assert!(matches!(err, Error::BoundaryMass { .. }), "{err}");
        assert!(err.is_numerical());
    }

    #[test]
    fn nan_is_reported_with_step() {
        let grid = Grid1D::new(64, 8.0).unwrap();
        let wf = gaussian_product((-2.0, 2.0), (0.5, 0.5), &grid).unwrap();
        let mut v1 = vec![0.0; 64];
        v1[3] = f64::INFINITY;
        let mut p = OracleParams::dimensionless(&grid, OracleModel::SeparableGeneric { v1, v2: vec![0.0; 64] });
        p.steps = 3;
        assert!(matches!(evolve(&wf, &p, None), Err(Error::NonFinite { step: 1 })));
    }

    #[test]
    fn static_potential_is_time_reversible() {
        let grid = Grid1D::new(128, 12.0).unwrap();
        let wf = gaussian_product((-2.0, 2.0), (0.5, 0.7), &grid).unwrap();
        let mut p = OracleParams::dimensionless(&grid, OracleModel::Newton);
        p.steps = 300;
        p.sample_every = 300;
        let run = evolve(&wf, &p, None).unwrap();
        let back = replay_backward(&run);
        assert!(back.l2_distance(&wf) <= 1e-6, "{}", back.l2_distance(&wf));
    }
}

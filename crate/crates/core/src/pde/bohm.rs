//! Guidance-equation velocities, trajectory integration and Born-rule
//! sampling of configurations.

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

use super::grid::{Grid1D, Wavefunction2D};
use super::potential::BohmianConfig;
use super::spectral::{gradient, Fft2};

/// Configurations where `|ψ|²` falls below this fraction of its maximum
/// are treated as nodes.
pub const NODE_GUARD: f64 = 1e-12;

/// Guidance velocities `vᵢ = (ħ/mᵢ) Im(∂ᵢψ/ψ)` sampled on the grid, with
/// the density kept for the node guard.
pub struct VelocityField {
    grid: Grid1D,
    v1: Vec<f64>,
    v2: Vec<f64>,
    density: Vec<f64>,
    max_density: f64,
}

impl VelocityField {
    pub fn new(fft: &mut Fft2, wf: &Wavefunction2D, hbar: f64, mass1: f64, mass2: f64) -> Self {
        let grid = *wf.grid();
        let (d1, d2) = gradient(fft, &grid, wf.amps());
        let density = wf.density();
        let max_density = density.iter().cloned().fold(0.0, f64::max);
        let floor = NODE_GUARD * max_density;
        let velocity = |d: &[C64], scale: f64| -> Vec<f64> {
            wf.amps()
                .iter()
                .zip(d)
                .zip(&density)
                .map(|((p, dp), rho)| if *rho > floor { scale * (dp / p).im } else { 0.0 })
                .collect()
        };
        let v1 = velocity(&d1, hbar / mass1);
        let v2 = velocity(&d2, hbar / mass2);
        Self { grid, v1, v2, density, max_density }
    }

    /// Bilinear interpolation weights of the cell containing `(x1, x2)`.
    fn cell(&self, c: &BohmianConfig) -> Result<([usize; 2], [usize; 2], f64, f64)> {
        let g = &self.grid;
        let n = g.n();
        let locate = |x: f64, particle: usize| -> Result<(usize, usize, f64)> {
            let f = (x - g.x_min()) / g.dx();
            if !(f.is_finite() && f >= 0.0 && f <= (n - 1) as f64) {
                return Err(Error::LeftDomain { particle, position: x });
            }
            let i = (f.floor() as usize).min(n - 2);
            Ok((i, i + 1, f - i as f64))
        };
        let (a0, a1, fa) = locate(c.x1, 1)?;
        let (b0, b1, fb) = locate(c.x2, 2)?;
        Ok(([a0, a1], [b0, b1], fa, fb))
    }

    fn interp(&self, field: &[f64], a: [usize; 2], b: [usize; 2], fa: f64, fb: f64) -> f64 {
        let n = self.grid.n();
        let f = |i: usize, j: usize| field[a[i] * n + b[j]];
        (1.0 - fa) * ((1.0 - fb) * f(0, 0) + fb * f(0, 1)) + fa * ((1.0 - fb) * f(1, 0) + fb * f(1, 1))
    }

    /// Velocity at an off-grid configuration.
    pub fn at(&self, c: &BohmianConfig) -> Result<(f64, f64)> {
        let (a, b, fa, fb) = self.cell(c)?;
        let density = self.interp(&self.density, a, b, fa, fb);
        if !(density > NODE_GUARD * self.max_density) {
            return Err(Error::NodeProximity { density });
        }
        Ok((self.interp(&self.v1, a, b, fa, fb), self.interp(&self.v2, a, b, fa, fb)))
    }

    /// One classical RK4 step with the field held fixed.
    pub fn rk4(&self, c: &BohmianConfig, dt: f64) -> Result<BohmianConfig> {
        let shift = |v: (f64, f64), h: f64| BohmianConfig::new(c.x1 + h * v.0, c.x2 + h * v.1);
        let k1 = self.at(c)?;
        let k2 = self.at(&shift(k1, 0.5 * dt))?;
        let k3 = self.at(&shift(k2, 0.5 * dt))?;
        let k4 = self.at(&shift(k3, dt))?;
        let next = BohmianConfig::new(
            c.x1 + dt / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0),
            c.x2 + dt / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1),
        );
        self.cell(&next)?;
        Ok(next)
    }
}

/// `(v₁, v₂)` at the configuration.
pub fn bohmian_velocity(
    wf: &Wavefunction2D,
    config: &BohmianConfig,
    hbar: f64,
    masses: (f64, f64),
) -> Result<(f64, f64)> {
    let mut fft = Fft2::new(wf.grid().n());
    VelocityField::new(&mut fft, wf, hbar, masses.0, masses.1).at(config)
}

/// Advances the configuration by `dt` with `ψ` frozen across the RK4
/// sub-stages.
pub fn step_bohmian(
    config: &BohmianConfig,
    wf: &Wavefunction2D,
    dt: f64,
    hbar: f64,
    masses: (f64, f64),
) -> Result<BohmianConfig> {
    let mut fft = Fft2::new(wf.grid().n());
    VelocityField::new(&mut fft, wf, hbar, masses.0, masses.1).rk4(config, dt)
}

/// Draws `count` configurations from `|ψ|² dx²` by inverse CDF over the
/// row-major flattened grid, then uniformly within the chosen cell.
/// Deterministic for a fixed seed.
pub fn born_samples(wf: &Wavefunction2D, seed: u64, count: usize) -> Vec<BohmianConfig> {
    let g = wf.grid();
    let n = g.n();
    let mut cdf = Vec::with_capacity(n * n);
    let mut acc = 0.0;
    for z in wf.amps() {
        acc += z.norm_sqr();
        cdf.push(acc);
    }
    let total = acc;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let u: f64 = rng.gen::<f64>() * total;
            let idx = cdf.partition_point(|&c| c <= u).min(n * n - 1);
            let jitter = |rng: &mut ChaCha8Rng| (rng.gen::<f64>() - 0.5) * g.dx();
            let x1 = g.x(idx / n) + jitter(&mut rng);
            let x2 = g.x(idx % n) + jitter(&mut rng);
            BohmianConfig::new(x1, x2)
        })
        .collect()
}

pub fn born_sample(wf: &Wavefunction2D, seed: u64) -> BohmianConfig {
    born_samples(wf, seed, 1)[0]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pde::grid::{gaussian_product, superposition_product};
    use approx::assert_relative_eq;

    fn plane_phase(k: f64) -> Wavefunction2D {
        let grid = Grid1D::new(128, 16.0).unwrap();
        let mut wf = gaussian_product((0.5, -0.5), (1.5, 1.5), &grid).unwrap();
        wf.apply_local_phases(|x| k * x, |_| 0.0);
        wf
    }

    #[test]
    fn real_wavefunction_has_no_velocity() {
        let grid = Grid1D::new(128, 16.0).unwrap();
        let wf = gaussian_product((0.5, -0.5), (1.5, 1.5), &grid).unwrap();
        let (v1, v2) = bohmian_velocity(&wf, &BohmianConfig::new(0.3, -0.2), 1.0, (1.0, 1.0)).unwrap();
        assert!(v1.abs() < 1e-12 && v2.abs() < 1e-12, "{v1} {v2}");
        let c = BohmianConfig::new(0.3, -0.2);
        let next = step_bohmian(&c, &wf, 0.1, 1.0, (1.0, 1.0)).unwrap();
        assert!((next.x1 - c.x1).abs() < 1e-12 && (next.x2 - c.x2).abs() < 1e-12);
    }

    #[test]
    fn plane_phase_velocity() {
        // k is a grid harmonic so the phase is periodic.
        let k = 2.0 * std::f64::consts::PI * 4.0 / 32.0;
        let wf = plane_phase(k);
        let (v1, v2) = bohmian_velocity(&wf, &BohmianConfig::new(0.37, -0.81), 1.0, (2.0, 1.0)).unwrap();
        assert_relative_eq!(v1, k / 2.0, epsilon = 1e-6);
        assert_relative_eq!(v2, 0.0, epsilon = 1e-6);
    }

    #[test]
    fn constant_velocity_integration() {
        let k = 2.0 * std::f64::consts::PI * 2.0 / 32.0;
        let wf = plane_phase(k);
        let mut fft = Fft2::new(128);
        let field = VelocityField::new(&mut fft, &wf, 1.0, 1.0, 1.0);
        let mut c = BohmianConfig::new(-1.0, 0.25);
        let dt = 0.01;
        for _ in 0..100 {
            c = field.rk4(&c, dt).unwrap();
        }
        assert_relative_eq!(c.x1, -1.0 + k * 1.0, epsilon = 1e-6);
        assert_relative_eq!(c.x2, 0.25, epsilon = 1e-6);
    }

    #[test]
    fn node_guard_trips_far_from_support() {
        let grid = Grid1D::new(128, 16.0).unwrap();
        let wf = gaussian_product((0.0, 0.0), (0.5, 0.5), &grid).unwrap();
        let err = bohmian_velocity(&wf, &BohmianConfig::new(12.0, 0.0), 1.0, (1.0, 1.0)).unwrap_err();
        assert!(matches!(err, Error::NodeProximity { .. }));
        let err = bohmian_velocity(&wf, &BohmianConfig::new(40.0, 0.0), 1.0, (1.0, 1.0)).unwrap_err();
        assert!(matches!(err, Error::LeftDomain { particle: 1, .. }));
    }

    #[test]
    fn born_sampling_of_a_sharp_state() {
        let grid = Grid1D::new(64, 8.0).unwrap();
        let mut amps = vec![C64::new(1e-6, 0.0); 64 * 64];
        amps[40 * 64 + 7] = C64::new(1e3, 0.0);
        let mut wf = Wavefunction2D::from_amps(grid, amps).unwrap();
        wf.normalize().unwrap();
        for seed in 0..20 {
            let c = born_sample(&wf, seed);
            assert!((c.x1 - grid.x(40)).abs() <= 0.5 * grid.dx());
            assert!((c.x2 - grid.x(7)).abs() <= 0.5 * grid.dx());
        }
    }

    #[test]
    fn born_sampling_is_deterministic_and_balanced() {
        let grid = Grid1D::new(128, 8.0).unwrap();
        let wf = superposition_product([-3.0, -1.0], [1.0, 3.0], 0.3, &grid).unwrap();
        let a = born_samples(&wf, 42, 10_000);
        assert_eq!(a, born_samples(&wf, 42, 10_000));
        let mut counts = [0usize; 4];
        for c in &a {
            let q = 2 * usize::from(c.x1 > -2.0) + usize::from(c.x2 > 2.0);
            counts[q] += 1;
        }
        let sigma = (10_000.0f64 * 0.25 * 0.75).sqrt();
        for c in counts {
            assert!((c as f64 - 2500.0).abs() <= 3.0 * sigma, "{counts:?}");
        }
    }
}

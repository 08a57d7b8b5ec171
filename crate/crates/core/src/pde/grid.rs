use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Uniform periodic grid on `[x_min, x_max)`, symmetric about the origin.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid1D {
    n: usize,
    x_min: f64,
    x_max: f64,
    dx: f64,
}

impl Grid1D {
    pub const MIN_POINTS: usize = 64;

    /// `n` points covering `[-half_width, half_width)`.
    pub fn new(n: usize, half_width: f64) -> Result<Self> {
        if n < Self::MIN_POINTS || !n.is_power_of_two() {
            return Err(Error::Parameter(format!(
                "grid size must be a power of two ≥ {}, got {n}",
                Self::MIN_POINTS
            )));
        }
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(Error::Parameter(format!("grid half-width must be positive, got {half_width}")));
        }
        Ok(Self { n, x_min: -half_width, x_max: half_width, dx: 2.0 * half_width / n as f64 })
    }

    /// Grid with spacing `dx`, `n` points, symmetric about zero.
    pub fn with_spacing(n: usize, dx: f64) -> Result<Self> {
        Self::new(n, 0.5 * dx * n as f64)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn length(&self) -> f64 {
        self.x_max - self.x_min
    }

    #[inline]
    pub fn x(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.dx
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.x(i)).collect()
    }

    /// Angular wavenumbers in FFT order.
    pub fn wavenumbers(&self) -> Vec<f64> {
        let n = self.n as i64;
        let dk = 2.0 * std::f64::consts::PI / self.length();
        (0..n).map(|j| if j < n / 2 { j } else { j - n } as f64 * dk).collect()
    }

    /// Index of the grid point nearest to `x`, if inside the domain.
    pub fn nearest(&self, x: f64) -> Option<usize> {
        let f = ((x - self.x_min) / self.dx).round();
        (f >= 0.0 && f < self.n as f64).then_some(f as usize)
    }
}

/// Two-particle amplitude `ψ(x₁ₐ, x₂_b)`, row-major with `a` (particle 1)
/// as the slow index.
#[derive(Clone, Debug, PartialEq)]
pub struct Wavefunction2D {
    pub(crate) amps: Vec<C64>,
    pub(crate) grid: Grid1D,
}

impl Wavefunction2D {
    pub fn from_amps(grid: Grid1D, amps: Vec<C64>) -> Result<Self> {
        if amps.len() != grid.n() * grid.n() {
            return Err(Error::Parameter(format!(
                "expected {} amplitudes, got {}",
                grid.n() * grid.n(),
                amps.len()
            )));
        }
        Ok(Self { amps, grid })
    }

    pub fn from_fn(grid: Grid1D, f: impl Fn(f64, f64) -> C64) -> Self {
        let n = grid.n();
        let mut amps = Vec::with_capacity(n * n);
        for a in 0..n {
            let x1 = grid.x(a);
            for b in 0..n {
                amps.push(f(x1, grid.x(b)));
            }
        }
        Self { amps, grid }
    }

    /// `ψ₁(x₁) ψ₂(x₂)` from sampled factors.
    pub fn from_factors(grid: Grid1D, f1: &[C64], f2: &[C64]) -> Result<Self> {
        let n = grid.n();
        if f1.len() != n || f2.len() != n {
            return Err(Error::Parameter("factor length does not match grid".into()));
        }
        let amps = f1.iter().flat_map(|a| f2.iter().map(move |b| a * b)).collect();
        Ok(Self { amps, grid })
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn amps(&self) -> &[C64] {
        &self.amps
    }

    pub fn amps_mut(&mut self) -> &mut [C64] {
        &mut self.amps
    }

    #[inline]
    pub fn at(&self, a: usize, b: usize) -> C64 {
        self.amps[a * self.grid.n() + b]
    }

    /// `Σ|ψ|² dx²`
    pub fn norm(&self) -> f64 {
        let dx = self.grid.dx();
        self.amps.iter().map(|z| z.norm_sqr()).sum::<f64>() * dx * dx
    }

    pub fn normalize(&mut self) -> Result<()> {
        let nrm = self.norm();
        if !(nrm.is_finite() && nrm > 0.0) {
            return Err(Error::Normalization { norm_sqr: nrm });
        }
        let s = nrm.sqrt().recip();
        self.amps.iter_mut().for_each(|z| *z *= s);
        Ok(())
    }

    pub fn density(&self) -> Vec<f64> {
        self.amps.iter().map(|z| z.norm_sqr()).collect()
    }

    /// Marginal probability density of particle 1 (integrates to the norm).
    pub fn marginal1(&self) -> Vec<f64> {
        let n = self.grid.n();
        let dx = self.grid.dx();
        self.amps.chunks_exact(n).map(|row| row.iter().map(|z| z.norm_sqr()).sum::<f64>() * dx).collect()
    }

    /// Marginal probability density of particle 2.
    pub fn marginal2(&self) -> Vec<f64> {
        let n = self.grid.n();
        let dx = self.grid.dx();
        let mut out = vec![0.0; n];
        for row in self.amps.chunks_exact(n) {
            for (o, z) in out.iter_mut().zip(row) {
                *o += z.norm_sqr();
            }
        }
        out.iter_mut().for_each(|v| *v *= dx);
        out
    }

    /// `‖ψ − φ‖` in the grid L² norm.
    pub fn l2_distance(&self, other: &Wavefunction2D) -> f64 {
        let dx = self.grid.dx();
        self.amps.iter().zip(&other.amps).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt() * dx
    }

    /// Probability mass within `width` grid points of any edge.
    pub fn edge_mass(&self, width: usize) -> f64 {
        let n = self.grid.n();
        let dx = self.grid.dx();
        let near = |i: usize| i < width || i >= n - width;
        let mut m = 0.0;
        for a in 0..n {
            for b in 0..n {
                if near(a) || near(b) {
                    m += self.amps[a * n + b].norm_sqr();
                }
            }
        }
        m * dx * dx
    }

    /// Multiplies by `exp(i θ₁(x₁)) exp(i θ₂(x₂))`.
    pub fn apply_local_phases(&mut self, theta1: impl Fn(f64) -> f64, theta2: impl Fn(f64) -> f64) {
        let n = self.grid.n();
        let p1: Vec<C64> = (0..n).map(|a| C64::from_polar(1.0, theta1(self.grid.x(a)))).collect();
        let p2: Vec<C64> = (0..n).map(|b| C64::from_polar(1.0, theta2(self.grid.x(b)))).collect();
        for (a, row) in self.amps.chunks_exact_mut(n).enumerate() {
            for (z, q) in row.iter_mut().zip(&p2) {
                *z *= p1[a] * q;
            }
        }
    }

    /// Rank-one split `ψ ≈ f₁ ⊗ f₂` through the largest-modulus entry, with
    /// the largest relative residual. Exact for product states.
    pub fn product_factors(&self) -> (Vec<C64>, Vec<C64>, f64) {
        let n = self.grid.n();
        let (pivot, _) = self
            .amps
            .iter()
            .enumerate()
            .fold((0, 0.0), |acc, (i, z)| if z.norm_sqr() > acc.1 { (i, z.norm_sqr()) } else { acc });
        let (pa, pb) = (pivot / n, pivot % n);
        let p = self.amps[pivot];
        let f1: Vec<C64> = (0..n).map(|a| self.at(a, pb)).collect();
        let f2: Vec<C64> = (0..n).map(|b| self.at(pa, b) / p).collect();
        let scale = p.norm();
        let mut worst: f64 = 0.0;
        for a in 0..n {
            for b in 0..n {
                worst = worst.max((self.at(a, b) - f1[a] * f2[b]).norm());
            }
        }
        (f1, f2, if scale > 0.0 { worst / scale } else { 0.0 })
    }
}

/// A 1D Gaussian packet `exp(-(x-c)²/(4σ²))` (density width σ).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Packet {
    pub center: f64,
    pub width: f64,
}

impl Packet {
    pub fn new(center: f64, width: f64) -> Self {
        Self { center, width }
    }

    fn eval(&self, x: f64) -> f64 {
        let u = (x - self.center) / self.width;
        (-0.25 * u * u).exp()
    }

    fn check(&self, grid: &Grid1D) -> Result<()> {
        if !(self.width >= 2.0 * grid.dx()) {
            return Err(Error::Parameter(format!(
                "packet width {} below resolution limit 2·dx = {}",
                self.width,
                2.0 * grid.dx()
            )));
        }
        if self.center.abs() + 4.0 * self.width >= grid.x_max() {
            return Err(Error::Parameter(format!(
                "packet at {} with width {} does not fit in the domain (|c| + 4σ < {})",
                self.center,
                self.width,
                grid.x_max()
            )));
        }
        Ok(())
    }
}

/// Samples `Σ weightᵢ · packetᵢ` on the grid, normalized to unit L² norm.
pub fn superposition_1d(grid: &Grid1D, packets: &[(C64, Packet)]) -> Result<Vec<C64>> {
    if packets.is_empty() {
        return Err(Error::Parameter("at least one packet is required".into()));
    }
    for (_, p) in packets {
        p.check(grid)?;
    }
    let mut f: Vec<C64> =
        grid.points().iter().map(|&x| packets.iter().map(|(w, p)| w * p.eval(x)).sum()).collect();
    let norm: f64 = f.iter().map(|z| z.norm_sqr()).sum::<f64>() * grid.dx();
    if !(norm > 0.0) {
        return Err(Error::Parameter("packet superposition vanishes on the grid".into()));
    }
    let s = norm.sqrt().recip();
    f.iter_mut().for_each(|z| *z *= s);
    Ok(f)
}

/// Normalized product of two Gaussians centered at `centers` with density
/// widths `widths`.
pub fn gaussian_product(centers: (f64, f64), widths: (f64, f64), grid: &Grid1D) -> Result<Wavefunction2D> {
    let one = C64::new(1.0, 0.0);
    let f1 = superposition_1d(grid, &[(one, Packet::new(centers.0, widths.0))])?;
    let f2 = superposition_1d(grid, &[(one, Packet::new(centers.1, widths.1))])?;
    Wavefunction2D::from_factors(*grid, &f1, &f2)
}

/// Product of two equal-weight two-packet superpositions, the grid analogue
/// of `½(|L⟩+|R⟩)(|L⟩+|R⟩)`.
pub fn superposition_product(
    particle1: [f64; 2],
    particle2: [f64; 2],
    width: f64,
    grid: &Grid1D,
) -> Result<Wavefunction2D> {
    let one = C64::new(1.0, 0.0);
    let f1 = superposition_1d(grid, &particle1.map(|c| (one, Packet::new(c, width))))?;
    let f2 = superposition_1d(grid, &particle2.map(|c| (one, Packet::new(c, width))))?;
    Wavefunction2D::from_factors(*grid, &f1, &f2)
}

/// `(|a b⟩ + |c d⟩)/√2` with Gaussian packets at `(a, b)` and `(c, d)`.
pub fn entangled_pair(first: (f64, f64), second: (f64, f64), width: f64, grid: &Grid1D) -> Result<Wavefunction2D> {
    for c in [first.0, first.1, second.0, second.1] {
        Packet::new(c, width).check(grid)?;
    }
    let p = |c: f64, x: f64| Packet::new(c, width).eval(x);
    let mut wf = Wavefunction2D::from_fn(*grid, |x1, x2| {
        C64::new(p(first.0, x1) * p(first.1, x2) + p(second.0, x1) * p(second.1, x2), 0.0)
    });
    wf.normalize()?;
    Ok(wf)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn grid_layout() {
        let g = Grid1D::new(256, 8.0).unwrap();
        assert_eq!(g.dx(), 16.0 / 256.0);
        assert_eq!(g.x(0), -8.0);
        assert_eq!(g.x(128), 0.0);
        assert_eq!(g.nearest(0.01), Some(128));
        assert_eq!(g.nearest(9.0), None);
        let k = g.wavenumbers();
        assert_eq!(k[0], 0.0);
        assert!(k[128] < 0.0 && k[127] > 0.0);
        assert!(Grid1D::new(100, 8.0).is_err());
        assert!(Grid1D::new(32, 8.0).is_err());
    }

    #[test]
    fn gaussian_product_is_normalized() {
        let g = Grid1D::new(256, 8.0).unwrap();
        let wf = gaussian_product((-2.0, 2.0), (0.5, 0.5), &g).unwrap();
        assert_relative_eq!(wf.norm(), 1.0, epsilon = 1e-10);
        let (_, _, resid) = wf.product_factors();
        assert!(resid < 1e-14);
        let m1 = wf.marginal1();
        let mean: f64 = m1.iter().enumerate().map(|(i, p)| g.x(i) * p * g.dx()).sum();
        assert_relative_eq!(mean, -2.0, epsilon = 1e-10);
        let var: f64 = m1.iter().enumerate().map(|(i, p)| (g.x(i) + 2.0).powi(2) * p * g.dx()).sum();
        assert_relative_eq!(var.sqrt(), 0.5, max_relative = 1e-8);
    }

    #[test]
    fn resolution_and_fit_guards() {
        let g = Grid1D::new(256, 8.0).unwrap();
        let err = gaussian_product((0.0, 0.0), (g.dx(), 0.5), &g).unwrap_err();
        assert!(err.to_string().contains("resolution"), "{err}");
        assert!(gaussian_product((6.5, 0.0), (0.5, 0.5), &g).is_err());
    }

    #[test]
    fn entangled_pair_is_not_a_product() {
        let g = Grid1D::new(128, 8.0).unwrap();
        let wf = entangled_pair((-3.0, 1.0), (-1.0, 3.0), 0.3, &g).unwrap();
        assert_relative_eq!(wf.norm(), 1.0, epsilon = 1e-12);
        assert!(wf.product_factors().2 > 0.1);
    }
}

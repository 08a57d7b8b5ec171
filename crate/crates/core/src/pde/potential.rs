//! Potentials for the grid oracle.
//!
//! All models use the softened kernel `1/√(r² + ε²)`. Newton couples the
//! two coordinates directly; every other model produces a sum
//! `V₁(x₁) + V₂(x₂)` whose parts may depend on the current wave function or
//! on the Bohmian configuration.

use std::sync::Arc;

use crate::error::{Error, Result};

use super::grid::{Grid1D, Wavefunction2D};
use super::spectral::KernelConvolution;

/// Actual particle positions.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BohmianConfig {
    pub x1: f64,
    pub x2: f64,
}

impl BohmianConfig {
    pub fn new(x1: f64, x2: f64) -> Self {
        Self { x1, x2 }
    }
}

/// Which potential drives the grid evolution.
#[derive(Clone, Debug, PartialEq)]
pub enum OracleModel {
    /// `V = −g K(x₁ − x₂)`.
    Newton,
    /// Mean field of the other particle's marginal density.
    NewtonSchrodinger,
    /// Field of the other particle's actual position.
    NewtonSchrodingerBohm,
    /// Caller-supplied static `V₁`, `V₂` sampled on the grid.
    SeparableGeneric { v1: Vec<f64>, v2: Vec<f64> },
}

impl OracleModel {
    pub fn is_separable(&self) -> bool {
        !matches!(self, OracleModel::Newton)
    }

    pub fn needs_config(&self) -> bool {
        matches!(self, OracleModel::NewtonSchrodingerBohm)
    }

    pub fn name(&self) -> &'static str {
        match self {
            OracleModel::Newton => "newton",
            OracleModel::NewtonSchrodinger => "ns",
            OracleModel::NewtonSchrodingerBohm => "nsb",
            OracleModel::SeparableGeneric { .. } => "separable",
        }
    }
}

/// Parameters of a grid run.
///
/// The defaults are dimensionless (`ħ = m = 1`). Setting `hbar`, the masses
/// and `g = G m₁ m₂` to SI values with `kinetic = false` gives the frozen
/// phase-model check.
#[derive(Clone, Debug, PartialEq)]
pub struct OracleParams {
    pub hbar: f64,
    pub mass1: f64,
    pub mass2: f64,
    /// Pair coupling: the potential is `−g/√(r² + ε²)`.
    pub g: f64,
    /// Softening length ε.
    pub eps: f64,
    pub dt: f64,
    pub steps: usize,
    pub model: OracleModel,
    /// Include the kinetic term; switched off for the frozen phase check.
    pub kinetic: bool,
    /// Add each particle's own field to the mean-field and Bohmian models.
    pub self_interaction: bool,
    /// Record diagnostics every this many steps (plus the first and last).
    pub sample_every: usize,
}

impl OracleParams {
    /// Dimensionless defaults for a grid, with `ε = 2·dx`.
    pub fn dimensionless(grid: &Grid1D, model: OracleModel) -> Self {
        Self {
            hbar: 1.0,
            mass1: 1.0,
            mass2: 1.0,
            g: 1.0,
            eps: 2.0 * grid.dx(),
            dt: 1e-3,
            steps: 1000,
            model,
            kinetic: true,
            self_interaction: false,
            sample_every: 10,
        }
    }

    pub fn validate(&self, grid: &Grid1D) -> Result<()> {
        let pos = |v: f64, name: &str| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::Parameter(format!("{name} must be positive, got {v}")))
            }
        };
        pos(self.hbar, "hbar")?;
        pos(self.mass1, "mass1")?;
        pos(self.mass2, "mass2")?;
        pos(self.dt, "dt")?;
        if !(self.g.is_finite() && self.g >= 0.0) {
            return Err(Error::Parameter(format!("g must be non-negative, got {}", self.g)));
        }
        if !(self.eps >= grid.dx()) {
            return Err(Error::Parameter(format!(
                "softening eps = {} must be at least dx = {}",
                self.eps,
                grid.dx()
            )));
        }
        if self.sample_every == 0 {
            return Err(Error::Parameter("sample_every must be at least 1".into()));
        }
        if let OracleModel::SeparableGeneric { v1, v2 } = &self.model {
            if v1.len() != grid.n() || v2.len() != grid.n() {
                return Err(Error::Parameter("separable potential parts must match the grid size".into()));
            }
        }
        Ok(())
    }

    pub fn kernel(&self) -> impl Fn(f64) -> f64 + Copy {
        let e2 = self.eps * self.eps;
        move |r: f64| 1.0 / (r * r + e2).sqrt()
    }
}

/// A potential on the grid, kept in factored form when it is separable.
#[derive(Clone, Debug, PartialEq)]
pub enum PotentialField {
    Separable { v1: Vec<f64>, v2: Vec<f64> },
    Full(Arc<Vec<f64>>),
}

impl PotentialField {
    pub fn to_grid(&self) -> Vec<f64> {
        match self {
            PotentialField::Separable { v1, v2 } => {
                v1.iter().flat_map(|a| v2.iter().map(move |b| a + b)).collect()
            }
            PotentialField::Full(v) => v.as_ref().clone(),
        }
    }

    pub fn parts(&self) -> Option<(&[f64], &[f64])> {
        match self {
            PotentialField::Separable { v1, v2 } => Some((v1, v2)),
            PotentialField::Full(_) => None,
        }
    }
}

/// Builds potentials for one run; holds the convolution plan and the
/// static Newton grid.
pub struct PotentialBuilder {
    grid: Grid1D,
    params: OracleParams,
    conv: KernelConvolution,
    newton: Option<Arc<Vec<f64>>>,
}

impl PotentialBuilder {
    pub fn new(grid: &Grid1D, params: &OracleParams) -> Self {
        let kernel = params.kernel();
        let conv = KernelConvolution::new(grid, kernel);
        let newton = matches!(params.model, OracleModel::Newton).then(|| {
            let n = grid.n();
            let mut v = Vec::with_capacity(n * n);
            for a in 0..n {
                for b in 0..n {
                    v.push(-params.g * kernel(grid.x(a) - grid.x(b)));
                }
            }
            Arc::new(v)
        });
        Self { grid: *grid, params: params.clone(), conv, newton }
    }

    fn point_source(&self, at: f64, strength: f64) -> Vec<f64> {
        let k = self.params.kernel();
        (0..self.grid.n()).map(|i| -strength * k(self.grid.x(i) - at)).collect()
    }

    pub fn build(&self, wf: &Wavefunction2D, config: Option<&BohmianConfig>) -> Result<PotentialField> {
        let p = &self.params;
        let g = p.g;
        match &p.model {
            OracleModel::Newton => Ok(PotentialField::Full(self.newton.clone().expect("newton grid prepared"))),
            OracleModel::NewtonSchrodinger => {
                let (rho1, rho2) = (wf.marginal1(), wf.marginal2());
                let phi2 = self.conv.apply(&rho2);
                let phi1 = self.conv.apply(&rho1);
                let mut v1: Vec<f64> = phi2.iter().map(|f| -g * f).collect();
                let mut v2: Vec<f64> = phi1.iter().map(|f| -g * f).collect();
                if p.self_interaction {
                    let (s1, s2) = (g * p.mass1 / p.mass2, g * p.mass2 / p.mass1);
                    v1.iter_mut().zip(&phi1).for_each(|(v, f)| *v -= s1 * f);
                    v2.iter_mut().zip(&phi2).for_each(|(v, f)| *v -= s2 * f);
                }
                Ok(PotentialField::Separable { v1, v2 })
            }
            OracleModel::NewtonSchrodingerBohm => {
                let c = config.ok_or_else(|| {
                    Error::Usage("the Bohmian-sourced model needs a particle configuration".into())
                })?;
                let mut v1 = self.point_source(c.x2, g);
                let mut v2 = self.point_source(c.x1, g);
                if p.self_interaction {
                    let s1 = self.point_source(c.x1, g * p.mass1 / p.mass2);
                    let s2 = self.point_source(c.x2, g * p.mass2 / p.mass1);
                    v1.iter_mut().zip(&s1).for_each(|(v, s)| *v += s);
                    v2.iter_mut().zip(&s2).for_each(|(v, s)| *v += s);
                }
                Ok(PotentialField::Separable { v1, v2 })
            }
            OracleModel::SeparableGeneric { v1, v2 } => {
                Ok(PotentialField::Separable { v1: v1.clone(), v2: v2.clone() })
            }
        }
    }
}

/// The full `n × n` potential for the current state.
pub fn potential_grid(
    params: &OracleParams,
    wf: &Wavefunction2D,
    config: Option<&BohmianConfig>,
) -> Result<Vec<f64>> {
    params.validate(wf.grid())?;
    Ok(PotentialBuilder::new(wf.grid(), params).build(wf, config)?.to_grid())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pde::grid::gaussian_product;
    use approx::assert_relative_eq;

    fn setup(model: OracleModel) -> (Grid1D, OracleParams, Wavefunction2D) {
        let grid = Grid1D::new(256, 8.0).unwrap();
        let params = OracleParams::dimensionless(&grid, model);
        let wf = gaussian_product((-2.0, 2.0), (0.2, 0.2), &grid).unwrap();
        (grid, params, wf)
    }

    #[test]
    fn zero_coupling_gives_zero_potential() {
        for model in [OracleModel::Newton, OracleModel::NewtonSchrodinger, OracleModel::NewtonSchrodingerBohm] {
            let (_, mut p, wf) = setup(model);
            p.g = 0.0;
            let v = potential_grid(&p, &wf, Some(&BohmianConfig::new(-2.0, 2.0))).unwrap();
            assert!(v.iter().all(|&x| x == 0.0));
        }
    }

    #[test]
    fn mean_field_matches_point_source() {
        let (grid, p, wf) = setup(OracleModel::NewtonSchrodinger);
        let field = PotentialBuilder::new(&grid, &p).build(&wf, None).unwrap();
        let (v1, v2) = field.parts().unwrap();
        let i = grid.nearest(-2.0).unwrap();
        let point = -p.g / (16.0 + p.eps * p.eps).sqrt();
        assert_relative_eq!(v1[i], point, max_relative = 0.01);
        let j = grid.nearest(2.0).unwrap();
        assert_relative_eq!(v2[j], point, max_relative = 0.01);

        // Independent quadrature of the marginal against the kernel.
        let rho2 = wf.marginal2();
        let k = p.kernel();
        let quad: f64 = (0..grid.n()).map(|b| rho2[b] * k(grid.x(i) - grid.x(b)) * grid.dx()).sum();
        assert_relative_eq!(v1[i], -p.g * quad, max_relative = 1e-12);
    }

    #[test]
    fn bohmian_field_at_the_configuration() {
        let (grid, p, wf) = setup(OracleModel::NewtonSchrodingerBohm);
        let v = potential_grid(&p, &wf, Some(&BohmianConfig::new(-2.0, 2.0))).unwrap();
        let (a, b) = (grid.nearest(-2.0).unwrap(), grid.nearest(2.0).unwrap());
        assert_relative_eq!(v[a * grid.n() + b], -2.0 * p.g / (16.0 + p.eps * p.eps).sqrt(), max_relative = 1e-14);
    }

    #[test]
    fn bohmian_model_requires_config() {
        let (_, p, wf) = setup(OracleModel::NewtonSchrodingerBohm);
        assert!(matches!(potential_grid(&p, &wf, None), Err(Error::Usage(_))));
    }

    #[test]
    fn self_interaction_stays_separable() {
        let (grid, mut p, wf) = setup(OracleModel::NewtonSchrodinger);
        p.self_interaction = true;
        let f = PotentialBuilder::new(&grid, &p).build(&wf, None).unwrap();
        assert!(f.parts().is_some());
        p.model = OracleModel::NewtonSchrodingerBohm;
        let f = PotentialBuilder::new(&grid, &p).build(&wf, Some(&BohmianConfig::new(0.0, 1.0))).unwrap();
        assert!(f.parts().is_some());
    }

    #[test]
    fn newton_grid_is_pairwise() {
        let (grid, p, wf) = setup(OracleModel::Newton);
        let v = potential_grid(&p, &wf, None).unwrap();
        let n = grid.n();
        // Depends only on x₁ − x₂.
        assert_eq!(v[10 * n + 20], v[30 * n + 40]);
        assert_relative_eq!(v[10 * n + 10], -p.g / p.eps, max_relative = 1e-14);
    }

    #[test]
    fn params_validation() {
        let (grid, mut p, _) = setup(OracleModel::Newton);
        p.eps = 0.5 * grid.dx();
        assert!(p.validate(&grid).is_err());
        let (grid, mut p, _) = setup(OracleModel::Newton);
        p.dt = 0.0;
        assert!(p.validate(&grid).is_err());
        p.dt = 1e-3;
        p.g = -1.0;
        assert!(p.validate(&grid).is_err());
        p.g = 1.0;
        p.model = OracleModel::SeparableGeneric { v1: vec![0.0; 3], v2: vec![0.0; 3] };
        assert!(p.validate(&grid).is_err());
    }
}

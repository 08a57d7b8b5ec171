//! Physical constants and the collinear two-particle layout of the
//! experiment.
//!
//! Both particles sit on the x-axis. Particle 1 is centered at `-d/2` and
//! particle 2 at `+d/2`; each is split into a left and a right branch a
//! distance `delta` apart.

use std::fmt;

use crate::error::{Error, Result};

/// Gravitational constant and reduced Planck constant, SI units.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhysicalConstants {
    /// m³·kg⁻¹·s⁻²
    pub g: f64,
    /// J·s
    pub hbar: f64,
}

impl PhysicalConstants {
    pub const CODATA_G: f64 = 6.674e-11;
    pub const CODATA_HBAR: f64 = 1.054571817e-34;

    pub fn new(g: f64, hbar: f64) -> Result<Self> {
        let c = Self { g, hbar };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.g.is_finite() && self.g > 0.0) {
            return Err(Error::Parameter(format!("G > 0 required, got {}", self.g)));
        }
        if !(self.hbar.is_finite() && self.hbar > 0.0) {
            return Err(Error::Parameter(format!("hbar > 0 required, got {}", self.hbar)));
        }
        Ok(())
    }
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self { g: Self::CODATA_G, hbar: Self::CODATA_HBAR }
    }
}

/// One of the two spatial branches of a particle. `L < R`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BranchLabel {
    L,
    R,
}

impl BranchLabel {
    pub const ALL: [BranchLabel; 2] = [BranchLabel::L, BranchLabel::R];

    #[inline]
    pub fn index(self) -> usize {
        match self {
            BranchLabel::L => 0,
            BranchLabel::R => 1,
        }
    }

    pub fn from_index(i: usize) -> Self {
        match i {
            0 => BranchLabel::L,
            1 => BranchLabel::R,
            _ => panic!("branch index out of range: {i}"),
        }
    }
}

impl fmt::Display for BranchLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BranchLabel::L => "L",
            BranchLabel::R => "R",
        })
    }
}

/// All four branch pairs in basis order `(LL, LR, RL, RR)`.
pub fn branch_pairs() -> impl Iterator<Item = (BranchLabel, BranchLabel)> {
    BranchLabel::ALL
        .into_iter()
        .flat_map(|k| BranchLabel::ALL.into_iter().map(move |l| (k, l)))
}

/// Separation `d` between the particles, branch split `delta`, and masses.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExperimentGeometry {
    /// m
    pub d: f64,
    /// m
    pub delta: f64,
    /// kg
    pub m1: f64,
    /// kg
    pub m2: f64,
}

impl ExperimentGeometry {
    /// Parameters of the original proposal: d = 450 µm, δ = 250 µm,
    /// m₁ = m₂ = 10⁻¹⁴ kg.
    pub const BMV: ExperimentGeometry =
        ExperimentGeometry { d: 450e-6, delta: 250e-6, m1: 1e-14, m2: 1e-14 };

    pub fn new(d: f64, delta: f64, m1: f64, m2: f64) -> Result<Self> {
        let g = Self { d, delta, m1, m2 };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.d, self.delta, self.m1, self.m2].iter().all(|v| v.is_finite());
        if !finite {
            return Err(Error::Geometry("all parameters must be finite".into()));
        }
        if self.delta <= 0.0 {
            return Err(Error::Geometry(format!("delta > 0 required, got {}", self.delta)));
        }
        if self.d <= self.delta {
            return Err(Error::Geometry(format!(
                "d > delta required, got d = {} and delta = {}",
                self.d, self.delta
            )));
        }
        if self.m1 <= 0.0 {
            return Err(Error::Geometry(format!("m1 > 0 required, got {}", self.m1)));
        }
        if self.m2 <= 0.0 {
            return Err(Error::Geometry(format!("m2 > 0 required, got {}", self.m2)));
        }
        Ok(())
    }

    /// γ = G m₁ m₂ / ħ in m/s; every phase in the static-bulk picture is
    /// γ·t divided by a separation.
    pub fn coupling_rate(&self, consts: &PhysicalConstants) -> f64 {
        consts.g * self.m1 * self.m2 / consts.hbar
    }

    /// Center of branch `k` of particle `particle` (1 or 2).
    pub fn center(&self, particle: usize, k: BranchLabel) -> f64 {
        let sign = match k {
            BranchLabel::L => -1.0,
            BranchLabel::R => 1.0,
        };
        let base = match particle {
            1 => -0.5 * self.d,
            2 => 0.5 * self.d,
            _ => panic!("particle index must be 1 or 2, got {particle}"),
        };
        base + sign * 0.5 * self.delta
    }

    /// `|X_{1k} - X_{2l}|`
    pub fn separation(&self, k: BranchLabel, l: BranchLabel) -> f64 {
        (self.center(1, k) - self.center(2, l)).abs()
    }
}

/// Signed x-coordinates of the four branch centers.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BranchCenters {
    pub x1l: f64,
    pub x1r: f64,
    pub x2l: f64,
    pub x2r: f64,
}

impl BranchCenters {
    pub fn particle1(&self, k: BranchLabel) -> f64 {
        match k {
            BranchLabel::L => self.x1l,
            BranchLabel::R => self.x1r,
        }
    }

    pub fn particle2(&self, l: BranchLabel) -> f64 {
        match l {
            BranchLabel::L => self.x2l,
            BranchLabel::R => self.x2r,
        }
    }
}

pub fn branch_centers(geom: &ExperimentGeometry) -> Result<BranchCenters> {
    geom.validate()?;
    Ok(BranchCenters {
        x1l: geom.center(1, BranchLabel::L),
        x1r: geom.center(1, BranchLabel::R),
        x2l: geom.center(2, BranchLabel::L),
        x2r: geom.center(2, BranchLabel::R),
    })
}

/// Pair separations `r[k][l] = |X_{1k} - X_{2l}|`: `d`, `d+δ`, `d-δ`, `d`.
pub fn pair_separations(geom: &ExperimentGeometry) -> Result<[[f64; 2]; 2]> {
    geom.validate()?;
    let mut r = [[0.0; 2]; 2];
    for (k, l) in branch_pairs() {
        r[k.index()][l.index()] = geom.separation(k, l);
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn bmv_centers() {
        let c = branch_centers(&ExperimentGeometry::BMV).unwrap();
        assert_relative_eq!(c.x1l, -350e-6, max_relative = 1e-12);
        assert_relative_eq!(c.x1r, -100e-6, max_relative = 1e-12);
        assert_relative_eq!(c.x2l, 100e-6, max_relative = 1e-12);
        assert_relative_eq!(c.x2r, 350e-6, max_relative = 1e-12);
    }

    #[test]
    fn integer_layout_is_exact() {
        let g = ExperimentGeometry::new(4.0, 2.0, 1.0, 1.0).unwrap();
        let c = branch_centers(&g).unwrap();
        assert_eq!((c.x1l, c.x1r, c.x2l, c.x2r), (-3.0, -1.0, 1.0, 3.0));
        let g = ExperimentGeometry::new(3.0, 1.0, 1.0, 1.0).unwrap();
        assert_eq!(pair_separations(&g).unwrap(), [[3.0, 4.0], [2.0, 3.0]]);
    }

    #[test]
    fn vanishing_split_collapses_centers() {
        let g = ExperimentGeometry::new(2.0, 1e-15, 1.0, 1.0).unwrap();
        let c = branch_centers(&g).unwrap();
        for (x, want) in [(c.x1l, -1.0), (c.x1r, -1.0), (c.x2l, 1.0), (c.x2r, 1.0)] {
            assert_relative_eq!(x, want, epsilon = 1e-14);
        }
        let r = pair_separations(&g).unwrap();
        for row in r {
            for v in row {
                assert_relative_eq!(v, 2.0, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn bmv_separations() {
        let r = pair_separations(&ExperimentGeometry::BMV).unwrap();
        assert_relative_eq!(r[0][0], 450e-6, max_relative = 1e-12);
        assert_relative_eq!(r[0][1], 700e-6, max_relative = 1e-12);
        assert_relative_eq!(r[1][0], 200e-6, max_relative = 1e-12);
        assert_relative_eq!(r[1][1], 450e-6, max_relative = 1e-12);
    }

    #[test]
    fn rejects_bad_geometry() {
        let err = ExperimentGeometry::new(450e-6, 500e-6, 1e-14, 1e-14).unwrap_err();
        assert!(err.to_string().contains("d > delta"), "{err}");
        assert!(ExperimentGeometry::new(1.0, 1.0, 1.0, 1.0).is_err());
        assert!(ExperimentGeometry::new(1.0, 0.0, 1.0, 1.0).unwrap_err().to_string().contains("delta > 0"));
        assert!(ExperimentGeometry::new(1.0, 0.5, 0.0, 1.0).unwrap_err().to_string().contains("m1"));
        assert!(ExperimentGeometry::new(1.0, 0.5, 1.0, -1.0).unwrap_err().to_string().contains("m2"));
        assert!(ExperimentGeometry::new(f64::NAN, 0.5, 1.0, 1.0).is_err());
        assert!(PhysicalConstants::new(0.0, 1.0).is_err());
        assert!(PhysicalConstants::new(1.0, -1.0).is_err());
    }

    #[test]
    fn branch_pairs_follow_basis_order() {
        use BranchLabel::*;
        let v: Vec<_> = branch_pairs().collect();
        assert_eq!(v, vec![(L, L), (L, R), (R, L), (R, R)]);
        assert!(L < R);
    }

    proptest! {
        #[test]
        fn separations_are_linear_and_centers_antisymmetric(
            d in 1e-6f64..10.0,
            frac in 1e-6f64..0.999,
        ) {
            let g = ExperimentGeometry::new(d, d * frac, 1.0, 1.0).unwrap();
            let r = pair_separations(&g).unwrap();
            prop_assert!((r[1][0] + r[0][1] - 2.0 * r[0][0]).abs() <= 1e-12 * d);
            prop_assert!(r.iter().flatten().all(|&v| v > 0.0));
            let c = branch_centers(&g).unwrap();
            prop_assert!((c.x1l + c.x2r).abs() <= 1e-15 * d);
            prop_assert!((c.x1r + c.x2l).abs() <= 1e-15 * d);
        }
    }
}

//! Named verification runs of the grid oracle.
//!
//! The dimensionless scenarios share one layout mirroring the experiment:
//! particle 1 in a superposition of packets at −4.5 and −1.5, particle 2 at
//! 1.5 and 4.5, on `[−16, 16)` with `ħ = m = g = 1`.

use std::fmt;
use std::str::FromStr;

use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};
use crate::geometry::{branch_pairs, BranchLabel, ExperimentGeometry, PhysicalConstants};
use crate::phase::{newton_phases, ns_phases, nsb_branch_phases};

use super::bohm::{born_sample, born_samples, VelocityField};
use super::dyson::dyson_factorization_check;
use super::evolve::{evolve, schmidt_entropy, Propagator, RunRecord, Sample};
use super::grid::{entangled_pair, gaussian_product, superposition_product, Grid1D, Wavefunction2D};
use super::potential::{BohmianConfig, OracleModel, OracleParams, PotentialBuilder};

pub const DESK_HALF_WIDTH: f64 = 16.0;
pub const DESK_PARTICLE1: [f64; 2] = [-4.5, -1.5];
pub const DESK_PARTICLE2: [f64; 2] = [1.5, 4.5];
pub const DESK_WIDTH: f64 = 0.7;

/// Product runs under separable models must stay below this entropy.
pub const SEPARABLE_ENTROPY_MAX: f64 = 1e-8;
/// The Newton run must exceed this entropy by the end.
pub const NEWTON_ENTROPY_MIN: f64 = 1e-3;
/// Allowed entropy change for entangled starts under separable models.
pub const ENTROPY_CONSTANCY_TOL: f64 = 1e-6;
pub const DYSON_L2_MAX: f64 = 1e-6;
pub const NORM_TOL: f64 = 1e-8;
pub const FROZEN_PHASE_REL_TOL: f64 = 0.01;
/// Significance level of the equivariance χ² test.
pub const CHI2_LEVEL: f64 = 0.01;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Scenario {
    SeparableNs,
    SeparableNsb,
    NewtonEntangles,
    EntangledConstancy,
    DysonFactorization,
    Equivariance,
    SiFrozenPhases,
}

impl Scenario {
    pub const ALL: [Scenario; 7] = [
        Scenario::SeparableNs,
        Scenario::SeparableNsb,
        Scenario::NewtonEntangles,
        Scenario::EntangledConstancy,
        Scenario::DysonFactorization,
        Scenario::Equivariance,
        Scenario::SiFrozenPhases,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::SeparableNs => "separable-ns",
            Scenario::SeparableNsb => "separable-nsb",
            Scenario::NewtonEntangles => "newton-entangles",
            Scenario::EntangledConstancy => "entangled-constancy",
            Scenario::DysonFactorization => "dyson-factorization",
            Scenario::Equivariance => "equivariance",
            Scenario::SiFrozenPhases => "si-frozen-phases",
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scenario::ALL.into_iter().find(|sc| sc.name() == s).ok_or_else(|| {
            let names: Vec<_> = Scenario::ALL.iter().map(|s| s.name()).collect();
            Error::Parameter(format!("unknown scenario '{s}', expected one of: {}", names.join(", ")))
        })
    }
}

/// Overrides for a scenario's defaults.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScenarioOptions {
    pub n: usize,
    pub dt: Option<f64>,
    pub steps: Option<usize>,
    pub g: Option<f64>,
    pub seed: u64,
}

impl Default for ScenarioOptions {
    fn default() -> Self {
        Self { n: 256, dt: None, steps: None, g: None, seed: 7 }
    }
}

/// Outcome of a scenario: verdict, named metrics in a fixed order, and the
/// sampled diagnostics of the main run.
#[derive(Clone, Debug)]
pub struct ScenarioReport {
    pub scenario: Scenario,
    pub pass: bool,
    pub metrics: Vec<(String, f64)>,
    pub samples: Vec<Sample>,
}

impl ScenarioReport {
    pub fn metric(&self, name: &str) -> Option<f64> {
        self.metrics.iter().find(|(k, _)| k == name).map(|(_, v)| *v)
    }
}

pub fn run_scenario(scenario: Scenario, opts: &ScenarioOptions) -> Result<ScenarioReport> {
    match scenario {
        Scenario::SeparableNs => separable(scenario, OracleModel::NewtonSchrodinger, opts),
        Scenario::SeparableNsb => separable(scenario, OracleModel::NewtonSchrodingerBohm, opts),
        Scenario::NewtonEntangles => newton_entangles(opts),
        Scenario::EntangledConstancy => entangled_constancy(opts),
        Scenario::DysonFactorization => dyson(opts),
        Scenario::Equivariance => equivariance(opts),
        Scenario::SiFrozenPhases => si_frozen_phases(opts),
    }
}

fn desk_grid(opts: &ScenarioOptions) -> Result<Grid1D> {
    Grid1D::new(opts.n, DESK_HALF_WIDTH)
}

fn desk_params(grid: &Grid1D, model: OracleModel, opts: &ScenarioOptions) -> OracleParams {
    let mut p = OracleParams::dimensionless(grid, model);
    if let Some(dt) = opts.dt {
        p.dt = dt;
    }
    if let Some(steps) = opts.steps {
        p.steps = steps;
    }
    if let Some(g) = opts.g {
        p.g = g;
    }
    p
}

fn desk_product(grid: &Grid1D) -> Result<Wavefunction2D> {
    superposition_product(DESK_PARTICLE1, DESK_PARTICLE2, DESK_WIDTH, grid)
}

fn initial_config(model: &OracleModel, wf: &Wavefunction2D, seed: u64) -> Option<BohmianConfig> {
    model.needs_config().then(|| born_sample(wf, seed))
}

fn run_desk(model: OracleModel, wf: &Wavefunction2D, opts: &ScenarioOptions) -> Result<RunRecord> {
    let params = desk_params(wf.grid(), model, opts);
    let config = initial_config(&params.model, wf, opts.seed);
    evolve(wf, &params, config)
}

fn separable(scenario: Scenario, model: OracleModel, opts: &ScenarioOptions) -> Result<ScenarioReport> {
    let grid = desk_grid(opts)?;
    let run = run_desk(model, &desk_product(&grid)?, opts)?;
    let max_entropy = run.max_entropy();
    let norm_err = run.max_norm_error();
    Ok(ScenarioReport {
        scenario,
        pass: max_entropy <= SEPARABLE_ENTROPY_MAX && norm_err <= NORM_TOL,
        metrics: vec![
            ("max_entropy".into(), max_entropy),
            ("max_norm_error".into(), norm_err),
            ("final_time".into(), run.samples.last().map_or(0.0, |s| s.t)),
        ],
        samples: run.samples,
    })
}

fn newton_entangles(opts: &ScenarioOptions) -> Result<ScenarioReport> {
    let grid = desk_grid(opts)?;
    let run = run_desk(OracleModel::Newton, &desk_product(&grid)?, opts)?;
    let final_entropy = run.samples.last().map_or(0.0, |s| s.entropy);
    let window = &run.samples[..run.samples.len().min(100)];
    let increasing = window.windows(2).all(|w| w[1].entropy > w[0].entropy);
    let norm_err = run.max_norm_error();
    Ok(ScenarioReport {
        scenario: Scenario::NewtonEntangles,
        pass: final_entropy >= NEWTON_ENTROPY_MIN && increasing && norm_err <= NORM_TOL,
        metrics: vec![
            ("final_entropy".into(), final_entropy),
            ("strictly_increasing".into(), f64::from(u8::from(increasing))),
            ("max_norm_error".into(), norm_err),
            ("final_time".into(), run.samples.last().map_or(0.0, |s| s.t)),
        ],
        samples: run.samples,
    })
}

fn entangled_constancy(opts: &ScenarioOptions) -> Result<ScenarioReport> {
    let grid = desk_grid(opts)?;
    let wf = entangled_pair(
        (DESK_PARTICLE1[0], DESK_PARTICLE2[0]),
        (DESK_PARTICLE1[1], DESK_PARTICLE2[1]),
        DESK_WIDTH,
        &grid,
    )?;
    let mut metrics = Vec::new();
    let mut pass = true;
    let mut samples = Vec::new();
    for model in [OracleModel::NewtonSchrodinger, OracleModel::NewtonSchrodingerBohm] {
        let name = model.name();
        let run = run_desk(model, &wf, opts)?;
        let s0 = run.samples[0].entropy;
        let drift = run.samples.iter().map(|s| (s.entropy - s0).abs()).fold(0.0, f64::max);
        pass &= drift <= ENTROPY_CONSTANCY_TOL && run.max_norm_error() <= NORM_TOL;
        metrics.push((format!("{name}_initial_entropy"), s0));
        metrics.push((format!("{name}_max_entropy_drift"), drift));
        metrics.push((format!("{name}_max_norm_error"), run.max_norm_error()));
        if samples.is_empty() {
            samples = run.samples;
        }
    }
    Ok(ScenarioReport { scenario: Scenario::EntangledConstancy, pass, metrics, samples })
}

fn dyson(opts: &ScenarioOptions) -> Result<ScenarioReport> {
    let grid = desk_grid(opts)?;
    let wf = desk_product(&grid)?;
    let mut metrics = Vec::new();
    let mut pass = true;
    let mut samples = Vec::new();
    for model in [OracleModel::NewtonSchrodinger, OracleModel::NewtonSchrodingerBohm] {
        let name = model.name();
        let run = run_desk(model, &wf, opts)?;
        let report = dyson_factorization_check(&run)?;
        pass &= report.l2_error <= DYSON_L2_MAX && report.max_entropy <= SEPARABLE_ENTROPY_MAX;
        metrics.push((format!("{name}_l2_error"), report.l2_error));
        metrics.push((format!("{name}_max_entropy"), report.max_entropy));
        metrics.push((format!("{name}_phase_rank1_residual"), report.max_phase_rank1_residual));
        if samples.is_empty() {
            samples = run.samples;
        }
    }
    Ok(ScenarioReport { scenario: Scenario::DysonFactorization, pass, metrics, samples })
}

/// χ² statistic of `positions` against `density` (sampled on the grid)
/// over `bins` cells of roughly equal expected mass.
pub fn chi_square_against(grid: &Grid1D, density: &[f64], positions: &[f64], bins: usize) -> (f64, usize) {
    let total: f64 = density.iter().sum();
    // Cell edges at the midpoints between grid points, equal-mass bins by
    // accumulating cells.
    let mut edges = vec![f64::NEG_INFINITY];
    let mut acc = 0.0;
    let mut next = 1;
    let mut probs = Vec::with_capacity(bins);
    let mut last = 0.0;
    for (i, p) in density.iter().enumerate() {
        acc += p / total;
        if next < bins && acc >= next as f64 / bins as f64 {
            edges.push(grid.x(i) + 0.5 * grid.dx());
            probs.push(acc - last);
            last = acc;
            next += 1;
        }
    }
    edges.push(f64::INFINITY);
    probs.push(1.0 - last);
    let mut counts = vec![0usize; probs.len()];
    for &x in positions {
        let j = edges.partition_point(|&e| e <= x).saturating_sub(1).min(counts.len() - 1);
        counts[j] += 1;
    }
    let n = positions.len() as f64;
    let chi2 = counts
        .iter()
        .zip(&probs)
        .map(|(&c, &p)| {
            let e = n * p;
            (c as f64 - e).powi(2) / e
        })
        .sum();
    (chi2, probs.len() - 1)
}

fn equivariance(opts: &ScenarioOptions) -> Result<ScenarioReport> {
    let grid = desk_grid(opts)?;
    let wf0 = gaussian_product((-1.0, 1.0), (0.5, 0.6), &grid)?;
    let mut params = desk_params(&grid, OracleModel::SeparableGeneric { v1: vec![0.0; grid.n()], v2: vec![0.0; grid.n()] }, opts);
    if opts.dt.is_none() {
        params.dt = 5e-3;
    }
    if opts.steps.is_none() {
        params.steps = 300;
    }
    params.validate(&grid)?;
    let builder = PotentialBuilder::new(&grid, &params);
    let mut prop = Propagator::new(&grid, &params, params.dt);
    let mut wf = wf0.clone();
    let mut ensemble = born_samples(&wf0, opts.seed, 1000);
    let field = builder.build(&wf, None)?;
    let mut samples = Vec::new();
    for step in 1..=params.steps {
        let mid = prop.step(&mut wf, &field, true).expect("mid-step state requested");
        let v = VelocityField::new(prop.fft(), &mid, params.hbar, params.mass1, params.mass2);
        for c in ensemble.iter_mut() {
            *c = v.rk4(c, params.dt)?;
        }
        if step % params.sample_every == 0 || step == params.steps {
            let n = ensemble.len() as f64;
            let mean1 = ensemble.iter().map(|c| c.x1).sum::<f64>() / n;
            let mean2 = ensemble.iter().map(|c| c.x2).sum::<f64>() / n;
            samples.push(Sample {
                step,
                t: step as f64 * params.dt,
                norm: wf.norm(),
                entropy: f64::NAN,
                config: Some(BohmianConfig::new(mean1, mean2)),
                energy: f64::NAN,
            });
        }
    }
    let bins = 10;
    let x1: Vec<f64> = ensemble.iter().map(|c| c.x1).collect();
    let x2: Vec<f64> = ensemble.iter().map(|c| c.x2).collect();
    let (chi1, dof) = chi_square_against(&grid, &wf.marginal1(), &x1, bins);
    let (chi2, _) = chi_square_against(&grid, &wf.marginal2(), &x2, bins);
    let critical = ChiSquared::new(dof as f64).expect("positive dof").inverse_cdf(1.0 - CHI2_LEVEL);
    let entropy = schmidt_entropy(&wf);
    for s in samples.iter_mut() {
        s.entropy = entropy;
    }
    Ok(ScenarioReport {
        scenario: Scenario::Equivariance,
        pass: chi1 <= critical && chi2 <= critical,
        metrics: vec![
            ("chi2_particle1".into(), chi1),
            ("chi2_particle2".into(), chi2),
            ("chi2_critical".into(), critical),
            ("degrees_of_freedom".into(), dof as f64),
            ("ensemble_size".into(), ensemble.len() as f64),
        ],
        samples,
    })
}

/// Grid and parameters for the frozen SI check: experimental geometry,
/// branch centers on grid points, kinetic term off.
pub fn si_frozen_setup(model: OracleModel, steps: usize, dt: f64) -> Result<(Grid1D, OracleParams, Wavefunction2D)> {
    let geom = ExperimentGeometry::BMV;
    let consts = PhysicalConstants::default();
    let dx = geom.delta / 20.0;
    let grid = Grid1D::with_spacing(128, dx)?;
    let width = 2.0 * dx;
    let p1 = [geom.center(1, BranchLabel::L), geom.center(1, BranchLabel::R)];
    let p2 = [geom.center(2, BranchLabel::L), geom.center(2, BranchLabel::R)];
    let wf = superposition_product(p1, p2, width, &grid)?;
    let params = OracleParams {
        hbar: consts.hbar,
        mass1: geom.m1,
        mass2: geom.m2,
        g: consts.g * geom.m1 * geom.m2,
        eps: dx,
        dt,
        steps,
        model,
        kinetic: false,
        self_interaction: false,
        sample_every: steps.max(1),
    };
    Ok((grid, params, wf))
}

/// `arg(ψ_t/ψ_0)` at the four branch centers, indexed `[k][l]`.
pub fn branch_phases_on_grid(initial: &Wavefunction2D, later: &Wavefunction2D) -> [[f64; 2]; 2] {
    let geom = ExperimentGeometry::BMV;
    let g = initial.grid();
    let mut out = [[0.0; 2]; 2];
    for (k, l) in branch_pairs() {
        let a = g.nearest(geom.center(1, k)).expect("center inside grid");
        let b = g.nearest(geom.center(2, l)).expect("center inside grid");
        out[k.index()][l.index()] = (later.at(a, b) / initial.at(a, b)).arg();
    }
    out
}

fn worst_relative(measured: &[[f64; 2]; 2], expected: &[[f64; 2]; 2]) -> f64 {
    branch_pairs()
        .map(|(k, l)| {
            let (m, e) = (measured[k.index()][l.index()], expected[k.index()][l.index()]);
            ((m - e) / e).abs()
        })
        .fold(0.0, f64::max)
}

fn si_frozen_phases(opts: &ScenarioOptions) -> Result<ScenarioReport> {
    let consts = PhysicalConstants::default();
    let geom = ExperimentGeometry::BMV;
    let steps = opts.steps.unwrap_or(1000);
    let dt = opts.dt.unwrap_or(1e-3);
    let t = steps as f64 * dt;
    let mut metrics = Vec::new();

    let (_, params, wf) = si_frozen_setup(OracleModel::Newton, steps, dt)?;
    let run = evolve(&wf, &params, None)?;
    let newton_err = worst_relative(&branch_phases_on_grid(&wf, &run.final_wf), &newton_phases(&geom, &consts, t).gamma);
    metrics.push(("newton_max_rel_error".into(), newton_err));
    let samples = run.samples;

    let mut nsb_err: f64 = 0.0;
    for (m, n) in branch_pairs() {
        let (_, params, wf) = si_frozen_setup(OracleModel::NewtonSchrodingerBohm, steps, dt)?;
        let config = BohmianConfig::new(geom.center(1, m), geom.center(2, n));
        let run = evolve(&wf, &params, Some(config))?;
        let expected = nsb_branch_phases(&geom, &consts, (m, n), t).gamma;
        nsb_err = nsb_err.max(worst_relative(&branch_phases_on_grid(&wf, &run.final_wf), &expected));
    }
    metrics.push(("nsb_max_rel_error".into(), nsb_err));

    // Mean field with Born weight ½ on each packet of the other particle.
    let (_, params, wf) = si_frozen_setup(OracleModel::NewtonSchrodinger, steps, dt)?;
    let run = evolve(&wf, &params, None)?;
    let measured = branch_phases_on_grid(&wf, &run.final_wf);
    let gt = geom.coupling_rate(&consts) * t;
    let mut born = [[0.0; 2]; 2];
    for (k, l) in branch_pairs() {
        let from2: f64 = BranchLabel::ALL.iter().map(|&n| 0.5 / geom.separation(k, n)).sum();
        let from1: f64 = BranchLabel::ALL.iter().map(|&m| 0.5 / geom.separation(m, l)).sum();
        born[k.index()][l.index()] = gt * (from2 + from1);
    }
    let ns_err = worst_relative(&measured, &born);
    metrics.push(("ns_born_weighted_max_rel_error".into(), ns_err));
    let (p1, _) = ns_phases(&geom, &consts, t).separable_parts.expect("separable");
    let measured_diff = measured[0][0] - measured[1][0];
    metrics.push(("ns_closed_form_difference_ratio".into(), measured_diff / (p1[0] - p1[1])));

    Ok(ScenarioReport {
        scenario: Scenario::SiFrozenPhases,
        pass: newton_err <= FROZEN_PHASE_REL_TOL && nsb_err <= FROZEN_PHASE_REL_TOL,
        metrics,
        samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scenario_names_round_trip() {
        for s in Scenario::ALL {
            assert_eq!(s.name().parse::<Scenario>().unwrap(), s);
        }
        let err = "dyson".parse::<Scenario>().unwrap_err();
        assert!(err.to_string().contains("separable-ns"));
    }

    #[test]
    fn chi_square_of_exact_quantiles_is_small() {
        let grid = Grid1D::new(256, 8.0).unwrap();
        let wf = gaussian_product((0.0, 0.0), (1.0, 1.0), &grid).unwrap();
        let samples: Vec<f64> = born_samples(&wf, 3, 5000).iter().map(|c| c.x1).collect();
        let (chi2, dof) = chi_square_against(&grid, &wf.marginal1(), &samples, 10);
        assert_eq!(dof, 9);
        assert!(chi2 < 30.0, "{chi2}");
        let shifted: Vec<f64> = samples.iter().map(|x| x + 0.5).collect();
        assert!(chi_square_against(&grid, &wf.marginal1(), &shifted, 10).0 > 100.0);
    }

    #[test]
    fn frozen_setup_puts_centers_on_grid_points() {
        let (grid, params, _) = si_frozen_setup(OracleModel::Newton, 10, 1e-3).unwrap();
        let geom = ExperimentGeometry::BMV;
        for (k, l) in branch_pairs() {
            for x in [geom.center(1, k), geom.center(2, l)] {
                let i = grid.nearest(x).unwrap();
                assert!((grid.x(i) - x).abs() < 1e-12 * geom.d);
            }
        }
        assert!(!params.kinetic);
        params.validate(&grid).unwrap();
    }
}

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use clap::Args;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use gie_lab::diagnostics::witness_closed_newton;
use gie_lab::{ExperimentGeometry, PhysicalConstants};

use crate::config::{load_config, pick};
use crate::error::{CliError, CliResult};
use crate::output::{csv, fmt_sig, json_text, with_extension, write_file, TOOL, VERSION};
use crate::witness::{WitnessModel, CSV_DIGITS};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepVar {
    D,
    Delta,
    /// Both masses together.
    M,
}

impl FromStr for SweepVar {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "d" => Ok(SweepVar::D),
            "delta" => Ok(SweepVar::Delta),
            "m" => Ok(SweepVar::M),
            other => Err(format!("unknown sweep variable '{other}', expected d, delta or m")),
        }
    }
}

impl fmt::Display for SweepVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SweepVar::D => "d",
            SweepVar::Delta => "delta",
            SweepVar::M => "m",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Lin,
    Log,
}

impl FromStr for Spacing {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "lin" => Ok(Spacing::Lin),
            "log" => Ok(Spacing::Log),
            other => Err(format!("unknown spacing '{other}', expected lin or log")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Objective {
    /// All three witnesses at a fixed time.
    Witness,
    /// First time `W_N` reaches `−threshold`.
    Crossing,
}

impl FromStr for Objective {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "witness" => Ok(Objective::Witness),
            "crossing" => Ok(Objective::Crossing),
            other => Err(format!("unknown objective '{other}', expected witness or crossing")),
        }
    }
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    /// Swept variable: d, delta or m (both masses)
    #[arg(long)]
    var: Option<SweepVar>,
    #[arg(long)]
    from: Option<f64>,
    #[arg(long)]
    to: Option<f64>,
    #[arg(long)]
    points: Option<usize>,
    /// lin or log
    #[arg(long)]
    spacing: Option<Spacing>,
    /// witness (at --t) or crossing (first time W_N <= -threshold)
    #[arg(long)]
    objective: Option<Objective>,
    #[arg(long)]
    t: Option<f64>,
    #[arg(long)]
    threshold: Option<f64>,
    #[arg(long)]
    d: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    m1: Option<f64>,
    #[arg(long)]
    m2: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    config: Option<PathBuf>,
}

const KEYS: &[&str] = &[
    "var", "from", "to", "points", "spacing", "objective", "t", "threshold", "d", "delta", "m1", "m2", "out",
];

#[derive(Clone, Debug, Serialize)]
pub struct SweepParams {
    pub var: SweepVar,
    pub from: f64,
    pub to: f64,
    pub points: usize,
    pub spacing: Spacing,
    pub objective: Objective,
    pub t: f64,
    pub threshold: f64,
    pub d: f64,
    pub delta: f64,
    pub m1: f64,
    pub m2: f64,
    pub out: PathBuf,
}

impl SweepArgs {
    pub fn resolve(self) -> CliResult<SweepParams> {
        let file = load_config(self.config.as_deref(), KEYS)?;
        let bmv = ExperimentGeometry::BMV;
        let var = pick(self.var, &file, "var", SweepVar::M)?;
        let (from, to) = match var {
            SweepVar::D => (3e-4, 1e-3),
            SweepVar::Delta => (5e-5, 6e-4),
            SweepVar::M => (1e-15, 1e-13),
        };
        Ok(SweepParams {
            var,
            from: pick(self.from, &file, "from", from)?,
            to: pick(self.to, &file, "to", to)?,
            points: pick(self.points, &file, "points", 21)?,
            spacing: pick(self.spacing, &file, "spacing", Spacing::Log)?,
            objective: pick(self.objective, &file, "objective", Objective::Crossing)?,
            t: pick(self.t, &file, "t", 1.0)?,
            threshold: pick(self.threshold, &file, "threshold", 0.05)?,
            d: pick(self.d, &file, "d", bmv.d)?,
            delta: pick(self.delta, &file, "delta", bmv.delta)?,
            m1: pick(self.m1, &file, "m1", bmv.m1)?,
            m2: pick(self.m2, &file, "m2", bmv.m2)?,
            out: pick(self.out, &file, "out", PathBuf::from("sweep"))?,
        })
    }
}

pub fn sweep_values(p: &SweepParams) -> CliResult<Vec<f64>> {
    if p.points == 0 {
        return Err(CliError::Validation("zero-length sweep: points must be >= 1".into()));
    }
    if !(p.from.is_finite() && p.to.is_finite()) {
        return Err(CliError::Validation("sweep bounds must be finite".into()));
    }
    if p.points == 1 {
        return Ok(vec![p.from]);
    }
    let last = (p.points - 1) as f64;
    match p.spacing {
        Spacing::Lin => Ok((0..p.points).map(|i| p.from + (p.to - p.from) * i as f64 / last).collect()),
        Spacing::Log => {
            if !(p.from > 0.0 && p.to > 0.0) {
                return Err(CliError::Validation("log spacing needs from > 0 and to > 0".into()));
            }
            let (a, b) = (p.from.ln(), p.to.ln());
            Ok((0..p.points).map(|i| (a + (b - a) * i as f64 / last).exp()).collect())
        }
    }
}

/// First time `W_N(t) <= −threshold`, resolved by scanning in steps of at
/// most 1e-3 rad of the fastest pair phase up to 2π, then bisecting.
pub fn first_crossing(geom: &ExperimentGeometry, consts: &PhysicalConstants, threshold: f64) -> Option<f64> {
    let fastest = geom.coupling_rate(consts) / (geom.d - geom.delta);
    let h = 1e-3 / fastest;
    let steps = (2.0 * std::f64::consts::PI / 1e-3).ceil() as usize;
    let below = |t: f64| witness_closed_newton(geom, consts, t) <= -threshold;
    let mut prev = 0.0;
    for k in 1..=steps {
        let t = k as f64 * h;
        if below(t) {
            let (mut a, mut b) = (prev, t);
            for _ in 0..200 {
                let mid = 0.5 * (a + b);
                if mid <= a || mid >= b {
                    break;
                }
                if below(mid) {
                    b = mid;
                } else {
                    a = mid;
                }
            }
            return Some(b);
        }
        prev = t;
    }
    None
}

#[derive(Clone, Debug, PartialEq)]
pub enum RowOutcome {
    Invalid(String),
    Values(Vec<Option<f64>>),
}

pub fn objective_columns(p: &SweepParams) -> Vec<String> {
    match p.objective {
        Objective::Witness => ["N", "NS", "NSB"].iter().map(|m| format!("W_{m}")).collect(),
        Objective::Crossing => vec!["t_cross_W_N".into()],
    }
}

pub fn evaluate(p: &SweepParams, value: f64) -> RowOutcome {
    let (mut d, mut delta, mut m1, mut m2) = (p.d, p.delta, p.m1, p.m2);
    match p.var {
        SweepVar::D => d = value,
        SweepVar::Delta => delta = value,
        SweepVar::M => {
            m1 = value;
            m2 = value;
        }
    }
    let geom = match ExperimentGeometry::new(d, delta, m1, m2) {
        Ok(g) => g,
        Err(e) => return RowOutcome::Invalid(e.to_string()),
    };
    let consts = PhysicalConstants::default();
    match p.objective {
        Objective::Witness => RowOutcome::Values(
            [WitnessModel::Newton, WitnessModel::NewtonSchrodinger, WitnessModel::NewtonSchrodingerBohm]
                .iter()
                .map(|m| Some(m.witness(&geom, &consts, p.t)))
                .collect(),
        ),
        Objective::Crossing => RowOutcome::Values(vec![first_crossing(&geom, &consts, p.threshold)]),
    }
}

pub fn run(args: SweepArgs) -> CliResult<()> {
    let params = args.resolve()?;
    if params.objective == Objective::Crossing && !(params.threshold > 0.0) {
        return Err(CliError::Validation("threshold must be > 0".into()));
    }
    if params.objective == Objective::Witness && !(params.t.is_finite() && params.t >= 0.0) {
        return Err(CliError::Validation("t must be finite and >= 0".into()));
    }
    let values = sweep_values(&params)?;
    let outcomes: Vec<RowOutcome> = values.par_iter().map(|&v| evaluate(&params, v)).collect();
    let cols = objective_columns(&params);
    let header: Vec<String> =
        [params.var.to_string(), "status".into()].into_iter().chain(cols.iter().cloned()).collect();
    let mut invalid = 0;
    let rows: Vec<Vec<String>> = values
        .iter()
        .zip(&outcomes)
        .map(|(&v, o)| {
            let mut row = vec![fmt_sig(v, CSV_DIGITS)];
            match o {
                RowOutcome::Invalid(_) => {
                    invalid += 1;
                    row.push("invalid".into());
                    row.extend(cols.iter().map(|_| String::new()));
                }
                RowOutcome::Values(vals) => {
                    row.push(if vals.iter().all(Option::is_some) { "ok" } else { "none" }.into());
                    row.extend(vals.iter().map(|x| x.map(|x| fmt_sig(x, CSV_DIGITS)).unwrap_or_default()));
                }
            }
            row
        })
        .collect();
    write_file(&with_extension(&params.out, "csv"), &csv(&header, &rows))?;
    let consts = PhysicalConstants::default();
    let doc = json!({
        "tool": TOOL,
        "version": VERSION,
        "command": "sweep",
        "params": params,
        "constants": {"G": consts.g, "hbar": consts.hbar},
        "columns": header,
        "rows": values.len(),
        "invalid_rows": invalid,
    });
    write_file(&with_extension(&params.out, "json"), &json_text(&doc))?;
    if invalid > 0 {
        eprintln!("warning: {invalid} of {} sweep points violate the geometry constraints", values.len());
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn crossing_scales_inversely_with_coupling() {
        let consts = PhysicalConstants::default();
        let g1 = ExperimentGeometry::BMV;
        let g2 = ExperimentGeometry { m1: 2e-14, m2: 2e-14, ..g1 };
        let t1 = first_crossing(&g1, &consts, 0.05).unwrap();
        let t2 = first_crossing(&g2, &consts, 0.05).unwrap();
        assert!((t1 / t2 - 4.0).abs() < 1e-9, "{t1} {t2}");
        assert!((witness_closed_newton(&g1, &consts, t1) + 0.05).abs() < 1e-12);
        assert!(first_crossing(&g1, &consts, 5.0).is_none());
    }
}

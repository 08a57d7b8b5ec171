use std::path::PathBuf;

use clap::Args;
use serde::Serialize;
use serde_json::json;

use gie_lab::pde::scenario::{run_scenario, Scenario, ScenarioOptions, ScenarioReport};

use crate::config::{load_config, pick};
use crate::error::{CliError, CliResult};
use crate::output::{csv, fmt_sig, json_text, with_extension, write_file, TOOL, VERSION};
use crate::witness::CSV_DIGITS;

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// separable-ns, separable-nsb, newton-entangles, entangled-constancy,
    /// dyson-factorization, equivariance or si-frozen-phases
    #[arg(long)]
    scenario: Option<Scenario>,
    /// Grid points per axis
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    steps: Option<usize>,
    /// Coupling strength (dimensionless scenarios)
    #[arg(long)]
    g: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output path stem; extensions are appended
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    config: Option<PathBuf>,
}

const KEYS: &[&str] = &["scenario", "n", "dt", "steps", "g", "seed", "out"];

/// `None` means the scenario's own default.
#[derive(Clone, Debug, Serialize)]
pub struct VerifyParams {
    pub scenario: String,
    pub n: usize,
    pub dt: Option<f64>,
    pub steps: Option<usize>,
    pub g: Option<f64>,
    pub seed: u64,
    pub out: PathBuf,
}

fn optional<T: std::str::FromStr>(
    flag: Option<T>,
    file: &crate::config::ConfigValues,
    key: &str,
) -> CliResult<Option<T>> {
    Ok(match flag {
        Some(v) => Some(v),
        None => file.get(key)?,
    })
}

impl VerifyArgs {
    fn resolve(self) -> CliResult<(Scenario, VerifyParams)> {
        let file = load_config(self.config.as_deref(), KEYS)?;
        let defaults = ScenarioOptions::default();
        let scenario = optional(self.scenario, &file, "scenario")?.ok_or_else(|| {
            let names: Vec<_> = Scenario::ALL.iter().map(|s| s.name()).collect();
            CliError::Validation(format!("--scenario is required, one of: {}", names.join(", ")))
        })?;
        let params = VerifyParams {
            scenario: scenario.name().to_string(),
            n: pick(self.n, &file, "n", defaults.n)?,
            dt: optional(self.dt, &file, "dt")?,
            steps: optional(self.steps, &file, "steps")?,
            g: optional(self.g, &file, "g")?,
            seed: pick(self.seed, &file, "seed", defaults.seed)?,
            out: pick(self.out, &file, "out", PathBuf::from(format!("pde-{}", scenario.name())))?,
        };
        Ok((scenario, params))
    }
}

fn diagnostics_csv(report: &ScenarioReport) -> String {
    let header: Vec<String> = ["t", "norm", "entropy", "X1", "X2", "energy"].iter().map(|s| s.to_string()).collect();
    let num = |x: f64| fmt_sig(x, CSV_DIGITS);
    let rows: Vec<Vec<String>> = report
        .samples
        .iter()
        .map(|s| {
            let (x1, x2) = s.config.map(|c| (num(c.x1), num(c.x2))).unwrap_or_default();
            vec![num(s.t), num(s.norm), num(s.entropy), x1, x2, num(s.energy)]
        })
        .collect();
    csv(&header, &rows)
}

/// Runs the scenario and writes its outputs; returns the verdict.
pub fn run(args: VerifyArgs) -> CliResult<bool> {
    let (scenario, params) = args.resolve()?;
    let opts = ScenarioOptions { n: params.n, dt: params.dt, steps: params.steps, g: params.g, seed: params.seed };
    if let Some(dt) = opts.dt {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(CliError::Validation(format!("dt must be finite and > 0, got {dt}")));
        }
    }
    if opts.steps == Some(0) {
        return Err(CliError::Validation("steps must be >= 1".into()));
    }
    let report = run_scenario(scenario, &opts)?;
    write_file(&with_extension(&params.out, "csv"), &diagnostics_csv(&report))?;
    let metrics: serde_json::Map<String, serde_json::Value> =
        report.metrics.iter().map(|(k, v)| (k.clone(), json!(v))).collect();
    let doc = json!({
        "tool": TOOL,
        "version": VERSION,
        "command": "pde-verify",
        "scenario": scenario.name(),
        "pass": report.pass,
        "params": params,
        "metrics": metrics,
    });
    write_file(&with_extension(&params.out, "json"), &json_text(&doc))?;
    println!("{}: {}", scenario.name(), if report.pass { "PASS" } else { "FAIL" });
    for (k, v) in &report.metrics {
        println!("  {k} = {}", fmt_sig(*v, 6));
    }
    Ok(report.pass)
}

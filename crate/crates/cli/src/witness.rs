use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use clap::Args;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use gie_lab::diagnostics::{witness_closed_newton, witness_closed_ns, witness_closed_nsb};
use gie_lab::{ExperimentGeometry, PhysicalConstants};

use crate::config::{load_config, pick};
use crate::error::{CliError, CliResult};
use crate::output::{csv, fmt_sig, json_text, svg_plot, with_extension, write_file, Series, TOOL, VERSION};

pub const CSV_DIGITS: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum WitnessModel {
    #[serde(rename = "N")]
    Newton,
    #[serde(rename = "NS")]
    NewtonSchrodinger,
    #[serde(rename = "NSB")]
    NewtonSchrodingerBohm,
}

impl WitnessModel {
    pub fn tag(self) -> &'static str {
        match self {
            WitnessModel::Newton => "N",
            WitnessModel::NewtonSchrodinger => "NS",
            WitnessModel::NewtonSchrodingerBohm => "NSB",
        }
    }

    fn color(self) -> &'static str {
        match self {
            WitnessModel::Newton => "#1f77b4",
            WitnessModel::NewtonSchrodinger => "#d62728",
            WitnessModel::NewtonSchrodingerBohm => "#2ca02c",
        }
    }

    pub fn witness(self, geom: &ExperimentGeometry, consts: &PhysicalConstants, t: f64) -> f64 {
        match self {
            WitnessModel::Newton => witness_closed_newton(geom, consts, t),
            WitnessModel::NewtonSchrodinger => witness_closed_ns(geom, consts, t),
            WitnessModel::NewtonSchrodingerBohm => witness_closed_nsb(geom, consts, t),
        }
    }
}

/// Selected models in the fixed N, NS, NSB order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModelSet(pub Vec<WitnessModel>);

impl FromStr for ModelSet {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let mut models = Vec::new();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let m = match part {
                "N" => WitnessModel::Newton,
                "NS" => WitnessModel::NewtonSchrodinger,
                "NSB" => WitnessModel::NewtonSchrodingerBohm,
                other => return Err(format!("unknown model '{other}', expected N, NS or NSB")),
            };
            models.push(m);
        }
        if models.is_empty() {
            return Err("at least one model is required".into());
        }
        models.sort();
        models.dedup();
        Ok(ModelSet(models))
    }
}

impl Default for ModelSet {
    fn default() -> Self {
        ModelSet(vec![WitnessModel::Newton, WitnessModel::NewtonSchrodinger, WitnessModel::NewtonSchrodingerBohm])
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Svg,
    All,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            "svg" => Ok(Format::Svg),
            "all" => Ok(Format::All),
            other => Err(format!("unknown format '{other}', expected csv, json, svg or all")),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Csv => "csv",
            Format::Json => "json",
            Format::Svg => "svg",
            Format::All => "all",
        })
    }
}

#[derive(Args, Debug)]
pub struct WitnessArgs {
    /// Separation of the superposition centers (m)
    #[arg(long)]
    d: Option<f64>,
    /// Half-splitting of each superposition (m)
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    m1: Option<f64>,
    #[arg(long)]
    m2: Option<f64>,
    /// End of the time axis (s)
    #[arg(long = "t-max")]
    t_max: Option<f64>,
    #[arg(long)]
    samples: Option<usize>,
    /// Comma-separated subset of N,NS,NSB
    #[arg(long)]
    models: Option<ModelSet>,
    /// Output path stem; extensions are appended
    #[arg(long)]
    out: Option<PathBuf>,
    /// csv, json, svg or all
    #[arg(long)]
    format: Option<Format>,
    /// key=value parameter file; flags take precedence
    #[arg(long)]
    config: Option<PathBuf>,
}

const KEYS: &[&str] = &["d", "delta", "m1", "m2", "t-max", "samples", "models", "out", "format"];

#[derive(Clone, Debug, Serialize)]
pub struct WitnessParams {
    pub d: f64,
    pub delta: f64,
    pub m1: f64,
    pub m2: f64,
    pub t_max: f64,
    pub samples: usize,
    pub models: Vec<WitnessModel>,
    pub format: Format,
    pub out: PathBuf,
}

impl WitnessArgs {
    pub fn resolve(self) -> CliResult<WitnessParams> {
        let file = load_config(self.config.as_deref(), KEYS)?;
        let bmv = ExperimentGeometry::BMV;
        Ok(WitnessParams {
            d: pick(self.d, &file, "d", bmv.d)?,
            delta: pick(self.delta, &file, "delta", bmv.delta)?,
            m1: pick(self.m1, &file, "m1", bmv.m1)?,
            m2: pick(self.m2, &file, "m2", bmv.m2)?,
            t_max: pick(self.t_max, &file, "t-max", 4.0)?,
            samples: pick(self.samples, &file, "samples", 2000)?,
            models: pick(self.models, &file, "models", ModelSet::default())?.0,
            format: pick(self.format, &file, "format", Format::Csv)?,
            out: pick(self.out, &file, "out", PathBuf::from("witness"))?,
        })
    }
}

/// Sample times: `samples` points spanning `[0, t_max]`, or just `t = 0`.
pub fn time_axis(t_max: f64, samples: usize) -> CliResult<Vec<f64>> {
    if !(t_max.is_finite() && t_max >= 0.0) {
        return Err(CliError::Validation(format!("t-max must be finite and >= 0, got {t_max}")));
    }
    if samples == 0 {
        return Err(CliError::Validation("samples must be >= 1".into()));
    }
    if t_max == 0.0 {
        return Ok(vec![0.0]);
    }
    if samples < 2 {
        return Err(CliError::Validation("samples must be >= 2 when t-max > 0".into()));
    }
    let last = (samples - 1) as f64;
    Ok((0..samples).map(|i| t_max * i as f64 / last).collect())
}

pub struct WitnessTable {
    pub t: Vec<f64>,
    /// One column per selected model.
    pub columns: Vec<Vec<f64>>,
}

pub fn compute(params: &WitnessParams) -> CliResult<WitnessTable> {
    let geom = ExperimentGeometry::new(params.d, params.delta, params.m1, params.m2)?;
    let consts = PhysicalConstants::default();
    let t = time_axis(params.t_max, params.samples)?;
    let rows: Vec<Vec<f64>> =
        t.par_iter().map(|&t| params.models.iter().map(|m| m.witness(&geom, &consts, t)).collect()).collect();
    let columns = (0..params.models.len()).map(|j| rows.iter().map(|r| r[j]).collect()).collect();
    Ok(WitnessTable { t, columns })
}

pub fn header(models: &[WitnessModel]) -> Vec<String> {
    std::iter::once("t".to_string()).chain(models.iter().map(|m| format!("W_{}", m.tag()))).collect()
}

fn metadata(params: &WitnessParams) -> serde_json::Value {
    let consts = PhysicalConstants::default();
    let geom = ExperimentGeometry { d: params.d, delta: params.delta, m1: params.m1, m2: params.m2 };
    json!({
        "tool": TOOL,
        "version": VERSION,
        "command": "witness",
        "params": params,
        "constants": {
            "G": consts.g,
            "hbar": consts.hbar,
            "gamma": geom.coupling_rate(&consts),
        },
        "columns": header(&params.models),
    })
}

pub fn run(args: WitnessArgs) -> CliResult<()> {
    let params = args.resolve()?;
    let table = compute(&params)?;
    let meta = metadata(&params);
    let want = |f: Format| params.format == f || params.format == Format::All;

    if want(Format::Csv) {
        let rows: Vec<Vec<String>> = (0..table.t.len())
            .map(|i| {
                std::iter::once(fmt_sig(table.t[i], CSV_DIGITS))
                    .chain(table.columns.iter().map(|c| fmt_sig(c[i], CSV_DIGITS)))
                    .collect()
            })
            .collect();
        write_file(&with_extension(&params.out, "csv"), &csv(&header(&params.models), &rows))?;
    }
    if want(Format::Csv) || want(Format::Json) {
        let mut doc = meta.clone();
        if want(Format::Json) {
            let mut data = serde_json::Map::new();
            data.insert("t".into(), json!(table.t));
            for (m, c) in params.models.iter().zip(&table.columns) {
                data.insert(format!("W_{}", m.tag()), json!(c));
            }
            doc["data"] = serde_json::Value::Object(data);
        }
        write_file(&with_extension(&params.out, "json"), &json_text(&doc))?;
    }
    if want(Format::Svg) {
        let series: Vec<Series<'_>> = params
            .models
            .iter()
            .zip(&table.columns)
            .map(|(m, c)| Series { label: m.tag(), color: m.color(), values: c.clone() })
            .collect();
        let svg = svg_plot(&table.t, &series, "witness W", Some(2.0), &meta);
        write_file(&with_extension(&params.out, "svg"), &svg)?;
    }
    Ok(())
}

//! Serialized run records shared by the command line and the bridge.
//!
//! JSON results follow
//! `{config:{...}, dataset:{rows,attrs}, points:[{sigma,estimate}], curve:[{sigma,value}], runtime_ms}`.
//! CSV results have a `kind,sigma,value` header followed by `point` rows in
//! path order and `curve` rows in ascending `sigma`.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::dataset::{randomize_marginals, TransactionDatabase};
use crate::error::{Error, Result};
use crate::isotonic::SpectrumCurve;
use crate::registry::{Registry, DEFAULT_ESTIMATOR, DEFAULT_FIT};
use crate::spectrum::{
    estimate_spectrum_with, ComparisonReport, EstimatePoint, ExactSpectrum, SpectrumQuery,
    SpectrumResult, DEFAULT_EXACT_CAP, DEFAULT_PATHS, DEFAULT_SIGMA_CAP,
};

pub const DEFAULT_SEED: u64 = 0;
pub const CSV_HEADER: &str = "kind,sigma,value";

/// Run parameters as supplied by a caller; anything left out takes its
/// default once the dataset is known.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryOptions {
    pub sigma_min: Option<u32>,
    pub sigma_max: Option<u32>,
    pub paths: Option<usize>,
    pub seed: Option<u64>,
    pub include_empty_set: Option<bool>,
    pub estimator: Option<String>,
    pub fit: Option<String>,
}

impl QueryOptions {
    pub fn resolve(&self, db: &TransactionDatabase) -> SpectrumQuery {
        let n_rows = u32::try_from(db.n_rows()).unwrap_or(u32::MAX);
        SpectrumQuery {
            sigma_min: self.sigma_min.unwrap_or(1),
            sigma_max: self.sigma_max.unwrap_or(DEFAULT_SIGMA_CAP.min(n_rows)),
            paths: self.paths.unwrap_or(DEFAULT_PATHS),
            seed: self.seed.unwrap_or(DEFAULT_SEED),
            include_empty_set: self.include_empty_set.unwrap_or(true),
            estimator: self.estimator.clone().unwrap_or_else(|| DEFAULT_ESTIMATOR.into()),
            fit: self.fit.clone().unwrap_or_else(|| DEFAULT_FIT.into()),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RunKind {
    #[default]
    Estimate,
    Baseline,
    Exact,
}

impl RunKind {
    pub fn as_str(self) -> &'static str {
        match self {
            RunKind::Estimate => "estimate",
            RunKind::Baseline => "baseline",
            RunKind::Exact => "exact",
        }
    }
}

/// Runs estimation on `db`, or on its marginal-preserving randomization
/// (seeded with the query seed) for [`RunKind::Baseline`].
pub fn run_spectrum(
    db: &TransactionDatabase,
    query: &SpectrumQuery,
    kind: RunKind,
    registry: &Registry,
) -> Result<SpectrumResult> {
    match kind {
        RunKind::Estimate => estimate_spectrum_with(db, query, registry),
        RunKind::Baseline => {
            query.validate(db.n_rows())?;
            let randomized = randomize_marginals(db, query.seed);
            estimate_spectrum_with(&randomized, query, registry)
        }
        RunKind::Exact => Err(Error::InvalidQuery(
            "exact counting is not a sampling run".into(),
        )),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DatasetSummary {
    pub rows: usize,
    pub attrs: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub sigma: f64,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimateConfig {
    pub command: RunKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input: Option<String>,
    #[serde(flatten)]
    pub query: SpectrumQuery,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub config: EstimateConfig,
    pub dataset: DatasetSummary,
    pub points: Vec<EstimatePoint>,
    pub curve: Vec<CurvePoint>,
    pub runtime_ms: f64,
}

impl EstimateReport {
    pub fn new(result: &SpectrumResult, kind: RunKind, input: Option<String>, threads: Option<usize>) -> Self {
        Self {
            config: EstimateConfig {
                command: kind,
                input,
                query: result.query.clone(),
                threads,
            },
            dataset: DatasetSummary {
                rows: result.n_rows,
                attrs: result.n_attrs,
            },
            points: result.points.clone(),
            curve: curve_points(&result.curve),
            runtime_ms: result.elapsed.as_secs_f64() * 1e3,
        }
    }

    pub fn curve(&self) -> Result<SpectrumCurve> {
        curve_from_points(&self.curve)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExactConfig {
    pub command: RunKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input: Option<String>,
    pub sigma_min: u32,
    pub include_empty_set: bool,
    pub exact_cap: u64,
}

impl ExactConfig {
    pub fn new(sigma_min: u32) -> Self {
        Self {
            command: RunKind::Exact,
            input: None,
            sigma_min,
            include_empty_set: true,
            exact_cap: DEFAULT_EXACT_CAP,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HistogramBin {
    pub support: u32,
    pub count: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExactReport {
    pub config: ExactConfig,
    pub dataset: DatasetSummary,
    pub curve: Vec<CurvePoint>,
    pub histogram: Vec<HistogramBin>,
    pub runtime_ms: f64,
}

impl ExactReport {
    pub fn new(exact: &ExactSpectrum, config: ExactConfig, db: &TransactionDatabase, runtime_ms: f64) -> Self {
        Self {
            config,
            dataset: DatasetSummary {
                rows: db.n_rows(),
                attrs: db.n_attrs(),
            },
            curve: exact
                .counts()
                .into_iter()
                .map(|(s, c)| CurvePoint {
                    sigma: f64::from(s),
                    value: c as f64,
                })
                .collect(),
            histogram: exact
                .histogram
                .iter()
                .map(|(&support, &count)| HistogramBin { support, count })
                .collect(),
            runtime_ms,
        }
    }
}

pub fn curve_points(curve: &SpectrumCurve) -> Vec<CurvePoint> {
    curve
        .iter()
        .map(|(sigma, value)| CurvePoint { sigma, value })
        .collect()
}

pub fn curve_from_points(points: &[CurvePoint]) -> Result<SpectrumCurve> {
    SpectrumCurve::new(
        points.iter().map(|p| p.sigma).collect(),
        points.iter().map(|p| p.value).collect(),
    )
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)?)
}

/// Drops the fields that describe how a run was executed rather than what it
/// computed (`runtime_ms`, `config.input`, `config.threads`) and re-emits the
/// document compactly with sorted keys. Two runs with equal canonical JSON
/// computed the same thing.
pub fn canonical_json(json: &str) -> Result<String> {
    let mut value: serde_json::Value = serde_json::from_str(json)?;
    if let Some(obj) = value.as_object_mut() {
        obj.remove("runtime_ms");
        if let Some(cfg) = obj.get_mut("config").and_then(|c| c.as_object_mut()) {
            cfg.remove("input");
            cfg.remove("threads");
        }
    }
    Ok(serde_json::to_string(&value)?)
}

pub fn estimate_csv(result: &SpectrumResult) -> String {
    let mut out = String::new();
    out.push_str(CSV_HEADER);
    out.push('\n');
    for p in &result.points {
        let _ = writeln!(out, "point,{},{}", p.sigma, p.estimate);
    }
    for (s, v) in result.curve.iter() {
        let _ = writeln!(out, "curve,{s},{v}");
    }
    out
}

/// `curve` rows for every threshold, then `histogram` rows whose second
/// column is a support value and third the number of itemsets with exactly
/// that support.
pub fn exact_csv(exact: &ExactSpectrum) -> String {
    let mut out = String::new();
    out.push_str(CSV_HEADER);
    out.push('\n');
    for (s, c) in exact.counts() {
        let _ = writeln!(out, "curve,{s},{c}");
    }
    for (s, c) in &exact.histogram {
        let _ = writeln!(out, "histogram,{s},{c}");
    }
    out
}

pub fn comparison_csv(report: &ComparisonReport) -> String {
    let mut out = String::from("sigma,left,right,log10_error\n");
    for r in &report.rows {
        let _ = writeln!(out, "{},{},{},{}", r.sigma, r.left, r.right, r.log10_error);
    }
    out
}

/// Reads the `curve` rows of a result file, CSV or JSON. `source` names the
/// file in error messages.
pub fn read_curve(text: &str, source: &str) -> Result<SpectrumCurve> {
    let format_err = |message: String| Error::Format {
        what: source.to_string(),
        message,
    };
    if text.trim_start().starts_with('{') {
        #[derive(Deserialize)]
        struct WithCurve {
            curve: Vec<CurvePoint>,
        }
        let doc: WithCurve = serde_json::from_str(text).map_err(|e| {
            format_err(format!("line {}: {e}", e.line()))
        })?;
        return curve_from_points(&doc.curve).map_err(|e| format_err(e.to_string()));
    }

    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == CSV_HEADER => {}
        _ => return Err(format_err(format!("line 1: expected header {CSV_HEADER:?}"))),
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (i, line) in lines {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 3 {
            return Err(format_err(format!("line {}: expected 3 fields", i + 1)));
        }
        if fields[0] != "curve" {
            continue;
        }
        let parse = |s: &str| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| format_err(format!("line {}: bad number {s:?}", i + 1)))
        };
        xs.push(parse(fields[1])?);
        ys.push(parse(fields[2])?);
    }
    if xs.is_empty() {
        return Err(format_err("no curve rows".into()));
    }
    SpectrumCurve::new(xs, ys).map_err(|e| format_err(e.to_string()))
}

/// Reads `point` rows of an estimate CSV.
pub fn read_points_csv(text: &str) -> Result<Vec<EstimatePoint>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate().skip(1) {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.first() != Some(&"point") {
            continue;
        }
        let bad = || Error::Format {
            what: "estimate csv".into(),
            message: format!("line {}: malformed point row", i + 1),
        };
        if fields.len() != 3 {
            return Err(bad());
        }
        out.push(EstimatePoint {
            sigma: fields[1].parse().map_err(|_| bad())?,
            estimate: fields[2].parse().map_err(|_| bad())?,
        });
    }
    Ok(out)
}

//! Message-passing front door for embedding hosts (a browser worker, a
//! plugin, a test harness).
//!
//! A host sends one JSON [`BridgeRequest`] carrying the FIMI text inline and
//! receives a sequence of JSON [`BridgeMessage`]s: zero or more `progress`
//! ticks, then exactly one `result` or `error`. Result payloads use the same
//! schema as the command line's JSON output. Sampling runs in slices of
//! `progress_every` paths; because every path draws from its own
//! index-derived stream, slicing does not change any number.

use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::dataset::{parse_fimi_str, randomize_marginals, TransactionDatabase};
use crate::error::Error;
use crate::registry::Registry;
use crate::report::{EstimateReport, ExactConfig, ExactReport, QueryOptions, RunKind};
use crate::spectrum::{
    exact_spectrum, fit_points, sample_points, SpectrumQuery, SpectrumResult, DEFAULT_EXACT_CAP,
};

pub const DEFAULT_PROGRESS_EVERY: usize = 100;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BridgeRequest {
    /// Echoed on every message so hosts can match replies to requests.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    #[serde(default = "default_command")]
    pub command: RunKind,
    /// Dataset as FIMI text.
    pub fimi: String,
    #[serde(default)]
    pub sigma_min: Option<u32>,
    #[serde(default)]
    pub sigma_max: Option<u32>,
    #[serde(default)]
    pub paths: Option<usize>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub include_empty_set: Option<bool>,
    #[serde(default)]
    pub estimator: Option<String>,
    #[serde(default)]
    pub fit: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exact_cap: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub progress_every: Option<usize>,
}

fn default_command() -> RunKind {
    RunKind::Estimate
}

impl BridgeRequest {
    pub fn options(&self) -> QueryOptions {
        QueryOptions {
            sigma_min: self.sigma_min,
            sigma_max: self.sigma_max,
            paths: self.paths,
            seed: self.seed,
            include_empty_set: self.include_empty_set,
            estimator: self.estimator.clone(),
            fit: self.fit.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum BridgeMessage {
    Progress {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        id: Option<String>,
        completed: usize,
        total: usize,
    },
    Result {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        id: Option<String>,
        report: serde_json::Value,
    },
    Error {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        id: Option<String>,
        kind: String,
        message: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        line: Option<usize>,
    },
}

impl BridgeMessage {
    fn from_error(id: Option<String>, err: &Error) -> Self {
        let (kind, line) = match err {
            Error::Parse { line, .. } => ("parse", Some(*line)),
            Error::EmptyDataset => ("parse", None),
            Error::CapExceeded { .. } => ("cap_exceeded", None),
            Error::Cancelled => ("cancelled", None),
            Error::Io(_) => ("internal", None),
            _ => ("invalid_request", None),
        };
        BridgeMessage::Error {
            id,
            kind: kind.to_string(),
            message: err.to_string(),
            line,
        }
    }
}

/// Handles one request at a time. Create one instance per concurrent job.
pub struct Bridge {
    registry: Registry,
    cancel: Arc<AtomicBool>,
}

impl Default for Bridge {
    fn default() -> Self {
        Self::new(Registry::builtin())
    }
}

impl Bridge {
    pub fn new(registry: Registry) -> Self {
        Self {
            registry,
            cancel: Arc::new(AtomicBool::new(false)),
        }
    }

    /// Setting the returned flag stops a running request at its next slice
    /// boundary; the request then ends with a `cancelled` error.
    pub fn cancel_handle(&self) -> Arc<AtomicBool> {
        Arc::clone(&self.cancel)
    }

    /// Parses a JSON request and answers with JSON messages.
    pub fn handle_json(&self, request: &str, mut emit: impl FnMut(String)) {
        let mut send = |m: BridgeMessage| {
            emit(serde_json::to_string(&m).expect("bridge messages serialize"));
        };
        match serde_json::from_str::<BridgeRequest>(request) {
            Ok(req) => self.handle(&req, &mut send),
            Err(e) => send(BridgeMessage::Error {
                id: None,
                kind: "invalid_request".into(),
                message: e.to_string(),
                line: None,
            }),
        }
    }

    pub fn handle(&self, request: &BridgeRequest, emit: &mut dyn FnMut(BridgeMessage)) {
        self.cancel.store(false, Ordering::SeqCst);
        let id = request.id.clone();
        let db = match parse_fimi_str(&request.fimi) {
            Ok(db) => db,
            Err(e) => return emit(BridgeMessage::from_error(id, &e)),
        };
        let outcome = match request.command {
            RunKind::Exact => self.run_exact(request, &db),
            kind => self.run_sampling(request, &db, kind, emit),
        };
        match outcome {
            Ok(report) => emit(BridgeMessage::Result { id, report }),
            Err(e) => emit(BridgeMessage::from_error(id, &e)),
        }
    }

    fn run_exact(&self, request: &BridgeRequest, db: &TransactionDatabase) -> crate::Result<serde_json::Value> {
        let start = Instant::now();
        let config = ExactConfig {
            command: RunKind::Exact,
            input: None,
            sigma_min: request.sigma_min.unwrap_or(1),
            include_empty_set: request.include_empty_set.unwrap_or(true),
            exact_cap: request.exact_cap.unwrap_or(DEFAULT_EXACT_CAP),
        };
        let exact = exact_spectrum(db, config.sigma_min, config.exact_cap, config.include_empty_set)?;
        let report = ExactReport::new(&exact, config, db, start.elapsed().as_secs_f64() * 1e3);
        Ok(serde_json::to_value(report)?)
    }

    fn run_sampling(
        &self,
        request: &BridgeRequest,
        db: &TransactionDatabase,
        kind: RunKind,
        emit: &mut dyn FnMut(BridgeMessage),
    ) -> crate::Result<serde_json::Value> {
        let start = Instant::now();
        let query: SpectrumQuery = request.options().resolve(db);
        query.validate(db.n_rows())?;
        let randomized;
        let data = if kind == RunKind::Baseline {
            randomized = randomize_marginals(db, query.seed);
            &randomized
        } else {
            db
        };

        let slice = request.progress_every.unwrap_or(DEFAULT_PROGRESS_EVERY).max(1);
        let total = query.paths;
        let mut points = Vec::with_capacity(total);
        let mut next = 1usize;
        while next <= total {
            if self.cancel.load(Ordering::SeqCst) {
                return Err(Error::Cancelled);
            }
            let last = (next + slice - 1).min(total);
            points.extend(sample_points(data, &query, &self.registry, next as u64..=last as u64)?);
            emit(BridgeMessage::Progress {
                id: request.id.clone(),
                completed: last,
                total,
            });
            next = last + 1;
        }
        let curve = fit_points(&points, &query, &self.registry)?;
        let result = SpectrumResult {
            query,
            points,
            curve,
            n_rows: data.n_rows(),
            n_attrs: data.n_attrs(),
            elapsed: start.elapsed(),
        };
        Ok(serde_json::to_value(EstimateReport::new(&result, kind, None, None))?)
    }
}

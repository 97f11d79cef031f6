//! Spectrum estimation and exact counting.
//!
//! [`estimate_spectrum`] samples one path per index `k = 1..=n_paths`, each
//! with its own threshold drawn uniformly from `[sigma_min, sigma_max]`, and
//! fits a non-increasing curve through the resulting `(sigma, estimate)`
//! points. [`exact_spectrum`] enumerates all frequent itemsets depth-first
//! and serves as the reference on datasets where that is still feasible.

use std::collections::BTreeMap;
use std::ops::RangeInclusive;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bitvec::BitVector;
use crate::dataset::TransactionDatabase;
use crate::error::{Error, Result};
use crate::isotonic::{merge_ties, SpectrumCurve};
use crate::registry::{Registry, DEFAULT_ESTIMATOR, DEFAULT_FIT};
use crate::rng::derive_path_rng;
use crate::sampler::PathSampler;

pub const DEFAULT_PATHS: usize = 5000;
pub const DEFAULT_SIGMA_CAP: u32 = 1000;
pub const DEFAULT_EXACT_CAP: u64 = 50_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpectrumQuery {
    pub sigma_min: u32,
    pub sigma_max: u32,
    pub paths: usize,
    pub seed: u64,
    pub include_empty_set: bool,
    pub estimator: String,
    pub fit: String,
}

impl SpectrumQuery {
    pub fn new(sigma_min: u32, sigma_max: u32, paths: usize, seed: u64) -> Self {
        Self {
            sigma_min,
            sigma_max,
            paths,
            seed,
            include_empty_set: true,
            estimator: DEFAULT_ESTIMATOR.to_string(),
            fit: DEFAULT_FIT.to_string(),
        }
    }

    /// `sigma` in `[1, min(1000, n_rows)]`, 5000 paths.
    pub fn defaults_for(db: &TransactionDatabase, seed: u64) -> Self {
        let n_rows = u32::try_from(db.n_rows()).unwrap_or(u32::MAX);
        Self::new(1, DEFAULT_SIGMA_CAP.min(n_rows), DEFAULT_PATHS, seed)
    }

    pub fn validate(&self, n_rows: usize) -> Result<()> {
        if self.paths == 0 {
            return Err(Error::InvalidQuery("number of paths must be at least 1".into()));
        }
        if self.sigma_min < 1 {
            return Err(Error::InvalidQuery("sigma_min must be at least 1".into()));
        }
        if self.sigma_min > self.sigma_max {
            return Err(Error::InvalidQuery(format!(
                "sigma_min {} exceeds sigma_max {}",
                self.sigma_min, self.sigma_max
            )));
        }
        if self.sigma_max as usize > n_rows {
            return Err(Error::SigmaAboveRows {
                sigma_max: self.sigma_max,
                n_rows: n_rows as u32,
            });
        }
        Ok(())
    }
}

/// One `(sigma_k, e_k)` pair.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimatePoint {
    pub sigma: u32,
    pub estimate: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumResult {
    pub query: SpectrumQuery,
    /// In path-index order.
    pub points: Vec<EstimatePoint>,
    pub curve: SpectrumCurve,
    pub n_rows: usize,
    pub n_attrs: usize,
    pub elapsed: Duration,
}

/// Samples the points for path indices `indices` (1-based). Runs in the
/// current rayon pool; the output depends only on the inputs and indices.
pub fn sample_points(
    db: &TransactionDatabase,
    query: &SpectrumQuery,
    registry: &Registry,
    indices: RangeInclusive<u64>,
) -> Result<Vec<EstimatePoint>> {
    query.validate(db.n_rows())?;
    let estimator = registry.estimator(&query.estimator)?;
    let (lo, hi) = (query.sigma_min, query.sigma_max);
    indices
        .into_par_iter()
        .map_init(
            || PathSampler::new(db),
            |sampler, k| {
                let mut rng = derive_path_rng(query.seed, k);
                let sigma = rng.between(lo, hi);
                let path = sampler.sample(sigma, &mut rng)?;
                let mut estimate = estimator.estimate(&path.branching);
                if !query.include_empty_set {
                    estimate = (estimate - 1.0).max(0.0);
                }
                Ok(EstimatePoint { sigma, estimate })
            },
        )
        .collect()
}

/// Merges tied thresholds and fits the configured curve.
pub fn fit_points(
    points: &[EstimatePoint],
    query: &SpectrumQuery,
    registry: &Registry,
) -> Result<SpectrumCurve> {
    let fit = registry.fit(&query.fit)?;
    let raw: Vec<(f64, f64)> = points
        .iter()
        .map(|p| (f64::from(p.sigma), p.estimate))
        .collect();
    fit.fit(&merge_ties(&raw))
}

pub fn estimate_spectrum(db: &TransactionDatabase, query: &SpectrumQuery) -> Result<SpectrumResult> {
    estimate_spectrum_with(db, query, &Registry::builtin())
}

pub fn estimate_spectrum_with(
    db: &TransactionDatabase,
    query: &SpectrumQuery,
    registry: &Registry,
) -> Result<SpectrumResult> {
    let start = Instant::now();
    let points = sample_points(db, query, registry, 1..=query.paths as u64)?;
    let curve = fit_points(&points, query, registry)?;
    Ok(SpectrumResult {
        query: query.clone(),
        points,
        curve,
        n_rows: db.n_rows(),
        n_attrs: db.n_attrs(),
        elapsed: start.elapsed(),
    })
}

/// Read access to a spectrum as a function of the threshold.
pub trait Spectrum {
    fn value_at(&self, sigma: f64) -> f64;
    /// Thresholds over which the spectrum is known.
    fn domain(&self) -> (f64, f64);
}

impl Spectrum for SpectrumCurve {
    fn value_at(&self, sigma: f64) -> f64 {
        self.evaluate(sigma)
    }

    fn domain(&self) -> (f64, f64) {
        let b = self.breakpoints();
        (b[0], b[b.len() - 1])
    }
}

/// Exact frequent-itemset counts for every threshold in
/// `[sigma_min, n_rows]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactSpectrum {
    pub sigma_min: u32,
    pub n_rows: u32,
    pub include_empty_set: bool,
    /// support value -> number of itemsets with exactly that support
    pub histogram: BTreeMap<u32, u64>,
}

impl ExactSpectrum {
    /// Number of itemsets with support >= `sigma`. `None` below `sigma_min`,
    /// where the enumeration did not look.
    pub fn count(&self, sigma: u32) -> Option<u64> {
        if sigma < self.sigma_min {
            return None;
        }
        Some(self.histogram.range(sigma..).map(|(_, c)| c).sum())
    }

    /// Total number of itemsets enumerated.
    pub fn total(&self) -> u64 {
        self.histogram.values().sum()
    }

    /// `(sigma, count)` for every integer sigma in `[sigma_min, n_rows]`.
    pub fn counts(&self) -> Vec<(u32, u64)> {
        let mut out = Vec::new();
        let mut running = 0u64;
        let mut hist = self.histogram.iter().rev().peekable();
        for sigma in (self.sigma_min..=self.n_rows).rev() {
            while let Some((_, c)) = hist.next_if(|(s, _)| **s >= sigma) {
                running += c;
            }
            out.push((sigma, running));
        }
        out.reverse();
        out
    }

    pub fn to_curve(&self) -> SpectrumCurve {
        let (xs, ys) = self
            .counts()
            .into_iter()
            .map(|(s, c)| (f64::from(s), c as f64))
            .unzip();
        // counts are suffix sums, so they are non-increasing by construction
        SpectrumCurve::new(xs, ys).expect("exact counts form a valid curve")
    }
}

impl Spectrum for ExactSpectrum {
    /// Support is an integer, so `support >= sigma` iff `support >= ceil(sigma)`.
    /// Thresholds below `sigma_min` are clamped to it.
    fn value_at(&self, sigma: f64) -> f64 {
        let s = sigma.ceil().max(f64::from(self.sigma_min));
        if s > f64::from(self.n_rows) {
            return 0.0;
        }
        self.count(s as u32).unwrap_or(0) as f64
    }

    fn domain(&self) -> (f64, f64) {
        (f64::from(self.sigma_min), f64::from(self.n_rows))
    }
}

/// Depth-first enumeration of every itemset with support >= `sigma_min`.
/// Fails with [`Error::CapExceeded`] as soon as more than `max_count`
/// itemsets (counting the empty set when included) have been found.
pub fn exact_spectrum(
    db: &TransactionDatabase,
    sigma_min: u32,
    max_count: u64,
    include_empty_set: bool,
) -> Result<ExactSpectrum> {
    let n_rows = db.n_rows();
    if sigma_min < 1 || sigma_min as usize > n_rows {
        return Err(Error::ThresholdOutOfRange {
            sigma: sigma_min,
            n_rows: n_rows as u32,
        });
    }
    let mut hist = BTreeMap::new();
    let mut found = 0u64;
    if include_empty_set {
        *hist.entry(n_rows as u32).or_insert(0) += 1;
        found += 1;
    }

    // frequent single items with their tidsets, in ascending column order
    let roots: Vec<(usize, BitVector)> = db
        .columns()
        .iter()
        .enumerate()
        .filter(|(_, c)| c.count_ones() >= sigma_min as usize)
        .map(|(i, c)| (i, c.clone()))
        .collect();

    let mut enumerator = Enumerator {
        sigma: sigma_min as usize,
        cap: max_count,
        found,
        hist,
    };
    enumerator.extend(&roots)?;
    if enumerator.found > max_count {
        return Err(Error::CapExceeded { cap: max_count });
    }
    Ok(ExactSpectrum {
        sigma_min,
        n_rows: n_rows as u32,
        include_empty_set,
        histogram: enumerator.hist,
    })
}

struct Enumerator {
    sigma: usize,
    cap: u64,
    found: u64,
    hist: BTreeMap<u32, u64>,
}

impl Enumerator {
    /// `class` holds the frequent one-item extensions of some prefix, with
    /// the tidset of prefix+item. Each member is recorded, then extended by
    /// the members after it.
    fn extend(&mut self, class: &[(usize, BitVector)]) -> Result<()> {
        for (i, (_, tids)) in class.iter().enumerate() {
            let support = tids.count_ones();
            *self.hist.entry(support as u32).or_insert(0) += 1;
            self.found += 1;
            if self.found > self.cap {
                return Err(Error::CapExceeded { cap: self.cap });
            }
            let child: Vec<(usize, BitVector)> = class[i + 1..]
                .iter()
                .filter_map(|(attr, other)| {
                    (tids.and_count(other) >= self.sigma).then(|| (*attr, tids.and(other)))
                })
                .collect();
            if !child.is_empty() {
                self.extend(&child)?;
            }
        }
        Ok(())
    }
}

/// Per-threshold comparison of two spectra on a log10 scale.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub sigma: f64,
    pub left: f64,
    pub right: f64,
    /// `|log10(max(left, 1)) - log10(max(right, 1))|`
    pub log10_error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub rows: Vec<ComparisonRow>,
}

impl ComparisonReport {
    pub fn median(&self) -> Option<f64> {
        let mut errs: Vec<f64> = self.rows.iter().map(|r| r.log10_error).collect();
        if errs.is_empty() {
            return None;
        }
        errs.sort_by(f64::total_cmp);
        let n = errs.len();
        Some(if n % 2 == 1 {
            errs[n / 2]
        } else {
            (errs[n / 2 - 1] + errs[n / 2]) / 2.0
        })
    }

    pub fn max(&self) -> Option<f64> {
        self.rows.iter().map(|r| r.log10_error).max_by(f64::total_cmp)
    }
}

pub fn log10_error(left: f64, right: f64) -> f64 {
    (left.max(1.0).log10() - right.max(1.0).log10()).abs()
}

pub fn compare_spectra(left: &dyn Spectrum, right: &dyn Spectrum, sigma_grid: &[f64]) -> ComparisonReport {
    let rows = sigma_grid
        .iter()
        .map(|&sigma| {
            let (l, r) = (left.value_at(sigma), right.value_at(sigma));
            ComparisonRow {
                sigma,
                left: l,
                right: r,
                log10_error: log10_error(l, r),
            }
        })
        .collect();
    ComparisonReport { rows }
}

/// Intersection of the two domains, or `None` when they do not overlap.
pub fn overlap(left: &dyn Spectrum, right: &dyn Spectrum) -> Option<(f64, f64)> {
    let (a0, a1) = left.domain();
    let (b0, b1) = right.domain();
    let (lo, hi) = (a0.max(b0), a1.min(b1));
    (lo <= hi).then_some((lo, hi))
}

/// Up to `n` integer thresholds spread evenly over `[lo, hi]`, both ends
/// included, without duplicates.
pub fn sigma_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (lo, hi) = (lo.ceil(), hi.floor());
    if n == 0 || lo > hi {
        return Vec::new();
    }
    if n == 1 || lo == hi {
        return vec![lo];
    }
    let mut grid: Vec<f64> = (0..n)
        .map(|i| (lo + (hi - lo) * i as f64 / (n - 1) as f64).round())
        .collect();
    grid.dedup();
    grid
}

//! Random root-to-border paths through the itemset lattice.
//!
//! A path starts at the empty itemset and repeatedly adds one item chosen
//! uniformly among the extensions that keep support at or above `sigma`.
//! It stops at a maximal frequent itemset. The sequence of extension counts
//! along the way is the branching sequence `d`.

use crate::bitvec::BitVector;
use crate::dataset::TransactionDatabase;
use crate::error::{Error, Result};
use crate::rng::PathRng;

/// One sampled path.
#[derive(Clone, Debug, PartialEq)]
pub struct PathSample {
    pub sigma: u32,
    /// Number of frequent extensions seen at each step; every entry is >= 1.
    pub branching: Vec<u32>,
    /// Dense column index added at each step.
    pub items: Vec<usize>,
    /// Lattice path estimate of `branching`.
    pub estimate: f64,
}

impl PathSample {
    pub fn depth(&self) -> usize {
        self.branching.len()
    }
}

/// Turns a branching sequence into a size estimate.
pub trait PathEstimator: Send + Sync {
    fn name(&self) -> &'static str;
    fn estimate(&self, branching: &[u32]) -> f64;
}

/// Knuth's estimator for trees: `1 + sum_j prod_{i<j} d_i`.
#[derive(Clone, Copy, Debug, Default)]
pub struct TreeEstimator;

/// Tree estimator with the `1/j!` correction for level `j` of the subset
/// lattice, where each node is reachable through `j!` orderings.
#[derive(Clone, Copy, Debug, Default)]
pub struct LatticeEstimator;

impl PathEstimator for TreeEstimator {
    fn name(&self) -> &'static str {
        "tree"
    }

    fn estimate(&self, branching: &[u32]) -> f64 {
        path_estimate_tree(branching)
    }
}

impl PathEstimator for LatticeEstimator {
    fn name(&self) -> &'static str {
        "lattice"
    }

    fn estimate(&self, branching: &[u32]) -> f64 {
        path_estimate_lattice(branching)
    }
}

pub fn path_estimate_tree(branching: &[u32]) -> f64 {
    let mut total = 1.0;
    let mut level = 1.0;
    for &d in branching {
        level *= f64::from(d);
        total += level;
    }
    total
}

pub fn path_estimate_lattice(branching: &[u32]) -> f64 {
    let mut total = 1.0;
    // level j term is prod_{i<j} d_i / j!, built up one factor at a time so
    // neither the product nor the factorial overflows on deep paths
    let mut level = 1.0;
    for (j, &d) in branching.iter().enumerate() {
        level *= f64::from(d) / (j + 1) as f64;
        total += level;
    }
    total
}

/// Reusable per-worker state for sampling many paths on one database.
pub struct PathSampler<'a> {
    db: &'a TransactionDatabase,
    mask: BitVector,
    candidates: Vec<usize>,
    frequent: Vec<usize>,
}

impl<'a> PathSampler<'a> {
    pub fn new(db: &'a TransactionDatabase) -> Self {
        Self {
            db,
            mask: BitVector::ones(db.n_rows()),
            candidates: Vec::with_capacity(db.n_attrs()),
            frequent: Vec::with_capacity(db.n_attrs()),
        }
    }

    pub fn sample(&mut self, sigma: u32, rng: &mut PathRng) -> Result<PathSample> {
        let n_rows = self.db.n_rows();
        if sigma < 1 || sigma as usize > n_rows {
            return Err(Error::ThresholdOutOfRange {
                sigma,
                n_rows: n_rows as u32,
            });
        }
        let sigma_rows = sigma as usize;
        let columns = self.db.columns();

        self.mask = BitVector::ones(n_rows);
        self.candidates.clear();
        self.candidates.extend(0..columns.len());

        let mut branching = Vec::new();
        let mut items = Vec::new();
        loop {
            self.frequent.clear();
            for &c in &self.candidates {
                if self.mask.and_count(&columns[c]) >= sigma_rows {
                    self.frequent.push(c);
                }
            }
            let d = self.frequent.len();
            if d == 0 {
                break;
            }
            let chosen = self.frequent.remove(rng.below(d));
            branching.push(d as u32);
            items.push(chosen);
            self.mask.and_assign(&columns[chosen]);
            // anything infrequent now stays infrequent under the smaller mask
            std::mem::swap(&mut self.candidates, &mut self.frequent);
        }

        let estimate = path_estimate_lattice(&branching);
        Ok(PathSample {
            sigma,
            branching,
            items,
            estimate,
        })
    }
}

/// Samples one path at threshold `sigma` (absolute row count).
pub fn sample_path(
    db: &TransactionDatabase,
    sigma: u32,
    rng: &mut PathRng,
) -> Result<PathSample> {
    PathSampler::new(db).sample(sigma, rng)
}

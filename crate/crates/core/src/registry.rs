//! Named path estimators and curve fits, selectable at run time.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::isotonic::{CurveFit, IsotonicFit, LogIsotonicFit};
use crate::sampler::{LatticeEstimator, PathEstimator, TreeEstimator};

pub const DEFAULT_ESTIMATOR: &str = "lattice";
pub const DEFAULT_FIT: &str = "isotonic";

#[derive(Clone)]
pub struct Registry {
    estimators: BTreeMap<&'static str, Arc<dyn PathEstimator>>,
    fits: BTreeMap<&'static str, Arc<dyn CurveFit>>,
}

impl Registry {
    pub fn empty() -> Self {
        Self {
            estimators: BTreeMap::new(),
            fits: BTreeMap::new(),
        }
    }

    /// `lattice` and `tree` estimators; `isotonic` and `isotonic-log` fits.
    pub fn builtin() -> Self {
        let mut r = Self::empty();
        r.register_estimator(Arc::new(LatticeEstimator));
        r.register_estimator(Arc::new(TreeEstimator));
        r.register_fit(Arc::new(IsotonicFit));
        r.register_fit(Arc::new(LogIsotonicFit));
        r
    }

    /// Registers under the estimator's own name, replacing any previous entry.
    pub fn register_estimator(&mut self, e: Arc<dyn PathEstimator>) {
        self.estimators.insert(e.name(), e);
    }

    pub fn register_fit(&mut self, f: Arc<dyn CurveFit>) {
        self.fits.insert(f.name(), f);
    }

    pub fn estimator(&self, name: &str) -> Result<Arc<dyn PathEstimator>> {
        self.estimators
            .get(name)
            .cloned()
            .ok_or_else(|| Error::UnknownStrategy {
                kind: "estimator",
                name: name.to_string(),
                available: self.estimator_names().join(", "),
            })
    }

    pub fn fit(&self, name: &str) -> Result<Arc<dyn CurveFit>> {
        self.fits
            .get(name)
            .cloned()
            .ok_or_else(|| Error::UnknownStrategy {
                kind: "fit",
                name: name.to_string(),
                available: self.fit_names().join(", "),
            })
    }

    pub fn estimator_names(&self) -> Vec<&'static str> {
        self.estimators.keys().copied().collect()
    }

    pub fn fit_names(&self) -> Vec<&'static str> {
        self.fits.keys().copied().collect()
    }
}

impl Default for Registry {
    fn default() -> Self {
        Self::builtin()
    }
}

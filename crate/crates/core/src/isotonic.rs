//! Least-squares non-increasing fits by pooling adjacent violators.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WeightedPoint {
    pub x: f64,
    pub y: f64,
    pub w: f64,
}

impl WeightedPoint {
    pub fn new(x: f64, y: f64, w: f64) -> Self {
        Self { x, y, w }
    }
}

/// A non-increasing step function. Level `levels[j]` holds on
/// `[breakpoints[j], breakpoints[j + 1])`; values left of the first
/// breakpoint take the first level and values right of the last take the
/// last.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumCurve {
    breakpoints: Vec<f64>,
    levels: Vec<f64>,
}

impl SpectrumCurve {
    /// Checks the curve invariants: equal non-zero lengths, strictly
    /// ascending breakpoints, non-increasing non-negative levels.
    pub fn new(breakpoints: Vec<f64>, levels: Vec<f64>) -> Result<Self> {
        if breakpoints.is_empty() || breakpoints.len() != levels.len() {
            return Err(Error::Isotonic(format!(
                "curve needs matching non-empty breakpoints and levels, got {} and {}",
                breakpoints.len(),
                levels.len()
            )));
        }
        if breakpoints.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::Isotonic("breakpoints must be strictly ascending".into()));
        }
        if levels.windows(2).any(|w| w[1] > w[0]) {
            return Err(Error::Isotonic("levels must be non-increasing".into()));
        }
        if levels.iter().any(|v| !(*v >= 0.0) || !v.is_finite()) {
            return Err(Error::Isotonic("levels must be finite and non-negative".into()));
        }
        Ok(Self { breakpoints, levels })
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.breakpoints.iter().copied().zip(self.levels.iter().copied())
    }

    pub fn evaluate(&self, sigma: f64) -> f64 {
        evaluate_curve(self, sigma)
    }
}

/// Right-open step evaluation, clamped at both ends.
pub fn evaluate_curve(curve: &SpectrumCurve, sigma: f64) -> f64 {
    let idx = curve.breakpoints.partition_point(|&b| b <= sigma);
    curve.levels[idx.saturating_sub(1)]
}

/// Weighted least-squares non-increasing fit of points sorted by strictly
/// ascending `x`. Returns one level per input point.
pub fn pava_decreasing(points: &[WeightedPoint]) -> Result<SpectrumCurve> {
    if points.is_empty() {
        return Err(Error::Isotonic("no points to fit".into()));
    }
    if points.windows(2).any(|w| !(w[0].x < w[1].x)) {
        return Err(Error::Isotonic(
            "points must be sorted by strictly ascending x; merge ties first".into(),
        ));
    }
    if let Some(p) = points.iter().find(|p| !(p.w > 0.0) || !p.w.is_finite() || !p.y.is_finite()) {
        return Err(Error::Isotonic(format!(
            "invalid point at x={}: weights must be positive and values finite",
            p.x
        )));
    }

    // singletons keep their own y as the mean so refitting a fit is exact
    struct Block {
        sum_wy: f64,
        sum_w: f64,
        len: usize,
        mean: f64,
    }

    let mut blocks: Vec<Block> = Vec::with_capacity(points.len());
    for p in points {
        let mut cur = Block {
            sum_wy: p.w * p.y,
            sum_w: p.w,
            len: 1,
            mean: p.y,
        };
        while let Some(prev) = blocks.last() {
            if prev.mean >= cur.mean {
                break;
            }
            let prev = blocks.pop().unwrap();
            let sum_wy = prev.sum_wy + cur.sum_wy;
            let sum_w = prev.sum_w + cur.sum_w;
            cur = Block {
                sum_wy,
                sum_w,
                len: prev.len + cur.len,
                mean: sum_wy / sum_w,
            };
        }
        blocks.push(cur);
    }

    let mut levels = Vec::with_capacity(points.len());
    for b in &blocks {
        levels.extend(std::iter::repeat(b.mean).take(b.len));
    }
    SpectrumCurve::new(points.iter().map(|p| p.x).collect(), levels)
}

/// Groups raw `(x, y)` pairs by exact `x`: each group becomes one point with
/// the mean `y` and weight equal to the group size. Output is sorted by `x`.
pub fn merge_ties(raw: &[(f64, f64)]) -> Vec<WeightedPoint> {
    let mut sorted: Vec<(f64, f64)> = raw.to_vec();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out: Vec<WeightedPoint> = Vec::new();
    let mut i = 0;
    while i < sorted.len() {
        let x = sorted[i].0;
        let mut j = i;
        let mut sum = 0.0;
        while j < sorted.len() && sorted[j].0 == x {
            sum += sorted[j].1;
            j += 1;
        }
        let n = (j - i) as f64;
        out.push(WeightedPoint::new(x, sum / n, n));
        i = j;
    }
    out
}

/// Maps a weighted point set to a fitted curve.
pub trait CurveFit: Send + Sync {
    fn name(&self) -> &'static str;
    fn fit(&self, points: &[WeightedPoint]) -> Result<SpectrumCurve>;
}

/// Least squares on the raw estimates.
#[derive(Clone, Copy, Debug, Default)]
pub struct IsotonicFit;

/// Least squares on `ln(1 + y)`, mapped back with `exp(v) - 1`. The
/// transform is monotone so the result is still non-increasing.
#[derive(Clone, Copy, Debug, Default)]
pub struct LogIsotonicFit;

impl CurveFit for IsotonicFit {
    fn name(&self) -> &'static str {
        "isotonic"
    }

    fn fit(&self, points: &[WeightedPoint]) -> Result<SpectrumCurve> {
        pava_decreasing(points)
    }
}

impl CurveFit for LogIsotonicFit {
    fn name(&self) -> &'static str {
        "isotonic-log"
    }

    fn fit(&self, points: &[WeightedPoint]) -> Result<SpectrumCurve> {
        let logged: Vec<WeightedPoint> = points
            .iter()
            .map(|p| WeightedPoint::new(p.x, p.y.ln_1p(), p.w))
            .collect();
        let fitted = pava_decreasing(&logged)?;
        let levels = fitted.levels.iter().map(|v| v.exp_m1().max(0.0)).collect();
        SpectrumCurve::new(fitted.breakpoints, levels)
    }
}

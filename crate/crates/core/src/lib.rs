//! Estimation of the pattern frequency spectrum of 0/1 datasets.
//!
//! The spectrum maps every frequency threshold `sigma` to the number of
//! itemsets with support at least `sigma`. It is estimated by sampling random
//! paths from the empty itemset to maximal frequent itemsets, turning each
//! path's branching factors into a size estimate, and fitting a
//! non-increasing isotonic curve through the per-path estimates.

pub mod bitvec;
pub mod bridge;
pub mod dataset;
pub mod error;
pub mod isotonic;
pub mod registry;
pub mod report;
pub mod rng;
pub mod sampler;
pub mod spectrum;

pub use bitvec::BitVector;
pub use dataset::{
    column_marginals, parse_fimi, parse_fimi_str, randomize_marginals, support_of_intersection,
    ColumnMarginals, TransactionDatabase,
};
pub use error::{Error, Result};
pub use isotonic::{evaluate_curve, pava_decreasing, SpectrumCurve, WeightedPoint};
pub use registry::Registry;
pub use rng::{derive_path_rng, PathRng};
pub use sampler::{path_estimate_lattice, path_estimate_tree, sample_path, PathSample};
pub use spectrum::{
    compare_spectra, estimate_spectrum, exact_spectrum, ExactSpectrum, Spectrum, SpectrumQuery,
    SpectrumResult,
};

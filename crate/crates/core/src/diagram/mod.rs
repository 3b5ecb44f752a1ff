//! Metrics and measure views on Δ': matching distance, translations and
//! binned empirical measures.

mod matching;
mod measure;

pub use matching::{d_inf, matching_distance, translate_diagram, DistanceReport};
pub use measure::{bin_measure, measure_discrepancy, total_mass, BinnedMeasure, Region};

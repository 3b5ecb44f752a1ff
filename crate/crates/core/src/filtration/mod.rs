//! Filtration functions κ and the truncated κ-filtration `K^κ(X, t_max)`.

mod complex;
mod kappa;

pub use complex::{build_filtered_complex, build_skeleton, FilteredComplex, Simplex, DEFAULT_SIMPLEX_BUDGET};
pub use kappa::{
    kappa_cech, kappa_rips, parse_kappa, shift_kappa, weighted_minimax, Cech, FiltrationFunction, Rips, Shift,
};

//! Verbose persistence diagrams for κ-filtrations on (marked) point clouds.
//!
//! The crate is organised bottom-up:
//!
//! * [`geometry`]: marked point clouds, Hausdorff distance, smallest enclosing balls.
//! * [`filtration`]: filtration functions (Rips, Čech, marked variants, shifts) and
//!   construction of truncated filtered complexes.
//! * [`homology`]: boundary-matrix reduction, verbose/concise diagrams, rank oracles
//!   and extended persistent Betti numbers.
//! * [`diagram`]: matching distance, translations and binned empirical measures.
//! * [`stochastic`]: seeded point-process samplers and limit-theorem experiments.
//! * [`io`]: CSV/JSON formats shared with the command-line tool.

pub mod diagram;
pub mod error;
pub mod filtration;
pub mod geometry;
pub mod homology;
pub mod io;
pub mod stochastic;

pub use diagram::{matching_distance, BinnedMeasure, DistanceReport};
pub use error::{Error, Result};
pub use filtration::{build_filtered_complex, FilteredComplex, FiltrationFunction};
pub use geometry::{MarkedPoint, MarkedPointCloud};
pub use homology::{verbose_diagram, DiagramPoint, Field, VerboseDiagram};

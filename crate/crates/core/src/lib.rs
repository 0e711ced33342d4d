//! Möbius geometry of extended metric spaces and of the model `Rⁿ ∪ {∞}`.
//!
//! Cross-ratio triples, Ptolemy certification, explicit Möbius maps,
//! Busemann functions and horosphere coordinates, with a harness that
//! certifies the expected identities numerically.

// `!(x > 0.0)` rejects NaN along with nonpositive values; symmetric tables
// read best with explicit indices.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod busemann;
pub mod coordinates;
pub mod cross_ratio;
pub mod error;
pub mod harness;
pub mod io;
pub mod metric;
pub mod model;
pub mod sampling;
pub mod tolerance;

pub use cross_ratio::{
    crt, crt_exact, is_ptolemy, moebius_equivalent, Arithmetic, CrossRatioTriple, Quadruple, ScanMode,
};
pub use error::{Error, Result};
pub use harness::{run_suite, Config, SuiteReport};
pub use metric::{metric_inversion, validate, ExtDistance, ExtendedMetricSpace, ValidationReport};
pub use model::{MapWord, ModelPoint, MoebiusMapNF};
pub use tolerance::Tolerance;

//! Gibbs measures of the two-state hard-core model on Cayley trees.
//!
//! The crate computes boundary laws (translation-invariant, two-periodic and
//! weakly periodic), the critical activities that organise them, and
//! extremality verdicts from reconstruction-type criteria. An exact
//! finite-ball oracle checks the analytic machinery by enumeration.
//!
//! ```
//! use hc_tree::{model::ModelParams, solvers};
//!
//! let params = ModelParams::new(2, 5.0).unwrap();
//! let report = solvers::solve_two_periodic(&params, 1e-12).unwrap();
//! assert_eq!(report.measure_count(), 3);
//! ```

// `!(x > 0.0)` is deliberate: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod extremality;
pub mod model;
pub mod numeric;
pub mod oracle;
pub mod solvers;
pub mod weakperiodic;

pub use error::{HcError, Result};
pub use model::{BoundaryLaw, LawKind, ModelParams, SolveReport, TransitionMatrix2};

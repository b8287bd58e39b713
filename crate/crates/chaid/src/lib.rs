//! CHAID decision trees for categorical data.
//!
//! The crate covers the full pipeline for modeling a categorical response:
//!
//! * [`schema`] — variable schemas, CSV ingestion, cleaning, derived binning
//! * [`stats`] — contingency tables, Pearson chi-square, upper-tail
//!   probabilities, grouping-count multiplicity multipliers
//! * [`features`] — chi-square feature ranking and threshold filtering
//! * [`tree`] — CHAID induction (category merging, adjusted split selection),
//!   prediction, DOT and structured export
//! * [`rules`] — IF-THEN rule extraction, pruning, application
//! * [`eval`] — stratified k-fold cross-validation and confusion matrices
//! * [`baseline`] — ordinal-encoded OLS comparator
//! * [`synth`] — seeded synthetic datasets with plantable effects
//!
//! See the `examples/` directory for one runnable example per capability, and
//! the `chaid` binary for the command-line workflow.

pub mod baseline;
pub mod cli;
pub mod error;
pub mod eval;
pub mod features;
pub mod rules;
pub mod schema;
pub mod stats;
pub mod synth;
pub mod tree;

pub use error::{Error, Result};
pub use schema::{Dataset, DatasetSchema, Grade, Record};
pub use tree::{ChaidParams, ChaidTree};

//! Family-aware collaborative filtering.
//!
//! The pipeline runs in this order:
//!
//! 1. [`corpus`] parses the five input tables, cleans missing values,
//!    extracts `(actor, item, quantity)` triples and one-hot/min-max
//!    profile vectors, and splits transactions on a timestamp.
//! 2. [`simcore`] turns baskets into Jaccard matrices and profiles into
//!    `1 - normalized distance` matrices (plus cosine and Pearson on
//!    explicit ratings).
//! 3. [`aggregate`] blends per-axis matrices into a hybrid matrix and lifts
//!    users to families.
//! 4. [`recommend`] ranks unseen items from the k nearest neighbours.
//! 5. [`eval`] runs the User / Hybrid User / Hybrid Family comparison and
//!    reports recall and precision for list lengths `1..=n_max`.
//!
//! [`synth`] produces family-correlated corpora in the same file format.

pub mod aggregate;
pub mod corpus;
pub mod error;
pub mod eval;
pub mod recommend;
pub mod simcore;
pub mod synth;

pub use error::{Error, ErrorKind, Result};

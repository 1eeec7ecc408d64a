//! Satake parameter classes for GL(n), their functorial lifts, a case
//! classifier for non-tempered classes, per-case trace bounds and the density
//! lower bounds they imply, plus a seeded verification harness and an
//! empirical data-audit pipeline.

// `!(x > 0.0)` style guards are used on purpose: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod class;
pub mod classifier;
pub mod error;
pub mod ingest;
pub mod lifts;
pub mod matching;
pub mod verify;

pub use class::{polar, ClassFile, PolarParam, SatakeClass, Scalar, TransformKind, MATCH_TOL};
pub use classifier::{classify, CaseLabel, ClassificationResult, Mode, Witnesses, CLASSIFY_TOL};
pub use error::{Error, Result};
pub use matching::{multiset_match, Matching};

//! Strictly frequentist imprecise probability at desk scale.
//!
//! The crate has two halves. The construction half builds symbol sequences
//! whose relative-frequency cluster points realize a prescribed closed curve
//! or polytope boundary in the probability simplex, with per-segment error
//! bounds asserted while building. The analysis half estimates upper/lower
//! previsions and probabilities, conditional previsions, irrelevance and
//! independence, selection-rule admissibility and systems of precision from
//! arbitrary finite prefixes, and evaluates credal sets by envelope suprema
//! and the generalized Bayes rule.

pub mod analysis;
pub mod credal;
pub mod error;
pub mod io;
pub mod sequence;
pub mod setsys;
pub mod simplex;

pub use analysis::{Event, Gamble, TailPolicy};
pub use credal::CredalSet;
pub use error::{
    AnalysisError, CredalError, FormatError, SequenceError, SetSystemError, SimplexError,
};
pub use sequence::{Budget, GenerationTrace, Schedules, SymbolSequence};
pub use simplex::{CurveSpec, SimplexPoint};

//! Goal-driven visualization requirements: a goal model DSL, guided
//! elicitation, data profiling, suitability scoring with skyline chart
//! selection, and dashboard specification output.

pub mod dashboard;
pub mod derivation;
pub mod elicitation;
pub mod error;
pub mod model;
pub mod pipeline;
pub mod profiler;
#[cfg(any(test, feature = "testing"))]
pub mod testing;

pub use error::{Diagnostic, DiagnosticCode, Error, Result, SourcePos};

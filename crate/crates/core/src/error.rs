use std::fmt;

use serde::{Deserialize, Serialize};

use crate::derivation::Exclusion;

/// Codes attached to model diagnostics. The set is closed: every code is
/// produced either by the DSL parser or by [`crate::model::validate_model`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum DiagnosticCode {
    #[serde(rename = "E_SYNTAX")]
    Syntax,
    #[serde(rename = "E_DUP_NAME")]
    DupName,
    #[serde(rename = "E_BAD_ENUM")]
    BadEnum,
    #[serde(rename = "E_EMPTY_TEXT")]
    EmptyText,
    #[serde(rename = "E_NO_STRATEGIC")]
    NoStrategic,
    #[serde(rename = "E_NO_DECISION")]
    NoDecision,
    #[serde(rename = "E_NO_INFO")]
    NoInfo,
    #[serde(rename = "E_INFO_NO_VIS")]
    InfoNoVis,
    #[serde(rename = "E_INFO_MULTI_VIS")]
    InfoMultiVis,
    #[serde(rename = "E_VIS_NO_GOAL")]
    VisNoGoal,
    #[serde(rename = "E_VIS_NO_INTERACTION")]
    VisNoInteraction,
    #[serde(rename = "E_VIS_NO_MEASURE")]
    VisNoMeasure,
    #[serde(rename = "E_VIS_NO_CATEGORY")]
    VisNoCategory,
    #[serde(rename = "E_DUP_BINDING")]
    DupBinding,
}

impl DiagnosticCode {
    pub const ALL: [DiagnosticCode; 14] = [
        DiagnosticCode::Syntax,
        DiagnosticCode::DupName,
        DiagnosticCode::BadEnum,
        DiagnosticCode::EmptyText,
        DiagnosticCode::NoStrategic,
        DiagnosticCode::NoDecision,
        DiagnosticCode::NoInfo,
        DiagnosticCode::InfoNoVis,
        DiagnosticCode::InfoMultiVis,
        DiagnosticCode::VisNoGoal,
        DiagnosticCode::VisNoInteraction,
        DiagnosticCode::VisNoMeasure,
        DiagnosticCode::VisNoCategory,
        DiagnosticCode::DupBinding,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            DiagnosticCode::Syntax => "E_SYNTAX",
            DiagnosticCode::DupName => "E_DUP_NAME",
            DiagnosticCode::BadEnum => "E_BAD_ENUM",
            DiagnosticCode::EmptyText => "E_EMPTY_TEXT",
            DiagnosticCode::NoStrategic => "E_NO_STRATEGIC",
            DiagnosticCode::NoDecision => "E_NO_DECISION",
            DiagnosticCode::NoInfo => "E_NO_INFO",
            DiagnosticCode::InfoNoVis => "E_INFO_NO_VIS",
            DiagnosticCode::InfoMultiVis => "E_INFO_MULTI_VIS",
            DiagnosticCode::VisNoGoal => "E_VIS_NO_GOAL",
            DiagnosticCode::VisNoInteraction => "E_VIS_NO_INTERACTION",
            DiagnosticCode::VisNoMeasure => "E_VIS_NO_MEASURE",
            DiagnosticCode::VisNoCategory => "E_VIS_NO_CATEGORY",
            DiagnosticCode::DupBinding => "E_DUP_BINDING",
        }
    }
}

impl fmt::Display for DiagnosticCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// 1-based position in DSL source text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SourcePos {
    pub line: u32,
    pub column: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub code: DiagnosticCode,
    pub message: String,
    /// Slash-separated location inside the model, e.g.
    /// `process/strategic[0]/decision[1]/information[0]/visualization[Type of unpaid bills]`.
    pub path: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pos: Option<SourcePos>,
}

impl Diagnostic {
    pub fn new(code: DiagnosticCode, path: impl Into<String>, message: impl Into<String>) -> Self {
        Diagnostic {
            code,
            message: message.into(),
            path: path.into(),
            pos: None,
        }
    }

    pub fn at(mut self, pos: SourcePos) -> Self {
        self.pos = Some(pos);
        self
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.code)?;
        if let Some(pos) = self.pos {
            write!(f, " {}:{}", pos.line, pos.column)?;
        }
        write!(f, " {}: {}", self.path, self.message)
    }
}

fn summarize(diags: &[Diagnostic]) -> String {
    diags.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("; ")
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid model: {}", summarize(.0))]
    InvalidModel(Vec<Diagnostic>),
    #[error("no visualization named {0:?}")]
    NoTarget(String),
    #[error("patched model violates invariants: {}", summarize(.0))]
    PatchInvalid(Vec<Diagnostic>),

    #[error("answer does not fit question {question:?}: {reason}")]
    BadAnswer { question: String, reason: String },
    #[error("elicitation session is already complete")]
    Done,
    #[error("elicitation session is not complete")]
    NotDone,
    #[error("invalid flowchart: {0}")]
    BadFlowchart(String),

    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("{0}: missing header row")]
    NoHeader(String),
    #[error("{source_name}: line {line} has {found} cells, header has {expected}")]
    RaggedRow {
        source_name: String,
        line: u64,
        expected: usize,
        found: usize,
    },
    #[error("{source_name}: duplicate column {column:?}")]
    DupColumn { source_name: String, column: String },
    #[error("collection {collection:?} has no column {column:?}")]
    NoColumn { collection: String, column: String },
    #[error("column {0:?} is text; an ordinal yes/no answer is required")]
    NeedOrdinalAnswer(String),
    #[error("column {0:?} has no values; its type must be set by override")]
    EmptyColumn(String),
    #[error("no dataset for collection {0:?}")]
    NoDataset(String),

    #[error("no profile for binding {collection}.{attribute}")]
    MissingProfile { collection: String, attribute: String },
    #[error("chart {0:?} is not in the suitability matrix")]
    UnknownChart(String),
    #[error("invalid suitability matrix: {0}")]
    BadMatrix(String),
    #[error("invalid weights: {0}")]
    BadWeights(String),
    #[error("no feasible chart{}: every chart has an unfit coordinate", visualization.as_deref().map(|v| format!(" for {v:?}")).unwrap_or_default())]
    NoFeasibleChart {
        visualization: Option<String>,
        excluded: Vec<Exclusion>,
    },

    #[error("chart {chart:?} cannot encode {categories} categories and {measures} measures")]
    Arity {
        chart: String,
        categories: usize,
        measures: usize,
    },
    #[error("validation outcome is missing verdicts for {0:?}")]
    IncompleteOutcome(Vec<String>),
    #[error("validation outcome is contradictory for {0:?}")]
    ConflictingOutcome(String),
    #[error("invalid configuration: {0}")]
    Config(String),
}

impl Error {
    /// Stable machine-readable code.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidModel(diags) => diags.first().map(|d| d.code.as_str()).unwrap_or("E_SYNTAX"),
            Error::NoTarget(_) => "E_NO_TARGET",
            Error::PatchInvalid(_) => "E_PATCH_INVALID",
            Error::BadAnswer { .. } => "E_BAD_ANSWER",
            Error::Done => "E_DONE",
            Error::NotDone => "E_NOT_DONE",
            Error::BadFlowchart(_) => "E_BAD_FLOWCHART",
            Error::Io { .. } => "E_IO",
            Error::NoHeader(_) => "E_NO_HEADER",
            Error::RaggedRow { .. } => "E_RAGGED_ROW",
            Error::DupColumn { .. } => "E_DUP_COLUMN",
            Error::NoColumn { .. } => "E_NO_COLUMN",
            Error::NeedOrdinalAnswer(_) => "E_NEED_ORDINAL_ANSWER",
            Error::EmptyColumn(_) => "E_EMPTY_COLUMN",
            Error::NoDataset(_) => "E_NO_DATASET",
            Error::MissingProfile { .. } => "E_MISSING_PROFILE",
            Error::UnknownChart(_) => "E_UNKNOWN_CHART",
            Error::BadMatrix(_) => "E_BAD_MATRIX",
            Error::BadWeights(_) => "E_BAD_WEIGHTS",
            Error::NoFeasibleChart { .. } => "E_NO_FEASIBLE_CHART",
            Error::Arity { .. } => "E_ARITY",
            Error::IncompleteOutcome(_) => "E_INCOMPLETE_OUTCOME",
            Error::ConflictingOutcome(_) => "E_CONFLICTING_OUTCOME",
            Error::Config(_) => "E_CONFIG",
        }
    }

    /// Model diagnostics carried by the error, if any.
    pub fn diagnostics(&self) -> &[Diagnostic] {
        match self {
            Error::InvalidModel(d) | Error::PatchInvalid(d) => d,
            _ => &[],
        }
    }

    pub(crate) fn io(path: impl fmt::Display, err: impl fmt::Display) -> Self {
        Error::Io {
            path: path.to_string(),
            message: err.to_string(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

//! Goal metamodel: actor, business process and the strategic → decision →
//! information → visualization goal hierarchy, plus its DSL, validation and
//! revision patches.

mod dsl;
mod revision;
mod validate;

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use dsl::{parse_model, serialize_model};
pub use revision::{apply_revision, RevisionPatch};
pub use validate::validate_model;

use crate::error::{Error, Result};

/// Declares a keyword enumeration whose DSL keyword equals the variant name.
/// Variant order is the canonical serialization order.
macro_rules! keyword_enum {
    ($(#[$meta:meta])* $name:ident { $($variant:ident),+ $(,)? }) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
        pub enum $name {
            $($variant),+
        }

        impl $name {
            pub const ALL: &'static [$name] = &[$($name::$variant),+];

            /// Keyword used in the DSL and in JSON documents.
            pub fn keyword(self) -> &'static str {
                match self {
                    $($name::$variant => stringify!($variant)),+
                }
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.keyword())
            }
        }
    };
}

keyword_enum!(
    /// Visualization skill of the actor.
    Skill { Lay, Tech }
);

keyword_enum!(
    /// Question class answered by a strategic goal's analysis; also the
    /// dashboard grouping key.
    AnalysisType { Prescriptive, Diagnostic, Predictive, Descriptive }
);

keyword_enum!(VisualizationGoal {
    Composition,
    Order,
    Relationship,
    Comparison,
    Cluster,
    Distribution,
    Trend,
    Geospatial,
});

keyword_enum!(InteractionType {
    Overview,
    Zoom,
    Filter,
    DetailsOnDemand
});

keyword_enum!(
    /// Explicit data-structure annotation; `Flat` means dimensionality is
    /// derived from the number of bound variables.
    Structure { Flat, Tree, Graph }
);

impl FromStr for Skill {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Skill::ALL
            .iter()
            .copied()
            .find(|v| v.keyword() == s)
            .ok_or_else(|| format!("unknown skill {s:?}"))
    }
}

impl FromStr for AnalysisType {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        AnalysisType::ALL
            .iter()
            .copied()
            .find(|v| v.keyword() == s)
            .ok_or_else(|| format!("unknown analysis type {s:?}"))
    }
}

impl FromStr for VisualizationGoal {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        VisualizationGoal::ALL
            .iter()
            .copied()
            .find(|v| v.keyword() == s)
            .ok_or_else(|| format!("unknown visualization goal {s:?}"))
    }
}

impl FromStr for Structure {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Structure::ALL
            .iter()
            .copied()
            .find(|v| v.keyword() == s)
            .ok_or_else(|| format!("unknown structure {s:?}"))
    }
}

impl InteractionType {
    /// Human label, e.g. `Details-on-demand`.
    pub fn label(self) -> &'static str {
        match self {
            InteractionType::Overview => "Overview",
            InteractionType::Zoom => "Zoom",
            InteractionType::Filter => "Filter",
            InteractionType::DetailsOnDemand => "Details-on-demand",
        }
    }
}

impl FromStr for InteractionType {
    type Err = String;
    /// Accepts both the DSL keyword and the human label.
    fn from_str(s: &str) -> Result<Self, String> {
        InteractionType::ALL
            .iter()
            .copied()
            .find(|v| v.keyword() == s || v.label() == s)
            .ok_or_else(|| format!("unknown interaction type {s:?}"))
    }
}

impl AnalysisType {
    /// The question a user picks to select this analysis type.
    pub fn question(self) -> &'static str {
        match self {
            AnalysisType::Prescriptive => "How to act?",
            AnalysisType::Diagnostic => "Why has this happened?",
            AnalysisType::Predictive => "What is going to happen?",
            AnalysisType::Descriptive => "What to do to make it happen?",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    /// Independent variable.
    Category,
    /// Dependent variable.
    Measure,
}

impl Role {
    pub fn keyword(self) -> &'static str {
        match self {
            Role::Category => "category",
            Role::Measure => "measure",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VisualizationActor {
    pub name: String,
    pub skill: Skill,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DataBinding {
    pub role: Role,
    pub attribute: String,
    pub collection: String,
}

impl DataBinding {
    pub fn category(attribute: impl Into<String>, collection: impl Into<String>) -> Self {
        DataBinding {
            role: Role::Category,
            attribute: attribute.into(),
            collection: collection.into(),
        }
    }

    pub fn measure(attribute: impl Into<String>, collection: impl Into<String>) -> Self {
        DataBinding {
            role: Role::Measure,
            attribute: attribute.into(),
            collection: collection.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VisualizationTask {
    pub name: String,
    pub goals: BTreeSet<VisualizationGoal>,
    pub interactions: BTreeSet<InteractionType>,
    pub bindings: Vec<DataBinding>,
    #[serde(default = "default_structure")]
    pub structure: Structure,
}

fn default_structure() -> Structure {
    Structure::Flat
}

impl VisualizationTask {
    pub fn categories(&self) -> impl Iterator<Item = &DataBinding> {
        self.bindings.iter().filter(|b| b.role == Role::Category)
    }

    pub fn measures(&self) -> impl Iterator<Item = &DataBinding> {
        self.bindings.iter().filter(|b| b.role == Role::Measure)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InformationGoal {
    pub statement: String,
    /// Required; `None` only in models that fail validation.
    pub visualization: Option<VisualizationTask>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecisionGoal {
    pub statement: String,
    pub information_goals: Vec<InformationGoal>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StrategicGoal {
    pub statement: String,
    pub analysis_type: AnalysisType,
    pub decision_goals: Vec<DecisionGoal>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BusinessProcess {
    pub name: String,
    pub strategic_goals: Vec<StrategicGoal>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoalModel {
    pub actor: VisualizationActor,
    pub process: BusinessProcess,
    /// Number of revision patches applied since the model was first written.
    #[serde(default)]
    pub revision: u32,
}

/// A visualization together with the goals it sits under.
#[derive(Debug, Clone, Copy)]
pub struct VisualizationEntry<'a> {
    pub strategic: &'a StrategicGoal,
    pub decision: &'a DecisionGoal,
    pub information: &'a InformationGoal,
    pub visualization: &'a VisualizationTask,
}

impl GoalModel {
    /// All visualizations in declaration order.
    pub fn visualizations(&self) -> impl Iterator<Item = VisualizationEntry<'_>> {
        self.process.strategic_goals.iter().flat_map(|strategic| {
            strategic.decision_goals.iter().flat_map(move |decision| {
                decision.information_goals.iter().filter_map(move |information| {
                    information
                        .visualization
                        .as_ref()
                        .map(|visualization| VisualizationEntry {
                            strategic,
                            decision,
                            information,
                            visualization,
                        })
                })
            })
        })
    }

    pub fn find_visualization(&self, name: &str) -> Option<VisualizationEntry<'_>> {
        self.visualizations().find(|e| e.visualization.name == name)
    }

    pub(crate) fn information_for_mut(&mut self, name: &str) -> Option<&mut InformationGoal> {
        self.process
            .strategic_goals
            .iter_mut()
            .flat_map(|s| s.decision_goals.iter_mut())
            .flat_map(|d| d.information_goals.iter_mut())
            .find(|i| i.visualization.as_ref().is_some_and(|v| v.name == name))
    }

    /// Structured-document export. Key order follows field declaration order.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("goal model serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("model document: {e}")))
    }
}

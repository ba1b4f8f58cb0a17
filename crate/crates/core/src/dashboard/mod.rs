//! Validation questionnaires, the validate-or-revise outcome, dashboard
//! grouping and the emitted dashboard document.

mod encoding;

use std::collections::{BTreeMap, BTreeSet};
use std::num::NonZeroUsize;

use serde::{Deserialize, Serialize};

pub use encoding::{bind_encodings, supported_charts, Channel, EncodingBinding};

use crate::derivation::{Recommendation, Weights};
use crate::error::{Error, Result};
use crate::model::{AnalysisType, GoalModel, InteractionType};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuestionnaireItem {
    pub visualization: String,
    pub information_goal: String,
    pub question: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Questionnaire {
    pub items: Vec<QuestionnaireItem>,
}

pub fn question_text(visualization: &str, information_goal: &str) -> String {
    format!("Does visualization {visualization} contribute to answer: {information_goal}?")
}

/// One item per visualization, in declaration order.
pub fn generate_questionnaire(model: &GoalModel) -> Questionnaire {
    let items = model
        .visualizations()
        .map(|e| QuestionnaireItem {
            visualization: e.visualization.name.clone(),
            information_goal: e.information.statement.clone(),
            question: question_text(&e.visualization.name, &e.information.statement),
        })
        .collect();
    Questionnaire { items }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    Approved,
    NeedsRevision { reason: String },
}

/// Answers to a questionnaire. Visualizations the user gave up on are
/// listed in `abandoned` instead of receiving a verdict.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ValidationOutcome {
    pub verdicts: BTreeMap<String, Verdict>,
    #[serde(default)]
    pub abandoned: BTreeSet<String>,
}

impl ValidationOutcome {
    pub fn all_approved(model: &GoalModel) -> Self {
        ValidationOutcome {
            verdicts: model
                .visualizations()
                .map(|e| (e.visualization.name.clone(), Verdict::Approved))
                .collect(),
            abandoned: BTreeSet::new(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("validation outcome: {e}")))
    }
}

/// Partition of the model's visualizations after a validation round; each
/// list follows declaration order.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ValidationResult {
    pub approved: Vec<String>,
    pub revision_needed: Vec<String>,
    pub abandoned: Vec<String>,
}

impl ValidationResult {
    pub fn approved_set(&self) -> BTreeSet<String> {
        self.approved.iter().cloned().collect()
    }
}

pub fn apply_validation(model: &GoalModel, outcome: &ValidationOutcome) -> Result<ValidationResult> {
    let names: Vec<&str> = model.visualizations().map(|e| e.visualization.name.as_str()).collect();
    for n in outcome.verdicts.keys().chain(&outcome.abandoned) {
        if !names.contains(&n.as_str()) {
            return Err(Error::NoTarget(n.clone()));
        }
    }
    let mut result = ValidationResult::default();
    let mut missing = Vec::new();
    for name in names {
        let verdict = outcome.verdicts.get(name);
        let abandoned = outcome.abandoned.contains(name);
        match (verdict, abandoned) {
            (Some(Verdict::Approved), true) => return Err(Error::ConflictingOutcome(name.to_string())),
            (_, true) => result.abandoned.push(name.to_string()),
            (Some(Verdict::Approved), false) => result.approved.push(name.to_string()),
            (Some(Verdict::NeedsRevision { .. }), false) => result.revision_needed.push(name.to_string()),
            (None, false) => missing.push(name.to_string()),
        }
    }
    if !missing.is_empty() {
        return Err(Error::IncompleteOutcome(missing));
    }
    Ok(result)
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GroupKey {
    pub strategic_goal: String,
    pub analysis_type: AnalysisType,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Layout {
    pub columns: usize,
    pub order: Vec<String>,
}

/// A dashboard before chart types are attached.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DashboardSkeleton {
    pub title: String,
    pub group: GroupKey,
    pub visualizations: Vec<String>,
    pub layout: Layout,
}

pub const DEFAULT_COLUMNS: NonZeroUsize = match NonZeroUsize::new(2) {
    Some(n) => n,
    None => unreachable!(),
};

/// One dashboard per (strategic goal, analysis type) with at least one
/// approved visualization. The grid never has more columns than panels.
pub fn group_dashboards(
    model: &GoalModel,
    approved: &BTreeSet<String>,
    columns: NonZeroUsize,
) -> Vec<DashboardSkeleton> {
    let mut out: Vec<DashboardSkeleton> = Vec::new();
    for s in &model.process.strategic_goals {
        let group = GroupKey {
            strategic_goal: s.statement.clone(),
            analysis_type: s.analysis_type,
        };
        let visualizations: Vec<String> = s
            .decision_goals
            .iter()
            .flat_map(|d| &d.information_goals)
            .filter_map(|i| i.visualization.as_ref())
            .filter(|v| approved.contains(&v.name))
            .map(|v| v.name.clone())
            .collect();
        if visualizations.is_empty() {
            continue;
        }
        match out.iter_mut().find(|d| d.group == group) {
            Some(d) => d.visualizations.extend(visualizations),
            None => out.push(DashboardSkeleton {
                title: format!("{}: {}", model.process.name, s.statement),
                group,
                visualizations,
                layout: Layout {
                    columns: 0,
                    order: vec![],
                },
            }),
        }
    }
    for d in &mut out {
        d.layout = Layout {
            columns: columns.get().min(d.visualizations.len()),
            order: d.visualizations.clone(),
        };
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DataReference {
    pub collection: String,
    pub attributes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Panel {
    pub name: String,
    pub chart_type: String,
    pub encodings: EncodingBinding,
    pub interactions: BTreeSet<InteractionType>,
    /// Bound attributes grouped by collection, in first-binding order.
    pub data: Vec<DataReference>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Provenance {
    pub model_revision: u32,
    pub matrix_version: String,
    pub weights: Weights,
    pub revision_needed: Vec<String>,
    pub abandoned: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DashboardSpec {
    pub title: String,
    pub group: GroupKey,
    pub layout: Layout,
    pub panels: Vec<Panel>,
    pub provenance: Provenance,
}

/// The emitted file: every dashboard of one model.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DashboardDocument {
    pub dashboards: Vec<DashboardSpec>,
}

impl DashboardDocument {
    /// Pretty JSON with a trailing newline; byte-stable for equal inputs.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("dashboard serializes");
        s.push('\n');
        s
    }
}

/// Attaches rank-1 charts and encodings to a skeleton.
pub fn emit_dashboard(
    skeleton: &DashboardSkeleton,
    model: &GoalModel,
    recommendations: &BTreeMap<String, Recommendation>,
    provenance: &Provenance,
) -> Result<DashboardSpec> {
    let panels = skeleton
        .visualizations
        .iter()
        .map(|name| {
            let vis = model
                .find_visualization(name)
                .ok_or_else(|| Error::NoTarget(name.clone()))?
                .visualization;
            let rec = recommendations
                .get(name)
                .filter(|r| !r.ranked.is_empty())
                .ok_or_else(|| Error::NoFeasibleChart {
                    visualization: Some(name.clone()),
                    excluded: vec![],
                })?;
            let chart = rec.best();
            let cats: Vec<&str> = vis.categories().map(|b| b.attribute.as_str()).collect();
            let meas: Vec<&str> = vis.measures().map(|b| b.attribute.as_str()).collect();
            let encodings = bind_encodings(chart, &cats, &meas)?;
            let mut data: Vec<DataReference> = Vec::new();
            for b in &vis.bindings {
                match data.iter_mut().find(|d| d.collection == b.collection) {
                    Some(d) => d.attributes.push(b.attribute.clone()),
                    None => data.push(DataReference {
                        collection: b.collection.clone(),
                        attributes: vec![b.attribute.clone()],
                    }),
                }
            }
            Ok(Panel {
                name: name.clone(),
                chart_type: chart.to_string(),
                encodings,
                interactions: vis.interactions.clone(),
                data,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DashboardSpec {
        title: skeleton.title.clone(),
        group: skeleton.group.clone(),
        layout: skeleton.layout.clone(),
        panels,
        provenance: provenance.clone(),
    })
}

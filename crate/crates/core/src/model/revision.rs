use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::{validate_model, DataBinding, GoalModel, InteractionType, VisualizationGoal};
use crate::error::{Error, Result};

/// An edit to one visualization recorded after a failed validation round.
///
/// Removals are applied before additions. Adding a binding that is already
/// present, or removing one that is absent, is a no-op.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct RevisionPatch {
    pub target: String,
    pub add_goals: BTreeSet<VisualizationGoal>,
    pub remove_goals: BTreeSet<VisualizationGoal>,
    pub add_interactions: BTreeSet<InteractionType>,
    pub remove_interactions: BTreeSet<InteractionType>,
    pub add_bindings: Vec<DataBinding>,
    pub remove_bindings: Vec<DataBinding>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub restated_information_goal: Option<String>,
}

impl RevisionPatch {
    pub fn new(target: impl Into<String>) -> Self {
        RevisionPatch {
            target: target.into(),
            ..Default::default()
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("revision patch: {e}")))
    }
}

/// Applies `patch` to a copy of `model` and bumps the revision counter.
pub fn apply_revision(model: &GoalModel, patch: &RevisionPatch) -> Result<GoalModel> {
    let mut next = model.clone();
    let info = next
        .information_for_mut(&patch.target)
        .ok_or_else(|| Error::NoTarget(patch.target.clone()))?;
    if let Some(statement) = &patch.restated_information_goal {
        info.statement = statement.clone();
    }
    let vis = info.visualization.as_mut().expect("located by visualization name");

    for g in &patch.remove_goals {
        vis.goals.remove(g);
    }
    vis.goals.extend(patch.add_goals.iter().copied());
    for i in &patch.remove_interactions {
        vis.interactions.remove(i);
    }
    vis.interactions.extend(patch.add_interactions.iter().copied());
    vis.bindings.retain(|b| !patch.remove_bindings.contains(b));
    for b in &patch.add_bindings {
        if !vis.bindings.contains(b) {
            vis.bindings.push(b.clone());
        }
    }

    next.revision += 1;
    let diags = validate_model(&next);
    if diags.is_empty() {
        Ok(next)
    } else {
        Err(Error::PatchInvalid(diags))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{parse_model, Role};

    fn model() -> GoalModel {
        parse_model(
            r#"actor "Tax collector" skill Lay
            process "Tax collection" {
              strategic "Reduce the unpaid bills" analysis Diagnostic {
                decision "Identify unpaid bills" {
                  information "Analyze the type of unpaid bills" {
                    visualization "Type of unpaid bills" {
                      goals Composition
                      interactions Overview
                      category Type from Bills
                      measure Amount from Bills
                    }
                  }
                }
              }
            }"#,
        )
        .unwrap()
    }

    fn province_patch() -> RevisionPatch {
        RevisionPatch {
            add_goals: [VisualizationGoal::Comparison].into(),
            add_bindings: vec![DataBinding::category("Province", "Location")],
            restated_information_goal: Some("Analyze the type of unpaid bills by province".into()),
            ..RevisionPatch::new("Type of unpaid bills")
        }
    }

    #[test]
    fn comparison_and_province_are_added() {
        let original = model();
        let revised = apply_revision(&original, &province_patch()).unwrap();
        let entry = revised.find_visualization("Type of unpaid bills").unwrap();
        assert_eq!(
            entry.visualization.goals,
            [VisualizationGoal::Composition, VisualizationGoal::Comparison].into()
        );
        assert!(entry
            .visualization
            .bindings
            .contains(&DataBinding::category("Province", "Location")));
        assert_eq!(
            entry.information.statement,
            "Analyze the type of unpaid bills by province"
        );
        assert_eq!(revised.revision, 1);
        // the input is untouched
        assert_eq!(original, model());
    }

    #[test]
    fn empty_patch_only_bumps_revision() {
        let m = model();
        let out = apply_revision(&m, &RevisionPatch::new("Type of unpaid bills")).unwrap();
        assert_eq!(out.revision, 1);
        assert_eq!(GoalModel { revision: 0, ..out }, m);
    }

    #[test]
    fn removing_only_measure_is_rejected() {
        let patch = RevisionPatch {
            remove_bindings: vec![DataBinding {
                role: Role::Measure,
                attribute: "Amount".into(),
                collection: "Bills".into(),
            }],
            ..RevisionPatch::new("Type of unpaid bills")
        };
        let err = apply_revision(&model(), &patch).unwrap_err();
        assert_eq!(err.code(), "E_PATCH_INVALID");
    }

    #[test]
    fn unknown_target() {
        let err = apply_revision(&model(), &RevisionPatch::new("Nope")).unwrap_err();
        assert_eq!(err.code(), "E_NO_TARGET");
    }

    #[test]
    fn patch_document_uses_defaults() {
        let p = RevisionPatch::from_json(
            r#"{"target": "Type of unpaid bills", "add_goals": ["Comparison"],
                "add_bindings": [{"role": "category", "attribute": "Province", "collection": "Location"}]}"#,
        )
        .unwrap();
        assert!(p.remove_goals.is_empty());
        assert_eq!(apply_revision(&model(), &p).unwrap().revision, 1);
    }
}

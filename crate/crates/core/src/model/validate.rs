use std::collections::{HashMap, HashSet};

use super::{GoalModel, Role, VisualizationTask};
use crate::error::{Diagnostic, DiagnosticCode};

fn non_empty(diags: &mut Vec<Diagnostic>, path: &str, what: &str, value: &str) {
    if value.trim().is_empty() {
        diags.push(Diagnostic::new(
            DiagnosticCode::EmptyText,
            path,
            format!("{what} must not be empty"),
        ));
    }
}

/// Checks every structural invariant of the metamodel. Returns an empty list
/// iff the model is well formed.
pub fn validate_model(model: &GoalModel) -> Vec<Diagnostic> {
    let mut diags = Vec::new();
    non_empty(&mut diags, "actor", "actor name", &model.actor.name);
    non_empty(&mut diags, "process", "process name", &model.process.name);
    if model.process.strategic_goals.is_empty() {
        diags.push(Diagnostic::new(
            DiagnosticCode::NoStrategic,
            "process",
            "a business process needs at least one strategic goal",
        ));
    }

    let mut names: HashMap<&str, String> = HashMap::new();
    for (si, s) in model.process.strategic_goals.iter().enumerate() {
        let sp = format!("process/strategic[{si}]");
        non_empty(&mut diags, &sp, "strategic goal", &s.statement);
        if s.decision_goals.is_empty() {
            diags.push(Diagnostic::new(
                DiagnosticCode::NoDecision,
                &sp,
                "a strategic goal needs at least one decision goal",
            ));
        }
        for (di, d) in s.decision_goals.iter().enumerate() {
            let dp = format!("{sp}/decision[{di}]");
            non_empty(&mut diags, &dp, "decision goal", &d.statement);
            if d.information_goals.is_empty() {
                diags.push(Diagnostic::new(
                    DiagnosticCode::NoInfo,
                    &dp,
                    "a decision goal needs at least one information goal",
                ));
            }
            for (ii, i) in d.information_goals.iter().enumerate() {
                let ip = format!("{dp}/information[{ii}]");
                non_empty(&mut diags, &ip, "information goal", &i.statement);
                let Some(v) = &i.visualization else {
                    diags.push(Diagnostic::new(
                        DiagnosticCode::InfoNoVis,
                        &ip,
                        "an information goal needs exactly one visualization",
                    ));
                    continue;
                };
                let vp = format!("{ip}/visualization[{}]", v.name);
                if let Some(first) = names.get(v.name.as_str()) {
                    diags.push(Diagnostic::new(
                        DiagnosticCode::DupName,
                        &vp,
                        format!("visualization name already used at {first}"),
                    ));
                } else {
                    names.insert(&v.name, vp.clone());
                }
                validate_visualization(&mut diags, &vp, v);
            }
        }
    }
    diags
}

fn validate_visualization(diags: &mut Vec<Diagnostic>, path: &str, v: &VisualizationTask) {
    non_empty(diags, path, "visualization name", &v.name);
    if v.goals.is_empty() {
        diags.push(Diagnostic::new(
            DiagnosticCode::VisNoGoal,
            path,
            "a visualization needs at least one visualization goal",
        ));
    }
    if v.interactions.is_empty() {
        diags.push(Diagnostic::new(
            DiagnosticCode::VisNoInteraction,
            path,
            "a visualization needs at least one interaction type",
        ));
    }
    if !v.bindings.iter().any(|b| b.role == Role::Measure) {
        diags.push(Diagnostic::new(
            DiagnosticCode::VisNoMeasure,
            path,
            "no measure binding",
        ));
    }
    if !v.bindings.iter().any(|b| b.role == Role::Category) {
        diags.push(Diagnostic::new(
            DiagnosticCode::VisNoCategory,
            path,
            "no category binding",
        ));
    }
    let mut seen = HashSet::new();
    for (bi, b) in v.bindings.iter().enumerate() {
        let bp = format!("{path}/binding[{bi}]");
        non_empty(diags, &bp, "attribute", &b.attribute);
        non_empty(diags, &bp, "collection", &b.collection);
        if !seen.insert((b.attribute.as_str(), b.collection.as_str())) {
            diags.push(Diagnostic::new(
                DiagnosticCode::DupBinding,
                &bp,
                format!("{}.{} is bound more than once", b.collection, b.attribute),
            ));
        }
    }
}

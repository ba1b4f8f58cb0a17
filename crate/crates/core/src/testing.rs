//! Proptest strategies for well-formed goal models.

use proptest::collection::{btree_set, vec};
use proptest::prelude::*;
use proptest::sample::select;

use crate::model::{
    AnalysisType, BusinessProcess, DataBinding, DecisionGoal, GoalModel, InformationGoal, InteractionType, Role, Skill,
    StrategicGoal, Structure, VisualizationActor, VisualizationGoal, VisualizationTask,
};

/// Non-blank text that exercises quoting: spaces, quotes, backslashes,
/// tabs, newlines and non-ASCII characters.
pub fn arb_text() -> impl Strategy<Value = String> {
    "[A-Za-z][A-Za-z0-9 _\\-\"\\\\\t\né€ß#{},]{0,16}"
}

/// Plain identifiers as well as quoted names.
pub fn arb_name() -> impl Strategy<Value = String> {
    prop_oneof!["[A-Za-z][A-Za-z0-9_]{0,8}", arb_text()]
}

fn arb_bindings() -> impl Strategy<Value = Vec<DataBinding>> {
    (
        vec((arb_name(), arb_name()), 1..3),
        vec((arb_name(), arb_name()), 1..3),
        any::<bool>(),
    )
        .prop_map(|(cats, meas, interleave)| {
            let mut out: Vec<DataBinding> = Vec::new();
            let mut c = cats.into_iter().enumerate().map(|(i, (a, col))| DataBinding {
                role: Role::Category,
                attribute: format!("{a}c{i}"),
                collection: col,
            });
            let mut m = meas.into_iter().enumerate().map(|(i, (a, col))| DataBinding {
                role: Role::Measure,
                attribute: format!("{a}m{i}"),
                collection: col,
            });
            if interleave {
                loop {
                    match (m.next(), c.next()) {
                        (None, None) => break,
                        (x, y) => out.extend(x.into_iter().chain(y)),
                    }
                }
            } else {
                out.extend(c);
                out.extend(m);
            }
            out
        })
}

fn arb_visualization() -> impl Strategy<Value = VisualizationTask> {
    (
        arb_name(),
        btree_set(select(VisualizationGoal::ALL), 1..4),
        btree_set(select(InteractionType::ALL), 1..4),
        arb_bindings(),
        select(Structure::ALL),
    )
        .prop_map(|(name, goals, interactions, bindings, structure)| VisualizationTask {
            name,
            goals,
            interactions,
            bindings,
            structure,
        })
}

fn arb_decision() -> impl Strategy<Value = DecisionGoal> {
    (
        arb_text(),
        vec((arb_text(), arb_visualization()), 1..3).prop_map(|v| {
            v.into_iter()
                .map(|(statement, vis)| InformationGoal {
                    statement,
                    visualization: Some(vis),
                })
                .collect()
        }),
    )
        .prop_map(|(statement, information_goals)| DecisionGoal {
            statement,
            information_goals,
        })
}

fn arb_strategic() -> impl Strategy<Value = StrategicGoal> {
    (arb_text(), select(AnalysisType::ALL), vec(arb_decision(), 1..3)).prop_map(
        |(statement, analysis_type, decision_goals)| StrategicGoal {
            statement,
            analysis_type,
            decision_goals,
        },
    )
}

/// A model that passes validation. Visualization names get a numeric
/// suffix to keep them unique.
pub fn arb_model() -> impl Strategy<Value = GoalModel> {
    (
        arb_name(),
        select(Skill::ALL),
        arb_name(),
        vec(arb_strategic(), 1..3),
        prop_oneof![Just(0u32), 1u32..50],
    )
        .prop_map(|(actor, skill, process, strategic_goals, revision)| {
            let mut m = GoalModel {
                actor: VisualizationActor { name: actor, skill },
                process: BusinessProcess {
                    name: process,
                    strategic_goals,
                },
                revision,
            };
            let mut n = 0;
            for s in &mut m.process.strategic_goals {
                for d in &mut s.decision_goals {
                    for i in &mut d.information_goals {
                        let v = i.visualization.as_mut().expect("generated with a visualization");
                        v.name = format!("{} {n}", v.name);
                        n += 1;
                    }
                }
            }
            m
        })
}

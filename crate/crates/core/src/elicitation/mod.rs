//! Guided questions producing the user-related requirements: analysis type,
//! visualization goals and interactions.

mod flowchart;

use std::collections::BTreeSet;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use flowchart::{Edge, FlowNode, GoalFlowchart, RESERVED_IDS};

use crate::error::{Error, Result};
use crate::model::{AnalysisType, InteractionType, VisualizationActor, VisualizationGoal};

pub const ANOTHER_GOAL_TEXT: &str = "Do you want to add another visualization goal?";
pub const ANALYSIS_TYPE_TEXT: &str = "Which question should the analysis answer?";
pub const INTERACTIONS_TEXT: &str = "Which interactions do you want to have with the visualization?";

/// Short explanation shown next to each interaction option.
pub fn interaction_gloss(i: InteractionType) -> &'static str {
    match i {
        InteractionType::Overview => "gain an overview of the entire data collection",
        InteractionType::Zoom => "focus on items of interest",
        InteractionType::Filter => "quickly focus on interesting items by eliminating unwanted items",
        InteractionType::DetailsOnDemand => "select an item and get its details",
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Phase {
    AnalysisType,
    Goals,
    Interactions,
    Done,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum QuestionKind {
    YesNo,
    SingleChoice,
    MultiChoice,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Question {
    pub id: String,
    pub text: String,
    pub kind: QuestionKind,
    pub options: Vec<String>,
    /// Per-option explanations, parallel to `options` when present.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub glosses: Vec<String>,
}

/// Serialized untagged: `true`, `"Why has this happened?"` or `["Zoom"]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Answer {
    YesNo(bool),
    Choice(String),
    Choices(Vec<String>),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "at", rename_all = "snake_case")]
enum Cursor {
    Start,
    Node { id: String },
    AnotherGoal,
    Interactions,
    Finished,
}

/// An in-progress elicitation. Immutable: [`ElicitationSession::submit_answer`]
/// returns the next session.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ElicitationSession {
    pub actor: VisualizationActor,
    pub strategic_statement: String,
    pub answers: Vec<(String, Answer)>,
    pub analysis_type: Option<AnalysisType>,
    pub goals: BTreeSet<VisualizationGoal>,
    pub interactions: BTreeSet<InteractionType>,
    cursor: Cursor,
    #[serde(skip)]
    flowchart: Arc<GoalFlowchart>,
}

/// User-related requirements of a completed session.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DerivedRequirements {
    pub analysis_type: AnalysisType,
    pub goals: BTreeSet<VisualizationGoal>,
    pub interactions: BTreeSet<InteractionType>,
}

/// Starts a session on the shipped flowchart.
pub fn start_session(actor: VisualizationActor, strategic_statement: impl Into<String>) -> ElicitationSession {
    ElicitationSession::new(actor, strategic_statement, Arc::new(GoalFlowchart::shipped()))
}

impl ElicitationSession {
    pub fn new(
        actor: VisualizationActor,
        strategic_statement: impl Into<String>,
        flowchart: Arc<GoalFlowchart>,
    ) -> Self {
        ElicitationSession {
            actor,
            strategic_statement: strategic_statement.into(),
            answers: Vec::new(),
            analysis_type: None,
            goals: BTreeSet::new(),
            interactions: BTreeSet::new(),
            cursor: Cursor::Start,
            flowchart,
        }
    }

    /// Rebuilds a session from its answer log.
    pub fn replay(
        actor: VisualizationActor,
        strategic_statement: impl Into<String>,
        flowchart: Arc<GoalFlowchart>,
        answers: &[Answer],
    ) -> Result<Self> {
        answers
            .iter()
            .try_fold(Self::new(actor, strategic_statement, flowchart), |s, a| {
                s.submit_answer(a.clone())
            })
    }

    pub fn phase(&self) -> Phase {
        match self.cursor {
            Cursor::Start => Phase::AnalysisType,
            Cursor::Node { .. } | Cursor::AnotherGoal => Phase::Goals,
            Cursor::Interactions => Phase::Interactions,
            Cursor::Finished => Phase::Done,
        }
    }

    pub fn flowchart(&self) -> &GoalFlowchart {
        &self.flowchart
    }

    /// `None` once the session is done.
    pub fn current_question(&self) -> Option<Question> {
        let q = match &self.cursor {
            Cursor::Start => Question {
                id: "analysis_type".into(),
                text: ANALYSIS_TYPE_TEXT.into(),
                kind: QuestionKind::SingleChoice,
                options: AnalysisType::ALL.iter().map(|a| a.question().to_string()).collect(),
                glosses: vec![],
            },
            Cursor::Node { id } => {
                let node = self.flowchart.node(id).expect("cursor points at a flowchart node");
                Question {
                    id: node.id.clone(),
                    text: node.text.clone(),
                    kind: QuestionKind::YesNo,
                    options: vec![],
                    glosses: vec![],
                }
            }
            Cursor::AnotherGoal => Question {
                id: "another_goal".into(),
                text: ANOTHER_GOAL_TEXT.into(),
                kind: QuestionKind::YesNo,
                options: vec![],
                glosses: vec![],
            },
            Cursor::Interactions => Question {
                id: "interactions".into(),
                text: INTERACTIONS_TEXT.into(),
                kind: QuestionKind::MultiChoice,
                options: InteractionType::ALL.iter().map(|i| i.label().to_string()).collect(),
                glosses: InteractionType::ALL
                    .iter()
                    .map(|i| interaction_gloss(*i).to_string())
                    .collect(),
            },
            Cursor::Finished => return None,
        };
        Some(q)
    }

    pub fn submit_answer(&self, answer: Answer) -> Result<Self> {
        let question = self.current_question().ok_or(Error::Done)?;
        let bad = |reason: &str| Error::BadAnswer {
            question: question.id.clone(),
            reason: reason.to_string(),
        };
        let mut next = self.clone();
        match (&self.cursor, &answer) {
            (Cursor::Start, Answer::Choice(c)) => {
                let t = AnalysisType::ALL
                    .iter()
                    .copied()
                    .find(|a| a.question() == c || a.keyword() == c)
                    .ok_or_else(|| bad(&format!("{c:?} is not one of the options")))?;
                next.analysis_type = Some(t);
                next.cursor = Cursor::Node {
                    id: self.flowchart.root().id.clone(),
                };
            }
            (Cursor::Node { id }, Answer::YesNo(yes)) => {
                let node = self.flowchart.node(id).expect("cursor points at a flowchart node");
                next.cursor = match if *yes { &node.yes } else { &node.no } {
                    Edge::Node(t) => Cursor::Node { id: t.clone() },
                    Edge::Emit(g) => {
                        next.goals.insert(*g);
                        Cursor::AnotherGoal
                    }
                    Edge::Restart => Cursor::Node {
                        id: self.flowchart.root().id.clone(),
                    },
                };
            }
            (Cursor::AnotherGoal, Answer::YesNo(yes)) => {
                next.cursor = if *yes {
                    Cursor::Node {
                        id: self.flowchart.root().id.clone(),
                    }
                } else {
                    Cursor::Interactions
                };
            }
            (Cursor::Interactions, Answer::Choices(choices)) => {
                if choices.is_empty() {
                    return Err(bad("choose at least one interaction"));
                }
                for c in choices {
                    let i = c
                        .parse::<InteractionType>()
                        .map_err(|_| bad(&format!("{c:?} is not one of the options")))?;
                    next.interactions.insert(i);
                }
                next.cursor = Cursor::Finished;
            }
            _ => return Err(bad(&format!("expected a {:?} answer", question.kind))),
        }
        next.answers.push((question.id, answer));
        Ok(next)
    }

    pub fn derived_requirements(&self) -> Result<DerivedRequirements> {
        if self.phase() != Phase::Done {
            return Err(Error::NotDone);
        }
        Ok(DerivedRequirements {
            analysis_type: self.analysis_type.expect("set before goals phase"),
            goals: self.goals.clone(),
            interactions: self.interactions.clone(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Skill;

    fn lay() -> VisualizationActor {
        VisualizationActor {
            name: "Tax collector".into(),
            skill: Skill::Lay,
        }
    }

    fn tax_answers() -> Vec<Answer> {
        vec![
            Answer::Choice("Why has this happened?".into()),
            Answer::YesNo(true),
            Answer::YesNo(false),
            Answer::Choices(vec!["Overview".into(), "Zoom".into(), "Details-on-demand".into()]),
        ]
    }

    #[test]
    fn fresh_session_asks_for_analysis_type() {
        let s = start_session(lay(), "Reduce the unpaid bills");
        assert_eq!(s.phase(), Phase::AnalysisType);
        assert!(s.answers.is_empty());
        let q = s.current_question().unwrap();
        assert_eq!(q.kind, QuestionKind::SingleChoice);
        assert_eq!(
            q.options,
            [
                "How to act?",
                "Why has this happened?",
                "What is going to happen?",
                "What to do to make it happen?"
            ]
        );
        assert_eq!(s, start_session(lay(), "Reduce the unpaid bills"));
    }

    #[test]
    fn tax_session_derives_diagnostic_geospatial() {
        let s = ElicitationSession::replay(
            lay(),
            "Reduce the unpaid bills",
            Arc::new(GoalFlowchart::shipped()),
            &tax_answers(),
        )
        .unwrap();
        let r = s.derived_requirements().unwrap();
        assert_eq!(r.analysis_type, AnalysisType::Diagnostic);
        assert_eq!(r.goals, [VisualizationGoal::Geospatial].into());
        assert_eq!(r.interactions.len(), 3);
        assert!(s.current_question().is_none());
        assert_eq!(s.submit_answer(Answer::YesNo(true)).unwrap_err().code(), "E_DONE");
    }

    #[test]
    fn interaction_question_has_glosses() {
        let s = ElicitationSession::replay(lay(), "", Arc::new(GoalFlowchart::shipped()), &tax_answers()[..3]).unwrap();
        assert_eq!(s.phase(), Phase::Interactions);
        let q = s.current_question().unwrap();
        assert_eq!(q.options[3], "Details-on-demand");
        assert_eq!(q.glosses[0], "gain an overview of the entire data collection");
        assert_eq!(s.derived_requirements().unwrap_err().code(), "E_NOT_DONE");
    }

    #[test]
    fn wrong_answer_kind_is_rejected_and_session_unchanged() {
        let s = start_session(lay(), "x");
        assert_eq!(s.submit_answer(Answer::YesNo(true)).unwrap_err().code(), "E_BAD_ANSWER");
        assert_eq!(
            s.submit_answer(Answer::Choice("Why?".into())).unwrap_err().code(),
            "E_BAD_ANSWER"
        );
        assert_eq!(s.phase(), Phase::AnalysisType);
    }

    #[test]
    fn all_no_loops_back_to_root() {
        let mut s = start_session(lay(), "x")
            .submit_answer(Answer::Choice("How to act?".into()))
            .unwrap();
        for _ in 0..8 {
            s = s.submit_answer(Answer::YesNo(false)).unwrap();
        }
        assert_eq!(s.phase(), Phase::Goals);
        assert_eq!(s.current_question().unwrap().id, "geo");
        assert!(s.goals.is_empty());
    }

    #[test]
    fn looping_collects_two_goals() {
        let answers = [
            Answer::Choice("Diagnostic".into()),
            Answer::YesNo(false),
            Answer::YesNo(false),
            Answer::YesNo(true),
            Answer::YesNo(true),
            Answer::YesNo(false),
            Answer::YesNo(false),
            Answer::YesNo(false),
            Answer::YesNo(true),
            Answer::YesNo(false),
            Answer::Choices(vec!["Overview".into()]),
        ];
        let s = ElicitationSession::replay(lay(), "x", Arc::new(GoalFlowchart::shipped()), &answers).unwrap();
        assert_eq!(
            s.derived_requirements().unwrap().goals,
            [VisualizationGoal::Composition, VisualizationGoal::Comparison].into()
        );
    }

    #[test]
    fn answer_json_is_untagged() {
        let a: Vec<Answer> = serde_json::from_str(r#"[true, "How to act?", ["Zoom"]]"#).unwrap();
        assert_eq!(a[0], Answer::YesNo(true));
        assert_eq!(a[2], Answer::Choices(vec!["Zoom".into()]));
    }
}

//! Session state machine. A session is the fold of its event log; every
//! transition is a pure function of the previous session and one event.

use std::collections::BTreeSet;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use vizreq_core::dashboard::{
    apply_validation, generate_questionnaire, DashboardDocument, Questionnaire, ValidationOutcome, ValidationResult,
};
use vizreq_core::derivation::SuitabilityMatrix;
use vizreq_core::elicitation::{Answer, DerivedRequirements, ElicitationSession, GoalFlowchart, Question};
use vizreq_core::model::{
    apply_revision, parse_model, serialize_model, validate_model, GoalModel, RevisionPatch, Skill, VisualizationActor,
};
use vizreq_core::pipeline::{
    build_dashboards, derive_visualization, missing_inputs, ColumnTypings, DataCatalog, Derivation, DeriveSettings,
    MissingInput,
};
use vizreq_core::profiler::{Dataset, TypingAnswer};

use crate::error::{core_error_body, ServiceError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum State {
    Eliciting,
    Modeling,
    Profiling,
    Derived,
    Validating,
    Revising,
    Emitted,
}

/// Fixed inputs shared by all sessions of one service.
#[derive(Debug, Clone)]
pub struct ServiceConfig {
    pub matrix: SuitabilityMatrix,
    pub flowchart: Arc<GoalFlowchart>,
    pub settings: DeriveSettings,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        ServiceConfig {
            matrix: SuitabilityMatrix::shipped_default(),
            flowchart: Arc::new(GoalFlowchart::shipped()),
            settings: DeriveSettings::default(),
        }
    }
}

/// Body of `POST /sessions/{id}/answer`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum AnswerRequest {
    /// Opens the elicitation questions.
    Begin {
        actor: String,
        skill: Skill,
        strategic: String,
    },
    Elicit {
        answer: Answer,
    },
    /// Goal model in DSL form.
    Model {
        source: String,
    },
    /// Ordinal answer or type override for `Collection.Column` or `Column`.
    Typing {
        column: String,
        value: TypingAnswer,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UploadedDataset {
    pub collection: String,
    pub csv: String,
}

/// Body of `POST /sessions/{id}/revise`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReviseRequest {
    #[serde(default)]
    pub patches: Vec<RevisionPatch>,
    /// Visualizations the user gives up on; they leave every later round.
    #[serde(default)]
    pub abandon: BTreeSet<String>,
}

/// One logged mutation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum Event {
    Created {
        id: String,
    },
    Answered {
        request: AnswerRequest,
    },
    DatasetsUploaded {
        datasets: Vec<UploadedDataset>,
        #[serde(default)]
        answers: ColumnTypings,
    },
    Validated {
        outcome: ValidationOutcome,
    },
    Revised {
        request: ReviseRequest,
    },
}

impl Event {
    fn request_name(&self) -> &'static str {
        match self {
            Event::Created { .. } => "create",
            Event::Answered { request } => match request {
                AnswerRequest::Begin { .. } => "begin",
                AnswerRequest::Elicit { .. } => "elicitation answer",
                AnswerRequest::Model { .. } => "model",
                AnswerRequest::Typing { .. } => "typing answer",
            },
            Event::DatasetsUploaded { .. } => "dataset upload",
            Event::Validated { .. } => "validation outcome",
            Event::Revised { .. } => "revision",
        }
    }
}

/// Outcome of deriving one visualization.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivationResult {
    pub visualization: String,
    pub result: Result<Derivation, vizreq_core::Error>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Session {
    pub id: String,
    pub version: u64,
    pub state: State,
    /// Every state entered, in order, including pass-through `Derived`.
    pub trail: Vec<State>,
    pub elicitation: Option<ElicitationSession>,
    pub model: Option<GoalModel>,
    pub catalog: DataCatalog,
    pub typings: ColumnTypings,
    pub derivations: Option<Vec<DerivationResult>>,
    pub last_validation: Option<ValidationResult>,
    pub abandoned: BTreeSet<String>,
    pub dashboard: Option<DashboardDocument>,
}

impl Session {
    pub fn new(id: impl Into<String>) -> Self {
        Session {
            id: id.into(),
            version: 0,
            state: State::Eliciting,
            trail: vec![State::Eliciting],
            elicitation: None,
            model: None,
            catalog: DataCatalog::new(),
            typings: ColumnTypings::default(),
            derivations: None,
            last_validation: None,
            abandoned: BTreeSet::new(),
            dashboard: None,
        }
    }

    /// Rebuilds a session from its full event log.
    pub fn replay(events: &[Event], config: &ServiceConfig) -> Result<Self, ServiceError> {
        let Some(Event::Created { id }) = events.first() else {
            return Err(ServiceError::Storage(
                "event log does not start with a creation event".into(),
            ));
        };
        events[1..]
            .iter()
            .try_fold(Session::new(id.clone()), |s, e| s.apply(e, config))
    }

    fn enter(&mut self, state: State) {
        self.state = state;
        self.trail.push(state);
    }

    fn bad_state(&self, event: &Event) -> ServiceError {
        ServiceError::BadState {
            state: self.state,
            request: event.request_name(),
        }
    }

    /// Next session after `event`, with the version bumped. `self` is
    /// never modified, so a failed request leaves the session as it was.
    pub fn apply(&self, event: &Event, config: &ServiceConfig) -> Result<Self, ServiceError> {
        let mut next = self.clone();
        match (self.state, event) {
            (
                State::Eliciting,
                Event::Answered {
                    request:
                        AnswerRequest::Begin {
                            actor,
                            skill,
                            strategic,
                        },
                },
            ) => {
                if self.elicitation.is_some() {
                    return Err(self.bad_state(event));
                }
                let actor = VisualizationActor {
                    name: actor.clone(),
                    skill: *skill,
                };
                next.elicitation = Some(ElicitationSession::new(
                    actor,
                    strategic.clone(),
                    config.flowchart.clone(),
                ));
            }
            (
                State::Eliciting,
                Event::Answered {
                    request: AnswerRequest::Elicit { answer },
                },
            ) => {
                let current = self.elicitation.as_ref().ok_or_else(|| self.bad_state(event))?;
                let advanced = current.submit_answer(answer.clone())?;
                let done = advanced.derived_requirements().is_ok();
                next.elicitation = Some(advanced);
                if done {
                    next.enter(State::Modeling);
                }
            }
            (
                State::Eliciting | State::Modeling | State::Profiling,
                Event::Answered {
                    request: AnswerRequest::Model { source },
                },
            ) => {
                let model = parse_model(source).map_err(vizreq_core::Error::InvalidModel)?;
                let diags = validate_model(&model);
                if !diags.is_empty() {
                    return Err(vizreq_core::Error::InvalidModel(diags).into());
                }
                next.model = Some(model);
                next.enter(State::Profiling);
                next.rederive(config);
            }
            (
                State::Profiling,
                Event::Answered {
                    request: AnswerRequest::Typing { column, value },
                },
            ) => {
                next.typings.set(column.clone(), *value);
                next.rederive(config);
            }
            (State::Modeling | State::Profiling, Event::DatasetsUploaded { datasets, answers }) => {
                for d in datasets {
                    let source = format!("{}.csv", d.collection);
                    next.catalog
                        .insert(Dataset::from_reader(d.csv.as_bytes(), &d.collection, &source)?);
                }
                for (k, v) in &answers.0 {
                    next.typings.set(k.clone(), *v);
                }
                if self.state == State::Profiling {
                    next.rederive(config);
                }
            }
            (State::Validating, Event::Validated { outcome }) => {
                let model = self.model.as_ref().expect("model present once derived");
                let mut outcome = outcome.clone();
                for a in &self.abandoned {
                    if !matches!(outcome.verdicts.get(a), Some(vizreq_core::dashboard::Verdict::Approved)) {
                        outcome.verdicts.remove(a);
                        outcome.abandoned.insert(a.clone());
                    }
                }
                let result = apply_validation(model, &outcome)?;
                if result.revision_needed.is_empty() {
                    let derivations: Vec<Derivation> = self
                        .derivations
                        .iter()
                        .flatten()
                        .filter_map(|d| d.result.as_ref().ok().cloned())
                        .collect();
                    let doc = build_dashboards(model, &derivations, &result, &config.matrix.version, &config.settings)?;
                    next.dashboard = Some(doc);
                    next.enter(State::Emitted);
                } else {
                    next.enter(State::Revising);
                }
                next.last_validation = Some(result);
            }
            (State::Revising, Event::Revised { request }) => {
                let mut model = self.model.clone().expect("model present once derived");
                for p in &request.patches {
                    model = apply_revision(&model, p)?;
                }
                for a in &request.abandon {
                    if model.find_visualization(a).is_none() {
                        return Err(vizreq_core::Error::NoTarget(a.clone()).into());
                    }
                }
                next.abandoned.extend(request.abandon.iter().cloned());
                next.model = Some(model);
                next.rederive(config);
            }
            _ => return Err(self.bad_state(event)),
        }
        next.version = self.version + 1;
        Ok(next)
    }

    /// Derives once every input is present: on to `Validating` when every
    /// visualization has a chart, `Revising` otherwise. Abandoned
    /// visualizations are skipped.
    fn rederive(&mut self, config: &ServiceConfig) {
        let model = self.model.as_ref().expect("model present");
        if !missing_inputs(model, &self.catalog, &self.typings).is_empty() {
            self.derivations = None;
            if self.state != State::Profiling {
                self.enter(State::Profiling);
            }
            return;
        }
        let results: Vec<DerivationResult> = model
            .visualizations()
            .filter(|e| !self.abandoned.contains(&e.visualization.name))
            .map(|e| DerivationResult {
                visualization: e.visualization.name.clone(),
                result: derive_visualization(
                    e.visualization,
                    &model.actor,
                    &self.catalog,
                    &self.typings,
                    &config.matrix,
                    &config.settings,
                ),
            })
            .collect();
        let all_ok = results.iter().all(|r| r.result.is_ok());
        self.derivations = Some(results);
        self.enter(State::Derived);
        self.enter(if all_ok { State::Validating } else { State::Revising });
    }

    pub fn missing_inputs(&self) -> Vec<MissingInput> {
        self.model
            .as_ref()
            .map(|m| missing_inputs(m, &self.catalog, &self.typings))
            .unwrap_or_default()
    }

    /// Questionnaire over the visualizations still in play. Available once
    /// every one of them has a recommendation.
    pub fn questionnaire(&self) -> Result<Questionnaire, ServiceError> {
        let ready = self
            .derivations
            .as_ref()
            .is_some_and(|d| d.iter().all(|r| r.result.is_ok()));
        let model = self
            .model
            .as_ref()
            .filter(|_| ready)
            .ok_or(ServiceError::NotReady("questionnaire"))?;
        let mut q = generate_questionnaire(model);
        q.items.retain(|i| !self.abandoned.contains(&i.visualization));
        Ok(q)
    }

    pub fn recommendation_doc(&self) -> Result<Value, ServiceError> {
        let derivations = self
            .derivations
            .as_ref()
            .ok_or(ServiceError::NotReady("recommendation"))?;
        Ok(recommendation_document(
            derivations.iter().map(|d| (d.visualization.as_str(), &d.result)),
        ))
    }

    pub fn dashboard(&self) -> Result<&DashboardDocument, ServiceError> {
        self.dashboard.as_ref().ok_or(ServiceError::NotReady("dashboard"))
    }

    pub fn view(&self) -> SessionView {
        let elicitation = self.elicitation.as_ref();
        SessionView {
            id: self.id.clone(),
            version: self.version,
            state: self.state,
            trail: self.trail.clone(),
            question: elicitation.and_then(|e| e.current_question()),
            requirements: elicitation.and_then(|e| e.derived_requirements().ok()),
            model: self.model.as_ref().map(serialize_model),
            collections: self.catalog.collections().map(String::from).collect(),
            typings: self.typings.clone(),
            missing_inputs: self.missing_inputs(),
            abandoned: self.abandoned.clone(),
            last_validation: self.last_validation.clone(),
            artifacts: Artifacts {
                questionnaire: self.questionnaire().is_ok(),
                recommendation: self.derivations.is_some(),
                dashboard: self.dashboard.is_some(),
            },
        }
    }
}

/// `{"visualizations": [...]}`, one derivation or error body per entry.
pub fn recommendation_document<'a>(
    results: impl IntoIterator<Item = (&'a str, &'a Result<Derivation, vizreq_core::Error>)>,
) -> Value {
    let items: Vec<Value> = results
        .into_iter()
        .map(|(name, r)| match r {
            Ok(ok) => serde_json::to_value(ok).expect("derivation serializes"),
            Err(e) => json!({ "visualization": name, "error": core_error_body(e) }),
        })
        .collect();
    json!({ "visualizations": items })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Artifacts {
    pub questionnaire: bool,
    pub recommendation: bool,
    pub dashboard: bool,
}

/// Body of `GET /sessions/{id}` and of every mutation response.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SessionView {
    pub id: String,
    pub version: u64,
    pub state: State,
    pub trail: Vec<State>,
    pub question: Option<Question>,
    pub requirements: Option<DerivedRequirements>,
    /// Current model in canonical DSL form.
    pub model: Option<String>,
    pub collections: Vec<String>,
    pub typings: ColumnTypings,
    pub missing_inputs: Vec<MissingInput>,
    pub abandoned: BTreeSet<String>,
    pub last_validation: Option<ValidationResult>,
    pub artifacts: Artifacts,
}

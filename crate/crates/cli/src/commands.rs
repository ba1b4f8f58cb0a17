use std::collections::BTreeSet;
use std::io::Write;
use std::path::Path;
use std::sync::Arc;

use vizreq_core::dashboard::{apply_validation, generate_questionnaire, ValidationOutcome, Verdict};
use vizreq_core::derivation::{Exclusion, Recommendation, SuitabilityMatrix};
use vizreq_core::elicitation::{Answer, ElicitationSession, GoalFlowchart};
use vizreq_core::model::{apply_revision, parse_model, validate_model, GoalModel, RevisionPatch, VisualizationActor};
use vizreq_core::pipeline::{
    build_dashboards, derive_visualization, ColumnTypings, DataCatalog, Derivation, DeriveSettings,
};
use vizreq_core::profiler::{classify_cardinality, classify_variable_type, load_dataset, profile_column};
use vizreq_core::Error;
use vizreq_service::session::recommendation_document;
use vizreq_service::{ServiceConfig, ServiceError, SessionStore};

use crate::{Command, DeriveArgs, Format, RevisionArgs};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] Error),
    #[error(transparent)]
    Service(#[from] ServiceError),
    #[error("{failed} of {total} visualizations could not be derived")]
    Partial {
        code: &'static str,
        failed: usize,
        total: usize,
    },
    #[error("visualizations need revision before emission: {}", .0.join(", "))]
    RevisionNeeded(Vec<String>),
}

impl CliError {
    pub fn code(&self) -> &'static str {
        match self {
            CliError::Core(e) => e.code(),
            CliError::Service(e) => e.code(),
            CliError::Partial { code, .. } => code,
            CliError::RevisionNeeded(_) => "E_REVISION_NEEDED",
        }
    }

    /// Error line followed by one line per model diagnostic.
    pub fn report(&self) -> String {
        let diags = match self {
            CliError::Core(e) => e.diagnostics(),
            _ => &[],
        };
        if diags.is_empty() {
            return format!("error[{}]: {self}\n", self.code());
        }
        let mut out = format!("error[{}]: {} diagnostic(s)\n", self.code(), diags.len());
        for d in diags {
            out.push_str(&format!("  {d}\n"));
        }
        out
    }
}

type Result<T, E = CliError> = std::result::Result<T, E>;

fn io_err(path: impl std::fmt::Display, e: std::io::Error) -> Error {
    Error::Io {
        path: path.to_string(),
        message: e.to_string(),
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| io_err(path.display(), e).into())
}

fn emit(out: &mut dyn Write, text: &str) -> Result<()> {
    out.write_all(text.as_bytes()).map_err(|e| io_err("<stdout>", e).into())
}

fn pretty(value: &impl serde::Serialize) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("document serializes");
    s.push('\n');
    s
}

fn load_model(path: &Path) -> Result<GoalModel> {
    let model = parse_model(&read(path)?).map_err(Error::InvalidModel)?;
    let diags = validate_model(&model);
    if !diags.is_empty() {
        return Err(Error::InvalidModel(diags).into());
    }
    Ok(model)
}

/// Model with every patch applied, plus the abandoned visualization names.
fn load_revised(path: &Path, revision: &RevisionArgs) -> Result<(GoalModel, BTreeSet<String>)> {
    let mut model = load_model(path)?;
    for p in &revision.patches {
        model = apply_revision(&model, &RevisionPatch::from_json(&read(p)?)?)?;
    }
    for a in &revision.abandon {
        if model.find_visualization(a).is_none() {
            return Err(Error::NoTarget(a.clone()).into());
        }
    }
    Ok((model, revision.abandon.iter().cloned().collect()))
}

fn load_matrix(path: Option<&Path>) -> Result<SuitabilityMatrix> {
    Ok(match path {
        Some(p) => SuitabilityMatrix::load(p)?,
        None => SuitabilityMatrix::shipped_default(),
    })
}

struct Inputs {
    catalog: DataCatalog,
    typings: ColumnTypings,
    matrix: SuitabilityMatrix,
    settings: DeriveSettings,
}

fn load_inputs(args: &DeriveArgs) -> Result<Inputs> {
    Ok(Inputs {
        catalog: DataCatalog::load_dir(&args.data)?,
        typings: match &args.answers {
            Some(p) => ColumnTypings::load(p)?,
            None => ColumnTypings::default(),
        },
        matrix: load_matrix(args.matrix.as_deref())?,
        settings: DeriveSettings {
            threshold: args.threshold,
            weights: args.weights.unwrap_or_default(),
            ..DeriveSettings::default()
        },
    })
}

fn derive_selected(
    model: &GoalModel,
    inputs: &Inputs,
    keep: impl Fn(&str) -> bool,
) -> Vec<(String, vizreq_core::Result<Derivation>)> {
    model
        .visualizations()
        .filter(|e| keep(&e.visualization.name))
        .map(|e| {
            let d = derive_visualization(
                e.visualization,
                &model.actor,
                &inputs.catalog,
                &inputs.typings,
                &inputs.matrix,
                &inputs.settings,
            );
            (e.visualization.name.clone(), d)
        })
        .collect()
}

pub fn run(command: Command, out: &mut dyn Write) -> Result<()> {
    match command {
        Command::Validate { model, format } => validate(&model, format, out),
        Command::Profile {
            csv,
            column,
            ordinal,
            threshold,
            format,
        } => {
            let collection = csv.file_stem().and_then(|s| s.to_str()).unwrap_or_default().to_string();
            let ds = load_dataset(&csv, &collection)?;
            let profile = profile_column(&ds, &column)?;
            let cardinality = classify_cardinality(&profile, threshold);
            let ty = match ordinal {
                Some(a) => a.resolve(&profile),
                None => classify_variable_type(&profile, None),
            };
            let text = match format {
                Format::Doc => pretty(&serde_json::json!({
                    "collection": collection,
                    "profile": profile,
                    "cardinality": cardinality,
                    "variable_type": ty.as_ref().ok(),
                })),
                Format::Text => {
                    let mut s = format!(
                        "column: {collection}.{}\nkind: {}\nrows: {}\ndistinct: {}\nempty: {}\nnegative values: {}\ncardinality: {} (threshold {})\n",
                        profile.name,
                        serde_json::to_value(profile.base_kind).expect("kind serializes").as_str().unwrap_or_default(),
                        profile.row_count,
                        profile.distinct_count,
                        profile.empty_count,
                        if profile.has_negative { "yes" } else { "no" },
                        cardinality.value.label(),
                        cardinality.threshold_used,
                    );
                    if let Ok(t) = &ty {
                        s.push_str(&format!("type: {}\n", t.label()));
                    }
                    if !profile.grouped_values.is_empty() {
                        s.push_str(&format!("values: {}\n", profile.grouped_values.join(", ")));
                    }
                    s
                }
            };
            emit(out, &text)?;
            ty.map(|_| ()).map_err(Into::into)
        }
        Command::Elicit {
            actor,
            skill,
            strategic,
            answers,
            format,
        } => {
            let answers: Vec<Answer> =
                serde_json::from_str(&read(&answers)?).map_err(|e| Error::Config(format!("answers file: {e}")))?;
            let mut session = ElicitationSession::new(
                VisualizationActor { name: actor, skill },
                strategic,
                Arc::new(GoalFlowchart::shipped()),
            );
            let mut transcript = String::new();
            for a in answers {
                let q = session.current_question().map(|q| q.text).unwrap_or_default();
                transcript.push_str(&format!(
                    "Q: {q}\nA: {}\n",
                    serde_json::to_string(&a).expect("answer serializes")
                ));
                session = session.submit_answer(a)?;
            }
            let req = session.derived_requirements();
            let text = match (format, &req) {
                (Format::Doc, _) => pretty(&serde_json::json!({
                    "answers": session.answers,
                    "requirements": req.as_ref().ok(),
                    "next_question": session.current_question(),
                })),
                (Format::Text, Ok(r)) => format!(
                    "{transcript}analysis type: {}\ngoals: {}\ninteractions: {}\n",
                    r.analysis_type.keyword(),
                    r.goals.iter().map(|g| g.keyword()).collect::<Vec<_>>().join(", "),
                    r.interactions
                        .iter()
                        .map(|i| i.keyword())
                        .collect::<Vec<_>>()
                        .join(", "),
                ),
                (Format::Text, Err(_)) => {
                    let next = session.current_question().map(|q| q.text).unwrap_or_default();
                    format!("{transcript}next: {next}\n")
                }
            };
            emit(out, &text)?;
            req.map(|_| ()).map_err(Into::into)
        }
        Command::Derive {
            model,
            derive,
            revision,
            visualizations,
            format,
        } => {
            let (model, abandoned) = load_revised(&model, &revision)?;
            for v in &visualizations {
                if model.find_visualization(v).is_none() {
                    return Err(Error::NoTarget(v.clone()).into());
                }
            }
            let inputs = load_inputs(&derive)?;
            let results = derive_selected(&model, &inputs, |name| {
                !abandoned.contains(name) && (visualizations.is_empty() || visualizations.iter().any(|v| v == name))
            });
            let text = match format {
                Format::Doc => pretty(&recommendation_document(results.iter().map(|(n, r)| (n.as_str(), r)))),
                Format::Text => results.iter().map(|(n, r)| describe(n, r)).collect(),
            };
            emit(out, &text)?;
            let failures: Vec<&Error> = results.iter().filter_map(|(_, r)| r.as_ref().err()).collect();
            match failures.first() {
                None => Ok(()),
                Some(first) => Err(CliError::Partial {
                    code: first.code(),
                    failed: failures.len(),
                    total: results.len(),
                }),
            }
        }
        Command::Questionnaire {
            model,
            revision,
            format,
        } => {
            let (model, abandoned) = load_revised(&model, &revision)?;
            let mut q = generate_questionnaire(&model);
            q.items.retain(|i| !abandoned.contains(&i.visualization));
            let text = match format {
                Format::Doc => pretty(&q),
                Format::Text => q
                    .items
                    .iter()
                    .enumerate()
                    .map(|(i, item)| format!("{}. {}\n", i + 1, item.question))
                    .collect(),
            };
            emit(out, &text)
        }
        Command::Emit {
            model,
            derive,
            revision,
            validation,
            columns,
            out: target,
        } => {
            let (model, abandoned) = load_revised(&model, &revision)?;
            let mut outcome = ValidationOutcome::from_json(&read(&validation)?)?;
            for a in &abandoned {
                if !matches!(outcome.verdicts.get(a), Some(Verdict::Approved)) {
                    outcome.verdicts.remove(a);
                    outcome.abandoned.insert(a.clone());
                }
            }
            let result = apply_validation(&model, &outcome)?;
            if !result.revision_needed.is_empty() {
                return Err(CliError::RevisionNeeded(result.revision_needed));
            }
            let mut inputs = load_inputs(&derive)?;
            inputs.settings.columns = columns;
            let skip: BTreeSet<&str> = abandoned.iter().chain(&result.abandoned).map(String::as_str).collect();
            let derivations = derive_selected(&model, &inputs, |name| !skip.contains(name))
                .into_iter()
                .map(|(_, r)| r)
                .collect::<vizreq_core::Result<Vec<_>>>()?;
            let doc = build_dashboards(&model, &derivations, &result, &inputs.matrix.version, &inputs.settings)?;
            match target {
                Some(path) => std::fs::write(&path, doc.to_json()).map_err(|e| io_err(path.display(), e).into()),
                None => emit(out, &doc.to_json()),
            }
        }
        Command::Serve {
            port,
            host,
            state,
            matrix,
            threshold,
            weights,
        } => {
            let config = ServiceConfig {
                matrix: load_matrix(matrix.as_deref())?,
                flowchart: Arc::new(GoalFlowchart::shipped()),
                settings: DeriveSettings {
                    threshold,
                    weights: weights.unwrap_or_default(),
                    ..DeriveSettings::default()
                },
            };
            let store = match state {
                Some(dir) => SessionStore::open(dir, config)?,
                None => SessionStore::in_memory(config),
            };
            let addr = std::net::SocketAddr::new(host, port);
            let runtime = tokio::runtime::Runtime::new().map_err(|e| io_err("runtime", e))?;
            eprintln!("listening on http://{addr}");
            runtime
                .block_on(vizreq_service::serve(addr, Arc::new(store)))
                .map_err(|e| io_err(addr, e).into())
        }
    }
}

fn validate(path: &Path, format: Format, out: &mut dyn Write) -> Result<()> {
    let result = load_model(path);
    if format == Format::Doc {
        let diagnostics = match &result {
            Err(CliError::Core(e)) => e.diagnostics().to_vec(),
            _ => Vec::new(),
        };
        let doc = serde_json::json!({ "valid": result.is_ok(), "diagnostics": diagnostics });
        emit(out, &pretty(&doc))?;
    }
    let model = result?;
    if format == Format::Text {
        emit(
            out,
            &format!("valid: {} visualizations\n", model.visualizations().count()),
        )?;
    }
    Ok(())
}

fn exclusions(excluded: &[Exclusion]) -> String {
    excluded
        .iter()
        .map(|x| {
            // a label shared by two coordinates is qualified with its coordinate
            let labels: Vec<String> = x
                .offenders
                .iter()
                .map(|o| {
                    let shared = x.offenders.iter().filter(|p| p.label() == o.label()).count() > 1;
                    if shared {
                        o.to_string()
                    } else {
                        o.label().to_string()
                    }
                })
                .collect();
            format!("  excluded: {} on {}\n", x.chart, labels.join(", "))
        })
        .collect()
}

fn describe_recommendation(d: &Derivation, r: &Recommendation) -> String {
    let ranking: Vec<String> = r
        .ranked
        .iter()
        .enumerate()
        .map(|(i, c)| format!("{}. {} ({})", i + 1, c.chart, c.score))
        .collect();
    format!(
        "{}: {}\n  context: {}\n  ranking: {}\n{}",
        d.visualization,
        r.best(),
        d.context,
        ranking.join(", "),
        exclusions(&r.excluded)
    )
}

fn describe(name: &str, result: &vizreq_core::Result<Derivation>) -> String {
    match result {
        Ok(d) => describe_recommendation(d, &d.recommendation),
        Err(e) => {
            let mut s = format!("{name}: error[{}] {e}\n", e.code());
            if let Error::NoFeasibleChart { excluded, .. } = e {
                s.push_str(&exclusions(excluded));
            }
            s
        }
    }
}

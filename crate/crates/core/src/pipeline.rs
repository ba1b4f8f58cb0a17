//! End-to-end helpers shared by the CLI and the service: loading data
//! collections, typing columns, deriving every visualization and
//! assembling dashboards.

use std::collections::{BTreeMap, BTreeSet};
use std::num::{NonZeroU32, NonZeroUsize};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dashboard::{emit_dashboard, group_dashboards, DashboardDocument, Provenance, ValidationResult};
use crate::derivation::{
    build_context, recommend, BindingProfiles, Recommendation, SuitabilityMatrix, VisualizationContext, Weights,
};
use crate::error::{Error, Result};
use crate::model::{GoalModel, VisualizationActor, VisualizationTask};
use crate::profiler::{
    classify_variable_type, load_dataset, profile_column, BaseKind, Dataset, TypingAnswer,
    DEFAULT_CARDINALITY_THRESHOLD,
};

/// Loaded collections by name.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DataCatalog {
    datasets: BTreeMap<String, Dataset>,
}

impl DataCatalog {
    pub fn new() -> Self {
        Self::default()
    }

    /// Loads every `*.csv` in `dir`; the file stem names the collection.
    pub fn load_dir(dir: impl AsRef<Path>) -> Result<Self> {
        let dir = dir.as_ref();
        let entries = std::fs::read_dir(dir).map_err(|e| Error::io(dir.display(), e))?;
        let mut paths = Vec::new();
        for entry in entries {
            let path = entry.map_err(|e| Error::io(dir.display(), e))?.path();
            if path.extension().is_some_and(|x| x.eq_ignore_ascii_case("csv")) {
                paths.push(path);
            }
        }
        paths.sort();
        let mut catalog = DataCatalog::new();
        for p in paths {
            let stem = p.file_stem().and_then(|s| s.to_str()).unwrap_or_default().to_string();
            catalog.insert(load_dataset(&p, &stem)?);
        }
        Ok(catalog)
    }

    pub fn insert(&mut self, ds: Dataset) {
        self.datasets.insert(ds.collection.clone(), ds);
    }

    /// Exact name first, then a unique case-insensitive match.
    pub fn get(&self, collection: &str) -> Option<&Dataset> {
        self.datasets.get(collection).or_else(|| {
            let mut hits = self
                .datasets
                .values()
                .filter(|d| d.collection.eq_ignore_ascii_case(collection));
            match (hits.next(), hits.next()) {
                (Some(d), None) => Some(d),
                _ => None,
            }
        })
    }

    pub fn collections(&self) -> impl Iterator<Item = &str> {
        self.datasets.keys().map(String::as_str)
    }
}

/// Ordinal answers and type overrides, keyed by `Collection.Column` or by
/// bare column name.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ColumnTypings(pub BTreeMap<String, TypingAnswer>);

impl ColumnTypings {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("answers file: {e}")))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path.display(), e))?;
        Self::from_json(&text)
    }

    pub fn get(&self, collection: &str, column: &str) -> Option<TypingAnswer> {
        self.0
            .get(&format!("{collection}.{column}"))
            .or_else(|| self.0.get(column))
            .copied()
    }

    pub fn set(&mut self, key: impl Into<String>, answer: TypingAnswer) {
        self.0.insert(key.into(), answer);
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeriveSettings {
    pub threshold: NonZeroU32,
    pub weights: Weights,
    pub columns: NonZeroUsize,
}

impl Default for DeriveSettings {
    fn default() -> Self {
        DeriveSettings {
            threshold: DEFAULT_CARDINALITY_THRESHOLD,
            weights: Weights::equal(),
            columns: crate::dashboard::DEFAULT_COLUMNS,
        }
    }
}

/// Input still needed before a model can be derived.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MissingInput {
    Dataset { collection: String },
    Column { collection: String, column: String },
    OrdinalAnswer { collection: String, column: String },
}

/// Datasets, columns and text-column answers the model's bindings need.
pub fn missing_inputs(model: &GoalModel, catalog: &DataCatalog, typings: &ColumnTypings) -> Vec<MissingInput> {
    let mut out = BTreeSet::new();
    for e in model.visualizations() {
        for b in &e.visualization.bindings {
            let Some(ds) = catalog.get(&b.collection) else {
                out.insert(MissingInput::Dataset {
                    collection: b.collection.clone(),
                });
                continue;
            };
            let Some(idx) = ds.column_index(&b.attribute) else {
                out.insert(MissingInput::Column {
                    collection: b.collection.clone(),
                    column: b.attribute.clone(),
                });
                continue;
            };
            if ds.columns[idx].kind == BaseKind::Text && typings.get(&b.collection, &b.attribute).is_none() {
                out.insert(MissingInput::OrdinalAnswer {
                    collection: b.collection.clone(),
                    column: b.attribute.clone(),
                });
            }
        }
    }
    out.into_iter().collect()
}

/// Context and recommendation for one visualization.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Derivation {
    pub visualization: String,
    pub context: VisualizationContext,
    pub recommendation: Recommendation,
}

fn binding_profiles(
    vis: &VisualizationTask,
    catalog: &DataCatalog,
    typings: &ColumnTypings,
) -> Result<BindingProfiles> {
    let mut out = BindingProfiles::new();
    for b in &vis.bindings {
        let ds = catalog
            .get(&b.collection)
            .ok_or_else(|| Error::NoDataset(b.collection.clone()))?;
        let profile = profile_column(ds, &b.attribute)?;
        let ty = match typings.get(&b.collection, &b.attribute) {
            Some(answer) => answer.resolve(&profile)?,
            None => classify_variable_type(&profile, None)?,
        };
        out.insert((b.collection.clone(), b.attribute.clone()), (ty, profile));
    }
    Ok(out)
}

pub fn derive_visualization(
    vis: &VisualizationTask,
    actor: &VisualizationActor,
    catalog: &DataCatalog,
    typings: &ColumnTypings,
    matrix: &SuitabilityMatrix,
    settings: &DeriveSettings,
) -> Result<Derivation> {
    let profiles = binding_profiles(vis, catalog, typings)?;
    let context = build_context(vis, &profiles, actor, settings.threshold)?;
    let recommendation = recommend(&context, matrix, &settings.weights).map_err(|e| match e {
        Error::NoFeasibleChart { excluded, .. } => Error::NoFeasibleChart {
            visualization: Some(vis.name.clone()),
            excluded,
        },
        e => e,
    })?;
    Ok(Derivation {
        visualization: vis.name.clone(),
        context,
        recommendation,
    })
}

/// Derives every visualization in declaration order; the first failure aborts.
pub fn derive_model(
    model: &GoalModel,
    catalog: &DataCatalog,
    typings: &ColumnTypings,
    matrix: &SuitabilityMatrix,
    settings: &DeriveSettings,
) -> Result<Vec<Derivation>> {
    model
        .visualizations()
        .map(|e| derive_visualization(e.visualization, &model.actor, catalog, typings, matrix, settings))
        .collect()
}

/// Dashboards for the approved visualizations of a validation round.
pub fn build_dashboards(
    model: &GoalModel,
    derivations: &[Derivation],
    validation: &ValidationResult,
    matrix_version: &str,
    settings: &DeriveSettings,
) -> Result<DashboardDocument> {
    let recommendations: BTreeMap<String, Recommendation> = derivations
        .iter()
        .map(|d| (d.visualization.clone(), d.recommendation.clone()))
        .collect();
    let provenance = Provenance {
        model_revision: model.revision,
        matrix_version: matrix_version.to_string(),
        weights: settings.weights,
        revision_needed: validation.revision_needed.clone(),
        abandoned: validation.abandoned.clone(),
    };
    let dashboards = group_dashboards(model, &validation.approved_set(), settings.columns)
        .iter()
        .map(|s| emit_dashboard(s, model, &recommendations, &provenance))
        .collect::<Result<Vec<_>>>()?;
    Ok(DashboardDocument { dashboards })
}

/// Derives every visualization independently, in declaration order.
pub fn derive_each(
    model: &GoalModel,
    catalog: &DataCatalog,
    typings: &ColumnTypings,
    matrix: &SuitabilityMatrix,
    settings: &DeriveSettings,
) -> Vec<(String, Result<Derivation>)> {
    model
        .visualizations()
        .map(|e| {
            let d = derive_visualization(e.visualization, &model.actor, catalog, typings, matrix, settings);
            (e.visualization.name.clone(), d)
        })
        .collect()
}

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::num::NonZeroU32;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{InteractionType, Role, Skill, VisualizationActor, VisualizationGoal, VisualizationTask};
use crate::profiler::{
    classify_distinct_count, compute_dimensionality, Cardinality, ColumnProfile, DimensionalityClass, VariableType,
};

/// The seven coordinates of a visualization context, in matrix order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Coordinate {
    Goal,
    Interaction,
    User,
    Dimensionality,
    Cardinality,
    IndependentType,
    DependentType,
}

impl Coordinate {
    pub const ALL: [Coordinate; 7] = [
        Coordinate::Goal,
        Coordinate::Interaction,
        Coordinate::User,
        Coordinate::Dimensionality,
        Coordinate::Cardinality,
        Coordinate::IndependentType,
        Coordinate::DependentType,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    /// Key used in matrix documents.
    pub fn key(self) -> &'static str {
        match self {
            Coordinate::Goal => "goal",
            Coordinate::Interaction => "interaction",
            Coordinate::User => "user",
            Coordinate::Dimensionality => "dimensionality",
            Coordinate::Cardinality => "cardinality",
            Coordinate::IndependentType => "independent_type",
            Coordinate::DependentType => "dependent_type",
        }
    }

    pub fn from_key(key: &str) -> Option<Self> {
        Coordinate::ALL.into_iter().find(|c| c.key() == key)
    }

    /// Every legal value of this coordinate.
    pub fn values(self) -> Vec<CoordinateValue> {
        match self {
            Coordinate::Goal => VisualizationGoal::ALL
                .iter()
                .map(|g| CoordinateValue::Goal(*g))
                .collect(),
            Coordinate::Interaction => InteractionType::ALL
                .iter()
                .map(|i| CoordinateValue::Interaction(*i))
                .collect(),
            Coordinate::User => Skill::ALL.iter().map(|s| CoordinateValue::User(*s)).collect(),
            Coordinate::Dimensionality => DimensionalityClass::ALL
                .into_iter()
                .map(CoordinateValue::Dimensionality)
                .collect(),
            Coordinate::Cardinality => Cardinality::ALL.into_iter().map(CoordinateValue::Cardinality).collect(),
            Coordinate::IndependentType => VariableType::ALL
                .into_iter()
                .map(CoordinateValue::IndependentType)
                .collect(),
            Coordinate::DependentType => VariableType::ALL
                .into_iter()
                .map(CoordinateValue::DependentType)
                .collect(),
        }
    }
}

impl fmt::Display for Coordinate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

/// One value of one coordinate, e.g. `dimensionality = 2-dimensional`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CoordinateValue {
    Goal(VisualizationGoal),
    Interaction(InteractionType),
    User(Skill),
    Dimensionality(DimensionalityClass),
    Cardinality(Cardinality),
    IndependentType(VariableType),
    DependentType(VariableType),
}

impl CoordinateValue {
    pub fn coordinate(self) -> Coordinate {
        match self {
            CoordinateValue::Goal(_) => Coordinate::Goal,
            CoordinateValue::Interaction(_) => Coordinate::Interaction,
            CoordinateValue::User(_) => Coordinate::User,
            CoordinateValue::Dimensionality(_) => Coordinate::Dimensionality,
            CoordinateValue::Cardinality(_) => Coordinate::Cardinality,
            CoordinateValue::IndependentType(_) => Coordinate::IndependentType,
            CoordinateValue::DependentType(_) => Coordinate::DependentType,
        }
    }

    /// Value label as written in suitability tables.
    pub fn label(self) -> &'static str {
        match self {
            CoordinateValue::Goal(g) => g.keyword(),
            CoordinateValue::Interaction(i) => i.label(),
            CoordinateValue::User(s) => s.keyword(),
            CoordinateValue::Dimensionality(d) => d.label(),
            CoordinateValue::Cardinality(c) => c.label(),
            CoordinateValue::IndependentType(t) | CoordinateValue::DependentType(t) => t.label(),
        }
    }

    pub fn parse(coordinate: Coordinate, label: &str) -> Option<Self> {
        coordinate.values().into_iter().find(|v| v.label() == label)
    }
}

impl fmt::Display for CoordinateValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}={}", self.coordinate(), self.label())
    }
}

#[derive(Serialize, Deserialize)]
struct CoordinateValueDoc {
    coordinate: Coordinate,
    value: String,
}

impl Serialize for CoordinateValue {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        CoordinateValueDoc {
            coordinate: self.coordinate(),
            value: self.label().to_string(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for CoordinateValue {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let doc = CoordinateValueDoc::deserialize(d)?;
        CoordinateValue::parse(doc.coordinate, &doc.value)
            .ok_or_else(|| serde::de::Error::custom(format!("unknown {} value {:?}", doc.coordinate, doc.value)))
    }
}

/// Distinct-count detail for one category binding.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CategoryCardinality {
    pub collection: String,
    pub attribute: String,
    pub distinct_count: usize,
    pub class: Cardinality,
}

/// The seven prioritizable requirements of one visualization.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VisualizationContext {
    pub goals: BTreeSet<VisualizationGoal>,
    pub interactions: BTreeSet<InteractionType>,
    pub user: Skill,
    pub dimensionality: DimensionalityClass,
    pub cardinality: Cardinality,
    pub independent_types: BTreeSet<VariableType>,
    pub dependent_types: BTreeSet<VariableType>,
    /// Per-category cardinalities; the context value comes from the widest.
    #[serde(default)]
    pub category_cardinalities: Vec<CategoryCardinality>,
}

impl VisualizationContext {
    /// All (coordinate, value) pairs, grouped by coordinate in matrix order.
    pub fn values(&self) -> Vec<CoordinateValue> {
        let mut out: Vec<CoordinateValue> = Vec::new();
        out.extend(self.goals.iter().map(|g| CoordinateValue::Goal(*g)));
        out.extend(self.interactions.iter().map(|i| CoordinateValue::Interaction(*i)));
        out.push(CoordinateValue::User(self.user));
        out.push(CoordinateValue::Dimensionality(self.dimensionality));
        out.push(CoordinateValue::Cardinality(self.cardinality));
        out.extend(
            self.independent_types
                .iter()
                .map(|t| CoordinateValue::IndependentType(*t)),
        );
        out.extend(self.dependent_types.iter().map(|t| CoordinateValue::DependentType(*t)));
        out
    }
}

impl fmt::Display for VisualizationContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for c in Coordinate::ALL {
            let labels: Vec<_> = self
                .values()
                .into_iter()
                .filter(|v| v.coordinate() == c)
                .map(|v| v.label())
                .collect();
            parts.push(labels.join(", "));
        }
        write!(f, "{{{}}}", parts.join("; "))
    }
}

/// Typed profile for each `(collection, attribute)` binding.
pub type BindingProfiles = BTreeMap<(String, String), (VariableType, ColumnProfile)>;

/// Combines the user-related coordinates from the model with the
/// data-related ones from profiling.
pub fn build_context(
    vis: &VisualizationTask,
    profiles: &BindingProfiles,
    actor: &VisualizationActor,
    threshold: NonZeroU32,
) -> Result<VisualizationContext> {
    let mut independent_types = BTreeSet::new();
    let mut dependent_types = BTreeSet::new();
    let mut category_cardinalities = Vec::new();
    for b in &vis.bindings {
        let key = (b.collection.clone(), b.attribute.clone());
        let (ty, profile) = profiles.get(&key).ok_or_else(|| Error::MissingProfile {
            collection: b.collection.clone(),
            attribute: b.attribute.clone(),
        })?;
        match b.role {
            Role::Category => {
                independent_types.insert(*ty);
                category_cardinalities.push(CategoryCardinality {
                    collection: b.collection.clone(),
                    attribute: b.attribute.clone(),
                    distinct_count: profile.distinct_count,
                    class: classify_distinct_count(profile.distinct_count, threshold).value,
                });
            }
            Role::Measure => {
                dependent_types.insert(*ty);
            }
        }
    }
    let widest = category_cardinalities
        .iter()
        .map(|c| c.distinct_count)
        .max()
        .unwrap_or(0);
    Ok(VisualizationContext {
        goals: vis.goals.clone(),
        interactions: vis.interactions.clone(),
        user: actor.skill,
        dimensionality: compute_dimensionality(vis),
        cardinality: classify_distinct_count(widest, threshold).value,
        independent_types,
        dependent_types,
        category_cardinalities,
    })
}

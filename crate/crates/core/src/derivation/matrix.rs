use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::context::{Coordinate, CoordinateValue};
use crate::error::{Error, Result};
use crate::model::{InteractionType, Skill, VisualizationGoal};
use crate::profiler::{Cardinality, DimensionalityClass, VariableType};

/// Ordinal suitability of a chart type for one coordinate value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Score {
    Unfit,
    Discouraged,
    Acceptable,
    Fit,
}

impl Score {
    pub const ALL: [Score; 4] = [Score::Fit, Score::Acceptable, Score::Discouraged, Score::Unfit];

    pub fn ordinal(self) -> u8 {
        match self {
            Score::Fit => 3,
            Score::Acceptable => 2,
            Score::Discouraged => 1,
            Score::Unfit => 0,
        }
    }

    pub fn from_ordinal(o: u8) -> Option<Self> {
        Score::ALL.into_iter().find(|s| s.ordinal() == o)
    }

    pub fn label(self) -> &'static str {
        match self {
            Score::Fit => "fit",
            Score::Acceptable => "acceptable",
            Score::Discouraged => "discouraged",
            Score::Unfit => "unfit",
        }
    }
}

impl fmt::Display for Score {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

pub const STACKED_COLUMN: &str = "Stacked Column Chart";
pub const BUBBLE: &str = "Bubble Chart";
pub const PIE: &str = "Pie Chart";

/// The published suitability scores every matrix must carry unchanged for
/// the three reference chart types.
pub const PUBLISHED_SCORES: [(&str, CoordinateValue, Score); 27] = {
    use CoordinateValue as V;
    use Score::*;
    const COMPOSITION: V = V::Goal(VisualizationGoal::Composition);
    const COMPARISON: V = V::Goal(VisualizationGoal::Comparison);
    const OVERVIEW: V = V::Interaction(InteractionType::Overview);
    const LAY: V = V::User(Skill::Lay);
    const TWO_D: V = V::Dimensionality(DimensionalityClass::TwoDimensional);
    const N_D: V = V::Dimensionality(DimensionalityClass::NDimensional);
    const LOW: V = V::Cardinality(Cardinality::Low);
    const NOMINAL: V = V::IndependentType(VariableType::Nominal);
    const RATIO: V = V::DependentType(VariableType::Ratio);
    [
        (STACKED_COLUMN, COMPOSITION, Fit),
        (BUBBLE, COMPOSITION, Unfit),
        (PIE, COMPOSITION, Fit),
        (STACKED_COLUMN, COMPARISON, Fit),
        (BUBBLE, COMPARISON, Fit),
        (PIE, COMPARISON, Unfit),
        (STACKED_COLUMN, OVERVIEW, Acceptable),
        (BUBBLE, OVERVIEW, Acceptable),
        (PIE, OVERVIEW, Fit),
        (STACKED_COLUMN, LAY, Fit),
        (BUBBLE, LAY, Acceptable),
        (PIE, LAY, Fit),
        (STACKED_COLUMN, TWO_D, Unfit),
        (BUBBLE, TWO_D, Unfit),
        (PIE, TWO_D, Fit),
        (STACKED_COLUMN, N_D, Fit),
        (BUBBLE, N_D, Fit),
        (PIE, N_D, Unfit),
        (STACKED_COLUMN, LOW, Fit),
        (BUBBLE, LOW, Acceptable),
        (PIE, LOW, Fit),
        (STACKED_COLUMN, NOMINAL, Fit),
        (BUBBLE, NOMINAL, Unfit),
        (PIE, NOMINAL, Fit),
        (STACKED_COLUMN, RATIO, Fit),
        (BUBBLE, RATIO, Fit),
        (PIE, RATIO, Fit),
    ]
};

const SHIPPED_DEFAULT: &str = include_str!("../../data/default-matrix.json");
const SHIPPED_REFERENCE: &str = include_str!("../../data/reference-matrix.json");

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChartScores {
    pub name: String,
    pub scores: BTreeMap<CoordinateValue, Score>,
}

impl ChartScores {
    pub fn score(&self, value: CoordinateValue) -> Option<Score> {
        self.scores.get(&value).copied()
    }
}

/// Chart type × coordinate value score table. Every chart has a score for
/// every legal value of all seven coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuitabilityMatrix {
    pub version: String,
    pub charts: Vec<ChartScores>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MatrixDoc {
    version: String,
    charts: Vec<ChartDoc>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ChartDoc {
    name: String,
    scores: BTreeMap<String, BTreeMap<String, Score>>,
}

impl SuitabilityMatrix {
    /// Parses a matrix document and checks completeness. Does not check the
    /// published reference scores; see [`SuitabilityMatrix::verify_published`].
    pub fn from_json(text: &str) -> Result<Self> {
        let doc: MatrixDoc = serde_json::from_str(text).map_err(|e| Error::BadMatrix(e.to_string()))?;
        if doc.version.trim().is_empty() {
            return Err(Error::BadMatrix("empty version".into()));
        }
        let mut names = HashSet::new();
        let mut charts = Vec::with_capacity(doc.charts.len());
        for chart in doc.charts {
            if !names.insert(chart.name.clone()) {
                return Err(Error::BadMatrix(format!("duplicate chart {:?}", chart.name)));
            }
            let mut scores = BTreeMap::new();
            for (key, values) in &chart.scores {
                let coord = Coordinate::from_key(key)
                    .ok_or_else(|| Error::BadMatrix(format!("{}: unknown coordinate {key:?}", chart.name)))?;
                for (label, score) in values {
                    let value = CoordinateValue::parse(coord, label)
                        .ok_or_else(|| Error::BadMatrix(format!("{}: unknown {key} value {label:?}", chart.name)))?;
                    scores.insert(value, *score);
                }
            }
            let missing: Vec<String> = Coordinate::ALL
                .into_iter()
                .flat_map(Coordinate::values)
                .filter(|v| !scores.contains_key(v))
                .map(|v| v.to_string())
                .collect();
            if !missing.is_empty() {
                return Err(Error::BadMatrix(format!(
                    "{}: incomplete, missing {}",
                    chart.name,
                    missing.join(", ")
                )));
            }
            charts.push(ChartScores {
                name: chart.name,
                scores,
            });
        }
        if charts.is_empty() {
            return Err(Error::BadMatrix("no charts".into()));
        }
        Ok(SuitabilityMatrix {
            version: doc.version,
            charts,
        })
    }

    /// Checks that the three reference charts carry the published scores.
    pub fn verify_published(&self) -> Result<()> {
        let mismatches: Vec<String> = PUBLISHED_SCORES
            .iter()
            .filter_map(|(chart, value, expected)| {
                let actual = self.chart(chart).and_then(|c| c.score(*value));
                (actual != Some(*expected)).then(|| {
                    format!(
                        "{chart} × {value}: expected {expected}, found {}",
                        actual.map_or("nothing", Score::label)
                    )
                })
            })
            .collect();
        if mismatches.is_empty() {
            Ok(())
        } else {
            Err(Error::BadMatrix(mismatches.join("; ")))
        }
    }

    /// Parses and verifies a matrix file.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path.display(), e))?;
        let m = Self::from_json(&text)?;
        m.verify_published()?;
        Ok(m)
    }

    /// Nine chart types; the reference columns plus configured defaults.
    pub fn shipped_default() -> Self {
        Self::from_json(SHIPPED_DEFAULT).expect("shipped matrix is valid")
    }

    /// Only the three reference chart types.
    pub fn shipped_reference() -> Self {
        Self::from_json(SHIPPED_REFERENCE).expect("shipped matrix is valid")
    }

    pub fn shipped_default_source() -> &'static str {
        SHIPPED_DEFAULT
    }

    pub fn shipped_reference_source() -> &'static str {
        SHIPPED_REFERENCE
    }

    pub fn chart(&self, name: &str) -> Option<&ChartScores> {
        self.charts.iter().find(|c| c.name == name)
    }

    pub fn chart_names(&self) -> impl Iterator<Item = &str> {
        self.charts.iter().map(|c| c.name.as_str())
    }

    /// Sub-matrix with the named charts, in the given order.
    pub fn restricted_to(&self, names: &[&str]) -> Result<Self> {
        let charts = names
            .iter()
            .map(|n| self.chart(n).cloned().ok_or_else(|| Error::UnknownChart(n.to_string())))
            .collect::<Result<Vec<_>>>()?;
        Ok(SuitabilityMatrix {
            version: self.version.clone(),
            charts,
        })
    }
}

//! Visualization contexts, suitability scoring and skyline-based chart
//! selection.

mod context;
mod matrix;
pub mod skyline;

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::ser::SerializeMap;
use serde::{Deserialize, Serialize, Serializer};

pub use context::{
    build_context, BindingProfiles, CategoryCardinality, Coordinate, CoordinateValue, VisualizationContext,
};
pub use matrix::{ChartScores, Score, SuitabilityMatrix, BUBBLE, PIE, PUBLISHED_SCORES, STACKED_COLUMN};

use crate::error::{Error, Result};

fn serialize_per_coordinate<S: Serializer, T: Serialize>(values: &[T; 7], s: S) -> Result<S::Ok, S::Error> {
    let mut map = s.serialize_map(Some(7))?;
    for (c, v) in Coordinate::ALL.iter().zip(values) {
        map.serialize_entry(c.key(), v)?;
    }
    map.end()
}

/// Scores of one chart against one context.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ScoreVector {
    pub chart: String,
    /// Minimum score over each coordinate's values, in [`Coordinate::ALL`] order.
    #[serde(serialize_with = "serialize_per_coordinate")]
    pub aggregated: [Score; 7],
    pub excluded: bool,
    /// Raw score for every (coordinate, value) pair of the context.
    pub breakdown: Vec<(CoordinateValue, Score)>,
}

impl ScoreVector {
    pub fn ordinals(&self) -> [u8; 7] {
        self.aggregated.map(Score::ordinal)
    }

    /// Coordinate values scored unfit.
    pub fn offenders(&self) -> Vec<CoordinateValue> {
        self.breakdown
            .iter()
            .filter(|(_, s)| *s == Score::Unfit)
            .map(|(v, _)| *v)
            .collect()
    }
}

/// Scores `chart` on every value of `ctx`; multi-valued coordinates take the
/// worst score, and any unfit value excludes the chart.
pub fn score_chart(chart: &str, ctx: &VisualizationContext, matrix: &SuitabilityMatrix) -> Result<ScoreVector> {
    let scores = matrix
        .chart(chart)
        .ok_or_else(|| Error::UnknownChart(chart.to_string()))?;
    let mut aggregated = [Score::Fit; 7];
    let mut breakdown = Vec::new();
    for value in ctx.values() {
        let score = scores
            .score(value)
            .ok_or_else(|| Error::BadMatrix(format!("{chart}: no score for {value}")))?;
        let slot = &mut aggregated[value.coordinate().index()];
        *slot = (*slot).min(score);
        breakdown.push((value, score));
    }
    let excluded = breakdown.iter().any(|(_, s)| *s == Score::Unfit);
    Ok(ScoreVector {
        chart: chart.to_string(),
        aggregated,
        excluded,
        breakdown,
    })
}

/// Non-excluded charts not dominated by another non-excluded chart.
pub fn compute_skyline(vectors: &[ScoreVector]) -> BTreeSet<String> {
    let feasible: Vec<&ScoreVector> = vectors.iter().filter(|v| !v.excluded).collect();
    let points: Vec<[u8; 7]> = feasible.iter().map(|v| v.ordinals()).collect();
    skyline::skyline_indices(&points)
        .into_iter()
        .map(|i| feasible[i].chart.clone())
        .collect()
}

/// Per-coordinate priorities for ranking inside the skyline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Weights([f64; 7]);

impl Weights {
    pub fn new(values: &[f64]) -> Result<Self> {
        let arr: [f64; 7] = values
            .try_into()
            .map_err(|_| Error::BadWeights(format!("expected 7 weights, got {}", values.len())))?;
        if arr.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::BadWeights("weights must be finite and non-negative".into()));
        }
        if arr.iter().all(|w| *w == 0.0) {
            return Err(Error::BadWeights("at least one weight must be positive".into()));
        }
        Ok(Weights(arr))
    }

    pub fn equal() -> Self {
        Weights([1.0; 7])
    }

    pub fn values(&self) -> &[f64; 7] {
        &self.0
    }
}

impl Default for Weights {
    fn default() -> Self {
        Weights::equal()
    }
}

impl FromStr for Weights {
    type Err = Error;
    /// Comma-separated list of seven numbers.
    fn from_str(s: &str) -> Result<Self> {
        let values = s
            .split(',')
            .map(|p| p.trim().parse::<f64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| Error::BadWeights(format!("{s:?}: {e}")))?;
        Weights::new(&values)
    }
}

impl fmt::Display for Weights {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|w| w.to_string()).collect();
        f.write_str(&parts.join(","))
    }
}

impl Serialize for Weights {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        serialize_per_coordinate(&self.0, s)
    }
}

impl<'de> Deserialize<'de> for Weights {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let map = std::collections::BTreeMap::<String, f64>::deserialize(d)?;
        let values = Coordinate::ALL
            .iter()
            .map(|c| {
                map.get(c.key())
                    .copied()
                    .ok_or_else(|| serde::de::Error::custom(format!("missing weight for {c}")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Weights::new(&values).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankedChart {
    pub chart: String,
    pub score: f64,
}

/// Orders the skyline by weighted ordinal sum, best first; ties by name.
///
/// Comparison uses the weight-normalized score rounded to 1e-9 so that
/// rescaling the weights cannot reorder candidates through rounding noise.
pub fn rank_candidates(skyline: &BTreeSet<String>, vectors: &[ScoreVector], weights: &Weights) -> Vec<RankedChart> {
    let total: f64 = weights.0.iter().sum();
    let mut ranked: Vec<(i64, RankedChart)> = vectors
        .iter()
        .filter(|v| skyline.contains(&v.chart))
        .map(|v| {
            let score: f64 = v
                .ordinals()
                .iter()
                .zip(&weights.0)
                .map(|(o, w)| f64::from(*o) * w)
                .sum();
            let key = (score / total * 1e9).round() as i64;
            (
                key,
                RankedChart {
                    chart: v.chart.clone(),
                    score,
                },
            )
        })
        .collect();
    ranked.sort_by(|(ka, a), (kb, b)| kb.cmp(ka).then_with(|| a.chart.cmp(&b.chart)));
    ranked.into_iter().map(|(_, r)| r).collect()
}

/// A chart removed before the skyline, with the values it cannot serve.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Exclusion {
    pub chart: String,
    pub offenders: Vec<CoordinateValue>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Recommendation {
    pub skyline: BTreeSet<String>,
    pub ranked: Vec<RankedChart>,
    pub excluded: Vec<Exclusion>,
    pub vectors: Vec<ScoreVector>,
}

impl Recommendation {
    /// Rank-1 chart.
    pub fn best(&self) -> &str {
        &self.ranked[0].chart
    }

    pub fn exclusion(&self, chart: &str) -> Option<&Exclusion> {
        self.excluded.iter().find(|e| e.chart == chart)
    }
}

/// Scores every chart of the matrix, drops unfit ones, keeps the skyline and
/// ranks it.
pub fn recommend(ctx: &VisualizationContext, matrix: &SuitabilityMatrix, weights: &Weights) -> Result<Recommendation> {
    let vectors = matrix
        .chart_names()
        .map(|chart| score_chart(chart, ctx, matrix))
        .collect::<Result<Vec<_>>>()?;
    let excluded: Vec<Exclusion> = vectors
        .iter()
        .filter(|v| v.excluded)
        .map(|v| Exclusion {
            chart: v.chart.clone(),
            offenders: v.offenders(),
        })
        .collect();
    if excluded.len() == vectors.len() {
        return Err(Error::NoFeasibleChart {
            visualization: None,
            excluded,
        });
    }
    let skyline = compute_skyline(&vectors);
    let ranked = rank_candidates(&skyline, &vectors, weights);
    Ok(Recommendation {
        skyline,
        ranked,
        excluded,
        vectors,
    })
}

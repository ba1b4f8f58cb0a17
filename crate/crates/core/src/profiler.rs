//! CSV ingestion and the data-related coordinates: variable type,
//! cardinality and dimensionality.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::fs::File;
use std::io::Read;
use std::num::NonZeroU32;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Structure, VisualizationTask};

/// Default boundary between low and high cardinality, inclusive on the low side.
pub const DEFAULT_CARDINALITY_THRESHOLD: NonZeroU32 = match NonZeroU32::new(36) {
    Some(t) => t,
    None => unreachable!(),
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BaseKind {
    Numeric,
    Text,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColumnSchema {
    pub name: String,
    pub kind: BaseKind,
}

/// A loaded collection. Missing cells are `None`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dataset {
    pub collection: String,
    pub columns: Vec<ColumnSchema>,
    pub rows: Vec<Vec<Option<String>>>,
}

/// Integer or decimal literal with an optional leading sign; no exponent.
pub fn parse_number(s: &str) -> Option<f64> {
    let digits = s.strip_prefix(['+', '-']).unwrap_or(s);
    let (int, frac) = match digits.split_once('.') {
        Some((i, f)) => (i, Some(f)),
        None => (digits, None),
    };
    let all_digits = |p: &str| p.bytes().all(|b| b.is_ascii_digit());
    let ok = all_digits(int) && frac.is_none_or(all_digits) && (!int.is_empty() || frac.is_some_and(|f| !f.is_empty()));
    if ok {
        s.parse().ok()
    } else {
        None
    }
}

impl Dataset {
    /// Parses CSV text with a header row.
    pub fn from_reader(reader: impl Read, collection: &str, source_name: &str) -> Result<Self> {
        let mut csv = csv::ReaderBuilder::new()
            .has_headers(false)
            .flexible(true)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let mut records = csv.records();
        let header = match records.next() {
            None => return Err(Error::NoHeader(source_name.to_string())),
            Some(r) => r.map_err(|e| Error::io(source_name, e))?,
        };
        let names: Vec<String> = header
            .iter()
            .enumerate()
            .map(|(i, h)| if i == 0 { h.trim_start_matches('\u{feff}') } else { h }.to_string())
            .collect();
        if names.iter().all(|n| n.is_empty()) {
            return Err(Error::NoHeader(source_name.to_string()));
        }
        let mut seen = HashSet::new();
        for n in &names {
            if !seen.insert(n.as_str()) {
                return Err(Error::DupColumn {
                    source_name: source_name.to_string(),
                    column: n.clone(),
                });
            }
        }

        let mut rows = Vec::new();
        for record in records {
            let record = record.map_err(|e| Error::io(source_name, e))?;
            if record.len() != names.len() {
                return Err(Error::RaggedRow {
                    source_name: source_name.to_string(),
                    line: record.position().map_or(0, |p| p.line()),
                    expected: names.len(),
                    found: record.len(),
                });
            }
            rows.push(
                record
                    .iter()
                    .map(|cell| (!cell.is_empty()).then(|| cell.to_string()))
                    .collect::<Vec<_>>(),
            );
        }

        let columns = names
            .into_iter()
            .enumerate()
            .map(|(i, name)| {
                let numeric = rows
                    .iter()
                    .filter_map(|r: &Vec<Option<String>>| r[i].as_deref())
                    .all(|v| parse_number(v).is_some());
                ColumnSchema {
                    name,
                    kind: if numeric { BaseKind::Numeric } else { BaseKind::Text },
                }
            })
            .collect();
        Ok(Dataset {
            collection: collection.to_string(),
            columns,
            rows,
        })
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name == name)
    }
}

/// Reads a CSV file into a dataset named `collection`.
pub fn load_dataset(path: impl AsRef<Path>, collection: &str) -> Result<Dataset> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path.display(), e))?;
    Dataset::from_reader(file, collection, &path.display().to_string())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColumnProfile {
    pub name: String,
    pub base_kind: BaseKind,
    pub row_count: usize,
    pub distinct_count: usize,
    /// Meaningful for numeric columns only; always false for text.
    pub has_negative: bool,
    /// Sorted distinct values of a text column; empty for numeric columns.
    pub grouped_values: Vec<String>,
    pub empty_count: usize,
}

/// Counts distinct, empty and negative values of one column.
pub fn profile_column(ds: &Dataset, column: &str) -> Result<ColumnProfile> {
    let idx = ds.column_index(column).ok_or_else(|| Error::NoColumn {
        collection: ds.collection.clone(),
        column: column.to_string(),
    })?;
    let kind = ds.columns[idx].kind;
    let values: Vec<&str> = ds.rows.iter().filter_map(|r| r[idx].as_deref()).collect();
    let empty_count = ds.rows.len() - values.len();

    let (distinct_count, has_negative, grouped_values) = match kind {
        BaseKind::Numeric => {
            let nums: Vec<f64> = values.iter().filter_map(|v| parse_number(v)).collect();
            // -0.0 and 0.0 are the same value
            let distinct: HashSet<u64> = nums.iter().map(|n| (n + 0.0).to_bits()).collect();
            (distinct.len(), nums.iter().any(|n| *n < 0.0), Vec::new())
        }
        BaseKind::Text => {
            let distinct: BTreeSet<&str> = values.iter().copied().collect();
            (
                distinct.len(),
                false,
                distinct.into_iter().map(str::to_string).collect(),
            )
        }
    };
    Ok(ColumnProfile {
        name: column.to_string(),
        base_kind: kind,
        row_count: ds.rows.len(),
        distinct_count,
        has_negative,
        grouped_values,
        empty_count,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum VariableType {
    Nominal,
    Ordinal,
    Interval,
    Ratio,
}

impl VariableType {
    pub const ALL: [VariableType; 4] = [
        VariableType::Nominal,
        VariableType::Ordinal,
        VariableType::Interval,
        VariableType::Ratio,
    ];

    pub fn label(self) -> &'static str {
        match self {
            VariableType::Nominal => "Nominal",
            VariableType::Ordinal => "Ordinal",
            VariableType::Interval => "Interval",
            VariableType::Ratio => "Ratio",
        }
    }
}

impl fmt::Display for VariableType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for VariableType {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        VariableType::ALL
            .into_iter()
            .find(|v| v.label().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown variable type {s:?}"))
    }
}

/// Numeric columns are typed by sign; text columns need the user's judgment
/// of whether the grouped values have an order.
pub fn classify_variable_type(profile: &ColumnProfile, ordinal_answer: Option<bool>) -> Result<VariableType> {
    if profile.distinct_count == 0 {
        return Err(Error::EmptyColumn(profile.name.clone()));
    }
    match profile.base_kind {
        BaseKind::Numeric if profile.has_negative => Ok(VariableType::Interval),
        BaseKind::Numeric => Ok(VariableType::Ratio),
        BaseKind::Text => match ordinal_answer {
            Some(true) => Ok(VariableType::Ordinal),
            Some(false) => Ok(VariableType::Nominal),
            None => Err(Error::NeedOrdinalAnswer(profile.name.clone())),
        },
    }
}

/// User input for typing one column: an ordinal yes/no answer, or a forced type.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TypingAnswer {
    Ordered(bool),
    Override(VariableType),
}

impl TypingAnswer {
    pub fn resolve(self, profile: &ColumnProfile) -> Result<VariableType> {
        match self {
            TypingAnswer::Override(t) => Ok(t),
            TypingAnswer::Ordered(b) => classify_variable_type(profile, Some(b)),
        }
    }
}

impl FromStr for TypingAnswer {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "yes" | "true" => Ok(TypingAnswer::Ordered(true)),
            "no" | "false" => Ok(TypingAnswer::Ordered(false)),
            _ => s
                .parse()
                .map(TypingAnswer::Override)
                .map_err(|_| format!("expected yes, no or a variable type, found {s:?}")),
        }
    }
}

impl fmt::Display for TypingAnswer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TypingAnswer::Ordered(true) => f.write_str("yes"),
            TypingAnswer::Ordered(false) => f.write_str("no"),
            TypingAnswer::Override(t) => write!(f, "{t}"),
        }
    }
}

impl Serialize for TypingAnswer {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for TypingAnswer {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Cardinality {
    Low,
    High,
}

impl Cardinality {
    pub const ALL: [Cardinality; 2] = [Cardinality::Low, Cardinality::High];

    pub fn label(self) -> &'static str {
        match self {
            Cardinality::Low => "Low",
            Cardinality::High => "High",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CardinalityClass {
    pub value: Cardinality,
    pub threshold_used: NonZeroU32,
}

pub fn classify_cardinality(profile: &ColumnProfile, threshold: NonZeroU32) -> CardinalityClass {
    classify_distinct_count(profile.distinct_count, threshold)
}

pub(crate) fn classify_distinct_count(distinct: usize, threshold: NonZeroU32) -> CardinalityClass {
    let value = if distinct <= threshold.get() as usize {
        Cardinality::Low
    } else {
        Cardinality::High
    };
    CardinalityClass {
        value,
        threshold_used: threshold,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum DimensionalityClass {
    OneDimensional,
    TwoDimensional,
    NDimensional,
    Tree,
    Graph,
}

impl DimensionalityClass {
    pub const ALL: [DimensionalityClass; 5] = [
        DimensionalityClass::OneDimensional,
        DimensionalityClass::TwoDimensional,
        DimensionalityClass::NDimensional,
        DimensionalityClass::Tree,
        DimensionalityClass::Graph,
    ];

    pub fn label(self) -> &'static str {
        match self {
            DimensionalityClass::OneDimensional => "1-dimensional",
            DimensionalityClass::TwoDimensional => "2-dimensional",
            DimensionalityClass::NDimensional => "n-dimensional",
            DimensionalityClass::Tree => "Tree",
            DimensionalityClass::Graph => "Graph",
        }
    }
}

/// Structure annotations take precedence; otherwise the number of bound
/// variables decides.
pub fn compute_dimensionality(vis: &VisualizationTask) -> DimensionalityClass {
    match vis.structure {
        Structure::Tree => DimensionalityClass::Tree,
        Structure::Graph => DimensionalityClass::Graph,
        Structure::Flat => match vis.bindings.len() {
            0 | 1 => DimensionalityClass::OneDimensional,
            2 => DimensionalityClass::TwoDimensional,
            _ => DimensionalityClass::NDimensional,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::DataBinding;

    fn ds(text: &str) -> Result<Dataset> {
        Dataset::from_reader(text.as_bytes(), "Bills", "bills.csv")
    }

    #[test]
    fn infers_kinds() {
        let d = ds("Type,Amount\nWater,12.5\n\"Waste, urban\",3\n").unwrap();
        assert_eq!(d.columns.len(), 2);
        assert_eq!(d.columns[0].kind, BaseKind::Text);
        assert_eq!(d.columns[1].kind, BaseKind::Numeric);
        assert_eq!(d.rows[1][0].as_deref(), Some("Waste, urban"));
    }

    #[test]
    fn header_only_and_errors() {
        assert_eq!(ds("Type,Amount\n").unwrap().rows.len(), 0);
        assert_eq!(ds("").unwrap_err().code(), "E_NO_HEADER");
        let err = ds("Type,Amount\nA,1,2\n").unwrap_err();
        assert_eq!(err.code(), "E_RAGGED_ROW");
        assert!(matches!(
            err,
            Error::RaggedRow {
                line: 2,
                expected: 2,
                found: 3,
                ..
            }
        ));
        assert_eq!(ds("A,A\n1,2\n").unwrap_err().code(), "E_DUP_COLUMN");
        assert_eq!(
            load_dataset("/nonexistent/bills.csv", "Bills").unwrap_err().code(),
            "E_IO"
        );
    }

    #[test]
    fn number_forms() {
        for ok in ["3", "-5", "+2", "10.25", "-.5", "7."] {
            assert!(parse_number(ok).is_some(), "{ok}");
        }
        for bad in ["", "-", ".", "1e3", "1,5", "0x1F", "NaN", "inf", "1.2.3", "--1"] {
            assert!(parse_number(bad).is_none(), "{bad}");
        }
    }

    #[test]
    fn profile_counts() {
        let d = ds("T,N,E\nb,3,\na,-5,\nb,10,\n,3,\n").unwrap();
        let t = profile_column(&d, "T").unwrap();
        assert_eq!((t.distinct_count, t.empty_count), (2, 1));
        assert_eq!(t.grouped_values, ["a", "b"]);
        let n = profile_column(&d, "N").unwrap();
        assert_eq!(n.base_kind, BaseKind::Numeric);
        assert_eq!(n.distinct_count, 3);
        assert!(n.has_negative);
        let e = profile_column(&d, "E").unwrap();
        assert_eq!((e.distinct_count, e.empty_count), (0, 4));
        assert_eq!(profile_column(&d, "X").unwrap_err().code(), "E_NO_COLUMN");
    }

    #[test]
    fn numeric_distinct_uses_value_not_spelling() {
        let d = ds("N\n1\n1.0\n-0\n0\n").unwrap();
        let p = profile_column(&d, "N").unwrap();
        assert_eq!(p.distinct_count, 2);
        assert!(!p.has_negative);
    }

    #[test]
    fn variable_type_rules() {
        let d = ds("Type,Amount,Delta\nWater,12,-2.5\nRates,0,1\n").unwrap();
        let amount = profile_column(&d, "Amount").unwrap();
        assert_eq!(classify_variable_type(&amount, None), Ok(VariableType::Ratio));
        let delta = profile_column(&d, "Delta").unwrap();
        assert_eq!(classify_variable_type(&delta, None), Ok(VariableType::Interval));
        let ty = profile_column(&d, "Type").unwrap();
        assert_eq!(classify_variable_type(&ty, Some(false)), Ok(VariableType::Nominal));
        assert_eq!(classify_variable_type(&ty, Some(true)), Ok(VariableType::Ordinal));
        assert_eq!(
            classify_variable_type(&ty, None).unwrap_err().code(),
            "E_NEED_ORDINAL_ANSWER"
        );
    }

    #[test]
    fn empty_column_needs_override() {
        let d = ds("E,X\n,1\n").unwrap();
        let p = profile_column(&d, "E").unwrap();
        assert_eq!(
            classify_variable_type(&p, Some(false)).unwrap_err().code(),
            "E_EMPTY_COLUMN"
        );
        assert_eq!(
            TypingAnswer::Override(VariableType::Ordinal).resolve(&p),
            Ok(VariableType::Ordinal)
        );
    }

    #[test]
    fn typing_answer_parsing() {
        assert_eq!("no".parse(), Ok(TypingAnswer::Ordered(false)));
        assert_eq!("YES".parse(), Ok(TypingAnswer::Ordered(true)));
        assert_eq!("interval".parse(), Ok(TypingAnswer::Override(VariableType::Interval)));
        assert!("maybe".parse::<TypingAnswer>().is_err());
    }

    #[test]
    fn cardinality_boundary_is_inclusive() {
        let t = DEFAULT_CARDINALITY_THRESHOLD;
        assert_eq!(classify_distinct_count(6, t).value, Cardinality::Low);
        assert_eq!(classify_distinct_count(36, t).value, Cardinality::Low);
        assert_eq!(classify_distinct_count(37, t).value, Cardinality::High);
        assert_eq!(classify_distinct_count(100, t).value, Cardinality::High);
    }

    #[test]
    fn dimensionality_rules() {
        let mut v = VisualizationTask {
            name: "v".into(),
            goals: Default::default(),
            interactions: Default::default(),
            bindings: vec![DataBinding::measure("Amount", "Bills")],
            structure: Structure::Flat,
        };
        assert_eq!(compute_dimensionality(&v), DimensionalityClass::OneDimensional);
        v.bindings.push(DataBinding::category("Type", "Bills"));
        assert_eq!(compute_dimensionality(&v), DimensionalityClass::TwoDimensional);
        v.bindings.push(DataBinding::category("Province", "Location"));
        assert_eq!(compute_dimensionality(&v), DimensionalityClass::NDimensional);
        v.structure = Structure::Tree;
        assert_eq!(compute_dimensionality(&v), DimensionalityClass::Tree);
        v.structure = Structure::Graph;
        assert_eq!(compute_dimensionality(&v), DimensionalityClass::Graph);
    }
}

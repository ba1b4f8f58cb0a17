use std::fmt;
use std::ops::RangeInclusive;

use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Visual channel a bound attribute is mapped to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Channel {
    XAxis,
    YAxis,
    YValue,
    ColorStack,
    Slice,
    Size,
    GeoLocation,
    Time,
    Label,
    /// Hierarchy level, starting at 1.
    Nesting(usize),
}

impl fmt::Display for Channel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Channel::XAxis => f.write_str("x-axis"),
            Channel::YAxis => f.write_str("y-axis"),
            Channel::YValue => f.write_str("y-value"),
            Channel::ColorStack => f.write_str("color/stack"),
            Channel::Slice => f.write_str("slice"),
            Channel::Size => f.write_str("size"),
            Channel::GeoLocation => f.write_str("geo-location"),
            Channel::Time => f.write_str("time"),
            Channel::Label => f.write_str("label"),
            Channel::Nesting(level) => write!(f, "nesting-{level}"),
        }
    }
}

/// How categories are laid onto channels for one chart type.
#[derive(Debug, Clone, Copy)]
enum CategorySlots {
    Fixed(&'static [Channel]),
    /// Any number ≥ 1 of nesting levels.
    Nested,
}

#[derive(Debug, Clone)]
struct ChartBinding {
    chart: &'static str,
    categories: CategorySlots,
    category_arity: RangeInclusive<usize>,
    measures: &'static [Channel],
    measure_arity: RangeInclusive<usize>,
}

use Channel::*;

const BINDING_TABLE: &[ChartBinding] = &[
    ChartBinding {
        chart: "Pie Chart",
        categories: CategorySlots::Fixed(&[Slice]),
        category_arity: 1..=1,
        measures: &[YValue],
        measure_arity: 1..=1,
    },
    ChartBinding {
        chart: "Stacked Column Chart",
        categories: CategorySlots::Fixed(&[XAxis, ColorStack]),
        category_arity: 1..=2,
        measures: &[YValue],
        measure_arity: 1..=1,
    },
    ChartBinding {
        chart: "Bubble Chart",
        categories: CategorySlots::Fixed(&[Label]),
        category_arity: 1..=1,
        measures: &[XAxis, YValue, Size],
        measure_arity: 2..=3,
    },
    ChartBinding {
        chart: "Line Chart",
        categories: CategorySlots::Fixed(&[Time, ColorStack]),
        category_arity: 1..=2,
        measures: &[YValue],
        measure_arity: 1..=1,
    },
    ChartBinding {
        chart: "Bar Chart",
        categories: CategorySlots::Fixed(&[XAxis]),
        category_arity: 1..=1,
        measures: &[YValue],
        measure_arity: 1..=1,
    },
    ChartBinding {
        chart: "Heat Map",
        categories: CategorySlots::Fixed(&[XAxis, YAxis]),
        category_arity: 2..=2,
        measures: &[ColorStack],
        measure_arity: 1..=1,
    },
    ChartBinding {
        chart: "Choropleth Map",
        categories: CategorySlots::Fixed(&[GeoLocation]),
        category_arity: 1..=1,
        measures: &[ColorStack, Size],
        measure_arity: 1..=2,
    },
    ChartBinding {
        chart: "Treemap",
        categories: CategorySlots::Nested,
        category_arity: 1..=usize::MAX,
        measures: &[Size],
        measure_arity: 1..=1,
    },
    ChartBinding {
        chart: "Scatter Plot",
        categories: CategorySlots::Fixed(&[ColorStack]),
        category_arity: 0..=1,
        measures: &[XAxis, YValue],
        measure_arity: 2..=2,
    },
];

/// Chart types with a known channel layout.
pub fn supported_charts() -> impl Iterator<Item = &'static str> {
    BINDING_TABLE.iter().map(|b| b.chart)
}

/// Ordered channel → attribute assignments; serialized as a JSON object
/// in assignment order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct EncodingBinding(pub Vec<(Channel, String)>);

impl EncodingBinding {
    pub fn get(&self, channel: Channel) -> Option<&str> {
        self.0.iter().find(|(c, _)| *c == channel).map(|(_, a)| a.as_str())
    }

    pub fn attributes(&self) -> impl Iterator<Item = &str> {
        self.0.iter().map(|(_, a)| a.as_str())
    }
}

impl Serialize for EncodingBinding {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.0.len()))?;
        for (c, a) in &self.0 {
            map.serialize_entry(&c.to_string(), a)?;
        }
        map.end()
    }
}

/// Assigns categories then measures to the chart's channels, in the order given.
pub fn bind_encodings(chart: &str, categories: &[&str], measures: &[&str]) -> Result<EncodingBinding> {
    let row = BINDING_TABLE
        .iter()
        .find(|b| b.chart == chart)
        .ok_or_else(|| Error::UnknownChart(chart.to_string()))?;
    if !row.category_arity.contains(&categories.len()) || !row.measure_arity.contains(&measures.len()) {
        return Err(Error::Arity {
            chart: chart.to_string(),
            categories: categories.len(),
            measures: measures.len(),
        });
    }
    let mut out = Vec::with_capacity(categories.len() + measures.len());
    for (i, c) in categories.iter().enumerate() {
        let channel = match row.categories {
            CategorySlots::Fixed(slots) => slots[i],
            CategorySlots::Nested => Nesting(i + 1),
        };
        out.push((channel, c.to_string()));
    }
    for (channel, m) in row.measures.iter().zip(measures) {
        out.push((*channel, m.to_string()));
    }
    Ok(EncodingBinding(out))
}

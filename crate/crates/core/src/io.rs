//! JSON instance format and plain-text tour files.
//!
//! An instance document has exactly one distance section:
//!
//! ```json
//! {
//!   "name": "optional",
//!   "nodes": 3,
//!   "path_gaps": [1.0, 2.0],
//!   "path_order": [0, 1, 2],
//!   "weights": [0.0, 2.0, 1.0],
//!   "start": 0,
//!   "cost_function": { "kind": "step", "steps": [{ "upto": 2.0, "rate": 0.0 }], "tail": "inf" }
//! }
//! ```
//!
//! `distances` (full matrix) and `star_center` + `star_leaf_distances` are the
//! other two forms. `path_order` defaults to `0..nodes`. Infinite rates are
//! written as the string `"inf"`. Node indices are 0-based.

use serde::{Deserialize, Serialize};

use crate::cost::CostFunction;
use crate::error::{Result, WtspError};
use crate::instance::{Metric, Tour, WTspInstance};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub nodes: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub distances: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path_gaps: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path_order: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub star_center: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub star_leaf_distances: Option<Vec<f64>>,
    pub weights: Vec<f64>,
    pub start: usize,
    pub cost_function: CostFunction,
}

impl From<&WTspInstance> for InstanceDoc {
    fn from(inst: &WTspInstance) -> Self {
        let mut doc = InstanceDoc {
            name: inst.name.clone(),
            nodes: inst.n(),
            distances: None,
            path_gaps: None,
            path_order: None,
            star_center: None,
            star_leaf_distances: None,
            weights: inst.weights.clone(),
            start: inst.start,
            cost_function: inst.cost.clone(),
        };
        match &inst.metric {
            Metric::General { distances } => doc.distances = Some(distances.clone()),
            Metric::Path { order, gaps, .. } => {
                doc.path_gaps = Some(gaps.clone());
                if order.iter().enumerate().any(|(k, &v)| k != v) {
                    doc.path_order = Some(order.clone());
                }
            }
            Metric::Star {
                center,
                leaf_distances,
            } => {
                doc.star_center = Some(*center);
                doc.star_leaf_distances = Some(leaf_distances.clone());
            }
        }
        doc
    }
}

impl TryFrom<InstanceDoc> for WTspInstance {
    type Error = WtspError;

    fn try_from(doc: InstanceDoc) -> Result<Self> {
        let sections = [
            doc.distances.is_some(),
            doc.path_gaps.is_some(),
            doc.star_leaf_distances.is_some(),
        ]
        .iter()
        .filter(|b| **b)
        .count();
        if sections != 1 {
            return Err(WtspError::InvalidInstance(
                "exactly one of distances, path_gaps, star_leaf_distances is required".into(),
            ));
        }
        let metric = if let Some(d) = doc.distances {
            Metric::general(d)
        } else if let Some(gaps) = doc.path_gaps {
            let order = doc.path_order.unwrap_or_else(|| (0..doc.nodes).collect());
            Metric::path(order, gaps)?
        } else {
            let center = doc.star_center.ok_or_else(|| {
                WtspError::InvalidInstance("star_leaf_distances needs star_center".into())
            })?;
            Metric::star(center, doc.star_leaf_distances.unwrap_or_default())
        };
        if doc.weights.len() != doc.nodes {
            return Err(WtspError::InvalidInstance(format!(
                "nodes = {} but {} weights given",
                doc.nodes,
                doc.weights.len()
            )));
        }
        let mut inst = WTspInstance::new(metric, doc.weights, doc.start, doc.cost_function)?;
        inst.name = doc.name;
        Ok(inst)
    }
}

pub fn instance_to_json(inst: &WTspInstance) -> String {
    serde_json::to_string_pretty(&InstanceDoc::from(inst)).expect("instance serializes")
}

pub fn instance_from_json(text: &str) -> Result<WTspInstance> {
    let doc: InstanceDoc = serde_json::from_str(text)
        .map_err(|e| WtspError::InvalidInstance(format!("bad instance JSON: {e}")))?;
    doc.try_into()
}

/// One node index per line.
pub fn write_tour(tour: &Tour) -> String {
    let mut s = String::new();
    for v in tour.order() {
        s.push_str(&v.to_string());
        s.push('\n');
    }
    s
}

pub fn read_tour(text: &str) -> Result<Tour> {
    let order = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .enumerate()
        .map(|(i, l)| {
            l.parse::<usize>()
                .map_err(|_| WtspError::InvalidTour(format!("line {}: not a node index: {l:?}", i + 1)))
        })
        .collect::<Result<Vec<_>>>()?;
    Tour::new(order)
}

/// Serde adapter for reals that may be infinite; `inf` is written as a string.
pub mod extended_f64 {
    use serde::de::{self, Visitor};
    use serde::{Deserializer, Serializer};
    use std::fmt;

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        if x.is_finite() {
            s.serialize_f64(*x)
        } else if x.is_nan() {
            s.serialize_str("nan")
        } else if *x > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }

    struct ExtVisitor;

    impl Visitor<'_> for ExtVisitor {
        type Value = f64;

        fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
            f.write_str("a number or \"inf\"")
        }

        fn visit_f64<E: de::Error>(self, v: f64) -> Result<f64, E> {
            Ok(v)
        }

        fn visit_i64<E: de::Error>(self, v: i64) -> Result<f64, E> {
            Ok(v as f64)
        }

        fn visit_u64<E: de::Error>(self, v: u64) -> Result<f64, E> {
            Ok(v as f64)
        }

        fn visit_str<E: de::Error>(self, v: &str) -> Result<f64, E> {
            match v.to_ascii_lowercase().as_str() {
                "inf" | "+inf" | "infinity" => Ok(f64::INFINITY),
                "-inf" | "-infinity" => Ok(f64::NEG_INFINITY),
                "nan" => Ok(f64::NAN),
                _ => Err(E::invalid_value(de::Unexpected::Str(v), &self)),
            }
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        d.deserialize_any(ExtVisitor)
    }
}

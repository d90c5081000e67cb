use std::collections::BTreeSet;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use super::{ns, ModelError, Term};
use crate::geometry::Geometry;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FeatureKind {
    Hazard,
    Region,
    Cell,
}

impl FeatureKind {
    pub fn class_iri(self) -> &'static str {
        match self {
            FeatureKind::Hazard => ns::KWG_HAZARD,
            FeatureKind::Region => ns::KWG_REGION,
            FeatureKind::Cell => ns::KWG_CELL,
        }
    }

    pub fn from_class_iri(iri: &str) -> Option<FeatureKind> {
        [FeatureKind::Hazard, FeatureKind::Region, FeatureKind::Cell]
            .into_iter()
            .find(|k| k.class_iri() == iri)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TemporalEntity {
    Instant(DateTime<Utc>),
    Interval { begin: DateTime<Utc>, end: DateTime<Utc> },
}

impl TemporalEntity {
    pub fn interval(begin: DateTime<Utc>, end: DateTime<Utc>) -> Result<Self, ModelError> {
        if begin > end {
            return Err(ModelError::InvalidTemporal(format!("interval begins after it ends: {begin} > {end}")));
        }
        Ok(TemporalEntity::Interval { begin, end })
    }

    pub fn begin(&self) -> DateTime<Utc> {
        match *self {
            TemporalEntity::Instant(t) => t,
            TemporalEntity::Interval { begin, .. } => begin,
        }
    }

    pub fn end(&self) -> DateTime<Utc> {
        match *self {
            TemporalEntity::Instant(t) => t,
            TemporalEntity::Interval { end, .. } => end,
        }
    }

    /// Closed-interval intersection.
    pub fn intersects(&self, other: &TemporalEntity) -> bool {
        self.begin() <= other.end() && other.begin() <= self.end()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Feature {
    pub iri: String,
    pub kind: FeatureKind,
    /// Specific class, a subclass of the kind's class.
    pub class_iri: String,
    pub label: String,
    pub geometry: Option<Geometry>,
    pub temporal_scope: Option<TemporalEntity>,
}

impl Feature {
    pub fn new(iri: impl Into<String>, kind: FeatureKind, class_iri: impl Into<String>, label: impl Into<String>) -> Self {
        Feature {
            iri: iri.into(),
            kind,
            class_iri: class_iri.into(),
            label: label.into(),
            geometry: None,
            temporal_scope: None,
        }
    }

    pub fn with_geometry(mut self, g: Geometry) -> Self {
        self.geometry = Some(g);
        self
    }

    pub fn with_scope(mut self, t: TemporalEntity) -> Self {
        self.temporal_scope = Some(t);
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuantityValue {
    pub numeric_value: f64,
    pub unit: String,
}

impl QuantityValue {
    pub fn new(numeric_value: f64, unit: impl Into<String>) -> Result<Self, ModelError> {
        if !numeric_value.is_finite() {
            return Err(ModelError::NonFiniteQuantity(numeric_value));
        }
        Ok(QuantityValue { numeric_value, unit: unit.into() })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ObsResult {
    Simple(Term),
    Quantity(QuantityValue),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Observation {
    pub iri: String,
    pub class_iri: String,
    pub feature_of_interest: String,
    pub observed_property: String,
    pub result: ObsResult,
    pub phenomenon_time: Option<TemporalEntity>,
    pub result_time: Option<DateTime<Utc>>,
    pub sensor: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObservableProperty {
    pub iri: String,
    pub label: String,
    pub dataset: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObservationCollection {
    pub iri: String,
    pub observed_property: String,
    pub members: BTreeSet<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Organization {
    pub iri: String,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DatasetSubgraph {
    pub iri: String,
    pub title: String,
    pub organization: String,
    pub license: Option<String>,
    pub creator: Option<String>,
    pub retrieved: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThematicSubgraph {
    pub iri: String,
    pub theme: String,
    pub datasets: BTreeSet<String>,
}

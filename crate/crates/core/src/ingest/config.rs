use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::IngestError;
use crate::kgmodel::{ns, FeatureKind};

fn default_level() -> u8 {
    13
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GeometryFormat {
    #[serde(rename = "WKT", alias = "wkt")]
    Wkt,
    #[serde(rename = "GeoJSON", alias = "geojson")]
    GeoJson,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeometrySpec {
    pub column: String,
    pub format: GeometryFormat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TimeKind {
    Instant,
    Interval,
}

/// One column for an instant, two (begin, end) for an interval.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TimeSpec {
    pub columns: Vec<String>,
    pub kind: TimeKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode")]
pub enum ResultMode {
    /// Literal result; the datatype is inferred per value unless given.
    Simple {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        datatype: Option<String>,
    },
    /// Numeric value with a unit.
    Quantity { unit: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropertyMapping {
    pub column: String,
    pub property: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub observation_class: String,
    pub result: ResultMode,
}

/// Declarative recipe turning a table into kernel entities.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MappingConfig {
    pub dataset_id: String,
    pub foi_kind: FeatureKind,
    pub foi_class: String,
    pub foi_key_column: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label_column: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub geometry: Option<GeometrySpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time: Option<TimeSpec>,
    #[serde(default)]
    pub properties: Vec<PropertyMapping>,
    #[serde(default = "default_level")]
    pub integration_level: u8,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub dataset_id: String,
    pub title: String,
    pub source_organization: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub license: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub creator: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub retrieval_date: Option<String>,
}

pub(super) fn resolve_iri(s: &str) -> Result<String, IngestError> {
    ns::resolve(s).ok_or_else(|| IngestError::Config(format!("cannot resolve IRI {s:?}")))
}

impl DatasetManifest {
    pub fn check(&self) -> Result<(), IngestError> {
        if self.dataset_id.trim().is_empty() || self.title.trim().is_empty() {
            return Err(IngestError::Config("manifest needs a dataset_id and a title".into()));
        }
        Ok(())
    }
}

impl MappingConfig {
    /// Check the config against a source header.
    pub fn check(&self, header: &[String]) -> Result<(), IngestError> {
        if self.dataset_id.trim().is_empty() {
            return Err(IngestError::Config("empty dataset_id".into()));
        }
        if self.foi_kind == FeatureKind::Cell {
            return Err(IngestError::Config("tables map to Hazard or Region features; cells come from the grid".into()));
        }
        if self.integration_level > crate::dgg::MAX_LEVEL {
            return Err(IngestError::Config(format!("integration_level {} exceeds {}", self.integration_level, crate::dgg::MAX_LEVEL)));
        }
        resolve_iri(&self.foi_class)?;
        let mut columns: Vec<&str> = vec![&self.foi_key_column];
        columns.extend(self.label_column.as_deref());
        columns.extend(self.geometry.as_ref().map(|g| g.column.as_str()));
        if let Some(t) = &self.time {
            let want = match t.kind {
                TimeKind::Instant => 1,
                TimeKind::Interval => 2,
            };
            if t.columns.len() != want {
                return Err(IngestError::Config(format!("{:?} time needs {want} column(s)", t.kind)));
            }
            columns.extend(t.columns.iter().map(String::as_str));
        }
        let mut seen = HashSet::new();
        for p in &self.properties {
            columns.push(&p.column);
            let iri = resolve_iri(&p.property)?;
            resolve_iri(&p.observation_class)?;
            if let ResultMode::Quantity { unit } = &p.result {
                resolve_iri(unit)?;
            }
            if let ResultMode::Simple { datatype: Some(dt) } = &p.result {
                resolve_iri(dt)?;
            }
            if !seen.insert(iri.clone()) {
                return Err(IngestError::DuplicateProperty(iri));
            }
        }
        for c in columns {
            if !header.iter().any(|h| h == c) {
                return Err(IngestError::MissingColumn(c.to_string()));
            }
        }
        Ok(())
    }
}

//! Area briefings: what is related to a cell or feature, what was observed
//! there, and where those observations came from.

use std::collections::{BTreeMap, BTreeSet};

use chrono::{DateTime, Utc};
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::dgg::{CellId, CellPolygon};
use crate::geometry::{parse_wkt, SpatialPredicate};
use crate::kgmodel::{cell_iri, encode_key, ns, parse_date_time, FeatureKind, Term};
use crate::store::Store;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BriefingError {
    #[error("unknown target {0}")]
    NotFound(String),
    #[error("bad target: {0}")]
    BadTarget(String),
    #[error("bad time window: {0}")]
    BadTimeWindow(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TargetRef {
    /// Cell token.
    Cell(String),
    /// Feature IRI, CURIE or resource key.
    Feature(String),
}

/// Closed time window; either end may be open.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct TimeWindow {
    pub from: Option<DateTime<Utc>>,
    pub to: Option<DateTime<Utc>>,
}

impl TimeWindow {
    pub fn parse(from: Option<&str>, to: Option<&str>) -> Result<Self, BriefingError> {
        let p = |s: Option<&str>| {
            s.map(|s| parse_date_time(s).map_err(|e| BriefingError::BadTimeWindow(e.to_string()))).transpose()
        };
        let w = TimeWindow { from: p(from)?, to: p(to)? };
        if let (Some(a), Some(b)) = (w.from, w.to) {
            if a > b {
                return Err(BriefingError::BadTimeWindow(format!("{a} is after {b}")));
            }
        }
        Ok(w)
    }

    pub fn is_open(&self) -> bool {
        self.from.is_none() && self.to.is_none()
    }

    pub fn admits(&self, span: Option<(DateTime<Utc>, DateTime<Utc>)>) -> bool {
        match span {
            None => true,
            Some((begin, end)) => self.from.is_none_or(|f| end >= f) && self.to.is_none_or(|t| begin <= t),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TargetInfo {
    pub iri: String,
    pub kind: Option<FeatureKind>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub token: Option<String>,
    pub label: String,
    /// GeoJSON geometry, when the target has one.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub geometry: Option<Value>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeatureEntry {
    pub iri: String,
    pub kind: Option<FeatureKind>,
    pub class: String,
    pub label: String,
    /// Predicate from the target to this feature, e.g. `sfWithin`.
    pub relation: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub time: Option<TimeSpan>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub geometry: Option<Value>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TimeSpan {
    pub begin: DateTime<Utc>,
    pub end: DateTime<Utc>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ObservationEntry {
    pub iri: String,
    pub class: String,
    pub foi: String,
    /// Number for numeric literals, string otherwise.
    pub result: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub datatype: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub unit: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub time: Option<TimeSpan>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropertyGroup {
    pub property: String,
    pub label: String,
    pub dataset: Option<String>,
    pub observations: Vec<ObservationEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct OrganizationInfo {
    pub iri: String,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct ProvenanceEntry {
    pub dataset: String,
    pub title: String,
    pub organization: Option<OrganizationInfo>,
    pub properties: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub property: String,
    pub label: String,
    pub a: Vec<ObservationEntry>,
    pub b: Vec<ObservationEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Comparison {
    pub other: Box<Briefing>,
    /// Properties observed for both targets.
    pub rows: Vec<ComparisonRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Briefing {
    pub target: TargetInfo,
    #[serde(skip_serializing_if = "TimeWindow::is_open")]
    pub time_window: TimeWindow,
    pub features: Vec<FeatureEntry>,
    pub observations: Vec<PropertyGroup>,
    pub provenance: Vec<ProvenanceEntry>,
    /// Reserved; always empty.
    pub experts: Vec<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub comparison: Option<Comparison>,
}

fn iri(s: &str) -> Term {
    Term::iri(s)
}

fn first_object(store: &Store, s: &str, p: &str) -> Option<Term> {
    store.objects(&iri(s), &iri(p)).into_iter().next()
}

fn label_of(store: &Store, s: &str) -> Option<String> {
    first_object(store, s, ns::RDFS_LABEL).map(|t| t.value().to_string())
}

/// Kind reached from `class` through the class hierarchy.
fn kind_of(store: &Store, class: &str) -> Option<FeatureKind> {
    let sub = iri(ns::RDFS_SUBCLASS_OF);
    let mut seen = BTreeSet::new();
    let mut stack = vec![class.to_string()];
    while let Some(c) = stack.pop() {
        if let Some(k) = FeatureKind::from_class_iri(&c) {
            return Some(k);
        }
        if seen.insert(c.clone()) {
            stack.extend(store.objects(&iri(&c), &sub).iter().filter_map(|t| t.as_iri().map(str::to_string)));
        }
    }
    None
}

/// Stored geometry of `s` as GeoJSON.
fn geometry_of(store: &Store, s: &str) -> Option<Value> {
    let node = first_object(store, s, ns::GEO_HAS_GEOMETRY)?;
    let wkt = first_object(store, node.as_iri()?, ns::GEO_AS_WKT)?;
    parse_wkt(wkt.value()).ok().map(|g| g.to_geojson())
}

fn instant(store: &Store, node: &str) -> Option<DateTime<Utc>> {
    first_object(store, node, ns::TIME_IN_XSD_DATE_TIME).and_then(|t| parse_date_time(t.value()).ok())
}

/// Begin and end of a temporal node (an instant has begin = end).
fn span(store: &Store, node: &str) -> Option<TimeSpan> {
    if let Some(at) = instant(store, node) {
        return Some(TimeSpan { begin: at, end: at });
    }
    let part = |p| first_object(store, node, p).and_then(|t| t.as_iri().and_then(|n| instant(store, n)));
    Some(TimeSpan { begin: part(ns::TIME_HAS_BEGINNING)?, end: part(ns::TIME_HAS_END)? })
}

fn span_via(store: &Store, s: &str, p: &str) -> Option<TimeSpan> {
    first_object(store, s, p).and_then(|t| t.as_iri().and_then(|n| span(store, n)))
}

fn admits(w: &TimeWindow, s: Option<TimeSpan>) -> bool {
    w.admits(s.map(|s| (s.begin, s.end)))
}

fn result_json(t: &Term) -> Value {
    match t.as_f64() {
        Some(v) if v.is_finite() => json!(v),
        _ => json!(t.value()),
    }
}

/// Resolve a target to its IRI. Any valid cell token resolves, whether or
/// not the cell is materialized; features must be present in the store.
pub fn resolve_target(store: &Store, target: &TargetRef) -> Result<TargetInfo, BriefingError> {
    match target {
        TargetRef::Cell(token) => {
            let cell = CellId::from_token(token).map_err(|e| BriefingError::BadTarget(e.to_string()))?;
            let iri = cell_iri(cell);
            Ok(TargetInfo {
                geometry: Some(CellPolygon::new(cell).to_geometry().to_geojson()),
                label: label_of(store, &iri).unwrap_or_else(|| format!("S2 cell {}", cell.token())),
                iri,
                kind: Some(FeatureKind::Cell),
                token: Some(cell.token()),
            })
        }
        TargetRef::Feature(key) => {
            if key.trim().is_empty() {
                return Err(BriefingError::BadTarget("empty region".into()));
            }
            let candidates = [ns::resolve(key), Some(format!("{}{}", ns::KWGR, encode_key(key)))];
            let ty = iri(ns::RDF_TYPE);
            for c in candidates.into_iter().flatten() {
                if let Some(class) = store.objects(&iri(&c), &ty).into_iter().next() {
                    return Ok(TargetInfo {
                        geometry: geometry_of(store, &c),
                        label: label_of(store, &c).unwrap_or_else(|| c.clone()),
                        kind: kind_of(store, class.value()),
                        token: None,
                        iri: c,
                    });
                }
            }
            Err(BriefingError::NotFound(key.clone()))
        }
    }
}

fn related_features(store: &Store, target: &str, window: &TimeWindow) -> Vec<FeatureEntry> {
    let mut out = Vec::new();
    for p in SpatialPredicate::ALL {
        let pred = format!("{}{}", ns::KWG_ONT, p.local_name());
        for f in store.objects(&iri(target), &iri(&pred)) {
            let Some(f) = f.as_iri() else { continue };
            let time = span_via(store, f, ns::KWG_HAS_TEMPORAL_SCOPE);
            if !admits(window, time) {
                continue;
            }
            let class = first_object(store, f, ns::RDF_TYPE).map(|t| t.value().to_string()).unwrap_or_default();
            out.push(FeatureEntry {
                iri: f.to_string(),
                kind: kind_of(store, &class),
                class,
                label: label_of(store, f).unwrap_or_else(|| f.to_string()),
                relation: p.local_name().to_string(),
                time,
                geometry: geometry_of(store, f),
            });
        }
    }
    out.sort_by(|a, b| (&a.iri, &a.relation).cmp(&(&b.iri, &b.relation)));
    out
}

fn observation_entry(store: &Store, obs: &str, foi: &str) -> Option<(String, ObservationEntry)> {
    let prop = first_object(store, obs, ns::SOSA_OBSERVED_PROPERTY)?.as_iri()?.to_string();
    let (result, datatype, unit) = if let Some(lit) = first_object(store, obs, ns::SOSA_HAS_SIMPLE_RESULT) {
        (result_json(&lit), lit.datatype().map(str::to_string), None)
    } else {
        let node = first_object(store, obs, ns::SOSA_HAS_RESULT)?;
        let node = node.as_iri()?;
        let v = first_object(store, node, ns::QUDT_NUMERIC_VALUE)?;
        let unit = first_object(store, node, ns::QUDT_UNIT_PROP).map(|u| u.value().to_string());
        (result_json(&v), v.datatype().map(str::to_string), unit)
    };
    Some((
        prop,
        ObservationEntry {
            iri: obs.to_string(),
            class: first_object(store, obs, ns::RDF_TYPE).map(|t| t.value().to_string()).unwrap_or_default(),
            foi: foi.to_string(),
            result,
            datatype,
            unit,
            time: span_via(store, obs, ns::SOSA_PHENOMENON_TIME),
        },
    ))
}

fn observations(store: &Store, fois: &BTreeSet<String>, window: &TimeWindow) -> Vec<PropertyGroup> {
    let mut groups: BTreeMap<String, Vec<ObservationEntry>> = BTreeMap::new();
    for foi in fois {
        for obs in store.objects(&iri(foi), &iri(ns::SOSA_IS_FOI_OF)) {
            let Some(obs) = obs.as_iri() else { continue };
            if let Some((prop, e)) = observation_entry(store, obs, foi) {
                if admits(window, e.time) {
                    groups.entry(prop).or_default().push(e);
                }
            }
        }
    }
    groups
        .into_iter()
        .map(|(property, mut observations)| {
            observations.sort_by(|a, b| a.iri.cmp(&b.iri));
            PropertyGroup {
                label: label_of(store, &property).unwrap_or_else(|| ns::local_name(&property).to_string()),
                dataset: first_object(store, &property, ns::KWG_FROM_DATASET).map(|t| t.value().to_string()),
                property,
                observations,
            }
        })
        .collect()
}

fn provenance(store: &Store, groups: &[PropertyGroup]) -> Vec<ProvenanceEntry> {
    let mut by_dataset: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for g in groups {
        if let Some(d) = &g.dataset {
            by_dataset.entry(d.clone()).or_default().push(g.property.clone());
        }
    }
    by_dataset
        .into_iter()
        .map(|(dataset, properties)| {
            let organization = first_object(store, &dataset, ns::KWG_SOURCE_ORGANIZATION)
                .and_then(|o| o.as_iri().map(str::to_string))
                .map(|o| OrganizationInfo { label: label_of(store, &o).unwrap_or_else(|| o.clone()), iri: o });
            ProvenanceEntry {
                title: first_object(store, &dataset, ns::KWG_TITLE).map(|t| t.value().to_string()).unwrap_or_default(),
                dataset,
                organization,
                properties,
            }
        })
        .collect()
}

/// Briefing for one target, optionally restricted to a time window.
pub fn briefing(store: &Store, target: &TargetRef, window: TimeWindow) -> Result<Briefing, BriefingError> {
    let info = resolve_target(store, target)?;
    let features = related_features(store, &info.iri, &window);
    let mut fois: BTreeSet<String> = features.iter().map(|f| f.iri.clone()).collect();
    fois.insert(info.iri.clone());
    let groups = observations(store, &fois, &window);
    Ok(Briefing {
        provenance: provenance(store, &groups),
        target: info,
        time_window: window,
        features,
        observations: groups,
        experts: vec![],
        comparison: None,
    })
}

/// Observations made on the target itself, by property.
fn direct(b: &Briefing) -> BTreeMap<&str, (&str, Vec<ObservationEntry>)> {
    b.observations
        .iter()
        .filter_map(|g| {
            let own: Vec<ObservationEntry> = g.observations.iter().filter(|o| o.foi == b.target.iri).cloned().collect();
            (!own.is_empty()).then_some((g.property.as_str(), (g.label.as_str(), own)))
        })
        .collect()
}

/// Briefing for `a` with `b` alongside, plus a row per property observed
/// directly on both targets.
pub fn compare(store: &Store, a: &TargetRef, b: &TargetRef) -> Result<Briefing, BriefingError> {
    let mut left = briefing(store, a, TimeWindow::default())?;
    let right = briefing(store, b, TimeWindow::default())?;
    let theirs = direct(&right);
    let rows = direct(&left)
        .into_iter()
        .filter_map(|(property, (label, mine))| {
            theirs.get(property).map(|(_, other)| ComparisonRow {
                property: property.to_string(),
                label: label.to_string(),
                a: mine,
                b: other.clone(),
            })
        })
        .collect();
    left.comparison = Some(Comparison { other: Box::new(right), rows });
    Ok(left)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DatasetInfo {
    pub iri: String,
    pub title: String,
    pub organization: Option<OrganizationInfo>,
    pub license: Option<String>,
    pub creator: Option<String>,
    pub retrieved: Option<String>,
    pub properties: Vec<String>,
    pub themes: Vec<String>,
}

/// Every dataset subgraph with its metadata, properties and themes.
pub fn datasets(store: &Store) -> Vec<DatasetInfo> {
    let ty = iri(ns::RDF_TYPE);
    let mut out: Vec<DatasetInfo> = store
        .subjects(&ty, &iri(ns::KWG_DATASET_SUBGRAPH))
        .into_iter()
        .filter_map(|d| d.as_iri().map(str::to_string))
        .map(|d| {
            let get = |p| first_object(store, &d, p).map(|t| t.value().to_string());
            let organization = get(ns::KWG_SOURCE_ORGANIZATION)
                .map(|o| OrganizationInfo { label: label_of(store, &o).unwrap_or_else(|| o.clone()), iri: o });
            let mut properties: Vec<String> =
                store.subjects(&iri(ns::KWG_FROM_DATASET), &iri(&d)).iter().map(|t| t.value().to_string()).collect();
            properties.sort();
            let mut themes: Vec<String> = store
                .subjects(&iri(ns::KWG_HAS_DATASET), &iri(&d))
                .iter()
                .filter_map(|th| first_object(store, th.value(), ns::KWG_THEME).map(|t| t.value().to_string()))
                .collect();
            themes.sort();
            DatasetInfo {
                title: get(ns::KWG_TITLE).unwrap_or_default(),
                organization,
                license: get(ns::KWG_LICENSE),
                creator: get(ns::KWG_CREATOR),
                retrieved: get(ns::KWG_RETRIEVED),
                properties,
                themes,
                iri: d,
            }
        })
        .collect();
    out.sort_by(|a, b| a.iri.cmp(&b.iri));
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Section {
    Features,
    Observations,
    Provenance,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EquivalentQuery {
    pub section: Section,
    pub query: String,
}

/// Queries whose answers, taken together, reproduce the sections of an
/// unwindowed briefing of `target_iri`: the `?feature` bindings give the
/// feature list, `?obs` the observations and `?dataset`/`?org` the
/// provenance block.
pub fn equivalent_queries(target_iri: &str) -> Vec<EquivalentQuery> {
    let t = format!("<{target_iri}>");
    let mut out = vec![
        EquivalentQuery {
            section: Section::Observations,
            query: format!("SELECT DISTINCT ?obs WHERE {{ {t} sosa:isFeatureOfInterestOf ?obs . }}"),
        },
        EquivalentQuery {
            section: Section::Provenance,
            query: format!(
                "SELECT DISTINCT ?dataset ?org WHERE {{ {t} sosa:isFeatureOfInterestOf ?obs . \
                 ?obs sosa:observedProperty ?p . ?p kwg-ont:fromDataset ?dataset . \
                 ?dataset kwg-ont:sourceOrganization ?org . }}"
            ),
        },
    ];
    for p in SpatialPredicate::ALL {
        let rel = format!("kwg-ont:{}", p.local_name());
        out.push(EquivalentQuery {
            section: Section::Features,
            query: format!("SELECT DISTINCT ?feature WHERE {{ {t} {rel} ?feature . }}"),
        });
        out.push(EquivalentQuery {
            section: Section::Observations,
            query: format!("SELECT DISTINCT ?obs WHERE {{ {t} {rel} ?f . ?f sosa:isFeatureOfInterestOf ?obs . }}"),
        });
        out.push(EquivalentQuery {
            section: Section::Provenance,
            query: format!(
                "SELECT DISTINCT ?dataset ?org WHERE {{ {t} {rel} ?f . ?f sosa:isFeatureOfInterestOf ?obs . \
                 ?obs sosa:observedProperty ?p . ?p kwg-ont:fromDataset ?dataset . \
                 ?dataset kwg-ont:sourceOrganization ?org . }}"
            ),
        });
    }
    out
}

//! Entity → triple emission and IRI minting.

use std::collections::HashSet;

use super::entity::*;
use super::{ns, ModelError, Term, Triple};
use crate::dgg::CellId;
use crate::geometry::{serialize_wkt, SpatialPredicate};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MintKind<'a> {
    Region,
    Hazard,
    /// Key is a cell token.
    Cell,
    /// Key is the feature-of-interest key.
    Observation { dataset: &'a str, property: &'a str },
    Dataset,
    Organization,
    /// Key is the property IRI.
    Collection { dataset: &'a str },
    Theme,
}

/// Percent-encode everything outside the unreserved set.
pub fn encode_key(key: &str) -> String {
    let mut out = String::with_capacity(key.len());
    for b in key.bytes() {
        if b.is_ascii_alphanumeric() || matches!(b, b'-' | b'.' | b'_' | b'~') {
            out.push(b as char);
        } else {
            out.push_str(&format!("%{b:02X}"));
        }
    }
    out
}

/// Deterministic resource IRI for an entity.
pub fn mint_iri(kind: MintKind<'_>, key: &str) -> Result<String, ModelError> {
    if key.is_empty() {
        return Err(ModelError::EmptyKey);
    }
    let local = match kind {
        MintKind::Region => encode_key(key),
        MintKind::Hazard => format!("hazard.{}", encode_key(key)),
        MintKind::Cell => {
            let cell = CellId::from_token(key).map_err(|e| ModelError::InvalidKey(e.to_string()))?;
            format!("s2.level{}.{}", cell.level(), cell.token())
        }
        MintKind::Observation { dataset, property } => format!(
            "observation.{}.{}.{}",
            encode_key(dataset),
            encode_key(key),
            encode_key(ns::local_name(property))
        ),
        MintKind::Dataset => format!("dataset.{}", encode_key(key)),
        MintKind::Organization => format!("organization.{}", slug(key)),
        MintKind::Collection { dataset } => {
            format!("collection.{}.{}", encode_key(dataset), encode_key(ns::local_name(key)))
        }
        MintKind::Theme => format!("theme.{}", slug(key)),
    };
    Ok(format!("{}{}", ns::KWGR, local))
}

pub fn cell_iri(c: CellId) -> String {
    format!("{}s2.level{}.{}", ns::KWGR, c.level(), c.token())
}

/// Lowercase, runs of non-alphanumerics collapsed to `-`.
fn slug(s: &str) -> String {
    let mut out = String::new();
    for c in s.chars() {
        if c.is_ascii_alphanumeric() {
            out.push(c.to_ascii_lowercase());
        } else if !out.ends_with('-') && !out.is_empty() {
            out.push('-');
        }
    }
    while out.ends_with('-') {
        out.pop();
    }
    if out.is_empty() {
        encode_key(s)
    } else {
        out
    }
}

fn t(s: &str, p: &str, o: Term) -> Triple {
    Triple::iri(s, p, o)
}

fn type_of(s: &str, class: &str) -> Triple {
    t(s, ns::RDF_TYPE, Term::iri(class))
}

/// Triples for a temporal entity hung off `subject` via `predicate`;
/// `node` names the temporal node.
pub fn emit_temporal(subject: &str, predicate: &str, node: &str, te: &TemporalEntity) -> Vec<Triple> {
    let mut out = vec![t(subject, predicate, Term::iri(node))];
    match te {
        TemporalEntity::Instant(at) => {
            out.push(type_of(node, ns::TIME_INSTANT));
            out.push(t(node, ns::TIME_IN_XSD_DATE_TIME, Term::date_time(at)));
        }
        TemporalEntity::Interval { begin, end } => {
            out.push(type_of(node, ns::TIME_INTERVAL));
            for (prop, suffix, at) in [(ns::TIME_HAS_BEGINNING, "begin", begin), (ns::TIME_HAS_END, "end", end)] {
                let inst = format!("{node}.{suffix}");
                out.push(t(node, prop, Term::iri(&inst)));
                out.push(type_of(&inst, ns::TIME_INSTANT));
                out.push(t(&inst, ns::TIME_IN_XSD_DATE_TIME, Term::date_time(at)));
            }
        }
    }
    out
}

/// Type, label, geometry node and temporal scope of a feature. The kind
/// class is reached through the class hierarchy (see [`emit_subclass`]).
pub fn emit_feature(f: &Feature) -> Vec<Triple> {
    let mut out = vec![type_of(&f.iri, &f.class_iri), t(&f.iri, ns::RDFS_LABEL, Term::string(&f.label))];
    if let Some(g) = &f.geometry {
        let node = format!("{}.geometry", f.iri);
        out.push(t(&f.iri, ns::GEO_HAS_GEOMETRY, Term::iri(&node)));
        out.push(type_of(&node, ns::GEO_GEOMETRY));
        out.push(t(
            &node,
            ns::GEO_AS_WKT,
            Term::Literal { lexical: serialize_wkt(g), datatype: ns::GEO_WKT_LITERAL.to_string() },
        ));
    }
    if let Some(te) = &f.temporal_scope {
        out.extend(emit_temporal(&f.iri, ns::KWG_HAS_TEMPORAL_SCOPE, &format!("{}.temporal", f.iri), te));
    }
    out
}

/// Lookup of entities already known to the graph being built.
pub trait Catalog {
    fn has_feature(&self, iri: &str) -> bool;
    fn has_property(&self, iri: &str) -> bool;
}

#[derive(Debug, Default, Clone)]
pub struct KnownEntities {
    pub features: HashSet<String>,
    pub properties: HashSet<String>,
}

impl Catalog for KnownEntities {
    fn has_feature(&self, iri: &str) -> bool {
        self.features.contains(iri)
    }

    fn has_property(&self, iri: &str) -> bool {
        self.properties.contains(iri)
    }
}

pub fn emit_observation(o: &Observation, catalog: &dyn Catalog) -> Result<Vec<Triple>, ModelError> {
    if !catalog.has_feature(&o.feature_of_interest) {
        return Err(ModelError::DanglingFoi(o.feature_of_interest.clone()));
    }
    if !catalog.has_property(&o.observed_property) {
        return Err(ModelError::DanglingProperty(o.observed_property.clone()));
    }
    let mut out = vec![
        type_of(&o.iri, &o.class_iri),
        t(&o.iri, ns::SOSA_HAS_FOI, Term::iri(&o.feature_of_interest)),
        t(&o.iri, ns::SOSA_OBSERVED_PROPERTY, Term::iri(&o.observed_property)),
    ];
    match &o.result {
        ObsResult::Simple(lit) => out.push(t(&o.iri, ns::SOSA_HAS_SIMPLE_RESULT, lit.clone())),
        ObsResult::Quantity(q) => {
            let node = format!("{}.result", o.iri);
            out.push(t(&o.iri, ns::SOSA_HAS_RESULT, Term::iri(&node)));
            out.push(type_of(&node, ns::KWG_QUANTITY));
            out.push(t(&node, ns::QUDT_NUMERIC_VALUE, Term::double(q.numeric_value)));
            out.push(t(&node, ns::QUDT_UNIT_PROP, Term::iri(&q.unit)));
        }
    }
    if let Some(te) = &o.phenomenon_time {
        out.extend(emit_temporal(&o.iri, ns::SOSA_PHENOMENON_TIME, &format!("{}.phenomenonTime", o.iri), te));
    }
    if let Some(at) = &o.result_time {
        let te = TemporalEntity::Instant(*at);
        out.extend(emit_temporal(&o.iri, ns::SOSA_RESULT_TIME, &format!("{}.resultTime", o.iri), &te));
    }
    if let Some(sensor) = &o.sensor {
        out.push(t(&o.iri, ns::SOSA_MADE_BY_SENSOR, Term::iri(sensor)));
    }
    Ok(out)
}

/// Inverse feature-of-interest link, so queries can walk from a feature to
/// its observations.
pub fn emit_foi_inverse(o: &Observation) -> Triple {
    t(&o.feature_of_interest, ns::SOSA_IS_FOI_OF, Term::iri(&o.iri))
}

fn relation_triples(ns_iri: &str, a: &str, p: SpatialPredicate, b: &str) -> Vec<Triple> {
    if p == SpatialPredicate::Disjoint {
        return vec![];
    }
    let forward = t(a, &format!("{ns_iri}{}", p.local_name()), Term::iri(b));
    let backward = t(b, &format!("{ns_iri}{}", p.converse().local_name()), Term::iri(a));
    if a == b && p.is_symmetric() {
        vec![forward]
    } else {
        vec![forward, backward]
    }
}

/// `a kwg-ont:sf<P> b` plus its converse (`sfContains` for `sfWithin`, the
/// same predicate for symmetric ones). Disjointness is not materialized.
pub fn emit_spatial_relation(a: &str, p: SpatialPredicate, b: &str) -> Vec<Triple> {
    relation_triples(ns::KWG_ONT, a, p, b)
}

/// Region–region relation under both the `kwg-ont:` and `geo:` names.
pub fn emit_region_relation(a: &str, p: SpatialPredicate, b: &str) -> Vec<Triple> {
    let mut out = relation_triples(ns::KWG_ONT, a, p, b);
    out.extend(relation_triples(ns::GEO, a, p, b));
    out
}

pub fn emit_subclass(sub: &str, sup: &str) -> Triple {
    t(sub, ns::RDFS_SUBCLASS_OF, Term::iri(sup))
}

/// Fixed class hierarchy of the kernel.
pub fn schema_triples() -> Vec<Triple> {
    let mut out = vec![
        emit_subclass(ns::KWG_S2_CELL, ns::KWG_CELL),
        emit_subclass(ns::KWG_QUANTITY, ns::KWG_QUANTITY_VALUE),
    ];
    for kind in [ns::KWG_HAZARD, ns::KWG_REGION, ns::KWG_CELL] {
        out.push(emit_subclass(kind, ns::SOSA_FEATURE_OF_INTEREST));
        out.push(emit_subclass(kind, ns::GEO_FEATURE));
    }
    out
}

pub fn emit_property(p: &ObservableProperty) -> Vec<Triple> {
    vec![
        type_of(&p.iri, ns::SOSA_OBSERVABLE_PROPERTY),
        t(&p.iri, ns::RDFS_LABEL, Term::string(&p.label)),
        t(&p.iri, ns::KWG_FROM_DATASET, Term::iri(&p.dataset)),
    ]
}

pub fn emit_collection(c: &ObservationCollection) -> Result<Vec<Triple>, ModelError> {
    if c.members.is_empty() {
        return Err(ModelError::EmptyCollection(c.iri.clone()));
    }
    let mut out = vec![
        type_of(&c.iri, ns::SOSA_OBSERVATION_COLLECTION),
        t(&c.iri, ns::SOSA_OBSERVED_PROPERTY, Term::iri(&c.observed_property)),
    ];
    out.extend(c.members.iter().map(|m| t(&c.iri, ns::SOSA_HAS_MEMBER, Term::iri(m))));
    Ok(out)
}

pub fn emit_organization(o: &Organization) -> Vec<Triple> {
    vec![type_of(&o.iri, ns::KWG_ORGANIZATION), t(&o.iri, ns::RDFS_LABEL, Term::string(&o.label))]
}

pub fn emit_dataset(d: &DatasetSubgraph) -> Vec<Triple> {
    let mut out = vec![
        type_of(&d.iri, ns::KWG_DATASET_SUBGRAPH),
        t(&d.iri, ns::KWG_TITLE, Term::string(&d.title)),
        t(&d.iri, ns::KWG_SOURCE_ORGANIZATION, Term::iri(&d.organization)),
    ];
    if let Some(l) = &d.license {
        out.push(t(&d.iri, ns::KWG_LICENSE, Term::string(l)));
    }
    if let Some(c) = &d.creator {
        out.push(t(&d.iri, ns::KWG_CREATOR, Term::string(c)));
    }
    if let Some(r) = &d.retrieved {
        let lit = Term::typed(r.as_str(), ns::XSD_DATE).unwrap_or_else(|_| Term::string(r));
        out.push(t(&d.iri, ns::KWG_RETRIEVED, lit));
    }
    out
}

pub fn emit_theme(th: &ThematicSubgraph) -> Vec<Triple> {
    let mut out = vec![
        type_of(&th.iri, ns::KWG_THEMATIC_SUBGRAPH),
        t(&th.iri, ns::KWG_THEME, Term::string(&th.theme)),
    ];
    out.extend(th.datasets.iter().map(|d| t(&th.iri, ns::KWG_HAS_DATASET, Term::iri(d))));
    out
}

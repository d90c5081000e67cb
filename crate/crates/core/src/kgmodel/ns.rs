//! Fixed namespace table and the vocabulary terms the model emits.

macro_rules! iri {
    (kwg, $l:literal) => { concat!("http://stko-kwg.geog.ucsb.edu/lod/ontology/", $l) };
    (kwgr, $l:literal) => { concat!("http://stko-kwg.geog.ucsb.edu/lod/resource/", $l) };
    (sosa, $l:literal) => { concat!("http://www.w3.org/ns/sosa/", $l) };
    (geo, $l:literal) => { concat!("http://www.opengis.net/ont/geosparql#", $l) };
    (rdf, $l:literal) => { concat!("http://www.w3.org/1999/02/22-rdf-syntax-ns#", $l) };
    (rdfs, $l:literal) => { concat!("http://www.w3.org/2000/01/rdf-schema#", $l) };
    (xsd, $l:literal) => { concat!("http://www.w3.org/2001/XMLSchema#", $l) };
    (time, $l:literal) => { concat!("http://www.w3.org/2006/time#", $l) };
    (qudt, $l:literal) => { concat!("http://qudt.org/vocab/unit/", $l) };
}

pub const KWG_ONT: &str = iri!(kwg, "");
pub const KWGR: &str = iri!(kwgr, "");
pub const SOSA: &str = iri!(sosa, "");
pub const GEO: &str = iri!(geo, "");
pub const RDF: &str = iri!(rdf, "");
pub const RDFS: &str = iri!(rdfs, "");
pub const XSD: &str = iri!(xsd, "");
pub const TIME: &str = iri!(time, "");
pub const QUDT_UNIT: &str = iri!(qudt, "");

/// Prefix table, in the order used for Turtle output.
pub const PREFIXES: [(&str, &str); 9] = [
    ("kwg-ont", KWG_ONT),
    ("kwgr", KWGR),
    ("sosa", SOSA),
    ("geo", GEO),
    ("rdf", RDF),
    ("rdfs", RDFS),
    ("xsd", XSD),
    ("time", TIME),
    ("qudt-unit", QUDT_UNIT),
];

pub fn namespace(prefix: &str) -> Option<&'static str> {
    PREFIXES.iter().find(|(p, _)| *p == prefix).map(|(_, ns)| *ns)
}

/// Expand `prefix:local` against the fixed table.
pub fn expand(curie: &str) -> Option<String> {
    let (prefix, local) = curie.split_once(':')?;
    namespace(prefix).map(|ns| format!("{ns}{local}"))
}

/// Expand a CURIE, or accept an absolute IRI as is (optionally in angle
/// brackets).
pub fn resolve(s: &str) -> Option<String> {
    if let Some(inner) = s.strip_prefix('<').and_then(|x| x.strip_suffix('>')) {
        return Some(inner.to_string());
    }
    if s.starts_with("http://") || s.starts_with("https://") || s.starts_with("urn:") {
        return Some(s.to_string());
    }
    expand(s)
}

/// Split an IRI into the longest matching prefix and its local part.
pub fn compact(iri: &str) -> Option<(&'static str, &str)> {
    PREFIXES
        .iter()
        .filter(|(_, ns)| iri.starts_with(ns))
        .max_by_key(|(_, ns)| ns.len())
        .map(|(p, ns)| (*p, &iri[ns.len()..]))
}

/// Local name after the last `/`, `#` or `:`.
pub fn local_name(iri: &str) -> &str {
    iri.rsplit(['/', '#', ':']).next().unwrap_or(iri)
}

pub const RDF_TYPE: &str = iri!(rdf, "type");
pub const RDFS_LABEL: &str = iri!(rdfs, "label");
pub const RDFS_SUBCLASS_OF: &str = iri!(rdfs, "subClassOf");

pub const XSD_STRING: &str = iri!(xsd, "string");
pub const XSD_INTEGER: &str = iri!(xsd, "integer");
pub const XSD_DECIMAL: &str = iri!(xsd, "decimal");
pub const XSD_DOUBLE: &str = iri!(xsd, "double");
pub const XSD_BOOLEAN: &str = iri!(xsd, "boolean");
pub const XSD_DATE: &str = iri!(xsd, "date");
pub const XSD_DATE_TIME: &str = iri!(xsd, "dateTime");

pub const KWG_HAZARD: &str = iri!(kwg, "Hazard");
pub const KWG_REGION: &str = iri!(kwg, "Region");
pub const KWG_CELL: &str = iri!(kwg, "Cell");
pub const KWG_S2_CELL: &str = iri!(kwg, "S2Cell");
pub const KWG_QUANTITY: &str = iri!(kwg, "Quantity");
pub const KWG_QUANTITY_VALUE: &str = iri!(kwg, "QuantityValue");
pub const KWG_HAS_TEMPORAL_SCOPE: &str = iri!(kwg, "hasTemporalScope");
pub const KWG_FROM_DATASET: &str = iri!(kwg, "fromDataset");
pub const KWG_DATASET_SUBGRAPH: &str = iri!(kwg, "DatasetSubgraph");
pub const KWG_THEMATIC_SUBGRAPH: &str = iri!(kwg, "ThematicSubgraph");
pub const KWG_ORGANIZATION: &str = iri!(kwg, "Organization");
pub const KWG_THEME: &str = iri!(kwg, "theme");
pub const KWG_HAS_DATASET: &str = iri!(kwg, "hasDatasetSubgraph");
pub const KWG_TITLE: &str = iri!(kwg, "title");
pub const KWG_LICENSE: &str = iri!(kwg, "license");
pub const KWG_CREATOR: &str = iri!(kwg, "creator");
pub const KWG_RETRIEVED: &str = iri!(kwg, "dateRetrieved");
pub const KWG_SOURCE_ORGANIZATION: &str = iri!(kwg, "sourceOrganization");

pub const SOSA_OBSERVATION: &str = iri!(sosa, "Observation");
pub const SOSA_OBSERVATION_COLLECTION: &str = iri!(sosa, "ObservationCollection");
pub const SOSA_OBSERVABLE_PROPERTY: &str = iri!(sosa, "ObservableProperty");
pub const SOSA_FEATURE_OF_INTEREST: &str = iri!(sosa, "FeatureOfInterest");
pub const SOSA_HAS_FOI: &str = iri!(sosa, "hasFeatureOfInterest");
pub const SOSA_IS_FOI_OF: &str = iri!(sosa, "isFeatureOfInterestOf");
pub const SOSA_OBSERVED_PROPERTY: &str = iri!(sosa, "observedProperty");
pub const SOSA_HAS_SIMPLE_RESULT: &str = iri!(sosa, "hasSimpleResult");
pub const SOSA_HAS_RESULT: &str = iri!(sosa, "hasResult");
pub const SOSA_HAS_MEMBER: &str = iri!(sosa, "hasMember");
pub const SOSA_PHENOMENON_TIME: &str = iri!(sosa, "phenomenonTime");
pub const SOSA_RESULT_TIME: &str = iri!(sosa, "resultTime");
pub const SOSA_MADE_BY_SENSOR: &str = iri!(sosa, "madeBySensor");

pub const GEO_FEATURE: &str = iri!(geo, "Feature");
pub const GEO_GEOMETRY: &str = iri!(geo, "Geometry");
pub const GEO_HAS_GEOMETRY: &str = iri!(geo, "hasGeometry");
pub const GEO_AS_WKT: &str = iri!(geo, "asWKT");
pub const GEO_WKT_LITERAL: &str = iri!(geo, "wktLiteral");

pub const TIME_INSTANT: &str = iri!(time, "Instant");
pub const TIME_INTERVAL: &str = iri!(time, "Interval");
pub const TIME_HAS_BEGINNING: &str = iri!(time, "hasBeginning");
pub const TIME_HAS_END: &str = iri!(time, "hasEnd");
pub const TIME_IN_XSD_DATE_TIME: &str = iri!(time, "inXSDDateTime");

pub const QUDT_NUMERIC_VALUE: &str = iri!(qudt, "numericValue");
pub const QUDT_UNIT_PROP: &str = iri!(qudt, "unit");

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expand_and_compact() {
        assert_eq!(
            expand("kwgr:Earth.NA.US.USA.19_1").unwrap(),
            "http://stko-kwg.geog.ucsb.edu/lod/resource/Earth.NA.US.USA.19_1"
        );
        assert_eq!(compact(KWG_S2_CELL), Some(("kwg-ont", "S2Cell")));
        assert_eq!(expand("foaf:name"), None);
        assert_eq!(resolve("<urn:x>").unwrap(), "urn:x");
    }

    #[test]
    fn local_names() {
        assert_eq!(local_name(SOSA_HAS_FOI), "hasFeatureOfInterest");
        assert_eq!(local_name(GEO_AS_WKT), "asWKT");
    }
}

//! Kernel data model: terms, entities, triple emission and serialization.

mod emit;
mod entity;
pub mod ns;
mod serialize;
mod term;

use thiserror::Error;

pub use emit::{
    cell_iri, emit_collection, emit_dataset, emit_feature, emit_foi_inverse, emit_observation, emit_organization,
    emit_property, emit_region_relation, emit_spatial_relation, emit_subclass, emit_temporal, emit_theme, encode_key,
    mint_iri, schema_triples, Catalog, KnownEntities, MintKind,
};
pub use entity::{
    DatasetSubgraph, Feature, FeatureKind, ObsResult, ObservableProperty, Observation, ObservationCollection,
    Organization, QuantityValue, TemporalEntity, ThematicSubgraph,
};
pub use serialize::{parse_ntriples, serialize_ntriples, serialize_turtle};
pub use term::{format_date_time, format_double, is_numeric_datatype, parse_date_time, Term, Triple};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("empty source key")]
    EmptyKey,
    #[error("invalid key: {0}")]
    InvalidKey(String),
    #[error("invalid IRI {0:?}")]
    InvalidIri(String),
    #[error("lexical form {lexical:?} is not valid for datatype <{datatype}>")]
    InvalidLiteral { lexical: String, datatype: String },
    #[error("dangling FOI: {0}")]
    DanglingFoi(String),
    #[error("dangling observed property: {0}")]
    DanglingProperty(String),
    #[error("invalid temporal entity: {0}")]
    InvalidTemporal(String),
    #[error("quantity value must be finite, got {0}")]
    NonFiniteQuantity(f64),
    #[error("observation collection {0} has no members")]
    EmptyCollection(String),
    #[error("N-Triples line {line}, column {column}: {message}")]
    NTriples { line: usize, column: usize, message: String },
}

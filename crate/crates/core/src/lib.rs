//! Grid-anchored geospatial knowledge graph: a hierarchical cube-face grid,
//! planar topology, an observation-centred triple model, ingestion with
//! precomputed grid alignment, an indexed triple store, a small SPARQL
//! subset, shape validation and area briefings.

pub mod briefing;
pub mod dgg;
pub mod fixture;
pub mod geometry;
pub mod ingest;
pub mod kgmodel;
pub mod query;
pub mod store;
pub mod validate;

//! Turns tables and rasters into kernel entities and precomputes their
//! alignment with the grid.

mod config;
mod pipeline;
mod raster;
mod spatial;
mod table;

use thiserror::Error;

pub use config::{
    DatasetManifest, GeometryFormat, GeometrySpec, MappingConfig, PropertyMapping, ResultMode, TimeKind, TimeSpec,
};
pub use pipeline::{
    base_graph, build_graph, load_run, load_run_with, located_features, relate_graph, spatial_triples, DatasetSource,
    RunConfig, ThemeSpec,
};
pub use raster::{cell_summaries, parse_ascii_grid, summarize_raster, RasterConfig, RasterKind, RasterLayer};
pub use spatial::{cell_feature, integrate_spatial, relate_cells, relate_regions, SpatialOutput};
pub use table::{ingest_table, IngestOutput};

use crate::dgg::DggError;
use crate::geometry::GeometryError;
use crate::kgmodel::ModelError;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("io: {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("config: {0}")]
    Config(String),
    #[error("column {0:?} not found in the source header")]
    MissingColumn(String),
    #[error("property {0} is mapped twice")]
    DuplicateProperty(String),
    #[error("duplicate feature key {0:?}")]
    DuplicateKey(String),
    #[error("row {row}, column {column:?}: {value:?} is not a number")]
    Numeric { row: usize, column: String, value: String },
    #[error("row {row}: {message}")]
    Row { row: usize, message: String },
    #[error("feature {feature}: {source}")]
    Geometry { feature: String, source: GeometryError },
    #[error("feature {feature}: {source}")]
    Grid { feature: String, source: DggError },
    #[error(transparent)]
    Dgg(#[from] DggError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("raster: {0}")]
    Raster(String),
    #[error(
        "level {level} is too fine for this raster: cells span about {cell_deg:.6} degrees but pixels span \
         {pixel_deg:.6}; choose a coarser level or a finer raster"
    )]
    LevelTooFine { level: u8, cell_deg: f64, pixel_deg: f64 },
}

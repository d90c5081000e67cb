//! Hierarchical discrete global grid on a six-face cube.
//!
//! Each face is a quadtree; a cell at level `L` has exactly one ancestor at
//! every coarser level and four children at `L + 1`. Points map to cells by
//! gnomonic projection onto the dominant cube face followed by a linear
//! `(u, v) -> (s, t)` rescaling.

mod cell;
mod cover;
mod face;
mod latlng;
mod polygon;

use serde_json::{json, Value};
use thiserror::Error;

pub use cell::CellId;
pub use cover::cover_geometry;
pub use latlng::LatLng;
pub use polygon::{CellPolygon, EDGE_SAMPLES};

pub const MAX_LEVEL: u8 = 30;

/// Mean Earth radius in kilometres.
pub const EARTH_RADIUS_KM: f64 = 6371.0088;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DggError {
    #[error("level {0} out of range 0..=30")]
    LevelOutOfRange(i64),
    #[error("coordinates out of range: lat {lat}, lng {lng}")]
    CoordinateOutOfRange { lat: f64, lng: f64 },
    #[error("face {0} out of range 0..=5")]
    FaceOutOfRange(u8),
    #[error("invalid cell: {0}")]
    InvalidCell(String),
    #[error("malformed cell token {token:?}: {reason}")]
    MalformedToken { token: String, reason: String },
    #[error("level-0 cells have no parent")]
    NoParent,
    #[error("level-30 cells have no children")]
    NoChildren,
    #[error("cannot cover an empty geometry")]
    EmptyGeometry,
    #[error("geometries crossing the antimeridian are not supported")]
    AntimeridianUnsupported,
}

pub fn cell_from_point(p: LatLng, level: u8) -> Result<CellId, DggError> {
    CellId::from_point(p, level)
}

pub fn cell_polygon(c: CellId) -> CellPolygon {
    CellPolygon::new(c)
}

pub fn cell_area_km2(c: CellId) -> f64 {
    CellPolygon::new(c).area_km2()
}

pub fn token(c: CellId) -> String {
    c.token()
}

pub fn cell_from_token(s: &str) -> Result<CellId, DggError> {
    CellId::from_token(s)
}

/// GeoJSON FeatureCollection of cell polygons with `token` and `level`
/// properties.
pub fn cells_geojson<'a>(cells: impl IntoIterator<Item = &'a CellId>) -> Value {
    let features: Vec<Value> = cells
        .into_iter()
        .map(|c| {
            json!({
                "type": "Feature",
                "geometry": CellPolygon::new(*c).to_geometry().to_geojson(),
                "properties": { "token": c.token(), "level": c.level() },
            })
        })
        .collect();
    json!({ "type": "FeatureCollection", "features": features })
}

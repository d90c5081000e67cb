use std::collections::BTreeSet;

use super::{CellId, CellPolygon, DggError};
use crate::geometry::{self, Geometry, Rect};

/// Level-`level` cells whose planar polygon intersects `g`, boundary
/// contact included.
///
/// Quadtree descent from the six faces: a cell is pruned when its (padded)
/// bounding box misses the geometry's bounding box; survivors at the target
/// level are tested exactly.
pub fn cover_geometry(g: &Geometry, level: u8) -> Result<BTreeSet<CellId>, DggError> {
    super::cell::check_level(level)?;
    let target = g.bbox().ok_or(DggError::EmptyGeometry)?;
    if g.crosses_antimeridian() {
        return Err(DggError::AntimeridianUnsupported);
    }
    let mut out = BTreeSet::new();
    let mut stack: Vec<CellId> = (0..6).map(|f| CellId::from_face(f).expect("face")).collect();
    while let Some(cell) = stack.pop() {
        let poly = CellPolygon::new(cell).to_geometry();
        let Some(bbox) = poly.bbox() else { continue };
        if !padded(bbox).intersects(&target) {
            continue;
        }
        if cell.level() == level {
            if geometry::intersects(&poly, g) {
                out.insert(cell);
            }
        } else {
            stack.extend(cell.children().expect("below target level"));
        }
    }
    Ok(out)
}

/// Planar cell polygons are chords of great-circle arcs; descendants bulge
/// slightly past the parent's chords, so the pruning box is padded.
fn padded(r: Rect) -> Rect {
    let pad_x = 0.25 * (r.max_lng - r.min_lng) + 1e-9;
    let pad_y = 0.25 * (r.max_lat - r.min_lat) + 1e-9;
    Rect {
        min_lng: r.min_lng - pad_x,
        min_lat: r.min_lat - pad_y,
        max_lng: r.max_lng + pad_x,
        max_lat: r.max_lat + pad_y,
    }
}

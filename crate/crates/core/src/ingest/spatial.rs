use std::collections::BTreeSet;

use rayon::prelude::*;

use super::IngestError;
use crate::dgg::{cell_from_point, cover_geometry, CellId, CellPolygon, LatLng};
use crate::geometry::{relate, Geometry, SpatialPredicate};
use crate::kgmodel::{cell_iri, emit_feature, emit_region_relation, emit_spatial_relation, ns, Feature, FeatureKind, Triple};

#[derive(Debug, Clone, Default)]
pub struct SpatialOutput {
    /// Relation triples plus the triples of every referenced cell.
    pub triples: Vec<Triple>,
    pub cells: BTreeSet<CellId>,
    /// Number of cell-feature relations stored.
    pub cell_relations: usize,
}

pub fn cell_feature(c: CellId) -> Feature {
    Feature::new(cell_iri(c), FeatureKind::Cell, ns::KWG_S2_CELL, format!("S2 cell {}", c.token()))
        .with_geometry(CellPolygon::new(c).to_geometry())
}

fn cells_for(g: &Geometry, level: u8) -> Result<BTreeSet<CellId>, crate::dgg::DggError> {
    // A point gets the single cell it falls in rather than every cell whose
    // boundary it touches.
    if let Geometry::Point(p) = g {
        let cell = cell_from_point(LatLng::new(p.lat, p.lng)?, level)?;
        return Ok(BTreeSet::from([cell]));
    }
    cover_geometry(g, level)
}

/// Align features with the grid: each covering cell is linked to the
/// feature by the most specific predicate that holds between them.
pub fn relate_cells(features: &[Feature], level: u8) -> Result<SpatialOutput, IngestError> {
    let per_feature: Vec<(Vec<Triple>, BTreeSet<CellId>)> = features
        .par_iter()
        .filter_map(|f| f.geometry.as_ref().map(|g| (f, g)))
        .map(|(f, g)| {
            let cells = cells_for(g, level).map_err(|source| IngestError::Grid { feature: f.iri.clone(), source })?;
            let mut triples = Vec::new();
            let mut linked = BTreeSet::new();
            for &c in &cells {
                let m = relate(&CellPolygon::new(c).to_geometry(), g);
                if let Some(p) = SpatialPredicate::most_specific(&m, 2, g.dimension()) {
                    triples.extend(emit_spatial_relation(&cell_iri(c), p, &f.iri));
                    linked.insert(c);
                }
            }
            Ok((triples, linked))
        })
        .collect::<Result<_, IngestError>>()?;

    let mut out = SpatialOutput::default();
    for (triples, linked) in per_feature {
        out.cell_relations += linked.len();
        out.triples.extend(triples);
        out.cells.extend(linked);
    }
    for &c in &out.cells {
        out.triples.extend(emit_feature(&cell_feature(c)));
    }
    Ok(out)
}

/// Pairwise relations among features with geometry where at least one
/// side is areal. Region pairs are also stated under the GeoSPARQL names.
pub fn relate_regions(features: &[Feature]) -> Vec<Triple> {
    let located: Vec<(&Feature, &Geometry)> =
        features.iter().filter_map(|f| f.geometry.as_ref().map(|g| (f, g))).collect();
    (0..located.len())
        .into_par_iter()
        .flat_map_iter(|i| {
            let (a, ga) = located[i];
            located[i + 1..]
                .iter()
                .filter(move |(b, gb)| b.iri != a.iri && (ga.is_areal() || gb.is_areal()))
                .flat_map(move |(b, gb)| {
                    let Some(p) = SpatialPredicate::most_specific(&relate(ga, gb), ga.dimension(), gb.dimension()) else {
                        return vec![];
                    };
                    if a.kind == FeatureKind::Region && b.kind == FeatureKind::Region {
                        emit_region_relation(&a.iri, p, &b.iri)
                    } else {
                        emit_spatial_relation(&a.iri, p, &b.iri)
                    }
                })
                .collect::<Vec<_>>()
        })
        .collect()
}

/// Cell alignment at `level` plus region–region relations.
pub fn integrate_spatial(features: &[Feature], level: u8) -> Result<SpatialOutput, IngestError> {
    let mut out = relate_cells(features, level)?;
    out.triples.extend(relate_regions(features));
    Ok(out)
}

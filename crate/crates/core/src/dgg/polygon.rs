use serde::Serialize;

use super::face::face_st_to_unit;
use super::{CellId, LatLng, EARTH_RADIUS_KM};
use crate::geometry::{Coord, Geometry, Polygon};

/// Boundary samples per cell edge in the planar geometry. A power of two so
/// that sample positions are exact dyadic fractions shared by neighbours,
/// parents and children.
pub const EDGE_SAMPLES: u64 = 16;

/// Spherical quadrilateral of a cell; edges are great-circle arcs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CellPolygon {
    pub vertices: [LatLng; 4],
    pub level: u8,
    #[serde(skip)]
    cell: CellId,
}

impl CellPolygon {
    pub fn new(cell: CellId) -> Self {
        let corners = corner_vectors(cell);
        CellPolygon {
            vertices: corners.map(LatLng::from_xyz),
            level: cell.level(),
            cell,
        }
    }

    pub fn cell(&self) -> CellId {
        self.cell
    }

    /// Containment on the sphere, boundary inclusive.
    pub fn contains(&self, p: LatLng) -> bool {
        let p = p.to_xyz();
        let c = corner_vectors(self.cell);
        (0..4).all(|k| {
            let n = cross(c[k], c[(k + 1) % 4]);
            dot(n, p) >= -1e-15
        })
    }

    /// Area on the sphere of mean Earth radius, from two triangles.
    pub fn area_km2(&self) -> f64 {
        let c = corner_vectors(self.cell);
        let excess = triangle_excess(c[0], c[1], c[2]) + triangle_excess(c[0], c[2], c[3]);
        excess * EARTH_RADIUS_KM * EARTH_RADIUS_KM
    }

    /// Planar lng/lat rendering of the cell with densified edges.
    ///
    /// Longitudes are unwrapped around the cell centre. A pole corner
    /// becomes an edge along latitude ±90, the two polar faces at level 0
    /// become caps, and cells straddling the antimeridian (only possible at
    /// level 0) are split into a multipolygon.
    pub fn to_geometry(&self) -> Geometry {
        let cell = self.cell;
        let samples = boundary_samples(cell);
        if cell.level() == 0 && (cell.face() == 2 || cell.face() == 5) {
            return Geometry::Polygon(polar_cap(&samples, cell.face() == 2));
        }
        let (s0, t0, s1, t1) = cell.st_bounds();
        let centre = LatLng::from_xyz(face_st_to_unit(cell.face(), (s0 + s1) / 2.0, (t0 + t1) / 2.0));
        let unwrap = |lng: f64| {
            let mut l = lng;
            while l - centre.lng > 180.0 {
                l -= 360.0;
            }
            while centre.lng - l >= 180.0 {
                l += 360.0;
            }
            l
        };
        let n = samples.len();
        let mut ring: Vec<Coord> = Vec::with_capacity(n + 4);
        for k in 0..n {
            let p = samples[k];
            if is_pole(p) {
                let lat = if p[2] > 0.0 { 90.0 } else { -90.0 };
                let prev = unwrap(LatLng::from_xyz(samples[(k + n - 1) % n]).lng);
                let next = unwrap(LatLng::from_xyz(samples[(k + 1) % n]).lng);
                push_distinct(&mut ring, Coord::new(prev, lat));
                push_distinct(&mut ring, Coord::new(next, lat));
            } else {
                let ll = LatLng::from_xyz(p);
                push_distinct(&mut ring, Coord::new(unwrap(ll.lng), ll.lat));
            }
        }
        if ring.len() > 1 && ring[0] == ring[ring.len() - 1] {
            ring.pop();
        }
        let min = ring.iter().map(|c| c.lng).fold(f64::INFINITY, f64::min);
        let max = ring.iter().map(|c| c.lng).fold(f64::NEG_INFINITY, f64::max);
        if min >= -180.0 && max <= 180.0 {
            return Geometry::Polygon(Polygon::from_ring_unchecked(close(ring)));
        }
        let mut parts = Vec::new();
        for shift in [-360.0, 0.0, 360.0] {
            let shifted: Vec<Coord> = ring.iter().map(|c| Coord::new(c.lng + shift, c.lat)).collect();
            let clipped = clip(&clip(&shifted, 180.0, true), -180.0, false);
            if clipped.len() >= 3 {
                parts.push(Polygon::from_ring_unchecked(close(clipped)));
            }
        }
        Geometry::MultiPolygon(parts)
    }
}

fn is_pole(p: [f64; 3]) -> bool {
    p[0] == 0.0 && p[1] == 0.0
}

fn push_distinct(ring: &mut Vec<Coord>, c: Coord) {
    if ring.last() != Some(&c) {
        ring.push(c);
    }
}

fn close(mut ring: Vec<Coord>) -> Vec<Coord> {
    if let Some(&first) = ring.first() {
        ring.push(first);
    }
    ring
}

/// Sutherland-Hodgman against a vertical line, keeping `lng <= x` when
/// `keep_below` and `lng >= x` otherwise.
fn clip(ring: &[Coord], x: f64, keep_below: bool) -> Vec<Coord> {
    let inside = |c: &Coord| if keep_below { c.lng <= x } else { c.lng >= x };
    let mut out = Vec::with_capacity(ring.len() + 2);
    for k in 0..ring.len() {
        let a = ring[k];
        let b = ring[(k + 1) % ring.len()];
        let (ia, ib) = (inside(&a), inside(&b));
        if ia {
            push_distinct(&mut out, a);
        }
        if ia != ib {
            let t = (x - a.lng) / (b.lng - a.lng);
            push_distinct(&mut out, Coord::new(x, a.lat + t * (b.lat - a.lat)));
        }
    }
    if out.len() > 1 && out[0] == out[out.len() - 1] {
        out.pop();
    }
    out
}

fn polar_cap(samples: &[[f64; 3]], north: bool) -> Polygon {
    let pts: Vec<LatLng> = samples.iter().map(|&p| LatLng::from_xyz(p)).collect();
    let n = pts.len();
    // Rotate so the ring starts right after the antimeridian crossing.
    let start = (0..n)
        .find(|&k| (pts[(k + 1) % n].lng - pts[k].lng).abs() > 180.0)
        .map(|k| (k + 1) % n)
        .unwrap_or(0);
    let a = pts[(start + n - 1) % n];
    let b = pts[start];
    let b_unwrapped = if north { b.lng + 360.0 } else { b.lng - 360.0 };
    let edge = if north { 180.0 } else { -180.0 };
    let t = (edge - a.lng) / (b_unwrapped - a.lng);
    let lat_x = a.lat + t * (b.lat - a.lat);
    let pole = if north { 90.0 } else { -90.0 };
    let mut ring = vec![Coord::new(-edge, lat_x)];
    for k in 0..n {
        let p = pts[(start + k) % n];
        push_distinct(&mut ring, Coord::new(p.lng, p.lat));
    }
    push_distinct(&mut ring, Coord::new(edge, lat_x));
    ring.push(Coord::new(edge, pole));
    ring.push(Coord::new(-edge, pole));
    Polygon::from_ring_unchecked(close(ring))
}

/// Unit vectors of the four corners, counterclockwise.
fn corner_vectors(cell: CellId) -> [[f64; 3]; 4] {
    let (s0, t0, s1, t1) = cell.st_bounds();
    let f = cell.face();
    [
        face_st_to_unit(f, s0, t0),
        face_st_to_unit(f, s1, t0),
        face_st_to_unit(f, s1, t1),
        face_st_to_unit(f, s0, t1),
    ]
}

/// Counterclockwise boundary samples, `EDGE_SAMPLES` per edge, not closed.
fn boundary_samples(cell: CellId) -> Vec<[f64; 3]> {
    let (i, j) = cell.face_ij();
    let n = EDGE_SAMPLES;
    let denom = (n << cell.level()) as f64;
    let (i0, j0) = (u64::from(i) * n, u64::from(j) * n);
    let (i1, j1) = (i0 + n, j0 + n);
    let st = |a: u64, b: u64| face_st_to_unit(cell.face(), a as f64 / denom, b as f64 / denom);
    let mut out = Vec::with_capacity(4 * n as usize);
    out.extend((0..n).map(|k| st(i0 + k, j0)));
    out.extend((0..n).map(|k| st(i1, j0 + k)));
    out.extend((0..n).map(|k| st(i1 - k, j1)));
    out.extend((0..n).map(|k| st(i0, j1 - k)));
    out
}

fn triangle_excess(a: [f64; 3], b: [f64; 3], c: [f64; 3]) -> f64 {
    let (ab, bc, ca) = (arc(a, b), arc(b, c), arc(c, a));
    let s = 0.5 * (ab + bc + ca);
    let prod = (0.5 * s).tan()
        * (0.5 * (s - ab)).tan()
        * (0.5 * (s - bc)).tan()
        * (0.5 * (s - ca)).tan();
    4.0 * prod.max(0.0).sqrt().atan()
}

fn arc(a: [f64; 3], b: [f64; 3]) -> f64 {
    let c = cross(a, b);
    (dot(c, c).sqrt()).atan2(dot(a, b))
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

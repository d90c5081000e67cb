//! Planar vector geometry in lng/lat degrees and its topological relations.

mod geojson;
mod predicate;
mod relate;
mod validate;
mod wkt;

use serde::Serialize;
use thiserror::Error;

pub use predicate::{rcc8_of, Rcc8Relation, SpatialPredicate};
pub use relate::{intersects, locate, predicate, relate, Dimension, IntersectionMatrix, Location};
pub use wkt::{parse_wkt, serialize_wkt};

/// Tolerance, in degrees, under which two positions count as coincident.
pub const EPSILON: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("WKT syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown geometry tag {0:?}")]
    UnknownTag(String),
    #[error("unbalanced parentheses")]
    Unbalanced,
    #[error("coordinate must have exactly 2 ordinates, found {0}")]
    Arity(usize),
    #[error("ring is not closed")]
    RingNotClosed,
    #[error("invalid geometry: {0}")]
    Invalid(String),
    #[error("GeoJSON: {0}")]
    GeoJson(String),
    #[error("{0}")]
    Unsupported(String),
}

/// Planar position; `lng` is the x axis, `lat` the y axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Coord {
    pub lng: f64,
    pub lat: f64,
}

impl Coord {
    pub const fn new(lng: f64, lat: f64) -> Self {
        Coord { lng, lat }
    }
}

/// One exterior ring and zero or more holes, each closed.
#[derive(Debug, Clone, PartialEq)]
pub struct Polygon {
    pub exterior: Vec<Coord>,
    pub interiors: Vec<Vec<Coord>>,
}

impl Polygon {
    /// Validated polygon; rings are reoriented to exterior counterclockwise,
    /// holes clockwise.
    pub fn new(exterior: Vec<Coord>, interiors: Vec<Vec<Coord>>) -> Result<Self, GeometryError> {
        let mut p = Polygon { exterior, interiors };
        validate::polygon(&p)?;
        p.orient();
        Ok(p)
    }

    /// Axis-aligned rectangle.
    pub fn rect(min_lng: f64, min_lat: f64, max_lng: f64, max_lat: f64) -> Result<Self, GeometryError> {
        Polygon::new(
            vec![
                Coord::new(min_lng, min_lat),
                Coord::new(max_lng, min_lat),
                Coord::new(max_lng, max_lat),
                Coord::new(min_lng, max_lat),
                Coord::new(min_lng, min_lat),
            ],
            vec![],
        )
    }

    /// Trusted constructor for rings produced internally (already closed and
    /// counterclockwise).
    pub(crate) fn from_ring_unchecked(exterior: Vec<Coord>) -> Self {
        Polygon { exterior, interiors: vec![] }
    }

    fn orient(&mut self) {
        if ring_signed_area(&self.exterior) < 0.0 {
            self.exterior.reverse();
        }
        for hole in &mut self.interiors {
            if ring_signed_area(hole) > 0.0 {
                hole.reverse();
            }
        }
    }

    pub fn area(&self) -> f64 {
        ring_signed_area(&self.exterior) + self.interiors.iter().map(|h| ring_signed_area(h)).sum::<f64>()
    }
}

/// Shoelace area; positive for counterclockwise rings.
pub fn ring_signed_area(ring: &[Coord]) -> f64 {
    let n = ring.len();
    if n < 3 {
        return 0.0;
    }
    let mut sum = 0.0;
    for k in 0..n - 1 {
        sum += ring[k].lng * ring[k + 1].lat - ring[k + 1].lng * ring[k].lat;
    }
    0.5 * sum
}

#[derive(Debug, Clone, PartialEq)]
pub enum Geometry {
    Point(Coord),
    LineString(Vec<Coord>),
    Polygon(Polygon),
    MultiPoint(Vec<Coord>),
    MultiLineString(Vec<Vec<Coord>>),
    MultiPolygon(Vec<Polygon>),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub min_lng: f64,
    pub min_lat: f64,
    pub max_lng: f64,
    pub max_lat: f64,
}

impl Rect {
    pub fn intersects(&self, other: &Rect) -> bool {
        self.min_lng <= other.max_lng + EPSILON
            && other.min_lng <= self.max_lng + EPSILON
            && self.min_lat <= other.max_lat + EPSILON
            && other.min_lat <= self.max_lat + EPSILON
    }

    fn extend(&mut self, c: Coord) {
        self.min_lng = self.min_lng.min(c.lng);
        self.min_lat = self.min_lat.min(c.lat);
        self.max_lng = self.max_lng.max(c.lng);
        self.max_lat = self.max_lat.max(c.lat);
    }
}

impl Geometry {
    pub fn tag(&self) -> &'static str {
        match self {
            Geometry::Point(_) => "Point",
            Geometry::LineString(_) => "LineString",
            Geometry::Polygon(_) => "Polygon",
            Geometry::MultiPoint(_) => "MultiPoint",
            Geometry::MultiLineString(_) => "MultiLineString",
            Geometry::MultiPolygon(_) => "MultiPolygon",
        }
    }

    /// Topological dimension: 0 for points, 1 for lines, 2 for polygons.
    pub fn dimension(&self) -> u8 {
        match self {
            Geometry::Point(_) | Geometry::MultiPoint(_) => 0,
            Geometry::LineString(_) | Geometry::MultiLineString(_) => 1,
            Geometry::Polygon(_) | Geometry::MultiPolygon(_) => 2,
        }
    }

    pub fn is_areal(&self) -> bool {
        self.dimension() == 2
    }

    pub fn is_empty(&self) -> bool {
        match self {
            Geometry::Point(_) => false,
            Geometry::LineString(l) => l.is_empty(),
            Geometry::Polygon(p) => p.exterior.is_empty(),
            Geometry::MultiPoint(p) => p.is_empty(),
            Geometry::MultiLineString(l) => l.is_empty(),
            Geometry::MultiPolygon(p) => p.is_empty(),
        }
    }

    pub fn coords(&self) -> Box<dyn Iterator<Item = Coord> + '_> {
        match self {
            Geometry::Point(c) => Box::new(std::iter::once(*c)),
            Geometry::LineString(l) | Geometry::MultiPoint(l) => Box::new(l.iter().copied()),
            Geometry::Polygon(p) => Box::new(polygon_coords(p)),
            Geometry::MultiLineString(ls) => Box::new(ls.iter().flatten().copied()),
            Geometry::MultiPolygon(ps) => Box::new(ps.iter().flat_map(polygon_coords)),
        }
    }

    pub fn bbox(&self) -> Option<Rect> {
        let mut it = self.coords();
        let first = it.next()?;
        let mut r = Rect {
            min_lng: first.lng,
            min_lat: first.lat,
            max_lng: first.lng,
            max_lat: first.lat,
        };
        for c in it {
            r.extend(c);
        }
        Some(r)
    }

    /// Planar area in square degrees; zero for points and lines.
    pub fn area(&self) -> f64 {
        match self {
            Geometry::Polygon(p) => p.area(),
            Geometry::MultiPolygon(ps) => ps.iter().map(Polygon::area).sum(),
            _ => 0.0,
        }
    }

    /// True when some segment jumps more than 180 degrees of longitude
    /// away from the poles, the signature of an antimeridian crossing.
    pub fn crosses_antimeridian(&self) -> bool {
        let jump = |w: &[Coord]| {
            (w[1].lng - w[0].lng).abs() > 180.0 && !(w[0].lat.abs() == 90.0 && w[1].lat.abs() == 90.0)
        };
        match self {
            Geometry::Point(_) | Geometry::MultiPoint(_) => false,
            Geometry::LineString(l) => l.windows(2).any(jump),
            Geometry::MultiLineString(ls) => ls.iter().any(|l| l.windows(2).any(jump)),
            Geometry::Polygon(p) => polygon_rings(p).any(|r| r.windows(2).any(jump)),
            Geometry::MultiPolygon(ps) => ps.iter().flat_map(polygon_rings).any(|r| r.windows(2).any(jump)),
        }
    }

    /// Check the structural invariants (closed rings, no degenerate or
    /// self-intersecting parts, coordinates inside lng/lat bounds).
    pub fn validate(&self) -> Result<(), GeometryError> {
        validate::geometry(self)
    }
}

fn polygon_coords(p: &Polygon) -> impl Iterator<Item = Coord> + '_ {
    p.exterior.iter().chain(p.interiors.iter().flatten()).copied()
}

pub(crate) fn polygon_rings(p: &Polygon) -> impl Iterator<Item = &Vec<Coord>> {
    std::iter::once(&p.exterior).chain(p.interiors.iter())
}

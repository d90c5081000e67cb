//! DE-9IM computation.
//!
//! The linework of both operands is noded against every vertex and every
//! proper crossing of the two operands. Each resulting piece is classified
//! by its midpoint and each node by itself, which yields all 0- and
//! 1-dimensional entries. Areal entries follow from how the boundary pieces
//! sit: the interiors of two areal operands meet iff a boundary piece of one
//! lies in the interior of the other, or a shared piece has both interiors
//! on the same side.

use std::fmt;
use std::str::FromStr;

use super::{polygon_rings, ring_signed_area, Coord, Geometry, GeometryError, SpatialPredicate, EPSILON};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Dimension {
    Empty,
    Zero,
    One,
    Two,
}

impl Dimension {
    fn symbol(self) -> char {
        match self {
            Dimension::Empty => 'F',
            Dimension::Zero => '0',
            Dimension::One => '1',
            Dimension::Two => '2',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Location {
    Interior = 0,
    Boundary = 1,
    Exterior = 2,
}

/// 3×3 matrix of intersection dimensions, rows for the first operand's
/// interior/boundary/exterior and columns for the second's.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct IntersectionMatrix([[Dimension; 3]; 3]);

impl IntersectionMatrix {
    pub fn empty() -> Self {
        let mut m = IntersectionMatrix([[Dimension::Empty; 3]; 3]);
        m.0[2][2] = Dimension::Two;
        m
    }

    pub fn get(&self, a: Location, b: Location) -> Dimension {
        self.0[a as usize][b as usize]
    }

    fn raise(&mut self, a: Location, b: Location, d: Dimension) {
        let cell = &mut self.0[a as usize][b as usize];
        if d > *cell {
            *cell = d;
        }
    }

    pub fn transpose(&self) -> Self {
        let mut t = *self;
        for (i, row) in self.0.iter().enumerate() {
            for (j, &d) in row.iter().enumerate() {
                t.0[j][i] = d;
            }
        }
        t
    }

    /// Test against a 9-character pattern over `T F * 0 1 2`.
    pub fn matches(&self, mask: &str) -> bool {
        let chars: Vec<char> = mask.chars().collect();
        assert_eq!(chars.len(), 9, "DE-9IM mask must have 9 characters");
        self.0.iter().flatten().zip(chars).all(|(&d, m)| match m {
            '*' => true,
            'T' => d != Dimension::Empty,
            'F' => d == Dimension::Empty,
            '0' => d == Dimension::Zero,
            '1' => d == Dimension::One,
            '2' => d == Dimension::Two,
            _ => panic!("bad mask character {m:?}"),
        })
    }
}

impl fmt::Display for IntersectionMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = self.0.iter().flatten().map(|d| d.symbol()).collect();
        f.write_str(&s)
    }
}

impl fmt::Debug for IntersectionMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntersectionMatrix({self})")
    }
}

impl FromStr for IntersectionMatrix {
    type Err = GeometryError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let cells: Vec<Dimension> = s
            .chars()
            .map(|c| match c {
                'F' | 'f' => Ok(Dimension::Empty),
                '0' => Ok(Dimension::Zero),
                '1' => Ok(Dimension::One),
                '2' => Ok(Dimension::Two),
                _ => Err(GeometryError::Invalid(format!("bad matrix character {c:?}"))),
            })
            .collect::<Result<_, _>>()?;
        if cells.len() != 9 {
            return Err(GeometryError::Invalid("matrix needs 9 entries".into()));
        }
        let mut m = [[Dimension::Empty; 3]; 3];
        for (k, d) in cells.into_iter().enumerate() {
            m[k / 3][k % 3] = d;
        }
        Ok(IntersectionMatrix(m))
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Segment {
    pub a: Coord,
    pub b: Coord,
}

impl Segment {
    fn bbox_contains(&self, q: Coord) -> bool {
        q.lng >= self.a.lng.min(self.b.lng) - EPSILON
            && q.lng <= self.a.lng.max(self.b.lng) + EPSILON
            && q.lat >= self.a.lat.min(self.b.lat) - EPSILON
            && q.lat <= self.a.lat.max(self.b.lat) + EPSILON
    }

    fn bbox_overlaps(&self, o: &Segment) -> bool {
        self.a.lng.min(self.b.lng) <= o.a.lng.max(o.b.lng) + EPSILON
            && o.a.lng.min(o.b.lng) <= self.a.lng.max(self.b.lng) + EPSILON
            && self.a.lat.min(self.b.lat) <= o.a.lat.max(o.b.lat) + EPSILON
            && o.a.lat.min(o.b.lat) <= self.a.lat.max(self.b.lat) + EPSILON
    }

    /// Parameter of the projection of `q` and its distance to the segment.
    fn project(&self, q: Coord) -> (f64, f64) {
        let (dx, dy) = (self.b.lng - self.a.lng, self.b.lat - self.a.lat);
        let len2 = dx * dx + dy * dy;
        if len2 == 0.0 {
            return (0.0, dist(q, self.a));
        }
        let t = ((q.lng - self.a.lng) * dx + (q.lat - self.a.lat) * dy) / len2;
        let tc = t.clamp(0.0, 1.0);
        let p = Coord::new(self.a.lng + tc * dx, self.a.lat + tc * dy);
        (t, dist(q, p))
    }

    pub(crate) fn touches_point(&self, q: Coord) -> bool {
        self.bbox_contains(q) && self.project(q).1 <= EPSILON
    }

    fn at(&self, t: f64) -> Coord {
        Coord::new(
            self.a.lng + t * (self.b.lng - self.a.lng),
            self.a.lat + t * (self.b.lat - self.a.lat),
        )
    }
}

fn dist(p: Coord, q: Coord) -> f64 {
    (p.lng - q.lng).hypot(p.lat - q.lat)
}

fn near(p: Coord, q: Coord) -> bool {
    (p.lng - q.lng).abs() <= EPSILON && (p.lat - q.lat).abs() <= EPSILON
}

fn orient(a: Coord, b: Coord, c: Coord) -> f64 {
    (b.lng - a.lng) * (c.lat - a.lat) - (b.lat - a.lat) * (c.lng - a.lng)
}

/// Crossing point of two segments whose interiors cross transversally.
fn proper_crossing(s: &Segment, o: &Segment) -> Option<Coord> {
    let d1 = orient(o.a, o.b, s.a);
    let d2 = orient(o.a, o.b, s.b);
    let d3 = orient(s.a, s.b, o.a);
    let d4 = orient(s.a, s.b, o.b);
    if d1 * d2 < 0.0 && d3 * d4 < 0.0 {
        Some(s.at(d1 / (d1 - d2)))
    } else {
        None
    }
}

/// Any contact between two closed segments, within tolerance.
pub(crate) fn segments_touch(s: &Segment, o: &Segment) -> bool {
    if !s.bbox_overlaps(o) {
        return false;
    }
    proper_crossing(s, o).is_some()
        || s.touches_point(o.a)
        || s.touches_point(o.b)
        || o.touches_point(s.a)
        || o.touches_point(s.b)
}

/// Segments of the operand's linework. Areal rings are oriented so that the
/// interior lies on the left of every segment.
pub(crate) fn linework(g: &Geometry) -> Vec<Segment> {
    let mut out = Vec::new();
    let push_line = |line: &[Coord], out: &mut Vec<Segment>| {
        for w in line.windows(2) {
            if w[0] != w[1] {
                out.push(Segment { a: w[0], b: w[1] });
            }
        }
    };
    match g {
        Geometry::Point(_) | Geometry::MultiPoint(_) => {}
        Geometry::LineString(l) => push_line(l, &mut out),
        Geometry::MultiLineString(ls) => ls.iter().for_each(|l| push_line(l, &mut out)),
        Geometry::Polygon(p) => push_polygon(p, &mut out),
        Geometry::MultiPolygon(ps) => ps.iter().for_each(|p| push_polygon(p, &mut out)),
    }
    out
}

fn push_polygon(p: &super::Polygon, out: &mut Vec<Segment>) {
    for (k, ring) in polygon_rings(p).enumerate() {
        let ccw = ring_signed_area(ring) > 0.0;
        let want_ccw = k == 0;
        let mut segs: Vec<Segment> = ring
            .windows(2)
            .filter(|w| w[0] != w[1])
            .map(|w| Segment { a: w[0], b: w[1] })
            .collect();
        if ccw != want_ccw {
            segs.reverse();
            for s in &mut segs {
                std::mem::swap(&mut s.a, &mut s.b);
            }
        }
        out.extend(segs);
    }
}

/// Endpoints of a lineal geometry that occur an odd number of times.
fn line_boundary(lines: &[&Vec<Coord>]) -> Vec<Coord> {
    let mut ends: Vec<(Coord, usize)> = Vec::new();
    for l in lines {
        let (Some(&first), Some(&last)) = (l.first(), l.last()) else { continue };
        if near(first, last) {
            continue;
        }
        for e in [first, last] {
            match ends.iter_mut().find(|(c, _)| near(*c, e)) {
                Some((_, n)) => *n += 1,
                None => ends.push((e, 1)),
            }
        }
    }
    ends.into_iter().filter(|(_, n)| n % 2 == 1).map(|(c, _)| c).collect()
}

fn point_in_ring(q: Coord, ring: &[Coord]) -> bool {
    let mut inside = false;
    for w in ring.windows(2) {
        let (a, b) = (w[0], w[1]);
        if (a.lat > q.lat) != (b.lat > q.lat) {
            let x = a.lng + (q.lat - a.lat) / (b.lat - a.lat) * (b.lng - a.lng);
            if q.lng < x {
                inside = !inside;
            }
        }
    }
    inside
}

fn locate_polygon(q: Coord, p: &super::Polygon) -> Location {
    for ring in polygon_rings(p) {
        for w in ring.windows(2) {
            if (Segment { a: w[0], b: w[1] }).touches_point(q) {
                return Location::Boundary;
            }
        }
    }
    if point_in_ring(q, &p.exterior) && !p.interiors.iter().any(|h| point_in_ring(q, h)) {
        Location::Interior
    } else {
        Location::Exterior
    }
}

fn locate_lines(q: Coord, lines: &[&Vec<Coord>]) -> Location {
    if line_boundary(lines).iter().any(|&b| near(b, q)) {
        return Location::Boundary;
    }
    let on_line = lines.iter().any(|l| {
        l.windows(2)
            .any(|w| (Segment { a: w[0], b: w[1] }).touches_point(q))
    });
    if on_line {
        Location::Interior
    } else {
        Location::Exterior
    }
}

/// Position of `q` relative to the interior, boundary and exterior of `g`.
pub fn locate(q: Coord, g: &Geometry) -> Location {
    match g {
        Geometry::Point(p) => {
            if near(*p, q) {
                Location::Interior
            } else {
                Location::Exterior
            }
        }
        Geometry::MultiPoint(ps) => {
            if ps.iter().any(|&p| near(p, q)) {
                Location::Interior
            } else {
                Location::Exterior
            }
        }
        Geometry::LineString(l) => locate_lines(q, &[l]),
        Geometry::MultiLineString(ls) => locate_lines(q, &ls.iter().collect::<Vec<_>>()),
        Geometry::Polygon(p) => locate_polygon(q, p),
        Geometry::MultiPolygon(ps) => {
            let mut interior = false;
            for p in ps {
                match locate_polygon(q, p) {
                    Location::Boundary => return Location::Boundary,
                    Location::Interior => interior = true,
                    Location::Exterior => {}
                }
            }
            if interior {
                Location::Interior
            } else {
                Location::Exterior
            }
        }
    }
}

/// Fast intersection test, boundary contact included.
pub fn intersects(a: &Geometry, b: &Geometry) -> bool {
    match (a.bbox(), b.bbox()) {
        (Some(ra), Some(rb)) if ra.intersects(&rb) => {}
        _ => return false,
    }
    if a.coords().any(|c| locate(c, b) != Location::Exterior) {
        return true;
    }
    if b.coords().any(|c| locate(c, a) != Location::Exterior) {
        return true;
    }
    let (la, lb) = (linework(a), linework(b));
    la.iter().any(|s| lb.iter().any(|o| segments_touch(s, o)))
}

fn boundary_dimension(g: &Geometry) -> Dimension {
    match g {
        Geometry::Point(_) | Geometry::MultiPoint(_) => Dimension::Empty,
        Geometry::LineString(l) => {
            if line_boundary(&[l]).is_empty() {
                Dimension::Empty
            } else {
                Dimension::Zero
            }
        }
        Geometry::MultiLineString(ls) => {
            if line_boundary(&ls.iter().collect::<Vec<_>>()).is_empty() {
                Dimension::Empty
            } else {
                Dimension::Zero
            }
        }
        Geometry::Polygon(_) | Geometry::MultiPolygon(_) => Dimension::One,
    }
}

fn interior_dimension(g: &Geometry) -> Dimension {
    match g.dimension() {
        0 => Dimension::Zero,
        1 => Dimension::One,
        _ => Dimension::Two,
    }
}

#[derive(Default)]
struct AreaEvidence {
    boundary_in_interior: bool,
    boundary_in_exterior: bool,
    shared_same_side: bool,
    shared_opposite_side: bool,
}

/// Split `s` at every node lying on it.
fn pieces(s: &Segment, nodes: &[Coord]) -> Vec<(Coord, Coord)> {
    let mut ts: Vec<f64> = nodes
        .iter()
        .filter(|&&q| s.bbox_contains(q))
        .filter_map(|&q| {
            let (t, d) = s.project(q);
            (d <= EPSILON && t > 0.0 && t < 1.0).then_some(t)
        })
        .collect();
    ts.push(0.0);
    ts.push(1.0);
    ts.sort_by(|x, y| x.partial_cmp(y).expect("finite"));
    let mut out = Vec::with_capacity(ts.len());
    let mut prev = s.a;
    for &t in &ts[1..] {
        let p = if t == 1.0 { s.b } else { s.at(t) };
        if dist(prev, p) > EPSILON {
            out.push((prev, p));
            prev = p;
        }
    }
    out
}

/// Classify the pieces of `own`'s linework against `other`.
fn classify_pieces(
    own: &Geometry,
    own_segs: &[Segment],
    other: &Geometry,
    other_segs: &[Segment],
    nodes: &[Coord],
    mut record: impl FnMut(Location, Location),
) -> AreaEvidence {
    let mut ev = AreaEvidence::default();
    let own_loc = if own.is_areal() { Location::Boundary } else { Location::Interior };
    let both_areal = own.is_areal() && other.is_areal();
    for s in own_segs {
        for (p0, p1) in pieces(s, nodes) {
            let mid = Coord::new(0.5 * (p0.lng + p1.lng), 0.5 * (p0.lat + p1.lat));
            let loc = locate(mid, other);
            record(own_loc, loc);
            if !both_areal {
                continue;
            }
            match loc {
                Location::Interior => ev.boundary_in_interior = true,
                Location::Exterior => ev.boundary_in_exterior = true,
                Location::Boundary => {
                    let dir = (p1.lng - p0.lng, p1.lat - p0.lat);
                    let host = other_segs.iter().find(|o| o.touches_point(mid));
                    if let Some(o) = host {
                        let odir = (o.b.lng - o.a.lng, o.b.lat - o.a.lat);
                        if dir.0 * odir.0 + dir.1 * odir.1 > 0.0 {
                            ev.shared_same_side = true;
                        } else {
                            ev.shared_opposite_side = true;
                        }
                    }
                }
            }
        }
    }
    ev
}

/// DE-9IM matrix of `a` against `b`.
pub fn relate(a: &Geometry, b: &Geometry) -> IntersectionMatrix {
    let mut m = IntersectionMatrix::empty();
    if a.is_empty() || b.is_empty() {
        if !a.is_empty() {
            m.raise(Location::Interior, Location::Exterior, interior_dimension(a));
            m.raise(Location::Boundary, Location::Exterior, boundary_dimension(a));
        }
        if !b.is_empty() {
            m.raise(Location::Exterior, Location::Interior, interior_dimension(b));
            m.raise(Location::Exterior, Location::Boundary, boundary_dimension(b));
        }
        return m;
    }
    let disjoint_boxes = match (a.bbox(), b.bbox()) {
        (Some(ra), Some(rb)) => !ra.intersects(&rb),
        _ => true,
    };
    if disjoint_boxes {
        m.raise(Location::Interior, Location::Exterior, interior_dimension(a));
        m.raise(Location::Boundary, Location::Exterior, boundary_dimension(a));
        m.raise(Location::Exterior, Location::Interior, interior_dimension(b));
        m.raise(Location::Exterior, Location::Boundary, boundary_dimension(b));
        return m;
    }

    let (la, lb) = (linework(a), linework(b));
    let mut nodes: Vec<Coord> = a.coords().chain(b.coords()).collect();
    for s in &la {
        for o in &lb {
            if s.bbox_overlaps(o) {
                if let Some(p) = proper_crossing(s, o) {
                    nodes.push(p);
                }
            }
        }
    }

    let ev_a = classify_pieces(a, &la, b, &lb, &nodes, |x, y| m.raise(x, y, Dimension::One));
    let ev_b = classify_pieces(b, &lb, a, &la, &nodes, |y, x| m.raise(x, y, Dimension::One));

    for &q in &nodes {
        let (x, y) = (locate(q, a), locate(q, b));
        if (x, y) != (Location::Exterior, Location::Exterior) {
            m.raise(x, y, Dimension::Zero);
        }
    }

    match (a.is_areal(), b.is_areal()) {
        (true, true) => {
            if ev_a.boundary_in_interior || ev_b.boundary_in_interior || ev_a.shared_same_side {
                m.raise(Location::Interior, Location::Interior, Dimension::Two);
            }
            if ev_a.boundary_in_exterior || ev_b.boundary_in_interior || ev_a.shared_opposite_side {
                m.raise(Location::Interior, Location::Exterior, Dimension::Two);
            }
            if ev_b.boundary_in_exterior || ev_a.boundary_in_interior || ev_a.shared_opposite_side {
                m.raise(Location::Exterior, Location::Interior, Dimension::Two);
            }
        }
        (true, false) => m.raise(Location::Interior, Location::Exterior, Dimension::Two),
        (false, true) => m.raise(Location::Exterior, Location::Interior, Dimension::Two),
        (false, false) => {}
    }
    m
}

/// Evaluate one Simple Features predicate.
pub fn predicate(a: &Geometry, b: &Geometry, p: SpatialPredicate) -> bool {
    if p == SpatialPredicate::Intersects {
        return intersects(a, b);
    }
    if p == SpatialPredicate::Disjoint {
        return !intersects(a, b);
    }
    p.holds(&relate(a, b), a.dimension(), b.dimension())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::parse_wkt;

    fn g(wkt: &str) -> Geometry {
        parse_wkt(wkt).unwrap()
    }

    #[test]
    fn nested_squares() {
        let m = relate(&g("POLYGON ((1 1, 2 1, 2 2, 1 2, 1 1))"), &g("POLYGON ((0 0, 3 0, 3 3, 0 3, 0 0))"));
        assert_eq!(m.to_string(), "2FF1FF212");
    }

    #[test]
    fn shared_edge() {
        let m = relate(&g("POLYGON ((0 0, 1 0, 1 1, 0 1, 0 0))"), &g("POLYGON ((1 0, 2 0, 2 1, 1 1, 1 0))"));
        assert_eq!(m.to_string(), "FF2F11212");
    }

    #[test]
    fn equal_polygons() {
        let a = g("POLYGON ((0 0, 1 0, 1 1, 0 1, 0 0))");
        let b = g("POLYGON ((0 1, 0 0, 1 0, 1 1, 0 1))");
        assert_eq!(relate(&a, &b).to_string(), "2FFF1FFF2");
    }

    #[test]
    fn overlapping_squares() {
        let m = relate(&g("POLYGON ((0 0, 2 0, 2 2, 0 2, 0 0))"), &g("POLYGON ((1 1, 3 1, 3 3, 1 3, 1 1))"));
        assert_eq!(m.to_string(), "212101212");
    }

    #[test]
    fn line_through_polygon() {
        let m = relate(&g("LINESTRING (-1 0.5, 2 0.5)"), &g("POLYGON ((0 0, 1 0, 1 1, 0 1, 0 0))"));
        assert_eq!(m.to_string(), "101FF0212");
    }

    #[test]
    fn point_on_boundary_and_inside() {
        let poly = g("POLYGON ((0 0, 1 0, 1 1, 0 1, 0 0))");
        assert_eq!(relate(&g("POINT (0.5 0)"), &poly).to_string(), "F0FFFF212");
        assert_eq!(relate(&g("POINT (0.5 0.5)"), &poly).to_string(), "0FFFFF212");
    }

    #[test]
    fn crossing_lines() {
        let m = relate(&g("LINESTRING (0 0, 2 2)"), &g("LINESTRING (0 2, 2 0)"));
        assert_eq!(m.to_string(), "0F1FF0102");
    }

    #[test]
    fn polygon_with_hole_and_filler() {
        let donut = g("POLYGON ((0 0, 4 0, 4 4, 0 4, 0 0), (1 1, 1 3, 3 3, 3 1, 1 1))");
        let filler = g("POLYGON ((1 1, 3 1, 3 3, 1 3, 1 1))");
        assert_eq!(relate(&donut, &filler).to_string(), "FF2F112F2");
    }

    #[test]
    fn transpose_symmetry() {
        let a = g("POLYGON ((0 0, 2 0, 2 2, 0 2, 0 0))");
        let b = g("LINESTRING (1 1, 5 1)");
        assert_eq!(relate(&a, &b), relate(&b, &a).transpose());
    }

    #[test]
    fn matrix_parse_display() {
        let m: IntersectionMatrix = "212101212".parse().unwrap();
        assert_eq!(m.to_string(), "212101212");
        assert!(m.matches("T*T***T**"));
        assert!("21".parse::<IntersectionMatrix>().is_err());
    }
}

use super::relate::{segments_touch, Segment};
use super::{polygon_rings, ring_signed_area, Coord, Geometry, GeometryError, Polygon, EPSILON};

fn invalid(msg: impl Into<String>) -> GeometryError {
    GeometryError::Invalid(msg.into())
}

fn check_coord(c: Coord) -> Result<(), GeometryError> {
    if !c.lng.is_finite() || !c.lat.is_finite() {
        return Err(invalid("non-finite coordinate"));
    }
    if c.lng.abs() > 180.0 || c.lat.abs() > 90.0 {
        return Err(invalid(format!("coordinate ({} {}) out of lng/lat bounds", c.lng, c.lat)));
    }
    Ok(())
}

fn check_line(l: &[Coord]) -> Result<(), GeometryError> {
    if l.len() < 2 {
        return Err(invalid("linestring needs at least 2 points"));
    }
    for c in l {
        check_coord(*c)?;
    }
    if l.windows(2).any(|w| w[0] == w[1]) {
        return Err(invalid("repeated consecutive vertex"));
    }
    Ok(())
}

fn ring_segments(ring: &[Coord]) -> Vec<Segment> {
    ring.windows(2).map(|w| Segment { a: w[0], b: w[1] }).collect()
}

fn check_ring(ring: &[Coord]) -> Result<(), GeometryError> {
    if ring.first() != ring.last() {
        return Err(GeometryError::RingNotClosed);
    }
    if ring.len() < 4 {
        return Err(invalid("ring needs at least 4 vertices"));
    }
    check_line(ring)?;
    if ring_signed_area(ring).abs() <= EPSILON * EPSILON {
        return Err(invalid("ring has zero area"));
    }
    let segs = ring_segments(ring);
    let n = segs.len();
    for i in 0..n {
        for j in i + 1..n {
            let adjacent = j == i + 1 || (i == 0 && j == n - 1);
            if adjacent {
                // Adjacent segments share one endpoint; anything more is a
                // fold-back.
                let (s, o) = (&segs[i], &segs[j]);
                let (far_s, far_o) = if j == i + 1 { (s.a, o.b) } else { (s.b, o.a) };
                if o.touches_point(far_s) || s.touches_point(far_o) {
                    return Err(invalid("ring folds back on itself"));
                }
            } else if segments_touch(&segs[i], &segs[j]) {
                return Err(invalid("ring self-intersects"));
            }
        }
    }
    Ok(())
}

pub(super) fn polygon(p: &Polygon) -> Result<(), GeometryError> {
    for ring in polygon_rings(p) {
        check_ring(ring)?;
    }
    let rings: Vec<Vec<Segment>> = polygon_rings(p).map(|r| ring_segments(r)).collect();
    for i in 0..rings.len() {
        for j in i + 1..rings.len() {
            let cross = rings[i]
                .iter()
                .any(|s| rings[j].iter().any(|o| segments_touch(s, o)));
            if cross {
                return Err(invalid("polygon rings intersect"));
            }
        }
    }
    for hole in &p.interiors {
        let inside = super::locate(hole[0], &Geometry::Polygon(Polygon::from_ring_unchecked(p.exterior.clone())));
        if inside != super::Location::Interior {
            return Err(invalid("hole lies outside the exterior ring"));
        }
    }
    Ok(())
}

pub(super) fn geometry(g: &Geometry) -> Result<(), GeometryError> {
    match g {
        Geometry::Point(c) => check_coord(*c),
        Geometry::MultiPoint(cs) => cs.iter().try_for_each(|c| check_coord(*c)),
        Geometry::LineString(l) => check_line(l),
        Geometry::MultiLineString(ls) => ls.iter().try_for_each(|l| check_line(l)),
        Geometry::Polygon(p) => polygon(p),
        Geometry::MultiPolygon(ps) => ps.iter().try_for_each(polygon),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring(pts: &[(f64, f64)]) -> Vec<Coord> {
        pts.iter().map(|&(x, y)| Coord::new(x, y)).collect()
    }

    #[test]
    fn bowtie_rejected() {
        let r = ring(&[(0.0, 0.0), (1.0, 1.0), (1.0, 0.0), (0.0, 1.0), (0.0, 0.0)]);
        assert!(Polygon::new(r, vec![]).is_err());
    }

    #[test]
    fn open_ring_rejected() {
        let r = ring(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]);
        assert_eq!(Polygon::new(r, vec![]), Err(GeometryError::RingNotClosed));
    }

    #[test]
    fn degenerate_rejected() {
        let flat = ring(&[(0.0, 0.0), (1.0, 0.0), (2.0, 0.0), (0.0, 0.0)]);
        assert!(Polygon::new(flat, vec![]).is_err());
        let dup = ring(&[(0.0, 0.0), (1.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 0.0)]);
        assert!(Polygon::new(dup, vec![]).is_err());
    }

    #[test]
    fn hole_outside_rejected() {
        let outer = Polygon::rect(0.0, 0.0, 1.0, 1.0).unwrap().exterior;
        let hole = Polygon::rect(2.0, 2.0, 3.0, 3.0).unwrap().exterior;
        assert!(Polygon::new(outer, vec![hole]).is_err());
    }

    #[test]
    fn out_of_bounds_rejected() {
        assert!(Geometry::Point(Coord::new(181.0, 0.0)).validate().is_err());
        assert!(Geometry::Point(Coord::new(180.0, -90.0)).validate().is_ok());
    }
}

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{relate, Geometry, GeometryError, IntersectionMatrix, Location};

/// OGC Simple Features predicates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SpatialPredicate {
    #[serde(rename = "sfEquals")]
    Equals,
    #[serde(rename = "sfDisjoint")]
    Disjoint,
    #[serde(rename = "sfIntersects")]
    Intersects,
    #[serde(rename = "sfTouches")]
    Touches,
    #[serde(rename = "sfWithin")]
    Within,
    #[serde(rename = "sfContains")]
    Contains,
    #[serde(rename = "sfOverlaps")]
    Overlaps,
    #[serde(rename = "sfCrosses")]
    Crosses,
}

impl SpatialPredicate {
    pub const ALL: [SpatialPredicate; 8] = [
        SpatialPredicate::Equals,
        SpatialPredicate::Disjoint,
        SpatialPredicate::Intersects,
        SpatialPredicate::Touches,
        SpatialPredicate::Within,
        SpatialPredicate::Contains,
        SpatialPredicate::Overlaps,
        SpatialPredicate::Crosses,
    ];

    /// Local name used in vocabularies, e.g. `sfWithin`.
    pub fn local_name(self) -> &'static str {
        match self {
            SpatialPredicate::Equals => "sfEquals",
            SpatialPredicate::Disjoint => "sfDisjoint",
            SpatialPredicate::Intersects => "sfIntersects",
            SpatialPredicate::Touches => "sfTouches",
            SpatialPredicate::Within => "sfWithin",
            SpatialPredicate::Contains => "sfContains",
            SpatialPredicate::Overlaps => "sfOverlaps",
            SpatialPredicate::Crosses => "sfCrosses",
        }
    }

    /// The predicate that holds with operands swapped.
    pub fn converse(self) -> SpatialPredicate {
        match self {
            SpatialPredicate::Within => SpatialPredicate::Contains,
            SpatialPredicate::Contains => SpatialPredicate::Within,
            p => p,
        }
    }

    pub fn is_symmetric(self) -> bool {
        self.converse() == self
    }

    /// Mask test; `dim_a` and `dim_b` are the operands' topological
    /// dimensions, needed by overlaps and crosses.
    pub fn holds(self, m: &IntersectionMatrix, dim_a: u8, dim_b: u8) -> bool {
        match self {
            SpatialPredicate::Equals => m.matches("T*F**FFF*"),
            SpatialPredicate::Disjoint => m.matches("FF*FF****"),
            SpatialPredicate::Intersects => !m.matches("FF*FF****"),
            SpatialPredicate::Touches => {
                m.matches("FT*******") || m.matches("F**T*****") || m.matches("F***T****")
            }
            SpatialPredicate::Within => m.matches("T*F**F***"),
            SpatialPredicate::Contains => m.matches("T*****FF*"),
            SpatialPredicate::Overlaps => match (dim_a, dim_b) {
                (1, 1) => m.matches("1*T***T**"),
                (a, b) if a == b => m.matches("T*T***T**"),
                _ => false,
            },
            SpatialPredicate::Crosses => match (dim_a, dim_b) {
                (1, 1) => m.matches("0********"),
                (a, b) if a < b => m.matches("T*T******"),
                (a, b) if a > b && b < 2 => m.matches("T*****T**"),
                _ => false,
            },
        }
    }

    /// The most specific non-disjoint predicate holding for `m`, in the
    /// order equals, within, contains, overlaps, crosses, touches,
    /// intersects. `None` when the operands are disjoint.
    pub fn most_specific(m: &IntersectionMatrix, dim_a: u8, dim_b: u8) -> Option<SpatialPredicate> {
        use SpatialPredicate::*;
        [Equals, Within, Contains, Overlaps, Crosses, Touches, Intersects]
            .into_iter()
            .find(|p| p.holds(m, dim_a, dim_b))
    }
}

impl fmt::Display for SpatialPredicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.local_name())
    }
}

impl FromStr for SpatialPredicate {
    type Err = GeometryError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SpatialPredicate::ALL
            .into_iter()
            .find(|p| p.local_name().eq_ignore_ascii_case(s) || p.local_name()[2..].eq_ignore_ascii_case(s))
            .ok_or_else(|| GeometryError::Unsupported(format!("unknown spatial predicate {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Rcc8Relation {
    DC,
    EC,
    PO,
    EQ,
    TPP,
    NTPP,
    TPPi,
    NTPPi,
}

impl Rcc8Relation {
    pub const ALL: [Rcc8Relation; 8] = [
        Rcc8Relation::DC,
        Rcc8Relation::EC,
        Rcc8Relation::PO,
        Rcc8Relation::EQ,
        Rcc8Relation::TPP,
        Rcc8Relation::NTPP,
        Rcc8Relation::TPPi,
        Rcc8Relation::NTPPi,
    ];

    pub fn converse(self) -> Rcc8Relation {
        match self {
            Rcc8Relation::TPP => Rcc8Relation::TPPi,
            Rcc8Relation::NTPP => Rcc8Relation::NTPPi,
            Rcc8Relation::TPPi => Rcc8Relation::TPP,
            Rcc8Relation::NTPPi => Rcc8Relation::NTPP,
            r => r,
        }
    }

    /// Classify a matrix between two areal operands.
    pub fn from_matrix(m: &IntersectionMatrix) -> Rcc8Relation {
        use SpatialPredicate as P;
        let boundary_contact = m.get(Location::Boundary, Location::Boundary) != super::Dimension::Empty;
        if P::Disjoint.holds(m, 2, 2) {
            Rcc8Relation::DC
        } else if P::Equals.holds(m, 2, 2) {
            Rcc8Relation::EQ
        } else if P::Within.holds(m, 2, 2) {
            if boundary_contact {
                Rcc8Relation::TPP
            } else {
                Rcc8Relation::NTPP
            }
        } else if P::Contains.holds(m, 2, 2) {
            if boundary_contact {
                Rcc8Relation::TPPi
            } else {
                Rcc8Relation::NTPPi
            }
        } else if P::Touches.holds(m, 2, 2) {
            Rcc8Relation::EC
        } else {
            Rcc8Relation::PO
        }
    }
}

impl fmt::Display for Rcc8Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// RCC-8 relation between two areal geometries.
pub fn rcc8_of(a: &Geometry, b: &Geometry) -> Result<Rcc8Relation, GeometryError> {
    if !a.is_areal() || !b.is_areal() {
        return Err(GeometryError::Unsupported(
            "RCC-8 is defined for Polygon and MultiPolygon operands only".into(),
        ));
    }
    Ok(Rcc8Relation::from_matrix(&relate(a, b)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{parse_wkt, predicate};

    fn sq(x0: f64, y0: f64, x1: f64, y1: f64) -> Geometry {
        Geometry::Polygon(crate::geometry::Polygon::rect(x0, y0, x1, y1).unwrap())
    }

    #[test]
    fn nested_square_predicates() {
        let (a, b) = (sq(1.0, 1.0, 2.0, 2.0), sq(0.0, 0.0, 3.0, 3.0));
        assert!(predicate(&a, &b, SpatialPredicate::Within));
        assert!(predicate(&b, &a, SpatialPredicate::Contains));
        assert!(!predicate(&a, &b, SpatialPredicate::Overlaps));
        assert_eq!(rcc8_of(&a, &b).unwrap(), Rcc8Relation::NTPP);
    }

    #[test]
    fn disjoint_squares() {
        let (a, b) = (sq(0.0, 0.0, 1.0, 1.0), sq(2.0, 2.0, 3.0, 3.0));
        assert!(predicate(&a, &b, SpatialPredicate::Disjoint));
        assert!(!predicate(&a, &b, SpatialPredicate::Intersects));
        assert_eq!(rcc8_of(&a, &b).unwrap(), Rcc8Relation::DC);
    }

    #[test]
    fn touching_and_overlapping() {
        let (a, b) = (sq(0.0, 0.0, 1.0, 1.0), sq(1.0, 0.0, 2.0, 1.0));
        assert!(predicate(&a, &b, SpatialPredicate::Touches));
        assert_eq!(rcc8_of(&a, &b).unwrap(), Rcc8Relation::EC);
        let (c, d) = (sq(0.0, 0.0, 2.0, 2.0), sq(1.0, 1.0, 3.0, 3.0));
        assert_eq!(rcc8_of(&c, &d).unwrap(), Rcc8Relation::PO);
        assert_eq!(rcc8_of(&c, &c).unwrap(), Rcc8Relation::EQ);
    }

    #[test]
    fn tangential_part() {
        let (a, b) = (sq(0.0, 0.0, 1.0, 1.0), sq(0.0, 0.0, 3.0, 3.0));
        assert_eq!(rcc8_of(&a, &b).unwrap(), Rcc8Relation::TPP);
        assert_eq!(rcc8_of(&b, &a).unwrap(), Rcc8Relation::TPPi);
    }

    #[test]
    fn rcc8_rejects_lines() {
        let l = parse_wkt("LINESTRING (0 0, 1 1)").unwrap();
        assert!(rcc8_of(&l, &sq(0.0, 0.0, 1.0, 1.0)).is_err());
    }

    #[test]
    fn crosses_line_polygon() {
        let l = parse_wkt("LINESTRING (-1 0.5, 2 0.5)").unwrap();
        let p = sq(0.0, 0.0, 1.0, 1.0);
        assert!(predicate(&l, &p, SpatialPredicate::Crosses));
        assert!(predicate(&p, &l, SpatialPredicate::Crosses));
        assert!(!predicate(&p, &sq(0.5, 0.5, 2.0, 2.0), SpatialPredicate::Crosses));
    }

    #[test]
    fn most_specific_order() {
        let (a, b) = (sq(0.0, 0.0, 1.0, 1.0), sq(0.0, 0.0, 3.0, 3.0));
        let m = relate(&a, &b);
        assert_eq!(SpatialPredicate::most_specific(&m, 2, 2), Some(SpatialPredicate::Within));
        let far = relate(&a, &sq(5.0, 5.0, 6.0, 6.0));
        assert_eq!(SpatialPredicate::most_specific(&far, 2, 2), None);
    }

    #[test]
    fn names_roundtrip() {
        for p in SpatialPredicate::ALL {
            assert_eq!(p.local_name().parse::<SpatialPredicate>().unwrap(), p);
        }
        assert_eq!("within".parse::<SpatialPredicate>().unwrap(), SpatialPredicate::Within);
    }
}

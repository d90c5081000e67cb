use serde_json::{json, Value};

use super::{Coord, Geometry, GeometryError, Polygon};

fn pos(c: &Coord) -> Value {
    json!([c.lng, c.lat])
}

fn line(cs: &[Coord]) -> Value {
    Value::Array(cs.iter().map(pos).collect())
}

fn poly(p: &Polygon) -> Value {
    Value::Array(std::iter::once(&p.exterior).chain(&p.interiors).map(|r| line(r)).collect())
}

fn bad(msg: impl Into<String>) -> GeometryError {
    GeometryError::GeoJson(msg.into())
}

fn read_pos(v: &Value) -> Result<Coord, GeometryError> {
    let arr = v.as_array().ok_or_else(|| bad("position must be an array"))?;
    if arr.len() != 2 {
        return Err(GeometryError::Arity(arr.len()));
    }
    let n = |x: &Value| x.as_f64().ok_or_else(|| bad("position ordinates must be numbers"));
    Ok(Coord::new(n(&arr[0])?, n(&arr[1])?))
}

fn read_array<'a>(v: &'a Value, what: &str) -> Result<&'a Vec<Value>, GeometryError> {
    v.as_array().ok_or_else(|| bad(format!("{what} must be an array")))
}

fn read_line(v: &Value) -> Result<Vec<Coord>, GeometryError> {
    read_array(v, "line")?.iter().map(read_pos).collect()
}

fn read_poly(v: &Value) -> Result<Polygon, GeometryError> {
    let mut rings: Vec<Vec<Coord>> = read_array(v, "polygon")?.iter().map(read_line).collect::<Result<_, _>>()?;
    if rings.is_empty() {
        return Err(bad("polygon needs an exterior ring"));
    }
    if rings.iter().any(|r| r.first() != r.last()) {
        return Err(GeometryError::RingNotClosed);
    }
    let exterior = rings.remove(0);
    Polygon::new(exterior, rings)
}

impl Geometry {
    /// GeoJSON geometry object.
    pub fn to_geojson(&self) -> Value {
        let coords = match self {
            Geometry::Point(c) => pos(c),
            Geometry::LineString(l) | Geometry::MultiPoint(l) => line(l),
            Geometry::Polygon(p) => poly(p),
            Geometry::MultiLineString(ls) => Value::Array(ls.iter().map(|l| line(l)).collect()),
            Geometry::MultiPolygon(ps) => Value::Array(ps.iter().map(poly).collect()),
        };
        json!({ "type": self.tag(), "coordinates": coords })
    }

    /// Parse a GeoJSON geometry object, or the geometry of a Feature.
    pub fn from_geojson(v: &Value) -> Result<Geometry, GeometryError> {
        let ty = v.get("type").and_then(Value::as_str).ok_or_else(|| bad("missing \"type\""))?;
        if ty == "Feature" {
            return Geometry::from_geojson(v.get("geometry").ok_or_else(|| bad("feature without geometry"))?);
        }
        let c = v.get("coordinates").ok_or_else(|| bad("missing \"coordinates\""))?;
        let g = match ty {
            "Point" => Geometry::Point(read_pos(c)?),
            "LineString" => Geometry::LineString(read_line(c)?),
            "Polygon" => Geometry::Polygon(read_poly(c)?),
            "MultiPoint" => Geometry::MultiPoint(read_line(c)?),
            "MultiLineString" => {
                Geometry::MultiLineString(read_array(c, "coordinates")?.iter().map(read_line).collect::<Result<_, _>>()?)
            }
            "MultiPolygon" => {
                Geometry::MultiPolygon(read_array(c, "coordinates")?.iter().map(read_poly).collect::<Result<_, _>>()?)
            }
            other => return Err(GeometryError::UnknownTag(other.to_string())),
        };
        g.validate()?;
        Ok(g)
    }

    pub fn from_geojson_str(s: &str) -> Result<Geometry, GeometryError> {
        let v: Value = serde_json::from_str(s).map_err(|e| bad(e.to_string()))?;
        Geometry::from_geojson(&v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::parse_wkt;

    #[test]
    fn roundtrip_all_tags() {
        for wkt in [
            "POINT (1 2)",
            "LINESTRING (0 0, 1 1, 2 0)",
            "POLYGON ((0 0, 4 0, 4 4, 0 4, 0 0), (1 1, 1 2, 2 2, 2 1, 1 1))",
            "MULTIPOINT ((0 0), (1 1))",
            "MULTILINESTRING ((0 0, 1 1), (2 2, 3 3))",
            "MULTIPOLYGON (((0 0, 1 0, 1 1, 0 1, 0 0)), ((2 2, 3 2, 3 3, 2 3, 2 2)))",
        ] {
            let g = parse_wkt(wkt).unwrap();
            assert_eq!(Geometry::from_geojson(&g.to_geojson()).unwrap(), g, "{wkt}");
        }
    }

    #[test]
    fn feature_wrapper_and_errors() {
        let f = json!({"type": "Feature", "geometry": {"type": "Point", "coordinates": [3.0, 4.0]}});
        assert_eq!(Geometry::from_geojson(&f).unwrap(), Geometry::Point(Coord::new(3.0, 4.0)));
        assert!(Geometry::from_geojson(&json!({"type": "Point", "coordinates": [1.0]})).is_err());
        assert!(Geometry::from_geojson(&json!({"type": "Blob", "coordinates": []})).is_err());
    }
}

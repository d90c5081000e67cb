//! Well-Known Text in (lng lat) axis order.

use std::fmt::Write as _;

use super::{Coord, Geometry, GeometryError, Polygon};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Word(String),
    Num(f64),
    Open,
    Close,
    Comma,
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, GeometryError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut depth: i64 = 0;
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            c if c.is_ascii_whitespace() => i += 1,
            '(' => {
                depth += 1;
                out.push((i, Tok::Open));
                i += 1;
            }
            ')' => {
                depth -= 1;
                if depth < 0 {
                    return Err(GeometryError::Unbalanced);
                }
                out.push((i, Tok::Close));
                i += 1;
            }
            ',' => {
                out.push((i, Tok::Comma));
                i += 1;
            }
            c if c.is_ascii_alphabetic() => {
                let start = i;
                while i < bytes.len() && (bytes[i] as char).is_ascii_alphabetic() {
                    i += 1;
                }
                out.push((start, Tok::Word(text[start..i].to_ascii_uppercase())));
            }
            c if c.is_ascii_digit() || c == '-' || c == '+' || c == '.' => {
                let start = i;
                i += 1;
                while i < bytes.len() {
                    let d = bytes[i] as char;
                    let exp_sign = (d == '-' || d == '+') && matches!(bytes[i - 1], b'e' | b'E');
                    if d.is_ascii_digit() || d == '.' || d == 'e' || d == 'E' || exp_sign {
                        i += 1;
                    } else {
                        break;
                    }
                }
                let lexeme = &text[start..i];
                let v: f64 = lexeme.parse().map_err(|_| GeometryError::Syntax {
                    offset: start,
                    message: format!("bad number {lexeme:?}"),
                })?;
                if !v.is_finite() {
                    return Err(GeometryError::Syntax { offset: start, message: "non-finite number".into() });
                }
                out.push((start, Tok::Num(v)));
            }
            other => {
                return Err(GeometryError::Syntax { offset: i, message: format!("unexpected character {other:?}") });
            }
        }
    }
    if depth != 0 {
        return Err(GeometryError::Unbalanced);
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    len: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map(|(o, _)| *o).unwrap_or(self.len)
    }

    fn err(&self, message: impl Into<String>) -> GeometryError {
        GeometryError::Syntax { offset: self.offset(), message: message.into() }
    }

    fn expect(&mut self, t: Tok, what: &str) -> Result<(), GeometryError> {
        if self.peek() == Some(&t) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(format!("expected {what}")))
        }
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    /// `EMPTY` after a tag; true when consumed.
    fn empty(&mut self) -> bool {
        self.eat(&Tok::Word("EMPTY".into()))
    }

    fn coord(&mut self) -> Result<Coord, GeometryError> {
        let mut nums = Vec::with_capacity(2);
        while let Some(Tok::Num(v)) = self.peek() {
            nums.push(*v);
            self.pos += 1;
        }
        match nums.len() {
            2 => Ok(Coord::new(nums[0], nums[1])),
            0 => Err(self.err("expected coordinate")),
            n => Err(GeometryError::Arity(n)),
        }
    }

    fn coord_list(&mut self) -> Result<Vec<Coord>, GeometryError> {
        self.expect(Tok::Open, "'('")?;
        let mut out = vec![self.coord()?];
        while self.eat(&Tok::Comma) {
            out.push(self.coord()?);
        }
        self.expect(Tok::Close, "')'")?;
        Ok(out)
    }

    fn list<T>(&mut self, mut item: impl FnMut(&mut Self) -> Result<T, GeometryError>) -> Result<Vec<T>, GeometryError> {
        self.expect(Tok::Open, "'('")?;
        let mut out = vec![item(self)?];
        while self.eat(&Tok::Comma) {
            out.push(item(self)?);
        }
        self.expect(Tok::Close, "')'")?;
        Ok(out)
    }

    fn polygon(&mut self) -> Result<Polygon, GeometryError> {
        let mut rings = self.list(Self::coord_list)?;
        for r in &rings {
            if r.first() != r.last() {
                return Err(GeometryError::RingNotClosed);
            }
        }
        let exterior = rings.remove(0);
        Polygon::new(exterior, rings)
    }

    fn multipoint_member(&mut self) -> Result<Coord, GeometryError> {
        if self.eat(&Tok::Open) {
            let c = self.coord()?;
            self.expect(Tok::Close, "')'")?;
            Ok(c)
        } else {
            self.coord()
        }
    }

    fn geometry(&mut self) -> Result<Geometry, GeometryError> {
        let tag = match self.peek() {
            Some(Tok::Word(w)) => w.clone(),
            _ => return Err(self.err("expected geometry tag")),
        };
        self.pos += 1;
        let g = match tag.as_str() {
            "POINT" => {
                if self.empty() {
                    return Err(GeometryError::Unsupported("POINT EMPTY is not supported".into()));
                }
                self.expect(Tok::Open, "'('")?;
                let c = self.coord()?;
                self.expect(Tok::Close, "')'")?;
                Geometry::Point(c)
            }
            "LINESTRING" => {
                if self.empty() {
                    return Err(GeometryError::Unsupported("LINESTRING EMPTY is not supported".into()));
                }
                Geometry::LineString(self.coord_list()?)
            }
            "POLYGON" => {
                if self.empty() {
                    return Err(GeometryError::Unsupported("POLYGON EMPTY is not supported".into()));
                }
                Geometry::Polygon(self.polygon()?)
            }
            "MULTIPOINT" => {
                if self.empty() {
                    Geometry::MultiPoint(vec![])
                } else {
                    Geometry::MultiPoint(self.list(Self::multipoint_member)?)
                }
            }
            "MULTILINESTRING" => {
                if self.empty() {
                    Geometry::MultiLineString(vec![])
                } else {
                    Geometry::MultiLineString(self.list(Self::coord_list)?)
                }
            }
            "MULTIPOLYGON" => {
                if self.empty() {
                    Geometry::MultiPolygon(vec![])
                } else {
                    Geometry::MultiPolygon(self.list(Self::polygon)?)
                }
            }
            _ => return Err(GeometryError::UnknownTag(tag)),
        };
        Ok(g)
    }
}

/// Parse and validate a WKT geometry.
pub fn parse_wkt(text: &str) -> Result<Geometry, GeometryError> {
    let toks = lex(text)?;
    let mut p = Parser { toks, pos: 0, len: text.len() };
    let g = p.geometry()?;
    if p.pos != p.toks.len() {
        return Err(p.err("trailing input"));
    }
    g.validate()?;
    Ok(g)
}

fn write_coords(out: &mut String, cs: &[Coord]) {
    out.push('(');
    for (k, c) in cs.iter().enumerate() {
        if k > 0 {
            out.push_str(", ");
        }
        let _ = write!(out, "{} {}", c.lng, c.lat);
    }
    out.push(')');
}

fn write_polygon(out: &mut String, p: &Polygon) {
    out.push('(');
    write_coords(out, &p.exterior);
    for h in &p.interiors {
        out.push_str(", ");
        write_coords(out, h);
    }
    out.push(')');
}

fn write_list<T>(out: &mut String, items: &[T], f: impl Fn(&mut String, &T)) {
    if items.is_empty() {
        out.push_str("EMPTY");
        return;
    }
    out.push('(');
    for (k, it) in items.iter().enumerate() {
        if k > 0 {
            out.push_str(", ");
        }
        f(out, it);
    }
    out.push(')');
}

/// WKT text with shortest round-trip number formatting.
pub fn serialize_wkt(g: &Geometry) -> String {
    let mut out = String::new();
    out.push_str(&g.tag().to_ascii_uppercase());
    out.push(' ');
    match g {
        Geometry::Point(c) => write_coords(&mut out, std::slice::from_ref(c)),
        Geometry::LineString(l) => write_coords(&mut out, l),
        Geometry::Polygon(p) => write_polygon(&mut out, p),
        Geometry::MultiPoint(ps) => write_list(&mut out, ps, |o, c| write_coords(o, std::slice::from_ref(c))),
        Geometry::MultiLineString(ls) => write_list(&mut out, ls, |o, l| write_coords(o, l)),
        Geometry::MultiPolygon(ps) => write_list(&mut out, ps, write_polygon),
    }
    out
}

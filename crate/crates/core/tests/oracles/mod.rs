//! Independent reference implementations used by the integration and
//! acceptance tests. Everything here is deliberately naive.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use gridkg_core::dgg::{cover_geometry, CellId, CellPolygon, LatLng};
use gridkg_core::geometry::{Geometry, Polygon, Rcc8Relation, SpatialPredicate};
use gridkg_core::ingest::{RasterKind, RasterLayer};
use gridkg_core::kgmodel::{ns, Term, Triple};
use gridkg_core::query::{PatternTerm, QueryAst};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

/// Uniform point on the sphere.
pub fn random_point(rng: &mut StdRng) -> LatLng {
    let z: f64 = rng.gen_range(-1.0..1.0);
    let lng: f64 = rng.gen_range(-180.0..180.0);
    LatLng::new(z.asin().to_degrees(), lng).unwrap()
}

// ---------------------------------------------------------------- DE-9IM

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
}

impl Rect {
    pub fn geometry(&self) -> Geometry {
        Geometry::Polygon(Polygon::rect(self.x0, self.y0, self.x1, self.y1).unwrap())
    }

    /// 0 interior, 1 boundary, 2 exterior.
    fn locate(&self, x: f64, y: f64) -> usize {
        let inside = x >= self.x0 && x <= self.x1 && y >= self.y0 && y <= self.y1;
        if !inside {
            2
        } else if x == self.x0 || x == self.x1 || y == self.y0 || y == self.y1 {
            1
        } else {
            0
        }
    }
}

fn random_rect(rng: &mut StdRng) -> Rect {
    let x0 = rng.gen_range(0..9) as f64;
    let y0 = rng.gen_range(0..9) as f64;
    let x1 = rng.gen_range(x0 as i32 + 1..=10) as f64;
    let y1 = rng.gen_range(y0 as i32 + 1..=10) as f64;
    Rect { x0, y0, x1, y1 }
}

/// Pair of integer-cornered rectangles in [0, 10]²; a share of pairs is
/// forced to be equal, nested or edge-adjacent so every relation occurs.
pub fn random_rect_pair(rng: &mut StdRng) -> (Rect, Rect) {
    let a = random_rect(rng);
    let b = match rng.gen_range(0..6) {
        0 => a,
        1 if a.x1 - a.x0 >= 3.0 && a.y1 - a.y0 >= 3.0 => Rect { x0: a.x0 + 1.0, y0: a.y0 + 1.0, x1: a.x1 - 1.0, y1: a.y1 - 1.0 },
        2 => Rect { x0: a.x0, y0: a.y0, x1: a.x1.min(a.x0 + 1.0), y1: a.y1 },
        3 if a.x1 < 10.0 => Rect { x0: a.x1, y0: a.y0, x1: 10.0, y1: a.y1 },
        _ => random_rect(rng),
    };
    if rng.gen_bool(0.5) {
        (b, a)
    } else {
        (a, b)
    }
}

/// Which of the nine interior/boundary/exterior intersections are nonempty,
/// judged from a 193×193 lattice (step 1/16) over [-1, 11]² that contains
/// every corner and edge of the integer rectangles.
pub fn sampled_incidence(a: &Rect, b: &Rect) -> [[bool; 3]; 3] {
    let mut m = [[false; 3]; 3];
    for i in 0..=192 {
        for j in 0..=192 {
            let x = -1.0 + f64::from(i) / 16.0;
            let y = -1.0 + f64::from(j) / 16.0;
            m[a.locate(x, y)][b.locate(x, y)] = true;
        }
    }
    m
}

/// Predicate truth from the nonempty-intersection table, for two regions.
pub fn sf_oracle(p: SpatialPredicate, m: &[[bool; 3]; 3]) -> bool {
    const I: usize = 0;
    const B: usize = 1;
    const E: usize = 2;
    let meets = m[I][I] || m[I][B] || m[B][I] || m[B][B];
    match p {
        SpatialPredicate::Equals => m[I][I] && !m[I][E] && !m[B][E] && !m[E][I] && !m[E][B],
        SpatialPredicate::Disjoint => !meets,
        SpatialPredicate::Intersects => meets,
        SpatialPredicate::Touches => !m[I][I] && meets,
        SpatialPredicate::Crosses => false,
        SpatialPredicate::Within => m[I][I] && !m[I][E] && !m[B][E],
        SpatialPredicate::Contains => m[I][I] && !m[E][I] && !m[E][B],
        SpatialPredicate::Overlaps => m[I][I] && m[I][E] && m[E][I],
    }
}

/// Every RCC-8 relation whose point-set definition holds.
pub fn rcc8_oracle(m: &[[bool; 3]; 3]) -> Vec<Rcc8Relation> {
    const I: usize = 0;
    const B: usize = 1;
    const E: usize = 2;
    let closures_meet = m[I][I] || m[I][B] || m[B][I] || m[B][B];
    let a_in_b = !m[I][E] && !m[B][E];
    let b_in_a = !m[E][I] && !m[E][B];
    let a_in_int_b = a_in_b && !m[I][B] && !m[B][B];
    let b_in_int_a = b_in_a && !m[B][I] && !m[B][B];
    let mut out = Vec::new();
    let mut push = |holds: bool, r| {
        if holds {
            out.push(r)
        }
    };
    push(!closures_meet, Rcc8Relation::DC);
    push(closures_meet && !m[I][I], Rcc8Relation::EC);
    push(m[I][I] && m[I][E] && m[E][I], Rcc8Relation::PO);
    push(a_in_b && b_in_a, Rcc8Relation::EQ);
    push(m[I][I] && a_in_b && !b_in_a && !a_in_int_b, Rcc8Relation::TPP);
    push(m[I][I] && a_in_int_b && !b_in_a, Rcc8Relation::NTPP);
    push(m[I][I] && b_in_a && !a_in_b && !b_in_int_a, Rcc8Relation::TPPi);
    push(m[I][I] && b_in_int_a && !a_in_b, Rcc8Relation::NTPPi);
    out
}

// ----------------------------------------------------------------- store

pub fn entity(i: usize) -> Term {
    Term::iri(format!("urn:e{i}"))
}

pub fn predicate(i: usize) -> Term {
    Term::iri(format!("urn:p{i}"))
}

fn random_object(rng: &mut StdRng) -> Term {
    if rng.gen_bool(0.3) {
        Term::integer(rng.gen_range(0..10))
    } else {
        entity(rng.gen_range(0..15))
    }
}

/// Up to `n` distinct random triples over 15 entities, 5 predicates and the
/// integers 0..10.
pub fn random_triples(rng: &mut StdRng, n: usize) -> Vec<Triple> {
    let set: BTreeSet<Triple> = (0..n)
        .map(|_| Triple::new(entity(rng.gen_range(0..15)), predicate(rng.gen_range(0..5)), random_object(rng)))
        .collect();
    set.into_iter().collect()
}

pub type Pattern = (Option<Term>, Option<Term>, Option<Term>);

pub fn random_pattern(rng: &mut StdRng) -> Pattern {
    (
        rng.gen_bool(0.5).then(|| entity(rng.gen_range(0..16))),
        rng.gen_bool(0.5).then(|| predicate(rng.gen_range(0..6))),
        rng.gen_bool(0.5).then(|| random_object(rng)),
    )
}

/// Linear scan.
pub fn scan(triples: &[Triple], (s, p, o): &Pattern) -> BTreeSet<Triple> {
    triples
        .iter()
        .filter(|t| s.as_ref().is_none_or(|s| &t.s == s))
        .filter(|t| p.as_ref().is_none_or(|p| &t.p == p))
        .filter(|t| o.as_ref().is_none_or(|o| &t.o == o))
        .cloned()
        .collect()
}

// ----------------------------------------------------------------- query

fn term_text(t: &Term) -> String {
    match t {
        Term::Literal { lexical, datatype } if datatype == ns::XSD_INTEGER => lexical.clone(),
        other => other.to_string(),
    }
}

/// Random SELECT over the vocabulary of [`random_triples`], with 1–3
/// patterns, optional FILTER, DISTINCT and projection.
pub fn random_query(rng: &mut StdRng) -> String {
    let vars = ["a", "b", "c"];
    let n = rng.gen_range(1..=3);
    let mut used: Vec<&str> = Vec::new();
    let mut pats = Vec::new();
    for _ in 0..n {
        let mut slot = |rng: &mut StdRng, pos: usize| -> String {
            if rng.gen_bool(0.55) {
                let v = vars[rng.gen_range(0..vars.len())];
                if !used.contains(&v) {
                    used.push(v);
                }
                format!("?{v}")
            } else {
                match pos {
                    0 => term_text(&entity(rng.gen_range(0..15))),
                    1 => term_text(&predicate(rng.gen_range(0..5))),
                    _ => term_text(&random_object(rng)),
                }
            }
        };
        let s = slot(rng, 0);
        let p = slot(rng, 1);
        let o = slot(rng, 2);
        pats.push(format!("{s} {p} {o} ."));
    }
    if used.is_empty() {
        used.push("a");
        pats.push("?a <urn:p0> ?b .".into());
        used.push("b");
    }
    let mut body = pats.join(" ");
    if rng.gen_bool(0.35) {
        let v = used[rng.gen_range(0..used.len())];
        let op = ["<", ">", "<=", ">=", "=", "!="][rng.gen_range(0..6)];
        let c = if rng.gen_bool(0.6) { rng.gen_range(0..10).to_string() } else { term_text(&entity(rng.gen_range(0..15))) };
        body.push_str(&format!(" FILTER(?{v} {op} {c})"));
    }
    let distinct = if rng.gen_bool(0.3) { "DISTINCT " } else { "" };
    let projection = if rng.gen_bool(0.5) {
        "*".to_string()
    } else {
        let k = rng.gen_range(1..=used.len());
        used[..k].iter().map(|v| format!("?{v}")).collect::<Vec<_>>().join(" ")
    };
    format!("SELECT {distinct}{projection} WHERE {{ {body} }}")
}

fn compare_terms(a: &Term, op: &str, b: &Term) -> bool {
    use std::cmp::Ordering::*;
    let ord = match (a.as_f64(), b.as_f64()) {
        (Some(x), Some(y)) => x.partial_cmp(&y),
        _ => {
            if op == "=" {
                return a == b;
            }
            if op == "!=" {
                return a != b;
            }
            Some(a.value().cmp(b.value()))
        }
    };
    match (op, ord) {
        ("!=", None) => true,
        (_, None) => false,
        ("<", Some(o)) => o == Less,
        (">", Some(o)) => o == Greater,
        ("<=", Some(o)) => o != Greater,
        (">=", Some(o)) => o != Less,
        ("=", Some(o)) => o == Equal,
        (_, Some(o)) => o != Equal,
    }
}

fn op_text(op: gridkg_core::query::CompareOp) -> &'static str {
    use gridkg_core::query::CompareOp::*;
    match op {
        Lt => "<",
        Gt => ">",
        Le => "<=",
        Ge => ">=",
        Eq => "=",
        Ne => "!=",
    }
}

/// Rows of `ast` over `triples` by plain nested loops in pattern order,
/// each as the projected terms (None when unbound), sorted.
pub fn nested_loop(ast: &QueryAst, triples: &[Triple]) -> Vec<Vec<Option<Term>>> {
    let mut rows: Vec<BTreeMap<String, Term>> = vec![BTreeMap::new()];
    for pat in &ast.patterns {
        let mut next = Vec::new();
        for row in &rows {
            'triple: for t in triples {
                let mut r = row.clone();
                for (pt, val) in pat.positions().into_iter().zip([&t.s, &t.p, &t.o]) {
                    match pt {
                        PatternTerm::Term(c) => {
                            if c != val {
                                continue 'triple;
                            }
                        }
                        PatternTerm::Var(v) => match r.get(v) {
                            Some(bound) if bound != val => continue 'triple,
                            Some(_) => {}
                            None => {
                                r.insert(v.clone(), val.clone());
                            }
                        },
                    }
                }
                next.push(r);
            }
        }
        rows = next;
    }
    rows.retain(|r| ast.filters.iter().all(|f| compare_terms(&r[&f.var], op_text(f.op), &f.value)));
    let proj = ast.projected();
    let mut out: Vec<Vec<Option<Term>>> = rows.iter().map(|r| proj.iter().map(|v| r.get(v).cloned()).collect()).collect();
    out.sort();
    if ast.distinct {
        out.dedup();
    }
    out
}

/// Evaluator rows in the same normalized form as [`nested_loop`].
pub fn normalize(result: &gridkg_core::query::QueryResult) -> Vec<Vec<Option<Term>>> {
    let mut out: Vec<Vec<Option<Term>>> =
        result.rows.iter().map(|r| result.vars.iter().map(|v| r.get(v).cloned()).collect()).collect();
    out.sort();
    out
}

// ---------------------------------------------------------------- raster

pub fn random_raster(rng: &mut StdRng, rows: usize, cols: usize) -> RasterLayer {
    let values = (0..rows * cols).map(|_| rng.gen_range(0.0..100.0)).collect();
    RasterLayer::new([-91.5, 30.0, -91.0, 30.5], rows, cols, values, RasterKind::Continuous, None).unwrap()
}

/// Per-cell mean by brute force: each pixel centre is tested against every
/// candidate cell polygon on the sphere and assigned to the smallest
/// containing cell id.
pub fn bucket_oracle(r: &RasterLayer, level: u8) -> BTreeMap<CellId, f64> {
    let bbox = Geometry::Polygon(Polygon::rect(r.min_lng, r.min_lat, r.max_lng, r.max_lat).unwrap());
    let coarse = cover_geometry(&bbox, level.saturating_sub(2)).unwrap();
    let mut candidates: Vec<CellPolygon> = Vec::new();
    for c in coarse {
        let mut stack = vec![c];
        while let Some(x) = stack.pop() {
            if x.level() == level {
                candidates.push(CellPolygon::new(x));
            } else {
                stack.extend(x.children().unwrap());
            }
        }
    }
    let mut acc: BTreeMap<CellId, Vec<f64>> = BTreeMap::new();
    for row in 0..r.rows {
        for col in 0..r.cols {
            let v = r.values[row * r.cols + col];
            let lng = r.min_lng + (col as f64 + 0.5) * (r.max_lng - r.min_lng) / r.cols as f64;
            let lat = r.max_lat - (row as f64 + 0.5) * (r.max_lat - r.min_lat) / r.rows as f64;
            let p = LatLng::new(lat, lng).unwrap();
            let cell = candidates.iter().filter(|c| c.contains(p)).map(|c| c.cell()).min().expect("pixel centre in some cell");
            acc.entry(cell).or_default().push(v);
        }
    }
    acc.into_iter().map(|(c, vs)| (c, vs.iter().sum::<f64>() / vs.len() as f64)).collect()
}

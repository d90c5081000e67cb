//! Shape-based conformance checks: class targets (subclasses included) with
//! cardinality, datatype and value-class constraints.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::kgmodel::{ns, Term};
use crate::store::Store;

const BUNDLED: &str = include_str!("../../shapes/kernel.json");

#[derive(Debug, Error)]
pub enum ShapeError {
    #[error("shape file: {0}")]
    Json(#[from] serde_json::Error),
    #[error("shape {shape}: cannot resolve {iri:?}")]
    Unresolved { shape: String, iri: String },
    #[error("shape {shape}: min_count {min} exceeds max_count {max}")]
    Cardinality { shape: String, min: usize, max: usize },
    #[error("shape {0}: empty path")]
    EmptyPath(String),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum PathSpec {
    One(String),
    Alternatives(Vec<String>),
}

#[derive(Debug, Clone, Deserialize)]
struct RawConstraint {
    path: PathSpec,
    #[serde(default)]
    min_count: usize,
    max_count: Option<usize>,
    datatype: Option<String>,
    value_class: Option<String>,
}

#[derive(Debug, Clone, Deserialize)]
struct RawShape {
    id: String,
    target_class: String,
    constraints: Vec<RawConstraint>,
}

#[derive(Debug, Clone, Deserialize)]
struct RawFile {
    shapes: Vec<RawShape>,
}

/// One property constraint. `path` lists alternative predicates whose
/// values are pooled.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    pub path: Vec<String>,
    pub min_count: usize,
    pub max_count: Option<usize>,
    pub datatype: Option<String>,
    pub value_class: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShapeSpec {
    pub id: String,
    pub target_class: String,
    pub constraints: Vec<Constraint>,
}

impl ShapeSpec {
    /// Parse a shape document: `{"shapes": [{"id", "target_class",
    /// "constraints": [{"path", "min_count", "max_count", "datatype",
    /// "value_class"}]}]}`. IRIs may be CURIEs from the namespace table.
    pub fn parse_document(text: &str) -> Result<Vec<ShapeSpec>, ShapeError> {
        let raw: RawFile = serde_json::from_str(text)?;
        raw.shapes.into_iter().map(ShapeSpec::from_raw).collect()
    }

    pub fn bundled() -> Vec<ShapeSpec> {
        ShapeSpec::parse_document(BUNDLED).expect("bundled shapes are valid")
    }

    fn from_raw(r: RawShape) -> Result<ShapeSpec, ShapeError> {
        let id = r.id;
        let resolve = |s: &str| {
            ns::resolve(s).ok_or_else(|| ShapeError::Unresolved { shape: id.clone(), iri: s.to_string() })
        };
        let target_class = resolve(&r.target_class)?;
        let mut constraints = Vec::new();
        for c in r.constraints {
            let path = match c.path {
                PathSpec::One(p) => vec![resolve(&p)?],
                PathSpec::Alternatives(ps) => ps.iter().map(|p| resolve(p)).collect::<Result<_, _>>()?,
            };
            if path.is_empty() {
                return Err(ShapeError::EmptyPath(id.clone()));
            }
            if let Some(max) = c.max_count {
                if c.min_count > max {
                    return Err(ShapeError::Cardinality { shape: id.clone(), min: c.min_count, max });
                }
            }
            constraints.push(Constraint {
                path,
                min_count: c.min_count,
                max_count: c.max_count,
                datatype: c.datatype.as_deref().map(resolve).transpose()?,
                value_class: c.value_class.as_deref().map(resolve).transpose()?,
            });
        }
        Ok(ShapeSpec { id, target_class, constraints })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstraintKind {
    MinCount,
    MaxCount,
    Datatype,
    ValueClass,
}

impl fmt::Display for ConstraintKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ConstraintKind::MinCount => "min_count",
            ConstraintKind::MaxCount => "max_count",
            ConstraintKind::Datatype => "datatype",
            ConstraintKind::ValueClass => "value_class",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Violation {
    pub focus: String,
    pub shape: String,
    pub kind: ConstraintKind,
    pub path: String,
    pub message: String,
}

/// Classes whose instances count as instances of `class`.
pub fn subclass_closure(store: &Store, class: &str) -> BTreeSet<Term> {
    let sub = Term::iri(ns::RDFS_SUBCLASS_OF);
    let mut out = BTreeSet::new();
    let mut stack = vec![Term::iri(class)];
    while let Some(c) = stack.pop() {
        if out.insert(c.clone()) {
            stack.extend(store.subjects(&sub, &c));
        }
    }
    out
}

fn instances(store: &Store, classes: &BTreeSet<Term>) -> BTreeSet<Term> {
    let ty = Term::iri(ns::RDF_TYPE);
    classes.iter().flat_map(|c| store.subjects(&ty, c)).collect()
}

pub fn validate(store: &Store, shapes: &[ShapeSpec]) -> Vec<Violation> {
    let ty = Term::iri(ns::RDF_TYPE);
    let mut out = Vec::new();
    for shape in shapes {
        let focus_nodes = instances(store, &subclass_closure(store, &shape.target_class));
        for c in &shape.constraints {
            let path_label = c.path.iter().map(|p| compact(p)).collect::<Vec<_>>().join("|");
            let allowed: Option<HashSet<Term>> =
                c.value_class.as_ref().map(|vc| subclass_closure(store, vc).into_iter().collect());
            for focus in &focus_nodes {
                let values: Vec<Term> = c.path.iter().flat_map(|p| store.objects(focus, &Term::iri(p))).collect();
                let mut push = |kind, message: String| {
                    out.push(Violation {
                        focus: focus.value().to_string(),
                        shape: shape.id.clone(),
                        kind,
                        path: path_label.clone(),
                        message,
                    })
                };
                if values.len() < c.min_count {
                    push(
                        ConstraintKind::MinCount,
                        format!("expected at least {} value(s) for {path_label}, found {}", c.min_count, values.len()),
                    );
                }
                if let Some(max) = c.max_count {
                    if values.len() > max {
                        push(
                            ConstraintKind::MaxCount,
                            format!("expected at most {max} value(s) for {path_label}, found {}", values.len()),
                        );
                    }
                }
                if let Some(dt) = &c.datatype {
                    for v in &values {
                        if v.datatype() != Some(dt.as_str()) {
                            push(ConstraintKind::Datatype, format!("value {v} is not of datatype <{dt}>"));
                        }
                    }
                }
                if let (Some(vc), Some(allowed)) = (&c.value_class, &allowed) {
                    for v in &values {
                        let ok = store.objects(v, &ty).iter().any(|t| allowed.contains(t));
                        if !ok {
                            push(ConstraintKind::ValueClass, format!("value {v} is not an instance of <{vc}>"));
                        }
                    }
                }
            }
        }
    }
    out.sort();
    out
}

fn compact(iri: &str) -> String {
    match ns::compact(iri) {
        Some((p, local)) => format!("{p}:{local}"),
        None => format!("<{iri}>"),
    }
}

pub fn report_json(violations: &[Violation]) -> serde_json::Value {
    serde_json::json!({ "conforms": violations.is_empty(), "violations": violations })
}

pub fn report_text(violations: &[Violation]) -> String {
    if violations.is_empty() {
        return "conforms: 0 violations\n".to_string();
    }
    let mut out = format!("{} violation(s)\n", violations.len());
    for v in violations {
        out.push_str(&format!("{} [{}] {} on {}: {}\n", v.focus, v.shape, v.kind, v.path, v.message));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kgmodel::Triple;

    fn store() -> Store {
        let mut st = Store::new();
        st.insert(&Triple::iri("urn:VulnObs", ns::RDFS_SUBCLASS_OF, Term::iri(ns::SOSA_OBSERVATION)));
        st.insert(&Triple::iri("urn:o1", ns::RDF_TYPE, Term::iri("urn:VulnObs")));
        st.insert(&Triple::iri("urn:o1", ns::SOSA_HAS_FOI, Term::iri("urn:f")));
        st.insert(&Triple::iri("urn:o1", ns::SOSA_OBSERVED_PROPERTY, Term::iri("urn:p")));
        st.insert(&Triple::iri("urn:p", ns::RDF_TYPE, Term::iri(ns::SOSA_OBSERVABLE_PROPERTY)));
        st.insert(&Triple::iri("urn:o1", ns::SOSA_HAS_SIMPLE_RESULT, Term::double(0.5)));
        st
    }

    fn obs_shape() -> Vec<ShapeSpec> {
        ShapeSpec::bundled().into_iter().filter(|s| s.id == "ObservationShape").collect()
    }

    #[test]
    fn bundled_shapes_parse() {
        let shapes = ShapeSpec::bundled();
        assert!(shapes.len() >= 6);
        assert_eq!(shapes[0].constraints[0].path.len(), 2);
    }

    #[test]
    fn subclass_targets_and_conformance() {
        assert_eq!(validate(&store(), &obs_shape()), vec![]);
    }

    #[test]
    fn missing_result() {
        let mut st = store();
        st.remove(&Triple::iri("urn:o1", ns::SOSA_HAS_SIMPLE_RESULT, Term::double(0.5)));
        let v = validate(&st, &obs_shape());
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].kind, ConstraintKind::MinCount);
        assert_eq!(v[0].focus, "urn:o1");
    }

    #[test]
    fn two_results() {
        let mut st = store();
        st.insert(&Triple::iri("urn:o1", ns::SOSA_HAS_RESULT, Term::iri("urn:r")));
        let v = validate(&st, &obs_shape());
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].kind, ConstraintKind::MaxCount);
    }

    #[test]
    fn value_class() {
        let mut st = store();
        st.remove(&Triple::iri("urn:p", ns::RDF_TYPE, Term::iri(ns::SOSA_OBSERVABLE_PROPERTY)));
        let v = validate(&st, &obs_shape());
        assert_eq!(v.iter().map(|x| x.kind).collect::<Vec<_>>(), vec![ConstraintKind::ValueClass]);
    }

    #[test]
    fn bad_shape_documents() {
        assert!(ShapeSpec::parse_document(r#"{"shapes":[{"id":"x","target_class":"nope:X","constraints":[]}]}"#).is_err());
        let inverted = r#"{"shapes":[{"id":"x","target_class":"sosa:Observation","constraints":[{"path":"rdfs:label","min_count":2,"max_count":1}]}]}"#;
        assert!(matches!(ShapeSpec::parse_document(inverted), Err(ShapeError::Cardinality { .. })));
    }

    #[test]
    fn reports() {
        let mut st = store();
        st.remove(&Triple::iri("urn:o1", ns::SOSA_HAS_SIMPLE_RESULT, Term::double(0.5)));
        let v = validate(&st, &obs_shape());
        assert!(report_text(&v).starts_with("1 violation(s)"));
        assert_eq!(report_json(&v)["conforms"], false);
        assert_eq!(report_text(&[]), "conforms: 0 violations\n");
    }
}

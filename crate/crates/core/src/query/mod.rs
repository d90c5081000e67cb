//! SPARQL subset: SELECT over basic graph patterns with `a`, `;` and `,`
//! lists, single-variable FILTER comparisons, DISTINCT and LIMIT.

mod eval;
mod lexer;
mod parser;

use thiserror::Error;

pub use eval::{evaluate, BindingRow, QueryResult};
pub use parser::{parse_query, CompareOp, Filter, PatternTerm, QueryAst, TriplePattern};

use crate::store::Store;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QueryError {
    #[error("line {line}, column {col}: {message}")]
    Syntax { line: usize, col: usize, message: String },
    #[error("line {line}, column {col}: unknown prefix {prefix:?}")]
    UnknownPrefix { prefix: String, line: usize, col: usize },
    #[error("line {line}, column {col}: missing WHERE")]
    MissingWhere { line: usize, col: usize },
    #[error("line {line}, column {col}: unterminated IRI")]
    UnterminatedIri { line: usize, col: usize },
    #[error("line {line}, column {col}: unsupported feature {token:?}")]
    Unsupported { token: String, line: usize, col: usize },
    #[error("variable ?{0} does not occur in any pattern")]
    UnboundVariable(String),
}

impl QueryError {
    pub fn is_unsupported(&self) -> bool {
        matches!(self, QueryError::Unsupported { .. })
    }
}

/// Parse and evaluate in one step.
pub fn run_query(text: &str, store: &Store) -> Result<QueryResult, QueryError> {
    Ok(evaluate(&parse_query(text)?, store))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kgmodel::{ns, Term, Triple};

    pub(crate) const EXAMPLE_QUERY: &str = "SELECT * WHERE {
  ?cell a kwg-ont:S2Cell .
  ?county a kwg-ont:AdminRegion_3 ;
    geo:sfWithin
      kwgr:Earth.NA.US.USA.19_1 .
  ?cell kwg-ont:sfWithin ?county .
  ?county sosa:isFeatureOfInterestOf ?obs .
  ?obs a kwg-ont:VulnerabilityObservation .
  ?obs sosa:hasSimpleResult ?result .
}";

    #[test]
    fn figure_query_shape() {
        let ast = parse_query(EXAMPLE_QUERY).unwrap();
        assert_eq!(ast.patterns.len(), 7);
        assert_eq!(ast.variables(), vec!["cell", "county", "obs", "result"]);
        assert_eq!(
            ast.patterns[2].o,
            PatternTerm::Term(Term::iri(format!("{}Earth.NA.US.USA.19_1", ns::KWGR)))
        );
    }

    #[test]
    fn a_expands_to_rdf_type() {
        let ast = parse_query("SELECT * WHERE { ?s a kwg-ont:Hazard . }").unwrap();
        assert_eq!(ast.patterns.len(), 1);
        assert_eq!(ast.patterns[0].p, PatternTerm::Term(Term::iri(ns::RDF_TYPE)));
    }

    #[test]
    fn incomplete_triple() {
        assert!(matches!(parse_query("SELECT * WHERE { ?s ?p }"), Err(QueryError::Syntax { .. })));
    }

    #[test]
    fn error_kinds() {
        assert!(matches!(
            parse_query("SELECT * WHERE { ?s a foo:Bar }"),
            Err(QueryError::UnknownPrefix { prefix, line: 1, .. }) if prefix == "foo"
        ));
        assert!(matches!(parse_query("SELECT * { ?s ?p ?o }"), Err(QueryError::MissingWhere { .. })));
        assert!(matches!(parse_query("SELECT * WHERE { ?s <http://x ?o }"), Err(QueryError::UnterminatedIri { .. })));
        let e = parse_query("SELECT * WHERE { ?s ?p ?o OPTIONAL { ?s ?q ?z } }").unwrap_err();
        assert!(matches!(&e, QueryError::Unsupported { token, .. } if token == "OPTIONAL"), "{e:?}");
        assert!(matches!(parse_query("SELECT ?x WHERE { ?s ?p ?o }"), Err(QueryError::UnboundVariable(_))));
        assert!(parse_query("ASK { ?s ?p ?o }").unwrap_err().is_unsupported());
    }

    #[test]
    fn prefix_declarations_and_lists() {
        let q = "PREFIX ex: <http://example.org/>\nSELECT DISTINCT ?o WHERE { ex:a ex:p ?o , ex:b ; ex:q 3 . } LIMIT 2";
        let ast = parse_query(q).unwrap();
        assert_eq!(ast.patterns.len(), 3);
        assert!(ast.distinct);
        assert_eq!(ast.limit, Some(2));
        assert_eq!(ast.patterns[2].o, PatternTerm::Term(Term::integer(3)));
    }

    fn small_store() -> Store {
        let mut st = Store::new();
        for (s, v) in [("urn:a", 1.0), ("urn:b", 2.5), ("urn:c", 4.0)] {
            st.insert(&Triple::iri(s, "urn:val", Term::double(v)));
            st.insert(&Triple::iri(s, ns::RDF_TYPE, Term::iri("urn:T")));
        }
        st
    }

    #[test]
    fn filters_and_limit() {
        let st = small_store();
        let r = run_query("SELECT ?s WHERE { ?s <urn:val> ?v . FILTER(?v > 2) }", &st).unwrap();
        assert_eq!(r.rows.len(), 2);
        let r = run_query("SELECT ?s WHERE { ?s <urn:val> ?v FILTER(3 >= ?v) }", &st).unwrap();
        assert_eq!(r.rows.len(), 2);
        let r = run_query("SELECT ?s WHERE { ?s <urn:val> ?v . FILTER(?s != <urn:a>) }", &st).unwrap();
        assert_eq!(r.rows.len(), 2);
        let r = run_query("SELECT * WHERE { ?s a <urn:T> } LIMIT 1", &st).unwrap();
        assert_eq!(r.rows.len(), 1);
        let r = run_query("SELECT DISTINCT ?t WHERE { ?s a ?t }", &st).unwrap();
        assert_eq!(r.rows.len(), 1);
    }

    #[test]
    fn empty_store_and_unknown_constants() {
        let r = run_query(EXAMPLE_QUERY, &Store::new()).unwrap();
        assert!(r.rows.is_empty());
        assert_eq!(r.vars.len(), 4);
        let r = run_query("SELECT * WHERE { ?s a <urn:Nope> }", &small_store()).unwrap();
        assert!(r.rows.is_empty());
    }

    #[test]
    fn json_shape() {
        let r = run_query("SELECT ?s ?v WHERE { ?s <urn:val> ?v FILTER(?v = 1) }", &small_store()).unwrap();
        let j = r.to_json();
        assert_eq!(j["head"]["vars"], serde_json::json!(["s", "v"]));
        assert_eq!(j["rows"][0][0], "<urn:a>");
        assert_eq!(j["rows"][0][1], "\"1\"^^<http://www.w3.org/2001/XMLSchema#double>");
    }
}

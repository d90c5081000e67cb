mod oracles;

use std::collections::BTreeSet;

use gridkg_core::fixture;
use gridkg_core::kgmodel::{parse_ntriples, serialize_ntriples, Triple};
use gridkg_core::query::{parse_query, run_query, QueryError};
use gridkg_core::store::Store;
use proptest::prelude::*;

#[test]
fn ntriples_roundtrip_of_fixture() {
    let g = fixture::graph().unwrap();
    let text = serialize_ntriples(&g);
    let back: BTreeSet<Triple> = parse_ntriples(&text).unwrap().into_iter().collect();
    assert_eq!(back, g.iter().cloned().collect());
    let store = Store::from_ntriples(&text).unwrap();
    assert_eq!(store.to_ntriples(), text);
}

#[test]
fn query_errors() {
    assert!(matches!(parse_query("SELECT ?x { ?x ?p ?o }"), Err(QueryError::MissingWhere { .. })));
    assert!(matches!(parse_query("SELECT * WHERE { ?x foo:bar ?o }"), Err(QueryError::UnknownPrefix { .. })));
    match parse_query("SELECT * WHERE { ?x ?p ?o OPTIONAL { ?x ?q ?z } }") {
        Err(e @ QueryError::Unsupported { .. }) => assert!(e.to_string().contains("OPTIONAL")),
        other => panic!("{other:?}"),
    }
    assert!(matches!(parse_query("SELECT ?y WHERE { ?x ?p ?o }"), Err(QueryError::UnboundVariable(_))));
}

#[test]
fn limit_and_distinct() {
    let store = fixture::store().unwrap();
    let all = run_query("SELECT ?s WHERE { ?s a ?c . }", &store).unwrap().rows.len();
    let distinct = run_query("SELECT DISTINCT ?s WHERE { ?s a ?c . }", &store).unwrap().rows.len();
    assert!(distinct <= all && distinct > 0);
    assert_eq!(run_query("SELECT ?s WHERE { ?s a ?c . } LIMIT 3", &store).unwrap().rows.len(), 3);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn insert_remove_keeps_indexes_coherent(seed in any::<u64>(), n in 0usize..200) {
        let mut rng = oracles::rng(seed);
        let triples = oracles::random_triples(&mut rng, n);
        let mut store = Store::from_triples(&triples);
        for t in triples.iter().step_by(3) {
            prop_assert!(store.remove(t));
            prop_assert!(!store.contains(t));
        }
        let [spo, pos, osp] = store.index_views();
        prop_assert_eq!(&spo, &pos);
        prop_assert_eq!(&pos, &osp);
        prop_assert_eq!(store.len(), triples.len() - triples.len().div_ceil(3));
    }

    #[test]
    fn random_queries_match_oracle(seed in any::<u64>()) {
        let mut rng = oracles::rng(seed);
        let triples = oracles::random_triples(&mut rng, 150);
        let store = Store::from_triples(&triples);
        let text = oracles::random_query(&mut rng);
        let ast = parse_query(&text).unwrap();
        prop_assert_eq!(oracles::normalize(&run_query(&text, &store).unwrap()), oracles::nested_loop(&ast, &triples), "{}", text);
    }
}

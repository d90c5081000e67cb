//! The headline checks of the crate, each returning a one-line summary on
//! success and a description of the first discrepancy on failure.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::time::{Duration, Instant};

use gridkg_core::dgg::{CellId, CellPolygon, EARTH_RADIUS_KM};
use gridkg_core::fixture;
use gridkg_core::geometry::{predicate, rcc8_of, relate, SpatialPredicate};
use gridkg_core::ingest::{cell_summaries, ingest_table, DatasetManifest, MappingConfig};
use gridkg_core::kgmodel::{ns, serialize_ntriples, Term, Triple};
use gridkg_core::query::{parse_query, run_query};
use gridkg_core::store::Store;
use gridkg_core::validate::{validate, ConstraintKind, ShapeSpec};
use rand::Rng;
use serde_json::{json, Value};

use crate::oracles;

pub type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn sphere_km2() -> f64 {
    4.0 * std::f64::consts::PI * EARTH_RADIUS_KM * EARTH_RADIUS_KM
}

pub fn example_query() -> Outcome {
    let triples = fixture::graph().map_err(|e| e.to_string())?;
    let store = Store::from_triples(&triples);
    let ast = parse_query(fixture::EXAMPLE_QUERY).map_err(|e| e.to_string())?;
    ensure!(ast.patterns.len() == 7, "{} triple patterns, expected 7", ast.patterns.len());
    let t = Instant::now();
    let result = run_query(fixture::EXAMPLE_QUERY, &store).map_err(|e| e.to_string())?;
    let elapsed = t.elapsed();
    ensure!(result.rows.len() == 5, "{} rows, expected 5", result.rows.len());
    ensure!(
        oracles::normalize(&result) == oracles::nested_loop(&ast, &triples),
        "rows differ from the nested-loop oracle"
    );
    ensure!(elapsed < Duration::from_secs(1), "query took {elapsed:?}");
    Ok(format!("7 patterns, 5 rows, oracle agrees, {elapsed:?}"))
}

pub fn level13_area() -> Outcome {
    let mut rng = oracles::rng(13);
    let n = 20_000;
    let side = 1u32 << 13;
    let total: f64 = (0..n)
        .map(|_| {
            let c = CellId::from_face_ij(rng.gen_range(0..6), rng.gen_range(0..side), rng.gen_range(0..side), 13)
                .expect("in range");
            CellPolygon::new(c).area_km2()
        })
        .sum();
    let mean = total / n as f64;
    let expected = sphere_km2() / (6.0 * 4f64.powi(13));
    ensure!((expected - 1.2668).abs() < 5e-5, "closed form gives {expected}");
    let rel = (mean - expected).abs() / expected;
    ensure!(rel <= 0.01, "sampled mean {mean:.5} km² is {:.3}% from {expected:.5}", rel * 100.0);
    ensure!((mean - 1.27).abs() < 0.005, "sampled mean {mean:.5} km² does not round to 1.27");
    Ok(format!("mean {mean:.4} km² over {n} cells ({:.3}% from {expected:.4})", rel * 100.0))
}

pub fn dgg_structure() -> Outcome {
    for (level, want) in [(0u8, 6usize), (1, 24), (2, 96), (3, 384)] {
        let got = CellId::all_at_level(level).map_err(|e| e.to_string())?.len();
        ensure!(got == want, "level {level}: {got} cells, expected {want}");
    }
    let mut rng = oracles::rng(7);
    for k in 0..10_000 {
        let p = oracles::random_point(&mut rng);
        let level = rng.gen_range(0..=10u8);
        let c = CellId::from_point(p, level).map_err(|e| e.to_string())?;
        ensure!(CellPolygon::new(c).contains(p), "sample {k}: {p:?} outside its level-{level} cell");
        for up in 0..=level {
            let direct = CellId::from_point(p, up).map_err(|e| e.to_string())?;
            let anc = c.ancestor(up).map_err(|e| e.to_string())?;
            ensure!(anc == direct, "sample {k}: ancestor {} of {} != {}", anc.token(), c.token(), direct.token());
        }
    }
    let area: f64 = CellId::all_at_level(2).map_err(|e| e.to_string())?.into_iter().map(|c| CellPolygon::new(c).area_km2()).sum();
    let rel = (area - sphere_km2()).abs() / sphere_km2();
    ensure!(rel <= 1e-3, "level-2 total area off by {:.4}%", rel * 100.0);
    Ok(format!("6/24/96/384 cells, 10000 hierarchy samples, level-2 area off by {:.2e}", rel))
}

pub fn de9im() -> Outcome {
    let mut rng = oracles::rng(9);
    let mut seen = BTreeSet::new();
    for k in 0..100 {
        let (a, b) = oracles::random_rect_pair(&mut rng);
        let (ga, gb) = (a.geometry(), b.geometry());
        let sampled = oracles::sampled_incidence(&a, &b);
        let m = relate(&ga, &gb);
        for p in SpatialPredicate::ALL {
            let want = oracles::sf_oracle(p, &sampled);
            ensure!(p.holds(&m, 2, 2) == want, "pair {k} {a:?} {b:?}: {p:?} matrix says {}", !want);
            ensure!(predicate(&ga, &gb, p) == want, "pair {k} {a:?} {b:?}: {p:?} predicate says {}", !want);
        }
        let holding = oracles::rcc8_oracle(&sampled);
        ensure!(holding.len() == 1, "pair {k} {a:?} {b:?}: oracle finds {holding:?}");
        let got = rcc8_of(&ga, &gb).map_err(|e| e.to_string())?;
        ensure!(got == holding[0], "pair {k} {a:?} {b:?}: rcc8 {got:?}, oracle {:?}", holding[0]);
        seen.insert(format!("{got:?}"));
    }
    Ok(format!("100 pairs x 8 predicates agree; RCC-8 relations seen: {}", seen.into_iter().collect::<Vec<_>>().join(" ")))
}

/// A synthetic N×M table: N point regions, M = 3 mapped columns (one
/// quantity, two simple), about 15% blank cells.
pub struct Table {
    pub csv: String,
    pub mapping: MappingConfig,
    pub manifest: DatasetManifest,
    pub n: usize,
    pub m: usize,
    /// Non-blank cells per column, in column order.
    pub filled: [usize; 3],
}

pub fn synthetic_table(n: usize, seed: u64) -> Table {
    let mut rng = oracles::rng(seed);
    let mut csv = String::from("key,name,wkt,date,temp,count,status\n");
    let mut filled = [0; 3];
    for i in 0..n {
        let cells: Vec<String> = (0..3)
            .map(|c| {
                if rng.gen_bool(0.15) {
                    return String::new();
                }
                filled[c] += 1;
                match c {
                    0 => format!("{:.1}", rng.gen_range(-10.0..40.0)),
                    1 => rng.gen_range(0..500).to_string(),
                    _ => ["low", "medium", "high"][rng.gen_range(0..3)].to_string(),
                }
            })
            .collect();
        let (lng, lat) = (rng.gen_range(-120.0..-70.0), rng.gen_range(25.0..48.0));
        csv.push_str(&format!(
            "R{i},Region {i},POINT ({lng} {lat}),2021-0{}-1{},{}\n",
            1 + i % 9,
            i % 10,
            cells.join(",")
        ));
    }
    let mapping: MappingConfig = serde_json::from_value(json!({
        "dataset_id": "synthetic",
        "foi_kind": "Region",
        "foi_class": "kwg-ont:AdminRegion_3",
        "foi_key_column": "key",
        "label_column": "name",
        "geometry": { "column": "wkt", "format": "WKT" },
        "time": { "columns": ["date"], "kind": "Instant" },
        "properties": [
            { "column": "temp", "property": "kwg-ont:meanTemperature", "observation_class": "kwg-ont:ClimateObservation",
              "result": { "mode": "Quantity", "unit": "qudt-unit:DEG_C" } },
            { "column": "count", "property": "kwg-ont:shelterCount", "observation_class": "kwg-ont:ShelterObservation",
              "result": { "mode": "Simple" } },
            { "column": "status", "property": "kwg-ont:alertStatus", "observation_class": "kwg-ont:ShelterObservation",
              "result": { "mode": "Simple", "datatype": "xsd:string" } }
        ]
    }))
    .expect("valid mapping");
    let manifest = DatasetManifest {
        dataset_id: "synthetic".into(),
        title: "Synthetic table".into(),
        source_organization: "Test Office".into(),
        license: Some("CC0".into()),
        creator: Some("test".into()),
        retrieval_date: Some("2024-03-01".into()),
    };
    Table { csv, mapping, manifest, n, m: 3, filled }
}

/// Triples the table must produce, counted from the emission rules.
pub fn expected_triples(t: &Table) -> usize {
    let organization = 2;
    let dataset = 3 + 3; // type, title, source; license, creator, retrieval date
    let axioms = 1 + 2; // foi class, two observation classes
    let features = t.n * (2 + 3); // type, label; geometry link, node type, WKT
    let properties = t.m * 3;
    let per_obs = |quantity: bool| 3 + if quantity { 4 } else { 1 } + 3 + 1; // core, result, instant, inverse
    let observations = t.filled[0] * per_obs(true) + (t.filled[1] + t.filled[2]) * per_obs(false);
    let collections: usize = t.filled.iter().filter(|&&k| k > 0).map(|k| 2 + k).sum();
    organization + dataset + axioms + features + properties + observations + collections
}

pub fn ingestion_counting() -> Outcome {
    let t = synthetic_table(40, 21);
    let blanks = t.n * t.m - t.filled.iter().sum::<usize>();
    let out = ingest_table(&t.csv, &t.mapping, &t.manifest).map_err(|e| e.to_string())?;
    ensure!(
        out.observations.len() == t.n * t.m - blanks,
        "{} observations, expected {}·{} − {blanks}",
        out.observations.len(),
        t.n,
        t.m
    );
    let triples = out.triples().map_err(|e| e.to_string())?;
    let want = expected_triples(&t);
    ensure!(triples.len() == want, "{} triples emitted, formula gives {want}", triples.len());
    let distinct: BTreeSet<&Triple> = triples.iter().collect();
    ensure!(distinct.len() == want, "{} distinct triples, formula gives {want}", distinct.len());

    let again = ingest_table(&t.csv, &t.mapping, &t.manifest).map_err(|e| e.to_string())?.triples().map_err(|e| e.to_string())?;
    ensure!(serialize_ntriples(&triples) == serialize_ntriples(&again), "table re-ingestion differs");
    let g1 = fixture::graph().map_err(|e| e.to_string())?;
    let g2 = fixture::graph().map_err(|e| e.to_string())?;
    ensure!(serialize_ntriples(&g1) == serialize_ntriples(&g2), "fixture graph differs between builds");
    Ok(format!(
        "{}x{} table, {blanks} blanks, {} observations, {want} triples; re-ingestion byte-identical",
        t.n,
        t.m,
        out.observations.len()
    ))
}

pub fn raster() -> Outcome {
    let mut rng = oracles::rng(50);
    let r = oracles::random_raster(&mut rng, 50, 50);
    let level = 11;
    let got = cell_summaries(&r, level).map_err(|e| e.to_string())?;
    let want = oracles::bucket_oracle(&r, level);
    ensure!(
        got.keys().eq(want.keys()),
        "cell sets differ: {} summarized, {} in oracle",
        got.len(),
        want.len()
    );
    let mut worst: f64 = 0.0;
    for (c, w) in &want {
        let g = got[c];
        let rel = (g - w).abs() / w.abs().max(f64::MIN_POSITIVE);
        worst = worst.max(rel);
        ensure!(rel <= 1e-12, "cell {}: {g} vs oracle {w}", c.token());
    }
    Ok(format!("{} cells at level {level}, worst relative error {worst:.1e}", got.len()))
}

fn one(store: &Store, s: &Term, p: &str) -> Result<Term, String> {
    let objs = store.objects(s, &Term::iri(p));
    match objs.as_slice() {
        [o] => Ok(o.clone()),
        _ => Err(format!("{s} has {} values for {}", objs.len(), ns::local_name(p))),
    }
}

pub fn provenance() -> Outcome {
    let outputs = fixture::outputs().map_err(|e| e.to_string())?;
    let store = fixture::store().map_err(|e| e.to_string())?;
    let observations = store.match_pattern(None, Some(&Term::iri(ns::SOSA_HAS_FOI)), None);
    let expected: usize = outputs.iter().map(|o| o.observations.len()).sum();
    ensure!(observations.len() == expected, "{} observations in the graph, {expected} ingested", observations.len());
    let org_type = Triple::iri("", ns::RDF_TYPE, Term::iri(ns::KWG_ORGANIZATION));
    for t in &observations {
        let obs = &t.s;
        let property = one(&store, obs, ns::SOSA_OBSERVED_PROPERTY)?;
        let dataset = one(&store, &property, ns::KWG_FROM_DATASET)?;
        let org = one(&store, &dataset, ns::KWG_SOURCE_ORGANIZATION)?;
        ensure!(
            store.contains(&Triple::new(org.clone(), org_type.p.clone(), org_type.o.clone())),
            "{obs}: third hop reaches {org}, which is not an organization"
        );
        let source = outputs
            .iter()
            .find(|o| o.observations.iter().any(|x| Term::iri(&x.iri) == *obs))
            .ok_or_else(|| format!("{obs} not produced by any source"))?;
        ensure!(Term::iri(&source.organization.iri) == org, "{obs}: reaches {org}, ingested from {}", source.organization.iri);
    }
    Ok(format!("{} observations, each 3 hops from its organization", observations.len()))
}

/// Fixture mutations, each expected to break exactly one constraint.
pub fn mutations(store: &Store) -> Vec<(&'static str, Vec<Triple>, Vec<Triple>, ConstraintKind)> {
    let svi_obs = store
        .subjects(&Term::iri(ns::RDF_TYPE), &Term::iri(format!("{}VulnerabilityObservation", ns::KWG_ONT)))
        .into_iter()
        .min()
        .expect("fixture has vulnerability observations");
    let simple = Term::iri(ns::SOSA_HAS_SIMPLE_RESULT);
    let result = store.objects(&svi_obs, &simple).into_iter().next().expect("simple result");

    let cell = store.subjects(&Term::iri(ns::RDF_TYPE), &Term::iri(ns::KWG_S2_CELL)).into_iter().min().expect("cells");
    let label = Term::iri(ns::RDFS_LABEL);
    let cell_label = store.objects(&cell, &label).into_iter().next().expect("cell label");

    let landcover = Term::iri(format!("{}dataset.landcover", ns::KWGR));
    let dataset_type = Triple::new(landcover, Term::iri(ns::RDF_TYPE), Term::iri(ns::KWG_DATASET_SUBGRAPH));

    vec![
        ("observation without result", vec![Triple::new(svi_obs.clone(), simple, result)], vec![], ConstraintKind::MinCount),
        (
            "cell label not a string",
            vec![Triple::new(cell.clone(), label.clone(), cell_label)],
            vec![Triple::new(cell, label, Term::integer(7))],
            ConstraintKind::Datatype,
        ),
        ("property source not a dataset", vec![dataset_type], vec![], ConstraintKind::ValueClass),
    ]
}

pub fn validation() -> Outcome {
    let shapes = ShapeSpec::bundled();
    let store = fixture::store().map_err(|e| e.to_string())?;
    let v = validate(&store, &shapes);
    ensure!(v.is_empty(), "fixture has {} violations, first: {}", v.len(), v[0].message);
    let mut names = Vec::new();
    for (name, remove, add, kind) in mutations(&store) {
        let mut st = store.clone();
        for t in &remove {
            ensure!(st.remove(t), "{name}: {t} not in the fixture");
        }
        for t in &add {
            st.insert(t);
        }
        let v = validate(&st, &shapes);
        ensure!(v.len() == 1, "{name}: {} violations {:?}", v.len(), v.iter().map(|x| &x.message).collect::<Vec<_>>());
        ensure!(v[0].kind == kind, "{name}: {:?}, expected {kind:?}", v[0].kind);
        names.push(format!("{name} -> {kind}"));
    }
    Ok(format!("fixture conforms; {}", names.join("; ")))
}

pub fn store_soundness() -> Outcome {
    let mut rng = oracles::rng(1000);
    let triples = oracles::random_triples(&mut rng, 400);
    let store = Store::from_triples(&triples);
    ensure!(store.len() == triples.len(), "store holds {} of {} triples", store.len(), triples.len());
    let [spo, pos, osp] = store.index_views();
    ensure!(spo == pos && pos == osp && spo.len() == triples.len(), "index views disagree");
    for k in 0..1000 {
        let pat = oracles::random_pattern(&mut rng);
        let got: BTreeSet<Triple> = store.match_pattern(pat.0.as_ref(), pat.1.as_ref(), pat.2.as_ref()).into_iter().collect();
        ensure!(got == oracles::scan(&triples, &pat), "pattern {k} {pat:?} differs from scan");
    }
    let mut nonempty = 0;
    for k in 0..50 {
        let text = oracles::random_query(&mut rng);
        let ast = parse_query(&text).map_err(|e| format!("query {k} {text:?}: {e}"))?;
        let result = run_query(&text, &store).map_err(|e| e.to_string())?;
        let want = oracles::nested_loop(&ast, &triples);
        ensure!(oracles::normalize(&result) == want, "query {k} {text:?}: {} rows, oracle {}", result.rows.len(), want.len());
        nonempty += usize::from(!want.is_empty());
    }
    Ok(format!("1000 patterns match scans; 50 queries ({nonempty} nonempty) match the nested-loop oracle"))
}

/// Feature, observation and provenance sets of a briefing JSON document.
pub fn briefing_sets(doc: &Value) -> [BTreeSet<String>; 3] {
    let strs = |v: &Value| v.as_str().map(str::to_string);
    let features = doc["features"].as_array().into_iter().flatten().filter_map(|f| strs(&f["iri"])).collect();
    let observations = doc["observations"]
        .as_array()
        .into_iter()
        .flatten()
        .flat_map(|g| g["observations"].as_array().into_iter().flatten())
        .filter_map(|o| strs(&o["iri"]))
        .collect();
    let provenance = doc["provenance"]
        .as_array()
        .into_iter()
        .flatten()
        .filter_map(|p| Some(format!("{} {}", strs(&p["dataset"])?, strs(&p["organization"]["iri"])?)))
        .collect();
    [features, observations, provenance]
}

/// The same three sets from the union of the documented equivalent queries.
pub fn query_sets(store: &Store, target_iri: &str) -> Result<[BTreeSet<String>; 3], String> {
    use gridkg_core::briefing::{equivalent_queries, Section};
    let mut out: [BTreeSet<String>; 3] = Default::default();
    for q in equivalent_queries(target_iri) {
        let r = run_query(&q.query, store).map_err(|e| format!("{}: {e}", q.query))?;
        let get = |row: &BTreeMap<String, Term>, v: &str| row.get(v).map(|t| t.value().to_string());
        for row in &r.rows {
            let entry = match q.section {
                Section::Features => (0, get(row, "feature")),
                Section::Observations => (1, get(row, "obs")),
                Section::Provenance => (2, get(row, "dataset").zip(get(row, "org")).map(|(d, o)| format!("{d} {o}"))),
            };
            out[entry.0].insert(entry.1.ok_or_else(|| format!("{}: unbound projection", q.query))?);
        }
    }
    Ok(out)
}

/// Compare a briefing document against the equivalent queries.
pub fn briefing_agrees(store: &Store, target_iri: &str, doc: &Value) -> Result<(usize, usize, usize), String> {
    let got = briefing_sets(doc);
    let want = query_sets(store, target_iri)?;
    for (k, name) in ["features", "observations", "provenance"].into_iter().enumerate() {
        ensure!(
            got[k] == want[k],
            "{name}: briefing has {:?} only, queries have {:?} only",
            got[k].difference(&want[k]).collect::<Vec<_>>(),
            want[k].difference(&got[k]).collect::<Vec<_>>()
        );
    }
    Ok((got[0].len(), got[1].len(), got[2].len()))
}

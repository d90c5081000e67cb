//! Small Louisiana-style scenario: two parishes built from level-13 cells
//! inside a state outline, an out-of-state county, vulnerability and
//! climate tables, a hurricane with track and impact area, and a land
//! cover raster.

use std::collections::{BTreeMap, HashMap};
use std::path::{Path, PathBuf};

use serde_json::json;

use crate::dgg::{cell_from_point, CellId, CellPolygon, LatLng};
use crate::geometry::{serialize_wkt, Coord, Geometry, GeometryError, Polygon};
use crate::ingest::{
    build_graph, load_run_with, DatasetManifest, DatasetSource, IngestError, IngestOutput, RasterKind, RasterLayer,
    RunConfig, ThemeSpec,
};
use crate::kgmodel::{ns, Triple};
use crate::store::Store;

pub const LEVEL: u8 = 13;
pub const STATE: &str = "Earth.NA.US.USA.19_1";
pub const COUNTY_A: &str = "Earth.NA.US.USA.19.1_1";
pub const COUNTY_B: &str = "Earth.NA.US.USA.19.2_1";
pub const COUNTY_C: &str = "Earth.NA.US.USA.25.1_1";
pub const RUN_FILE: &str = "run.json";

/// The example query: vulnerability results of the parishes of the state,
/// one row per cell inside a parish.
pub const EXAMPLE_QUERY: &str = "SELECT * WHERE {
  ?cell a kwg-ont:S2Cell .
  ?county a kwg-ont:AdminRegion_3 ;
    geo:sfWithin
      kwgr:Earth.NA.US.USA.19_1 .
  ?cell kwg-ont:sfWithin ?county .
  ?county sosa:isFeatureOfInterestOf ?obs .
  ?obs a kwg-ont:VulnerabilityObservation .
  ?obs sosa:hasSimpleResult ?result .
}";

/// IRI of a fixture resource key.
pub fn resource(key: &str) -> String {
    format!("{}{}", ns::KWGR, key)
}

/// Cells of county A (an L of three) and county B (a column of two east
/// of A's foot).
pub fn county_cells() -> (Vec<CellId>, Vec<CellId>) {
    let base = cell_from_point(LatLng::new(30.45, -91.15).expect("valid"), LEVEL).expect("valid");
    let (i, j) = base.face_ij();
    let at = |di: u32, dj: u32| CellId::from_face_ij(base.face(), i + di, j + dj, LEVEL).expect("same face");
    (vec![at(0, 0), at(1, 0), at(0, 1)], vec![at(2, 0), at(2, 1)])
}

fn key(c: Coord) -> (u64, u64) {
    (c.lng.to_bits(), c.lat.to_bits())
}

type SegKey = ((u64, u64), (u64, u64));

/// Outline of a connected, hole-free set of same-level cells: boundary
/// segments shared by two cells cancel and the rest chain into one ring.
pub fn cells_outline(cells: &[CellId]) -> Result<Polygon, GeometryError> {
    let mut segs: HashMap<SegKey, (Coord, Coord)> = HashMap::new();
    for &c in cells {
        let Geometry::Polygon(p) = CellPolygon::new(c).to_geometry() else {
            return Err(GeometryError::Unsupported("cell split at the antimeridian".into()));
        };
        for w in p.exterior.windows(2) {
            let rev = (key(w[1]), key(w[0]));
            if segs.remove(&rev).is_none() {
                segs.insert((key(w[0]), key(w[1])), (w[0], w[1]));
            }
        }
    }
    let next: HashMap<(u64, u64), Coord> = segs.values().map(|&(a, b)| (key(a), b)).collect();
    let start = segs.values().map(|&(a, _)| a).min_by(|a, b| a.lng.total_cmp(&b.lng).then(a.lat.total_cmp(&b.lat)));
    let start = start.ok_or_else(|| GeometryError::Unsupported("no cells".into()))?;
    let mut ring = vec![start];
    let mut cur = start;
    while let Some(&n) = next.get(&key(cur)) {
        ring.push(n);
        if key(n) == key(start) || ring.len() > segs.len() + 1 {
            break;
        }
        cur = n;
    }
    if ring.len() != segs.len() + 1 {
        return Err(GeometryError::Unsupported("cells do not form one simple region".into()));
    }
    Polygon::new(ring, vec![])
}

fn bounds(cells: &[CellId]) -> (f64, f64, f64, f64) {
    let mut b = (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
    for &c in cells {
        let r = CellPolygon::new(c).to_geometry().bbox().expect("nonempty");
        b = (b.0.min(r.min_lng), b.1.min(r.min_lat), b.2.max(r.max_lng), b.3.max(r.max_lat));
    }
    b
}

fn csv(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut w = csv::Writer::from_writer(vec![]);
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
}

fn rect_wkt(min_lng: f64, min_lat: f64, max_lng: f64, max_lat: f64) -> String {
    serialize_wkt(&Geometry::Polygon(Polygon::rect(min_lng, min_lat, max_lng, max_lat).expect("valid rect")))
}

fn manifest(id: &str, title: &str, org: &str, license: &str, retrieved: &str) -> String {
    let m = DatasetManifest {
        dataset_id: id.into(),
        title: title.into(),
        source_organization: org.into(),
        license: Some(license.into()),
        creator: None,
        retrieval_date: Some(retrieved.into()),
    };
    serde_json::to_string_pretty(&m).expect("serializable")
}

fn region_mapping(id: &str, class: &str, properties: serde_json::Value, time: Option<&str>, geometry: bool) -> String {
    let mut m = json!({
        "dataset_id": id,
        "foi_kind": "Region",
        "foi_class": class,
        "foi_key_column": "key",
        "label_column": "name",
        "properties": properties,
        "integration_level": LEVEL,
    });
    if geometry {
        m["geometry"] = json!({ "column": "wkt", "format": "WKT" });
    }
    if let Some(col) = time {
        m["time"] = json!({ "columns": [col], "kind": "Instant" });
    }
    serde_json::to_string_pretty(&m).expect("serializable")
}

/// The 8×8 land cover raster over the two parishes.
pub fn land_cover() -> RasterLayer {
    let (a, b) = county_cells();
    let all: Vec<CellId> = a.iter().chain(&b).copied().collect();
    let (x0, y0, x1, y1) = bounds(&all);
    // Codes: 11 open water, 21 developed, 41 forest, 82 cropland.
    let mut values = Vec::with_capacity(64);
    for row in 0..8 {
        for col in 0..8 {
            values.push(match (row, col) {
                (_, 0..=1) => 11.0,
                (0..=3, 2..=5) => 21.0,
                (4..=7, 2..=4) => 41.0,
                _ => 82.0,
            });
        }
    }
    RasterLayer::new([x0, y0, x1, y1], 8, 8, values, RasterKind::Categorical, None).expect("valid raster")
}

/// Every fixture file by name, `run.json` included.
pub fn files() -> BTreeMap<String, String> {
    let (a, b) = county_cells();
    let wkt_a = serialize_wkt(&Geometry::Polygon(cells_outline(&a).expect("L-shaped union")));
    let wkt_b = serialize_wkt(&Geometry::Polygon(cells_outline(&b).expect("column union")));
    let all: Vec<CellId> = a.iter().chain(&b).copied().collect();
    let (x0, y0, x1, y1) = bounds(&all);
    let (w, h) = (x1 - x0, y1 - y0);
    let s = |v: &str| v.to_string();

    let mut f = BTreeMap::new();
    f.insert(s("states.csv"), csv(&["key", "name", "wkt"], &[vec![s(STATE), s("Louisiana"), rect_wkt(x0 - 0.05, y0 - 0.05, x1 + 0.05, y1 + 0.05)]]));
    f.insert(
        s("counties.csv"),
        csv(
            &["key", "name", "wkt"],
            &[
                vec![s(COUNTY_A), s("East Baton Rouge"), wkt_a],
                vec![s(COUNTY_B), s("West Baton Rouge"), wkt_b],
                vec![s(COUNTY_C), s("Suffolk"), rect_wkt(-71.07, 42.35, -71.05, 42.37)],
            ],
        ),
    );
    f.insert(
        s("svi.csv"),
        csv(
            &["key", "name", "svi_score"],
            &[
                vec![s(COUNTY_A), s("East Baton Rouge"), s("0.8124")],
                vec![s(COUNTY_B), s("West Baton Rouge"), s("0.4312")],
                vec![s(COUNTY_C), s("Suffolk"), s("0.221")],
            ],
        ),
    );
    f.insert(
        s("climate.csv"),
        csv(
            &["key", "name", "date", "precip_mm", "max_temp_c"],
            &[
                vec![s(COUNTY_A), s("East Baton Rouge"), s("2021-08-30"), s("243.8"), s("31.2")],
                vec![s(COUNTY_B), s("West Baton Rouge"), s("2021-08-30"), s("198.1"), s("30.8")],
                vec![s(COUNTY_C), s("Suffolk"), s("2021-08-30"), s("2.5"), s("")],
            ],
        ),
    );
    let track = Geometry::LineString(vec![
        Coord::new(x0 - 0.3, y0 - 0.4),
        Coord::new(x0 + 0.4 * w, y0 + 0.5 * h),
        Coord::new(x1 + 0.3, y1 + 0.5),
    ]);
    f.insert(
        s("hurricanes.csv"),
        csv(
            &["key", "name", "wkt", "start", "end", "max_wind_kt", "category"],
            &[
                vec![s("AL092021"), s("Hurricane Ida track"), serialize_wkt(&track), s("2021-08-26"), s("2021-09-05"), s("130"), s("4")],
                vec![
                    s("AL092021_impact"),
                    s("Hurricane Ida impact area"),
                    rect_wkt(x0 - 0.02, y0 - 0.02, x0 + 0.5 * w, y1 + 0.02),
                    s("2021-08-29"),
                    s("2021-08-31"),
                    s("95"),
                    s(""),
                ],
            ],
        ),
    );
    f.insert(s("landcover.asc"), land_cover().to_ascii_grid());

    f.insert(s("states.mapping.json"), region_mapping("gadm_admin1", "kwg-ont:AdminRegion_1", json!([]), None, true));
    f.insert(s("counties.mapping.json"), region_mapping("gadm_admin3", "kwg-ont:AdminRegion_3", json!([]), None, true));
    f.insert(
        s("svi.mapping.json"),
        region_mapping(
            "svi",
            "kwg-ont:AdminRegion_3",
            json!([{
                "column": "svi_score",
                "property": "kwg-ont:socialVulnerabilityIndex",
                "label": "social vulnerability index",
                "observation_class": "kwg-ont:VulnerabilityObservation",
                "result": { "mode": "Simple" }
            }]),
            None,
            false,
        ),
    );
    f.insert(
        s("climate.mapping.json"),
        region_mapping(
            "climate",
            "kwg-ont:AdminRegion_3",
            json!([
                {
                    "column": "precip_mm",
                    "property": "kwg-ont:precipitation",
                    "label": "daily precipitation",
                    "observation_class": "kwg-ont:ClimateObservation",
                    "result": { "mode": "Quantity", "unit": "qudt-unit:MilliM" }
                },
                {
                    "column": "max_temp_c",
                    "property": "kwg-ont:maxTemperature",
                    "label": "daily maximum temperature",
                    "observation_class": "kwg-ont:ClimateObservation",
                    "result": { "mode": "Quantity", "unit": "qudt-unit:DEG_C" }
                }
            ]),
            Some("date"),
            false,
        ),
    );
    let hurricanes = json!({
        "dataset_id": "hurricanes",
        "foi_kind": "Hazard",
        "foi_class": "kwg-ont:Hurricane",
        "foi_key_column": "key",
        "label_column": "name",
        "geometry": { "column": "wkt", "format": "WKT" },
        "time": { "columns": ["start", "end"], "kind": "Interval" },
        "properties": [
            {
                "column": "max_wind_kt",
                "property": "kwg-ont:maxWindSpeed",
                "label": "maximum sustained wind",
                "observation_class": "kwg-ont:HurricaneObservation",
                "result": { "mode": "Quantity", "unit": "qudt-unit:KN" }
            },
            {
                "column": "category",
                "property": "kwg-ont:saffirSimpsonCategory",
                "label": "Saffir-Simpson category",
                "observation_class": "kwg-ont:HurricaneObservation",
                "result": { "mode": "Simple" }
            }
        ],
        "integration_level": LEVEL,
    });
    f.insert(s("hurricanes.mapping.json"), serde_json::to_string_pretty(&hurricanes).expect("serializable"));
    let raster = json!({
        "dataset_id": "landcover",
        "property": "kwg-ont:landCoverClass",
        "label": "land cover class",
        "observation_class": "kwg-ont:LandCoverObservation",
        "level": LEVEL,
    });
    f.insert(s("landcover.raster.json"), serde_json::to_string_pretty(&raster).expect("serializable"));

    f.insert(s("states.manifest.json"), manifest("gadm_admin1", "GADM level-1 boundaries", "GADM", "CC-BY-4.0", "2024-01-15"));
    f.insert(s("counties.manifest.json"), manifest("gadm_admin3", "GADM level-3 boundaries", "GADM", "CC-BY-4.0", "2024-01-15"));
    f.insert(s("svi.manifest.json"), manifest("svi", "Social Vulnerability Index 2020", "CDC ATSDR", "public domain", "2024-02-01"));
    f.insert(s("climate.manifest.json"), manifest("climate", "Daily climate summaries", "NOAA NCEI", "public domain", "2024-02-03"));
    f.insert(
        s("hurricanes.manifest.json"),
        manifest("hurricanes", "Atlantic hurricane best tracks", "NOAA NHC", "public domain", "2024-02-05"),
    );
    f.insert(s("landcover.manifest.json"), manifest("landcover", "Land cover classes", "USGS", "public domain", "2024-02-07"));

    f.insert(s(RUN_FILE), serde_json::to_string_pretty(&run_config()).expect("serializable"));
    f
}

pub fn run_config() -> RunConfig {
    let table = |n: &str| DatasetSource::Table {
        mapping: format!("{n}.mapping.json"),
        manifest: format!("{n}.manifest.json"),
        data: format!("{n}.csv"),
    };
    RunConfig {
        level: None,
        output: Some("graph.nt".into()),
        port: None,
        datasets: vec![
            table("states"),
            table("counties"),
            table("svi"),
            table("climate"),
            table("hurricanes"),
            DatasetSource::Raster {
                config: "landcover.raster.json".into(),
                manifest: "landcover.manifest.json".into(),
                data: "landcover.asc".into(),
            },
        ],
        themes: vec![ThemeSpec {
            theme: "disaster response".into(),
            datasets: vec!["svi".into(), "hurricanes".into(), "climate".into()],
        }],
    }
}

/// Ingest results of every fixture source.
pub fn outputs() -> Result<Vec<IngestOutput>, IngestError> {
    let files = files();
    load_run_with(&run_config(), None, &|name: &str| {
        files.get(name).cloned().ok_or_else(|| IngestError::Config(format!("no fixture file {name}")))
    })
}

/// The assembled fixture graph, sorted and duplicate-free.
pub fn graph() -> Result<Vec<Triple>, IngestError> {
    build_graph(&outputs()?, &run_config().themes)
}

pub fn store() -> Result<Store, IngestError> {
    Ok(Store::from_triples(&graph()?))
}

/// Write the fixture files into `dir`; returns the run config path.
pub fn write(dir: &Path) -> Result<PathBuf, IngestError> {
    let io = |path: &Path, source| IngestError::Io { path: path.display().to_string(), source };
    std::fs::create_dir_all(dir).map_err(|e| io(dir, e))?;
    for (name, content) in files() {
        let path = dir.join(name);
        std::fs::write(&path, content).map_err(|e| io(&path, e))?;
    }
    Ok(dir.join(RUN_FILE))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::query::run_query;

    #[test]
    fn outlines_are_valid() {
        let (a, b) = county_cells();
        let pa = cells_outline(&a).unwrap();
        let single: f64 = a.iter().map(|&c| CellPolygon::new(c).to_geometry().area()).sum();
        assert!((pa.area() - single).abs() < 1e-12 * single.max(1.0));
        assert!(cells_outline(&b).is_ok());
        assert!(cells_outline(&[a[1], a[2]]).is_err());
    }

    #[test]
    fn figure_query_on_fixture() {
        let st = store().unwrap();
        let r = run_query(EXAMPLE_QUERY, &st).unwrap();
        assert_eq!(r.rows.len(), 5, "{}", r.to_tsv());
    }

    #[test]
    fn deterministic() {
        assert_eq!(graph().unwrap(), graph().unwrap());
    }

    #[test]
    fn conforms_to_bundled_shapes() {
        let st = store().unwrap();
        let v = crate::validate::validate(&st, &crate::validate::ShapeSpec::bundled());
        assert!(v.is_empty(), "{}", crate::validate::report_text(&v));
    }

    #[test]
    fn briefings() {
        use crate::briefing::{briefing, compare, TargetRef, TimeWindow};
        let st = store().unwrap();
        let (a, _) = county_cells();
        let b = briefing(&st, &TargetRef::Cell(a[0].token()), TimeWindow::default()).unwrap();
        assert!(b.features.iter().any(|f| f.iri == resource(COUNTY_A) && f.relation == "sfWithin"));
        let svi = b.observations.iter().find(|g| g.property.ends_with("socialVulnerabilityIndex")).unwrap();
        assert_eq!(svi.observations.len(), 1);
        assert_eq!(svi.observations[0].result, serde_json::json!(0.8124));

        let ocean = crate::dgg::cell_from_point(LatLng::new(-40.0, -30.0).unwrap(), LEVEL).unwrap();
        let e = briefing(&st, &TargetRef::Cell(ocean.token()), TimeWindow::default()).unwrap();
        assert!(e.features.is_empty() && e.observations.is_empty());

        let county = TargetRef::Feature(COUNTY_A.into());
        let all = briefing(&st, &county, TimeWindow::default()).unwrap();
        assert!(all.features.iter().any(|f| f.iri.ends_with("hazard.AL092021_impact")));
        let later = briefing(&st, &county, TimeWindow::parse(Some("2022-01-01"), None).unwrap()).unwrap();
        assert!(!later.features.iter().any(|f| f.iri.contains("hazard.")));
        assert_eq!(later.features.iter().filter(|f| f.kind == Some(crate::kgmodel::FeatureKind::Cell)).count(),
                   all.features.iter().filter(|f| f.kind == Some(crate::kgmodel::FeatureKind::Cell)).count());

        let c = compare(&st, &county, &TargetRef::Feature(COUNTY_B.into())).unwrap();
        let rows = &c.comparison.as_ref().unwrap().rows;
        let svi = rows.iter().find(|r| r.property.ends_with("socialVulnerabilityIndex")).unwrap();
        assert_eq!((svi.a[0].result.clone(), svi.b[0].result.clone()), (serde_json::json!(0.8124), serde_json::json!(0.4312)));
        let same = compare(&st, &county, &county).unwrap();
        assert_eq!(same.comparison.as_ref().unwrap().other.observations, same.observations);
    }
}

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::raster::{parse_ascii_grid, summarize_raster, RasterConfig};
use super::spatial::{relate_cells, relate_regions};
use super::table::{ingest_table, IngestOutput};
use super::{DatasetManifest, IngestError, MappingConfig};
use crate::geometry::parse_wkt;
use crate::kgmodel::{
    emit_theme, mint_iri, ns, schema_triples, Feature, FeatureKind, MintKind, Term, ThematicSubgraph, Triple,
};
use crate::store::Store;
use crate::validate::subclass_closure;

/// One source in a run. Paths are relative to the run config's directory.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum DatasetSource {
    Table { mapping: String, manifest: String, data: String },
    Raster { config: String, manifest: String, data: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThemeSpec {
    pub theme: String,
    /// Dataset ids.
    pub datasets: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunConfig {
    /// Overrides every dataset's own integration level.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub level: Option<u8>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub port: Option<u16>,
    pub datasets: Vec<DatasetSource>,
    #[serde(default)]
    pub themes: Vec<ThemeSpec>,
}

fn read(path: &Path) -> Result<String, IngestError> {
    std::fs::read_to_string(path).map_err(|source| IngestError::Io { path: path.display().to_string(), source })
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, IngestError> {
    Ok(serde_json::from_str(&read(path)?)?)
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<RunConfig, IngestError> {
        read_json(path)
    }
}

/// Ingest every source of a run. `level` overrides the per-dataset levels.
pub fn load_run(cfg: &RunConfig, base: &Path, level: Option<u8>) -> Result<Vec<IngestOutput>, IngestError> {
    load_run_with(cfg, level, &|p: &str| read(&base.join(p)))
}

/// [`load_run`] with sources fetched by name through `fetch`.
pub fn load_run_with(
    cfg: &RunConfig,
    level: Option<u8>,
    fetch: &dyn Fn(&str) -> Result<String, IngestError>,
) -> Result<Vec<IngestOutput>, IngestError> {
    let json = |p: &str| -> Result<serde_json::Value, IngestError> { Ok(serde_json::from_str(&fetch(p)?)?) };
    let level = level.or(cfg.level);
    let mut out = Vec::new();
    for src in &cfg.datasets {
        match src {
            DatasetSource::Table { mapping, manifest, data } => {
                let mapping: MappingConfig = serde_json::from_value(json(mapping)?)?;
                let manifest: DatasetManifest = serde_json::from_value(json(manifest)?)?;
                let mut o = ingest_table(&fetch(data)?, &mapping, &manifest)?;
                if let Some(l) = level {
                    o.level = l;
                }
                out.push(o);
            }
            DatasetSource::Raster { config, manifest, data } => {
                let mut rc: RasterConfig = serde_json::from_value(json(config)?)?;
                if let Some(l) = level {
                    rc.level = l;
                }
                let manifest: DatasetManifest = serde_json::from_value(json(manifest)?)?;
                out.push(summarize_raster(&parse_ascii_grid(&fetch(data)?)?, &rc, &manifest)?);
            }
        }
    }
    Ok(out)
}

/// Assemble the full graph: class hierarchy, every source's triples, grid
/// alignment at each source's level, feature–feature relations and themes.
/// The result is sorted and duplicate-free.
pub fn build_graph(outputs: &[IngestOutput], themes: &[ThemeSpec]) -> Result<Vec<Triple>, IngestError> {
    let mut triples: BTreeSet<Triple> = base_graph(outputs, themes)?.into_iter().collect();
    triples.extend(spatial_triples(outputs)?);
    Ok(triples.into_iter().collect())
}

/// [`build_graph`] without the spatial relations.
pub fn base_graph(outputs: &[IngestOutput], themes: &[ThemeSpec]) -> Result<Vec<Triple>, IngestError> {
    let mut triples: BTreeSet<Triple> = schema_triples().into_iter().collect();
    for o in outputs {
        triples.extend(o.triples()?);
    }
    let known: BTreeSet<&str> = outputs.iter().map(|o| o.dataset.iri.as_str()).collect();
    for th in themes {
        let datasets = th
            .datasets
            .iter()
            .map(|id| {
                let iri = mint_iri(MintKind::Dataset, id)?;
                if !known.contains(iri.as_str()) {
                    return Err(IngestError::Config(format!("theme {:?} names unknown dataset {id:?}", th.theme)));
                }
                Ok(iri)
            })
            .collect::<Result<_, IngestError>>()?;
        triples.extend(emit_theme(&ThematicSubgraph { iri: mint_iri(MintKind::Theme, &th.theme)?, theme: th.theme.clone(), datasets }));
    }
    Ok(triples.into_iter().collect())
}

/// Grid alignment of every ingested feature at its source's level, plus
/// feature–feature relations.
pub fn spatial_triples(outputs: &[IngestOutput]) -> Result<Vec<Triple>, IngestError> {
    // The same feature may be described by several sources; keep one copy,
    // preferring one that has a geometry.
    let mut features: BTreeMap<&str, (&Feature, u8)> = BTreeMap::new();
    for o in outputs {
        for f in o.features.iter().filter(|f| f.kind != FeatureKind::Cell) {
            let e = features.entry(&f.iri).or_insert((f, o.level));
            if e.0.geometry.is_none() && f.geometry.is_some() {
                *e = (f, o.level);
            }
        }
    }
    let mut by_level: BTreeMap<u8, Vec<Feature>> = BTreeMap::new();
    for (f, level) in features.values() {
        by_level.entry(*level).or_default().push((*f).clone());
    }
    let mut triples = BTreeSet::new();
    for (level, fs) in &by_level {
        triples.extend(relate_cells(fs, *level)?.triples);
    }
    let all: Vec<Feature> = by_level.into_values().flatten().collect();
    triples.extend(relate_regions(&all));
    Ok(triples.into_iter().collect())
}

/// Hazards and regions stored in `store` that carry a geometry, rebuilt as
/// features (label and temporal scope are not needed for relating).
pub fn located_features(store: &Store) -> Result<Vec<Feature>, IngestError> {
    let ty = Term::iri(ns::RDF_TYPE);
    let mut out = Vec::new();
    let mut seen = BTreeSet::new();
    for kind in [FeatureKind::Hazard, FeatureKind::Region] {
        for class in subclass_closure(store, kind.class_iri()) {
            let Some(class_iri) = class.as_iri() else { continue };
            for s in store.subjects(&ty, &class) {
                let Some(iri) = s.as_iri() else { continue };
                if !seen.insert(iri.to_string()) {
                    continue;
                }
                let wkt = store
                    .objects(&s, &Term::iri(ns::GEO_HAS_GEOMETRY))
                    .first()
                    .and_then(|node| store.objects(node, &Term::iri(ns::GEO_AS_WKT)).into_iter().next());
                let Some(wkt) = wkt else { continue };
                let g = parse_wkt(wkt.value()).map_err(|source| IngestError::Geometry { feature: iri.to_string(), source })?;
                out.push(Feature::new(iri, kind, class_iri, "").with_geometry(g));
            }
        }
    }
    Ok(out)
}

/// Relate the located features of a stored graph at one level and return
/// the graph with the new triples, sorted and duplicate-free.
pub fn relate_graph(store: &Store, level: u8) -> Result<Vec<Triple>, IngestError> {
    let features = located_features(store)?;
    let mut triples: BTreeSet<Triple> = store.iter().collect();
    triples.extend(relate_cells(&features, level)?.triples);
    triples.extend(relate_regions(&features));
    Ok(triples.into_iter().collect())
}

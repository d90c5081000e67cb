use std::collections::{BTreeMap, BTreeSet, HashSet};

use super::config::{resolve_iri, ResultMode, TimeKind};
use super::{DatasetManifest, GeometryFormat, IngestError, MappingConfig};
use crate::geometry::{parse_wkt, Geometry};
use crate::kgmodel::{
    emit_collection, emit_dataset, emit_feature, emit_foi_inverse, emit_observation, emit_organization,
    emit_property, emit_subclass, mint_iri, ns, parse_date_time, DatasetSubgraph, Feature, FeatureKind,
    KnownEntities, MintKind, ObsResult, ObservableProperty, Observation, ObservationCollection, Organization,
    QuantityValue, TemporalEntity, Term, Triple,
};

/// Entities produced from one source.
#[derive(Debug, Clone)]
pub struct IngestOutput {
    pub dataset: DatasetSubgraph,
    pub organization: Organization,
    pub features: Vec<Feature>,
    pub properties: Vec<ObservableProperty>,
    pub observations: Vec<Observation>,
    pub collections: Vec<ObservationCollection>,
    /// Class axioms tying mapped classes into the kernel hierarchy.
    pub axioms: Vec<Triple>,
    pub level: u8,
}

impl IngestOutput {
    pub(crate) fn metadata(manifest: &DatasetManifest) -> Result<(DatasetSubgraph, Organization), IngestError> {
        manifest.check()?;
        let organization = Organization {
            iri: mint_iri(MintKind::Organization, &manifest.source_organization)?,
            label: manifest.source_organization.clone(),
        };
        let dataset = DatasetSubgraph {
            iri: mint_iri(MintKind::Dataset, &manifest.dataset_id)?,
            title: manifest.title.clone(),
            organization: organization.iri.clone(),
            license: manifest.license.clone(),
            creator: manifest.creator.clone(),
            retrieved: manifest.retrieval_date.clone(),
        };
        Ok((dataset, organization))
    }

    /// Group observations into one collection per property.
    pub(crate) fn collect(dataset_id: &str, observations: &[Observation]) -> Result<Vec<ObservationCollection>, IngestError> {
        let mut by_prop: BTreeMap<&str, BTreeSet<String>> = BTreeMap::new();
        for o in observations {
            by_prop.entry(&o.observed_property).or_default().insert(o.iri.clone());
        }
        by_prop
            .into_iter()
            .map(|(prop, members)| {
                Ok(ObservationCollection {
                    iri: mint_iri(MintKind::Collection { dataset: dataset_id }, prop)?,
                    observed_property: prop.to_string(),
                    members,
                })
            })
            .collect()
    }

    /// All triples for this source: metadata, features, properties,
    /// observations with their inverse links, collections and axioms.
    pub fn triples(&self) -> Result<Vec<Triple>, IngestError> {
        let catalog = KnownEntities {
            features: self.features.iter().map(|f| f.iri.clone()).collect(),
            properties: self.properties.iter().map(|p| p.iri.clone()).collect(),
        };
        let mut out = emit_organization(&self.organization);
        out.extend(emit_dataset(&self.dataset));
        out.extend(self.axioms.iter().cloned());
        for f in &self.features {
            out.extend(emit_feature(f));
        }
        for p in &self.properties {
            out.extend(emit_property(p));
        }
        for o in &self.observations {
            out.extend(emit_observation(o, &catalog)?);
            out.push(emit_foi_inverse(o));
        }
        for c in &self.collections {
            out.extend(emit_collection(c)?);
        }
        Ok(out)
    }
}

fn infer_literal(raw: &str) -> Term {
    if let Ok(i) = raw.parse::<i64>() {
        return Term::integer(i);
    }
    match raw.parse::<f64>() {
        Ok(v) if v.is_finite() && raw.bytes().any(|b| b.is_ascii_digit()) => Term::double(v),
        _ => Term::string(raw),
    }
}

fn parse_geometry(raw: &str, format: GeometryFormat) -> Result<Geometry, crate::geometry::GeometryError> {
    let g = match format {
        GeometryFormat::Wkt => parse_wkt(raw)?,
        GeometryFormat::GeoJson => Geometry::from_geojson_str(raw)?,
    };
    g.validate()?;
    Ok(g)
}

/// Map a CSV table onto features and observations. Blank property cells
/// produce no observation.
pub fn ingest_table(csv_text: &str, cfg: &MappingConfig, manifest: &DatasetManifest) -> Result<IngestOutput, IngestError> {
    if manifest.dataset_id != cfg.dataset_id {
        return Err(IngestError::Config(format!(
            "manifest is for dataset {:?}, mapping for {:?}",
            manifest.dataset_id, cfg.dataset_id
        )));
    }
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(csv_text.as_bytes());
    let header: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    cfg.check(&header)?;
    let col = |name: &str| header.iter().position(|h| h == name).expect("checked column");

    let (dataset, organization) = IngestOutput::metadata(manifest)?;
    let foi_class = resolve_iri(&cfg.foi_class)?;
    let mint_kind = match cfg.foi_kind {
        FeatureKind::Hazard => MintKind::Hazard,
        _ => MintKind::Region,
    };

    let mut axioms = vec![emit_subclass(&foi_class, cfg.foi_kind.class_iri())];
    let mut properties = Vec::new();
    let mut mapped = Vec::new();
    for p in &cfg.properties {
        let iri = resolve_iri(&p.property)?;
        let class = resolve_iri(&p.observation_class)?;
        let axiom = emit_subclass(&class, ns::SOSA_OBSERVATION);
        if !axioms.contains(&axiom) {
            axioms.push(axiom);
        }
        properties.push(ObservableProperty {
            iri: iri.clone(),
            label: p.label.clone().unwrap_or_else(|| p.column.clone()),
            dataset: dataset.iri.clone(),
        });
        let mode = match &p.result {
            ResultMode::Simple { datatype } => ResultMode::Simple { datatype: datatype.as_deref().map(resolve_iri).transpose()? },
            ResultMode::Quantity { unit } => ResultMode::Quantity { unit: resolve_iri(unit)? },
        };
        mapped.push((col(&p.column), iri, class, mode));
    }

    let key_col = col(&cfg.foi_key_column);
    let label_col = cfg.label_column.as_deref().map(col);
    let geom = cfg.geometry.as_ref().map(|g| (col(&g.column), g.format));
    let time = cfg.time.as_ref().map(|t| (t.kind, t.columns.iter().map(|c| col(c)).collect::<Vec<_>>()));

    let mut seen = HashSet::new();
    let mut features = Vec::new();
    let mut observations = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        let row = i + 2;
        let cell = |c: usize| record.get(c).unwrap_or("").trim();
        let key = cell(key_col);
        if key.is_empty() {
            return Err(IngestError::Row { row, message: "empty feature key".into() });
        }
        if !seen.insert(key.to_string()) {
            return Err(IngestError::DuplicateKey(key.to_string()));
        }
        let iri = mint_iri(mint_kind, key)?;
        let label = label_col.map(cell).filter(|l| !l.is_empty()).unwrap_or(key);
        let mut feature = Feature::new(&iri, cfg.foi_kind, &foi_class, label);
        if let Some((c, format)) = geom {
            let raw = cell(c);
            if !raw.is_empty() {
                let g = parse_geometry(raw, format).map_err(|source| IngestError::Geometry { feature: iri.clone(), source })?;
                feature = feature.with_geometry(g);
            }
        }
        let scope = match &time {
            Some((kind, cols)) => {
                let stamps: Vec<&str> = cols.iter().map(|&c| cell(c)).collect();
                if stamps.iter().all(|s| s.is_empty()) {
                    None
                } else {
                    let parse = |s: &str| parse_date_time(s).map_err(|e| IngestError::Row { row, message: e.to_string() });
                    Some(match kind {
                        TimeKind::Instant => TemporalEntity::Instant(parse(stamps[0])?),
                        TimeKind::Interval => TemporalEntity::interval(parse(stamps[0])?, parse(stamps[1])?)?,
                    })
                }
            }
            None => None,
        };
        // Hazards carry their own time span; for regions the time stamps the
        // observations made about them.
        let phenomenon_time = match cfg.foi_kind {
            FeatureKind::Hazard => {
                if let Some(s) = scope {
                    feature = feature.with_scope(s);
                }
                None
            }
            _ => scope,
        };

        for ((c, prop, class, mode), pm) in mapped.iter().zip(&cfg.properties) {
            let raw = cell(*c);
            if raw.is_empty() {
                continue;
            }
            let result = match mode {
                ResultMode::Simple { datatype: Some(dt) } => ObsResult::Simple(Term::typed(raw, dt.as_str())?),
                ResultMode::Simple { datatype: None } => ObsResult::Simple(infer_literal(raw)),
                ResultMode::Quantity { unit } => {
                    let v: f64 = raw.parse().map_err(|_| IngestError::Numeric {
                        row,
                        column: pm.column.clone(),
                        value: raw.to_string(),
                    })?;
                    ObsResult::Quantity(QuantityValue::new(v, unit.as_str()).map_err(|_| IngestError::Numeric {
                        row,
                        column: pm.column.clone(),
                        value: raw.to_string(),
                    })?)
                }
            };
            observations.push(Observation {
                iri: mint_iri(MintKind::Observation { dataset: &cfg.dataset_id, property: prop }, key)?,
                class_iri: class.clone(),
                feature_of_interest: iri.clone(),
                observed_property: prop.clone(),
                result,
                phenomenon_time,
                result_time: None,
                sensor: None,
            });
        }
        features.push(feature);
    }

    let collections = IngestOutput::collect(&cfg.dataset_id, &observations)?;
    Ok(IngestOutput {
        dataset,
        organization,
        features,
        properties,
        observations,
        collections,
        axioms,
        level: cfg.integration_level,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{PropertyMapping, ResultMode};

    fn manifest() -> DatasetManifest {
        DatasetManifest {
            dataset_id: "t".into(),
            title: "Test".into(),
            source_organization: "Org".into(),
            license: None,
            creator: None,
            retrieval_date: None,
        }
    }

    fn cfg() -> MappingConfig {
        MappingConfig {
            dataset_id: "t".into(),
            foi_kind: FeatureKind::Region,
            foi_class: "kwg-ont:AdminRegion_3".into(),
            foi_key_column: "id".into(),
            label_column: Some("name".into()),
            geometry: None,
            time: None,
            properties: vec![
                PropertyMapping {
                    column: "a".into(),
                    property: "kwg-ont:propA".into(),
                    label: None,
                    observation_class: "kwg-ont:AObservation".into(),
                    result: ResultMode::Simple { datatype: None },
                },
                PropertyMapping {
                    column: "b".into(),
                    property: "kwg-ont:propB".into(),
                    label: None,
                    observation_class: "kwg-ont:BObservation".into(),
                    result: ResultMode::Quantity { unit: "qudt-unit:MilliM".into() },
                },
            ],
            integration_level: 10,
        }
    }

    #[test]
    fn counting_and_blanks() {
        let out = ingest_table("id,name,a,b\nx,X,1,2.5\ny,Y,0.5,3\nz,Z,hi,4\n", &cfg(), &manifest()).unwrap();
        assert_eq!((out.features.len(), out.observations.len(), out.properties.len()), (3, 6, 2));
        let out = ingest_table("id,name,a,b\nx,X,1,\ny,Y,,3\n", &cfg(), &manifest()).unwrap();
        assert_eq!(out.observations.len(), 2);
        assert_eq!(out.collections.len(), 2);
    }

    #[test]
    fn errors() {
        assert!(matches!(
            ingest_table("id,name,a\nx,X,1\n", &cfg(), &manifest()),
            Err(IngestError::MissingColumn(c)) if c == "b"
        ));
        assert!(matches!(
            ingest_table("id,name,a,b\nx,X,1,abc\n", &cfg(), &manifest()),
            Err(IngestError::Numeric { row: 2, .. })
        ));
        assert!(matches!(
            ingest_table("id,name,a,b\nx,X,1,2\nx,X,1,2\n", &cfg(), &manifest()),
            Err(IngestError::DuplicateKey(k)) if k == "x"
        ));
        let mut dup = cfg();
        dup.properties[1].property = "kwg-ont:propA".into();
        assert!(matches!(ingest_table("id,name,a,b\n", &dup, &manifest()), Err(IngestError::DuplicateProperty(_))));
    }

    #[test]
    fn literal_inference() {
        assert_eq!(infer_literal("3"), Term::integer(3));
        assert_eq!(infer_literal("0.25"), Term::double(0.25));
        assert_eq!(infer_literal("NaN"), Term::string("NaN"));
        assert_eq!(infer_literal("high"), Term::string("high"));
    }
}

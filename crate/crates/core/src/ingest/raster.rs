use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::config::resolve_iri;
use super::spatial::cell_feature;
use super::table::IngestOutput;
use super::{DatasetManifest, IngestError};
use crate::dgg::{cell_from_point, CellId, LatLng, MAX_LEVEL};
use crate::kgmodel::{
    cell_iri, emit_subclass, mint_iri, ns, MintKind, ObsResult, ObservableProperty, Observation, QuantityValue, Term,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RasterKind {
    Continuous,
    Categorical,
}

/// Regular lng/lat grid; row 0 is the northernmost row.
#[derive(Debug, Clone, PartialEq)]
pub struct RasterLayer {
    pub min_lng: f64,
    pub min_lat: f64,
    pub max_lng: f64,
    pub max_lat: f64,
    pub rows: usize,
    pub cols: usize,
    pub values: Vec<f64>,
    pub kind: RasterKind,
    pub nodata: Option<f64>,
}

impl RasterLayer {
    pub fn new(
        bbox: [f64; 4],
        rows: usize,
        cols: usize,
        values: Vec<f64>,
        kind: RasterKind,
        nodata: Option<f64>,
    ) -> Result<Self, IngestError> {
        let [min_lng, min_lat, max_lng, max_lat] = bbox;
        if rows == 0 || cols == 0 {
            return Err(IngestError::Raster("raster is empty".into()));
        }
        if rows * cols != values.len() {
            return Err(IngestError::Raster(format!("{rows}x{cols} grid but {} values", values.len())));
        }
        if !(min_lng < max_lng && min_lat < max_lat) || min_lng < -180.0 || max_lng > 180.0 || min_lat < -90.0 || max_lat > 90.0 {
            return Err(IngestError::Raster(format!("bad bounding box {bbox:?}")));
        }
        if kind == RasterKind::Categorical && values.iter().any(|v| v.fract() != 0.0) {
            return Err(IngestError::Raster("categorical rasters hold integer codes".into()));
        }
        Ok(RasterLayer { min_lng, min_lat, max_lng, max_lat, rows, cols, values, kind, nodata })
    }

    pub fn pixel_width(&self) -> f64 {
        (self.max_lng - self.min_lng) / self.cols as f64
    }

    pub fn pixel_height(&self) -> f64 {
        (self.max_lat - self.min_lat) / self.rows as f64
    }

    /// Center of pixel (`row`, `col`) as (lng, lat).
    pub fn pixel_center(&self, row: usize, col: usize) -> (f64, f64) {
        (
            self.min_lng + (col as f64 + 0.5) * self.pixel_width(),
            self.max_lat - (row as f64 + 0.5) * self.pixel_height(),
        )
    }

    pub fn value(&self, row: usize, col: usize) -> Option<f64> {
        let v = self.values[row * self.cols + col];
        (self.nodata != Some(v) && v.is_finite()).then_some(v)
    }

    /// ASCII grid text accepted by [`parse_ascii_grid`].
    pub fn to_ascii_grid(&self) -> String {
        let mut out = format!(
            "ncols {}\nnrows {}\nbbox {} {} {} {}\nkind {}\n",
            self.cols,
            self.rows,
            self.min_lng,
            self.min_lat,
            self.max_lng,
            self.max_lat,
            match self.kind {
                RasterKind::Continuous => "continuous",
                RasterKind::Categorical => "categorical",
            }
        );
        if let Some(nd) = self.nodata {
            let _ = writeln!(out, "nodata {nd}");
        }
        for row in self.values.chunks(self.cols) {
            let line: Vec<String> = row.iter().map(f64::to_string).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }
}

/// Parse an ASCII grid. Header lines are `ncols`, `nrows`, either `bbox
/// minlng minlat maxlng maxlat` or `xllcorner`/`yllcorner`/`cellsize`, and
/// optionally `kind continuous|categorical` and `nodata <v>`. Values follow
/// in row-major order, north row first.
pub fn parse_ascii_grid(text: &str) -> Result<RasterLayer, IngestError> {
    let bad = |m: String| IngestError::Raster(m);
    let mut header: BTreeMap<String, Vec<String>> = BTreeMap::new();
    let mut values = Vec::new();
    for line in text.lines() {
        let mut toks = line.split_whitespace().peekable();
        let Some(first) = toks.peek() else { continue };
        if values.is_empty() && first.parse::<f64>().is_err() {
            let key = toks.next().expect("peeked").to_ascii_lowercase();
            header.insert(key, toks.map(str::to_string).collect());
            continue;
        }
        for t in toks {
            values.push(t.parse::<f64>().map_err(|_| bad(format!("bad value {t:?}")))?);
        }
    }
    let one = |k: &str| -> Result<f64, IngestError> {
        let v = header.get(k).and_then(|v| v.first()).ok_or_else(|| bad(format!("missing {k}")))?;
        v.parse::<f64>().map_err(|_| bad(format!("bad {k} {v:?}")))
    };
    let count = |k: &str| -> Result<usize, IngestError> {
        let v = one(k)?;
        if v < 1.0 || v.fract() != 0.0 {
            return Err(bad(format!("bad {k} {v}")));
        }
        Ok(v as usize)
    };
    let cols = count("ncols")?;
    let rows = count("nrows")?;
    let bbox = if let Some(b) = header.get("bbox") {
        let nums: Vec<f64> = b.iter().map(|t| t.parse::<f64>()).collect::<Result<_, _>>().map_err(|_| bad("bad bbox".into()))?;
        <[f64; 4]>::try_from(nums).map_err(|_| bad("bbox needs four numbers".into()))?
    } else {
        let (x, y, size) = (one("xllcorner")?, one("yllcorner")?, one("cellsize")?);
        [x, y, x + size * cols as f64, y + size * rows as f64]
    };
    let kind = match header.get("kind").and_then(|v| v.first()).map(|s| s.to_ascii_lowercase()) {
        None => RasterKind::Continuous,
        Some(k) if k == "continuous" => RasterKind::Continuous,
        Some(k) if k == "categorical" => RasterKind::Categorical,
        Some(k) => return Err(bad(format!("unknown kind {k:?}"))),
    };
    let nodata = if header.contains_key("nodata") {
        Some(one("nodata")?)
    } else if header.contains_key("nodata_value") {
        Some(one("nodata_value")?)
    } else {
        None
    };
    RasterLayer::new(bbox, rows, cols, values, kind, nodata)
}

/// Per-cell summary at `level`: mean of the pixels whose centers fall in
/// the cell, or for categorical rasters the most frequent code (smallest
/// code on ties). Cells receiving no pixel center are absent.
pub fn cell_summaries(r: &RasterLayer, level: u8) -> Result<BTreeMap<CellId, f64>, IngestError> {
    if level > MAX_LEVEL {
        return Err(crate::dgg::DggError::LevelOutOfRange(i64::from(level)).into());
    }
    let cell_deg = 90.0 / 2f64.powi(i32::from(level));
    let pixel_deg = r.pixel_width().max(r.pixel_height());
    if cell_deg < pixel_deg {
        return Err(IngestError::LevelTooFine { level, cell_deg, pixel_deg });
    }
    let mut sums: BTreeMap<CellId, (f64, usize)> = BTreeMap::new();
    let mut codes: BTreeMap<CellId, BTreeMap<i64, usize>> = BTreeMap::new();
    for row in 0..r.rows {
        for col in 0..r.cols {
            let Some(v) = r.value(row, col) else { continue };
            let (lng, lat) = r.pixel_center(row, col);
            let cell = cell_from_point(LatLng::new(lat, lng)?, level)?;
            match r.kind {
                RasterKind::Continuous => {
                    let e = sums.entry(cell).or_insert((0.0, 0));
                    e.0 += v;
                    e.1 += 1;
                }
                RasterKind::Categorical => *codes.entry(cell).or_default().entry(v as i64).or_insert(0) += 1,
            }
        }
    }
    Ok(match r.kind {
        RasterKind::Continuous => sums.into_iter().map(|(c, (s, n))| (c, s / n as f64)).collect(),
        RasterKind::Categorical => codes
            .into_iter()
            .map(|(c, counts)| {
                let (code, _) = counts.iter().max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(a.0))).expect("nonempty");
                (c, *code as f64)
            })
            .collect(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RasterConfig {
    pub dataset_id: String,
    pub property: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub observation_class: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unit: Option<String>,
    pub level: u8,
}

/// Raster summaries as observations whose features of interest are cells.
pub fn summarize_raster(r: &RasterLayer, cfg: &RasterConfig, manifest: &DatasetManifest) -> Result<IngestOutput, IngestError> {
    if manifest.dataset_id != cfg.dataset_id {
        return Err(IngestError::Config(format!(
            "manifest is for dataset {:?}, raster config for {:?}",
            manifest.dataset_id, cfg.dataset_id
        )));
    }
    let (dataset, organization) = IngestOutput::metadata(manifest)?;
    let property = resolve_iri(&cfg.property)?;
    let class = resolve_iri(&cfg.observation_class)?;
    let unit = cfg.unit.as_deref().map(resolve_iri).transpose()?;
    let summaries = cell_summaries(r, cfg.level)?;

    let mut features = Vec::new();
    let mut observations = Vec::new();
    for (&cell, &v) in &summaries {
        let result = match (r.kind, &unit) {
            (RasterKind::Categorical, _) => ObsResult::Simple(Term::integer(v as i64)),
            (RasterKind::Continuous, Some(u)) => ObsResult::Quantity(QuantityValue::new(v, u.as_str())?),
            (RasterKind::Continuous, None) => ObsResult::Simple(Term::double(v)),
        };
        observations.push(Observation {
            iri: mint_iri(MintKind::Observation { dataset: &cfg.dataset_id, property: &property }, &cell.token())?,
            class_iri: class.clone(),
            feature_of_interest: cell_iri(cell),
            observed_property: property.clone(),
            result,
            phenomenon_time: None,
            result_time: None,
            sensor: None,
        });
        features.push(cell_feature(cell));
    }
    let collections = IngestOutput::collect(&cfg.dataset_id, &observations)?;
    Ok(IngestOutput {
        properties: vec![ObservableProperty {
            iri: property.clone(),
            label: cfg.label.clone().unwrap_or_else(|| ns::local_name(&property).to_string()),
            dataset: dataset.iri.clone(),
        }],
        dataset,
        organization,
        features,
        observations,
        collections,
        axioms: vec![emit_subclass(&class, ns::SOSA_OBSERVATION)],
        level: cfg.level,
    })
}

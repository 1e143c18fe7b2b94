//! On-disk exchange formats: crop/score/aggregated JSON Lines manifests, the
//! dataset manifest (CSV or JSON Lines) and the evaluation report.

use std::collections::HashSet;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::agg::AggregatedScore;
use crate::crop::{CropRecord, CropSet};
use crate::error::{Error, Result};
use crate::eval::{DatasetManifest, EvalReport, ManifestEntry};
use crate::pixel::Rect;
use crate::scalar::{from_f64, to_f64, Scalar};
use crate::score::ScoreRecord;
use crate::texture::{MetricValue, TextureMetricKind};

/// Stable identifier derived from an image path: the path without its
/// extension, with every character outside `[A-Za-z0-9._-]` replaced by `_`.
pub fn image_id_for_path(path: &Path) -> String {
    let stem = path.with_extension("");
    stem.to_string_lossy()
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '.' || c == '_' || c == '-' {
                c
            } else {
                '_'
            }
        })
        .collect()
}

/// One crop manifest line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CropManifestLine {
    pub image_id: String,
    pub crop_id: String,
    pub x: u32,
    pub y: u32,
    pub w: u32,
    pub h: u32,
    pub metric_kind: TextureMetricKind,
    pub metric_value: f64,
    pub flipped: bool,
    pub fallback: bool,
}

impl CropManifestLine {
    pub fn from_record<S: Scalar>(rec: &CropRecord<S>) -> Self {
        Self {
            image_id: rec.image_id.clone(),
            crop_id: rec.crop_id.clone(),
            x: rec.rect.x,
            y: rec.rect.y,
            w: rec.rect.w,
            h: rec.rect.h,
            metric_kind: rec.metric.kind,
            metric_value: to_f64(rec.metric.value),
            flipped: rec.flipped,
            fallback: rec.fallback,
        }
    }

    pub fn into_record<S: Scalar>(self) -> CropRecord<S> {
        CropRecord {
            image_id: self.image_id,
            crop_id: self.crop_id,
            rect: Rect::new(self.x, self.y, self.w, self.h),
            metric: MetricValue {
                kind: self.metric_kind,
                value: from_f64(self.metric_value),
            },
            flipped: self.flipped,
            fallback: self.fallback,
        }
    }
}

/// One score manifest line, the external scorer contract.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreLine {
    pub crop_id: String,
    pub score: f64,
}

impl ScoreLine {
    pub fn from_record<S: Scalar>(rec: &ScoreRecord<S>) -> Self {
        Self {
            crop_id: rec.crop_id.clone(),
            score: to_f64(rec.score),
        }
    }

    pub fn into_record<S: Scalar>(self) -> ScoreRecord<S> {
        ScoreRecord {
            crop_id: self.crop_id,
            score: from_f64(self.score),
        }
    }
}

/// One aggregated-score manifest line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregatedLine {
    pub image_id: String,
    pub score: f64,
    pub n_crops: usize,
    pub method: String,
}

impl AggregatedLine {
    pub fn from_score<S: Scalar>(agg: &AggregatedScore<S>) -> Self {
        Self {
            image_id: agg.image_id.clone(),
            score: to_f64(agg.score),
            n_crops: agg.n_crops,
            method: agg.method.to_string(),
        }
    }

    pub fn into_score<S: Scalar>(self) -> Result<AggregatedScore<S>> {
        Ok(AggregatedScore {
            image_id: self.image_id,
            score: from_f64(self.score),
            n_crops: self.n_crops,
            method: self.method.parse()?,
        })
    }
}

fn write_jsonl<T: Serialize>(path: &Path, lines: &[T]) -> Result<()> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    for line in lines {
        serde_json::to_writer(&mut out, line)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

fn read_jsonl<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>> {
    let reader = BufReader::new(std::fs::File::open(path)?);
    let mut out = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let value = serde_json::from_str(&line).map_err(|e| Error::ManifestParse {
            path: path.display().to_string(),
            line: idx + 1,
            reason: e.to_string(),
        })?;
        out.push(value);
    }
    Ok(out)
}

pub fn write_crop_manifest<S: Scalar>(path: &Path, sets: &[CropSet<S>]) -> Result<()> {
    let lines: Vec<CropManifestLine> = sets
        .iter()
        .flat_map(|set| set.records.iter().map(CropManifestLine::from_record))
        .collect();
    write_jsonl(path, &lines)
}

pub fn read_crop_manifest(path: &Path) -> Result<Vec<CropManifestLine>> {
    read_jsonl(path)
}

pub fn write_score_manifest(path: &Path, lines: &[ScoreLine]) -> Result<()> {
    write_jsonl(path, lines)
}

pub fn read_score_manifest(path: &Path) -> Result<Vec<ScoreLine>> {
    read_jsonl(path)
}

pub fn write_aggregated_manifest(path: &Path, lines: &[AggregatedLine]) -> Result<()> {
    write_jsonl(path, lines)
}

pub fn read_aggregated_manifest(path: &Path) -> Result<Vec<AggregatedLine>> {
    read_jsonl(path)
}

#[derive(Debug, Deserialize)]
struct DatasetLine {
    path: String,
    label: u8,
    subset: String,
}

/// Loads the dataset manifest. `.csv` files need a `path,label,subset`
/// header; anything else is parsed as JSON Lines with the same fields.
pub fn load_dataset_manifest(path: &Path) -> Result<DatasetManifest> {
    let is_csv = path
        .extension()
        .is_some_and(|ext| ext.eq_ignore_ascii_case("csv"));
    let lines: Vec<DatasetLine> = if is_csv {
        let mut reader = csv::Reader::from_path(path)?;
        reader.deserialize().collect::<std::result::Result<_, _>>()?
    } else {
        read_jsonl(path)?
    };

    let mut entries = Vec::with_capacity(lines.len());
    let mut paths = HashSet::with_capacity(lines.len());
    let mut ids = HashSet::with_capacity(lines.len());
    for (idx, line) in lines.into_iter().enumerate() {
        let err = |reason: String| Error::ManifestParse {
            path: path.display().to_string(),
            line: idx + 1,
            reason,
        };
        if line.label > 1 {
            return Err(err(format!("label {} must be 0 or 1", line.label)));
        }
        if !paths.insert(line.path.clone()) {
            return Err(err(format!("duplicate path {:?}", line.path)));
        }
        let entry_path = std::path::PathBuf::from(&line.path);
        let id = image_id_for_path(&entry_path);
        if !ids.insert(id.clone()) {
            return Err(err(format!(
                "path {:?} maps to image id {id:?} already used by another entry",
                line.path
            )));
        }
        entries.push(ManifestEntry {
            path: entry_path,
            label: line.label,
            subset: line.subset,
        });
    }
    Ok(DatasetManifest { entries })
}

pub fn write_report(path: &Path, report: &EvalReport) -> Result<()> {
    let json = serde_json::to_string_pretty(report)?;
    std::fs::write(path, json + "\n")?;
    Ok(())
}

pub fn read_report(path: &Path) -> Result<EvalReport> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

/// Plain-text table for the report, one row per subset plus the overall row.
pub fn render_report_table(report: &EvalReport) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "{:<24} {:>8} {:>8} {:>8} {:>6} {:>6}\n",
        "subset", "BA", "AP", "AUC", "pos", "neg"
    ));
    for s in &report.subsets {
        out.push_str(&format!(
            "{:<24} {:>8.4} {:>8.4} {:>8.4} {:>6} {:>6}\n",
            s.subset, s.ba, s.ap, s.auc, s.positives, s.negatives
        ));
    }
    out.push_str(&format!(
        "{:<24} {:>8.4} {:>8.4} {:>8.4} {:>6} {:>6}\n",
        "overall", report.overall.ba, report.overall.ap, report.overall.auc,
        report.positives, report.negatives
    ));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::path::PathBuf;

    #[test]
    fn image_id_strips_extension_and_sanitizes() {
        assert_eq!(image_id_for_path(Path::new("img001.png")), "img001");
        assert_eq!(
            image_id_for_path(Path::new("data/real/cat 1.jpeg")),
            "data_real_cat_1"
        );
        assert_eq!(image_id_for_path(Path::new("a-b_c.d.tif")), "a-b_c.d");
    }

    #[test]
    fn crop_manifest_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("crops.jsonl");
        let line = CropManifestLine {
            image_id: "img".into(),
            crop_id: "img_0_0".into(),
            x: 0,
            y: 0,
            w: 224,
            h: 224,
            metric_kind: TextureMetricKind::Sd,
            metric_value: 0.25,
            flipped: false,
            fallback: false,
        };
        write_jsonl(&path, std::slice::from_ref(&line)).unwrap();
        assert_eq!(read_crop_manifest(&path).unwrap(), vec![line]);
    }

    #[test]
    fn jsonl_reports_parse_errors_with_line_numbers() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("scores.jsonl");
        std::fs::write(&path, "{\"crop_id\":\"a\",\"score\":0.5}\nnot json\n").unwrap();
        let err = read_score_manifest(&path).unwrap_err();
        assert!(matches!(err, Error::ManifestParse { line: 2, .. }));
    }

    #[test]
    fn dataset_manifest_csv() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("data.csv");
        std::fs::write(&path, "path,label,subset\na.png,1,gen\nb.png,0,gen\n").unwrap();
        let manifest = load_dataset_manifest(&path).unwrap();
        assert_eq!(manifest.entries.len(), 2);
        assert_eq!(manifest.entries[0].path, PathBuf::from("a.png"));
        assert_eq!(manifest.entries[0].label, 1);
        assert_eq!(manifest.entries[1].subset, "gen");
    }

    #[test]
    fn dataset_manifest_jsonl() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("data.jsonl");
        std::fs::write(
            &path,
            "{\"path\":\"a.png\",\"label\":1,\"subset\":\"gen\"}\n",
        )
        .unwrap();
        let manifest = load_dataset_manifest(&path).unwrap();
        assert_eq!(manifest.entries.len(), 1);
    }

    #[test]
    fn dataset_manifest_rejects_bad_labels_and_duplicates() {
        let dir = tempfile::tempdir().unwrap();
        let bad_label = dir.path().join("bad.csv");
        std::fs::write(&bad_label, "path,label,subset\na.png,2,gen\n").unwrap();
        assert!(load_dataset_manifest(&bad_label).is_err());

        let dup = dir.path().join("dup.csv");
        std::fs::write(&dup, "path,label,subset\na.png,1,gen\na.png,0,gen\n").unwrap();
        assert!(load_dataset_manifest(&dup).is_err());
    }

    #[test]
    fn aggregated_line_round_trips_method() {
        let agg = AggregatedScore::<f64> {
            image_id: "img".into(),
            score: 0.42,
            n_crops: 9,
            method: crate::agg::AggregationMethod::WeightedAverage { interval_length: 0.1 },
        };
        let line = AggregatedLine::from_score(&agg);
        assert_eq!(line.method, "weighted-average:0.1");
        let back: AggregatedScore<f64> = line.into_score().unwrap();
        assert_eq!(back, agg);
    }
}

//! The batch workflow: crop, score, aggregate, evaluate, run, ablate.
//!
//! Work-directory layout (the external-scorer handoff contract):
//!
//! ```text
//! <work>/crops/<crop_id>.png   optional crop export
//! <work>/crops.jsonl           crop manifest, one line per retained crop
//! <work>/scores.jsonl          score manifest, one line per crop
//! <work>/aggregated.jsonl      one line per image
//! <work>/report.json           evaluation report
//! <work>/config.json           parameters the artifacts were produced with
//! ```
//!
//! Images are processed concurrently (`--jobs`), but every manifest is
//! written in dataset order, so reruns are byte-identical.

use std::collections::HashMap;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use texturecrop::{
    agg::{aggregate, AggregationMethod},
    crop::{extract_for_scoring, plan_crops, CropSet, CropperConfig, SelectionPart},
    eval::{evaluate, DatasetManifest, EvalReport, OverallMetrics},
    manifest::{
        image_id_for_path, load_dataset_manifest, read_aggregated_manifest, read_crop_manifest,
        read_score_manifest, write_aggregated_manifest, write_crop_manifest,
        write_score_manifest, AggregatedLine, CropManifestLine, ScoreLine,
    },
    pixel::{clamp_oversize, decode_image, PixelImage},
    score::{score_crops, validate_scores, BuiltScorer, CropPixels, ScoreRecord, ScorerSpec},
    texture::TextureMetricKind,
};

/// Scalar precision used by the pipeline.
pub type S = f64;

/// Per-item outcome of a batch command. The process exit code is 0 iff
/// `failures` is empty.
#[derive(Debug, Default)]
pub struct CmdSummary {
    pub processed: usize,
    pub failures: Vec<(String, String)>,
}

impl CmdSummary {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Parameters recorded alongside the work-directory artifacts; each command
/// fills in the part it knows about.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct WorkConfig {
    pub cropper: Option<CropperConfig>,
    pub max_side: Option<u32>,
    pub scorer: Option<String>,
    pub aggregation: Option<String>,
    pub threshold: Option<f64>,
}

impl WorkConfig {
    pub fn load(work: &Path) -> Result<Self> {
        let path = work.join("config.json");
        if !path.exists() {
            return Ok(Self::default());
        }
        let text = std::fs::read_to_string(&path)
            .with_context(|| format!("reading {}", path.display()))?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn store(&self, work: &Path) -> Result<()> {
        let path = work.join("config.json");
        let json = serde_json::to_string_pretty(self)?;
        std::fs::write(&path, json + "\n")
            .with_context(|| format!("writing {}", path.display()))?;
        Ok(())
    }
}

fn with_pool<R: Send>(jobs: Option<usize>, f: impl FnOnce() -> R + Send) -> Result<R> {
    match jobs {
        Some(n) if n > 0 => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .context("building worker pool")?;
            Ok(pool.install(f))
        }
        _ => Ok(f()),
    }
}

/// Dataset paths are resolved relative to the manifest's directory.
fn resolve_path(dataset: &Path, entry: &Path) -> PathBuf {
    if entry.is_absolute() {
        entry.to_path_buf()
    } else {
        dataset.parent().unwrap_or(Path::new(".")).join(entry)
    }
}

fn load_image(path: &Path, max_side: u32) -> Result<PixelImage<S>> {
    let bytes = std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    let img = decode_image::<S>(&bytes).with_context(|| format!("decoding {}", path.display()))?;
    Ok(clamp_oversize(&img, max_side))
}

fn set_from_lines(image_id: &str, lines: &[CropManifestLine]) -> CropSet<S> {
    let records = lines.iter().map(|l| l.clone().into_record()).collect::<Vec<_>>();
    let retained = records.len();
    CropSet {
        image_id: image_id.to_string(),
        records,
        total_candidates: retained,
        retained,
    }
}

/// Crop manifest lines grouped by image in first-appearance order.
fn group_by_image(lines: Vec<CropManifestLine>) -> Vec<(String, Vec<CropManifestLine>)> {
    let mut order: Vec<String> = Vec::new();
    let mut groups: HashMap<String, Vec<CropManifestLine>> = HashMap::new();
    for line in lines {
        if !groups.contains_key(&line.image_id) {
            order.push(line.image_id.clone());
        }
        groups.entry(line.image_id.clone()).or_default().push(line);
    }
    order
        .into_iter()
        .map(|id| {
            let lines = groups.remove(&id).expect("group exists");
            (id, lines)
        })
        .collect()
}

// ---------------------------------------------------------------------------
// crop

#[derive(Debug, Clone)]
pub struct CropArgs {
    pub dataset: PathBuf,
    pub work: PathBuf,
    pub cropper: CropperConfig,
    pub max_side: u32,
    pub export_crops: bool,
    pub jobs: Option<usize>,
}

/// Plans crops for every dataset image and writes `<work>/crops.jsonl`.
/// Images that fail to decode are skipped and reported in the summary.
pub fn cmd_crop(args: &CropArgs) -> Result<CmdSummary> {
    args.cropper.validate()?;
    let dataset = load_dataset_manifest(&args.dataset)?;
    std::fs::create_dir_all(&args.work)?;
    let export_dir = args.work.join("crops");
    if args.export_crops {
        std::fs::create_dir_all(&export_dir)?;
    }

    let results = plan_dataset(&dataset, args)?;

    let mut summary = CmdSummary::default();
    let mut sets = Vec::new();
    for (entry, outcome) in dataset.entries.iter().zip(results) {
        match outcome {
            Ok(set) => {
                summary.processed += 1;
                sets.push(set);
            }
            Err(reason) => summary
                .failures
                .push((entry.path.display().to_string(), reason)),
        }
    }
    write_crop_manifest(&args.work.join("crops.jsonl"), &sets)?;

    let mut config = WorkConfig::load(&args.work)?;
    config.cropper = Some(args.cropper.clone());
    config.max_side = Some(args.max_side);
    config.store(&args.work)?;
    Ok(summary)
}

/// Per-image plan results in dataset order; `Err` carries the skip reason.
fn plan_dataset(
    dataset: &DatasetManifest,
    args: &CropArgs,
) -> Result<Vec<std::result::Result<CropSet<S>, String>>> {
    let export_dir = args.work.join("crops");
    with_pool(args.jobs, || {
        dataset
            .entries
            .par_iter()
            .map(|entry| {
                let path = resolve_path(&args.dataset, &entry.path);
                let image_id = image_id_for_path(&entry.path);
                let img = load_image(&path, args.max_side).map_err(|e| format!("{e:#}"))?;
                let set = plan_crops(&img, &image_id, &args.cropper);
                if args.export_crops {
                    for rec in &set.records {
                        let pixels =
                            extract_for_scoring(&img, rec, args.cropper.method, args.cropper.window)
                                .map_err(|e| e.to_string())?;
                        pixels
                            .save_png(&export_dir.join(format!("{}.png", rec.crop_id)))
                            .map_err(|e| e.to_string())?;
                    }
                }
                Ok(set)
            })
            .collect()
    })
}

// ---------------------------------------------------------------------------
// score

#[derive(Debug, Clone)]
pub struct ScoreArgs {
    pub dataset: PathBuf,
    pub work: PathBuf,
    pub scorer: ScorerSpec,
    /// Must match the configuration the crop manifest was produced with; the
    /// resize baseline reconstructs detector inputs from it.
    pub cropper: CropperConfig,
    pub max_side: u32,
    pub jobs: Option<usize>,
}

/// Scores every crop in `<work>/crops.jsonl` with a built-in scorer and
/// writes `<work>/scores.jsonl`. External detectors skip this command: they
/// read the exported crops and write the score manifest themselves.
pub fn cmd_score(args: &ScoreArgs) -> Result<CmdSummary> {
    let dataset = load_dataset_manifest(&args.dataset)?;
    let groups = group_by_image(read_crop_manifest(&args.work.join("crops.jsonl"))?);
    let scorer = BuiltScorer::<S>::build(&args.scorer)?;

    let path_by_id: HashMap<String, PathBuf> = dataset
        .entries
        .iter()
        .map(|e| (image_id_for_path(&e.path), resolve_path(&args.dataset, &e.path)))
        .collect();

    let mut summary = CmdSummary::default();
    let mut lines: Vec<ScoreLine> = Vec::new();
    if scorer.needs_pixels() {
        let results: Vec<std::result::Result<Vec<ScoreLine>, (String, String)>> =
            with_pool(args.jobs, || {
                groups
                    .par_iter()
                    .map(|(image_id, group)| {
                        let path = path_by_id.get(image_id).ok_or_else(|| {
                            (image_id.clone(), "not in dataset manifest".to_string())
                        })?;
                        score_image_group(image_id, group, path, &scorer, args)
                            .map_err(|e| (path.display().to_string(), format!("{e:#}")))
                    })
                    .collect()
            })?;
        for outcome in results {
            match outcome {
                Ok(mut scored) => {
                    summary.processed += 1;
                    lines.append(&mut scored);
                }
                Err((item, reason)) => summary.failures.push((item, reason)),
            }
        }
    } else {
        for (image_id, group) in &groups {
            let crops: Vec<CropPixels<S>> = group
                .iter()
                .map(|line| CropPixels {
                    crop_id: line.crop_id.clone(),
                    pixels: placeholder_pixels(),
                })
                .collect();
            let records = score_crops(&scorer, &crops)
                .with_context(|| format!("scoring {image_id}"))?;
            validate_group(&records, image_id, group)?;
            lines.extend(records.iter().map(ScoreLine::from_record));
            summary.processed += 1;
        }
    }
    write_score_manifest(&args.work.join("scores.jsonl"), &lines)?;

    let mut config = WorkConfig::load(&args.work)?;
    config.scorer = Some(args.scorer.to_string());
    config.store(&args.work)?;
    Ok(summary)
}

/// 1x1 stand-in for scorers that never look at pixels.
fn placeholder_pixels() -> PixelImage<S> {
    PixelImage::new(1, 1, 1, vec![0.0]).expect("valid placeholder")
}

fn score_image_group(
    image_id: &str,
    group: &[CropManifestLine],
    path: &Path,
    scorer: &BuiltScorer<S>,
    args: &ScoreArgs,
) -> Result<Vec<ScoreLine>> {
    let img = load_image(path, args.max_side)?;
    let crops: Vec<CropPixels<S>> = group
        .iter()
        .map(|line| {
            let rec = line.clone().into_record::<S>();
            let pixels = extract_for_scoring(&img, &rec, args.cropper.method, args.cropper.window)?;
            Ok(CropPixels {
                crop_id: rec.crop_id,
                pixels,
            })
        })
        .collect::<Result<_>>()?;
    let records = score_crops(scorer, &crops)?;
    validate_group(&records, image_id, group)?;
    Ok(records.iter().map(ScoreLine::from_record).collect())
}

fn validate_group(
    records: &[ScoreRecord<S>],
    image_id: &str,
    group: &[CropManifestLine],
) -> Result<()> {
    let set = set_from_lines(image_id, group);
    validate_scores(records, &set).with_context(|| format!("validating scores for {image_id}"))?;
    Ok(())
}

// ---------------------------------------------------------------------------
// aggregate

#[derive(Debug, Clone)]
pub struct AggregateArgs {
    pub work: PathBuf,
    pub method: AggregationMethod,
}

/// Joins `<work>/scores.jsonl` with the crop manifest and writes one fused
/// score per image to `<work>/aggregated.jsonl`. A missing, duplicate or
/// out-of-range score aborts the command.
pub fn cmd_aggregate(args: &AggregateArgs) -> Result<CmdSummary> {
    args.method.validate()?;
    let groups = group_by_image(read_crop_manifest(&args.work.join("crops.jsonl"))?);
    let score_lines = read_score_manifest(&args.work.join("scores.jsonl"))?;

    let mut by_crop: HashMap<&str, f64> = HashMap::with_capacity(score_lines.len());
    for line in &score_lines {
        if by_crop.insert(line.crop_id.as_str(), line.score).is_some() {
            bail!(texturecrop::Error::DuplicateScore {
                id: line.crop_id.clone()
            });
        }
    }

    let lines = aggregate_groups(&groups, &by_crop, &args.method)?;
    write_aggregated_manifest(&args.work.join("aggregated.jsonl"), &lines)?;

    let mut config = WorkConfig::load(&args.work)?;
    config.aggregation = Some(args.method.to_string());
    config.store(&args.work)?;
    Ok(CmdSummary {
        processed: lines.len(),
        failures: Vec::new(),
    })
}

fn aggregate_groups(
    groups: &[(String, Vec<CropManifestLine>)],
    by_crop: &HashMap<&str, f64>,
    method: &AggregationMethod,
) -> Result<Vec<AggregatedLine>> {
    let mut lines = Vec::with_capacity(groups.len());
    for (image_id, group) in groups {
        let records: Vec<ScoreRecord<S>> = group
            .iter()
            .map(|line| {
                let score = *by_crop.get(line.crop_id.as_str()).ok_or_else(|| {
                    texturecrop::Error::MissingScore {
                        id: line.crop_id.clone(),
                    }
                })?;
                Ok(ScoreRecord {
                    crop_id: line.crop_id.clone(),
                    score,
                })
            })
            .collect::<Result<_>>()?;
        validate_group(&records, image_id, group)?;
        let scores: Vec<S> = records.iter().map(|r| r.score).collect();
        let fused = aggregate(&scores, method)?;
        lines.push(AggregatedLine {
            image_id: image_id.clone(),
            score: fused,
            n_crops: scores.len(),
            method: method.to_string(),
        });
    }
    Ok(lines)
}

// ---------------------------------------------------------------------------
// evaluate

#[derive(Debug, Clone)]
pub struct EvaluateArgs {
    pub dataset: PathBuf,
    pub work: PathBuf,
    pub threshold: f64,
    /// Report destination; defaults to `<work>/report.json`.
    pub report: Option<PathBuf>,
}

/// Evaluates `<work>/aggregated.jsonl` against the dataset manifest and
/// writes the report JSON.
pub fn cmd_evaluate(args: &EvaluateArgs) -> Result<EvalReport> {
    let dataset = load_dataset_manifest(&args.dataset)?;
    let aggregated = read_aggregated_manifest(&args.work.join("aggregated.jsonl"))?
        .into_iter()
        .map(|line| line.into_score::<S>())
        .collect::<texturecrop::Result<Vec<_>>>()?;

    let mut config = WorkConfig::load(&args.work)?;
    let cropper = config.cropper.clone().unwrap_or_default();
    let aggregation: AggregationMethod = match &config.aggregation {
        Some(text) => text.parse()?,
        None => AggregationMethod::Average,
    };

    let report = evaluate(&dataset, &aggregated, &cropper, &aggregation, args.threshold)?;
    let report_path = args
        .report
        .clone()
        .unwrap_or_else(|| args.work.join("report.json"));
    texturecrop::manifest::write_report(&report_path, &report)?;

    config.threshold = Some(args.threshold);
    config.store(&args.work)?;
    Ok(report)
}

// ---------------------------------------------------------------------------
// run

#[derive(Debug, Clone)]
pub struct RunArgs {
    pub dataset: PathBuf,
    pub work: PathBuf,
    pub cropper: CropperConfig,
    pub max_side: u32,
    pub scorer: ScorerSpec,
    pub aggregation: AggregationMethod,
    pub threshold: f64,
    pub export_crops: bool,
    pub jobs: Option<usize>,
}

/// The full pipeline in one pass, decoding each image once. Emits the same
/// artifacts as running crop, score, aggregate and evaluate in sequence.
/// Images that fail to decode are skipped, reported in the summary and left
/// out of the evaluation.
pub fn cmd_run(args: &RunArgs) -> Result<(CmdSummary, EvalReport)> {
    args.cropper.validate()?;
    args.require_builtin_scorer()?;
    let dataset = load_dataset_manifest(&args.dataset)?;
    std::fs::create_dir_all(&args.work)?;
    let export_dir = args.work.join("crops");
    if args.export_crops {
        std::fs::create_dir_all(&export_dir)?;
    }
    let scorer = BuiltScorer::<S>::build(&args.scorer)?;

    type ImageOutcome = std::result::Result<(CropSet<S>, Vec<ScoreLine>, AggregatedLine), String>;
    let results: Vec<ImageOutcome> = with_pool(args.jobs, || {
        dataset
            .entries
            .par_iter()
            .map(|entry| {
                let path = resolve_path(&args.dataset, &entry.path);
                let image_id = image_id_for_path(&entry.path);
                process_one_image(&path, &image_id, &scorer, args).map_err(|e| format!("{e:#}"))
            })
            .collect()
    })?;

    let mut summary = CmdSummary::default();
    let mut sets = Vec::new();
    let mut score_lines = Vec::new();
    let mut aggregated_lines = Vec::new();
    let mut evaluable = Vec::new();
    for (entry, outcome) in dataset.entries.iter().zip(results) {
        match outcome {
            Ok((set, scores, agg)) => {
                summary.processed += 1;
                sets.push(set);
                score_lines.extend(scores);
                aggregated_lines.push(agg);
                evaluable.push(entry.clone());
            }
            Err(reason) => summary
                .failures
                .push((entry.path.display().to_string(), reason)),
        }
    }

    write_crop_manifest(&args.work.join("crops.jsonl"), &sets)?;
    write_score_manifest(&args.work.join("scores.jsonl"), &score_lines)?;
    write_aggregated_manifest(&args.work.join("aggregated.jsonl"), &aggregated_lines)?;

    let aggregated: Vec<texturecrop::AggregatedScore<S>> = aggregated_lines
        .iter()
        .map(|line| line.clone().into_score())
        .collect::<texturecrop::Result<_>>()?;
    let report = evaluate(
        &DatasetManifest { entries: evaluable },
        &aggregated,
        &args.cropper,
        &args.aggregation,
        args.threshold,
    )?;
    texturecrop::manifest::write_report(&args.work.join("report.json"), &report)?;

    WorkConfig {
        cropper: Some(args.cropper.clone()),
        max_side: Some(args.max_side),
        scorer: Some(args.scorer.to_string()),
        aggregation: Some(args.aggregation.to_string()),
        threshold: Some(args.threshold),
    }
    .store(&args.work)?;
    Ok((summary, report))
}

impl RunArgs {
    fn require_builtin_scorer(&self) -> Result<()> {
        if matches!(self.scorer, ScorerSpec::External) {
            bail!(
                "the run command needs a built-in scorer; for external detectors use \
                 `crop --export-crops`, run the detector, then `aggregate` and `evaluate`"
            );
        }
        Ok(())
    }
}

fn process_one_image(
    path: &Path,
    image_id: &str,
    scorer: &BuiltScorer<S>,
    args: &RunArgs,
) -> Result<(CropSet<S>, Vec<ScoreLine>, AggregatedLine)> {
    let img = load_image(path, args.max_side)?;
    let set = plan_crops(&img, image_id, &args.cropper);

    let crops: Vec<CropPixels<S>> = set
        .records
        .iter()
        .map(|rec| {
            let pixels = if scorer.needs_pixels() || args.export_crops {
                extract_for_scoring(&img, rec, args.cropper.method, args.cropper.window)?
            } else {
                placeholder_pixels()
            };
            Ok(CropPixels {
                crop_id: rec.crop_id.clone(),
                pixels,
            })
        })
        .collect::<Result<_>>()?;
    if args.export_crops {
        let export_dir = args.work.join("crops");
        for crop in &crops {
            crop.pixels
                .save_png(&export_dir.join(format!("{}.png", crop.crop_id)))?;
        }
    }

    let records = score_crops(scorer, &crops)?;
    validate_scores(&records, &set)?;
    let scores: Vec<S> = records.iter().map(|r| r.score).collect();
    let fused = aggregate(&scores, &args.aggregation)?;

    let score_lines = records.iter().map(ScoreLine::from_record).collect();
    let aggregated = AggregatedLine {
        image_id: image_id.to_string(),
        score: fused,
        n_crops: scores.len(),
        method: args.aggregation.to_string(),
    };
    Ok((set, score_lines, aggregated))
}

// ---------------------------------------------------------------------------
// ablate

#[derive(Debug, Clone)]
pub struct AblateArgs {
    pub base: RunArgs,
    pub strides: Vec<u32>,
    pub sd_thresholds: Vec<f64>,
    pub windows: Vec<u32>,
    pub counts: Vec<usize>,
    pub metrics: Vec<TextureMetricKind>,
    pub parts: Vec<SelectionPart>,
}

/// One evaluated grid point; `overall` is absent when the point failed.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AblationPoint {
    pub id: String,
    pub config: CropperConfig,
    pub aggregation: String,
    pub overall: Option<OverallMetrics>,
    pub report: Option<String>,
    pub error: Option<String>,
}

/// Grid results sorted by overall AUC, best first; failed points sort last
/// and ties keep grid-enumeration order.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AblationSummary {
    pub points: Vec<AblationPoint>,
}

/// Runs the full pipeline once per grid point under `<work>/grid/<id>/` and
/// writes the sorted summary to `<work>/ablation.json`. Point failures are
/// recorded and the run continues.
pub fn cmd_ablate(args: &AblateArgs) -> Result<AblationSummary> {
    std::fs::create_dir_all(&args.base.work)?;
    let grid = enumerate_grid(args);

    let mut points = Vec::with_capacity(grid.len());
    for (id, cropper) in grid {
        let work = args.base.work.join("grid").join(&id);
        let run_args = RunArgs {
            work: work.clone(),
            cropper: cropper.clone(),
            ..args.base.clone()
        };
        let point = match cmd_run(&run_args) {
            Ok((_, report)) => AblationPoint {
                id,
                config: cropper,
                aggregation: args.base.aggregation.to_string(),
                overall: Some(report.overall),
                report: Some(work.join("report.json").display().to_string()),
                error: None,
            },
            Err(err) => AblationPoint {
                id,
                config: cropper,
                aggregation: args.base.aggregation.to_string(),
                overall: None,
                report: None,
                error: Some(format!("{err:#}")),
            },
        };
        points.push(point);
    }

    points.sort_by(|a, b| match (&a.overall, &b.overall) {
        (Some(x), Some(y)) => y
            .auc
            .partial_cmp(&x.auc)
            .unwrap_or(std::cmp::Ordering::Equal),
        (Some(_), None) => std::cmp::Ordering::Less,
        (None, Some(_)) => std::cmp::Ordering::Greater,
        (None, None) => std::cmp::Ordering::Equal,
    });

    let summary = AblationSummary { points };
    let json = serde_json::to_string_pretty(&summary)?;
    std::fs::write(args.base.work.join("ablation.json"), json + "\n")?;
    Ok(summary)
}

/// Cartesian product over the provided grid dimensions; unspecified
/// dimensions stay at the base configuration. Point ids name only the
/// gridded parameters.
fn enumerate_grid(args: &AblateArgs) -> Vec<(String, CropperConfig)> {
    let base = &args.base.cropper;
    let strides = non_empty_or(&args.strides, base.stride);
    let taus = non_empty_or(&args.sd_thresholds, base.sd_threshold);
    let windows = non_empty_or(&args.windows, base.window);
    let counts = non_empty_or(&args.counts, base.count);
    let metrics = non_empty_or(&args.metrics, base.metric);
    let parts = non_empty_or(&args.parts, base.part);

    let mut grid = Vec::new();
    for &stride in &strides {
        for &tau in &taus {
            for &window in &windows {
                for &count in &counts {
                    for &metric in &metrics {
                        for &part in &parts {
                            let cropper = CropperConfig {
                                stride,
                                sd_threshold: tau,
                                window,
                                count,
                                metric,
                                part,
                                method: base.method,
                            };
                            let mut parts_id = Vec::new();
                            if !args.strides.is_empty() {
                                parts_id.push(format!("stride{stride}"));
                            }
                            if !args.sd_thresholds.is_empty() {
                                parts_id.push(format!("tau{tau}"));
                            }
                            if !args.windows.is_empty() {
                                parts_id.push(format!("window{window}"));
                            }
                            if !args.counts.is_empty() {
                                parts_id.push(format!("n{count}"));
                            }
                            if !args.metrics.is_empty() {
                                parts_id.push(format!("m-{metric}"));
                            }
                            if !args.parts.is_empty() {
                                parts_id.push(format!("p-{part}"));
                            }
                            let id = if parts_id.is_empty() {
                                "base".to_string()
                            } else {
                                parts_id.join("_")
                            };
                            grid.push((id, cropper));
                        }
                    }
                }
            }
        }
    }
    grid
}

fn non_empty_or<T: Copy>(values: &[T], fallback: T) -> Vec<T> {
    if values.is_empty() {
        vec![fallback]
    } else {
        values.to_vec()
    }
}

/// Render the ablation summary as an aligned text table.
pub fn render_ablation_table(summary: &AblationSummary) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "{:<40} {:>8} {:>8} {:>8}  {}\n",
        "grid point", "BA", "AP", "AUC", "status"
    ));
    for point in &summary.points {
        match &point.overall {
            Some(metrics) => out.push_str(&format!(
                "{:<40} {:>8.4} {:>8.4} {:>8.4}  ok\n",
                point.id, metrics.ba, metrics.ap, metrics.auc
            )),
            None => out.push_str(&format!(
                "{:<40} {:>8} {:>8} {:>8}  failed: {}\n",
                point.id,
                "-",
                "-",
                "-",
                point.error.as_deref().unwrap_or("unknown")
            )),
        }
    }
    out
}

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use texturecrop::{
    agg::AggregationMethod,
    crop::{CropMethod, CropperConfig, SelectionPart},
    manifest::render_report_table,
    score::ScorerSpec,
    texture::TextureMetricKind,
};
use texturecrop_cli::commands::{
    cmd_aggregate, cmd_crop, cmd_evaluate, cmd_run, cmd_score, render_ablation_table, AblateArgs,
    AggregateArgs, CmdSummary, CropArgs, EvaluateArgs, RunArgs, ScoreArgs,
};

/// Texture-based cropping, scoring, aggregation and evaluation for
/// synthetic-image detection.
#[derive(Parser)]
#[command(name = "texturecrop", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CropperFlags {
    /// Pre-processing method: texturecrop, slidecrop, fixedtexturecrop,
    /// centercrop, resize or tencrop.
    #[arg(long, default_value = "texturecrop")]
    method: CropMethod,
    /// Window side length in pixels.
    #[arg(long, default_value_t = 224)]
    window: u32,
    /// Step between window positions in pixels.
    #[arg(long, default_value_t = 200)]
    stride: u32,
    /// Grayscale SD a crop must strictly exceed to be retained.
    #[arg(long, default_value_t = 0.1)]
    sd_threshold: f64,
    /// Ranking metric for fixed selection: sd, entropy or autocorrelation.
    #[arg(long, default_value = "sd")]
    metric: TextureMetricKind,
    /// Distribution part for fixed selection: top, bottom or tbi.
    #[arg(long, default_value = "top")]
    part: SelectionPart,
    /// Number of crops kept by fixed selection.
    #[arg(long, default_value_t = 15)]
    n_crops: usize,
    /// Center crop any axis longer than this before cropping.
    #[arg(long, default_value_t = 2048)]
    max_side: u32,
}

impl CropperFlags {
    fn config(&self) -> CropperConfig {
        CropperConfig {
            method: self.method,
            window: self.window,
            stride: self.stride,
            sd_threshold: self.sd_threshold,
            metric: self.metric,
            part: self.part,
            count: self.n_crops,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Plan crops for every dataset image and write the crop manifest.
    Crop {
        /// Dataset manifest (CSV with a path,label,subset header, or JSONL).
        #[arg(long)]
        dataset: PathBuf,
        /// Work directory receiving the manifests.
        #[arg(long)]
        work: PathBuf,
        #[command(flatten)]
        cropper: CropperFlags,
        /// Write one PNG per crop into the crops/ subdirectory for external scorers.
        #[arg(long)]
        export_crops: bool,
        /// Worker threads; defaults to one per core.
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Score planned crops with a built-in scorer.
    Score {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long)]
        work: PathBuf,
        /// Scorer spec: constant:0.7, proxy:2.0 or sidecar:scores.jsonl.
        #[arg(long)]
        scorer: ScorerSpec,
        #[command(flatten)]
        cropper: CropperFlags,
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Fuse per-crop scores into one score per image.
    Aggregate {
        #[arg(long)]
        work: PathBuf,
        /// Fusion: average, majority-vote, max, median or weighted-average:0.1.
        #[arg(long, default_value = "average")]
        agg: AggregationMethod,
    },
    /// Compute BA/AP/AUC per subset and overall.
    Evaluate {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long)]
        work: PathBuf,
        /// Decision threshold for balanced accuracy.
        #[arg(long, default_value_t = 0.5)]
        threshold: f64,
        /// Report destination; defaults to report.json inside the work directory.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Crop, score, aggregate and evaluate in one pass.
    Run {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long)]
        work: PathBuf,
        #[arg(long)]
        scorer: ScorerSpec,
        #[command(flatten)]
        cropper: CropperFlags,
        #[arg(long, default_value = "average")]
        agg: AggregationMethod,
        #[arg(long, default_value_t = 0.5)]
        threshold: f64,
        #[arg(long)]
        export_crops: bool,
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Run a parameter grid and summarize the reports by AUC.
    Ablate {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long)]
        work: PathBuf,
        #[arg(long)]
        scorer: ScorerSpec,
        #[command(flatten)]
        cropper: CropperFlags,
        #[arg(long, default_value = "average")]
        agg: AggregationMethod,
        #[arg(long, default_value_t = 0.5)]
        threshold: f64,
        /// Comma-separated stride grid, e.g. 50,100,200,224,300.
        #[arg(long, value_delimiter = ',')]
        strides: Vec<u32>,
        /// Comma-separated SD-threshold grid, e.g. 0.05,0.1,0.15,0.2.
        #[arg(long, value_delimiter = ',')]
        sd_thresholds: Vec<f64>,
        /// Comma-separated window grid, e.g. 224,512,1024.
        #[arg(long, value_delimiter = ',')]
        windows: Vec<u32>,
        /// Comma-separated crop-count grid, e.g. 1,2,5,10,15.
        #[arg(long, value_delimiter = ',')]
        n_crops_grid: Vec<usize>,
        /// Comma-separated metric grid, e.g. sd,entropy,autocorrelation.
        #[arg(long, value_delimiter = ',')]
        metrics: Vec<TextureMetricKind>,
        /// Comma-separated part grid, e.g. top,bottom,tbi.
        #[arg(long, value_delimiter = ',')]
        parts: Vec<SelectionPart>,
        #[arg(long)]
        jobs: Option<usize>,
    },
}

fn summarize(command: &str, summary: &CmdSummary) -> ExitCode {
    for (item, reason) in &summary.failures {
        eprintln!("{command}: skipped {item}: {reason}");
    }
    if summary.ok() {
        eprintln!("{command}: {} items processed", summary.processed);
        ExitCode::SUCCESS
    } else {
        eprintln!(
            "{command}: {} items processed, {} failed",
            summary.processed,
            summary.failures.len()
        );
        ExitCode::FAILURE
    }
}

fn dispatch(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::Crop {
            dataset,
            work,
            cropper,
            export_crops,
            jobs,
        } => {
            let summary = cmd_crop(&CropArgs {
                dataset,
                work,
                cropper: cropper.config(),
                max_side: cropper.max_side,
                export_crops,
                jobs,
            })?;
            Ok(summarize("crop", &summary))
        }
        Command::Score {
            dataset,
            work,
            scorer,
            cropper,
            jobs,
        } => {
            let summary = cmd_score(&ScoreArgs {
                dataset,
                work,
                scorer,
                cropper: cropper.config(),
                max_side: cropper.max_side,
                jobs,
            })?;
            Ok(summarize("score", &summary))
        }
        Command::Aggregate { work, agg } => {
            let summary = cmd_aggregate(&AggregateArgs { work, method: agg })?;
            Ok(summarize("aggregate", &summary))
        }
        Command::Evaluate {
            dataset,
            work,
            threshold,
            report,
        } => {
            let report = cmd_evaluate(&EvaluateArgs {
                dataset,
                work,
                threshold,
                report,
            })?;
            print!("{}", render_report_table(&report));
            Ok(ExitCode::SUCCESS)
        }
        Command::Run {
            dataset,
            work,
            scorer,
            cropper,
            agg,
            threshold,
            export_crops,
            jobs,
        } => {
            let (summary, report) = cmd_run(&RunArgs {
                dataset,
                work,
                cropper: cropper.config(),
                max_side: cropper.max_side,
                scorer,
                aggregation: agg,
                threshold,
                export_crops,
                jobs,
            })?;
            print!("{}", render_report_table(&report));
            Ok(summarize("run", &summary))
        }
        Command::Ablate {
            dataset,
            work,
            scorer,
            cropper,
            agg,
            threshold,
            strides,
            sd_thresholds,
            windows,
            n_crops_grid,
            metrics,
            parts,
            jobs,
        } => {
            let summary = texturecrop_cli::commands::cmd_ablate(&AblateArgs {
                base: RunArgs {
                    dataset,
                    work,
                    cropper: cropper.config(),
                    max_side: cropper.max_side,
                    scorer,
                    aggregation: agg,
                    threshold,
                    export_crops: false,
                    jobs,
                },
                strides,
                sd_thresholds,
                windows,
                counts: n_crops_grid,
                metrics,
                parts,
            })?;
            print!("{}", render_ablation_table(&summary));
            let failed = summary.points.iter().filter(|p| p.error.is_some()).count();
            if failed > 0 {
                eprintln!("ablate: {failed} grid points failed");
                return Ok(ExitCode::FAILURE);
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

//! Texture-based cropping for synthetic-image detection pipelines.
//!
//! The crate covers the pre-processing side of a SID system: decoding images
//! into normalized pixel buffers, planning crops (texture-filtered sliding
//! windows, fixed-count selection and the center-crop / resize / ten-crop
//! baselines), scoring crops through pluggable scorers, fusing per-crop
//! scores and evaluating the result with balanced accuracy, average
//! precision and ROC AUC.
//!
//! Core types are generic over the [`Scalar`] floating-point type; the
//! `*F32` / `*F64` aliases pick a concrete precision.

pub mod agg;
pub mod crop;
pub mod error;
pub mod eval;
pub mod manifest;
pub mod pixel;
pub mod scalar;
pub mod score;
pub mod texture;

pub use agg::{aggregate, AggregatedScore, AggregationMethod};
pub use crop::{
    extract_for_scoring, extract_pixels, fixed_texture_crop, plan_crops, slide_crop, ten_crop,
    texture_crop, window_positions, CropMethod, CropRecord, CropSet, CropperConfig, SelectionPart,
};
pub use error::{Error, Result};
pub use eval::{
    auc, average_precision, balanced_accuracy, evaluate, DatasetManifest, EvalReport,
    LabeledScore, ManifestEntry, OverallMetrics, SubsetMetrics, REAL_POOL_SUBSET,
};
pub use pixel::{
    center_crop, clamp_oversize, decode_image, resize, to_grayscale, GrayImage, PixelImage, Rect,
    DEFAULT_MAX_SIDE, FALLBACK_CROP_SIDE,
};
pub use scalar::Scalar;
pub use score::{score_crops, validate_scores, BuiltScorer, CropPixels, ScoreRecord, ScorerSpec};
pub use texture::{autocorrelation, entropy, std_dev, MetricValue, TextureMetricKind};

pub type PixelImageF32 = PixelImage<f32>;
pub type PixelImageF64 = PixelImage<f64>;
pub type GrayImageF32 = GrayImage<f32>;
pub type GrayImageF64 = GrayImage<f64>;

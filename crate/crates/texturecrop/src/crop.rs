//! Crop planning: texture-filtered sliding windows, fixed-count selection and
//! the center-crop / resize / ten-crop baselines.
//!
//! All planners expect the image to have already passed through
//! [`crate::pixel::clamp_oversize`]; rectangles are expressed in the
//! coordinates of that clamped image.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pixel::{center_rect, resize, to_grayscale, GrayImage, PixelImage, Rect, FALLBACK_CROP_SIDE};
use crate::scalar::{from_f64, Scalar};
use crate::texture::{compute_metric, std_dev, MetricValue, TextureMetricKind};

/// Pre-processing method used to turn one image into scored crops.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CropMethod {
    TextureCrop,
    SlideCrop,
    FixedTextureCrop,
    CenterCrop,
    Resize,
    TenCrop,
}

impl std::fmt::Display for CropMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Self::TextureCrop => "texturecrop",
            Self::SlideCrop => "slidecrop",
            Self::FixedTextureCrop => "fixedtexturecrop",
            Self::CenterCrop => "centercrop",
            Self::Resize => "resize",
            Self::TenCrop => "tencrop",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for CropMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "texturecrop" | "texture" => Ok(Self::TextureCrop),
            "slidecrop" | "slide" => Ok(Self::SlideCrop),
            "fixedtexturecrop" | "fixed" => Ok(Self::FixedTextureCrop),
            "centercrop" | "center" => Ok(Self::CenterCrop),
            "resize" => Ok(Self::Resize),
            "tencrop" | "ten" => Ok(Self::TenCrop),
            other => Err(Error::InvalidConfig(format!(
                "unknown crop method {other:?}"
            ))),
        }
    }
}

/// Which part of the ranked metric distribution fixed selection draws from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SelectionPart {
    Top,
    Bottom,
    /// Top-bottom-intermediate: `ceil(n/3)` highest-ranked, `ceil(n/3)`
    /// lowest-ranked, the remainder centered on the median rank.
    Tbi,
}

impl std::fmt::Display for SelectionPart {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Self::Top => "top",
            Self::Bottom => "bottom",
            Self::Tbi => "tbi",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for SelectionPart {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "top" => Ok(Self::Top),
            "bottom" => Ok(Self::Bottom),
            "tbi" => Ok(Self::Tbi),
            other => Err(Error::InvalidConfig(format!(
                "unknown selection part {other:?}, expected top, bottom or tbi"
            ))),
        }
    }
}

/// Cropper parameters: window size, stride, SD threshold, ranking metric,
/// distribution part and fixed crop count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CropperConfig {
    pub method: CropMethod,
    /// Window side length in pixels.
    pub window: u32,
    /// Step between consecutive window positions in pixels.
    pub stride: u32,
    /// Minimum grayscale SD a crop must strictly exceed to be retained.
    pub sd_threshold: f64,
    /// Ranking metric for fixed selection (and recorded by the other methods).
    pub metric: TextureMetricKind,
    /// Distribution part for fixed selection.
    pub part: SelectionPart,
    /// Number of crops kept by fixed selection.
    pub count: usize,
}

impl Default for CropperConfig {
    fn default() -> Self {
        Self {
            method: CropMethod::TextureCrop,
            window: 224,
            stride: 200,
            sd_threshold: 0.1,
            metric: TextureMetricKind::Sd,
            part: SelectionPart::Top,
            count: 15,
        }
    }
}

impl CropperConfig {
    pub fn validate(&self) -> Result<()> {
        if self.window < 1 {
            return Err(Error::InvalidConfig("window must be at least 1".into()));
        }
        if self.stride < 1 {
            return Err(Error::InvalidConfig("stride must be at least 1".into()));
        }
        if self.sd_threshold < 0.0 || !self.sd_threshold.is_finite() {
            return Err(Error::InvalidConfig(
                "sd-threshold must be finite and non-negative".into(),
            ));
        }
        if self.count < 1 {
            return Err(Error::InvalidConfig("crop count must be at least 1".into()));
        }
        Ok(())
    }
}

/// One planned crop: geometry, texture statistic and bookkeeping flags.
#[derive(Debug, Clone, PartialEq)]
pub struct CropRecord<S> {
    pub image_id: String,
    pub crop_id: String,
    pub rect: Rect,
    pub metric: MetricValue<S>,
    /// Ten-crop only: pixels are mirrored horizontally at extraction time.
    pub flipped: bool,
    /// Set on the single default center crop emitted when no window passes
    /// the SD threshold.
    pub fallback: bool,
}

/// The per-image crop plan with candidate/retained bookkeeping.
#[derive(Debug, Clone, PartialEq)]
pub struct CropSet<S> {
    pub image_id: String,
    pub records: Vec<CropRecord<S>>,
    /// Number of sliding-window candidates considered (N_I).
    pub total_candidates: usize,
    /// Number of records actually kept (n_I <= N_I).
    pub retained: usize,
}

impl<S> CropSet<S> {
    fn new(image_id: &str, records: Vec<CropRecord<S>>, total_candidates: usize) -> Self {
        let retained = records.len();
        let mut set = Self {
            image_id: image_id.to_string(),
            records,
            total_candidates,
            retained,
        };
        set.assign_crop_ids();
        set
    }

    /// Assigns `<image_id>_<x>_<y>[_f]` ids in record order, suffixing an
    /// ordinal when geometric positions coincide (degenerate ten-crop).
    fn assign_crop_ids(&mut self) {
        let mut seen: HashMap<String, usize> = HashMap::new();
        for rec in &mut self.records {
            let base = format!(
                "{}_{}_{}{}",
                rec.image_id,
                rec.rect.x,
                rec.rect.y,
                if rec.flipped { "_f" } else { "" }
            );
            let count = seen.entry(base.clone()).or_insert(0);
            *count += 1;
            rec.crop_id = if *count == 1 {
                base
            } else {
                format!("{base}_{count}")
            };
        }
    }
}

/// Window offsets along one axis: `{0, stride, 2*stride, ...}` while the
/// window fits, plus a final offset flush with the edge when the remainder is
/// not a stride multiple. An axis shorter than the window yields offset 0
/// with the window clamped to the extent.
pub fn window_positions(extent: u32, window: u32, stride: u32) -> Vec<u32> {
    debug_assert!(extent >= 1 && window >= 1 && stride >= 1);
    if extent <= window {
        return vec![0];
    }
    let mut offsets = Vec::new();
    let mut off = 0u64;
    while off + window as u64 <= extent as u64 {
        offsets.push(off as u32);
        off += stride as u64;
    }
    let flush = extent - window;
    if *offsets.last().expect("offset 0 always fits") != flush {
        offsets.push(flush);
    }
    offsets
}

/// All sliding-window candidates in `(y, x)` order, with `kind` computed on
/// each window's grayscale pixels. Returns the records plus the candidate
/// count.
fn slide_candidates<S: Scalar>(
    gray: &GrayImage<S>,
    image_id: &str,
    cfg: &CropperConfig,
    kind: TextureMetricKind,
) -> (Vec<CropRecord<S>>, usize) {
    let xs = window_positions(gray.width(), cfg.window, cfg.stride);
    let ys = window_positions(gray.height(), cfg.window, cfg.stride);
    let crop_w = cfg.window.min(gray.width());
    let crop_h = cfg.window.min(gray.height());

    let mut records = Vec::with_capacity(xs.len() * ys.len());
    for &y in &ys {
        for &x in &xs {
            let rect = Rect::new(x, y, crop_w, crop_h);
            let window = gray.window(rect).expect("window fits by construction");
            records.push(CropRecord {
                image_id: image_id.to_string(),
                crop_id: String::new(),
                rect,
                metric: compute_metric(kind, &window),
                flipped: false,
                fallback: false,
            });
        }
    }
    let total = records.len();
    (records, total)
}

/// Sliding-window cropping without texture filtering: every candidate is
/// retained, with the configured metric computed and recorded.
pub fn slide_crop<S: Scalar>(
    img: &PixelImage<S>,
    image_id: &str,
    cfg: &CropperConfig,
) -> CropSet<S> {
    let gray = to_grayscale(img);
    let (records, total) = slide_candidates(&gray, image_id, cfg, cfg.metric);
    CropSet::new(image_id, records, total)
}

/// Texture-filtered sliding-window cropping: keeps candidates whose grayscale
/// SD strictly exceeds the threshold. When nothing survives, a single 224x224
/// default center crop (clamped to the image) is returned with
/// `fallback = true`.
pub fn texture_crop<S: Scalar>(
    img: &PixelImage<S>,
    image_id: &str,
    cfg: &CropperConfig,
) -> CropSet<S> {
    let gray = to_grayscale(img);
    let (candidates, total) = slide_candidates(&gray, image_id, cfg, TextureMetricKind::Sd);
    let tau: S = from_f64(cfg.sd_threshold);
    let retained: Vec<_> = candidates
        .into_iter()
        .filter(|rec| rec.metric.value > tau)
        .collect();
    if !retained.is_empty() {
        return CropSet::new(image_id, retained, total);
    }

    let rect = center_rect(
        gray.width(),
        gray.height(),
        FALLBACK_CROP_SIDE,
        FALLBACK_CROP_SIDE,
    );
    let window = gray.window(rect).expect("centered rect fits");
    let fallback = CropRecord {
        image_id: image_id.to_string(),
        crop_id: String::new(),
        rect,
        metric: std_dev(&window),
        flipped: false,
        fallback: true,
    };
    CropSet::new(image_id, vec![fallback], total)
}

/// Ranked index selection for the top-bottom-intermediate part: `ceil(k/3)`
/// from the top, `ceil(k/3)` from the bottom (capped so slices sum to `k`),
/// and the remainder centered on the median rank.
fn tbi_indices(total: usize, k: usize) -> Vec<usize> {
    debug_assert!(k <= total && k >= 1);
    let top = k.div_ceil(3).min(k);
    let bottom = k.div_ceil(3).min(k - top);
    let middle = k - top - bottom;

    let mut indices: Vec<usize> = (0..top).collect();
    if middle > 0 {
        let median = (total - 1) / 2;
        let lo = top;
        let hi = total - bottom - middle;
        let start = median.saturating_sub((middle - 1) / 2).clamp(lo, hi);
        indices.extend(start..start + middle);
    }
    indices.extend(total - bottom..total);
    indices.dedup();
    indices
}

/// Fixed-count selection: ranks every sliding-window candidate by the
/// configured metric (descending, `(y, x)` ties stable) and keeps
/// `min(count, N_I)` crops from the requested distribution part. Records are
/// returned in rank order.
pub fn fixed_texture_crop<S: Scalar>(
    img: &PixelImage<S>,
    image_id: &str,
    cfg: &CropperConfig,
) -> CropSet<S> {
    let gray = to_grayscale(img);
    let (mut ranked, total) = slide_candidates(&gray, image_id, cfg, cfg.metric);
    // Candidates arrive in (y, x) order; a stable descending sort therefore
    // breaks metric ties by (y, x).
    ranked.sort_by(|a, b| {
        b.metric
            .value
            .partial_cmp(&a.metric.value)
            .expect("texture metrics are finite")
    });

    let k = cfg.count.min(total);
    let selected: Vec<CropRecord<S>> = match cfg.part {
        SelectionPart::Top => ranked.into_iter().take(k).collect(),
        SelectionPart::Bottom => ranked.into_iter().skip(total - k).collect(),
        SelectionPart::Tbi => {
            let indices = tbi_indices(total, k);
            let mut by_index: Vec<Option<CropRecord<S>>> = ranked.into_iter().map(Some).collect();
            indices
                .into_iter()
                .filter_map(|i| by_index[i].take())
                .collect()
        }
    };
    CropSet::new(image_id, selected, total)
}

/// The ten-crop baseline: four corners plus the center, and the same five
/// with `flipped = true`. The window is clamped to the image per axis.
pub fn ten_crop<S: Scalar>(img: &PixelImage<S>, image_id: &str, window: u32) -> CropSet<S> {
    let gray = to_grayscale(img);
    let w = img.width();
    let h = img.height();
    let cw = window.min(w);
    let ch = window.min(h);
    let corners = [
        (0, 0),
        (w - cw, 0),
        (0, h - ch),
        (w - cw, h - ch),
        ((w - cw) / 2, (h - ch) / 2),
    ];

    let mut records = Vec::with_capacity(10);
    for flipped in [false, true] {
        for &(x, y) in &corners {
            let rect = Rect::new(x, y, cw, ch);
            let window = gray.window(rect).expect("corner rect fits");
            records.push(CropRecord {
                image_id: image_id.to_string(),
                crop_id: String::new(),
                rect,
                // Flip-invariant statistics: the mirrored twin reuses the
                // unflipped window's value.
                metric: std_dev(&window),
                flipped,
                fallback: false,
            });
        }
    }
    records.sort_by_key(|rec| (rec.rect.y, rec.rect.x, rec.flipped));
    CropSet::new(image_id, records, 10)
}

/// The center-crop baseline: one centered `window` x `window` crop.
pub fn center_crop_plan<S: Scalar>(
    img: &PixelImage<S>,
    image_id: &str,
    cfg: &CropperConfig,
) -> CropSet<S> {
    let gray = to_grayscale(img);
    let rect = center_rect(img.width(), img.height(), cfg.window, cfg.window);
    let window = gray.window(rect).expect("centered rect fits");
    let record = CropRecord {
        image_id: image_id.to_string(),
        crop_id: String::new(),
        rect,
        metric: compute_metric(cfg.metric, &window),
        flipped: false,
        fallback: false,
    };
    CropSet::new(image_id, vec![record], 1)
}

/// The resize baseline: one record covering the whole image; scoring pixels
/// are produced by resizing to `window` x `window`, and the recorded metric
/// is computed on those resized pixels.
pub fn resize_plan<S: Scalar>(
    img: &PixelImage<S>,
    image_id: &str,
    cfg: &CropperConfig,
) -> CropSet<S> {
    let resized = resize(img, cfg.window, cfg.window);
    let gray = to_grayscale(&resized);
    let record = CropRecord {
        image_id: image_id.to_string(),
        crop_id: String::new(),
        rect: Rect::new(0, 0, img.width(), img.height()),
        metric: compute_metric(cfg.metric, &gray),
        flipped: false,
        fallback: false,
    };
    CropSet::new(image_id, vec![record], 1)
}

/// Dispatches to the planner selected by `cfg.method`.
pub fn plan_crops<S: Scalar>(
    img: &PixelImage<S>,
    image_id: &str,
    cfg: &CropperConfig,
) -> CropSet<S> {
    match cfg.method {
        CropMethod::TextureCrop => texture_crop(img, image_id, cfg),
        CropMethod::SlideCrop => slide_crop(img, image_id, cfg),
        CropMethod::FixedTextureCrop => fixed_texture_crop(img, image_id, cfg),
        CropMethod::CenterCrop => center_crop_plan(img, image_id, cfg),
        CropMethod::Resize => resize_plan(img, image_id, cfg),
        CropMethod::TenCrop => ten_crop(img, image_id, cfg.window),
    }
}

/// Copies the sub-image for a record, mirroring horizontally when the record
/// is flagged as flipped.
pub fn extract_pixels<S: Scalar>(img: &PixelImage<S>, rec: &CropRecord<S>) -> Result<PixelImage<S>> {
    let cropped = img.crop(rec.rect)?;
    Ok(if rec.flipped {
        cropped.flip_horizontal()
    } else {
        cropped
    })
}

/// Pixels as the detector sees them: the resize baseline scales the whole
/// image to `window` x `window`, every other method extracts the rect.
pub fn extract_for_scoring<S: Scalar>(
    img: &PixelImage<S>,
    rec: &CropRecord<S>,
    method: CropMethod,
    window: u32,
) -> Result<PixelImage<S>> {
    match method {
        CropMethod::Resize => Ok(resize(img, window, window)),
        _ => extract_pixels(img, rec),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(window: u32, stride: u32) -> CropperConfig {
        CropperConfig {
            window,
            stride,
            ..CropperConfig::default()
        }
    }

    fn noise_image(width: u32, height: u32) -> PixelImage<f64> {
        // Deterministic unit-range "noise" with high per-window SD.
        PixelImage::from_fn(width, height, 1, |x, y, _| {
            let v = (x as u64).wrapping_mul(2654435761).wrapping_add((y as u64) * 97);
            (v % 251) as f64 / 250.0
        })
        .unwrap()
    }

    #[test]
    fn window_positions_exact_fit() {
        assert_eq!(window_positions(1024, 224, 200), vec![0, 200, 400, 600, 800]);
    }

    #[test]
    fn window_positions_appends_flush_offset() {
        assert_eq!(window_positions(1000, 224, 200), vec![0, 200, 400, 600, 776]);
    }

    #[test]
    fn window_positions_undersized_axis() {
        assert_eq!(window_positions(100, 224, 200), vec![0]);
    }

    #[test]
    fn slide_crop_grid_counts() {
        let img = noise_image(256, 256);
        let set = slide_crop(&img, "img", &cfg(64, 64));
        assert_eq!(set.records.len(), 16);
        assert_eq!(set.total_candidates, 16);
        assert_eq!(set.retained, 16);
    }

    #[test]
    fn slide_crop_single_position() {
        let img = noise_image(224, 224);
        let set = slide_crop(&img, "img", &cfg(224, 200));
        assert_eq!(set.records.len(), 1);
        assert_eq!(set.records[0].rect, Rect::new(0, 0, 224, 224));
        assert_eq!(set.records[0].crop_id, "img_0_0");
    }

    #[test]
    fn slide_crop_clamped_axis_counts() {
        let img = noise_image(250, 256);
        // x positions {0, 64, 128, 186}:flush offset appended.
        let set = slide_crop(&img, "img", &cfg(64, 64));
        assert_eq!(set.records.len(), 16);
        let xs: Vec<u32> = set.records.iter().take(4).map(|r| r.rect.x).collect();
        assert_eq!(xs, vec![0, 64, 128, 186]);
    }

    #[test]
    fn slide_crop_orders_by_y_then_x() {
        let img = noise_image(256, 256);
        let set = slide_crop(&img, "img", &cfg(64, 64));
        let mut sorted = set.records.clone();
        sorted.sort_by_key(|r| (r.rect.y, r.rect.x));
        assert_eq!(set.records, sorted);
    }

    #[test]
    fn texture_crop_constant_image_falls_back_to_center() {
        let img = PixelImage::<f64>::from_fn(512, 512, 1, |_, _, _| 0.5).unwrap();
        let set = texture_crop(&img, "flat", &cfg(224, 200));
        assert_eq!(set.records.len(), 1);
        let rec = &set.records[0];
        assert!(rec.fallback);
        assert_eq!(rec.rect, Rect::new(144, 144, 224, 224));
        assert_eq!(rec.metric.value, 0.0);
        assert!(set.total_candidates > 1);
    }

    #[test]
    fn texture_crop_fallback_clamps_to_small_images() {
        let img = PixelImage::<f64>::from_fn(100, 80, 1, |_, _, _| 0.5).unwrap();
        let set = texture_crop(&img, "flat", &cfg(64, 64));
        assert_eq!(set.records[0].rect, Rect::new(0, 0, 100, 80));
    }

    #[test]
    fn texture_crop_is_subset_of_slide_crop() {
        // Left half constant, right half noisy.
        let noise = noise_image(256, 256);
        let img = PixelImage::<f64>::from_fn(256, 256, 1, |x, y, _| {
            if x < 128 {
                0.5
            } else {
                noise.get(x, y, 0)
            }
        })
        .unwrap();
        let config = cfg(64, 64);
        let slide = slide_crop(&img, "img", &config);
        let texture = texture_crop(&img, "img", &config);

        assert!(texture.records.len() < slide.records.len());
        assert!(!texture.records.is_empty());
        let slide_rects: Vec<Rect> = slide.records.iter().map(|r| r.rect).collect();
        for rec in &texture.records {
            assert!(slide_rects.contains(&rec.rect));
            assert!(rec.metric.value > config.sd_threshold);
            assert!(rec.rect.x + rec.rect.w > 128, "flat-half crop retained");
        }
        assert_eq!(texture.total_candidates, slide.records.len());
    }

    #[test]
    fn fixed_top_selects_ranked_candidates() {
        // Three candidates along x with SDs ~ [0.30, 0.05, 0.20]: n=2 keeps
        // the 1st and 3rd windows.
        let img = PixelImage::<f64>::from_fn(12, 4, 1, |x, y, _| {
            let window = x / 4;
            let i = (y * 4 + x % 4) % 16;
            let amp = match window {
                0 => 0.6,
                1 => 0.1,
                _ => 0.4,
            };
            0.5 + if i % 2 == 0 { amp / 2.0 } else { -amp / 2.0 }
        })
        .unwrap();
        let config = CropperConfig {
            window: 4,
            stride: 4,
            count: 2,
            method: CropMethod::FixedTextureCrop,
            ..CropperConfig::default()
        };
        let set = fixed_texture_crop(&img, "img", &config);
        assert_eq!(set.records.len(), 2);
        assert_eq!(set.records[0].rect.x, 0);
        assert_eq!(set.records[1].rect.x, 8);
        assert_eq!(set.total_candidates, 3);
    }

    #[test]
    fn fixed_selection_saturates_when_n_exceeds_candidates() {
        let img = noise_image(128, 128);
        let config = CropperConfig {
            window: 64,
            stride: 64,
            count: 100,
            ..CropperConfig::default()
        };
        for part in [SelectionPart::Top, SelectionPart::Bottom, SelectionPart::Tbi] {
            let set = fixed_texture_crop(&img, "img", &CropperConfig { part, ..config.clone() });
            assert_eq!(set.records.len(), 4);
            // Saturated selection is the full candidate list in rank order.
            let mut values: Vec<f64> = set.records.iter().map(|r| r.metric.value).collect();
            let mut sorted = values.clone();
            sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
            assert_eq!(values, sorted);
            values.dedup();
            assert_eq!(values.len(), 4, "test image must not produce ties");
        }
    }

    #[test]
    fn tbi_picks_top_median_bottom() {
        assert_eq!(tbi_indices(9, 3), vec![0, 4, 8]);
    }

    #[test]
    fn tbi_sizes_sum_to_k() {
        for total in 1..=20 {
            for k in 1..=total {
                let indices = tbi_indices(total, k);
                assert_eq!(indices.len(), k, "total={total} k={k}");
                assert!(indices.windows(2).all(|w| w[0] < w[1]));
                assert!(indices.iter().all(|&i| i < total));
            }
        }
    }

    #[test]
    fn ten_crop_corner_geometry() {
        let img = noise_image(1024, 1024);
        let set = ten_crop(&img, "img", 224);
        assert_eq!(set.records.len(), 10);
        let rects: Vec<(u32, u32)> = set
            .records
            .iter()
            .filter(|r| !r.flipped)
            .map(|r| (r.rect.x, r.rect.y))
            .collect();
        assert_eq!(rects, vec![(0, 0), (800, 0), (400, 400), (0, 800), (800, 800)]);
        assert_eq!(set.records.iter().filter(|r| r.flipped).count(), 5);
    }

    #[test]
    fn ten_crop_degenerate_geometry_still_emits_ten() {
        let img = noise_image(224, 224);
        let set = ten_crop(&img, "img", 224);
        assert_eq!(set.records.len(), 10);
        assert!(set.records.iter().all(|r| r.rect == Rect::new(0, 0, 224, 224)));
        // Ids stay unique even though every rect coincides.
        let mut ids: Vec<&str> = set.records.iter().map(|r| r.crop_id.as_str()).collect();
        ids.sort_unstable();
        ids.dedup();
        assert_eq!(ids.len(), 10);
    }

    #[test]
    fn ten_crop_flipped_pixels_mirror_their_twin() {
        let img = noise_image(64, 64);
        let set = ten_crop(&img, "img", 32);
        let unflipped = set.records.iter().find(|r| !r.flipped).unwrap();
        let flipped = set
            .records
            .iter()
            .find(|r| r.flipped && r.rect == unflipped.rect)
            .unwrap();
        let plain = extract_pixels(&img, unflipped).unwrap();
        let mirrored = extract_pixels(&img, flipped).unwrap();
        assert_eq!(mirrored, plain.flip_horizontal());
        assert_eq!(flipped.metric.value, unflipped.metric.value);
    }

    #[test]
    fn extract_pixels_full_image_is_identity() {
        let img = noise_image(8, 6);
        let rec = CropRecord {
            image_id: "img".into(),
            crop_id: "img_0_0".into(),
            rect: Rect::new(0, 0, 8, 6),
            metric: std_dev(&to_grayscale(&img)),
            flipped: false,
            fallback: false,
        };
        assert_eq!(extract_pixels(&img, &rec).unwrap(), img);
    }

    #[test]
    fn extract_pixels_interior_rect() {
        let img = PixelImage::<f64>::from_fn(4, 4, 1, |x, y, _| (y * 4 + x) as f64 / 16.0).unwrap();
        let rec = CropRecord {
            image_id: "img".into(),
            crop_id: "img_1_1".into(),
            rect: Rect::new(1, 1, 2, 2),
            metric: MetricValue {
                kind: TextureMetricKind::Sd,
                value: 0.0,
            },
            flipped: false,
            fallback: false,
        };
        let out = extract_pixels(&img, &rec).unwrap();
        assert_eq!(out.data(), &[5.0 / 16.0, 6.0 / 16.0, 9.0 / 16.0, 10.0 / 16.0]);
    }

    #[test]
    fn extract_pixels_out_of_bounds_errors() {
        let img = noise_image(8, 8);
        let rec = CropRecord {
            image_id: "img".into(),
            crop_id: "bad".into(),
            rect: Rect::new(4, 4, 8, 8),
            metric: MetricValue {
                kind: TextureMetricKind::Sd,
                value: 0.0,
            },
            flipped: false,
            fallback: false,
        };
        assert!(matches!(
            extract_pixels(&img, &rec),
            Err(Error::OutOfBounds { .. })
        ));
    }

    #[test]
    fn resize_plan_scores_resized_pixels() {
        let img = noise_image(100, 60);
        let config = cfg(32, 32);
        let set = resize_plan(&img, "img", &CropperConfig {
            method: CropMethod::Resize,
            ..config
        });
        assert_eq!(set.records.len(), 1);
        assert_eq!(set.records[0].rect, Rect::new(0, 0, 100, 60));
        let scored = extract_for_scoring(&img, &set.records[0], CropMethod::Resize, 32).unwrap();
        assert_eq!((scored.width(), scored.height()), (32, 32));
        let expected = std_dev(&to_grayscale(&scored)).value;
        assert_eq!(set.records[0].metric.value, expected);
    }

    #[test]
    fn center_crop_plan_geometry() {
        let img = noise_image(300, 300);
        let set = center_crop_plan(&img, "img", &cfg(224, 200));
        assert_eq!(set.records[0].rect, Rect::new(38, 38, 224, 224));
    }
}

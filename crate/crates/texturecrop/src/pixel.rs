//! Decoded raster images, grayscale conversion, center cropping, resizing
//! and the oversize pre-clamp.
//!
//! Intensities are normalized to `[0, 1]` at decode time (8-bit samples are
//! divided by 255, 16-bit by 65535) and alpha channels are dropped.

use image::codecs::png::PngEncoder;
use image::{DynamicImage, ExtendedColorType, ImageEncoder};

use crate::error::{Error, Result};
use crate::scalar::{from_f64, to_f64, Scalar};

/// Default side limit applied before cropping; larger images are center
/// cropped down to at most this size per axis.
pub const DEFAULT_MAX_SIDE: u32 = 2048;

/// Side length of the fallback center crop emitted when no window passes the
/// texture threshold.
pub const FALLBACK_CROP_SIDE: u32 = 224;

/// A decoded raster image with channel-interleaved, row-major intensities in
/// `[0, 1]`. Either 1 (luma) or 3 (RGB) channels.
#[derive(Debug, Clone, PartialEq)]
pub struct PixelImage<S> {
    width: u32,
    height: u32,
    channels: u8,
    data: Vec<S>,
}

/// A single-channel luma image with row-major intensities in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GrayImage<S> {
    width: u32,
    height: u32,
    data: Vec<S>,
}

/// Axis-aligned rectangle in pixel coordinates, `(x, y)` is the top-left.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub struct Rect {
    pub x: u32,
    pub y: u32,
    pub w: u32,
    pub h: u32,
}

impl Rect {
    pub fn new(x: u32, y: u32, w: u32, h: u32) -> Self {
        Self { x, y, w, h }
    }

    /// Whether the rectangle lies fully inside a `width`x`height` image.
    pub fn fits_within(&self, width: u32, height: u32) -> bool {
        self.w >= 1
            && self.h >= 1
            && self.x as u64 + self.w as u64 <= width as u64
            && self.y as u64 + self.h as u64 <= height as u64
    }
}

impl<S: Scalar> PixelImage<S> {
    /// Builds an image from raw interleaved data, validating the invariants:
    /// positive dimensions, 1 or 3 channels, `width * height * channels`
    /// samples, every sample in `[0, 1]`.
    pub fn new(width: u32, height: u32, channels: u8, data: Vec<S>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidImage(format!(
                "dimensions must be at least 1x1, got {width}x{height}"
            )));
        }
        if channels != 1 && channels != 3 {
            return Err(Error::UnsupportedChannels(channels));
        }
        let expected = width as usize * height as usize * channels as usize;
        if data.len() != expected {
            return Err(Error::InvalidImage(format!(
                "expected {expected} samples, got {}",
                data.len()
            )));
        }
        if !data.iter().all(|v| *v >= S::zero() && *v <= S::one()) {
            return Err(Error::InvalidImage(
                "intensities must lie in [0,1]".to_string(),
            ));
        }
        Ok(Self {
            width,
            height,
            channels,
            data,
        })
    }

    /// Builds an image by evaluating `f(x, y, channel)` at every sample.
    pub fn from_fn(
        width: u32,
        height: u32,
        channels: u8,
        f: impl Fn(u32, u32, u8) -> f64,
    ) -> Result<Self> {
        let mut data = Vec::with_capacity(width as usize * height as usize * channels as usize);
        for y in 0..height {
            for x in 0..width {
                for c in 0..channels {
                    data.push(from_f64(f(x, y, c)));
                }
            }
        }
        Self::new(width, height, channels, data)
    }

    fn from_raw(width: u32, height: u32, channels: u8, data: Vec<S>) -> Self {
        debug_assert_eq!(
            data.len(),
            width as usize * height as usize * channels as usize
        );
        Self {
            width,
            height,
            channels,
            data,
        }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn channels(&self) -> u8 {
        self.channels
    }

    pub fn data(&self) -> &[S] {
        &self.data
    }

    /// Sample at `(x, y)` for `channel`.
    pub fn get(&self, x: u32, y: u32, channel: u8) -> S {
        debug_assert!(x < self.width && y < self.height && channel < self.channels);
        let idx = (y as usize * self.width as usize + x as usize) * self.channels as usize
            + channel as usize;
        self.data[idx]
    }

    /// Copies the sub-image covered by `rect`.
    pub fn crop(&self, rect: Rect) -> Result<Self> {
        if !rect.fits_within(self.width, self.height) {
            return Err(Error::OutOfBounds {
                x: rect.x,
                y: rect.y,
                w: rect.w,
                h: rect.h,
                width: self.width,
                height: self.height,
            });
        }
        let c = self.channels as usize;
        let mut data = Vec::with_capacity(rect.w as usize * rect.h as usize * c);
        for y in rect.y..rect.y + rect.h {
            let row = (y as usize * self.width as usize + rect.x as usize) * c;
            data.extend_from_slice(&self.data[row..row + rect.w as usize * c]);
        }
        Ok(Self::from_raw(rect.w, rect.h, self.channels, data))
    }

    /// Returns a horizontally mirrored copy.
    pub fn flip_horizontal(&self) -> Self {
        let c = self.channels as usize;
        let mut data = Vec::with_capacity(self.data.len());
        for y in 0..self.height as usize {
            let row = y * self.width as usize * c;
            for x in (0..self.width as usize).rev() {
                let px = row + x * c;
                data.extend_from_slice(&self.data[px..px + c]);
            }
        }
        Self::from_raw(self.width, self.height, self.channels, data)
    }

    /// Encodes the image as an 8-bit PNG (luma for 1 channel, RGB for 3).
    pub fn encode_png(&self) -> Result<Vec<u8>> {
        let bytes: Vec<u8> = self
            .data
            .iter()
            .map(|v| (to_f64(*v) * 255.0).round().clamp(0.0, 255.0) as u8)
            .collect();
        let color = match self.channels {
            1 => ExtendedColorType::L8,
            _ => ExtendedColorType::Rgb8,
        };
        let mut out = Vec::new();
        PngEncoder::new(&mut out).write_image(&bytes, self.width, self.height, color)?;
        Ok(out)
    }

    /// Writes the image to `path` as an 8-bit PNG.
    pub fn save_png(&self, path: &std::path::Path) -> Result<()> {
        let bytes = self.encode_png()?;
        std::fs::write(path, bytes)?;
        Ok(())
    }
}

impl<S: Scalar> GrayImage<S> {
    pub fn new(width: u32, height: u32, data: Vec<S>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidImage(format!(
                "dimensions must be at least 1x1, got {width}x{height}"
            )));
        }
        if data.len() != width as usize * height as usize {
            return Err(Error::InvalidImage(format!(
                "expected {} samples, got {}",
                width as usize * height as usize,
                data.len()
            )));
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub(crate) fn from_raw(width: u32, height: u32, data: Vec<S>) -> Self {
        debug_assert_eq!(data.len(), width as usize * height as usize);
        Self {
            width,
            height,
            data,
        }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn data(&self) -> &[S] {
        &self.data
    }

    pub fn get(&self, x: u32, y: u32) -> S {
        debug_assert!(x < self.width && y < self.height);
        self.data[y as usize * self.width as usize + x as usize]
    }

    /// Copies the sub-window covered by `rect`.
    pub fn window(&self, rect: Rect) -> Result<Self> {
        if !rect.fits_within(self.width, self.height) {
            return Err(Error::OutOfBounds {
                x: rect.x,
                y: rect.y,
                w: rect.w,
                h: rect.h,
                width: self.width,
                height: self.height,
            });
        }
        let mut data = Vec::with_capacity(rect.w as usize * rect.h as usize);
        for y in rect.y..rect.y + rect.h {
            let row = y as usize * self.width as usize + rect.x as usize;
            data.extend_from_slice(&self.data[row..row + rect.w as usize]);
        }
        Ok(Self::from_raw(rect.w, rect.h, data))
    }
}

/// Decodes a PNG/JPEG/TIFF payload into normalized intensities.
///
/// 8-bit samples map to `[0, 1]` by dividing by 255, 16-bit by 65535; alpha
/// channels are dropped.
pub fn decode_image<S: Scalar>(bytes: &[u8]) -> Result<PixelImage<S>> {
    let dynamic = image::load_from_memory(bytes)?;
    let width = dynamic.width();
    let height = dynamic.height();

    fn scale8<S: Scalar>(v: u8) -> S {
        from_f64(v as f64 / 255.0)
    }
    fn scale16<S: Scalar>(v: u16) -> S {
        from_f64(v as f64 / 65535.0)
    }

    let (channels, data): (u8, Vec<S>) = match dynamic {
        DynamicImage::ImageLuma8(buf) => (1, buf.into_raw().iter().map(|v| scale8(*v)).collect()),
        DynamicImage::ImageLumaA8(buf) => (
            1,
            buf.into_raw().chunks(2).map(|px| scale8(px[0])).collect(),
        ),
        DynamicImage::ImageRgb8(buf) => (3, buf.into_raw().iter().map(|v| scale8(*v)).collect()),
        DynamicImage::ImageRgba8(buf) => (
            3,
            buf.into_raw()
                .chunks(4)
                .flat_map(|px| px[..3].iter().map(|v| scale8(*v)))
                .collect(),
        ),
        DynamicImage::ImageLuma16(buf) => (1, buf.into_raw().iter().map(|v| scale16(*v)).collect()),
        DynamicImage::ImageLumaA16(buf) => (
            1,
            buf.into_raw().chunks(2).map(|px| scale16(px[0])).collect(),
        ),
        DynamicImage::ImageRgb16(buf) => (3, buf.into_raw().iter().map(|v| scale16(*v)).collect()),
        DynamicImage::ImageRgba16(buf) => (
            3,
            buf.into_raw()
                .chunks(4)
                .flat_map(|px| px[..3].iter().map(|v| scale16(*v)))
                .collect(),
        ),
        other => (
            3,
            other.to_rgb8().into_raw().iter().map(|v| scale8(*v)).collect(),
        ),
    };
    PixelImage::new(width, height, channels, data)
}

/// Converts to luma. Single-channel images are copied unchanged; RGB uses the
/// BT.601 weights `0.299 R + 0.587 G + 0.114 B`, clamped back into `[0, 1]`.
pub fn to_grayscale<S: Scalar>(img: &PixelImage<S>) -> GrayImage<S> {
    if img.channels == 1 {
        return GrayImage::from_raw(img.width, img.height, img.data.clone());
    }
    let wr: S = from_f64(0.299);
    let wg: S = from_f64(0.587);
    let wb: S = from_f64(0.114);
    let data = img
        .data
        .chunks(3)
        .map(|px| {
            let luma = px[0] * wr + px[1] * wg + px[2] * wb;
            luma.max(S::zero()).min(S::one())
        })
        .collect();
    GrayImage::from_raw(img.width, img.height, data)
}

/// Centered crop rectangle for a `target_w` x `target_h` window inside a
/// `width` x `height` image. Oversize targets are clamped to the image and
/// odd remainders floor the offset (bias toward top-left).
pub fn center_rect(width: u32, height: u32, target_w: u32, target_h: u32) -> Rect {
    let w = target_w.min(width);
    let h = target_h.min(height);
    Rect::new((width - w) / 2, (height - h) / 2, w, h)
}

/// Extracts the centered `target_w` x `target_h` region; target dimensions
/// exceeding the image are clamped to the image dimension.
pub fn center_crop<S: Scalar>(img: &PixelImage<S>, target_w: u32, target_h: u32) -> PixelImage<S> {
    let rect = center_rect(img.width, img.height, target_w.max(1), target_h.max(1));
    img.crop(rect).expect("centered rect fits by construction")
}

/// Bilinear resize with pixel-center alignment; output intensities are
/// clamped to `[0, 1]`. Resizing to the source dimensions copies exactly.
pub fn resize<S: Scalar>(img: &PixelImage<S>, out_w: u32, out_h: u32) -> PixelImage<S> {
    let out_w = out_w.max(1);
    let out_h = out_h.max(1);
    if out_w == img.width && out_h == img.height {
        return img.clone();
    }
    let sx = img.width as f64 / out_w as f64;
    let sy = img.height as f64 / out_h as f64;
    let c = img.channels as usize;
    let mut data = Vec::with_capacity(out_w as usize * out_h as usize * c);
    for oy in 0..out_h {
        let fy = ((oy as f64 + 0.5) * sy - 0.5).clamp(0.0, (img.height - 1) as f64);
        let y0 = fy.floor() as u32;
        let y1 = (y0 + 1).min(img.height - 1);
        let ty = fy - y0 as f64;
        for ox in 0..out_w {
            let fx = ((ox as f64 + 0.5) * sx - 0.5).clamp(0.0, (img.width - 1) as f64);
            let x0 = fx.floor() as u32;
            let x1 = (x0 + 1).min(img.width - 1);
            let tx = fx - x0 as f64;
            for ch in 0..img.channels {
                let v00 = to_f64(img.get(x0, y0, ch));
                let v10 = to_f64(img.get(x1, y0, ch));
                let v01 = to_f64(img.get(x0, y1, ch));
                let v11 = to_f64(img.get(x1, y1, ch));
                let top = v00 * (1.0 - tx) + v10 * tx;
                let bottom = v01 * (1.0 - tx) + v11 * tx;
                let v = (top * (1.0 - ty) + bottom * ty).clamp(0.0, 1.0);
                data.push(from_f64(v));
            }
        }
    }
    PixelImage::from_raw(out_w, out_h, img.channels, data)
}

/// Center crops any axis exceeding `max_side` down to `max_side`; images
/// within bounds pass through untouched. Each axis is clamped independently.
pub fn clamp_oversize<S: Scalar>(img: &PixelImage<S>, max_side: u32) -> PixelImage<S> {
    let max_side = max_side.max(1);
    if img.width <= max_side && img.height <= max_side {
        return img.clone();
    }
    center_crop(img, img.width.min(max_side), img.height.min(max_side))
}

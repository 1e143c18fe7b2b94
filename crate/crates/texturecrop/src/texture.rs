//! Per-crop texture statistics: standard deviation, entropy, autocorrelation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pixel::GrayImage;
use crate::scalar::{from_f64, to_f64, Scalar};

/// Which texture statistic to compute or rank by.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TextureMetricKind {
    Sd,
    Entropy,
    Autocorrelation,
}

impl std::fmt::Display for TextureMetricKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Self::Sd => "sd",
            Self::Entropy => "entropy",
            Self::Autocorrelation => "autocorrelation",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for TextureMetricKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sd" | "std" | "stddev" => Ok(Self::Sd),
            "entropy" => Ok(Self::Entropy),
            "autocorrelation" | "autocorr" => Ok(Self::Autocorrelation),
            other => Err(Error::InvalidConfig(format!(
                "unknown texture metric {other:?}, expected sd, entropy or autocorrelation"
            ))),
        }
    }
}

/// A computed texture statistic together with its kind.
///
/// Value ranges: SD lies in `[0, 0.5]` for unit-range data, entropy in
/// `[0, 8]` bits (256 bins), autocorrelation in `[-1, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricValue<S> {
    pub kind: TextureMetricKind,
    pub value: S,
}

/// Population standard deviation of all luma values (divide by N, not N-1).
pub fn std_dev<S: Scalar>(gray: &GrayImage<S>) -> MetricValue<S> {
    let data = gray.data();
    let n = from_f64::<S>(data.len() as f64);
    let mut sum = S::zero();
    for &v in data {
        sum += v;
    }
    let mean = sum / n;
    let mut acc = S::zero();
    for &v in data {
        let d = v - mean;
        acc += d * d;
    }
    MetricValue {
        kind: TextureMetricKind::Sd,
        value: (acc / n).sqrt(),
    }
}

/// Shannon entropy in bits of the 256-bin histogram of luma values
/// (bin = `floor(v * 255)` clamped to `[0, 255]`).
pub fn entropy<S: Scalar>(gray: &GrayImage<S>) -> MetricValue<S> {
    let mut hist = [0u64; 256];
    for &v in gray.data() {
        let bin = (to_f64(v) * 255.0).floor().clamp(0.0, 255.0) as usize;
        hist[bin] += 1;
    }
    let n = gray.data().len() as f64;
    let mut bits = 0.0_f64;
    for &count in &hist {
        if count > 0 {
            let p = count as f64 / n;
            bits -= p * p.log2();
        }
    }
    MetricValue {
        kind: TextureMetricKind::Entropy,
        value: from_f64(bits),
    }
}

/// Mean of the lag-1 horizontal and lag-1 vertical Pearson correlations
/// between each pixel and its right/down neighbor.
///
/// A constant image returns 1.0 by convention (a flat patch is maximally
/// self-similar). Within one direction, if either marginal of the pair set
/// has zero variance the correlation is taken as 1.0 when all pairs are
/// identical and 0.0 otherwise.
pub fn autocorrelation<S: Scalar>(gray: &GrayImage<S>) -> Result<MetricValue<S>> {
    if gray.width() < 2 || gray.height() < 2 {
        return Err(Error::DegenerateGeometry {
            width: gray.width(),
            height: gray.height(),
        });
    }
    Ok(autocorrelation_lenient(gray))
}

/// Total version of [`autocorrelation`] used for ranking: degenerate crops
/// fall back to the single available direction, or 1.0 for a lone pixel.
pub(crate) fn autocorrelation_lenient<S: Scalar>(gray: &GrayImage<S>) -> MetricValue<S> {
    let value = if is_constant(gray) {
        S::one()
    } else {
        let h = (gray.width() >= 2).then(|| lag1_pearson(gray, 1, 0));
        let v = (gray.height() >= 2).then(|| lag1_pearson(gray, 0, 1));
        match (h, v) {
            (Some(h), Some(v)) => (h + v) / from_f64(2.0),
            (Some(r), None) | (None, Some(r)) => r,
            (None, None) => S::one(),
        }
    };
    MetricValue {
        kind: TextureMetricKind::Autocorrelation,
        value: value.max(-S::one()).min(S::one()),
    }
}

fn is_constant<S: Scalar>(gray: &GrayImage<S>) -> bool {
    let first = gray.data()[0];
    gray.data().iter().all(|&v| v == first)
}

/// Pearson correlation over all pairs `(g(x, y), g(x+dx, y+dy))`.
fn lag1_pearson<S: Scalar>(gray: &GrayImage<S>, dx: u32, dy: u32) -> S {
    let nx = gray.width() - dx;
    let ny = gray.height() - dy;
    let n = from_f64::<S>(nx as f64 * ny as f64);

    let mut sum_a = S::zero();
    let mut sum_b = S::zero();
    for y in 0..ny {
        for x in 0..nx {
            sum_a += gray.get(x, y);
            sum_b += gray.get(x + dx, y + dy);
        }
    }
    let mean_a = sum_a / n;
    let mean_b = sum_b / n;

    let mut cov = S::zero();
    let mut var_a = S::zero();
    let mut var_b = S::zero();
    for y in 0..ny {
        for x in 0..nx {
            let da = gray.get(x, y) - mean_a;
            let db = gray.get(x + dx, y + dy) - mean_b;
            cov += da * db;
            var_a += da * da;
            var_b += db * db;
        }
    }

    let denom = (var_a * var_b).sqrt();
    if denom == S::zero() {
        let identical = (0..ny).all(|y| (0..nx).all(|x| gray.get(x, y) == gray.get(x + dx, y + dy)));
        return if identical { S::one() } else { S::zero() };
    }
    cov / denom
}

/// Computes the requested statistic; autocorrelation uses the lenient form so
/// ranking never fails on degenerate window shapes.
pub fn compute_metric<S: Scalar>(kind: TextureMetricKind, gray: &GrayImage<S>) -> MetricValue<S> {
    match kind {
        TextureMetricKind::Sd => std_dev(gray),
        TextureMetricKind::Entropy => entropy(gray),
        TextureMetricKind::Autocorrelation => autocorrelation_lenient(gray),
    }
}

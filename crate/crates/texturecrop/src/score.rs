//! Detector abstraction: built-in test scorers plus the file-exchange
//! contract for external detectors.
//!
//! Scores are probabilities in `[0, 1]`; external scorers must emit the same
//! range through the score manifest.

use std::collections::{HashMap, HashSet};
use std::path::PathBuf;

use crate::crop::CropSet;
use crate::error::{Error, Result};
use crate::pixel::{to_grayscale, PixelImage};
use crate::scalar::{from_f64, to_f64, Scalar};
use crate::texture::std_dev;

/// Which scorer stands in for the detector `f`.
#[derive(Debug, Clone, PartialEq)]
pub enum ScorerSpec {
    /// Every crop scores the same constant in `[0, 1]`.
    Constant(f64),
    /// `min(1, scale * SD)` of the crop's grayscale pixels; a monotone
    /// texture stand-in that makes end-to-end runs meaningful without a
    /// neural detector.
    TextureProxy { scale: f64 },
    /// Looks scores up in a JSON Lines file of `{crop_id, score}` records.
    SidecarOracle(PathBuf),
    /// Scores arrive through the file exchange: export crops, run the
    /// external detector, then import its score manifest.
    External,
}

impl std::fmt::Display for ScorerSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Constant(c) => write!(f, "constant:{c}"),
            Self::TextureProxy { scale } => write!(f, "proxy:{scale}"),
            Self::SidecarOracle(path) => write!(f, "sidecar:{}", path.display()),
            Self::External => f.write_str("external"),
        }
    }
}

impl std::str::FromStr for ScorerSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, arg) = match s.split_once(':') {
            Some((k, a)) => (k, Some(a)),
            None => (s, None),
        };
        match kind.to_ascii_lowercase().as_str() {
            "constant" => {
                let c: f64 = arg
                    .ok_or_else(|| Error::InvalidConfig("constant scorer needs a value".into()))?
                    .parse()
                    .map_err(|e| Error::InvalidConfig(format!("bad constant: {e}")))?;
                if !(0.0..=1.0).contains(&c) {
                    return Err(Error::InvalidConfig(format!(
                        "constant {c} must lie in [0,1]"
                    )));
                }
                Ok(Self::Constant(c))
            }
            "proxy" | "texture-proxy" => {
                let scale: f64 = match arg {
                    Some(a) => a
                        .parse()
                        .map_err(|e| Error::InvalidConfig(format!("bad proxy scale: {e}")))?,
                    None => 2.0,
                };
                if scale <= 0.0 || !scale.is_finite() {
                    return Err(Error::InvalidConfig(format!(
                        "proxy scale {scale} must be positive"
                    )));
                }
                Ok(Self::TextureProxy { scale })
            }
            "sidecar" => {
                let path = arg
                    .ok_or_else(|| Error::InvalidConfig("sidecar scorer needs a path".into()))?;
                Ok(Self::SidecarOracle(PathBuf::from(path)))
            }
            "external" => Ok(Self::External),
            other => Err(Error::InvalidConfig(format!("unknown scorer {other:?}"))),
        }
    }
}

/// One crop's SID score, joinable to the crop manifest by id.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreRecord<S> {
    pub crop_id: String,
    pub score: S,
}

/// A crop's extracted pixels, ready for scoring.
#[derive(Debug, Clone)]
pub struct CropPixels<S> {
    pub crop_id: String,
    pub pixels: PixelImage<S>,
}

/// A scorer spec resolved into something callable (sidecar files loaded).
#[derive(Debug)]
pub enum BuiltScorer<S> {
    Constant(S),
    TextureProxy { scale: S },
    Sidecar(HashMap<String, S>),
}

impl<S: Scalar> BuiltScorer<S> {
    pub fn build(spec: &ScorerSpec) -> Result<Self> {
        match spec {
            ScorerSpec::Constant(c) => Ok(Self::Constant(from_f64(*c))),
            ScorerSpec::TextureProxy { scale } => Ok(Self::TextureProxy {
                scale: from_f64(*scale),
            }),
            ScorerSpec::SidecarOracle(path) => {
                let lines = crate::manifest::read_score_manifest(path)?;
                let mut map = HashMap::with_capacity(lines.len());
                for line in lines {
                    if map.insert(line.crop_id.clone(), from_f64(line.score)).is_some() {
                        return Err(Error::DuplicateScore { id: line.crop_id });
                    }
                }
                Ok(Self::Sidecar(map))
            }
            ScorerSpec::External => Err(Error::ScorerFailure(
                "external scorers use the file exchange: export crops, run the detector, \
                 then aggregate against its score manifest"
                    .into(),
            )),
        }
    }

    /// Whether scoring needs pixel data at all (sidecar and constant do not).
    pub fn needs_pixels(&self) -> bool {
        matches!(self, Self::TextureProxy { .. })
    }

    fn score(&self, crop: &CropPixels<S>) -> Result<S> {
        match self {
            Self::Constant(c) => Ok(*c),
            Self::TextureProxy { scale } => {
                let sd = std_dev(&to_grayscale(&crop.pixels)).value;
                Ok((*scale * sd).min(S::one()))
            }
            Self::Sidecar(map) => {
                let score = map.get(&crop.crop_id).ok_or_else(|| Error::ScorerFailure(
                    format!("sidecar file has no score for {}", crop.crop_id),
                ))?;
                if *score < S::zero() || *score > S::one() {
                    return Err(Error::RangeViolation {
                        id: crop.crop_id.clone(),
                        score: to_f64(*score),
                    });
                }
                Ok(*score)
            }
        }
    }
}

/// Scores every crop, one record per input with matching multiplicity.
pub fn score_crops<S: Scalar>(
    scorer: &BuiltScorer<S>,
    crops: &[CropPixels<S>],
) -> Result<Vec<ScoreRecord<S>>> {
    crops
        .iter()
        .map(|crop| {
            Ok(ScoreRecord {
                crop_id: crop.crop_id.clone(),
                score: scorer.score(crop)?,
            })
        })
        .collect()
}

/// Confirms that `records` is a bijection with the crop set's ids and that
/// every score lies in `[0, 1]`.
pub fn validate_scores<S: Scalar>(records: &[ScoreRecord<S>], expected: &CropSet<S>) -> Result<()> {
    let mut seen: HashSet<&str> = HashSet::with_capacity(records.len());
    for rec in records {
        if !seen.insert(rec.crop_id.as_str()) {
            return Err(Error::DuplicateScore {
                id: rec.crop_id.clone(),
            });
        }
        if rec.score < S::zero() || rec.score > S::one() {
            return Err(Error::RangeViolation {
                id: rec.crop_id.clone(),
                score: to_f64(rec.score),
            });
        }
    }
    for crop in &expected.records {
        if !seen.contains(crop.crop_id.as_str()) {
            return Err(Error::MissingScore {
                id: crop.crop_id.clone(),
            });
        }
    }
    if records.len() != expected.records.len() {
        let expected_ids: HashSet<&str> = expected
            .records
            .iter()
            .map(|c| c.crop_id.as_str())
            .collect();
        let extra = records
            .iter()
            .find(|r| !expected_ids.contains(r.crop_id.as_str()))
            .expect("count mismatch implies an unexpected id");
        return Err(Error::ScorerFailure(format!(
            "score for unknown crop {}",
            extra.crop_id
        )));
    }
    Ok(())
}

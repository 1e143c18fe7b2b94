//! Fusing per-crop scores into one image-level score.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{from_f64, Scalar};

/// How per-crop scores are fused. All methods are permutation invariant; the
/// implementation sorts internally so the invariance is exact, not merely up
/// to float re-association.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AggregationMethod {
    /// Arithmetic mean.
    Average,
    /// Binarize each score at 0.5 and return the majority class (1.0 or 0.0);
    /// even splits fall back to comparing the mean score against 0.5.
    MajorityVote,
    /// Maximum score.
    Max,
    /// Middle of the sorted list; mean of the two middles for even counts.
    Median,
    /// Partition `[0, 1]` into intervals of the given length (`[kL, (k+1)L)`,
    /// last interval closed); each score is weighted by the fraction of
    /// scores sharing its interval and the weighted sum is normalized by the
    /// total weight.
    WeightedAverage { interval_length: f64 },
}

/// Interval length used by the weighted average unless configured otherwise.
pub const DEFAULT_INTERVAL_LENGTH: f64 = 0.1;

impl std::fmt::Display for AggregationMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Average => f.write_str("average"),
            Self::MajorityVote => f.write_str("majority-vote"),
            Self::Max => f.write_str("max"),
            Self::Median => f.write_str("median"),
            Self::WeightedAverage { interval_length } => {
                write!(f, "weighted-average:{interval_length}")
            }
        }
    }
}

impl std::str::FromStr for AggregationMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, arg) = match s.split_once(':') {
            Some((k, a)) => (k, Some(a)),
            None => (s, None),
        };
        match kind.to_ascii_lowercase().as_str() {
            "average" | "mean" => Ok(Self::Average),
            "majority-vote" | "majority" | "vote" => Ok(Self::MajorityVote),
            "max" => Ok(Self::Max),
            "median" => Ok(Self::Median),
            "weighted-average" | "weighted" => {
                let interval_length = match arg {
                    Some(a) => a.parse().map_err(|e| {
                        Error::InvalidConfig(format!("bad interval length: {e}"))
                    })?,
                    None => DEFAULT_INTERVAL_LENGTH,
                };
                Ok(Self::WeightedAverage { interval_length })
            }
            other => Err(Error::InvalidConfig(format!(
                "unknown aggregation {other:?}"
            ))),
        }
    }
}

impl AggregationMethod {
    pub fn validate(&self) -> Result<()> {
        if let Self::WeightedAverage { interval_length } = self {
            if !(*interval_length > 0.0 && *interval_length <= 1.0) {
                return Err(Error::InvalidConfig(format!(
                    "interval length {interval_length} must lie in (0,1]"
                )));
            }
        }
        Ok(())
    }
}

/// The fused image-level score.
#[derive(Debug, Clone, PartialEq)]
pub struct AggregatedScore<S> {
    pub image_id: String,
    pub score: S,
    pub n_crops: usize,
    pub method: AggregationMethod,
}

/// Fuses a non-empty list of per-crop probabilities into one score.
pub fn aggregate<S: Scalar>(scores: &[S], method: &AggregationMethod) -> Result<S> {
    if scores.is_empty() {
        return Err(Error::EmptyInput);
    }
    method.validate()?;

    // A sorted copy makes every method's result independent of input order.
    let mut sorted = scores.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("scores are validated finite"));
    let n = sorted.len();
    let n_s: S = from_f64(n as f64);

    let value = match method {
        AggregationMethod::Average => sum(&sorted) / n_s,
        AggregationMethod::Max => sorted[n - 1],
        AggregationMethod::Median => {
            if n % 2 == 1 {
                sorted[n / 2]
            } else {
                (sorted[n / 2 - 1] + sorted[n / 2]) / from_f64(2.0)
            }
        }
        AggregationMethod::MajorityVote => {
            let half: S = from_f64(0.5);
            let synthetic = sorted.iter().filter(|&&s| s >= half).count();
            let real = n - synthetic;
            if synthetic > real {
                S::one()
            } else if synthetic < real {
                S::zero()
            } else if sum(&sorted) / n_s >= half {
                S::one()
            } else {
                S::zero()
            }
        }
        AggregationMethod::WeightedAverage { interval_length } => {
            let bins: Vec<usize> = sorted
                .iter()
                .map(|&s| interval_index(s, *interval_length))
                .collect();
            let mut counts: std::collections::HashMap<usize, usize> = std::collections::HashMap::new();
            for &b in &bins {
                *counts.entry(b).or_insert(0) += 1;
            }
            let mut num = S::zero();
            let mut den = S::zero();
            for (&s, &b) in sorted.iter().zip(&bins) {
                let w: S = from_f64::<S>(counts[&b] as f64) / n_s;
                num += s * w;
                den += w;
            }
            num / den
        }
    };
    Ok(value)
}

/// Index of the interval `[kL, (k+1)L)` containing `score`; the last interval
/// is closed so `score = 1` is binned.
fn interval_index<S: Scalar>(score: S, interval_length: f64) -> usize {
    let s = score.to_f64().expect("score converts to f64");
    let mut k = (s / interval_length).floor() as usize;
    while k > 0 && k as f64 * interval_length >= 1.0 {
        k -= 1;
    }
    k
}

fn sum<S: Scalar>(values: &[S]) -> S {
    let mut acc = S::zero();
    for &v in values {
        acc += v;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn average_of_three() {
        let got = aggregate::<f64>(&[0.2, 0.4, 0.9], &AggregationMethod::Average).unwrap();
        assert!((got - 0.5).abs() < 1e-15);
    }

    #[test]
    fn unanimity_returns_the_common_value() {
        for method in [
            AggregationMethod::Average,
            AggregationMethod::Max,
            AggregationMethod::Median,
            AggregationMethod::WeightedAverage { interval_length: 0.1 },
        ] {
            let got = aggregate::<f64>(&[0.3; 7], &method).unwrap();
            assert!((got - 0.3).abs() < 1e-15, "{method}");
        }
        // Majority vote returns the binarized class of the common value.
        assert_eq!(aggregate::<f64>(&[0.3; 7], &AggregationMethod::MajorityVote).unwrap(), 0.0);
        assert_eq!(aggregate::<f64>(&[0.8; 7], &AggregationMethod::MajorityVote).unwrap(), 1.0);
    }

    #[test]
    fn weighted_average_hand_example() {
        let got = aggregate::<f64>(
            &[0.05, 0.07, 0.95],
            &AggregationMethod::WeightedAverage { interval_length: 0.1 },
        )
        .unwrap();
        let expected = (2.0 / 3.0 * 0.05 + 2.0 / 3.0 * 0.07 + 1.0 / 3.0 * 0.95) / (5.0 / 3.0);
        assert!((got - expected).abs() < 1e-15);
        assert!((got - 0.238).abs() < 1e-12);
    }

    #[test]
    fn majority_vote_two_of_three() {
        assert_eq!(
            aggregate(&[0.9, 0.8, 0.1], &AggregationMethod::MajorityVote).unwrap(),
            1.0
        );
        assert_eq!(
            aggregate(&[0.9, 0.2, 0.1], &AggregationMethod::MajorityVote).unwrap(),
            0.0
        );
    }

    #[test]
    fn majority_vote_tie_falls_back_to_mean() {
        // Two synthetic, two real; mean 0.525 >= 0.5.
        assert_eq!(
            aggregate(&[0.9, 0.8, 0.2, 0.2], &AggregationMethod::MajorityVote).unwrap(),
            1.0
        );
        // Mean 0.375 < 0.5.
        assert_eq!(
            aggregate(&[0.6, 0.5, 0.2, 0.2], &AggregationMethod::MajorityVote).unwrap(),
            0.0
        );
    }

    #[test]
    fn median_even_count_averages_middles() {
        let got = aggregate::<f64>(&[0.2, 0.4], &AggregationMethod::Median).unwrap();
        assert!((got - 0.3).abs() < 1e-15);
    }

    #[test]
    fn median_odd_count_picks_middle() {
        assert_eq!(aggregate::<f64>(&[0.9, 0.1, 0.4], &AggregationMethod::Median).unwrap(), 0.4);
    }

    #[test]
    fn max_picks_maximum() {
        assert_eq!(aggregate::<f64>(&[0.1, 0.95], &AggregationMethod::Max).unwrap(), 0.95);
    }

    #[test]
    fn weighted_average_with_unit_interval_is_average() {
        let scores: [f64; 6] = [0.12, 0.9, 0.33, 0.7, 1.0, 0.0];
        let avg = aggregate(&scores, &AggregationMethod::Average).unwrap();
        let wavg = aggregate(
            &scores,
            &AggregationMethod::WeightedAverage { interval_length: 1.0 },
        )
        .unwrap();
        assert_eq!(avg, wavg);
    }

    #[test]
    fn score_of_one_lands_in_the_closed_last_interval() {
        assert_eq!(interval_index(1.0_f64, 0.1), 9);
        assert_eq!(interval_index(0.95_f64, 0.1), 9);
        assert_eq!(interval_index(0.0_f64, 0.1), 0);
        assert_eq!(interval_index(1.0_f64, 1.0), 0);
    }

    #[test]
    fn empty_input_errors() {
        assert!(matches!(
            aggregate::<f64>(&[], &AggregationMethod::Average),
            Err(Error::EmptyInput)
        ));
    }

    #[test]
    fn bad_interval_length_errors() {
        for bad in [0.0, -0.1, 1.5] {
            assert!(matches!(
                aggregate(&[0.5], &AggregationMethod::WeightedAverage { interval_length: bad }),
                Err(Error::InvalidConfig(_))
            ));
        }
    }

    #[test]
    fn aggregation_method_parses_and_prints() {
        for text in ["average", "majority-vote", "max", "median", "weighted-average:0.1"] {
            let method: AggregationMethod = text.parse().unwrap();
            assert_eq!(method.to_string(), text);
        }
        let default: AggregationMethod = "weighted-average".parse().unwrap();
        assert_eq!(
            default,
            AggregationMethod::WeightedAverage { interval_length: 0.1 }
        );
        assert!("blend".parse::<AggregationMethod>().is_err());
    }
}

//! Per-level ratio statistics and precision-bin correlation tables.

use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use super::EvalError;
use crate::corpus::{RiskLevel, Segmenter, UserTimeline};
use crate::scoring::{score_sentences, RiskScorer, ScoreError, ScoredSentence, SentimentScorer};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quartiles {
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
}

/// Quantile by linear interpolation between closest ranks, found by
/// selection rather than a full sort.
fn quantile(values: &mut [f64], q: f64) -> f64 {
    let pos = q * (values.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let (_, lo_val, upper) = values.select_nth_unstable_by(lo, f64::total_cmp);
    let lo_val = *lo_val;
    if hi == lo {
        return lo_val;
    }
    let hi_val = upper.iter().copied().fold(f64::INFINITY, f64::min);
    lo_val + (hi_val - lo_val) * (pos - lo as f64)
}

/// Five-number summary; `None` for an empty slice.
pub fn quartiles(values: &[f64]) -> Option<Quartiles> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    Some(Quartiles {
        min: quantile(&mut v, 0.0),
        q1: quantile(&mut v, 0.25),
        median: quantile(&mut v, 0.5),
        q3: quantile(&mut v, 0.75),
        max: quantile(&mut v, 1.0),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelSummary {
    pub n_users: usize,
    pub quartiles: Quartiles,
}

/// Quartiles of a per-user ratio, grouped by expert level.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct LevelRatioStats {
    pub by_level: BTreeMap<RiskLevel, LevelSummary>,
}

impl LevelRatioStats {
    fn from_ratios(ratios: &[(RiskLevel, f64)]) -> Self {
        let mut grouped: BTreeMap<RiskLevel, Vec<f64>> = BTreeMap::new();
        for &(level, r) in ratios {
            grouped.entry(level).or_default().push(r);
        }
        let by_level = grouped
            .into_iter()
            .filter_map(|(level, v)| {
                quartiles(&v).map(|q| {
                    (
                        level,
                        LevelSummary {
                            n_users: v.len(),
                            quartiles: q,
                        },
                    )
                })
            })
            .collect();
        Self { by_level }
    }

    pub fn median(&self, level: RiskLevel) -> Option<f64> {
        self.by_level.get(&level).map(|s| s.quartiles.median)
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct RatioAnalysis {
    /// Share of risk-positive sentences per user.
    pub risk: LevelRatioStats,
    /// Share of negative-dominant sentences per user.
    pub negative: LevelRatioStats,
    pub excluded_users: Vec<String>,
}

/// Ratio statistics from already-scored users.
pub fn ratio_stats_from_scored<'a>(
    users: impl IntoIterator<Item = (&'a str, RiskLevel, &'a [ScoredSentence])>,
) -> RatioAnalysis {
    let mut risk = Vec::new();
    let mut negative = Vec::new();
    let mut excluded_users = Vec::new();
    for (user_id, level, scored) in users {
        if scored.is_empty() {
            log::info!("user {user_id} has no sentences; excluded from ratio analysis");
            excluded_users.push(user_id.to_string());
            continue;
        }
        let n = scored.len() as f64;
        let r = scored.iter().filter(|s| s.risk_positive).count() as f64 / n;
        let g = scored
            .iter()
            .filter(|s| s.sentiment.negative_dominant())
            .count() as f64
            / n;
        risk.push((level, r));
        negative.push((level, g));
    }
    RatioAnalysis {
        risk: LevelRatioStats::from_ratios(&risk),
        negative: LevelRatioStats::from_ratios(&negative),
        excluded_users,
    }
}

/// Segments and scores every user, then groups per-user ratios by level.
pub fn risk_ratio_analysis(
    corpus: &[UserTimeline],
    segmenter: &Segmenter,
    risk: &dyn RiskScorer,
    sentiment: &dyn SentimentScorer,
    threshold: f64,
) -> Result<RatioAnalysis, ScoreError> {
    let scored: Vec<Vec<ScoredSentence>> = corpus
        .iter()
        .map(|t| score_sentences(segmenter.segment_timeline(t), risk, sentiment, threshold))
        .collect::<Result<_, _>>()?;
    Ok(ratio_stats_from_scored(corpus.iter().zip(&scored).map(
        |(t, s)| (t.user_id.as_str(), t.expert_level, s.as_slice()),
    )))
}

pub fn write_ratio_csv<W: Write>(out: W, analysis: &RatioAnalysis) -> Result<(), EvalError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "measure", "level", "n_users", "min", "q1", "median", "q3", "max",
    ])?;
    for (measure, stats) in [("risk", &analysis.risk), ("negative", &analysis.negative)] {
        for (level, s) in &stats.by_level {
            let q = s.quartiles;
            w.write_record([
                measure.to_string(),
                level.to_string(),
                s.n_users.to_string(),
                q.min.to_string(),
                q.q1.to_string(),
                q.median.to_string(),
                q.q3.to_string(),
                q.max.to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// One highlight span with its evaluation precision and model scores.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpanObservation {
    pub precision: f64,
    pub p_risk: f64,
    pub p_negative: f64,
}

/// Probability at or above which a span counts toward the high fractions.
pub const HIGH_PROBABILITY: f64 = 0.9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrecisionCorrelationRow {
    /// Bin is `[bin_lo, bin_hi)`, except the last which also holds `bin_hi`.
    pub bin_lo: f64,
    pub bin_hi: f64,
    pub n: usize,
    pub mean_risk_prob: Option<f64>,
    pub mean_neg_prob: Option<f64>,
    pub frac_risk_above_0_9: Option<f64>,
    pub frac_neg_above_0_9: Option<f64>,
}

/// `k` equal-width bin edges over `[0, 1]`.
pub fn uniform_bin_edges(k: usize) -> Vec<f64> {
    (0..=k).map(|i| i as f64 / k as f64).collect()
}

fn check_edges(edges: &[f64]) -> Result<(), EvalError> {
    let ok = edges.len() >= 2
        && edges[0] == 0.0
        && edges[edges.len() - 1] == 1.0
        && edges.windows(2).all(|w| w[0] < w[1]);
    if ok {
        Ok(())
    } else {
        Err(EvalError::BadBins(format!("{edges:?}")))
    }
}

/// Buckets spans by precision and reports per-bin means and the share of
/// spans with probabilities at or above [`HIGH_PROBABILITY`].
pub fn precision_correlation_analysis(
    spans: &[SpanObservation],
    edges: &[f64],
) -> Result<Vec<PrecisionCorrelationRow>, EvalError> {
    check_edges(edges)?;
    let bins = edges.len() - 1;
    let mut members: Vec<Vec<&SpanObservation>> = vec![Vec::new(); bins];
    for s in spans {
        for v in [s.precision, s.p_risk, s.p_negative] {
            if !(0.0..=1.0).contains(&v) {
                return Err(EvalError::OutOfRange(v));
            }
        }
        let bin = edges[1..bins].partition_point(|&e| e <= s.precision);
        members[bin].push(s);
    }
    Ok(members
        .iter()
        .enumerate()
        .map(|(i, m)| {
            let n = m.len();
            let avg = |f: fn(&SpanObservation) -> f64| {
                (n > 0).then(|| m.iter().map(|s| f(s)).sum::<f64>() / n as f64)
            };
            PrecisionCorrelationRow {
                bin_lo: edges[i],
                bin_hi: edges[i + 1],
                n,
                mean_risk_prob: avg(|s| s.p_risk),
                mean_neg_prob: avg(|s| s.p_negative),
                frac_risk_above_0_9: avg(|s| f64::from(u8::from(s.p_risk >= HIGH_PROBABILITY))),
                frac_neg_above_0_9: avg(|s| f64::from(u8::from(s.p_negative >= HIGH_PROBABILITY))),
            }
        })
        .collect())
}

pub fn write_precision_csv<W: Write>(
    out: W,
    rows: &[PrecisionCorrelationRow],
) -> Result<(), EvalError> {
    let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "bin_lo",
        "bin_hi",
        "n",
        "mean_risk_prob",
        "mean_neg_prob",
        "frac_risk_above_0_9",
        "frac_neg_above_0_9",
    ])?;
    for r in rows {
        w.write_record([
            r.bin_lo.to_string(),
            r.bin_hi.to_string(),
            r.n.to_string(),
            opt(r.mean_risk_prob),
            opt(r.mean_neg_prob),
            opt(r.frac_risk_above_0_9),
            opt(r.frac_neg_above_0_9),
        ])?;
    }
    w.flush()?;
    Ok(())
}

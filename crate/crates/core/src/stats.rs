//! Accuracy, uncertainty, token and correlation statistics.
//!
//! Conventions are pinned here and printed in report headers: accuracy
//! denominators exclude failed calls, uncertainty on accuracy is half the
//! range across the per-hop trials, ratio metrics carry min/max error
//! bars, standard deviations are population (divide by N), and binary
//! correlations are product-moment (phi) coefficients. Undefined values
//! (empty denominators, zero variance) are carried as `None`, never as a
//! fake number.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fidelity::EvalFlags;
use crate::prompt::Strategy;

#[derive(Debug, Error, PartialEq)]
pub enum StatsError {
    #[error("expected exactly 3 per-hop values, got {0}")]
    BadArity(usize),
    #[error("binomial baseline needs n >= 1 and 0 <= p <= 1 (n={n}, p={p})")]
    BadBaseline { n: u64, p: f64 },
    #[error("correlation needs at least 2 records, got {0}")]
    TooFewRecords(usize),
}

/// Minimal view of one scored call.
#[derive(Debug, Clone, Copy)]
pub struct ScoredCall {
    /// Completion status was ok (failed calls stay in the record stream
    /// but leave accuracy denominators).
    pub ok: bool,
    pub flags: EvalFlags,
}

/// Fraction of correct answers among ok calls. `None` when no call
/// succeeded.
pub fn accuracy(calls: &[ScoredCall]) -> Option<f64> {
    let ok = calls.iter().filter(|c| c.ok).count();
    if ok == 0 {
        return None;
    }
    let correct = calls.iter().filter(|c| c.ok && c.flags.correct).count();
    Some(correct as f64 / ok as f64)
}

/// Mean and half of the range over the three per-hop accuracies.
pub fn summarize_condition(per_hop: &[f64]) -> Result<(f64, f64), StatsError> {
    if per_hop.len() != 3 {
        return Err(StatsError::BadArity(per_hop.len()));
    }
    Ok(mean_half_range(per_hop).expect("nonempty"))
}

/// Relaxed form of `summarize_condition` for campaigns that run a
/// nonstandard hop list.
pub fn mean_half_range(values: &[f64]) -> Option<(f64, f64)> {
    if values.is_empty() {
        return None;
    }
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    Some((mean, (max - min) / 2.0))
}

/// Expected score of a random guesser over `n` calls.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Baseline {
    pub n: u64,
    pub p: f64,
    pub mean: f64,
    pub sigma: f64,
}

pub fn binomial_baseline(n: u64, p: f64) -> Result<Baseline, StatsError> {
    if n < 1 || !(0.0..=1.0).contains(&p) || p.is_nan() {
        return Err(StatsError::BadBaseline { n, p });
    }
    Ok(Baseline {
        n,
        p,
        mean: p,
        sigma: (p * (1.0 - p) / n as f64).sqrt(),
    })
}

/// Mean and population standard deviation.
pub fn token_stats(values: &[u32]) -> Option<(f64, f64)> {
    if values.is_empty() {
        return None;
    }
    let n = values.len() as f64;
    let mean = values.iter().map(|&v| v as f64).sum::<f64>() / n;
    let var = values
        .iter()
        .map(|&v| {
            let d = v as f64 - mean;
            d * d
        })
        .sum::<f64>()
        / n;
    Some((mean, var.sqrt()))
}

pub const CORRELATION_LABELS: [&str; 3] = ["all_steps", "correct_order", "correct_answer"];

/// 3x3 phi-coefficient matrix over the three per-call flags. Entries are
/// `None` where a flag column has zero variance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationMatrix {
    pub labels: [String; 3],
    pub entries: [[Option<f64>; 3]; 3],
}

/// Product-moment correlation of two binary indicator vectors.
fn phi(x: &[bool], y: &[bool]) -> Option<f64> {
    let n = x.len() as f64;
    let mx = x.iter().filter(|&&v| v).count() as f64 / n;
    let my = y.iter().filter(|&&v| v).count() as f64 / n;
    // for 0/1 data E[x^2] = E[x], so var = m - m^2
    let vx = mx - mx * mx;
    let vy = my - my * my;
    if vx == 0.0 || vy == 0.0 {
        return None;
    }
    let mxy = x
        .iter()
        .zip(y)
        .filter(|&(&a, &b)| a && b)
        .count() as f64
        / n;
    Some((mxy - mx * my) / (vx * vy).sqrt())
}

/// Pairwise correlations between `all_steps`, `faithful` (correct order)
/// and `correct` over the given flag records.
pub fn phi_matrix(records: &[(bool, bool, bool)]) -> Result<CorrelationMatrix, StatsError> {
    if records.len() < 2 {
        return Err(StatsError::TooFewRecords(records.len()));
    }
    let cols: [Vec<bool>; 3] = [
        records.iter().map(|r| r.0).collect(),
        records.iter().map(|r| r.1).collect(),
        records.iter().map(|r| r.2).collect(),
    ];
    let mut entries = [[None; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            entries[i][j] = if i == j {
                Some(1.0)
            } else {
                phi(&cols[i], &cols[j])
            };
        }
    }
    Ok(CorrelationMatrix {
        labels: CORRELATION_LABELS.map(str::to_string),
        entries,
    })
}

/// Min/mean/max summary of a per-hop ratio series (the error-bar shape
/// used for the reasoning-presence and faithfulness charts).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioSummary {
    pub metric: RatioMetric,
    pub mean: Option<f64>,
    pub min: Option<f64>,
    pub max: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RatioMetric {
    HasReasoning,
    AllSteps,
    FaithfulGivenAllSteps,
}

impl RatioSummary {
    pub fn from_per_hop(metric: RatioMetric, per_hop: &[Option<f64>]) -> RatioSummary {
        let defined: Vec<f64> = per_hop.iter().flatten().cloned().collect();
        if defined.is_empty() {
            return RatioSummary {
                metric,
                mean: None,
                min: None,
                max: None,
            };
        }
        let mean = defined.iter().sum::<f64>() / defined.len() as f64;
        let min = defined.iter().cloned().fold(f64::INFINITY, f64::min);
        let max = defined.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        RatioSummary {
            metric,
            mean: Some(mean),
            min: Some(min),
            max: Some(max),
        }
    }
}

/// Accuracy, uncertainty and token usage for one strategy under one
/// provider.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionSummary {
    pub strategy: Strategy,
    pub hops: Vec<u32>,
    pub per_hop_accuracy: Vec<Option<f64>>,
    pub mean_accuracy: Option<f64>,
    pub half_range: Option<f64>,
    pub mean_completion_tokens: Option<f64>,
    pub completion_token_std: Option<f64>,
    pub prompt_token_mean: Option<f64>,
    pub prompt_token_std: Option<f64>,
    /// Calls that returned ok.
    pub response_count: usize,
    /// All calls issued, failed included.
    pub call_count: usize,
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn call(ok: bool, correct: bool) -> ScoredCall {
        ScoredCall {
            ok,
            flags: EvalFlags {
                correct,
                ..EvalFlags::default()
            },
        }
    }

    #[test]
    fn accuracy_excludes_failed_calls_from_denominator() {
        let mut calls: Vec<ScoredCall> = Vec::new();
        calls.extend(std::iter::repeat(call(true, true)).take(97));
        calls.extend(std::iter::repeat(call(true, false)).take(3));
        assert_eq!(accuracy(&calls), Some(0.97));

        let mut calls: Vec<ScoredCall> = Vec::new();
        calls.extend(std::iter::repeat(call(true, true)).take(50));
        calls.extend(std::iter::repeat(call(true, false)).take(48));
        calls.extend(std::iter::repeat(call(false, false)).take(2));
        assert_eq!(accuracy(&calls), Some(50.0 / 98.0));

        assert_eq!(accuracy(&[call(false, true)]), None);
        assert_eq!(accuracy(&[]), None);
    }

    #[test]
    fn condition_summary_is_mean_and_half_range() {
        let (mean, half) = summarize_condition(&[0.93, 0.95, 0.97]).unwrap();
        assert!((half - 0.02).abs() < 1e-12);
        assert!((mean - 0.95).abs() < 1e-12);
        assert_eq!(summarize_condition(&[0.5, 0.5, 0.5]).unwrap(), (0.5, 0.0));
        let (mean, half) = summarize_condition(&[0.69, 0.70, 0.71]).unwrap();
        assert!((mean - 0.70).abs() < 1e-12);
        assert!((half - 0.01).abs() < 1e-12);
        assert_eq!(
            summarize_condition(&[0.5, 0.5]),
            Err(StatsError::BadArity(2))
        );
    }

    #[test]
    fn baseline_follows_the_formula() {
        let b = binomial_baseline(100, 0.5).unwrap();
        assert_eq!(b.mean, 0.5);
        assert!((b.sigma - 0.05).abs() < 1e-12);
        assert_eq!(binomial_baseline(1, 0.5).unwrap().sigma, 0.5);
        assert!((binomial_baseline(400, 0.5).unwrap().sigma - 0.025).abs() < 1e-12);
        assert!(binomial_baseline(0, 0.5).is_err());
        assert!(binomial_baseline(10, 1.5).is_err());
    }

    #[test]
    fn token_stats_use_population_std() {
        let (mean, std) = token_stats(&[1, 2, 3]).unwrap();
        assert_eq!(mean, 2.0);
        assert!((std - (2.0f64 / 3.0).sqrt()).abs() < 1e-12);
        assert!((std - 0.816).abs() < 1e-3);
        assert_eq!(token_stats(&[300, 300]).unwrap(), (300.0, 0.0));
        assert_eq!(token_stats(&[]), None);
    }

    #[test]
    fn phi_handles_the_three_spec_cases() {
        // identical columns
        let m = phi_matrix(&[
            (true, true, true),
            (true, true, true),
            (false, false, false),
            (false, false, false),
        ])
        .unwrap();
        assert_eq!(m.entries[0][1], Some(1.0));
        // orthogonal columns
        let x = [true, true, false, false];
        let y = [true, false, true, false];
        assert_eq!(phi(&x, &y), Some(0.0));
        // hand-computed phi = 2/sqrt(12)
        let x = [true, true, true, false];
        let y = [true, true, false, false];
        let r = phi(&x, &y).unwrap();
        assert!((r - 1.0 / 3.0f64.sqrt()).abs() < 1e-9);
        assert!((r - 0.577).abs() < 1e-3);
    }

    #[test]
    fn zero_variance_yields_undefined_off_diagonal() {
        let m = phi_matrix(&[(true, true, true), (true, false, true)]).unwrap();
        assert_eq!(m.entries[0][0], Some(1.0));
        assert_eq!(m.entries[0][1], None);
        assert_eq!(m.entries[1][2], None);
        assert!(phi_matrix(&[(true, true, true)]).is_err());
    }

    proptest! {
        #[test]
        fn phi_matrix_symmetric_unit_diagonal(
            records in prop::collection::vec((any::<bool>(), any::<bool>(), any::<bool>()), 2..40)
        ) {
            let m = phi_matrix(&records).unwrap();
            for i in 0..3 {
                prop_assert_eq!(m.entries[i][i], Some(1.0));
                for j in 0..3 {
                    match (m.entries[i][j], m.entries[j][i]) {
                        (Some(a), Some(b)) => prop_assert!((a - b).abs() < 1e-12),
                        (None, None) => {}
                        other => prop_assert!(false, "asymmetric definedness {:?}", other),
                    }
                    if let Some(v) = m.entries[i][j] {
                        prop_assert!((-1.0 - 1e-12..=1.0 + 1e-12).contains(&v));
                    }
                }
            }
        }

        #[test]
        fn summary_is_permutation_invariant(mut values in prop::collection::vec(0.0f64..1.0, 3)) {
            let a = summarize_condition(&values).unwrap();
            values.swap(0, 2);
            values.swap(1, 2);
            let b = summarize_condition(&values).unwrap();
            prop_assert!((a.0 - b.0).abs() < 1e-12);
            prop_assert!((a.1 - b.1).abs() < 1e-12);
        }

        #[test]
        fn accuracy_unaffected_by_order_and_failures(
            oks in prop::collection::vec((any::<bool>(), any::<bool>()), 1..30),
            extra_failures in 0usize..5,
        ) {
            let mut calls: Vec<ScoredCall> = oks.iter().map(|&(ok, c)| call(ok, c)).collect();
            let base = accuracy(&calls);
            calls.reverse();
            prop_assert_eq!(accuracy(&calls), base);
            for _ in 0..extra_failures {
                calls.push(call(false, true));
            }
            prop_assert_eq!(accuracy(&calls), base);
        }
    }
}

//! Finite-evidence classification of a sequence of partial means.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Thresholds for turning a finite series into a limit verdict.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerdictPolicy {
    /// Block length `W`; the last three blocks of this length are inspected.
    pub window: usize,
    /// Convergence tolerance relative to `max(1, |median of the last block|)`.
    pub conv_tol_rel: f64,
    /// Magnitude past which a monotone envelope counts as divergent.
    pub div_threshold: f64,
    /// A monotone envelope whose last step is at least this fraction of the previous
    /// one is also treated as divergent; this catches logarithmic growth.
    pub growth_ratio: f64,
    /// `n P(|X| > n)` below this value counts as decayed.
    pub tail_zero_tol: f64,
    /// Largest number of atoms used to refine a scan around atom boundaries.
    pub refine_cap: usize,
}

impl Default for VerdictPolicy {
    fn default() -> Self {
        Self {
            window: 8,
            conv_tol_rel: 1e-6,
            div_threshold: 1e4,
            growth_ratio: 0.5,
            tail_zero_tol: 1e-3,
            refine_cap: 10_000,
        }
    }
}

impl VerdictPolicy {
    pub fn validate(&self) -> Result<()> {
        if self.window < 2 {
            return Err(invalid("verdict window must be at least 2"));
        }
        if !(self.conv_tol_rel > 0.0 && self.div_threshold > 0.0 && self.growth_ratio > 0.0 && self.tail_zero_tol > 0.0)
        {
            return Err(invalid("verdict tolerances must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum LimitVerdict {
    Converged { value: f64 },
    DivergesPlus,
    DivergesMinus,
    OscillatesBounded { liminf_est: f64, limsup_est: f64 },
    OscillatesUnboundedAbove { liminf_est: f64 },
    OscillatesUnboundedBelow { limsup_est: f64 },
    Undetermined,
}

impl LimitVerdict {
    pub fn is_converged(&self) -> bool {
        matches!(self, LimitVerdict::Converged { .. })
    }

    pub fn is_oscillating(&self) -> bool {
        matches!(
            self,
            LimitVerdict::OscillatesBounded { .. }
                | LimitVerdict::OscillatesUnboundedAbove { .. }
                | LimitVerdict::OscillatesUnboundedBelow { .. }
        )
    }

    pub fn value(&self) -> Option<f64> {
        match self {
            LimitVerdict::Converged { value } => Some(*value),
            _ => None,
        }
    }

    /// The verdict for the law of `-X`.
    pub fn negated(&self) -> Self {
        match *self {
            LimitVerdict::Converged { value } => LimitVerdict::Converged { value: -value },
            LimitVerdict::DivergesPlus => LimitVerdict::DivergesMinus,
            LimitVerdict::DivergesMinus => LimitVerdict::DivergesPlus,
            LimitVerdict::OscillatesBounded { liminf_est, limsup_est } => LimitVerdict::OscillatesBounded {
                liminf_est: -limsup_est,
                limsup_est: -liminf_est,
            },
            LimitVerdict::OscillatesUnboundedAbove { liminf_est } => LimitVerdict::OscillatesUnboundedBelow {
                limsup_est: -liminf_est,
            },
            LimitVerdict::OscillatesUnboundedBelow { limsup_est } => LimitVerdict::OscillatesUnboundedAbove {
                liminf_est: -limsup_est,
            },
            LimitVerdict::Undetermined => LimitVerdict::Undetermined,
        }
    }
}

/// What the verdict was based on. Verdicts are numerical evidence at the recorded
/// horizon, not proofs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Evidence {
    pub window: usize,
    pub conv_tol: f64,
    pub horizon: f64,
    pub points: usize,
    pub block_min: Vec<f64>,
    pub block_max: Vec<f64>,
    pub final_value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Classification {
    pub verdict: LimitVerdict,
    pub evidence: Evidence,
}

fn median(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

fn strictly_increasing(xs: &[f64]) -> bool {
    xs.windows(2).all(|w| w[1] > w[0])
}

/// Whether a strictly increasing envelope looks divergent: past the threshold, or
/// its last step is not much smaller than the one before.
fn grows(env: &[f64], threshold: f64, ratio: f64) -> bool {
    if !strictly_increasing(env) {
        return false;
    }
    let last = env[env.len() - 1];
    if last > threshold {
        return true;
    }
    if env.len() < 3 {
        return false;
    }
    let d1 = env[env.len() - 2] - env[env.len() - 3];
    let d2 = last - env[env.len() - 2];
    d2 >= ratio * d1
}

/// Classifies a series of partial means ordered along the limit (increasing `M`,
/// or decreasing `λ` for multipliers). Needs at least `2 W` values.
pub fn classify_values(values: &[f64], horizon: f64, policy: &VerdictPolicy) -> Result<Classification> {
    policy.validate()?;
    let w = policy.window;
    let n = values.len();
    if n < 2 * w {
        return Err(invalid(format!(
            "series of length {n} is shorter than twice the verdict window {w}"
        )));
    }
    let blocks = (n / w).min(3);
    let tail = &values[n - blocks * w..];
    let final_value = values[n - 1];
    let conv_tol = policy.conv_tol_rel * median(&values[n - w..]).abs().max(1.0);
    let block_min: Vec<f64> = tail
        .chunks(w)
        .map(|c| c.iter().copied().fold(f64::INFINITY, f64::min))
        .collect();
    let block_max: Vec<f64> = tail
        .chunks(w)
        .map(|c| c.iter().copied().fold(f64::NEG_INFINITY, f64::max))
        .collect();
    let evidence = Evidence {
        window: w,
        conv_tol,
        horizon,
        points: n,
        block_min: block_min.clone(),
        block_max: block_max.clone(),
        final_value,
    };
    let done = |verdict| {
        Ok(Classification {
            verdict,
            evidence: evidence.clone(),
        })
    };
    if tail.iter().any(|v| !v.is_finite()) {
        return done(LimitVerdict::Undetermined);
    }
    let spreads: Vec<f64> = block_min.iter().zip(&block_max).map(|(lo, hi)| hi - lo).collect();
    if spreads[spreads.len() - 1] <= conv_tol {
        return done(LimitVerdict::Converged { value: final_value });
    }

    let neg_max: Vec<f64> = block_max.iter().map(|x| -x).collect();
    let neg_min: Vec<f64> = block_min.iter().map(|x| -x).collect();
    let (thr, ratio) = (policy.div_threshold, policy.growth_ratio);
    if grows(&block_min, thr, ratio) {
        return done(LimitVerdict::DivergesPlus);
    }
    if grows(&neg_max, thr, ratio) {
        return done(LimitVerdict::DivergesMinus);
    }

    let persistent = spreads.iter().all(|s| *s > conv_tol);
    // a monotone tail that has not settled is slow convergence or divergence, not oscillation
    let rises = tail.windows(2).any(|p| p[1] - p[0] > conv_tol);
    let falls = tail.windows(2).any(|p| p[0] - p[1] > conv_tol);
    if !(persistent && rises && falls) {
        return done(LimitVerdict::Undetermined);
    }
    let low_bounded = block_min.iter().all(|x| x.abs() <= thr);
    let high_bounded = block_max.iter().all(|x| x.abs() <= thr);
    let liminf_est = block_min.iter().copied().fold(f64::INFINITY, f64::min);
    let limsup_est = block_max.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if grows(&block_max, thr, ratio) && low_bounded {
        return done(LimitVerdict::OscillatesUnboundedAbove { liminf_est });
    }
    if grows(&neg_min, thr, ratio) && high_bounded {
        return done(LimitVerdict::OscillatesUnboundedBelow { limsup_est });
    }
    if low_bounded && high_bounded {
        return done(LimitVerdict::OscillatesBounded { liminf_est, limsup_est });
    }
    done(LimitVerdict::Undetermined)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn classify(values: &[f64]) -> LimitVerdict {
        classify_values(values, 1.0, &VerdictPolicy::default()).unwrap().verdict
    }

    #[test]
    fn constant_series_converges() {
        assert_eq!(classify(&[2.0; 24]), LimitVerdict::Converged { value: 2.0 });
    }

    #[test]
    fn geometric_approach_converges() {
        let v: Vec<f64> = (0..60).map(|k| 1.0 + 0.5f64.powi(k)).collect();
        assert!(classify(&v).is_converged());
    }

    #[test]
    fn logarithmic_growth_diverges() {
        let v: Vec<f64> = (0..60).map(|k| (k as f64 + 1.0).ln() * 0.1 + 0.01 * k as f64).collect();
        assert_eq!(classify(&v), LimitVerdict::DivergesPlus);
        let v: Vec<f64> = (0..60).map(|k| -(1.5f64.powi(k))).collect();
        assert_eq!(classify(&v), LimitVerdict::DivergesMinus);
    }

    #[test]
    fn two_valued_series_oscillates_bounded() {
        let v: Vec<f64> = (0..60).map(|k| if k % 3 == 0 { -1.0 } else { 0.0 }).collect();
        assert_eq!(
            classify(&v),
            LimitVerdict::OscillatesBounded {
                liminf_est: -1.0,
                limsup_est: 0.0
            }
        );
    }

    #[test]
    fn recurring_floor_with_rising_peaks() {
        let v: Vec<f64> = (0..60)
            .map(|k| if k % 4 == 0 { -1.0 / 3.0 } else { 2f64.powi(k / 4) })
            .collect();
        assert_eq!(
            classify(&v),
            LimitVerdict::OscillatesUnboundedAbove { liminf_est: -1.0 / 3.0 }
        );
        let neg: Vec<f64> = v.iter().map(|x| -x).collect();
        assert_eq!(classify(&neg), classify(&v).negated());
    }

    #[test]
    fn short_series_is_an_error() {
        assert!(classify_values(&[0.0; 15], 1.0, &VerdictPolicy::default()).is_err());
    }

    #[test]
    fn slow_drift_is_undetermined() {
        // shrinking increments that are still far above the tolerance
        let v: Vec<f64> = (0..60).map(|k| -(0.8f64.powi(k))).collect();
        assert_eq!(classify(&v), LimitVerdict::Undetermined);
    }
}

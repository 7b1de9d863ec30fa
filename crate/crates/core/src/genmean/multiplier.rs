//! Means regularized by a damping multiplier `φ_λ → 1` as `λ → 0+`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::scan::partial_mean_at;
use super::{classify_values, Classification, LambdaSchedule, VerdictPolicy};
use crate::error::{invalid, Error, Result};
use crate::measure::{Endpoints, MeasureSpec};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MultiplierFamily {
    /// Indicator of `[center - 1/λ, center + 1/λ]`.
    Window { center: f64 },
    /// `e^{-λx}` for `x > 0` and `e^{λx} (1 + π c λ x)` for `x ≤ 0`.
    ExpTilt { c: f64 },
}

impl MultiplierFamily {
    pub fn phi(&self, lambda: f64, x: f64) -> f64 {
        match *self {
            MultiplierFamily::Window { center } => {
                if (x - center).abs() <= 1.0 / lambda {
                    1.0
                } else {
                    0.0
                }
            }
            MultiplierFamily::ExpTilt { c } => {
                if x > 0.0 {
                    (-lambda * x).exp()
                } else {
                    (lambda * x).exp() * (1.0 + PI * c * lambda * x)
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MultiplierPolicy {
    /// Exponential families are integrated over `|x| ≤ cutoff / λ`.
    pub cutoff: f64,
    /// Largest admissible bound on the discarded remainder.
    pub remainder_tol: f64,
}

impl Default for MultiplierPolicy {
    fn default() -> Self {
        Self {
            cutoff: 40.0,
            remainder_tol: 1e-8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MultiplierPoint {
    pub lambda: f64,
    /// `E[φ_λ(X) X]`.
    pub value: f64,
    /// `E[φ_λ(X)]`.
    pub weight: f64,
    /// Certified bound on the part of `E[φ_λ(X) X]` outside the integration range.
    pub remainder_bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MultiplierSeries {
    pub family: MultiplierFamily,
    pub points: Vec<MultiplierPoint>,
    pub classification: Classification,
}

/// `E[φ_λ(X) X]` and `E[φ_λ(X)]` for one `λ > 0`.
pub fn multiplier_point(
    m: &MeasureSpec,
    family: &MultiplierFamily,
    lambda: f64,
    policy: &MultiplierPolicy,
) -> Result<MultiplierPoint> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(invalid(format!("lambda must be positive, got {lambda}")));
    }
    match *family {
        MultiplierFamily::Window { center } => {
            // shares the anti-collision rule with the truncation scans
            let p = partial_mean_at(m, center, 1.0 / lambda)?;
            Ok(MultiplierPoint {
                lambda,
                value: p.partial_mean,
                weight: p.window_mass,
                remainder_bound: 0.0,
            })
        }
        MultiplierFamily::ExpTilt { c } => {
            let t = policy.cutoff / lambda;
            // |x φ(x)| is decreasing in |x| beyond 1/λ, so its value at the cutoff
            // bounds the integrand on each discarded tail
            let envelope = |slope: f64| t * (-policy.cutoff).exp() * slope;
            let upper = envelope(1.0) * m.prob_above(t, false)?;
            let lower = envelope(1.0 + PI * c.abs() * policy.cutoff) * m.prob_below(-t, false)?;
            for (tail, bound) in [("upper", upper), ("lower", lower)] {
                if !(bound <= policy.remainder_tol) {
                    return Err(Error::Integrability {
                        tail,
                        bound,
                        tolerance: policy.remainder_tol,
                    });
                }
            }
            let value = m.expect_window(&|x| x * family.phi(lambda, x), -t, t, Endpoints::CLOSED)?;
            let weight = m.expect_window(&|x| family.phi(lambda, x), -t, t, Endpoints::CLOSED)?;
            Ok(MultiplierPoint {
                lambda,
                value,
                weight,
                remainder_bound: upper + lower,
            })
        }
    }
}

/// Multiplier means along a decreasing `λ` sequence, classified like a truncation series.
pub fn multiplier_mean_at(
    m: &MeasureSpec,
    family: &MultiplierFamily,
    lambdas: &[f64],
    policy: &MultiplierPolicy,
    verdict: &VerdictPolicy,
) -> Result<MultiplierSeries> {
    if lambdas.windows(2).any(|w| w[1] >= w[0]) {
        return Err(invalid("lambda sequence must be strictly decreasing"));
    }
    let points = lambdas
        .iter()
        .map(|&l| multiplier_point(m, family, l, policy))
        .collect::<Result<Vec<_>>>()?;
    let values: Vec<f64> = points.iter().map(|p| p.value).collect();
    let horizon = lambdas.last().map_or(f64::NAN, |l| 1.0 / l);
    Ok(MultiplierSeries {
        family: *family,
        classification: classify_values(&values, horizon, verdict)?,
        points,
    })
}

pub fn multiplier_mean(
    m: &MeasureSpec,
    family: &MultiplierFamily,
    sched: &LambdaSchedule,
    policy: &MultiplierPolicy,
    verdict: &VerdictPolicy,
) -> Result<MultiplierSeries> {
    sched.validate()?;
    multiplier_mean_at(m, family, &sched.values(), policy, verdict)
}

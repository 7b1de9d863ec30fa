//! Ordinary, weak and doubly weak means of one measure.

use serde::{Deserialize, Serialize};

use super::scan::{limit_scan, one_sided_scan, tail_mass_curve, Side, TailPoint};
use super::taxonomy::{theorem31_classify, CaseTag, Theorem31Report, DEFAULT_C_GRID};
use super::{classify_series, Classification, LimitVerdict, TruncationSchedule, VerdictPolicy};
use crate::error::Result;
use crate::measure::MeasureSpec;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MeanValue {
    Finite {
        value: f64,
    },
    PlusInfinity,
    MinusInfinity,
    /// Shown not to exist (at the schedule horizon).
    Absent,
    Undetermined,
}

impl MeanValue {
    pub fn finite(&self) -> Option<f64> {
        match self {
            MeanValue::Finite { value } => Some(*value),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TailDecay {
    Decays,
    Persists,
    Undetermined,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeanLadder {
    pub ordinary: MeanValue,
    pub weak: MeanValue,
    pub doubly_weak: MeanValue,
    pub positive_side: Classification,
    pub negative_side: Classification,
    /// Symmetric truncation limit `L(0)`.
    pub symmetric: Classification,
    pub tail_decay: TailDecay,
    pub tail_curve: Vec<TailPoint>,
    pub taxonomy: Theorem31Report,
    /// Breaches of "ordinary ⇒ weak ⇒ doubly weak" with equal values; empty when consistent.
    pub violations: Vec<String>,
}

/// Decides decay of `n P(|X| > n)` from the last verdict window of the curve.
pub fn tail_decay(curve: &[TailPoint], policy: &VerdictPolicy) -> TailDecay {
    let w = policy.window.min(curve.len());
    if w == 0 {
        return TailDecay::Undetermined;
    }
    let last = &curve[curve.len() - w..];
    let max = last.iter().map(|p| p.n_tail).fold(f64::NEG_INFINITY, f64::max);
    let min = last.iter().map(|p| p.n_tail).fold(f64::INFINITY, f64::min);
    if max <= policy.tail_zero_tol {
        TailDecay::Decays
    } else if min > policy.tail_zero_tol {
        TailDecay::Persists
    } else {
        TailDecay::Undetermined
    }
}

fn ordinary_from_sides(pos: &LimitVerdict, neg: &LimitVerdict) -> MeanValue {
    use LimitVerdict::*;
    match (pos, neg) {
        (Converged { value: a }, Converged { value: b }) => MeanValue::Finite { value: a + b },
        (DivergesPlus, Converged { .. }) => MeanValue::PlusInfinity,
        (Converged { .. }, DivergesMinus) => MeanValue::MinusInfinity,
        (DivergesPlus, DivergesMinus) => MeanValue::Absent,
        _ => MeanValue::Undetermined,
    }
}

/// Computes all three means and checks that they nest.
pub fn mean_ladder(m: &MeasureSpec, sched: &TruncationSchedule, policy: &VerdictPolicy) -> Result<MeanLadder> {
    mean_ladder_on_grid(m, &DEFAULT_C_GRID, sched, policy)
}

pub fn mean_ladder_on_grid(
    m: &MeasureSpec,
    grid: &[f64],
    sched: &TruncationSchedule,
    policy: &VerdictPolicy,
) -> Result<MeanLadder> {
    let positive_side = classify_series(&one_sided_scan(m, Side::Positive, sched)?, policy)?;
    let negative_side = classify_series(&one_sided_scan(m, Side::Negative, sched)?, policy)?;
    let ordinary = ordinary_from_sides(&positive_side.verdict, &negative_side.verdict);

    let symmetric = classify_series(&limit_scan(m, 0.0, sched)?, policy)?;
    let tail_curve = tail_mass_curve(m, &sched.values())?;
    let decay = tail_decay(&tail_curve, policy);
    let weak = match (symmetric.verdict, decay) {
        (LimitVerdict::Converged { value }, TailDecay::Decays) => MeanValue::Finite { value },
        (LimitVerdict::Undetermined, _) | (_, TailDecay::Undetermined) => MeanValue::Undetermined,
        _ => MeanValue::Absent,
    };

    let taxonomy = theorem31_classify(m, grid, sched, policy)?;
    let doubly_weak = match taxonomy.case {
        CaseTag::IIIFinite => MeanValue::Finite {
            value: taxonomy.common_value.expect("case III_finite carries its value"),
        },
        CaseTag::Undetermined => MeanValue::Undetermined,
        _ => MeanValue::Absent,
    };

    let mut violations = Vec::new();
    let tol = 2.0 * symmetric.evidence.conv_tol;
    let rungs = [("ordinary", ordinary), ("weak", weak), ("doubly weak", doubly_weak)];
    for pair in rungs.windows(2) {
        let ((upper_name, upper), (lower_name, lower)) = (pair[0], pair[1]);
        if let Some(u) = upper.finite() {
            match lower {
                MeanValue::Finite { value } if (value - u).abs() <= tol => {}
                MeanValue::Finite { value } => {
                    violations.push(format!("{upper_name} mean {u} differs from {lower_name} mean {value}"))
                }
                MeanValue::Undetermined => {}
                other => violations.push(format!(
                    "{upper_name} mean {u} exists but {lower_name} mean is {other:?}"
                )),
            }
        }
    }

    Ok(MeanLadder {
        ordinary,
        weak,
        doubly_weak,
        positive_side,
        negative_side,
        symmetric,
        tail_decay: decay,
        tail_curve,
        taxonomy,
        violations,
    })
}

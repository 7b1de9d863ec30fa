//! Aggregating per-center verdicts into one of the five possible behaviors of
//! `c ↦ L(c)`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::scan::limit_scan_refined;
use super::{classify_series, Classification, LimitVerdict, TruncationSchedule, VerdictPolicy};
use crate::error::{invalid, Result};
use crate::measure::MeasureSpec;

pub const DEFAULT_C_GRID: [f64; 7] = [-4.0, -2.0, -1.0, 0.0, 1.0, 2.0, 4.0];

/// The behavior of `L(c)` over all centers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CaseTag {
    /// No center has a finite limit.
    I,
    /// Exactly one center has a finite limit.
    II,
    /// Every center has the same finite limit.
    #[serde(rename = "III_finite")]
    IIIFinite,
    /// `L(c) = +∞` for every center.
    #[serde(rename = "III_plus_inf")]
    IIIPlusInf,
    /// `L(c) = -∞` for every center.
    #[serde(rename = "III_minus_inf")]
    IIIMinusInf,
    /// `+∞` above a threshold center, no limit below it.
    IV,
    /// `-∞` below a threshold center, no limit above it.
    V,
    Undetermined,
}

impl CaseTag {
    pub fn as_str(self) -> &'static str {
        match self {
            CaseTag::I => "I",
            CaseTag::II => "II",
            CaseTag::IIIFinite => "III_finite",
            CaseTag::IIIPlusInf => "III_plus_inf",
            CaseTag::IIIMinusInf => "III_minus_inf",
            CaseTag::IV => "IV",
            CaseTag::V => "V",
            CaseTag::Undetermined => "Undetermined",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CenterVerdict {
    pub center: f64,
    pub classification: Classification,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Theorem31Report {
    pub case: CaseTag,
    pub per_center: Vec<CenterVerdict>,
    /// The unique converging center (case II).
    pub unique_center: Option<f64>,
    /// Threshold estimate and its half-uncertainty (cases IV and V).
    pub threshold: Option<f64>,
    pub threshold_uncertainty: Option<f64>,
    /// The common finite limit (case III_finite).
    pub common_value: Option<f64>,
    pub horizon: f64,
    pub diagnostics: Vec<String>,
}

fn validate_grid(grid: &[f64]) -> Result<Vec<f64>> {
    if grid.len() < 5 {
        return Err(invalid("center grid needs at least 5 points"));
    }
    if grid.iter().any(|c| !c.is_finite()) {
        return Err(invalid("center grid must be finite"));
    }
    let mut g = grid.to_vec();
    g.sort_by(f64::total_cmp);
    g.dedup();
    if g.len() != grid.len() {
        return Err(invalid("center grid has duplicate points"));
    }
    if !g.contains(&0.0) || g[0] >= 0.0 || g[g.len() - 1] <= 0.0 {
        return Err(invalid("center grid must contain 0 and points of both signs"));
    }
    Ok(g)
}

/// Scans `L(c)` for every center of the grid (concurrently) and aggregates.
pub fn theorem31_classify(
    m: &MeasureSpec,
    grid: &[f64],
    sched: &TruncationSchedule,
    policy: &VerdictPolicy,
) -> Result<Theorem31Report> {
    let grid = validate_grid(grid)?;
    sched.validate()?;
    policy.validate()?;
    let per_center = grid
        .par_iter()
        .map(|&c| {
            let series = limit_scan_refined(m, c, sched, policy.refine_cap)?;
            Ok(CenterVerdict {
                center: c,
                classification: classify_series(&series, policy)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(aggregate(per_center, sched.horizon()))
}

/// Maps per-center verdicts (sorted by center) to a case.
pub fn aggregate(per_center: Vec<CenterVerdict>, horizon: f64) -> Theorem31Report {
    let mut report = Theorem31Report {
        case: CaseTag::Undetermined,
        per_center,
        unique_center: None,
        threshold: None,
        threshold_uncertainty: None,
        common_value: None,
        horizon,
        diagnostics: Vec::new(),
    };
    let verdicts: Vec<(f64, LimitVerdict, f64)> = report
        .per_center
        .iter()
        .map(|v| (v.center, v.classification.verdict, v.classification.evidence.conv_tol))
        .collect();
    let count = |f: fn(&LimitVerdict) -> bool| verdicts.iter().filter(|(_, v, _)| f(v)).count();
    let n = verdicts.len();
    let undetermined = count(|v| matches!(v, LimitVerdict::Undetermined));
    let converged = count(LimitVerdict::is_converged);
    let plus = count(|v| matches!(v, LimitVerdict::DivergesPlus));
    let minus = count(|v| matches!(v, LimitVerdict::DivergesMinus));

    if undetermined > 0 {
        report.diagnostics.push(format!(
            "{undetermined} of {n} centers undetermined at horizon {horizon}"
        ));
        return report;
    }

    // finite limits at two centers must agree
    let finite: Vec<(f64, f64, f64)> = verdicts
        .iter()
        .filter_map(|(c, v, tol)| v.value().map(|x| (*c, x, *tol)))
        .collect();
    for pair in finite.windows(2) {
        let (c1, v1, t1) = pair[0];
        let (c2, v2, t2) = pair[1];
        if (v1 - v2).abs() > 2.0 * t1.max(t2) {
            report
                .diagnostics
                .push(format!("finite limits disagree: L({c1}) = {v1}, L({c2}) = {v2}"));
            return report;
        }
    }

    if converged == n {
        let mean = finite.iter().map(|f| f.1).sum::<f64>() / n as f64;
        report.case = CaseTag::IIIFinite;
        report.common_value = Some(mean);
        return report;
    }
    if converged >= 2 {
        report
            .diagnostics
            .push("finite limits at two centers imply finite limits everywhere, but some centers differ".into());
        return report;
    }
    if converged == 1 {
        if plus + minus > 0 {
            report
                .diagnostics
                .push("a finite limit at one center next to infinite limits elsewhere".into());
            return report;
        }
        report.case = CaseTag::II;
        report.unique_center = Some(finite[0].0);
        return report;
    }
    if plus == n {
        report.case = CaseTag::IIIPlusInf;
        return report;
    }
    if minus == n {
        report.case = CaseTag::IIIMinusInf;
        return report;
    }
    if plus == 0 && minus == 0 {
        report.case = CaseTag::I;
        return report;
    }
    if plus > 0 && minus > 0 {
        report
            .diagnostics
            .push("divergence to both +∞ and -∞ across centers".into());
        return report;
    }

    // one-sided divergence must occupy an upper (IV) or lower (V) set of centers
    let divergent: Vec<bool> = verdicts
        .iter()
        .map(|(_, v, _)| matches!(v, LimitVerdict::DivergesPlus | LimitVerdict::DivergesMinus))
        .collect();
    let first_div = divergent.iter().position(|d| *d).expect("some center diverges");
    let last_div = divergent.iter().rposition(|d| *d).expect("some center diverges");
    let (case, boundary) = if plus > 0 && divergent[first_div..].iter().all(|d| *d) {
        (CaseTag::IV, (verdicts[first_div - 1].0, verdicts[first_div].0))
    } else if minus > 0 && divergent[..=last_div].iter().all(|d| *d) {
        (CaseTag::V, (verdicts[last_div].0, verdicts[last_div + 1].0))
    } else {
        report
            .diagnostics
            .push("divergent centers do not form a half-line".into());
        return report;
    };
    report.case = case;
    report.threshold = Some(0.5 * (boundary.0 + boundary.1));
    report.threshold_uncertainty = Some(0.5 * (boundary.1 - boundary.0));
    report
}

//! Truncated-window first moments along a schedule.

use serde::{Deserialize, Serialize};

use super::{TruncationSchedule, VerdictPolicy};
use crate::error::{invalid, Result};
use crate::measure::{Endpoints, MeasureSpec};

/// Relative nudge applied to a half-width whose window edge lands on an atom.
pub const ATOM_JITTER: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeriesPoint {
    /// Window half-width actually used (after any jitter).
    pub m: f64,
    pub partial_mean: f64,
    pub window_mass: f64,
}

/// `s(M) = ∫_{[c-M, c+M]} x dP` along increasing `M`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartialMeanSeries {
    pub center: f64,
    pub horizon: f64,
    pub points: Vec<SeriesPoint>,
}

impl PartialMeanSeries {
    pub fn values(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.partial_mean).collect()
    }

    pub fn half_widths(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.m).collect()
    }
}

fn has_atom_at(m: &MeasureSpec, x: f64) -> Result<bool> {
    if m.is_continuous() {
        return Ok(false);
    }
    Ok(m.window(x, x, Endpoints::CLOSED)?.mass > 0.0)
}

/// Half-width `M`, nudged outward if either window edge sits exactly on an atom.
pub fn generic_half_width(m: &MeasureSpec, center: f64, half_width: f64) -> Result<f64> {
    let mut w = half_width;
    for _ in 0..8 {
        if !(has_atom_at(m, center - w)? || has_atom_at(m, center + w)?) {
            return Ok(w);
        }
        w += ATOM_JITTER * w.max(1.0);
    }
    Err(invalid(format!(
        "could not move the window edge at {half_width} off the atoms"
    )))
}

/// One point of the series at half-width `M` (after anti-collision jitter).
pub fn partial_mean_at(m: &MeasureSpec, center: f64, half_width: f64) -> Result<SeriesPoint> {
    let w = generic_half_width(m, center, half_width)?;
    let stats = m.window(center - w, center + w, Endpoints::CLOSED)?;
    Ok(SeriesPoint {
        m: w,
        partial_mean: stats.first_moment,
        window_mass: stats.mass,
    })
}

fn scan_at(m: &MeasureSpec, center: f64, half_widths: &[f64], horizon: f64) -> Result<PartialMeanSeries> {
    if !center.is_finite() {
        return Err(invalid(format!("center must be finite, got {center}")));
    }
    let points = half_widths
        .iter()
        .map(|&w| partial_mean_at(m, center, w))
        .collect::<Result<Vec<_>>>()?;
    Ok(PartialMeanSeries {
        center,
        horizon,
        points,
    })
}

/// Partial means over `[c - M_k, c + M_k]` for every `M_k` of the schedule.
pub fn limit_scan(m: &MeasureSpec, center: f64, sched: &TruncationSchedule) -> Result<PartialMeanSeries> {
    sched.validate()?;
    scan_at(m, center, &sched.values(), sched.horizon())
}

/// Like [`limit_scan`], with extra half-widths between consecutive atom distances
/// `|z - c|` inside the schedule range.
///
/// Between two such distances the partial mean is constant, so the extra points
/// visit every value the series takes, including ones that a geometric schedule
/// skips (e.g. windows that hold `+z` but not `-z`). Measures with more than
/// `cap` atoms in range fall back to the plain schedule.
pub fn limit_scan_refined(
    m: &MeasureSpec,
    center: f64,
    sched: &TruncationSchedule,
    cap: usize,
) -> Result<PartialMeanSeries> {
    sched.validate()?;
    let base = sched.values();
    let (lo, hi) = (sched.m0, sched.horizon());
    let mut widths = base.clone();
    if let Some(locations) = m.locations_within(center, hi, cap) {
        let mut d: Vec<f64> = locations
            .iter()
            .map(|z| (z - center).abs())
            .filter(|d| *d >= lo && *d <= hi)
            .collect();
        d.sort_by(f64::total_cmp);
        d.dedup();
        widths.extend(d.windows(2).map(|p| 0.5 * (p[0] + p[1])));
        widths.sort_by(f64::total_cmp);
        widths.dedup();
    }
    scan_at(m, center, &widths, hi)
}

/// `∫_{[a - M, b + K]} x dP`.
pub fn asym_partial_mean(m: &MeasureSpec, a: f64, b: f64, lower: f64, upper: f64) -> Result<f64> {
    if a > b {
        return Err(invalid(format!("need a ≤ b, got a = {a}, b = {b}")));
    }
    if lower < 0.0 || upper < 0.0 {
        return Err(invalid("window extensions must be nonnegative"));
    }
    m.window_first_moment(a - lower, b + upper)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TailPoint {
    pub n: f64,
    pub n_tail: f64,
}

/// `n · P(|X| > n)` along an increasing schedule.
pub fn tail_mass_curve(m: &MeasureSpec, ns: &[f64]) -> Result<Vec<TailPoint>> {
    if ns.windows(2).any(|w| w[1] <= w[0]) {
        return Err(invalid("tail schedule must be strictly increasing"));
    }
    ns.iter()
        .map(|&n| {
            Ok(TailPoint {
                n,
                n_tail: n * m.tail_probability(n)?,
            })
        })
        .collect()
}

/// Which half-line a one-sided moment scan covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Positive,
    Negative,
}

/// `∫_{[0, M]} x dP` or `∫_{[-M, 0]} x dP` along the schedule.
pub fn one_sided_scan(m: &MeasureSpec, side: Side, sched: &TruncationSchedule) -> Result<PartialMeanSeries> {
    sched.validate()?;
    let points = sched
        .values()
        .into_iter()
        .map(|w| {
            let (lo, hi) = match side {
                Side::Positive => (0.0, w),
                Side::Negative => (-w, 0.0),
            };
            let s = m.window(lo, hi, Endpoints::CLOSED)?;
            Ok(SeriesPoint {
                m: w,
                partial_mean: s.first_moment,
                window_mass: s.mass,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PartialMeanSeries {
        center: 0.0,
        horizon: sched.horizon(),
        points,
    })
}

/// Classification of a series under `policy`.
pub fn classify_series(series: &PartialMeanSeries, policy: &VerdictPolicy) -> Result<super::Classification> {
    super::classify_values(&series.values(), series.horizon, policy)
}

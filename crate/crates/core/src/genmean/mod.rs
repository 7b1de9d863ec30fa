//! Truncation limits `L(c)`, their classification over centers, the mean ladder and
//! multiplier-regularized means.

mod ladder;
mod multiplier;
mod scan;
mod schedule;
mod taxonomy;
mod verdict;

pub use ladder::{mean_ladder, mean_ladder_on_grid, tail_decay, MeanLadder, MeanValue, TailDecay};
pub use multiplier::{
    multiplier_mean, multiplier_mean_at, multiplier_point, MultiplierFamily, MultiplierPoint, MultiplierPolicy,
    MultiplierSeries,
};
pub use scan::{
    asym_partial_mean, classify_series, generic_half_width, limit_scan, limit_scan_refined, one_sided_scan,
    partial_mean_at, tail_mass_curve, PartialMeanSeries, SeriesPoint, Side, TailPoint, ATOM_JITTER,
};
pub use schedule::{LambdaSchedule, TruncationSchedule};
pub use taxonomy::{aggregate, theorem31_classify, CaseTag, CenterVerdict, Theorem31Report, DEFAULT_C_GRID};
pub use verdict::{classify_values, Classification, Evidence, LimitVerdict, VerdictPolicy};

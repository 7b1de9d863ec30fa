//! Probability measures on the real line and the window integrals the mean
//! routines are built from.

mod comb;
mod density;
mod doc;
mod empirical;

pub use comb::{
    normalize_comb, zeta, AtomGenerator, AtomicComb, BuiltinComb, CombFamily, CustomComb, TailBound, DEFAULT_MASS_TOL,
};
pub use density::{half_mass_constant, CustomDensity, DensityKind, DensityMeasure, RealFn};
pub use doc::{MeasureDoc, MeasureDocument};
pub use empirical::EmpiricalMeasure;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// A point mass.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub location: f64,
    pub weight: f64,
}

impl Atom {
    pub const fn raw(location: f64, weight: f64) -> Self {
        Self { location, weight }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.location.is_finite() || !(self.weight > 0.0) || !self.weight.is_finite() {
            return Err(Error::Construction(format!(
                "atom at {} with weight {} is not a finite positive point mass",
                self.location, self.weight
            )));
        }
        Ok(())
    }
}

/// Which ends of a window `[lo, hi]` belong to it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Endpoints {
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl Default for Endpoints {
    fn default() -> Self {
        Self::CLOSED
    }
}

impl Endpoints {
    pub const CLOSED: Self = Self {
        lo_closed: true,
        hi_closed: true,
    };
    pub const OPEN: Self = Self {
        lo_closed: false,
        hi_closed: false,
    };

    pub fn contains(self, lo: f64, hi: f64, x: f64) -> bool {
        let above = if self.lo_closed { x >= lo } else { x > lo };
        let below = if self.hi_closed { x <= hi } else { x < hi };
        above && below
    }

    fn swapped(self) -> Self {
        Self {
            lo_closed: self.hi_closed,
            hi_closed: self.lo_closed,
        }
    }
}

/// Mass and first moment of a measure restricted to a window.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct WindowStats {
    pub mass: f64,
    pub first_moment: f64,
}

/// A probability measure together with the transformations applied to it.
#[derive(Debug, Clone)]
pub enum MeasureSpec {
    Atomic(AtomicComb),
    Density(DensityMeasure),
    Empirical(EmpiricalMeasure),
    /// Law of `X + a`.
    Shift(Box<MeasureSpec>, f64),
    /// Law of `λ X`, `λ ≠ 0`.
    Scale(Box<MeasureSpec>, f64),
    /// Law of `-X`.
    Negate(Box<MeasureSpec>),
}

impl From<AtomicComb> for MeasureSpec {
    fn from(c: AtomicComb) -> Self {
        MeasureSpec::Atomic(c)
    }
}

impl From<DensityMeasure> for MeasureSpec {
    fn from(d: DensityMeasure) -> Self {
        MeasureSpec::Density(d)
    }
}

impl From<EmpiricalMeasure> for MeasureSpec {
    fn from(e: EmpiricalMeasure) -> Self {
        MeasureSpec::Empirical(e)
    }
}

impl MeasureSpec {
    pub fn shift(self, a: f64) -> Result<Self> {
        if !a.is_finite() {
            return Err(invalid(format!("shift by {a}")));
        }
        Ok(MeasureSpec::Shift(Box::new(self), a))
    }

    pub fn scale(self, lambda: f64) -> Result<Self> {
        if lambda == 0.0 || !lambda.is_finite() {
            return Err(invalid(format!(
                "scale factor must be finite and nonzero, got {lambda}"
            )));
        }
        Ok(MeasureSpec::Scale(Box::new(self), lambda))
    }

    pub fn negate(self) -> Self {
        MeasureSpec::Negate(Box::new(self))
    }

    pub fn name(&self) -> String {
        match self {
            MeasureSpec::Atomic(c) => c.name(),
            MeasureSpec::Density(d) => d.name(),
            MeasureSpec::Empirical(e) => format!("empirical({} samples)", e.len()),
            MeasureSpec::Shift(m, a) => format!("shift({}, {a})", m.name()),
            MeasureSpec::Scale(m, l) => format!("scale({}, {l})", m.name()),
            MeasureSpec::Negate(m) => format!("negate({})", m.name()),
        }
    }

    /// Mass and first moment over the window `lo..hi` with the given endpoint convention.
    pub fn window(&self, lo: f64, hi: f64, ends: Endpoints) -> Result<WindowStats> {
        if lo.is_nan() || hi.is_nan() {
            return Err(invalid("window bounds must not be NaN"));
        }
        if hi < lo {
            return Ok(WindowStats::default());
        }
        match self {
            MeasureSpec::Atomic(c) => c.window(lo, hi, ends),
            MeasureSpec::Density(d) => d.window(lo, hi),
            MeasureSpec::Empirical(e) => Ok(e.window(lo, hi, ends)),
            MeasureSpec::Shift(m, a) => {
                let w = m.window(lo - a, hi - a, ends)?;
                Ok(WindowStats {
                    mass: w.mass,
                    first_moment: w.first_moment + a * w.mass,
                })
            }
            MeasureSpec::Scale(m, l) => {
                let w = if *l > 0.0 {
                    m.window(lo / l, hi / l, ends)?
                } else {
                    m.window(hi / l, lo / l, ends.swapped())?
                };
                Ok(WindowStats {
                    mass: w.mass,
                    first_moment: l * w.first_moment,
                })
            }
            MeasureSpec::Negate(m) => {
                let w = m.window(-hi, -lo, ends.swapped())?;
                Ok(WindowStats {
                    mass: w.mass,
                    first_moment: -w.first_moment,
                })
            }
        }
    }

    /// `P(lo ≤ X ≤ hi)`.
    pub fn window_mass(&self, lo: f64, hi: f64) -> Result<f64> {
        Ok(self.window(lo, hi, Endpoints::CLOSED)?.mass)
    }

    /// `∫_{[lo, hi]} x dP`.
    pub fn window_first_moment(&self, lo: f64, hi: f64) -> Result<f64> {
        Ok(self.window(lo, hi, Endpoints::CLOSED)?.first_moment)
    }

    /// `∫ g dP` over the window `lo..hi`; both bounds must be finite for densities.
    pub fn expect_window(&self, g: &dyn Fn(f64) -> f64, lo: f64, hi: f64, ends: Endpoints) -> Result<f64> {
        if hi < lo {
            return Ok(0.0);
        }
        match self {
            MeasureSpec::Atomic(c) => c.expect_window(g, lo, hi, ends),
            MeasureSpec::Density(d) => d.expect_window(g, lo, hi),
            MeasureSpec::Empirical(e) => Ok(e.expect_window(g, lo, hi, ends)),
            MeasureSpec::Shift(m, a) => {
                let a = *a;
                m.expect_window(&|y| g(y + a), lo - a, hi - a, ends)
            }
            MeasureSpec::Scale(m, l) => {
                let l = *l;
                if l > 0.0 {
                    m.expect_window(&|y| g(l * y), lo / l, hi / l, ends)
                } else {
                    m.expect_window(&|y| g(l * y), hi / l, lo / l, ends.swapped())
                }
            }
            MeasureSpec::Negate(m) => m.expect_window(&|y| g(-y), -hi, -lo, ends.swapped()),
        }
    }

    /// `P(X > t)`, or `P(X ≥ t)` when `inclusive`.
    pub fn prob_above(&self, t: f64, inclusive: bool) -> Result<f64> {
        match self {
            MeasureSpec::Atomic(c) => c.prob_above(t, inclusive),
            MeasureSpec::Density(d) => d.prob_above(t),
            MeasureSpec::Empirical(e) => Ok(e.prob_above(t, inclusive)),
            MeasureSpec::Shift(m, a) => m.prob_above(t - a, inclusive),
            MeasureSpec::Scale(m, l) => {
                if *l > 0.0 {
                    m.prob_above(t / l, inclusive)
                } else {
                    m.prob_below(t / l, inclusive)
                }
            }
            MeasureSpec::Negate(m) => m.prob_below(-t, inclusive),
        }
    }

    /// `P(X < t)`, or `P(X ≤ t)` when `inclusive`.
    pub fn prob_below(&self, t: f64, inclusive: bool) -> Result<f64> {
        match self {
            MeasureSpec::Atomic(c) => c.prob_below(t, inclusive),
            MeasureSpec::Density(d) => d.prob_below(t),
            MeasureSpec::Empirical(e) => Ok(e.prob_below(t, inclusive)),
            MeasureSpec::Shift(m, a) => m.prob_below(t - a, inclusive),
            MeasureSpec::Scale(m, l) => {
                if *l > 0.0 {
                    m.prob_below(t / l, inclusive)
                } else {
                    m.prob_above(t / l, inclusive)
                }
            }
            MeasureSpec::Negate(m) => m.prob_above(-t, inclusive),
        }
    }

    /// `P(|X| > t)` for `t ≥ 0`.
    pub fn tail_probability(&self, t: f64) -> Result<f64> {
        if t < 0.0 {
            return Err(invalid(format!("tail threshold must be nonnegative, got {t}")));
        }
        Ok(self.prob_above(t, false)? + self.prob_below(-t, false)?)
    }

    /// Atom locations within `radius` of `center`, `None` when there are more than `cap`.
    /// Measures without atoms return an empty list.
    pub fn locations_within(&self, center: f64, radius: f64, cap: usize) -> Option<Vec<f64>> {
        match self {
            MeasureSpec::Atomic(c) => {
                let mut v = c.locations_within(center.abs() + radius, cap)?;
                v.retain(|x| (x - center).abs() <= radius);
                Some(v)
            }
            MeasureSpec::Density(_) => Some(Vec::new()),
            MeasureSpec::Empirical(e) => {
                let v = e.locations_within(center, radius);
                (v.len() <= cap).then_some(v)
            }
            MeasureSpec::Shift(m, a) => Some(
                m.locations_within(center - a, radius, cap)?
                    .into_iter()
                    .map(|y| y + a)
                    .collect(),
            ),
            MeasureSpec::Scale(m, l) => Some(
                m.locations_within(center / l, radius / l.abs(), cap)?
                    .into_iter()
                    .map(|y| y * l)
                    .collect(),
            ),
            MeasureSpec::Negate(m) => Some(
                m.locations_within(-center, radius, cap)?
                    .into_iter()
                    .map(|y| -y)
                    .collect(),
            ),
        }
    }

    /// Whether the measure has no atoms.
    pub fn is_continuous(&self) -> bool {
        match self {
            MeasureSpec::Density(_) => true,
            MeasureSpec::Atomic(_) | MeasureSpec::Empirical(_) => false,
            MeasureSpec::Shift(m, _) | MeasureSpec::Scale(m, _) | MeasureSpec::Negate(m) => m.is_continuous(),
        }
    }
}

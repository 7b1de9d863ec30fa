//! Uniform measure on a finite sample.

use std::sync::Arc;

use super::{Endpoints, WindowStats};
use crate::error::{Error, Result};
use crate::sum::NeumaierSum;

#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalMeasure {
    sorted: Arc<[f64]>,
}

impl EmpiricalMeasure {
    pub fn new(mut samples: Vec<f64>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::Construction(
                "empirical measure needs at least one sample".into(),
            ));
        }
        if let Some(x) = samples.iter().find(|x| !x.is_finite()) {
            return Err(Error::Construction(format!("non-finite sample {x}")));
        }
        samples.sort_by(f64::total_cmp);
        Ok(Self { sorted: samples.into() })
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    pub fn samples(&self) -> &[f64] {
        &self.sorted
    }

    fn range(&self, lo: f64, hi: f64, ends: Endpoints) -> &[f64] {
        let start = if ends.lo_closed {
            self.sorted.partition_point(|x| *x < lo)
        } else {
            self.sorted.partition_point(|x| *x <= lo)
        };
        let end = if ends.hi_closed {
            self.sorted.partition_point(|x| *x <= hi)
        } else {
            self.sorted.partition_point(|x| *x < hi)
        };
        &self.sorted[start..end.max(start)]
    }

    pub(crate) fn window(&self, lo: f64, hi: f64, ends: Endpoints) -> WindowStats {
        let inside = self.range(lo, hi, ends);
        let n = self.sorted.len() as f64;
        WindowStats {
            mass: inside.len() as f64 / n,
            first_moment: inside.iter().copied().collect::<NeumaierSum>().value() / n,
        }
    }

    pub(crate) fn expect_window(&self, g: &dyn Fn(f64) -> f64, lo: f64, hi: f64, ends: Endpoints) -> f64 {
        let n = self.sorted.len() as f64;
        self.range(lo, hi, ends)
            .iter()
            .map(|x| g(*x))
            .collect::<NeumaierSum>()
            .value()
            / n
    }

    pub(crate) fn prob_above(&self, t: f64, inclusive: bool) -> f64 {
        let start = if inclusive {
            self.sorted.partition_point(|x| *x < t)
        } else {
            self.sorted.partition_point(|x| *x <= t)
        };
        (self.sorted.len() - start) as f64 / self.sorted.len() as f64
    }

    pub(crate) fn prob_below(&self, t: f64, inclusive: bool) -> f64 {
        let end = if inclusive {
            self.sorted.partition_point(|x| *x <= t)
        } else {
            self.sorted.partition_point(|x| *x < t)
        };
        end as f64 / self.sorted.len() as f64
    }

    pub(crate) fn locations_within(&self, center: f64, radius: f64) -> Vec<f64> {
        let mut v = self.range(center - radius, center + radius, Endpoints::CLOSED).to_vec();
        v.dedup();
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn windows_count_samples() {
        let e = EmpiricalMeasure::new(vec![3.0, -1.0, 2.0, 2.0]).unwrap();
        let w = e.window(-1.0, 2.0, Endpoints::CLOSED);
        assert_eq!(w.mass, 0.75);
        assert_eq!(w.first_moment, 0.75);
        assert_eq!(e.window(-1.0, 2.0, Endpoints::OPEN).mass, 0.0);
        assert_eq!(e.prob_above(2.0, true), 0.75);
        assert_eq!(e.prob_above(2.0, false), 0.25);
        assert_eq!(e.prob_below(2.0, false), 0.25);
        assert_eq!(e.locations_within(2.0, 1.0), vec![2.0, 3.0]);
    }

    #[test]
    fn rejects_empty_and_nan() {
        assert!(EmpiricalMeasure::new(vec![]).is_err());
        assert!(EmpiricalMeasure::new(vec![1.0, f64::NAN]).is_err());
    }
}

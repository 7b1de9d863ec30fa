use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Geometric window half-widths `M_k = m0 · ratio^k`, `k = 0..count`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TruncationSchedule {
    pub m0: f64,
    pub ratio: f64,
    pub count: usize,
}

impl Default for TruncationSchedule {
    fn default() -> Self {
        // non-dyadic, non-triadic so windows avoid the built-in atom locations
        Self {
            m0: 1.1,
            ratio: 1.5,
            count: 60,
        }
    }
}

impl TruncationSchedule {
    pub fn new(m0: f64, ratio: f64, count: usize) -> Result<Self> {
        let s = Self { m0, ratio, count };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.m0 > 0.0) || !self.m0.is_finite() {
            return Err(invalid(format!("schedule start must be positive, got {}", self.m0)));
        }
        if !(self.ratio > 1.0) || !self.ratio.is_finite() {
            return Err(invalid(format!("schedule ratio must exceed 1, got {}", self.ratio)));
        }
        if self.count == 0 {
            return Err(invalid("schedule must have at least one point"));
        }
        if !self.horizon().is_finite() {
            return Err(invalid("schedule overflows"));
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.count).map(|k| self.m0 * self.ratio.powi(k as i32)).collect()
    }

    /// The largest half-width `M_{K-1}`.
    pub fn horizon(&self) -> f64 {
        self.m0 * self.ratio.powi(self.count.saturating_sub(1) as i32)
    }
}

/// Geometric damping parameters `λ_k = start · ratio^k` decreasing to zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LambdaSchedule {
    pub start: f64,
    pub ratio: f64,
    pub count: usize,
}

impl Default for LambdaSchedule {
    fn default() -> Self {
        Self {
            start: 0.5,
            ratio: 0.5,
            count: 36,
        }
    }
}

impl LambdaSchedule {
    pub fn validate(&self) -> Result<()> {
        if !(self.start > 0.0) || !self.start.is_finite() {
            return Err(invalid(format!("lambda start must be positive, got {}", self.start)));
        }
        if !(self.ratio > 0.0 && self.ratio < 1.0) {
            return Err(invalid(format!("lambda ratio must lie in (0, 1), got {}", self.ratio)));
        }
        if self.count == 0 {
            return Err(invalid("lambda schedule must have at least one point"));
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.count)
            .map(|k| self.start * self.ratio.powi(k as i32))
            .collect()
    }
}

//! Run configuration, policy overrides and input documents.

use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use tailmean::genmean::{LambdaSchedule, MultiplierPolicy, TruncationSchedule, VerdictPolicy};
use tailmean::lln::DEFAULT_CUTOFF_TOL;
use tailmean::maxent::MaxEntPolicy;
use tailmean::QuadPolicy;

/// Every tunable tolerance, after `--tol` overrides.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Policies {
    pub quadrature: QuadPolicy,
    pub verdict: VerdictPolicy,
    pub multiplier: MultiplierPolicy,
    pub maxent: MaxEntPolicy,
    /// Comb sampling stops once the remaining weight is below this.
    pub comb_cutoff_tol: f64,
}

impl Default for Policies {
    fn default() -> Self {
        Self {
            quadrature: QuadPolicy::default(),
            verdict: VerdictPolicy::default(),
            multiplier: MultiplierPolicy::default(),
            maxent: MaxEntPolicy::default(),
            comb_cutoff_tol: DEFAULT_CUTOFF_TOL,
        }
    }
}

pub const TOL_NAMES: &[&str] = &[
    "abs_tol",
    "rel_tol",
    "max_subdivisions",
    "window",
    "conv_tol_rel",
    "div_threshold",
    "growth_ratio",
    "tail_zero_tol",
    "refine_cap",
    "cutoff",
    "remainder_tol",
    "feas_tol",
    "max_steps",
    "beta_limit",
    "armijo",
    "comb_cutoff_tol",
];

fn count(name: &str, value: f64) -> Result<usize> {
    if value < 0.0 || value.fract() != 0.0 || !value.is_finite() {
        bail!("{name} must be a nonnegative integer, got {value}");
    }
    Ok(value as usize)
}

impl Policies {
    pub fn set(&mut self, name: &str, value: f64) -> Result<()> {
        match name {
            "abs_tol" => self.quadrature.abs_tol = value,
            "rel_tol" => self.quadrature.rel_tol = value,
            "max_subdivisions" => self.quadrature.max_subdivisions = count(name, value)?,
            "window" => self.verdict.window = count(name, value)?,
            "conv_tol_rel" => self.verdict.conv_tol_rel = value,
            "div_threshold" => self.verdict.div_threshold = value,
            "growth_ratio" => self.verdict.growth_ratio = value,
            "tail_zero_tol" => self.verdict.tail_zero_tol = value,
            "refine_cap" => self.verdict.refine_cap = count(name, value)?,
            "cutoff" => self.multiplier.cutoff = value,
            "remainder_tol" => self.multiplier.remainder_tol = value,
            "feas_tol" => self.maxent.feas_tol = value,
            "max_steps" => self.maxent.max_steps = count(name, value)?,
            "beta_limit" => self.maxent.beta_limit = value,
            "armijo" => self.maxent.armijo = value,
            "comb_cutoff_tol" => self.comb_cutoff_tol = value,
            _ => bail!("unknown tolerance {name:?}; known names: {}", TOL_NAMES.join(", ")),
        }
        Ok(())
    }
}

/// Echo of everything that determines a run's results.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub subcommand: String,
    pub input: Option<String>,
    pub out: String,
    pub seed: u64,
    pub schedule: TruncationSchedule,
    pub lambda_schedule: LambdaSchedule,
    pub c_grid: Vec<f64>,
    pub policies: Policies,
    /// Subcommand-specific options.
    pub options: serde_json::Value,
}

pub fn parse_schedule(s: &str) -> Result<TruncationSchedule, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let [m0, r, k] = parts.as_slice() else {
        return Err(format!("expected M0,r,K, got {s:?}"));
    };
    let m0: f64 = m0.parse().map_err(|e| format!("M0: {e}"))?;
    let r: f64 = r.parse().map_err(|e| format!("r: {e}"))?;
    let k: usize = k.parse().map_err(|e| format!("K: {e}"))?;
    TruncationSchedule::new(m0, r, k).map_err(|e| e.to_string())
}

pub fn parse_lambda_schedule(s: &str) -> Result<LambdaSchedule, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let [start, r, k] = parts.as_slice() else {
        return Err(format!("expected start,ratio,count, got {s:?}"));
    };
    let sched = LambdaSchedule {
        start: start.parse().map_err(|e| format!("start: {e}"))?,
        ratio: r.parse().map_err(|e| format!("ratio: {e}"))?,
        count: k.parse().map_err(|e| format!("count: {e}"))?,
    };
    sched.validate().map_err(|e| e.to_string())?;
    Ok(sched)
}

pub fn parse_tol(s: &str) -> Result<(String, f64), String> {
    let (name, value) = s
        .split_once('=')
        .ok_or_else(|| format!("expected NAME=VALUE, got {s:?}"))?;
    let name = name.trim();
    if !TOL_NAMES.contains(&name) {
        return Err(format!(
            "unknown tolerance {name:?}; known names: {}",
            TOL_NAMES.join(", ")
        ));
    }
    let value: f64 = value.trim().parse().map_err(|e| format!("{name}: {e}"))?;
    Ok((name.to_string(), value))
}

pub fn read_document<T: serde::de::DeserializeOwned>(path: Option<&Path>) -> Result<T> {
    let path = path.context("this subcommand needs --input")?;
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schedule_flags() {
        let s = parse_schedule("2,1.5,10").unwrap();
        assert_eq!((s.m0, s.ratio, s.count), (2.0, 1.5, 10));
        assert!(parse_schedule("2,0.5,10").is_err());
        assert!(parse_schedule("2,1.5").is_err());
    }

    #[test]
    fn tolerance_flags() {
        assert_eq!(parse_tol("conv_tol_rel=1e-8").unwrap(), ("conv_tol_rel".into(), 1e-8));
        assert!(parse_tol("bogus=1").is_err());
        let mut p = Policies::default();
        p.set("window", 6.0).unwrap();
        assert_eq!(p.verdict.window, 6);
        assert!(p.set("window", 2.5).is_err());
    }
}

//! Monte Carlo experiments for the laws of large numbers.
//!
//! Every replication draws from its own ChaCha stream `(seed, stream id)`, so results
//! do not depend on how replications are scheduled across threads.

use std::f64::consts::{PI, SQRT_2};
use std::sync::Arc;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc_inv;

use crate::error::{invalid, Error, Result};
use crate::measure::{AtomicComb, DensityKind, MeasureSpec};
use crate::sum::NeumaierSum;

/// Comb tables stop where the remaining weight falls below this.
pub const DEFAULT_CUTOFF_TOL: f64 = 1e-12;

#[derive(Debug, Clone)]
enum Plan {
    Gaussian {
        mu: f64,
        sigma: f64,
    },
    Cauchy {
        loc: f64,
        scale: f64,
    },
    Table {
        locations: Arc<[f64]>,
        cumulative: Arc<[f64]>,
    },
    Uniform(Arc<[f64]>),
    /// `scale · inner + shift`.
    Affine {
        inner: Box<Plan>,
        scale: f64,
        shift: f64,
    },
}

/// Inverse-transform sampler for a measure.
#[derive(Debug, Clone)]
pub struct Sampler {
    plan: Plan,
    seed: u64,
    truncation_bias: f64,
}

/// Uniform on the open interval `(0, 1)`.
fn open_unit(rng: &mut ChaCha8Rng) -> f64 {
    ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

fn comb_table(comb: &AtomicComb, cutoff: f64) -> Result<(Plan, f64)> {
    let last = comb
        .index_for_tail(cutoff)
        .map_err(|e| Error::Construction(format!("{}: tail bound never drops below {cutoff}: {e}", comb.name())))?;
    let mut locations = Vec::new();
    let mut cumulative = Vec::new();
    let mut total = NeumaierSum::new();
    for n in 1..=last {
        for a in comb.atoms_at(n) {
            total.add(a.weight);
            locations.push(a.location);
            cumulative.push(total.value());
        }
    }
    let bias = comb.tail_mass_bound(last);
    Ok((
        Plan::Table {
            locations: locations.into(),
            cumulative: cumulative.into(),
        },
        bias,
    ))
}

fn plan_for(m: &MeasureSpec, cutoff: f64) -> Result<(Plan, f64)> {
    Ok(match m {
        MeasureSpec::Density(d) => match d.kind() {
            DensityKind::Gaussian { mu, sigma } => (Plan::Gaussian { mu: *mu, sigma: *sigma }, 0.0),
            DensityKind::Cauchy { loc, scale } => (
                Plan::Cauchy {
                    loc: *loc,
                    scale: *scale,
                },
                0.0,
            ),
            _ => return Err(Error::Sampling(format!("no sampler for {}", d.name()))),
        },
        MeasureSpec::Atomic(c) => comb_table(c, cutoff)?,
        MeasureSpec::Empirical(e) => (Plan::Uniform(e.samples().to_vec().into()), 0.0),
        MeasureSpec::Shift(inner, a) => affine(plan_for(inner, cutoff)?, 1.0, *a),
        MeasureSpec::Scale(inner, l) => affine(plan_for(inner, cutoff)?, *l, 0.0),
        MeasureSpec::Negate(inner) => affine(plan_for(inner, cutoff)?, -1.0, 0.0),
    })
}

fn affine((plan, bias): (Plan, f64), scale: f64, shift: f64) -> (Plan, f64) {
    let plan = match plan {
        Plan::Affine {
            inner,
            scale: s,
            shift: t,
        } => Plan::Affine {
            inner,
            scale: scale * s,
            shift: scale * t + shift,
        },
        other => Plan::Affine {
            inner: Box::new(other),
            scale,
            shift,
        },
    };
    (plan, bias)
}

impl Plan {
    fn draw(&self, rng: &mut ChaCha8Rng) -> f64 {
        match self {
            Plan::Gaussian { mu, sigma } => mu - sigma * SQRT_2 * erfc_inv(2.0 * open_unit(rng)),
            Plan::Cauchy { loc, scale } => loc + scale * (PI * (open_unit(rng) - 0.5)).tan(),
            Plan::Table { locations, cumulative } => {
                let u = open_unit(rng) * cumulative[cumulative.len() - 1];
                let i = cumulative.partition_point(|c| *c < u).min(locations.len() - 1);
                locations[i]
            }
            Plan::Uniform(xs) => {
                let i = (open_unit(rng) * xs.len() as f64) as usize;
                xs[i.min(xs.len() - 1)]
            }
            Plan::Affine { inner, scale, shift } => scale * inner.draw(rng) + shift,
        }
    }

    fn is_cauchy(&self) -> bool {
        match self {
            Plan::Cauchy { .. } => true,
            Plan::Affine { inner, .. } => inner.is_cauchy(),
            _ => false,
        }
    }
}

impl Sampler {
    pub fn new(m: &MeasureSpec, seed: u64) -> Result<Self> {
        Self::with_cutoff(m, seed, DEFAULT_CUTOFF_TOL)
    }

    pub fn with_cutoff(m: &MeasureSpec, seed: u64, cutoff_tol: f64) -> Result<Self> {
        if !(cutoff_tol > 0.0) {
            return Err(invalid("cutoff tolerance must be positive"));
        }
        let (plan, truncation_bias) = plan_for(m, cutoff_tol)?;
        Ok(Self {
            plan,
            seed,
            truncation_bias,
        })
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Weight dropped when a comb was cut into a finite table (0 otherwise).
    pub fn truncation_bias(&self) -> f64 {
        self.truncation_bias
    }

    pub fn is_cauchy(&self) -> bool {
        self.plan.is_cauchy()
    }

    pub fn stream(&self, id: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(id);
        rng
    }

    pub fn draw(&self, rng: &mut ChaCha8Rng) -> f64 {
        self.plan.draw(rng)
    }

    /// `count` draws from stream 0.
    pub fn sample(&self, count: usize) -> Result<Vec<f64>> {
        self.sample_stream(0, count)
    }

    pub fn sample_stream(&self, stream: u64, count: usize) -> Result<Vec<f64>> {
        if count == 0 {
            return Err(invalid("sample count must be at least 1"));
        }
        let mut rng = self.stream(stream);
        Ok((0..count).map(|_| self.draw(&mut rng)).collect())
    }
}

/// Replication `j` (0-based) draws from stream `j + 1`; stream 0 is reserved for
/// plain samples.
fn replication_stream(j: usize) -> u64 {
    j as u64 + 1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WllnReport {
    pub mean: f64,
    pub epsilon: f64,
    pub ns: Vec<usize>,
    pub replications: usize,
    /// Fraction of replications with `|S_n/n - mean| > epsilon`, per `n`.
    pub fractions: Vec<f64>,
    pub seed: u64,
    pub truncation_bias: f64,
}

/// Estimates `P(|S_n/n - m| > ε)` for each `n` from `replications` independent
/// trajectories. `ns` must be strictly increasing.
pub fn wlln_experiment(s: &Sampler, mean: f64, epsilon: f64, ns: &[usize], replications: usize) -> Result<WllnReport> {
    if replications < 100 {
        return Err(invalid("need at least 100 replications"));
    }
    if ns.is_empty() || ns[0] == 0 || ns.windows(2).any(|w| w[1] <= w[0]) {
        return Err(invalid("sample sizes must be positive and strictly increasing"));
    }
    if !(epsilon > 0.0) {
        return Err(invalid("epsilon must be positive"));
    }
    let horizon = *ns.last().expect("nonempty");
    let hits: Vec<Vec<bool>> = (0..replications)
        .into_par_iter()
        .map(|j| {
            let mut rng = s.stream(replication_stream(j));
            let mut sum = NeumaierSum::new();
            let mut out = Vec::with_capacity(ns.len());
            let mut next = 0;
            for k in 1..=horizon {
                sum.add(s.draw(&mut rng));
                if k == ns[next] {
                    out.push((sum.value() / k as f64 - mean).abs() > epsilon);
                    next += 1;
                }
            }
            out
        })
        .collect();
    let fractions = (0..ns.len())
        .map(|i| hits.iter().filter(|h| h[i]).count() as f64 / replications as f64)
        .collect();
    Ok(WllnReport {
        mean,
        epsilon,
        ns: ns.to_vec(),
        replications,
        fractions,
        seed: s.seed(),
        truncation_bias: s.truncation_bias(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrajectoryPoint {
    pub n: usize,
    pub running_mean: f64,
}

/// Running means `S_k / k` of one trajectory, recorded every `stride` steps and at `n`.
pub fn running_mean_trajectory(s: &Sampler, n: usize, stride: usize, stream: u64) -> Result<Vec<TrajectoryPoint>> {
    if n == 0 || stride == 0 {
        return Err(invalid("trajectory length and stride must be positive"));
    }
    let mut rng = s.stream(stream);
    let mut sum = NeumaierSum::new();
    let mut out = Vec::with_capacity(n / stride + 1);
    for k in 1..=n {
        sum.add(s.draw(&mut rng));
        if k % stride == 0 || k == n {
            out.push(TrajectoryPoint {
                n: k,
                running_mean: sum.value() / k as f64,
            });
        }
    }
    Ok(out)
}

/// First recorded `n` after which the trajectory stays within `5σ/√n` of `mean`.
pub fn envelope_entry(trajectory: &[TrajectoryPoint], mean: f64, sigma: f64) -> Option<usize> {
    let inside = |p: &TrajectoryPoint| (p.running_mean - mean).abs() <= 5.0 * sigma / (p.n as f64).sqrt();
    let last_outside = trajectory.iter().rposition(|p| !inside(p));
    match last_outside {
        None => trajectory.first().map(|p| p.n),
        Some(i) => trajectory.get(i + 1).map(|p| p.n),
    }
}

/// Two-sample Kolmogorov–Smirnov distance `sup_x |F_a(x) - F_b(x)|`.
pub fn ks_distance(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d = 0.0f64;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StabilityReport {
    pub n: usize,
    pub replications: usize,
    /// KS distance between `R` sample means of size `n` and `R` single draws.
    pub distance: f64,
    /// Approximate 99th percentile of the distance when both samples share one law.
    pub same_law_threshold: f64,
    pub seed: u64,
}

/// KS distance between the law of `S_n/n` and the law of one draw, both estimated
/// from `replications` values.
pub fn mean_vs_single_distance(s: &Sampler, n: usize, replications: usize) -> Result<StabilityReport> {
    if n == 0 || replications == 0 {
        return Err(invalid("n and replications must be positive"));
    }
    let means: Vec<f64> = (0..replications)
        .into_par_iter()
        .map(|j| {
            let mut rng = s.stream(replication_stream(j));
            let sum: NeumaierSum = (0..n).map(|_| s.draw(&mut rng)).collect();
            sum.value() / n as f64
        })
        .collect();
    let singles = s.sample_stream(0, replications)?;
    Ok(StabilityReport {
        n,
        replications,
        distance: ks_distance(&means, &singles),
        same_law_threshold: 1.63 * (2.0 / replications as f64).sqrt(),
        seed: s.seed(),
    })
}

/// For a Cauchy law the mean of `n` draws has the law of a single draw.
pub fn cauchy_stability_demo(s: &Sampler, n: usize, replications: usize) -> Result<StabilityReport> {
    if !s.is_cauchy() {
        return Err(invalid("the stability demonstration needs a Cauchy base measure"));
    }
    if replications < 1000 {
        return Err(invalid("the stability demonstration needs at least 1000 replications"));
    }
    mean_vs_single_distance(s, n, replications)
}

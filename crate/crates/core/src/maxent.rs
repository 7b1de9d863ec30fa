//! Entropy of finite distributions and the maximum entropy solver.
//!
//! The maximizer of `H(p)` subject to `E_p[g_j] = α_j` has the form
//! `p_i = exp(-Σ_j β_j g_j(i)) / Z(β)`, where `β` minimizes the convex dual
//! `D(β) = ln Z(β) + β·α`. The dual is minimized by damped Newton steps.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::sum::NeumaierSum;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LogBase {
    #[default]
    Bits,
    Nats,
}

impl LogBase {
    fn ln_base(self) -> f64 {
        match self {
            LogBase::Bits => std::f64::consts::LN_2,
            LogBase::Nats => 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct FiniteDistribution {
    probs: Vec<f64>,
}

impl FiniteDistribution {
    pub const MASS_TOL: f64 = 1e-12;

    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(invalid("a distribution needs at least one state"));
        }
        if let Some(p) = probs.iter().find(|p| !(p.is_finite() && **p >= 0.0)) {
            return Err(invalid(format!(
                "probabilities must be finite and nonnegative, got {p}"
            )));
        }
        let total: NeumaierSum = probs.iter().copied().collect();
        if (total.value() - 1.0).abs() > Self::MASS_TOL {
            return Err(invalid(format!("probabilities sum to {}", total.value())));
        }
        Ok(Self { probs })
    }

    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(invalid("a distribution needs at least one state"));
        }
        Ok(Self {
            probs: vec![1.0 / n as f64; n],
        })
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }
}

impl TryFrom<Vec<f64>> for FiniteDistribution {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<FiniteDistribution> for Vec<f64> {
    fn from(p: FiniteDistribution) -> Self {
        p.probs
    }
}

/// `Σ p_i log(1/p_i)` with `0 log(1/0) = 0`.
pub fn entropy(p: &FiniteDistribution, base: LogBase) -> f64 {
    let h: NeumaierSum = p.probs.iter().filter(|q| **q > 0.0).map(|q| -q * q.ln()).collect();
    h.value() / base.ln_base()
}

pub fn expected_value(p: &FiniteDistribution, g: &[f64]) -> Result<f64> {
    if g.len() != p.len() {
        return Err(Error::DimensionMismatch {
            expected: p.len(),
            got: g.len(),
        });
    }
    let s: NeumaierSum = p.probs.iter().zip(g).map(|(q, v)| q * v).collect();
    Ok(s.value())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaxEntProblem {
    pub n: usize,
    #[serde(default)]
    pub observables: Vec<Vec<f64>>,
    #[serde(default)]
    pub targets: Vec<f64>,
    #[serde(default)]
    pub base: LogBase,
}

impl MaxEntProblem {
    pub fn unconstrained(n: usize) -> Self {
        Self {
            n,
            observables: Vec::new(),
            targets: Vec::new(),
            base: LogBase::Bits,
        }
    }

    pub fn new(n: usize, observables: Vec<Vec<f64>>, targets: Vec<f64>) -> Self {
        Self {
            n,
            observables,
            targets,
            base: LogBase::Bits,
        }
    }

    pub fn with_base(mut self, base: LogBase) -> Self {
        self.base = base;
        self
    }

    /// Shape, finiteness and range checks, then linear independence of
    /// `1, g_1, …, g_k`.
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(invalid("the state space must be nonempty"));
        }
        if self.targets.len() != self.observables.len() {
            return Err(Error::DimensionMismatch {
                expected: self.observables.len(),
                got: self.targets.len(),
            });
        }
        for (j, (g, &alpha)) in self.observables.iter().zip(&self.targets).enumerate() {
            if g.len() != self.n {
                return Err(Error::DimensionMismatch {
                    expected: self.n,
                    got: g.len(),
                });
            }
            if g.iter().any(|v| !v.is_finite()) || !alpha.is_finite() {
                return Err(invalid(format!("observable {j} and its target must be finite")));
            }
            let min = g.iter().copied().fold(f64::INFINITY, f64::min);
            let max = g.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            // a constant observable is caught by the independence check below
            if min < max && !(alpha > min && alpha < max) {
                return Err(Error::Infeasible {
                    observable: j,
                    target: alpha,
                    min,
                    max,
                });
            }
        }
        // modified Gram–Schmidt against the constant vector and earlier observables
        let mut basis: Vec<DVector<f64>> = vec![DVector::from_element(self.n, 1.0 / (self.n as f64).sqrt())];
        for (j, g) in self.observables.iter().enumerate() {
            let mut v = DVector::from_column_slice(g);
            let scale = v.norm();
            for b in &basis {
                let proj = b.dot(&v);
                v -= b * proj;
            }
            let norm = v.norm();
            if !(norm > 1e-10 * scale.max(f64::MIN_POSITIVE)) {
                return Err(Error::Redundant { observable: j });
            }
            basis.push(v / norm);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaxEntPolicy {
    /// Stop once the dual gradient norm (the constraint residual) is at most this.
    pub feas_tol: f64,
    pub max_steps: usize,
    /// Dual norm past which a stalled gradient means the target is unattainable.
    pub beta_limit: f64,
    pub armijo: f64,
}

impl Default for MaxEntPolicy {
    fn default() -> Self {
        Self {
            feas_tol: 1e-10,
            max_steps: 200,
            beta_limit: 1e3,
            armijo: 1e-4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaxEntSolution {
    pub beta: Vec<f64>,
    /// `ln Z(β)`, natural log regardless of the entropy base.
    pub log_normalizer: f64,
    pub p: FiniteDistribution,
    pub entropy: f64,
    pub base: LogBase,
    /// `E_p[g_j] - α_j`.
    pub residuals: Vec<f64>,
    pub iterations: usize,
}

/// Exponential family member for given dual variables.
struct Tilted {
    log_z: f64,
    probs: Vec<f64>,
}

fn tilt(prob: &MaxEntProblem, beta: &[f64]) -> Tilted {
    let exponents: Vec<f64> = (0..prob.n)
        .map(|i| {
            let s: NeumaierSum = beta.iter().zip(&prob.observables).map(|(b, g)| -b * g[i]).collect();
            s.value()
        })
        .collect();
    let shift = exponents.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let unnorm: Vec<f64> = exponents.iter().map(|a| (a - shift).exp()).collect();
    let z: NeumaierSum = unnorm.iter().copied().collect();
    let z = z.value();
    Tilted {
        log_z: shift + z.ln(),
        probs: unnorm.into_iter().map(|u| u / z).collect(),
    }
}

fn moments(prob: &MaxEntProblem, probs: &[f64]) -> Vec<f64> {
    prob.observables
        .iter()
        .map(|g| {
            let s: NeumaierSum = probs.iter().zip(g).map(|(p, v)| p * v).collect();
            s.value()
        })
        .collect()
}

fn check_beta(prob: &MaxEntProblem, beta: &[f64]) -> Result<()> {
    prob.validate()?;
    if beta.len() != prob.observables.len() {
        return Err(Error::DimensionMismatch {
            expected: prob.observables.len(),
            got: beta.len(),
        });
    }
    Ok(())
}

fn dual_value(prob: &MaxEntProblem, beta: &[f64]) -> f64 {
    let t = tilt(prob, beta);
    t.log_z + beta.iter().zip(&prob.targets).map(|(b, a)| b * a).sum::<f64>()
}

/// `D(β) = ln Z(β) + Σ_j β_j α_j`.
pub fn dual_objective(prob: &MaxEntProblem, beta: &[f64]) -> Result<f64> {
    check_beta(prob, beta)?;
    Ok(dual_value(prob, beta))
}

/// `∇D(β) = α - E_β[g]`.
pub fn dual_gradient(prob: &MaxEntProblem, beta: &[f64]) -> Result<Vec<f64>> {
    check_beta(prob, beta)?;
    let t = tilt(prob, beta);
    Ok(prob
        .targets
        .iter()
        .zip(moments(prob, &t.probs))
        .map(|(a, m)| a - m)
        .collect())
}

fn covariance(prob: &MaxEntProblem, probs: &[f64], means: &[f64]) -> DMatrix<f64> {
    let k = prob.observables.len();
    DMatrix::from_fn(k, k, |a, b| {
        let (ga, gb) = (&prob.observables[a], &prob.observables[b]);
        let s: NeumaierSum = (0..prob.n)
            .map(|i| probs[i] * (ga[i] - means[a]) * (gb[i] - means[b]))
            .collect();
        s.value()
    })
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn maxent_solve(prob: &MaxEntProblem) -> Result<MaxEntSolution> {
    maxent_solve_with(prob, &MaxEntPolicy::default())
}

pub fn maxent_solve_with(prob: &MaxEntProblem, policy: &MaxEntPolicy) -> Result<MaxEntSolution> {
    prob.validate()?;
    let k = prob.observables.len();
    let mut beta = vec![0.0; k];
    let mut grad_norm_prev = f64::INFINITY;
    let mut iterations = 0;
    loop {
        let t = tilt(prob, &beta);
        let means = moments(prob, &t.probs);
        let grad: Vec<f64> = prob.targets.iter().zip(&means).map(|(a, m)| a - m).collect();
        let grad_norm = norm(&grad);
        if grad_norm <= policy.feas_tol {
            let p = FiniteDistribution { probs: t.probs };
            return Ok(MaxEntSolution {
                entropy: entropy(&p, prob.base),
                log_normalizer: t.log_z,
                beta,
                base: prob.base,
                residuals: grad.iter().map(|g| -g).collect(),
                p,
                iterations,
            });
        }
        let beta_norm = norm(&beta);
        let stalled = grad_norm >= 0.5 * grad_norm_prev;
        if (beta_norm > policy.beta_limit && stalled) || iterations >= policy.max_steps {
            return Err(Error::DualDivergence {
                beta_norm,
                gradient_norm: grad_norm,
            });
        }
        grad_norm_prev = grad_norm;

        let hess = covariance(prob, &t.probs, &means);
        let g = DVector::from_column_slice(&grad);
        let step = match hess.clone().cholesky() {
            Some(ch) => -ch.solve(&g),
            // nearly singular covariance: fall back to a regularized system
            None => {
                let ridge = 1e-12 * hess.diagonal().max().max(1e-300);
                match (hess + DMatrix::identity(k, k) * ridge).cholesky() {
                    Some(ch) => -ch.solve(&g),
                    None => -g.clone(),
                }
            }
        };
        let slope = g.dot(&step);
        let d0 = dual_value(prob, &beta);
        let mut scale = 1.0;
        let mut next: Vec<f64> = beta.iter().zip(step.iter()).map(|(b, s)| b + s).collect();
        // near the optimum the predicted decrease is below the rounding of D,
        // where Armijo cannot be tested; the full Newton step is taken instead
        let resolvable = -slope > 1e-13 * d0.abs().max(1.0);
        for _ in 0..if resolvable { 60 } else { 0 } {
            next = beta.iter().zip(step.iter()).map(|(b, s)| b + scale * s).collect();
            if dual_value(prob, &next) <= d0 + policy.armijo * scale * slope {
                break;
            }
            scale *= 0.5;
        }
        beta = next;
        iterations += 1;
    }
}

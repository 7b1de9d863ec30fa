//! Diagonal operators on sequence space: eigenvalue and amplitude sequences whose
//! induced measures are infinite combs.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::genmean::{mean_ladder, MeanLadder, MeanValue, TruncationSchedule, VerdictPolicy};
use crate::measure::{zeta, AtomicComb, BuiltinComb, MeasureSpec};
use crate::sum::NeumaierSum;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum BridgeFamily {
    /// Eigenvalues `±2^n`, each with `|ψ|² = 2^{-(n+1)}`.
    SignedDyadic {},
    /// Eigenvalue `n` with `|ψ_n|² ∝ n^{-p}`, `p > 1`.
    PowerLaw { p: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagonalBridge {
    pub family: BridgeFamily,
}

impl DiagonalBridge {
    pub fn signed_dyadic() -> Self {
        Self {
            family: BridgeFamily::SignedDyadic {},
        }
    }

    pub fn power_law(p: f64) -> Result<Self> {
        if !(p > 1.0) || !p.is_finite() {
            return Err(invalid(format!("power-law amplitudes need p > 1, got {p}")));
        }
        Ok(Self {
            family: BridgeFamily::PowerLaw { p },
        })
    }

    pub fn validate(&self) -> Result<()> {
        match self.family {
            BridgeFamily::SignedDyadic {} => Ok(()),
            BridgeFamily::PowerLaw { p } => Self::power_law(p).map(|_| ()),
        }
    }

    /// Law of the outcome: eigenvalue `λ_n` with probability `|ψ_n|²`.
    pub fn comb(&self) -> Result<AtomicComb> {
        match self.family {
            BridgeFamily::SignedDyadic {} => Ok(AtomicComb::builtin(BuiltinComb::Ex2)),
            BridgeFamily::PowerLaw { p } => AtomicComb::power_law(p),
        }
    }

    /// Membership of `ψ` in the domains, from series comparison.
    pub fn flags(&self) -> DomainFlags {
        match self.family {
            // Σ 2^n 2^{-(n+1)} = Σ 1/2 on both sides
            BridgeFamily::SignedDyadic {} => DomainFlags {
                in_dom_a: false,
                in_dom_e: false,
                in_dom_f: false,
            },
            // Σ n^{1-p} and Σ n^{2-p}; no negative eigenvalues
            BridgeFamily::PowerLaw { p } => DomainFlags {
                in_dom_a: p > 3.0,
                in_dom_e: p > 2.0,
                in_dom_f: true,
            },
        }
    }

    /// Closed-form `Σ λ_n |ψ_n|²` when it converges absolutely.
    pub fn closed_form_mean(&self) -> Option<f64> {
        match self.family {
            BridgeFamily::SignedDyadic {} => None,
            BridgeFamily::PowerLaw { p } if p > 2.0 => Some(zeta(p - 1.0) / zeta(p)),
            BridgeFamily::PowerLaw { .. } => None,
        }
    }

    fn checkpoints(&self) -> Vec<u64> {
        match self.family {
            BridgeFamily::SignedDyadic {} => vec![5, 10, 20, 40],
            BridgeFamily::PowerLaw { .. } => vec![10, 100, 1_000, 10_000, 100_000],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainFlags {
    /// `Σ λ_n² |ψ_n|² < ∞`.
    pub in_dom_a: bool,
    /// `Σ_{λ_n > 0} λ_n |ψ_n|² < ∞`.
    pub in_dom_e: bool,
    /// `Σ_{λ_n < 0} |λ_n| |ψ_n|² < ∞`.
    pub in_dom_f: bool,
}

impl DomainFlags {
    pub fn mean_exists(&self) -> bool {
        self.in_dom_e && self.in_dom_f
    }

    pub fn variance_exists(&self) -> bool {
        self.in_dom_a
    }
}

/// Partial sums over indices `1..=N` backing the analytic flags.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartialSumEvidence {
    pub indices: Vec<u64>,
    /// `‖E ψ_N‖²`.
    pub positive: Vec<f64>,
    /// `‖F ψ_N‖²`.
    pub negative: Vec<f64>,
    /// `‖A ψ_N‖²`.
    pub second_moment: Vec<f64>,
}

fn partial_sums(comb: &AtomicComb, indices: &[u64]) -> PartialSumEvidence {
    let mut pos = NeumaierSum::new();
    let mut neg = NeumaierSum::new();
    let mut sq = NeumaierSum::new();
    let mut out = PartialSumEvidence {
        indices: indices.to_vec(),
        positive: Vec::new(),
        negative: Vec::new(),
        second_moment: Vec::new(),
    };
    let mut n = 0;
    for &stop in indices {
        while n < stop {
            n += 1;
            for a in comb.atoms_at(n) {
                if a.location > 0.0 {
                    pos.add(a.location * a.weight);
                } else {
                    neg.add(-a.location * a.weight);
                }
                sq.add(a.location * a.location * a.weight);
            }
        }
        out.positive.push(pos.value());
        out.negative.push(neg.value());
        out.second_moment.push(sq.value());
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BridgeReport {
    pub bridge: DiagonalBridge,
    pub comb: String,
    pub flags: DomainFlags,
    pub mean_exists: bool,
    pub variance_exists: bool,
    pub closed_form_mean: Option<f64>,
    pub evidence: PartialSumEvidence,
    pub ladder: MeanLadder,
    /// Disagreements between the operator flags and the ladder; empty when consistent.
    pub inconsistencies: Vec<String>,
}

pub fn bridge_analyze(b: &DiagonalBridge, sched: &TruncationSchedule, policy: &VerdictPolicy) -> Result<BridgeReport> {
    b.validate()?;
    let comb = b.comb()?;
    let flags = b.flags();
    let evidence = partial_sums(&comb, &b.checkpoints());
    let name = comb.name();
    let ladder = mean_ladder(&MeasureSpec::from(comb), sched, policy)?;

    let mut inconsistencies = Vec::new();
    let closed = b.closed_form_mean();
    match (flags.mean_exists(), ladder.ordinary) {
        (true, MeanValue::Finite { value }) => {
            if let Some(m) = closed {
                let tol = 2.0 * ladder.symmetric.evidence.conv_tol;
                if (value - m).abs() > tol {
                    inconsistencies.push(format!("ordinary mean {value} differs from the series value {m}"));
                }
            }
        }
        (true, other) => inconsistencies.push(format!("ψ lies in dom E ∩ dom F but the ordinary mean is {other:?}")),
        (false, MeanValue::Finite { value }) => {
            inconsistencies.push(format!("ψ lies outside dom E ∩ dom F but the ordinary mean is {value}"))
        }
        (false, _) => {}
    }
    inconsistencies.extend(ladder.violations.iter().cloned());

    Ok(BridgeReport {
        bridge: *b,
        comb: name,
        mean_exists: flags.mean_exists(),
        variance_exists: flags.variance_exists(),
        flags,
        closed_form_mean: closed,
        evidence,
        ladder,
        inconsistencies,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dyadic_partial_sums_grow_linearly() {
        let b = DiagonalBridge::signed_dyadic();
        let ev = partial_sums(&b.comb().unwrap(), &[5, 10, 20]);
        assert_eq!(ev.positive, vec![2.5, 5.0, 10.0]);
        assert_eq!(ev.negative, ev.positive);
    }

    #[test]
    fn power_law_flags() {
        let f = DiagonalBridge::power_law(3.0).unwrap().flags();
        assert!(f.mean_exists() && !f.variance_exists());
        let f = DiagonalBridge::power_law(4.0).unwrap().flags();
        assert!(f.in_dom_a && f.in_dom_e && f.in_dom_f);
        assert!(DiagonalBridge::power_law(1.0).is_err());
    }
}

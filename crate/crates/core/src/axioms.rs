//! Sample statistics `f_n : R^n → R` and a randomized harness for the axioms a
//! mean-like statistic may satisfy.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::sum::compensated_sum;

pub const AXIOM_TOL: f64 = 1e-9;
const ENTRY_RANGE: f64 = 10.0;
const MAX_LEN: usize = 8;
/// Smallest coordinate increase used for the strict ordering axioms.
const MIN_STEP: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case", deny_unknown_fields)]
pub enum SampleStatistic {
    Mean,
    Median,
    /// `t · mean + (1 - t) · median`.
    Convex {
        t: f64,
    },
    Midrange,
    Min,
    Max,
}

impl fmt::Display for SampleStatistic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SampleStatistic::Mean => write!(f, "mean"),
            SampleStatistic::Median => write!(f, "median"),
            SampleStatistic::Convex { t } => write!(f, "convex({t})"),
            SampleStatistic::Midrange => write!(f, "midrange"),
            SampleStatistic::Min => write!(f, "min"),
            SampleStatistic::Max => write!(f, "max"),
        }
    }
}

impl FromStr for SampleStatistic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        Ok(match s {
            "mean" => SampleStatistic::Mean,
            "median" => SampleStatistic::Median,
            "midrange" => SampleStatistic::Midrange,
            "min" => SampleStatistic::Min,
            "max" => SampleStatistic::Max,
            _ => {
                let t = s
                    .strip_prefix("convex(")
                    .and_then(|r| r.strip_suffix(')'))
                    .ok_or_else(|| invalid(format!("unknown statistic {s:?}")))?;
                let t: f64 = t
                    .trim()
                    .parse()
                    .map_err(|_| invalid(format!("bad convex weight in {s:?}")))?;
                SampleStatistic::convex(t)?
            }
        })
    }
}

impl SampleStatistic {
    pub fn convex(t: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&t) {
            return Err(invalid(format!("convex weight must lie in [0, 1], got {t}")));
        }
        Ok(SampleStatistic::Convex { t })
    }

    pub fn evaluate(&self, xs: &[f64]) -> Result<f64> {
        if xs.is_empty() {
            return Err(invalid("statistics need at least one value"));
        }
        let n = xs.len() as f64;
        let sorted = || {
            let mut v = xs.to_vec();
            v.sort_by(f64::total_cmp);
            v
        };
        let median = |v: &[f64]| {
            let k = v.len();
            if k % 2 == 1 {
                v[k / 2]
            } else {
                0.5 * (v[k / 2 - 1] + v[k / 2])
            }
        };
        // centring on the first entry makes the mean of a constant tuple exact
        let mean = || {
            let pivot = xs[0];
            let dev: Vec<f64> = xs.iter().map(|x| x - pivot).collect();
            pivot + compensated_sum(&dev) / n
        };
        Ok(match *self {
            SampleStatistic::Mean => mean(),
            SampleStatistic::Median => median(&sorted()),
            SampleStatistic::Convex { t } => {
                let med = median(&sorted());
                med + t * (mean() - med)
            }
            SampleStatistic::Midrange => {
                let v = sorted();
                0.5 * (v[0] + v[v.len() - 1])
            }
            SampleStatistic::Min => xs.iter().copied().fold(f64::INFINITY, f64::min),
            SampleStatistic::Max => xs.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AxiomId {
    /// `f(λx) = λ f(x)` for all real `λ`.
    H,
    /// Invariance under permutations.
    S,
    /// `f(x + c) = f(x) + c`.
    T,
    /// Replacing the first `m` entries by copies of their statistic changes nothing.
    #[serde(rename = "COND")]
    Cond,
    /// `f(λx) = λ f(x)` for `λ > 0`.
    #[serde(rename = "PH")]
    Ph,
    /// `x ≤ y` coordinatewise implies `f(x) ≤ f(y)`.
    #[serde(rename = "NN")]
    Nn,
    /// `x ≤ y` with one strict coordinate implies `f(x) < f(y)`.
    P,
    /// `x < y` in every coordinate implies `f(x) < f(y)`.
    #[serde(rename = "SP")]
    Sp,
    /// `f(x + y) = f(x) + f(y)`.
    #[serde(rename = "ADD")]
    Add,
}

impl AxiomId {
    pub const ALL: [AxiomId; 9] = [
        AxiomId::H,
        AxiomId::S,
        AxiomId::T,
        AxiomId::Cond,
        AxiomId::Ph,
        AxiomId::Nn,
        AxiomId::P,
        AxiomId::Sp,
        AxiomId::Add,
    ];

    pub fn code(self) -> &'static str {
        match self {
            AxiomId::H => "H",
            AxiomId::S => "S",
            AxiomId::T => "T",
            AxiomId::Cond => "COND",
            AxiomId::Ph => "PH",
            AxiomId::Nn => "NN",
            AxiomId::P => "P",
            AxiomId::Sp => "SP",
            AxiomId::Add => "ADD",
        }
    }
}

impl FromStr for AxiomId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        AxiomId::ALL
            .into_iter()
            .find(|a| a.code().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| invalid(format!("unknown axiom {s:?}")))
    }
}

/// Data on which an axiom's identity or inequality is evaluated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Witness {
    Scale { xs: Vec<f64>, lambda: f64 },
    Permute { xs: Vec<f64>, permuted: Vec<f64> },
    Shift { xs: Vec<f64>, c: f64 },
    Condense { xs: Vec<f64>, m: usize },
    Pair { xs: Vec<f64>, ys: Vec<f64> },
}

/// How far `witness` is from satisfying `axiom` for `stat`; the axiom fails when
/// this exceeds [`AXIOM_TOL`].
///
/// For the strict inequalities the residual is `f(x) - f(y) + 2·AXIOM_TOL`, so a
/// gap smaller than the tolerance counts as a failure.
pub fn residual(stat: &SampleStatistic, axiom: AxiomId, witness: &Witness) -> Result<f64> {
    let f = |v: &[f64]| stat.evaluate(v);
    let mismatch = || invalid(format!("witness {witness:?} does not fit axiom {}", axiom.code()));
    Ok(match (axiom, witness) {
        (AxiomId::H | AxiomId::Ph, Witness::Scale { xs, lambda }) => {
            let scaled: Vec<f64> = xs.iter().map(|x| lambda * x).collect();
            (f(&scaled)? - lambda * f(xs)?).abs()
        }
        (AxiomId::S, Witness::Permute { xs, permuted }) => (f(permuted)? - f(xs)?).abs(),
        (AxiomId::T, Witness::Shift { xs, c }) => {
            let shifted: Vec<f64> = xs.iter().map(|x| x + c).collect();
            (f(&shifted)? - (f(xs)? + c)).abs()
        }
        (AxiomId::Cond, Witness::Condense { xs, m }) => {
            if *m < 2 || *m >= xs.len() {
                return Err(mismatch());
            }
            let head = f(&xs[..*m])?;
            let mut condensed = vec![head; *m];
            condensed.extend_from_slice(&xs[*m..]);
            (f(&condensed)? - f(xs)?).abs()
        }
        (AxiomId::Nn, Witness::Pair { xs, ys }) => f(xs)? - f(ys)?,
        (AxiomId::P | AxiomId::Sp, Witness::Pair { xs, ys }) => f(xs)? - f(ys)? + 2.0 * AXIOM_TOL,
        (AxiomId::Add, Witness::Pair { xs, ys }) => {
            if xs.len() != ys.len() {
                return Err(mismatch());
            }
            let sum: Vec<f64> = xs.iter().zip(ys).map(|(x, y)| x + y).collect();
            (f(&sum)? - f(xs)? - f(ys)?).abs()
        }
        _ => return Err(mismatch()),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Counterexample {
    pub trial: usize,
    pub witness: Witness,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxiomReport {
    pub statistic: SampleStatistic,
    pub axiom: AxiomId,
    pub passed: bool,
    pub trials: usize,
    pub seed: u64,
    pub max_residual: f64,
    pub counterexample: Option<Counterexample>,
}

/// Deterministic tuples tried before the random ones.
pub fn edge_tuples() -> Vec<Vec<f64>> {
    let mut out = Vec::new();
    for n in 1..=MAX_LEN {
        out.push(vec![0.0; n]);
        out.push(vec![3.7; n]);
    }
    out.extend([
        vec![0.0, 1.0, 5.0],
        vec![0.0, 0.0, 1.0],
        vec![1.0, 1.0, 2.0],
        vec![-2.0, -2.0, 3.0, 3.0],
        vec![4.0, -1.0, 4.0, 0.5, -1.0],
        vec![-10.0, 10.0],
    ]);
    out
}

fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    rng
}

fn random_tuple(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-ENTRY_RANGE..=ENTRY_RANGE)).collect()
}

fn witnesses(axiom: AxiomId, xs: Vec<f64>, rng: &mut ChaCha8Rng) -> Vec<Witness> {
    let n = xs.len();
    match axiom {
        AxiomId::H => vec![Witness::Scale {
            lambda: rng.random_range(-ENTRY_RANGE..=ENTRY_RANGE),
            xs,
        }],
        AxiomId::Ph => vec![Witness::Scale {
            lambda: rng.random_range(MIN_STEP..=ENTRY_RANGE),
            xs,
        }],
        AxiomId::S => {
            let mut permuted = xs.clone();
            permuted.shuffle(rng);
            vec![Witness::Permute { xs, permuted }]
        }
        AxiomId::T => vec![Witness::Shift {
            c: rng.random_range(-ENTRY_RANGE..=ENTRY_RANGE),
            xs,
        }],
        AxiomId::Cond => (2..n).map(|m| Witness::Condense { xs: xs.clone(), m }).collect(),
        AxiomId::Nn | AxiomId::P | AxiomId::Sp => {
            // coordinatewise increases: some zero for NN and P, all positive for SP
            let mut steps: Vec<f64> = (0..n)
                .map(|_| {
                    if axiom != AxiomId::Sp && rng.random_bool(0.5) {
                        0.0
                    } else {
                        rng.random_range(MIN_STEP..=ENTRY_RANGE / 2.0)
                    }
                })
                .collect();
            if axiom == AxiomId::P && steps.iter().all(|s| *s == 0.0) {
                let i = rng.random_range(0..n);
                steps[i] = rng.random_range(MIN_STEP..=ENTRY_RANGE / 2.0);
            }
            let ys = xs.iter().zip(&steps).map(|(x, s)| x + s).collect();
            vec![Witness::Pair { xs, ys }]
        }
        AxiomId::Add => {
            let ys = random_tuple(rng, n);
            vec![Witness::Pair { xs, ys }]
        }
    }
}

/// Evaluates one axiom over the edge tuples followed by random tuples of length 1–8
/// with entries in `[-10, 10]`. `trials` counts both. The reported counterexample is
/// the one with the smallest trial index, independent of thread scheduling.
pub fn check_axiom(stat: &SampleStatistic, axiom: AxiomId, trials: usize, seed: u64) -> Result<AxiomReport> {
    if trials == 0 {
        return Err(invalid("need at least one trial"));
    }
    stat.evaluate(&[0.0])?;
    let edges = edge_tuples();
    let outcomes = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = trial_rng(seed, trial);
            let xs = match edges.get(trial) {
                Some(e) => e.clone(),
                None => {
                    let n = rng.random_range(1..=MAX_LEN);
                    random_tuple(&mut rng, n)
                }
            };
            let mut worst = f64::NEG_INFINITY;
            let mut first_failure = None;
            for w in witnesses(axiom, xs, &mut rng) {
                let r = residual(stat, axiom, &w)?;
                worst = worst.max(r);
                if r > AXIOM_TOL && first_failure.is_none() {
                    first_failure = Some(Counterexample {
                        trial,
                        witness: w,
                        residual: r,
                    });
                }
            }
            Ok((worst, first_failure))
        })
        .collect::<Result<Vec<_>>>()?;
    let max_residual = outcomes.iter().map(|o| o.0).fold(f64::NEG_INFINITY, f64::max).max(0.0);
    let counterexample = outcomes.into_iter().find_map(|o| o.1);
    Ok(AxiomReport {
        statistic: *stat,
        axiom,
        passed: counterexample.is_none(),
        trials,
        seed,
        max_residual,
        counterexample,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoincidenceReport {
    pub a: SampleStatistic,
    pub b: SampleStatistic,
    /// Whether both statistics passed H, S and T in the harness.
    pub both_satisfy_hst: bool,
    /// Largest `|f(x) - x|` over singletons, for either statistic.
    pub max_residual_n1: f64,
    /// Largest `|f(x1, x2) - (x1 + x2)/2|` over pairs, for either statistic.
    pub max_residual_n2: f64,
    /// `|a(0, 1, 5) - b(0, 1, 5)|`; nothing forces agreement from three values on.
    pub residual_n3: f64,
    pub trials: usize,
    pub seed: u64,
}

/// Compares two statistics with each other and with the mean on one and two values.
pub fn two_point_coincidence(
    a: &SampleStatistic,
    b: &SampleStatistic,
    trials: usize,
    seed: u64,
) -> Result<CoincidenceReport> {
    if trials == 0 {
        return Err(invalid("need at least one trial"));
    }
    let mut both = true;
    for stat in [a, b] {
        for ax in [AxiomId::H, AxiomId::S, AxiomId::T] {
            both &= check_axiom(stat, ax, trials, seed)?.passed;
        }
    }
    let mut rng = trial_rng(seed, usize::MAX);
    let (mut r1, mut r2) = (0.0f64, 0.0f64);
    for _ in 0..trials {
        let x = random_tuple(&mut rng, 2);
        for stat in [a, b] {
            r1 = r1.max((stat.evaluate(&x[..1])? - x[0]).abs());
            r2 = r2.max((stat.evaluate(&x)? - 0.5 * (x[0] + x[1])).abs());
        }
    }
    let probe = [0.0, 1.0, 5.0];
    Ok(CoincidenceReport {
        a: *a,
        b: *b,
        both_satisfy_hst: both,
        max_residual_n1: r1,
        max_residual_n2: r2,
        residual_n3: (a.evaluate(&probe)? - b.evaluate(&probe)?).abs(),
        trials,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn evaluations() {
        let xs = [0.0, 1.0, 5.0];
        assert_eq!(SampleStatistic::Mean.evaluate(&xs).unwrap(), 2.0);
        assert_eq!(SampleStatistic::Median.evaluate(&xs).unwrap(), 1.0);
        assert_eq!(SampleStatistic::Median.evaluate(&[4.0, 1.0, 2.0, 9.0]).unwrap(), 3.0);
        assert_eq!(SampleStatistic::Midrange.evaluate(&xs).unwrap(), 2.5);
        assert_eq!(SampleStatistic::Convex { t: 0.5 }.evaluate(&xs).unwrap(), 1.5);
        assert!(SampleStatistic::Mean.evaluate(&[]).is_err());
        for s in [
            SampleStatistic::Mean,
            SampleStatistic::Median,
            SampleStatistic::Convex { t: 0.3 },
            SampleStatistic::Midrange,
            SampleStatistic::Min,
            SampleStatistic::Max,
        ] {
            assert_eq!(s.evaluate(&[-7.25]).unwrap(), -7.25);
        }
    }

    #[test]
    fn parsing_round_trips_display() {
        for s in ["mean", "median", "convex(0.25)", "midrange", "min", "max"] {
            assert_eq!(s.parse::<SampleStatistic>().unwrap().to_string(), s);
        }
        assert!("convex(2)".parse::<SampleStatistic>().is_err());
        assert_eq!("cond".parse::<AxiomId>().unwrap(), AxiomId::Cond);
    }

    #[test]
    fn median_condensation_counterexample_by_hand() {
        let w = Witness::Condense {
            xs: vec![0.0, 1.0, 5.0],
            m: 2,
        };
        assert_eq!(residual(&SampleStatistic::Median, AxiomId::Cond, &w).unwrap(), 0.5);
        assert_eq!(residual(&SampleStatistic::Mean, AxiomId::Cond, &w).unwrap(), 0.0);
    }

    #[test]
    fn mismatched_witness_is_rejected() {
        let w = Witness::Shift { xs: vec![1.0], c: 1.0 };
        assert!(residual(&SampleStatistic::Mean, AxiomId::H, &w).is_err());
    }
}

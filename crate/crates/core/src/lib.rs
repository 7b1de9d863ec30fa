//! Generalized means for probability measures on the real line.
//!
//! The crate computes truncated-window first moments `∫_{[c-M, c+M]} x dP` and
//! classifies their behavior as `M → ∞`, decides weak and doubly weak means,
//! evaluates multiplier-regularized means, and ships the supporting tools used to
//! study them: an axiom harness for sample statistics, a Monte Carlo lab for the
//! laws of large numbers, a finite maximum entropy solver and finite-dimensional
//! spectral measures of Hermitian matrices.

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0.0)` also rejects NaN

pub mod axioms;
pub mod error;
pub mod genmean;
pub mod lln;
pub mod maxent;
pub mod measure;
pub mod quadrature;
pub mod spectral;
pub mod sum;

pub use axioms::{check_axiom, two_point_coincidence, AxiomId, AxiomReport, SampleStatistic};
pub use error::{Error, Result};
pub use lln::{cauchy_stability_demo, wlln_experiment, Sampler, WllnReport};
pub use maxent::{entropy, expected_value, maxent_solve, FiniteDistribution, LogBase, MaxEntProblem, MaxEntSolution};
pub use measure::{
    Atom, AtomicComb, BuiltinComb, DensityMeasure, EmpiricalMeasure, Endpoints, MeasureDoc, MeasureDocument,
    MeasureSpec, WindowStats,
};
pub use quadrature::QuadPolicy;
pub use spectral::{eigendecompose, induced_measure, qm_mean, qm_variance, HermitianObservable, StateVector};

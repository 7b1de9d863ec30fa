//! Spectral measures of finite Hermitian observables in pure states.

mod bridge;
mod jacobi;

pub use bridge::{bridge_analyze, BridgeFamily, BridgeReport, DiagonalBridge, DomainFlags, PartialSumEvidence};

use nalgebra::{Complex, DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::measure::{Atom, AtomicComb};

pub type C64 = Complex<f64>;

/// Off-diagonal target of the eigensolver, relative to `‖A‖_F`.
pub const EIG_TOL: f64 = 1e-12;
pub const HERM_TOL: f64 = 1e-12;
pub const STATE_NORM_TOL: f64 = 1e-12;
/// Eigenvalues closer than this (relative to `‖A‖_F`) form one atom.
pub const MERGE_TOL: f64 = 1e-8;

/// Frobenius norm, used as `‖A‖` in every tolerance of this module.
fn frob(a: &DMatrix<C64>) -> f64 {
    a.norm()
}

#[derive(Debug, Clone, PartialEq)]
pub struct HermitianObservable {
    matrix: DMatrix<C64>,
}

impl HermitianObservable {
    /// Accepts `a` when `max |a - a*| ≤ HERM_TOL · max(1, ‖a‖)` and stores its Hermitian part.
    pub fn new(a: DMatrix<C64>) -> Result<Self> {
        if a.nrows() != a.ncols() {
            return Err(Error::DimensionMismatch {
                expected: a.nrows(),
                got: a.ncols(),
            });
        }
        if a.nrows() == 0 {
            return Err(invalid("observable must have at least one row"));
        }
        if a.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(invalid("matrix entries must be finite"));
        }
        let adj = a.adjoint();
        let deviation = (&a - &adj).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if deviation > HERM_TOL * frob(&a).max(1.0) {
            return Err(Error::NotHermitian { deviation });
        }
        Ok(Self {
            matrix: (a + adj) * C64::new(0.5, 0.0),
        })
    }

    pub fn from_real(a: DMatrix<f64>) -> Result<Self> {
        Self::new(a.map(|x| C64::new(x, 0.0)))
    }

    pub fn diagonal(values: &[f64]) -> Result<Self> {
        Self::from_real(DMatrix::from_diagonal(&DVector::from_column_slice(values)))
    }

    /// Rows of `[re, im]` pairs.
    pub fn from_pairs(rows: &[Vec<[f64; 2]>]) -> Result<Self> {
        let n = rows.len();
        if let Some(r) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: r.len(),
            });
        }
        Self::new(DMatrix::from_fn(n, n, |i, j| {
            let [re, im] = rows[i][j];
            C64::new(re, im)
        }))
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn norm(&self) -> f64 {
        frob(&self.matrix)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: DVector<C64>,
}

impl StateVector {
    pub fn new(amplitudes: DVector<C64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(invalid("state must have at least one amplitude"));
        }
        let norm = amplitudes.norm();
        if !((norm - 1.0).abs() <= STATE_NORM_TOL) {
            return Err(invalid(format!("state must have unit norm, got {norm}")));
        }
        Ok(Self { amplitudes })
    }

    /// Divides by the norm first.
    pub fn normalized(amplitudes: DVector<C64>) -> Result<Self> {
        let norm = amplitudes.norm();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(invalid("cannot normalize a zero or non-finite vector"));
        }
        Self::new(amplitudes.unscale(norm))
    }

    pub fn from_pairs(amps: &[[f64; 2]]) -> Result<Self> {
        Self::new(DVector::from_iterator(
            amps.len(),
            amps.iter().map(|[re, im]| C64::new(*re, *im)),
        ))
    }

    pub fn from_real(amps: &[f64]) -> Result<Self> {
        Self::new(DVector::from_iterator(
            amps.len(),
            amps.iter().map(|x| C64::new(*x, 0.0)),
        ))
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amplitudes
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }
}

fn check_dims(a: &HermitianObservable, psi: &StateVector) -> Result<()> {
    if a.dim() != psi.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            got: psi.dim(),
        });
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDecomposition {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Column `i` is the unit eigenvector for `eigenvalues[i]`.
    pub eigenvectors: DMatrix<C64>,
    pub matrix_norm: f64,
}

impl SpectralDecomposition {
    /// `Σ_i f(λ_i) v_i v_i*`.
    pub fn apply_function(&self, f: impl Fn(f64) -> f64) -> DMatrix<C64> {
        let n = self.eigenvalues.len();
        let mut out = DMatrix::<C64>::zeros(n, n);
        for (i, &l) in self.eigenvalues.iter().enumerate() {
            let w = f(l);
            if w != 0.0 {
                let v = self.eigenvectors.column(i);
                out += (v * v.adjoint()) * C64::new(w, 0.0);
            }
        }
        out
    }

    /// `‖A - V Λ V*‖_F`.
    pub fn reconstruction_residual(&self, a: &HermitianObservable) -> f64 {
        frob(&(a.matrix() - self.apply_function(|l| l)))
    }
}

pub fn eigendecompose(a: &HermitianObservable) -> SpectralDecomposition {
    let (eigenvalues, eigenvectors) = jacobi::jacobi_eigen(a.matrix(), EIG_TOL);
    SpectralDecomposition {
        eigenvalues,
        eigenvectors,
        matrix_norm: a.norm(),
    }
}

/// `|⟨v_i, ψ⟩|²` for every eigenvector.
pub fn eigen_weights(dec: &SpectralDecomposition, psi: &StateVector) -> Vec<f64> {
    (dec.eigenvectors.adjoint() * psi.amplitudes())
        .iter()
        .map(|z| z.norm_sqr())
        .collect()
}

/// Spectral atoms, with eigenvalues within `MERGE_TOL · ‖A‖` merged. Zero-weight
/// eigenvalues are dropped.
pub fn induced_atoms(dec: &SpectralDecomposition, psi: &StateVector) -> Vec<Atom> {
    let weights = eigen_weights(dec, psi);
    let gap = MERGE_TOL * dec.matrix_norm;
    let mut clusters: Vec<(Vec<f64>, f64)> = Vec::new();
    for (&l, &w) in dec.eigenvalues.iter().zip(&weights) {
        match clusters.last_mut() {
            Some((ls, acc)) if l - ls[ls.len() - 1] <= gap => {
                ls.push(l);
                *acc += w;
            }
            _ => clusters.push((vec![l], w)),
        }
    }
    clusters
        .into_iter()
        .filter(|(_, w)| *w > 0.0)
        .map(|(ls, w)| Atom::raw(ls.iter().sum::<f64>() / ls.len() as f64, w))
        .collect()
}

/// Law of the outcome of measuring `a` in state `psi`.
pub fn induced_measure(a: &HermitianObservable, psi: &StateVector) -> Result<AtomicComb> {
    check_dims(a, psi)?;
    AtomicComb::finite(induced_atoms(&eigendecompose(a), psi))
}

/// `⟨Aψ, ψ⟩`; the imaginary part must vanish to `1e-10 · max(1, ‖A‖)`.
pub fn qm_mean(a: &HermitianObservable, psi: &StateVector) -> Result<f64> {
    check_dims(a, psi)?;
    let v = psi.amplitudes();
    let q = v.dotc(&(a.matrix() * v));
    if q.im.abs() > 1e-10 * a.norm().max(1.0) {
        return Err(invalid(format!("quadratic form has imaginary part {}", q.im)));
    }
    Ok(q.re)
}

/// `‖(A - μI)ψ‖²` with `μ` the mean.
pub fn qm_variance(a: &HermitianObservable, psi: &StateVector) -> Result<f64> {
    let mu = qm_mean(a, psi)?;
    let v = psi.amplitudes();
    let r = a.matrix() * v - v * C64::new(mu, 0.0);
    Ok(r.norm_squared())
}

/// `E = Σ_{λ>0} √λ v v*` and `F = Σ_{λ<0} √(-λ) v v*`; zero eigenvalues join neither.
pub fn pos_neg_split(dec: &SpectralDecomposition) -> (DMatrix<C64>, DMatrix<C64>) {
    let e = dec.apply_function(|l| if l > 0.0 { l.sqrt() } else { 0.0 });
    let f = dec.apply_function(|l| if l < 0.0 { (-l).sqrt() } else { 0.0 });
    (e, f)
}

/// `⟨P_A([lo, hi]) ψ, ψ⟩` from the eigenprojections.
pub fn projection_mass(dec: &SpectralDecomposition, psi: &StateVector, lo: f64, hi: f64) -> f64 {
    let p = dec.apply_function(|l| if lo <= l && l <= hi { 1.0 } else { 0.0 });
    let v = psi.amplitudes();
    v.dotc(&(p * v)).re
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectralReport {
    pub dim: usize,
    pub matrix_norm: f64,
    pub eigenvalues: Vec<f64>,
    /// `[location, weight]` of the induced measure.
    pub atoms: Vec<[f64; 2]>,
    pub qm_mean: f64,
    pub qm_variance: f64,
    /// `‖A - V Λ V*‖_F`.
    pub reconstruction_residual: f64,
    /// `|⟨Aψ, ψ⟩ - (‖Eψ‖² - ‖Fψ‖²)|`.
    pub mean_identity_residual: f64,
    /// `|qm_variance - second central moment of the induced measure|`.
    pub variance_identity_residual: f64,
    /// `‖E² - F² - A‖_F`.
    pub split_residual: f64,
    /// `max(‖EF‖_F, ‖FE‖_F)`.
    pub cross_residual: f64,
}

pub fn spectral_report(a: &HermitianObservable, psi: &StateVector) -> Result<SpectralReport> {
    check_dims(a, psi)?;
    let dec = eigendecompose(a);
    let atoms = induced_atoms(&dec, psi);
    let mean = qm_mean(a, psi)?;
    let variance = qm_variance(a, psi)?;
    let (e, f) = pos_neg_split(&dec);
    let v = psi.amplitudes();
    let split_mean = (&e * v).norm_squared() - (&f * v).norm_squared();
    let first: f64 = atoms.iter().map(|a| a.location * a.weight).sum();
    let central: f64 = atoms.iter().map(|a| (a.location - first).powi(2) * a.weight).sum();
    Ok(SpectralReport {
        dim: a.dim(),
        matrix_norm: a.norm(),
        atoms: atoms.iter().map(|a| [a.location, a.weight]).collect(),
        qm_mean: mean,
        qm_variance: variance,
        reconstruction_residual: dec.reconstruction_residual(a),
        mean_identity_residual: (mean - split_mean).abs(),
        variance_identity_residual: (variance - central).abs(),
        split_residual: frob(&(&e * &e - &f * &f - a.matrix())),
        cross_residual: frob(&(&e * &f)).max(frob(&(&f * &e))),
        eigenvalues: dec.eigenvalues,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_matrix_is_already_decomposed() {
        let a = HermitianObservable::diagonal(&[1.0, 2.0, 3.0]).unwrap();
        let dec = eigendecompose(&a);
        assert_eq!(dec.eigenvalues, vec![1.0, 2.0, 3.0]);
        assert_eq!(dec.eigenvectors, DMatrix::identity(3, 3));
    }

    #[test]
    fn pauli_x() {
        let a = HermitianObservable::from_real(DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0])).unwrap();
        let dec = eigendecompose(&a);
        assert!((dec.eigenvalues[0] + 1.0).abs() < 1e-15 && (dec.eigenvalues[1] - 1.0).abs() < 1e-15);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let v0 = dec.eigenvectors.column(0);
        // up to a global phase, (1, -1)/√2
        assert!((v0[0].norm() - h).abs() < 1e-15);
        assert!((v0[0] + v0[1]).norm() < 1e-15);
        let psi = StateVector::from_real(&[1.0, 0.0]).unwrap();
        let atoms = induced_atoms(&dec, &psi);
        assert_eq!(atoms.len(), 2);
        for (a, loc) in atoms.iter().zip([-1.0, 1.0]) {
            assert!((a.location - loc).abs() < 1e-15 && (a.weight - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn point_mass_and_uniform_state() {
        let a = HermitianObservable::diagonal(&[1.0, 2.0]).unwrap();
        let atoms = induced_atoms(&eigendecompose(&a), &StateVector::from_real(&[1.0, 0.0]).unwrap());
        assert_eq!(atoms, vec![Atom::raw(1.0, 1.0)]);
        let a = HermitianObservable::diagonal(&[1.0, 2.0, 3.0]).unwrap();
        let s = 1.0 / 3f64.sqrt();
        let psi = StateVector::from_real(&[s, s, s]).unwrap();
        assert!((qm_mean(&a, &psi).unwrap() - 2.0).abs() < 1e-15);
        assert!((qm_variance(&a, &psi).unwrap() - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn degenerate_eigenvalues_merge() {
        let a = HermitianObservable::diagonal(&[1.0, 1.0 + 1e-12, 5.0]).unwrap();
        let psi = StateVector::from_real(&[0.6, 0.0, 0.8]).unwrap();
        let atoms = induced_atoms(&eigendecompose(&a), &psi);
        assert_eq!(atoms.len(), 2);
        assert!((atoms[0].weight - 0.36).abs() < 1e-15);
    }

    #[test]
    fn split_of_diagonal() {
        let a = HermitianObservable::diagonal(&[4.0, -9.0]).unwrap();
        let (e, f) = pos_neg_split(&eigendecompose(&a));
        let re = |m: &DMatrix<C64>| m.map(|z| z.re);
        assert_eq!(re(&e), DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 0.0]));
        assert_eq!(re(&f), DMatrix::from_row_slice(2, 2, &[0.0, 0.0, 0.0, 3.0]));
    }

    #[test]
    fn rejects_non_hermitian_and_bad_states() {
        let a = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 2.0, 0.0]);
        assert!(matches!(
            HermitianObservable::from_real(a),
            Err(Error::NotHermitian { .. })
        ));
        assert!(StateVector::from_real(&[1.0, 1.0]).is_err());
        let a = HermitianObservable::diagonal(&[1.0, 2.0]).unwrap();
        let psi = StateVector::from_real(&[1.0]).unwrap();
        assert!(matches!(qm_mean(&a, &psi), Err(Error::DimensionMismatch { .. })));
    }
}

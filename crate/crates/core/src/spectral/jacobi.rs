//! Cyclic Jacobi eigensolver for dense Hermitian matrices.

use nalgebra::{Complex, DMatrix};

type C64 = Complex<f64>;

const MAX_SWEEPS: usize = 100;

fn off_norm(a: &DMatrix<C64>) -> f64 {
    let n = a.nrows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Zeroes `a[(p, q)]` by a phase change on column `q` followed by a real plane rotation.
fn annihilate(a: &mut DMatrix<C64>, v: &mut DMatrix<C64>, p: usize, q: usize) {
    let apq = a[(p, q)];
    let r = apq.norm();
    if r == 0.0 {
        return;
    }
    let n = a.nrows();
    // D = diag(.., e^{-iφ} at q, ..) makes the pivot real and positive
    let phase = apq.conj() / r;
    for k in 0..n {
        a[(k, q)] *= phase;
        v[(k, q)] *= phase;
    }
    let phase_conj = phase.conj();
    for k in 0..n {
        a[(q, k)] *= phase_conj;
    }
    let (app, aqq) = (a[(p, p)].re, a[(q, q)].re);
    let theta = 0.5 * (2.0 * r).atan2(aqq - app);
    let (s, c) = theta.sin_cos();
    for k in 0..n {
        let (kp, kq) = (a[(k, p)], a[(k, q)]);
        a[(k, p)] = kp * c - kq * s;
        a[(k, q)] = kp * s + kq * c;
        let (vp, vq) = (v[(k, p)], v[(k, q)]);
        v[(k, p)] = vp * c - vq * s;
        v[(k, q)] = vp * s + vq * c;
    }
    for k in 0..n {
        let (pk, qk) = (a[(p, k)], a[(q, k)]);
        a[(p, k)] = pk * c - qk * s;
        a[(q, k)] = pk * s + qk * c;
    }
    a[(p, q)] = C64::new(0.0, 0.0);
    a[(q, p)] = C64::new(0.0, 0.0);
    a[(p, p)].im = 0.0;
    a[(q, q)].im = 0.0;
}

/// Eigenvalues (ascending) and unitary eigenvector matrix of a Hermitian `a`.
///
/// Sweeps run until the off-diagonal Frobenius norm is at most `tol · ‖a‖_F`, then
/// one more sweep polishes the result.
pub(crate) fn jacobi_eigen(a: &DMatrix<C64>, tol: f64) -> (Vec<f64>, DMatrix<C64>) {
    let n = a.nrows();
    let mut a = a.clone();
    let mut v = DMatrix::<C64>::identity(n, n);
    let scale = a.norm();
    let mut extra = false;
    for _ in 0..MAX_SWEEPS {
        let done = off_norm(&a) <= tol * scale;
        if done && extra {
            break;
        }
        extra = done;
        for p in 0..n {
            for q in p + 1..n {
                annihilate(&mut a, &mut v, p, q);
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    (values, vectors)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_two_by_two() {
        // [[2, i], [-i, 2]] has eigenvalues 1 and 3
        let a = DMatrix::from_row_slice(
            2,
            2,
            &[
                C64::new(2.0, 0.0),
                C64::new(0.0, 1.0),
                C64::new(0.0, -1.0),
                C64::new(2.0, 0.0),
            ],
        );
        let (vals, vecs) = jacobi_eigen(&a, 1e-12);
        assert!((vals[0] - 1.0).abs() < 1e-14 && (vals[1] - 3.0).abs() < 1e-14);
        for (k, l) in vals.iter().enumerate() {
            let r = &a * vecs.column(k) - vecs.column(k) * C64::new(*l, 0.0);
            assert!(r.norm() < 1e-13);
        }
    }
}

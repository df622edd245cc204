//! Dense symmetric solvers backed by `nalgebra`.

use nalgebra::{Cholesky, DMatrix, DVector, SymmetricEigen};

/// Result of an iterative solve.
#[derive(Debug, Clone)]
pub struct IterativeSolution {
    pub x: DVector<f64>,
    pub iterations: usize,
    pub relative_residual: f64,
    pub converged: bool,
}

/// `‖b - A x‖₂ / ‖b‖₂`, or `‖A x‖₂` when `b = 0`.
pub fn relative_residual(a: &DMatrix<f64>, x: &DVector<f64>, b: &DVector<f64>) -> f64 {
    let r = b - a * x;
    let bn = b.norm();
    if bn == 0.0 {
        r.norm()
    } else {
        r.norm() / bn
    }
}

/// Cholesky solve with up to two steps of iterative refinement.
///
/// Returns `None` when the factorization breaks down.
pub fn cholesky_solve(
    a: &DMatrix<f64>,
    b: &DVector<f64>,
    tol: f64,
) -> Option<(DVector<f64>, f64, Cholesky<f64, nalgebra::Dyn>)> {
    let chol = Cholesky::new(a.clone())?;
    let mut x = chol.solve(b);
    let mut res = relative_residual(a, &x, b);
    for _ in 0..2 {
        if res <= tol || !res.is_finite() {
            break;
        }
        let r = b - a * &x;
        let candidate = &x + chol.solve(&r);
        let cand_res = relative_residual(a, &candidate, b);
        if cand_res < res {
            x = candidate;
            res = cand_res;
        } else {
            break;
        }
    }
    if x.iter().all(|v| v.is_finite()) {
        Some((x, res, chol))
    } else {
        None
    }
}

/// Conjugate gradients with diagonal (Jacobi) preconditioning.
pub fn preconditioned_cg(
    a: &DMatrix<f64>,
    b: &DVector<f64>,
    tol: f64,
    max_iter: usize,
) -> IterativeSolution {
    let n = b.len();
    let bn = b.norm();
    let mut x = DVector::zeros(n);
    if bn == 0.0 {
        return IterativeSolution {
            x,
            iterations: 0,
            relative_residual: 0.0,
            converged: true,
        };
    }
    let inv_diag: Vec<f64> = (0..n)
        .map(|i| {
            let d = a[(i, i)];
            if d > 0.0 {
                1.0 / d
            } else {
                1.0
            }
        })
        .collect();
    let precondition = |r: &DVector<f64>| DVector::from_fn(n, |i, _| inv_diag[i] * r[i]);
    let mut r = b.clone();
    let mut z = precondition(&r);
    let mut p = z.clone();
    let mut rz = r.dot(&z);
    let mut iterations = 0;
    while iterations < max_iter {
        let ap = a * &p;
        let pap = p.dot(&ap);
        if !(pap > 0.0) {
            break;
        }
        let step = rz / pap;
        x.axpy(step, &p, 1.0);
        r.axpy(-step, &ap, 1.0);
        iterations += 1;
        if r.norm() <= tol * bn {
            break;
        }
        z = precondition(&r);
        let rz_next = r.dot(&z);
        let beta = rz_next / rz;
        rz = rz_next;
        p = &z + beta * &p;
    }
    let relative_residual = relative_residual(a, &x, b);
    IterativeSolution {
        x,
        iterations,
        relative_residual,
        converged: relative_residual <= tol,
    }
}

/// Deterministic starting vector for power iterations.
fn start_vector(n: usize) -> DVector<f64> {
    let v = DVector::from_fn(n, |i, _| 1.0 + 0.01 * ((i * 7919) % 101) as f64);
    let norm = v.norm();
    v / norm
}

/// Rayleigh-quotient estimate of the largest eigenvalue of an SPD matrix.
pub fn power_lambda_max(a: &DMatrix<f64>, iterations: usize) -> f64 {
    let mut v = start_vector(a.nrows());
    let mut lambda = 0.0;
    for _ in 0..iterations {
        let w = a * &v;
        lambda = v.dot(&w);
        let norm = w.norm();
        if norm == 0.0 {
            return 0.0;
        }
        v = w / norm;
    }
    lambda
}

/// Inverse-iteration estimate of the smallest eigenvalue, reusing a
/// Cholesky factor.
pub fn inverse_lambda_min(chol: &Cholesky<f64, nalgebra::Dyn>, iterations: usize) -> f64 {
    let n = chol.l_dirty().nrows();
    let mut v = start_vector(n);
    let mut mu = 0.0;
    for _ in 0..iterations {
        let w = chol.solve(&v);
        mu = v.dot(&w);
        let norm = w.norm();
        if norm == 0.0 || !norm.is_finite() {
            return 0.0;
        }
        v = w / norm;
    }
    if mu > 0.0 {
        1.0 / mu
    } else {
        0.0
    }
}

/// Exact extreme eigenvalues of a symmetric matrix.
pub fn symmetric_extremes(a: &DMatrix<f64>) -> (f64, f64) {
    let eig = SymmetricEigen::new(a.clone());
    (eig.eigenvalues.min(), eig.eigenvalues.max())
}

/// Gershgorin upper bound on the spectral radius.
pub fn gershgorin_bound(a: &DMatrix<f64>) -> f64 {
    a.row_iter()
        .map(|row| row.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spd(n: usize) -> DMatrix<f64> {
        DMatrix::from_fn(n, n, |i, j| {
            let d = (i as f64 - j as f64).abs();
            (-0.7 * d).exp() + if i == j { 0.5 } else { 0.0 }
        })
    }

    #[test]
    fn cholesky_solves_to_tolerance() {
        let a = spd(40);
        let b = DVector::from_fn(40, |i, _| (i as f64).sin());
        let (x, res, _) = cholesky_solve(&a, &b, 1e-13).unwrap();
        assert!(res <= 1e-13);
        assert!(relative_residual(&a, &x, &b) <= 1e-13);
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        let b = DVector::from_element(2, 1.0);
        assert!(cholesky_solve(&a, &b, 1e-12).is_none());
    }

    #[test]
    fn cg_agrees_with_cholesky() {
        let a = spd(30);
        let b = DVector::from_fn(30, |i, _| 1.0 / (1.0 + i as f64));
        let cg = preconditioned_cg(&a, &b, 1e-12, 300);
        assert!(cg.converged);
        let (x, _, _) = cholesky_solve(&a, &b, 1e-13).unwrap();
        assert!((cg.x - x).norm() < 1e-9);
    }

    #[test]
    fn cg_zero_rhs() {
        let a = spd(5);
        let cg = preconditioned_cg(&a, &DVector::zeros(5), 1e-12, 50);
        assert!(cg.converged);
        assert_eq!(cg.iterations, 0);
        assert_eq!(cg.x.norm(), 0.0);
    }

    #[test]
    fn eigen_estimates_bracket_truth() {
        let a = spd(25);
        let (lo, hi) = symmetric_extremes(&a);
        let chol = Cholesky::new(a.clone()).unwrap();
        let pmax = power_lambda_max(&a, 200);
        let pmin = inverse_lambda_min(&chol, 200);
        assert!(pmax <= hi * (1.0 + 1e-12) && pmax > 0.99 * hi);
        assert!(pmin >= lo * (1.0 - 1e-12) && pmin < 1.01 * lo);
        assert!(gershgorin_bound(&a) >= hi);
    }
}

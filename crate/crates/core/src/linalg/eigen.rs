//! Symmetric eigendecomposition by cyclic Jacobi rotations.

use super::Mat;
use crate::{Error, Result};

/// Relative off-diagonal Frobenius tolerance at which sweeps stop.
pub const JACOBI_TOL: f64 = 1e-12;

const MAX_SWEEPS: usize = 100;

/// Eigendecomposition of a symmetric matrix: eigenvalues in descending order
/// with matching orthonormal eigenvector columns, so that QΛQᵀ = m.
///
/// Cyclic Jacobi sweeps run until the off-diagonal Frobenius norm drops below
/// `JACOBI_TOL` times the initial Frobenius norm of the input.
pub fn sym_eig(m: &Mat<f64>) -> Result<(Vec<f64>, Mat<f64>)> {
    if m.rows() != m.cols() {
        return Err(Error::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let n = m.rows();
    if n == 0 {
        return Ok((Vec::new(), Mat::zeros(0, 0)));
    }
    let mut a = m.clone();
    let mut q: Mat<f64> = Mat::identity(n);
    let norm0 = frobenius(m);
    if norm0 == 0.0 {
        return Ok(sorted(vec![0.0; n], q));
    }
    let target = JACOBI_TOL * norm0;
    for _ in 0..MAX_SWEEPS {
        if off_diag_norm(&a) < target {
            let evals = (0..n).map(|i| a[(i, i)]).collect();
            return Ok(sorted(evals, q));
        }
        for p in 0..n - 1 {
            for r in p + 1..n {
                let apr = a[(p, r)];
                if apr == 0.0 {
                    continue;
                }
                // Rotation angle that annihilates a[p][r], Numerical Recipes
                // style for accuracy near theta -> inf.
                let theta = 0.5 * (a[(r, r)] - a[(p, p)]) / apr;
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    let s = 1.0 / (theta.abs() + (1.0 + theta * theta).sqrt());
                    if theta < 0.0 {
                        -s
                    } else {
                        s
                    }
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                apply_rotation(&mut a, &mut q, p, r, c, s);
            }
        }
    }
    if off_diag_norm(&a) < target {
        let evals = (0..n).map(|i| a[(i, i)]).collect();
        return Ok(sorted(evals, q));
    }
    Err(Error::NoConvergence(format!(
        "jacobi sweeps exhausted at off-diagonal norm {:.3e} (target {:.3e})",
        off_diag_norm(&a),
        target
    )))
}

fn apply_rotation(a: &mut Mat<f64>, q: &mut Mat<f64>, p: usize, r: usize, c: f64, s: f64) {
    let n = a.rows();
    for k in 0..n {
        let akp = a[(k, p)];
        let akr = a[(k, r)];
        a[(k, p)] = c * akp - s * akr;
        a[(k, r)] = s * akp + c * akr;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let ark = a[(r, k)];
        a[(p, k)] = c * apk - s * ark;
        a[(r, k)] = s * apk + c * ark;
    }
    for k in 0..n {
        let qkp = q[(k, p)];
        let qkr = q[(k, r)];
        q[(k, p)] = c * qkp - s * qkr;
        q[(k, r)] = s * qkp + c * qkr;
    }
}

fn sorted(evals: Vec<f64>, q: Mat<f64>) -> (Vec<f64>, Mat<f64>) {
    let n = evals.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| evals[j].partial_cmp(&evals[i]).unwrap());
    let sorted_vals: Vec<f64> = order.iter().map(|&i| evals[i]).collect();
    let sorted_q = Mat::from_fn(n, n, |i, j| q[(i, order[j])]);
    (sorted_vals, sorted_q)
}

pub fn frobenius(m: &Mat<f64>) -> f64 {
    m.data().iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn off_diag_norm(a: &Mat<f64>) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)] * a[(i, j)];
            }
        }
    }
    s.sqrt()
}

/// Smallest eigenvalue and its unit eigenvector.
pub fn min_eig(m: &Mat<f64>) -> Result<(f64, Vec<f64>)> {
    let (vals, q) = sym_eig(m)?;
    let n = vals.len();
    Ok((vals[n - 1], q.col(n - 1)))
}

//! Exact rational elimination: rank, kernels, solving, inversion, and the
//! pivoting psd test with rational witnesses in both directions.

use super::Mat;
use crate::scalar::Rational;
use crate::{Error, Result};
use num_traits::{Signed, Zero};

/// Reduced row echelon form, in place. Returns the pivot columns.
pub fn rref(m: &mut Mat<Rational>) -> Vec<usize> {
    let (rows, cols) = (m.rows(), m.cols());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        // Largest absolute entry in the column keeps intermediate values tame.
        let mut best: Option<usize> = None;
        for i in r..rows {
            if !m[(i, c)].is_zero() && best.is_none_or(|b| m[(i, c)].abs() > m[(b, c)].abs()) {
                best = Some(i);
            }
        }
        let Some(p) = best else { continue };
        if p != r {
            for j in 0..cols {
                let t = m[(p, j)].clone();
                m[(p, j)] = m[(r, j)].clone();
                m[(r, j)] = t;
            }
        }
        let inv = m[(r, c)].clone().recip();
        for j in c..cols {
            m[(r, j)] = m[(r, j)].clone() * inv.clone();
        }
        for i in 0..rows {
            if i != r && !m[(i, c)].is_zero() {
                let f = m[(i, c)].clone();
                for j in c..cols {
                    let t = f.clone() * m[(r, j)].clone();
                    m[(i, j)] = m[(i, j)].clone() - t;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(m: &Mat<Rational>) -> usize {
    let mut w = m.clone();
    rref(&mut w).len()
}

/// Basis of the right kernel {x : Mx = 0}.
pub fn kernel_basis(m: &Mat<Rational>) -> Vec<Vec<Rational>> {
    let mut w = m.clone();
    let pivots = rref(&mut w);
    let cols = m.cols();
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    let mut basis = Vec::with_capacity(free.len());
    for &f in &free {
        let mut v = vec![Rational::zero(); cols];
        v[f] = Rational::from_integer(1.into());
        for (r, &p) in pivots.iter().enumerate() {
            v[p] = -w[(r, f)].clone();
        }
        basis.push(v);
    }
    basis
}

/// One solution of Mx = b, if any.
pub fn solve(m: &Mat<Rational>, b: &[Rational]) -> Option<Vec<Rational>> {
    assert_eq!(m.rows(), b.len());
    let mut aug = Mat::from_fn(m.rows(), m.cols() + 1, |i, j| {
        if j < m.cols() {
            m[(i, j)].clone()
        } else {
            b[i].clone()
        }
    });
    let pivots = rref(&mut aug);
    if pivots.contains(&m.cols()) {
        return None; // inconsistent: pivot in the augmented column
    }
    let mut x = vec![Rational::zero(); m.cols()];
    for (r, &p) in pivots.iter().enumerate() {
        x[p] = aug[(r, m.cols())].clone();
    }
    Some(x)
}

/// Inverse of a square rational matrix.
pub fn invert(m: &Mat<Rational>) -> Result<Mat<Rational>> {
    if m.rows() != m.cols() {
        return Err(Error::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let n = m.rows();
    let mut aug = Mat::from_fn(n, 2 * n, |i, j| {
        if j < n {
            m[(i, j)].clone()
        } else if j - n == i {
            Rational::from_integer(1.into())
        } else {
            Rational::zero()
        }
    });
    let pivots = rref(&mut aug);
    if pivots.len() < n || pivots.iter().any(|&p| p >= n) {
        return Err(Error::Invalid("matrix is singular".into()));
    }
    Ok(Mat::from_fn(n, n, |i, j| aug[(i, n + j)].clone()))
}

/// Outcome of the exact psd test.
#[derive(Clone, Debug)]
pub enum PsdOutcome {
    /// M = L·diag(d)·Lᵀ restricted to the pivot order `perm`, all d ≥ 0.
    Psd {
        perm: Vec<usize>,
        diag: Vec<Rational>,
        lower: Mat<Rational>,
    },
    /// Rational vector with vᵀMv < 0.
    NotPsd { witness: Vec<Rational> },
}

impl PsdOutcome {
    pub fn is_psd(&self) -> bool {
        matches!(self, PsdOutcome::Psd { .. })
    }
}

/// Exact psd test for a symmetric rational matrix by recursive pivoting:
/// a negative diagonal entry or a zero diagonal entry with a nonzero row
/// refutes; otherwise pivot on the largest diagonal entry, form the Schur
/// complement and recurse. Both outcomes carry checkable data: an LDLᵀ
/// factorization, or a vector with vᵀMv < 0.
pub fn exact_psd_test(m: &Mat<Rational>) -> Result<PsdOutcome> {
    m.require_symmetric()?;
    let n = m.rows();
    let mut a = m.clone();
    // perm[k] = original index pivoted at step k; `done` marks eliminated rows.
    let mut perm: Vec<usize> = Vec::with_capacity(n);
    let mut active: Vec<usize> = (0..n).collect();
    let mut diag: Vec<Rational> = Vec::with_capacity(n);
    // lower[(k, j)] = multiplier of pivot k in row perm-order j (j > k).
    let mut lower = Mat::zeros(n, n);
    // Elimination history for lifting Schur-complement witnesses back to the
    // original coordinates: at step k with pivot p, row i gets v[p] -=
    // (a[i,p]/a[p,p]) * v[i] contributions reversed below.
    let mut steps: Vec<(usize, Rational, Vec<(usize, Rational)>)> = Vec::new();

    loop {
        // Refutations on the active principal submatrix.
        for &i in &active {
            if a[(i, i)].is_negative() {
                let mut w = vec![Rational::zero(); n];
                w[i] = Rational::from_integer(1.into());
                return Ok(PsdOutcome::NotPsd {
                    witness: lift_witness(w, &steps),
                });
            }
        }
        for &i in &active {
            if a[(i, i)].is_zero() {
                for &j in &active {
                    if j != i && !a[(i, j)].is_zero() {
                        // 2x2 block [[0, b],[b, c]] is indefinite: pick t with
                        // q(t) = -2t·b·s + c < 0 where s = sign choice.
                        let b = a[(i, j)].clone();
                        let c = a[(j, j)].clone();
                        let s = if b.is_positive() {
                            -Rational::from_integer(1.into())
                        } else {
                            Rational::from_integer(1.into())
                        };
                        // q(t) = t²·0 + 2t·s·b + c = -2t|b| + c < 0 for
                        // t = (c + 1)/(2|b|).
                        let t = (c + Rational::from_integer(1.into()))
                            / (Rational::from_integer(2.into()) * b.abs());
                        let mut w = vec![Rational::zero(); n];
                        w[i] = t;
                        w[j] = s;
                        return Ok(PsdOutcome::NotPsd {
                            witness: lift_witness(w, &steps),
                        });
                    }
                }
            }
        }
        // Pivot on the largest diagonal entry (deterministic).
        let Some(&p) = active
            .iter()
            .filter(|&&i| a[(i, i)].is_positive())
            .max_by(|&&i, &&j| a[(i, i)].cmp(&a[(j, j)]))
        else {
            // All remaining diagonal entries are zero with zero rows: psd.
            return Ok(PsdOutcome::Psd { perm, diag, lower });
        };
        let d = a[(p, p)].clone();
        let k = perm.len();
        perm.push(p);
        diag.push(d.clone());
        active.retain(|&i| i != p);
        let mut mults: Vec<(usize, Rational)> = Vec::new();
        let col: Vec<(usize, Rational)> = active
            .iter()
            .map(|&i| (i, a[(i, p)].clone()))
            .filter(|(_, v)| !v.is_zero())
            .collect();
        for (i, v) in &col {
            mults.push((*i, v.clone() / d.clone()));
        }
        // Schur complement update on the active block.
        for (i, vi) in &col {
            for (j, vj) in &col {
                let t = vi.clone() * vj.clone() / d.clone();
                a[(*i, *j)] = a[(*i, *j)].clone() - t;
            }
        }
        for (i, f) in &mults {
            // Record multipliers for the factor output keyed by the original
            // index; rows are re-keyed to pivot order at the end.
            lower[(*i, k)] = f.clone();
        }
        steps.push((p, d, mults));
        if perm.len() == n {
            return Ok(PsdOutcome::Psd { perm, diag, lower });
        }
    }
}

/// Lifts a Schur-complement witness back through the elimination steps:
/// if wᵀ(M/p)w < 0 then v = w − (m_pᵀw/d)·e_p satisfies vᵀMv = wᵀ(M/p)w.
fn lift_witness(
    mut w: Vec<Rational>,
    steps: &[(usize, Rational, Vec<(usize, Rational)>)],
) -> Vec<Rational> {
    for (p, _d, mults) in steps.iter().rev() {
        let mut corr = Rational::zero();
        for (i, f) in mults {
            corr += f.clone() * w[*i].clone();
        }
        w[*p] = -corr;
    }
    w
}

/// Re-multiplies an LDLᵀ factorization and checks it reproduces `m` with all
/// pivots nonnegative. Rows of `lower` are keyed by original index; `perm`
/// lists pivot order.
pub fn verify_psd_factor(
    m: &Mat<Rational>,
    perm: &[usize],
    diag: &[Rational],
    lower: &Mat<Rational>,
) -> bool {
    if diag.iter().any(|d| d.is_negative()) {
        return false;
    }
    let n = m.rows();
    // Reconstruct: M ?= Σ_k d_k · l_k l_kᵀ where l_k is column k of `lower`
    // (keyed by original row index, with l_k[perm[k]] = 1).
    let mut rec: Mat<Rational> = Mat::zeros(n, n);
    for (k, d) in diag.iter().enumerate() {
        let mut lk = vec![Rational::zero(); n];
        for i in 0..n {
            lk[i] = lower[(i, k)].clone();
        }
        lk[perm[k]] = Rational::from_integer(1.into());
        for i in 0..n {
            if lk[i].is_zero() {
                continue;
            }
            for j in 0..n {
                if lk[j].is_zero() {
                    continue;
                }
                let t = d.clone() * lk[i].clone() * lk[j].clone();
                rec[(i, j)] = rec[(i, j)].clone() + t;
            }
        }
    }
    rec == *m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::dot;
    use crate::scalar::{rat, ratio};

    fn rmat(rows: &[&[i64]]) -> Mat<Rational> {
        Mat::from_rows(rows.iter().map(|r| r.iter().map(|&x| rat(x)).collect()).collect())
    }

    #[test]
    fn psd_positive_case() {
        let m = rmat(&[&[2, 1], &[1, 1]]);
        let out = exact_psd_test(&m).unwrap();
        match &out {
            PsdOutcome::Psd { perm, diag, lower } => {
                assert!(verify_psd_factor(&m, perm, diag, lower));
                assert_eq!(diag, &[rat(2), ratio(1, 2)]);
            }
            _ => panic!("expected psd"),
        }
    }

    #[test]
    fn psd_negative_schur() {
        let m = rmat(&[&[1, 2], &[2, 1]]);
        match exact_psd_test(&m).unwrap() {
            PsdOutcome::NotPsd { witness } => {
                let q = dot(&witness, &m.matvec(&witness));
                assert!(q.is_negative(), "witness form value {q}");
            }
            _ => panic!("expected not psd"),
        }
    }

    #[test]
    fn psd_zero_diagonal_nonzero_row() {
        let m = rmat(&[&[0, 1], &[1, 0]]);
        match exact_psd_test(&m).unwrap() {
            PsdOutcome::NotPsd { witness } => {
                let q = dot(&witness, &m.matvec(&witness));
                assert!(q.is_negative());
            }
            _ => panic!("expected not psd"),
        }
    }

    #[test]
    fn psd_empty_and_zero() {
        assert!(exact_psd_test(&Mat::zeros(0, 0)).unwrap().is_psd());
        assert!(exact_psd_test(&Mat::zeros(3, 3)).unwrap().is_psd());
    }

    #[test]
    fn psd_rejects_nonsymmetric() {
        let m = rmat(&[&[1, 2], &[0, 1]]);
        assert!(exact_psd_test(&m).is_err());
    }

    #[test]
    fn solve_and_kernel() {
        let m = rmat(&[&[1, 2, 3], &[2, 4, 6]]);
        assert_eq!(rank(&m), 1);
        let k = kernel_basis(&m);
        assert_eq!(k.len(), 2);
        for v in &k {
            assert!(m.matvec(v).iter().all(|x| x.is_zero()));
        }
        let b = vec![rat(6), rat(12)];
        let x = solve(&m, &b).unwrap();
        assert_eq!(m.matvec(&x), b);
        assert!(solve(&m, &[rat(1), rat(0)]).is_none());
    }

    #[test]
    fn invert_round_trip() {
        let m = rmat(&[&[2, 1], &[1, 1]]);
        let inv = invert(&m).unwrap();
        assert_eq!(m.matmul(&inv), Mat::identity(2));
        assert!(invert(&rmat(&[&[1, 2], &[2, 4]])).is_err());
    }

    #[test]
    fn psd_random_gram_matrices() {
        // AᵀA is always psd; AᵀA − c·I for large c is not.
        let a = rmat(&[&[1, -2, 0, 3], &[2, 1, 1, -1], &[0, 5, -2, 1]]);
        let g = a.transpose().matmul(&a);
        assert!(exact_psd_test(&g).unwrap().is_psd());
        let mut shifted = g.clone();
        for i in 0..4 {
            shifted[(i, i)] = shifted[(i, i)].clone() - rat(100);
        }
        match exact_psd_test(&shifted).unwrap() {
            PsdOutcome::NotPsd { witness } => {
                assert!(dot(&witness, &shifted.matvec(&witness)).is_negative());
            }
            _ => panic!("expected not psd"),
        }
    }
}

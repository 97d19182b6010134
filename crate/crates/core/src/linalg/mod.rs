//! Dense linear algebra over a generic scalar: exact rationals or `f64`.
//!
//! Exact-only routines (elimination, rank, kernels, the psd test) live in
//! [`exact`]; the floating-point Jacobi eigensolver in [`eigen`]; the
//! Hermitian coordinate space and its real embedding in [`herm`].

pub mod eigen;
pub mod exact;
pub mod herm;

use crate::scalar::Scalar;
use crate::{Error, Result};

/// Dense row-major matrix.
#[derive(Clone, PartialEq)]
pub struct Mat<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: std::fmt::Debug> std::fmt::Debug for Mat<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "Mat {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            writeln!(f, "  {:?}", &self.data[r * self.cols..(r + 1) * self.cols])?;
        }
        write!(f, "]")
    }
}

impl<T: Scalar> Mat<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged rows");
        Mat {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Mat { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn transpose(&self) -> Self {
        Mat::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> Mat<U> {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a.clone() + b.clone())
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a.clone() - b.clone())
                .collect(),
        }
    }

    pub fn scale(&self, s: &T) -> Self {
        self.map(|x| x.clone() * s.clone())
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matmul shape mismatch");
        let mut out: Mat<T> = Mat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)].clone();
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let t = a.clone() * other[(k, j)].clone();
                    out[(i, j)] = out[(i, j)].clone() + t;
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.cols, v.len(), "matvec shape mismatch");
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .map(|(a, b)| a.clone() * b.clone())
                    .sum()
            })
            .collect()
    }

    pub fn is_symmetric(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| (0..i).all(|j| self[(i, j)] == self[(j, i)]))
    }

    /// Checks squareness and symmetry, the shared precondition of the
    /// symmetric kernels.
    pub fn require_symmetric(&self) -> Result<()> {
        if self.rows != self.cols {
            return Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        if !self.is_symmetric() {
            return Err(Error::NotSymmetric);
        }
        Ok(())
    }
}

impl<T> std::ops::Index<(usize, usize)> for Mat<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for Mat<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

/// Kronecker product. Satisfies (a⊗b)(x⊗y) = (ax)⊗(by) under row-major
/// index flattening (left factor major).
pub fn kron<T: Scalar>(a: &Mat<T>, b: &Mat<T>) -> Mat<T> {
    let mut out = Mat::zeros(a.rows() * b.rows(), a.cols() * b.cols());
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            let s = a[(i, j)].clone();
            if s.is_zero() {
                continue;
            }
            for p in 0..b.rows() {
                for q in 0..b.cols() {
                    out[(i * b.rows() + p, j * b.cols() + q)] = s.clone() * b[(p, q)].clone();
                }
            }
        }
    }
    out
}

/// Kronecker product of two vectors (left factor major).
pub fn kron_vec<T: Scalar>(a: &[T], b: &[T]) -> Vec<T> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for x in a {
        for y in b {
            out.push(x.clone() * y.clone());
        }
    }
    out
}

pub fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    assert_eq!(a.len(), b.len(), "dot length mismatch");
    a.iter().zip(b).map(|(x, y)| x.clone() * y.clone()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, Rational};

    fn rmat(rows: &[&[i64]]) -> Mat<Rational> {
        Mat::from_rows(rows.iter().map(|r| r.iter().map(|&x| rat(x)).collect()).collect())
    }

    #[test]
    fn kron_identity_case() {
        let i2: Mat<Rational> = Mat::identity(2);
        assert_eq!(kron(&i2, &i2), Mat::identity(4));
    }

    #[test]
    fn kron_scalar_scaling() {
        let a = rmat(&[&[2]]);
        let b = rmat(&[&[3, 0], &[0, 3]]);
        assert_eq!(kron(&a, &b), rmat(&[&[6, 0], &[0, 6]]));
    }

    #[test]
    fn kron_acts_on_elementary_tensors() {
        // (swap ⊗ id)(e1⊗e1) = e2⊗e1 under row-major flattening.
        let swap = rmat(&[&[0, 1], &[1, 0]]);
        let id = rmat(&[&[1, 0], &[0, 1]]);
        let k = kron(&swap, &id);
        let e1e1 = vec![rat(1), rat(0), rat(0), rat(0)];
        let out = k.matvec(&e1e1);
        assert_eq!(out, vec![rat(0), rat(0), rat(1), rat(0)]);
    }

    #[test]
    fn kron_mixed_product_property() {
        let a = rmat(&[&[1, 2], &[0, 1]]);
        let b = rmat(&[&[3], &[1]]);
        let x = vec![rat(1), rat(-1)];
        let y = vec![rat(2)];
        let lhs = kron(&a, &b).matvec(&kron_vec(&x, &y));
        let rhs = kron_vec(&a.matvec(&x), &b.matvec(&y));
        assert_eq!(lhs, rhs);
    }
}

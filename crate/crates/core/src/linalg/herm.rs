//! The real coordinate space of Hermitian d×d matrices.
//!
//! Basis order is fixed once for the whole crate: the d diagonal units E_ii,
//! then for i<j the symmetric pairs E_ij + E_ji, then for i<j the
//! antisymmetric pairs i(E_ij − E_ji). The basis is intentionally
//! unnormalized so that all structure constants stay rational; its Gram
//! matrix under the trace inner product is diagonal with entries 1 (diagonal
//! units) and 2 (off-diagonal pairs). Float-mode code that needs an isometry
//! rescales coordinates by the square roots of the Gram entries.
//!
//! Complex Hermitian matrices never exist as a complex scalar type: they are
//! carried as (real, imaginary) part pairs, and psd questions are answered
//! through the real embedding H = X + iY ↦ [[X, −Y], [Y, X]], which is psd
//! exactly when H is.

use super::{kron, Mat};
use crate::scalar::{ratio, Rational, Scalar};
use crate::{Error, Result};
use num_traits::{One, Zero};

/// A complex matrix as a pair of real matrices.
#[derive(Clone, Debug, PartialEq)]
pub struct CMat<T> {
    pub re: Mat<T>,
    pub im: Mat<T>,
}

impl<T: Scalar> CMat<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMat {
            re: Mat::zeros(rows, cols),
            im: Mat::zeros(rows, cols),
        }
    }

    pub fn from_re(re: Mat<T>) -> Self {
        let im = Mat::zeros(re.rows(), re.cols());
        CMat { re, im }
    }

    pub fn identity(n: usize) -> Self {
        CMat::from_re(Mat::identity(n))
    }

    pub fn rows(&self) -> usize {
        self.re.rows()
    }

    pub fn cols(&self) -> usize {
        self.re.cols()
    }

    pub fn add(&self, other: &Self) -> Self {
        CMat {
            re: self.re.add(&other.re),
            im: self.im.add(&other.im),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        CMat {
            re: self.re.sub(&other.re),
            im: self.im.sub(&other.im),
        }
    }

    pub fn scale_re(&self, s: &T) -> Self {
        CMat {
            re: self.re.scale(s),
            im: self.im.scale(s),
        }
    }

    /// Complex matrix product.
    pub fn matmul(&self, other: &Self) -> Self {
        CMat {
            re: self.re.matmul(&other.re).sub(&self.im.matmul(&other.im)),
            im: self.re.matmul(&other.im).add(&self.im.matmul(&other.re)),
        }
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        CMat {
            re: self.re.transpose(),
            im: self.im.transpose().map(|x| -x.clone()),
        }
    }

    pub fn transpose(&self) -> Self {
        CMat {
            re: self.re.transpose(),
            im: self.im.transpose(),
        }
    }

    pub fn conj(&self) -> Self {
        CMat {
            re: self.re.clone(),
            im: self.im.map(|x| -x.clone()),
        }
    }

    pub fn kron(&self, other: &Self) -> Self {
        CMat {
            re: kron(&self.re, &other.re).sub(&kron(&self.im, &other.im)),
            im: kron(&self.re, &other.im).add(&kron(&self.im, &other.re)),
        }
    }

    pub fn is_hermitian(&self) -> bool {
        self.re.is_symmetric() && self.im == self.im.transpose().map(|x| -x.clone())
    }

    /// Real part of the trace.
    pub fn trace_re(&self) -> T {
        (0..self.rows().min(self.cols()))
            .map(|i| self.re[(i, i)].clone())
            .sum()
    }
}

/// Re Tr(A*·B) — the real trace inner product of two complex matrices.
pub fn trace_inner<T: Scalar>(a: &CMat<T>, b: &CMat<T>) -> T {
    let mut acc = T::zero();
    for (x, y) in a.re.data().iter().zip(b.re.data()) {
        acc = acc + x.clone() * y.clone();
    }
    for (x, y) in a.im.data().iter().zip(b.im.data()) {
        acc = acc + x.clone() * y.clone();
    }
    acc
}

/// One element of the fixed Hermitian basis of side d.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BasisElem {
    Diag(usize),
    Sym(usize, usize),
    Anti(usize, usize),
}

/// Dimension of the Hermitian coordinate space.
pub fn herm_dim(d: usize) -> usize {
    d * d
}

/// Basis element at position `alpha` in the fixed order.
pub fn basis_elem(d: usize, alpha: usize) -> BasisElem {
    debug_assert!(alpha < d * d);
    if alpha < d {
        return BasisElem::Diag(alpha);
    }
    let pairs = d * (d - 1) / 2;
    let (kind_off, sym) = if alpha < d + pairs {
        (alpha - d, true)
    } else {
        (alpha - d - pairs, false)
    };
    // Lexicographic (i, j) with i < j.
    let mut k = kind_off;
    for i in 0..d {
        let row = d - 1 - i;
        if k < row {
            let j = i + 1 + k;
            return if sym {
                BasisElem::Sym(i, j)
            } else {
                BasisElem::Anti(i, j)
            };
        }
        k -= row;
    }
    unreachable!()
}

/// Position of a basis element in the fixed order.
pub fn basis_index(d: usize, elem: BasisElem) -> usize {
    let pair_offset = |i: usize, j: usize| -> usize {
        debug_assert!(i < j && j < d);
        // Number of pairs (a, b), a < b, preceding (i, j) lexicographically.
        (0..i).map(|a| d - 1 - a).sum::<usize>() + (j - i - 1)
    };
    match elem {
        BasisElem::Diag(i) => i,
        BasisElem::Sym(i, j) => d + pair_offset(i, j),
        BasisElem::Anti(i, j) => d + d * (d - 1) / 2 + pair_offset(i, j),
    }
}

/// Diagonal of the Gram matrix of the basis under the trace inner product.
pub fn gram_diag(d: usize) -> Vec<Rational> {
    (0..herm_dim(d))
        .map(|alpha| match basis_elem(d, alpha) {
            BasisElem::Diag(_) => Rational::one(),
            _ => ratio(2, 1),
        })
        .collect()
}

/// The basis matrix H_alpha as a complex matrix with entries in {0, ±1}.
pub fn basis_cmat<T: Scalar>(d: usize, alpha: usize) -> CMat<T> {
    let mut m = CMat::zeros(d, d);
    match basis_elem(d, alpha) {
        BasisElem::Diag(i) => {
            m.re[(i, i)] = T::one();
        }
        BasisElem::Sym(i, j) => {
            m.re[(i, j)] = T::one();
            m.re[(j, i)] = T::one();
        }
        BasisElem::Anti(i, j) => {
            m.im[(i, j)] = T::one();
            m.im[(j, i)] = -T::one();
        }
    }
    m
}

/// Hermitian matrix from its coordinate vector.
pub fn coords_to_cmat<T: Scalar>(d: usize, coords: &[T]) -> Result<CMat<T>> {
    if coords.len() != herm_dim(d) {
        return Err(Error::DimensionMismatch {
            expected: herm_dim(d),
            got: coords.len(),
        });
    }
    let mut m: CMat<T> = CMat::zeros(d, d);
    for (alpha, c) in coords.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        match basis_elem(d, alpha) {
            BasisElem::Diag(i) => {
                m.re[(i, i)] = m.re[(i, i)].clone() + c.clone();
            }
            BasisElem::Sym(i, j) => {
                m.re[(i, j)] = m.re[(i, j)].clone() + c.clone();
                m.re[(j, i)] = m.re[(j, i)].clone() + c.clone();
            }
            BasisElem::Anti(i, j) => {
                m.im[(i, j)] = m.im[(i, j)].clone() + c.clone();
                m.im[(j, i)] = m.im[(j, i)].clone() - c.clone();
            }
        }
    }
    Ok(m)
}

/// Coordinate vector of a Hermitian matrix (inverse of [`coords_to_cmat`]).
pub fn cmat_to_coords<T: Scalar>(m: &CMat<T>) -> Vec<T> {
    let d = m.rows();
    (0..herm_dim(d))
        .map(|alpha| match basis_elem(d, alpha) {
            BasisElem::Diag(i) => m.re[(i, i)].clone(),
            BasisElem::Sym(i, j) => m.re[(i, j)].clone(),
            BasisElem::Anti(i, j) => m.im[(i, j)].clone(),
        })
        .collect()
}

/// Real embedding [[X, −Y], [Y, X]] of a complex matrix X + iY. For
/// Hermitian input the embedding is symmetric and psd iff the input is,
/// with every eigenvalue appearing twice.
pub fn real_embed_cmat<T: Scalar>(m: &CMat<T>) -> Mat<T> {
    let (r, c) = (m.rows(), m.cols());
    Mat::from_fn(2 * r, 2 * c, |i, j| {
        let (bi, ii) = (i / r, i % r);
        let (bj, jj) = (j / c, j % c);
        match (bi, bj) {
            (0, 0) | (1, 1) => m.re[(ii, jj)].clone(),
            (0, 1) => -m.im[(ii, jj)].clone(),
            (1, 0) => m.im[(ii, jj)].clone(),
            _ => unreachable!(),
        }
    })
}

/// Real embedding of a Hermitian coordinate vector: the 2d×2d real symmetric
/// matrix [[X, −Y], [Y, X]] where the encoded H equals X + iY.
pub fn herm_real_embed<T: Scalar>(d: usize, coords: &[T]) -> Result<Mat<T>> {
    Ok(real_embed_cmat(&coords_to_cmat(d, coords)?))
}

/// Hermitian matrix of side Π sides from coordinates over the tensor basis
/// of the Hermitian spaces listed in `sides` (first factor major).
pub fn tensor_coords_to_cmat<T: Scalar>(sides: &[usize], coords: &[T]) -> Result<CMat<T>> {
    let dim: usize = sides.iter().map(|&d| herm_dim(d)).product();
    if coords.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: coords.len(),
        });
    }
    match sides {
        [] => {
            let mut m = CMat::zeros(1, 1);
            m.re[(0, 0)] = coords[0].clone();
            Ok(m)
        }
        [d] => coords_to_cmat(*d, coords),
        [d, rest @ ..] => {
            let block: usize = rest.iter().map(|&s| herm_dim(s)).product();
            let side: usize = rest.iter().product::<usize>() * d;
            let mut out = CMat::zeros(side, side);
            for alpha in 0..herm_dim(*d) {
                let sub = tensor_coords_to_cmat(rest, &coords[alpha * block..(alpha + 1) * block])?;
                let term = basis_cmat::<T>(*d, alpha).kron(&sub);
                out = out.add(&term);
            }
            Ok(out)
        }
    }
}

/// Coordinates over the tensor Hermitian basis of a Hermitian matrix whose
/// side factors as Π sides (inverse of [`tensor_coords_to_cmat`]).
pub fn cmat_to_tensor_coords<T: Scalar>(sides: &[usize], m: &CMat<T>) -> Vec<T> {
    match sides {
        [] => vec![m.re[(0, 0)].clone()],
        [_] => cmat_to_coords(m),
        [d, rest @ ..] => {
            let sub_side: usize = rest.iter().product();
            let two = T::one() + T::one();
            let mut out = Vec::new();
            for alpha in 0..herm_dim(*d) {
                // Contract the first factor: S = Σ_{ij} conj(H_alpha[i,j])·M_block[i,j]
                // normalized by the Gram entry, leaving a matrix on the rest.
                let h: CMat<T> = basis_cmat(*d, alpha);
                let mut s = CMat::zeros(sub_side, sub_side);
                for i in 0..*d {
                    for j in 0..*d {
                        let (hr, hi) = (h.re[(i, j)].clone(), h.im[(i, j)].clone());
                        if hr.is_zero() && hi.is_zero() {
                            continue;
                        }
                        let blk_re = Mat::from_fn(sub_side, sub_side, |p, q| {
                            m.re[(i * sub_side + p, j * sub_side + q)].clone()
                        });
                        let blk_im = Mat::from_fn(sub_side, sub_side, |p, q| {
                            m.im[(i * sub_side + p, j * sub_side + q)].clone()
                        });
                        // conj(h) * block
                        s.re = s.re.add(&blk_re.scale(&hr)).add(&blk_im.scale(&hi));
                        s.im = s.im.add(&blk_im.scale(&hr)).sub(&blk_re.scale(&hi));
                    }
                }
                let gram = match basis_elem(*d, alpha) {
                    BasisElem::Diag(_) => T::one(),
                    _ => two.clone(),
                };
                let s = CMat {
                    re: s.re.map(|x| x.clone() / gram.clone()),
                    im: s.im.map(|x| x.clone() / gram.clone()),
                };
                out.extend(cmat_to_tensor_coords(rest, &s));
            }
            out
        }
    }
}

/// Coordinates of the maximally entangled state Σ_ij E_ij ⊗ E_ij of two
/// copies of Her_d, over the tensor Hermitian basis: 1 on matching diagonal
/// pairs, 1/2 on matching symmetric pairs, −1/2 on matching antisymmetric
/// pairs.
pub fn max_ent_coords(d: usize) -> Vec<Rational> {
    let n = herm_dim(d);
    let mut coords = vec![Rational::zero(); n * n];
    for alpha in 0..n {
        coords[alpha * n + alpha] = match basis_elem(d, alpha) {
            BasisElem::Diag(_) => Rational::one(),
            BasisElem::Sym(_, _) => ratio(1, 2),
            BasisElem::Anti(_, _) => ratio(-1, 2),
        };
    }
    coords
}

/// Partial transpose on one tensor factor, acting on coordinates: the
/// transpose negates exactly the antisymmetric basis coordinates of that
/// factor.
pub fn partial_transpose<T: Scalar>(sides: &[usize], factor: usize, coords: &[T]) -> Vec<T> {
    let dims: Vec<usize> = sides.iter().map(|&d| herm_dim(d)).collect();
    let total: usize = dims.iter().product();
    assert_eq!(coords.len(), total);
    let mut out = Vec::with_capacity(total);
    for (idx, c) in coords.iter().enumerate() {
        // Extract the factor's basis index from the mixed-radix position.
        let mut rem = idx;
        let mut alpha = 0;
        for k in 0..dims.len() {
            let stride: usize = dims[k + 1..].iter().product();
            let digit = rem / stride;
            rem %= stride;
            if k == factor {
                alpha = digit;
            }
        }
        let flip = matches!(basis_elem(sides[factor], alpha), BasisElem::Anti(_, _));
        out.push(if flip { -c.clone() } else { c.clone() });
    }
    out
}

/// Coordinate matrix (t² × s²) of the compression map Her_s → Her_t,
/// A ↦ M*·A·M, for a complex s×t matrix M.
pub fn compression_coords_map<T: Scalar>(s: usize, t: usize, m: &CMat<T>) -> Mat<T> {
    assert_eq!((m.rows(), m.cols()), (s, t), "compression matrix shape");
    let madj = m.adjoint();
    let mut out = Mat::zeros(herm_dim(t), herm_dim(s));
    for beta in 0..herm_dim(s) {
        let h: CMat<T> = basis_cmat(s, beta);
        let img = madj.matmul(&h).matmul(m);
        for (alpha, c) in cmat_to_coords(&img).into_iter().enumerate() {
            out[(alpha, beta)] = c;
        }
    }
    out
}

/// Per-coordinate scaling turning plain coordinates into coordinates over
/// the orthonormal (√Gram-divided) basis; used by float code that needs the
/// trace inner product to match the Euclidean one.
pub fn iso_scale(d: usize) -> Vec<f64> {
    (0..herm_dim(d))
        .map(|alpha| match basis_elem(d, alpha) {
            BasisElem::Diag(_) => 1.0,
            _ => std::f64::consts::SQRT_2,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::eigen::sym_eig;
    use crate::linalg::exact::exact_psd_test;
    use crate::scalar::{rat, to_f64};

    #[test]
    fn basis_index_round_trip() {
        for d in 1..=4 {
            for alpha in 0..herm_dim(d) {
                assert_eq!(basis_index(d, basis_elem(d, alpha)), alpha);
            }
        }
    }

    #[test]
    fn gram_is_one_and_two() {
        let d = 3;
        for alpha in 0..herm_dim(d) {
            for beta in 0..herm_dim(d) {
                let a: CMat<Rational> = basis_cmat(d, alpha);
                let b: CMat<Rational> = basis_cmat(d, beta);
                let g = trace_inner(&a, &b);
                if alpha == beta {
                    assert_eq!(g, gram_diag(d)[alpha]);
                } else {
                    assert!(g.is_zero());
                }
            }
        }
    }

    #[test]
    fn coords_round_trip() {
        let d = 3;
        let coords: Vec<Rational> = (0..herm_dim(d)).map(|i| rat(i as i64 - 4)).collect();
        let m = coords_to_cmat(d, &coords).unwrap();
        assert!(m.is_hermitian());
        assert_eq!(cmat_to_coords(&m), coords);
    }

    #[test]
    fn real_embed_diagonal_unit() {
        // H = E_11 at d = 2 embeds to diag(1, 0, 1, 0).
        let mut coords = vec![Rational::zero(); 4];
        coords[0] = Rational::one();
        let e = herm_real_embed(2, &coords).unwrap();
        let expect = Mat::from_fn(4, 4, |i, j| {
            if i == j && i % 2 == 0 {
                Rational::one()
            } else {
                Rational::zero()
            }
        });
        assert_eq!(e, expect);
    }

    #[test]
    fn real_embed_antisymmetric_unit() {
        // H = i(E_12 − E_21) at d = 2: fixed sign convention and
        // eigenvalues ±1 (each twice in the embedding).
        let alpha = basis_index(2, BasisElem::Anti(0, 1));
        let mut coords = vec![Rational::zero(); 4];
        coords[alpha] = Rational::one();
        let e = herm_real_embed(2, &coords).unwrap();
        let expect = Mat::from_rows(
            [
                [0, 0, 0, -1],
                [0, 0, 1, 0],
                [0, 1, 0, 0],
                [-1, 0, 0, 0],
            ]
            .iter()
            .map(|r| r.iter().map(|&x| rat(x)).collect())
            .collect(),
        );
        assert_eq!(e, expect);
        let (vals, _) = sym_eig(&e.map(to_f64)).unwrap();
        assert!((vals[0] - 1.0).abs() < 1e-12 && (vals[3] + 1.0).abs() < 1e-12);
    }

    #[test]
    fn max_ent_is_rank_one_psd() {
        // m_{Her_2} reshaped as a 4×4 Hermitian matrix is psd with a
        // rank-2 real embedding (one complex eigendirection).
        let coords = max_ent_coords(2);
        let m = tensor_coords_to_cmat(&[2, 2], &coords).unwrap();
        assert!(m.is_hermitian());
        let e = real_embed_cmat(&m);
        assert!(exact_psd_test(&e).unwrap().is_psd());
        assert_eq!(crate::linalg::exact::rank(&e), 2);
        assert_eq!(m.trace_re(), rat(2));
        // Round trip through tensor coordinates.
        assert_eq!(cmat_to_tensor_coords(&[2, 2], &m), coords);
    }

    #[test]
    fn partial_transpose_of_max_ent_is_swap() {
        // PT on either factor turns Σ E_ij⊗E_ij into the swap, whose
        // embedding has eigenvalues ±1 (so it is not psd).
        let coords = max_ent_coords(2);
        let pt = partial_transpose(&[2, 2], 1, &coords);
        let m = tensor_coords_to_cmat(&[2, 2], &pt).unwrap();
        // The swap matrix is real: permutation of basis e_i⊗e_j -> e_j⊗e_i.
        assert!(m.im.data().iter().all(|x| x.is_zero()));
        for a in 0..2 {
            for b in 0..2 {
                for c in 0..2 {
                    for e in 0..2 {
                        let want = if a == e && b == c { rat(1) } else { rat(0) };
                        assert_eq!(m.re[(a * 2 + b, c * 2 + e)], want);
                    }
                }
            }
        }
        assert!(!exact_psd_test(&real_embed_cmat(&m)).unwrap().is_psd());
    }

    #[test]
    fn compression_map_matches_direct_product() {
        // M real 2×3: coordinates of M*·H·M agree with the direct matrix
        // computation for every basis element.
        let m = CMat::from_re(Mat::from_rows(vec![
            vec![rat(1), rat(0), rat(2)],
            vec![rat(-1), rat(1), rat(0)],
        ]));
        let map = compression_coords_map(2, 3, &m);
        for beta in 0..4 {
            let h: CMat<Rational> = basis_cmat(2, beta);
            let direct = m.adjoint().matmul(&h).matmul(&m);
            let mut unit = vec![Rational::zero(); 4];
            unit[beta] = Rational::one();
            let via_map = coords_to_cmat(3, &map.matvec(&unit)).unwrap();
            assert_eq!(via_map, direct);
        }
    }
}

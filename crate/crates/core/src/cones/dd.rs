//! Double description: exact conversion of a halfspace intersection
//! {x : φ_i(x) ≥ 0} into extreme rays plus a lineality basis.
//!
//! Halfspaces are inserted one at a time in input order. While a halfspace
//! still cuts the lineality space, the lineality dimension drops by one and a
//! single new ray appears; afterwards rays are split by sign, adjacent
//! positive/negative pairs are combined on the new hyperplane, and adjacency
//! is decided by the combinatorial criterion (no third ray whose active set
//! contains the common active set). Rays are kept reduced modulo the
//! lineality space and normalized to primitive integer vectors, which keeps
//! the output canonical and the arithmetic small.

use crate::linalg::exact::rref;
use crate::linalg::{dot, Mat};
use crate::scalar::{normalize_ray, Rational};
use crate::{Error, Result};
use num_traits::{Signed, Zero};
use std::collections::HashSet;

/// Generator form of a polyhedral cone: span(lineality) + cone(rays), with
/// every ray extreme modulo the lineality space.
#[derive(Clone, Debug)]
pub struct DdOutput {
    pub lineality: Vec<Vec<Rational>>,
    pub rays: Vec<Vec<Rational>>,
}

impl DdOutput {
    /// Flattens into a single generator list, lineality as ± pairs.
    pub fn generators(&self) -> Vec<Vec<Rational>> {
        let mut gens = Vec::with_capacity(self.rays.len() + 2 * self.lineality.len());
        gens.extend(self.rays.iter().cloned());
        for l in &self.lineality {
            gens.push(l.clone());
            gens.push(l.iter().map(|x| -x.clone()).collect());
        }
        gens
    }
}

/// Default ambient-dimension cap; conversions whose output may be
/// exponential refuse to start above it unless the caller raises the cap.
pub const DEFAULT_AMBIENT_CAP: usize = 12;

pub fn double_description(
    ambient: usize,
    halfspaces: &[Vec<Rational>],
    ambient_cap: usize,
) -> Result<DdOutput> {
    if ambient > ambient_cap {
        return Err(Error::CapExceeded(format!(
            "double description in ambient dimension {ambient} exceeds cap {ambient_cap}"
        )));
    }
    for h in halfspaces {
        if h.len() != ambient {
            return Err(Error::DimensionMismatch {
                expected: ambient,
                got: h.len(),
            });
        }
    }

    // Lineality basis kept in reduced row echelon form.
    let mut lin: Vec<Vec<Rational>> = (0..ambient)
        .map(|i| {
            let mut v = vec![Rational::zero(); ambient];
            v[i] = Rational::from_integer(1.into());
            v
        })
        .collect();
    let mut rays: Vec<Vec<Rational>> = Vec::new();
    // Non-degenerate halfspaces processed so far (for active sets).
    let mut processed: Vec<Vec<Rational>> = Vec::new();

    for h in halfspaces {
        if h.iter().all(|x| x.is_zero()) {
            continue;
        }
        if let Some(pos) = lin.iter().position(|l| !dot(l, h).is_zero()) {
            // The halfspace cuts the lineality space: project the remaining
            // basis into h⊥, and convert the cut direction into a ray.
            let l0 = lin.remove(pos);
            let d0 = dot(&l0, h);
            for l in lin.iter_mut() {
                let f = dot(l, h) / d0.clone();
                for (a, b) in l.iter_mut().zip(&l0) {
                    *a = a.clone() - f.clone() * b.clone();
                }
            }
            let r0: Vec<Rational> = if d0.is_positive() {
                l0
            } else {
                l0.iter().map(|x| -x.clone()).collect()
            };
            let dr0 = dot(&r0, h);
            for r in rays.iter_mut() {
                let f = dot(r, h) / dr0.clone();
                for (a, b) in r.iter_mut().zip(&r0) {
                    *a = a.clone() - f.clone() * b.clone();
                }
            }
            rays.push(r0);
            lin = rref_rows(lin, ambient);
            rays = canonicalize(rays, &lin);
        } else {
            // Partition by sign against the new halfspace.
            let vals: Vec<Rational> = rays.iter().map(|r| dot(r, h)).collect();
            let active = active_sets(&rays, &processed);
            let mut next: Vec<Vec<Rational>> = Vec::new();
            for (r, v) in rays.iter().zip(&vals) {
                if !v.is_negative() {
                    next.push(r.clone());
                }
            }
            for (i, vi) in vals.iter().enumerate() {
                if !vi.is_positive() {
                    continue;
                }
                for (j, vj) in vals.iter().enumerate() {
                    if !vj.is_negative() {
                        continue;
                    }
                    if !adjacent(i, j, &active, rays.len()) {
                        continue;
                    }
                    // (h·r_i)·r_j − (h·r_j)·r_i lands on the hyperplane and
                    // stays inside the cone.
                    let comb: Vec<Rational> = rays[i]
                        .iter()
                        .zip(&rays[j])
                        .map(|(a, b)| vi.clone() * b.clone() - vj.clone() * a.clone())
                        .collect();
                    next.push(comb);
                }
            }
            rays = canonicalize(next, &lin);
        }
        processed.push(h.clone());
    }

    Ok(DdOutput {
        lineality: lin,
        rays,
    })
}

/// Active constraint indices per ray.
fn active_sets(rays: &[Vec<Rational>], processed: &[Vec<Rational>]) -> Vec<Vec<usize>> {
    rays.iter()
        .map(|r| {
            processed
                .iter()
                .enumerate()
                .filter(|(_, h)| dot(r, h).is_zero())
                .map(|(k, _)| k)
                .collect()
        })
        .collect()
}

/// Combinatorial adjacency: rays i and j are adjacent iff no third ray's
/// active set contains the intersection of theirs.
fn adjacent(i: usize, j: usize, active: &[Vec<usize>], n_rays: usize) -> bool {
    let common: Vec<usize> = active[i]
        .iter()
        .filter(|k| active[j].contains(k))
        .copied()
        .collect();
    for t in 0..n_rays {
        if t == i || t == j {
            continue;
        }
        if common.iter().all(|k| active[t].contains(k)) {
            return false;
        }
    }
    true
}

/// Reduces each ray modulo the lineality span (in rref), normalizes to a
/// primitive integer vector, and deduplicates.
fn canonicalize(rays: Vec<Vec<Rational>>, lin: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    let pivots: Vec<usize> = lin
        .iter()
        .map(|l| l.iter().position(|x| !x.is_zero()).expect("zero lineality row"))
        .collect();
    let mut seen: HashSet<String> = HashSet::new();
    let mut out = Vec::with_capacity(rays.len());
    for mut r in rays {
        for (l, &p) in lin.iter().zip(&pivots) {
            if !r[p].is_zero() {
                let f = r[p].clone() / l[p].clone();
                for (a, b) in r.iter_mut().zip(l) {
                    *a = a.clone() - f.clone() * b.clone();
                }
            }
        }
        let r = normalize_ray(&r);
        if r.iter().all(|x| x.is_zero()) {
            continue;
        }
        let key = r
            .iter()
            .map(|x| x.to_string())
            .collect::<Vec<_>>()
            .join(",");
        if seen.insert(key) {
            out.push(r);
        }
    }
    out
}

fn rref_rows(rows: Vec<Vec<Rational>>, ambient: usize) -> Vec<Vec<Rational>> {
    if rows.is_empty() {
        return rows;
    }
    let mut m = Mat::from_rows(rows);
    let pivots = rref(&mut m);
    (0..pivots.len())
        .map(|i| (0..ambient).map(|j| m[(i, j)].clone()).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    fn v(xs: &[i64]) -> Vec<Rational> {
        xs.iter().map(|&x| rat(x)).collect()
    }

    #[test]
    fn orthant_from_halfspaces() {
        let out =
            double_description(2, &[v(&[1, 0]), v(&[0, 1])], DEFAULT_AMBIENT_CAP).unwrap();
        assert!(out.lineality.is_empty());
        let mut rays = out.rays.clone();
        rays.sort();
        assert_eq!(rays, vec![v(&[0, 1]), v(&[1, 0])]);
    }

    #[test]
    fn empty_constraints_give_full_space() {
        let out = double_description(2, &[], DEFAULT_AMBIENT_CAP).unwrap();
        assert_eq!(out.lineality.len(), 2);
        assert!(out.rays.is_empty());
        assert_eq!(out.generators().len(), 4);
    }

    #[test]
    fn square_cone_facets_to_rays() {
        // Facets of the cone over the square with apex rays (1, ±1, ±1):
        // x ± y ≥ 0 and x ± z ≥ 0; extreme rays are the four (1, ±1, ±1).
        let hs = vec![v(&[1, 1, 0]), v(&[1, -1, 0]), v(&[1, 0, 1]), v(&[1, 0, -1])];
        let out = double_description(3, &hs, DEFAULT_AMBIENT_CAP).unwrap();
        assert!(out.lineality.is_empty());
        let mut rays = out.rays.clone();
        rays.sort();
        let mut expect = vec![
            v(&[1, 1, 1]),
            v(&[1, 1, -1]),
            v(&[1, -1, 1]),
            v(&[1, -1, -1]),
        ];
        expect.sort();
        assert_eq!(rays, expect);
    }

    #[test]
    fn brute_force_cross_check_on_random_cones() {
        // Extreme rays of {x : Hx ≥ 0} for small systems, cross-checked by
        // enumerating all sign patterns of active constraint subsets: a ray
        // candidate comes from the kernel of each (n−1)-subset of rows.
        use crate::linalg::exact::kernel_basis;
        let cases: Vec<Vec<Vec<Rational>>> = vec![
            vec![v(&[1, 0, 0]), v(&[0, 1, 0]), v(&[0, 0, 1]), v(&[1, 1, -1])],
            vec![v(&[2, -1, 0]), v(&[0, 1, -1]), v(&[-1, 0, 2]), v(&[1, 1, 1])],
            vec![v(&[1, 2, 3]), v(&[3, 2, 1]), v(&[1, -1, 1]), v(&[-1, 1, 1])],
        ];
        for hs in cases {
            let out = double_description(3, &hs, DEFAULT_AMBIENT_CAP).unwrap();
            let mut expected: HashSet<String> = HashSet::new();
            // All pairs of constraints; their kernel directions that satisfy
            // every constraint and are tight on at least 2 of rank 2.
            for i in 0..hs.len() {
                for j in (i + 1)..hs.len() {
                    let m = Mat::from_rows(vec![hs[i].clone(), hs[j].clone()]);
                    for k in kernel_basis(&m) {
                        for cand in [k.clone(), k.iter().map(|x| -x.clone()).collect()] {
                            if hs.iter().all(|h| !dot(h, &cand).is_negative()) {
                                let n = normalize_ray(&cand);
                                // Keep only extreme directions: active set of
                                // rank exactly n−1 = 2.
                                let act: Vec<Vec<Rational>> = hs
                                    .iter()
                                    .filter(|h| dot(h, &n).is_zero())
                                    .cloned()
                                    .collect();
                                if !act.is_empty()
                                    && crate::linalg::exact::rank(&Mat::from_rows(act)) == 2
                                {
                                    expected.insert(
                                        n.iter()
                                            .map(|x| x.to_string())
                                            .collect::<Vec<_>>()
                                            .join(","),
                                    );
                                }
                            }
                        }
                    }
                }
            }
            let got: HashSet<String> = out
                .rays
                .iter()
                .map(|r| {
                    r.iter()
                        .map(|x| x.to_string())
                        .collect::<Vec<_>>()
                        .join(",")
                })
                .collect();
            assert!(out.lineality.is_empty());
            assert_eq!(got, expected, "halfspaces {hs:?}");
        }
    }

    #[test]
    fn lineality_survives_when_not_cut() {
        // Single halfspace in R^3: one ray, two lineality directions.
        let out = double_description(3, &[v(&[1, 0, 0])], DEFAULT_AMBIENT_CAP).unwrap();
        assert_eq!(out.lineality.len(), 2);
        assert_eq!(out.rays.len(), 1);
        for l in &out.lineality {
            assert!(dot(l, &v(&[1, 0, 0])).is_zero());
        }
        assert!(dot(&out.rays[0], &v(&[1, 0, 0])).is_positive());
    }

    #[test]
    fn opposite_halfspaces_leave_a_hyperplane() {
        // x ≥ 0 and −x ≥ 0 pin x = 0: lineality = span(e2), no rays.
        let out =
            double_description(2, &[v(&[1, 0]), v(&[-1, 0])], DEFAULT_AMBIENT_CAP).unwrap();
        assert_eq!(out.lineality.len(), 1);
        assert!(out.rays.is_empty());
        assert!(out.lineality[0][0].is_zero());
    }

    #[test]
    fn ambient_cap_enforced() {
        let hs: Vec<Vec<Rational>> = Vec::new();
        assert!(double_description(13, &hs, 12).is_err());
        assert!(double_description(13, &hs, 16).is_ok());
    }
}

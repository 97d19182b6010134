//! The one-dimensional TFT cone family.
//!
//! Level k lives in V^⊗k ⊗ (V')^⊗k with dim V = m; coordinates are flattened
//! row-major with the V-factor indices first (positions 1..k) and the
//! V'-factor indices last (positions k+1..2k). A pairing σ ∈ S_k matches the
//! a-th V-factor with the σ(a)-th V'-factor; its tensor of maximally
//! entangled states has {0,1} coordinates. The cointrinsic cone B(k) is
//! generated by the k! pairing tensors; the intrinsic cone A(k) is cut out by
//! the same k! vectors read as evaluation functionals, so A(k)∨ = B(k). B(k)
//! is never full for k ≥ 1, m ≥ 2, hence A(k) is not sharp.

use crate::cones::dd::double_description;
use crate::cones::{cone_contains, extreme_rays, ConeRep, MemberParams};
use crate::linalg::exact::{kernel_basis, rank};
use crate::linalg::{dot, Mat};
use crate::rng;
use crate::scalar::{rat, Rational};
use crate::verdict::Certificate;
use crate::{Error, Result};
use num_traits::{Signed, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Default construction caps: k! × m^{2k} grows fast.
pub const MAX_K: usize = 4;
pub const MAX_M: usize = 4;

/// One level of the TFT cone family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TftLevel {
    /// dim V; use d² for the pseudo-mixed family over Her_d.
    pub m: usize,
    pub k: usize,
}

impl TftLevel {
    pub fn new(m: usize, k: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::Invalid("dim V must be positive".into()));
        }
        if k > MAX_K || m > MAX_M {
            return Err(Error::CapExceeded(format!(
                "tft level k={k}, m={m} exceeds caps k ≤ {MAX_K}, m ≤ {MAX_M}"
            )));
        }
        Ok(TftLevel { m, k })
    }

    pub fn ambient(&self) -> usize {
        self.m.pow(2 * self.k as u32)
    }
}

/// All permutations of {0..k}, lexicographic in one-line notation.
pub fn permutations(k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    let mut items: Vec<usize> = (0..k).collect();
    loop {
        out.push(items.clone());
        // Next lexicographic permutation.
        let Some(i) = (0..k - 1).rev().find(|&i| items[i] < items[i + 1]) else {
            break;
        };
        let j = (i + 1..k).rev().find(|&j| items[j] > items[i]).unwrap();
        items.swap(i, j);
        items[i + 1..].reverse();
    }
    out
}

/// Coordinates of ⊗_a m_V^{a, σ(a)}: entry at (i_1..i_k, j_1..j_k) is 1
/// exactly when i_a = j_{σ(a)} for every a.
pub fn pairing_vector(level: &TftLevel, sigma: &[usize]) -> Vec<Rational> {
    let (m, k) = (level.m, level.k);
    let mut v = vec![Rational::zero(); level.ambient()];
    // Enumerate the i-tuple; the j-tuple is forced: j_{σ(a)} = i_a.
    let tuples = m.pow(k as u32);
    for t in 0..tuples {
        let mut digits = vec![0usize; k];
        let mut rem = t;
        for a in (0..k).rev() {
            digits[a] = rem % m;
            rem /= m;
        }
        let mut j = vec![0usize; k];
        for a in 0..k {
            j[sigma[a]] = digits[a];
        }
        let mut flat = 0usize;
        for &d in digits.iter().chain(j.iter()) {
            flat = flat * m + d;
        }
        v[flat] = Rational::from_integer(1.into());
    }
    v
}

/// Independent contraction oracle: evaluates the σ-pairing functional on x
/// by decoding every flat index, sharing no code with [`pairing_vector`].
pub fn contract_pairing(level: &TftLevel, sigma: &[usize], x: &[Rational]) -> Rational {
    let (m, k) = (level.m, level.k);
    let mut acc = Rational::zero();
    'outer: for (flat, c) in x.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let mut digits = vec![0usize; 2 * k];
        let mut rem = flat;
        for slot in (0..2 * k).rev() {
            digits[slot] = rem % m;
            rem /= m;
        }
        for a in 0..k {
            if digits[a] != digits[k + sigma[a]] {
                continue 'outer;
            }
        }
        acc += c.clone();
    }
    acc
}

/// B(k): the polyhedral cone generated by the k! pairing tensors.
pub fn b_cone(level: &TftLevel) -> Result<ConeRep> {
    let gens = permutations(level.k)
        .iter()
        .map(|s| pairing_vector(level, s))
        .collect();
    Ok(ConeRep::poly_v(level.ambient(), gens))
}

/// A(k): the intersection of the k! pairing-evaluation halfspaces.
pub fn a_cone(level: &TftLevel) -> Result<ConeRep> {
    let hs = permutations(level.k)
        .iter()
        .map(|s| pairing_vector(level, s))
        .collect();
    Ok(ConeRep::poly_h(level.ambient(), hs))
}

/// Exact duality report for one level.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DualityReport {
    pub m: usize,
    pub k: usize,
    pub ambient: usize,
    pub generator_count: usize,
    pub extreme_ray_count: usize,
    /// Every B generator satisfies every A halfspace.
    pub b_inside_a: bool,
    /// dual(A(k)) = B(k) by exact mutual containment.
    pub dual_a_equals_b: bool,
    /// B(k) generators inside the double-description form of A(k).
    pub b_inside_dd_of_a: bool,
    pub b_rank: usize,
    pub b_full: bool,
    /// Dimension of the lineality space of A(k), from double description and
    /// cross-checked against the kernel of the halfspace matrix.
    pub a_lineality_dim: usize,
    pub a_sharp: bool,
    pub all_pass: bool,
}

/// Runs the four exact checks: B(k) ⊆ A(k), dual(A(k)) = B(k), B(k) not
/// full (k ≥ 1, m ≥ 2), A(k) not sharp (same range).
pub fn verify_tft_duality(level: &TftLevel, params: &MemberParams) -> Result<DualityReport> {
    let perms = permutations(level.k);
    let vectors: Vec<Vec<Rational>> = perms.iter().map(|s| pairing_vector(level, s)).collect();
    let ambient = level.ambient();
    let b = b_cone(level)?;
    let a = a_cone(level)?;

    // B ⊆ A: every generator against every halfspace, exactly.
    let b_inside_a = vectors
        .iter()
        .all(|g| vectors.iter().all(|h| !dot(g, h).is_negative()));

    // dual(A) = B by mutual containment (exact LPs).
    let dual_a = ConeRep::poly_v(ambient, match a.dual() {
        ConeRep::PolyV { generators, .. } => generators,
        _ => unreachable!("dual of PolyH is PolyV"),
    });
    let tensor_params = MemberParams {
        ambient_cap: ambient.max(params.ambient_cap),
        ..params.clone()
    };
    let dual_a_equals_b = cone_contains(&dual_a, &b, &tensor_params)?.is_yes()
        && cone_contains(&b, &dual_a, &tensor_params)?.is_yes();

    // Double description of A(k); its generators must lie back inside A and
    // contain every B generator.
    let dd = double_description(ambient, &vectors, ambient)?;
    let dd_cone = ConeRep::poly_v(ambient, dd.generators());
    let b_inside_dd_of_a = cone_contains(&dd_cone, &b, &tensor_params)?.is_yes();

    // Fullness of B and sharpness of A, exactly.
    let b_rank = rank(&Mat::from_rows(vectors.clone()));
    let b_full = b_rank == ambient;
    let a_lineality_dim = dd.lineality.len();
    let kernel_dim = kernel_basis(&Mat::from_rows(vectors.clone())).len();
    if a_lineality_dim != kernel_dim {
        return Err(Error::Invalid(format!(
            "lineality dimension disagreement: dd {a_lineality_dim} vs kernel {kernel_dim}"
        )));
    }
    let a_sharp = a_lineality_dim == 0;

    let extreme = extreme_rays(match &b {
        ConeRep::PolyV { generators, .. } => generators,
        _ => unreachable!(),
    })?;

    let expect_not_full = level.k >= 1 && level.m >= 2;
    let all_pass = b_inside_a
        && dual_a_equals_b
        && b_inside_dd_of_a
        && extreme.len() == perms.len()
        && (!expect_not_full || !b_full)
        && (!expect_not_full || !a_sharp);

    Ok(DualityReport {
        m: level.m,
        k: level.k,
        ambient,
        generator_count: perms.len(),
        extreme_ray_count: extreme.len(),
        b_inside_a,
        dual_a_equals_b,
        b_inside_dd_of_a,
        b_rank,
        b_full,
        a_lineality_dim,
        a_sharp,
        all_pass,
    })
}

/// Witness that A(1) ⊗̲ A(1) ⊄ A(2): an elementary tensor S ⊗ T of
/// trace-nonnegative maps whose crossed pairing tr(S·T) is negative.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AssumptionWitness {
    pub m: usize,
    #[serde(with = "crate::scalar::rat_mat_str")]
    pub s: Vec<Vec<Rational>>,
    #[serde(with = "crate::scalar::rat_mat_str")]
    pub t: Vec<Vec<Rational>>,
    /// Coordinates of S ⊗ T in the level-2 space under the index-merging
    /// convention (V-factors first).
    #[serde(with = "crate::scalar::rat_vec_str")]
    pub x: Vec<Rational>,
    #[serde(with = "crate::scalar::rat_str")]
    pub trace_s: Rational,
    #[serde(with = "crate::scalar::rat_str")]
    pub trace_t: Rational,
    #[serde(with = "crate::scalar::rat_str")]
    pub crossed_value: Rational,
    /// Membership evidence for x ∈ A(1) ⊗̲ A(1): the two trace slacks.
    pub membership: Certificate,
    /// The violated A(2) halfspace (the crossed-pairing functional).
    pub separator: Certificate,
}

/// Flattens S ⊗ T into level-2 coordinates: x[(i1 i2 j1 j2)] = S[i1][j1]·T[i2][j2].
pub fn elementary_tensor_level2(m: usize, s: &[Vec<Rational>], t: &[Vec<Rational>]) -> Vec<Rational> {
    let mut x = vec![Rational::zero(); m.pow(4)];
    for i1 in 0..m {
        for i2 in 0..m {
            for j1 in 0..m {
                for j2 in 0..m {
                    let flat = ((i1 * m + i2) * m + j1) * m + j2;
                    x[flat] = s[i1][j1].clone() * t[i2][j2].clone();
                }
            }
        }
    }
    x
}

/// Searches for an assumption-failure witness at (k, l) = (1, 1). The
/// deterministic diag(2,−1)/diag(−1,2) pair is tried first, then seeded
/// random trace-nonnegative integer matrices.
pub fn assumption_failure_witness(m: usize, seed: u64, budget: usize) -> Result<AssumptionWitness> {
    if m < 2 {
        return Err(Error::Invalid(
            "assumption failure needs dim V ≥ 2".into(),
        ));
    }
    let level2 = TftLevel::new(m, 2)?;
    let crossed: Vec<usize> = vec![1, 0];
    let try_pair = |s: Vec<Vec<Rational>>, t: Vec<Vec<Rational>>| -> Option<AssumptionWitness> {
        let trace_s: Rational = (0..m).map(|i| s[i][i].clone()).sum();
        let trace_t: Rational = (0..m).map(|i| t[i][i].clone()).sum();
        if trace_s.is_negative() || trace_t.is_negative() {
            return None;
        }
        let x = elementary_tensor_level2(m, &s, &t);
        let crossed_value = contract_pairing(&level2, &crossed, &x);
        if !crossed_value.is_negative() {
            return None;
        }
        let functional = pairing_vector(&level2, &crossed);
        debug_assert_eq!(dot(&functional, &x), crossed_value);
        Some(AssumptionWitness {
            m,
            s,
            t,
            x,
            trace_s: trace_s.clone(),
            trace_t: trace_t.clone(),
            crossed_value,
            membership: Certificate::Slacks {
                values: vec![trace_s, trace_t],
            },
            separator: Certificate::Separator { functional },
        })
    };

    // Deterministic witness: S = diag(2, −1, 0, ...), T = diag(−1, 2, 0, ...):
    // traces 1, 1 and tr(S·T) = −4.
    let mut s = vec![vec![Rational::zero(); m]; m];
    let mut t = vec![vec![Rational::zero(); m]; m];
    s[0][0] = rat(2);
    s[1][1] = rat(-1);
    t[0][0] = rat(-1);
    t[1][1] = rat(2);
    if let Some(w) = try_pair(s, t) {
        return Ok(w);
    }
    let mut rng = rng::substream(seed, 0);
    for _ in 0..budget {
        let rand_mat = |rng: &mut rand_chacha::ChaCha8Rng| -> Vec<Vec<Rational>> {
            (0..m)
                .map(|_| (0..m).map(|_| rat(rng.random_range(-3..=3))).collect())
                .collect()
        };
        let s = rand_mat(&mut rng);
        let t = rand_mat(&mut rng);
        if let Some(w) = try_pair(s, t) {
            return Ok(w);
        }
    }
    Err(Error::NoConvergence(
        "no assumption-failure witness found within budget; retry with a new seed".into(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cones::cone_equal;
    use crate::linalg::kron_vec;
    use num_traits::One;

    fn params() -> MemberParams {
        MemberParams::default()
    }

    #[test]
    fn level_zero_is_the_ray() {
        let l = TftLevel::new(2, 0).unwrap();
        assert_eq!(l.ambient(), 1);
        let b = b_cone(&l).unwrap();
        let ConeRep::PolyV { generators, .. } = &b else {
            panic!()
        };
        assert_eq!(generators.len(), 1);
        assert_eq!(generators[0], vec![Rational::one()]);
    }

    #[test]
    fn level_one_generator_is_flattened_identity() {
        let l = TftLevel::new(2, 1).unwrap();
        let b = b_cone(&l).unwrap();
        let ConeRep::PolyV { generators, .. } = &b else {
            panic!()
        };
        assert_eq!(generators, &vec![vec![rat(1), rat(0), rat(0), rat(1)]]);
    }

    #[test]
    fn level_one_halfspace_is_trace() {
        // ev = trace under the map/tensor isomorphism; its dual is the ray
        // through the identity.
        let l = TftLevel::new(2, 1).unwrap();
        let a = a_cone(&l).unwrap();
        let x = vec![rat(3), rat(5), rat(-7), rat(2)]; // trace 5
        match a.member(&x, &params()).unwrap() {
            crate::Verdict::Yes { .. } => {}
            other => panic!("{other:?}"),
        }
        let y = vec![rat(-3), rat(0), rat(0), rat(1)]; // trace -2
        assert!(a.member(&y, &params()).unwrap().is_no());
    }

    #[test]
    fn permutation_count_and_order() {
        assert_eq!(permutations(0).len(), 1);
        assert_eq!(permutations(3).len(), 6);
        assert_eq!(permutations(4).len(), 24);
        assert_eq!(permutations(2), vec![vec![0, 1], vec![1, 0]]);
    }

    #[test]
    fn pairing_vector_matches_contraction_oracle() {
        let l = TftLevel::new(2, 2).unwrap();
        for sigma in permutations(2) {
            let v = pairing_vector(&l, &sigma);
            // The functional applied to each pairing generator equals the
            // independent contraction.
            for tau in permutations(2) {
                let g = pairing_vector(&l, &tau);
                assert_eq!(contract_pairing(&l, &sigma, &g), dot(&v, &g));
            }
        }
    }

    #[test]
    fn b2_generators_satisfy_a2_halfspaces() {
        let l = TftLevel::new(2, 2).unwrap();
        for sigma in permutations(2) {
            let g = pairing_vector(&l, &sigma);
            for tau in permutations(2) {
                assert!(!contract_pairing(&l, &tau, &g).is_negative());
            }
        }
    }

    #[test]
    fn duality_report_k1_m2() {
        let l = TftLevel::new(2, 1).unwrap();
        let r = verify_tft_duality(&l, &params()).unwrap();
        assert!(r.all_pass, "{r:?}");
        assert_eq!(r.extreme_ray_count, 1);
        assert_eq!(r.b_rank, 1);
        assert!(!r.a_sharp);
    }

    #[test]
    fn duality_report_k2_m2() {
        let l = TftLevel::new(2, 2).unwrap();
        let r = verify_tft_duality(&l, &params()).unwrap();
        assert!(r.all_pass, "{r:?}");
        assert_eq!(r.extreme_ray_count, 2);
        assert!(r.a_lineality_dim > 0);
    }

    #[test]
    fn a_cone_lineality_witness() {
        // A full line inside A(k): ±v satisfying both pairings with value 0.
        let l = TftLevel::new(2, 2).unwrap();
        let vectors: Vec<Vec<Rational>> = permutations(2)
            .iter()
            .map(|s| pairing_vector(&l, s))
            .collect();
        let kern = kernel_basis(&Mat::from_rows(vectors));
        assert!(!kern.is_empty());
        let v = &kern[0];
        let a = a_cone(&l).unwrap();
        let neg: Vec<Rational> = v.iter().map(|x| -x.clone()).collect();
        assert!(a.member(v, &params()).unwrap().is_yes());
        assert!(a.member(&neg, &params()).unwrap().is_yes());
    }

    #[test]
    fn b_tensor_b_inside_higher_level() {
        // B(1) ⊗̲ B(1) ⊆ B(2) under index merging: the merged pairing of two
        // identity pairings is a level-2 pairing.
        let l1 = TftLevel::new(2, 1).unwrap();
        let l2 = TftLevel::new(2, 2).unwrap();
        let g1 = pairing_vector(&l1, &[0]);
        // Merge (i1)(j1) ⊗ (i2)(j2) into (i1 i2)(j1 j2).
        let mut merged = vec![Rational::zero(); l2.ambient()];
        for i1 in 0..2 {
            for j1 in 0..2 {
                for i2 in 0..2 {
                    for j2 in 0..2 {
                        let a = g1[i1 * 2 + j1].clone() * g1[i2 * 2 + j2].clone();
                        merged[((i1 * 2 + i2) * 2 + j1) * 2 + j2] = a;
                    }
                }
            }
        }
        let b2 = b_cone(&l2).unwrap();
        assert!(b2.member(&merged, &params()).unwrap().is_yes());
        // And kron without merging is NOT the level-2 layout; the merged
        // element equals the identity pairing of level 2 here.
        assert_eq!(merged, pairing_vector(&l2, &[0, 1]));
        let plain = kron_vec(&g1, &g1);
        assert_ne!(plain, merged);
    }

    #[test]
    fn assumption_witness_deterministic_pair() {
        let w = assumption_failure_witness(2, 7, 64).unwrap();
        assert_eq!(w.trace_s, rat(1));
        assert_eq!(w.trace_t, rat(1));
        assert_eq!(w.crossed_value, rat(-4));
        // Re-verify all three numbers with the independent contraction.
        let l2 = TftLevel::new(2, 2).unwrap();
        assert_eq!(contract_pairing(&l2, &[1, 0], &w.x), rat(-4));
        assert_eq!(contract_pairing(&l2, &[0, 1], &w.x), w.trace_s.clone() * w.trace_t.clone());
    }

    #[test]
    fn negative_control_rejected() {
        // S = T = diag(1, −1)-ish padded to nonnegative trace: the crossed
        // pairing is Σλ² ≥ 0, so it must NOT be accepted as a witness.
        let m = 2;
        let s = vec![vec![rat(2), rat(0)], vec![rat(0), rat(-1)]];
        let x = elementary_tensor_level2(m, &s, &s);
        let l2 = TftLevel::new(2, 2).unwrap();
        let crossed = contract_pairing(&l2, &[1, 0], &x);
        assert!(crossed.is_positive(), "tr(S²) = Σλ² > 0");
    }

    #[test]
    fn dual_of_a1_is_ray_through_identity() {
        let l = TftLevel::new(2, 1).unwrap();
        let a = a_cone(&l).unwrap();
        let b = b_cone(&l).unwrap();
        match cone_equal(&ConeRep::poly_v(4, match a.dual() {
            ConeRep::PolyV { generators, .. } => generators,
            _ => unreachable!(),
        }), &b, &params()).unwrap() {
            crate::Verdict::Yes { .. } => {}
            other => panic!("{other:?}"),
        }
    }
}

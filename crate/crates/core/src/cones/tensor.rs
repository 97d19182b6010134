//! Membership in tensor products of psd cones.
//!
//! Minimal tensor product (separability): the partial-transpose test refutes
//! exactly; at 2⊗2 and 2⊗3 a passing test decides by Størmer–Woronowicz, and
//! in higher dimensions a randomized conic fitting searches for an explicit
//! separable decomposition. Maximal tensor product (block-positivity):
//! alternating eigenvector descent over unit product vectors refutes; at
//! 2⊗2 and 2⊗3 the dual Størmer–Woronowicz form M = P + PT(Q) with P, Q psd
//! certifies a Yes via Dykstra projections. Everything else is `Unknown` —
//! both problems are NP-hard in general and honest three-valued output beats
//! false certainty.

use super::{embed_quadratic_form, MemberParams, Mode};
use crate::linalg::eigen::{frobenius, sym_eig};
use crate::linalg::exact::{exact_psd_test, PsdOutcome};
use crate::linalg::herm::{
    self, basis_cmat, herm_dim, max_ent_coords, partial_transpose, real_embed_cmat,
    tensor_coords_to_cmat, CMat,
};
use crate::linalg::Mat;
use crate::rng;
use crate::scalar::{to_f64, Rational};
use crate::verdict::{Certificate, Verdict};
use crate::Result;
use num_traits::Zero;
use rand_chacha::ChaCha8Rng;

/// x ∈ Psd(a) ⊗̲ Psd(b) (the separable cone)?
pub fn separable_member(
    a: usize,
    b: usize,
    x: &[Rational],
    params: &MemberParams,
) -> Result<Verdict> {
    // Being psd is necessary.
    if let Some(no) = refute_psd(a, b, x, params, false)? {
        return Ok(no);
    }
    // Scalar factor: R₊ ⊗̲ Psd = Psd, so psd already decides.
    if a == 1 || b == 1 {
        return Ok(Verdict::Yes {
            oracle: "scalar-factor-psd".into(),
            certificate: decomposition_search(a, b, x, params).map(|(w, l, r, res)| {
                Certificate::SeparableDecomposition {
                    weights: w,
                    left_coords: l,
                    right_coords: r,
                    residual: res,
                }
            }),
        });
    }
    // PPT is necessary; its failure separates exactly.
    if let Some(no) = refute_psd(a, b, x, params, true)? {
        return Ok(no);
    }
    // PPT is also sufficient at 2⊗2 and 2⊗3 (Størmer–Woronowicz; imported
    // from the literature, flagged in the oracle name).
    if a * b <= 6 {
        return Ok(Verdict::Yes {
            oracle: "stoermer-woronowicz-ppt".into(),
            certificate: decomposition_search(a, b, x, params).map(|(w, l, r, res)| {
                Certificate::SeparableDecomposition {
                    weights: w,
                    left_coords: l,
                    right_coords: r,
                    residual: res,
                }
            }),
        });
    }
    match decomposition_search(a, b, x, params) {
        Some((weights, left_coords, right_coords, residual)) => Ok(Verdict::yes(
            "decomposition-search",
            Certificate::SeparableDecomposition {
                weights,
                left_coords,
                right_coords,
                residual,
            },
        )),
        None => Ok(Verdict::unknown(
            "separability undecided within budget (psd and ppt both hold)",
        )),
    }
}

/// x ∈ Psd(a) ⊗̄ Psd(b) (the block-positive cone)?
pub fn block_positive_member(
    a: usize,
    b: usize,
    x: &[Rational],
    params: &MemberParams,
) -> Result<Verdict> {
    // Scalar factor: R₊ ⊗̄ Psd = Psd exactly.
    if a == 1 || b == 1 {
        let d = a.max(b);
        return super::psd_member(d, x, params);
    }
    // Closed form: the maximally entangled state lies in Psd ⊗̄ Psd.
    if a == b && is_positive_multiple(x, &max_ent_coords(a)) {
        return Ok(Verdict::yes(
            "max-ent-lemma",
            Certificate::MaxEntLemma { slacks: vec![] },
        ));
    }
    let m = tensor_cmat_f64(a, b, x)?;
    let (value, v, w) = alternating_product_opt(&m, a, b, false, params);
    if value < -params.tol {
        return Ok(Verdict::no(
            "product-vector-descent",
            Certificate::ProductWitness {
                v_re: v.0,
                v_im: v.1,
                w_re: w.0,
                w_im: w.1,
                value,
            },
        ));
    }
    // Dual Størmer–Woronowicz at 2⊗2 / 2⊗3: block-positive ⟺ M = P + PT(Q)
    // with P, Q psd; Dykstra projections search for the decomposition.
    if a * b <= 6 {
        if let Some((p, q, residual)) = block_pos_decomposition(&m, a, b, params) {
            return Ok(Verdict::yes(
                "stoermer-woronowicz-decomposition",
                Certificate::BlockPosDecomposition {
                    p_coords: cmat_to_coords_f64(a, b, &p),
                    q_coords: cmat_to_coords_f64(a, b, &q),
                    residual,
                },
            ));
        }
    }
    Ok(Verdict::unknown("block-positivity heuristic floor reached"))
}

/// Exact (or float) refutation of psd-ness of x, optionally after partial
/// transpose of the second factor. Returns the No verdict with a separator
/// valid against the separable cone.
fn refute_psd(
    a: usize,
    b: usize,
    x: &[Rational],
    params: &MemberParams,
    transpose_second: bool,
) -> Result<Option<Verdict>> {
    let coords = if transpose_second {
        partial_transpose(&[a, b], 1, x)
    } else {
        x.to_vec()
    };
    let oracle = if transpose_second {
        "ppt-criterion"
    } else {
        "psd-necessary"
    };
    match params.mode {
        Mode::Exact => {
            let m = tensor_coords_to_cmat(&[a, b], &coords)?;
            let e = real_embed_cmat(&m);
            match exact_psd_test(&e)? {
                PsdOutcome::Psd { .. } => Ok(None),
                PsdOutcome::NotPsd { witness } => {
                    // φ(z) = wᵀ·embed(z or PT z)·w is nonnegative on every
                    // product state and negative at x.
                    let mut functional = tensor_embed_form_coords(a, b, &witness);
                    if transpose_second {
                        functional = partial_transpose(&[a, b], 1, &functional);
                    }
                    Ok(Some(Verdict::no(
                        oracle,
                        Certificate::Separator { functional },
                    )))
                }
            }
        }
        Mode::Float => {
            let m = tensor_coords_to_cmat(&[a, b], &coords.iter().map(to_f64).collect::<Vec<_>>())?;
            let e = real_embed_cmat(&m);
            let (lambda, vec) = crate::linalg::eigen::min_eig(&e)?;
            if lambda >= -params.tol {
                Ok(None)
            } else {
                let half = vec.len() / 2;
                Ok(Some(Verdict::no(
                    oracle,
                    Certificate::NegativeForm {
                        vec_re: vec[..half].to_vec(),
                        vec_im: vec[half..].to_vec(),
                        value: lambda,
                    },
                )))
            }
        }
    }
}

/// Functional coordinates of z ↦ wᵀ·embed(M_z)·w on the tensor basis.
pub fn tensor_embed_form_coords(a: usize, b: usize, w: &[Rational]) -> Vec<Rational> {
    let mut out = Vec::with_capacity(herm_dim(a) * herm_dim(b));
    for alpha in 0..herm_dim(a) {
        let ha: CMat<Rational> = basis_cmat(a, alpha);
        for beta in 0..herm_dim(b) {
            let hb: CMat<Rational> = basis_cmat(b, beta);
            out.push(embed_quadratic_form(&ha.kron(&hb), w));
        }
    }
    out
}

fn is_positive_multiple(x: &[Rational], pattern: &[Rational]) -> bool {
    let mut scale: Option<Rational> = None;
    for (xi, pi) in x.iter().zip(pattern) {
        if pi.is_zero() {
            if !xi.is_zero() {
                return false;
            }
        } else {
            let c = xi.clone() / pi.clone();
            match &scale {
                None => {
                    if c <= Rational::zero() {
                        return false;
                    }
                    scale = Some(c);
                }
                Some(s) => {
                    if *s != c {
                        return false;
                    }
                }
            }
        }
    }
    scale.is_some()
}

pub fn tensor_cmat_f64(a: usize, b: usize, x: &[Rational]) -> Result<CMat<f64>> {
    let coords: Vec<f64> = x.iter().map(to_f64).collect();
    tensor_coords_to_cmat(&[a, b], &coords)
}

fn cmat_to_coords_f64(a: usize, b: usize, m: &CMat<f64>) -> Vec<f64> {
    herm::cmat_to_tensor_coords(&[a, b], m)
}

// ---- complex float helpers ---------------------------------------------

type CVec = (Vec<f64>, Vec<f64>);

/// Re⟨u, v⟩ with the conjugate-linear first slot.
fn cdot_re(u: &CVec, v: &CVec) -> f64 {
    u.0.iter()
        .zip(&v.0)
        .map(|(a, b)| a * b)
        .chain(u.1.iter().zip(&v.1).map(|(a, b)| a * b))
        .sum()
}

fn cnorm(v: &CVec) -> f64 {
    cdot_re(v, v).sqrt()
}

fn cnormalize(v: &mut CVec) {
    let n = cnorm(v);
    if n > 0.0 {
        v.0.iter_mut().for_each(|x| *x /= n);
        v.1.iter_mut().for_each(|x| *x /= n);
    }
}

fn random_cvec(rng: &mut ChaCha8Rng, n: usize) -> CVec {
    let mut v = (
        (0..n).map(|_| rng::std_normal(rng)).collect::<Vec<_>>(),
        (0..n).map(|_| rng::std_normal(rng)).collect::<Vec<_>>(),
    );
    cnormalize(&mut v);
    v
}

/// Contraction of the first factor: N[c,d] = Σ_{p,q} conj(v_p)·M[(p,c),(q,d)]·v_q.
fn contract_first(m: &CMat<f64>, a: usize, b: usize, v: &CVec) -> CMat<f64> {
    let mut n = CMat::zeros(b, b);
    for c in 0..b {
        for d in 0..b {
            let (mut re, mut im) = (0.0, 0.0);
            for p in 0..a {
                for q in 0..a {
                    let (mr, mi) = (m.re[(p * b + c, q * b + d)], m.im[(p * b + c, q * b + d)]);
                    // conj(v_p)·m·v_q
                    let (ar, ai) = (v.0[p], -v.1[p]);
                    let (br, bi) = (v.0[q], v.1[q]);
                    let (tr, ti) = (ar * mr - ai * mi, ar * mi + ai * mr);
                    re += tr * br - ti * bi;
                    im += tr * bi + ti * br;
                }
            }
            n.re[(c, d)] = re;
            n.im[(c, d)] = im;
        }
    }
    n
}

/// Contraction of the second factor: N[p,q] = Σ_{c,d} conj(w_c)·M[(p,c),(q,d)]·w_d.
fn contract_second(m: &CMat<f64>, a: usize, b: usize, w: &CVec) -> CMat<f64> {
    let mut n = CMat::zeros(a, a);
    for p in 0..a {
        for q in 0..a {
            let (mut re, mut im) = (0.0, 0.0);
            for c in 0..b {
                for d in 0..b {
                    let (mr, mi) = (m.re[(p * b + c, q * b + d)], m.im[(p * b + c, q * b + d)]);
                    let (ar, ai) = (w.0[c], -w.1[c]);
                    let (br, bi) = (w.0[d], w.1[d]);
                    let (tr, ti) = (ar * mr - ai * mi, ar * mi + ai * mr);
                    re += tr * br - ti * bi;
                    im += tr * bi + ti * br;
                }
            }
            n.re[(p, q)] = re;
            n.im[(p, q)] = im;
        }
    }
    n
}

/// Extreme (min or max) eigenpair of a complex Hermitian matrix through the
/// real embedding.
fn extreme_eigpair(m: &CMat<f64>, maximize: bool) -> (f64, CVec) {
    let e = real_embed_cmat(m);
    let (vals, q) = sym_eig(&e).expect("embedding eigendecomposition");
    let idx = if maximize { 0 } else { vals.len() - 1 };
    let col = q.col(idx);
    let half = col.len() / 2;
    let mut v = (col[..half].to_vec(), col[half..].to_vec());
    cnormalize(&mut v);
    (vals[idx], v)
}

/// Optimizes Re (v⊗w)*·M·(v⊗w) over unit vectors by alternating extreme
/// eigenvector steps with seeded random restarts. Returns the best value and
/// the achieving pair.
pub fn alternating_product_opt(
    m: &CMat<f64>,
    a: usize,
    b: usize,
    maximize: bool,
    params: &MemberParams,
) -> (f64, CVec, CVec) {
    use rayon::prelude::*;
    let run_restart = |r: usize| -> (f64, CVec, CVec) {
        let mut rng = rng::substream(params.seed, r as u64);
        let mut w = random_cvec(&mut rng, b);
        let mut v = random_cvec(&mut rng, a);
        let mut value = f64::NAN;
        for _ in 0..params.iters {
            let mw = contract_second(m, a, b, &w);
            let (_, v_new) = extreme_eigpair(&mw, maximize);
            v = v_new;
            let mv = contract_first(m, a, b, &v);
            let (val, w_new) = extreme_eigpair(&mv, maximize);
            w = w_new;
            if (val - value).abs() <= 1e-15 * (1.0 + val.abs()) {
                value = val;
                break;
            }
            value = val;
        }
        (value, v, w)
    };
    // Restarts are independent; the reduction keys on (value, index) so the
    // result is deterministic under any thread schedule.
    (0..params.restarts.max(1))
        .into_par_iter()
        .map(|r| (r, run_restart(r)))
        .reduce_with(|x, y| {
            let xb = x.1 .0;
            let yb = y.1 .0;
            let x_wins = if maximize { xb >= yb } else { xb <= yb };
            let tie = xb == yb;
            if (x_wins && !tie) || (tie && x.0 < y.0) {
                x
            } else if x_wins {
                x
            } else {
                y
            }
        })
        .map(|(_, out)| out)
        .expect("at least one restart")
}

/// Greedy separable fitting: repeatedly add the product state most aligned
/// with the residual, refit nonnegative weights, stop when the relative
/// Frobenius residual drops below tol. Returns (weights, left coords, right
/// coords, residual) on success.
#[allow(clippy::type_complexity)]
fn decomposition_search(
    a: usize,
    b: usize,
    x: &[Rational],
    params: &MemberParams,
) -> Option<(Vec<f64>, Vec<Vec<f64>>, Vec<Vec<f64>>, f64)> {
    let m = tensor_cmat_f64(a, b, x).ok()?;
    let scale = frobenius(&m.re).hypot(frobenius(&m.im)).max(1.0);
    let mut atoms: Vec<CMat<f64>> = Vec::new();
    let mut sides: Vec<(CVec, CVec)> = Vec::new();
    let mut weights: Vec<f64> = Vec::new();
    let fit_params = MemberParams {
        restarts: 4,
        iters: 40,
        ..params.clone()
    };
    let mut residual = m.clone();
    for step in 0..params.budget {
        let res_norm = frobenius(&residual.re).hypot(frobenius(&residual.im));
        if res_norm <= params.tol * scale {
            let left = sides
                .iter()
                .map(|(v, _)| herm::cmat_to_coords(&outer(v)))
                .collect();
            let right = sides
                .iter()
                .map(|(_, w)| herm::cmat_to_coords(&outer(w)))
                .collect();
            return Some((weights, left, right, res_norm));
        }
        // Best-aligned product state; perturb the seed per step.
        let step_params = MemberParams {
            seed: params.seed.wrapping_add(step as u64),
            ..fit_params.clone()
        };
        let (val, v, w) = alternating_product_opt(&residual, a, b, true, &step_params);
        if val <= params.tol * scale * 1e-3 && !atoms.is_empty() {
            break; // residual has no positive product component left
        }
        if atoms.is_empty() && val <= 0.0 {
            break;
        }
        let atom = outer(&v).kron(&outer(&w));
        atoms.push(atom);
        sides.push((v, w));
        weights = refit_nnls(&atoms, &m);
        let mut rec: CMat<f64> = CMat::zeros(m.rows(), m.cols());
        for (atom, wt) in atoms.iter().zip(&weights) {
            rec = rec.add(&atom.scale_re(wt));
        }
        residual = m.sub(&rec);
    }
    // Final check after the budget.
    let mut rec = CMat::zeros(m.rows(), m.cols());
    for (atom, wt) in atoms.iter().zip(&weights) {
        rec = rec.add(&atom.scale_re(wt));
    }
    let res = m.sub(&rec);
    let res_norm = frobenius(&res.re).hypot(frobenius(&res.im));
    if res_norm <= params.tol * scale {
        let left = sides
            .iter()
            .map(|(v, _)| herm::cmat_to_coords(&outer(v)))
            .collect();
        let right = sides
            .iter()
            .map(|(_, w)| herm::cmat_to_coords(&outer(w)))
            .collect();
        Some((weights, left, right, res_norm))
    } else {
        None
    }
}

fn outer(v: &CVec) -> CMat<f64> {
    let n = v.0.len();
    let mut m = CMat::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            // v_i · conj(v_j)
            m.re[(i, j)] = v.0[i] * v.0[j] + v.1[i] * v.1[j];
            m.im[(i, j)] = v.1[i] * v.0[j] - v.0[i] * v.1[j];
        }
    }
    m
}

/// Nonnegative least squares over the atom weights: Lawson–Hanson active
/// set on the Gram system G·λ = h.
fn refit_nnls(atoms: &[CMat<f64>], target: &CMat<f64>) -> Vec<f64> {
    let k = atoms.len();
    let mut g = Mat::zeros(k, k);
    let mut h = vec![0.0; k];
    for i in 0..k {
        for j in 0..=i {
            let v = herm::trace_inner(&atoms[i], &atoms[j]);
            g[(i, j)] = v;
            g[(j, i)] = v;
        }
        h[i] = herm::trace_inner(&atoms[i], target);
    }
    let scale = h.iter().map(|x| x.abs()).fold(1.0, f64::max);
    let eps = 1e-12 * scale;
    let mut lambda = vec![0.0; k];
    let mut passive: Vec<usize> = Vec::new();
    for _outer in 0..4 * k + 8 {
        // Most negative gradient among the active (zero) coordinates.
        let grad: Vec<f64> = (0..k)
            .map(|i| (0..k).map(|j| g[(i, j)] * lambda[j]).sum::<f64>() - h[i])
            .collect();
        let cand = (0..k)
            .filter(|i| !passive.contains(i))
            .min_by(|&a, &b| grad[a].partial_cmp(&grad[b]).unwrap());
        match cand {
            Some(i) if grad[i] < -eps => passive.push(i),
            _ => break,
        }
        // Re-solve on the passive set, stepping back when a weight would
        // turn negative.
        loop {
            let p = passive.clone();
            let gp = Mat::from_fn(p.len(), p.len(), |r, c| g[(p[r], p[c])]);
            let hp: Vec<f64> = p.iter().map(|&i| h[i]).collect();
            let Some(z) = solve_f64(&gp, &hp) else {
                passive.pop();
                break;
            };
            if z.iter().all(|&v| v > 0.0) {
                for (idx, &i) in p.iter().enumerate() {
                    lambda[i] = z[idx];
                }
                break;
            }
            let mut alpha = f64::INFINITY;
            for (idx, &i) in p.iter().enumerate() {
                if z[idx] <= 0.0 {
                    let denom = lambda[i] - z[idx];
                    if denom > 0.0 {
                        alpha = alpha.min(lambda[i] / denom);
                    } else {
                        alpha = 0.0;
                    }
                }
            }
            for (idx, &i) in p.iter().enumerate() {
                lambda[i] += alpha * (z[idx] - lambda[i]);
            }
            passive.retain(|&i| lambda[i] > eps.max(1e-300));
            if passive.is_empty() {
                break;
            }
        }
    }
    lambda
}

/// Dense f64 linear solve by Gaussian elimination with partial pivoting.
fn solve_f64(a: &Mat<f64>, b: &[f64]) -> Option<Vec<f64>> {
    let n = a.rows();
    let mut m = a.clone();
    let mut rhs = b.to_vec();
    let mut perm: Vec<usize> = (0..n).collect();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| m[(i, col)].abs().partial_cmp(&m[(j, col)].abs()).unwrap())?;
        if m[(piv, col)].abs() < 1e-13 {
            return None;
        }
        if piv != col {
            for j in 0..n {
                let t = m[(piv, j)];
                m[(piv, j)] = m[(col, j)];
                m[(col, j)] = t;
            }
            rhs.swap(piv, col);
            perm.swap(piv, col);
        }
        for i in col + 1..n {
            let f = m[(i, col)] / m[(col, col)];
            if f == 0.0 {
                continue;
            }
            for j in col..n {
                m[(i, j)] -= f * m[(col, j)];
            }
            rhs[i] -= f * rhs[col];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut s = rhs[i];
        for j in i + 1..n {
            s -= m[(i, j)] * x[j];
        }
        x[i] = s / m[(i, i)];
    }
    Some(x)
}

/// Searches for M = P + PT(Q) with P, Q psd by Dykstra alternating
/// projections between the product psd cone and the affine slice. Returns
/// (P, Q, residual) when the combined residual beats tol.
fn block_pos_decomposition(
    m: &CMat<f64>,
    a: usize,
    b: usize,
    params: &MemberParams,
) -> Option<(CMat<f64>, CMat<f64>, f64)> {
    let n = m.rows();
    let scale = frobenius(&m.re).hypot(frobenius(&m.im)).max(1.0);
    let mut p = m.clone();
    let mut q: CMat<f64> = CMat::zeros(n, n);
    // Dykstra correction terms for the cone projection.
    let mut inc_p: CMat<f64> = CMat::zeros(n, n);
    let mut inc_q: CMat<f64> = CMat::zeros(n, n);
    let iters = 4000.max(params.iters);
    for _ in 0..iters {
        // Project (p + inc) onto the product psd cone.
        let tp = p.add(&inc_p);
        let tq = q.add(&inc_q);
        let pp = psd_project(&tp);
        let pq = psd_project(&tq);
        inc_p = tp.sub(&pp);
        inc_q = tq.sub(&pq);
        // Project onto the affine set P + PT(Q) = M.
        let viol = pp.add(&pt_second(&pq, a, b)).sub(m);
        let lam = viol.scale_re(&0.5);
        p = pp.sub(&lam);
        q = pq.sub(&pt_second(&lam, a, b));
        // Residual: psd violation of (p, q) plus affine violation of the
        // cone-projected pair.
        let psd_viol = (-min_eig_herm(&p)).max(0.0).max((-min_eig_herm(&q)).max(0.0));
        let aff_viol = frobenius(&viol.re).hypot(frobenius(&viol.im));
        if psd_viol <= params.tol * scale && aff_viol <= params.tol * scale {
            let residual = psd_viol.max(aff_viol);
            return Some((psd_project(&p), psd_project(&q), residual));
        }
    }
    None
}

fn min_eig_herm(m: &CMat<f64>) -> f64 {
    let e = real_embed_cmat(m);
    let (vals, _) = sym_eig(&e).expect("embedding eigendecomposition");
    *vals.last().unwrap()
}

/// Projection onto the psd cone by eigenvalue clipping, through the real
/// embedding (spectral functions commute with the embedding).
pub fn psd_project(m: &CMat<f64>) -> CMat<f64> {
    let n = m.rows();
    let e = real_embed_cmat(m);
    let (vals, q) = sym_eig(&e).expect("embedding eigendecomposition");
    let dim = vals.len();
    let mut clipped: Mat<f64> = Mat::zeros(dim, dim);
    for k in 0..dim {
        let lam = vals[k].max(0.0);
        if lam == 0.0 {
            continue;
        }
        for i in 0..dim {
            let qa = q[(i, k)];
            if qa == 0.0 {
                continue;
            }
            for j in 0..dim {
                clipped[(i, j)] += lam * qa * q[(j, k)];
            }
        }
    }
    // Read the complex matrix back off the embedding blocks and re-hermitize.
    let mut out: CMat<f64> = CMat::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let re = 0.5 * (clipped[(i, j)] + clipped[(n + i, n + j)]);
            let im = 0.5 * (clipped[(n + i, j)] - clipped[(i, n + j)]);
            out.re[(i, j)] = re;
            out.im[(i, j)] = im;
        }
    }
    let sym = out.adjoint();
    out.add(&sym).scale_re(&0.5)
}

/// Partial transpose of the second factor of an (a·b)×(a·b) matrix.
pub fn pt_second(m: &CMat<f64>, a: usize, b: usize) -> CMat<f64> {
    let n = a * b;
    let mut out = CMat::zeros(n, n);
    for p in 0..a {
        for c in 0..b {
            for q in 0..a {
                for d in 0..b {
                    out.re[(p * b + c, q * b + d)] = m.re[(p * b + d, q * b + c)];
                    out.im[(p * b + c, q * b + d)] = m.im[(p * b + d, q * b + c)];
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::dot;
    use crate::scalar::rat;
    use num_traits::{One, Signed};

    fn params() -> MemberParams {
        MemberParams::default()
    }

    #[test]
    fn identity_is_separable() {
        // I₄ ∈ Psd(2) ⊗̲ Psd(2) with an explicit decomposition.
        let mut x = vec![Rational::zero(); 16];
        // I₄ = (E_11 + E_22) ⊗ (E_11 + E_22): coordinates on diagonal units.
        for alpha in 0..2 {
            for beta in 0..2 {
                x[alpha * 4 + beta] = Rational::one();
            }
        }
        let v = separable_member(2, 2, &x, &params()).unwrap();
        assert!(v.is_yes(), "{v:?}");
        if let Some(Certificate::SeparableDecomposition { residual, .. }) = v.certificate() {
            assert!(*residual < 1e-8);
        } else {
            panic!("expected a decomposition certificate: {v:?}");
        }
    }

    #[test]
    fn max_ent_state_is_not_separable() {
        // PPT refutes: the partial transpose of Σ E_ij⊗E_ij is the swap
        // with eigenvalue −1. The separator must be exact.
        let x = max_ent_coords(2);
        let v = separable_member(2, 2, &x, &params()).unwrap();
        match &v {
            Verdict::No {
                oracle,
                certificate: Some(Certificate::Separator { functional }),
            } => {
                assert_eq!(oracle, "ppt-criterion");
                assert!(dot(functional, &x).is_negative());
                // Nonnegative on a few product states A ⊗ A.
                for alpha in 0..4 {
                    let mut a = vec![Rational::zero(); 4];
                    a[alpha] = Rational::one();
                    if alpha >= 2 {
                        a[0] = Rational::one();
                        a[1] = Rational::one();
                    }
                    let prod = crate::linalg::kron_vec(&a, &a);
                    let m = tensor_coords_to_cmat(&[2, 2], &prod).unwrap();
                    if exact_psd_test(&real_embed_cmat(&m)).unwrap().is_psd() {
                        assert!(!dot(functional, &prod).is_negative());
                    }
                }
            }
            other => panic!("expected ppt no: {other:?}"),
        }
    }

    #[test]
    fn max_ent_state_is_block_positive_by_lemma() {
        let x = max_ent_coords(2);
        let v = block_positive_member(2, 2, &x, &params()).unwrap();
        match &v {
            Verdict::Yes { oracle, .. } => assert_eq!(oracle, "max-ent-lemma"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn swap_is_block_positive_via_decomposition() {
        // swap = PT(m) = 0 + PT(psd): block-positive but not psd.
        let swap = partial_transpose(&[2, 2], 1, &max_ent_coords(2));
        let p = MemberParams {
            restarts: 8,
            ..params()
        };
        let v = block_positive_member(2, 2, &swap, &p).unwrap();
        match &v {
            Verdict::Yes {
                oracle,
                certificate: Some(Certificate::BlockPosDecomposition { residual, .. }),
            } => {
                assert_eq!(oracle, "stoermer-woronowicz-decomposition");
                assert!(*residual < 1e-8);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn negative_diagonal_is_not_block_positive() {
        // −I₄ fails on every product vector.
        let mut x = vec![Rational::zero(); 16];
        for alpha in 0..2 {
            for beta in 0..2 {
                x[alpha * 4 + beta] = rat(-1);
            }
        }
        let p = MemberParams {
            restarts: 4,
            ..params()
        };
        let v = block_positive_member(2, 2, &x, &p).unwrap();
        match &v {
            Verdict::No {
                certificate: Some(Certificate::ProductWitness { value, .. }),
                ..
            } => {
                assert!(*value < -0.5, "value {value}");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn random_separable_mixtures_decompose() {
        // Σ of a few random product states must come back Yes with a small
        // residual at 2⊗2 (decided by PPT, witnessed by the search).
        let mut rng = rng::substream(41, 0);
        let mut coords = vec![0.0f64; 16];
        for _ in 0..4 {
            let v = random_cvec(&mut rng, 2);
            let w = random_cvec(&mut rng, 2);
            let prod = outer(&v).kron(&outer(&w));
            let c = herm::cmat_to_tensor_coords(&[2, 2], &prod);
            for (acc, x) in coords.iter_mut().zip(&c) {
                *acc += x;
            }
        }
        let x: Vec<Rational> = coords
            .iter()
            .map(|v| crate::scalar::from_f64(*v).unwrap())
            .collect();
        let v = separable_member(2, 2, &x, &params()).unwrap();
        assert!(v.is_yes(), "{v:?}");
    }
}

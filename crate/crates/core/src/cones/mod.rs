//! Closed convex cones in ℝⁿ: representations, exact polyhedral duality,
//! membership with certificates, and minimal/maximal tensor products.
//!
//! Polyhedral questions are decided exactly over the rationals. The psd and
//! Lorentz cones have closed-form membership. The minimal/maximal tensor
//! products of psd factors (separability and block-positivity) are decided by
//! [`tensor::tensor_member`], which may honestly answer `Unknown`.

pub mod dd;
pub mod tensor;

use crate::extension::lp::{cone_membership, conic_feasibility, ConeMembership, ConicOutcome, ConicProblem};
use crate::linalg::exact::{exact_psd_test, invert, PsdOutcome};
use crate::linalg::herm::{self, herm_dim};
use crate::linalg::{dot, kron_vec, Mat};
use crate::rng::DEFAULT_SEED;
use crate::scalar::{to_f64, Rational};
use crate::verdict::{Certificate, Verdict};
use crate::{Error, Result};
use dd::{double_description, DEFAULT_AMBIENT_CAP};
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

/// A closed convex cone in one of several representations.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ConeRep {
    /// cone(generators) ⊆ ℝ^ambient. May carry lineality as ±v pairs.
    PolyV {
        ambient: usize,
        #[serde(with = "crate::scalar::rat_mat_str")]
        generators: Vec<Vec<Rational>>,
    },
    /// {x : φ_i(x) ≥ 0} ⊆ ℝ^ambient.
    PolyH {
        ambient: usize,
        #[serde(with = "crate::scalar::rat_mat_str")]
        halfspaces: Vec<Vec<Rational>>,
    },
    /// Conic hull of a basis of the space.
    Simplex {
        #[serde(with = "crate::scalar::rat_mat_str")]
        basis: Vec<Vec<Rational>>,
    },
    /// {(t, x) : t ≥ 0, t² ≥ Σ x_i²} ⊆ ℝ^{d+1}.
    Lorentz { d: usize },
    /// Positive semidefinite Hermitian d×d matrices in the real coordinates
    /// of `HermSpace(d)`, ambient dimension d².
    Psd { d: usize },
    /// Psd elements of Her_{s1} ⊗ ... ⊗ Her_{sn} in tensor-basis
    /// coordinates (the level spaces of operator-stem systems).
    PsdTensor { sides: Vec<usize> },
    /// Lazy minimal tensor product node.
    MinTensor { left: Box<ConeRep>, right: Box<ConeRep> },
    /// Lazy maximal tensor product node.
    MaxTensor { left: Box<ConeRep>, right: Box<ConeRep> },
}

/// Decision mode for membership: exact rational arithmetic, or floating
/// point with the given tolerance on psd-flavoured checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Exact,
    Float,
}

/// Knobs shared by membership and the tensor heuristics.
#[derive(Clone, Debug)]
pub struct MemberParams {
    pub mode: Mode,
    pub tol: f64,
    pub restarts: usize,
    pub iters: usize,
    pub seed: u64,
    /// Atom budget for the separable decomposition search.
    pub budget: usize,
    /// Ambient-dimension cap for double-description conversions.
    pub ambient_cap: usize,
}

impl Default for MemberParams {
    fn default() -> Self {
        MemberParams {
            mode: Mode::Exact,
            tol: 1e-9,
            restarts: 32,
            iters: 200,
            seed: DEFAULT_SEED,
            budget: 400,
            ambient_cap: DEFAULT_AMBIENT_CAP,
        }
    }
}

impl ConeRep {
    pub fn poly_v(ambient: usize, generators: Vec<Vec<Rational>>) -> Self {
        ConeRep::PolyV {
            ambient,
            generators,
        }
    }

    pub fn poly_h(ambient: usize, halfspaces: Vec<Vec<Rational>>) -> Self {
        ConeRep::PolyH {
            ambient,
            halfspaces,
        }
    }

    /// The nonnegative orthant as an explicit generator cone.
    pub fn orthant_v(n: usize) -> Self {
        let gens = (0..n)
            .map(|i| {
                let mut v = vec![Rational::zero(); n];
                v[i] = Rational::one();
                v
            })
            .collect();
        ConeRep::poly_v(n, gens)
    }

    /// The standard simplex cone (orthant) in simplex representation.
    pub fn simplex_std(n: usize) -> Self {
        let basis = (0..n)
            .map(|i| {
                let mut v = vec![Rational::zero(); n];
                v[i] = Rational::one();
                v
            })
            .collect();
        ConeRep::Simplex { basis }
    }

    pub fn min_tensor_node(left: ConeRep, right: ConeRep) -> Self {
        ConeRep::MinTensor {
            left: Box::new(left),
            right: Box::new(right),
        }
    }

    pub fn max_tensor_node(left: ConeRep, right: ConeRep) -> Self {
        ConeRep::MaxTensor {
            left: Box::new(left),
            right: Box::new(right),
        }
    }

    pub fn ambient(&self) -> usize {
        match self {
            ConeRep::PolyV { ambient, .. } | ConeRep::PolyH { ambient, .. } => *ambient,
            ConeRep::Simplex { basis } => basis.len(),
            ConeRep::Lorentz { d } => d + 1,
            ConeRep::Psd { d } => herm_dim(*d),
            ConeRep::PsdTensor { sides } => sides.iter().map(|&s| herm_dim(s)).product(),
            ConeRep::MinTensor { left, right } | ConeRep::MaxTensor { left, right } => {
                left.ambient() * right.ambient()
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ConeRep::PolyV {
                ambient,
                generators,
            } => {
                for g in generators {
                    if g.len() != *ambient {
                        return Err(Error::DimensionMismatch {
                            expected: *ambient,
                            got: g.len(),
                        });
                    }
                }
                Ok(())
            }
            ConeRep::PolyH {
                ambient,
                halfspaces,
            } => {
                for h in halfspaces {
                    if h.len() != *ambient {
                        return Err(Error::DimensionMismatch {
                            expected: *ambient,
                            got: h.len(),
                        });
                    }
                }
                Ok(())
            }
            ConeRep::Simplex { basis } => {
                let n = basis.len();
                for b in basis {
                    if b.len() != n {
                        return Err(Error::DimensionMismatch {
                            expected: n,
                            got: b.len(),
                        });
                    }
                }
                let m = Mat::from_rows(basis.clone());
                if crate::linalg::exact::rank(&m) != n {
                    return Err(Error::Invalid("simplex basis is not invertible".into()));
                }
                Ok(())
            }
            ConeRep::Lorentz { d } => {
                if *d == 0 {
                    return Err(Error::Invalid("lorentz cone needs d >= 1".into()));
                }
                Ok(())
            }
            ConeRep::Psd { d } => {
                if *d == 0 {
                    return Err(Error::Invalid("psd cone needs d >= 1".into()));
                }
                Ok(())
            }
            ConeRep::PsdTensor { sides } => {
                if sides.is_empty() || sides.iter().any(|&s| s == 0) {
                    return Err(Error::Invalid("psd tensor factors must be positive".into()));
                }
                Ok(())
            }
            ConeRep::MinTensor { left, right } | ConeRep::MaxTensor { left, right } => {
                left.validate()?;
                right.validate()
            }
        }
    }

    /// Structural dual: generator and halfspace forms swap, the simplex maps
    /// to its dual basis, Lorentz and psd are self-dual under the standard
    /// inner-product identification, and the tensor nodes swap minimal and
    /// maximal with dualized factors.
    pub fn dual(&self) -> ConeRep {
        match self {
            ConeRep::PolyV {
                ambient,
                generators,
            } => ConeRep::poly_h(*ambient, generators.clone()),
            ConeRep::PolyH {
                ambient,
                halfspaces,
            } => ConeRep::poly_v(*ambient, halfspaces.clone()),
            ConeRep::Simplex { basis } => {
                let m = Mat::from_rows(basis.clone());
                let inv = invert(&m).expect("validated simplex basis");
                // Rows of B⁻¹ᵀ = columns of B⁻¹ form the dual basis.
                let dual_basis = (0..basis.len()).map(|i| inv.col(i)).collect();
                ConeRep::Simplex { basis: dual_basis }
            }
            ConeRep::Lorentz { d } => ConeRep::Lorentz { d: *d },
            ConeRep::Psd { d } => ConeRep::Psd { d: *d },
            ConeRep::PsdTensor { sides } => ConeRep::PsdTensor {
                sides: sides.clone(),
            },
            ConeRep::MinTensor { left, right } => ConeRep::MaxTensor {
                left: Box::new(left.dual()),
                right: Box::new(right.dual()),
            },
            ConeRep::MaxTensor { left, right } => ConeRep::MinTensor {
                left: Box::new(left.dual()),
                right: Box::new(right.dual()),
            },
        }
    }

    /// Explicit generator list, if one exists at this cap: `PolyV` and
    /// `Simplex` directly, `PolyH` through double description (lineality
    /// returned as ± pairs), tensor nodes recursively. `None` for cones with
    /// infinitely many extreme rays.
    pub fn generators_with(&self, ambient_cap: usize) -> Result<Option<Vec<Vec<Rational>>>> {
        match self {
            ConeRep::PolyV { generators, .. } => Ok(Some(generators.clone())),
            ConeRep::Simplex { basis } => Ok(Some(basis.clone())),
            ConeRep::PolyH {
                ambient,
                halfspaces,
            } => {
                let out = double_description(*ambient, halfspaces, ambient_cap)?;
                Ok(Some(out.generators()))
            }
            ConeRep::Psd { d: 1 } => Ok(Some(vec![vec![Rational::one()]])),
            ConeRep::PsdTensor { sides } if sides.iter().all(|&s| s == 1) => {
                Ok(Some(vec![vec![Rational::one()]]))
            }
            ConeRep::Lorentz { .. } | ConeRep::Psd { .. } | ConeRep::PsdTensor { .. } => Ok(None),
            ConeRep::MinTensor { left, right } => {
                let (Some(gl), Some(gr)) = (
                    left.generators_with(ambient_cap)?,
                    right.generators_with(ambient_cap)?,
                ) else {
                    return Ok(None);
                };
                let mut gens = Vec::with_capacity(gl.len() * gr.len());
                for a in &gl {
                    for b in &gr {
                        gens.push(kron_vec(a, b));
                    }
                }
                Ok(Some(gens))
            }
            ConeRep::MaxTensor { .. } => match self.halfspaces_with(ambient_cap)? {
                Some(hs) => {
                    let out = double_description(self.ambient(), &hs, ambient_cap)?;
                    Ok(Some(out.generators()))
                }
                None => Ok(None),
            },
        }
    }

    /// Explicit halfspace list, if one exists at this cap. Halfspaces of C
    /// are the generators of C∨.
    pub fn halfspaces_with(&self, ambient_cap: usize) -> Result<Option<Vec<Vec<Rational>>>> {
        match self {
            ConeRep::PolyH { halfspaces, .. } => Ok(Some(halfspaces.clone())),
            ConeRep::Simplex { .. } => {
                let ConeRep::Simplex { basis } = self.dual() else {
                    unreachable!()
                };
                Ok(Some(basis))
            }
            ConeRep::PolyV {
                ambient,
                generators,
            } => {
                let out = double_description(*ambient, generators, ambient_cap)?;
                Ok(Some(out.generators()))
            }
            ConeRep::Psd { d: 1 } => Ok(Some(vec![vec![Rational::one()]])),
            ConeRep::PsdTensor { sides } if sides.iter().all(|&s| s == 1) => {
                Ok(Some(vec![vec![Rational::one()]]))
            }
            ConeRep::Lorentz { .. } | ConeRep::Psd { .. } | ConeRep::PsdTensor { .. } => Ok(None),
            ConeRep::MaxTensor { left, right } => {
                let (Some(gl), Some(gr)) = (
                    left.dual().generators_with(ambient_cap)?,
                    right.dual().generators_with(ambient_cap)?,
                ) else {
                    return Ok(None);
                };
                let mut hs = Vec::with_capacity(gl.len() * gr.len());
                for a in &gl {
                    for b in &gr {
                        hs.push(kron_vec(a, b));
                    }
                }
                Ok(Some(hs))
            }
            ConeRep::MinTensor { .. } => self.dual().generators_with(ambient_cap),
        }
    }

    /// Membership of x with a certificate; tensor nodes over psd factors may
    /// return `Unknown`.
    pub fn member(&self, x: &[Rational], params: &MemberParams) -> Result<Verdict> {
        if x.len() != self.ambient() {
            return Err(Error::DimensionMismatch {
                expected: self.ambient(),
                got: x.len(),
            });
        }
        match self {
            ConeRep::PolyH { halfspaces, .. } => {
                let mut slacks = Vec::with_capacity(halfspaces.len());
                for h in halfspaces {
                    let s = dot(h, x);
                    if s.is_negative() {
                        return Ok(Verdict::no(
                            "halfspace-evaluation",
                            Certificate::Separator {
                                functional: h.clone(),
                            },
                        ));
                    }
                    slacks.push(s);
                }
                Ok(Verdict::yes(
                    "halfspace-evaluation",
                    Certificate::Slacks { values: slacks },
                ))
            }
            ConeRep::PolyV { generators, .. } => {
                match cone_membership(generators, x)? {
                    ConeMembership::Inside { coeffs } => Ok(Verdict::yes(
                        "exact-lp",
                        Certificate::Combination {
                            coeffs,
                            atoms: generators.clone(),
                        },
                    )),
                    ConeMembership::Outside { separator } => Ok(Verdict::no(
                        "exact-lp-farkas",
                        Certificate::Separator {
                            functional: separator,
                        },
                    )),
                }
            }
            ConeRep::Simplex { basis } => {
                let m = Mat::from_rows(basis.clone()).transpose();
                let inv = invert(&m).expect("validated simplex basis");
                let coeffs = inv.matvec(x);
                if let Some(i) = coeffs.iter().position(|c| c.is_negative()) {
                    // Row i of B⁻¹ (as columns-of-basis matrix) is the dual
                    // basis functional with value coeffs[i] < 0.
                    let functional: Vec<Rational> =
                        (0..x.len()).map(|j| inv[(i, j)].clone()).collect();
                    Ok(Verdict::no(
                        "dual-basis",
                        Certificate::Separator { functional },
                    ))
                } else {
                    Ok(Verdict::yes(
                        "basis-solve",
                        Certificate::Combination {
                            coeffs,
                            atoms: basis.clone(),
                        },
                    ))
                }
            }
            ConeRep::Lorentz { .. } => Ok(lorentz_member(x)),
            ConeRep::Psd { d } => psd_member(*d, x, params),
            ConeRep::PsdTensor { sides } => psd_tensor_member(sides, x, params),
            ConeRep::MinTensor { .. } | ConeRep::MaxTensor { .. } => {
                self.tensor_node_member(x, params)
            }
        }
    }

    fn tensor_node_member(&self, x: &[Rational], params: &MemberParams) -> Result<Verdict> {
        let (is_min, left, right) = match self {
            ConeRep::MinTensor { left, right } => (true, left, right),
            ConeRep::MaxTensor { left, right } => (false, left, right),
            _ => unreachable!(),
        };
        // Psd ⊗ Psd: separability / block-positivity heuristics.
        if let (ConeRep::Psd { d: a }, ConeRep::Psd { d: b }) = (left.as_ref(), right.as_ref()) {
            return if is_min {
                tensor::separable_member(*a, *b, x, params)
            } else {
                tensor::block_positive_member(*a, *b, x, params)
            };
        }
        // The maximally entangled state lies in D ⊗̄ D∨ for every cone D.
        if !is_min {
            if let Some(v) = max_ent_scaling(left, right, x) {
                return Ok(v);
            }
        }
        // Polyhedral route.
        if is_min {
            if let Some(gens) = self.generators_with(params.ambient_cap)? {
                return ConeRep::poly_v(self.ambient(), gens).member(x, params);
            }
        } else if let Some(hs) = self.halfspaces_with(params.ambient_cap)? {
            return ConeRep::poly_h(self.ambient(), hs).member(x, params);
        }
        Ok(Verdict::unknown(
            "tensor membership unsupported for this factor combination",
        ))
    }

    /// Decides x = c·m_V with c > 0 for a MaxTensor(D, D∨) node; the lemma
    /// answers Yes with exact slacks when D is polyhedral.
    fn is_self_dual_pair(left: &ConeRep, right: &ConeRep) -> bool {
        *right == left.dual() || *left == right.dual()
    }

    /// Exact interior point of a polyhedral cone (`None` when the cone is
    /// not full-dimensional).
    pub fn interior_point(&self, ambient_cap: usize) -> Result<Option<Vec<Rational>>> {
        let Some(hs) = self.halfspaces_with(ambient_cap)? else {
            return Err(Error::Unsupported(
                "interior_point needs a polyhedral cone".into(),
            ));
        };
        let n = self.ambient();
        let a_in = Mat::from_fn(hs.len(), n, |i, j| hs[i][j].clone());
        let b_in = vec![Rational::one(); hs.len()];
        match conic_feasibility(&ConicProblem {
            a_eq: Mat::zeros(0, n),
            b_eq: vec![],
            a_in,
            b_in,
        })? {
            ConicOutcome::Feasible { z } => Ok(Some(z)),
            ConicOutcome::Infeasible { .. } => Ok(None),
        }
    }
}

fn max_ent_scaling(left: &ConeRep, right: &ConeRep, x: &[Rational]) -> Option<Verdict> {
    if !ConeRep::is_self_dual_pair(left, right) {
        return None;
    }
    let n = left.ambient();
    if right.ambient() != n {
        return None;
    }
    // m_V = Σ v_i ⊗ v_i' over any basis and its dual. In plain coordinates
    // (standard dot identification) this is the flattened identity; for psd
    // factors the trace identification gives the Σ E_ij ⊗ E_ij pattern.
    let pattern: Vec<Rational> = match left {
        ConeRep::Psd { d } => herm::max_ent_coords(*d),
        _ => {
            let mut p = vec![Rational::zero(); n * n];
            for i in 0..n {
                p[i * n + i] = Rational::one();
            }
            p
        }
    };
    let mut scale: Option<Rational> = None;
    for (xi, pi) in x.iter().zip(&pattern) {
        if pi.is_zero() {
            if !xi.is_zero() {
                return None;
            }
        } else {
            let c = xi.clone() / pi.clone();
            if !c.is_positive() {
                return None;
            }
            match &scale {
                None => scale = Some(c),
                Some(s) if *s == c => {}
                _ => return None,
            }
        }
    }
    scale.as_ref()?;
    // Exact slack check against every halfspace when both factors are
    // polyhedral; otherwise the closed form alone answers.
    let slacks = match (
        left.dual().generators_with(DEFAULT_AMBIENT_CAP),
        right.dual().generators_with(DEFAULT_AMBIENT_CAP),
    ) {
        (Ok(Some(gl)), Ok(Some(gr))) => {
            let mut slacks = Vec::new();
            for a in &gl {
                for b in &gr {
                    let s = dot(&kron_vec(a, b), x);
                    if s.is_negative() {
                        return None; // not actually inside; fall through
                    }
                    slacks.push(s);
                }
            }
            slacks
        }
        _ => Vec::new(),
    };
    Some(Verdict::yes(
        "max-ent-lemma",
        Certificate::MaxEntLemma { slacks },
    ))
}

/// Exact Lorentz membership in the squared form, with rational certificates
/// in both directions.
fn lorentz_member(x: &[Rational]) -> Verdict {
    let t = x[0].clone();
    let rest = &x[1..];
    let sq: Rational = rest.iter().map(|v| v.clone() * v.clone()).sum();
    let slack = t.clone() * t.clone() - sq.clone();
    if !t.is_negative() && !slack.is_negative() {
        return Verdict::yes(
            "lorentz-closed-form",
            Certificate::Slacks {
                values: vec![t, slack],
            },
        );
    }
    // Separator construction avoiding square roots:
    //   t < 0:        y = e_0;
    //   t = 0, x ≠ 0: y = (Σ|x_i|, −x)   (1-norm ≥ 2-norm);
    //   t > 0:        y = ((Σx² + t²)/(2t), −x), whose dual-membership slack
    //                 s² − Σx² = (Σx² − t²)²/(4t²) ≥ 0 and pairing
    //                 s·t − Σx² = (t² − Σx²)/2 < 0.
    let functional = if t.is_negative() {
        let mut y = vec![Rational::zero(); x.len()];
        y[0] = Rational::one();
        y
    } else {
        let s = if t.is_zero() {
            rest.iter().map(|v| v.abs()).sum()
        } else {
            (sq.clone() + t.clone() * t.clone()) / (Rational::from_integer(2.into()) * t)
        };
        let mut y = vec![s];
        y.extend(rest.iter().map(|v| -v.clone()));
        y
    };
    Verdict::no("lorentz-closed-form", Certificate::Separator { functional })
}

pub(crate) fn psd_member(d: usize, x: &[Rational], params: &MemberParams) -> Result<Verdict> {
    match params.mode {
        Mode::Exact => {
            let e = herm::herm_real_embed(d, x)?;
            match exact_psd_test(&e)? {
                PsdOutcome::Psd { perm, diag, lower } => {
                    let lower_rows = (0..lower.rows())
                        .map(|i| lower.row(i).to_vec())
                        .collect();
                    Ok(Verdict::yes(
                        "exact-psd-pivoting",
                        Certificate::PsdFactor {
                            perm,
                            diag,
                            lower: lower_rows,
                        },
                    ))
                }
                PsdOutcome::NotPsd { witness } => {
                    // φ(H) = wᵀ·embed(H)·w is a rational functional that is
                    // nonnegative on the psd cone and negative at x.
                    let functional = embed_form_coords(d, &witness);
                    Ok(Verdict::no(
                        "exact-psd-pivoting",
                        Certificate::Separator { functional },
                    ))
                }
            }
        }
        Mode::Float => {
            let e = herm::herm_real_embed(d, x)?.map(to_f64);
            let (lambda_min, v) = crate::linalg::eigen::min_eig(&e)?;
            if lambda_min >= -params.tol {
                Ok(Verdict::Yes {
                    oracle: "eigenvalue-float".into(),
                    certificate: None,
                })
            } else {
                let half = v.len() / 2;
                Ok(Verdict::no(
                    "eigenvalue-float",
                    Certificate::NegativeForm {
                        vec_re: v[..half].to_vec(),
                        vec_im: v[half..].to_vec(),
                        value: lambda_min,
                    },
                ))
            }
        }
    }
}

/// Psd test in tensor-basis coordinates: reconstruct the Hermitian matrix
/// of side Π sides, embed, and decide; the separator is the exact quadratic
/// form of the refuting vector expressed on the tensor basis.
pub(crate) fn psd_tensor_member(
    sides: &[usize],
    x: &[Rational],
    params: &MemberParams,
) -> Result<Verdict> {
    match params.mode {
        Mode::Exact => {
            let m = herm::tensor_coords_to_cmat(sides, x)?;
            let e = herm::real_embed_cmat(&m);
            match exact_psd_test(&e)? {
                PsdOutcome::Psd { perm, diag, lower } => {
                    let lower_rows = (0..lower.rows()).map(|i| lower.row(i).to_vec()).collect();
                    Ok(Verdict::yes(
                        "exact-psd-pivoting",
                        Certificate::PsdFactor {
                            perm,
                            diag,
                            lower: lower_rows,
                        },
                    ))
                }
                PsdOutcome::NotPsd { witness } => {
                    let functional = tensor_embed_form_coords_multi(sides, &witness);
                    Ok(Verdict::no(
                        "exact-psd-pivoting",
                        Certificate::Separator { functional },
                    ))
                }
            }
        }
        Mode::Float => {
            let xf: Vec<f64> = x.iter().map(to_f64).collect();
            let m = herm::tensor_coords_to_cmat(sides, &xf)?;
            let e = herm::real_embed_cmat(&m);
            let (lambda_min, v) = crate::linalg::eigen::min_eig(&e)?;
            if lambda_min >= -params.tol {
                Ok(Verdict::Yes {
                    oracle: "eigenvalue-float".into(),
                    certificate: None,
                })
            } else {
                let half = v.len() / 2;
                Ok(Verdict::no(
                    "eigenvalue-float",
                    Certificate::NegativeForm {
                        vec_re: v[..half].to_vec(),
                        vec_im: v[half..].to_vec(),
                        value: lambda_min,
                    },
                ))
            }
        }
    }
}

/// Functional coordinates of z ↦ wᵀ·embed(M_z)·w over an arbitrary tensor
/// Hermitian basis.
pub fn tensor_embed_form_coords_multi(sides: &[usize], w: &[Rational]) -> Vec<Rational> {
    let dims: Vec<usize> = sides.iter().map(|&s| herm_dim(s)).collect();
    let total: usize = dims.iter().product();
    let mut out = Vec::with_capacity(total);
    for flat in 0..total {
        let mut rem = flat;
        let mut h: Option<herm::CMat<Rational>> = None;
        for k in 0..dims.len() {
            let stride: usize = dims[k + 1..].iter().product();
            let digit = rem / stride;
            rem %= stride;
            let b: herm::CMat<Rational> = herm::basis_cmat(sides[k], digit);
            h = Some(match h {
                None => b,
                Some(acc) => acc.kron(&b),
            });
        }
        out.push(embed_quadratic_form(&h.expect("nonempty sides"), w));
    }
    out
}

/// Coordinates of the functional H ↦ wᵀ·embed(H)·w on HermSpace(d).
pub fn embed_form_coords(d: usize, w: &[Rational]) -> Vec<Rational> {
    (0..herm_dim(d))
        .map(|alpha| {
            let h = herm::basis_cmat::<Rational>(d, alpha);
            embed_quadratic_form(&h, w)
        })
        .collect()
}

/// wᵀ·embed(X + iY)·w for w = [top; bottom]:
/// Σ X_ij (t_i t_j + u_i u_j) + Σ Y_ij (u_i t_j − t_i u_j).
pub fn embed_quadratic_form(h: &herm::CMat<Rational>, w: &[Rational]) -> Rational {
    let d = h.rows();
    let (top, bot) = w.split_at(d);
    let mut acc = Rational::zero();
    for i in 0..d {
        for j in 0..d {
            let xr = &h.re[(i, j)];
            if !xr.is_zero() {
                acc += xr.clone()
                    * (top[i].clone() * top[j].clone() + bot[i].clone() * bot[j].clone());
            }
            let yi = &h.im[(i, j)];
            if !yi.is_zero() {
                acc += yi.clone()
                    * (bot[i].clone() * top[j].clone() - top[i].clone() * bot[j].clone());
            }
        }
    }
    acc
}

impl ConeRep {
    /// Is this cone exactly the nonnegative ray in ambient dimension 1?
    /// Tensoring with it is the identity on the other factor.
    pub fn is_unit_ray(&self) -> bool {
        if self.ambient() != 1 {
            return false;
        }
        match self {
            ConeRep::Psd { d } => *d == 1,
            ConeRep::PsdTensor { sides } => sides.iter().all(|&s| s == 1),
            ConeRep::Simplex { basis } => basis[0][0].is_positive(),
            ConeRep::PolyV { generators, .. } => {
                generators.iter().any(|g| g[0].is_positive())
                    && generators.iter().all(|g| !g[0].is_negative())
            }
            ConeRep::PolyH { halfspaces, .. } => {
                halfspaces.iter().any(|h| h[0].is_positive())
                    && halfspaces.iter().all(|h| !h[0].is_negative())
            }
            _ => false,
        }
    }
}

/// Minimal tensor product: pairwise Kronecker products of generators when
/// both factors have them; a lazy node otherwise.
pub fn min_tensor(a: &ConeRep, b: &ConeRep, ambient_cap: usize) -> ConeRep {
    if a.is_unit_ray() {
        return b.clone();
    }
    if b.is_unit_ray() {
        return a.clone();
    }
    let eager = (|| -> Result<Option<ConeRep>> {
        let (Some(ga), Some(gb)) = (a.generators_with(ambient_cap)?, b.generators_with(ambient_cap)?)
        else {
            return Ok(None);
        };
        let mut gens = Vec::with_capacity(ga.len() * gb.len());
        for x in &ga {
            for y in &gb {
                gens.push(kron_vec(x, y));
            }
        }
        Ok(Some(ConeRep::poly_v(a.ambient() * b.ambient(), gens)))
    })();
    match eager {
        Ok(Some(c)) => c,
        _ => ConeRep::min_tensor_node(a.clone(), b.clone()),
    }
}

/// Maximal tensor product: dual(min_tensor(dual a, dual b)). Explicit
/// halfspaces for polyhedral operands; a lazy node otherwise.
pub fn max_tensor(a: &ConeRep, b: &ConeRep, ambient_cap: usize) -> ConeRep {
    if a.is_unit_ray() {
        return b.clone();
    }
    if b.is_unit_ray() {
        return a.clone();
    }
    let eager = (|| -> Result<Option<ConeRep>> {
        let (Some(ga), Some(gb)) = (
            a.dual().generators_with(ambient_cap)?,
            b.dual().generators_with(ambient_cap)?,
        ) else {
            return Ok(None);
        };
        let mut hs = Vec::with_capacity(ga.len() * gb.len());
        for x in &ga {
            for y in &gb {
                hs.push(kron_vec(x, y));
            }
        }
        Ok(Some(ConeRep::poly_h(a.ambient() * b.ambient(), hs)))
    })();
    match eager {
        Ok(Some(c)) => c,
        _ => ConeRep::max_tensor_node(a.clone(), b.clone()),
    }
}

/// Irredundant subset of generators: g_i is kept iff it is not a conic
/// combination of the others (exact LP per generator). When lineality is
/// present the test is automatically modulo it, since ± pairs stay in the
/// candidate set.
pub fn extreme_rays(generators: &[Vec<Rational>]) -> Result<Vec<Vec<Rational>>> {
    let mut kept: Vec<Vec<Rational>> = Vec::new();
    // Deduplicate up to positive scaling first.
    let mut seen = std::collections::HashSet::new();
    for g in generators {
        let n = crate::scalar::normalize_ray(g);
        if n.iter().all(|x| x.is_zero()) {
            continue;
        }
        let key = n.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        if seen.insert(key) {
            kept.push(g.clone());
        }
    }
    let mut i = 0;
    while i < kept.len() {
        let others: Vec<Vec<Rational>> = kept
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, g)| g.clone())
            .collect();
        if others.is_empty() {
            break;
        }
        match cone_membership(&others, &kept[i])? {
            ConeMembership::Inside { .. } => {
                kept.remove(i);
            }
            ConeMembership::Outside { .. } => {
                i += 1;
            }
        }
    }
    Ok(kept)
}

/// Does `big` contain `small`? Exact when `small` has a generator form and
/// `big` decides membership exactly; `Unknown` otherwise.
pub fn cone_contains(big: &ConeRep, small: &ConeRep, params: &MemberParams) -> Result<Verdict> {
    if big.ambient() != small.ambient() {
        return Err(Error::DimensionMismatch {
            expected: big.ambient(),
            got: small.ambient(),
        });
    }
    if big == small {
        return Ok(Verdict::Yes {
            oracle: "structural-equality".into(),
            certificate: None,
        });
    }
    let gens = match small.generators_with(params.ambient_cap) {
        Ok(Some(g)) => g,
        _ => {
            return Ok(Verdict::unknown(
                "containment needs a generator form of the smaller cone",
            ))
        }
    };
    for g in &gens {
        match big.member(g, params)? {
            Verdict::Yes { .. } => {}
            Verdict::No { certificate, .. } => {
                return Ok(Verdict::No {
                    oracle: "generator-membership".into(),
                    certificate,
                })
            }
            Verdict::Unknown { reason } => return Ok(Verdict::unknown(reason)),
        }
    }
    Ok(Verdict::Yes {
        oracle: "generator-membership".into(),
        certificate: None,
    })
}

/// Mutual containment, the working notion of cone equality.
pub fn cone_equal(a: &ConeRep, b: &ConeRep, params: &MemberParams) -> Result<Verdict> {
    match (cone_contains(a, b, params)?, cone_contains(b, a, params)?) {
        (Verdict::Yes { .. }, Verdict::Yes { .. }) => Ok(Verdict::Yes {
            oracle: "mutual-containment".into(),
            certificate: None,
        }),
        (Verdict::No { certificate, .. }, _) | (_, Verdict::No { certificate, .. }) => {
            Ok(Verdict::No {
                oracle: "mutual-containment".into(),
                certificate,
            })
        }
        _ => Ok(Verdict::unknown("containment undecided in one direction")),
    }
}

#[cfg(test)]
mod tests;

//! Certificate-producing extension solvers.
//!
//! Everything polyhedral runs on the exact LP engine in [`lp`]: scalar Riesz
//! extension of positive functionals, its vector-valued version with a sharp
//! target cone, and the finite-group invariant refinement. Each outcome is
//! either an extension that re-verifies exactly, or an obstruction whose
//! defining inequalities replay exactly. The numeric Arveson solver works in
//! the Choi picture with Dykstra alternating projections between the psd
//! cone and the affine constraint; it can certify extensions within
//! tolerance but never certifies nonexistence.

pub mod lp;

use crate::cones::{ConeRep, MemberParams};
use crate::cpmaps::{unchoi, ChoiMatrix, KrausList, LinMap};
use crate::linalg::eigen::sym_eig;
use crate::linalg::exact::{kernel_basis, rank, solve};
use crate::linalg::herm::{self, herm_dim, max_ent_coords, tensor_coords_to_cmat};
use crate::linalg::{dot, kron_vec, Mat};
use crate::scalar::{to_f64, Rational};
use crate::verdict::Certificate;
use crate::{Error, Result};
use lp::{conic_feasibility, verify_obstruction, ConicOutcome, ConicProblem};
use num_traits::{One, Signed, Zero};

/// Outcome of an extension problem: a verified extension or a verified
/// obstruction.
#[derive(Clone, Debug)]
pub enum ExtCert {
    Extension {
        /// The extended functional (one row) or map (w×v matrix).
        matrix: Vec<Vec<Rational>>,
        certificate: Certificate,
    },
    Obstruction {
        certificate: Certificate,
    },
}

impl ExtCert {
    pub fn is_extension(&self) -> bool {
        matches!(self, ExtCert::Extension { .. })
    }

    pub fn certificate(&self) -> &Certificate {
        match self {
            ExtCert::Extension { certificate, .. } | ExtCert::Obstruction { certificate } => {
                certificate
            }
        }
    }
}

/// Hypothesis checks attached to an extension run.
#[derive(Clone, Debug, Default)]
pub struct PreconditionReport {
    /// U intersects the interior of C.
    pub u_meets_interior: Option<bool>,
    /// ψ is nonnegative on U ∩ C (decided on the rays of U ∩ C).
    pub psi_nonneg_on_trace: Option<bool>,
    /// D is sharp (vector-valued problems).
    pub d_sharp: Option<bool>,
}

#[derive(Clone, Debug)]
pub struct RieszOutcome {
    pub cert: ExtCert,
    pub preconditions: PreconditionReport,
}

/// Scalar Riesz extension: find φ ∈ C∨ with φ|_U = ψ. When U meets the
/// interior of C and ψ is nonnegative on U ∩ C, an extension always exists
/// and the LP must find it.
pub fn riesz_extend(
    c: &ConeRep,
    u_basis: &[Vec<Rational>],
    psi: &[Rational],
    params: &MemberParams,
) -> Result<RieszOutcome> {
    let n = c.ambient();
    if psi.len() != u_basis.len() {
        return Err(Error::DimensionMismatch {
            expected: u_basis.len(),
            got: psi.len(),
        });
    }
    for u in u_basis {
        if u.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: u.len(),
            });
        }
    }
    let Some(gens) = c.generators_with(params.ambient_cap)? else {
        return Err(Error::Unsupported(
            "riesz extension needs a polyhedral cone".into(),
        ));
    };

    let preconditions = riesz_preconditions(c, u_basis, Some(psi), params)?;

    let problem = scalar_riesz_problem(&gens, u_basis, psi);
    let cert = match conic_feasibility(&problem)? {
        ConicOutcome::Feasible { z } => {
            for (u, p) in u_basis.iter().zip(psi) {
                debug_assert_eq!(&dot(&z, u), p);
            }
            for g in &gens {
                debug_assert!(!dot(&z, g).is_negative());
            }
            ExtCert::Extension {
                certificate: Certificate::Extension {
                    matrix: vec![z.clone()],
                    residual: 0.0,
                },
                matrix: vec![z],
            }
        }
        ConicOutcome::Infeasible { eq_mult, ineq_mult } => {
            debug_assert!(verify_obstruction(&problem, &eq_mult, &ineq_mult));
            ExtCert::Obstruction {
                certificate: Certificate::Obstruction {
                    eq_multipliers: eq_mult,
                    ineq_multipliers: ineq_mult,
                },
            }
        }
    };
    Ok(RieszOutcome {
        cert,
        preconditions,
    })
}

/// The feasibility problem of the scalar Riesz extension: φ free with
/// φ(g_i) ≥ 0 and φ(u_j) = ψ_j.
pub fn scalar_riesz_problem(
    gens: &[Vec<Rational>],
    u_basis: &[Vec<Rational>],
    psi: &[Rational],
) -> ConicProblem {
    let n = gens.first().map(|g| g.len()).unwrap_or_else(|| {
        u_basis.first().map(|u| u.len()).unwrap_or(0)
    });
    let a_eq = Mat::from_fn(u_basis.len(), n, |i, j| u_basis[i][j].clone());
    let a_in = Mat::from_fn(gens.len(), n, |i, j| gens[i][j].clone());
    ConicProblem {
        a_eq,
        b_eq: psi.to_vec(),
        a_in,
        b_in: vec![Rational::zero(); gens.len()],
    }
}

fn riesz_preconditions(
    c: &ConeRep,
    u_basis: &[Vec<Rational>],
    psi: Option<&[Rational]>,
    params: &MemberParams,
) -> Result<PreconditionReport> {
    let mut report = PreconditionReport::default();
    if u_basis.is_empty() {
        report.u_meets_interior = Some(false);
        report.psi_nonneg_on_trace = Some(true);
        return Ok(report);
    }
    let Some(hs) = c.halfspaces_with(params.ambient_cap)? else {
        return Ok(report);
    };
    // Interior: ∃α with h_k(Σ α_j u_j) ≥ 1 for every facet.
    let a_in = Mat::from_fn(hs.len(), u_basis.len(), |k, j| dot(&hs[k], &u_basis[j]));
    match conic_feasibility(&ConicProblem {
        a_eq: Mat::zeros(0, u_basis.len()),
        b_eq: vec![],
        a_in: a_in.clone(),
        b_in: vec![Rational::one(); hs.len()],
    })? {
        ConicOutcome::Feasible { .. } => report.u_meets_interior = Some(true),
        ConicOutcome::Infeasible { .. } => report.u_meets_interior = Some(false),
    }
    // ψ ≥ 0 on U ∩ C: the rays of {α : (HUᵀ)α ≥ 0} in U-coordinates.
    if let Some(psi) = psi {
        let rows: Vec<Vec<Rational>> = (0..hs.len())
            .map(|k| (0..u_basis.len()).map(|j| a_in[(k, j)].clone()).collect())
            .collect();
        let dd = crate::cones::dd::double_description(
            u_basis.len(),
            &rows,
            params.ambient_cap.max(u_basis.len()),
        )?;
        let ok = dd
            .generators()
            .iter()
            .all(|alpha| !dot(alpha, psi).is_negative());
        report.psi_nonneg_on_trace = Some(ok);
    }
    Ok(report)
}

/// Agreement report for the tensor-product criterion of the vector-valued
/// extension theorem.
#[derive(Clone, Debug)]
pub struct TensorCriterionReport {
    pub rays_tested: usize,
    /// Ψ ⊗ id maps every tested ray of (C ⊗̲ D∨) ∩ (U ⊗ W') into D ⊗̲ D∨.
    pub criterion_holds: bool,
    /// Whether the criterion verdict matches the LP outcome.
    pub agrees_with_outcome: bool,
}

#[derive(Clone, Debug)]
pub struct VectorRieszOutcome {
    pub cert: ExtCert,
    pub preconditions: PreconditionReport,
    pub tensor_criterion: Option<TensorCriterionReport>,
}

/// Vector-valued Riesz extension: find Φ ∈ Pos(C, D) with Φ|_U = Ψ, for a
/// sharp polyhedral D. Failing hypotheses (D sharp, U meets int C) are
/// precondition errors, not verdicts.
pub fn riesz_extend_vector(
    c: &ConeRep,
    d: &ConeRep,
    u_basis: &[Vec<Rational>],
    psi_images: &[Vec<Rational>],
    params: &MemberParams,
) -> Result<VectorRieszOutcome> {
    let v = c.ambient();
    let w = d.ambient();
    if psi_images.len() != u_basis.len() {
        return Err(Error::DimensionMismatch {
            expected: u_basis.len(),
            got: psi_images.len(),
        });
    }
    let Some(c_gens) = c.generators_with(params.ambient_cap)? else {
        return Err(Error::Unsupported("vector riesz needs polyhedral C".into()));
    };
    let Some(d_hs) = d.halfspaces_with(params.ambient_cap)? else {
        return Err(Error::Unsupported("vector riesz needs polyhedral D".into()));
    };
    // D sharp ⟺ the halfspace normals span W'.
    if rank(&Mat::from_rows(d_hs.clone())) != w {
        return Err(Error::Precondition("target cone D is not sharp".into()));
    }
    let mut preconditions = riesz_preconditions(c, u_basis, None, params)?;
    preconditions.d_sharp = Some(true);
    if preconditions.u_meets_interior != Some(true) {
        return Err(Error::Precondition(
            "subspace U does not meet the interior of C".into(),
        ));
    }

    let (problem, var) = vector_riesz_problem(&c_gens, &d_hs, u_basis, psi_images, v, w, &[]);
    let cert = solve_vector_problem(&problem, var, v, w)?;
    let tensor_criterion = tensor_criterion_report(
        &c_gens,
        d,
        &d_hs,
        u_basis,
        psi_images,
        cert.is_extension(),
        params,
    )
    .ok();

    Ok(VectorRieszOutcome {
        cert,
        preconditions,
        tensor_criterion,
    })
}

type VarFn = fn(usize, usize, usize) -> usize;

fn var_index(p: usize, q: usize, v: usize) -> usize {
    p * v + q
}

/// Builds the feasibility problem for Φ ∈ Pos(C, D), Φ|_U = Ψ, plus any
/// extra equality rows (intertwining constraints). Variables are the
/// entries of Φ flattened row-major.
pub fn vector_riesz_problem(
    c_gens: &[Vec<Rational>],
    d_hs: &[Vec<Rational>],
    u_basis: &[Vec<Rational>],
    psi_images: &[Vec<Rational>],
    v: usize,
    w: usize,
    extra_eq: &[(Vec<Rational>, Rational)],
) -> (ConicProblem, VarFn) {
    let mut eq_rows: Vec<Vec<Rational>> = Vec::new();
    let mut b_eq: Vec<Rational> = Vec::new();
    for (u, psi) in u_basis.iter().zip(psi_images) {
        for p in 0..w {
            let mut row = vec![Rational::zero(); w * v];
            for q in 0..v {
                row[var_index(p, q, v)] = u[q].clone();
            }
            eq_rows.push(row);
            b_eq.push(psi[p].clone());
        }
    }
    for (row, rhs) in extra_eq {
        eq_rows.push(row.clone());
        b_eq.push(rhs.clone());
    }
    let mut a_in = Mat::zeros(d_hs.len() * c_gens.len(), w * v);
    for (i, g) in c_gens.iter().enumerate() {
        for (k, h) in d_hs.iter().enumerate() {
            let row = i * d_hs.len() + k;
            for p in 0..w {
                for q in 0..v {
                    a_in[(row, var_index(p, q, v))] = h[p].clone() * g[q].clone();
                }
            }
        }
    }
    (
        ConicProblem {
            a_eq: Mat::from_rows(eq_rows),
            b_eq,
            a_in,
            b_in: vec![Rational::zero(); d_hs.len() * c_gens.len()],
        },
        var_index,
    )
}

fn solve_vector_problem(
    problem: &ConicProblem,
    var: VarFn,
    v: usize,
    w: usize,
) -> Result<ExtCert> {
    match conic_feasibility(problem)? {
        ConicOutcome::Feasible { z } => {
            let matrix: Vec<Vec<Rational>> = (0..w)
                .map(|p| (0..v).map(|q| z[var(p, q, v)].clone()).collect())
                .collect();
            Ok(ExtCert::Extension {
                certificate: Certificate::Extension {
                    matrix: matrix.clone(),
                    residual: 0.0,
                },
                matrix,
            })
        }
        ConicOutcome::Infeasible { eq_mult, ineq_mult } => {
            debug_assert!(verify_obstruction(problem, &eq_mult, &ineq_mult));
            Ok(ExtCert::Obstruction {
                certificate: Certificate::Obstruction {
                    eq_multipliers: eq_mult,
                    ineq_multipliers: ineq_mult,
                },
            })
        }
    }
}

/// Evaluates the criterion "Ψ ⊗ id maps (C ⊗̲ D∨) ∩ (U ⊗ W') into D ⊗̲ D∨"
/// on an exactly computed generating set of the intersection.
fn tensor_criterion_report(
    c_gens: &[Vec<Rational>],
    d: &ConeRep,
    d_hs: &[Vec<Rational>],
    u_basis: &[Vec<Rational>],
    psi_images: &[Vec<Rational>],
    extension_found: bool,
    params: &MemberParams,
) -> Result<TensorCriterionReport> {
    let v = c_gens.first().map(|g| g.len()).unwrap_or(0);
    let w = d.ambient();
    // Atoms of C ⊗̲ D∨ (the halfspace normals generate D∨).
    let mut atoms: Vec<Vec<Rational>> = Vec::new();
    for g in c_gens {
        for h in d_hs {
            atoms.push(kron_vec(g, h));
        }
    }
    // Intersection with U ⊗ W': λ ≥ 0 with f(Σ λ_a·atom_a) = 0 for every
    // functional f spanning (U ⊗ W')⊥ = U⊥ ⊗ W.
    let u_perp = kernel_basis(&Mat::from_rows(u_basis.to_vec()));
    let mut rows: Vec<Vec<Rational>> = Vec::new();
    for f in &u_perp {
        for p in 0..w {
            let mut e = vec![Rational::zero(); w];
            e[p] = Rational::one();
            let functional = kron_vec(f, &e);
            let pos: Vec<Rational> = atoms.iter().map(|a| dot(&functional, a)).collect();
            let neg: Vec<Rational> = pos.iter().map(|x| -x.clone()).collect();
            rows.push(pos);
            rows.push(neg);
        }
    }
    for i in 0..atoms.len() {
        let mut e = vec![Rational::zero(); atoms.len()];
        e[i] = Rational::one();
        rows.push(e);
    }
    let dd = crate::cones::dd::double_description(
        atoms.len(),
        &rows,
        atoms.len().max(params.ambient_cap),
    )?;

    let Some(d_gens) = d.generators_with(params.ambient_cap)? else {
        return Err(Error::Unsupported("criterion needs polyhedral D".into()));
    };
    let mut target_atoms = Vec::new();
    for dg in &d_gens {
        for h in d_hs {
            target_atoms.push(kron_vec(dg, h));
        }
    }
    // Basis of U ⊗ W' and the corresponding images under Ψ ⊗ id.
    let mut uw_basis: Vec<Vec<Rational>> = Vec::new();
    let mut psi_uw: Vec<Vec<Rational>> = Vec::new();
    for (u, psi) in u_basis.iter().zip(psi_images) {
        for p in 0..w {
            let mut e = vec![Rational::zero(); w];
            e[p] = Rational::one();
            uw_basis.push(kron_vec(u, &e));
            psi_uw.push(kron_vec(psi, &e));
        }
    }
    let uw_mat = Mat::from_rows(uw_basis).transpose();
    let mut rays_tested = 0usize;
    let mut criterion_holds = true;
    for lam in &dd.rays {
        let mut z = vec![Rational::zero(); v * w];
        for (l, a) in lam.iter().zip(&atoms) {
            if l.is_zero() {
                continue;
            }
            for (acc, x) in z.iter_mut().zip(a) {
                *acc += l.clone() * x.clone();
            }
        }
        if z.iter().all(|x| x.is_zero()) {
            continue;
        }
        rays_tested += 1;
        let Some(beta) = solve(&uw_mat, &z) else {
            criterion_holds = false;
            continue;
        };
        let mut image = vec![Rational::zero(); w * w];
        for (bcoef, pim) in beta.iter().zip(&psi_uw) {
            if bcoef.is_zero() {
                continue;
            }
            for (acc, x) in image.iter_mut().zip(pim) {
                *acc += bcoef.clone() * x.clone();
            }
        }
        match lp::cone_membership(&target_atoms, &image)? {
            lp::ConeMembership::Inside { .. } => {}
            lp::ConeMembership::Outside { .. } => criterion_holds = false,
        }
    }
    Ok(TensorCriterionReport {
        rays_tested,
        criterion_holds,
        agrees_with_outcome: criterion_holds == extension_found,
    })
}

/// A finite group represented by explicit invertible rational matrices
/// preserving a cone.
#[derive(Clone, Debug)]
pub struct GroupRep {
    pub elements: Vec<Mat<Rational>>,
    pub cone: ConeRep,
}

impl GroupRep {
    /// Verifies closure under products and inverses, and positivity of
    /// every element on the cone's generators.
    pub fn new(
        elements: Vec<Mat<Rational>>,
        cone: ConeRep,
        params: &MemberParams,
    ) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::GroupClosure("empty element list".into()));
        }
        let n = cone.ambient();
        for e in &elements {
            if e.rows() != n || e.cols() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: e.rows(),
                });
            }
        }
        let contains = |m: &Mat<Rational>| elements.iter().any(|e| e == m);
        if !contains(&Mat::identity(n)) {
            return Err(Error::GroupClosure("identity element missing".into()));
        }
        for a in &elements {
            for b in &elements {
                if !contains(&a.matmul(b)) {
                    return Err(Error::GroupClosure(
                        "product escapes the element list".into(),
                    ));
                }
            }
            let inv = crate::linalg::exact::invert(a)
                .map_err(|_| Error::GroupClosure("element is not invertible".into()))?;
            if !contains(&inv) {
                return Err(Error::GroupClosure("inverse escapes the element list".into()));
            }
        }
        if let Some(gens) = cone.generators_with(params.ambient_cap)? {
            for e in &elements {
                for g in &gens {
                    let img = e.matvec(g);
                    if !matches!(cone.member(&img, params)?, crate::Verdict::Yes { .. }) {
                        return Err(Error::GroupClosure(
                            "a group element is not positive on the cone".into(),
                        ));
                    }
                }
            }
        }
        Ok(GroupRep { elements, cone })
    }

    pub fn trivial(cone: ConeRep) -> Self {
        Self::trivial_action(cone, 1)
    }

    /// Trivial action listed `count` times, for pairing with a nontrivial
    /// representation of the same group (elements pair by index).
    pub fn trivial_action(cone: ConeRep, count: usize) -> Self {
        let n = cone.ambient();
        GroupRep {
            elements: vec![Mat::identity(n); count.max(1)],
            cone,
        }
    }

    /// Basis of Fix(ρ): the kernel of (avg over g of ρ(g)) − I.
    pub fn fix_subspace(&self) -> Vec<Vec<Rational>> {
        let n = self.elements[0].rows();
        let mut avg = Mat::zeros(n, n);
        for e in &self.elements {
            avg = avg.add(e);
        }
        let count = Rational::from_integer((self.elements.len() as i64).into());
        let avg = avg.map(|x| x.clone() / count.clone());
        kernel_basis(&avg.sub(&Mat::identity(n)))
    }

    /// The dual representation ρ*(g) = ρ(g⁻¹)' on the dual cone.
    pub fn dual_rep(&self, params: &MemberParams) -> Result<GroupRep> {
        let elements = self
            .elements
            .iter()
            .map(|e| Ok(crate::linalg::exact::invert(e)?.transpose()))
            .collect::<Result<Vec<_>>>()?;
        GroupRep::new(elements, self.cone.dual(), params)
    }
}

/// Inspection data for the conic group stem: B(ρ) = Fix(ρ) ∩ C and the
/// halfspaces of A(ρ) (the ρ*-invariant dual functionals).
#[derive(Clone, Debug)]
pub struct GroupConeReport {
    pub fix_dim: usize,
    pub b_generators: Vec<Vec<Rational>>,
    pub a_halfspaces: Vec<Vec<Rational>>,
}

#[derive(Clone, Debug)]
pub struct InvariantOutcome {
    pub cert: ExtCert,
    pub preconditions: PreconditionReport,
    pub report: GroupConeReport,
}

/// Equality rows forcing Φ·ρ(g) = σ(g)·Φ for every paired group element.
pub fn intertwining_rows(
    rep_in: &GroupRep,
    rep_out: &GroupRep,
    v: usize,
    w: usize,
) -> Vec<(Vec<Rational>, Rational)> {
    let mut extra_eq: Vec<(Vec<Rational>, Rational)> = Vec::new();
    for (rho, sigma) in rep_in.elements.iter().zip(rep_out.elements.iter()) {
        for p in 0..w {
            for q in 0..v {
                let mut row = vec![Rational::zero(); w * v];
                for r in 0..v {
                    row[var_index(p, r, v)] = row[var_index(p, r, v)].clone() + rho[(r, q)].clone();
                }
                for r in 0..w {
                    row[var_index(r, q, v)] =
                        row[var_index(r, q, v)].clone() - sigma[(p, r)].clone();
                }
                if row.iter().any(|x| !x.is_zero()) {
                    extra_eq.push((row, Rational::zero()));
                }
            }
        }
    }
    extra_eq
}

/// Invariant extension: the vector-valued problem plus the intertwining
/// equalities Φ·ρ(g) = σ(g)·Φ for every listed group element.
pub fn invariant_extend(
    rep_in: &GroupRep,
    rep_out: &GroupRep,
    u_basis: &[Vec<Rational>],
    psi_images: &[Vec<Rational>],
    params: &MemberParams,
) -> Result<InvariantOutcome> {
    let c = &rep_in.cone;
    let d = &rep_out.cone;
    let v = c.ambient();
    let w = d.ambient();
    if rep_in.elements.len() != rep_out.elements.len() {
        return Err(Error::GroupClosure(
            "group element lists must pair ρ(g) with σ(g) by index".into(),
        ));
    }
    let Some(c_gens) = c.generators_with(params.ambient_cap)? else {
        return Err(Error::Unsupported(
            "invariant extension needs polyhedral C".into(),
        ));
    };
    let Some(d_hs) = d.halfspaces_with(params.ambient_cap)? else {
        return Err(Error::Unsupported(
            "invariant extension needs polyhedral D".into(),
        ));
    };
    if rank(&Mat::from_rows(d_hs.clone())) != w {
        return Err(Error::Precondition("target cone D is not sharp".into()));
    }
    let mut preconditions = riesz_preconditions(c, u_basis, None, params)?;
    preconditions.d_sharp = Some(true);

    let extra_eq = intertwining_rows(rep_in, rep_out, v, w);
    let (problem, var) = vector_riesz_problem(&c_gens, &d_hs, u_basis, psi_images, v, w, &extra_eq);
    let cert = solve_vector_problem(&problem, var, v, w)?;
    if let ExtCert::Extension { matrix, .. } = &cert {
        let phi = Mat::from_rows(matrix.clone());
        for (rho, sigma) in rep_in.elements.iter().zip(rep_out.elements.iter()) {
            debug_assert_eq!(phi.matmul(rho), sigma.matmul(&phi));
        }
    }

    let fix = rep_in.fix_subspace();
    let b_generators = cone_cap_subspace(c, &fix, params)?;
    let dual = rep_in.dual_rep(params)?;
    let fix_dual = dual.fix_subspace();
    let a_halfspaces = cone_cap_subspace(&c.dual(), &fix_dual, params)?;
    Ok(InvariantOutcome {
        cert,
        preconditions,
        report: GroupConeReport {
            fix_dim: fix.len(),
            b_generators,
            a_halfspaces,
        },
    })
}

/// Generators of C ∩ span(subspace_basis): double description over the
/// cone's halfspaces plus ± pairs of the annihilator functionals.
fn cone_cap_subspace(
    c: &ConeRep,
    subspace_basis: &[Vec<Rational>],
    params: &MemberParams,
) -> Result<Vec<Vec<Rational>>> {
    let n = c.ambient();
    let Some(mut rows) = c.halfspaces_with(params.ambient_cap)? else {
        return Err(Error::Unsupported("subspace slice needs halfspaces".into()));
    };
    if subspace_basis.is_empty() {
        return Ok(vec![]);
    }
    // Functionals vanishing exactly on the subspace: kernel of the basis
    // matrix read as row constraints x ↦ ⟨u_i, x⟩.
    let annihilator = kernel_basis(&Mat::from_rows(subspace_basis.to_vec()));
    for f in &annihilator {
        rows.push(f.clone());
        rows.push(f.iter().map(|x| -x.clone()).collect());
    }
    let dd = crate::cones::dd::double_description(n, &rows, n.max(params.ambient_cap))?;
    Ok(dd.generators())
}

/// Outcome of the numeric Arveson extension.
#[derive(Clone, Debug)]
pub enum ArvesonOutcome {
    Extended {
        phi: LinMap,
        kraus: KrausList,
        residual: f64,
        iterations: usize,
    },
    Undecided {
        residual: f64,
        iterations: usize,
        reason: String,
    },
}

/// Which hypothesis of the extension theorem was verified.
#[derive(Clone, Debug, Default)]
pub struct ArvesonPreconditions {
    /// Θ is onto Her_d (exact rank check).
    pub theta_surjective: bool,
    /// The identity is in the range of Θ, so Θ hits the interior of the psd
    /// cone.
    pub theta_hits_interior: bool,
}

/// Seeks a completely positive Φ: Her_d → Her_t with Φ∘Θ = Ψ by Dykstra
/// alternating projections on the Choi matrix of Φ, between the psd cone
/// and the affine constraint subspace (least-squares projector precomputed).
/// A residual below tol certifies the extension with its Kraus form; a
/// residual plateau reports Undecided — alternating projections cannot
/// certify nonexistence.
pub fn arveson_extend(
    theta: &Mat<Rational>,
    d: usize,
    psi: &Mat<Rational>,
    t: usize,
    iters: usize,
    tol: f64,
) -> Result<(ArvesonOutcome, ArvesonPreconditions)> {
    let nx = theta.cols();
    if theta.rows() != herm_dim(d) {
        return Err(Error::DimensionMismatch {
            expected: herm_dim(d),
            got: theta.rows(),
        });
    }
    if psi.rows() != herm_dim(t) || psi.cols() != nx {
        return Err(Error::DimensionMismatch {
            expected: herm_dim(t) * nx,
            got: psi.rows() * psi.cols(),
        });
    }
    let preconditions = ArvesonPreconditions {
        theta_surjective: rank(theta) == herm_dim(d),
        theta_hits_interior: {
            let mut id = vec![Rational::zero(); herm_dim(d)];
            for i in 0..d {
                id[i] = Rational::one();
            }
            solve(theta, &id).is_some()
        },
    };

    // Variables: Choi coordinates over Her_t ⊗ Her_d. The map matrix is
    // P[α,γ] = c[α·d² + γ] / m_γ with m the maximally entangled diagonal,
    // so Φ∘Θ = Ψ is the linear system A·c = b.
    let (t2, d2) = (herm_dim(t), herm_dim(d));
    let m_diag: Vec<f64> = {
        let m = max_ent_coords(d);
        (0..d2).map(|g| to_f64(&m[g * d2 + g])).collect()
    };
    let rows = t2 * nx;
    let cols = t2 * d2;
    let mut a: Mat<f64> = Mat::zeros(rows, cols);
    let mut b = vec![0.0f64; rows];
    for alpha in 0..t2 {
        for j in 0..nx {
            let r = alpha * nx + j;
            for gamma in 0..d2 {
                a[(r, alpha * d2 + gamma)] = to_f64(&theta[(gamma, j)]) / m_diag[gamma];
            }
            b[r] = to_f64(&psi[(alpha, j)]);
        }
    }
    // Least-squares projector onto {c : A·c = b}: the pseudo-inverse of
    // A·Aᵀ through its eigendecomposition tolerates redundant rows.
    let aat = a.matmul(&a.transpose());
    let (vals, q) = sym_eig(&aat)?;
    let scale = vals.first().copied().unwrap_or(0.0).max(1.0);
    let pinv_apply = |r: &[f64]| -> Vec<f64> {
        let mut qtr = vec![0.0; vals.len()];
        for k in 0..vals.len() {
            for i in 0..vals.len() {
                qtr[k] += q[(i, k)] * r[i];
            }
        }
        for (k, v) in vals.iter().enumerate() {
            qtr[k] = if *v > 1e-12 * scale { qtr[k] / v } else { 0.0 };
        }
        let mut out = vec![0.0; vals.len()];
        for i in 0..vals.len() {
            for k in 0..vals.len() {
                out[i] += q[(i, k)] * qtr[k];
            }
        }
        out
    };
    let project_affine = |c: &[f64]| -> Vec<f64> {
        let mut res = vec![0.0; rows];
        for i in 0..rows {
            let mut acc = -b[i];
            for j in 0..cols {
                acc += a[(i, j)] * c[j];
            }
            res[i] = acc;
        }
        let y = pinv_apply(&res);
        let mut out = c.to_vec();
        for j in 0..cols {
            let mut corr = 0.0;
            for i in 0..rows {
                corr += a[(i, j)] * y[i];
            }
            out[j] -= corr;
        }
        out
    };
    let psd_project_coords = |c: &[f64]| -> Vec<f64> {
        let m = tensor_coords_to_cmat(&[t, d], c).expect("choi shape");
        let p = crate::cones::tensor::psd_project(&m);
        herm::cmat_to_tensor_coords(&[t, d], &p)
    };
    let eq_residual = |c: &[f64]| -> f64 {
        let mut worst = 0.0f64;
        for i in 0..rows {
            let mut acc = -b[i];
            for j in 0..cols {
                acc += a[(i, j)] * c[j];
            }
            worst = worst.max(acc.abs());
        }
        worst
    };
    let psd_residual = |c: &[f64]| -> f64 {
        let m = tensor_coords_to_cmat(&[t, d], c).expect("choi shape");
        let pairs = crate::cpmaps::herm_eigpairs(&m).expect("choi eigen");
        (-pairs.last().map(|(l, _)| *l).unwrap_or(0.0)).max(0.0)
    };

    // Dykstra: correction on the cone side; the affine projection is exact.
    let mut x = project_affine(&vec![0.0; cols]);
    let mut inc = vec![0.0f64; cols];
    for it in 0..iters {
        let tilted: Vec<f64> = x.iter().zip(&inc).map(|(a, b)| a + b).collect();
        let p = psd_project_coords(&tilted);
        for j in 0..cols {
            inc[j] = tilted[j] - p[j];
        }
        let eqr = eq_residual(&p);
        let next = project_affine(&p);
        let psdr = psd_residual(&next);
        x = next;
        if eqr <= tol && psdr <= tol {
            let c_rat: Vec<Rational> = x
                .iter()
                .map(|v| crate::scalar::from_f64(*v).unwrap_or_else(Rational::zero))
                .collect();
            let choi = ChoiMatrix {
                cod: t,
                dom: d,
                coords: c_rat,
            };
            let phi = unchoi(&choi);
            let kraus = match crate::cpmaps::cp_check(
                &phi,
                &MemberParams {
                    tol: (10.0 * tol).max(1e-12),
                    ..MemberParams::default()
                },
            )? {
                crate::cpmaps::CpOutcome::Cp { kraus } => kraus,
                crate::cpmaps::CpOutcome::NotCp { .. } => KrausList {
                    dom: d,
                    cod: t,
                    ops: vec![],
                },
            };
            return Ok((
                ArvesonOutcome::Extended {
                    phi,
                    kraus,
                    residual: eqr.max(psdr),
                    iterations: it + 1,
                },
                preconditions,
            ));
        }
    }
    let eqr = eq_residual(&x);
    let psdr = psd_residual(&x);
    Ok((
        ArvesonOutcome::Undecided {
            residual: eqr.max(psdr),
            iterations: iters,
            reason: "no convergence within budget".into(),
        },
        preconditions,
    ))
}

/// Θ for the diagonal-subspace example: includes the span of the diagonal
/// units of Her_d into Her_d.
pub fn diagonal_inclusion(d: usize) -> Mat<Rational> {
    Mat::from_fn(herm_dim(d), d, |i, j| {
        if i == j {
            Rational::one()
        } else {
            Rational::zero()
        }
    })
}

#[cfg(test)]
mod tests;

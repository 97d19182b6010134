use super::*;
use crate::cpmaps::LinMap;
use crate::scalar::{rat, ratio};

fn v(xs: &[i64]) -> Vec<Rational> {
    xs.iter().map(|&x| rat(x)).collect()
}

fn params() -> MemberParams {
    MemberParams::default()
}

#[test]
fn scalar_riesz_on_diagonal_line() {
    // C = R²₊, U = span{(1,1)}, ψ((1,1)) = 2: an extension exists, e.g.
    // φ = (1, 1).
    let c = ConeRep::orthant_v(2);
    let out = riesz_extend(&c, &[v(&[1, 1])], &[rat(2)], &params()).unwrap();
    assert_eq!(out.preconditions.u_meets_interior, Some(true));
    assert_eq!(out.preconditions.psi_nonneg_on_trace, Some(true));
    match &out.cert {
        ExtCert::Extension { matrix, .. } => {
            let phi = &matrix[0];
            assert_eq!(dot(phi, &v(&[1, 1])), rat(2));
            assert!(!phi[0].is_negative() && !phi[1].is_negative());
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn scalar_riesz_obstruction_on_boundary() {
    // U = x-axis misses the interior; ψ negative on the ray (1, 0) ∈ U ∩ C
    // fails the necessary condition and the LP certifies infeasibility.
    let c = ConeRep::orthant_v(2);
    let out = riesz_extend(&c, &[v(&[1, 0])], &[rat(-1)], &params()).unwrap();
    assert_eq!(out.preconditions.u_meets_interior, Some(false));
    assert_eq!(out.preconditions.psi_nonneg_on_trace, Some(false));
    match &out.cert {
        ExtCert::Obstruction { certificate } => {
            let Certificate::Obstruction {
                ineq_multipliers, ..
            } = certificate
            else {
                panic!()
            };
            assert!(ineq_multipliers.iter().all(|m| !m.is_negative()));
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn scalar_riesz_randomized_guarantee() {
    // 25 instances with U through a certified interior point and ψ induced
    // by restricting an interior dual functional: extension every time.
    let mut state = 2024u64;
    let mut next = |m: i64| {
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        ((state >> 33) as i64).rem_euclid(2 * m + 1) - m
    };
    let mut found = 0;
    for _ in 0..40 {
        if found == 25 {
            break;
        }
        let n = 3;
        let gens: Vec<Vec<Rational>> = (0..4).map(|_| (0..n).map(|_| rat(next(3))).collect()).collect();
        let c = ConeRep::poly_v(n, gens.clone());
        let Ok(Some(interior)) = c.interior_point(12) else {
            continue;
        };
        // φ₀ strictly positive on all generators.
        let Ok(Some(phi0)) = c.dual().interior_point(12) else {
            continue;
        };
        // U spanned by the interior point and one random direction.
        let dir: Vec<Rational> = (0..n).map(|_| rat(next(2))).collect();
        let u_basis = vec![interior.clone(), dir.clone()];
        if crate::linalg::exact::rank(&Mat::from_rows(u_basis.clone())) < 2 {
            continue;
        }
        let psi = vec![dot(&phi0, &interior), dot(&phi0, &dir)];
        let out = riesz_extend(&c, &u_basis, &psi, &params()).unwrap();
        assert_eq!(out.preconditions.u_meets_interior, Some(true));
        assert!(
            out.cert.is_extension(),
            "hypotheses hold, extension must exist"
        );
        found += 1;
    }
    assert!(found >= 20, "not enough valid instances generated: {found}");
}

#[test]
fn vector_riesz_scalar_specialization() {
    // W = R, D = R₊ reduces to the scalar case.
    let c = ConeRep::orthant_v(2);
    let d = ConeRep::poly_h(1, vec![v(&[1])]);
    let out = riesz_extend_vector(&c, &d, &[v(&[1, 1])], &[v(&[2])], &params()).unwrap();
    assert!(out.cert.is_extension());
    let tc = out.tensor_criterion.expect("criterion evaluated");
    assert!(tc.criterion_holds);
    assert!(tc.agrees_with_outcome);
}

#[test]
fn vector_riesz_three_to_two() {
    // C = R³₊, D = R²₊, U = span{(1,1,1)}, Ψ((1,1,1)) = (1,1).
    let c = ConeRep::orthant_v(3);
    let d = ConeRep::poly_h(2, vec![v(&[1, 0]), v(&[0, 1])]);
    let out =
        riesz_extend_vector(&c, &d, &[v(&[1, 1, 1])], &[v(&[1, 1])], &params()).unwrap();
    match &out.cert {
        ExtCert::Extension { matrix, .. } => {
            let phi = Mat::from_rows(matrix.clone());
            assert_eq!(phi.matvec(&v(&[1, 1, 1])), v(&[1, 1]));
            // Positivity on every generator of C.
            for i in 0..3 {
                let mut e = vec![Rational::zero(); 3];
                e[i] = rat(1);
                let img = phi.matvec(&e);
                assert!(img.iter().all(|x| !x.is_negative()));
            }
        }
        other => panic!("{other:?}"),
    }
    let tc = out.tensor_criterion.unwrap();
    assert!(tc.rays_tested > 0);
    assert!(tc.criterion_holds && tc.agrees_with_outcome);
}

#[test]
fn vector_riesz_infeasible_with_failing_criterion() {
    // Ψ maps the point (1, 1) of U ∩ int C to (−1, 1) outside D: obstruction,
    // and the sampled criterion finds a violating element.
    let c = ConeRep::orthant_v(2);
    let d = ConeRep::poly_h(2, vec![v(&[1, 0]), v(&[0, 1])]);
    let out = riesz_extend_vector(&c, &d, &[v(&[1, 1])], &[v(&[-1, 1])], &params()).unwrap();
    assert!(!out.cert.is_extension());
    let tc = out.tensor_criterion.unwrap();
    assert!(!tc.criterion_holds);
    assert!(tc.agrees_with_outcome);
}

#[test]
fn vector_riesz_rejects_unsharp_target() {
    // D = halfplane {x ≥ 0} in R² is not sharp.
    let c = ConeRep::orthant_v(2);
    let d = ConeRep::poly_h(2, vec![v(&[1, 0])]);
    let err = riesz_extend_vector(&c, &d, &[v(&[1, 1])], &[v(&[1, 0])], &params());
    assert!(matches!(err, Err(Error::Precondition(_))));
}

#[test]
fn vector_riesz_rejects_boundary_subspace() {
    let c = ConeRep::orthant_v(2);
    let d = ConeRep::poly_h(1, vec![v(&[1])]);
    let err = riesz_extend_vector(&c, &d, &[v(&[1, 0])], &[v(&[1])], &params());
    assert!(matches!(err, Err(Error::Precondition(_))));
}

fn z2_swap_rep() -> GroupRep {
    let c = ConeRep::orthant_v(2);
    let id = Mat::identity(2);
    let swap = Mat::from_rows(vec![v(&[0, 1]), v(&[1, 0])]);
    GroupRep::new(vec![id, swap], c, &params()).unwrap()
}

#[test]
fn group_rep_validation() {
    let rep = z2_swap_rep();
    assert_eq!(rep.elements.len(), 2);
    let fix = rep.fix_subspace();
    assert_eq!(fix.len(), 1);
    // Fix(ρ) is the diagonal line.
    assert_eq!(fix[0][0], fix[0][1]);
    // A non-closed list fails.
    let c = ConeRep::orthant_v(2);
    let swap = Mat::from_rows(vec![v(&[0, 1]), v(&[1, 0])]);
    assert!(matches!(
        GroupRep::new(vec![swap], c.clone(), &params()),
        Err(Error::GroupClosure(_))
    ));
    // A positive-map violation fails: negation does not preserve the orthant.
    let neg = Mat::from_rows(vec![v(&[-1, 0]), v(&[0, -1])]);
    assert!(matches!(
        GroupRep::new(vec![Mat::identity(2), neg], c, &params()),
        Err(Error::GroupClosure(_))
    ));
}

#[test]
fn invariant_extension_z2_symmetric() {
    // Z₂ swapping coordinates on R²₊, trivial action on R₊, U = span{(1,1)},
    // Ψ((1,1)) = 1: the invariant extension is φ = (1/2, 1/2).
    let rep_in = z2_swap_rep();
    let rep_out = GroupRep::trivial_action(ConeRep::poly_h(1, vec![v(&[1])]), 2);
    let out = invariant_extend(&rep_in, &rep_out, &[v(&[1, 1])], &[v(&[1])], &params()).unwrap();
    match &out.cert {
        ExtCert::Extension { matrix, .. } => {
            assert_eq!(matrix[0], vec![ratio(1, 2), ratio(1, 2)]);
        }
        other => panic!("{other:?}"),
    }
    assert_eq!(out.report.fix_dim, 1);
    // B(ρ) = Fix(ρ) ∩ C is the diagonal ray.
    assert!(!out.report.b_generators.is_empty());
    for g in &out.report.b_generators {
        assert_eq!(g[0], g[1]);
        assert!(!g[0].is_negative());
    }
}

#[test]
fn invariant_extension_parity_obstructed() {
    // Ψ((1,−1)) = 1 forces φ(1,−1) = −φ(1,−1) under the swap: infeasible,
    // with a verified Farkas obstruction.
    let rep_in = z2_swap_rep();
    let rep_out = GroupRep::trivial_action(ConeRep::poly_h(1, vec![v(&[1])]), 2);
    let out = invariant_extend(&rep_in, &rep_out, &[v(&[1, -1])], &[v(&[1])], &params()).unwrap();
    match &out.cert {
        ExtCert::Obstruction { certificate } => {
            let Certificate::Obstruction {
                ineq_multipliers, ..
            } = certificate
            else {
                panic!()
            };
            assert!(ineq_multipliers.iter().all(|m| !m.is_negative()));
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn invariant_trivial_group_reduces_to_vector_riesz() {
    let rep_in = GroupRep::trivial(ConeRep::orthant_v(3));
    let rep_out = GroupRep::trivial(ConeRep::poly_h(2, vec![v(&[1, 0]), v(&[0, 1])]));
    let out =
        invariant_extend(&rep_in, &rep_out, &[v(&[1, 1, 1])], &[v(&[1, 1])], &params()).unwrap();
    assert!(out.cert.is_extension());
}

#[test]
fn arveson_identity_realization() {
    // Θ = id: Φ = Ψ directly when Ψ is CP; the residual collapses within a
    // few iterations.
    let d = 2;
    let theta = Mat::identity(herm_dim(d));
    let psi = LinMap::identity(d).matrix;
    let (out, pre) = arveson_extend(&theta, d, &psi, d, 100, 1e-12).unwrap();
    assert!(pre.theta_surjective);
    assert!(pre.theta_hits_interior);
    match out {
        ArvesonOutcome::Extended {
            residual,
            iterations,
            ref kraus,
            ..
        } => {
            assert!(residual < 1e-12, "residual {residual}");
            assert!(iterations <= 100);
            assert!(!kraus.ops.is_empty());
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn arveson_diagonal_subspace_extension() {
    // X = diagonal 2×2 matrices, Θ = inclusion, Ψ = the diagonal-restricted
    // identity into Her_2. The conditional expectation onto the diagonal
    // extends it; Dykstra must reach residual < 1e-9 within 5000 iterations.
    let d = 2;
    let theta = diagonal_inclusion(d);
    // Ψ maps the j-th diagonal unit to E_jj: coordinates of E_jj in Her_2.
    let psi = Mat::from_fn(herm_dim(d), d, |i, j| {
        if i == j {
            Rational::one()
        } else {
            Rational::zero()
        }
    });
    let (out, pre) = arveson_extend(&theta, d, &psi, d, 5000, 1e-9).unwrap();
    assert!(!pre.theta_surjective);
    assert!(pre.theta_hits_interior);
    match out {
        ArvesonOutcome::Extended {
            residual, ref phi, ..
        } => {
            assert!(residual < 1e-9, "residual {residual}");
            // The extension agrees with Ψ on the diagonal units.
            for j in 0..d {
                let mut unit = vec![Rational::zero(); herm_dim(d)];
                unit[j] = Rational::one();
                let img = phi.apply(&unit).unwrap();
                for (alpha, x) in img.iter().enumerate() {
                    let want = if alpha == j { 1.0 } else { 0.0 };
                    assert!((crate::scalar::to_f64(x) - want).abs() < 1e-7);
                }
            }
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn arveson_honest_undecided_on_infeasible_instance() {
    // Ψ maps the identity to a matrix with a negative eigenvalue: no CP
    // extension can exist, and the solver must plateau (never claiming No).
    let d = 2;
    // X spanned by I only.
    let theta = Mat::from_fn(herm_dim(d), 1, |i, _| {
        if i < d {
            Rational::one()
        } else {
            Rational::zero()
        }
    });
    // Ψ(I) = diag(1, −1): psi column is its coordinates.
    let psi = Mat::from_fn(herm_dim(d), 1, |i, _| match i {
        0 => Rational::one(),
        1 => -Rational::one(),
        _ => Rational::zero(),
    });
    let (out, _) = arveson_extend(&theta, d, &psi, d, 400, 1e-9).unwrap();
    match out {
        ArvesonOutcome::Undecided { residual, .. } => {
            assert!(residual > 1e-6, "infeasible instance must not converge");
        }
        ArvesonOutcome::Extended { .. } => {
            panic!("CP extension cannot exist: Ψ(I) is not psd")
        }
    }
}

use super::dd::DEFAULT_AMBIENT_CAP;
use super::*;
use crate::scalar::rat;

fn v(xs: &[i64]) -> Vec<Rational> {
    xs.iter().map(|&x| rat(x)).collect()
}

fn params() -> MemberParams {
    MemberParams::default()
}

fn assert_cone_equal(a: &ConeRep, b: &ConeRep) {
    match cone_equal(a, b, &params()).unwrap() {
        Verdict::Yes { .. } => {}
        other => panic!("cones differ: {other:?}\n a={a:?}\n b={b:?}"),
    }
}

#[test]
fn dual_of_orthant_is_orthant() {
    let orthant = ConeRep::poly_v(2, vec![v(&[1, 0]), v(&[0, 1])]);
    let dual = orthant.dual();
    assert_eq!(dual, ConeRep::poly_h(2, vec![v(&[1, 0]), v(&[0, 1])]));
    assert_cone_equal(&dual, &orthant);
}

#[test]
fn dual_of_lorentz_is_lorentz() {
    assert_eq!(ConeRep::Lorentz { d: 1 }.dual(), ConeRep::Lorentz { d: 1 });
    assert_eq!(ConeRep::Lorentz { d: 2 }.dual(), ConeRep::Lorentz { d: 2 });
}

#[test]
fn dual_of_square_cone_has_four_rays() {
    // C = cone{(1, ±1, ±1)}: C∨ = {a ≥ |b| + |c|} with extreme rays
    // (1, ±1, 0) and (1, 0, ±1); derived by double description and checked
    // by mutual containment.
    let square = ConeRep::poly_v(
        3,
        vec![v(&[1, 1, 1]), v(&[1, 1, -1]), v(&[1, -1, 1]), v(&[1, -1, -1])],
    );
    let dual_gens = square.dual().generators_with(DEFAULT_AMBIENT_CAP).unwrap().unwrap();
    let expect = ConeRep::poly_v(
        3,
        vec![v(&[1, 1, 0]), v(&[1, -1, 0]), v(&[1, 0, 1]), v(&[1, 0, -1])],
    );
    assert_eq!(dual_gens.len(), 4);
    assert_cone_equal(&ConeRep::poly_v(3, dual_gens), &expect);
}

#[test]
fn simplex_dual_basis() {
    let s = ConeRep::Simplex {
        basis: vec![v(&[2, 1]), v(&[1, 1])],
    };
    s.validate().unwrap();
    let d = s.dual();
    let ConeRep::Simplex { basis } = &d else {
        panic!()
    };
    // Dual basis pairs to the identity.
    let ConeRep::Simplex { basis: prim } = &s else {
        panic!()
    };
    for (i, b) in prim.iter().enumerate() {
        for (j, db) in basis.iter().enumerate() {
            let p = dot(b, db);
            assert_eq!(p, if i == j { rat(1) } else { rat(0) });
        }
    }
    // Double dual is the original.
    assert_eq!(d.dual(), s);
}

#[test]
fn member_orthant_with_certificates() {
    let orthant = ConeRep::poly_v(2, vec![v(&[1, 0]), v(&[0, 1])]);
    match orthant.member(&v(&[1, 2]), &params()).unwrap() {
        Verdict::Yes {
            certificate: Some(Certificate::Combination { coeffs, .. }),
            ..
        } => assert_eq!(coeffs, v(&[1, 2])),
        other => panic!("{other:?}"),
    }
    match orthant.member(&v(&[-1, 0]), &params()).unwrap() {
        Verdict::No {
            certificate: Some(Certificate::Separator { functional }),
            ..
        } => {
            assert!(dot(&functional, &v(&[-1, 0])).is_negative());
            assert!(!dot(&functional, &v(&[1, 0])).is_negative());
            assert!(!dot(&functional, &v(&[0, 1])).is_negative());
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn member_psd_two_by_two() {
    // vectorize([[2, 1], [1, 1]]) in the fixed basis: diag (2, 1), sym 1.
    let psd = ConeRep::Psd { d: 2 };
    let x = vec![rat(2), rat(1), rat(1), rat(0)];
    assert!(psd.member(&x, &params()).unwrap().is_yes());
    // [[1, 2], [2, 1]] is indefinite.
    let y = vec![rat(1), rat(1), rat(2), rat(0)];
    match psd.member(&y, &params()).unwrap() {
        Verdict::No {
            certificate: Some(Certificate::Separator { functional }),
            ..
        } => {
            assert!(dot(&functional, &y).is_negative());
            // The separator is nonnegative on psd elements, e.g. on I and
            // on [[1,1],[1,1]].
            assert!(!dot(&functional, &v(&[1, 1, 0, 0])).is_negative());
            assert!(!dot(&functional, &v(&[1, 1, 1, 0])).is_negative());
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn member_lorentz_exact() {
    let l = ConeRep::Lorentz { d: 2 };
    assert!(l.member(&v(&[5, 3, 4]), &params()).unwrap().is_yes());
    match l.member(&v(&[4, 3, 4]), &params()).unwrap() {
        Verdict::No {
            certificate: Some(Certificate::Separator { functional }),
            ..
        } => {
            // y ∈ L (squared form) and y(x) < 0, all rational.
            let t = &functional[0];
            let sq: Rational = functional[1..].iter().map(|a| a.clone() * a.clone()).sum();
            assert!(!t.is_negative());
            assert!(!(t.clone() * t.clone() - sq).is_negative());
            assert!(dot(&functional, &v(&[4, 3, 4])).is_negative());
        }
        other => panic!("{other:?}"),
    }
    // Negative t with zero spatial part.
    assert!(l.member(&v(&[-1, 0, 0]), &params()).unwrap().is_no());
    // Boundary: t = 0, x = 0 is inside.
    assert!(l.member(&v(&[0, 0, 0]), &params()).unwrap().is_yes());
    // t = 0 with x ≠ 0 is outside.
    assert!(l.member(&v(&[0, 1, 0]), &params()).unwrap().is_no());
}

#[test]
fn min_tensor_of_orthants_is_orthant() {
    let o2 = ConeRep::orthant_v(2);
    let t = min_tensor(&o2, &o2, DEFAULT_AMBIENT_CAP);
    let expect = ConeRep::orthant_v(4);
    assert_cone_equal(&t, &expect);
    let ConeRep::PolyV { generators, .. } = &t else {
        panic!()
    };
    assert_eq!(generators.len(), 4);
}

#[test]
fn max_tensor_of_orthants_is_orthant() {
    let o2 = ConeRep::orthant_v(2);
    let t = max_tensor(&o2, &o2, DEFAULT_AMBIENT_CAP);
    assert_cone_equal(&t, &ConeRep::orthant_v(4));
}

#[test]
fn min_tensor_unit_law() {
    let square = ConeRep::poly_v(
        3,
        vec![v(&[1, 1, 1]), v(&[1, 1, -1]), v(&[1, -1, 1]), v(&[1, -1, -1])],
    );
    let ray = ConeRep::poly_v(1, vec![v(&[1])]);
    let t = min_tensor(&square, &ray, DEFAULT_AMBIENT_CAP);
    assert_cone_equal(&t, &square);
}

#[test]
fn square_times_square_min_has_sixteen_extreme_rays() {
    let square = ConeRep::poly_v(
        3,
        vec![v(&[1, 1, 1]), v(&[1, 1, -1]), v(&[1, -1, 1]), v(&[1, -1, -1])],
    );
    let t = min_tensor(&square, &square, DEFAULT_AMBIENT_CAP);
    let ConeRep::PolyV { generators, .. } = &t else {
        panic!()
    };
    assert_eq!(generators.len(), 16);
    let kept = extreme_rays(generators).unwrap();
    assert_eq!(kept.len(), 16, "all sixteen product rays are extreme");
}

#[test]
fn square_min_max_strictness_witness() {
    // The maximally entangled state m_V ∈ C ⊗̄ C∨, pushed through the exact
    // isomorphism T(C∨) = C on the second factor, lies in the maximal
    // tensor product square ⊗̄ square but admits a separating functional
    // against the 16-generator minimal one.
    let square = ConeRep::poly_v(
        3,
        vec![v(&[1, 1, 1]), v(&[1, 1, -1]), v(&[1, -1, 1]), v(&[1, -1, -1])],
    );
    // T maps the dual square cone's rays (1,±1,0), (1,0,±1) onto the
    // square's rays (1,±1,±1).
    let t = crate::linalg::Mat::from_rows(vec![v(&[1, 0, 0]), v(&[0, 1, -1]), v(&[0, 1, 1])]);
    let mut m = vec![Rational::zero(); 9];
    for i in 0..3 {
        let mut e = vec![Rational::zero(); 3];
        e[i] = rat(1);
        let te = t.matvec(&e);
        for j in 0..3 {
            m[i * 3 + j] = te[j].clone();
        }
    }
    let maxt = max_tensor(&square, &square, DEFAULT_AMBIENT_CAP);
    let mint = min_tensor(&square, &square, DEFAULT_AMBIENT_CAP);
    assert!(maxt.member(&m, &params()).unwrap().is_yes());
    match mint.member(&m, &params()).unwrap() {
        Verdict::No {
            certificate: Some(Certificate::Separator { functional }),
            ..
        } => {
            assert!(dot(&functional, &m).is_negative());
        }
        other => panic!("expected strictness separator: {other:?}"),
    }
}

#[test]
fn max_ent_in_max_tensor_with_dual() {
    // m_V ∈ D ⊗̄ D∨ for a polyhedral D, via the closed-form lemma with
    // exact slacks.
    let square = ConeRep::poly_v(
        3,
        vec![v(&[1, 1, 1]), v(&[1, 1, -1]), v(&[1, -1, 1]), v(&[1, -1, -1])],
    );
    let node = ConeRep::max_tensor_node(square.clone(), square.dual());
    let mut m_v = vec![Rational::zero(); 9];
    for i in 0..3 {
        m_v[i * 3 + i] = Rational::one();
    }
    match node.member(&m_v, &params()).unwrap() {
        Verdict::Yes {
            oracle,
            certificate: Some(Certificate::MaxEntLemma { slacks }),
        } => {
            assert_eq!(oracle, "max-ent-lemma");
            assert!(!slacks.is_empty());
            assert!(slacks.iter().all(|s| !s.is_negative()));
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn extreme_rays_drops_interior_sum() {
    let gens = vec![v(&[1, 0]), v(&[0, 1]), v(&[1, 1])];
    let kept = extreme_rays(&gens).unwrap();
    assert_eq!(kept, vec![v(&[1, 0]), v(&[0, 1])]);
    // A simplex basis is untouched.
    let basis = vec![v(&[2, 1]), v(&[1, 1])];
    assert_eq!(extreme_rays(&basis).unwrap().len(), 2);
}

#[test]
fn contains_halfplane_and_strictness() {
    let orthant = ConeRep::orthant_v(2);
    let halfplane = ConeRep::poly_h(2, vec![v(&[1, 1])]);
    assert!(cone_contains(&halfplane, &orthant, &params()).unwrap().is_yes());
    match cone_contains(&orthant, &halfplane, &params()).unwrap() {
        Verdict::No { certificate, .. } => assert!(certificate.is_some()),
        other => panic!("{other:?}"),
    }
}

#[test]
fn biduality_round_trip_random_cones() {
    // dual(dual(C)) = C for pseudo-random PolyV cones, via an explicit
    // double-description round trip and exact mutual containment.
    let mut state = 0x1234_5678_u64;
    let mut next = |m: i64| {
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        ((state >> 33) as i64).rem_euclid(2 * m + 1) - m
    };
    for n in 2..=4usize {
        for _case in 0..5 {
            let gens: Vec<Vec<Rational>> = (0..n + 2)
                .map(|_| (0..n).map(|_| rat(next(3))).collect())
                .collect();
            if gens.iter().all(|g| g.iter().all(|x| x.is_zero())) {
                continue;
            }
            let c = ConeRep::poly_v(n, gens);
            let dual_gens = c.dual().generators_with(DEFAULT_AMBIENT_CAP).unwrap().unwrap();
            let bidual_gens = ConeRep::poly_v(n, dual_gens)
                .dual()
                .generators_with(DEFAULT_AMBIENT_CAP)
                .unwrap()
                .unwrap();
            assert_cone_equal(&ConeRep::poly_v(n, bidual_gens), &c);
        }
    }
}

#[test]
fn duality_swaps_min_and_max() {
    // dual(C ⊗̲ D) = C∨ ⊗̄ D∨ as cones, exactly.
    let c = ConeRep::poly_v(2, vec![v(&[1, 0]), v(&[1, 2])]);
    let d = ConeRep::poly_v(2, vec![v(&[0, 1]), v(&[3, -1])]);
    let mint = min_tensor(&c, &d, DEFAULT_AMBIENT_CAP);
    let lhs_gens = mint.dual().generators_with(DEFAULT_AMBIENT_CAP).unwrap().unwrap();
    let lhs = ConeRep::poly_v(4, lhs_gens);
    let rhs = max_tensor(&c.dual(), &d.dual(), DEFAULT_AMBIENT_CAP);
    assert_cone_equal(&lhs, &rhs);
}

#[test]
fn simplex_collapse() {
    // S ⊗̲ C = S ⊗̄ C for a simplex factor.
    let s = ConeRep::Simplex {
        basis: vec![v(&[1, 1]), v(&[0, 1])],
    };
    let c = ConeRep::poly_v(
        3,
        vec![v(&[1, 1, 1]), v(&[1, 1, -1]), v(&[1, -1, 1]), v(&[1, -1, -1])],
    );
    let mint = min_tensor(&s, &c, DEFAULT_AMBIENT_CAP);
    let maxt = max_tensor(&s, &c, DEFAULT_AMBIENT_CAP);
    assert_cone_equal(&mint, &maxt);
}

#[test]
fn interior_point_of_polyhedral_cones() {
    let orthant = ConeRep::orthant_v(3);
    let u = orthant.interior_point(DEFAULT_AMBIENT_CAP).unwrap().unwrap();
    assert!(u.iter().all(|x| x.is_positive()));
    // A ray in R^2 has empty interior.
    let ray = ConeRep::poly_v(2, vec![v(&[1, 0])]);
    assert!(ray.interior_point(DEFAULT_AMBIENT_CAP).unwrap().is_none());
}

#[test]
fn cone_json_round_trip() {
    let c = ConeRep::min_tensor_node(
        ConeRep::poly_v(2, vec![v(&[1, 0]), v(&[1, 2])]),
        ConeRep::Psd { d: 2 },
    );
    let json = serde_json::to_string(&c).unwrap();
    assert!(json.contains("\"kind\":\"min_tensor\""));
    assert!(json.contains("\"kind\":\"psd\""));
    let back: ConeRep = serde_json::from_str(&json).unwrap();
    assert_eq!(back, c);
}

//! Exact rational linear programming: dense two-phase simplex with Bland's
//! anti-cycling rule. Every outcome carries an exactly verifiable
//! certificate — a feasible point, an optimal basis, an improving ray, or a
//! Farkas vector — and [`verify_farkas`] replays the infeasibility proof.

use crate::linalg::Mat;
use crate::scalar::Rational;
use crate::{Error, Result};
use num_traits::{Signed, Zero};

/// A linear program over {x : Ax = b, x ≥ 0}: pure feasibility when
/// `objective` is `None`, otherwise minimize cᵀx.
#[derive(Clone, Debug)]
pub struct LpProblem {
    pub a: Mat<Rational>,
    pub b: Vec<Rational>,
    pub objective: Option<Vec<Rational>>,
}

#[derive(Clone, Debug)]
pub enum LpOutcome {
    /// Ax = b, x ≥ 0 exactly (feasibility sense).
    Feasible { x: Vec<Rational> },
    /// Optimal solution and value (optimization sense).
    Optimal { x: Vec<Rational>, value: Rational },
    /// Feasible problem with an improving ray: A·ray = 0, ray ≥ 0, cᵀray < 0.
    Unbounded {
        x: Vec<Rational>,
        ray: Vec<Rational>,
    },
    /// Farkas certificate: yᵀA ≤ 0 and yᵀb > 0.
    Infeasible { farkas: Vec<Rational> },
}

/// Replays a Farkas certificate: yᵀA ≤ 0 componentwise and yᵀb > 0.
pub fn verify_farkas(a: &Mat<Rational>, b: &[Rational], y: &[Rational]) -> bool {
    if y.len() != a.rows() || b.len() != a.rows() {
        return false;
    }
    for j in 0..a.cols() {
        let mut s = Rational::zero();
        for i in 0..a.rows() {
            s += y[i].clone() * a[(i, j)].clone();
        }
        if s.is_positive() {
            return false;
        }
    }
    let mut yb = Rational::zero();
    for i in 0..a.rows() {
        yb += y[i].clone() * b[i].clone();
    }
    yb.is_positive()
}

/// Exact simplex over {x : Ax = b, x ≥ 0}.
///
/// Phase 1 minimizes the sum of artificial variables; a positive optimum
/// yields the Farkas vector y = c_Bᵀ·B⁻¹ read off the artificial columns.
/// Bland's rule (smallest eligible index both for entering and leaving)
/// guarantees termination. Phase 2 runs only when an objective is given.
pub fn lp_solve(p: &LpProblem) -> Result<LpOutcome> {
    let m = p.a.rows();
    let n = p.a.cols();
    if p.b.len() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            got: p.b.len(),
        });
    }
    if let Some(c) = &p.objective {
        if c.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: c.len(),
            });
        }
    }

    // Orient rows so the right-hand side is nonnegative; remember signs to
    // map the Farkas vector back to the caller's orientation.
    let mut signs = vec![false; m]; // true = flipped
    let mut tab = Mat::zeros(m, n + m + 1);
    for i in 0..m {
        let flip = p.b[i].is_negative();
        signs[i] = flip;
        for j in 0..n {
            let v = p.a[(i, j)].clone();
            tab[(i, j)] = if flip { -v } else { v };
        }
        tab[(i, n + i)] = Rational::from_integer(1.into());
        let rhs = p.b[i].clone();
        tab[(i, n + m)] = if flip { -rhs } else { rhs };
    }
    let mut basis: Vec<usize> = (0..m).map(|i| n + i).collect();
    let rhs_col = n + m;

    // Phase 1: cost 1 on artificials.
    let phase1_cost = |j: usize| -> Rational {
        if j >= n {
            Rational::from_integer(1.into())
        } else {
            Rational::zero()
        }
    };
    simplex_loop(&mut tab, &mut basis, rhs_col, n + m, &phase1_cost)?;

    let mut value = Rational::zero();
    for (i, &bj) in basis.iter().enumerate() {
        if bj >= n {
            value += tab[(i, rhs_col)].clone();
        }
    }
    if value.is_positive() {
        // y' = c_Bᵀ B⁻¹ sits in the artificial columns; un-flip rows.
        let mut y = vec![Rational::zero(); m];
        for (i, &bj) in basis.iter().enumerate() {
            if bj >= n {
                for k in 0..m {
                    y[k] += tab[(i, n + k)].clone();
                }
            }
        }
        for (k, flipped) in signs.iter().enumerate() {
            if *flipped {
                y[k] = -y[k].clone();
            }
        }
        debug_assert!(verify_farkas(&p.a, &p.b, &y));
        return Ok(LpOutcome::Infeasible { farkas: y });
    }

    // Drive artificials out of the basis; rows that cannot pivot on a
    // structural column are redundant and are blanked out.
    for i in 0..m {
        if basis[i] >= n {
            debug_assert!(tab[(i, rhs_col)].is_zero());
            if let Some(j) = (0..n).find(|&j| !tab[(i, j)].is_zero()) {
                pivot(&mut tab, &mut basis, i, j);
            } else {
                for j in 0..=rhs_col {
                    tab[(i, j)] = Rational::zero();
                }
            }
        }
    }

    let read_x = |tab: &Mat<Rational>, basis: &[usize]| -> Vec<Rational> {
        let mut x = vec![Rational::zero(); n];
        for (i, &bj) in basis.iter().enumerate() {
            if bj < n {
                x[bj] = tab[(i, rhs_col)].clone();
            }
        }
        x
    };

    let Some(c) = &p.objective else {
        return Ok(LpOutcome::Feasible {
            x: read_x(&tab, &basis),
        });
    };

    // Phase 2 over structural columns only.
    let phase2_cost = |j: usize| -> Rational {
        if j < n {
            c[j].clone()
        } else {
            Rational::zero()
        }
    };
    match simplex_loop(&mut tab, &mut basis, rhs_col, n, &phase2_cost)? {
        LoopEnd::Optimal => {
            let x = read_x(&tab, &basis);
            let mut value = Rational::zero();
            for j in 0..n {
                value += c[j].clone() * x[j].clone();
            }
            Ok(LpOutcome::Optimal { x, value })
        }
        LoopEnd::Unbounded { entering } => {
            let mut ray = vec![Rational::zero(); n];
            ray[entering] = Rational::from_integer(1.into());
            for (i, &bj) in basis.iter().enumerate() {
                if bj < n {
                    ray[bj] = -tab[(i, entering)].clone();
                }
            }
            Ok(LpOutcome::Unbounded {
                x: read_x(&tab, &basis),
                ray,
            })
        }
    }
}

enum LoopEnd {
    Optimal,
    Unbounded { entering: usize },
}

/// Runs Bland-rule simplex iterations over columns `0..col_limit` with the
/// given cost function, until no reduced cost is negative (Optimal) or an
/// entering column has no blocking row (Unbounded).
fn simplex_loop(
    tab: &mut Mat<Rational>,
    basis: &mut [usize],
    rhs_col: usize,
    col_limit: usize,
    cost: &dyn Fn(usize) -> Rational,
) -> Result<LoopEnd> {
    let m = tab.rows();
    loop {
        // Reduced cost rc_j = c_j − Σ_i c_{basis i}·T[i, j]; Bland entering =
        // smallest j with rc_j < 0.
        let mut entering = None;
        for j in 0..col_limit {
            if basis.contains(&j) {
                continue;
            }
            let mut rc = cost(j);
            for i in 0..m {
                let cb = cost(basis[i]);
                if !cb.is_zero() && !tab[(i, j)].is_zero() {
                    rc -= cb * tab[(i, j)].clone();
                }
            }
            if rc.is_negative() {
                entering = Some(j);
                break;
            }
        }
        let Some(enter) = entering else {
            return Ok(LoopEnd::Optimal);
        };

        // Ratio test; ties broken by smallest basis variable index (Bland).
        let mut leave: Option<(usize, Rational)> = None;
        for i in 0..m {
            if tab[(i, enter)].is_positive() {
                let ratio = tab[(i, rhs_col)].clone() / tab[(i, enter)].clone();
                match &leave {
                    None => leave = Some((i, ratio)),
                    Some((li, lr)) => {
                        if ratio < *lr || (ratio == *lr && basis[i] < basis[*li]) {
                            leave = Some((i, ratio));
                        }
                    }
                }
            }
        }
        let Some((leave_row, _)) = leave else {
            return Ok(LoopEnd::Unbounded { entering: enter });
        };
        pivot(tab, basis, leave_row, enter);
    }
}

fn pivot(tab: &mut Mat<Rational>, basis: &mut [usize], row: usize, col: usize) {
    let cols = tab.cols();
    let inv = tab[(row, col)].clone().recip();
    for j in 0..cols {
        tab[(row, j)] = tab[(row, j)].clone() * inv.clone();
    }
    for i in 0..tab.rows() {
        if i != row && !tab[(i, col)].is_zero() {
            let f = tab[(i, col)].clone();
            for j in 0..cols {
                let t = f.clone() * tab[(row, j)].clone();
                tab[(i, j)] = tab[(i, j)].clone() - t;
            }
        }
    }
    basis[row] = col;
}

/// Membership of x in cone(generators), solved exactly: either nonnegative
/// coefficients with Σ λ_i·g_i = x, or a functional y with y(g_i) ≥ 0 for
/// every generator and y(x) < 0.
#[derive(Clone, Debug)]
pub enum ConeMembership {
    Inside { coeffs: Vec<Rational> },
    Outside { separator: Vec<Rational> },
}

pub fn cone_membership(generators: &[Vec<Rational>], x: &[Rational]) -> Result<ConeMembership> {
    let ambient = x.len();
    for g in generators {
        if g.len() != ambient {
            return Err(Error::DimensionMismatch {
                expected: ambient,
                got: g.len(),
            });
        }
    }
    // Deduplicate identical (row, rhs) pairs and drop all-zero rows; the
    // Farkas vector lifts back with zeros on the removed rows. This keeps
    // the tensor-power cones (many repeated coordinate patterns) tractable.
    let mut kept: Vec<usize> = Vec::new();
    let mut seen: std::collections::HashMap<Vec<String>, usize> = std::collections::HashMap::new();
    for i in 0..ambient {
        let mut key: Vec<String> = generators.iter().map(|g| g[i].to_string()).collect();
        key.push(x[i].to_string());
        if key.iter().all(|s| s == "0") {
            continue;
        }
        if !seen.contains_key(&key) {
            seen.insert(key, i);
            kept.push(i);
        }
    }
    let a = Mat::from_fn(kept.len(), generators.len(), |r, c| {
        generators[c][kept[r]].clone()
    });
    let b: Vec<Rational> = kept.iter().map(|&i| x[i].clone()).collect();
    match lp_solve(&LpProblem {
        a,
        b,
        objective: None,
    })? {
        LpOutcome::Feasible { x: coeffs } => Ok(ConeMembership::Inside { coeffs }),
        LpOutcome::Infeasible { farkas } => {
            let mut sep = vec![Rational::zero(); ambient];
            for (r, &i) in kept.iter().enumerate() {
                sep[i] = -farkas[r].clone();
            }
            Ok(ConeMembership::Outside { separator: sep })
        }
        _ => unreachable!("feasibility solve returned an optimization outcome"),
    }
}

/// Mixed-form conic feasibility: find z (free) with A_eq·z = b_eq and
/// A_in·z ≥ b_in. Infeasibility is certified by multipliers (u, v ≥ 0) with
/// uᵀA_eq + vᵀA_in = 0 and uᵀb_eq + vᵀb_in > 0.
#[derive(Clone, Debug)]
pub struct ConicProblem {
    pub a_eq: Mat<Rational>,
    pub b_eq: Vec<Rational>,
    pub a_in: Mat<Rational>,
    pub b_in: Vec<Rational>,
}

#[derive(Clone, Debug)]
pub enum ConicOutcome {
    Feasible {
        z: Vec<Rational>,
    },
    Infeasible {
        eq_mult: Vec<Rational>,
        ineq_mult: Vec<Rational>,
    },
}

pub fn conic_feasibility(p: &ConicProblem) -> Result<ConicOutcome> {
    let n = if p.a_eq.rows() > 0 {
        p.a_eq.cols()
    } else {
        p.a_in.cols()
    };
    let (me, mi) = (p.a_eq.rows(), p.a_in.rows());
    if mi > 0 && p.a_in.cols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: p.a_in.cols(),
        });
    }
    // Standard form over (u, v, s) ≥ 0 with z = u − v:
    //   A_eq·u − A_eq·v           = b_eq
    //   A_in·u − A_in·v − s       = b_in
    let a = Mat::from_fn(me + mi, 2 * n + mi, |i, j| {
        if i < me {
            if j < n {
                p.a_eq[(i, j)].clone()
            } else if j < 2 * n {
                -p.a_eq[(i, j - n)].clone()
            } else {
                Rational::zero()
            }
        } else {
            let r = i - me;
            if j < n {
                p.a_in[(r, j)].clone()
            } else if j < 2 * n {
                -p.a_in[(r, j - n)].clone()
            } else if j - 2 * n == r {
                -Rational::from_integer(1.into())
            } else {
                Rational::zero()
            }
        }
    });
    let mut b = p.b_eq.clone();
    b.extend(p.b_in.iter().cloned());
    match lp_solve(&LpProblem {
        a,
        b,
        objective: None,
    })? {
        LpOutcome::Feasible { x } => {
            let z: Vec<Rational> = (0..n).map(|j| x[j].clone() - x[n + j].clone()).collect();
            Ok(ConicOutcome::Feasible { z })
        }
        LpOutcome::Infeasible { farkas } => {
            // y = (u, −v'): columns force uᵀA_eq + vᵀA_in = 0 and v ≥ 0
            // after negation of the slack block condition.
            let eq_mult: Vec<Rational> = farkas[..me].to_vec();
            let ineq_mult: Vec<Rational> = farkas[me..].to_vec();
            Ok(ConicOutcome::Infeasible {
                eq_mult,
                ineq_mult,
            })
        }
        _ => unreachable!("feasibility solve returned an optimization outcome"),
    }
}

/// Replays an infeasibility certificate for a mixed-form conic problem.
pub fn verify_obstruction(
    p: &ConicProblem,
    eq_mult: &[Rational],
    ineq_mult: &[Rational],
) -> bool {
    if eq_mult.len() != p.a_eq.rows() || ineq_mult.len() != p.a_in.rows() {
        return false;
    }
    if ineq_mult.iter().any(|v| v.is_negative()) {
        return false;
    }
    let n = if p.a_eq.rows() > 0 {
        p.a_eq.cols()
    } else {
        p.a_in.cols()
    };
    for j in 0..n {
        let mut s = Rational::zero();
        for i in 0..p.a_eq.rows() {
            s += eq_mult[i].clone() * p.a_eq[(i, j)].clone();
        }
        for i in 0..p.a_in.rows() {
            s += ineq_mult[i].clone() * p.a_in[(i, j)].clone();
        }
        if !s.is_zero() {
            return false;
        }
    }
    let mut val = Rational::zero();
    for i in 0..p.a_eq.rows() {
        val += eq_mult[i].clone() * p.b_eq[i].clone();
    }
    for i in 0..p.a_in.rows() {
        val += ineq_mult[i].clone() * p.b_in[i].clone();
    }
    val.is_positive()
}

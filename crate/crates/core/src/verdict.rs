//! Three-valued verdicts with machine-checkable certificates.
//!
//! Decision problems that are hard in general never bluff: `Yes` and `No`
//! carry evidence that can be replayed independently of the solver that
//! produced it, and `Unknown` carries the reason the budget ran out. The
//! `oracle` field records which decision path produced the answer (exact LP,
//! PPT criterion, decomposition search, ...).

use crate::scalar::Rational;
use serde::{Deserialize, Serialize};

/// Outcome of a decision problem.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    Yes {
        oracle: String,
        certificate: Option<Certificate>,
    },
    No {
        oracle: String,
        certificate: Option<Certificate>,
    },
    Unknown {
        reason: String,
    },
}

impl Verdict {
    pub fn yes(oracle: impl Into<String>, certificate: Certificate) -> Self {
        Verdict::Yes {
            oracle: oracle.into(),
            certificate: Some(certificate),
        }
    }

    pub fn no(oracle: impl Into<String>, certificate: Certificate) -> Self {
        Verdict::No {
            oracle: oracle.into(),
            certificate: Some(certificate),
        }
    }

    pub fn unknown(reason: impl Into<String>) -> Self {
        Verdict::Unknown {
            reason: reason.into(),
        }
    }

    pub fn is_yes(&self) -> bool {
        matches!(self, Verdict::Yes { .. })
    }

    pub fn is_no(&self) -> bool {
        matches!(self, Verdict::No { .. })
    }

    pub fn is_unknown(&self) -> bool {
        matches!(self, Verdict::Unknown { .. })
    }

    pub fn certificate(&self) -> Option<&Certificate> {
        match self {
            Verdict::Yes { certificate, .. } | Verdict::No { certificate, .. } => {
                certificate.as_ref()
            }
            Verdict::Unknown { .. } => None,
        }
    }
}

/// Machine-checkable evidence. Exact variants carry rationals and re-verify
/// with zero tolerance; numeric variants carry floats and re-verify against
/// the tolerance stored alongside them in the run report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Certificate {
    /// x = Σ λ_i·atom_i with λ ≥ 0: membership in a finitely generated cone.
    Combination {
        #[serde(with = "crate::scalar::rat_vec_str")]
        coeffs: Vec<Rational>,
        #[serde(with = "crate::scalar::rat_mat_str")]
        atoms: Vec<Vec<Rational>>,
    },
    /// Functional with y(C) ≥ 0 and y(x) < 0: non-membership.
    Separator {
        #[serde(with = "crate::scalar::rat_vec_str")]
        functional: Vec<Rational>,
    },
    /// Halfspace (or closed-form) slack values, all required nonnegative.
    Slacks {
        #[serde(with = "crate::scalar::rat_vec_str")]
        values: Vec<Rational>,
    },
    /// Exact psd witness: permuted LDLᵀ factorization with nonnegative pivots.
    PsdFactor {
        perm: Vec<usize>,
        #[serde(with = "crate::scalar::rat_vec_str")]
        diag: Vec<Rational>,
        #[serde(with = "crate::scalar::rat_mat_str")]
        lower: Vec<Vec<Rational>>,
    },
    /// LP infeasibility: yᵀA ≤ 0 and yᵀb > 0.
    Farkas {
        #[serde(with = "crate::scalar::rat_vec_str")]
        y: Vec<Rational>,
    },
    /// Float conic combination: ‖x − Σ λ_i·atom_i‖ ≤ tol with λ ≥ 0.
    CombinationF64 {
        coeffs: Vec<f64>,
        atoms: Vec<Vec<f64>>,
        residual: f64,
    },
    /// Kraus operators (complex t×d, flattened row-major real/imag pairs).
    Kraus {
        cod: usize,
        dom: usize,
        ops_re: Vec<Vec<f64>>,
        ops_im: Vec<Vec<f64>>,
    },
    /// Hermitian-form witness: ⟨x, C·x⟩ = value < 0 for the complex vector
    /// x = re + i·im in the coordinates of the ambient Choi space.
    NegativeForm {
        vec_re: Vec<f64>,
        vec_im: Vec<f64>,
        value: f64,
    },
    /// Unit product vectors v ⊗ w with (v⊗w)*·M·(v⊗w) = value < 0.
    ProductWitness {
        v_re: Vec<f64>,
        v_im: Vec<f64>,
        w_re: Vec<f64>,
        w_im: Vec<f64>,
        value: f64,
    },
    /// k-positivity violation: psd input (as coordinates) whose image under
    /// Ψ⊗id has ⟨z, out·z⟩ = value < 0.
    SchmidtWitness {
        input_coords: Vec<f64>,
        out_re: Vec<f64>,
        out_im: Vec<f64>,
        value: f64,
        k: usize,
    },
    /// Separable decomposition M ≈ Σ w_i·(A_i ⊗ B_i) within `residual`.
    SeparableDecomposition {
        weights: Vec<f64>,
        left_coords: Vec<Vec<f64>>,
        right_coords: Vec<Vec<f64>>,
        residual: f64,
    },
    /// Block-positivity witness: M = P + PT(Q) with P, Q psd within `residual`.
    BlockPosDecomposition {
        p_coords: Vec<f64>,
        q_coords: Vec<f64>,
        residual: f64,
    },
    /// Extension map with verification residual (0 in exact mode).
    Extension {
        #[serde(with = "crate::scalar::rat_mat_str")]
        matrix: Vec<Vec<Rational>>,
        residual: f64,
    },
    /// Obstruction functional for an extension problem: multipliers for the
    /// equality block and nonnegative multipliers for the inequality block.
    Obstruction {
        #[serde(with = "crate::scalar::rat_vec_str")]
        eq_multipliers: Vec<Rational>,
        #[serde(with = "crate::scalar::rat_vec_str")]
        ineq_multipliers: Vec<Rational>,
    },
    /// Functional in the dual system certifying exclusion from a generated
    /// system: value = φ(x) < 0, and applying each generator to φ lands in
    /// the intrinsic cone with the recorded psd margin.
    DualFunctional {
        functional: Vec<f64>,
        value: f64,
        psd_margins: Vec<f64>,
    },
    /// The maximally entangled state lies in D ⊗̄ D∨ by the closed form;
    /// the halfspace slacks are attached when D is polyhedral.
    MaxEntLemma {
        #[serde(with = "crate::scalar::rat_vec_str")]
        slacks: Vec<Rational>,
    },
}

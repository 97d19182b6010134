//! Input file schemas and parsing with field-level diagnostics.
//!
//! All files are JSON; rationals are strings "p/q" (or "p") so that exact
//! data never passes through float parsing. Schemas:
//!
//! - cone: `{"kind": "poly_v"|"poly_h"|"simplex"|"lorentz"|"psd"|"psd_tensor"
//!   |"min_tensor"|"max_tensor", "ambient": n, "generators"/"halfspaces":
//!   [["p/q", ...]], "basis": [[...]], "d": n, "sides": [..],
//!   "left"/"right": {...}}`
//! - vector: `{"vector": ["p/q", ...]}`
//! - map: `{"dom_d": d, "cod_d": t, "matrix": [["p/q", ...], ...]}` with t²
//!   rows of d² entries in the documented Hermitian basis order
//! - system: `{"stem": "simplex"|"operator"|"tft", "m": dimV,
//!   "base_dim": n, "base_cone": {...}, "mode": "min"|"max"|"generated",
//!   "generators": [{"level": s, "element": [...]}], "levels": [...]}`
//! - matrix: `{"matrix": [["p/q", ...], ...]}`
//! - extension problems: see the `extend` subcommand help strings.

use conekit::cones::ConeRep;
use conekit::cpmaps::LinMap;
use conekit::linalg::Mat;
use conekit::scalar::Rational;
use conekit::systems::SystemSpec;
use serde::{Deserialize, Serialize};
use std::path::Path;

/// Input error with a file and location diagnostic; maps to exit code 3.
#[derive(Debug)]
pub struct InputError {
    pub path: String,
    pub message: String,
}

impl std::fmt::Display for InputError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

impl std::error::Error for InputError {}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, InputError> {
    let text = std::fs::read_to_string(path).map_err(|e| InputError {
        path: path.display().to_string(),
        message: format!("cannot read: {e}"),
    })?;
    serde_json::from_str(&text).map_err(|e| InputError {
        path: path.display().to_string(),
        message: format!("line {}, column {}: {}", e.line(), e.column(), e),
    })
}

/// Parsed input plus its canonical digest and re-embeddable content.
pub struct LoadedInput<T> {
    pub value: T,
    pub content: serde_json::Value,
    pub digest: String,
}

pub fn load<T>(path: &Path) -> Result<LoadedInput<T>, InputError>
where
    T: serde::de::DeserializeOwned + Serialize,
{
    let value: T = read_json(path)?;
    let content = serde_json::to_value(&value).map_err(|e| InputError {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    let digest = canonical_digest(&content);
    Ok(LoadedInput {
        value,
        content,
        digest,
    })
}

/// Digest over the canonical (compact, struct-ordered) serialization of the
/// parsed content, so replay can re-derive it from the embedded copy.
pub fn canonical_digest(content: &serde_json::Value) -> String {
    use sha2::{Digest, Sha256};
    let bytes = serde_json::to_vec(content).expect("serializable content");
    let hash = Sha256::digest(&bytes);
    hash.iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VectorInput {
    #[serde(with = "conekit::scalar::rat_vec_str")]
    pub vector: Vec<Rational>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MatrixInput {
    #[serde(with = "conekit::scalar::rat_mat_str")]
    pub matrix: Vec<Vec<Rational>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MapInput {
    pub dom_d: usize,
    pub cod_d: usize,
    #[serde(with = "conekit::scalar::rat_mat_str")]
    pub matrix: Vec<Vec<Rational>>,
}

impl MapInput {
    pub fn to_map(&self) -> Result<LinMap, conekit::Error> {
        LinMap::new(
            self.dom_d,
            self.cod_d,
            Mat::from_rows(self.matrix.clone()),
        )
    }

    pub fn from_map(m: &LinMap) -> Self {
        MapInput {
            dom_d: m.dom,
            cod_d: m.cod,
            matrix: (0..m.matrix.rows())
                .map(|i| m.matrix.row(i).to_vec())
                .collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RieszProblem {
    pub cone: ConeRep,
    #[serde(with = "conekit::scalar::rat_mat_str")]
    pub u_basis: Vec<Vec<Rational>>,
    #[serde(with = "conekit::scalar::rat_vec_str")]
    pub psi: Vec<Rational>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VectorRieszProblem {
    pub c: ConeRep,
    pub d: ConeRep,
    #[serde(with = "conekit::scalar::rat_mat_str")]
    pub u_basis: Vec<Vec<Rational>>,
    #[serde(with = "conekit::scalar::rat_mat_str")]
    pub psi_images: Vec<Vec<Rational>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GroupRepInput {
    /// Group elements as n×n rational matrices, paired by index with the
    /// other representation.
    pub elements: Vec<Vec<Vec<String>>>,
    pub cone: ConeRep,
}

impl GroupRepInput {
    pub fn elements_exact(&self) -> Result<Vec<Mat<Rational>>, String> {
        self.elements
            .iter()
            .map(|rows| {
                let parsed: Result<Vec<Vec<Rational>>, String> = rows
                    .iter()
                    .map(|r| {
                        r.iter()
                            .map(|s| {
                                conekit::scalar::parse_rational(s)
                                    .ok_or_else(|| format!("invalid rational '{s}'"))
                            })
                            .collect()
                    })
                    .collect();
                Ok(Mat::from_rows(parsed?))
            })
            .collect()
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct InvariantProblem {
    pub rep_in: GroupRepInput,
    pub rep_out: GroupRepInput,
    #[serde(with = "conekit::scalar::rat_mat_str")]
    pub u_basis: Vec<Vec<Rational>>,
    #[serde(with = "conekit::scalar::rat_mat_str")]
    pub psi_images: Vec<Vec<Rational>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ArvesonProblem {
    /// Domain side d of the realization target Her_d.
    pub d: usize,
    /// Codomain side t.
    pub t: usize,
    /// Θ as a d²×n matrix (columns span the realized subspace).
    #[serde(with = "conekit::scalar::rat_mat_str")]
    pub theta: Vec<Vec<Rational>>,
    /// Ψ as a t²×n matrix on the same domain.
    #[serde(with = "conekit::scalar::rat_mat_str")]
    pub psi: Vec<Vec<Rational>>,
    #[serde(default = "default_iters")]
    pub iters: usize,
}

fn default_iters() -> usize {
    5000
}

/// A `sys op` request bundling the operation with its operands.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SystemOpProblem {
    pub op: SystemOpKind,
    pub first: SystemSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub second: Option<SystemSpec>,
    /// Base-space map for image/preimage, as a rational matrix.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub map: Option<MatrixInput>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SystemOpKind {
    Sum,
    Intersect,
    DirectSum,
    Image,
    Preimage,
}

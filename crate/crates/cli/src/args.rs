//! Command-line definitions. Every run is reproducible from its inputs,
//! flags and seed; reports land on stdout or at --out.

use clap::{Parser, Subcommand, ValueEnum};
use std::path::PathBuf;

const LONG_ABOUT: &str = "\
Exact and certificate-producing computations with convex cones, conic \
systems, completely positive maps, and extension problems.

Exit codes: 0 = Yes/true, 1 = No/false, 2 = Unknown, 3 = input error.

Input schemas (JSON, rationals as strings \"p/q\"):
  cone    {\"kind\":\"poly_v\"|\"poly_h\"|\"simplex\"|\"lorentz\"|\"psd\"|\
\"psd_tensor\"|\"min_tensor\"|\"max_tensor\", \"ambient\":n, \
\"generators\"/\"halfspaces\":[[..]], \"basis\":[[..]], \"d\":n, \
\"sides\":[..], \"left\"/\"right\":{..}}
  vector  {\"vector\":[\"1\",\"1/2\",..]}
  map     {\"dom_d\":d, \"cod_d\":t, \"matrix\":[[..t²×d²..]]}
  system  {\"stem\":\"simplex\"|\"operator\"|\"tft\", \"m\":dimV, \
\"base_dim\":n, \"base_cone\":{..}, \"mode\":\"min\"|\"max\"|\"generated\", \
\"generators\":[{\"level\":s,\"element\":[..]}], \"levels\":[..]}
  riesz   {\"cone\":{..}, \"u_basis\":[[..]], \"psi\":[..]}
  vector riesz {\"c\":{..}, \"d\":{..}, \"u_basis\":[[..]], \"psi_images\":[[..]]}
  invariant {\"rep_in\":{\"elements\":[[[..]]],\"cone\":{..}}, \"rep_out\":{..}, \
\"u_basis\":[[..]], \"psi_images\":[[..]]}
  arveson {\"d\":2, \"t\":2, \"theta\":[[..]], \"psi\":[[..]], \"iters\":5000}
  sys op  {\"op\":\"sum\"|\"intersect\"|\"direct_sum\"|\"image\"|\"preimage\", \
\"first\":{system}, \"second\":{system}, \"map\":{\"matrix\":[[..]]}}

The environment variable CONEKIT_THREADS caps internal parallelism.";

#[derive(Parser, Debug)]
#[command(name = "conekit", version, about = "Convex cones, conic systems and completely positive maps with certificates", long_about = LONG_ABOUT)]
pub struct Cli {
    #[command(subcommand)]
    pub cmd: Cmd,

    /// Exact rational arithmetic wherever the operands allow it (default).
    #[arg(long, global = true)]
    pub exact: bool,

    /// Floating-point mode for psd and heuristic paths.
    #[arg(long, global = true, conflicts_with = "exact")]
    pub float: bool,

    /// Tolerance for float-mode decisions (default 1e-9).
    #[arg(long, global = true)]
    pub tol: Option<f64>,

    /// PRNG seed for heuristic searches (default 0xC0FFEE).
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Budget for decomposition searches and witness hunts.
    #[arg(long, global = true)]
    pub budget: Option<usize>,

    /// Levels to materialize for system commands (comma-separated).
    #[arg(long, global = true, value_delimiter = ',')]
    pub levels: Option<Vec<usize>>,

    /// Ambient-dimension cap for double-description conversions.
    #[arg(long, global = true)]
    pub cap: Option<usize>,

    /// Write the run report to this path instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Cmd {
    /// Cone representations: duality, membership, tensors, extreme rays.
    #[command(subcommand)]
    Cone(ConeCmd),
    /// Level-indexed conic systems over the simplex/operator/tft stems.
    #[command(subcommand)]
    Sys(SysCmd),
    /// Completely positive map analysis via Choi matrices.
    #[command(subcommand)]
    Map(MapCmd),
    /// Certificate-producing extension solvers.
    #[command(subcommand)]
    Extend(ExtendCmd),
    /// The one-dimensional TFT cone family.
    #[command(subcommand)]
    Tft(TftCmd),
    /// Replay every certificate in a stored run report.
    Verify { report: PathBuf },
}

#[derive(Subcommand, Debug)]
pub enum ConeCmd {
    /// Structural dual, with an explicit generator form when polyhedral.
    Dual { cone: PathBuf },
    /// Membership of a vector, with a certificate either way.
    Member { cone: PathBuf, vector: PathBuf },
    /// Minimal or maximal tensor product of two cones.
    Tensor {
        left: PathBuf,
        right: PathBuf,
        #[arg(long, value_enum)]
        kind: TensorKind,
    },
    /// Irredundant extreme-ray subset of a generator cone.
    Extreme { cone: PathBuf },
    /// Does the first cone contain the second?
    Contains { outer: PathBuf, inner: PathBuf },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum TensorKind {
    Min,
    Max,
}

#[derive(Subcommand, Debug)]
pub enum SysCmd {
    /// Materialize a system from a build request.
    Build { spec: PathBuf },
    /// Build, then dualize levelwise.
    Dual { spec: PathBuf },
    /// Sum/intersection/direct sum/image/preimage of built systems.
    Op { problem: PathBuf },
}

#[derive(Subcommand, Debug)]
pub enum MapCmd {
    /// Choi matrix coordinates and spectrum.
    Choi { map: PathBuf },
    /// Complete positivity with Kraus operators or a witness.
    Cp { map: PathBuf },
    /// Kraus operators of a completely positive map.
    Kraus { map: PathBuf },
    /// k-positivity by Schmidt-rank-bounded descent.
    Kpos {
        map: PathBuf,
        #[arg(long)]
        k: usize,
    },
    /// Entanglement breaking via Choi separability.
    Eb { map: PathBuf },
}

#[derive(Subcommand, Debug)]
pub enum ExtendCmd {
    /// Scalar Riesz extension of a positive functional.
    Riesz { problem: PathBuf },
    /// Vector-valued Riesz extension into a sharp polyhedral cone.
    Vector { problem: PathBuf },
    /// Group-invariant extension for finite matrix groups.
    Invariant { problem: PathBuf },
    /// Numeric Arveson extension by Dykstra projections.
    Arveson { problem: PathBuf },
}

#[derive(Subcommand, Debug)]
pub enum TftCmd {
    /// Emit B(k) (generators) or A(k) (halfspaces).
    Build {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        k: usize,
        #[arg(long, value_enum, default_value = "b")]
        cone: TftConeKind,
    },
    /// The four exact duality checks for one level.
    Verify {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        k: usize,
    },
    /// Witness that A(1) ⊗̲ A(1) is not contained in A(2).
    Witness {
        #[arg(long)]
        m: usize,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum TftConeKind {
    B,
    A,
}

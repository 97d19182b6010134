//! Level-indexed conic systems over three concrete stems.
//!
//! A stem fixes the level spaces and the cones that bound every system from
//! below and above: the simplex stem (level c ↦ ℝ^c with the orthant), the
//! operator stem (level s ↦ Her_s coordinates with the psd cone), and the
//! one-dimensional TFT stem (level k ↦ V^⊗k ⊗ (V')^⊗k with the pairing
//! cones B(k) ⊆ A(k)). A system over a base cone D materializes finitely
//! many levels; the smallest system tensors D minimally with the
//! cointrinsic cones, the largest maximally with the intrinsic cones, and
//! the two constructions are exchanged by duality. All three stems have
//! self-dual level indices, so the dual system is the levelwise dual cone.

use crate::cones::{
    extreme_rays, max_tensor, min_tensor, ConeRep, MemberParams,
};
use crate::extension::lp::{cone_membership, ConeMembership};
use crate::linalg::eigen::sym_eig;
use crate::linalg::herm::{
    self, compression_coords_map, herm_dim, real_embed_cmat, tensor_coords_to_cmat, CMat,
};
use crate::linalg::{dot, Mat};
use crate::rng;
use crate::scalar::{rat, to_f64, Rational};
use crate::tft::{self, TftLevel};
use crate::verdict::{Certificate, Verdict};
use crate::{Error, Result};
use num_traits::Zero;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// The three concrete stems.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "stem", rename_all = "snake_case")]
pub enum Stem {
    Simplex,
    Operator,
    /// One-dimensional TFT with dim V = m (use m = d² for the pseudo-mixed
    /// family over Her_d).
    Tft { m: usize },
}

impl Stem {
    /// Dimension of the level space S(c).
    pub fn level_dim(&self, c: usize) -> usize {
        match self {
            Stem::Simplex => c,
            Stem::Operator => herm_dim(c),
            Stem::Tft { m } => m.pow(2 * c as u32),
        }
    }

    /// Cointrinsic cone B(c): generated by the images of 1 under morphisms
    /// from the unit. Simplex and operator stems are self-dual at every
    /// level (B = A); for the TFT stem this is the pairing cone.
    pub fn b_cone(&self, c: usize) -> Result<ConeRep> {
        match self {
            Stem::Simplex => Ok(ConeRep::simplex_std(c)),
            Stem::Operator => Ok(ConeRep::Psd { d: c }),
            Stem::Tft { m } => tft::b_cone(&TftLevel::new(*m, c)?),
        }
    }

    /// Intrinsic cone A(c): elements nonnegative under all morphisms to the
    /// counit.
    pub fn a_cone(&self, c: usize) -> Result<ConeRep> {
        match self {
            Stem::Simplex => Ok(ConeRep::simplex_std(c)),
            Stem::Operator => Ok(ConeRep::Psd { d: c }),
            Stem::Tft { m } => tft::a_cone(&TftLevel::new(*m, c)?),
        }
    }

    /// The unit level (where B(𝟏) = ℝ₊).
    pub fn unit_level(&self) -> usize {
        match self {
            Stem::Simplex | Stem::Operator => 1,
            Stem::Tft { .. } => 0,
        }
    }
}

/// A materialized level: an explicit cone, or a recorded reason why the
/// representation is unavailable.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "state", rename_all = "snake_case")]
pub enum LevelCone {
    Cone { cone: ConeRep },
    Unknown { reason: String },
}

impl LevelCone {
    pub fn cone(&self) -> Option<&ConeRep> {
        match self {
            LevelCone::Cone { cone } => Some(cone),
            LevelCone::Unknown { .. } => None,
        }
    }
}

/// How the materialized levels arose.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClosureHint {
    MinOverBase,
    MaxOverBase,
    Explicit,
    Generated,
}

/// A finitely materialized conic system.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct System {
    #[serde(flatten)]
    pub stem: Stem,
    pub base_dim: usize,
    pub base_cone: Option<ConeRep>,
    pub hint: ClosureHint,
    pub levels: BTreeMap<usize, LevelCone>,
}

impl System {
    pub fn level(&self, c: usize) -> Option<&LevelCone> {
        self.levels.get(&c)
    }

    /// Ambient dimension of level c.
    pub fn level_space_dim(&self, c: usize) -> usize {
        self.base_dim * self.stem.level_dim(c)
    }
}

/// Smallest system over the base cone: level c holds base ⊗̲ B(c).
pub fn min_system(
    stem: Stem,
    base: &ConeRep,
    levels: &[usize],
    ambient_cap: usize,
) -> Result<System> {
    let mut map = BTreeMap::new();
    for &c in levels {
        let b = stem.b_cone(c)?;
        map.insert(
            c,
            LevelCone::Cone {
                cone: min_tensor(base, &b, ambient_cap),
            },
        );
    }
    Ok(System {
        stem,
        base_dim: base.ambient(),
        base_cone: Some(base.clone()),
        hint: ClosureHint::MinOverBase,
        levels: map,
    })
}

/// Largest system over the base cone: level c holds base ⊗̄ A(c).
pub fn max_system(
    stem: Stem,
    base: &ConeRep,
    levels: &[usize],
    ambient_cap: usize,
) -> Result<System> {
    let mut map = BTreeMap::new();
    for &c in levels {
        let a = stem.a_cone(c)?;
        map.insert(
            c,
            LevelCone::Cone {
                cone: max_tensor(base, &a, ambient_cap),
            },
        );
    }
    Ok(System {
        stem,
        base_dim: base.ambient(),
        base_cone: Some(base.clone()),
        hint: ClosureHint::MaxOverBase,
        levels: map,
    })
}

/// The intrinsic operator-stem system on Her_d: level s holds Psd(d·s),
/// represented on the tensor coordinates of Her_d ⊗ Her_s.
pub fn psd_system(d: usize, levels: &[usize]) -> System {
    let mut map = BTreeMap::new();
    for &s in levels {
        map.insert(
            s,
            LevelCone::Cone {
                cone: ConeRep::PsdTensor { sides: vec![d, s] },
            },
        );
    }
    System {
        stem: Stem::Operator,
        base_dim: herm_dim(d),
        base_cone: Some(ConeRep::Psd { d }),
        hint: ClosureHint::Explicit,
        levels: map,
    }
}

/// Dual system: level c of the result is the dual cone of level c* = c (all
/// three stems have self-dual levels). Min-over-base and max-over-base
/// exchange, with the dual base cone.
pub fn dual_system(g: &System) -> System {
    let levels = g
        .levels
        .iter()
        .map(|(&c, lc)| {
            let out = match lc {
                LevelCone::Cone { cone } => LevelCone::Cone { cone: cone.dual() },
                LevelCone::Unknown { reason } => LevelCone::Unknown {
                    reason: format!("dual of unknown level: {reason}"),
                },
            };
            (c, out)
        })
        .collect();
    System {
        stem: g.stem,
        base_dim: g.base_dim,
        base_cone: g.base_cone.as_ref().map(|b| b.dual()),
        hint: match g.hint {
            ClosureHint::MinOverBase => ClosureHint::MaxOverBase,
            ClosureHint::MaxOverBase => ClosureHint::MinOverBase,
            ref other => other.clone(),
        },
        levels,
    }
}

fn require_matching(g: &System, h: &System) -> Result<()> {
    if g.stem != h.stem {
        return Err(Error::Unsupported("systems over different stems".into()));
    }
    if g.base_dim != h.base_dim {
        return Err(Error::DimensionMismatch {
            expected: g.base_dim,
            got: h.base_dim,
        });
    }
    Ok(())
}

/// Levelwise sum: the conic hull of the union, with redundant generators
/// removed. Levels missing a generator form become `Unknown`.
pub fn sum_systems(g: &System, h: &System, params: &MemberParams) -> Result<System> {
    require_matching(g, h)?;
    let mut levels = BTreeMap::new();
    for (&c, lg) in &g.levels {
        let Some(lh) = h.levels.get(&c) else { continue };
        let out = match (lg.cone(), lh.cone()) {
            (Some(a), Some(b)) => {
                match (
                    a.generators_with(params.ambient_cap),
                    b.generators_with(params.ambient_cap),
                ) {
                    (Ok(Some(mut ga)), Ok(Some(gb))) => {
                        ga.extend(gb);
                        let kept = extreme_rays(&ga)?;
                        LevelCone::Cone {
                            cone: ConeRep::poly_v(a.ambient(), kept),
                        }
                    }
                    _ => LevelCone::Unknown {
                        reason: "sum needs generator forms of both levels".into(),
                    },
                }
            }
            _ => LevelCone::Unknown {
                reason: "sum of unknown levels".into(),
            },
        };
        levels.insert(c, out);
    }
    Ok(System {
        stem: g.stem,
        base_dim: g.base_dim,
        base_cone: None,
        hint: ClosureHint::Explicit,
        levels,
    })
}

/// Levelwise intersection: halfspace lists concatenate.
pub fn intersect_systems(g: &System, h: &System, params: &MemberParams) -> Result<System> {
    require_matching(g, h)?;
    let mut levels = BTreeMap::new();
    for (&c, lg) in &g.levels {
        let Some(lh) = h.levels.get(&c) else { continue };
        let out = match (lg.cone(), lh.cone()) {
            (Some(a), Some(b)) => {
                match (
                    a.halfspaces_with(params.ambient_cap),
                    b.halfspaces_with(params.ambient_cap),
                ) {
                    (Ok(Some(mut ha)), Ok(Some(hb))) => {
                        ha.extend(hb);
                        LevelCone::Cone {
                            cone: ConeRep::poly_h(a.ambient(), ha),
                        }
                    }
                    _ => LevelCone::Unknown {
                        reason: "intersection needs halfspace forms of both levels".into(),
                    },
                }
            }
            _ => LevelCone::Unknown {
                reason: "intersection of unknown levels".into(),
            },
        };
        levels.insert(c, out);
    }
    Ok(System {
        stem: g.stem,
        base_dim: g.base_dim,
        base_cone: None,
        hint: ClosureHint::Explicit,
        levels,
    })
}

/// Direct sum on X ⊕ Y: generators (or halfspaces) embed blockwise; the
/// level space coordinates stack the X⊗S(c) block before the Y⊗S(c) block.
pub fn direct_sum_systems(g: &System, h: &System, params: &MemberParams) -> Result<System> {
    if g.stem != h.stem {
        return Err(Error::Unsupported("systems over different stems".into()));
    }
    let mut levels = BTreeMap::new();
    for (&c, lg) in &g.levels {
        let Some(lh) = h.levels.get(&c) else { continue };
        let (da, db) = (g.level_space_dim(c), h.level_space_dim(c));
        let out = match (lg.cone(), lh.cone()) {
            (Some(a), Some(b)) => {
                let ga = a.generators_with(params.ambient_cap);
                let gb = b.generators_with(params.ambient_cap);
                if let (Ok(Some(ga)), Ok(Some(gb))) = (ga, gb) {
                    let mut gens = Vec::with_capacity(ga.len() + gb.len());
                    for v in ga {
                        let mut w = v;
                        w.extend(vec![Rational::zero(); db]);
                        gens.push(w);
                    }
                    for v in gb {
                        let mut w = vec![Rational::zero(); da];
                        w.extend(v);
                        gens.push(w);
                    }
                    LevelCone::Cone {
                        cone: ConeRep::poly_v(da + db, gens),
                    }
                } else if let (Ok(Some(ha)), Ok(Some(hb))) = (
                    a.halfspaces_with(params.ambient_cap),
                    b.halfspaces_with(params.ambient_cap),
                ) {
                    let mut hs = Vec::with_capacity(ha.len() + hb.len());
                    for v in ha {
                        let mut w = v;
                        w.extend(vec![Rational::zero(); db]);
                        hs.push(w);
                    }
                    for v in hb {
                        let mut w = vec![Rational::zero(); da];
                        w.extend(v);
                        hs.push(w);
                    }
                    LevelCone::Cone {
                        cone: ConeRep::poly_h(da + db, hs),
                    }
                } else {
                    LevelCone::Unknown {
                        reason: "direct sum needs explicit forms of both levels".into(),
                    }
                }
            }
            _ => LevelCone::Unknown {
                reason: "direct sum of unknown levels".into(),
            },
        };
        levels.insert(c, out);
    }
    Ok(System {
        stem: g.stem,
        base_dim: g.base_dim + h.base_dim,
        base_cone: None,
        hint: ClosureHint::Explicit,
        levels,
    })
}

/// Image system under Ψ: X → Y (matrix dim Y × dim X): level c maps
/// generators by Ψ ⊗ id.
pub fn image_system(psi: &Mat<Rational>, g: &System, params: &MemberParams) -> Result<System> {
    if psi.cols() != g.base_dim {
        return Err(Error::DimensionMismatch {
            expected: g.base_dim,
            got: psi.cols(),
        });
    }
    let mut levels = BTreeMap::new();
    for (&c, lc) in &g.levels {
        let sdim = g.stem.level_dim(c);
        let out = match lc.cone() {
            Some(cone) => match cone.generators_with(params.ambient_cap) {
                Ok(Some(gens)) => {
                    let mapped = gens
                        .iter()
                        .map(|v| apply_base_map(psi, v, sdim))
                        .collect();
                    LevelCone::Cone {
                        cone: ConeRep::poly_v(psi.rows() * sdim, mapped),
                    }
                }
                _ => LevelCone::Unknown {
                    reason: "image needs a generator form".into(),
                },
            },
            None => LevelCone::Unknown {
                reason: "image of unknown level".into(),
            },
        };
        levels.insert(c, out);
    }
    Ok(System {
        stem: g.stem,
        base_dim: psi.rows(),
        base_cone: None,
        hint: ClosureHint::Explicit,
        levels,
    })
}

/// Inverse-image system under Ψ: X → Y: level c pulls halfspaces back along
/// Ψ ⊗ id.
pub fn preimage_system(psi: &Mat<Rational>, e: &System, params: &MemberParams) -> Result<System> {
    if psi.rows() != e.base_dim {
        return Err(Error::DimensionMismatch {
            expected: e.base_dim,
            got: psi.rows(),
        });
    }
    let mut levels = BTreeMap::new();
    for (&c, lc) in &e.levels {
        let sdim = e.stem.level_dim(c);
        let out = match lc.cone() {
            Some(cone) => match cone.halfspaces_with(params.ambient_cap) {
                Ok(Some(hs)) => {
                    // h ∘ (Ψ ⊗ id) has coordinates (Ψ ⊗ id)ᵀ h.
                    let psi_t = psi.transpose();
                    let pulled = hs
                        .iter()
                        .map(|h| apply_base_map(&psi_t, h, sdim))
                        .collect();
                    LevelCone::Cone {
                        cone: ConeRep::poly_h(psi.cols() * sdim, pulled),
                    }
                }
                _ => LevelCone::Unknown {
                    reason: "preimage needs a halfspace form".into(),
                },
            },
            None => LevelCone::Unknown {
                reason: "preimage of unknown level".into(),
            },
        };
        levels.insert(c, out);
    }
    Ok(System {
        stem: e.stem,
        base_dim: psi.cols(),
        base_cone: None,
        hint: ClosureHint::Explicit,
        levels,
    })
}

/// Applies Ψ ⊗ id_{S(c)} to a level vector without forming the Kronecker
/// matrix: the X index is major, the level index minor.
pub fn apply_base_map(psi: &Mat<Rational>, v: &[Rational], sdim: usize) -> Vec<Rational> {
    let (rows, cols) = (psi.rows(), psi.cols());
    assert_eq!(v.len(), cols * sdim);
    let mut out = vec![Rational::zero(); rows * sdim];
    for p in 0..rows {
        for q in 0..cols {
            let f = psi[(p, q)].clone();
            if f.is_zero() {
                continue;
            }
            for s in 0..sdim {
                let t = f.clone() * v[q * sdim + s].clone();
                out[p * sdim + s] = out[p * sdim + s].clone() + t;
            }
        }
    }
    out
}

/// Applies id_X ⊗ K to a level vector, K mapping S(c) coordinates to S(d)
/// coordinates.
pub fn apply_level_map(k: &Mat<Rational>, v: &[Rational], base_dim: usize) -> Vec<Rational> {
    let (rows, cols) = (k.rows(), k.cols());
    assert_eq!(v.len(), base_dim * cols);
    let mut out = vec![Rational::zero(); base_dim * rows];
    for p in 0..base_dim {
        let block = &v[p * cols..(p + 1) * cols];
        let mapped = k.matvec(block);
        out[p * rows..(p + 1) * rows].clone_from_slice(&mapped);
    }
    out
}

/// A sampled stem morphism between levels, as a coordinate matrix on the
/// level spaces.
pub fn sample_stem_morphism(
    stem: Stem,
    from: usize,
    to: usize,
    rng: &mut rand_chacha::ChaCha8Rng,
) -> Result<Mat<Rational>> {
    match stem {
        Stem::Operator => {
            // Compression A ↦ M*·A·M with M ∈ Mat_{from,to}, entries drawn
            // from {−1, 0, 1}.
            let m = Mat::from_fn(from, to, |_, _| rat(rng.random_range(-1..=1)));
            Ok(compression_coords_map(from, to, &CMat::from_re(m)))
        }
        Stem::Simplex => {
            // Positive maps between standard simplex cones: nonnegative
            // matrices.
            Ok(Mat::from_fn(to, from, |_, _| rat(rng.random_range(0..=2))))
        }
        Stem::Tft { m } => {
            if from == to + 1 {
                let a = rng.random_range(0..from);
                let b = rng.random_range(0..from);
                tft_contraction_map(m, from, a, b)
            } else if to == from + 1 {
                tft_insertion_map(m, from)
            } else if from == to {
                Ok(Mat::identity(stem.level_dim(from)))
            } else {
                Err(Error::Unsupported(
                    "tft morphism sampling supports level steps of one".into(),
                ))
            }
        }
    }
}

/// Evaluation pairing of V-factor `a` against V'-factor `b`: a linear map
/// from level k to level k−1 of the TFT stem.
pub fn tft_contraction_map(m: usize, k: usize, a: usize, b: usize) -> Result<Mat<Rational>> {
    if k == 0 || a >= k || b >= k {
        return Err(Error::Invalid("contraction slots out of range".into()));
    }
    let from = m.pow(2 * k as u32);
    let to = m.pow(2 * (k - 1) as u32);
    let mut out: Mat<Rational> = Mat::zeros(to, from);
    for flat in 0..from {
        let mut digits = vec![0usize; 2 * k];
        let mut rem = flat;
        for slot in (0..2 * k).rev() {
            digits[slot] = rem % m;
            rem /= m;
        }
        if digits[a] != digits[k + b] {
            continue;
        }
        let mut target = 0usize;
        for (slot, &d) in digits.iter().enumerate() {
            if slot == a || slot == k + b {
                continue;
            }
            target = target * m + d;
        }
        out[(target, flat)] = out[(target, flat)].clone() + Rational::from_integer(1.into());
    }
    Ok(out)
}

/// Insertion of a maximally entangled pair, mapping level k to level k+1
/// (new V-factor appended at position k+1, new V'-factor at position k+1).
pub fn tft_insertion_map(m: usize, k: usize) -> Result<Mat<Rational>> {
    let from = m.pow(2 * k as u32);
    let to = m.pow(2 * (k + 1) as u32);
    let mut out: Mat<Rational> = Mat::zeros(to, from);
    for flat in 0..from {
        let mut digits = vec![0usize; 2 * k];
        let mut rem = flat;
        for slot in (0..2 * k).rev() {
            digits[slot] = rem % m;
            rem /= m;
        }
        for v in 0..m {
            // Insert v as the (k+1)-th V digit and the (k+1)-th V' digit.
            let mut target = 0usize;
            for &d in digits[..k].iter().chain([v].iter()) {
                target = target * m + d;
            }
            for &d in digits[k..].iter().chain([v].iter()) {
                target = target * m + d;
            }
            out[(target, flat)] = out[(target, flat)].clone() + Rational::from_integer(1.into());
        }
    }
    Ok(out)
}

/// Checks that sampled stem morphisms map materialized levels into each
/// other (the defining compatibility of a system). Levels without exact
/// forms are skipped.
pub fn check_morphism_compatibility(
    sys: &System,
    samples: usize,
    seed: u64,
    params: &MemberParams,
) -> Result<bool> {
    let levels: Vec<usize> = sys.levels.keys().copied().collect();
    let mut rng = rng::substream(seed, 17);
    for &s in &levels {
        for &t in &levels {
            if matches!(sys.stem, Stem::Tft { .. }) && s.abs_diff(t) != 1 {
                continue;
            }
            let Some(src) = sys.levels[&s].cone() else { continue };
            let Some(dst) = sys.levels[&t].cone() else { continue };
            let Ok(Some(gens)) = src.generators_with(params.ambient_cap) else {
                continue;
            };
            for _ in 0..samples {
                let k = sample_stem_morphism(sys.stem, s, t, &mut rng)?;
                for g in &gens {
                    let img = apply_level_map(&k, g, sys.base_dim);
                    match dst.member(&img, params)? {
                        Verdict::Yes { .. } => {}
                        Verdict::Unknown { .. } => {}
                        Verdict::No { .. } => return Ok(false),
                    }
                }
            }
        }
    }
    Ok(true)
}

/// Membership in the system generated by elements a_i at levels c_i.
///
/// Yes: a sampled family of stem morphisms applied to the generators yields
/// atoms whose conic hull contains the target (exact LP, so a Yes always
/// carries an exactly verified combination). No: a functional φ with
/// φ(x) < 0 whose pairing with every generator lands in the intrinsic cone
/// (a psd or orthant check per generator); found by alternating projections
/// and verified before being returned. Otherwise Unknown.
pub fn generated_membership(
    stem: Stem,
    base_dim: usize,
    generators: &[(usize, Vec<Rational>)],
    target_level: usize,
    x: &[Rational],
    params: &MemberParams,
) -> Result<Verdict> {
    if matches!(stem, Stem::Tft { .. }) {
        return Err(Error::Unsupported(
            "generated membership supports the simplex and operator stems".into(),
        ));
    }
    let t = target_level;
    let tdim = stem.level_dim(t);
    if x.len() != base_dim * tdim {
        return Err(Error::DimensionMismatch {
            expected: base_dim * tdim,
            got: x.len(),
        });
    }
    for (c, a) in generators {
        let expect = base_dim * stem.level_dim(*c);
        if a.len() != expect {
            return Err(Error::DimensionMismatch {
                expected: expect,
                got: a.len(),
            });
        }
    }

    // Yes branch: sampled morphism images, then one exact LP.
    let mut atoms: Vec<Vec<Rational>> = Vec::new();
    let mut rng = rng::substream(params.seed, 3);
    let samples = 64;
    for (c, a) in generators {
        for _ in 0..samples {
            let k = sample_stem_morphism(stem, *c, t, &mut rng)?;
            let img = apply_level_map(&k, a, base_dim);
            if img.iter().any(|v| !v.is_zero()) {
                atoms.push(img);
            }
        }
    }
    if !atoms.is_empty() {
        if let ConeMembership::Inside { coeffs } = cone_membership(&atoms, x)? {
            return Ok(Verdict::yes(
                "sampled-morphisms-exact-lp",
                Certificate::Combination {
                    coeffs,
                    atoms,
                },
            ));
        }
    }

    // No branch: search for φ in the dual system.
    if let Some(cert) = dual_functional_search(stem, base_dim, generators, t, x, params) {
        return Ok(Verdict::No {
            oracle: "dual-functional-descent".into(),
            certificate: Some(cert),
        });
    }
    Ok(Verdict::unknown(
        "generated membership undecided within budget",
    ))
}

/// Pairing of a generator a ∈ X ⊗ S(c) against φ ∈ X' ⊗ S(t): the matrix
/// K_a = a read as a map X' → S(c), tensored with the identity on S(t).
/// Returns the (c-dim × base_dim) coefficient matrix.
fn generator_matrix(a: &[Rational], base_dim: usize, cdim: usize) -> Mat<Rational> {
    Mat::from_fn(cdim, base_dim, |alpha, p| a[p * cdim + alpha].clone())
}

fn dual_functional_search(
    stem: Stem,
    base_dim: usize,
    generators: &[(usize, Vec<Rational>)],
    t: usize,
    x: &[Rational],
    params: &MemberParams,
) -> Option<Certificate> {
    let tdim = stem.level_dim(t);
    let n = base_dim * tdim;
    let xf: Vec<f64> = x.iter().map(to_f64).collect();
    let xnorm2: f64 = xf.iter().map(|v| v * v).sum();
    if xnorm2 == 0.0 {
        return None;
    }
    // Pseudo-inverses of the generator matrices, for approximate projection
    // onto {φ : K_a φ ∈ intrinsic cone}.
    struct GenData {
        cdim: usize,
        c: usize,
        mat: Mat<f64>,
        pinv: Mat<f64>,
    }
    let mut gens = Vec::new();
    for (c, a) in generators {
        let cdim = stem.level_dim(*c);
        let m = generator_matrix(a, base_dim, cdim).map(to_f64);
        let pinv = pseudo_inverse(&m)?;
        gens.push(GenData {
            cdim,
            c: *c,
            mat: m,
            pinv,
        });
    }
    let mut phi = vec![0.0f64; n];
    for (p, v) in phi.iter_mut().zip(&xf) {
        *p = -v / xnorm2.sqrt();
    }
    let iters = params.iters.max(100);
    for _ in 0..iters {
        // Half-space: φ·x ≤ −1.
        let val: f64 = phi.iter().zip(&xf).map(|(a, b)| a * b).sum();
        if val > -1.0 {
            let f = (val + 1.0) / xnorm2;
            for (p, v) in phi.iter_mut().zip(&xf) {
                *p -= f * v;
            }
        }
        // Approximate projection for each generator constraint.
        for g in &gens {
            // y = (K_g ⊗ id_t) φ as coordinates over S(c) ⊗ S(t).
            let y = apply_gen_pairing(&g.mat, &phi, base_dim, g.cdim, tdim);
            let y_proj = project_intrinsic(stem, g.c, t, &y)?;
            let diff: Vec<f64> = y.iter().zip(&y_proj).map(|(a, b)| a - b).collect();
            if diff.iter().all(|d| d.abs() < 1e-15) {
                continue;
            }
            // φ ← φ − (pinv(K) ⊗ id)·diff
            let corr = apply_gen_pairing(&g.pinv, &diff, g.cdim, base_dim, tdim);
            for (p, cband) in phi.iter_mut().zip(&corr) {
                *p -= cband;
            }
        }
    }
    // Verify.
    let value: f64 = phi.iter().zip(&xf).map(|(a, b)| a * b).sum();
    if value >= -params.tol {
        return None;
    }
    let mut margins = Vec::new();
    for g in &gens {
        let y = apply_gen_pairing(&g.mat, &phi, base_dim, g.cdim, tdim);
        let margin = intrinsic_margin(stem, g.c, t, &y)?;
        if margin < -params.tol {
            return None;
        }
        margins.push(margin);
    }
    Some(Certificate::DualFunctional {
        functional: phi,
        value,
        psd_margins: margins,
    })
}

/// Applies K ⊗ id_t to φ ∈ R^{rows_in · tdim}, K: rows_in → rows_out on the
/// first index.
fn apply_gen_pairing(
    k: &Mat<f64>,
    phi: &[f64],
    rows_in: usize,
    rows_out: usize,
    tdim: usize,
) -> Vec<f64> {
    assert_eq!(k.rows(), rows_out);
    assert_eq!(k.cols(), rows_in);
    assert_eq!(phi.len(), rows_in * tdim);
    let mut out = vec![0.0; rows_out * tdim];
    for o in 0..rows_out {
        for i in 0..rows_in {
            let f = k[(o, i)];
            if f == 0.0 {
                continue;
            }
            for s in 0..tdim {
                out[o * tdim + s] += f * phi[i * tdim + s];
            }
        }
    }
    out
}

/// Projection of level coordinates onto the intrinsic cone A(c ⊗ t):
/// orthant clip for the simplex stem, psd clip (through the embedding) for
/// the operator stem.
fn project_intrinsic(stem: Stem, c: usize, t: usize, y: &[f64]) -> Option<Vec<f64>> {
    match stem {
        Stem::Simplex => Some(y.iter().map(|v| v.max(0.0)).collect()),
        Stem::Operator => {
            let m = tensor_coords_to_cmat(&[c, t], y).ok()?;
            let p = crate::cones::tensor::psd_project(&m);
            Some(herm::cmat_to_tensor_coords(&[c, t], &p))
        }
        Stem::Tft { .. } => None,
    }
}

/// Smallest slack/eigenvalue of the intrinsic-cone constraint.
fn intrinsic_margin(stem: Stem, c: usize, t: usize, y: &[f64]) -> Option<f64> {
    match stem {
        Stem::Simplex => y.iter().copied().reduce(f64::min),
        Stem::Operator => {
            let m = tensor_coords_to_cmat(&[c, t], y).ok()?;
            let e = real_embed_cmat(&m);
            let (vals, _) = sym_eig(&e).ok()?;
            vals.last().copied()
        }
        Stem::Tft { .. } => None,
    }
}

/// Moore–Penrose pseudo-inverse via the normal equations (the generator
/// matrices here are small and well-conditioned enough; a tiny ridge guards
/// rank deficiency).
fn pseudo_inverse(m: &Mat<f64>) -> Option<Mat<f64>> {
    let (r, c) = (m.rows(), m.cols());
    let mt = m.transpose();
    if r >= c {
        // (MᵀM + εI)⁻¹ Mᵀ
        let mut g = mt.matmul(m);
        let scale = (0..c).map(|i| g[(i, i)].abs()).fold(0.0, f64::max).max(1.0);
        for i in 0..c {
            g[(i, i)] += 1e-12 * scale;
        }
        let inv = invert_f64(&g)?;
        Some(inv.matmul(&mt))
    } else {
        let mut g = m.matmul(&mt);
        let scale = (0..r).map(|i| g[(i, i)].abs()).fold(0.0, f64::max).max(1.0);
        for i in 0..r {
            g[(i, i)] += 1e-12 * scale;
        }
        let inv = invert_f64(&g)?;
        Some(mt.matmul(&inv))
    }
}

fn invert_f64(m: &Mat<f64>) -> Option<Mat<f64>> {
    let n = m.rows();
    let mut a = m.clone();
    let mut inv: Mat<f64> = Mat::identity(n);
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| {
            a[(i, col)].abs().partial_cmp(&a[(j, col)].abs()).unwrap()
        })?;
        if a[(piv, col)].abs() < 1e-14 {
            return None;
        }
        for j in 0..n {
            let t = a[(piv, j)];
            a[(piv, j)] = a[(col, j)];
            a[(col, j)] = t;
            let t = inv[(piv, j)];
            inv[(piv, j)] = inv[(col, j)];
            inv[(col, j)] = t;
        }
        let d = a[(col, col)];
        for j in 0..n {
            a[(col, j)] /= d;
            inv[(col, j)] /= d;
        }
        for i in 0..n {
            if i != col && a[(i, col)] != 0.0 {
                let f = a[(i, col)];
                for j in 0..n {
                    a[(i, j)] -= f * a[(col, j)];
                    inv[(i, j)] -= f * inv[(col, j)];
                }
            }
        }
    }
    Some(inv)
}

/// Build request matching the CLI JSON schema for systems.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SystemSpec {
    #[serde(flatten)]
    pub stem: Stem,
    pub base_dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base_cone: Option<ConeRep>,
    pub mode: BuildMode,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub generators: Vec<GeneratorEntry>,
    pub levels: Vec<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BuildMode {
    Min,
    Max,
    Generated,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GeneratorEntry {
    pub level: usize,
    #[serde(with = "crate::scalar::rat_vec_str")]
    pub element: Vec<Rational>,
}

/// Materializes a system from a build request.
pub fn build_system(spec: &SystemSpec, params: &MemberParams) -> Result<System> {
    match spec.mode {
        BuildMode::Min | BuildMode::Max => {
            let base = spec.base_cone.as_ref().ok_or_else(|| {
                Error::Invalid("min/max system needs a base_cone".into())
            })?;
            base.validate()?;
            if base.ambient() != spec.base_dim {
                return Err(Error::DimensionMismatch {
                    expected: spec.base_dim,
                    got: base.ambient(),
                });
            }
            if spec.mode == BuildMode::Min {
                min_system(spec.stem, base, &spec.levels, params.ambient_cap)
            } else {
                max_system(spec.stem, base, &spec.levels, params.ambient_cap)
            }
        }
        BuildMode::Generated => {
            let mut levels = BTreeMap::new();
            for &c in &spec.levels {
                levels.insert(
                    c,
                    LevelCone::Unknown {
                        reason: "generated system: query via generated membership".into(),
                    },
                );
            }
            Ok(System {
                stem: spec.stem,
                base_dim: spec.base_dim,
                base_cone: spec.base_cone.clone(),
                hint: ClosureHint::Generated,
                levels,
            })
        }
    }
}

/// Interior-point propagation data for one level: interior base point ⊗
/// interior cointrinsic point, with its facet margins at that level.
pub fn interior_tensor_margins(
    sys: &System,
    c: usize,
    params: &MemberParams,
) -> Result<Option<Vec<Rational>>> {
    let Some(base) = &sys.base_cone else {
        return Ok(None);
    };
    let Some(u) = base.interior_point(params.ambient_cap)? else {
        return Ok(None);
    };
    let b = sys.stem.b_cone(c)?;
    let Some(w) = b.interior_point(params.ambient_cap).ok().flatten() else {
        return Ok(None);
    };
    let point = crate::linalg::kron_vec(&u, &w);
    let Some(level) = sys.levels.get(&c).and_then(|l| l.cone()) else {
        return Ok(None);
    };
    let Some(hs) = level.halfspaces_with(params.ambient_cap)? else {
        return Ok(None);
    };
    Ok(Some(hs.iter().map(|h| dot(h, &point)).collect()))
}

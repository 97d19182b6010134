//! Command dispatch: parse inputs, call into the library, assemble the run
//! report.

use crate::args::{Cli, Cmd, ConeCmd, ExtendCmd, MapCmd, SysCmd, TensorKind, TftCmd, TftConeKind};
use crate::io::{
    self, ArvesonProblem, InputError, InvariantProblem, MapInput, RieszProblem,
    SystemOpKind, SystemOpProblem, VectorInput, VectorRieszProblem,
};
use crate::report::{InputRecord, ResultRecord, RunReport};
use conekit::cones::{
    cone_contains, extreme_rays, max_tensor, min_tensor, ConeRep, MemberParams, Mode,
};
use conekit::cpmaps::{self, CpOutcome, LinMap};
use conekit::extension::{
    self, ArvesonOutcome, ExtCert, GroupRep,
};
use conekit::linalg::Mat;
use conekit::scalar::Rational;
use conekit::systems::{self, SystemSpec};
use conekit::tft::{self, TftLevel};
use conekit::verdict::{Certificate, Verdict};
use serde_json::json;
use std::path::Path;
use std::time::Instant;

pub struct RunError {
    pub message: String,
}

impl From<InputError> for RunError {
    fn from(e: InputError) -> Self {
        RunError {
            message: e.to_string(),
        }
    }
}

impl From<conekit::Error> for RunError {
    fn from(e: conekit::Error) -> Self {
        RunError {
            message: e.to_string(),
        }
    }
}

struct Ctx {
    params: MemberParams,
    inputs: Vec<InputRecord>,
    results: Vec<ResultRecord>,
}

impl Ctx {
    fn load<T>(&mut self, name: &str, path: &Path) -> Result<T, RunError>
    where
        T: serde::de::DeserializeOwned + serde::Serialize,
    {
        let loaded = io::load::<T>(path)?;
        self.inputs.push(InputRecord {
            name: name.to_string(),
            sha256: loaded.digest,
            content: loaded.content,
        });
        Ok(loaded.value)
    }

    fn push(&mut self, name: &str, verdict: Option<Verdict>, data: serde_json::Value) {
        self.results.push(ResultRecord {
            name: name.to_string(),
            verdict,
            data,
        });
    }
}

/// Runs one command; `Err` means an input/precondition failure (exit 3).
pub fn run(cli: &Cli) -> Result<RunReport, RunError> {
    let start = Instant::now();
    let mode = if cli.float { Mode::Float } else { Mode::Exact };
    let params = MemberParams {
        mode,
        tol: cli.tol.unwrap_or(1e-9),
        seed: cli.seed.unwrap_or(conekit::rng::DEFAULT_SEED),
        budget: cli.budget.unwrap_or(400),
        ambient_cap: cli.cap.unwrap_or(conekit::cones::dd::DEFAULT_AMBIENT_CAP),
        ..MemberParams::default()
    };
    let mut ctx = Ctx {
        params,
        inputs: Vec::new(),
        results: Vec::new(),
    };
    let command = command_path(&cli.cmd);
    match &cli.cmd {
        Cmd::Cone(c) => run_cone(&mut ctx, c)?,
        Cmd::Sys(c) => run_sys(&mut ctx, c, cli.levels.as_deref())?,
        Cmd::Map(c) => run_map(&mut ctx, c)?,
        Cmd::Extend(c) => run_extend(&mut ctx, c)?,
        Cmd::Tft(c) => run_tft(&mut ctx, c)?,
        Cmd::Verify { report } => run_verify(&mut ctx, report)?,
    }
    Ok(RunReport {
        tool: "conekit".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        command,
        mode: if cli.float { "float" } else { "exact" }.into(),
        tol: ctx.params.tol,
        seed: ctx.params.seed,
        budget: ctx.params.budget,
        inputs: ctx.inputs,
        results: ctx.results,
        timing_ms: start.elapsed().as_millis(),
    })
}

fn command_path(cmd: &Cmd) -> Vec<String> {
    match cmd {
        Cmd::Cone(c) => vec![
            "cone".into(),
            match c {
                ConeCmd::Dual { .. } => "dual",
                ConeCmd::Member { .. } => "member",
                ConeCmd::Tensor { .. } => "tensor",
                ConeCmd::Extreme { .. } => "extreme",
                ConeCmd::Contains { .. } => "contains",
            }
            .into(),
        ],
        Cmd::Sys(c) => vec![
            "sys".into(),
            match c {
                SysCmd::Build { .. } => "build",
                SysCmd::Dual { .. } => "dual",
                SysCmd::Op { .. } => "op",
            }
            .into(),
        ],
        Cmd::Map(c) => vec![
            "map".into(),
            match c {
                MapCmd::Choi { .. } => "choi",
                MapCmd::Cp { .. } => "cp",
                MapCmd::Kraus { .. } => "kraus",
                MapCmd::Kpos { .. } => "kpos",
                MapCmd::Eb { .. } => "eb",
            }
            .into(),
        ],
        Cmd::Extend(c) => vec![
            "extend".into(),
            match c {
                ExtendCmd::Riesz { .. } => "riesz",
                ExtendCmd::Vector { .. } => "vector",
                ExtendCmd::Invariant { .. } => "invariant",
                ExtendCmd::Arveson { .. } => "arveson",
            }
            .into(),
        ],
        Cmd::Tft(c) => vec![
            "tft".into(),
            match c {
                TftCmd::Build { .. } => "build",
                TftCmd::Verify { .. } => "verify",
                TftCmd::Witness { .. } => "witness",
            }
            .into(),
        ],
        Cmd::Verify { .. } => vec!["verify".into()],
    }
}

fn run_cone(ctx: &mut Ctx, cmd: &ConeCmd) -> Result<(), RunError> {
    match cmd {
        ConeCmd::Dual { cone } => {
            let c: ConeRep = ctx.load("cone", cone)?;
            c.validate()?;
            let dual = c.dual();
            let gens = dual.generators_with(ctx.params.ambient_cap).ok().flatten();
            ctx.push(
                "dual",
                None,
                json!({
                    "dual": dual,
                    "generators": gens.map(rat_mat_json),
                }),
            );
        }
        ConeCmd::Member { cone, vector } => {
            let c: ConeRep = ctx.load("cone", cone)?;
            c.validate()?;
            let x: VectorInput = ctx.load("vector", vector)?;
            let verdict = c.member(&x.vector, &ctx.params)?;
            ctx.push("member", Some(verdict), serde_json::Value::Null);
        }
        ConeCmd::Tensor { left, right, kind } => {
            let a: ConeRep = ctx.load("left", left)?;
            let b: ConeRep = ctx.load("right", right)?;
            a.validate()?;
            b.validate()?;
            let out = match kind {
                TensorKind::Min => min_tensor(&a, &b, ctx.params.ambient_cap),
                TensorKind::Max => max_tensor(&a, &b, ctx.params.ambient_cap),
            };
            ctx.push("tensor", None, json!({ "cone": out }));
        }
        ConeCmd::Extreme { cone } => {
            let c: ConeRep = ctx.load("cone", cone)?;
            c.validate()?;
            let Some(gens) = c.generators_with(ctx.params.ambient_cap)? else {
                return Err(RunError {
                    message: "extreme rays need a generator form".into(),
                });
            };
            let kept = extreme_rays(&gens)?;
            ctx.push(
                "extreme",
                None,
                json!({
                    "count": kept.len(),
                    "rays": rat_mat_json(kept),
                }),
            );
        }
        ConeCmd::Contains { outer, inner } => {
            let big: ConeRep = ctx.load("outer", outer)?;
            let small: ConeRep = ctx.load("inner", inner)?;
            big.validate()?;
            small.validate()?;
            // Record the refuted generator so the verdict replays offline.
            let verdict = cone_contains(&big, &small, &ctx.params)?;
            let witness = if verdict.is_no() {
                find_refuted_generator(&big, &small, &ctx.params)?
            } else {
                None
            };
            ctx.push(
                "contains",
                Some(verdict),
                json!({ "refuted_generator": witness.map(rat_vec_json) }),
            );
        }
    }
    Ok(())
}

fn find_refuted_generator(
    big: &ConeRep,
    small: &ConeRep,
    params: &MemberParams,
) -> Result<Option<Vec<Rational>>, RunError> {
    if let Some(gens) = small.generators_with(params.ambient_cap)? {
        for g in gens {
            if big.member(&g, params)?.is_no() {
                return Ok(Some(g));
            }
        }
    }
    Ok(None)
}

fn run_sys(ctx: &mut Ctx, cmd: &SysCmd, levels: Option<&[usize]>) -> Result<(), RunError> {
    let with_levels = |mut spec: SystemSpec| -> SystemSpec {
        if let Some(ls) = levels {
            spec.levels = ls.to_vec();
        }
        spec
    };
    match cmd {
        SysCmd::Build { spec } => {
            let spec: SystemSpec = with_levels(ctx.load("system", spec)?);
            let sys = systems::build_system(&spec, &ctx.params)?;
            ctx.push("system", None, serde_json::to_value(&sys).unwrap());
        }
        SysCmd::Dual { spec } => {
            let spec: SystemSpec = with_levels(ctx.load("system", spec)?);
            let sys = systems::build_system(&spec, &ctx.params)?;
            let dual = systems::dual_system(&sys);
            ctx.push("dual_system", None, serde_json::to_value(&dual).unwrap());
        }
        SysCmd::Op { problem } => {
            let p: SystemOpProblem = ctx.load("problem", problem)?;
            let first = systems::build_system(&p.first, &ctx.params)?;
            let out = match p.op {
                SystemOpKind::Sum | SystemOpKind::Intersect | SystemOpKind::DirectSum => {
                    let Some(second_spec) = &p.second else {
                        return Err(RunError {
                            message: "binary system op needs a second operand".into(),
                        });
                    };
                    let second = systems::build_system(second_spec, &ctx.params)?;
                    match p.op {
                        SystemOpKind::Sum => systems::sum_systems(&first, &second, &ctx.params)?,
                        SystemOpKind::Intersect => {
                            systems::intersect_systems(&first, &second, &ctx.params)?
                        }
                        SystemOpKind::DirectSum => {
                            systems::direct_sum_systems(&first, &second, &ctx.params)?
                        }
                        _ => unreachable!(),
                    }
                }
                SystemOpKind::Image | SystemOpKind::Preimage => {
                    let Some(map) = &p.map else {
                        return Err(RunError {
                            message: "image/preimage needs a base-space map".into(),
                        });
                    };
                    let m = Mat::from_rows(map.matrix.clone());
                    match p.op {
                        SystemOpKind::Image => systems::image_system(&m, &first, &ctx.params)?,
                        SystemOpKind::Preimage => {
                            systems::preimage_system(&m, &first, &ctx.params)?
                        }
                        _ => unreachable!(),
                    }
                }
            };
            ctx.push("system_op", None, serde_json::to_value(&out).unwrap());
        }
    }
    Ok(())
}

fn run_map(ctx: &mut Ctx, cmd: &MapCmd) -> Result<(), RunError> {
    let load_map = |ctx: &mut Ctx, path: &Path| -> Result<LinMap, RunError> {
        let input: MapInput = ctx.load("map", path)?;
        Ok(input.to_map()?)
    };
    match cmd {
        MapCmd::Choi { map } => {
            let psi = load_map(ctx, map)?;
            let c = cpmaps::choi(&psi);
            let pairs = cpmaps::herm_eigpairs(&c.cmat_f64())?;
            let eigenvalues: Vec<f64> = pairs.iter().map(|(l, _)| *l).collect();
            ctx.push(
                "choi",
                None,
                json!({
                    "cod_d": c.cod,
                    "dom_d": c.dom,
                    "coords": rat_vec_json(c.coords.clone()),
                    "eigenvalues": eigenvalues,
                }),
            );
        }
        MapCmd::Cp { map } => {
            let psi = load_map(ctx, map)?;
            let verdict = match cpmaps::cp_check(&psi, &ctx.params)? {
                CpOutcome::Cp { kraus } => Verdict::yes(
                    "choi-psd",
                    Certificate::Kraus {
                        cod: kraus.cod,
                        dom: kraus.dom,
                        ops_re: kraus.ops.iter().map(|t| t.re.data().to_vec()).collect(),
                        ops_im: kraus.ops.iter().map(|t| t.im.data().to_vec()).collect(),
                    },
                ),
                CpOutcome::NotCp { witness, value } => Verdict::no(
                    "choi-psd",
                    Certificate::NegativeForm {
                        vec_re: witness.0,
                        vec_im: witness.1,
                        value,
                    },
                ),
            };
            ctx.push("cp", Some(verdict), serde_json::Value::Null);
        }
        MapCmd::Kraus { map } => {
            let psi = load_map(ctx, map)?;
            let kraus = cpmaps::kraus(&psi, &ctx.params).map_err(|e| RunError {
                message: e.to_string(),
            })?;
            let err = kraus.reconstruction_error(&psi);
            ctx.push(
                "kraus",
                Some(Verdict::yes(
                    "choi-eigendecomposition",
                    Certificate::Kraus {
                        cod: kraus.cod,
                        dom: kraus.dom,
                        ops_re: kraus.ops.iter().map(|t| t.re.data().to_vec()).collect(),
                        ops_im: kraus.ops.iter().map(|t| t.im.data().to_vec()).collect(),
                    },
                )),
                json!({ "operator_count": kraus.ops.len(), "reconstruction_error": err }),
            );
        }
        MapCmd::Kpos { map, k } => {
            let psi = load_map(ctx, map)?;
            let verdict = cpmaps::k_positivity(&psi, *k, &ctx.params)?;
            ctx.push("kpos", Some(verdict), json!({ "k": k }));
        }
        MapCmd::Eb { map } => {
            let psi = load_map(ctx, map)?;
            let verdict = cpmaps::eb_check(&psi, &ctx.params)?;
            let factorization = verdict.certificate().and_then(|c| {
                cpmaps::measure_prepare(&psi, c)
                    .ok()
                    .map(|(effects, states)| json!({ "effects": effects, "states": states }))
            });
            ctx.push(
                "eb",
                Some(verdict),
                json!({ "measure_prepare": factorization }),
            );
        }
    }
    Ok(())
}

fn ext_verdict(cert: &ExtCert) -> Verdict {
    match cert {
        ExtCert::Extension { certificate, .. } => Verdict::yes("exact-lp", certificate.clone()),
        ExtCert::Obstruction { certificate } => Verdict::no("exact-lp-farkas", certificate.clone()),
    }
}

fn run_extend(ctx: &mut Ctx, cmd: &ExtendCmd) -> Result<(), RunError> {
    match cmd {
        ExtendCmd::Riesz { problem } => {
            let p: RieszProblem = ctx.load("problem", problem)?;
            p.cone.validate()?;
            let out = extension::riesz_extend(&p.cone, &p.u_basis, &p.psi, &ctx.params)?;
            ctx.push(
                "riesz",
                Some(ext_verdict(&out.cert)),
                json!({
                    "u_meets_interior": out.preconditions.u_meets_interior,
                    "psi_nonneg_on_trace": out.preconditions.psi_nonneg_on_trace,
                }),
            );
        }
        ExtendCmd::Vector { problem } => {
            let p: VectorRieszProblem = ctx.load("problem", problem)?;
            p.c.validate()?;
            p.d.validate()?;
            let out = extension::riesz_extend_vector(
                &p.c,
                &p.d,
                &p.u_basis,
                &p.psi_images,
                &ctx.params,
            )
            .map_err(|e| RunError {
                message: e.to_string(),
            })?;
            let criterion = out.tensor_criterion.as_ref().map(|t| {
                json!({
                    "rays_tested": t.rays_tested,
                    "criterion_holds": t.criterion_holds,
                    "agrees_with_outcome": t.agrees_with_outcome,
                })
            });
            ctx.push(
                "vector_riesz",
                Some(ext_verdict(&out.cert)),
                json!({ "tensor_criterion": criterion }),
            );
        }
        ExtendCmd::Invariant { problem } => {
            let p: InvariantProblem = ctx.load("problem", problem)?;
            let rep_in = GroupRep::new(
                p.rep_in.elements_exact().map_err(|m| RunError { message: m })?,
                p.rep_in.cone.clone(),
                &ctx.params,
            )?;
            let rep_out = GroupRep::new(
                p.rep_out.elements_exact().map_err(|m| RunError { message: m })?,
                p.rep_out.cone.clone(),
                &ctx.params,
            )?;
            let out =
                extension::invariant_extend(&rep_in, &rep_out, &p.u_basis, &p.psi_images, &ctx.params)?;
            ctx.push(
                "invariant",
                Some(ext_verdict(&out.cert)),
                json!({
                    "fix_dim": out.report.fix_dim,
                    "b_generators": rat_mat_json(out.report.b_generators.clone()),
                    "a_halfspaces": rat_mat_json(out.report.a_halfspaces.clone()),
                }),
            );
        }
        ExtendCmd::Arveson { problem } => {
            let p: ArvesonProblem = ctx.load("problem", problem)?;
            let theta = Mat::from_rows(p.theta.clone());
            let psi = Mat::from_rows(p.psi.clone());
            let (out, pre) =
                extension::arveson_extend(&theta, p.d, &psi, p.t, p.iters, ctx.params.tol)?;
            let (verdict, data) = match out {
                ArvesonOutcome::Extended {
                    phi,
                    kraus,
                    residual,
                    iterations,
                } => {
                    let matrix: Vec<Vec<Rational>> = (0..phi.matrix.rows())
                        .map(|i| phi.matrix.row(i).to_vec())
                        .collect();
                    (
                        Verdict::yes(
                            "dykstra-projections",
                            Certificate::Extension { matrix, residual },
                        ),
                        json!({
                            "iterations": iterations,
                            "kraus_count": kraus.ops.len(),
                            "theta_surjective": pre.theta_surjective,
                            "theta_hits_interior": pre.theta_hits_interior,
                        }),
                    )
                }
                ArvesonOutcome::Undecided {
                    residual,
                    iterations,
                    reason,
                } => (
                    Verdict::unknown(reason),
                    json!({
                        "residual": residual,
                        "iterations": iterations,
                        "theta_surjective": pre.theta_surjective,
                        "theta_hits_interior": pre.theta_hits_interior,
                    }),
                ),
            };
            ctx.push("arveson", Some(verdict), data);
        }
    }
    Ok(())
}

fn run_tft(ctx: &mut Ctx, cmd: &TftCmd) -> Result<(), RunError> {
    match cmd {
        TftCmd::Build { m, k, cone } => {
            let level = TftLevel::new(*m, *k)?;
            let out = match cone {
                TftConeKind::B => tft::b_cone(&level)?,
                TftConeKind::A => tft::a_cone(&level)?,
            };
            ctx.push("tft_cone", None, json!({ "cone": out }));
        }
        TftCmd::Verify { m, k } => {
            let level = TftLevel::new(*m, *k)?;
            let report = tft::verify_tft_duality(&level, &ctx.params)?;
            let verdict = if report.all_pass {
                Verdict::Yes {
                    oracle: "exact-polyhedral-duality".into(),
                    certificate: None,
                }
            } else {
                Verdict::No {
                    oracle: "exact-polyhedral-duality".into(),
                    certificate: None,
                }
            };
            ctx.push("tft_verify", Some(verdict), serde_json::to_value(&report).unwrap());
        }
        TftCmd::Witness { m } => {
            let w = tft::assumption_failure_witness(*m, ctx.params.seed, ctx.params.budget)?;
            let verdict = Verdict::yes("crossed-pairing-search", w.separator.clone());
            ctx.push("tft_witness", Some(verdict), serde_json::to_value(&w).unwrap());
        }
    }
    Ok(())
}

fn run_verify(ctx: &mut Ctx, report_path: &Path) -> Result<(), RunError> {
    let report: RunReport = io::read_json(report_path).map_err(RunError::from)?;
    let outcome = crate::verify::verify_report(&report);
    let verdict = if outcome.ok {
        Verdict::Yes {
            oracle: "certificate-replay".into(),
            certificate: None,
        }
    } else {
        Verdict::No {
            oracle: "certificate-replay".into(),
            certificate: None,
        }
    };
    ctx.push(
        "verify",
        Some(verdict),
        json!({ "checked": outcome.checked, "failures": outcome.failures }),
    );
    Ok(())
}

fn rat_vec_json(v: Vec<Rational>) -> serde_json::Value {
    serde_json::Value::Array(
        v.iter()
            .map(|x| serde_json::Value::String(conekit::scalar::format_rational(x)))
            .collect(),
    )
}

fn rat_mat_json(m: Vec<Vec<Rational>>) -> serde_json::Value {
    serde_json::Value::Array(m.into_iter().map(rat_vec_json).collect())
}

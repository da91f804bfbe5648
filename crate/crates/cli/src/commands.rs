use std::path::Path;

use imkit_core::{
    approx_fidelity, approx_prob, conjugate_orthogonal_decomposition, equal_imaginarity_decomposition, feasibility_alpha_with,
    geometric_imaginarity, geometric_imaginarity_pure, is_covariant, is_free, merge_cp_maps, optimal_fidelity_pure_target_with,
    prob_exact, prob_upper_bound, real_entanglement_infidelity, real_entanglement_monotone, realify_covariant, ConversionResult,
    DensityMatrix, Ensemble, Error, PureState, Side, SolverConfig, Tolerances,
};
use rayon::prelude::*;

use crate::files::{kraus_file, matrix_rows, vector_entries, Loaded, MatrixFile};
use crate::report::{Curve, InputDigest, Member, Provenance, Report, Value};
use crate::{ActionArg, CliError, DecompositionArg, ModeArg};

pub struct Context {
    pub tol: Tolerances,
    pub curve: Option<usize>,
    pub solver: SolverConfig,
}

pub struct Input {
    pub loaded: Loaded,
    pub digest: InputDigest,
}

pub fn load(path: &Path, tol: &Tolerances) -> Result<Input, CliError> {
    let name = path.display().to_string();
    let bytes = std::fs::read(path).map_err(|e| CliError::Parse(format!("{name}: cannot read file: {e}")))?;
    let text = String::from_utf8(bytes.clone()).map_err(|_| CliError::Parse(format!("{name}: file is not UTF-8")))?;
    let loaded = MatrixFile::parse(&name, &text)?.validate(&name, &text, tol)?;
    let digest = InputDigest::new(&name, loaded.kind(), loaded.dims(), &bytes);
    Ok(Input { loaded, digest })
}

fn core_error(e: Error) -> CliError {
    match e {
        Error::Bracketing(_) | Error::BisectionFailed(_) | Error::Reconstruction(_) => CliError::Solver(e.to_string()),
        _ => CliError::Invariant(e.to_string()),
    }
}

fn state_of(input: &Input) -> Result<DensityMatrix, CliError> {
    input
        .loaded
        .density()
        .ok_or_else(|| CliError::Invariant(format!("{}: expected a state file, found a Kraus set", input.digest.path)))
}

fn pure_of(input: &Input, role: &str, mode: &str, tol: &Tolerances) -> Result<PureState, CliError> {
    let as_pure = match &input.loaded {
        Loaded::Pure(p) => Some(p.clone()),
        Loaded::Density(r) => r.as_pure(tol.psd),
        _ => None,
    };
    as_pure.ok_or_else(|| {
        CliError::Invariant(format!(
            "{mode} requires a pure {role} state, but {} is not pure; the analytic results hold for pure {role}s only",
            input.digest.path
        ))
    })
}

impl Context {
    fn report(&self, command: &str, inputs: Vec<InputDigest>, uses_solver: bool) -> Report {
        Report::new(command, inputs, Provenance::new(&self.tol, uses_solver.then_some(self.solver.gap_tol)))
    }

    fn reject_curve(&self, mode: &str) -> Result<(), CliError> {
        match self.curve {
            Some(_) => Err(CliError::Usage(format!(
                "--curve is not available in {mode} mode (use prob-at-fidelity, fidelity-at-prob or sdp-fidelity)"
            ))),
            None => Ok(()),
        }
    }

    fn curve_points(&self) -> Result<Option<usize>, CliError> {
        match self.curve {
            Some(n) if n < 2 => Err(CliError::Usage("--curve needs at least 2 points".into())),
            other => Ok(other),
        }
    }
}

pub fn measure(ctx: &Context, input: Input) -> Result<Report, CliError> {
    let rho = state_of(&input)?;
    let mut r = ctx.report("measure", vec![input.digest.clone()], false);
    let imag = match &input.loaded {
        Loaded::Pure(p) => geometric_imaginarity_pure(p),
        _ => geometric_imaginarity(&rho),
    };
    r.scalar("imaginarity", imag);
    r.push("real", Value::Flag(is_free(&rho)));
    if let Loaded::Bipartite(b) = &input.loaded {
        r.scalar("monotone_a", real_entanglement_monotone(b, Side::A));
        r.scalar("monotone_b", real_entanglement_monotone(b, Side::B));
        r.scalar("infidelity_a", real_entanglement_infidelity(b, Side::A));
        r.scalar("infidelity_b", real_entanglement_infidelity(b, Side::B));
    }
    Ok(r)
}

fn push_params(r: &mut Report, c: &ConversionResult) {
    r.scalar("probability", c.probability);
    r.scalar("fidelity", c.fidelity);
    r.scalar("alpha", c.params.alpha);
    r.scalar("beta", c.params.beta);
    r.scalar("k", c.params.k);
    r.scalar("m1", c.params.m1);
}

fn check_unit(name: &str, x: Option<f64>, flag: &str) -> Result<f64, CliError> {
    let x = x.ok_or_else(|| CliError::Usage(format!("this mode needs --{flag}")))?;
    if (0.0..=1.0).contains(&x) {
        Ok(x)
    } else {
        Err(CliError::Usage(format!("{name} {x} lies outside [0, 1]")))
    }
}

fn probability_arg(x: Option<f64>) -> Result<f64, CliError> {
    let p = check_unit("probability", x, "probability")?;
    if p == 0.0 {
        return Err(CliError::Usage("probability must be positive".into()));
    }
    Ok(p)
}

pub fn convert(
    ctx: &Context,
    source: Input,
    target: Input,
    mode: ModeArg,
    fidelity: Option<f64>,
    probability: Option<f64>,
) -> Result<Report, CliError> {
    let inputs = vec![source.digest.clone(), target.digest.clone()];
    let rho_src = state_of(&source)?;
    let rho_dst = state_of(&target)?;
    match mode {
        ModeArg::Exact => {
            ctx.reject_curve("exact")?;
            let mut r = ctx.report("convert exact", inputs, false);
            r.scalar("target_imaginarity", geometric_imaginarity(&rho_dst));
            match pure_of(&source, "source", "exact", &ctx.tol) {
                Ok(psi) => {
                    r.scalar("source_imaginarity", geometric_imaginarity_pure(&psi));
                    let p = prob_exact(&psi, &rho_dst);
                    r.scalar("probability", p);
                    r.push("deterministic", Value::Flag(p >= 1.0));
                }
                Err(_) => {
                    r.scalar("source_imaginarity", geometric_imaginarity(&rho_src));
                    r.scalar("probability_upper_bound", prob_upper_bound(&rho_src, &rho_dst));
                    r.push(
                        "note",
                        Value::Text("mixed source: the imaginarity ratio bounds the optimal probability from above".into()),
                    );
                }
            }
            Ok(r)
        }
        ModeArg::ProbAtFidelity => {
            let psi = pure_of(&source, "source", "prob-at-fidelity", &ctx.tol)?;
            let f = check_unit("fidelity", fidelity, "fidelity")?;
            let points = ctx.curve_points()?;
            let mut r = ctx.report("convert prob-at-fidelity", inputs, false);
            push_params(&mut r, &approx_prob(&psi, &rho_dst, f).map_err(core_error)?);
            if let Some(n) = points {
                let rows = (0..n)
                    .map(|i| {
                        let f = i as f64 / (n - 1) as f64;
                        approx_prob(&psi, &rho_dst, f).map(|c| vec![f, c.probability])
                    })
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(core_error)?;
                r.push("curve", Value::Curve(Curve { columns: vec!["fidelity".into(), "probability".into()], rows }));
            }
            Ok(r)
        }
        ModeArg::FidelityAtProb => {
            let psi = pure_of(&source, "source", "fidelity-at-prob", &ctx.tol)?;
            let p = probability_arg(probability)?;
            let points = ctx.curve_points()?;
            let mut r = ctx.report("convert fidelity-at-prob", inputs, false);
            push_params(&mut r, &approx_fidelity(&psi, &rho_dst, p).map_err(core_error)?);
            if let Some(n) = points {
                let rows = (1..=n)
                    .map(|i| {
                        let p = i as f64 / n as f64;
                        approx_fidelity(&psi, &rho_dst, p).map(|c| vec![p, c.fidelity])
                    })
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(core_error)?;
                r.push("curve", Value::Curve(Curve { columns: vec!["probability".into(), "fidelity".into()], rows }));
            }
            Ok(r)
        }
        ModeArg::Feasible => {
            ctx.reject_curve("feasible")?;
            let report = feasibility_alpha_with(&rho_src, &rho_dst, &ctx.solver);
            if !report.solver_status.is_usable() {
                return Err(CliError::Solver(format!(
                    "feasibility program ended with status {} (alpha = {}); no feasibility claim is made",
                    report.solver_status.as_str(),
                    report.alpha
                )));
            }
            let mut r = ctx.report("convert feasible", inputs, true);
            r.scalar("alpha", report.alpha);
            r.push("feasible", Value::Flag(report.feasible));
            r.push("solver_status", Value::Text(report.solver_status.as_str().into()));
            r.push("z_cert", Value::Matrix(matrix_rows(&report.z_cert)));
            r.push("x1_cert", Value::Matrix(matrix_rows(&report.x1_cert)));
            r.push("x2_cert", Value::Matrix(matrix_rows(&report.x2_cert)));
            Ok(r)
        }
        ModeArg::SdpFidelity => {
            let psi = pure_of(&target, "target", "sdp-fidelity", &ctx.tol)?;
            let p = probability_arg(probability)?;
            let points = ctx.curve_points()?;
            let solve = |p: f64| -> Result<imkit_core::SdpSolution, CliError> {
                let sol = optimal_fidelity_pure_target_with(&rho_src, &psi, p, &ctx.solver).map_err(core_error)?;
                if sol.solver_status.is_usable() {
                    Ok(sol)
                } else {
                    Err(CliError::Solver(format!(
                        "fidelity program at p = {p} ended with status {}",
                        sol.solver_status.as_str()
                    )))
                }
            };
            let sol = solve(p)?;
            let mut r = ctx.report("convert sdp-fidelity", inputs, true);
            r.scalar("probability", p);
            r.scalar("fidelity", sol.objective);
            r.push("solver_status", Value::Text(sol.solver_status.as_str().into()));
            if let Ok(phi) = pure_of(&source, "source", "sdp-fidelity", &ctx.tol) {
                r.scalar("analytic_fidelity", approx_fidelity(&phi, &psi.projector(), p).map_err(core_error)?.fidelity);
            }
            r.push("choi", Value::Matrix(matrix_rows(sol.choi.as_matrix())));
            if let Some(n) = points {
                let rows = (1..=n)
                    .into_par_iter()
                    .map(|i| {
                        let p = i as f64 / n as f64;
                        solve(p).map(|s| vec![p, s.objective])
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                r.push("curve", Value::Curve(Curve { columns: vec!["probability".into(), "fidelity".into()], rows }));
            }
            Ok(r)
        }
    }
}

fn members(e: &Ensemble, diag: Option<&[f64]>) -> Value {
    Value::Members(
        e.members()
            .iter()
            .enumerate()
            .map(|(k, (w, psi))| Member {
                weight: *w,
                imaginarity: geometric_imaginarity_pure(psi),
                conjugate_product: diag.map(|d| d[k]),
                amplitudes: vector_entries(psi.amplitudes()),
            })
            .collect(),
    )
}

pub fn decompose(ctx: &Context, input: Input, kind: DecompositionArg) -> Result<Report, CliError> {
    ctx.reject_curve("decompose")?;
    let rho = state_of(&input)?;
    let imag = geometric_imaginarity(&rho);
    match kind {
        DecompositionArg::ConjugateOrthogonal => {
            let co = conjugate_orthogonal_decomposition(&rho);
            let mut r = ctx.report("decompose conjugate-orthogonal", vec![input.digest], false);
            r.scalar("imaginarity", imag);
            r.scalar("average_imaginarity", co.ensemble.average_imaginarity());
            r.scalar("diag_sum", co.diag_sum());
            r.scalar("reconstruction_error", co.ensemble.reconstruction_error(&rho));
            r.push("members", members(&co.ensemble, Some(&co.diag)));
            Ok(r)
        }
        DecompositionArg::EqualImaginarity => {
            let e = equal_imaginarity_decomposition(&rho).map_err(core_error)?;
            let mut r = ctx.report("decompose equal-imaginarity", vec![input.digest], false);
            r.scalar("imaginarity", imag);
            r.scalar("reconstruction_error", e.reconstruction_error(&rho));
            r.push("members", members(&e, None));
            Ok(r)
        }
    }
}

pub fn kraus(ctx: &Context, input: Input, action: ActionArg, other: Option<Input>) -> Result<Report, CliError> {
    ctx.reject_curve("kraus")?;
    let Loaded::Kraus(k) = &input.loaded else {
        return Err(CliError::Invariant(format!("{}: expected a kraus_set file", input.digest.path)));
    };
    let mut inputs = vec![input.digest.clone()];
    match action {
        ActionArg::CheckReal => {
            let mut r = ctx.report("kraus check-real", inputs, false);
            r.push("real", Value::Flag(k.is_real()));
            r.scalar("max_imag", k.max_imag());
            Ok(r)
        }
        ActionArg::CheckCovariant => {
            let mut r = ctx.report("kraus check-covariant", inputs, false);
            r.push("covariant", Value::Flag(is_covariant(k)));
            r.scalar("covariance_residual", k.covariance_residual());
            Ok(r)
        }
        ActionArg::Realify => {
            let real = realify_covariant(k).map_err(|e| match e {
                Error::NotCovariant(res) => {
                    CliError::Invariant(format!("refusing to realify: map is not covariant (covariance residual {res:e})"))
                }
                other => core_error(other),
            })?;
            let mut r = ctx.report("kraus realify", inputs, false);
            r.scalar("max_imag", real.max_imag());
            r.scalar("action_distance", real.action_distance(k).map_err(core_error)?);
            r.push("kraus_set", Value::KrausSet(kraus_file(&real)));
            Ok(r)
        }
        ActionArg::Merge => {
            let other = other.ok_or_else(|| CliError::Usage("merge needs a second Kraus file via --with".into()))?;
            let Loaded::Kraus(k2) = &other.loaded else {
                return Err(CliError::Invariant(format!("{}: expected a kraus_set file", other.digest.path)));
            };
            inputs.push(other.digest.clone());
            let merged = merge_cp_maps(k, k2).map_err(core_error)?;
            let mut r = ctx.report("kraus merge", inputs, false);
            r.push("real", Value::Flag(merged.is_real()));
            r.push("kraus_set", Value::KrausSet(kraus_file(&merged)));
            Ok(r)
        }
    }
}

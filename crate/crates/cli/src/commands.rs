use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::Context;
use framescape::constructors::{
    direct_sum, gramian_of, harmonic_frame, mercedes_benz, mub12_4_frame, mubs_6_4_gramian, random_parseval,
    semicircle_frame, tensor_product,
};
use framescape::gram::residuals_of;
use framescape::io::{gram_to_json, matrix_from_json, trace_to_csv};
use framescape::optimizer::{
    anneal_grassmannian, descend, multi_start, verify_critical_point, DescentTrace, TerminalStatus,
};
use framescape::structures::{full_report, structure_report, StructureReport};
use framescape::verify::{run_suite, Suite};
use framescape::{Field, Gram, GramMatrix, HermMatrix, Tolerances};
use serde_json::json;

use crate::manifest::RunManifest;
use crate::settings::{self, ConfigFile, DescentArgs, GridArgs, ScheduleArgs, ToleranceArgs};
use crate::{Failure, EXIT_CHECK, EXIT_STALL};

/// Parses and validates a Gramian, reporting residuals when it is rejected.
fn parse_gram(path: &Path, bytes: &[u8], tol: &Tolerances) -> Result<Gram, Failure> {
    let text = std::str::from_utf8(bytes).map_err(|e| Failure::validation(format!("{}: {e}", path.display())))?;
    let (m, k, field) =
        matrix_from_json::<f64>(text).map_err(|e| Failure::validation(format!("{}: {e}", path.display())))?;
    let r = residuals_of(&m, k);
    HermMatrix::new(m, field, tol).and_then(|h| GramMatrix::validate(h, k, tol)).map_err(|e| {
        Failure::validation(format!(
            "{}: {e} (idempotency residual {:.3e}, trace gap {:.3e}, tolerance {:.0e})",
            path.display(),
            r.idempotency,
            r.trace_gap,
            tol.manifold
        ))
    })
}

fn read_gram(path: &Path, tol: &Tolerances) -> Result<Gram, Failure> {
    let bytes = std::fs::read(path).map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))?;
    parse_gram(path, &bytes, tol)
}

fn write_file(path: &Path, content: &str) -> Result<(), Failure> {
    std::fs::write(path, content).with_context(|| format!("writing {}", path.display())).map_err(Failure::io)
}

fn create_dir(dir: &Path) -> Result<(), Failure> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display())).map_err(Failure::io)
}

fn flag(v: bool) -> &'static str {
    if v {
        "yes"
    } else {
        "no"
    }
}

fn summary(r: &StructureReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "N = {}, K = {}, field {}", r.n, r.k, r.field);
    let _ = writeln!(s, "coherence        {:.12}", r.coherence);
    let _ = writeln!(s, "equal-norm       {} (deviation {:.2e})", flag(r.equal_norm.holds), r.equal_norm.deviation);
    let _ = writeln!(
        s,
        "equidistributed  {} (deviation {:.2e})",
        flag(r.equidistributed.holds),
        r.equidistributed.deviation
    );
    let _ = writeln!(s, "equiangular      {} (deviation {:.2e})", flag(r.equiangular.holds), r.equiangular.deviation);
    let _ = writeln!(
        s,
        "orthodecomposable {} ({} blocks)",
        flag(r.orthodecomposable.holds),
        r.orthodecomposable.partition.len()
    );
    let _ = writeln!(s, "zero entries     {}", flag(r.has_zero_entry));
    s
}

pub struct GenerateRequest {
    pub kind: String,
    pub n: Option<usize>,
    pub k: Option<usize>,
    pub seed: Option<u64>,
    pub field: Option<Field>,
    pub rows: Option<Vec<usize>>,
    pub left: Option<PathBuf>,
    pub right: Option<PathBuf>,
    pub output: Option<PathBuf>,
}

pub fn generate(cfg: &ConfigFile, req: GenerateRequest) -> Result<u8, Failure> {
    let tol = Tolerances::default();
    let need =
        |v: Option<usize>, name: &str| v.ok_or_else(|| Failure::usage(format!("--kind {} needs -{name}", req.kind)));
    let factor = |p: &Option<PathBuf>, name: &str| match p {
        Some(p) => read_gram(p, &tol),
        None => Err(Failure::usage(format!("--kind {} needs --{name}", req.kind))),
    };
    let g: Gram = match req.kind.as_str() {
        "harmonic" => {
            let frame =
                harmonic_frame(need(req.n, "n")?, need(req.k, "k")?, req.rows.as_deref()).map_err(Failure::usage)?;
            gramian_of(&frame).map_err(Failure::frame)?
        }
        "semicircle" => {
            gramian_of(&semicircle_frame(need(req.n, "n")?).map_err(Failure::usage)?).map_err(Failure::frame)?
        }
        "mercedes_benz" => gramian_of(&mercedes_benz()).map_err(Failure::frame)?,
        "mub12_4" => gramian_of(&mub12_4_frame()).map_err(Failure::frame)?,
        "mubs6_4" => mubs_6_4_gramian().map_err(Failure::frame)?,
        "identity" => GramMatrix::identity(need(req.n, "n")?, settings::field(cfg, req.field)?),
        "random" => {
            let seed = cfg.pick(req.seed, "seed", 0)?;
            let field = settings::field(cfg, req.field)?;
            random_parseval(need(req.n, "n")?, need(req.k, "k")?, field, seed).map_err(Failure::frame)?
        }
        "tensor" => tensor_product(&factor(&req.left, "left")?, &factor(&req.right, "right")?),
        "direct_sum" => direct_sum(&factor(&req.left, "left")?, &factor(&req.right, "right")?),
        other => return Err(Failure::usage(format!("unknown kind `{other}`"))),
    };
    // constructions are re-admitted at the strict tolerance before writing
    let g = GramMatrix::validate(g.herm().clone(), g.k(), &tol).map_err(Failure::frame)?;
    let r = g.residuals();
    let line = format!(
        "{}: N = {}, K = {}, field {}, idempotency residual {:.3e}, trace gap {:.3e}",
        req.kind,
        g.n(),
        g.k(),
        g.field(),
        r.idempotency,
        r.trace_gap
    );
    let json = gram_to_json(&g);
    match &req.output {
        Some(path) => {
            write_file(path, &json)?;
            outln!("{line}");
        }
        None => {
            outln!("{json}");
            eprintln!("{line}");
        }
    }
    Ok(0)
}

pub fn analyze(
    cfg: &ConfigFile,
    input: &Path,
    descent: &DescentArgs,
    grid: &GridArgs,
    tol: &ToleranceArgs,
    output: Option<&Path>,
) -> Result<u8, Failure> {
    let tol = settings::tolerances(cfg, tol)?;
    let g = read_gram(input, &tol)?;
    let params = settings::params(cfg, descent)?;
    let grid = settings::grid(cfg, grid)?;
    let report = full_report(&g, &params, &grid, &tol).map_err(Failure::usage)?;
    let verdict = verify_critical_point(&g, params.eta, &grid, &tol).map_err(Failure::usage)?;
    out!("{}", summary(&report.structure));
    outln!(
        "family-wise critical {} (max gradient norm {:.2e} over {} grid points, eta = {})",
        flag(report.criticality.is_family_wise),
        report.criticality.max_riemannian_grad_norm,
        report.criticality.grid.len(),
        params.eta
    );
    if let Some(v) = &verdict.violation {
        outln!("THEOREM VIOLATION: equidistribution mismatch {:.3e}", v.equidistribution_mismatch);
    }
    if let Some(path) = output {
        let value = json!({
            "input": input.display().to_string(),
            "params": params,
            "structure": report.structure,
            "criticality": report.criticality,
            "theorem_violation": verdict.violation,
        });
        write_file(path, &serde_json::to_string_pretty(&value).expect("report serializes"))?;
    }
    Ok(if verdict.violation.is_some() { EXIT_CHECK } else { 0 })
}

pub struct OptimizeRequest {
    pub input: Option<PathBuf>,
    pub random: Option<Vec<u64>>,
    pub field: Option<Field>,
    pub restarts: Option<usize>,
    pub descent: DescentArgs,
    pub tol: ToleranceArgs,
    pub out_dir: PathBuf,
}

fn status_name(s: TerminalStatus) -> &'static str {
    match s {
        TerminalStatus::Converged => "converged",
        TerminalStatus::MaxIters => "max_iters",
        TerminalStatus::StepUnderflow => "step_underflow",
    }
}

pub fn optimize(cfg: &ConfigFile, req: OptimizeRequest) -> Result<u8, Failure> {
    let tol = settings::tolerances(cfg, &req.tol)?;
    let potential = settings::potential(cfg, &req.descent, "combined")?;
    let mut manifest = RunManifest::start("optimize");
    let restarts = cfg.pick(req.restarts, "restarts", 1)?;
    let (g, trace, dcfg, start): (Gram, DescentTrace, _, serde_json::Value) = match (&req.input, &req.random) {
        (Some(path), None) => {
            if restarts != 1 {
                return Err(Failure::usage("--restarts needs a random start"));
            }
            let bytes = manifest.input(path)?;
            let g0 = parse_gram(path, &bytes, &tol)?;
            let dcfg = settings::descent_config(cfg, &req.descent, None, tol)?;
            let (g, t) = descend(&g0, &potential, &dcfg).map_err(Failure::frame)?;
            (g, t, dcfg, json!({ "file": path.display().to_string() }))
        }
        (None, Some(r)) => {
            let (n, k, seed) = (r[0] as usize, r[1] as usize, r[2]);
            let field = settings::field(cfg, req.field)?;
            let dcfg = settings::descent_config(cfg, &req.descent, Some(seed), tol)?;
            let best = multi_start(n, k, field, &potential, &dcfg, restarts).map_err(Failure::frame)?;
            let start = json!({ "random": { "n": n, "k": k, "field": field, "seed": seed, "restarts": restarts,
                "winner_seed": best.seed } });
            (best.gram, best.trace, dcfg, start)
        }
        _ => return Err(Failure::usage("give either an input file or --random N K SEED")),
    };
    create_dir(&req.out_dir)?;
    manifest.config = json!({ "start": start, "potential": potential, "descent": dcfg });
    manifest.write(&req.out_dir, "gram.json", &gram_to_json(&g))?;
    manifest.write(&req.out_dir, "trace.csv", &trace_to_csv(&trace.iterations))?;
    let report = structure_report(&g, potential.eta().unwrap_or(1.0), &tol).map_err(Failure::usage)?;
    let value = json!({
        "terminal_status": trace.terminal_status,
        "log_domain": trace.log_domain,
        "iterations": trace.last().iter,
        "final_value": trace.final_value_direct,
        "grad_norm": trace.last().grad_norm,
        "zero_entry_flags": trace.zero_entry_flags,
        "residuals": trace.final_residuals,
        "structure": report,
    });
    manifest.write(&req.out_dir, "report.json", &serde_json::to_string_pretty(&value).expect("report serializes"))?;
    let status = status_name(trace.terminal_status);
    manifest.finish(&req.out_dir, status)?;
    let last = trace.last();
    outln!(
        "{potential}: {status} after {} iterations, value {:.12e}, gradient norm {:.2e}",
        last.iter,
        trace.final_value_direct,
        last.grad_norm
    );
    out!("{}", summary(&report));
    Ok(if trace.terminal_status == TerminalStatus::StepUnderflow { EXIT_STALL } else { 0 })
}

pub struct AnnealRequest {
    pub n: usize,
    pub k: usize,
    pub field: Option<Field>,
    pub seed: Option<u64>,
    pub schedule: ScheduleArgs,
    pub descent: DescentArgs,
    pub tol: ToleranceArgs,
    pub out_dir: PathBuf,
}

pub fn anneal(cfg: &ConfigFile, req: AnnealRequest) -> Result<u8, Failure> {
    let tol = settings::tolerances(cfg, &req.tol)?;
    let potential = settings::potential(cfg, &req.descent, "sum")?;
    let schedule = settings::schedule(cfg, &req.schedule)?;
    let field = settings::field(cfg, req.field)?;
    let dcfg = settings::descent_config(cfg, &req.descent, req.seed, tol)?;
    let mut manifest = RunManifest::start("anneal");
    let result =
        anneal_grassmannian::<f64>(req.n, req.k, field, &potential, &schedule, &dcfg).map_err(Failure::frame)?;

    create_dir(&req.out_dir)?;
    manifest.config = json!({ "n": req.n, "k": req.k, "field": field, "potential": potential,
        "schedule": schedule, "descent": dcfg });
    let mut csv = String::from("stage,eta,value,mu,status,iterations,origin\n");
    for (m, (s, g)) in result.stages.iter().zip(&result.stage_grams).enumerate() {
        manifest.write(&req.out_dir, &format!("stage_{m:02}.json"), &gram_to_json(g))?;
        let _ =
            writeln!(csv, "{m},{},{},{},{},{},{}", s.eta, s.value, s.mu, status_name(s.status), s.iterations, s.origin);
    }
    manifest.write(&req.out_dir, "mu.csv", &csv)?;
    manifest.write(&req.out_dir, "best.json", &gram_to_json(&result.best))?;
    let value = json!({ "best_stage": result.best_stage, "stages": result.stages, "structure": result.report });
    manifest.write(&req.out_dir, "report.json", &serde_json::to_string_pretty(&value).expect("report serializes"))?;
    let best = &result.stages[result.best_stage];
    let status = status_name(best.status);
    manifest.finish(&req.out_dir, status)?;
    for s in &result.stages {
        outln!("eta {:>10}: mu {:.9} ({}, {} iterations)", s.eta, s.mu, status_name(s.status), s.iterations);
    }
    outln!("best stage {} at eta {}: mu = {:.12}", result.best_stage, best.eta, best.mu);
    out!("{}", summary(&result.report));
    Ok(if best.status == TerminalStatus::StepUnderflow { EXIT_STALL } else { 0 })
}

pub fn verify(suite: &str) -> Result<u8, Failure> {
    let suite: Suite = suite.parse().map_err(Failure::usage)?;
    let report = run_suite(suite).map_err(|e| Failure::new(EXIT_CHECK, e))?;
    out!("{}", report.tap());
    let failed: Vec<&str> = report.failures().map(|c| c.name.as_str()).collect();
    if failed.is_empty() {
        Ok(0)
    } else {
        eprintln!("{} check(s) failed:", failed.len());
        for name in failed {
            eprintln!("  {name}");
        }
        Ok(EXIT_CHECK)
    }
}

//! Resolution of run parameters: flags, then the `key = value` config file,
//! then defaults.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::Path;
use std::str::FromStr;

use clap::Args;
use framescape::optimizer::{AnnealSchedule, DescentConfig, Potential};
use framescape::structures::ParamGrid;
use framescape::{Field, PotentialParams, Tolerances};

use crate::Failure;

pub const KNOWN_KEYS: &[&str] = &[
    "potential",
    "alpha",
    "beta",
    "delta",
    "eta",
    "p",
    "field",
    "seed",
    "restarts",
    "max_iters",
    "grad_tol",
    "initial_step",
    "armijo_c",
    "backtrack_factor",
    "min_step",
    "detector_tol",
    "critical_tol",
    "grid_lo",
    "grid_hi",
    "grid_points",
    "eta_sequence",
    "eta_base",
    "stages",
    "restarts_per_eta",
    "warm_start",
];

/// Parsed config file; empty when none was given.
#[derive(Debug, Default)]
pub struct ConfigFile {
    values: BTreeMap<String, String>,
}

impl ConfigFile {
    pub fn load(path: Option<&Path>) -> Result<Self, Failure> {
        let Some(path) = path else { return Ok(Self::default()) };
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::usage(format!("cannot read config {}: {e}", path.display())))?;
        let values =
            framescape::io::parse_key_values(&text).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
        if let Some(bad) = values.keys().find(|k| !KNOWN_KEYS.contains(&k.as_str())) {
            return Err(Failure::usage(format!("{}: unknown key `{bad}`", path.display())));
        }
        Ok(Self { values })
    }

    /// `flag`, else the file's value for `key`, else `default`.
    pub fn pick<T>(&self, flag: Option<T>, key: &str, default: T) -> Result<T, Failure>
    where
        T: FromStr,
        T::Err: Display,
    {
        Ok(self.lookup(flag, key)?.unwrap_or(default))
    }

    pub fn lookup<T>(&self, flag: Option<T>, key: &str) -> Result<Option<T>, Failure>
    where
        T: FromStr,
        T::Err: Display,
    {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.values.get(key) {
            None => Ok(None),
            Some(raw) => raw.parse().map(Some).map_err(|e| Failure::usage(format!("config key `{key}`: {e}"))),
        }
    }
}

/// Potential and descent flags shared by `optimize` and `anneal`.
#[derive(Debug, Clone, Default, Args)]
pub struct DescentArgs {
    /// sum, diag, chain, combined or pframe
    #[arg(long)]
    pub potential: Option<String>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub eta: Option<f64>,
    /// Exponent of the p-th frame potential (1 or 2).
    #[arg(long)]
    pub p: Option<u32>,
    #[arg(long)]
    pub max_iters: Option<usize>,
    #[arg(long)]
    pub grad_tol: Option<f64>,
    #[arg(long)]
    pub initial_step: Option<f64>,
    #[arg(long)]
    pub armijo_c: Option<f64>,
    #[arg(long)]
    pub backtrack_factor: Option<f64>,
    #[arg(long)]
    pub min_step: Option<f64>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct ToleranceArgs {
    /// Absolute tolerance of the structure detectors.
    #[arg(long)]
    pub detector_tol: Option<f64>,
    /// Gradient norm below which a point counts as critical.
    #[arg(long)]
    pub critical_tol: Option<f64>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct GridArgs {
    #[arg(long)]
    pub grid_lo: Option<f64>,
    #[arg(long)]
    pub grid_hi: Option<f64>,
    #[arg(long)]
    pub grid_points: Option<usize>,
}

pub fn params(cfg: &ConfigFile, a: &DescentArgs) -> Result<PotentialParams, Failure> {
    let d = PotentialParams::default();
    let p = PotentialParams {
        alpha: cfg.pick(a.alpha, "alpha", d.alpha)?,
        beta: cfg.pick(a.beta, "beta", d.beta)?,
        delta: cfg.pick(a.delta, "delta", d.delta)?,
        eta: cfg.pick(a.eta, "eta", d.eta)?,
    };
    p.check().map_err(Failure::usage)?;
    Ok(p)
}

pub fn potential(cfg: &ConfigFile, a: &DescentArgs, default: &str) -> Result<Potential, Failure> {
    let name: String = cfg.pick(a.potential.clone(), "potential", default.to_string())?;
    let p = cfg.pick(a.p, "p", 2)?;
    Potential::from_name(&name, &params(cfg, a)?, p).map_err(Failure::usage)
}

pub fn tolerances(cfg: &ConfigFile, a: &ToleranceArgs) -> Result<Tolerances, Failure> {
    let d = Tolerances::default();
    Ok(Tolerances {
        detector: cfg.pick(a.detector_tol, "detector_tol", d.detector)?,
        critical: cfg.pick(a.critical_tol, "critical_tol", d.critical)?,
        ..d
    })
}

pub fn descent_config(
    cfg: &ConfigFile,
    a: &DescentArgs,
    seed: Option<u64>,
    tolerances: Tolerances,
) -> Result<DescentConfig, Failure> {
    let d = DescentConfig::default();
    let c = DescentConfig {
        params: params(cfg, a)?,
        max_iters: cfg.pick(a.max_iters, "max_iters", d.max_iters)?,
        grad_tol: cfg.pick(a.grad_tol, "grad_tol", d.grad_tol)?,
        initial_step: cfg.pick(a.initial_step, "initial_step", d.initial_step)?,
        armijo_c: cfg.pick(a.armijo_c, "armijo_c", d.armijo_c)?,
        backtrack_factor: cfg.pick(a.backtrack_factor, "backtrack_factor", d.backtrack_factor)?,
        min_step: cfg.pick(a.min_step, "min_step", d.min_step)?,
        seed: cfg.pick(seed, "seed", d.seed)?,
        tolerances,
    };
    c.check().map_err(Failure::usage)?;
    Ok(c)
}

pub fn grid(cfg: &ConfigFile, a: &GridArgs) -> Result<ParamGrid, Failure> {
    let d = ParamGrid::default();
    let lo = cfg.pick(a.grid_lo, "grid_lo", d.alpha[0])?;
    let hi = cfg.pick(a.grid_hi, "grid_hi", *d.alpha.last().expect("default grid is non-empty"))?;
    let points = cfg.pick(a.grid_points, "grid_points", d.alpha.len())?;
    let g = ParamGrid::uniform(lo, hi, points);
    g.check().map_err(Failure::usage)?;
    Ok(g)
}

pub fn field(cfg: &ConfigFile, flag: Option<Field>) -> Result<Field, Failure> {
    cfg.pick(flag, "field", Field::Real)
}

/// Comma separated list of numbers.
#[derive(Debug, Clone, PartialEq)]
pub struct NumberList(pub Vec<f64>);

impl FromStr for NumberList {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.split(',')
            .map(|t| t.trim().parse::<f64>().map_err(|_| format!("not a number: {t:?}")))
            .collect::<Result<_, _>>()
            .map(NumberList)
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct ScheduleArgs {
    /// Explicit η values, comma separated (overrides base and stages).
    #[arg(long)]
    pub eta_sequence: Option<NumberList>,
    /// Ratio of the geometric η schedule starting at 1.
    #[arg(long)]
    pub eta_base: Option<f64>,
    #[arg(long)]
    pub stages: Option<usize>,
    #[arg(long)]
    pub restarts_per_eta: Option<usize>,
    /// Start every stage from random draws only.
    #[arg(long)]
    pub no_warm_start: bool,
}

pub fn schedule(cfg: &ConfigFile, a: &ScheduleArgs) -> Result<AnnealSchedule, Failure> {
    let d = AnnealSchedule::default();
    let restarts = cfg.pick(a.restarts_per_eta, "restarts_per_eta", d.restarts_per_eta)?;
    let warm = if a.no_warm_start { false } else { cfg.pick(None, "warm_start", true)? };
    let explicit = cfg.lookup(a.eta_sequence.clone(), "eta_sequence")?;
    let mut s = match explicit {
        Some(NumberList(etas)) => AnnealSchedule { eta_sequence: etas, restarts_per_eta: restarts, warm_start: warm },
        None => {
            let base = cfg.pick(a.eta_base, "eta_base", 4.0)?;
            let stages = cfg.pick(a.stages, "stages", d.eta_sequence.len())?;
            AnnealSchedule::geometric(base, stages, restarts)
        }
    };
    s.warm_start = warm;
    s.check().map_err(Failure::usage)?;
    Ok(s)
}

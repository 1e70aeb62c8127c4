//! Self-check suites with TAP output.

use std::fmt::Write as _;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::chart::{chart_coordinates, chart_reconstruct};
use crate::config::Tolerances;
use crate::constructors::{
    direct_sum, gramian_of, harmonic_frame, mercedes_benz, mub12_4_frame, mubs_6_4_gramian, random_parseval,
    semicircle_frame, tensor_product,
};
use crate::error::{FrameError, Result};
use crate::gram::GramMatrix;
use crate::matrix::{cx, CMat};
use crate::optimizer::{descend, verify_critical_point, DescentConfig, Potential};
use crate::potentials::{
    chain_potential, combined_potential, diag_potential, exp_potential, grad_chain_potential, grad_combined,
    grad_diag_potential, grad_exp_potential, grad_row_sum, grad_sum_potential, potential_bounds, pth_potential,
    riemannian_grad_norm, row_sum_potential, sum_potential, BoundVariant, GradientAtIdentity, PotentialParams,
};
use crate::scalar::Field;
use crate::structures::{check_no_zero_threshold, ParamGrid};
use crate::tangent::TangentDirection;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Suite {
    Fixtures,
    Bounds,
    Gradients,
    Theorems,
    All,
}

impl FromStr for Suite {
    type Err = FrameError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fixtures" => Ok(Suite::Fixtures),
            "bounds" => Ok(Suite::Bounds),
            "gradients" => Ok(Suite::Gradients),
            "theorems" => Ok(Suite::Theorems),
            "all" => Ok(Suite::All),
            other => Err(FrameError::UnknownVariant(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self { name: name.into(), passed, detail: detail.into() }
    }

    fn at_most(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Self::new(name, value <= bound, format!("{value:.3e} <= {bound:.0e}"))
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct SuiteReport {
    pub checks: Vec<Check>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    /// TAP version 13 listing.
    pub fn tap(&self) -> String {
        let mut out = format!("TAP version 13\n1..{}\n", self.checks.len());
        for (i, c) in self.checks.iter().enumerate() {
            let status = if c.passed { "ok" } else { "not ok" };
            let _ = writeln!(out, "{status} {} - {} # {}", i + 1, c.name, c.detail);
        }
        out
    }
}

pub fn run_suite(suite: Suite) -> Result<SuiteReport> {
    let mut report = SuiteReport::default();
    let tol = Tolerances::default();
    let wanted = |s: Suite| suite == Suite::All || suite == s;
    if wanted(Suite::Fixtures) {
        fixtures_suite(&tol, &mut report.checks)?;
    }
    if wanted(Suite::Bounds) {
        bounds_suite(&mut report.checks)?;
    }
    if wanted(Suite::Gradients) {
        gradients_suite(&mut report.checks)?;
    }
    if wanted(Suite::Theorems) {
        theorems_suite(&tol, &mut report.checks)?;
    }
    Ok(report)
}

/// Every built-in fixture with its name.
pub fn fixtures() -> Result<Vec<(String, GramMatrix<f64>)>> {
    let mb = gramian_of(&mercedes_benz())?;
    Ok(vec![
        ("mercedes_benz".into(), mb.clone()),
        ("mubs6_4".into(), mubs_6_4_gramian()?),
        ("mub12_4".into(), gramian_of(&mub12_4_frame())?),
        ("harmonic_5_3".into(), gramian_of(&harmonic_frame(5, 3, None)?)?),
        ("harmonic_7_3".into(), gramian_of(&harmonic_frame(7, 3, None)?)?),
        ("semicircle_5".into(), gramian_of(&semicircle_frame(5)?)?),
        ("semicircle_6".into(), gramian_of(&semicircle_frame(6)?)?),
        ("mb_tensor_mb".into(), tensor_product(&mb, &mb)),
        ("mb_direct_sum_mb".into(), direct_sum(&mb, &mb)),
    ])
}

fn fixtures_suite(tol: &Tolerances, out: &mut Vec<Check>) -> Result<()> {
    for (name, g) in fixtures()? {
        let r = g.residuals();
        out.push(Check::at_most(format!("fixture {name} on manifold"), r.idempotency.max(r.trace_gap), tol.manifold));
        match chart_coordinates(&g, None, tol) {
            Ok(c) => {
                let back = chart_reconstruct(&c, g.n(), g.k(), tol)?;
                out.push(Check::at_most(format!("fixture {name} chart round trip"), back.hs_distance(&g), 1e-10));
            }
            Err(e) => out.push(Check::new(format!("fixture {name} chart round trip"), false, e.to_string())),
        }
    }
    let fixed = ["harmonic_5_3", "harmonic_7_3", "mubs6_4", "mub12_4", "semicircle_6"];
    for (name, g) in fixtures()?.into_iter().filter(|(n, _)| fixed.contains(&n.as_str())) {
        for eta in [0.5, 1.0, 2.0] {
            let norm = riemannian_grad_norm(&g, &grad_sum_potential(&g, eta))?;
            out.push(Check::at_most(format!("fixture {name} critical for sum potential at eta={eta}"), norm, 1e-8));
        }
    }
    Ok(())
}

fn bounds_suite(out: &mut Vec<Check>) -> Result<()> {
    for (n, k) in [(4usize, 2usize), (5, 3), (6, 4)] {
        let (mut p1, mut p2, mut diag, mut sum) = (0.0f64, f64::INFINITY, f64::INFINITY, f64::INFINITY);
        let elwood: f64 = potential_bounds(n, k, BoundVariant::Elwood)?;
        let dbound: f64 = potential_bounds(n, k, BoundVariant::Diagonal)?;
        let sbound: f64 = potential_bounds(n, k, BoundVariant::SumPotential(1.0))?;
        for seed in 0..100 {
            let field = if seed % 2 == 0 { Field::Real } else { Field::Complex };
            let g: GramMatrix<f64> = random_parseval(n, k, field, seed)?;
            p1 = p1.max((pth_potential(&g, 1.0)? - k as f64).abs());
            p2 = p2.min(pth_potential(&g, 2.0)? - elwood);
            diag = diag.min(g.diagonal().iter().map(|d| d * d).sum::<f64>() - dbound);
            sum = sum.min(sum_potential(&g, 1.0) - sbound);
        }
        out.push(Check::at_most(format!("({n},{k}) first frame potential equals K"), p1, 1e-9));
        out.push(Check::new(format!("({n},{k}) Elwood bound"), p2 >= -1e-12, format!("min slack {p2:.3e}")));
        out.push(Check::new(format!("({n},{k}) diagonal bound"), diag >= -1e-12, format!("min slack {diag:.3e}")));
        out.push(Check::new(format!("({n},{k}) sum potential bound"), sum >= -1e-12, format!("min slack {sum:.3e}")));
    }
    let mb = gramian_of(&mercedes_benz::<f64>())?;
    out.push(Check::at_most("Mercedes-Benz saturates Elwood", (pth_potential(&mb, 2.0)? - 2.0 / 3.0).abs(), 1e-10));
    let sb: f64 = potential_bounds(3, 2, BoundVariant::SumPotential(1.0))?;
    out.push(Check::at_most("Mercedes-Benz saturates sum bound", (sum_potential(&mb, 1.0) - sb).abs(), 1e-10));
    Ok(())
}

/// Central difference of `t ↦ f(e^{tA} G e^{−tA})` at 0.
pub fn directional_fd(g: &GramMatrix<f64>, a: &CMat<f64>, h: f64, f: impl Fn(&GramMatrix<f64>) -> f64) -> f64 {
    let moved = |t: f64| {
        let u = a.scale(t).expm();
        let m = u.matmul(g.matrix()).matmul(&u.adjoint());
        GramMatrix::from_matrix(
            m.hermitian_part(),
            g.field(),
            g.k(),
            &Tolerances { manifold: 1e-8, ..Default::default() },
        )
        .expect("conjugation stays on the manifold")
    };
    (f(&moved(h)) - f(&moved(-h))) / (2.0 * h)
}

/// Standard Gaussian anti-Hermitian direction (anti-symmetric over the reals).
pub fn random_direction(n: usize, field: Field, rng: &mut impl Rng) -> TangentDirection<f64> {
    let m = CMat::from_fn(n, n, |_, _| {
        let re: f64 = rng.sample(rand_distr::StandardNormal);
        let im: f64 = if field.is_real() { 0.0 } else { rng.sample(rand_distr::StandardNormal) };
        cx(re, im)
    });
    TangentDirection::new(m.anti_hermitian_part(), field)
}

type GradCase =
    (&'static str, Box<dyn Fn(&GramMatrix<f64>) -> f64>, Box<dyn Fn(&GramMatrix<f64>) -> GradientAtIdentity<f64>>);

fn gradient_cases() -> Vec<GradCase> {
    let p = PotentialParams::new(1.3, 0.7, 0.9, 1.1).expect("positive");
    vec![
        (
            "E_xy",
            Box::new(|g| exp_potential(g, 0, 1, 1.2).expect("index")),
            Box::new(|g| grad_exp_potential(g, 0, 1, 1.2).expect("index")),
        ),
        ("sum", Box::new(|g| sum_potential(g, 1.1)), Box::new(|g| grad_sum_potential(g, 1.1))),
        ("diag", Box::new(|g| diag_potential(g, 0.9)), Box::new(|g| grad_diag_potential(g, 0.9))),
        (
            "R_x",
            Box::new(|g| row_sum_potential(g, 1, 1.3, 0.7).expect("index")),
            Box::new(|g| grad_row_sum(g, 1, 1.3, 0.7).expect("index")),
        ),
        ("chain", Box::new(|g| chain_potential(g, 1.3, 0.7)), Box::new(|g| grad_chain_potential(g, 1.3, 0.7))),
        ("combined", Box::new(move |g| combined_potential(g, &p)), Box::new(move |g| grad_combined(g, &p))),
    ]
}

fn gradients_suite(out: &mut Vec<Check>) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x6772_6164);
    for (name, f, grad) in gradient_cases() {
        for (n, k) in [(4usize, 2usize), (5, 3)] {
            let mut worst = 0.0f64;
            for inst in 0..20u64 {
                let field = if inst % 2 == 0 { Field::Complex } else { Field::Real };
                let g = random_parseval(n, k, field, 1000 + inst)?;
                let gr = grad(&g);
                for _ in 0..5 {
                    let a = random_direction(n, field, &mut rng);
                    let fd = directional_fd(&g, a.matrix(), 1e-6, &f);
                    let an = gr.directional(&a);
                    worst = worst.max((fd - an).abs() / fd.abs().max(an.abs()).max(1e-12));
                }
            }
            out.push(Check::at_most(
                format!("gradient of {name} on ({n},{k}) matches finite differences"),
                worst,
                1e-4,
            ));
        }
    }
    Ok(())
}

fn theorems_suite(tol: &Tolerances, out: &mut Vec<Check>) -> Result<()> {
    let grid = ParamGrid::default();
    let mut candidates = fixtures()?;
    let cfg = DescentConfig::default();
    let pot = Potential::combined(&PotentialParams::default());
    for (n, k) in [(3usize, 2usize), (5, 2)] {
        for seed in 0..3u64 {
            let g0 = random_parseval(n, k, Field::Real, seed)?;
            let (g, trace) = descend(&g0, &pot, &cfg)?;
            out.push(Check::new(
                format!("descent ({n},{k}) seed {seed} monotone"),
                trace.is_monotone(),
                format!("{:?} after {} iterations", trace.terminal_status, trace.last().iter),
            ));
            if trace.converged() {
                candidates.push((format!("descent_{n}_{k}_seed{seed}"), g));
            }
        }
    }
    for (name, g) in &candidates {
        let v = verify_critical_point(g, 1.0, &grid, tol)?;
        let detail = format!(
            "family-wise {} (max grad {:.1e}), zero entry {}, equidistribution mismatch {:.1e}",
            v.criticality.is_family_wise,
            v.criticality.max_riemannian_grad_norm,
            v.structure.has_zero_entry,
            v.structure.equidistributed.deviation
        );
        out.push(Check::new(format!("{name} criticality implies equidistribution"), v.violation.is_none(), detail));
        let nz = check_no_zero_threshold(g, 1.0)?;
        out.push(Check::new(
            format!("{name} below no-zero threshold implies nonzero entries"),
            nz.implication_holds,
            format!("log value {:.6} vs log threshold {:.6}", nz.log_value, nz.log_threshold),
        ));
    }
    Ok(())
}

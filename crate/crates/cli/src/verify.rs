//! Named verification suites run by `micropolar verify <suite>`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use micropolar::diagnostics::record;
use micropolar::dynamics::{integrate, make_initial, IcKind, InitialCondition, Stepper, StepperConfig};
use micropolar::inequality::{
    calibration_ensemble_max, gn_ratio_grad, gn_ratio_infty, CALIBRATED_C_INF, CALIBRATION_BAND,
    CALIBRATION_COUNT, CALIBRATION_N, CALIBRATION_SEED,
};
use micropolar::ops::{
    advect, curl, dealias, divergence, grad_div, gradient, laplacian, leray_project,
};
use micropolar::semigroup::{
    duhamel_reconstruct_w, duhamel_reconstruct_z, duhamel_terms, gaussian_bump, gaussian_heat_norm,
    heat_apply, lemma2_cases, lemma2_window, run_lemma2_case,
};
use micropolar::{make_grid, random, PhysicalParams, RealVectorField, Result, SimState};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::config::RunConfig;

/// Bundled 16³ config used by the energy suite.
pub const ENERGY_CONFIG: &str = include_str!("../configs/energy16.toml");

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Ops,
    Lemma1,
    Lemma2,
    Duhamel,
    Energy,
}

impl Suite {
    pub const ALL: [Suite; 5] = [Suite::Ops, Suite::Lemma1, Suite::Lemma2, Suite::Duhamel, Suite::Energy];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Ops => "ops",
            Suite::Lemma1 => "lemma1",
            Suite::Lemma2 => "lemma2",
            Suite::Duhamel => "duhamel",
            Suite::Energy => "energy",
        }
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| {
                let names: Vec<&str> = Suite::ALL.iter().map(|x| x.name()).collect();
                format!("unknown suite `{s}`, expected one of {}", names.join(", "))
            })
    }
}

/// One measured quantity against its limit.
#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub measured: f64,
    pub limit: f64,
    /// `measured <= limit` when true, `measured >= limit` otherwise.
    pub upper: bool,
}

impl Check {
    pub fn at_most(name: impl Into<String>, measured: f64, limit: f64) -> Self {
        Self {
            name: name.into(),
            measured,
            limit,
            upper: true,
        }
    }

    pub fn at_least(name: impl Into<String>, measured: f64, limit: f64) -> Self {
        Self {
            name: name.into(),
            measured,
            limit,
            upper: false,
        }
    }

    pub fn passed(&self) -> bool {
        if self.upper {
            self.measured <= self.limit
        } else {
            self.measured >= self.limit
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed() { "PASS" } else { "FAIL" };
        let op = if self.upper { "<=" } else { ">=" };
        write!(f, "{status} {}: {:.6e} {op} {:.6e}", self.name, self.measured, self.limit)
    }
}

pub fn run_suite(suite: Suite) -> Result<Vec<Check>> {
    match suite {
        Suite::Ops => ops_suite(),
        Suite::Lemma1 => lemma1_suite(),
        Suite::Lemma2 => lemma2_suite(),
        Suite::Duhamel => duhamel_suite(),
        Suite::Energy => energy_suite(),
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub const OPS_FIELDS: usize = 100;
pub const GN_FIELDS: usize = 1000;

pub fn ops_suite() -> Result<Vec<Check>> {
    let g = make_grid(8, 5.0)?;
    let mut r = rng(2024);
    let mut worst = [0.0f64; 8];
    for _ in 0..OPS_FIELDS {
        let f = random::band_limited(&g, 3, &mut r);
        let h = random::band_limited(&g, 3, &mut r);
        let p = divergence(&f);
        let grad = gradient(&p);
        worst[0] = worst[0].max(curl(&grad).max_abs() / grad.max_abs());
        let c = curl(&f);
        worst[1] = worst[1].max(divergence(&c).max_abs() / c.max_abs());
        let lap = laplacian(&f);
        worst[2] = worst[2].max(grad_div(&f).sub(&curl(&c)).max_abs_diff(&lap) / lap.max_abs());
        let pf = leray_project(&f);
        worst[3] = worst[3].max(leray_project(&pf).max_abs_diff(&pf) / pf.max_abs());
        let adj = (pf.inner(&h) - f.inner(&leray_project(&h))).abs() / (f.l2_norm() * h.l2_norm());
        worst[4] = worst[4].max(adj);
        worst[5] = worst[5].max(divergence(&pf).l2_norm() / f.dm_norm_sq(1).sqrt());
        let v = random::solenoidal(&g, 2, &mut r);
        let s = dealias(&h);
        let skew = advect(&v, &s).inner(&s).abs() / (v.to_real().linf_norm() * s.dm_norm_sq(1).sqrt() * s.l2_norm());
        worst[6] = worst[6].max(skew);
        let d = dealias(&f);
        worst[7] = worst[7].max(dealias(&d).max_abs_diff(&d));
    }
    let mut gn = 0.0f64;
    for i in 0..GN_FIELDS {
        let u = random::band_limited(&g, 1 + (i % 3) as i64, &mut r).to_real();
        gn = gn.max(gn_ratio_grad(&u)?);
    }
    Ok(vec![
        Check::at_most("curl of gradient", worst[0], 1e-12),
        Check::at_most("divergence of curl", worst[1], 1e-12),
        Check::at_most("grad div - curl curl = laplacian", worst[2], 1e-12),
        Check::at_most("leray idempotent", worst[3], 1e-12),
        Check::at_most("leray self-adjoint", worst[4], 1e-12),
        Check::at_most("leray divergence-free", worst[5], 1e-12),
        Check::at_most("advection skew-symmetry", worst[6], 1e-11),
        Check::at_most("dealias idempotent", worst[7], 0.0),
        Check::at_most("max gn_ratio_grad over 1000 fields", gn, 1.0 + 1e-12),
    ])
}

pub fn lemma1_suite() -> Result<Vec<Check>> {
    let g = make_grid(16, 2.0 * PI)?;
    let sine = RealVectorField::from_fn(&g, |x, _, _| [x.sin(), 0.0, 0.0])?;
    let single = (gn_ratio_infty(&sine)? * (4.0 * PI.powi(3)).sqrt() - 1.0).abs();
    let mut r = rng(7);
    let u = random::band_limited(&g, 4, &mut r).to_real();
    let base = gn_ratio_infty(&u)?;
    let mut scale = 0.0f64;
    for s in [1e-3, -2.5, 7.0, 1e5] {
        scale = scale.max((gn_ratio_infty(&u.scale(s))? - base).abs() / base);
    }
    let two = RealVectorField::from_fn(&g, |x, _, z| [x.sin() + (2.0 * z).cos(), 0.0, 0.0])?;
    let mut gn = 0.0f64;
    let small = make_grid(8, 3.0)?;
    for i in 0..GN_FIELDS {
        let v = random::band_limited(&small, 1 + (i % 3) as i64, &mut r).to_real();
        gn = gn.max(gn_ratio_grad(&v)?);
    }
    let c = calibration_ensemble_max(CALIBRATION_N, CALIBRATION_BAND, CALIBRATION_COUNT, CALIBRATION_SEED)?;
    Ok(vec![
        Check::at_most("gn_ratio_infty single mode vs (4π³)^(-1/2)", single, 1e-12),
        Check::at_most("gn_ratio_infty scale invariance", scale, 1e-13),
        Check::at_most("gn_ratio_grad single mode", (gn_ratio_grad(&sine)? - 1.0).abs(), 1e-13),
        Check::at_most("gn_ratio_grad two modes", gn_ratio_grad(&two)?, 1.0 - 1e-3),
        Check::at_most("max gn_ratio_grad over 1000 fields", gn, 1.0 + 1e-12),
        Check::at_most("calibrated C_inf regression", (c - CALIBRATED_C_INF).abs() / CALIBRATED_C_INF, 1e-12),
    ])
}

pub fn lemma2_suite() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for case in lemma2_cases() {
        let fit = run_lemma2_case(&case)?;
        let m: u32 = case.alpha.iter().sum();
        out.push(Check::at_most(
            format!(
                "slope r = {}, m = {m}: {:.4} vs {:.4}",
                case.r, fit.slope, fit.expected_slope
            ),
            (fit.slope - fit.expected_slope).abs(),
            0.05,
        ));
    }
    let g = make_grid(64, 2.0 * PI)?;
    let sigma = g.box_length() / 20.0;
    let f = gaussian_bump(&g, sigma, 1.0)?.to_spectral();
    let nu = 0.4;
    let tmax = lemma2_window(&g, nu);
    let mut worst = 0.0f64;
    for j in 0..=10 {
        let tau = tmax * j as f64 / 10.0;
        let got = heat_apply(&f, nu, tau)?.l2_norm();
        let want = gaussian_heat_norm(1.0, sigma, nu, tau);
        worst = worst.max((got - want).abs() / want);
    }
    out.push(Check::at_most("gaussian closed-form norm in window", worst, 1e-6));
    Ok(out)
}

/// Baseline sampling interval of the Duhamel suite.
pub const DUHAMEL_DT: f64 = 0.025;

fn duhamel_trajectory(chi: f64, dt: f64, t_end: f64) -> Result<(PhysicalParams, Vec<SimState>)> {
    let g = make_grid(16, 8.0 * PI)?;
    let p = PhysicalParams::new(0.5, 0.3, chi)?;
    let ic = InitialCondition {
        kind: IcKind::RandomSolenoidal,
        energy_spectrum_peak: 0.75,
        amplitude: 1.0,
        seed: 11,
    };
    let s0 = make_initial(&ic, &g)?;
    let stepper = Stepper::new(&g, p, StepperConfig::new(dt, t_end)?)?;
    let mut traj = vec![s0.clone()];
    integrate(&stepper, s0, |_, s| {
        traj.push(s.clone());
        Ok(())
    })?;
    Ok((p, traj))
}

pub fn duhamel_suite() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for chi in [0.0, 0.4] {
        let (p, traj) = duhamel_trajectory(chi, DUHAMEL_DT / 2.0, 2.0)?;
        let baseline = if chi > 0.0 {
            duhamel_reconstruct_z(traj.iter().step_by(2), &p)?.max()
        } else {
            duhamel_reconstruct_w(traj.iter().step_by(2), &p)?.max()
        };
        let halved = if chi > 0.0 {
            duhamel_reconstruct_z(&traj, &p)?.max()
        } else {
            duhamel_reconstruct_w(&traj, &p)?.max()
        };
        let form = if chi > 0.0 { "z-substituted" } else { "direct" };
        out.push(Check::at_most(format!("chi = {chi}: {form} residual at baseline"), baseline, 1e-4));
        out.push(Check::at_least(format!("chi = {chi}: reduction on halved sampling"), baseline / halved, 3.5));
        out.push(Check::at_most(format!("chi = {chi}: reduction on halved sampling"), baseline / halved, 4.5));
        let led = duhamel_terms(traj.iter().skip(8).step_by(2), &p)?;
        let worst_ii = led
            .term_ii
            .iter()
            .zip(&led.bound_ii)
            .map(|(a, b)| a / b)
            .fold(0.0, f64::max);
        let worst_iii = led
            .term_iii
            .iter()
            .zip(&led.bound_iii)
            .map(|(a, b)| a / b)
            .fold(0.0, f64::max);
        out.push(Check::at_most(format!("chi = {chi}: term II / Γ(1/4) bound"), worst_ii, 1.0));
        out.push(Check::at_most(format!("chi = {chi}: term III / √π bound"), worst_iii, 1.0));
    }
    Ok(out)
}

/// Energy-ledger statistics of one in-memory run.
#[derive(Clone, Debug, PartialEq)]
pub struct LedgerRun {
    pub max_excess: f64,
    pub max_balance: f64,
    pub final_state: SimState,
}

/// Runs `cfg` at `dt / refine` and tracks the ledger at every step.
pub fn ledger_run(cfg: &RunConfig, refine: u32) -> Result<LedgerRun> {
    let grid = cfg.make_grid()?;
    let p = cfg.physical_params()?;
    let mut sc = cfg.stepper_config()?;
    sc.dt /= refine as f64;
    let s0 = make_initial(&cfg.initial_condition(), &grid)?;
    let stepper = Stepper::new(&grid, p, sc)?;
    let mut rec = record(&s0, &p, None)?;
    let (mut max_excess, mut max_balance) = (0.0f64, 0.0f64);
    let final_state = integrate(&stepper, s0, |_, s| {
        rec = record(s, &p, Some(&rec))?;
        if rec.energy_ledger_rhs > 0.0 {
            max_excess = max_excess.max(rec.energy_ledger_lhs / rec.energy_ledger_rhs - 1.0);
        }
        max_balance = max_balance.max(rec.balance_residual);
        Ok(())
    })?;
    Ok(LedgerRun {
        max_excess,
        max_balance,
        final_state,
    })
}

pub fn energy_suite() -> Result<Vec<Check>> {
    let cfg = RunConfig::parse(ENERGY_CONFIG)?;
    let reference = ledger_run(&cfg, 1)?;
    let quarter = ledger_run(&cfg, 4)?;
    Ok(vec![
        Check::at_most("ledger lhs / rhs - 1 at dt", reference.max_excess, 1e-8),
        Check::at_most("balance residual at dt", reference.max_balance, 1e-8),
        Check::at_most("ledger lhs / rhs - 1 at dt/4", quarter.max_excess, 1e-8),
        Check::at_most("balance residual at dt/4", quarter.max_balance, 1e-10),
    ])
}

/// Prints every check and returns whether all passed.
pub fn report_checks(suite: Suite, checks: &[Check]) -> bool {
    for c in checks {
        println!("[{}] {c}", suite.name());
    }
    checks.iter().all(Check::passed)
}

//! Right-hand sides of the micropolar system, the integrating-factor RK4
//! stepper, pressure recovery and initial conditions.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rustfft::num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{RealVectorField, ScalarField, SimState, SpectralScalarField, SpectralVectorField};
use crate::grid::{Grid, PhysicalParams};
use crate::ops::{self, dealias, grad_div, laplacian, leray_project};

pub const DEFAULT_CFL_SAFETY: f64 = 0.5;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepperConfig {
    pub dt: f64,
    pub t_end: f64,
    /// Upper bound on the Courant number, in (0, 1].
    pub cfl_safety: f64,
    pub dealias: bool,
}

impl StepperConfig {
    pub fn new(dt: f64, t_end: f64) -> Result<Self> {
        let cfg = Self {
            dt,
            t_end,
            cfl_safety: DEFAULT_CFL_SAFETY,
            dealias: true,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::InvalidArgument(format!("dt must be > 0, got {}", self.dt)));
        }
        if !(self.t_end.is_finite() && self.t_end > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "t_end must be > 0, got {}",
                self.t_end
            )));
        }
        if !(self.cfl_safety > 0.0 && self.cfl_safety <= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "cfl_safety must lie in (0, 1], got {}",
                self.cfl_safety
            )));
        }
        Ok(())
    }

    /// Number of steps needed to reach `t_end` from zero.
    pub fn n_steps(&self) -> u64 {
        (self.t_end / self.dt - 1e-9).ceil().max(0.0) as u64
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Deserialize, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum IcKind {
    TaylorGreenLike,
    RandomSolenoidal,
    SingleMode,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InitialCondition {
    pub kind: IcKind,
    /// Peak wavenumber of the energy spectrum, in units of 1/length.
    pub energy_spectrum_peak: f64,
    /// RMS velocity of `u₀` (and of `w₀`).
    pub amplitude: f64,
    pub seed: u64,
}

/// Linear part of the right-hand side: `(μ+χ)Δu` and `γΔw + ∇(∇·w) − 2χw`.
pub fn linear_terms(state: &SimState, p: &PhysicalParams) -> (SpectralVectorField, SpectralVectorField) {
    let lu = laplacian(&state.u).scale(p.mu + p.chi);
    let lw = laplacian(&state.w)
        .scale(p.gamma)
        .add(&grad_div(&state.w))
        .axpy(-2.0 * p.chi, &state.w);
    (lu, lw)
}

/// Explicit part before projection: `−(u·∇)u + χ∇×w`, `−(u·∇)w + χ∇×u`, and `max|u|`.
fn explicit_raw(
    state: &SimState,
    chi: f64,
    dealiased: bool,
) -> (SpectralVectorField, SpectralVectorField, f64) {
    let (au, aw, speed) = ops::advect_solenoidal(&state.u, &state.w, dealiased);
    let grid = state.grid().clone();
    let (u, w) = (&state.u, &state.w);
    let nu = au.map_modes(|idx, a| {
        let k = grid.wavevector(idx);
        let c = cross_ik(k, w.at(idx));
        [chi * c[0] - a[0], chi * c[1] - a[1], chi * c[2] - a[2]]
    });
    let nw = aw.map_modes(|idx, a| {
        let k = grid.wavevector(idx);
        let c = cross_ik(k, u.at(idx));
        [chi * c[0] - a[0], chi * c[1] - a[1], chi * c[2] - a[2]]
    });
    (nu, nw, speed)
}

/// `i k × v`.
#[inline]
fn cross_ik(k: [f64; 3], v: [Complex64; 3]) -> [Complex64; 3] {
    let i = Complex64::i();
    [
        i * (v[2] * k[1] - v[1] * k[2]),
        i * (v[0] * k[2] - v[2] * k[0]),
        i * (v[1] * k[0] - v[0] * k[1]),
    ]
}

/// Explicit part: `P[−(u·∇)u + χ∇×w]` and `−(u·∇)w + χ∇×u`.
pub fn explicit_terms(
    state: &SimState,
    p: &PhysicalParams,
    dealiased: bool,
) -> (SpectralVectorField, SpectralVectorField) {
    let (nu, nw, _) = explicit_raw(state, p.chi, dealiased);
    (leray_project(&nu), nw)
}

/// Both right-hand sides sharing one advection evaluation.
pub fn rhs(state: &SimState, p: &PhysicalParams) -> (SpectralVectorField, SpectralVectorField) {
    let (nu, nw) = explicit_terms(state, p, true);
    let (lu, lw) = linear_terms(state, p);
    (nu.add(&lu), nw.add(&lw))
}

/// `P[−(u·∇)u + χ∇×w] + (μ+χ)Δu`.
pub fn rhs_u(state: &SimState, p: &PhysicalParams) -> SpectralVectorField {
    rhs(state, p).0
}

/// `−(u·∇)w + γΔw + ∇(∇·w) + χ∇×u − 2χw`.
pub fn rhs_w(state: &SimState, p: &PhysicalParams) -> SpectralVectorField {
    rhs(state, p).1
}

/// Exact per-mode factors of the linear terms over a fixed time.
struct LinearFactors {
    u: Vec<f64>,
    w_solenoidal: Vec<f64>,
    w_curl_free: Vec<f64>,
}

impl LinearFactors {
    fn new(grid: &Grid, p: &PhysicalParams, tau: f64) -> Self {
        let k2 = grid.k_squared();
        let len = grid.len();
        let mut u = Vec::with_capacity(len);
        let mut ws = Vec::with_capacity(len);
        let mut wc = Vec::with_capacity(len);
        for &k2 in k2 {
            u.push((-(p.mu + p.chi) * k2 * tau).exp());
            ws.push((-(p.gamma * k2 + 2.0 * p.chi) * tau).exp());
            wc.push((-((p.gamma + 1.0) * k2 + 2.0 * p.chi) * tau).exp());
        }
        Self {
            u,
            w_solenoidal: ws,
            w_curl_free: wc,
        }
    }
}

#[derive(Clone, Copy)]
enum Prop {
    Identity,
    Half,
    Full,
}

/// Courant number `dt (max_x |u| / Δx + χ k_max)`.
pub fn courant_number(state: &SimState, p: &PhysicalParams, dt: f64) -> f64 {
    let u = state.u.to_real();
    let speed = (0..state.grid().len())
        .map(|i| {
            u.component(0)[i].powi(2) + u.component(1)[i].powi(2) + u.component(2)[i].powi(2)
        })
        .fold(0.0, f64::max)
        .sqrt();
    courant_from_speed(state.grid(), p, dt, speed)
}

fn courant_from_speed(grid: &Grid, p: &PhysicalParams, dt: f64, speed: f64) -> f64 {
    let k_max = grid.dealias_cutoff() as f64 * grid.k_min() * 3f64.sqrt();
    dt * (speed / grid.dx() + p.chi * k_max)
}

/// Integrating-factor RK4 stepper with precomputed linear factors.
pub struct Stepper {
    params: PhysicalParams,
    cfg: StepperConfig,
    frozen_velocity: bool,
    grid: Grid,
    half: LinearFactors,
    full: LinearFactors,
    keep: Vec<bool>,
}

impl Stepper {
    pub fn new(grid: &Grid, params: PhysicalParams, cfg: StepperConfig) -> Result<Self> {
        params.validate()?;
        cfg.validate()?;
        let keep = (0..grid.len())
            .map(|idx| idx != 0 && !grid.has_nyquist(idx) && (!cfg.dealias || grid.retained(idx)))
            .collect();
        Ok(Self {
            params,
            cfg,
            frozen_velocity: false,
            grid: grid.clone(),
            half: LinearFactors::new(grid, &params, 0.5 * cfg.dt),
            full: LinearFactors::new(grid, &params, cfg.dt),
            keep,
        })
    }

    /// Keeps `u` fixed at its current value while `w` evolves.
    pub fn with_frozen_velocity(mut self, frozen: bool) -> Self {
        self.frozen_velocity = frozen;
        self
    }

    pub fn config(&self) -> &StepperConfig {
        &self.cfg
    }

    pub fn params(&self) -> &PhysicalParams {
        &self.params
    }

    fn factors(&self, prop: Prop) -> Option<&LinearFactors> {
        match prop {
            Prop::Identity => None,
            Prop::Half => Some(&self.half),
            Prop::Full => Some(&self.full),
        }
    }

    /// `P Σ c E(v)` for velocity terms, masked.
    fn combine_u(&self, terms: &[(f64, Prop, &SpectralVectorField)]) -> SpectralVectorField {
        let grid = &self.grid;
        let k2 = grid.k_squared();
        let zero = Complex64::default();
        let mut out: [Vec<Complex64>; 3] = std::array::from_fn(|_| vec![zero; grid.len()]);
        for idx in 0..grid.len() {
            if !self.keep[idx] {
                continue;
            }
            let mut acc = [zero; 3];
            for (c, prop, f) in terms {
                let e = self.factors(*prop).map_or(1.0, |x| x.u[idx]) * c;
                let v = f.at(idx);
                for a in 0..3 {
                    acc[a] += v[a] * e;
                }
            }
            let k = grid.wavevector(idx);
            let kc = (acc[0] * k[0] + acc[1] * k[1] + acc[2] * k[2]) / k2[idx];
            for a in 0..3 {
                out[a][idx] = acc[a] - kc * k[a];
            }
        }
        SpectralVectorField::from_parts(grid, out)
    }

    /// `Σ c E(v)` for micro-rotation terms, masked.
    fn combine_w(&self, terms: &[(f64, Prop, &SpectralVectorField)]) -> SpectralVectorField {
        let grid = &self.grid;
        let k2 = grid.k_squared();
        let zero = Complex64::default();
        let mut out: [Vec<Complex64>; 3] = std::array::from_fn(|_| vec![zero; grid.len()]);
        for idx in 0..grid.len() {
            if !self.keep[idx] {
                continue;
            }
            let k = grid.wavevector(idx);
            let mut acc = [zero; 3];
            for (c, prop, f) in terms {
                let v = f.at(idx);
                match self.factors(*prop) {
                    None => {
                        for a in 0..3 {
                            acc[a] += v[a] * *c;
                        }
                    }
                    Some(x) => {
                        let es = x.w_solenoidal[idx] * c;
                        let ec = x.w_curl_free[idx] * c;
                        let kc = (v[0] * k[0] + v[1] * k[1] + v[2] * k[2]) / k2[idx] * (ec - es);
                        for a in 0..3 {
                            acc[a] += v[a] * es + kc * k[a];
                        }
                    }
                }
            }
            for a in 0..3 {
                out[a][idx] = acc[a];
            }
        }
        SpectralVectorField::from_parts(grid, out)
    }

    fn stage(
        &self,
        t: f64,
        u_terms: &[(f64, Prop, &SpectralVectorField)],
        w_terms: &[(f64, Prop, &SpectralVectorField)],
        start: &SimState,
    ) -> SimState {
        let u = if self.frozen_velocity {
            start.u.clone()
        } else {
            self.combine_u(u_terms)
        };
        SimState {
            t,
            u,
            w: self.combine_w(w_terms),
        }
    }

    fn nonlinear(&self, state: &SimState) -> (SpectralVectorField, SpectralVectorField, f64) {
        explicit_raw(state, self.params.chi, self.cfg.dealias)
    }

    /// Advances by one step of size `dt`.
    pub fn step(&self, state: &SimState) -> Result<SimState> {
        use Prop::{Full, Half, Identity};
        let h = self.cfg.dt;
        let t = state.t;
        let (y_u, y_w) = (&state.u, &state.w);

        let (k1u, k1w, speed) = self.nonlinear(state);
        let courant = courant_from_speed(&self.grid, &self.params, h, speed);
        if courant > self.cfg.cfl_safety {
            return Err(Error::Cfl {
                t,
                courant,
                safety: self.cfg.cfl_safety,
            });
        }
        let ya = self.stage(
            t + 0.5 * h,
            &[(1.0, Half, y_u), (0.5 * h, Half, &k1u)],
            &[(1.0, Half, y_w), (0.5 * h, Half, &k1w)],
            state,
        );
        let (k2u, k2w, _) = self.nonlinear(&ya);
        drop(ya);
        let yb = self.stage(
            t + 0.5 * h,
            &[(1.0, Half, y_u), (0.5 * h, Identity, &k2u)],
            &[(1.0, Half, y_w), (0.5 * h, Identity, &k2w)],
            state,
        );
        let (k3u, k3w, _) = self.nonlinear(&yb);
        drop(yb);
        let yc = self.stage(
            t + h,
            &[(1.0, Full, y_u), (h, Half, &k3u)],
            &[(1.0, Full, y_w), (h, Half, &k3w)],
            state,
        );
        let (k4u, k4w, _) = self.nonlinear(&yc);
        drop(yc);
        let c = h / 6.0;
        let next = self.stage(
            t + h,
            &[
                (1.0, Full, y_u),
                (c, Full, &k1u),
                (2.0 * c, Half, &k2u),
                (2.0 * c, Half, &k3u),
                (c, Identity, &k4u),
            ],
            &[
                (1.0, Full, y_w),
                (c, Full, &k1w),
                (2.0 * c, Half, &k2w),
                (2.0 * c, Half, &k3w),
                (c, Identity, &k4w),
            ],
            state,
        );
        if !next.is_finite() {
            return Err(Error::Blowup {
                t: t + h,
                step: (t / h).round() as u64 + 1,
                detail: format!(
                    "energy before step {:.6e}, Courant number {courant:.4}",
                    state.energy()
                ),
            });
        }
        Ok(next)
    }
}

/// One integrating-factor RK4 step of size `cfg.dt`.
pub fn step(state: &SimState, p: &PhysicalParams, cfg: &StepperConfig) -> Result<SimState> {
    Stepper::new(state.grid(), *p, *cfg)?.step(state)
}

/// Pressure from `−ΔP = ∇·((u·∇)u)`, mean zero.
pub fn recover_pressure(state: &SimState) -> ScalarField {
    let grid = state.grid();
    let adv = ops::advect(&state.u, &state.u);
    let div = ops::divergence(&adv);
    let k2 = grid.k_squared();
    let coeffs = div
        .coeffs()
        .iter()
        .enumerate()
        .map(|(idx, c)| {
            if idx == 0 || grid.has_nyquist(idx) {
                Complex64::default()
            } else {
                c / k2[idx]
            }
        })
        .collect();
    SpectralScalarField::new(grid, coeffs)
        .expect("length matches grid")
        .to_real()
}

/// Builds `(u₀, w₀)` at `t = 0`.
pub fn make_initial(ic: &InitialCondition, grid: &Grid) -> Result<SimState> {
    let k_min = grid.k_min();
    let k_band = grid.dealias_cutoff() as f64 * k_min;
    let peak = ic.energy_spectrum_peak;
    if !(peak.is_finite() && peak >= k_min * (1.0 - 1e-12) && peak <= k_band * (1.0 + 1e-12)) {
        return Err(Error::InvalidArgument(format!(
            "spectrum peak {peak} outside the dealiased band [{k_min}, {k_band}]"
        )));
    }
    if !ic.amplitude.is_finite() {
        return Err(Error::InvalidArgument("amplitude must be finite".into()));
    }
    let a = ic.amplitude;
    let (u, w) = match ic.kind {
        IcKind::RandomSolenoidal => {
            let mut rng = ChaCha8Rng::seed_from_u64(ic.seed);
            let u = leray_project(&enveloped_noise(grid, peak, &mut rng));
            let w = enveloped_noise(grid, peak, &mut rng);
            (normalize_rms(&u, a), normalize_rms(&w, a))
        }
        IcKind::TaylorGreenLike => {
            let k = (peak / k_min).round().max(1.0) * k_min;
            let u = RealVectorField::from_fn(grid, |x, y, z| {
                [
                    (k * x).sin() * (k * y).cos() * (k * z).cos(),
                    -(k * x).cos() * (k * y).sin() * (k * z).cos(),
                    0.0,
                ]
            })?
            .to_spectral();
            let w = RealVectorField::from_fn(grid, |x, y, z| {
                [
                    (k * y).sin() * (k * z).cos(),
                    (k * z).sin() * (k * x).cos() + 0.5 * (k * y).sin(),
                    (k * x).sin() * (k * y).cos(),
                ]
            })?
            .to_spectral();
            (normalize_rms(&leray_project(&u), a), normalize_rms(&w, a))
        }
        IcKind::SingleMode => {
            let k = (peak / k_min).round().max(1.0) * k_min;
            let u = RealVectorField::from_fn(grid, |_, y, _| [a * (k * y).sin(), 0.0, 0.0])?;
            let w = RealVectorField::from_fn(grid, |_, y, _| [0.0, 0.0, a * (k * y).sin()])?;
            (u.to_spectral(), w.to_spectral())
        }
    };
    SimState::new(0.0, dealias(&u).without_mean(), dealias(&w).without_mean())
}

/// Gaussian noise shaped by `exp(−(|k| − k_p)² / (2 (k_p/2)²))`, inside the 2/3 band.
fn enveloped_noise(grid: &Grid, peak: f64, rng: &mut ChaCha8Rng) -> SpectralVectorField {
    let len = grid.len();
    let width = 0.5 * peak;
    let k2 = grid.k_squared();
    let mut comps: [Vec<Complex64>; 3] = Default::default();
    for c in comps.iter_mut() {
        *c = (0..len)
            .map(|_| {
                let re: f64 = StandardNormal.sample(rng);
                let im: f64 = StandardNormal.sample(rng);
                Complex64::new(re, im)
            })
            .collect();
    }
    for c in comps.iter_mut() {
        let src = c.clone();
        for (idx, v) in c.iter_mut().enumerate() {
            if idx == 0 || grid.has_nyquist(idx) || !grid.retained(idx) {
                *v = Complex64::default();
                continue;
            }
            let kmag = k2[idx].sqrt();
            let env = (-(kmag - peak).powi(2) / (2.0 * width * width)).exp();
            *v = (src[idx] + src[grid.conjugate_index(idx)].conj()) * (0.5 * env);
        }
    }
    SpectralVectorField::from_parts(grid, comps)
}

fn normalize_rms(f: &SpectralVectorField, rms: f64) -> SpectralVectorField {
    let current = (f.l2_norm_sq() / f.grid().volume()).sqrt();
    if current == 0.0 {
        return f.clone();
    }
    f.scale(rms / current)
}

/// Drives a stepper from `state` to `cfg.t_end`, calling `observe` after every step.
pub fn integrate<F>(stepper: &Stepper, state: SimState, mut observe: F) -> Result<SimState>
where
    F: FnMut(u64, &SimState) -> Result<()>,
{
    let cfg = stepper.config();
    let t0 = state.t;
    let mut s = state;
    let mut step = 0u64;
    let total = ((cfg.t_end - t0) / cfg.dt - 1e-9).ceil().max(0.0) as u64;
    while step < total {
        let mut next = stepper.step(&s)?;
        step += 1;
        next.t = t0 + step as f64 * cfg.dt;
        s = next;
        observe(step, &s)?;
    }
    Ok(s)
}

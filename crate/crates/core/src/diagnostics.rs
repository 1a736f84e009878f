//! Norms, energy ledgers, the t₀ detector and decay fits.

use crate::dynamics::rhs;
use crate::error::{Error, Result};
use crate::field::{SimState, SpectralVectorField};
use crate::grid::PhysicalParams;
use crate::inequality::CALIBRATED_C_INF;
use crate::numerics::{linear_fit, pairwise_sum};
use crate::ops::{curl, divergence};

/// `V Σ_k w(k) Re(â(k)·conj(b̂(k)))`.
fn weighted_inner<F: Fn(usize) -> f64>(a: &SpectralVectorField, b: &SpectralVectorField, w: F) -> f64 {
    let s: f64 = a
        .components()
        .iter()
        .zip(b.components())
        .map(|(x, y)| pairwise_sum(x.len(), |i| w(i) * (x[i] * y[i].conj()).re))
        .sum();
    s * a.grid().volume()
}

fn d1_inner(a: &SpectralVectorField, b: &SpectralVectorField) -> f64 {
    let grid = a.grid();
    let k2 = grid.k_squared();
    weighted_inner(a, b, |i| if grid.has_nyquist(i) { 0.0 } else { k2[i] })
}

/// `4χ Σ_l ⟨D_l w, D_l(∇×u)⟩ = 4χ ∫ Σ ε_{ijk} D_l w_i D_l D_j u_k dx`.
pub fn cross_term(state: &SimState, p: &PhysicalParams) -> f64 {
    if p.chi == 0.0 {
        return 0.0;
    }
    4.0 * p.chi * d1_inner(&state.w, &curl(&state.u))
}

const N_INTEGRANDS: usize = 5;

/// Running time integrals of `‖Du‖², ‖Dw‖², ‖∇·w‖², ‖w‖², ‖∇×u − w‖²`.
#[derive(Clone, Debug, PartialEq)]
struct LedgerState {
    t0: f64,
    e0: f64,
    integrals: [f64; N_INTEGRANDS],
    values: [f64; N_INTEGRANDS],
    rates: [f64; N_INTEGRANDS],
    /// Second time derivatives, kept for the first interval only.
    curvatures: Option<[f64; N_INTEGRANDS]>,
    /// Time, values and rates of the record before the last.
    before: Option<(f64, [f64; N_INTEGRANDS], [f64; N_INTEGRANDS])>,
    records: usize,
}

/// Weights on `(f, f')` at `t₁ − a, t₁, t₁ + h` for `∫_{t₁}^{t₁+h}` of the quintic
/// Hermite interpolant.
fn interval_weights(a: f64, h: f64) -> ([f64; 3], [f64; 3]) {
    let (a2, a3, h2) = (a * a, a * a * a, h * h);
    let b = a + h;
    let (b2, b3) = (b * b, b * b * b);
    let f = [
        h2 * h2 * h * (5.0 * a2 + 5.0 * a * h + h2) / (30.0 * a3 * b3),
        h * (15.0 * a3 + 4.0 * a2 * h - 2.0 * a * h2 - h2 * h) / (30.0 * a3),
        h * (15.0 * a3 + 41.0 * a2 * h + 35.0 * a * h2 + 10.0 * h2 * h) / (30.0 * b3),
    ];
    let d = [
        h2 * h2 * h * (2.0 * a + h) / (60.0 * a2 * b2),
        h2 * (5.0 * a2 + 4.0 * a * h + h2) / (60.0 * a2),
        -h2 * (5.0 * a2 + 6.0 * a * h + 2.0 * h2) / (60.0 * b2),
    ];
    (f, d)
}

/// `⟨B a, B b⟩` for each integrand's operator `B`, on pairs `(u, w)`.
fn pairing(
    a: (&SpectralVectorField, &SpectralVectorField),
    b: (&SpectralVectorField, &SpectralVectorField),
) -> [f64; N_INTEGRANDS] {
    let (da, db) = (divergence(a.1), divergence(b.1));
    let v = a.0.grid().volume();
    let div = v * pairwise_sum(da.coeffs().len(), |i| (da.coeffs()[i] * db.coeffs()[i].conj()).re);
    let ga = curl(a.0).sub(a.1);
    let gb = curl(b.0).sub(b.1);
    [d1_inner(a.0, b.0), d1_inner(a.1, b.1), div, a.1.inner(b.1), ga.inner(&gb)]
}

struct Integrands {
    values: [f64; N_INTEGRANDS],
    rates: [f64; N_INTEGRANDS],
    curvatures: Option<[f64; N_INTEGRANDS]>,
}

fn integrands(state: &SimState, p: &PhysicalParams, with_curvature: bool) -> Integrands {
    let x = (&state.u, &state.w);
    let (ru, rw) = rhs(state, p);
    let values = pairing(x, x);
    let rates = pairing(x, (&ru, &rw)).map(|r| 2.0 * r);
    let curvatures = with_curvature.then(|| {
        // the right-hand side is quadratic, so the central difference is its exact derivative
        let speed = ru.l2_norm_sq() + rw.l2_norm_sq();
        let scale = if speed > 0.0 && state.energy() > 0.0 { (state.energy() / speed).sqrt() } else { 1.0 };
        let shifted = |sign: f64| SimState {
            t: state.t,
            u: state.u.axpy(sign * scale, &ru),
            w: state.w.axpy(sign * scale, &rw),
        };
        let (pu, pw) = rhs(&shifted(1.0), p);
        let (mu, mw) = rhs(&shifted(-1.0), p);
        let half = 0.5 / scale;
        let (au, aw) = (pu.sub(&mu).scale(half), pw.sub(&mw).scale(half));
        let vv = pairing((&ru, &rw), (&ru, &rw));
        let xa = pairing(x, (&au, &aw));
        std::array::from_fn(|i| 2.0 * (vv[i] + xa[i]))
    });
    Integrands {
        values,
        rates,
        curvatures,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DiagnosticsRecord {
    pub t: f64,
    pub l2_u: f64,
    pub l2_w: f64,
    pub l2_pair: f64,
    pub l2_du: f64,
    pub l2_dw: f64,
    pub l2_dpair: f64,
    pub l2_d2pair: f64,
    pub l2_divw: f64,
    pub linf_pair: f64,
    pub cross_term: f64,
    /// `‖(u,w)(t)‖² + 2μ∫‖Du‖² + 2γ∫‖Dw‖² + 2∫‖∇·w‖² + 2χ∫‖w‖²` from the first record.
    pub energy_ledger_lhs: f64,
    /// `‖(u,w)(t₀)‖²` of the first record.
    pub energy_ledger_rhs: f64,
    /// `|ledger_lhs + 2χ∫‖∇×u − w‖² − ledger_rhs| / ledger_rhs`, zero for exact dynamics.
    pub balance_residual: f64,
    ledger: LedgerState,
}

impl DiagnosticsRecord {
    pub fn t_sqrt_l2_w(&self) -> f64 {
        self.t.max(0.0).sqrt() * self.l2_w
    }

    /// `‖(u,w)‖₂²` at the start of the ledger.
    pub fn ledger_start(&self) -> (f64, f64) {
        (self.ledger.t0, self.ledger.e0)
    }
}

/// Computes all norms and advances the energy ledger from `running`.
///
/// Each new interval of the time integrals is integrated with the quintic Hermite
/// interpolant of the integrand values and their rates (from the exact
/// right-hand side) at the last three records. The first interval uses values,
/// rates and second derivatives at its two ends.
pub fn record(
    state: &SimState,
    p: &PhysicalParams,
    running: Option<&DiagnosticsRecord>,
) -> Result<DiagnosticsRecord> {
    let l2_u = state.u.l2_norm();
    let l2_w = state.w.l2_norm();
    let du2 = state.u.dm_norm_sq(1);
    let dw2 = state.w.dm_norm_sq(1);
    let d2 = state.u.dm_norm_sq(2) + state.w.dm_norm_sq(2);
    let linf_u = state.u.to_real().linf_norm();
    let linf_w = state.w.to_real().linf_norm();
    let first_two = running.is_none_or(|r| r.ledger.records == 1);
    let Integrands {
        values,
        rates,
        curvatures,
    } = integrands(state, p, first_two);
    let energy = l2_u * l2_u + l2_w * l2_w;
    let ledger = match running {
        None => LedgerState {
            t0: state.t,
            e0: energy,
            integrals: [0.0; N_INTEGRANDS],
            values,
            rates,
            curvatures,
            before: None,
            records: 1,
        },
        Some(prev) => {
            if !(state.t > prev.t) {
                return Err(Error::NonMonotoneTime {
                    prev: prev.t,
                    next: state.t,
                });
            }
            let h = state.t - prev.t;
            let pl = &prev.ledger;
            let mut integrals = pl.integrals;
            match (&pl.before, &pl.curvatures, &curvatures) {
                (Some((tb, bv, br)), _, _) => {
                    let (wf, wd) = interval_weights(prev.t - tb, h);
                    for i in 0..N_INTEGRANDS {
                        integrals[i] += wf[0] * bv[i] + wf[1] * pl.values[i] + wf[2] * values[i]
                            + wd[0] * br[i]
                            + wd[1] * pl.rates[i]
                            + wd[2] * rates[i];
                    }
                }
                (None, Some(c0), Some(c1)) => {
                    for i in 0..N_INTEGRANDS {
                        integrals[i] += 0.5 * h * (pl.values[i] + values[i])
                            + h * h / 10.0 * (pl.rates[i] - rates[i])
                            + h * h * h / 120.0 * (c0[i] + c1[i]);
                    }
                }
                _ => unreachable!("first interval carries curvatures"),
            }
            LedgerState {
                t0: pl.t0,
                e0: pl.e0,
                integrals,
                values,
                rates,
                curvatures: None,
                before: Some((prev.t, pl.values, pl.rates)),
                records: pl.records + 1,
            }
        }
    };
    let ig = &ledger.integrals;
    let lhs = energy
        + 2.0 * p.mu * ig[0]
        + 2.0 * p.gamma * ig[1]
        + 2.0 * ig[2]
        + 2.0 * p.chi * ig[3];
    let balance = lhs + 2.0 * p.chi * ig[4] - ledger.e0;
    let balance_residual = if ledger.e0 > 0.0 {
        balance.abs() / ledger.e0
    } else {
        balance.abs()
    };
    Ok(DiagnosticsRecord {
        t: state.t,
        l2_u,
        l2_w,
        l2_pair: (l2_u * l2_u + l2_w * l2_w).sqrt(),
        l2_du: du2.sqrt(),
        l2_dw: dw2.sqrt(),
        l2_dpair: (du2 + dw2).sqrt(),
        l2_d2pair: d2.sqrt(),
        l2_divw: values[2].sqrt(),
        linf_pair: (linf_u * linf_u + linf_w * linf_w).sqrt(),
        cross_term: cross_term(state, p),
        energy_ledger_lhs: lhs,
        energy_ledger_rhs: ledger.e0,
        balance_residual,
        ledger,
    })
}

/// Terms of the derivative estimate, accumulated by the trapezoid rule.
#[derive(Clone, Debug, PartialEq)]
pub struct DerivativeRecord {
    pub t: f64,
    /// `‖(Du,Dw)‖²`.
    pub dpair_sq: f64,
    pub d2u_sq: f64,
    pub d2w_sq: f64,
    pub d_divw_sq: f64,
    pub dw_sq: f64,
    pub cross_term: f64,
    /// `4 ‖(u,w)‖^{1/2} ‖(Du,Dw)‖^{1/2} ‖(D²u,D²w)‖²`.
    pub sng_majorant: f64,
    pub int_d2u: f64,
    pub int_d2w: f64,
    pub int_d_divw: f64,
    pub int_dw: f64,
    pub int_cross: f64,
    pub int_sng: f64,
    pub dpair_sq_t0: f64,
    /// `‖(Du,Dw)‖² + 2μ∫‖D²u‖² + 2γ∫‖D²w‖² + 2∫‖D∇·w‖² + 2χ∫‖Dw‖²`.
    pub lhs: f64,
    /// `‖(Du,Dw)(t₀)‖² + ∫ sng_majorant`.
    pub rhs: f64,
}

pub fn derivative_ledger(
    state: &SimState,
    p: &PhysicalParams,
    running: Option<&DerivativeRecord>,
) -> Result<DerivativeRecord> {
    let du = state.u.dm_norm_sq(1);
    let dw = state.w.dm_norm_sq(1);
    let d2u = state.u.dm_norm_sq(2);
    let d2w = state.w.dm_norm_sq(2);
    let div = divergence(&state.w);
    let grid = state.grid();
    let k2 = grid.k_squared();
    let d_divw = div.coeffs().iter().enumerate().fold(0.0, |acc, (i, c)| {
        acc + if grid.has_nyquist(i) { 0.0 } else { k2[i] * c.norm_sqr() }
    }) * grid.volume();
    let pair = state.energy().sqrt();
    let sng = 4.0 * pair.sqrt() * (du + dw).sqrt().sqrt() * (d2u + d2w);
    let cross = cross_term(state, p);
    let mut rec = DerivativeRecord {
        t: state.t,
        dpair_sq: du + dw,
        d2u_sq: d2u,
        d2w_sq: d2w,
        d_divw_sq: d_divw,
        dw_sq: dw,
        cross_term: cross,
        sng_majorant: sng,
        int_d2u: 0.0,
        int_d2w: 0.0,
        int_d_divw: 0.0,
        int_dw: 0.0,
        int_cross: 0.0,
        int_sng: 0.0,
        dpair_sq_t0: du + dw,
        lhs: 0.0,
        rhs: 0.0,
    };
    if let Some(prev) = running {
        if !(state.t > prev.t) {
            return Err(Error::NonMonotoneTime {
                prev: prev.t,
                next: state.t,
            });
        }
        let h = 0.5 * (state.t - prev.t);
        rec.int_d2u = prev.int_d2u + h * (prev.d2u_sq + d2u);
        rec.int_d2w = prev.int_d2w + h * (prev.d2w_sq + d2w);
        rec.int_d_divw = prev.int_d_divw + h * (prev.d_divw_sq + d_divw);
        rec.int_dw = prev.int_dw + h * (prev.dw_sq + dw);
        rec.int_cross = prev.int_cross + h * (prev.cross_term + cross);
        rec.int_sng = prev.int_sng + h * (prev.sng_majorant + sng);
        rec.dpair_sq_t0 = prev.dpair_sq_t0;
    }
    rec.lhs = rec.dpair_sq
        + 2.0 * p.mu * rec.int_d2u
        + 2.0 * p.gamma * rec.int_d2w
        + 2.0 * rec.int_d_divw
        + 2.0 * p.chi * rec.int_dw;
    rec.rhs = rec.dpair_sq_t0 + rec.int_sng;
    Ok(rec)
}

pub const MONOTONE_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct DecayFit {
    /// Earliest sample meeting the smallness condition, if any.
    pub t0_detected: Option<f64>,
    pub window: [f64; 2],
    /// Slope of `log ‖(u,w)‖` against `log t` over the window.
    pub slope_pair: f64,
    /// `t^{1/2} ‖w(t)‖₂` over the window.
    pub w_scaled_trend: Vec<f64>,
    /// `t ‖(Du,Dw)(t)‖²` over the window.
    pub d_weighted_trend: Vec<f64>,
    pub times: Vec<f64>,
    pub monotone_after_t0: bool,
    pub pair_strictly_decreasing: bool,
    /// True when `t ‖(Du,Dw)‖²` peaks in the first half of the window.
    pub d_weighted_peak_early: bool,
    /// Fitted `−d log‖w‖/dt`, reported when `χ > 0`.
    pub w_exp_rate: Option<f64>,
    pub c_inf: f64,
}

/// `C² ‖(u₀,w₀)‖ ‖(Du,Dw)(t)‖` with `C` the calibrated sup-norm constant.
pub fn smallness_value(initial_pair: f64, dpair: f64) -> f64 {
    CALIBRATED_C_INF * CALIBRATED_C_INF * initial_pair * dpair
}

fn check_series(series: &[DiagnosticsRecord]) -> Result<()> {
    if series.is_empty() {
        return Err(Error::EmptyWindow("empty diagnostics series".into()));
    }
    for w in series.windows(2) {
        if !(w[1].t > w[0].t) {
            return Err(Error::NonMonotoneTime {
                prev: w[0].t,
                next: w[1].t,
            });
        }
    }
    Ok(())
}

fn find_t0(series: &[DiagnosticsRecord], p: &PhysicalParams) -> Option<usize> {
    let threshold = p.mu.min(p.gamma).powi(2);
    let initial = series[0].l2_pair;
    series
        .iter()
        .position(|r| smallness_value(initial, r.l2_dpair) < threshold)
}

fn monotone_from(series: &[DiagnosticsRecord], start: usize) -> bool {
    series[start..]
        .windows(2)
        .all(|w| w[1].l2_dpair <= w[0].l2_dpair * (1.0 + MONOTONE_TOLERANCE))
}

/// Finds `t₀` and checks `‖(Du,Dw)‖` monotonicity after it, over the whole series.
pub fn detect_t0(series: &[DiagnosticsRecord], p: &PhysicalParams) -> Result<DecayFit> {
    check_series(series)?;
    let t_hi = series[series.len() - 1].t;
    let t_lo = find_t0(series, p).map_or(series[0].t, |i| series[i].t);
    fit_decay(series, [t_lo, t_hi], p)
}

/// Trend report over `window`, whose lower end is raised to the detected `t₀`.
pub fn fit_decay(series: &[DiagnosticsRecord], window: [f64; 2], p: &PhysicalParams) -> Result<DecayFit> {
    check_series(series)?;
    let t0_idx = find_t0(series, p);
    let t0_detected = t0_idx.map(|i| series[i].t);
    let lo = t0_detected.map_or(window[0], |t0| window[0].max(t0));
    let hi = window[1];
    let picked: Vec<&DiagnosticsRecord> = series
        .iter()
        .filter(|r| r.t >= lo - 1e-12 && r.t <= hi + 1e-12)
        .collect();
    if picked.is_empty() || lo > hi {
        return Err(Error::EmptyWindow(format!("no samples in [{lo}, {hi}]")));
    }
    let times: Vec<f64> = picked.iter().map(|r| r.t).collect();
    let w_scaled_trend: Vec<f64> = picked.iter().map(|r| r.t_sqrt_l2_w()).collect();
    let d_weighted_trend: Vec<f64> = picked.iter().map(|r| r.t * r.l2_dpair * r.l2_dpair).collect();
    let positive: Vec<&&DiagnosticsRecord> =
        picked.iter().filter(|r| r.t > 0.0 && r.l2_pair > 0.0).collect();
    let slope_pair = if positive.len() >= 2 {
        let x: Vec<f64> = positive.iter().map(|r| r.t.ln()).collect();
        let y: Vec<f64> = positive.iter().map(|r| r.l2_pair.ln()).collect();
        linear_fit(&x, &y).0
    } else {
        0.0
    };
    let pair_strictly_decreasing = picked.windows(2).all(|w| w[1].l2_pair < w[0].l2_pair);
    let monotone_after_t0 = t0_idx.is_some_and(|i| monotone_from(series, i));
    let peak = d_weighted_trend
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc })
        .0;
    let d_weighted_peak_early = times[peak] <= 0.5 * (times[0] + times[times.len() - 1]);
    let w_exp_rate = if p.chi > 0.0 {
        let pts: Vec<&&DiagnosticsRecord> = picked.iter().filter(|r| r.l2_w > 0.0).collect();
        if pts.len() >= 2 {
            let x: Vec<f64> = pts.iter().map(|r| r.t).collect();
            let y: Vec<f64> = pts.iter().map(|r| r.l2_w.ln()).collect();
            Some(-linear_fit(&x, &y).0)
        } else {
            Some(0.0)
        }
    } else {
        None
    };
    Ok(DecayFit {
        t0_detected,
        window: [lo, hi],
        slope_pair,
        w_scaled_trend,
        d_weighted_trend,
        times,
        monotone_after_t0,
        pair_strictly_decreasing,
        d_weighted_peak_early,
        w_exp_rate,
        c_inf: CALIBRATED_C_INF,
    })
}

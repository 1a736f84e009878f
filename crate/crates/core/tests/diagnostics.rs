#[global_allocator]
static GLOBAL: mimalloc::MiMalloc = mimalloc::MiMalloc;

use micropolar::diagnostics::{derivative_ledger, detect_t0, fit_decay, record, DiagnosticsRecord};
use micropolar::dynamics::{integrate, make_initial, IcKind, InitialCondition, Stepper, StepperConfig};
use micropolar::random;
use micropolar::{make_grid, PhysicalParams, SimState, SpectralVectorField};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

fn series(stepper: &Stepper, s0: SimState) -> Vec<DiagnosticsRecord> {
    let p = *stepper.params();
    let mut out = vec![record(&s0, &p, None).unwrap()];
    integrate(stepper, s0, |_, s| {
        let r = record(s, &p, out.last())?;
        out.push(r);
        Ok(())
    })
    .unwrap();
    out
}

fn random_run(chi: f64, amplitude: f64, t_end: f64) -> (PhysicalParams, Vec<DiagnosticsRecord>) {
    let g = make_grid(16, 8.0 * PI).unwrap();
    let p = PhysicalParams::new(0.5, 0.3, chi).unwrap();
    let ic = InitialCondition {
        kind: IcKind::RandomSolenoidal,
        energy_spectrum_peak: 0.75,
        amplitude,
        seed: 11,
    };
    let s0 = make_initial(&ic, &g).unwrap();
    let stepper = Stepper::new(&g, p, StepperConfig::new(0.05, t_end).unwrap()).unwrap();
    (p, series(&stepper, s0))
}

#[test]
fn energy_inequality_on_nonlinear_runs() {
    for chi in [0.0, 0.4] {
        let (_, recs) = random_run(chi, 0.5, 4.0);
        // between any two records: E(t) + 2∫_s^t (…) = lhs(t) − lhs(s) + E(s)
        for (i, a) in recs.iter().enumerate() {
            let e_s = a.l2_pair * a.l2_pair;
            for b in &recs[i + 1..] {
                assert!(b.energy_ledger_lhs - a.energy_ledger_lhs <= 1e-8 * e_s, "{} to {}", a.t, b.t);
            }
        }
        for r in &recs {
            assert!(r.energy_ledger_lhs <= r.energy_ledger_rhs * (1.0 + 1e-8), "t = {}", r.t);
            assert!(r.balance_residual < 1e-8, "t = {}: {}", r.t, r.balance_residual);
        }
    }
}

#[test]
fn high_amplitude_run_has_interior_t0() {
    let (p, recs) = random_run(0.2, 0.5, 12.0);
    let fit = detect_t0(&recs, &p).unwrap();
    let t0 = fit.t0_detected.expect("t0 within the run");
    assert!(t0 > recs[0].t && t0 < recs.last().unwrap().t, "t0 = {t0}");
    assert!(fit.monotone_after_t0);
    assert!(fit.window[0] >= t0);
    let after = recs.iter().position(|r| r.t == t0).unwrap();
    for w in recs[after..].windows(2) {
        assert!(w[1].l2_dpair <= w[0].l2_dpair * (1.0 + 1e-9));
    }
}

fn frozen_w_run(chi: f64, amplitude: f64) -> (PhysicalParams, Vec<DiagnosticsRecord>) {
    let g = make_grid(16, 4.0 * PI).unwrap();
    let p = PhysicalParams::new(0.5, 0.2, chi).unwrap();
    let mut r = ChaCha8Rng::seed_from_u64(5);
    let w = random::band_limited(&g, 4, &mut r).scale(amplitude);
    let s0 = SimState::new(0.0, SpectralVectorField::zeros(&g), w).unwrap();
    let stepper = Stepper::new(&g, p, StepperConfig::new(0.05, 3.0).unwrap())
        .unwrap()
        .with_frozen_velocity(true);
    (p, series(&stepper, s0))
}

#[test]
fn linear_run_detects_t0_at_first_sample() {
    let (p, recs) = frozen_w_run(0.3, 1e-4);
    let fit = detect_t0(&recs, &p).unwrap();
    assert_eq!(fit.t0_detected, Some(0.0));
    assert!(fit.monotone_after_t0);
    assert!(fit.pair_strictly_decreasing);
}

#[test]
fn frozen_velocity_rate_is_at_least_two_chi() {
    for chi in [0.1, 0.5, 1.0] {
        let (p, recs) = frozen_w_run(chi, 1e-2);
        let fit = fit_decay(&recs, [0.5, 3.0], &p).unwrap();
        let rate = fit.w_exp_rate.unwrap();
        assert!(rate >= 2.0 * chi * (1.0 - 1e-3), "chi = {chi}: rate {rate}");
        for r in &recs {
            assert!(r.l2_u == 0.0);
        }
    }
}

#[test]
fn derivative_ledger_respects_young_absorption() {
    let g = make_grid(16, 8.0 * PI).unwrap();
    let p = PhysicalParams::new(0.5, 0.3, 0.4).unwrap();
    let ic = InitialCondition {
        kind: IcKind::RandomSolenoidal,
        energy_spectrum_peak: 0.75,
        amplitude: 0.5,
        seed: 2,
    };
    let s0 = make_initial(&ic, &g).unwrap();
    let stepper = Stepper::new(&g, p, StepperConfig::new(0.05, 2.0).unwrap()).unwrap();
    let mut d = derivative_ledger(&s0, &p, None).unwrap();
    integrate(&stepper, s0, |_, s| {
        d = derivative_ledger(s, &p, Some(&d))?;
        assert!(d.cross_term <= 2.0 * p.chi * (d.dw_sq + d.d2u_sq));
        Ok(())
    })
    .unwrap();
}

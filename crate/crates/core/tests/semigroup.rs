#[global_allocator]
static GLOBAL: mimalloc::MiMalloc = mimalloc::MiMalloc;

use micropolar::dynamics::{integrate, make_initial, IcKind, InitialCondition, Stepper, StepperConfig};
use micropolar::semigroup::{
    duhamel_reconstruct_w, duhamel_reconstruct_z, duhamel_terms, lemma2_cases, run_lemma2_case,
};
use micropolar::{make_grid, PhysicalParams, RealVectorField, SimState, SpectralVectorField};
use std::f64::consts::PI;

#[test]
fn lemma2_slopes() {
    for case in lemma2_cases() {
        let fit = run_lemma2_case(&case).unwrap();
        assert!(
            (fit.slope - fit.expected_slope).abs() <= 0.05,
            "r={} alpha={:?}: slope {} expected {}",
            case.r,
            case.alpha,
            fit.slope,
            fit.expected_slope
        );
    }
}

#[test]
fn lemma2_r2_m0_envelope_never_exceeds_one() {
    let case = lemma2_cases().into_iter().find(|c| c.r == 2.0 && c.alpha == [0, 0, 0]).unwrap();
    let fit = run_lemma2_case(&case).unwrap();
    assert!(fit.envelope.iter().all(|&e| e <= 1.0 + 1e-12));
    assert!(fit.envelope.windows(2).all(|w| w[1] <= w[0]));
}

#[test]
fn duhamel_single_mode_is_exact() {
    let g = make_grid(16, 2.0 * PI).unwrap();
    let p = PhysicalParams::new(1.0, 0.4, 0.0).unwrap();
    let w0 = RealVectorField::from_fn(&g, |x, _, _| [0.0, 0.0, (2.0 * x).sin()])
        .unwrap()
        .to_spectral();
    let traj: Vec<SimState> = (0..20)
        .map(|j| {
            let t = 0.1 * j as f64;
            SimState::new(t, SpectralVectorField::zeros(&g), w0.scale((-0.4 * 4.0 * t).exp())).unwrap()
        })
        .collect();
    let r = duhamel_reconstruct_w(&traj, &p).unwrap();
    assert!(r.max() <= 1e-12);
}

fn trajectory(chi: f64, dt: f64) -> (PhysicalParams, Vec<SimState>) {
    let g = make_grid(16, 8.0 * PI).unwrap();
    let p = PhysicalParams::new(0.5, 0.3, chi).unwrap();
    let ic = InitialCondition {
        kind: IcKind::RandomSolenoidal,
        energy_spectrum_peak: 0.75,
        amplitude: 1.0,
        seed: 11,
    };
    let s0 = make_initial(&ic, &g).unwrap();
    let stepper = Stepper::new(&g, p, StepperConfig::new(dt, 1.0).unwrap()).unwrap();
    let mut traj = vec![s0.clone()];
    integrate(&stepper, s0, |_, s| {
        traj.push(s.clone());
        Ok(())
    })
    .unwrap();
    (p, traj)
}

#[test]
fn duhamel_second_order_in_sampling() {
    for chi in [0.0, 0.4] {
        let (p, traj) = trajectory(chi, 0.025);
        let coarse = duhamel_reconstruct_w(traj.iter().step_by(2), &p).unwrap().max();
        let fine = duhamel_reconstruct_w(&traj, &p).unwrap().max();
        let ratio = coarse / fine;
        assert!((3.5..=4.5).contains(&ratio), "chi {chi}: ratio {ratio}");
        let z = duhamel_reconstruct_z(&traj, &p).unwrap().max();
        assert!((z - fine).abs() <= 1e-6 * fine);
    }
}

#[test]
fn duhamel_terms_respect_bounds() {
    let (p, traj) = trajectory(0.4, 0.05);
    let led = duhamel_terms(traj.iter().skip(4), &p).unwrap();
    assert!(led.bound_violations().is_empty());
    let t0 = led.t0;
    for (t, i) in led.times.iter().zip(&led.term_i) {
        let envelope = t.sqrt() * (-2.0 * p.chi * (t - t0)).exp() * led.term_i[0] / t0.sqrt();
        assert!(*i <= envelope * (1.0 + 1e-12));
    }
    assert!(duhamel_reconstruct_w(traj.iter().rev(), &p).is_err());
}

//! Interpolation-inequality ratios `‖u‖_∞ / (‖u‖^{1/4}‖D²u‖^{3/4})` and
//! `‖Du‖ / (‖u‖^{1/2}‖D²u‖^{1/2})`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::field::RealVectorField;
use crate::grid::Grid;
use crate::random;

/// Largest `‖u‖_∞`-ratio seen over the calibration ensemble
/// ([`calibration_ensemble_max`] with the default arguments).
pub const CALIBRATED_C_INF: f64 = 1.344_265_891_875_596_7e-2;

/// Grid, band, ensemble size and seed of the calibration run.
pub const CALIBRATION_N: usize = 16;
pub const CALIBRATION_BAND: i64 = 5;
pub const CALIBRATION_COUNT: usize = 1000;
pub const CALIBRATION_SEED: u64 = 0x00C0_FFEE;

fn norms(u: &RealVectorField) -> Result<(f64, f64, f64)> {
    let spec = u.to_spectral();
    let l2 = spec.l2_norm();
    if l2 == 0.0 {
        return Err(Error::ZeroField);
    }
    let d1 = spec.dm_norm_sq(1).sqrt();
    let d2 = spec.dm_norm_sq(2).sqrt();
    if d2 == 0.0 {
        return Err(Error::InvalidArgument(
            "field has no nonzero wavenumber content".into(),
        ));
    }
    Ok((l2, d1, d2))
}

/// `‖u‖_∞ / (‖u‖₂^{1/4} ‖D²u‖₂^{3/4})`.
pub fn gn_ratio_infty(u: &RealVectorField) -> Result<f64> {
    let (l2, _, d2) = norms(u)?;
    Ok(u.linf_norm() / (l2.powf(0.25) * d2.powf(0.75)))
}

/// `‖Du‖₂ / (‖u‖₂^{1/2} ‖D²u‖₂^{1/2})`; at most one by Cauchy-Schwarz.
pub fn gn_ratio_grad(u: &RealVectorField) -> Result<f64> {
    let (l2, d1, d2) = norms(u)?;
    Ok(d1 / (l2.sqrt() * d2.sqrt()))
}

/// Maximum of [`gn_ratio_infty`] over `count` seeded band-limited random fields.
pub fn calibration_ensemble_max(n: usize, band: i64, count: usize, seed: u64) -> Result<f64> {
    let grid = Grid::new(n, 2.0 * std::f64::consts::PI)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = 0.0_f64;
    for _ in 0..count {
        let u = random::band_limited(&grid, band, &mut rng).to_real();
        best = best.max(gn_ratio_infty(&u)?);
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::SpectralVectorField;
    use crate::grid::make_grid;
    use rustfft::num_complex::Complex64;
    use std::f64::consts::PI;

    /// Zero-pads the spectrum of `f` onto a finer grid with the same box.
    fn refine(f: &SpectralVectorField, fine: &Grid) -> SpectralVectorField {
        let g = f.grid();
        let nf = fine.n() as i64;
        let mut comps: [Vec<Complex64>; 3] = Default::default();
        for c in comps.iter_mut() {
            *c = vec![Complex64::default(); fine.len()];
        }
        for idx in 0..g.len() {
            if g.has_nyquist(idx) {
                continue;
            }
            let (a, b, c) = g.unflatten(idx);
            let w = |m: i64| m.rem_euclid(nf) as usize;
            let j = fine.index(w(g.mode(a)), w(g.mode(b)), w(g.mode(c)));
            for k in 0..3 {
                comps[k][j] = f.component(k)[idx];
            }
        }
        SpectralVectorField::new(fine, comps).unwrap()
    }

    #[test]
    fn infty_ratio_is_scale_invariant() {
        let g = make_grid(8, 2.0).unwrap();
        let mut r = ChaCha8Rng::seed_from_u64(1);
        let u = random::band_limited(&g, 2, &mut r).to_real();
        let base = gn_ratio_infty(&u).unwrap();
        for s in [3.7, -2.0, 1e-3, 1e4] {
            let v = gn_ratio_infty(&u.scale(s)).unwrap();
            assert!((v - base).abs() <= 1e-14 * base);
        }
    }

    #[test]
    fn infty_ratio_single_mode() {
        // ‖sin x‖_∞ = 1 and ‖u‖₂ = ‖D²u‖₂ = (4π³)^{1/2} on (2π)³
        let g = make_grid(16, 2.0 * PI).unwrap();
        let u = RealVectorField::from_fn(&g, |x, _, _| [x.sin(), 0.0, 0.0]).unwrap();
        let r = gn_ratio_infty(&u).unwrap();
        let want = (4.0 * PI.powi(3)).powf(-0.5);
        assert!((r - want).abs() < 1e-13 * want, "{r} vs {want}");
    }

    #[test]
    fn zero_field_is_rejected() {
        let g = make_grid(4, 1.0).unwrap();
        let z = RealVectorField::zeros(&g);
        assert!(matches!(gn_ratio_infty(&z), Err(Error::ZeroField)));
        assert!(matches!(gn_ratio_grad(&z), Err(Error::ZeroField)));
    }

    #[test]
    fn grad_ratio_equality_and_strict_cases() {
        let g = make_grid(8, 2.0 * PI).unwrap();
        let one = RealVectorField::from_fn(&g, |x, y, _| [0.0, (x + y).cos(), 0.0]).unwrap();
        assert!((gn_ratio_grad(&one).unwrap() - 1.0).abs() < 1e-14);
        let two =
            RealVectorField::from_fn(&g, |x, _, z| [x.sin() + (2.0 * z).cos(), 0.0, 0.0]).unwrap();
        assert!(gn_ratio_grad(&two).unwrap() < 1.0 - 1e-3);
    }

    #[test]
    fn grad_ratio_bounded_on_random_ensemble() {
        let g = make_grid(8, 3.0).unwrap();
        let mut r = ChaCha8Rng::seed_from_u64(2);
        for i in 0..1000 {
            let band = 1 + (i % 3) as i64;
            let u = random::band_limited(&g, band, &mut r).to_real();
            assert!(gn_ratio_grad(&u).unwrap() <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn calibration_constant_regression() {
        let c = calibration_ensemble_max(
            CALIBRATION_N,
            CALIBRATION_BAND,
            CALIBRATION_COUNT,
            CALIBRATION_SEED,
        )
        .unwrap();
        assert!((c - CALIBRATED_C_INF).abs() <= 1e-12 * CALIBRATED_C_INF, "{c}");
    }

    #[test]
    fn infty_ratio_stable_under_refinement() {
        let coarse = make_grid(32, 2.0 * PI).unwrap();
        let fine = make_grid(64, 2.0 * PI).unwrap();
        let mut r = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..5 {
            let f = random::band_limited(&coarse, 2, &mut r);
            let a = gn_ratio_infty(&f.to_real()).unwrap();
            let b = gn_ratio_infty(&refine(&f, &fine).to_real()).unwrap();
            assert!((a - b).abs() <= 0.02 * b, "{a} vs {b}");
        }
    }
}

//! Seeded random field generators.

use rand::Rng;
use rand_distr::StandardNormal;
use rustfft::num_complex::Complex64;

use crate::field::SpectralVectorField;
use crate::grid::Grid;
use crate::ops::leray_project;

/// Hermitian-symmetric random field with i.i.d. Gaussian coefficients on every
/// mode whose integer indices satisfy `|m_axis| <= band`, mean and Nyquist
/// modes excluded.
pub fn band_limited<R: Rng + ?Sized>(grid: &Grid, band: i64, rng: &mut R) -> SpectralVectorField {
    let len = grid.len();
    let mut comps: [Vec<Complex64>; 3] = Default::default();
    for c in comps.iter_mut() {
        *c = (0..len)
            .map(|_| {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                Complex64::new(re, im)
            })
            .collect();
    }
    let inside = |idx: usize| {
        let (a, b, c) = grid.unflatten(idx);
        idx != 0
            && !grid.has_nyquist(idx)
            && grid.mode(a).abs() <= band
            && grid.mode(b).abs() <= band
            && grid.mode(c).abs() <= band
    };
    for c in comps.iter_mut() {
        let src = c.clone();
        for (idx, v) in c.iter_mut().enumerate() {
            *v = if inside(idx) {
                (src[idx] + src[grid.conjugate_index(idx)].conj()) * 0.5
            } else {
                Complex64::default()
            };
        }
    }
    SpectralVectorField::from_parts(grid, comps)
}

/// Divergence-free variant of [`band_limited`].
pub fn solenoidal<R: Rng + ?Sized>(grid: &Grid, band: i64, rng: &mut R) -> SpectralVectorField {
    leray_project(&band_limited(grid, band, rng))
}

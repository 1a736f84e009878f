//! Differential and projection operators acting on Fourier coefficients.
//!
//! Every operator that takes a derivative zeroes modes carrying a Nyquist
//! index, since `i k` at the Nyquist index has no real-valued counterpart.

use rustfft::num_complex::Complex64;

use crate::fft;
use crate::field::{RealVectorField, SpectralScalarField, SpectralVectorField};
use crate::grid::Grid;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };
const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// The alternating symbol `ε_{ijk}` on indices `0..3`.
#[derive(Clone, Copy, Debug, Default)]
pub struct LeviCivita;

impl LeviCivita {
    pub const fn epsilon(i: usize, j: usize, k: usize) -> i8 {
        match (i, j, k) {
            (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1,
            (0, 2, 1) | (1, 0, 2) | (2, 1, 0) => -1,
            _ => 0,
        }
    }

    /// `(a × b)_i = Σ ε_{ijk} a_j b_k`.
    pub fn cross<T>(a: [T; 3], b: [T; 3]) -> [T; 3]
    where
        T: Copy + std::ops::Mul<Output = T> + std::ops::Add<Output = T> + std::ops::Neg<Output = T> + Default,
    {
        let mut out = [T::default(); 3];
        for (i, o) in out.iter_mut().enumerate() {
            for j in 0..3 {
                for k in 0..3 {
                    match Self::epsilon(i, j, k) {
                        1 => *o = *o + a[j] * b[k],
                        -1 => *o = *o + -(a[j] * b[k]),
                        _ => {}
                    }
                }
            }
        }
        out
    }
}

/// Spatial axis, numbered 1..=3 in the usual way.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    X1,
    X2,
    X3,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X1, Axis::X2, Axis::X3];

    pub fn index(self) -> usize {
        match self {
            Axis::X1 => 0,
            Axis::X2 => 1,
            Axis::X3 => 2,
        }
    }
}

/// `D_axis f`, i.e. each coefficient times `i k_axis`.
pub fn derivative(f: &SpectralVectorField, axis: Axis) -> SpectralVectorField {
    let grid = f.grid().clone();
    let a = axis.index();
    f.map_modes(|idx, c| {
        if grid.has_nyquist(idx) {
            return [ZERO; 3];
        }
        let ik = I * grid.wavevector(idx)[a];
        [c[0] * ik, c[1] * ik, c[2] * ik]
    })
}

pub fn divergence(f: &SpectralVectorField) -> SpectralScalarField {
    let grid = f.grid();
    let coeffs = (0..grid.len())
        .map(|idx| {
            if grid.has_nyquist(idx) {
                return ZERO;
            }
            let k = grid.wavevector(idx);
            let c = f.at(idx);
            I * (c[0] * k[0] + c[1] * k[1] + c[2] * k[2])
        })
        .collect();
    SpectralScalarField::new(grid, coeffs).expect("length matches grid")
}

pub fn gradient(p: &SpectralScalarField) -> SpectralVectorField {
    let grid = p.grid();
    let c = p.coeffs();
    let mut comps = [
        vec![ZERO; grid.len()],
        vec![ZERO; grid.len()],
        vec![ZERO; grid.len()],
    ];
    for idx in 0..grid.len() {
        if grid.has_nyquist(idx) {
            continue;
        }
        let k = grid.wavevector(idx);
        for a in 0..3 {
            comps[a][idx] = I * k[a] * c[idx];
        }
    }
    SpectralVectorField::new(grid, comps).expect("length matches grid")
}

/// `(∇×f)_i = Σ ε_{ijk} D_j f_k`, i.e. `i k × f̂`.
pub fn curl(f: &SpectralVectorField) -> SpectralVectorField {
    let grid = f.grid().clone();
    f.map_modes(|idx, c| {
        if grid.has_nyquist(idx) {
            return [ZERO; 3];
        }
        let k = grid.wavevector(idx);
        let ik = [I * k[0], I * k[1], I * k[2]];
        LeviCivita::cross(ik, c)
    })
}

pub fn laplacian(f: &SpectralVectorField) -> SpectralVectorField {
    let grid = f.grid().clone();
    let k2 = grid.k_squared();
    f.scale_modes(|idx| if grid.has_nyquist(idx) { 0.0 } else { -k2[idx] })
}

/// `∇(∇·f)`, symbol `-k (k·f̂)`.
pub fn grad_div(f: &SpectralVectorField) -> SpectralVectorField {
    let grid = f.grid().clone();
    f.map_modes(|idx, c| {
        if grid.has_nyquist(idx) {
            return [ZERO; 3];
        }
        let k = grid.wavevector(idx);
        let kc = c[0] * k[0] + c[1] * k[1] + c[2] * k[2];
        [-kc * k[0], -kc * k[1], -kc * k[2]]
    })
}

/// Helmholtz-Leray projection onto divergence-free fields.
///
/// The mean mode and Nyquist modes map to zero.
pub fn leray_project(f: &SpectralVectorField) -> SpectralVectorField {
    let grid = f.grid().clone();
    let k2 = grid.k_squared();
    f.map_modes(|idx, c| {
        if idx == 0 || grid.has_nyquist(idx) {
            return [ZERO; 3];
        }
        let k = grid.wavevector(idx);
        let kc = (c[0] * k[0] + c[1] * k[1] + c[2] * k[2]) / k2[idx];
        [c[0] - kc * k[0], c[1] - kc * k[1], c[2] - kc * k[2]]
    })
}

/// 2/3-rule truncation: zero every mode with some `|m_axis| > n/3`.
pub fn dealias(f: &SpectralVectorField) -> SpectralVectorField {
    let grid = f.grid().clone();
    f.scale_modes(|idx| if grid.retained(idx) { 1.0 } else { 0.0 })
}

/// Pseudo-spectral `(v·∇) f`, dealiased.
pub fn advect(v: &SpectralVectorField, f: &SpectralVectorField) -> SpectralVectorField {
    advect_many(v, &[f], true).pop().expect("one output")
}

/// `(v·∇) f` for several `f` sharing one physical-space copy of `v`.
pub fn advect_many(
    v: &SpectralVectorField,
    fs: &[&SpectralVectorField],
    dealiased: bool,
) -> Vec<SpectralVectorField> {
    let grid = v.grid().clone();
    let n = grid.n();
    let mut spectra: Vec<Vec<Complex64>> = v.components().to_vec();
    for f in fs {
        for i in 0..3 {
            for axis in Axis::ALL {
                spectra.push(derivative_component(&grid, f.component(i), axis));
            }
        }
    }
    let refs: Vec<&[Complex64]> = spectra.iter().map(|c| c.as_slice()).collect();
    let real = fft::inverse_real_many(n, &refs);
    drop(spectra);
    let (v_real, grads) = real.split_at(3);
    let mut products: Vec<Vec<f64>> = Vec::with_capacity(3 * fs.len());
    for g in grads.chunks(9) {
        for i in 0..3 {
            let mut acc = vec![0.0; grid.len()];
            for axis in Axis::ALL {
                let j = axis.index();
                for ((a, x), y) in acc.iter_mut().zip(&v_real[j]).zip(&g[3 * i + j]) {
                    *a += x * y;
                }
            }
            products.push(acc);
        }
    }
    let refs: Vec<&[f64]> = products.iter().map(|c| c.as_slice()).collect();
    let mut spectral = fft::forward_real_many(n, &refs).into_iter();
    (0..fs.len())
        .map(|_| {
            let out = [
                spectral.next().expect("component"),
                spectral.next().expect("component"),
                spectral.next().expect("component"),
            ];
            let prod = SpectralVectorField::from_parts(&grid, out);
            if dealiased {
                dealias(&prod)
            } else {
                prod
            }
        })
        .collect()
}

/// `(u·∇)u` and `(u·∇)w` in divergence form `∂_j(u_j f)`, exact for
/// divergence-free `u`. Also returns `max_x |u(x)|`.
pub fn advect_solenoidal(
    u: &SpectralVectorField,
    w: &SpectralVectorField,
    dealiased: bool,
) -> (SpectralVectorField, SpectralVectorField, f64) {
    let grid = u.grid().clone();
    let n = grid.n();
    let len = grid.len();
    let (uc, wc) = (u.components(), w.components());
    let real = fft::inverse_real_many(n, &[&uc[0], &uc[1], &uc[2], &wc[0], &wc[1], &wc[2]]);
    let (ur, wr) = real.split_at(3);
    let mut speed2 = 0.0_f64;
    for i in 0..len {
        speed2 = speed2.max(ur[0][i] * ur[0][i] + ur[1][i] * ur[1][i] + ur[2][i] * ur[2][i]);
    }
    // symmetric u_i u_j (i <= j), then u_j w_i row-major in (i, j)
    let mut products: Vec<Vec<f64>> = Vec::with_capacity(15);
    for i in 0..3 {
        for j in i..3 {
            products.push(ur[i].iter().zip(&ur[j]).map(|(a, b)| a * b).collect());
        }
    }
    for i in 0..3 {
        for j in 0..3 {
            products.push(ur[j].iter().zip(&wr[i]).map(|(a, b)| a * b).collect());
        }
    }
    let refs: Vec<&[f64]> = products.iter().map(|c| c.as_slice()).collect();
    let hat = fft::forward_real_many(n, &refs);
    drop(products);
    let sym = |i: usize, j: usize| {
        let (a, b) = if i <= j { (i, j) } else { (j, i) };
        a * 3 + b - a * (a + 1) / 2
    };
    let kd = grid.k_deriv();
    let mut out_u: [Vec<Complex64>; 3] = [vec![ZERO; len], vec![ZERO; len], vec![ZERO; len]];
    let mut out_w: [Vec<Complex64>; 3] = [vec![ZERO; len], vec![ZERO; len], vec![ZERO; len]];
    for idx in 0..len {
        if grid.has_nyquist(idx) || (dealiased && !grid.retained(idx)) {
            continue;
        }
        let k = [kd[idx / (n * n)], kd[(idx / n) % n], kd[idx % n]];
        for i in 0..3 {
            let mut su = ZERO;
            let mut sw = ZERO;
            for j in 0..3 {
                su += hat[sym(i, j)][idx] * k[j];
                sw += hat[6 + 3 * i + j][idx] * k[j];
            }
            out_u[i][idx] = su * I;
            out_w[i][idx] = sw * I;
        }
    }
    (
        SpectralVectorField::from_parts(&grid, out_u),
        SpectralVectorField::from_parts(&grid, out_w),
        speed2.sqrt(),
    )
}

fn derivative_component(grid: &Grid, c: &[Complex64], axis: Axis) -> Vec<Complex64> {
    let a = axis.index();
    let kd = grid.k_deriv();
    let n = grid.n();
    c.iter()
        .enumerate()
        .map(|(idx, v)| {
            if grid.has_nyquist(idx) {
                return ZERO;
            }
            let ia = match a {
                0 => idx / (n * n),
                1 => (idx / n) % n,
                _ => idx % n,
            };
            *v * (I * kd[ia])
        })
        .collect()
}

/// Physical-space product check used by tests and diagnostics: `∫ (v·∇f)·g dx`.
pub fn advect_inner(v: &SpectralVectorField, f: &SpectralVectorField, g: &SpectralVectorField) -> f64 {
    advect(v, f).inner(g)
}

/// Returns the real field `D_axis f` component-wise in physical space.
pub fn derivative_real(f: &SpectralVectorField, axis: Axis) -> RealVectorField {
    derivative(f, axis).to_real()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;
    use crate::random;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    fn field(g: &Grid, f: impl Fn(f64, f64, f64) -> [f64; 3]) -> SpectralVectorField {
        RealVectorField::from_fn(g, f).unwrap().to_spectral()
    }

    /// Direct evaluation of the trigonometric interpolant at an arbitrary point.
    fn interpolant(f: &SpectralVectorField, comp: usize, x: [f64; 3]) -> f64 {
        let g = f.grid();
        let kk = g.axis_wavenumbers();
        let mut s = Complex64::default();
        for idx in 0..g.len() {
            let (a, b, c) = g.unflatten(idx);
            let ph = kk[a] * x[0] + kk[b] * x[1] + kk[c] * x[2];
            s += f.component(comp)[idx] * Complex64::from_polar(1.0, ph);
        }
        s.re
    }

    #[test]
    fn levi_civita_table() {
        assert_eq!(LeviCivita::epsilon(0, 1, 2), 1);
        assert_eq!(LeviCivita::epsilon(1, 2, 0), 1);
        assert_eq!(LeviCivita::epsilon(2, 0, 1), 1);
        assert_eq!(LeviCivita::epsilon(0, 2, 1), -1);
        assert_eq!(LeviCivita::epsilon(1, 0, 2), -1);
        assert_eq!(LeviCivita::epsilon(2, 1, 0), -1);
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(LeviCivita::epsilon(i, i, j), 0);
                assert_eq!(LeviCivita::epsilon(i, j, i), 0);
                assert_eq!(LeviCivita::epsilon(j, i, i), 0);
            }
        }
    }

    #[test]
    fn derivative_of_constant_and_sine() {
        let g = make_grid(8, 2.0 * PI).unwrap();
        let c = field(&g, |_, _, _| [1.0, -2.0, 3.0]);
        assert!(derivative(&c, Axis::X1).max_abs() < 1e-15);
        let s = field(&g, |x, _, _| [x.sin(), 0.0, 0.0]);
        let d = derivative(&s, Axis::X1).to_real();
        let want = RealVectorField::from_fn(&g, |x, _, _| [x.cos(), 0.0, 0.0]).unwrap();
        assert!(d.max_abs_diff(&want) < 1e-14);
    }

    #[test]
    fn derivative_matches_centered_differences_with_richardson() {
        // oracle: centered differences of the interpolant, h and h/2, extrapolated
        let g = make_grid(4, 2.0 * PI).unwrap();
        let f = random::band_limited(&g, 1, &mut rng(7));
        for axis in Axis::ALL {
            let d = derivative(&f, axis);
            for &x in &[[0.3, 1.1, 2.0], [4.0, 0.2, 5.5]] {
                for comp in 0..3 {
                    let cd = |h: f64| {
                        let mut xp = x;
                        let mut xm = x;
                        xp[axis.index()] += h;
                        xm[axis.index()] -= h;
                        (interpolant(&f, comp, xp) - interpolant(&f, comp, xm)) / (2.0 * h)
                    };
                    let exact = interpolant(&d, comp, x);
                    let (e1, e2) = (cd(1e-2) - exact, cd(5e-3) - exact);
                    let rich = (4.0 * cd(5e-3) - cd(1e-2)) / 3.0;
                    assert!((rich - exact).abs() < 1e-8, "richardson {rich} vs {exact}");
                    if e1.abs() > 1e-9 {
                        let ratio = e1 / e2;
                        assert!((ratio - 4.0).abs() < 0.05, "O(h²) ratio {ratio}");
                    }
                }
            }
        }
    }

    #[test]
    fn curl_of_gradient_and_divergence_of_curl_vanish() {
        let g = make_grid(8, 3.0).unwrap();
        let mut r = rng(11);
        for _ in 0..20 {
            let f = random::band_limited(&g, 3, &mut r);
            let p = divergence(&f);
            let cg = curl(&gradient(&p));
            assert!(cg.max_abs() <= 1e-13 * gradient(&p).max_abs().max(1.0));
            let dc = divergence(&curl(&f));
            assert!(dc.max_abs() <= 1e-13 * curl(&f).max_abs().max(1.0));
        }
    }

    #[test]
    fn curl_of_sin_y_component() {
        let g = make_grid(8, 2.0 * PI).unwrap();
        let f = field(&g, |x, _, _| [0.0, x.sin(), 0.0]);
        let c = curl(&f).to_real();
        let want = RealVectorField::from_fn(&g, |x, _, _| [0.0, 0.0, x.cos()]).unwrap();
        assert!(c.max_abs_diff(&want) < 1e-14);
    }

    #[test]
    fn vector_laplacian_identity() {
        let g = make_grid(8, 5.0).unwrap();
        let mut r = rng(3);
        for _ in 0..100 {
            let f = random::band_limited(&g, 3, &mut r);
            let lhs = grad_div(&f).sub(&curl(&curl(&f)));
            let lap = laplacian(&f);
            assert!(lhs.max_abs_diff(&lap) <= 1e-12 * lap.max_abs());
        }
    }

    #[test]
    fn leray_examples() {
        let g = make_grid(8, 2.0 * PI).unwrap();
        let sy = field(&g, |_, y, _| [y.sin(), 0.0, 0.0]);
        assert!(leray_project(&sy).max_abs_diff(&sy) < 1e-15);
        let sx = field(&g, |x, _, _| [x.sin(), 0.0, 0.0]);
        assert!(leray_project(&sx).max_abs() < 1e-15);
        let mut r = rng(5);
        let f = random::band_limited(&g, 3, &mut r);
        assert!(leray_project(&gradient(&divergence(&f))).max_abs() < 1e-13);
        let sol = curl(&f);
        assert!(leray_project(&sol).max_abs_diff(&sol) < 1e-13 * sol.max_abs());
    }

    #[test]
    fn leray_is_idempotent_and_self_adjoint() {
        let g = make_grid(8, 2.0).unwrap();
        let mut r = rng(9);
        for _ in 0..50 {
            let f = random::band_limited(&g, 3, &mut r);
            let h = random::band_limited(&g, 3, &mut r);
            let pf = leray_project(&f);
            assert!(leray_project(&pf).max_abs_diff(&pf) <= 1e-13 * pf.max_abs());
            assert!(divergence(&pf).l2_norm() <= 1e-12 * f.dm_norm_sq(1).sqrt());
            let a = pf.inner(&h);
            let b = f.inner(&leray_project(&h));
            assert!((a - b).abs() <= 1e-12 * f.l2_norm() * h.l2_norm());
        }
    }

    #[test]
    fn dealias_rules() {
        let g = make_grid(8, 1.0).unwrap();
        let kept: Vec<i64> = (0..8).map(|i| g.mode(i)).filter(|m| m.abs() <= g.dealias_cutoff()).collect();
        let mut sorted = kept.clone();
        sorted.sort();
        assert_eq!(sorted, vec![-2, -1, 0, 1, 2]);
        let mut r = rng(1);
        let inside = random::band_limited(&g, 2, &mut r);
        assert_eq!(dealias(&inside).max_abs_diff(&inside), 0.0);
        for _ in 0..100 {
            let f = random::band_limited(&g, 3, &mut r);
            let d = dealias(&f);
            assert_eq!(dealias(&d).max_abs_diff(&d), 0.0);
        }
    }

    #[test]
    fn advect_trivial_cases() {
        let g = make_grid(8, 2.0).unwrap();
        let mut r = rng(2);
        let f = random::band_limited(&g, 2, &mut r);
        let zero = SpectralVectorField::zeros(&g);
        assert!(advect(&zero, &f).max_abs() < 1e-13);
        let v = random::solenoidal(&g, 2, &mut r);
        let c = field(&g, |_, _, _| [1.0, 2.0, 3.0]);
        assert!(advect(&v, &c).max_abs() < 1e-15);
    }

    #[test]
    fn advect_is_skew_symmetric() {
        let g = make_grid(16, 2.0 * PI).unwrap();
        let mut r = rng(4);
        for _ in 0..10 {
            let v = dealias(&random::solenoidal(&g, 5, &mut r));
            let f = dealias(&random::band_limited(&g, 5, &mut r));
            let s = advect(&v, &f).inner(&f);
            let scale = v.to_real().linf_norm() * f.dm_norm_sq(1).sqrt() * f.l2_norm();
            assert!(s.abs() <= 1e-11 * scale, "skew residual {s} (scale {scale})");
        }
    }

    #[test]
    fn advect_matches_convolution_oracle() {
        let g = make_grid(4, 2.0 * PI).unwrap();
        let mut r = rng(6);
        let v = random::band_limited(&g, 1, &mut r);
        let f = random::band_limited(&g, 1, &mut r);
        let got = advect(&v, &f);
        let n = g.n() as i64;
        let kk = g.k_deriv();
        let idx_of = |m: [i64; 3]| {
            let w = |x: i64| x.rem_euclid(n) as usize;
            g.index(w(m[0]), w(m[1]), w(m[2]))
        };
        for kidx in 0..g.len() {
            let (a, b, c) = g.unflatten(kidx);
            let km = [g.mode(a), g.mode(b), g.mode(c)];
            let mut want = [Complex64::default(); 3];
            if km.iter().all(|m| m.abs() <= g.dealias_cutoff()) {
                for pidx in 0..g.len() {
                    let (pa, pb, pc) = g.unflatten(pidx);
                    let pm = [g.mode(pa), g.mode(pb), g.mode(pc)];
                    let qm = [km[0] - pm[0], km[1] - pm[1], km[2] - pm[2]];
                    if qm.iter().any(|m| m.abs() >= n / 2) {
                        continue;
                    }
                    let qidx = idx_of(qm);
                    let (qa, qb, qc) = g.unflatten(qidx);
                    let qk = [kk[qa], kk[qb], kk[qc]];
                    for i in 0..3 {
                        for j in 0..3 {
                            want[i] += v.component(j)[pidx] * I * qk[j] * f.component(i)[qidx];
                        }
                    }
                }
            }
            for i in 0..3 {
                assert!((got.component(i)[kidx] - want[i]).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn operators_preserve_hermitian_symmetry() {
        let g = make_grid(8, 2.0).unwrap();
        let f = random::band_limited(&g, 3, &mut rng(8));
        for out in [curl(&f), laplacian(&f), grad_div(&f), leray_project(&f), derivative(&f, Axis::X2)] {
            assert!(out.hermitian_defect() < 1e-13);
        }
    }
    #[test]
    fn divergence_form_matches_advective_form() {
        let g = make_grid(12, 3.0).unwrap();
        let mut r = rng(7);
        let u = random::solenoidal(&g, 2, &mut r);
        let w = random::band_limited(&g, 2, &mut r);
        for dealiased in [false, true] {
            let (uu, uw, speed) = advect_solenoidal(&u, &w, dealiased);
            assert!(uu.max_abs_diff(&advect(&u, &u)) < 1e-12);
            assert!(uw.max_abs_diff(&advect(&u, &w)) < 1e-12);
            let real = u.to_real();
            let want = (0..g.len())
                .map(|i| (0..3).map(|c| real.component(c)[i].powi(2)).sum::<f64>().sqrt())
                .fold(0.0, f64::max);
            assert!((speed - want).abs() < 1e-12 * want);
        }
    }
}

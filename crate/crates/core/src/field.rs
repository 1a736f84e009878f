//! Vector and scalar field value types in physical and Fourier representation.

use rustfft::num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fft;
use crate::grid::Grid;
use crate::numerics::pairwise_sum;

fn check_len(grid: &Grid, len: usize) -> Result<()> {
    if len != grid.len() {
        return Err(Error::ShapeMismatch {
            expected: grid.len(),
            got: len,
        });
    }
    Ok(())
}

fn check_grids(a: &Grid, b: &Grid) {
    assert!(a == b, "fields live on different grids");
}

/// Real 3-vector field sampled on the grid.
#[derive(Clone, Debug, PartialEq)]
pub struct RealVectorField {
    grid: Grid,
    comps: [Vec<f64>; 3],
}

impl RealVectorField {
    /// Builds a field, rejecting wrong lengths and non-finite values.
    pub fn new(grid: &Grid, comps: [Vec<f64>; 3]) -> Result<Self> {
        for c in &comps {
            check_len(grid, c.len())?;
            if c.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite("real vector field".into()));
            }
        }
        Ok(Self {
            grid: grid.clone(),
            comps,
        })
    }

    pub fn zeros(grid: &Grid) -> Self {
        let n = grid.len();
        Self {
            grid: grid.clone(),
            comps: [vec![0.0; n], vec![0.0; n], vec![0.0; n]],
        }
    }

    /// Samples `f(x1, x2, x3)` at the grid points.
    pub fn from_fn<F: Fn(f64, f64, f64) -> [f64; 3]>(grid: &Grid, f: F) -> Result<Self> {
        let n = grid.n();
        let mut comps = [
            Vec::with_capacity(grid.len()),
            Vec::with_capacity(grid.len()),
            Vec::with_capacity(grid.len()),
        ];
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let v = f(grid.coord(a), grid.coord(b), grid.coord(c));
                    for (comp, x) in comps.iter_mut().zip(v) {
                        comp.push(x);
                    }
                }
            }
        }
        Self::new(grid, comps)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn component(&self, i: usize) -> &[f64] {
        &self.comps[i]
    }

    pub fn components(&self) -> &[Vec<f64>; 3] {
        &self.comps
    }

    pub fn into_components(self) -> [Vec<f64>; 3] {
        self.comps
    }

    pub fn to_spectral(&self) -> SpectralVectorField {
        let n = self.grid.n();
        let [a, b, c]: [Vec<Complex64>; 3] = fft::forward_real_many(
            n,
            &[&self.comps[0], &self.comps[1], &self.comps[2]],
        )
        .try_into()
        .expect("three components");
        SpectralVectorField {
            grid: self.grid.clone(),
            comps: [a, b, c],
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            grid: self.grid.clone(),
            comps: self.comps.clone().map(|c| c.into_iter().map(|v| v * s).collect()),
        }
    }

    /// Grid-quadrature L^q norm `(Σ_i ∫ |u_i|^q dx)^{1/q}` for finite `q >= 1`.
    pub fn lq_norm(&self, q: f64) -> f64 {
        let dv = self.grid.cell_volume();
        let s: f64 = self
            .comps
            .iter()
            .map(|c| pairwise_sum(c.len(), |i| c[i].abs().powf(q)))
            .sum();
        (s * dv).powf(1.0 / q)
    }

    pub fn l2_norm(&self) -> f64 {
        let dv = self.grid.cell_volume();
        let s: f64 = self
            .comps
            .iter()
            .map(|c| pairwise_sum(c.len(), |i| c[i] * c[i]))
            .sum();
        (s * dv).sqrt()
    }

    pub fn l1_norm(&self) -> f64 {
        self.lq_norm(1.0)
    }

    /// `max_i ‖u_i‖_∞` over grid points.
    pub fn linf_norm(&self) -> f64 {
        self.comps
            .iter()
            .flat_map(|c| c.iter())
            .fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        check_grids(&self.grid, &other.grid);
        self.comps
            .iter()
            .zip(&other.comps)
            .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).abs()))
            .fold(0.0, f64::max)
    }
}

/// Fourier coefficients of a real 3-vector field, indexed by wavenumber triple.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralVectorField {
    grid: Grid,
    comps: [Vec<Complex64>; 3],
}

impl SpectralVectorField {
    pub fn new(grid: &Grid, comps: [Vec<Complex64>; 3]) -> Result<Self> {
        for c in &comps {
            check_len(grid, c.len())?;
            if c.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
                return Err(Error::NonFinite("spectral vector field".into()));
            }
        }
        Ok(Self {
            grid: grid.clone(),
            comps,
        })
    }

    pub(crate) fn from_parts(grid: &Grid, comps: [Vec<Complex64>; 3]) -> Self {
        debug_assert!(comps.iter().all(|c| c.len() == grid.len()));
        Self {
            grid: grid.clone(),
            comps,
        }
    }

    pub fn zeros(grid: &Grid) -> Self {
        let n = grid.len();
        let z = Complex64::default();
        Self {
            grid: grid.clone(),
            comps: [vec![z; n], vec![z; n], vec![z; n]],
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn component(&self, i: usize) -> &[Complex64] {
        &self.comps[i]
    }

    pub fn components(&self) -> &[Vec<Complex64>; 3] {
        &self.comps
    }


    pub fn into_components(self) -> [Vec<Complex64>; 3] {
        self.comps
    }

    /// Coefficient vector at a flat wavenumber index.
    #[inline]
    pub fn at(&self, idx: usize) -> [Complex64; 3] {
        [self.comps[0][idx], self.comps[1][idx], self.comps[2][idx]]
    }

    pub fn to_real(&self) -> RealVectorField {
        let n = self.grid.n();
        let [a, b, c]: [Vec<f64>; 3] = fft::inverse_real_many(
            n,
            &[&self.comps[0], &self.comps[1], &self.comps[2]],
        )
        .try_into()
        .expect("three components");
        RealVectorField {
            grid: self.grid.clone(),
            comps: [a, b, c],
        }
    }

    /// Applies a per-mode 3-vector map `f(idx, coeffs) -> coeffs`.
    pub fn map_modes<F: Fn(usize, [Complex64; 3]) -> [Complex64; 3]>(&self, f: F) -> Self {
        let len = self.grid.len();
        let mut out = [
            Vec::with_capacity(len),
            Vec::with_capacity(len),
            Vec::with_capacity(len),
        ];
        for idx in 0..len {
            let v = f(idx, self.at(idx));
            for (o, x) in out.iter_mut().zip(v) {
                o.push(x);
            }
        }
        Self::from_parts(&self.grid, out)
    }

    /// Multiplies every coefficient by a real per-mode factor.
    pub fn scale_modes<F: Fn(usize) -> f64>(&self, f: F) -> Self {
        let mut out = self.clone();
        for c in out.comps.iter_mut() {
            for (idx, v) in c.iter_mut().enumerate() {
                *v *= f(idx);
            }
        }
        out
    }

    pub fn scale(&self, s: f64) -> Self {
        self.scale_modes(|_| s)
    }

    pub fn add(&self, other: &Self) -> Self {
        self.axpy(1.0, other)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.axpy(-1.0, other)
    }

    /// `self + a * other`.
    pub fn axpy(&self, a: f64, other: &Self) -> Self {
        check_grids(&self.grid, &other.grid);
        let mut out = self.clone();
        out.axpy_in_place(a, other);
        out
    }

    pub(crate) fn axpy_in_place(&mut self, a: f64, other: &Self) {
        for (x, y) in self.comps.iter_mut().zip(&other.comps) {
            for (p, q) in x.iter_mut().zip(y) {
                *p += q * a;
            }
        }
    }

    /// Grid L² inner product `∫ f·g dx`, computed on the spectral side.
    pub fn inner(&self, other: &Self) -> f64 {
        check_grids(&self.grid, &other.grid);
        let s: f64 = self
            .comps
            .iter()
            .zip(&other.comps)
            .map(|(a, b)| pairwise_sum(a.len(), |i| (a[i] * b[i].conj()).re))
            .sum();
        s * self.grid.volume()
    }

    /// `Σ_k w(k) |f̂(k)|²` scaled by the box volume.
    pub fn weighted_norm_sq<F: Fn(usize) -> f64>(&self, w: F) -> f64 {
        let s: f64 = self
            .comps
            .iter()
            .map(|a| pairwise_sum(a.len(), |i| w(i) * a[i].norm_sqr()))
            .sum();
        s * self.grid.volume()
    }

    pub fn l2_norm_sq(&self) -> f64 {
        self.weighted_norm_sq(|_| 1.0)
    }

    pub fn l2_norm(&self) -> f64 {
        self.l2_norm_sq().sqrt()
    }

    /// `‖D^m f‖²` with the component-sum convention (Σ_i Σ_j... |D_j.. f_i|²).
    pub fn dm_norm_sq(&self, m: u32) -> f64 {
        let k2 = self.grid.k_squared();
        let grid = &self.grid;
        if m == 0 {
            return self.l2_norm_sq();
        }
        self.weighted_norm_sq(|i| {
            if grid.has_nyquist(i) {
                0.0
            } else {
                k2[i].powi(m as i32)
            }
        })
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        check_grids(&self.grid, &other.grid);
        self.comps
            .iter()
            .zip(&other.comps)
            .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).norm()))
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.comps
            .iter()
            .flat_map(|c| c.iter())
            .fold(0.0, |m, v| m.max(v.norm()))
    }

    /// Largest `|f̂(-k) - conj(f̂(k))|` over all modes.
    pub fn hermitian_defect(&self) -> f64 {
        let mut worst = 0.0_f64;
        for c in &self.comps {
            for idx in 0..c.len() {
                let j = self.grid.conjugate_index(idx);
                worst = worst.max((c[j] - c[idx].conj()).norm());
            }
        }
        worst
    }

    /// Magnitude of the mean (k = 0) coefficient vector.
    pub fn mean_norm(&self) -> f64 {
        self.comps.iter().map(|c| c[0].norm_sqr()).sum::<f64>().sqrt()
    }

    /// Zeroes the mean mode.
    pub fn without_mean(&self) -> Self {
        let mut out = self.clone();
        for c in out.comps.iter_mut() {
            c[0] = Complex64::default();
        }
        out
    }

    pub fn is_finite(&self) -> bool {
        self.comps
            .iter()
            .all(|c| c.iter().all(|v| v.re.is_finite() && v.im.is_finite()))
    }
}

/// Real scalar field on the grid (pressure, divergence diagnostics).
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarField {
    grid: Grid,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn new(grid: &Grid, values: Vec<f64>) -> Result<Self> {
        check_len(grid, values.len())?;
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("scalar field".into()));
        }
        Ok(Self {
            grid: grid.clone(),
            values,
        })
    }

    pub fn from_fn<F: Fn(f64, f64, f64) -> f64>(grid: &Grid, f: F) -> Result<Self> {
        let n = grid.n();
        let mut values = Vec::with_capacity(grid.len());
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    values.push(f(grid.coord(a), grid.coord(b), grid.coord(c)));
                }
            }
        }
        Self::new(grid, values)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn to_spectral(&self) -> SpectralScalarField {
        SpectralScalarField {
            grid: self.grid.clone(),
            coeffs: fft::forward_real(self.grid.n(), &self.values),
        }
    }

    pub fn l2_norm(&self) -> f64 {
        let s = pairwise_sum(self.values.len(), |i| self.values[i] * self.values[i]);
        (s * self.grid.cell_volume()).sqrt()
    }

    pub fn linf_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Fourier coefficients of a real scalar field.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralScalarField {
    grid: Grid,
    coeffs: Vec<Complex64>,
}

impl SpectralScalarField {
    pub fn new(grid: &Grid, coeffs: Vec<Complex64>) -> Result<Self> {
        check_len(grid, coeffs.len())?;
        Ok(Self {
            grid: grid.clone(),
            coeffs,
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn to_real(&self) -> ScalarField {
        ScalarField {
            grid: self.grid.clone(),
            values: fft::inverse_real(self.grid.n(), &self.coeffs),
        }
    }

    pub fn l2_norm_sq(&self) -> f64 {
        pairwise_sum(self.coeffs.len(), |i| self.coeffs[i].norm_sqr()) * self.grid.volume()
    }

    pub fn l2_norm(&self) -> f64 {
        self.l2_norm_sq().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, v| m.max(v.norm()))
    }
}

/// The pair `(u, w)` at time `t`.
#[derive(Clone, Debug, PartialEq)]
pub struct SimState {
    pub t: f64,
    pub u: SpectralVectorField,
    pub w: SpectralVectorField,
}

impl SimState {
    pub fn new(t: f64, u: SpectralVectorField, w: SpectralVectorField) -> Result<Self> {
        if !(t.is_finite() && t >= 0.0) {
            return Err(Error::InvalidArgument(format!("time must be >= 0, got {t}")));
        }
        if u.grid() != w.grid() {
            return Err(Error::GridMismatch("u and w on different grids".into()));
        }
        Ok(Self { t, u, w })
    }

    pub fn zeros(grid: &Grid) -> Self {
        Self {
            t: 0.0,
            u: SpectralVectorField::zeros(grid),
            w: SpectralVectorField::zeros(grid),
        }
    }

    pub fn grid(&self) -> &Grid {
        self.u.grid()
    }

    /// `‖(u, w)‖²`.
    pub fn energy(&self) -> f64 {
        self.u.l2_norm_sq() + self.w.l2_norm_sq()
    }

    pub fn is_finite(&self) -> bool {
        self.t.is_finite() && self.u.is_finite() && self.w.is_finite()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;
    use std::f64::consts::PI;

    #[test]
    fn zero_field_has_zero_coefficients() {
        let g = make_grid(8, 1.0).unwrap();
        let f = RealVectorField::zeros(&g).to_spectral();
        assert_eq!(f.max_abs(), 0.0);
    }

    #[test]
    fn single_sine_has_two_half_coefficients() {
        let l = 3.0;
        let g = make_grid(8, l).unwrap();
        let f = RealVectorField::from_fn(&g, |x, _, _| [(2.0 * PI * x / l).sin(), 0.0, 0.0])
            .unwrap()
            .to_spectral();
        let nonzero: Vec<usize> = (0..g.len())
            .filter(|&i| f.component(0)[i].norm() > 1e-14)
            .collect();
        assert_eq!(nonzero, vec![g.index(1, 0, 0), g.index(7, 0, 0)]);
        for i in nonzero {
            assert!((f.component(0)[i].norm() - 0.5).abs() < 1e-15);
        }
        assert!(f.component(1).iter().all(|c| c.norm() < 1e-15));
    }

    #[test]
    fn rejects_non_finite_and_bad_shapes() {
        let g = make_grid(4, 1.0).unwrap();
        let mut bad = vec![0.0; 64];
        bad[3] = f64::NAN;
        assert!(RealVectorField::new(&g, [bad, vec![0.0; 64], vec![0.0; 64]]).is_err());
        assert!(RealVectorField::new(&g, [vec![0.0; 63], vec![0.0; 64], vec![0.0; 64]]).is_err());
        assert!(ScalarField::new(&g, vec![f64::INFINITY; 64]).is_err());
    }

    #[test]
    fn sin_l2_norm_on_two_pi_box() {
        let g = make_grid(16, 2.0 * PI).unwrap();
        let f = RealVectorField::from_fn(&g, |x, _, _| [x.sin(), 0.0, 0.0]).unwrap();
        let want = (4.0 * PI.powi(3)).sqrt();
        assert!((f.l2_norm() - want).abs() < 1e-12 * want);
        assert!((f.to_spectral().l2_norm() - want).abs() < 1e-12 * want);
    }
}

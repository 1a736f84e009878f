//! Periodic box geometry and the wavenumber lattice.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Cubic periodic box with `n` points per axis and side `box_length`.
///
/// Flat arrays are laid out row-major with the third axis fastest:
/// `index = (i1 * n + i2) * n + i3`. Along each axis the FFT index `i` maps to
/// the integer mode `i` for `i <= n/2` and `i - n` above, so the lattice
/// covers `[-n/2 + 1, n/2]` in units of `2π/L`.
#[derive(Clone, Debug)]
pub struct Grid {
    n: usize,
    box_length: f64,
    inner: Arc<Lattice>,
}

#[derive(Debug)]
struct Lattice {
    /// Axis wavenumbers, Nyquist included.
    k: Vec<f64>,
    /// Axis wavenumbers used for differentiation (Nyquist zeroed).
    k_deriv: Vec<f64>,
    /// Signed integer mode per axis index.
    mode: Vec<i64>,
    /// |k|^2 per flat index.
    k2: Vec<f64>,
    /// True where any axis index is the Nyquist index.
    nyquist: Vec<bool>,
    /// True where every axis mode survives the 2/3 rule.
    retained: Vec<bool>,
}

impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.box_length.to_bits() == other.box_length.to_bits()
    }
}

pub fn make_grid(n: usize, box_length: f64) -> Result<Grid> {
    Grid::new(n, box_length)
}

impl Grid {
    pub fn new(n: usize, box_length: f64) -> Result<Self> {
        if n < 4 || !n.is_multiple_of(2) {
            return Err(Error::InvalidGrid(format!(
                "points per axis must be even and >= 4, got {n}"
            )));
        }
        if !(box_length.is_finite() && box_length > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "box length must be positive and finite, got {box_length}"
            )));
        }
        let scale = 2.0 * PI / box_length;
        let mode: Vec<i64> = (0..n)
            .map(|i| if i <= n / 2 { i as i64 } else { i as i64 - n as i64 })
            .collect();
        let k: Vec<f64> = mode.iter().map(|&m| m as f64 * scale).collect();
        let k_deriv: Vec<f64> = (0..n)
            .map(|i| if i == n / 2 { 0.0 } else { k[i] })
            .collect();
        let mut k2 = Vec::with_capacity(n * n * n);
        let mut nyquist = Vec::with_capacity(n * n * n);
        let mut retained = Vec::with_capacity(n * n * n);
        let h = n / 2;
        let cut = (n / 3) as i64;
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    k2.push(k[a] * k[a] + k[b] * k[b] + k[c] * k[c]);
                    nyquist.push(a == h || b == h || c == h);
                    retained.push(mode[a].abs() <= cut && mode[b].abs() <= cut && mode[c].abs() <= cut);
                }
            }
        }
        Ok(Self {
            n,
            box_length,
            inner: Arc::new(Lattice {
                k,
                k_deriv,
                mode,
                k2,
                nyquist,
                retained,
            }),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn box_length(&self) -> f64 {
        self.box_length
    }

    /// Number of grid points, `n³`.
    pub fn len(&self) -> usize {
        self.n * self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dx(&self) -> f64 {
        self.box_length / self.n as f64
    }

    pub fn volume(&self) -> f64 {
        self.box_length.powi(3)
    }

    pub fn cell_volume(&self) -> f64 {
        self.dx().powi(3)
    }

    /// Smallest nonzero wavenumber magnitude, `2π/L`.
    pub fn k_min(&self) -> f64 {
        2.0 * PI / self.box_length
    }

    /// Axis wavenumbers in FFT order.
    pub fn axis_wavenumbers(&self) -> &[f64] {
        &self.inner.k
    }

    pub(crate) fn k_deriv(&self) -> &[f64] {
        &self.inner.k_deriv
    }

    /// Signed integer mode for an FFT index along one axis.
    pub fn mode(&self, i: usize) -> i64 {
        self.inner.mode[i]
    }

    /// |k|² per flat index.
    pub fn k_squared(&self) -> &[f64] {
        &self.inner.k2
    }

    #[inline]
    pub fn index(&self, i1: usize, i2: usize, i3: usize) -> usize {
        (i1 * self.n + i2) * self.n + i3
    }

    #[inline]
    pub fn unflatten(&self, idx: usize) -> (usize, usize, usize) {
        let n = self.n;
        (idx / (n * n), (idx / n) % n, idx % n)
    }

    /// Flat index of the mode `-k` given the flat index of `k`.
    #[inline]
    pub fn conjugate_index(&self, idx: usize) -> usize {
        let n = self.n;
        let (a, b, c) = self.unflatten(idx);
        self.index((n - a) % n, (n - b) % n, (n - c) % n)
    }

    /// Derivative wavevector (Nyquist components zeroed) at a flat index.
    #[inline]
    pub fn wavevector(&self, idx: usize) -> [f64; 3] {
        let (a, b, c) = self.unflatten(idx);
        let k = &self.inner.k_deriv;
        [k[a], k[b], k[c]]
    }

    /// Largest integer mode kept by the 2/3 rule.
    pub fn dealias_cutoff(&self) -> i64 {
        // |m| <= n/3, i.e. floor(n/3)
        (self.n / 3) as i64
    }

    /// True when every axis mode at `idx` survives the 2/3 rule.
    #[inline]
    pub fn retained(&self, idx: usize) -> bool {
        self.inner.retained[idx]
    }

    /// True when any axis index at `idx` is the Nyquist index.
    #[inline]
    pub fn has_nyquist(&self, idx: usize) -> bool {
        self.inner.nyquist[idx]
    }

    /// Physical coordinate of grid point `i` along an axis.
    #[inline]
    pub fn coord(&self, i: usize) -> f64 {
        i as f64 * self.dx()
    }
}

/// Viscosities of the micropolar system.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhysicalParams {
    /// Kinematic viscosity.
    pub mu: f64,
    /// Spin viscosity.
    pub gamma: f64,
    /// Vortex viscosity.
    pub chi: f64,
}

impl PhysicalParams {
    pub fn new(mu: f64, gamma: f64, chi: f64) -> Result<Self> {
        let p = Self { mu, gamma, chi };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mu.is_finite() && self.mu > 0.0) {
            return Err(Error::InvalidParams(format!("mu must be > 0, got {}", self.mu)));
        }
        if !(self.gamma.is_finite() && self.gamma > 0.0) {
            return Err(Error::InvalidParams(format!(
                "gamma must be > 0, got {}",
                self.gamma
            )));
        }
        if !(self.chi.is_finite() && self.chi >= 0.0) {
            return Err(Error::InvalidParams(format!("chi must be >= 0, got {}", self.chi)));
        }
        Ok(())
    }
}

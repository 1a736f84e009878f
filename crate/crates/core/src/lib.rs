//! Pseudo-spectral simulation of the 3D incompressible micropolar equations
//!
//! ```text
//! u_t + u·∇u + ∇P = (μ+χ)Δu + χ∇×w
//! w_t + u·∇w      = γΔw + ∇(∇·w) + χ∇×u − 2χw
//! ∇·u = 0
//! ```
//!
//! on a periodic cube, together with the machinery used to check energy
//! inequalities, heat-semigroup decay estimates and Duhamel representations
//! against simulated trajectories.

pub mod diagnostics;
pub mod dynamics;
pub mod error;
pub mod fft;
pub mod field;
pub mod grid;
pub mod inequality;
pub mod numerics;
pub mod ops;
pub mod random;
pub mod semigroup;

pub use error::{Error, Result};
pub use field::{RealVectorField, ScalarField, SimState, SpectralScalarField, SpectralVectorField};
pub use grid::{make_grid, Grid, PhysicalParams};

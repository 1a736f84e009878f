//! Run configuration, read from TOML.
//!
//! ```toml
//! [grid]
//! n = 32                      # points per axis, even, >= 4
//! L = 50.26548245743669       # box side length
//!
//! [params]
//! mu = 0.5                    # kinematic viscosity
//! gamma = 0.3                 # spin viscosity
//! chi = 0.1                   # vortex viscosity
//!
//! [ic]
//! kind = "random_solenoidal"  # or "taylor_green_like", "single_mode"
//! peak = 0.7                  # spectrum peak wavenumber, in [2π/L, floor(n/3)·2π/L]
//! amplitude = 0.2             # rms of each field
//! seed = 1
//!
//! [stepper]
//! dt = 0.05                   # time step
//! t_end = 20.0                # final time
//! cfl_safety = 0.5            # optional, Courant limit in (0, 1]
//!
//! [output]
//! dir = "out/chi0.1"          # relative to the config file
//! cadence = 1                 # optional, steps per CSV row
//! checkpoint_every = 100      # optional, steps between checkpoints, 0 = final only
//! ```
//!
//! Unknown keys are rejected.

use std::path::{Path, PathBuf};

use micropolar::dynamics::{IcKind, InitialCondition, StepperConfig, DEFAULT_CFL_SAFETY};
use micropolar::{make_grid, Error, Grid, PhysicalParams, Result};
use serde::Deserialize;

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub grid: GridSection,
    pub params: ParamsSection,
    pub ic: IcSection,
    pub stepper: StepperSection,
    pub output: OutputSection,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub n: usize,
    #[serde(rename = "L")]
    pub box_length: f64,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsSection {
    pub mu: f64,
    pub gamma: f64,
    pub chi: f64,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IcSection {
    pub kind: IcKind,
    pub peak: f64,
    pub amplitude: f64,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepperSection {
    pub dt: f64,
    pub t_end: f64,
    #[serde(default = "default_cfl")]
    pub cfl_safety: f64,
}

fn default_cfl() -> f64 {
    DEFAULT_CFL_SAFETY
}

fn default_cadence() -> u64 {
    1
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub dir: PathBuf,
    #[serde(default = "default_cadence")]
    pub cadence: u64,
    #[serde(default)]
    pub checkpoint_every: u64,
}

fn field_error(field: &str, e: Error) -> Error {
    let msg = match e {
        Error::InvalidGrid(m) | Error::InvalidParams(m) | Error::InvalidArgument(m) => m,
        other => other.to_string(),
    };
    Error::Config(format!("{field}: {msg}"))
}

impl RunConfig {
    /// Parses and validates a config; relative output paths are kept as written.
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads `path`; a relative `output.dir` is resolved against the file's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let mut cfg = Self::parse(&text).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            other => other,
        })?;
        if cfg.output.dir.is_relative() {
            let base = path.parent().unwrap_or(Path::new("."));
            cfg.output.dir = base.join(&cfg.output.dir);
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let grid = self.make_grid()?;
        self.physical_params()?;
        self.stepper_config()?;
        if self.output.cadence < 1 {
            return Err(Error::Config("output.cadence: must be >= 1".into()));
        }
        if !(self.ic.amplitude.is_finite() && self.ic.amplitude >= 0.0) {
            return Err(Error::Config(format!(
                "ic.amplitude: must be finite and >= 0, got {}",
                self.ic.amplitude
            )));
        }
        let (lo, hi) = (grid.k_min(), grid.dealias_cutoff() as f64 * grid.k_min());
        let peak = self.ic.peak;
        if !(peak.is_finite() && peak >= lo * (1.0 - 1e-12) && peak <= hi * (1.0 + 1e-12)) {
            return Err(Error::Config(format!("ic.peak: {peak} outside [{lo}, {hi}]")));
        }
        Ok(())
    }

    pub fn make_grid(&self) -> Result<Grid> {
        make_grid(self.grid.n, self.grid.box_length).map_err(|e| field_error("grid", e))
    }

    pub fn physical_params(&self) -> Result<PhysicalParams> {
        let p = &self.params;
        PhysicalParams::new(p.mu, p.gamma, p.chi).map_err(|e| field_error("params", e))
    }

    pub fn stepper_config(&self) -> Result<StepperConfig> {
        let mut cfg = StepperConfig::new(self.stepper.dt, self.stepper.t_end)
            .map_err(|e| field_error("stepper", e))?;
        cfg.cfl_safety = self.stepper.cfl_safety;
        cfg.validate().map_err(|e| field_error("stepper", e))?;
        Ok(cfg)
    }

    pub fn initial_condition(&self) -> InitialCondition {
        InitialCondition {
            kind: self.ic.kind,
            energy_spectrum_peak: self.ic.peak,
            amplitude: self.ic.amplitude,
            seed: self.ic.seed,
        }
    }
}

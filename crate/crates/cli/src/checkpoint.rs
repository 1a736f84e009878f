//! Binary checkpoints.
//!
//! Layout, all little-endian: the magic `MPOLAR01`, `u32 n`, `f64 L`, `f64 t`,
//! `f64 mu`, `f64 gamma`, `f64 chi`, then six coefficient blocks `u₁ u₂ u₃ w₁ w₂ w₃`.
//! Each block holds `n³` coefficients as interleaved `(re, im)` pairs in flat index
//! order `(i1 * n + i2) * n + i3`, with FFT index `i` standing for the integer mode
//! `i` for `i <= n/2` and `i − n` above.

use std::fs;
use std::io::Write;
use std::path::Path;

use micropolar::{make_grid, Error, PhysicalParams, Result, SimState, SpectralVectorField};
use rustfft::num_complex::Complex64;

pub const MAGIC: &[u8; 8] = b"MPOLAR01";
const HEADER_LEN: usize = 8 + 4 + 5 * 8;

#[derive(Clone, Debug, PartialEq)]
pub struct Checkpoint {
    pub state: SimState,
    pub params: PhysicalParams,
}

pub fn encode(state: &SimState, params: &PhysicalParams) -> Vec<u8> {
    let g = state.grid();
    let mut out = Vec::with_capacity(HEADER_LEN + 6 * g.len() * 16);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&(g.n() as u32).to_le_bytes());
    for v in [g.box_length(), state.t, params.mu, params.gamma, params.chi] {
        out.extend_from_slice(&v.to_le_bytes());
    }
    for f in [&state.u, &state.w] {
        for comp in f.components() {
            for c in comp {
                out.extend_from_slice(&c.re.to_le_bytes());
                out.extend_from_slice(&c.im.to_le_bytes());
            }
        }
    }
    out
}

fn bad(msg: impl Into<String>) -> Error {
    Error::Checkpoint(msg.into())
}

fn f64_at(bytes: &[u8], at: usize) -> f64 {
    f64::from_le_bytes(bytes[at..at + 8].try_into().expect("8 bytes"))
}

pub fn decode(bytes: &[u8]) -> Result<Checkpoint> {
    if bytes.len() < HEADER_LEN {
        return Err(bad(format!("truncated header: {} bytes", bytes.len())));
    }
    if &bytes[..8] != MAGIC {
        return Err(bad("bad magic or unsupported version"));
    }
    let n = u32::from_le_bytes(bytes[8..12].try_into().expect("4 bytes")) as usize;
    let header: Vec<f64> = (0..5).map(|i| f64_at(bytes, 12 + 8 * i)).collect();
    let (box_length, t) = (header[0], header[1]);
    if header.iter().any(|v| !v.is_finite()) {
        return Err(bad("non-finite header value"));
    }
    let grid = make_grid(n, box_length).map_err(|e| bad(e.to_string()))?;
    let params = PhysicalParams::new(header[2], header[3], header[4]).map_err(|e| bad(e.to_string()))?;
    let len = grid.len();
    let expected = HEADER_LEN + 6 * len * 16;
    if bytes.len() != expected {
        return Err(bad(format!(
            "expected {expected} bytes for n = {n}, found {}",
            bytes.len()
        )));
    }
    let mut blocks: Vec<Vec<Complex64>> = Vec::with_capacity(6);
    for b in 0..6 {
        let start = HEADER_LEN + b * len * 16;
        let block: Vec<Complex64> = (0..len)
            .map(|i| Complex64::new(f64_at(bytes, start + 16 * i), f64_at(bytes, start + 16 * i + 8)))
            .collect();
        if block.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
            return Err(bad(format!("non-finite coefficient in block {b}")));
        }
        blocks.push(block);
    }
    let mut it = blocks.into_iter();
    let mut field = || -> Result<SpectralVectorField> {
        let comps = [it.next().unwrap(), it.next().unwrap(), it.next().unwrap()];
        SpectralVectorField::new(&grid, comps)
    };
    let u = field()?;
    let w = field()?;
    let state = SimState::new(t, u, w).map_err(|e| bad(e.to_string()))?;
    Ok(Checkpoint { state, params })
}

/// Writes through a temporary file and a rename, so a crash never leaves a partial checkpoint.
pub fn write(path: &Path, state: &SimState, params: &PhysicalParams) -> Result<()> {
    let tmp = path.with_extension("tmp");
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(&encode(state, params))?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn read(path: &Path) -> Result<Checkpoint> {
    let bytes = fs::read(path).map_err(|e| bad(format!("{}: {e}", path.display())))?;
    decode(&bytes)
}

//! Three-dimensional complex FFT on the cubic grid.
//!
//! Forward transforms carry the `1/n³` factor; inverse transforms carry none.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

struct Plan {
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

fn plan(n: usize) -> Arc<Plan> {
    static PLANS: OnceLock<Mutex<HashMap<usize, Arc<Plan>>>> = OnceLock::new();
    let cache = PLANS.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("fft plan cache poisoned");
    guard
        .entry(n)
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            Arc::new(Plan {
                n,
                forward: planner.plan_fft_forward(n),
                inverse: planner.plan_fft_inverse(n),
            })
        })
        .clone()
}

impl Plan {
    fn run(&self, data: &mut [Complex64], fft: &Arc<dyn Fft<f64>>) {
        let n = self.n;
        assert_eq!(data.len(), n * n * n);
        let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
        // third axis: contiguous rows
        fft.process_with_scratch(data, &mut scratch);
        // second axis: gather each (i1, i3) column into a batch of lines
        let mut lines = vec![Complex64::default(); n * n];
        for i1 in 0..n {
            let plane = &mut data[i1 * n * n..(i1 + 1) * n * n];
            for i2 in 0..n {
                for i3 in 0..n {
                    lines[i3 * n + i2] = plane[i2 * n + i3];
                }
            }
            fft.process_with_scratch(&mut lines, &mut scratch);
            for i2 in 0..n {
                for i3 in 0..n {
                    plane[i2 * n + i3] = lines[i3 * n + i2];
                }
            }
        }
        // first axis
        for i2 in 0..n {
            for i1 in 0..n {
                let row = &data[(i1 * n + i2) * n..(i1 * n + i2 + 1) * n];
                for (i3, v) in row.iter().enumerate() {
                    lines[i3 * n + i1] = *v;
                }
            }
            fft.process_with_scratch(&mut lines, &mut scratch);
            for i1 in 0..n {
                let row = &mut data[(i1 * n + i2) * n..(i1 * n + i2 + 1) * n];
                for (i3, v) in row.iter_mut().enumerate() {
                    *v = lines[i3 * n + i1];
                }
            }
        }
    }
}

/// In-place forward transform, normalized by `1/n³`.
pub fn forward(n: usize, data: &mut [Complex64]) {
    let p = plan(n);
    p.run(data, &p.forward);
    let scale = 1.0 / (n * n * n) as f64;
    for c in data.iter_mut() {
        *c *= scale;
    }
}

/// In-place inverse transform (unnormalized).
pub fn inverse(n: usize, data: &mut [Complex64]) {
    let p = plan(n);
    p.run(data, &p.inverse);
}

/// Forward transform of a real array.
pub fn forward_real(n: usize, values: &[f64]) -> Vec<Complex64> {
    let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    forward(n, &mut buf);
    buf
}

/// Inverse transform returning the real part.
pub fn inverse_real(n: usize, coeffs: &[Complex64]) -> Vec<f64> {
    let mut buf = coeffs.to_vec();
    inverse(n, &mut buf);
    buf.into_iter().map(|c| c.re).collect()
}

/// Inverse transforms of Hermitian spectra, two per complex transform.
pub fn inverse_real_many(n: usize, inputs: &[&[Complex64]]) -> Vec<Vec<f64>> {
    let mut out = Vec::with_capacity(inputs.len());
    for chunk in inputs.chunks(2) {
        match chunk {
            [a, b] => {
                let mut buf: Vec<Complex64> =
                    a.iter().zip(b.iter()).map(|(x, y)| x + Complex64::i() * y).collect();
                inverse(n, &mut buf);
                out.push(buf.iter().map(|c| c.re).collect());
                out.push(buf.iter().map(|c| c.im).collect());
            }
            [a] => out.push(inverse_real(n, a)),
            _ => unreachable!(),
        }
    }
    out
}

/// Forward transforms of real arrays, two per complex transform.
pub fn forward_real_many(n: usize, inputs: &[&[f64]]) -> Vec<Vec<Complex64>> {
    let mut out = Vec::with_capacity(inputs.len());
    for chunk in inputs.chunks(2) {
        match chunk {
            [a, b] => {
                let mut buf: Vec<Complex64> =
                    a.iter().zip(b.iter()).map(|(&x, &y)| Complex64::new(x, y)).collect();
                forward(n, &mut buf);
                let mut fa = vec![Complex64::default(); buf.len()];
                let mut fb = vec![Complex64::default(); buf.len()];
                for i1 in 0..n {
                    let m1 = (n - i1) % n;
                    for i2 in 0..n {
                        let m2 = (n - i2) % n;
                        let row = (i1 * n + i2) * n;
                        let mrow = (m1 * n + m2) * n;
                        for i3 in 0..n {
                            let z = buf[row + i3];
                            let zm = buf[mrow + (n - i3) % n].conj();
                            fa[row + i3] = (z + zm) * 0.5;
                            fb[row + i3] = (z - zm) * Complex64::new(0.0, -0.5);
                        }
                    }
                }
                out.push(fa);
                out.push(fb);
            }
            [a] => out.push(forward_real(n, a)),
            _ => unreachable!(),
        }
    }
    out
}

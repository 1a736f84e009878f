//! Small numerical helpers shared across modules.

const BLOCK: usize = 64;

/// Pairwise (cascade) summation of `f(i)` for `i in 0..len`.
pub fn pairwise_sum<F: Fn(usize) -> f64>(len: usize, f: F) -> f64 {
    fn rec<F: Fn(usize) -> f64>(lo: usize, hi: usize, f: &F) -> f64 {
        if hi - lo <= BLOCK {
            let mut s = 0.0;
            for i in lo..hi {
                s += f(i);
            }
            s
        } else {
            let mid = lo + (hi - lo) / 2;
            rec(lo, mid, f) + rec(mid, hi, f)
        }
    }
    if len == 0 {
        0.0
    } else {
        rec(0, len, &f)
    }
}

/// Ordinary least-squares fit `y = intercept + slope * x`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    assert_eq!(x.len(), y.len());
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
    }
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    (slope, my - slope * mx)
}

/// Relative difference `|a - b| / max(|a|, |b|, floor)`.
pub fn rel_diff(a: f64, b: f64, floor: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(floor)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairwise_matches_naive_on_integers() {
        let s = pairwise_sum(10_000, |i| i as f64);
        assert_eq!(s, 49_995_000.0);
        assert_eq!(pairwise_sum(0, |_| 1.0), 0.0);
    }

    #[test]
    fn fit_recovers_line() {
        let x: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let y: Vec<f64> = x.iter().map(|v| 2.0 - 0.75 * v).collect();
        let (s, c) = linear_fit(&x, &y);
        assert!((s + 0.75).abs() < 1e-14 && (c - 2.0).abs() < 1e-13);
    }
}

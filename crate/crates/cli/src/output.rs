//! Diagnostics CSV and run report.

use std::fmt::Write as _;

use micropolar::diagnostics::{DecayFit, DiagnosticsRecord};
use micropolar::PhysicalParams;

pub const CSV_HEADER: &str = "t,l2_u,l2_w,l2_pair,l2_Du,l2_Dw,l2_Dpair,l2_D2pair,l2_divw,linf_pair,cross_term,ledger_lhs,ledger_rhs,t_sqrt_l2_w";

/// One CSV line, newline included. Values use the shortest decimal form that
/// round-trips to the same double.
pub fn csv_row(r: &DiagnosticsRecord) -> String {
    let values = [
        r.t,
        r.l2_u,
        r.l2_w,
        r.l2_pair,
        r.l2_du,
        r.l2_dw,
        r.l2_dpair,
        r.l2_d2pair,
        r.l2_divw,
        r.linf_pair,
        r.cross_term,
        r.energy_ledger_lhs,
        r.energy_ledger_rhs,
        r.t_sqrt_l2_w(),
    ];
    let mut line = String::with_capacity(values.len() * 24);
    for (i, v) in values.iter().enumerate() {
        if i > 0 {
            line.push(',');
        }
        write!(line, "{v}").expect("write to string");
    }
    line.push('\n');
    line
}

/// Parsed CSV columns, in header order.
pub fn parse_csv(text: &str) -> Result<Vec<[f64; 14]>, String> {
    let mut lines = text.lines();
    if lines.next() != Some(CSV_HEADER) {
        return Err("unexpected header".into());
    }
    lines
        .enumerate()
        .map(|(i, line)| {
            let v: Vec<f64> = line
                .split(',')
                .map(|s| s.parse::<f64>().map_err(|e| format!("row {}: {e}", i + 1)))
                .collect::<Result<_, _>>()?;
            v.try_into().map_err(|_| format!("row {}: wrong column count", i + 1))
        })
        .collect()
}

/// Summary statistics written next to the decay fit.
#[derive(Clone, Debug, PartialEq)]
pub struct RunStats {
    pub t_start: f64,
    pub t_end: f64,
    pub steps: u64,
    /// Largest `ledger_lhs / ledger_rhs − 1` over all records.
    pub max_ledger_excess: f64,
    pub max_balance_residual: f64,
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "none".to_string(), |x| format!("{x}"))
}

pub fn report(p: &PhysicalParams, stats: &RunStats, fit: Option<&DecayFit>, status: &str) -> String {
    let mut s = String::new();
    let mut line = |k: &str, v: String| writeln!(s, "{k} = {v}").expect("write to string");
    line("status", status.to_string());
    line("mu", format!("{}", p.mu));
    line("gamma", format!("{}", p.gamma));
    line("chi", format!("{}", p.chi));
    line("t_start", format!("{}", stats.t_start));
    line("t_end", format!("{}", stats.t_end));
    line("steps", format!("{}", stats.steps));
    line("max_ledger_excess", format!("{:e}", stats.max_ledger_excess));
    line("max_balance_residual", format!("{:e}", stats.max_balance_residual));
    if let Some(f) = fit {
        line("c_inf", format!("{}", f.c_inf));
        line("t0_detected", opt(f.t0_detected));
        line("window", format!("{} {}", f.window[0], f.window[1]));
        line("slope_pair", format!("{}", f.slope_pair));
        line("monotone_after_t0", f.monotone_after_t0.to_string());
        line("pair_strictly_decreasing", f.pair_strictly_decreasing.to_string());
        line("d_weighted_peak_early", f.d_weighted_peak_early.to_string());
        line("w_exp_rate", opt(f.w_exp_rate));
        line("w_scaled_first", opt(f.w_scaled_trend.first().copied()));
        line("w_scaled_final", opt(f.w_scaled_trend.last().copied()));
        line("d_weighted_max", opt(f.d_weighted_trend.iter().copied().reduce(f64::max)));
    }
    s
}

/// `key = value` pairs of a report.
pub fn parse_report(text: &str) -> Vec<(String, String)> {
    text.lines()
        .filter_map(|l| l.split_once(" = "))
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use micropolar::diagnostics::record;
    use micropolar::{make_grid, SimState};

    #[test]
    fn header_has_fourteen_columns() {
        assert_eq!(CSV_HEADER.split(',').count(), 14);
    }

    #[test]
    fn rows_round_trip_exactly() {
        let g = make_grid(8, 2.0).unwrap();
        let p = PhysicalParams::new(1.0, 1.0, 0.0).unwrap();
        let mut s = SimState::zeros(&g);
        s.t = 0.1 + 0.2;
        let r = record(&s, &p, None).unwrap();
        let text = format!("{CSV_HEADER}\n{}", csv_row(&r));
        assert!(text.ends_with('\n') && !text.contains('\r'));
        let rows = parse_csv(&text).unwrap();
        assert_eq!(rows[0][0].to_bits(), (0.1f64 + 0.2).to_bits());
        assert!(rows[0][1..].iter().all(|v| *v == 0.0));
    }

    #[test]
    fn tiny_values_stay_decimal() {
        let g = make_grid(8, 2.0).unwrap();
        let p = PhysicalParams::new(1.0, 1.0, 0.0).unwrap();
        let mut r = record(&SimState::zeros(&g), &p, None).unwrap();
        r.l2_u = 1.5e-20;
        let row = csv_row(&r);
        assert!(!row.contains('e'), "{row}");
        assert_eq!(row.split(',').nth(1).unwrap().parse::<f64>().unwrap(), 1.5e-20);
    }
}

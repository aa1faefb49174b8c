//! Threshold sweeps comparing the solver with the greedy baselines, and the
//! CSV files they produce.

use std::fmt::Write as _;
use std::time::Instant;

use crate::baselines::{greedy, naive_greedy};
use crate::instance::{matching_cost, Matching, ValidInstance};
use crate::solver::{solve, Status};

/// `%.6g`-style formatting: six significant digits, trailing zeros dropped.
/// Non-finite values format as the empty string.
pub fn fmt_g(x: f64) -> String {
    if !x.is_finite() {
        return String::new();
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("exponent digits");
    if !(-4..6).contains(&exp) {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        return format!("{mantissa}e{sign}{:02}", exp.abs());
    }
    let decimals = (5 - exp).max(0) as usize;
    trim_zeros(&format!("{x:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentRow {
    pub threshold: f64,
    /// Costs are NaN when the method could not reach the threshold.
    pub naive_cost: f64,
    pub greedy_cost: f64,
    pub lp_lower_bound: f64,
    pub alg_cost: f64,
    pub additive_bound: f64,
    pub status: Option<Status>,
    pub naive_runtime_s: f64,
    pub greedy_runtime_s: f64,
    pub alg_runtime_s: f64,
    /// Items per platform in the solver's matching.
    pub sigma: Vec<usize>,
    /// Items per platform and group in the solver's matching.
    pub nu: Vec<Vec<usize>>,
    /// Error text when the solver failed outright.
    pub error: Option<String>,
}

impl ExperimentRow {
    pub fn sigma_variance(&self) -> f64 {
        if self.sigma.is_empty() {
            return f64::NAN;
        }
        let k = self.sigma.len() as f64;
        let mean = self.sigma.iter().sum::<usize>() as f64 / k;
        self.sigma
            .iter()
            .map(|&s| (s as f64 - mean).powi(2))
            .sum::<f64>()
            / k
    }

    /// Broken row invariants, relative tolerance 1e-6. Rows without a
    /// solver result have none.
    pub fn violations(&self) -> Vec<String> {
        let mut bad = Vec::new();
        let lp = self.lp_lower_bound;
        if !lp.is_finite() {
            return bad;
        }
        let tol = 1e-6 * (1.0 + lp.abs());
        for (name, c) in [
            ("naive", self.naive_cost),
            ("greedy", self.greedy_cost),
            ("alg", self.alg_cost),
        ] {
            if c.is_finite() && c < lp - tol {
                bad.push(format!("{name} cost {c} below lp {lp}"));
            }
        }
        if self.alg_cost > lp + self.additive_bound + tol {
            bad.push(format!(
                "alg cost {} above lp {lp} + additive bound {}",
                self.alg_cost, self.additive_bound
            ));
        }
        bad
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub rows: Vec<ExperimentRow>,
    /// `Δ_j(p) / Δ(p)` for each platform and group.
    pub proportions: Vec<Vec<f64>>,
}

fn group_counts(inst: &ValidInstance, matching: &Matching) -> (Vec<usize>, Vec<Vec<usize>>) {
    let mut sigma = vec![0; inst.m()];
    let mut nu = vec![vec![0; inst.groups().len()]; inst.m()];
    for (i, p) in matching.pairs() {
        sigma[p] += 1;
        for &j in inst.item_groups(i) {
            nu[p][j] += 1;
        }
    }
    (sigma, nu)
}

pub fn neighborhood_proportions(inst: &ValidInstance) -> Vec<Vec<f64>> {
    let mut counts = vec![vec![0usize; inst.groups().len()]; inst.m()];
    for e in inst.edges() {
        for &j in inst.item_groups(e.item) {
            counts[e.platform][j] += 1;
        }
    }
    counts
        .iter()
        .enumerate()
        .map(|(p, row)| {
            let deg = inst.platform_degree(p) as f64;
            row.iter()
                .map(|&c| if deg > 0.0 { c as f64 / deg } else { 0.0 })
                .collect()
        })
        .collect()
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, f64) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed().as_secs_f64())
}

/// Runs both greedy baselines and the solver at each threshold.
pub fn run_experiment(inst: &ValidInstance, thresholds: &[f64]) -> ExperimentReport {
    let rows = thresholds
        .iter()
        .map(|&ell| {
            let inst = inst.with_ell(ell);
            let cost =
                |m: &Matching| matching_cost(&inst, m).expect("baseline uses instance edges");
            let (naive, naive_t) = timed(|| naive_greedy(&inst));
            let (greedy, greedy_t) = timed(|| greedy(&inst));
            let (sol, alg_t) = timed(|| solve(&inst));
            let mut row = ExperimentRow {
                threshold: ell,
                naive_cost: naive.map_or(f64::NAN, |m| cost(&m)),
                greedy_cost: greedy.map_or(f64::NAN, |m| cost(&m)),
                lp_lower_bound: f64::NAN,
                alg_cost: f64::NAN,
                additive_bound: f64::NAN,
                status: None,
                naive_runtime_s: naive_t,
                greedy_runtime_s: greedy_t,
                alg_runtime_s: alg_t,
                sigma: Vec::new(),
                nu: Vec::new(),
                error: None,
            };
            match sol {
                Ok(sol) => {
                    row.status = Some(sol.status);
                    if sol.status != Status::Infeasible {
                        row.lp_lower_bound = sol.lp_lower_bound;
                        row.alg_cost = sol.cost;
                        row.additive_bound = sol.additive_bound;
                        (row.sigma, row.nu) = group_counts(&inst, &sol.matching);
                    }
                }
                Err(e) => row.error = Some(e.to_string()),
            }
            row
        })
        .collect();
    ExperimentReport {
        rows,
        proportions: neighborhood_proportions(inst),
    }
}

fn status_name(row: &ExperimentRow) -> &'static str {
    match (row.status, &row.error) {
        (_, Some(_)) => "error",
        (Some(Status::ExactIntegral), _) => "exact_integral",
        (Some(Status::Rounded), _) => "rounded",
        (Some(Status::Infeasible), _) | (None, None) => "infeasible",
    }
}

pub const ROWS_HEADER: &str =
    "threshold,naive_cost,greedy_cost,lp_lower_bound,alg_cost,additive_bound,sigma_variance,status";
pub const TIMINGS_HEADER: &str = ",naive_runtime_s,greedy_runtime_s,alg_runtime_s";

/// One line per threshold. Runtime columns are added only when asked for so
/// that the default output is reproducible byte for byte.
pub fn rows_csv(report: &ExperimentReport, timings: bool) -> String {
    let mut out = String::from(ROWS_HEADER);
    if timings {
        out.push_str(TIMINGS_HEADER);
    }
    out.push('\n');
    for r in &report.rows {
        let _ = write!(
            out,
            "{},{},{},{},{},{},{},{}",
            fmt_g(r.threshold),
            fmt_g(r.naive_cost),
            fmt_g(r.greedy_cost),
            fmt_g(r.lp_lower_bound),
            fmt_g(r.alg_cost),
            fmt_g(r.additive_bound),
            fmt_g(r.sigma_variance()),
            status_name(r),
        );
        if timings {
            let _ = write!(
                out,
                ",{},{},{}",
                fmt_g(r.naive_runtime_s),
                fmt_g(r.greedy_runtime_s),
                fmt_g(r.alg_runtime_s)
            );
        }
        out.push('\n');
    }
    out
}

/// Solver loads: `threshold,platform,group,count`, with `group` empty for the
/// platform total.
pub fn loads_csv(report: &ExperimentReport) -> String {
    let mut out = String::from("threshold,platform,group,count\n");
    for r in &report.rows {
        for (p, &s) in r.sigma.iter().enumerate() {
            let _ = writeln!(out, "{},{p},,{s}", fmt_g(r.threshold));
            for (j, &c) in r.nu[p].iter().enumerate() {
                let _ = writeln!(out, "{},{p},{j},{c}", fmt_g(r.threshold));
            }
        }
    }
    out
}

pub fn proportions_csv(report: &ExperimentReport) -> String {
    let mut out = String::from("platform,group,proportion\n");
    for (p, row) in report.proportions.iter().enumerate() {
        for (j, &x) in row.iter().enumerate() {
            let _ = writeln!(out, "{p},{j},{}", fmt_g(x));
        }
    }
    out
}

/// Parsed line of [`rows_csv`]; empty cells come back as NaN.
#[derive(Debug, Clone, PartialEq)]
pub struct RowRecord {
    pub values: Vec<f64>,
    pub status: String,
}

pub fn parse_rows_csv(text: &str) -> Result<Vec<RowRecord>, String> {
    let mut lines = text.lines();
    let header = lines.next().ok_or("missing header")?;
    if !header.starts_with(ROWS_HEADER) {
        return Err(format!("unexpected header {header:?}"));
    }
    let width = header.split(',').count();
    lines
        .enumerate()
        .map(|(k, line)| {
            let cells: Vec<&str> = line.split(',').collect();
            if cells.len() != width {
                return Err(format!("line {}: expected {width} cells", k + 2));
            }
            let mut values = Vec::with_capacity(width - 1);
            let mut status = String::new();
            for (c, cell) in cells.iter().enumerate() {
                if c == 7 {
                    status = cell.to_string();
                } else if cell.is_empty() {
                    values.push(f64::NAN);
                } else {
                    values.push(
                        cell.parse()
                            .map_err(|_| format!("line {}: bad number {cell:?}", k + 2))?,
                    );
                }
            }
            Ok(RowRecord { values, status })
        })
        .collect()
}

/// Writes parsed rows back in [`rows_csv`] form.
pub fn records_csv(records: &[RowRecord], timings: bool) -> String {
    let mut out = String::from(ROWS_HEADER);
    if timings {
        out.push_str(TIMINGS_HEADER);
    }
    out.push('\n');
    for r in records {
        let mut cells: Vec<String> = r.values.iter().map(|&v| fmt_g(v)).collect();
        cells.insert(7.min(cells.len()), r.status.clone());
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

//! α-sweeps, window studies and decay-rate fitting.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Serialize, Serializer};
use serde_json::{json, Value};

use crate::error::Result;
use crate::experiment::config::ExperimentConfig;
use crate::interp::{assemble, solve_with_tol, SolveMethod};
use crate::nodes::NodeSet;
use crate::spaces::{samples_on, BandlimitedFunction};
use crate::spectral::{a_delta, error_l2, error_sup};

pub const SWEEP_CSV_HEADER: &str = "alpha,l2_total,l2_in_band,l2_tail,sup_error,residual,cond_est";
pub const WINDOW_CSV_HEADER: &str = "window,nodes,l2_total,l2_in_band,l2_tail,sup_error,residual";

#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub alpha: f64,
    pub l2_total: f64,
    pub l2_in_band: f64,
    pub l2_tail: f64,
    pub sup_error: f64,
    pub residual: f64,
    pub cond_est: f64,
    pub method: Option<SolveMethod>,
    pub truncation_m: usize,
    pub quadrature_error: f64,
    pub quadrature_converged: bool,
    /// `l2_total` did not fall below the previous successful row.
    pub floor: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
}

impl SweepRow {
    pub fn succeeded(&self) -> bool {
        self.failure.is_none()
    }

    fn failed(alpha: f64, message: String) -> Self {
        Self {
            alpha,
            l2_total: f64::NAN,
            l2_in_band: f64::NAN,
            l2_tail: f64::NAN,
            sup_error: f64::NAN,
            residual: f64::NAN,
            cond_est: f64::NAN,
            method: None,
            truncation_m: 0,
            quadrature_error: f64::NAN,
            quadrature_converged: false,
            floor: false,
            failure: Some(message),
        }
    }
}

/// A least-squares slope, or the sentinel when fewer than two points fit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FittedSlope {
    Value(f64),
    NotAvailable,
}

impl FittedSlope {
    pub fn value(self) -> Option<f64> {
        match self {
            FittedSlope::Value(v) => Some(v),
            FittedSlope::NotAvailable => None,
        }
    }
}

impl Serialize for FittedSlope {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            FittedSlope::Value(v) => s.serialize_f64(*v),
            FittedSlope::NotAvailable => s.serialize_str("not-available"),
        }
    }
}

/// Ordinary least-squares slope of `y` against `x`.
pub fn fit_slope(points: &[(f64, f64)]) -> FittedSlope {
    if points.len() < 2 {
        return FittedSlope::NotAvailable;
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        FittedSlope::NotAvailable
    } else {
        FittedSlope::Value(sxy / sxx)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    /// Slope of `ln l2_total` against `α` over successful rows with
    /// `α ≥ fit_min_alpha`.
    pub fitted_slope: FittedSlope,
    /// `β + δ(√8 - 3)`.
    pub bound_slope: f64,
    pub fit_min_alpha: f64,
    pub recovery_hypothesis: bool,
    pub warnings: Vec<String>,
}

fn num(v: f64) -> String {
    format!("{v:e}")
}

impl SweepResult {
    pub fn floor_count(&self) -> usize {
        self.rows.iter().filter(|r| r.floor).count()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(SWEEP_CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                num(r.alpha),
                num(r.l2_total),
                num(r.l2_in_band),
                num(r.l2_tail),
                num(r.sup_error),
                num(r.residual),
                num(r.cond_est)
            );
        }
        out
    }

    /// Summary with the configuration echo and provenance.
    pub fn summary_json(&self, config: &ExperimentConfig) -> Value {
        json!({
            "version": env!("CARGO_PKG_VERSION"),
            "seed": config.nodes.seed,
            "config": config,
            "result": self,
        })
    }
}

struct Problem {
    f: BandlimitedFunction,
    nodes: NodeSet,
    samples: Vec<f64>,
}

fn problem(config: &ExperimentConfig, window: u32) -> Result<Problem> {
    let f = config.function()?;
    let nodes = config.node_set_with_window(window)?;
    let samples = samples_on(&f, &nodes);
    Ok(Problem { f, nodes, samples })
}

fn measure(config: &ExperimentConfig, p: &Problem, alpha: f64) -> Result<SweepRow> {
    let kernel = config.kernel(alpha)?;
    let system = assemble(&p.nodes, kernel)?;
    let interp = solve_with_tol(&system, &p.samples, config.tolerances.solve)?;
    let report = interp.report().copied().expect("solved interpolants carry a report");
    let err = error_l2(&p.f, &interp, config.sweep.truncation_m)?;
    let sup = error_sup(&p.f, &interp, config.grid)?;
    Ok(SweepRow {
        alpha,
        l2_total: err.l2_total,
        l2_in_band: err.l2_in_band,
        l2_tail: err.l2_tail,
        sup_error: sup,
        residual: report.relative_residual,
        cond_est: report.condition_estimate,
        method: Some(report.method),
        truncation_m: err.truncation_m,
        quadrature_error: err.quadrature_error_estimate,
        quadrature_converged: err.converged,
        floor: false,
        failure: None,
    })
}

/// Solves and measures at every `α`; a failing `α` is recorded and the
/// sweep continues.
pub fn run_sweep(config: &ExperimentConfig) -> Result<SweepResult> {
    let p = problem(config, config.nodes.window)?;
    let mut rows: Vec<SweepRow> = config
        .sweep
        .alpha
        .par_iter()
        .map(|&alpha| measure(config, &p, alpha).unwrap_or_else(|e| SweepRow::failed(alpha, e.to_string())))
        .collect();
    rows.sort_by(|a, b| a.alpha.total_cmp(&b.alpha));

    let mut previous: Option<f64> = None;
    for row in rows.iter_mut().filter(|r| r.failure.is_none()) {
        if let Some(prev) = previous {
            row.floor = row.l2_total >= prev;
        }
        previous = Some(row.l2_total);
    }

    let fit_min_alpha = config
        .sweep
        .fit_min_alpha
        .unwrap_or_else(|| a_delta(config.problem.delta));
    let points: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.succeeded() && r.alpha >= fit_min_alpha && r.l2_total > 0.0)
        .map(|r| (r.alpha, r.l2_total.ln()))
        .collect();
    Ok(SweepResult {
        rows,
        fitted_slope: fit_slope(&points),
        bound_slope: config.bound_slope(),
        fit_min_alpha,
        recovery_hypothesis: config.recovery_hypothesis(),
        warnings: config.warnings(),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct WindowRow {
    pub window: u32,
    pub nodes: usize,
    pub l2_total: f64,
    pub l2_in_band: f64,
    pub l2_tail: f64,
    pub sup_error: f64,
    pub residual: f64,
    /// `l2_total` exceeds the previous window's value.
    pub increase: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct WindowStudy {
    pub alpha: f64,
    pub rows: Vec<WindowRow>,
}

impl WindowStudy {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(WINDOW_CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                r.window,
                r.nodes,
                num(r.l2_total),
                num(r.l2_in_band),
                num(r.l2_tail),
                num(r.sup_error),
                num(r.residual)
            );
        }
        out
    }

    pub fn violations(&self) -> usize {
        self.rows.iter().filter(|r| r.increase).count()
    }
}

/// `error_l2` and sup error at fixed `α` for growing windows of one node
/// family.
pub fn run_window_study(config: &ExperimentConfig, windows: &[u32], alpha: f64) -> Result<WindowStudy> {
    let mut rows = Vec::with_capacity(windows.len());
    let mut previous: Option<f64> = None;
    for &window in windows {
        let p = problem(config, window)?;
        let row = match measure(config, &p, alpha) {
            Ok(r) => {
                let increase = previous.is_some_and(|prev| r.l2_total > prev);
                previous = Some(r.l2_total);
                WindowRow {
                    window,
                    nodes: p.nodes.len(),
                    l2_total: r.l2_total,
                    l2_in_band: r.l2_in_band,
                    l2_tail: r.l2_tail,
                    sup_error: r.sup_error,
                    residual: r.residual,
                    increase,
                    failure: None,
                }
            }
            Err(e) => WindowRow {
                window,
                nodes: p.nodes.len(),
                l2_total: f64::NAN,
                l2_in_band: f64::NAN,
                l2_tail: f64::NAN,
                sup_error: f64::NAN,
                residual: f64::NAN,
                increase: false,
                failure: Some(e.to_string()),
            },
        };
        rows.push(row);
    }
    Ok(WindowStudy { alpha, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiment::config::parse_config;

    const SMALL: &str = r#"
[problem]
delta = 3.141592653589793
[band]
beta = 0.25
[nodes]
kind = "lattice"
window = 2
[sweep]
alpha = [1.0]
[grid]
extent = 2.0
points = 9
"#;

    #[test]
    fn slope_recovers_synthetic_rate() {
        let s = -0.731;
        let pts: Vec<(f64, f64)> = [0.5, 1.0, 1.7, 2.2, 3.0].iter().map(|&a| (a, 0.4 + s * a)).collect();
        let fitted = fit_slope(&pts).value().unwrap();
        assert!((fitted - s).abs() < 1e-9);
        assert_eq!(fit_slope(&pts[..1]), FittedSlope::NotAvailable);
    }

    #[test]
    fn single_alpha_has_no_slope() {
        let c = parse_config(SMALL).unwrap();
        let r = run_sweep(&c).unwrap();
        assert_eq!(r.rows.len(), 1);
        assert_eq!(r.fitted_slope, FittedSlope::NotAvailable);
        let json = serde_json::to_value(&r).unwrap();
        assert_eq!(json["fitted_slope"], "not-available");
        let csv = r.to_csv();
        assert!(csv.starts_with("alpha,l2_total,l2_in_band,l2_tail,sup_error,residual,cond_est\n"));
        assert_eq!(csv.lines().count(), 2);
    }

    #[test]
    fn window_study_single_and_zero() {
        let c = parse_config(SMALL).unwrap();
        let single = run_window_study(&c, &[2], 1.0).unwrap();
        let direct = run_sweep(&c).unwrap();
        assert_eq!(single.rows[0].l2_total, direct.rows[0].l2_total);

        let zero = parse_config(&SMALL.replace("beta = 0.25", "beta = 0.25\nprofile = \"zero\"")).unwrap();
        let study = run_window_study(&zero, &[1, 2], 1.0).unwrap();
        for r in &study.rows {
            assert_eq!(r.l2_total, 0.0);
            assert_eq!(r.sup_error, 0.0);
        }
    }

    #[test]
    fn failed_alpha_is_recorded() {
        let text = SMALL
            .replace("alpha = [1.0]", "alpha = [1.0, 2.0]")
            .replace("[grid]", "[tolerances]\nsolve = 1e-40\n[grid]");
        let r = run_sweep(&parse_config(&text).unwrap()).unwrap();
        assert_eq!(r.rows.len(), 2);
        assert!(r.rows.iter().all(|row| !row.succeeded()));
        assert!(r.to_csv().contains("NaN"));
    }
}

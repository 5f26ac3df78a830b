//! CSV emission with byte-stable formatting.
//!
//! All files are RFC-4180 CSVs with a header row and purely numeric fields,
//! so no quoting is ever needed. Floats are written with Rust's shortest
//! round-trip formatting, which is what makes replayed experiments
//! byte-identical; absent values are empty fields.

use std::fmt::Write as _;

use basislab::random_basis::RandomBasisRun;
use basislab::greedy::GreedyRun;

use crate::summary::BoxStats;

/// Shortest round-trip decimal of a float; `inf` formats as `inf`.
pub fn fmt_f64(v: f64) -> String {
    format!("{v}")
}

pub fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

pub const TRACE_HEADER: &str = "step,raw_sq,normalized,bound_sq,alpha,cond";

/// One trace row; greedy runs fill `bound_sq`/`alpha`, randomized runs fill
/// `cond`.
fn push_trace_row(
    out: &mut String,
    step: usize,
    raw_sq: f64,
    normalized: f64,
    bound_sq: Option<f64>,
    alpha: Option<f64>,
    cond: Option<f64>,
) {
    let _ = writeln!(
        out,
        "{step},{},{},{},{},{}",
        fmt_f64(raw_sq),
        fmt_f64(normalized),
        fmt_opt(bound_sq),
        fmt_opt(alpha),
        fmt_opt(cond),
    );
}

/// `conds[step]` is the design condition of the first `step` accepted
/// elements (`None` at the start state).
pub fn greedy_trace_csv(run: &GreedyRun, conds: &[Option<f64>]) -> String {
    let mut out = String::from(TRACE_HEADER);
    out.push('\n');
    let t = &run.trace;
    for step in 0..t.len() {
        push_trace_row(
            &mut out,
            step,
            t.raw_sq[step],
            t.normalized[step],
            Some(t.bound_sq[step]),
            Some(t.alphas[step]),
            conds.get(step).copied().flatten(),
        );
    }
    out
}

pub fn random_trace_csv(run: &RandomBasisRun) -> String {
    let mut out = String::from(TRACE_HEADER);
    out.push('\n');
    let t = &run.trace;
    for step in 0..t.len() {
        push_trace_row(
            &mut out,
            step,
            t.raw_sq[step],
            t.normalized[step],
            None,
            None,
            run.conds[step],
        );
    }
    out
}

pub const SUMMARY_HEADER: &str =
    "step,count,mean,whisker_lo,q1,median,q3,whisker_hi,outliers";

pub fn summary_csv(stats: &[(usize, BoxStats)]) -> String {
    let mut out = String::from(SUMMARY_HEADER);
    out.push('\n');
    for (step, b) in stats {
        let _ = writeln!(
            out,
            "{step},{},{},{},{},{},{},{},{}",
            b.count,
            fmt_f64(b.mean),
            fmt_f64(b.whisker_lo),
            fmt_f64(b.q1),
            fmt_f64(b.median),
            fmt_f64(b.q3),
            fmt_f64(b.whisker_hi),
            b.outliers.len(),
        );
    }
    out
}

pub const OUTLIERS_HEADER: &str = "step,trial,value";

/// Values outside the whiskers, one row per (step, trial).
pub fn outliers_csv(traces: &[Vec<f64>], stats: &[(usize, BoxStats)]) -> String {
    let mut out = String::from(OUTLIERS_HEADER);
    out.push('\n');
    for (step, b) in stats {
        for (trial, trace) in traces.iter().enumerate() {
            if let Some(&v) = trace.get(*step) {
                if v < b.whisker_lo || v > b.whisker_hi {
                    let _ = writeln!(out, "{step},{trial},{}", fmt_f64(v));
                }
            }
        }
    }
    out
}

/// Residual snapshots of one trial: `x` plus one column per snapshot step.
pub fn snapshots_csv(snapshots: &[basislab::random_basis::ResidualSnapshot]) -> String {
    let mut out = String::from("x");
    for s in snapshots {
        let _ = write!(out, ",residual_n{}", s.step);
    }
    out.push('\n');
    if let Some(first) = snapshots.first() {
        let grid = first.residual.grid_size();
        for k in 0..grid {
            let _ = write!(
                out,
                "{}",
                fmt_f64(basislab::GridFunction::midpoint(grid, k))
            );
            for s in snapshots {
                let _ = write!(out, ",{}", fmt_f64(s.residual.values()[k]));
            }
            out.push('\n');
        }
    }
    out
}

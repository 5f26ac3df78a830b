//! Experiment execution: seeded trials fanned out over a worker pool, one
//! CSV per trial, a summary CSV, a JSON manifest, and derived SVG figures.
//!
//! Per-trial streams depend only on `(base_seed, trial_index)`, every trial
//! writes to its own file, and the summarizer runs after the join, so the
//! same experiment produces byte-identical output at any worker count.

use anyhow::{bail, Context, Result};
use rayon::prelude::*;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use basislab::chains::{grow_chain, ChainResult};
use basislab::concentration::{
    pairwise_orthogonality_probability, quasiortho_bound_conservative,
    quasiortho_bound_conservative_log, quasiortho_bound_refined, quasiortho_bound_refined_log,
    BoundQuery,
};
use basislab::greedy::run_greedy;
use basislab::random_basis::{run_constant_blowup, run_random_basis};
use basislab::rng::{stream, trial_seed};
use basislab::{GridFunction, numerics::bump_target};

use crate::csvio::{
    self, fmt_f64, fmt_opt, greedy_trace_csv, outliers_csv, random_trace_csv, snapshots_csv,
    summary_csv,
};
use crate::manifest::{ExperimentSpec, Manifest, TrialFailure};
use crate::params::{
    AnglesParams, BlowupParams, BoundsParams, ChainsParams, GreedyParams, RandomParams,
};
use crate::plot::{box_plot_svg, histogram_svg, line_plot_svg, Curve};
use crate::summary::{box_stats, per_step_stats};

/// Run any resolved experiment into `out_dir`, using `workers` threads
/// (0 = rayon default).
pub fn run_spec(spec: &ExperimentSpec, out_dir: &Path, workers: usize) -> Result<()> {
    std::fs::create_dir_all(out_dir)
        .with_context(|| format!("creating output directory {}", out_dir.display()))?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .context("building worker pool")?;
    match spec {
        ExperimentSpec::Greedy(p) => cmd_greedy(p, out_dir, &pool),
        ExperimentSpec::Random(p) => cmd_random(p, out_dir, &pool),
        ExperimentSpec::ConstBlowup(p) => cmd_const_blowup(p, out_dir, &pool),
        ExperimentSpec::Bounds(p) => cmd_bounds(p, out_dir),
        ExperimentSpec::Chains(p) => cmd_chains(p, out_dir, &pool),
        ExperimentSpec::Angles(p) => cmd_angles(p, out_dir),
    }
}

fn write_file(dir: &Path, name: &str, content: &str, manifest: &mut Manifest) -> Result<()> {
    let path = dir.join(name);
    std::fs::write(&path, content).with_context(|| format!("writing {}", path.display()))?;
    manifest.files.push(name.to_string());
    Ok(())
}

fn trial_file_name(index: u64) -> String {
    format!("trial_{index:04}.csv")
}

fn finish_error_experiment(
    dir: &Path,
    manifest: &mut Manifest,
    normalized_traces: &[Vec<f64>],
    overlay: Vec<Curve>,
    title: &str,
) -> Result<()> {
    let stats = per_step_stats(normalized_traces);
    write_file(dir, "summary.csv", &summary_csv(&stats), manifest)?;
    write_file(
        dir,
        "outliers.csv",
        &outliers_csv(normalized_traces, &stats),
        manifest,
    )?;
    let points: Vec<(f64, crate::summary::BoxStats)> =
        stats.into_iter().map(|(s, b)| (s as f64, b)).collect();
    let svg = box_plot_svg(
        title,
        "elements N",
        "normalized squared error",
        &points,
        &overlay,
        true,
    );
    write_file(dir, "errors.svg", &svg, manifest)?;
    manifest.save(dir)
}

fn cmd_greedy(params: &GreedyParams, dir: &Path, pool: &rayon::ThreadPool) -> Result<()> {
    let target = GridFunction::from_fn(bump_target, params.grid_size)?;
    let seeds: Vec<u64> = (0..params.trials).map(|i| trial_seed(params.seed, i)).collect();
    let runs: Vec<_> = pool.install(|| {
        seeds
            .par_iter()
            .map(|&seed| run_greedy(&target, params.steps, &params.to_config(seed)))
            .collect::<Vec<_>>()
    });

    let mut manifest = Manifest::new(ExperimentSpec::Greedy(params.clone()), seeds.clone());
    let mut traces = Vec::new();
    let mut bound_curve: Vec<(f64, f64)> = Vec::new();
    for (i, run) in runs.into_iter().enumerate() {
        let run = run?;
        if let Some(stall) = run.stall {
            manifest.failures.push(TrialFailure {
                trial: i as u64,
                seed: seeds[i],
                message: format!(
                    "candidate search exhausted {} draws at step {}",
                    stall.attempts, stall.step
                ),
            });
        }
        // condition of the growing greedy design, one prefix per state
        let conds: Vec<Option<f64>> = (0..run.trace.len())
            .map(|n| {
                if n == 0 {
                    Ok(None)
                } else {
                    basislab::numerics::basis_cond(&run.model.basis[..n], params.grid_size)
                        .map(Some)
                }
            })
            .collect::<Result<_, _>>()?;
        write_file(
            dir,
            &trial_file_name(i as u64),
            &greedy_trace_csv(&run, &conds),
            &mut manifest,
        )?;
        if bound_curve.len() < run.trace.len() {
            bound_curve = run
                .trace
                .bound_sq
                .iter()
                .enumerate()
                .map(|(s, b)| (s as f64, b / run.trace.raw_sq[0]))
                .collect();
        }
        traces.push(run.trace.normalized);
    }
    let overlay = vec![Curve {
        label: "guaranteed bound".into(),
        color: "red",
        points: bound_curve,
    }];
    finish_error_experiment(dir, &mut manifest, &traces, overlay, "greedy approximation error")
}

fn cmd_random(params: &RandomParams, dir: &Path, pool: &rayon::ThreadPool) -> Result<()> {
    let target = GridFunction::from_fn(bump_target, params.grid_size)?;
    let seeds: Vec<u64> = (0..params.trials).map(|i| trial_seed(params.seed, i)).collect();
    let runs: Vec<_> = pool.install(|| {
        seeds
            .par_iter()
            .map(|&seed| run_random_basis(&target, &params.to_config(seed)))
            .collect::<Vec<_>>()
    });
    let mut manifest = Manifest::new(ExperimentSpec::Random(params.clone()), seeds);
    let mut traces = Vec::new();
    for (i, run) in runs.into_iter().enumerate() {
        let run = run?;
        write_file(dir, &trial_file_name(i as u64), &random_trace_csv(&run), &mut manifest)?;
        traces.push(run.trace.normalized);
    }
    finish_error_experiment(
        dir,
        &mut manifest,
        &traces,
        Vec::new(),
        "random-basis approximation error",
    )
}

fn cmd_const_blowup(params: &BlowupParams, dir: &Path, pool: &rayon::ThreadPool) -> Result<()> {
    let seeds: Vec<u64> = (0..params.trials).map(|i| trial_seed(params.seed, i)).collect();
    let runs: Vec<_> = pool.install(|| {
        seeds
            .par_iter()
            .map(|&seed| run_constant_blowup(&params.to_config(seed)))
            .collect::<Vec<_>>()
    });
    let mut manifest = Manifest::new(ExperimentSpec::ConstBlowup(params.clone()), seeds);
    let mut traces = Vec::new();
    let mut final_errors = Vec::new();
    let mut snapshot_store = Vec::new();
    for (i, run) in runs.into_iter().enumerate() {
        let run = run?;
        write_file(
            dir,
            &trial_file_name(i as u64),
            &random_trace_csv(&run.run),
            &mut manifest,
        )?;
        write_file(
            dir,
            &format!("snapshots_{i:04}.csv"),
            &snapshots_csv(&run.snapshots),
            &mut manifest,
        )?;
        final_errors.push(*run.run.trace.normalized.last().unwrap());
        traces.push(run.run.trace.normalized);
        snapshot_store.push(run.snapshots);
    }

    // residual figure for the median-final-error trial
    let median_trial = median_index(&final_errors);
    let colors = ["steelblue", "darkorange", "seagreen"];
    let curves: Vec<Curve> = snapshot_store[median_trial]
        .iter()
        .zip(colors)
        .map(|(s, color)| {
            let grid = s.residual.grid_size();
            Curve {
                label: format!("N = {}", s.step),
                color,
                points: s
                    .residual
                    .values()
                    .iter()
                    .enumerate()
                    .map(|(k, &v)| (GridFunction::midpoint(grid, k), v))
                    .collect(),
            }
        })
        .collect();
    let svg = line_plot_svg(
        &format!("residual of the constant target (trial {median_trial})"),
        "x",
        "f* - f_N",
        &curves,
    );
    write_file(dir, "residuals.svg", &svg, &mut manifest)?;
    finish_error_experiment(
        dir,
        &mut manifest,
        &traces,
        Vec::new(),
        "constant-target approximation error",
    )
}

/// Index of the trial holding the (lower) median value.
fn median_index(values: &[f64]) -> usize {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).expect("finite"));
    order[values.len() / 2]
}

pub const BOUNDS_HEADER: &str =
    "n,eps,theta,conservative,refined,ln_conservative,ln_refined,p_at_conservative,p_at_refined";

fn cmd_bounds(params: &BoundsParams, dir: &Path) -> Result<()> {
    let mut out = String::from(BOUNDS_HEADER);
    out.push('\n');
    for &n in &params.n_list {
        for &eps in &params.eps_list {
            for &theta in &params.theta_list {
                let q = BoundQuery::new(n, eps, theta)?;
                let cons = quasiortho_bound_conservative(&q)?;
                let refined = quasiortho_bound_refined(&q)?;
                let p_cons = probability_at(n, eps, cons);
                let p_ref = probability_at(n, eps, refined);
                let _ = writeln!(
                    out,
                    "{n},{},{},{},{},{},{},{},{}",
                    fmt_f64(eps),
                    fmt_f64(theta),
                    fmt_f64(cons),
                    fmt_f64(refined),
                    fmt_f64(quasiortho_bound_conservative_log(&q)?),
                    fmt_f64(quasiortho_bound_refined_log(&q)?),
                    fmt_opt(p_cons),
                    fmt_opt(p_ref),
                );
            }
        }
    }
    let mut manifest = Manifest::new(ExperimentSpec::Bounds(params.clone()), Vec::new());
    write_file(dir, "bounds.csv", &out, &mut manifest)?;
    manifest.save(dir)
}

/// `P(eps, floor(bound))` where defined.
fn probability_at(n: usize, eps: f64, bound: f64) -> Option<f64> {
    if !bound.is_finite() || !(0.0..=1e7).contains(&bound) {
        return None;
    }
    pairwise_orthogonality_probability(n, eps, bound.floor() as usize).ok()
}

pub const CHAINS_HEADER: &str = "n,chain,seed,length,capped";
pub const CHAIN_SUMMARY_HEADER: &str =
    "n,count,mean,whisker_lo,q1,median,q3,whisker_hi,outliers,bound_conservative,bound_refined";

fn cmd_chains(params: &ChainsParams, dir: &Path, pool: &rayon::ThreadPool) -> Result<()> {
    let mut jobs = Vec::new();
    for (ni, &n) in params.n_list.iter().enumerate() {
        for chain_idx in 0..params.trials {
            // distinct stream per (dimension, chain)
            let seed = trial_seed(params.seed, (ni as u64) * params.trials + chain_idx);
            jobs.push((n, chain_idx, seed));
        }
    }
    let results: Vec<(usize, u64, ChainResult)> = pool.install(|| {
        jobs.par_iter()
            .map(|&(n, chain_idx, seed)| {
                grow_chain(n, params.tol, seed, params.max_length)
                    .map(|g| (n, chain_idx, g.result))
            })
            .collect::<Result<Vec<_>, _>>()
    })?;

    let mut raw = String::from(CHAINS_HEADER);
    raw.push('\n');
    for (n, chain_idx, r) in &results {
        let _ = writeln!(raw, "{n},{chain_idx},{},{},{}", r.seed, r.length, r.capped);
    }

    let mut summary = String::from(CHAIN_SUMMARY_HEADER);
    summary.push('\n');
    let mut points = Vec::new();
    let mut cons_curve = Vec::new();
    let mut ref_curve = Vec::new();
    for &n in &params.n_list {
        let lengths: Vec<f64> = results
            .iter()
            .filter(|(rn, _, _)| *rn == n)
            .map(|(_, _, r)| r.length as f64)
            .collect();
        let b = box_stats(&lengths);
        let q = BoundQuery::new(n, params.bound_eps, params.bound_theta)?;
        let cons = quasiortho_bound_conservative(&q)?;
        let refined = quasiortho_bound_refined(&q)?;
        let _ = writeln!(
            summary,
            "{n},{},{},{},{},{},{},{},{},{},{}",
            b.count,
            fmt_f64(b.mean),
            fmt_f64(b.whisker_lo),
            fmt_f64(b.q1),
            fmt_f64(b.median),
            fmt_f64(b.q3),
            fmt_f64(b.whisker_hi),
            b.outliers.len(),
            fmt_f64(cons),
            fmt_f64(refined),
        );
        cons_curve.push((n as f64, cons));
        ref_curve.push((n as f64, refined));
        points.push((n as f64, b));
    }
    let overlay = vec![
        Curve {
            label: "conservative bound".into(),
            color: "red",
            points: cons_curve,
        },
        Curve {
            label: "refined bound".into(),
            color: "green",
            points: ref_curve,
        },
    ];
    let svg = box_plot_svg(
        "almost orthogonal chain lengths",
        "dimension n",
        "chain length N",
        &points,
        &overlay,
        true,
    );
    let mut manifest = Manifest::new(
        ExperimentSpec::Chains(params.clone()),
        results.iter().map(|(_, _, r)| r.seed).collect(),
    );
    write_file(dir, "chains.csv", &raw, &mut manifest)?;
    write_file(dir, "summary.csv", &summary, &mut manifest)?;
    write_file(dir, "chains.svg", &svg, &mut manifest)?;
    manifest.save(dir)
}

pub const HISTOGRAM_HEADER: &str = "bin_lo,bin_hi,count";

fn cmd_angles(params: &AnglesParams, dir: &Path) -> Result<()> {
    let mut rng = stream(params.seed);
    let hist = basislab::chains::angle_histogram(params.n, params.count, params.bins, &mut rng)?;
    let width = hist.bin_width();
    let mut out = String::from(HISTOGRAM_HEADER);
    out.push('\n');
    let bins: Vec<(f64, f64, u64)> = hist
        .counts
        .iter()
        .enumerate()
        .map(|(i, &c)| (i as f64 * width, (i + 1) as f64 * width, c))
        .collect();
    for (lo, hi, c) in &bins {
        let _ = writeln!(out, "{},{},{c}", fmt_f64(*lo), fmt_f64(*hi));
    }
    let svg = histogram_svg(
        &format!("angles to a random reference vector, n = {}", params.n),
        "angle (radians)",
        "count",
        &bins,
    );
    let mut manifest = Manifest::new(ExperimentSpec::Angles(params.clone()), vec![params.seed]);
    write_file(dir, "histogram.csv", &out, &mut manifest)?;
    write_file(dir, "angles.svg", &svg, &mut manifest)?;
    manifest.save(dir)
}

/// Re-execute the experiment described by a manifest file.
pub fn replay(manifest_path: &Path, out_dir: &Path, workers: usize) -> Result<()> {
    let manifest = Manifest::load(manifest_path)?;
    if manifest.code_version != env!("CARGO_PKG_VERSION") {
        bail!(
            "manifest was produced by version {} but this binary is {}",
            manifest.code_version,
            env!("CARGO_PKG_VERSION")
        );
    }
    run_spec(&manifest.spec, out_dir, workers)
}

/// Recompute the summary CSV text from the raw per-trial CSVs in a directory;
/// used to verify summary consistency.
pub fn recompute_summary_from_raw(dir: &Path) -> Result<String> {
    let mut trial_files: Vec<PathBuf> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.file_name()
                .and_then(|n| n.to_str())
                .is_some_and(|n| n.starts_with("trial_") && n.ends_with(".csv"))
        })
        .collect();
    trial_files.sort();
    let mut traces = Vec::new();
    for file in trial_files {
        let text = std::fs::read_to_string(&file)?;
        let mut lines = text.lines();
        let header = lines.next().unwrap_or_default();
        if header != csvio::TRACE_HEADER {
            bail!("unexpected header in {}: {header}", file.display());
        }
        let normalized: Vec<f64> = lines
            .map(|line| {
                line.split(',')
                    .nth(2)
                    .context("missing normalized column")?
                    .parse::<f64>()
                    .context("parsing normalized value")
            })
            .collect::<Result<_>>()?;
        traces.push(normalized);
    }
    Ok(summary_csv(&per_step_stats(&traces)))
}

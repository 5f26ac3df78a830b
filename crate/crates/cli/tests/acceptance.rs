//! Acceptance suite: every criterion of the experiment contract at full
//! scale, one test per criterion, each printing a pass line with its
//! runtime. Heavy ensembles (the 100-trial greedy and random runs) are
//! computed once and shared.

#[path = "../../core/tests/support/mod.rs"]
mod support;

use std::sync::OnceLock;
use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;
use tempfile::TempDir;

use basislab::chains::{angle_histogram, grow_chain};
use basislab::concentration::{
    exp_inequality_check, ball_volume_log, ln_gamma, quasiortho_bound_conservative,
    quasiortho_bound_conservative_log, quasiortho_bound_refined, quasiortho_bound_refined_log,
    shell_fraction_exact, shell_fraction_lower_bound, stirling_gamma_with_bound, BoundQuery,
};
use basislab::greedy::{run_greedy, GreedyConfig, GreedyRun};
use basislab::numerics::bump_target;
use basislab::random_basis::{
    run_constant_blowup, run_random_basis, RandomBasisConfig, RandomBasisRun,
};
use basislab::rng::{stream, trial_seed, uniform_in};
use basislab::{least_squares_fit, BasisElement, GridFunction};

use basislab_cli::manifest::{ExperimentSpec, Manifest};
use basislab_cli::params::RandomParams;
use basislab_cli::runner::{replay, run_spec};
use basislab_cli::summary::quantile_sorted;

const TRIALS: u64 = 100;
const STEPS: usize = 100;
const BASE_SEED: u64 = 20_240_001;

fn pass(criterion: &str, started: Instant) {
    println!(
        "acceptance {criterion}: PASS ({:.1}s)",
        started.elapsed().as_secs_f64()
    );
}

fn greedy_runs() -> &'static [GreedyRun] {
    static RUNS: OnceLock<Vec<GreedyRun>> = OnceLock::new();
    RUNS.get_or_init(|| {
        let target = GridFunction::from_fn(bump_target, 1000).unwrap();
        (0..TRIALS)
            .into_par_iter()
            .map(|i| {
                let cfg = GreedyConfig::experiment_default(trial_seed(BASE_SEED, i));
                run_greedy(&target, STEPS, &cfg).unwrap()
            })
            .collect()
    })
}

fn random_runs() -> &'static [RandomBasisRun] {
    static RUNS: OnceLock<Vec<RandomBasisRun>> = OnceLock::new();
    RUNS.get_or_init(|| {
        let target = GridFunction::from_fn(bump_target, 1000).unwrap();
        (0..TRIALS)
            .into_par_iter()
            .map(|i| {
                let mut cfg = RandomBasisConfig::experiment_gaussian(trial_seed(BASE_SEED, i));
                cfg.n_steps = STEPS;
                run_random_basis(&target, &cfg).unwrap()
            })
            .collect()
    })
}

fn interquartile_range(values: &[f64]) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    quantile_sorted(&sorted, 0.75) - quantile_sorted(&sorted, 0.25)
}

fn median(values: &[f64]) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    quantile_sorted(&sorted, 0.5)
}

#[test]
fn criterion_01_greedy_bound_holds_every_run() {
    let t = Instant::now();
    let runs = greedy_runs();
    let mut stalls = 0;
    for (trial, run) in runs.iter().enumerate() {
        if run.stall.is_some() {
            stalls += 1;
            continue;
        }
        for (step, (&e, &b)) in run
            .trace
            .raw_sq
            .iter()
            .zip(&run.trace.bound_sq)
            .enumerate()
        {
            assert!(
                e <= b + 1e-10,
                "trial {trial} step {step}: e^2 = {e} exceeds bound {b}"
            );
        }
    }
    assert_eq!(
        stalls, 0,
        "candidate search failed in {stalls} of {TRIALS} runs"
    );
    for (trial, run) in runs.iter().enumerate() {
        assert!(
            run.trace.normalized[STEPS] < run.trace.normalized[10],
            "trial {trial}: no progress between N = 10 and N = {STEPS}"
        );
    }
    assert!(t.elapsed().as_secs() < 300, "over the 5-minute budget");
    pass("01 greedy-bound", t);
}

#[test]
fn criterion_02_random_spread_exceeds_greedy_spread() {
    let t = Instant::now();
    let greedy_final: Vec<f64> = greedy_runs()
        .iter()
        .map(|r| *r.trace.normalized.last().unwrap())
        .collect();
    let random_final: Vec<f64> = random_runs()
        .iter()
        .map(|r| *r.trace.normalized.last().unwrap())
        .collect();
    let greedy_iqr = interquartile_range(&greedy_final);
    let random_iqr = interquartile_range(&random_final);
    assert!(
        random_iqr > greedy_iqr,
        "random IQR {random_iqr} not above greedy IQR {greedy_iqr}"
    );
    assert!(t.elapsed().as_secs() < 600, "over the 10-minute budget");
    pass("02 spread-comparison", t);
}

#[test]
fn criterion_03_random_errors_nonincreasing() {
    let t = Instant::now();
    for (trial, run) in random_runs().iter().enumerate() {
        for (step, w) in run.trace.normalized.windows(2).enumerate() {
            assert!(
                w[1] <= w[0] + 1e-10,
                "trial {trial} step {step}: {} -> {}",
                w[0],
                w[1]
            );
        }
    }
    pass("03 nestedness", t);
}

#[test]
fn criterion_04_constant_blowup_stalls() {
    let t = Instant::now();
    let runs: Vec<_> = (0..20u64)
        .into_par_iter()
        .map(|i| {
            let cfg = RandomBasisConfig::experiment_indicator(trial_seed(BASE_SEED, i));
            run_constant_blowup(&cfg).unwrap()
        })
        .collect();
    let early: Vec<f64> = runs
        .iter()
        .map(|r| r.run.trace.normalized[1] - r.run.trace.normalized[100])
        .collect();
    let late: Vec<f64> = runs
        .iter()
        .map(|r| r.run.trace.normalized[100] - r.run.trace.normalized[500])
        .collect();
    assert!(
        median(&early) > median(&late),
        "median early drop {} vs late drop {}",
        median(&early),
        median(&late)
    );
    // the residual of the median-final-error run gets spikier with N
    let finals: Vec<f64> = runs
        .iter()
        .map(|r| *r.run.trace.normalized.last().unwrap())
        .collect();
    let mut order: Vec<usize> = (0..finals.len()).collect();
    order.sort_by(|&a, &b| finals[a].partial_cmp(&finals[b]).unwrap());
    let median_run = &runs[order[finals.len() / 2]];
    let changes: Vec<(usize, usize)> = median_run
        .snapshots
        .iter()
        .map(|s| (s.step, s.residual.sign_changes()))
        .collect();
    assert!(
        changes.last().unwrap().1 > changes.first().unwrap().1,
        "residual sign changes did not grow: {changes:?}"
    );
    assert!(t.elapsed().as_secs() < 600, "over the 10-minute budget");
    pass("04 constant-blowup-stall", t);
}

#[test]
fn criterion_05_shell_inequality_strict_on_grid() {
    let t = Instant::now();
    for i in 0..100usize {
        let n = ((i as f64 / 99.0) * 9999.0).round() as usize + 1;
        for j in 0..100usize {
            let x = (j as f64 + 0.5) / 100.0;
            let exact = shell_fraction_exact(n, x).unwrap();
            let bound = shell_fraction_lower_bound(n, x).unwrap();
            // the two f64 values may collide once both saturate toward 1;
            // strictness is exactly the complement comparison
            // (1-x)^n < e^{-nx}, i.e. log1p(-x) < -x
            assert!(bound <= exact, "n={n} x={x}: {bound} > {exact}");
            assert!(
                f64::ln_1p(-x) < -x,
                "complement comparison failed at n={n} x={x}"
            );
        }
    }
    assert!(t.elapsed().as_secs() < 5);
    pass("05 shell-inequality", t);
}

#[test]
fn criterion_06_exp_inequality_strict() {
    let t = Instant::now();
    let mut rng = stream(BASE_SEED);
    for _ in 0..10_000 {
        let x = uniform_in(&mut rng, (f64::MIN_POSITIVE, 1.0 - 1e-12));
        let (a, b, c) = exp_inequality_check(x).unwrap();
        assert!(a < b && b < c, "ordering failed at x = {x}");
    }
    pass("06 exp-inequality", t);
}

#[test]
fn criterion_07_volume_recurrences_and_stirling_remainder() {
    let t = Instant::now();
    let pi = std::f64::consts::PI;
    for n in 3..=10_000usize {
        let v_n = ball_volume_log(n, 1.0).unwrap();
        let v_n1 = ball_volume_log(n - 1, 1.0).unwrap();
        let v_n2 = ball_volume_log(n - 2, 1.0).unwrap();
        let even_odd = (2.0 * pi / n as f64).ln();
        assert!(
            (v_n - v_n2 - even_odd).abs() < 1e-10,
            "two-step recurrence fails at n = {n}"
        );
        let half = (n as f64 + 1.0) / 2.0;
        let step = 0.5 * pi.ln() + ln_gamma(half).unwrap() - ln_gamma(half + 0.5).unwrap();
        assert!(
            (v_n - v_n1 - step).abs() < 1e-10,
            "one-step recurrence fails at n = {n}"
        );
    }
    for i in 0..100 {
        let x = 1.0 + (i as f64 / 99.0) * 999.0;
        // constructor verifies |remainder| <= bound and errors otherwise
        let s = stirling_gamma_with_bound(x).unwrap();
        assert!(s.remainder.abs() <= s.remainder_bound);
    }
    assert!(t.elapsed().as_secs() < 10);
    pass("07 volume-recurrences", t);
}

#[test]
fn criterion_08_quasiortho_bound_values_and_slope() {
    let t = Instant::now();
    let q = BoundQuery::new(1000, 0.1, 0.1).unwrap();
    // independent formula oracles
    let cons_oracle = (2.5f64).exp() * (10.0f64 / 9.0).ln().sqrt();
    let e5 = (5.0f64).exp();
    let lg = (0.9f64).ln();
    let ref_oracle = (lg * lg / 4.0 + 2.0 * (-lg) * e5).sqrt() + lg / 2.0;
    let cons = quasiortho_bound_conservative(&q).unwrap();
    let refined = quasiortho_bound_refined(&q).unwrap();
    assert!((cons - 3.954).abs() <= 0.001, "conservative = {cons}");
    assert!((refined - 5.540).abs() <= 0.001, "refined = {refined}");
    assert!((cons - cons_oracle).abs() < 1e-9);
    assert!((refined - ref_oracle).abs() < 1e-9);

    let eps = 0.1;
    for (n1, n2) in [(200_000usize, 600_000usize), (600_000, 1_200_000)] {
        for log_bound in [quasiortho_bound_conservative_log, quasiortho_bound_refined_log] {
            let a = log_bound(&BoundQuery::new(n1, eps, 0.1).unwrap()).unwrap();
            let b = log_bound(&BoundQuery::new(n2, eps, 0.1).unwrap()).unwrap();
            let slope = (b - a) / (n2 - n1) as f64;
            assert!(
                (slope - eps * eps / 4.0).abs() < 1e-6,
                "slope {slope} vs {}",
                eps * eps / 4.0
            );
        }
    }
    pass("08 quasiortho-bounds", t);
}

#[test]
fn criterion_09_chain_lengths_beat_conservative_bound() {
    let t = Instant::now();
    // the chains experiment exactly as the harness ships it: default base
    // seed, per-chain streams derived from (seed, block * trials + chain)
    let tol = 0.037 * std::f64::consts::FRAC_PI_2;
    let chains_per_n = 20u64;
    let default_seed = basislab_cli::params::ChainsParams::default().seed;
    let mut medians = Vec::new();
    for (ni, &n) in [400usize, 800, 1600].iter().enumerate() {
        let lengths: Vec<f64> = (0..chains_per_n)
            .into_par_iter()
            .map(|i| {
                let seed = trial_seed(default_seed, ni as u64 * chains_per_n + i);
                grow_chain(n, tol, seed, 1_000_000).unwrap().result.length as f64
            })
            .collect();
        let med = median(&lengths);
        let bound =
            quasiortho_bound_conservative(&BoundQuery::new(n, 0.0581, 0.1).unwrap()).unwrap();
        assert!(
            med > bound,
            "n = {n}: median {med} does not exceed the conservative bound {bound}"
        );
        medians.push(med);
    }
    for w in medians.windows(2) {
        assert!(w[1] >= w[0], "medians not monotone: {medians:?}");
    }
    assert!(t.elapsed().as_secs() < 900, "over the 15-minute budget");
    pass("09 chains-vs-theory", t);
}

#[test]
fn criterion_10_angle_concentration() {
    let t = Instant::now();
    let mut rng = stream(BASE_SEED);
    let hist = angle_histogram(1920, 10_000, 50, &mut rng).unwrap();
    let fraction = hist.cos_within(0.1);
    assert!(fraction >= 0.999, "fraction within |cos| <= 0.1 is {fraction}");
    assert!(t.elapsed().as_secs() < 60, "over the 1-minute budget");
    pass("10 angle-concentration", t);
}

#[test]
fn criterion_11_least_squares_oracle_equivalence() {
    let t = Instant::now();
    let mut rng = stream(BASE_SEED);
    let mut checked = 0;
    while checked < 200 {
        let m = 1 + (rng.random::<u32>() % 8) as usize;
        let n = 8 + (rng.random::<u32>() % 57) as usize;
        let basis: Vec<BasisElement> = (0..m)
            .map(|_| {
                let w = uniform_in(&mut rng, (5.0, 50.0));
                let center = uniform_in(&mut rng, (0.0, 1.0));
                BasisElement::gaussian(w, -w * center)
            })
            .collect();
        let target =
            GridFunction::from_fn(|x| (x * 9.0).sin() + 0.4 * (x * 31.0).cos() + 0.2, n).unwrap();
        let fit = least_squares_fit(&basis, &target).unwrap();
        if !fit.cond.is_finite() || fit.cond > 1e8 {
            continue;
        }
        let exact = support::exact_normal_equation_coeffs(&basis, &target)
            .expect("well-conditioned system must be nonsingular");
        let err = support::relative_vec_error(&fit.coeffs, &exact);
        assert!(
            err <= 1e-8,
            "instance {checked} (m={m}, n={n}, cond={}): relative error {err}",
            fit.cond
        );
        checked += 1;
    }
    pass("11 least-squares-oracle", t);
}

#[test]
fn criterion_12_manifest_replay_any_worker_count() {
    let t = Instant::now();
    let spec = ExperimentSpec::Random(RandomParams {
        trials: 8,
        steps: 30,
        grid_size: 300,
        seed: 77,
        ..RandomParams::default()
    });
    let original = TempDir::new().unwrap();
    run_spec(&spec, original.path(), 1).unwrap();
    let manifest = Manifest::load(&original.path().join("manifest.json")).unwrap();
    for workers in [1usize, 2, 4] {
        let replayed = TempDir::new().unwrap();
        replay(&original.path().join("manifest.json"), replayed.path(), workers).unwrap();
        for name in &manifest.files {
            let a = std::fs::read(original.path().join(name)).unwrap();
            let b = std::fs::read(replayed.path().join(name)).unwrap();
            assert_eq!(a, b, "{name} differs at {workers} workers");
        }
        let m2 = std::fs::read(replayed.path().join("manifest.json")).unwrap();
        let m1 = std::fs::read(original.path().join("manifest.json")).unwrap();
        assert_eq!(m1, m2, "manifest differs at {workers} workers");
    }
    pass("12 replay-determinism", t);
}

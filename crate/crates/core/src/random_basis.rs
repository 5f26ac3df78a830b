//! Randomized-basis approximation: nonlinear parameters drawn at random and
//! frozen, linear weights refit by least squares after every draw.
//!
//! Each step draws one element uniformly from the configured family, appends
//! it to the pool, and refits the whole pool from scratch, so conditioning is
//! measurable per step. An optional condition-number limit reproduces the
//! variant in which ill-conditioning draws are discarded. The module also
//! runs the constant-target experiment whose residuals turn spiky as the
//! indicator pool grows.

use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::numerics::{least_squares_fit, ApproxModel, BasisElement, GridFunction};
use crate::rng::{stream, uniform_in};
use crate::trace::ErrorTrace;

/// Parameter ranges of the sampled family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FamilyParams {
    Gaussian {
        w_range: (f64, f64),
        b_range: (f64, f64),
    },
    Indicator {
        a_range: (f64, f64),
        sigma_range: (f64, f64),
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct RandomBasisConfig {
    pub family: FamilyParams,
    pub n_steps: usize,
    pub grid_size: usize,
    pub seed: u64,
    /// Discard draws whose refit condition number exceeds this limit.
    pub cond_limit: Option<f64>,
}

impl RandomBasisConfig {
    /// Gaussian family over `w in [0,200]`, `b in [-200,200]`, 100 steps on a
    /// 1000-point grid.
    pub fn experiment_gaussian(seed: u64) -> Self {
        Self {
            family: FamilyParams::Gaussian {
                w_range: (0.0, 200.0),
                b_range: (-200.0, 200.0),
            },
            n_steps: 100,
            grid_size: 1000,
            seed,
            cond_limit: None,
        }
    }

    /// Indicator family with centers and widths uniform on `[0,1]`, 500 steps
    /// on a 1000-point grid.
    pub fn experiment_indicator(seed: u64) -> Self {
        Self {
            family: FamilyParams::Indicator {
                a_range: (0.0, 1.0),
                sigma_range: (0.0, 1.0),
            },
            n_steps: 500,
            grid_size: 1000,
            seed,
            cond_limit: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_steps == 0 {
            return Err(Error::InvalidConfig("n_steps must be at least 1".into()));
        }
        if self.grid_size < 2 {
            return Err(Error::InvalidConfig(format!(
                "grid_size must be at least 2, got {}",
                self.grid_size
            )));
        }
        if let Some(limit) = self.cond_limit {
            if !limit.is_finite() || limit <= 0.0 {
                return Err(Error::InvalidConfig(format!(
                    "cond_limit must be positive, got {limit}"
                )));
            }
        }
        let ranges: [(&str, (f64, f64)); 2] = match self.family {
            FamilyParams::Gaussian { w_range, b_range } => {
                [("w_range", w_range), ("b_range", b_range)]
            }
            FamilyParams::Indicator {
                a_range,
                sigma_range,
            } => [("a_range", a_range), ("sigma_range", sigma_range)],
        };
        for (name, (lo, hi)) in ranges {
            if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
                return Err(Error::InvalidConfig(format!(
                    "{name} = ({lo}, {hi}) is not a valid closed interval"
                )));
            }
        }
        if let FamilyParams::Indicator {
            a_range,
            sigma_range,
        } = self.family
        {
            for (name, (lo, hi)) in [("a_range", a_range), ("sigma_range", sigma_range)] {
                if lo < 0.0 || hi > 1.0 {
                    return Err(Error::InvalidConfig(format!(
                        "{name} = ({lo}, {hi}) must lie within [0,1]"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Draw one element with parameters independent and uniform over the
/// configured ranges.
pub fn draw_basis_element(cfg: &RandomBasisConfig, rng: &mut ChaCha8Rng) -> BasisElement {
    match cfg.family {
        FamilyParams::Gaussian { w_range, b_range } => {
            let w = uniform_in(rng, w_range);
            let b = uniform_in(rng, b_range);
            BasisElement::gaussian(w, b)
        }
        FamilyParams::Indicator {
            a_range,
            sigma_range,
        } => {
            let a = uniform_in(rng, a_range);
            let sigma = uniform_in(rng, sigma_range);
            BasisElement::Indicator { a, sigma }
        }
    }
}

/// One pool-growth step.
#[derive(Debug, Clone, PartialEq)]
pub struct RvflOutcome {
    pub model: ApproxModel,
    /// True when the drawn element was rejected by the condition limit and
    /// the previous model kept.
    pub discarded: bool,
}

/// Append `new_element` to the previous model's pool and refit from scratch.
///
/// With a condition limit set, a refit whose condition number exceeds the
/// limit is discarded and the previous model returned unchanged.
pub fn rvfl_step(
    prev: &ApproxModel,
    new_element: BasisElement,
    target: &GridFunction,
    cond_limit: Option<f64>,
) -> Result<RvflOutcome> {
    let mut pool = prev.basis.clone();
    pool.push(new_element);
    let fitted = least_squares_fit(&pool, target)?;
    if let Some(limit) = cond_limit {
        if fitted.cond > limit {
            return Ok(RvflOutcome {
                model: prev.clone(),
                discarded: true,
            });
        }
    }
    Ok(RvflOutcome {
        model: fitted,
        discarded: false,
    })
}

/// A finished randomized-basis run.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomBasisRun {
    pub trace: ErrorTrace,
    pub model: ApproxModel,
    /// Condition number of the model state at each recorded entry
    /// (`None` for the start state, which has no design).
    pub conds: Vec<Option<f64>>,
    /// Whether the draw at each recorded entry was discarded.
    pub discarded: Vec<bool>,
}

/// Residual `target - f_N` captured at a snapshot step.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualSnapshot {
    pub step: usize,
    pub residual: GridFunction,
}

/// A constant-target run with residual snapshots.
#[derive(Debug, Clone, PartialEq)]
pub struct BlowupRun {
    pub run: RandomBasisRun,
    pub snapshots: Vec<ResidualSnapshot>,
}

/// Steps at which the constant-target experiment snapshots its residual.
pub const BLOWUP_SNAPSHOT_STEPS: [usize; 3] = [5, 50, 500];

fn run_loop(
    target: &GridFunction,
    cfg: &RandomBasisConfig,
    snapshot_steps: &[usize],
) -> Result<(RandomBasisRun, Vec<ResidualSnapshot>)> {
    cfg.validate()?;
    if target.grid_size() != cfg.grid_size {
        return Err(Error::GridSizeMismatch {
            left: target.grid_size(),
            right: cfg.grid_size,
        });
    }
    let e0_sq = target.norm_sq();
    if e0_sq <= 0.0 {
        return Err(Error::ZeroTargetNorm);
    }
    let mut rng = stream(cfg.seed);
    let mut model = ApproxModel {
        basis: Vec::new(),
        coeffs: Vec::new(),
        residual_sq: e0_sq,
        cond: 1.0,
    };
    let mut trace = ErrorTrace {
        raw_sq: vec![e0_sq],
        normalized: vec![1.0],
        bound_sq: Vec::new(),
        alphas: Vec::new(),
    };
    let mut conds = vec![None];
    let mut discarded = vec![false];
    let mut snapshots = Vec::new();

    for step in 1..=cfg.n_steps {
        let element = draw_basis_element(cfg, &mut rng);
        let outcome = rvfl_step(&model, element, target, cfg.cond_limit)?;
        model = outcome.model;
        trace.raw_sq.push(model.residual_sq);
        trace.normalized.push(model.residual_sq / e0_sq);
        conds.push(if model.is_empty() { None } else { Some(model.cond) });
        discarded.push(outcome.discarded);
        if snapshot_steps.contains(&step) {
            snapshots.push(ResidualSnapshot {
                step,
                residual: target.sub(&model.predict(target.grid_size())?)?,
            });
        }
    }
    Ok((
        RandomBasisRun {
            trace,
            model,
            conds,
            discarded,
        },
        snapshots,
    ))
}

/// Draw-and-refit for `cfg.n_steps` steps. The trace's `bound_sq` and
/// `alphas` stay empty: this scheme carries no deterministic guarantee.
pub fn run_random_basis(target: &GridFunction, cfg: &RandomBasisConfig) -> Result<RandomBasisRun> {
    run_loop(target, cfg, &[]).map(|(run, _)| run)
}

/// The constant-target experiment: approximate `f* = 1` on `[0,1]` with
/// random indicators, capturing the residual at the snapshot steps.
pub fn run_constant_blowup(cfg: &RandomBasisConfig) -> Result<BlowupRun> {
    if !matches!(cfg.family, FamilyParams::Indicator { .. }) {
        return Err(Error::InvalidConfig(
            "the constant-target experiment requires the indicator family".into(),
        ));
    }
    cfg.validate()?;
    let target = GridFunction::constant(1.0, cfg.grid_size)?;
    let steps: Vec<usize> = BLOWUP_SNAPSHOT_STEPS
        .iter()
        .copied()
        .filter(|&s| s <= cfg.n_steps)
        .collect();
    let (run, snapshots) = run_loop(&target, cfg, &steps)?;
    Ok(BlowupRun { run, snapshots })
}

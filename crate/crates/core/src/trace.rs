//! Per-step error records of an approximation run.

/// Squared and normalized errors of a run, one entry per recorded state:
/// entry `N` describes the approximant after `N` accepted steps, so entry 0
/// is the start state `f_0 = 0`.
///
/// `bound_sq` and `alphas` are filled by the greedy scheme (the theoretical
/// bound sequence and the blend weights) and left empty by schemes that carry
/// no deterministic guarantee. When present they have the same length as
/// `raw_sq`, and `normalized[k] = raw_sq[k] / raw_sq[0]` for runs started
/// from zero.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ErrorTrace {
    pub raw_sq: Vec<f64>,
    pub normalized: Vec<f64>,
    pub bound_sq: Vec<f64>,
    pub alphas: Vec<f64>,
}

impl ErrorTrace {
    /// Number of recorded states.
    pub fn len(&self) -> usize {
        self.raw_sq.len()
    }

    pub fn is_empty(&self) -> bool {
        self.raw_sq.is_empty()
    }

    /// Number of accepted steps (states minus the start state).
    pub fn steps(&self) -> usize {
        self.len().saturating_sub(1)
    }
}

/// A candidate search that exhausted its draw budget, ending the run early.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Stall {
    /// Step index at which the search failed.
    pub step: usize,
    /// Number of draws attempted before giving up.
    pub attempts: usize,
}

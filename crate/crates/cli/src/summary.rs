//! Box statistics of trial ensembles.
//!
//! Conventions: the box spans the quartiles (50% of the data), whiskers span
//! the central 75% (12.5% and 87.5% quantiles), and everything outside the
//! whiskers is an outlier. Quantiles interpolate linearly between order
//! statistics, so a summary recomputed from the persisted raw traces matches
//! the emitted one exactly.

#[derive(Debug, Clone, PartialEq)]
pub struct BoxStats {
    pub count: usize,
    pub mean: f64,
    pub whisker_lo: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub whisker_hi: f64,
    /// Values outside the whiskers, in input order.
    pub outliers: Vec<f64>,
}

/// Linear-interpolation quantile (the `(len-1)*p` convention) of a sorted
/// slice.
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    assert!(!sorted.is_empty());
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    if lo == hi {
        sorted[lo]
    } else {
        sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
    }
}

pub fn box_stats(values: &[f64]) -> BoxStats {
    assert!(!values.is_empty());
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite statistics"));
    let whisker_lo = quantile_sorted(&sorted, 0.125);
    let whisker_hi = quantile_sorted(&sorted, 0.875);
    BoxStats {
        count: values.len(),
        mean: values.iter().sum::<f64>() / values.len() as f64,
        whisker_lo,
        q1: quantile_sorted(&sorted, 0.25),
        median: quantile_sorted(&sorted, 0.5),
        q3: quantile_sorted(&sorted, 0.75),
        whisker_hi,
        outliers: values
            .iter()
            .copied()
            .filter(|&v| v < whisker_lo || v > whisker_hi)
            .collect(),
    }
}

/// Per-step box statistics across trials. Trials may have different lengths
/// (stalled runs are truncated); step `s` summarizes the trials that reached
/// it.
pub fn per_step_stats(traces: &[Vec<f64>]) -> Vec<(usize, BoxStats)> {
    let max_len = traces.iter().map(|t| t.len()).max().unwrap_or(0);
    (0..max_len)
        .filter_map(|step| {
            let column: Vec<f64> = traces
                .iter()
                .filter_map(|t| t.get(step).copied())
                .collect();
            if column.is_empty() {
                None
            } else {
                Some((step, box_stats(&column)))
            }
        })
        .collect()
}

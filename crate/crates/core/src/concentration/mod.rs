//! Closed-form and Monte-Carlo computations for high-dimensional measure
//! concentration.
//!
//! Two families of results live here. The volume side: the fraction of an
//! n-ball within distance `delta` of its surface approaches one like
//! `1 - (1 - delta/R)^n`, and all but `exp(-n delta^2 / (2R^2))` of the ball
//! lies in a `delta`-thickening of an equatorial disc. The orthogonality
//! side: the probability that `N` random unit vectors are pairwise
//! `eps`-orthogonal, `P(eps,N) = prod_k (1 - k e^{-n eps^2/2})`, stays close
//! to one for `N` up to roughly `e^{eps^2 n / 4}`, which is what the two
//! quasi-orthogonality bounds quantify. Everything is computed in log space
//! so dimensions up to 1e6 neither overflow nor lose the small quantities.

mod gamma;

pub use gamma::{ball_volume_log, ln_gamma, stirling_gamma_with_bound, StirlingGamma};

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};

/// Inputs of the quasi-orthogonality bounds: dimension `n`, orthogonality
/// tolerance `eps` (threshold on `|cos|`), and failure probability `theta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundQuery {
    pub n: usize,
    pub eps: f64,
    pub theta: f64,
}

impl BoundQuery {
    pub fn new(n: usize, eps: f64, theta: f64) -> Result<Self> {
        let q = Self { n, eps, theta };
        q.validate()?;
        Ok(q)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::OutOfDomain {
                name: "n",
                value: 0.0,
                lo: 1.0,
                hi: f64::INFINITY,
            });
        }
        check_open_unit("eps", self.eps)?;
        check_open_unit("theta", self.theta)?;
        Ok(())
    }
}

/// Inputs of the subspace-neighborhood measure: dimension `n`, subspace
/// fraction `lambda` (so `k = round(lambda n)`), and geodesic tolerance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubspaceQuery {
    pub n: usize,
    pub lambda: f64,
    pub eps_geo: f64,
}

impl SubspaceQuery {
    pub fn new(n: usize, lambda: f64, eps_geo: f64) -> Result<Self> {
        let q = Self { n, lambda, eps_geo };
        q.validate()?;
        Ok(q)
    }

    /// Subspace dimension `k = round(lambda n)`.
    pub fn k(&self) -> usize {
        (self.lambda * self.n as f64).round() as usize
    }

    pub fn validate(&self) -> Result<()> {
        check_open_unit("lambda", self.lambda)?;
        if !(self.eps_geo > 0.0 && self.eps_geo < std::f64::consts::FRAC_PI_2) {
            return Err(Error::OutOfDomain {
                name: "eps_geo",
                value: self.eps_geo,
                lo: 0.0,
                hi: std::f64::consts::FRAC_PI_2,
            });
        }
        let k = self.k();
        if k == 0 || k >= self.n {
            return Err(Error::InvalidConfig(format!(
                "lambda * n rounds to k = {k}, outside 1..n-1 for n = {}",
                self.n
            )));
        }
        Ok(())
    }
}

fn check_open_unit(name: &'static str, value: f64) -> Result<()> {
    if !(value > 0.0 && value < 1.0) {
        return Err(Error::OutOfDomain {
            name,
            value,
            lo: 0.0,
            hi: 1.0,
        });
    }
    Ok(())
}

/// Exact fraction `1 - (1 - delta/R)^n` of an n-ball within `delta` of its
/// surface, evaluated via `log1p` so small `delta/R` keep full precision.
pub fn shell_fraction_exact(n: usize, delta_over_r: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::OutOfDomain {
            name: "n",
            value: 0.0,
            lo: 1.0,
            hi: f64::INFINITY,
        });
    }
    check_open_unit("delta_over_r", delta_over_r)?;
    Ok(-f64::exp_m1(n as f64 * f64::ln_1p(-delta_over_r)))
}

/// Lower bound `1 - e^{-n delta/R}` on the shell fraction; strictly below
/// [`shell_fraction_exact`] everywhere on the shared domain.
pub fn shell_fraction_lower_bound(n: usize, delta_over_r: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::OutOfDomain {
            name: "n",
            value: 0.0,
            lo: 1.0,
            hi: f64::INFINITY,
        });
    }
    check_open_unit("delta_over_r", delta_over_r)?;
    Ok(-f64::exp_m1(-(n as f64) * delta_over_r))
}

/// The elementary inequality `(1-x)/e < (1-x)^{1/x} < 1/e` on `(0,1)`,
/// returned as the ordered triple. Fails only when `x` sits so close to a
/// domain boundary that the chain collapses in double precision.
pub fn exp_inequality_check(x: f64) -> Result<(f64, f64, f64)> {
    check_open_unit("x", x)?;
    let e_inv = std::f64::consts::E.recip();
    let left = (1.0 - x) * e_inv;
    let middle = (f64::ln_1p(-x) / x).exp();
    if !(left < middle && middle < e_inv) {
        return Err(Error::InequalityCollapse(x));
    }
    Ok((left, middle, e_inv))
}

/// Upper bound `e^{-n (delta/R)^2 / 2}` on the fraction of an n-ball outside
/// the `delta`-thickening of an equatorial disc.
pub fn waist_fraction_bound(n: usize, delta_over_r: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::OutOfDomain {
            name: "n",
            value: 0.0,
            lo: 1.0,
            hi: f64::INFINITY,
        });
    }
    check_open_unit("delta_over_r", delta_over_r)?;
    Ok((-(n as f64) * delta_over_r * delta_over_r / 2.0).exp())
}

/// Lower estimate `P(eps,N) = prod_{k=1}^{N} (1 - k e^{-n eps^2 / 2})` of the
/// probability that `N+1` independent random vectors are pairwise
/// `eps`-orthogonal, computed as `exp` of summed `log1p` terms.
///
/// The estimate's domain requires every factor positive; a nonpositive factor
/// is reported with its index. The empty product (`count = 0`) is one.
pub fn pairwise_orthogonality_probability(n: usize, eps: f64, count: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::OutOfDomain {
            name: "n",
            value: 0.0,
            lo: 1.0,
            hi: f64::INFINITY,
        });
    }
    check_open_unit("eps", eps)?;
    let r = (-(n as f64) * eps * eps / 2.0).exp();
    let mut log_sum = 0.0;
    for k in 1..=count {
        let t = k as f64 * r;
        if t >= 1.0 {
            return Err(Error::NonPositiveFactor { k });
        }
        log_sum += f64::ln_1p(-t);
    }
    Ok(log_sum.exp())
}

/// Log of the conservative quasi-orthogonality bound
/// `N <= e^{eps^2 n / 4} sqrt(log(1/(1-theta)))`.
pub fn quasiortho_bound_conservative_log(q: &BoundQuery) -> Result<f64> {
    q.validate()?;
    let l = (1.0 / (1.0 - q.theta)).ln();
    Ok(q.eps * q.eps * q.n as f64 / 4.0 + 0.5 * l.ln())
}

/// Conservative quasi-orthogonality bound; overflows to `+inf` once
/// `eps^2 n / 4` exceeds the exponent range, in which case use the log form.
pub fn quasiortho_bound_conservative(q: &BoundQuery) -> Result<f64> {
    Ok(quasiortho_bound_conservative_log(q)?.exp())
}

/// Refined quasi-orthogonality bound
/// `N <= sqrt(log^2(1-theta)/4 + 2 log(1/(1-theta)) e^{n eps^2 / 2}) + log(1-theta)/2`,
/// asymptotically `e^{eps^2 n / 4} sqrt(2 log(1/(1-theta)))`.
pub fn quasiortho_bound_refined(q: &BoundQuery) -> Result<f64> {
    q.validate()?;
    let lg = (1.0 - q.theta).ln(); // negative
    let l = -lg;
    let half_exp = q.n as f64 * q.eps * q.eps / 2.0;
    if half_exp < 700.0 {
        let e = half_exp.exp();
        Ok((lg * lg / 4.0 + 2.0 * l * e).sqrt() + lg / 2.0)
    } else {
        Ok(f64::INFINITY)
    }
}

/// Log of the refined bound, stable for arbitrarily large `n`.
pub fn quasiortho_bound_refined_log(q: &BoundQuery) -> Result<f64> {
    q.validate()?;
    let lg = (1.0 - q.theta).ln();
    let l = -lg;
    let half_exp = q.n as f64 * q.eps * q.eps / 2.0;
    if half_exp < 700.0 {
        return Ok(quasiortho_bound_refined(q)?.ln());
    }
    // N = sqrt(2 L E) sqrt(1 + L/(8E)) - L/2 with E = e^{half_exp}:
    // ln N = ln(2L)/2 + half_exp/2 + log1p((sqrt(1 + a) - 1) - b),
    // a = L/(8E), b = (L/2)/sqrt(2LE).
    let a = (l.ln() - 8.0f64.ln() - half_exp).exp();
    let b = 0.5 * (0.5 * (l.ln() - std::f64::consts::LN_2) - half_exp / 2.0).exp();
    Ok(0.5 * (2.0 * l).ln() + half_exp / 2.0 + f64::ln_1p(((1.0 + a).sqrt() - 1.0) - b))
}

fn column_matrix(columns: &[Vec<f64>]) -> Result<faer::Mat<f64>> {
    if columns.is_empty() || columns[0].is_empty() {
        return Err(Error::EmptyMatrix);
    }
    let n = columns[0].len();
    for (index, col) in columns.iter().enumerate() {
        if col.len() != n {
            return Err(Error::ColumnLengthMismatch {
                index,
                len: col.len(),
                expected: n,
            });
        }
        if let Some(&v) = col.iter().find(|v| !v.is_finite()) {
            return Err(Error::NonFiniteSample { x: index as f64, value: v });
        }
    }
    Ok(faer::Mat::from_fn(n, columns.len(), |i, j| columns[j][i]))
}

/// Relative threshold below which the smallest singular value is reported as
/// an exact zero (numerical rank deficiency).
const GAIN_SNAP_REL_TOL: f64 = 1e-12;

/// Smallest gain `min_{||x||=1} ||H x||` of the matrix with the given
/// columns: its smallest singular value, snapped to exactly zero when the
/// columns are dependent at working precision (including `m > n`).
pub fn min_gain(columns: &[Vec<f64>]) -> Result<f64> {
    crate::numerics::pin_sequential_linalg();
    let h = column_matrix(columns)?;
    let (n, m) = (h.nrows(), h.ncols());
    if m > n {
        return Ok(0.0);
    }
    let svd = h
        .thin_svd()
        .map_err(|_| Error::InvalidConfig("singular value decomposition did not converge".into()))?;
    let s = svd.S().column_vector();
    let smax = s[0];
    let smin = s[s.nrows() - 1];
    if smin <= GAIN_SNAP_REL_TOL * smax {
        Ok(0.0)
    } else {
        Ok(smin)
    }
}

/// Uniform point on the unit sphere of `dim` dimensions via normalized
/// independent standard Gaussians.
pub fn unit_sphere_sample(dim: usize, rng: &mut impl Rng) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(rng)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 0.0 && norm.is_finite() {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}

/// Monte-Carlo estimate of the sphere measure of coefficient directions `x`
/// with `||H x|| >= eps` (the quantified linear-independence fraction).
///
/// Standard error is at most `1/(2 sqrt(samples))`.
pub fn almost_independence_fraction(
    columns: &[Vec<f64>],
    eps: f64,
    samples: usize,
    rng: &mut impl Rng,
) -> Result<f64> {
    if !eps.is_finite() || eps <= 0.0 {
        return Err(Error::OutOfDomain {
            name: "eps",
            value: eps,
            lo: 0.0,
            hi: f64::INFINITY,
        });
    }
    if samples == 0 {
        return Err(Error::InvalidConfig("samples must be at least 1".into()));
    }
    let h = column_matrix(columns)?;
    let (n, m) = (h.nrows(), h.ncols());
    let mut hits = 0usize;
    let mut y = vec![0.0f64; n];
    for _ in 0..samples {
        let x = unit_sphere_sample(m, rng);
        y.iter_mut().for_each(|v| *v = 0.0);
        for (j, &xj) in x.iter().enumerate() {
            for i in 0..n {
                y[i] += h[(i, j)] * xj;
            }
        }
        let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm >= eps {
            hits += 1;
        }
    }
    Ok(hits as f64 / samples as f64)
}

/// Rate function `u(lambda, eps) = (1-lambda) log((1-lambda)/sin^2 eps)
/// + lambda log(lambda/cos^2 eps)` of the subspace-neighborhood asymptotics.
///
/// The boundary `sin^2 eps = 1 - lambda`, where the asymptotic regime is
/// undefined, is rejected.
pub fn artstein_u(lambda: f64, eps_geo: f64) -> Result<f64> {
    check_open_unit("lambda", lambda)?;
    if !(eps_geo > 0.0 && eps_geo < std::f64::consts::FRAC_PI_2) {
        return Err(Error::OutOfDomain {
            name: "eps_geo",
            value: eps_geo,
            lo: 0.0,
            hi: std::f64::consts::FRAC_PI_2,
        });
    }
    let sin_sq = eps_geo.sin().powi(2);
    let cos_sq = eps_geo.cos().powi(2);
    if sin_sq == 1.0 - lambda {
        return Err(Error::ArtsteinBoundary);
    }
    Ok((1.0 - lambda) * ((1.0 - lambda) / sin_sq).ln() + lambda * (lambda / cos_sq).ln())
}

/// The asymptotic subspace-neighborhood measure, reported both with the
/// exponent sign as printed and with the decaying sign.
///
/// In the supercritical regime (`sin^2 eps > 1 - lambda`, measure tending to
/// one) the printed expression `1 - pref * e^{(n/2) u}` diverges because
/// `u >= 0`; the `decaying` variant flips the exponent sign. Monte-Carlo
/// estimation ([`subspace_neighborhood_mc`]) is the ground truth.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArtsteinDiagnostic {
    pub u: f64,
    pub prefactor: f64,
    /// True when `sin^2 eps > 1 - lambda`.
    pub supercritical: bool,
    /// The expression exactly as printed.
    pub printed: f64,
    /// The variant with exponent `-(n/2) u`.
    pub decaying: f64,
}

/// Evaluate both sign variants of the asymptotic measure expression at the
/// rounded subspace fraction `k/n`.
pub fn artstein_measure_diagnostic(q: &SubspaceQuery) -> Result<ArtsteinDiagnostic> {
    q.validate()?;
    let n = q.n as f64;
    let lambda = q.k() as f64 / n;
    let u = artstein_u(lambda, q.eps_geo)?;
    let sin_sq = q.eps_geo.sin().powi(2);
    let supercritical = sin_sq > 1.0 - lambda;
    let prefactor = (lambda * (1.0 - lambda)).sqrt()
        / ((n * std::f64::consts::PI).sqrt() * (sin_sq - (1.0 - lambda)).abs());
    let grow = (n / 2.0 * u).exp();
    let decay = (-n / 2.0 * u).exp();
    let (printed, decaying) = if supercritical {
        (1.0 - prefactor * grow, 1.0 - prefactor * decay)
    } else {
        (prefactor, prefactor * decay)
    };
    Ok(ArtsteinDiagnostic {
        u,
        prefactor,
        supercritical,
        printed,
        decaying,
    })
}

/// Monte-Carlo estimate of the sphere measure of the geodesic
/// `eps`-neighborhood of a `k`-dimensional coordinate subspace (WLOG by
/// rotation invariance): the fraction of uniform unit vectors whose first-k
/// block has norm at least `cos(eps)`.
pub fn subspace_neighborhood_mc(
    q: &SubspaceQuery,
    samples: usize,
    rng: &mut impl Rng,
) -> Result<f64> {
    q.validate()?;
    if samples == 0 {
        return Err(Error::InvalidConfig("samples must be at least 1".into()));
    }
    let k = q.k();
    let cos_eps = q.eps_geo.cos();
    let mut hits = 0usize;
    for _ in 0..samples {
        let x = unit_sphere_sample(q.n, rng);
        let proj: f64 = x[..k].iter().map(|v| v * v).sum();
        if proj.sqrt() >= cos_eps {
            hits += 1;
        }
    }
    Ok(hits as f64 / samples as f64)
}

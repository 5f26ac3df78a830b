//! Grid-sampled functions on `[0,1]`, midpoint-quadrature inner products,
//! basis evaluation, and rank-revealing linear least squares.
//!
//! Quadrature convention: a function is represented by its values at the
//! midpoints `x_k = (k + 1/2)/n` of a uniform grid of `n` cells, and
//! `<f,g> = (1/n) * sum_k f(x_k) g(x_k)`. Midpoints avoid double-counting
//! the endpoints of indicator supports.

use crate::error::{Error, Result};

/// Default relative truncation threshold for singular values in least squares.
pub const DEFAULT_RANK_REL_TOL: f64 = 1e-12;

/// A real function on `[0,1]` represented by samples on a uniform midpoint grid.
///
/// Immutable after construction; every sample is finite and the grid has at
/// least two cells.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    values: Vec<f64>,
}

impl GridFunction {
    /// Midpoint of cell `k` on a grid of `grid_size` cells.
    pub fn midpoint(grid_size: usize, k: usize) -> f64 {
        (k as f64 + 0.5) / grid_size as f64
    }

    /// Sample `evaluator` at the grid midpoints.
    ///
    /// Rejects non-finite evaluator output, naming the offending abscissa.
    pub fn from_fn(evaluator: impl Fn(f64) -> f64, grid_size: usize) -> Result<Self> {
        if grid_size < 2 {
            return Err(Error::GridTooSmall(grid_size));
        }
        let mut values = Vec::with_capacity(grid_size);
        for k in 0..grid_size {
            let x = Self::midpoint(grid_size, k);
            let v = evaluator(x);
            if !v.is_finite() {
                return Err(Error::NonFiniteSample { x, value: v });
            }
            values.push(v);
        }
        Ok(Self { values })
    }

    /// Wrap an existing sample vector.
    pub fn from_samples(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::GridTooSmall(values.len()));
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteSample {
                x: Self::midpoint(values.len(), k),
                value: values[k],
            });
        }
        Ok(Self { values })
    }

    pub fn constant(c: f64, grid_size: usize) -> Result<Self> {
        Self::from_fn(|_| c, grid_size)
    }

    pub fn zeros(grid_size: usize) -> Result<Self> {
        Self::constant(0.0, grid_size)
    }

    pub fn grid_size(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Midpoint-quadrature inner product `(1/n) * sum_k f_k g_k`.
    pub fn inner(&self, other: &Self) -> Result<f64> {
        if self.grid_size() != other.grid_size() {
            return Err(Error::GridSizeMismatch {
                left: self.grid_size(),
                right: other.grid_size(),
            });
        }
        let s: f64 = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b)
            .sum();
        Ok(s / self.grid_size() as f64)
    }

    /// Squared quadrature L2 norm; zero iff all samples are zero.
    pub fn norm_sq(&self) -> f64 {
        self.inner(self).expect("same grid")
    }

    /// Pointwise difference `self - other`.
    pub fn sub(&self, other: &Self) -> Result<Self> {
        if self.grid_size() != other.grid_size() {
            return Err(Error::GridSizeMismatch {
                left: self.grid_size(),
                right: other.grid_size(),
            });
        }
        Ok(Self {
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    /// In-place convex blend `self <- (1 - alpha) * self + alpha * other`.
    pub fn blend_with(&mut self, other: &Self, alpha: f64) -> Result<()> {
        if self.grid_size() != other.grid_size() {
            return Err(Error::GridSizeMismatch {
                left: self.grid_size(),
                right: other.grid_size(),
            });
        }
        for (a, b) in self.values.iter_mut().zip(&other.values) {
            *a = (1.0 - alpha) * *a + alpha * b;
        }
        Ok(())
    }

    /// Number of strict sign changes along the grid (`v_k * v_{k+1} < 0`).
    pub fn sign_changes(&self) -> usize {
        self.values
            .windows(2)
            .filter(|w| w[0] * w[1] < 0.0)
            .count()
    }
}

/// A parameterized basis function on `[0,1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BasisElement {
    /// `x -> exp(-(w*x + b)^2)`; values lie in `(0,1]`.
    Gaussian { w: f64, b: f64 },
    /// `x -> 1` on the closed interval `[a - sigma/2, a + sigma/2]`, else `0`.
    Indicator { a: f64, sigma: f64 },
}

impl BasisElement {
    pub fn gaussian(w: f64, b: f64) -> Self {
        Self::Gaussian { w, b }
    }

    /// Indicator with center `a` and width `sigma`, both required in `[0,1]`.
    pub fn indicator(a: f64, sigma: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&a) || !(0.0..=1.0).contains(&sigma) {
            return Err(Error::IndicatorOutOfRange { a, sigma });
        }
        Ok(Self::Indicator { a, sigma })
    }

    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            Self::Gaussian { w, b } => {
                let t = w * x + b;
                (-t * t).exp()
            }
            Self::Indicator { a, sigma } => {
                if x >= a - sigma / 2.0 && x <= a + sigma / 2.0 {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    /// Sample the element's closed form at the grid midpoints.
    pub fn sample(&self, grid_size: usize) -> Result<GridFunction> {
        GridFunction::from_fn(|x| self.eval(x), grid_size)
    }
}

/// An ordered basis with linear coefficients and fit diagnostics.
///
/// `basis` and `coeffs` always have equal length; `residual_sq` is the squared
/// quadrature L2 residual of the fit (or of the run that produced the model),
/// and `cond` is the condition number of the sampled design matrix, with
/// `+inf` reported for numerically rank-deficient designs.
#[derive(Debug, Clone, PartialEq)]
pub struct ApproxModel {
    pub basis: Vec<BasisElement>,
    pub coeffs: Vec<f64>,
    pub residual_sq: f64,
    pub cond: f64,
}

impl ApproxModel {
    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    /// Evaluate `sum_i c_i basis_i` on a grid.
    pub fn predict(&self, grid_size: usize) -> Result<GridFunction> {
        let mut acc = vec![0.0; grid_size];
        for (elem, &c) in self.basis.iter().zip(&self.coeffs) {
            let g = elem.sample(grid_size)?;
            for (a, v) in acc.iter_mut().zip(g.values()) {
                *a += c * v;
            }
        }
        GridFunction::from_samples(acc)
    }
}

/// Pin the linear algebra backend to sequential kernels. Parallel kernels
/// split reductions by the ambient thread count, which would make results
/// depend on the caller's worker pool; sequential execution keeps every fit
/// bit-identical at any worker count.
pub(crate) fn pin_sequential_linalg() {
    faer::set_global_parallelism(faer::Par::Seq);
}

/// Design matrix with columns = sampled basis functions, scaled by the
/// quadrature weight so that Euclidean norms equal quadrature norms.
fn design_matrix(basis: &[BasisElement], grid_size: usize) -> Result<faer::Mat<f64>> {
    let scale = 1.0 / (grid_size as f64).sqrt();
    let mut a = faer::Mat::zeros(grid_size, basis.len());
    for (j, elem) in basis.iter().enumerate() {
        let g = elem.sample(grid_size)?;
        for (k, v) in g.values().iter().enumerate() {
            a[(k, j)] = v * scale;
        }
    }
    Ok(a)
}

/// Condition number of a design from its singular values: ratio of the
/// extreme singular values, `+inf` when the design is rank-deficient (any
/// exactly zero singular value, or more columns than rows).
fn design_cond(sigmas: &[f64], n_cols: usize) -> f64 {
    let smax = sigmas.first().copied().unwrap_or(0.0);
    let smin = sigmas.last().copied().unwrap_or(0.0);
    if smax == 0.0 || smin == 0.0 || n_cols > sigmas.len() {
        f64::INFINITY
    } else {
        smax / smin
    }
}

/// Least squares with the default rank tolerance. See
/// [`least_squares_fit_with_tol`].
pub fn least_squares_fit(basis: &[BasisElement], target: &GridFunction) -> Result<ApproxModel> {
    least_squares_fit_with_tol(basis, target, DEFAULT_RANK_REL_TOL)
}

/// Minimize the quadrature L2 norm of `target - sum_i c_i basis_i`.
///
/// The solve is a singular value decomposition of the quadrature-scaled design
/// matrix; singular values below `rel_tol` times the largest are truncated and
/// the minimum-norm coefficient vector over the retained subspace is returned.
/// `residual_sq` is the attained minimum and `cond` the ratio of the design's
/// extreme singular values (`+inf` for rank-deficient designs, including
/// all-zero columns; the fit proceeds on the truncated subspace).
pub fn least_squares_fit_with_tol(
    basis: &[BasisElement],
    target: &GridFunction,
    rel_tol: f64,
) -> Result<ApproxModel> {
    if basis.is_empty() {
        return Err(Error::EmptyBasis);
    }
    pin_sequential_linalg();
    let n = target.grid_size();
    let m = basis.len();
    let a = design_matrix(basis, n)?;
    let scale = 1.0 / (n as f64).sqrt();
    let b = faer::Mat::from_fn(n, 1, |k, _| target.values()[k] * scale);

    let svd = a
        .thin_svd()
        .map_err(|_| Error::InvalidConfig("singular value decomposition did not converge".into()))?;
    let s = svd.S().column_vector();
    let sigmas: Vec<f64> = (0..s.nrows()).map(|i| s[i]).collect();
    let smax = sigmas.first().copied().unwrap_or(0.0);
    let cutoff = rel_tol * smax;

    // Minimum-norm solution over the retained subspace.
    let ut_b = svd.U().transpose() * &b;
    let mut y = faer::Mat::<f64>::zeros(sigmas.len(), 1);
    for i in 0..sigmas.len() {
        if sigmas[i] > cutoff && sigmas[i] > 0.0 {
            y[(i, 0)] = ut_b[(i, 0)] / sigmas[i];
        }
    }
    let c = svd.V() * &y;
    let coeffs: Vec<f64> = (0..m).map(|j| c[(j, 0)]).collect();

    let r = &b - &a * &c;
    let residual_sq: f64 = (0..n).map(|k| r[(k, 0)] * r[(k, 0)]).sum();

    Ok(ApproxModel {
        basis: basis.to_vec(),
        coeffs,
        residual_sq: residual_sq.max(0.0),
        cond: design_cond(&sigmas, m),
    })
}

/// Condition number of the sampled design of an arbitrary basis list.
pub fn basis_cond(basis: &[BasisElement], grid_size: usize) -> Result<f64> {
    if basis.is_empty() {
        return Ok(1.0);
    }
    pin_sequential_linalg();
    let a = design_matrix(basis, grid_size)?;
    let svd = a
        .thin_svd()
        .map_err(|_| Error::InvalidConfig("singular value decomposition did not converge".into()))?;
    let s = svd.S().column_vector();
    let sigmas: Vec<f64> = (0..s.nrows()).map(|i| s[i]).collect();
    Ok(design_cond(&sigmas, basis.len()))
}

/// Normalized squared error `residual_sq / target_norm_sq`.
pub fn normalized_error(residual_sq: f64, target_norm_sq: f64) -> Result<f64> {
    if residual_sq < 0.0 {
        return Err(Error::NegativeErrorSquared(residual_sq));
    }
    if target_norm_sq <= 0.0 {
        return Err(Error::ZeroTargetNorm);
    }
    Ok(residual_sq / target_norm_sq)
}

/// The three-bump target of the approximation experiments:
/// `0.2 e^{-(10x-4)^2} + 0.5 e^{-(80x-40)^2} + 0.3 e^{-(80x-20)^2}`.
pub fn bump_target(x: f64) -> f64 {
    0.2 * (-(10.0 * x - 4.0).powi(2)).exp()
        + 0.5 * (-(80.0 * x - 40.0).powi(2)).exp()
        + 0.3 * (-(80.0 * x - 20.0).powi(2)).exp()
}

//! Test-only oracles, independent of the library's solve paths.
#![allow(clippy::needless_range_loop)] // elimination reads clearest indexed

use basislab::{BasisElement, GridFunction};
use num::{BigRational, FromPrimitive, Signed, Zero};

/// Exact rational solve of the normal equations `(B^T B) c = B^T f` for the
/// design sampled on the target's grid. Every f64 sample converts to an exact
/// rational, the Gram matrix and right-hand side are accumulated exactly, and
/// Gaussian elimination with partial pivoting runs over rationals, so the
/// returned coefficients are the mathematically exact minimizer for the
/// sampled data. Returns `None` when the Gram matrix is singular.
pub fn exact_normal_equation_coeffs(
    basis: &[BasisElement],
    target: &GridFunction,
) -> Option<Vec<f64>> {
    let n = target.grid_size();
    let m = basis.len();
    let rat = |v: f64| BigRational::from_f64(v).expect("finite sample");

    let columns: Vec<Vec<BigRational>> = basis
        .iter()
        .map(|e| {
            e.sample(n)
                .expect("sampling")
                .values()
                .iter()
                .map(|&v| rat(v))
                .collect()
        })
        .collect();
    let rhs_col: Vec<BigRational> = target.values().iter().map(|&v| rat(v)).collect();

    // Gram and right-hand side; the quadrature weight 1/n cancels.
    let mut gram = vec![vec![BigRational::zero(); m]; m];
    let mut rhs = vec![BigRational::zero(); m];
    for i in 0..m {
        for j in i..m {
            let mut acc = BigRational::zero();
            for k in 0..n {
                acc += &columns[i][k] * &columns[j][k];
            }
            gram[j][i] = acc.clone();
            gram[i][j] = acc;
        }
        let mut acc = BigRational::zero();
        for k in 0..n {
            acc += &columns[i][k] * &rhs_col[k];
        }
        rhs[i] = acc;
    }

    // Gaussian elimination with partial pivoting over exact rationals.
    for col in 0..m {
        let pivot_row = (col..m).max_by(|&a, &b| gram[a][col].abs().cmp(&gram[b][col].abs()))?;
        if gram[pivot_row][col].is_zero() {
            return None;
        }
        gram.swap(col, pivot_row);
        rhs.swap(col, pivot_row);
        for row in col + 1..m {
            if gram[row][col].is_zero() {
                continue;
            }
            let factor = &gram[row][col] / &gram[col][col];
            for k in col..m {
                let sub = &factor * &gram[col][k];
                gram[row][k] -= sub;
            }
            let sub = &factor * &rhs[col];
            rhs[row] -= sub;
        }
    }
    let mut coeffs = vec![BigRational::zero(); m];
    for row in (0..m).rev() {
        let mut acc = rhs[row].clone();
        for k in row + 1..m {
            let sub = &gram[row][k] * &coeffs[k];
            acc -= sub;
        }
        coeffs[row] = acc / &gram[row][row];
    }
    Some(coeffs.iter().map(rational_to_f64).collect())
}

/// Round a rational to the nearest f64 via a high-precision quotient.
fn rational_to_f64(r: &BigRational) -> f64 {
    use num::ToPrimitive;
    r.to_f64().expect("rational fits in f64 range")
}

/// Relative Euclidean distance between coefficient vectors.
pub fn relative_vec_error(got: &[f64], expected: &[f64]) -> f64 {
    let diff: f64 = got
        .iter()
        .zip(expected)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt();
    let scale: f64 = expected.iter().map(|b| b * b).sum::<f64>().sqrt();
    if scale == 0.0 {
        diff
    } else {
        diff / scale
    }
}

//! Quasi-orthogonal chains of random hypercube vectors and angle statistics.
//!
//! A chain grows greedily: vectors are drawn uniformly from `[-1,1]^n` and a
//! candidate is retained iff its angle with every retained vector lies within
//! `pi/2 +- tol`; the first rejection ends the chain. The recorded lengths
//! are the empirical counterpart of the quasi-orthogonality bounds in
//! [`crate::concentration`], which predict capacity growing like
//! `e^{eps^2 n / 4}` with `eps = sin(tol)`.

use rand::Rng;

use crate::error::{Error, Result};
use crate::rng::stream;

/// Uniform vector in the hypercube `[-1,1]^n`.
pub fn sample_hypercube(n: usize, rng: &mut impl Rng) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-1.0..=1.0)).collect()
}

/// Cosine of the angle between two nonzero vectors, clamped to `[-1,1]`
/// against rounding.
pub fn cos_angle(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::VectorLengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    let (mut dot, mut nx, mut ny) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        dot += a * b;
        nx += a * a;
        ny += b * b;
    }
    if nx == 0.0 || ny == 0.0 {
        return Err(Error::ZeroVector);
    }
    Ok((dot / (nx.sqrt() * ny.sqrt())).clamp(-1.0, 1.0))
}

/// Summary of one grown chain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainResult {
    pub n: usize,
    /// Half-width of the accepted angle band around `pi/2`, in radians.
    pub tol: f64,
    /// Number of retained vectors when the chain broke (or hit the cap).
    pub length: usize,
    pub seed: u64,
    /// True when growth stopped at `max_length` rather than at a rejection.
    pub capped: bool,
}

/// A grown chain together with its retained vectors, kept so the pairwise
/// band property can be re-verified independently of the growth loop.
#[derive(Debug, Clone, PartialEq)]
pub struct GrownChain {
    pub result: ChainResult,
    pub vectors: Vec<Vec<f64>>,
}

/// Grow one chain from its own seeded stream until the first rejection or
/// `max_length` retained vectors.
///
/// The angle test `|angle - pi/2| <= tol` is evaluated on the cosine scale as
/// `|cos| <= sin(tol)`, which is the same condition without the `acos`.
/// Vectors are kept as raw hypercube draws; angles are scale-invariant.
pub fn grow_chain(n: usize, tol: f64, seed: u64, max_length: usize) -> Result<GrownChain> {
    if n == 0 {
        return Err(Error::InvalidConfig("dimension must be at least 1".into()));
    }
    if !(tol > 0.0 && tol < std::f64::consts::FRAC_PI_2) {
        return Err(Error::OutOfDomain {
            name: "tol",
            value: tol,
            lo: 0.0,
            hi: std::f64::consts::FRAC_PI_2,
        });
    }
    if max_length == 0 {
        return Err(Error::InvalidConfig("max_length must be at least 1".into()));
    }
    let cos_band = tol.sin();
    let mut rng = stream(seed);
    let mut vectors = vec![sample_hypercube(n, &mut rng)];
    let mut capped = vectors.len() >= max_length;
    while !capped {
        let candidate = sample_hypercube(n, &mut rng);
        let mut accepted = true;
        for v in &vectors {
            if cos_angle(v, &candidate)?.abs() > cos_band {
                accepted = false;
                break;
            }
        }
        if !accepted {
            break;
        }
        vectors.push(candidate);
        capped = vectors.len() >= max_length;
    }
    Ok(GrownChain {
        result: ChainResult {
            n,
            tol,
            length: vectors.len(),
            seed,
            capped,
        },
        vectors,
    })
}

/// Independent re-verification that a vector set is pairwise within the
/// angle band `pi/2 +- tol`.
pub fn pairwise_within_band(vectors: &[Vec<f64>], tol: f64) -> Result<bool> {
    let cos_band = tol.sin();
    for (i, v) in vectors.iter().enumerate() {
        for w in &vectors[i + 1..] {
            if cos_angle(v, w)?.abs() > cos_band {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Binned angles between one random reference vector and `count` further
/// hypercube draws.
#[derive(Debug, Clone, PartialEq)]
pub struct AngleHistogram {
    /// Bin counts over `[0, pi]`, uniform width.
    pub counts: Vec<u64>,
    /// The raw angles, in draw order.
    pub angles: Vec<f64>,
}

impl AngleHistogram {
    pub fn bin_width(&self) -> f64 {
        std::f64::consts::PI / self.counts.len() as f64
    }

    /// Fraction of sampled angles with `|cos| <= eps`.
    pub fn cos_within(&self, eps: f64) -> f64 {
        let hits = self
            .angles
            .iter()
            .filter(|a| a.cos().abs() <= eps)
            .count();
        hits as f64 / self.angles.len() as f64
    }
}

/// Draw one reference vector and `count` further vectors from `[-1,1]^n`,
/// returning the binned angles to the reference.
pub fn angle_histogram(
    n: usize,
    count: usize,
    bins: usize,
    rng: &mut impl Rng,
) -> Result<AngleHistogram> {
    if n == 0 {
        return Err(Error::InvalidConfig("dimension must be at least 1".into()));
    }
    if count < 2 {
        return Err(Error::InvalidConfig(format!(
            "count must be at least 2, got {count}"
        )));
    }
    if bins == 0 {
        return Err(Error::InvalidConfig("bins must be at least 1".into()));
    }
    let reference = sample_hypercube(n, rng);
    let mut counts = vec![0u64; bins];
    let mut angles = Vec::with_capacity(count);
    for _ in 0..count {
        let x = sample_hypercube(n, rng);
        let angle = cos_angle(&reference, &x)?.acos();
        let idx = ((angle / std::f64::consts::PI) * bins as f64) as usize;
        counts[idx.min(bins - 1)] += 1;
        angles.push(angle);
    }
    Ok(AngleHistogram { counts, angles })
}

use rand::Rng;

use crate::error::ModelError;

/// Inversion is numerically safe while e^{-λ} stays well away from underflow;
/// larger rates are split into chunks and summed (Poisson additivity).
const CHUNK: f64 = 16.0;

/// One Poisson(λ) draw.
pub fn sample_encounters<R: Rng + ?Sized>(lambda: f64, rng: &mut R) -> Result<u64, ModelError> {
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return Err(ModelError::invalid("lambda", format!("must be finite and >= 0, got {lambda}")));
    }
    let mut remaining = lambda;
    let mut total = 0;
    while remaining > 0.0 {
        let part = remaining.min(CHUNK);
        total += invert(part, rng);
        remaining -= part;
    }
    Ok(total)
}

fn invert<R: Rng + ?Sized>(lambda: f64, rng: &mut R) -> u64 {
    let u: f64 = rng.random();
    let mut k = 0u64;
    let mut p = (-lambda).exp();
    let mut cdf = p;
    // the cap only matters when rounding leaves cdf just short of u ≈ 1
    let cap = (lambda + 40.0 * lambda.sqrt() + 40.0) as u64;
    while u > cdf && k < cap {
        k += 1;
        p *= lambda / k as f64;
        cdf += p;
    }
    k
}

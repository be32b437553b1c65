use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::poisson_reciprocal_expectation;
use crate::error::HarnessError;
use crate::sim::sample_encounters;

pub const MIN_SAMPLES: u64 = 10_000;

/// Monte Carlo check of one encounter rate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationRow {
    pub lambda: f64,
    /// (1 − e^{−λ})/λ.
    pub analytic: f64,
    /// Sample mean of 1/(T+1).
    pub empirical: f64,
    pub samples: u64,
    /// |empirical − analytic| / analytic.
    pub rel_error: f64,
    pub mean_t: f64,
    pub var_t: f64,
    /// |mean_t − λ| / λ, zero when λ = 0 and every draw was 0.
    pub mean_rel_error: f64,
    pub var_rel_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub seed: u64,
    pub rows: Vec<ValidationRow>,
}

fn rel(got: f64, want: f64) -> f64 {
    if want == 0.0 {
        got.abs()
    } else {
        (got - want).abs() / want.abs()
    }
}

/// λ number `i` draws from stream `i` of `seed`, so rows are independent of
/// each other and of thread scheduling.
pub fn validate_analytic(lambdas: &[f64], samples: u64, seed: u64) -> Result<ValidationReport, HarnessError> {
    if samples < MIN_SAMPLES {
        return Err(HarnessError::InvalidArgument(format!("samples must be >= {MIN_SAMPLES}, got {samples}")));
    }
    if let Some(bad) = lambdas.iter().find(|l| !(**l >= 0.0 && l.is_finite())) {
        return Err(HarnessError::InvalidArgument(format!("lambda must be finite and >= 0, got {bad}")));
    }
    let rows = lambdas
        .par_iter()
        .enumerate()
        .map(|(i, &lambda)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let (mut recip, mut sum, mut sum_sq) = (0.0, 0.0, 0.0);
            for _ in 0..samples {
                let t = sample_encounters(lambda, &mut rng)? as f64;
                recip += 1.0 / (t + 1.0);
                sum += t;
                sum_sq += t * t;
            }
            let n = samples as f64;
            let empirical = recip / n;
            let mean_t = sum / n;
            let var_t = (sum_sq - n * mean_t * mean_t) / (n - 1.0);
            let analytic = poisson_reciprocal_expectation(lambda)?;
            Ok(ValidationRow {
                lambda,
                analytic,
                empirical,
                samples,
                rel_error: rel(empirical, analytic),
                mean_t,
                var_t,
                mean_rel_error: rel(mean_t, lambda),
                var_rel_error: rel(var_t, lambda),
            })
        })
        .collect::<Result<Vec<_>, HarnessError>>()?;
    Ok(ValidationReport { seed, rows })
}

use inertia_core::{NoiseSpec, SignalTrace};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Normal;

use crate::error::{Result, SignalError};

/// Adds i.i.d. zero-mean Gaussian noise with standard deviation
/// `spec.sigma`, reproducible from `spec.seed`.
pub fn add_noise(trace: &SignalTrace, spec: &NoiseSpec) -> Result<SignalTrace> {
    if !(spec.sigma >= 0.0 && spec.sigma.is_finite()) {
        return Err(SignalError::Noise(format!("sigma must be >= 0, got {}", spec.sigma)));
    }
    if spec.sigma == 0.0 {
        return Ok(trace.clone());
    }
    let normal = Normal::new(0.0, spec.sigma).map_err(|e| SignalError::Noise(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let values = trace.values().iter().map(|v| v + rng.sample(normal)).collect();
    Ok(trace.with_values(values)?)
}

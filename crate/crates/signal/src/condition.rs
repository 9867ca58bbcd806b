use inertia_core::{AreaDataset, FilterSpec, NoiseSpec, SignalTrace};

use crate::error::Result;
use crate::filter::lowpass;
use crate::noise::add_noise;

/// Seed of the noise added to trace `k` (speeds first, then powers).
pub fn trace_seed(seed: u64, k: usize) -> u64 {
    seed.wrapping_mul(1000).wrapping_add(k as u64)
}

/// Emulates the measurement channel on every trace of `dataset`: independent
/// noise on each trace, then the low-pass filter. Speed noise is converted
/// from the units of `noise.speed_units` to pu with `nominal_frequency_hz`.
/// With both stages absent the dataset is returned unchanged.
pub fn condition(
    dataset: &AreaDataset,
    noise: Option<&NoiseSpec>,
    filter: Option<&FilterSpec>,
    nominal_frequency_hz: f64,
) -> Result<AreaDataset> {
    let n = dataset.n_areas();
    let stage = |k: usize, trace: &SignalTrace, sigma: f64| -> Result<SignalTrace> {
        let mut out = match noise {
            Some(spec) => add_noise(trace, &NoiseSpec { sigma, seed: trace_seed(spec.seed, k), ..*spec })?,
            None => trace.clone(),
        };
        if let Some(f) = filter {
            out = lowpass(&out, f)?;
        }
        Ok(out)
    };
    let speed_sigma = noise.map_or(0.0, |s| s.speed_sigma_pu(nominal_frequency_hz));
    let power_sigma = noise.map_or(0.0, |s| s.sigma);
    let speed = (0..n)
        .map(|i| stage(i, dataset.speed(i), speed_sigma))
        .collect::<Result<Vec<_>>>()?;
    let power = (0..n)
        .map(|i| stage(n + i, dataset.power(i), power_sigma))
        .collect::<Result<Vec<_>>>()?;
    Ok(AreaDataset::new(dataset.area_ids().to_vec(), speed, power)?)
}

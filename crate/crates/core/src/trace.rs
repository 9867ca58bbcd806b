use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};

/// A uniformly sampled, finite, non-empty real signal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawTrace", into = "RawTrace")]
pub struct SignalTrace {
    values: Vec<f64>,
    dt: f64,
    t0: f64,
}

#[derive(Serialize, Deserialize)]
struct RawTrace {
    values: Vec<f64>,
    dt: f64,
    t0: f64,
}

impl TryFrom<RawTrace> for SignalTrace {
    type Error = CoreError;
    fn try_from(raw: RawTrace) -> Result<Self> {
        SignalTrace::new(raw.values, raw.dt, raw.t0)
    }
}

impl From<SignalTrace> for RawTrace {
    fn from(t: SignalTrace) -> Self {
        RawTrace {
            values: t.values,
            dt: t.dt,
            t0: t.t0,
        }
    }
}

impl SignalTrace {
    pub fn new(values: Vec<f64>, dt: f64, t0: f64) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(CoreError::InvalidTrace(format!("dt must be positive, got {dt}")));
        }
        if !t0.is_finite() {
            return Err(CoreError::InvalidTrace("t0 must be finite".into()));
        }
        if values.is_empty() {
            return Err(CoreError::InvalidTrace("trace is empty".into()));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(CoreError::InvalidTrace(format!("non-finite sample at index {i}")));
        }
        Ok(Self { values, dt, t0 })
    }

    /// Samples `f` at `t0 + k*dt` for `k in 0..len`.
    pub fn from_fn(len: usize, dt: f64, t0: f64, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = (0..len).map(|k| f(t0 + k as f64 * dt)).collect();
        Self::new(values, dt, t0)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Absolute time of sample `k`.
    pub fn time(&self, k: usize) -> f64 {
        self.t0 + k as f64 * self.dt
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.values.len()).map(move |k| self.time(k))
    }

    /// Same grid, new values.
    pub fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        if values.len() != self.values.len() {
            return Err(CoreError::InvalidTrace(format!(
                "length mismatch: {} vs {}",
                values.len(),
                self.values.len()
            )));
        }
        Self::new(values, self.dt, self.t0)
    }

    /// Sub-trace `[start, end)` with `t0` shifted accordingly.
    pub fn slice(&self, start: usize, end: usize) -> Result<Self> {
        if start >= end || end > self.values.len() {
            return Err(CoreError::InvalidTrace(format!(
                "slice {start}..{end} out of range for length {}",
                self.values.len()
            )));
        }
        Self::new(self.values[start..end].to_vec(), self.dt, self.time(start))
    }

    pub fn scaled(&self, k: f64) -> Result<Self> {
        self.with_values(self.values.iter().map(|v| v * k).collect())
    }

    pub fn same_grid(&self, other: &SignalTrace) -> bool {
        self.values.len() == other.values.len()
            && (self.dt - other.dt).abs() <= 1e-12 * self.dt
            && (self.t0 - other.t0).abs() <= 1e-9 * self.dt.max(1.0)
    }
}

/// Per-area deviation signals on a shared uniform grid.
///
/// Row `i` of `speed_dev` is the area-`i` centre-of-inertia speed deviation
/// (pu of nominal frequency); row `i` of `power_dev` is the matching
/// electrical power deviation (pu on the system base, positive = more power
/// drawn out of the area's machines).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AreaDataset {
    area_ids: Vec<String>,
    speed_dev: Vec<SignalTrace>,
    power_dev: Vec<SignalTrace>,
}

impl AreaDataset {
    pub fn new(
        area_ids: Vec<String>,
        speed_dev: Vec<SignalTrace>,
        power_dev: Vec<SignalTrace>,
    ) -> Result<Self> {
        let n = area_ids.len();
        if n == 0 {
            return Err(CoreError::InvalidDataset("no areas".into()));
        }
        if speed_dev.len() != n || power_dev.len() != n {
            return Err(CoreError::InvalidDataset(format!(
                "{n} areas but {} speed and {} power traces",
                speed_dev.len(),
                power_dev.len()
            )));
        }
        let mut seen = std::collections::BTreeSet::new();
        for id in &area_ids {
            if !seen.insert(id) {
                return Err(CoreError::InvalidDataset(format!("duplicate area id {id}")));
            }
        }
        let reference = &speed_dev[0];
        if let Some(bad) = speed_dev
            .iter()
            .chain(power_dev.iter())
            .position(|t| !t.same_grid(reference))
        {
            return Err(CoreError::InvalidDataset(format!(
                "trace {bad} does not share dt/t0/length with the first trace"
            )));
        }
        let min_len = 2 * (2 * n) + 2;
        if reference.len() < min_len {
            return Err(CoreError::InvalidDataset(format!(
                "{} samples is too short for {n} areas (need at least {min_len})",
                reference.len()
            )));
        }
        Ok(Self {
            area_ids,
            speed_dev,
            power_dev,
        })
    }

    pub fn area_ids(&self) -> &[String] {
        &self.area_ids
    }

    pub fn n_areas(&self) -> usize {
        self.area_ids.len()
    }

    pub fn speed_dev(&self) -> &[SignalTrace] {
        &self.speed_dev
    }

    pub fn power_dev(&self) -> &[SignalTrace] {
        &self.power_dev
    }

    pub fn speed(&self, area: usize) -> &SignalTrace {
        &self.speed_dev[area]
    }

    pub fn power(&self, area: usize) -> &SignalTrace {
        &self.power_dev[area]
    }

    /// Sample count M.
    pub fn len(&self) -> usize {
        self.speed_dev[0].len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dt(&self) -> f64 {
        self.speed_dev[0].dt()
    }

    pub fn t0(&self) -> f64 {
        self.speed_dev[0].t0()
    }

    /// Index of the first sample at or after absolute time `t`.
    pub fn index_at(&self, t: f64) -> usize {
        let k = ((t - self.t0()) / self.dt() - 1e-9).ceil();
        if k <= 0.0 {
            0
        } else {
            k as usize
        }
    }

    /// Applies `f` to every trace (speeds first, then powers), keeping ids.
    pub fn map_traces(
        &self,
        mut f: impl FnMut(usize, &SignalTrace) -> Result<SignalTrace>,
    ) -> Result<Self> {
        let n = self.n_areas();
        let speed = self
            .speed_dev
            .iter()
            .enumerate()
            .map(|(i, t)| f(i, t))
            .collect::<Result<Vec<_>>>()?;
        let power = self
            .power_dev
            .iter()
            .enumerate()
            .map(|(i, t)| f(n + i, t))
            .collect::<Result<Vec<_>>>()?;
        Self::new(self.area_ids.clone(), speed, power)
    }

    /// Samples `[start, end)` of every trace.
    pub fn window(&self, start: usize, end: usize) -> Result<Self> {
        self.map_traces(|_, t| t.slice(start, end))
    }
}

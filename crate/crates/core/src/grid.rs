//! Classical-model grid description and ground-truth area inertia.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

/// Typical synchronous-machine inertia range in seconds (machine base).
pub const TYPICAL_H_RANGE: (f64, f64) = (1.75, 10.0);
/// Typical damping range in pu (machine base).
pub const TYPICAL_D_RANGE: (f64, f64) = (1e-2, 1e-1);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bus {
    pub id: u32,
    #[serde(default = "default_kv")]
    pub base_kv: f64,
}

fn default_kv() -> f64 {
    230.0
}

/// Classical generator: constant EMF behind transient reactance.
///
/// `h_s`, `d_pu` and `xd_prime_pu` are on the machine base `rating_mva`;
/// `p_pu` is the pre-disturbance mechanical power on the system base.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Generator {
    pub id: String,
    pub bus: u32,
    pub rating_mva: f64,
    pub h_s: f64,
    pub d_pu: f64,
    pub xd_prime_pu: f64,
    pub p_pu: f64,
    #[serde(default = "default_v_setpoint")]
    pub v_setpoint_pu: f64,
}

fn default_v_setpoint() -> f64 {
    1.0
}

impl Generator {
    /// Inertia on the system base, `H_m * S_m / S_base`.
    pub fn h_system(&self, system_base_mva: f64) -> f64 {
        self.h_s * self.rating_mva / system_base_mva
    }

    /// Damping on the system base.
    pub fn d_system(&self, system_base_mva: f64) -> f64 {
        self.d_pu * self.rating_mva / system_base_mva
    }

    /// Transient reactance on the system base.
    pub fn xd_system(&self, system_base_mva: f64) -> f64 {
        self.xd_prime_pu * system_base_mva / self.rating_mva
    }
}

/// Lossless series branch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Line {
    pub from: u32,
    pub to: u32,
    pub x_pu: f64,
}

/// Active load on the system base, converted to a constant impedance at the
/// pre-disturbance operating point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Load {
    pub bus: u32,
    pub p_pu: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridModel {
    pub buses: Vec<Bus>,
    pub generators: Vec<Generator>,
    pub lines: Vec<Line>,
    #[serde(default)]
    pub loads: Vec<Load>,
    /// bus id -> area label
    #[serde(deserialize_with = "bus_keyed_map")]
    pub areas: BTreeMap<u32, String>,
    pub system_base_mva: f64,
    pub nominal_frequency_hz: f64,
}

// JSON object keys are strings; they arrive as such when the model is
// flattened into a scenario file.
fn bus_keyed_map<'de, D>(de: D) -> Result<BTreeMap<u32, String>, D::Error>
where
    D: serde::Deserializer<'de>,
{
    let raw = BTreeMap::<String, String>::deserialize(de)?;
    raw.into_iter()
        .map(|(k, v)| {
            k.trim()
                .parse::<u32>()
                .map(|bus| (bus, v))
                .map_err(|_| serde::de::Error::custom(format!("area map key `{k}` is not a bus id")))
        })
        .collect()
}

impl GridModel {
    /// Area labels in order of first appearance along `buses`.
    pub fn area_ids(&self) -> Vec<String> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for bus in &self.buses {
            if let Some(a) = self.areas.get(&bus.id) {
                if seen.insert(a.clone()) {
                    out.push(a.clone());
                }
            }
        }
        out
    }

    pub fn area_of_bus(&self, bus: u32) -> Option<&str> {
        self.areas.get(&bus).map(String::as_str)
    }

    pub fn area_of_generator(&self, g: &Generator) -> Option<&str> {
        self.area_of_bus(g.bus)
    }

    /// Generator indices per area, in `area_ids()` order.
    pub fn generators_by_area(&self) -> Vec<(String, Vec<usize>)> {
        self.area_ids()
            .into_iter()
            .map(|a| {
                let idx = self
                    .generators
                    .iter()
                    .enumerate()
                    .filter(|(_, g)| self.area_of_generator(g) == Some(a.as_str()))
                    .map(|(i, _)| i)
                    .collect();
                (a, idx)
            })
            .collect()
    }

    pub fn bus_index(&self) -> HashMap<u32, usize> {
        self.buses.iter().enumerate().map(|(i, b)| (b.id, i)).collect()
    }

    /// Structural errors only; range warnings are ignored.
    pub fn check(&self) -> crate::Result<()> {
        let errors: Vec<String> = validate(self)
            .into_iter()
            .filter(|f| f.severity == Severity::Error)
            .map(|f| f.message)
            .collect();
        if errors.is_empty() {
            Ok(())
        } else {
            Err(crate::CoreError::InvalidModel(errors.join("; ")))
        }
    }

    /// Copy keeping only generators for which `keep` returns true.
    pub fn with_generators(&self, keep: impl Fn(&Generator) -> bool) -> GridModel {
        let mut m = self.clone();
        m.generators.retain(|g| keep(g));
        m
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Warning,
    Error,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Finding {
    pub severity: Severity,
    pub message: String,
}

impl Finding {
    fn error(message: impl Into<String>) -> Self {
        Self {
            severity: Severity::Error,
            message: message.into(),
        }
    }

    fn warning(message: impl Into<String>) -> Self {
        Self {
            severity: Severity::Warning,
            message: message.into(),
        }
    }
}

impl fmt::Display for Finding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.severity {
            Severity::Warning => "warning",
            Severity::Error => "error",
        };
        write!(f, "{tag}: {}", self.message)
    }
}

/// Structural errors and range warnings for a grid model. Never fails.
pub fn validate(model: &GridModel) -> Vec<Finding> {
    let mut out = Vec::new();
    let index = model.bus_index();

    if model.buses.is_empty() {
        out.push(Finding::error("model has no buses"));
    }
    if index.len() != model.buses.len() {
        out.push(Finding::error("duplicate bus ids"));
    }
    if !(model.system_base_mva > 0.0) {
        out.push(Finding::error("system_base_mva must be positive"));
    }
    if !(model.nominal_frequency_hz > 0.0) {
        out.push(Finding::error("nominal_frequency_hz must be positive"));
    }
    if model.generators.is_empty() {
        out.push(Finding::error("model has no generators"));
    }

    let mut gen_ids = BTreeSet::new();
    for g in &model.generators {
        if !gen_ids.insert(g.id.as_str()) {
            out.push(Finding::error(format!("duplicate generator id {}", g.id)));
        }
        if !index.contains_key(&g.bus) {
            out.push(Finding::error(format!(
                "generator {} references unknown bus {}",
                g.id, g.bus
            )));
        }
        if !(g.rating_mva > 0.0) {
            out.push(Finding::error(format!("generator {} rating must be positive", g.id)));
        }
        if !(g.h_s > 0.0) {
            out.push(Finding::error(format!("generator {} inertia must be positive", g.id)));
        }
        if !(g.d_pu >= 0.0) {
            out.push(Finding::error(format!("generator {} damping must be non-negative", g.id)));
        }
        if !(g.xd_prime_pu > 0.0) {
            out.push(Finding::error(format!(
                "generator {} transient reactance must be positive",
                g.id
            )));
        }
        if !(g.v_setpoint_pu > 0.0) {
            out.push(Finding::error(format!(
                "generator {} voltage setpoint must be positive",
                g.id
            )));
        }
        if g.h_s > 0.0 && !(TYPICAL_H_RANGE.0..=TYPICAL_H_RANGE.1).contains(&g.h_s) {
            out.push(Finding::warning(format!(
                "generator {}: inertia outside typical range ({} s not in [{}, {}] s)",
                g.id, g.h_s, TYPICAL_H_RANGE.0, TYPICAL_H_RANGE.1
            )));
        }
        if g.d_pu >= 0.0 && !(TYPICAL_D_RANGE.0..=TYPICAL_D_RANGE.1).contains(&g.d_pu) {
            out.push(Finding::warning(format!(
                "generator {}: damping outside typical range ({} pu not in [{}, {}] pu)",
                g.id, g.d_pu, TYPICAL_D_RANGE.0, TYPICAL_D_RANGE.1
            )));
        }
    }

    for (k, l) in model.lines.iter().enumerate() {
        for end in [l.from, l.to] {
            if !index.contains_key(&end) {
                out.push(Finding::error(format!("line {k} references unknown bus {end}")));
            }
        }
        if l.from == l.to {
            out.push(Finding::error(format!("line {k} is a self-loop on bus {}", l.from)));
        }
        if !(l.x_pu > 0.0) {
            out.push(Finding::error(format!("line {k} reactance must be positive")));
        }
    }

    for (k, l) in model.loads.iter().enumerate() {
        if !index.contains_key(&l.bus) {
            out.push(Finding::error(format!("load {k} references unknown bus {}", l.bus)));
        }
        if !(l.p_pu >= 0.0) {
            out.push(Finding::error(format!("load {k} active power must be non-negative")));
        }
    }

    for b in &model.buses {
        if !model.areas.contains_key(&b.id) {
            out.push(Finding::error(format!("bus {} has no area", b.id)));
        }
    }
    for bus in model.areas.keys() {
        if !index.contains_key(bus) {
            out.push(Finding::error(format!("area map references unknown bus {bus}")));
        }
    }

    if !model.buses.is_empty() && index.len() == model.buses.len() && !is_connected(model, &index) {
        out.push(Finding::error("network graph is disconnected"));
    }

    for (area, gens) in model.generators_by_area() {
        if gens.is_empty() {
            out.push(Finding::warning(format!("area {area} has no generators")));
        }
    }
    out
}

fn is_connected(model: &GridModel, index: &HashMap<u32, usize>) -> bool {
    let n = model.buses.len();
    let mut adj = vec![Vec::new(); n];
    for l in &model.lines {
        if let (Some(&a), Some(&b)) = (index.get(&l.from), index.get(&l.to)) {
            adj[a].push(b);
            adj[b].push(a);
        }
    }
    let mut seen = vec![false; n];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(u) = stack.pop() {
        for &v in &adj[u] {
            if !seen[v] {
                seen[v] = true;
                stack.push(v);
            }
        }
    }
    seen.into_iter().all(|s| s)
}

/// Ground-truth inertia for one area.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AreaInertia {
    /// Seconds on the system base; `None` for an area without generators.
    pub h_system: Option<f64>,
    /// Seconds on the area's own MVA base (sum of its ratings).
    pub h_area_base: Option<f64>,
    /// Damping on the system base.
    pub d_system: Option<f64>,
    pub rating_mva: f64,
}

/// Rating-weighted area inertia: `H_i = sum(H_m * S_m) / S_base`.
pub fn true_area_inertia(model: &GridModel) -> BTreeMap<String, AreaInertia> {
    let base = model.system_base_mva;
    model
        .generators_by_area()
        .into_iter()
        .map(|(area, idx)| {
            let value = if idx.is_empty() {
                AreaInertia {
                    h_system: None,
                    h_area_base: None,
                    d_system: None,
                    rating_mva: 0.0,
                }
            } else {
                let gens = idx.iter().map(|&i| &model.generators[i]);
                let energy: f64 = gens.clone().map(|g| g.h_s * g.rating_mva).sum();
                let damping: f64 = gens.clone().map(|g| g.d_pu * g.rating_mva).sum();
                let rating: f64 = gens.map(|g| g.rating_mva).sum();
                AreaInertia {
                    h_system: Some(energy / base),
                    h_area_base: Some(energy / rating),
                    d_system: Some(damping / base),
                    rating_mva: rating,
                }
            };
            (area, value)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    pub(crate) fn gen(id: &str, bus: u32, s: f64, h: f64) -> Generator {
        Generator {
            id: id.into(),
            bus,
            rating_mva: s,
            h_s: h,
            d_pu: 0.05,
            xd_prime_pu: 0.3,
            p_pu: 0.5,
            v_setpoint_pu: 1.0,
        }
    }

    fn two_area() -> GridModel {
        GridModel {
            buses: vec![Bus { id: 1, base_kv: 230.0 }, Bus { id: 2, base_kv: 230.0 }],
            generators: vec![gen("G1", 1, 100.0, 5.0), gen("G2", 2, 200.0, 4.0)],
            lines: vec![Line { from: 1, to: 2, x_pu: 0.2 }],
            loads: vec![Load { bus: 2, p_pu: 1.0 }],
            areas: [(1, "A".to_string()), (2, "B".to_string())].into_iter().collect(),
            system_base_mva: 100.0,
            nominal_frequency_hz: 60.0,
        }
    }

    #[test]
    fn single_generator_identity() {
        let mut m = two_area();
        m.generators.truncate(1);
        m.areas.insert(2, "A".into());
        let h = true_area_inertia(&m);
        assert_eq!(h["A"].h_system, Some(5.0));
    }

    #[test]
    fn weighted_sum_of_two_generators() {
        let mut m = two_area();
        m.areas.insert(2, "A".into());
        m.generators = vec![gen("G1", 1, 100.0, 4.0), gen("G2", 2, 300.0, 6.0)];
        m.system_base_mva = 400.0;
        let h = true_area_inertia(&m);
        assert!((h["A"].h_system.unwrap() - 5.5).abs() < 1e-12);
        assert!((h["A"].h_area_base.unwrap() - 5.5).abs() < 1e-12);
    }

    #[test]
    fn empty_area_is_absent_not_zero() {
        let mut m = two_area();
        m.generators.truncate(1);
        let h = true_area_inertia(&m);
        assert_eq!(h["B"].h_system, None);
        assert!(validate(&m).iter().any(|f| f.message.contains("no generators")));
    }

    #[test]
    fn well_formed_model_has_no_findings() {
        assert!(validate(&two_area()).is_empty());
    }

    #[test]
    fn low_inertia_is_a_warning() {
        let mut m = two_area();
        m.generators[0].h_s = 0.5;
        let f = validate(&m);
        assert_eq!(f.len(), 1);
        assert_eq!(f[0].severity, Severity::Warning);
        assert!(f[0].message.contains("inertia outside typical range"));
        assert!(m.check().is_ok());
    }

    #[test]
    fn dangling_line_is_structural() {
        let mut m = two_area();
        m.lines.push(Line { from: 1, to: 9, x_pu: 0.1 });
        let f = validate(&m);
        assert!(f.iter().any(|f| f.severity == Severity::Error && f.message.contains("unknown bus 9")));
        assert!(m.check().is_err());
    }

    #[test]
    fn disconnected_graph_is_structural() {
        let mut m = two_area();
        m.lines.clear();
        assert!(validate(&m).iter().any(|f| f.message.contains("disconnected")));
    }

    #[test]
    fn bus_without_area_is_structural() {
        let mut m = two_area();
        m.areas.remove(&2);
        assert!(m.check().is_err());
    }

    #[test]
    fn area_order_follows_bus_list() {
        let mut m = two_area();
        m.buses.reverse();
        assert_eq!(m.area_ids(), vec!["B".to_string(), "A".to_string()]);
    }

    proptest! {
        #[test]
        fn splitting_a_generator_preserves_area_inertia(
            s in 10.0f64..1000.0, h in 1.0f64..10.0, which in 0usize..2
        ) {
            let mut m = two_area();
            m.generators[which].rating_mva = s;
            m.generators[which].h_s = h;
            let before = true_area_inertia(&m);
            let mut half_a = m.generators[which].clone();
            half_a.rating_mva = s / 2.0;
            let mut half_b = half_a.clone();
            half_b.id.push_str("_b");
            m.generators[which] = half_a;
            m.generators.push(half_b);
            let after = true_area_inertia(&m);
            for (area, v) in &before {
                let a = v.h_system.unwrap();
                let b = after[area].h_system.unwrap();
                prop_assert!((a - b).abs() <= 1e-12 * a.abs());
            }
        }

        #[test]
        fn area_sum_equals_system_aggregate(
            hs in proptest::collection::vec(1.0f64..10.0, 2),
            ss in proptest::collection::vec(10.0f64..900.0, 2),
        ) {
            let mut m = two_area();
            for (g, (h, s)) in m.generators.iter_mut().zip(hs.iter().zip(&ss)) {
                g.h_s = *h;
                g.rating_mva = *s;
            }
            let per_area: f64 = true_area_inertia(&m).values().filter_map(|a| a.h_system).sum();
            let whole: f64 = m.generators.iter().map(|g| g.h_system(m.system_base_mva)).sum();
            prop_assert!((per_area - whole).abs() <= 1e-12 * whole);
        }
    }
}

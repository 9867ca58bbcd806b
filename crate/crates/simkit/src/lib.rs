//! Classical multi-machine swing-equation simulator.
//!
//! Generators are constant EMFs behind transient reactance, loads are
//! constant impedances fixed at the solved pre-disturbance operating point,
//! and the network is Kron-reduced onto the generator internal nodes. The
//! per-machine dynamics are
//!
//! ```text
//! d(delta_m)/dt = w_s * dw_m
//! 2 H_m S_m / S_base * d(dw_m)/dt = P_m - P_e,m - D_m S_m / S_base * dw_m
//! ```
//!
//! integrated with fixed-step RK4. Results are sampled at a PMU-like rate
//! and reduced to per-area centre-of-inertia speed and electrical power
//! deviations.

mod error;
pub mod measure;
pub mod network;
pub mod sim;

pub use error::{Result, SimError};
pub use measure::{compute_area_coi, extract_area_dataset};
pub use network::{kron_reduce, solve_operating_point, OperatingPoint, ReducedNetwork};
pub use sim::{simulate, simulate_reduced, SimulationResult, StepPlan, MAX_INTERNAL_STEP_S};

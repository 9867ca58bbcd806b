//! Area inertia from an identified tie-line-power to COI-speed model.
//!
//! Each area is identified as a low-order SISO state-space model by
//! subspace identification, its unit-step response is fitted with a
//! polynomial, and the inertia is read from the initial slope
//! `c1 = -1 / (2 H)`.

mod error;
mod estimate;
mod n4sid;
mod poly;
mod step;

pub use error::{Result, SysIdError};
pub use estimate::{estimate, estimate_area};
pub use n4sid::{horizon_rows, identify, identify_with, ContinuousModel, IdentifyOptions, IdentifiedModel};
pub use poly::{fit_polynomial, PolynomialFit};
pub use step::step_response;

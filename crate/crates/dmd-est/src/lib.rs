//! Area inertia from an exact dynamic mode decomposition of the stacked
//! area speed and power signals.
//!
//! The snapshot matrix holds all area COI speed deviations followed by all
//! area power deviations. Its DMD modes, continuous eigenvalues and
//! amplitudes turn the incremental swing equation into a 2x2 real system
//! per area, solved for `(2H, D)` with `0 <= D <= 1`.

mod error;
mod estimate;
mod model;

pub use error::{DmdError, Result};
pub use estimate::{anchor_index, estimate, solve_area, AreaSolution, MAX_DAMPING};
pub use model::{build_snapshots, fit, DmdModel, Reconstruction, ZERO_EIGENVALUE_TOL};

//! Area inertia from the electromechanical oscillation content of the area
//! speed and power signals.
//!
//! The incremental swing equation `2H dw/dt + D w + P = 0` holds bin by bin
//! in the Fourier domain. Summing it over the band `(0, B]` and splitting
//! real and imaginary parts gives two real equations in `H` and `D`;
//! eliminating `D` yields the inertia, and `D` follows by back-substitution.

mod error;
mod estimate;

pub use error::{OscError, Result};
pub use estimate::{band_sums, estimate, estimate_area, BandSums, OscSolution, MIN_BINS_IN_BAND};

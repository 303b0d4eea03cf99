//! Exact matrix multiplication by packing rows and columns into long decimal
//! scalars, multiplying once per output cell (or once per block at each
//! recursion level), and slicing the results back out with floor and modulo.
//!
//! The crate has five layers:
//!
//! * [`apfixed`]: arbitrary-precision decimals with an explicit fraction scale
//!   and truncating multiplication, the number domain the packing runs on.
//! * [`matrix`]: dense integer matrices with a declared per-entry digit
//!   budget, plus text I/O and seeded random generation.
//! * [`packmul`]: the packed engines (flat rank-1, recursive block,
//!   digit-decomposed fixed point, signed offset) and exponent sizing.
//! * [`baselines`]: classical, recursive block and Strassen reference
//!   engines with textbook operation counts.
//! * [`costmodel`]: operation tallies, closed-form and recurrence predictors,
//!   digit-requirement sizing, machine-model pricing and CSV reporting.

pub mod apfixed;
pub mod baselines;
pub mod costmodel;
pub mod matrix;
pub mod packmul;
pub mod samples;

pub use apfixed::{ApfixedError, BigUint, PackedNumber};
pub use costmodel::{CostReport, DigitMeter, MachineModel, OpCount};
pub use matrix::{IntMatrix, MatrixError, SignedMatrix};
pub use packmul::{EpsilonSchedule, FixedPointMatrix, PackMulError, VerifyOutcome};

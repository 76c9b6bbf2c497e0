//! Process exit codes.

pub const OK: i32 = 0;
/// Solver did not converge, or output could not be written.
pub const FAILED: i32 = 1;
pub const NONEXISTENCE: i32 = 2;
pub const OUTSIDE_THEORY: i32 = 3;
pub const USAGE: i32 = 64;
pub const NO_INPUT: i32 = 66;

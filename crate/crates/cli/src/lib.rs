//! Command-line front end for `hartree-core`: parameter classification,
//! ground-state solves and parameter sweeps.

pub mod check;
pub mod config;
pub mod exit;
pub mod solve;
pub mod sweep;

//! Positive ground states of the two-component Hartree/Choquard system
//!
//! ```text
//! -Δu + u = 2p/(p+q) (I_α ∗ |v|^q) |u|^{p-2} u
//! -Δv + v = 2q/(p+q) (I_α ∗ |u|^p) |v|^{q-2} v      in R^N,  N ≤ 3,
//! ```
//!
//! computed by Sobolev-gradient descent on the energy with exact Nehari
//! reprojection, plus the machinery to check what the theory predicts about
//! them: parameter classification, rearrangement inequalities, the Pohozaev
//! identity, radial symmetry and asymptotic decay.

pub mod diagnostics;
pub mod error;
mod fft;
pub mod functional;
pub mod grid;
pub mod params;
mod quad;
pub mod rearrange;
pub mod riesz;
pub mod solver;

pub use error::{Error, Result};
pub use functional::{EnergyBreakdown, Functional, StatePair};
pub use grid::{Field, GridSpec};
pub use params::ProblemParams;
pub use riesz::RieszPlan;
pub use solver::{solve, Init, SolveConfig, SolveReport, Solver};

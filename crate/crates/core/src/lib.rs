//! Ground states of trapped Bose–Einstein condensates and the Shannon
//! information entropy of their position and momentum densities.
//!
//! The pipeline for one particle number `N`:
//!
//! 1. [`gpe::solve_ground_state`] finds the Gross–Pitaevskii ground state on a
//!    [`radial::RadialGrid`];
//! 2. [`momentum::to_momentum`] produces the normalized pair `ρ(r)`, `n(k)`;
//! 3. [`entropy::EntropyReport::from_pair`] computes `S_r`, `S_k`, their sum,
//!    the kinetic energy and mean square radius, the six entropic bounds and
//!    Landsberg's order parameter.
//!
//! [`scaling`] repeats this over many `N`, fits `S = a + b ln N` and audits the
//! inequality chains; [`report`] and [`ingest`] handle files.

pub mod config;
pub mod entropy;
pub mod error;
pub mod gpe;
pub mod ingest;
pub mod momentum;
pub mod radial;
pub mod report;
pub mod scaling;

pub use entropy::{EntropyReport, EurBounds};
pub use error::{Error, Result};
pub use gpe::{CondensateState, TrapSpec};
pub use momentum::{DensityPair, MomentumGrid};
pub use radial::{RadialFunction, RadialGrid};
pub use scaling::{LogLawFit, SweepResult};

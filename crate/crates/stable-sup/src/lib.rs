//! Simulation and verification toolkit for the joint law of an α-stable
//! process and its running supremum.
//!
//! The library is organised around one sampling scheme and one identity. The
//! scheme represents the supremum and the gap to the endpoint over a stick
//! breaking of the time horizon, truncated after n sticks with an explicit
//! remainder term; the identity is an integration by parts on the noise space
//! of that representation, which turns derivatives of the joint distribution
//! function into expectations of explicit polynomial weights. Together they
//! give unbiased-in-the-limit Monte Carlo estimators for the joint density and
//! its partial derivatives, with geometric level decay.
//!
//! Modules:
//! - [`params`], [`stable`]: parameter validation and exact marginal sampling.
//! - [`stick`]: stick-breaking paths and moment formulas.
//! - [`chi`]: the truncated representation at a given level, built on a
//!   replayable noise record.
//! - [`weights`]: exact symbolic computation of the iterated
//!   integration-by-parts weights, and their evaluation.
//! - [`estimator`]: the telescoping multilevel density estimator.
//! - [`bounds`]: closed-form density and tail bounds.
//! - [`oracles`]: quadrature- and simulation-backed checks of every moment
//!   formula, inequality, and rate the other modules rely on.
//! - [`verify`]: named check suites with machine-readable reports.
//! - [`run`]: the command-line front end (configuration, CSV/JSON output).

pub mod bounds;
pub mod chi;
pub mod error;
pub mod estimator;
pub mod gamma;
pub mod oracles;
pub mod params;
pub mod quad;
pub mod rng;
pub mod run;
pub mod stable;
pub mod stats;
pub mod stick;
pub mod verify;
pub mod weights;

pub use error::{Error, Result};
pub use params::StableParams;

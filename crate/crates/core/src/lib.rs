//! Follow-the-Regularized-Leader and Multiplicative Weights dynamics on network
//! zero-sum games.
//!
//! The crate covers four layers:
//!
//! * [`game`]: network zero-sum games with float or exact rational payoffs,
//!   Nash verification and a small support-enumeration solver.
//! * [`learning`]: regularizers, mirror maps, and the deterministic and
//!   stochastic update rules together with a seeded trajectory runner.
//! * [`divergences`] and [`markov`]: Bregman/KL/Fenchel diagnostics, the exact
//!   dual-space chain (enumeration, kernels, return paths) and the primal
//!   kernel of stochastic MWU.
//! * [`metrics`]: time averages, regret, power-law regret fits, occupancy
//!   heatmaps and the regret-growth experiment suite.
//!
//! [`io`] holds the file formats and [`commands`] the drivers used by the
//! `sftrl` binary.

pub mod commands;
pub mod divergences;
pub mod error;
pub mod game;
pub mod io;
pub mod learning;
pub mod markov;
pub mod metrics;
pub mod numeric;

pub use error::{Error, Result};
pub use game::{MixedProfile, NetworkGame, PureProfile};

pub use learning::{DynamicsConfig, Mode, Regularizer, Trajectory};
pub use numeric::{Matrix, Rational, Scalar};

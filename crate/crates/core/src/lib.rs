//! Secure interference alignment for multiuser MIMO interference channels
//! with an eavesdropper.
//!
//! The library designs transmit precoders and receive subspaces that confine
//! both the inter-user interference and the signal observed by an
//! eavesdropper into subspaces of minimal dimension, while the desired
//! signal keeps its full spatial dimension. Rank objectives are relaxed to
//! nuclear norms (plain or iteratively reweighted) and solved by coordinate
//! descent over the precoder and receiver blocks; each convex subproblem is
//! handled by an operator-splitting solver ([`solver`]).
//!
//! Main entry points:
//! - [`system::SystemConfig`], [`system::ChannelSet`]: dimensions and
//!   Rayleigh channel draws.
//! - [`nn::run`] / [`rnn::run`]: the two alignment algorithms.
//! - [`baseline::run_min_leakage_ia`]: conventional (security-oblivious)
//!   interference alignment for comparison.
//! - [`metrics::secrecy_sum_rate`]: per-user rates, leakage rates and the
//!   secrecy sum rate.
//! - [`experiment::run_experiment`]: the Monte-Carlo SNR-sweep harness
//!   behind the `secia` CLI.

pub mod alignment;
pub mod baseline;
pub mod error;
pub mod experiment;
pub mod linalg;
pub mod metrics;
pub mod nn;
pub mod plot;
pub mod rng;
pub mod rnn;
pub mod solver;
pub mod subproblems;
pub mod system;

pub use error::{Error, Result};
pub use linalg::CMat;
pub use system::{ChannelSet, PrecoderSet, PropernessReport, ReceiverSet, SystemConfig};

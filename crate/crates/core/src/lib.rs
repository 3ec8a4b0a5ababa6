//! Weighted-sum energy efficiency (WSEE) maximization for uplink
//! user-centric cell-free massive MIMO.
//!
//! The crate is organized bottom-up:
//! * [`scenario`] draws network realizations and computes estimate statistics,
//! * [`metrics`] evaluates the closed-form SINR/SE/EE and the optimal LSFD combiner,
//! * [`fp`] holds the fractional-programming auxiliaries and surrogates,
//! * [`optimizer`] runs the alternating-optimization algorithms,
//! * [`runner`] drives seeded Monte-Carlo campaigns and writes reports.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod fp;
pub mod metrics;
pub mod model;
pub mod optimizer;
pub mod props;
pub mod rng;
pub mod runner;
pub mod scenario;

pub use error::{Error, Result};
pub use metrics::{AffineSinr, Evaluation, LsfdMatrix, PowerVector, SinrParts};
pub use model::SystemModel;
pub use optimizer::{Algorithm, SolveOptions, SolverState};
pub use runner::{CampaignConfig, CampaignReport};
pub use scenario::{ChannelStatistics, NetworkScenario, SimConfig, UeProfile};

//! Distribution feeder simulator for studying EV charging impact on cable
//! and transformer loading.
//!
//! The pipeline is: a [`network::Network`] is loaded (or the bundled campus
//! benchmark is built), per-interval injections are assembled from normalized
//! profiles and a [`scenario::Scenario`], an AC power flow is solved, and
//! branch loadings are binned into a [`congestion::CongestionHistogram`].

// `!(x >= 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod benchmark;
pub mod cli;
pub mod congestion;
pub mod error;
pub mod io;
pub mod network;
pub mod powerflow;
pub mod scenario;

pub use error::{Error, Result};

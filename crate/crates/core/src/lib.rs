//! Drop-based Monte-Carlo simulator of outdoor and outdoor-to-indoor downlink
//! coverage on a dense urban street grid.
//!
//! The pipeline is: build the [`grid::World`] and place sites, compute per-site
//! street path gains ([`sim::StreetPgMap`]), combine five candidate paths into
//! every indoor location, then turn received powers into SNR, SINR, outage and
//! rate statistics ([`sim::run_drops`]) or a single-instant coverage map
//! ([`sim::snapshot_heatmap`]).

// `!(x > 0.0)` is used on purpose so NaN inputs are rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod export;
pub mod fading;
pub mod grid;
pub mod link;
pub mod o2i;
pub mod propagation;
pub mod sim;

pub use config::{load_config, preset, ScenarioConfig};
pub use sim::{run_drops, snapshot_heatmap, CoverageResult, Deployment};

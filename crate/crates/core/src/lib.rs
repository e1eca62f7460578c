//! Deterministic simulator and multi-objective optimizer for RIS deployments
//! in a planar integrated sensing and communication (ISAC) scenario.
//!
//! A base station serves a legitimate user (Bob) and illuminates a sensing
//! target while an eavesdropper (Eve) listens. Each candidate RIS deployment
//! `{x, y, θ, N, α}` is scored on SNR at Bob, the Bob–Eve security gap and
//! the RIS sensing gain at the target, using seeded stochastic channels.
//!
//! - [`scenario`]: geometry, physical parameters, JSON config files
//! - [`channel`]: path loss, Rician multi-tap fading, AR(1) frame evolution
//! - [`ris`]: alignment, reflection gain, cascaded channel, ISAC weights
//! - [`metrics`]: per-candidate SNRs, security gap, sensing gain
//! - [`objective`]: min-max normalization and scalarization
//! - [`optimizer`]: coarse-to-fine elite search and exhaustive grid oracle
//! - [`heatmap`]: position sweeps and CSV export
//! - [`cli`]: the `ris-isac` command-line tool

pub mod channel;
pub mod cli;
pub mod error;
pub mod heatmap;
pub mod metrics;
pub mod objective;
pub mod optimizer;
pub mod ris;
pub mod rng;
pub mod scenario;

pub use error::{Error, Result};
pub use heatmap::{sweep_grid, FixedParams, MetricGrid, MetricKind};
pub use metrics::{evaluate_candidate, MetricBundle};
pub use optimizer::{exhaustive_grid, iterative_search, OptimizationResult, SearchParams};
pub use ris::RisConfig;
pub use scenario::{load_config, save_config, Point2D, ScenarioConfig};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

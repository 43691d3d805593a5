//! Batch frequency sweeps over the `cylscat` error predictor and BEM solver:
//! configuration, CSV output, slope summaries and gnuplot scripts.

pub mod config;
pub mod error;
pub mod plots;
pub mod summary;
pub mod sweep;

pub use config::{Args, EngineChoice, Quantity, SweepConfig};
pub use error::CliError;
pub use plots::emit_plots;
pub use summary::Summary;
pub use sweep::{run_sweep, SweepRow};

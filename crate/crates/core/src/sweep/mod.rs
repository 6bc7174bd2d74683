//! Config files, figure presets, sweep execution, CSV output and plots.

pub mod config;
pub mod manifest;
pub mod plot;
pub mod preset;
pub mod run;
pub mod table;

pub use config::{emit_config, parse_config, read_config};
pub use manifest::{Manifest, ManifestRun, RunStatus};
pub use plot::{emit_plot, write_plot};
pub use preset::{preset, SweepParam, SweepPlan, PRESET_IDS};
pub use run::{replay, run_sweep, run_sweep_with, SweepReport};
pub use table::TrajectoryTable;

//! Harness around the simulation core: configuration files, figure presets,
//! deterministic parallel sweeps, CSV/JSON export and the `arpsim` CLI.

pub mod cli;
pub mod config;
pub mod error;
pub mod export;
pub mod preset;
pub mod sweep;

pub use config::{DressedConfig, Propagator, SweepConfig, SweepParam};
pub use error::{HarnessError, Result};
pub use export::Format;
pub use preset::{preset, Preset, PRESET_NAMES};
pub use sweep::{run_sweep, run_sweep_with, PointOutcome, SweepResult};

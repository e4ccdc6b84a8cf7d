//! Scenario configuration, figure presets, dispatch and export.

pub mod config;
pub mod output;
pub mod presets;
mod run;

pub use config::{parse_config, Amplitude, OutputFormat, RawConfig, ScenarioConfig, Task};
pub use output::{render, render_csv, render_json, write_atomic, Table};
pub use presets::{presets, select, FigurePreset};
pub use run::{execute, reproduce_figure, run_scenario, Outcome, CROSSCHECK_TOLERANCE};

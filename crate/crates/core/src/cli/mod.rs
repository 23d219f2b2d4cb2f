//! Run configuration, output files and the commands behind the `cpt-cell` tool.

pub mod commands;
pub mod config;
pub mod csv;
pub mod figures;
pub mod manifest;

pub use commands::{
    cmd_scan, cmd_spectrum, cmd_validate, cmd_velocity_select, oracle_cross_check, with_workers, Outcome,
    SelectionCurve, ValidationReport,
};
pub use config::RunConfig;
pub use figures::{bundled_config, reproduce, reproduce_with, FigureReport, FIGURES};
pub use manifest::RunManifest;

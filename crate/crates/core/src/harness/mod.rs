//! Command implementations behind the `gebayes` executable.

mod data;
mod diagnose;
mod fit;
mod sample_file;
mod simulate;

pub use data::{bearings, load_dataset, parse_dataset, BEARINGS};
pub use diagnose::{cmd_diagnose, ChainDiagnostics, DiagnoseReport};
pub use fit::{cmd_fit, FitConfig, FitReport, MethodEstimate, PointEstimator};
pub use sample_file::{cmd_sample, read_sample_file, write_sample_file, SampleFile, SampleSummary};
pub use simulate::{
    cell_seed, run_cell, run_simulation, simulation_csv, SimCellResult, SimConfig, SIM_CSV_HEADER,
};

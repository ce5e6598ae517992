//! Monte Carlo experiments: calibration, OTA averaging, sweeps and output.

mod config;
mod oracle_check;
mod ota;
mod output;
mod sweep;

pub use config::{default_schemes, parse_schemes, ExperimentConfig, Scheme};
pub use oracle_check::{oracle_check, OracleReport, MATCH_TOLERANCE};
pub use ota::{
    calibrate_snr, resolve_link_gains, run_ota, run_scheme, run_tas, LinkGains, OtaResult,
    RealizationOutcome, SNR_DEFINITION,
};
pub use output::{emit_dat, emit_results, render_csv, render_metadata, CSV_HEADER};
pub use sweep::{simulate, sweep, SweepAxis, SweepRow, SweepTable};

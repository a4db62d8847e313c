//! Command-line front end for `wqed-core`: spectra, occupations, bound
//! states, figure data, wavepacket runs and the verification suite.

pub mod app;
pub mod args;
pub mod commands;
pub mod error;
pub mod figures;
pub mod output;
pub mod settings;
pub mod verify;

pub use app::{configure, run};
pub use error::CliError;
pub use settings::RunConfig;

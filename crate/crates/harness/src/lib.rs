//! Experiment engine around `irsnoma-core`: scenario files, Monte Carlo
//! sweeps, approximation validation, and CSV reporting.

pub mod experiments;
pub mod report;
pub mod scenario;

//! Experiment runner: the acceptance battery and versioned reports.

pub mod commands;
pub mod report;
pub mod suite;

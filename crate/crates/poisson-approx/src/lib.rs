//! Command-line interface, JSON/CSV output and parallel sweeps on top of
//! `poisson-approx-core`.

pub mod cli;
pub mod output;
pub mod parallel;

pub use cli::{run, RunOutput};
pub use output::OutputEnvelope;

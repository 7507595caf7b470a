//! File formats, experiment runner and plot tables on top of [`gsar_core`].

pub mod config;
pub mod error;
pub mod experiment;
pub mod formats;
pub mod plot;
pub mod ply;

pub use error::{Error, Result};
pub use gsar_core as core;

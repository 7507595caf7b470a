//! Skeleton-driven semantic communication for holographic avatars.
//!
//! The crate is `no_std` with `alloc`. File formats, configuration and the
//! command line live in the `gsar` companion crate.

#![no_std]

extern crate alloc;

pub mod channel;
pub mod error;
pub mod keypoints;
pub mod metrics;
pub mod nn;
pub mod pipeline;
pub mod pointcloud;
pub mod recovery;
pub mod rotation;
pub mod scene;
pub mod semantics;
pub mod skeleton;
pub mod trace;

pub use error::{Error, Result};

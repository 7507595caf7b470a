use alloc::string::String;
use alloc::vec::Vec;

use crate::skeleton::GraphViolation;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid skeleton graph: {}", fmt_violations(.0))]
    InvalidGraph(Vec<GraphViolation>),

    #[error("{what}: expected {expected} entries, found {found}")]
    LengthMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("insufficient frames: need at least {needed}, got {found}")]
    InsufficientFrames { needed: usize, found: usize },

    #[error("node {0} is not part of the skeleton")]
    UnknownNode(usize),

    #[error("cannot select {target} points from a cloud of {available}")]
    InvalidTarget { target: usize, available: usize },

    #[error("need at least {needed} points, got {found}")]
    TooFewPoints { needed: usize, found: usize },

    #[error("empty cloud")]
    EmptyCloud,

    #[error("subchannel {subchannel} requested for item {item}, channel has {available}")]
    UnknownSubchannel {
        item: usize,
        subchannel: usize,
        available: usize,
    },

    #[error("channel has no subchannels")]
    EmptyChannel,

    #[error("ranking did not converge after {iterations} iterations")]
    NotConverged { iterations: usize, last: Vec<f64> },

    #[error("E-GSAR requires skeleton graph")]
    MissingSkeleton,

    #[error("framework mismatch: {0}")]
    FrameworkMismatch(String),

    #[error("configuration error: {0}")]
    Config(String),
}

fn fmt_violations(v: &[GraphViolation]) -> String {
    use core::fmt::Write;
    let mut s = String::new();
    for (i, x) in v.iter().enumerate() {
        if i > 0 {
            s.push_str("; ");
        }
        let _ = write!(s, "{x}");
    }
    s
}

pub type Result<T, E = Error> = core::result::Result<T, E>;

use thiserror::Error;

/// Errors produced by construction, configuration and simulation.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid polynomial {poly:#o}: {reason}")]
    InvalidPolynomial { poly: u32, reason: &'static str },

    #[error("no circulation state exists for block length {n}")]
    NoCirculationState { n: usize },

    #[error("permutation is not bijective: index {index} {reason}")]
    NonBijective { index: usize, reason: &'static str },

    #[error("permutation file, line {line}: {reason}")]
    PermFile { line: usize, reason: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("node {to} unreachable from node {from}")]
    Unreachable { from: usize, to: usize },

    #[error("deadlock: no packet moved for {stagnant} cycles at cycle {cycle} with {in_flight} packets in flight")]
    Deadlock {
        cycle: u64,
        stagnant: u64,
        in_flight: usize,
    },

    #[error("duplicate delivery to node {node}, address {addr} within one half iteration")]
    DuplicateDelivery { node: usize, addr: usize },

    #[error("throughput undefined: zero cycles per iteration")]
    ZeroCycles,

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

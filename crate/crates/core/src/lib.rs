//! Bit-exact, cycle-accurate simulation of parallel turbo decoders that
//! exchange extrinsic values over a network-on-chip.
//!
//! The crate is organized bottom-up:
//! - [`codes`]: constituent convolutional codes, trellises, encoders.
//! - [`interleave`]: interleavers and the node/address exchange mapping.
//! - [`llr_codec`]: extrinsic representations and their packed encodings.
//! - [`abr`]: the send/suppress rule for adaptive bandwidth reduction.
//! - [`siso`]: the fixed-point soft-input soft-output kernel.
//! - [`noc`]: topologies, routing and the cycle-level router model.
//! - [`decoder`]: the iterative decoder tying SISO workers to the exchange.
//! - [`harness`]: channel model, Monte Carlo runs, throughput accounting.

pub mod abr;
pub mod codes;
pub mod decoder;
pub mod error;
pub mod harness;
pub mod interleave;
pub mod llr_codec;
pub mod noc;
pub mod siso;

pub use abr::AbrConfig;
pub use codes::{BinaryCodeword, Code, CodeKind, DuobinaryCodeword, Edge, Trellis};
pub use decoder::{
    ChannelLlrs, Decoder, DecoderConfig, ExchangeKind, FrameResult, LlrMode, NocParams,
};
pub use error::{Error, Result};
pub use harness::{
    run_ber, run_ber_point, run_throughput, run_throughput_sweep, BerOptions, BerPoint, Channel,
    CodePreset, Exchange, RunConfig, SweepGrid, ThroughputOptions, ThroughputRow,
};
pub use interleave::{ExchangeMap, Permutation};
pub use llr_codec::{BitLlr, Payload, PfpWord, SymbolLlr};
pub use siso::{DecodeMode, Siso, SliceIn, SliceOut};

//! Belief-propagation decoding of binary linear codes with optional
//! trainable per-edge weights.
//!
//! The crate covers the full experimental loop for weighted decoders on
//! high-density parity-check codes:
//!
//! - [`code_graph`]: alist I/O, BCH construction, Tanner graphs and the
//!   unrolled decoding trellis;
//! - [`channel`]: BPSK over AWGN, LLR computation, seeded batch sampling;
//! - [`bp`]: the plain flooding sum-product decoder;
//! - [`neural`]: the weighted decoder, its exact reverse-mode gradients,
//!   losses, checkpoints and weight statistics;
//! - [`trainer`]: RMSProp mini-batch training on zero-codeword data;
//! - [`evaluator`]: Monte-Carlo BER/FER sweeps, an exhaustive
//!   maximum-likelihood oracle for small codes, decoder comparison and the
//!   codeword-independence audit.
//!
//! Everything is deterministic given the seeds: reductions run in fixed
//! orders and all randomness flows through ChaCha8 streams.

pub mod bp;
pub mod channel;
pub mod code_graph;
mod error;
pub mod evaluator;
pub mod neural;
pub mod trainer;

pub use error::{AlistErrorKind, Error, Result};

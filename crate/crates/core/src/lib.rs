//! Learned channel codes for the real-valued AWGN channel.
//!
//! The crate trains (k-bit → n-symbol) encoder/decoder pairs built from small
//! dense networks, then benchmarks the learned codebooks against
//! maximum-likelihood decoding and the extended Hamming (8,4) code.
//!
//! Module map:
//!
//! - [`nn`]: dense layer stacks, exact reverse-mode gradients and Adam.
//! - [`channel`]: Eb/N0 conversion, Gaussian noise, transmit-power normalization.
//! - [`losses`]: cross-entropy, mutual-information estimates, distance surrogates,
//!   power penalty, and their composition into one training cost.
//! - [`models`]: single and twin encoders, the softmax decoder, codebook export.
//! - [`training`]: fixed-SNR, composite-loss, twin and randomized-SNR training.
//! - [`baselines`]: Hamming (8,4), ML decoding, the classical union bound.
//! - [`evaluation`]: Monte Carlo BLER/BER and pairwise-distance statistics.
//! - [`config`], [`io`], [`cli`]: experiment files and the command-line front end.

pub mod baselines;
pub mod channel;
pub mod cli;
pub mod config;
pub mod error;
pub mod evaluation;
pub mod io;
pub mod losses;
pub mod message;
pub mod models;
pub mod nn;
pub mod rng;
pub mod training;

pub use error::{Error, Result};

//! Polar coding toolkit for decoding-latency studies.
//!
//! The crate bundles:
//!
//! - [`code`]: polar code definition, encoding, and decode-tree geometry;
//! - [`construction`]: information-set design via Gaussian-approximation
//!   density evolution;
//! - [`decoder`]: SC and SC-list decoders with fast Rate-0/Rate-1 subtree
//!   handling;
//! - [`latency`]: the clock-cycle cost model of list decoding over the
//!   pruned tree, with rate sweeps;
//! - [`mlc`]: M-ASK bit-level mutual informations, per-level code design,
//!   and the aggregate multistage decoding cost;
//! - [`sim`]: a Monte-Carlo AWGN harness validating the decoders end to end.
//!
//! # Example
//!
//! ```
//! use polar_mlc::{construction::construct_code, decoder::scl_decode, encode};
//! use polar_mlc::latency::tc_code;
//!
//! // A (16, 8) code designed for 1 dB, encoded and list-decoded.
//! let code = construct_code(4, 8, 1.0)?;
//! let mut u = vec![0u8; 16];
//! for (i, bit) in code.info_set().iter().zip([1u8, 0, 1, 1, 0, 0, 1, 0]) {
//!     u[i - 1] = bit;
//! }
//! let x = encode(&u, &code)?;
//! let llr: Vec<f64> = x.iter().map(|&b| if b == 0 { 8.0 } else { -8.0 }).collect();
//! let decoded = scl_decode(&llr, &code, 4, true)?;
//! assert_eq!(decoded.best.u_hat, u);
//!
//! // Decoding cost of the same code under the cycle model.
//! let cycles = tc_code(&code, 4).total;
//! assert!(cycles >= 4);
//! # Ok::<(), polar_mlc::Error>(())
//! ```

pub mod code;
pub mod construction;
pub mod decoder;
pub mod error;
pub mod latency;
pub mod mlc;
pub mod quadrature;
pub mod sim;

pub use code::{encode, CodeFile, DecodeNode, PolarCode};
pub use error::{Error, Result};

//! ISI-reducing single error correcting codes `C(k, m)` for molecular
//! communication via diffusion, with the absorbing-receiver channel model and
//! a Monte Carlo harness for interference and bit error rate experiments.
//!
//! Code construction and the codec work on exact integers. The channel model
//! is generic over a [`Scalar`] (`f32` or `f64`); the aliases below fix it to
//! double precision.

pub mod bits;
pub mod channel;
pub mod codebook;
pub mod codec;
pub mod error;
pub mod harness;
pub mod scalar;
pub mod scheme;

pub use bits::BitSequence;
pub use codebook::{build_codebook, CodeSpec, Codebook, MinDistance, RateCandidate, RateDesign};
pub use codec::{Codec, EncodedWord, MessageWord, SwapSchedule};
pub use error::{Error, Result};
pub use scalar::Scalar;
pub use scheme::{CodeChoice, LineCode};

pub type ChannelParams = channel::ChannelParams<f64>;
pub type ChannelParams32 = channel::ChannelParams<f32>;
pub type SlotProfile = channel::SlotProfile<f64>;
pub type SlotProfile32 = channel::SlotProfile<f32>;
pub type ChannelConfig = channel::ChannelConfig<f64>;
pub type ReceivedFrame = channel::ReceivedFrame<f64>;

/// Exact rational, used for code rates and bit densities.
pub type Rational = num_rational::Ratio<u64>;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub type ExperimentConfig = harness::ExperimentConfig<f64>;
pub type TrialReport = harness::TrialReport<f64>;

//! Unbounded 3-D diffusion channel with a fully absorbing spherical receiver.

mod analytic;
mod config;
pub(crate) mod sim;

pub use analytic::{
    codeword_isi_bound, expected_isi, expected_stream_isi, hitting_prob, isi_of_sequence,
    isi_sum, reference_isi, slot_probs, swap_gain, SlotProfile,
};
pub use config::ChannelConfig;
pub use sim::{
    calibrate_threshold, detect, simulate_stream, MolecularTransport, ReceivedFrame,
    THRESHOLD_GRID_POINTS,
};

use crate::error::{param, Result};
use crate::scalar::Scalar;

/// Physical and link parameters. Lengths in micrometres, times in seconds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams<T> {
    /// Diffusion coefficient, um^2/s.
    pub diffusion: T,
    /// Receiver radius.
    pub radius: T,
    /// Transmitter to receiver-centre distance.
    pub distance: T,
    /// Slot (sampling) interval.
    pub slot: T,
    /// Channel memory in slots.
    pub memory: usize,
    /// Molecules released per bit-1.
    pub molecules: u64,
    /// Receiver noise variance, molecules^2.
    pub noise_var: T,
}

impl<T: Scalar> ChannelParams<T> {
    /// Geometry and diffusion coefficient used throughout the experiments:
    /// D = 79.4 um^2/s, r = 5 um, r0 = 10 um, L = 40.
    pub fn reference(slot: T, molecules: u64, noise_var: T) -> Self {
        ChannelParams {
            diffusion: T::of(79.4),
            radius: T::of(5.0),
            distance: T::of(10.0),
            slot,
            memory: 40,
            molecules,
            noise_var,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let zero = T::zero();
        if !(self.radius > zero) {
            return param(format!("receiver radius {} must be positive", self.radius));
        }
        if !(self.distance > self.radius) {
            return param(format!(
                "distance {} must exceed receiver radius {}",
                self.distance, self.radius
            ));
        }
        if !(self.diffusion > zero) {
            return param(format!("diffusion coefficient {} must be positive", self.diffusion));
        }
        if !(self.slot > zero) {
            return param(format!("slot interval {} must be positive", self.slot));
        }
        if self.memory == 0 {
            return param("channel memory must be at least one slot");
        }
        if !(self.noise_var >= zero) || !self.noise_var.is_finite() {
            return param(format!("noise variance {} must be finite and >= 0", self.noise_var));
        }
        Ok(())
    }

    pub fn with_molecules(mut self, molecules: u64) -> Self {
        self.molecules = molecules;
        self
    }

    pub fn with_noise_var(mut self, noise_var: T) -> Self {
        self.noise_var = noise_var;
        self
    }
}

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};

use crate::bits::BitSequence;
use crate::error::{param, Error, Result};
use crate::scalar::Scalar;
use crate::scheme::LineCode;

use super::analytic::{slot_probs, SlotProfile};
use super::ChannelParams;

/// Grid size of the threshold sweep in [`calibrate_threshold`].
pub const THRESHOLD_GRID_POINTS: usize = 256;

/// Stream index reserved for the calibration pilot.
const PILOT_STREAM: u64 = u64::MAX;

/// Independent generator for one block of a run.
pub(crate) fn block_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Molecule transport over a finite-memory channel.
///
/// Each bit-1 releases `M` molecules whose absorption slots are one
/// multinomial draw over `(p_1, ..., p_L, 1 - sum p)`, sampled as a chain of
/// conditional binomials. Arrivals for future slots wait in a ring buffer.
#[derive(Debug, Clone)]
pub struct MolecularTransport {
    /// `p_{d+1} / (1 - p_1 - ... - p_d)`.
    conditional: Vec<f64>,
    molecules: u64,
    pending: Vec<u64>,
    head: usize,
}

impl MolecularTransport {
    pub fn new<T: Scalar>(profile: &SlotProfile<T>, molecules: u64) -> Self {
        let mut remaining = 1.0f64;
        let conditional = profile
            .probs()
            .iter()
            .map(|&p| {
                let p = p.as_f64();
                let c = if remaining > 0.0 { (p / remaining).clamp(0.0, 1.0) } else { 0.0 };
                remaining -= p;
                c
            })
            .collect::<Vec<_>>();
        MolecularTransport {
            pending: vec![0; conditional.len()],
            conditional,
            molecules,
            head: 0,
        }
    }

    /// Empties the channel.
    pub fn reset(&mut self) {
        self.pending.fill(0);
        self.head = 0;
    }

    /// Advances one slot, emitting if `bit` is 1. Returns the molecules
    /// absorbed in this slot that were released in it, and those released
    /// earlier.
    pub fn step<R: Rng + ?Sized>(&mut self, bit: u8, rng: &mut R) -> (u64, u64) {
        let memory = self.pending.len();
        let mut own = 0;
        if bit == 1 && self.molecules > 0 {
            let mut left = self.molecules;
            for (lag, &q) in self.conditional.iter().enumerate() {
                if left == 0 {
                    break;
                }
                let hits = if q >= 1.0 {
                    left
                } else {
                    Binomial::new(left, q).expect("valid binomial").sample(rng)
                };
                left -= hits;
                if lag == 0 {
                    own = hits;
                } else {
                    self.pending[(self.head + lag) % memory] += hits;
                }
            }
        }
        let earlier = std::mem::take(&mut self.pending[self.head]);
        self.head = (self.head + 1) % memory;
        (own, earlier)
    }
}

/// Per-slot observations of a transmitted stream and the detector output.
#[derive(Debug, Clone, PartialEq)]
pub struct ReceivedFrame<T> {
    pub transmitted: BitSequence,
    /// Absorbed molecules plus receiver noise.
    pub counts: Vec<T>,
    /// Part of each slot's absorbed count released in earlier slots.
    pub interference: Vec<u64>,
    pub decisions: BitSequence,
}

/// Encodes `messages` back to back and sends them as one slot stream
/// (interference between codewords included), starting from an empty
/// channel. Deterministic in `seed`.
pub fn simulate_stream<T: Scalar>(
    messages: &[BitSequence],
    code: &LineCode,
    params: &ChannelParams<T>,
    threshold: T,
    seed: u64,
) -> Result<ReceivedFrame<T>> {
    if messages.is_empty() {
        return param("no messages to send");
    }
    if let Some(bad) = messages.iter().find(|m| m.len() != code.k()) {
        return Err(Error::Length {
            expected: code.k(),
            actual: bad.len(),
        });
    }
    let profile = slot_probs(params)?;
    let mut transport = MolecularTransport::new(&profile, params.molecules);
    let sigma = params.noise_var.sqrt();
    let mut rng = block_rng(seed, 0);
    let mut word = vec![0u8; code.n()];
    let mut transmitted = Vec::with_capacity(messages.len() * code.n());
    let mut counts = Vec::with_capacity(transmitted.capacity());
    let mut interference = Vec::with_capacity(transmitted.capacity());
    for msg in messages {
        code.encode_into(msg.bits(), &mut word);
        for &bit in &word {
            let (own, earlier) = transport.step(bit, &mut rng);
            let mut y = T::of((own + earlier) as f64);
            if sigma > T::zero() {
                y = y + sigma * T::standard_normal(&mut rng);
            }
            transmitted.push(bit);
            counts.push(y);
            interference.push(earlier);
        }
    }
    let decisions = detect(&counts, threshold)?;
    Ok(ReceivedFrame {
        transmitted: BitSequence::new(transmitted)?,
        counts,
        interference,
        decisions,
    })
}

/// Hard decision per slot: 1 iff the count reaches the threshold.
pub fn detect<T: Scalar>(counts: &[T], threshold: T) -> Result<BitSequence> {
    if !(threshold >= T::zero()) {
        return param(format!("threshold {threshold} must be >= 0"));
    }
    BitSequence::new(counts.iter().map(|&c| u8::from(c >= threshold)).collect())
}

/// Picks the detection threshold from a grid of [`THRESHOLD_GRID_POINTS`]
/// evenly spaced values on `[0, 2 M p_1]` by minimizing slot errors on a
/// pilot stream of independent equiprobable bits.
///
/// Among grid points with the fewest errors, the first contiguous run of
/// optimal points is taken and its middle point returned, so separable
/// levels give a mid-gap threshold. Deterministic in `seed`.
pub fn calibrate_threshold<T: Scalar>(
    params: &ChannelParams<T>,
    pilot_length: usize,
    seed: u64,
) -> Result<T> {
    if pilot_length < 10_000 {
        return Err(Error::Calibration(format!(
            "pilot of {pilot_length} slots is shorter than 10^4"
        )));
    }
    let profile = slot_probs(params)?;
    let level = params.molecules as f64 * profile.p(1).as_f64();
    if !(level > 0.0) {
        return Err(Error::Calibration("no signal: M p_1 = 0".into()));
    }
    let top = 2.0 * level;
    let step = top / (THRESHOLD_GRID_POINTS - 1) as f64;
    let grid: Vec<f64> = (0..THRESHOLD_GRID_POINTS).map(|j| j as f64 * step).collect();

    let mut transport = MolecularTransport::new(&profile, params.molecules);
    let sigma = params.noise_var.as_f64().sqrt();
    let mut rng = block_rng(seed, PILOT_STREAM);
    // histogram of errors as a function of grid index via difference arrays
    let mut diff = vec![0i64; THRESHOLD_GRID_POINTS + 1];
    for _ in 0..pilot_length {
        let bit: u8 = rng.random_range(0..2);
        let (own, earlier) = transport.step(bit, &mut rng);
        let mut y = T::of((own + earlier) as f64);
        if sigma > 0.0 {
            y = y + T::of(sigma) * T::standard_normal(&mut rng);
        }
        let y = y.as_f64();
        // grid points j with grid[j] <= y decide 1
        let ones = grid.partition_point(|&g| g <= y);
        if bit == 1 {
            // wrong for j >= ones
            diff[ones] += 1;
        } else {
            // wrong for j < ones
            diff[0] += 1;
            diff[ones] -= 1;
        }
    }
    let mut errors = Vec::with_capacity(THRESHOLD_GRID_POINTS);
    let mut acc = 0i64;
    for d in &diff[..THRESHOLD_GRID_POINTS] {
        acc += d;
        errors.push(acc);
    }
    let best = *errors.iter().min().expect("non-empty grid");
    let first = errors.iter().position(|&e| e == best).expect("minimum exists");
    let run = errors[first..].iter().take_while(|&&e| e == best).count();
    Ok(T::of(grid[first + (run - 1) / 2]))
}

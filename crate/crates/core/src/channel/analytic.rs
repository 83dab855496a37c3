use crate::bits::BitSequence;
use crate::codebook::Codebook;
use crate::codec::SwapSchedule;
use crate::error::{param, Result};
use crate::scalar::Scalar;

use super::ChannelParams;

/// Probability that a molecule released at `t = 0` has been absorbed by
/// time `t`: `F(t) = (r / r0) erfc((r0 - r) / sqrt(4 D t))`.
pub fn hitting_prob<T: Scalar>(t: T, params: &ChannelParams<T>) -> Result<T> {
    params.validate()?;
    if !(t >= T::zero()) {
        return param(format!("time {t} must be >= 0"));
    }
    if t == T::zero() {
        return Ok(T::zero());
    }
    let scale = params.radius / params.distance;
    let arg = (params.distance - params.radius) / (T::of(4.0) * params.diffusion * t).sqrt();
    Ok(scale * arg.erfc())
}

/// Per-slot absorption probabilities `p_1..p_L`.
#[derive(Debug, Clone, PartialEq)]
pub struct SlotProfile<T> {
    p: Vec<T>,
}

impl<T: Scalar> SlotProfile<T> {
    /// Wraps explicit probabilities; each must be positive and their sum at
    /// most one.
    pub fn from_probs(p: Vec<T>) -> Result<Self> {
        if p.is_empty() {
            return param("slot profile needs at least one slot");
        }
        if p.iter().any(|&x| !(x > T::zero())) {
            return param("slot probabilities must be positive");
        }
        let total = p.iter().fold(T::zero(), |a, &b| a + b);
        if total > T::one() {
            return param(format!("slot probabilities sum to {total} > 1"));
        }
        Ok(SlotProfile { p })
    }

    pub fn memory(&self) -> usize {
        self.p.len()
    }

    /// `p_i` for 1-based `i`; zero beyond the channel memory.
    #[inline]
    pub fn p(&self, i: usize) -> T {
        if i == 0 {
            T::zero()
        } else {
            self.p.get(i - 1).copied().unwrap_or_else(T::zero)
        }
    }

    pub fn probs(&self) -> &[T] {
        &self.p
    }

    pub fn total(&self) -> T {
        self.p.iter().fold(T::zero(), |a, &b| a + b)
    }
}

/// `p_i = F(i ts) - F((i - 1) ts)` for `i = 1..=L`.
pub fn slot_probs<T: Scalar>(params: &ChannelParams<T>) -> Result<SlotProfile<T>> {
    params.validate()?;
    let mut prev = T::zero();
    let mut p = Vec::with_capacity(params.memory);
    for i in 1..=params.memory {
        let cur = hitting_prob(T::of(i as f64) * params.slot, params)?;
        p.push(cur - prev);
        prev = cur;
    }
    SlotProfile::from_probs(p)
}

/// Interference on 1-based position `i` of `c`:
/// `sum_{j < i} c_j p_{i - j + 1}`.
pub fn isi_of_sequence<T: Scalar>(c: &[u8], i: usize, profile: &SlotProfile<T>) -> Result<T> {
    if i == 0 || i > c.len() {
        return param(format!("position {i} outside 1..={}", c.len()));
    }
    if c.len() > profile.memory() {
        return param(format!(
            "sequence of length {} exceeds channel memory {}",
            c.len(),
            profile.memory()
        ));
    }
    Ok(isi_unchecked(c, i, profile))
}

fn isi_unchecked<T: Scalar>(c: &[u8], i: usize, profile: &SlotProfile<T>) -> T {
    c[..i - 1]
        .iter()
        .enumerate()
        .filter(|(_, &b)| b == 1)
        .fold(T::zero(), |acc, (j, _)| acc + profile.p(i - j))
}

fn check_words(words: &[BitSequence], i: usize, profile_memory: usize) -> Result<usize> {
    let Some(first) = words.first() else {
        return param("no codewords");
    };
    let n = first.len();
    if words.iter().any(|w| w.len() != n) {
        return param("codewords differ in length");
    }
    if i == 0 || i > n {
        return param(format!("position {i} outside 1..={n}"));
    }
    if n > profile_memory {
        return param(format!("length {n} exceeds channel memory {profile_memory}"));
    }
    Ok(n)
}

/// Sum of `ISI_i(c)` over all words.
pub fn isi_sum<T: Scalar>(words: &[BitSequence], i: usize, profile: &SlotProfile<T>) -> Result<T> {
    check_words(words, i, profile.memory())?;
    Ok(words
        .iter()
        .fold(T::zero(), |acc, w| acc + isi_unchecked(w.bits(), i, profile)))
}

/// Mean per-molecule interference on position `i` over equiprobable words,
/// counting only bits of the same word.
pub fn expected_isi<T: Scalar>(
    words: &[BitSequence],
    i: usize,
    profile: &SlotProfile<T>,
) -> Result<T> {
    Ok(isi_sum(words, i, profile)? / T::of(words.len() as f64))
}

/// Mean per-molecule interference on position `i` when every word is
/// preceded by an endless stream of independent equiprobable words.
/// Includes everything inside the channel memory.
pub fn expected_stream_isi<T: Scalar>(
    words: &[BitSequence],
    i: usize,
    profile: &SlotProfile<T>,
) -> Result<T> {
    let n = words.first().map_or(0, |w| w.len());
    check_words(words, i, usize::MAX)?;
    let size = T::of(words.len() as f64);
    let density: Vec<T> = crate::codebook::column_weights_of(words)
        .into_iter()
        .map(|w| T::of(w as f64) / size)
        .collect();
    // lag d >= 1 lands on p_{d+1}
    let mut acc = T::zero();
    for lag in 1..profile.memory() {
        let back = (i - 1) as isize - lag as isize;
        let pos = back.rem_euclid(n as isize) as usize;
        acc = acc + density[pos] * profile.p(lag + 1);
    }
    Ok(acc)
}

/// Change in the interference sum over positions `ceil(k/2) + t + 1` and
/// `k + t + 1` when columns `ceil(k/2) + t` and `k + t` are exchanged:
/// `-(2^(k-1) - Delta_{k+t}(1)) p_{floor(k/2) + 2}`.
pub fn swap_gain<T: Scalar>(codebook: &Codebook, profile: &SlotProfile<T>, t: usize) -> Result<T> {
    let spec = codebook.spec();
    if !SwapSchedule::offsets(spec).contains(&t) {
        return param(format!("offset {t} is not in the swap schedule of k = {}", spec.k));
    }
    if spec.n() > profile.memory() {
        return param(format!("length {} exceeds channel memory", spec.n()));
    }
    let k = spec.k as usize;
    let half = T::of((1u64 << (k - 1)) as f64);
    let delta = T::of(codebook.column_weights()[k + t - 1] as f64);
    Ok(-(half - delta) * profile.p(k / 2 + 2))
}

/// Interference on the last position of `0...0 1^tau 0` of length `n`,
/// i.e. `p_2 + ... + p_{tau+1}`.
pub fn reference_isi<T: Scalar>(profile: &SlotProfile<T>, tau: usize, n: usize) -> Result<T> {
    if tau + 1 > n {
        return param(format!("tau = {tau} does not fit in length {n}"));
    }
    let mut reference = vec![0u8; n];
    reference[n - 1 - tau..n - 1].fill(1);
    isi_of_sequence(&reference, n, profile)
}

/// True iff no position of `codeword` sees more interference than the last
/// position of the reference sequence `0...0 1^tau 0` of length `n`.
pub fn codeword_isi_bound<T: Scalar>(
    codeword: &BitSequence,
    profile: &SlotProfile<T>,
    tau: usize,
    n: usize,
) -> Result<bool> {
    let bound = reference_isi(profile, tau, n)?;
    for i in 1..=codeword.len() {
        if isi_of_sequence(codeword.bits(), i, profile)? > bound {
            return Ok(false);
        }
    }
    Ok(true)
}

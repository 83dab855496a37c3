//! Construction of the codes `C(k, m)`.
//!
//! A codeword is `[u p rho]`: `u` is a row of the message matrix (all `k`-bit
//! words in decreasing decimal order), `p` the matching row of the stacked
//! constant-weight parity matrix (weight 0, 1, ..., tau blocks, each in
//! decreasing decimal order) and `rho` flags whether the weight of `p` is even.

use std::fmt::Write as _;

use num_integer::binomial as binom_generic;
use num_rational::Ratio;

use crate::bits::BitSequence;
use crate::error::{param, Error, Result};

/// Size caps for materialized matrices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub max_k: u32,
    pub max_m: u32,
    /// Largest number of rows `build_p_matrix` will materialize.
    pub max_rows: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_k: 20,
            max_m: 40,
            max_rows: 1 << 22,
        }
    }
}

#[inline]
pub fn binomial(n: u32, k: u32) -> u64 {
    if k > n {
        0
    } else {
        binom_generic(n as u64, k as u64)
    }
}

/// `sum_{r=0..=upto} C(m, r)`.
pub fn cumulative_binomial(m: u32, upto: u32) -> u64 {
    (0..=upto.min(m)).map(|r| binomial(m, r)).sum()
}

/// Rows of fixed width packed into `u64`, leftmost column most significant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitMatrix {
    width: usize,
    rows: Vec<u64>,
}

impl BitMatrix {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    /// Packed row values (decimal value of each row).
    pub fn values(&self) -> &[u64] {
        &self.rows
    }

    /// 0-based row access.
    pub fn row(&self, idx: usize) -> BitSequence {
        BitSequence::from_value(self.rows[idx], self.width)
    }

    pub fn rows(&self) -> impl Iterator<Item = BitSequence> + '_ {
        (0..self.rows.len()).map(|i| self.row(i))
    }

    /// Number of ones in column `col` (0-based).
    pub fn column_weight(&self, col: usize) -> u64 {
        let shift = self.width - 1 - col;
        self.rows.iter().filter(|&&r| (r >> shift) & 1 == 1).count() as u64
    }
}

/// The message matrix: all `k`-bit words in decreasing decimal order.
///
/// Built by the block recursion `U(r+1) = [1 U(r); 0 U(r)]` from
/// `U(1) = [1; 0]`, so row `r` (1-based) has decimal value `2^k - r`.
pub fn build_u_matrix(k: u32) -> Result<BitMatrix> {
    build_u_matrix_with(k, &Limits::default())
}

pub fn build_u_matrix_with(k: u32, limits: &Limits) -> Result<BitMatrix> {
    if k == 0 || k > limits.max_k {
        return param(format!("k = {k} outside 1..={}", limits.max_k));
    }
    let mut rows = vec![1u64, 0u64];
    for width in 1..k {
        let top = 1u64 << width;
        let mut next = Vec::with_capacity(rows.len() * 2);
        next.extend(rows.iter().map(|&r| top | r));
        next.extend(rows.iter().copied());
        rows = next;
    }
    Ok(BitMatrix {
        width: k as usize,
        rows,
    })
}

/// All `m`-bit words of weight `i`, in decreasing decimal order.
pub fn build_p_matrix(m: u32, i: u32) -> Result<BitMatrix> {
    build_p_matrix_with(m, i, &Limits::default())
}

pub fn build_p_matrix_with(m: u32, i: u32, limits: &Limits) -> Result<BitMatrix> {
    if m == 0 || m > limits.max_m {
        return param(format!("m = {m} outside 1..={}", limits.max_m));
    }
    if i > m {
        return param(format!("weight {i} exceeds width {m}"));
    }
    let count = binomial(m, i);
    if count > limits.max_rows {
        return param(format!(
            "C({m},{i}) = {count} rows exceeds the materialization cap {}",
            limits.max_rows
        ));
    }
    let mut rows = Vec::with_capacity(count as usize);
    weight_class_prefix(m, i, count, &mut rows);
    Ok(BitMatrix {
        width: m as usize,
        rows,
    })
}

/// Appends the first `limit` rows of the weight-`i` block of width `m`,
/// following the recursion `P(m,i) = [1 P(m-1,i-1); 0 P(m-1,i)]` with
/// `P(r,0) = 0...0` and `P(r,r) = 1...1`.
fn weight_class_prefix(m: u32, i: u32, limit: u64, out: &mut Vec<u64>) {
    if limit == 0 {
        return;
    }
    if i == 0 {
        out.push(0);
        return;
    }
    if i == m {
        out.push((1u64 << m) - 1);
        return;
    }
    let lead = 1u64 << (m - 1);
    let start = out.len();
    weight_class_prefix(m - 1, i - 1, limit, out);
    for r in &mut out[start..] {
        *r |= lead;
    }
    let taken = (out.len() - start) as u64;
    weight_class_prefix(m - 1, i, limit - taken, out);
}

/// Smallest `tau` with `2^k <= sum_{r=0..=tau} C(m, r)`.
pub fn tau_for(k: u32, m: u32) -> Result<u32> {
    if k == 0 || m <= k {
        return param(format!("need m > k >= 1, got k = {k}, m = {m}"));
    }
    let size = 1u64 << k;
    let mut acc = 0u64;
    for tau in 0..=m {
        acc += binomial(m, tau);
        if size <= acc {
            return Ok(tau);
        }
    }
    unreachable!("2^m > 2^k bounds the search")
}

/// Design and derived parameters of `C(k, m)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CodeSpec {
    pub k: u32,
    pub m: u32,
    pub tau: u32,
}

impl CodeSpec {
    pub fn new(k: u32, m: u32) -> Result<Self> {
        Self::with_limits(k, m, &Limits::default())
    }

    /// `k = 1` is rejected: its post-encoding schedule is empty and the
    /// swap positions degenerate.
    pub fn with_limits(k: u32, m: u32, limits: &Limits) -> Result<Self> {
        if k < 2 {
            return param(format!("k = {k}: codes need k >= 2"));
        }
        if k > limits.max_k {
            return param(format!("k = {k} exceeds cap {}", limits.max_k));
        }
        if m <= k {
            return param(format!("need m > k, got k = {k}, m = {m}"));
        }
        if m > limits.max_m {
            return param(format!("m = {m} exceeds cap {}", limits.max_m));
        }
        let tau = tau_for(k, m)?;
        Ok(CodeSpec { k, m, tau })
    }

    /// Codeword length `k + m + 1`.
    pub fn n(&self) -> usize {
        (self.k + self.m + 1) as usize
    }

    /// Number of codewords, `2^k`.
    pub fn size(&self) -> u64 {
        1u64 << self.k
    }

    pub fn min_distance(&self) -> u32 {
        3
    }

    pub fn rate(&self) -> Ratio<u64> {
        Ratio::new(self.k as u64, self.n() as u64)
    }

    /// Number of parity rows of weight below `i`.
    pub fn rows_below_weight(&self, i: u32) -> u64 {
        if i == 0 {
            0
        } else {
            cumulative_binomial(self.m, i - 1)
        }
    }
}

/// Parity flag for a parity body of weight `i`: 1 iff `i` is even.
#[inline]
pub fn weight_parity_bit(i: usize) -> u8 {
    u8::from(i % 2 == 0)
}

/// Minimum pairwise Hamming distance of a set of words.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum MinDistance {
    Finite(usize),
    /// Fewer than two words.
    Infinite,
}

/// The code `C(k, m)` with its rows in construction order.
#[derive(Debug, Clone)]
pub struct Codebook {
    spec: CodeSpec,
    codewords: Vec<BitSequence>,
    column_weights: Vec<u64>,
}

impl Codebook {
    pub fn spec(&self) -> &CodeSpec {
        &self.spec
    }

    pub fn codewords(&self) -> &[BitSequence] {
        &self.codewords
    }

    /// 1-based row access, `1 <= r <= 2^k`.
    pub fn row(&self, r: usize) -> &BitSequence {
        &self.codewords[r - 1]
    }

    pub fn message_part(&self, r: usize) -> &[u8] {
        &self.row(r).bits()[..self.spec.k as usize]
    }

    pub fn parity_part(&self, r: usize) -> &[u8] {
        let k = self.spec.k as usize;
        &self.row(r).bits()[k..k + self.spec.m as usize]
    }

    pub fn rho(&self, r: usize) -> u8 {
        self.row(r)[self.spec.n() - 1]
    }

    /// Column weights `Delta_t(1)` for `t = 1..=n` (index `t - 1`).
    pub fn column_weights(&self) -> &[u64] {
        &self.column_weights
    }

    pub fn min_distance(&self) -> MinDistance {
        verify_min_distance(&self.codewords)
    }

    /// Bit-1 density per position, `Delta_t(1) / 2^k`.
    pub fn density_profile(&self) -> Vec<Ratio<u64>> {
        let size = self.spec.size();
        self.column_weights
            .iter()
            .map(|&w| Ratio::new(w, size))
            .collect()
    }

    /// Codebook rows as CSV with header `r,u,p,rho,codeword`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("r,u,p,rho,codeword\n");
        for r in 1..=self.codewords.len() {
            let u = bits_to_string(self.message_part(r));
            let p = bits_to_string(self.parity_part(r));
            let _ = writeln!(out, "{r},{u},{p},{},{}", self.rho(r), self.row(r));
        }
        out
    }
}

fn bits_to_string(bits: &[u8]) -> String {
    bits.iter().map(|&b| if b == 1 { '1' } else { '0' }).collect()
}

pub(crate) fn column_weights_of(words: &[BitSequence]) -> Vec<u64> {
    let n = words.first().map_or(0, |w| w.len());
    let mut weights = vec![0u64; n];
    for w in words {
        for (acc, &b) in weights.iter_mut().zip(w.bits()) {
            *acc += b as u64;
        }
    }
    weights
}

/// Stacked parity matrix truncated to its first `rows` rows.
fn stacked_parity_prefix(m: u32, rows: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::with_capacity(rows as usize);
    let mut weight = 0;
    let mut block = Vec::new();
    while (out.len() as u64) < rows {
        block.clear();
        weight_class_prefix(m, weight, rows - out.len() as u64, &mut block);
        out.extend(block.iter().map(|&p| (p, weight)));
        weight += 1;
    }
    out
}

pub fn build_codebook(k: u32, m: u32) -> Result<Codebook> {
    build_codebook_for(CodeSpec::new(k, m)?)
}

pub fn build_codebook_for(spec: CodeSpec) -> Result<Codebook> {
    let u = build_u_matrix(spec.k)?;
    let parity = stacked_parity_prefix(spec.m, spec.size());
    let (k, m) = (spec.k as usize, spec.m as usize);
    let codewords: Vec<BitSequence> = u
        .values()
        .iter()
        .zip(&parity)
        .map(|(&msg, &(p, weight))| {
            let mut bits = Vec::with_capacity(k + m + 1);
            bits.extend(BitSequence::from_value(msg, k).bits());
            bits.extend(BitSequence::from_value(p, m).bits());
            bits.push(weight_parity_bit(weight as usize));
            BitSequence::from_raw(bits)
        })
        .collect();
    if codewords.len() as u64 != spec.size() {
        return Err(Error::Parameter("parity stack shorter than 2^k".into()));
    }
    let column_weights = column_weights_of(&codewords);
    Ok(Codebook {
        spec,
        codewords,
        column_weights,
    })
}

/// Exact minimum pairwise Hamming distance by scanning all pairs.
pub fn verify_min_distance(words: &[BitSequence]) -> MinDistance {
    let packable = words.iter().all(|w| w.len() <= 64);
    let packed: Vec<u64> = if packable {
        words.iter().map(BitSequence::value).collect()
    } else {
        Vec::new()
    };
    let mut best: Option<usize> = None;
    for i in 0..words.len() {
        for j in i + 1..words.len() {
            let d = if packable && words[i].len() == words[j].len() {
                (packed[i] ^ packed[j]).count_ones() as usize
            } else {
                words[i].hamming_distance(&words[j])
            };
            best = Some(best.map_or(d, |cur| cur.min(d)));
        }
    }
    best.map_or(MinDistance::Infinite, MinDistance::Finite)
}

/// Claimed bound on the bit-1 density at a position.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DensityBound {
    Exactly(Ratio<u64>),
    AtMost(Ratio<u64>),
}

impl DensityBound {
    pub fn holds(&self, density: Ratio<u64>) -> bool {
        match *self {
            DensityBound::Exactly(v) => density == v,
            DensityBound::AtMost(v) => density <= v,
        }
    }
}

/// Density bound at 1-based position `t`: one half over the message,
/// `sum_{r=1..tau} C(m-1, r-1) / 2^k` over the parity body and
/// `sum_{r=0..floor(tau/2)} C(m-1, 2r) / 2^k` on the parity flag.
pub fn density_bound(spec: &CodeSpec, t: usize) -> Result<DensityBound> {
    let (k, m, tau) = (spec.k as usize, spec.m, spec.tau);
    let size = spec.size();
    if t == 0 || t > spec.n() {
        return param(format!("position {t} outside 1..={}", spec.n()));
    }
    Ok(if t <= k {
        DensityBound::Exactly(Ratio::new(1, 2))
    } else if t <= k + m as usize {
        let ones: u64 = (1..=tau).map(|r| binomial(m - 1, r - 1)).sum();
        DensityBound::AtMost(Ratio::new(ones, size))
    } else {
        let ones: u64 = (0..=tau / 2).map(|r| binomial(m - 1, 2 * r)).sum();
        DensityBound::AtMost(Ratio::new(ones, size))
    })
}

/// One feasible `(k, m, tau)` for a target rate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RateCandidate {
    pub k: u32,
    pub m: u32,
    pub tau: u32,
}

impl RateCandidate {
    pub fn rate(&self) -> Ratio<u64> {
        Ratio::new(self.k as u64, (self.k + self.m + 1) as u64)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RateDesign {
    pub epsilon: Ratio<u64>,
    pub candidates: Vec<RateCandidate>,
}

fn binomial_u128(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for j in 0..k {
        acc = acc.saturating_mul((n - j) as u128) / (j + 1) as u128;
    }
    acc
}

/// All `k <= k_max` admitting a code of rate exactly `epsilon`: `k / epsilon`
/// is an integer `n`, `m = n - k - 1`, `tau <= k` satisfies the binomial
/// sandwich for `m`, and `tau + k + 1 < n`.
pub fn design_for_rate(epsilon: Ratio<u64>, k_max: u32) -> Result<RateDesign> {
    if *epsilon.numer() == 0 || epsilon >= Ratio::new(1, 2) {
        return param(format!("rate {epsilon} outside (0, 1/2)"));
    }
    let (num, den) = (*epsilon.numer(), *epsilon.denom());
    let mut candidates = Vec::new();
    for k in 1..=k_max.min(63) {
        let scaled = k as u64 * den;
        if scaled % num != 0 {
            continue;
        }
        let n = scaled / num;
        let m = n - k as u64 - 1;
        let size = 1u128 << k;
        let mut acc = 0u128;
        let mut tau = None;
        for t in 0..=m.min(k as u64) {
            acc += binomial_u128(m, t);
            if size <= acc {
                tau = Some(t);
                break;
            }
        }
        let Some(tau) = tau else { continue };
        if tau + k as u64 + 1 < n && m > k as u64 {
            candidates.push(RateCandidate {
                k,
                m: m as u32,
                tau: tau as u32,
            });
        }
    }
    Ok(RateDesign {
        epsilon,
        candidates,
    })
}

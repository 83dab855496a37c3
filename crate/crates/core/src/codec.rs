//! Encoder and single-error-correcting decoder for `C(k, m)`, including the
//! position swap applied before transmission and its inverse.
//!
//! Parity bodies are located by ranking in their weight class rather than by
//! table lookup, so encoding costs `O(m)` even when `2^k` is large.

use crate::bits::BitSequence;
use crate::codebook::{binomial, weight_parity_bit, CodeSpec};
use crate::error::{param, Error, Result};

/// A `k`-bit message.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MessageWord(BitSequence);

impl MessageWord {
    pub fn new(bits: BitSequence, spec: &CodeSpec) -> Result<Self> {
        check_len(&bits, spec.k as usize)?;
        Ok(MessageWord(bits))
    }

    pub fn bits(&self) -> &BitSequence {
        &self.0
    }

    pub fn into_bits(self) -> BitSequence {
        self.0
    }
}

/// A codeword and the word actually put on the channel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncodedWord {
    pub raw: BitSequence,
    pub transmitted: BitSequence,
}

fn check_len(bits: &BitSequence, expected: usize) -> Result<()> {
    if bits.len() != expected {
        return Err(Error::Length {
            expected,
            actual: bits.len(),
        });
    }
    Ok(())
}

/// 1-based index of `p` among the weight-`i` words of width `m` in
/// decreasing decimal order.
pub fn rank_in_weight_class(p: &[u8], m: u32, i: u32) -> Result<u64> {
    if p.len() != m as usize {
        return Err(Error::Length {
            expected: m as usize,
            actual: p.len(),
        });
    }
    let weight = p.iter().filter(|&&b| b == 1).count() as u32;
    if weight != i {
        return param(format!("word has weight {weight}, expected {i}"));
    }
    Ok(rank_unchecked(p, i))
}

fn rank_unchecked(p: &[u8], i: u32) -> u64 {
    let m = p.len() as u32;
    let mut rank = 1;
    let mut left = i;
    for (j, &b) in p.iter().enumerate() {
        if left == 0 {
            break;
        }
        let rest = m - 1 - j as u32;
        if b == 1 {
            left -= 1;
        } else {
            // every word with a 1 here comes first
            rank += binomial(rest, left - 1);
        }
    }
    rank
}

/// Row `r` (1-based) of the weight-`i` class of width `m`.
pub fn unrank_in_weight_class(r: u64, m: u32, i: u32) -> Result<BitSequence> {
    if i > m {
        return param(format!("weight {i} exceeds width {m}"));
    }
    let count = binomial(m, i);
    if r == 0 || r > count {
        return param(format!("row {r} outside 1..={count}"));
    }
    let mut bits = vec![0u8; m as usize];
    unrank_into(r, i, &mut bits);
    Ok(BitSequence::new(bits).expect("binary"))
}

fn unrank_into(mut r: u64, i: u32, out: &mut [u8]) {
    let m = out.len() as u32;
    let mut left = i;
    for (j, slot) in out.iter_mut().enumerate() {
        if left == 0 {
            *slot = 0;
            continue;
        }
        let rest = m - 1 - j as u32;
        let with_one = binomial(rest, left - 1);
        if r <= with_one {
            *slot = 1;
            left -= 1;
        } else {
            *slot = 0;
            r -= with_one;
        }
    }
}

/// Position pairs `(ceil(k/2) + t, k + t)` exchanged before transmission,
/// for odd `t` up to `2 * ceil(floor(k/2) / 2) - 1`. Positions are 1-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SwapSchedule {
    pairs: Vec<(usize, usize)>,
}

impl SwapSchedule {
    pub fn for_spec(spec: &CodeSpec) -> Self {
        let k = spec.k as usize;
        let half_up = k.div_ceil(2);
        let last_t = 2 * (k / 2).div_ceil(2);
        let pairs = (1..last_t)
            .step_by(2)
            .map(|t| (half_up + t, k + t))
            .collect();
        SwapSchedule { pairs }
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    /// Odd offsets `t` the schedule is built from.
    pub fn offsets(spec: &CodeSpec) -> Vec<usize> {
        let last_t = 2 * (spec.k as usize / 2).div_ceil(2);
        (1..last_t).step_by(2).collect()
    }

    /// Exchanges the scheduled positions in place. Self-inverse.
    pub fn apply(&self, bits: &mut [u8]) {
        for &(a, b) in &self.pairs {
            bits.swap(a - 1, b - 1);
        }
    }
}

/// Applies the transmission swap to a codeword.
pub fn post_encode(c: &BitSequence, spec: &CodeSpec) -> Result<BitSequence> {
    check_len(c, spec.n())?;
    let mut bits = c.bits().to_vec();
    SwapSchedule::for_spec(spec).apply(&mut bits);
    Ok(BitSequence::new(bits).expect("binary"))
}

/// Undoes [`post_encode`]; the swap is its own inverse.
pub fn pre_decode(v: &BitSequence, spec: &CodeSpec) -> Result<BitSequence> {
    post_encode(v, spec)
}

/// Encoder/decoder for one code, optionally with the transmission swap.
#[derive(Debug, Clone)]
pub struct Codec {
    spec: CodeSpec,
    schedule: SwapSchedule,
    post_encoding: bool,
    /// `class_start[i]` = number of parity rows of weight below `i`.
    class_start: Vec<u64>,
}

impl Codec {
    pub fn new(spec: CodeSpec, post_encoding: bool) -> Self {
        let mut class_start = Vec::with_capacity(spec.tau as usize + 2);
        let mut acc = 0;
        for i in 0..=spec.tau + 1 {
            class_start.push(acc);
            acc += binomial(spec.m, i);
        }
        Codec {
            schedule: SwapSchedule::for_spec(&spec),
            spec,
            post_encoding,
            class_start,
        }
    }

    pub fn spec(&self) -> &CodeSpec {
        &self.spec
    }

    pub fn post_encoding(&self) -> bool {
        self.post_encoding
    }

    pub fn schedule(&self) -> &SwapSchedule {
        &self.schedule
    }

    pub fn encode(&self, u: &MessageWord) -> EncodedWord {
        let n = self.spec.n();
        let mut raw = vec![0u8; n];
        self.encode_raw_into(u.bits().bits(), &mut raw);
        let mut transmitted = raw.clone();
        if self.post_encoding {
            self.schedule.apply(&mut transmitted);
        }
        EncodedWord {
            raw: BitSequence::from_raw(raw),
            transmitted: BitSequence::from_raw(transmitted),
        }
    }

    /// Writes the channel word for message `u` into `out` (length `n`).
    pub fn encode_into(&self, u: &[u8], out: &mut [u8]) {
        self.encode_raw_into(u, out);
        if self.post_encoding {
            self.schedule.apply(out);
        }
    }

    fn encode_raw_into(&self, u: &[u8], out: &mut [u8]) {
        let (k, m) = (self.spec.k as usize, self.spec.m as usize);
        debug_assert_eq!(u.len(), k);
        out[..k].copy_from_slice(u);
        let value = u.iter().fold(0u64, |acc, &b| (acc << 1) | b as u64);
        let index = self.spec.size() - value;
        let parity = &mut out[k..k + m];
        let weight = if index == 0 {
            // unreachable for k-bit messages; the printed algorithm keeps it
            parity.fill(0);
            0
        } else {
            let i = self
                .class_start
                .partition_point(|&start| start < index)
                .saturating_sub(1);
            let r = index - self.class_start[i];
            unrank_into(r, i as u32, parity);
            i
        };
        out[k + m] = weight_parity_bit(weight);
    }

    /// Recovers the message from a received channel word. Any single bit
    /// error is corrected; with more errors the result is deterministic but
    /// may be wrong.
    pub fn decode(&self, v: &BitSequence) -> Result<MessageWord> {
        check_len(v, self.spec.n())?;
        let mut out = vec![0u8; self.spec.k as usize];
        self.decode_into(v.bits(), &mut out);
        Ok(MessageWord(BitSequence::from_raw(out)))
    }

    /// Slice form of [`Codec::decode`]; `word` must have length `n` and
    /// `out` length `k`.
    pub fn decode_into(&self, word: &[u8], out: &mut [u8]) {
        let (k, m) = (self.spec.k as usize, self.spec.m as usize);
        let mut buf = [0u8; 64];
        let v = &mut buf[..word.len()];
        v.copy_from_slice(word);
        if self.post_encoding {
            self.schedule.apply(v);
        }
        let u = &v[..k];
        let p = &v[k..k + m];
        let i = p.iter().filter(|&&b| b == 1).count();
        out.copy_from_slice(u);
        if v[k + m] != weight_parity_bit(i) || i as u32 > self.spec.tau {
            return;
        }
        let q = rank_unchecked(p, i as u32) + self.class_start[i];
        if q > self.spec.size() {
            return;
        }
        let value = self.spec.size() - q;
        for (j, slot) in out.iter_mut().enumerate() {
            *slot = ((value >> (k - 1 - j)) & 1) as u8;
        }
    }
}

/// Encodes with the transmission swap applied.
pub fn encode(u: &MessageWord, spec: &CodeSpec) -> EncodedWord {
    Codec::new(*spec, true).encode(u)
}

/// Decodes a word that went through the transmission swap.
pub fn decode(v_tilde: &BitSequence, spec: &CodeSpec) -> Result<MessageWord> {
    Codec::new(*spec, true).decode(v_tilde)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codebook::build_p_matrix;

    fn b(s: &str) -> BitSequence {
        s.parse().unwrap()
    }

    fn spec(k: u32, m: u32) -> CodeSpec {
        CodeSpec::new(k, m).unwrap()
    }

    fn msg(s: &str, sp: &CodeSpec) -> MessageWord {
        MessageWord::new(b(s), sp).unwrap()
    }

    #[test]
    fn rank_examples() {
        assert_eq!(rank_in_weight_class(b("0001").bits(), 4, 1).unwrap(), 4);
        assert_eq!(rank_in_weight_class(b("1001").bits(), 4, 2).unwrap(), 3);
        assert_eq!(rank_in_weight_class(b("1111").bits(), 4, 4).unwrap(), 1);
        assert!(rank_in_weight_class(b("1111").bits(), 4, 3).is_err());
        assert!(rank_in_weight_class(b("111").bits(), 4, 3).is_err());
    }

    #[test]
    fn unrank_examples() {
        assert_eq!(unrank_in_weight_class(1, 4, 2).unwrap(), b("1100"));
        assert_eq!(unrank_in_weight_class(6, 4, 2).unwrap(), b("0011"));
        assert_eq!(unrank_in_weight_class(1, 5, 0).unwrap(), b("00000"));
        assert!(unrank_in_weight_class(7, 4, 2).is_err());
        assert!(unrank_in_weight_class(0, 4, 2).is_err());
        assert!(unrank_in_weight_class(1, 4, 5).is_err());
    }

    #[test]
    fn unrank_matches_matrix() {
        for m in 1..=12 {
            for i in 0..=m {
                let mat = build_p_matrix(m, i).unwrap();
                for (idx, row) in mat.rows().enumerate() {
                    let r = idx as u64 + 1;
                    assert_eq!(unrank_in_weight_class(r, m, i).unwrap(), row);
                    assert_eq!(rank_in_weight_class(row.bits(), m, i).unwrap(), r);
                }
            }
        }
    }

    #[test]
    fn encode_examples() {
        let sp = spec(3, 4);
        let codec = Codec::new(sp, false);
        assert_eq!(codec.encode(&msg("111", &sp)).raw, b("11100001"));
        assert_eq!(codec.encode(&msg("011", &sp)).raw, b("01100010"));
        assert_eq!(codec.encode(&msg("000", &sp)).raw, b("00010011"));
        assert_eq!(encode(&msg("011", &sp), &sp).transmitted, b("01010010"));
        assert!(MessageWord::new(b("0110"), &sp).is_err());
    }

    #[test]
    fn schedule_positions() {
        let pairs = |k, m| SwapSchedule::for_spec(&spec(k, m)).pairs().to_vec();
        assert_eq!(pairs(2, 3), [(2, 3)]);
        assert_eq!(pairs(3, 4), [(3, 4)]);
        assert_eq!(pairs(4, 5), [(3, 5)]);
        assert_eq!(pairs(5, 6), [(4, 6)]);
        assert_eq!(pairs(6, 7), [(4, 7), (6, 9)]);
        assert_eq!(pairs(7, 8), [(5, 8), (7, 10)]);
    }

    #[test]
    fn post_encode_examples() {
        let s34 = spec(3, 4);
        assert_eq!(post_encode(&b("01100010"), &s34).unwrap(), b("01010010"));
        assert_eq!(pre_decode(&b("01010010"), &s34).unwrap(), b("01100010"));
        assert_eq!(post_encode(&b("00000000"), &s34).unwrap(), b("00000000"));
        assert_eq!(pre_decode(&b("11111111"), &s34).unwrap(), b("11111111"));
        let s45 = spec(4, 5);
        assert_eq!(post_encode(&b("1110000000"), &s45).unwrap(), b("1100100000"));
        assert!(post_encode(&b("0110001"), &s34).is_err());
        assert!(pre_decode(&b("011000101"), &s34).is_err());
    }

    #[test]
    fn decode_examples() {
        let sp = spec(3, 4);
        assert_eq!(decode(&b("01010010"), &sp).unwrap().bits(), &b("011"));
        // r = 5 with the first bit flipped, after pre-decoding 11100010
        let rx = post_encode(&b("11100010"), &sp).unwrap();
        assert_eq!(decode(&rx, &sp).unwrap().bits(), &b("011"));
        // parity bit 4 flipped: p = 1001 has even weight, rho = 0 disagrees
        let rx = post_encode(&b("01110010"), &sp).unwrap();
        assert_eq!(decode(&rx, &sp).unwrap().bits(), &b("011"));
        assert!(decode(&b("0101001"), &sp).is_err());
    }

    #[test]
    fn decoder_falls_back_on_out_of_range_parity() {
        // weight 4 > tau with a matching flag: only reachable with >= 2 errors
        let sp = spec(3, 4);
        let codec = Codec::new(sp, false);
        let out = codec.decode(&b("10111111")).unwrap();
        assert_eq!(out.bits(), &b("101"));
        // weight-2 row past 2^k: 0110 is row 4 of its class, q = 9 > 8
        let out = codec.decode(&b("01001101")).unwrap();
        assert_eq!(out.bits(), &b("010"));
    }
}

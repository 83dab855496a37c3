//! Block codes compared on the channel: the proposed codes and two baselines.

use std::fmt;
use std::str::FromStr;

use crate::bits::BitSequence;
use crate::codebook::{build_codebook_for, CodeSpec};
use crate::codec::Codec;
use crate::error::{param, Error, Result};

/// Repeats every bit three times.
pub fn repetition3_encode(bits: &BitSequence) -> BitSequence {
    BitSequence::from_raw(bits.bits().iter().flat_map(|&b| [b; 3]).collect())
}

/// Majority vote over consecutive triples.
pub fn repetition3_decode(bits: &BitSequence) -> Result<BitSequence> {
    if bits.len() % 3 != 0 {
        return param(format!("length {} is not a multiple of 3", bits.len()));
    }
    Ok(BitSequence::from_raw(
        bits.bits()
            .chunks_exact(3)
            .map(|t| u8::from(t.iter().sum::<u8>() >= 2))
            .collect(),
    ))
}

/// Which code an experiment runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CodeChoice {
    Proposed { k: u32, m: u32 },
    Uncoded,
    Repetition3,
}

impl FromStr for CodeChoice {
    type Err = Error;

    /// `ckm:K,M`, `uncoded` or `rep3`.
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "uncoded" => Ok(CodeChoice::Uncoded),
            "rep3" => Ok(CodeChoice::Repetition3),
            other => {
                let body = other
                    .strip_prefix("ckm:")
                    .ok_or_else(|| Error::Parse(format!("unknown code {other:?}")))?;
                let (k, m) = body
                    .split_once(',')
                    .ok_or_else(|| Error::Parse(format!("expected ckm:K,M, got {other:?}")))?;
                let parse = |v: &str| {
                    v.trim()
                        .parse::<u32>()
                        .map_err(|_| Error::Parse(format!("bad integer {v:?} in {other:?}")))
                };
                Ok(CodeChoice::Proposed {
                    k: parse(k)?,
                    m: parse(m)?,
                })
            }
        }
    }
}

impl fmt::Display for CodeChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CodeChoice::Proposed { k, m } => write!(f, "ckm:{k},{m}"),
            CodeChoice::Uncoded => f.write_str("uncoded"),
            CodeChoice::Repetition3 => f.write_str("rep3"),
        }
    }
}

/// A code ready to put messages on the channel.
#[derive(Debug, Clone)]
pub enum LineCode {
    Proposed(Codec),
    Uncoded,
    Repetition3,
}

impl LineCode {
    pub fn new(choice: CodeChoice, post_encoding: bool) -> Result<Self> {
        Ok(match choice {
            CodeChoice::Proposed { k, m } => {
                LineCode::Proposed(Codec::new(CodeSpec::new(k, m)?, post_encoding))
            }
            CodeChoice::Uncoded => LineCode::Uncoded,
            CodeChoice::Repetition3 => LineCode::Repetition3,
        })
    }

    pub fn choice(&self) -> CodeChoice {
        match self {
            LineCode::Proposed(c) => CodeChoice::Proposed {
                k: c.spec().k,
                m: c.spec().m,
            },
            LineCode::Uncoded => CodeChoice::Uncoded,
            LineCode::Repetition3 => CodeChoice::Repetition3,
        }
    }

    /// Whether the transmission swap is in effect.
    pub fn post_encoding(&self) -> bool {
        matches!(self, LineCode::Proposed(c) if c.post_encoding())
    }

    /// Message bits per codeword.
    pub fn k(&self) -> usize {
        match self {
            LineCode::Proposed(c) => c.spec().k as usize,
            LineCode::Uncoded | LineCode::Repetition3 => 1,
        }
    }

    /// Channel bits per codeword.
    pub fn n(&self) -> usize {
        match self {
            LineCode::Proposed(c) => c.spec().n(),
            LineCode::Uncoded => 1,
            LineCode::Repetition3 => 3,
        }
    }

    /// `msg` has length `k`, `out` length `n`.
    pub fn encode_into(&self, msg: &[u8], out: &mut [u8]) {
        match self {
            LineCode::Proposed(c) => c.encode_into(msg, out),
            LineCode::Uncoded => out[0] = msg[0],
            LineCode::Repetition3 => out.fill(msg[0]),
        }
    }

    /// `word` has length `n`, `out` length `k`.
    pub fn decode_into(&self, word: &[u8], out: &mut [u8]) {
        match self {
            LineCode::Proposed(c) => c.decode_into(word, out),
            LineCode::Uncoded => out[0] = word[0],
            LineCode::Repetition3 => out[0] = u8::from(word.iter().sum::<u8>() >= 2),
        }
    }

    /// Every word this code can put on the channel, one per message.
    pub fn channel_words(&self) -> Result<Vec<BitSequence>> {
        match self {
            LineCode::Proposed(c) => {
                let book = build_codebook_for(*c.spec())?;
                let mut words = book.codewords().to_vec();
                if c.post_encoding() {
                    for w in &mut words {
                        let mut bits = w.bits().to_vec();
                        c.schedule().apply(&mut bits);
                        *w = BitSequence::from_raw(bits);
                    }
                }
                Ok(words)
            }
            LineCode::Uncoded => Ok(vec![BitSequence::from_raw(vec![1]), BitSequence::from_raw(vec![0])]),
            LineCode::Repetition3 => Ok(vec![
                BitSequence::from_raw(vec![1; 3]),
                BitSequence::from_raw(vec![0; 3]),
            ]),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(s: &str) -> BitSequence {
        s.parse().unwrap()
    }

    #[test]
    fn repetition_examples() {
        assert_eq!(repetition3_encode(&b("10")), b("111000"));
        assert_eq!(repetition3_decode(&b("110")).unwrap(), b("1"));
        assert!(repetition3_decode(&b("1101")).is_err());
        for bit in ["0", "1"] {
            let word = repetition3_encode(&b(bit));
            for pos in 0..3 {
                assert_eq!(repetition3_decode(&word.flipped(pos)).unwrap(), b(bit));
            }
        }
    }

    #[test]
    fn choice_round_trip() {
        for s in ["ckm:4,5", "uncoded", "rep3"] {
            assert_eq!(s.parse::<CodeChoice>().unwrap().to_string(), s);
        }
        assert!("ckm:4".parse::<CodeChoice>().is_err());
        assert!("hamming".parse::<CodeChoice>().is_err());
        assert!(LineCode::new("ckm:4,4".parse().unwrap(), true).is_err());
    }

    #[test]
    fn channel_words_are_transmitted_forms() {
        let code = LineCode::new(CodeChoice::Proposed { k: 3, m: 4 }, true).unwrap();
        let words = code.channel_words().unwrap();
        assert_eq!(words[4], b("01010010"));
        let plain = LineCode::new(CodeChoice::Proposed { k: 3, m: 4 }, false).unwrap();
        assert_eq!(plain.channel_words().unwrap()[4], b("01100010"));
        assert!(!LineCode::Uncoded.post_encoding());
    }
}

mod common;

use isi_ecc::channel::{expected_isi, slot_probs, ChannelParams};
use isi_ecc::codebook::build_codebook;
use isi_ecc::codec::{post_encode, pre_decode, Codec, MessageWord, SwapSchedule};
use isi_ecc::{BitSequence, CodeSpec};
use proptest::prelude::*;

const SPECS: [(u32, u32); 8] = [(2, 3), (3, 4), (4, 5), (5, 6), (6, 7), (3, 9), (6, 23), (7, 27)];

fn all_messages(spec: &CodeSpec) -> impl Iterator<Item = MessageWord> + '_ {
    (0..spec.size()).map(move |v| {
        MessageWord::new(BitSequence::from_value(v, spec.k as usize), spec).unwrap()
    })
}

#[test]
fn round_trip_every_message() {
    for (k, m) in SPECS {
        let spec = CodeSpec::new(k, m).unwrap();
        for post in [true, false] {
            let codec = Codec::new(spec, post);
            for u in all_messages(&spec) {
                let enc = codec.encode(&u);
                assert_eq!(codec.decode(&enc.transmitted).unwrap(), u);
            }
        }
    }
}

#[test]
fn encoder_agrees_with_codebook_rows() {
    for (k, m) in SPECS {
        let spec = CodeSpec::new(k, m).unwrap();
        let book = build_codebook(k, m).unwrap();
        let codec = Codec::new(spec, true);
        for u in all_messages(&spec) {
            let r = (spec.size() - u.bits().value()) as usize;
            let enc = codec.encode(&u);
            assert_eq!(&enc.raw, book.row(r));
            assert_eq!(enc.transmitted, post_encode(book.row(r), &spec).unwrap());
            assert_eq!(pre_decode(&enc.transmitted, &spec).unwrap(), enc.raw);
        }
    }
}

#[test]
fn corrects_every_single_error_up_to_k6() {
    for (k, m) in SPECS.iter().copied().filter(|&(k, _)| k <= 6) {
        let spec = CodeSpec::new(k, m).unwrap();
        for post in [true, false] {
            let codec = Codec::new(spec, post);
            for u in all_messages(&spec) {
                let sent = codec.encode(&u).transmitted;
                for pos in 0..spec.n() {
                    let got = codec.decode(&sent.flipped(pos)).unwrap();
                    assert_eq!(got, u, "C({k},{m}) post={post} flip {pos}");
                }
            }
        }
    }
}

#[test]
fn swap_lowers_interference_on_target_positions() {
    for ts in [0.2, 0.3, 0.4, 1.0] {
        let profile = slot_probs(&ChannelParams::reference(ts, 1, 0.0)).unwrap();
        for (k, m) in SPECS {
            let spec = CodeSpec::new(k, m).unwrap();
            let book = build_codebook(k, m).unwrap();
            let plain = book.codewords().to_vec();
            let swapped: Vec<BitSequence> =
                plain.iter().map(|c| post_encode(c, &spec).unwrap()).collect();
            let targets: Vec<usize> = SwapSchedule::for_spec(&spec)
                .pairs()
                .iter()
                .flat_map(|&(a, b)| [a + 1, b + 1])
                .collect();
            let sum = |words: &[BitSequence]| -> f64 {
                targets.iter().map(|&i| expected_isi(words, i, &profile).unwrap()).sum()
            };
            assert!(sum(&swapped) <= sum(&plain) + 1e-15, "C({k},{m}) ts={ts}");
        }
    }
}

proptest! {
    #[test]
    fn swap_is_an_involution(word in prop::collection::vec(0u8..2, 10)) {
        let spec = CodeSpec::new(4, 5).unwrap();
        let w = BitSequence::new(word).unwrap();
        let once = post_encode(&w, &spec).unwrap();
        prop_assert_eq!(once.weight(), w.weight());
        prop_assert_eq!(&pre_decode(&once, &spec).unwrap(), &w);
        prop_assert_eq!(post_encode(&pre_decode(&w, &spec).unwrap(), &spec).unwrap(), w);
    }

    #[test]
    fn decoding_never_panics(word in prop::collection::vec(0u8..2, 12)) {
        let spec = CodeSpec::new(5, 6).unwrap();
        let codec = Codec::new(spec, true);
        let out = codec.decode(&BitSequence::new(word).unwrap()).unwrap();
        prop_assert_eq!(out.bits().len(), 5);
    }
}

mod common;

use proptest::prelude::*;
use vocab_trim::synth::{alphabet, build_vocabulary, random_words};
use vocab_trim::{corpus_select, decode, encode, with_input_tokens};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn encode_decode_round_trip(s in "\\PC{0,48}") {
        let words = random_words(&alphabet("es").unwrap(), 40, 1);
        let refs: Vec<&str> = words.iter().map(String::as_str).collect();
        let (vocab, merges) = build_vocabulary(&[], &refs, None).unwrap();
        let ids = encode(&s, &vocab, &merges).unwrap();
        prop_assert_eq!(decode(&ids, &vocab).unwrap(), s);
    }

    #[test]
    fn corpus_selection_grows_with_corpus(seed in 0u64..1000, split in 0usize..20) {
        let mut r = common::rng(seed);
        let tiny = common::tiny_bpe(&mut r, 30);
        let lines: Vec<String> = (0..20)
            .map(|_| common::random_line(&mut r, &tiny.alphabet, 16))
            .collect();
        let small = corpus_select(&tiny.vocab, &tiny.merges, &lines[..split], 10).unwrap();
        let large = corpus_select(&tiny.vocab, &tiny.merges, &lines, 10).unwrap();
        prop_assert!(small.kept().iter().all(|&id| large.contains(id)));
    }

    #[test]
    fn input_tokens_idempotent(seed in 0u64..1000) {
        let mut r = common::rng(seed);
        let tiny = common::tiny_bpe(&mut r, 20);
        let line = common::random_line(&mut r, &tiny.alphabet, 16);
        let sub = corpus_select(&tiny.vocab, &tiny.merges, [line.as_str()], 5).unwrap();
        let prompt = vec![encode(&common::random_line(&mut r, &tiny.alphabet, 16), &tiny.vocab, &tiny.merges).unwrap()];
        let once = with_input_tokens(&sub, &prompt).unwrap();
        let twice = with_input_tokens(&once, &prompt).unwrap();
        prop_assert_eq!(once.kept(), twice.kept());
        prop_assert!(prompt[0].iter().all(|&id| once.contains(id)));
    }
}

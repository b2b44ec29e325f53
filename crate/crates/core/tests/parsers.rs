//! Parser robustness: the fuzz corpus replayed on stable, plus random
//! mutations of it. Parsers must return errors, never panic.

use std::path::PathBuf;

use macsk::converse::Partition;
use macsk::schema;
use proptest::prelude::*;

fn corpus(target: &str) -> Vec<Vec<u8>> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut files: Vec<PathBuf> = std::fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| e.unwrap().path())
        .collect();
    files.sort();
    files.into_iter().map(|p| std::fs::read(p).unwrap()).collect()
}

fn feed(target: &str, data: &[u8]) -> bool {
    let text = String::from_utf8_lossy(data);
    match target {
        "channel" => schema::parse_channel(&text).is_ok(),
        "distribution" => schema::parse_distribution(&text).is_ok(),
        "observation_law" => schema::parse_observation_law(&text).is_ok(),
        "law" => schema::parse_law(&text).is_ok(),
        "interactive" => schema::parse_interactive(&text).is_ok(),
        "ct_protocol" => schema::parse_ct(&text).is_ok(),
        "partition" => match data.split_first() {
            Some((&m, rest)) => Partition::parse(m as usize % 8, &String::from_utf8_lossy(rest)).is_ok(),
            None => false,
        },
        _ => unreachable!(),
    }
}

const TARGETS: [&str; 7] = ["channel", "distribution", "observation_law", "law", "interactive", "ct_protocol", "partition"];

#[test]
fn every_target_has_an_accepted_seed() {
    for t in TARGETS {
        let seeds = corpus(t);
        assert!(!seeds.is_empty(), "{t}");
        assert!(seeds.iter().any(|s| feed(t, s)), "no seed of {t} parses");
    }
}

#[test]
fn bundled_data_files_parse() {
    let data = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data");
    let read = |n: &str| std::fs::read_to_string(data.join(n)).unwrap();
    for ch in ["adder.json", "xor.json", "noisy_adder.json"] {
        schema::parse_channel(&read(ch)).unwrap();
    }
    schema::parse_law(&read("shared_bit_law.json")).unwrap();
    schema::parse_observation_law(&read("three_bits_law.json")).unwrap();
    schema::parse_interactive(&read("interactive_two_rounds.json")).unwrap();
    schema::parse_ct(&read("ct_adder_n1.json")).unwrap();
}

fn mutation() -> impl Strategy<Value = (usize, usize, Vec<u8>, usize)> {
    (0..TARGETS.len(), any::<usize>(), prop::collection::vec(any::<u8>(), 0..8), 0..3usize)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn mutated_corpus_never_panics((t, pos, bytes, op) in mutation()) {
        let target = TARGETS[t];
        for seed in corpus(target) {
            let mut s = seed.clone();
            let at = if s.is_empty() { 0 } else { pos % s.len() };
            match op {
                0 => { s.splice(at..at, bytes.iter().copied()); }
                1 => { s.truncate(at); }
                _ => {
                    for (i, b) in bytes.iter().enumerate() {
                        if let Some(x) = s.get_mut(at + i) { *x = *b; }
                    }
                }
            }
            feed(target, &s);
        }
    }

    #[test]
    fn arbitrary_text_never_panics(s in "\\PC{0,64}", t in 0..TARGETS.len()) {
        feed(TARGETS[t], s.as_bytes());
    }
}

use std::collections::HashSet;

use proptest::prelude::*;
use saddlefocus::symbolic::{embed, embed_bits, encode, lempel_ziv, lempel_ziv_bits};
use saddlefocus::{curves, Branch, MapParams, Status};

/// Literal reading of the phrase rule: scan left to right, growing the
/// current substring until it is not in the set of phrases seen so far.
/// Quadratic and allocation-heavy on purpose.
fn brute_force_lz(bits: &[u8]) -> usize {
    let mut seen: HashSet<Vec<u8>> = HashSet::new();
    let mut start = 0;
    let mut count = 0;
    while start < bits.len() {
        let mut end = start + 1;
        while end <= bits.len() && seen.contains(&bits[start..end]) {
            end += 1;
        }
        if end > bits.len() {
            // Trailing phrase duplicates an earlier one: not counted.
            break;
        }
        seen.insert(bits[start..end].to_vec());
        count += 1;
        start = end;
    }
    count
}

fn bits(max_len: usize) -> impl Strategy<Value = Vec<u8>> {
    prop::collection::vec(0u8..=1, 1..=max_len)
}

#[test]
fn worked_example_scores_six() {
    let s = [0, 1, 0, 1, 1, 0, 0, 1, 0, 1, 1, 1];
    assert_eq!(lempel_ziv_bits(&s).unwrap(), 6);
    assert_eq!(brute_force_lz(&s), 6);
    assert_eq!(brute_force_lz(&[1, 1, 1, 1]), 2);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn trie_parse_agrees_with_brute_force(b in bits(256)) {
        prop_assert_eq!(lempel_ziv_bits(&b).unwrap(), brute_force_lz(&b));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2_000))]

    #[test]
    fn complexity_ignores_complement(b in bits(512)) {
        let flipped: Vec<u8> = b.iter().map(|x| 1 - x).collect();
        prop_assert_eq!(lempel_ziv_bits(&b).unwrap(), lempel_ziv_bits(&flipped).unwrap());
    }

    #[test]
    fn embedding_orders_like_the_words(a in prop::collection::vec(0u8..=1, 1..=53), b in prop::collection::vec(0u8..=1, 53)) {
        let b = &b[..a.len()];
        let (ea, eb) = (embed_bits(&a), embed_bits(b));
        match a.as_slice().cmp(b) {
            std::cmp::Ordering::Less => prop_assert!(ea < eb),
            std::cmp::Ordering::Greater => prop_assert!(ea > eb),
            std::cmp::Ordering::Equal => prop_assert_eq!(ea, eb),
        }
    }

    #[test]
    fn embedding_of_prefix(full in prop::collection::vec(0u8..=1, 1..=53), cut in 0usize..53) {
        let cut = cut.min(full.len());
        let (p, f) = (embed_bits(&full[..cut]), embed_bits(&full));
        prop_assert!(p <= f);
        prop_assert!(f < p + 2f64.powi(-(cut as i32)));
    }

    #[test]
    fn embedding_in_unit_interval(b in prop::collection::vec(0u8..=1, 0..300)) {
        let e = embed_bits(&b);
        prop_assert!((0.0..1.0).contains(&e));
    }
}

#[test]
fn all_ones_embeddings() {
    for n in 1..=53 {
        assert_eq!(embed_bits(&vec![1; n]), 1.0 - 2f64.powi(-(n as i32)));
    }
    // Beyond 53 symbols the value stays at the largest double below one.
    assert!(embed_bits(&[1; 64]) < 1.0);
}

#[test]
fn encoding_is_deterministic_across_threads() {
    let p = MapParams::symmetric(0.5, 0.05, 10.0).unwrap();
    let reference = encode(&p, Branch::Positive, 5000, 1e-12).unwrap();
    let handles: Vec<_> = (0..8)
        .map(|_| std::thread::spawn(move || encode(&p, Branch::Positive, 5000, 1e-12).unwrap()))
        .collect();
    for h in handles {
        assert_eq!(h.join().unwrap(), reference);
    }
}

#[test]
fn secondary_homoclinic_codes_as_one_one() {
    let mu = curves::find_secondary(0.5, 3.6, (1e-3, 0.3)).expect("a secondary root below 0.3");
    let p = MapParams::symmetric(0.5, mu, 3.6).unwrap();
    let s = encode(&p, Branch::Positive, 64, 1e-12).unwrap();
    assert_eq!(s.bits, vec![1, 1]);
    assert!(s.terminated);
    assert_eq!(s.source_status, Status::ReachedZero);
}

#[test]
fn contracting_region_codes_all_ones() {
    let p = MapParams::symmetric(3.0, 0.05, 2.0).unwrap();
    let s = encode(&p, Branch::Positive, 64, 1e-12).unwrap();
    assert_eq!(s.bits, vec![1; 64]);
    assert!(embed(&s) < 1.0);
    assert_eq!(lempel_ziv(&s).unwrap(), lempel_ziv_bits(&[1; 64]).unwrap());
}

//! Randomized invariants, shrunk automatically on failure.

use proptest::prelude::*;

use fsdim::alphabet::{pair, PairPolicy, SymbolString};
use fsdim::blockstats::{
    block_freq_table, decode_block, encode_block, joint_block_freq_table, marginals,
    mutual_information,
};
use fsdim::huffman::codebook_for_string;
use fsdim::ratios::rho_c;
use fsdim::fsc::Fsc;

fn symbol_string(k: usize, max_len: usize) -> impl Strategy<Value = SymbolString> {
    prop::collection::vec(0..k as u32, 1..=max_len)
        .prop_map(move |data| SymbolString::new(k, data).unwrap())
}

proptest! {
    #[test]
    fn pair_unzip_roundtrip(
        k in 2usize..=4,
        seed in prop::collection::vec(0u32..16, 1..200),
    ) {
        let data_u: Vec<u32> = seed.iter().map(|&x| x % k as u32).collect();
        let data_w: Vec<u32> = seed.iter().map(|&x| (x / 4) % k as u32).collect();
        let u = SymbolString::new(k, data_u).unwrap();
        let w = SymbolString::new(k, data_w).unwrap();
        let p = pair(&u, &w, PairPolicy::Strict).unwrap();
        let (u2, w2) = p.unzip();
        prop_assert_eq!(u, u2);
        prop_assert_eq!(w, w2);
    }

    #[test]
    fn block_codec_roundtrip(k in 2usize..=5, l in 1usize..=6, raw in 0u64..1_000_000) {
        let cells = (k as u64).pow(l as u32);
        let idx = raw % cells;
        let symbols = decode_block(idx, k, l);
        prop_assert_eq!(symbols.len(), l);
        prop_assert!(symbols.iter().all(|&s| (s as usize) < k));
        prop_assert_eq!(encode_block(&symbols, k), idx);
    }

    #[test]
    fn entropy_within_range(u in symbol_string(3, 300), l in 1usize..=3) {
        prop_assume!(u.len() >= l);
        let trimmed = fsdim::alphabet::prefix_truncate(&u, l).unwrap();
        let h = block_freq_table(&trimmed, l).unwrap().entropy();
        prop_assert!(h >= 0.0);
        prop_assert!(h <= l as f64 * 3f64.log2() + 1e-12);
    }

    #[test]
    fn marginals_sum_to_joint_total(
        u in symbol_string(2, 300),
        w in symbol_string(2, 300),
        l in 1usize..=3,
    ) {
        let n = u.len().min(w.len());
        prop_assume!(n >= l);
        let ul = fsdim::alphabet::prefix_truncate(&u.prefix(n), l).unwrap();
        let wl = fsdim::alphabet::prefix_truncate(&w.prefix(n), l).unwrap();
        let j = joint_block_freq_table(&ul, &wl, l).unwrap();
        let (ma, mb) = marginals(&j);
        prop_assert_eq!(ma.total(), j.total());
        prop_assert_eq!(mb.total(), j.total());
        prop_assert_eq!(ma.clone(), block_freq_table(&ul, l).unwrap());
        prop_assert_eq!(mb.clone(), block_freq_table(&wl, l).unwrap());
        // mutual information never exceeds either marginal entropy
        let i = mutual_information(&j);
        prop_assert!(i >= -1e-12);
        prop_assert!(i <= ma.entropy().min(mb.entropy()) + 1e-12);
    }

    #[test]
    fn huffman_codebook_prefix_free(u in symbol_string(2, 400), l in 1usize..=3) {
        prop_assume!(u.len() >= l);
        let (_, book) = codebook_for_string(&u, l).unwrap();
        let words: Vec<&str> = book.iter().map(|(_, c)| c).collect();
        for (i, a) in words.iter().enumerate() {
            for (j, b) in words.iter().enumerate() {
                if i != j {
                    prop_assert!(!b.starts_with(*a), "{a} is a prefix of {b}");
                }
            }
        }
    }

    #[test]
    fn identity_ratio_is_one_for_power_of_two(u in symbol_string(2, 200)) {
        let id = Fsc::identity(2).unwrap();
        prop_assert_eq!(rho_c(&id, &u).unwrap(), 1.0);
    }

    #[test]
    fn relabel_swap_is_an_involution(u in symbol_string(2, 200), w in symbol_string(2, 200)) {
        let n = u.len().min(w.len());
        let p = pair(&u.prefix(n), &w.prefix(n), PairPolicy::Strict).unwrap();
        let m = fsdim::huffman::build_for_string(p.as_symbol_string(), 1).unwrap();
        let swapped_twice = m.relabel_swap().unwrap().relabel_swap().unwrap();
        prop_assert_eq!(m.to_json_string(), swapped_twice.to_json_string());
    }
}

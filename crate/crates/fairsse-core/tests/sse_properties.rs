//! Property tests: encrypted search against the plaintext scan oracle,
//! the padding/row-count formula, label ordering, and codec round-trips.

mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use common::{plaintext_scan, random_database};
use fairsse_core::crypto::SecurityParam;
use fairsse_core::sse::{
    decode_index, derive_trapdoor, encode_index, search, setup, SearchPaging,
};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// Search over the encrypted index returns exactly what a plaintext
    /// scan returns, for every keyword in random databases.
    #[test]
    fn search_matches_plaintext_scan(seed in any::<u64>(), p in 1usize..=8) {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let db = random_database(&mut rng, 20, 40);
        let (master, index) = setup(&db, SecurityParam::DEFAULT, p, &mut rng).unwrap();
        for keyword in db.keywords() {
            let trapdoor = derive_trapdoor(&master, keyword).unwrap();
            let got = search(&index, &trapdoor, SearchPaging::ample());
            prop_assert_eq!(got, plaintext_scan(&db, keyword));
        }
        // Absent keywords return nothing.
        let absent = derive_trapdoor(&master, "definitely-absent").unwrap();
        prop_assert!(search(&index, &absent, SearchPaging::ample()).is_empty());
    }

    /// rows-per-keyword = floor(|DB(w)|/p) + 1, and the index total is the
    /// sum over keywords; every payload is exactly p * 16 bytes.
    #[test]
    fn row_count_formula_and_padding(seed in any::<u64>(), p in 1usize..=8) {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let db = random_database(&mut rng, 15, 30);
        let (_, index) = setup(&db, SecurityParam::DEFAULT, p, &mut rng).unwrap();
        let expected: usize = db
            .keywords()
            .map(|w| db.ids(w).unwrap().len() / p + 1)
            .sum();
        prop_assert_eq!(index.row_count(), expected);
        for row in index.rows() {
            prop_assert_eq!(row.payload.len(), p * 16);
            prop_assert_eq!(row.nonce.len(), 32);
        }
    }

    /// Rows are strictly ascending by label bytes; labels are unique.
    #[test]
    fn rows_sorted_with_unique_labels(seed in any::<u64>()) {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let db = random_database(&mut rng, 12, 25);
        let (_, index) = setup(&db, SecurityParam::DEFAULT, 4, &mut rng).unwrap();
        for pair in index.rows().windows(2) {
            prop_assert!(pair[0].label < pair[1].label);
        }
    }

    /// The binary codec round-trips bit-exactly.
    #[test]
    fn codec_round_trip(seed in any::<u64>(), p in 1usize..=6) {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let db = random_database(&mut rng, 10, 20);
        let (_, index) = setup(&db, SecurityParam::DEFAULT, p, &mut rng).unwrap();
        let bytes = encode_index(&index);
        let decoded = decode_index(&bytes).unwrap();
        prop_assert_eq!(&decoded, &index);
        prop_assert_eq!(encode_index(&decoded), bytes);
    }

    /// Setup is deterministic per seed, byte for byte.
    #[test]
    fn setup_reproducible_per_seed(seed in any::<u64>()) {
        let build = || {
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            let db = random_database(&mut rng, 10, 20);
            let (_, index) = setup(&db, SecurityParam::DEFAULT, 2, &mut rng).unwrap();
            encode_index(&index)
        };
        prop_assert_eq!(build(), build());
    }
}

#[test]
fn non_default_lambda_changes_nonce_width() {
    let mut rng = ChaCha20Rng::seed_from_u64(7);
    let db = random_database(&mut rng, 5, 10);
    let lambda = SecurityParam::new(128).unwrap();
    let (master, index) = setup(&db, lambda, 2, &mut rng).unwrap();
    assert_eq!(index.rows()[0].nonce.len(), 16);
    for keyword in db.keywords() {
        let t = derive_trapdoor(&master, keyword).unwrap();
        assert_eq!(
            search(&index, &t, SearchPaging::ample()),
            plaintext_scan(&db, keyword)
        );
    }
}

//! Compares the rayon-backed batch paths against the always-available
//! sequential fallbacks on the two hot loops: evaluating many searches
//! against one index, and sweeping oracle checks over many databases.
//!
//! Run with `cargo bench -p fairsse-core`.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use fairsse_core::batch::{map_collect, map_collect_seq};
use fairsse_core::crypto::SecurityParam;
use fairsse_core::sse::{
    derive_trapdoor, search, setup, Database, EncryptedIndex, FileId, MasterKey, SearchPaging,
    Trapdoor,
};

fn build_database(rng: &mut ChaCha20Rng, keywords: usize, max_ids: usize) -> Database {
    let mut db = Database::new();
    for k in 0..keywords {
        let keyword = format!("kw{k:04}");
        for _ in 0..rng.gen_range(1..=max_ids) {
            let mut raw = [0u8; 16];
            rng.fill(&mut raw);
            raw[0] &= 0x7F;
            db.insert(&keyword, FileId(raw));
        }
    }
    db
}

fn search_many(c: &mut Criterion) {
    let mut rng = ChaCha20Rng::seed_from_u64(1);
    let db = build_database(&mut rng, 400, 48);
    let (master, index): (MasterKey, EncryptedIndex) =
        setup(&db, SecurityParam::DEFAULT, 2, &mut rng).unwrap();
    let trapdoors: Vec<Trapdoor> = db
        .keywords()
        .map(|w| derive_trapdoor(&master, w).unwrap())
        .collect();

    let mut group = c.benchmark_group("search_many");
    group.bench_with_input(
        BenchmarkId::new("sequential", trapdoors.len()),
        &trapdoors,
        |b, ts| {
            b.iter(|| map_collect_seq(ts, |t| search(&index, t, SearchPaging::ample()).len()))
        },
    );
    group.bench_with_input(
        BenchmarkId::new("parallel", trapdoors.len()),
        &trapdoors,
        |b, ts| b.iter(|| map_collect(ts, |t| search(&index, t, SearchPaging::ample()).len())),
    );
    group.finish();
}

fn oracle_sweep(c: &mut Criterion) {
    let seeds: Vec<u64> = (0..32).collect();
    let check_one = |&seed: &u64| {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let db = build_database(&mut rng, 24, 24);
        let (master, index) = setup(&db, SecurityParam::DEFAULT, 4, &mut rng).unwrap();
        let mut matched = 0usize;
        for keyword in db.keywords() {
            let t = derive_trapdoor(&master, keyword).unwrap();
            let got = search(&index, &t, SearchPaging::ample());
            if got == db.ids(keyword).unwrap() {
                matched += 1;
            }
        }
        matched
    };

    let mut group = c.benchmark_group("oracle_sweep");
    group.sample_size(20);
    group.bench_function("sequential", |b| {
        b.iter(|| black_box(map_collect_seq(&seeds, check_one)))
    });
    group.bench_function("parallel", |b| {
        b.iter(|| black_box(map_collect(&seeds, check_one)))
    });
    group.finish();
}

criterion_group!(benches, search_many, oracle_sweep);
criterion_main!(benches);

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use shuffle_lab_core::{
    indec, magnus, poly,
    unipotent::{self, Modulus},
    words, Alphabet,
};

fn bench_shuffle(c: &mut Criterion) {
    let ab = Alphabet::new(2).unwrap();
    let u = ab.parse_word("abab").unwrap();
    let v = ab.parse_word("abba").unwrap();
    c.bench_function("shuffle 4x4 letters", |b| {
        b.iter(|| poly::shuffle_words(black_box(&u), black_box(&v)))
    });

    let w = ab.parse_word("aababb").unwrap();
    c.bench_function("radford polynomial, degree 6", |b| {
        b.iter(|| poly::radford_q(black_box(&w)).unwrap())
    });
}

fn bench_lyndon(c: &mut Criterion) {
    let abc = Alphabet::new(3).unwrap();
    c.bench_function("lyndon words m=3 s=9", |b| {
        b.iter(|| words::lyndon_words(black_box(&abc), 9))
    });
}

fn bench_group_closure(c: &mut Criterion) {
    let m3 = Modulus::new(3, 1).unwrap();
    c.bench_function("full U_3(Z/3), 729 elements", |b| {
        b.iter(|| unipotent::full_group(3, m3, 1 << 16).unwrap())
    });
}

fn bench_rank(c: &mut Criterion) {
    c.bench_function("indecomposable dim m=2 s=6 p=7", |b| {
        b.iter(|| indec::indec_dim_mod_p(2, 6, 7).unwrap())
    });
}

fn bench_magnus(c: &mut Criterion) {
    let ab = Alphabet::new(2).unwrap();
    let sigma = magnus::GroupWord::parse("ab'ab'ab'ab'aab'b'a'b", &ab).unwrap();
    let q25 = Modulus::from_q(25).unwrap();
    c.bench_function("magnus expansion, 14 syllables, q=25, degree 5", |b| {
        b.iter(|| magnus::magnus_eval(black_box(&sigma), q25, 5))
    });
}

criterion_group!(
    benches,
    bench_shuffle,
    bench_lyndon,
    bench_group_closure,
    bench_rank,
    bench_magnus
);
criterion_main!(benches);

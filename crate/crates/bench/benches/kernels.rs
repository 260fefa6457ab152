use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use jointcok::nonabelian::{inverse_basis_words, pair_moment_random_quotients, GroupSpec, SmallGroup};
use jointcok::{sample_matrix, smith_normal_form, sur_count, EntrySampler, PGroupType};

fn snf(c: &mut Criterion) {
    let mut g = c.benchmark_group("snf");
    for n in [16usize, 48, 96] {
        let a = sample_matrix(&EntrySampler::HaarUniform, n, n, 3, 4, 1, 0).unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(n), &a, |b, a| b.iter(|| smith_normal_form(black_box(a))));
    }
    g.finish();
}

fn sampling(c: &mut Criterion) {
    let mut g = c.benchmark_group("sample_64x64");
    for spec in ["uniform", "categorical:0.5,0.25,0.25", "sparse:log"] {
        let s: EntrySampler = spec.parse().unwrap();
        let mut stream = 0;
        g.bench_function(spec, |b| {
            b.iter(|| {
                stream += 1;
                sample_matrix(&s, 64, 64, 3, 3, 7, stream).unwrap()
            })
        });
    }
    g.finish();
}

fn surjections(c: &mut Criterion) {
    let g = PGroupType::of(2, &[3, 2, 2, 1]);
    let h = PGroupType::of(2, &[2, 1, 1]);
    c.bench_function("sur_count_2^8_onto_2^4", |b| b.iter(|| sur_count(black_box(&g), black_box(&h)).unwrap()));
}

fn pair_moment(c: &mut Criterion) {
    let s3 = SmallGroup::from_spec(&"S3".parse::<GroupSpec>().unwrap()).unwrap();
    let c2 = SmallGroup::from_spec(&"C2".parse::<GroupSpec>().unwrap()).unwrap();
    let words = inverse_basis_words(3, 0);
    c.bench_function("pair_moment_s3_c2_n3", |b| {
        b.iter(|| pair_moment_random_quotients(3, 0, &s3, &c2, &words).unwrap())
    });
}

criterion_group!(benches, snf, sampling, surjections, pair_moment);
criterion_main!(benches);

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};

use sigx::grammar::SignatureDag;
use sigx::lz77::Lz77Parse;
use sigx::oracle::naive_search;
use sigx::{CompressedIndex, Mode, PlannerConfig};
use sigx_bench::{repetitive, sample_patterns, SEED};

const N: usize = 1 << 18;

fn construction(c: &mut Criterion) {
    let text = repetitive(N);
    let mut group = c.benchmark_group("build");
    group.sample_size(10);
    group.throughput(Throughput::Bytes(N as u64));
    group.bench_function("lz77", |b| b.iter(|| Lz77Parse::parse(black_box(&text)).unwrap()));
    group.bench_function("grammar", |b| b.iter(|| SignatureDag::build(black_box(&text), SEED).unwrap()));
    for mode in Mode::ALL {
        let config = PlannerConfig::default().with_seed(SEED).with_mode(mode);
        group.bench_with_input(BenchmarkId::new("index", mode), &config, |b, config| {
            b.iter(|| CompressedIndex::build(black_box(&text), config).unwrap())
        });
    }
    group.finish();
}

fn locate(c: &mut Criterion) {
    let text = repetitive(N);
    for mode in Mode::ALL {
        let index = CompressedIndex::build(&text, &PlannerConfig::default().with_seed(SEED).with_mode(mode)).unwrap();
        let mut group = c.benchmark_group(format!("locate/{mode}"));
        for m in [3, 8, 32, 256] {
            let patterns = sample_patterns(&text, m, 64);
            group.throughput(Throughput::Elements(patterns.len() as u64));
            group.bench_with_input(BenchmarkId::from_parameter(m), &patterns, |b, patterns| {
                b.iter(|| patterns.iter().map(|p| index.locate(black_box(p)).len()).sum::<usize>())
            });
        }
        group.finish();
    }

    // Baseline for the same workload.
    let mut group = c.benchmark_group("locate/naive");
    group.sample_size(10);
    let patterns = sample_patterns(&text, 32, 64);
    group.bench_function("32", |b| b.iter(|| patterns.iter().map(|p| naive_search(&text, p).len()).sum::<usize>()));
    group.finish();
}

fn serialization(c: &mut Criterion) {
    let text = repetitive(N);
    let index = CompressedIndex::build(&text, &PlannerConfig::default().with_seed(SEED)).unwrap();
    let bytes = index.to_bytes();
    let mut group = c.benchmark_group("serialize");
    group.throughput(Throughput::Bytes(bytes.len() as u64));
    group.bench_function("encode", |b| b.iter(|| index.to_bytes()));
    group.bench_function("decode", |b| b.iter(|| CompressedIndex::from_bytes(black_box(&bytes)).unwrap()));
    group.finish();
}

criterion_group!(benches, construction, locate, serialization);
criterion_main!(benches);

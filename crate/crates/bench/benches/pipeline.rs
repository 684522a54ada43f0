use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BatchSize, Criterion, Throughput};
use oodgate::dataio::{read_oodf, write_oodf, OodfContainer};
use oodgate::experiment::score_sets;
use oodgate::{auroc, build_masks, fpr_at_tpr, FittedDetector};
use oodgate_bench::{dataset, fitted, full_method_config};

fn scoring(c: &mut Criterion) {
    let data = dataset(4);
    let det = fitted(&data);
    let mut g = c.benchmark_group("score");
    g.throughput(Throughput::Elements(data.test_id.len() as u64));
    g.bench_function("full_method_batch", |b| {
        b.iter(|| det.score_batch(black_box(&data.test_id)))
    });
    let plain = det.with_stages(false, false, false);
    g.bench_function("energy_batch", |b| {
        b.iter(|| plain.score_batch(black_box(&data.test_id)))
    });
    g.finish();
}

fn metrics(c: &mut Criterion) {
    let data = dataset(1);
    let set = score_sets(&fitted(&data), &data.test_id, &data.test_ood).unwrap();
    c.bench_function("auroc_2000x2000", |b| b.iter(|| auroc(black_box(&set))));
    c.bench_function("fpr95_2000x2000", |b| {
        b.iter(|| fpr_at_tpr(black_box(&set), 0.95))
    });
}

fn fitting(c: &mut Criterion) {
    let data = dataset(4);
    let labels = data.train.labels().unwrap();
    c.bench_function("build_masks_512x10", |b| {
        b.iter(|| build_masks(black_box(data.head.weights()), 205))
    });
    c.bench_function("fit_percentile_lambda", |b| {
        b.iter(|| FittedDetector::fit(&data.train, labels, &data.head, full_method_config()))
    });
}

fn container(c: &mut Criterion) {
    let data = dataset(4);
    let spec = oodgate::dataio::SyntheticSpec::benchmark();
    let container = data.to_container(&spec);
    let mut bytes = Vec::new();
    write_oodf(&container, &mut bytes).unwrap();
    let mut g = c.benchmark_group("oodf");
    g.throughput(Throughput::Bytes(bytes.len() as u64));
    g.bench_function("write", |b| {
        b.iter_batched(
            Vec::new,
            |mut sink| write_oodf(&container, &mut sink),
            BatchSize::LargeInput,
        )
    });
    g.bench_function("read", |b| {
        b.iter(|| read_oodf(black_box(bytes.as_slice())))
    });
    g.bench_function("detector_round_trip", |b| {
        let det = fitted(&data);
        b.iter(|| {
            let bytes = OodfContainer::from_detector(&det).to_bytes().unwrap();
            OodfContainer::from_bytes(&bytes).unwrap().fitted_detector()
        })
    });
    g.finish();
}

criterion_group!(benches, scoring, metrics, fitting, container);
criterion_main!(benches);

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use hmlcr_bench::{corpus, problem};
use hmlcr_core::corpus::tokenize_text;
use hmlcr_core::features::extract_features;
use hmlcr_core::hmlcr::{cfa_init, grad_u, grad_v, total_loss, train};
use hmlcr_core::{Hyperparams, LanguageProfile};
use std::hint::black_box;

fn features(c: &mut Criterion) {
    let profile = LanguageProfile::java();
    let mut group = c.benchmark_group("extract_features");
    for labels in [10, 40] {
        let docs = corpus(labels, 0).documents;
        group.bench_with_input(BenchmarkId::from_parameter(docs.len()), &docs, |b, docs| {
            b.iter(|| extract_features(black_box(docs), &profile))
        });
    }
    group.finish();
}

fn gradients(c: &mut Criterion) {
    let (_, p, hyper) = problem(20, 16);
    let init = cfa_init(&p.x, &p.y, hyper.k, 0).unwrap();
    c.bench_function("total_loss", |b| {
        b.iter(|| total_loss(black_box(&init.u), &init.v, &p, &hyper))
    });
    c.bench_function("grad_u", |b| b.iter(|| grad_u(black_box(&init.u), &init.v, &p, &hyper)));
    c.bench_function("grad_v", |b| b.iter(|| grad_v(black_box(&init.u), &init.v, &p, &hyper)));
    c.bench_function("cfa_init", |b| {
        b.iter(|| cfa_init(black_box(&p.x), &p.y, hyper.k, 0).unwrap())
    });
}

fn training(c: &mut Criterion) {
    let (_, p, hyper) = problem(20, 16);
    let hyper = Hyperparams {
        max_iter: 10,
        tol: 0.0,
        ..hyper
    };
    c.bench_function("train_10_iterations", |b| {
        b.iter(|| train(black_box(&p), &hyper).unwrap())
    });
}

fn ranking(c: &mut Criterion) {
    let (index, p, hyper) = problem(40, 16);
    let init = cfa_init(&p.x, &p.y, hyper.k, 0).unwrap();
    let retrieval = index.retrieval_index(init.u, init.v, 0.5).unwrap();
    let q = retrieval.query_vector(&tokenize_text("open the settings file and save it"));
    c.bench_function("rank_top_10", |b| b.iter(|| retrieval.rank(black_box(&q), 10).unwrap()));
}

criterion_group!(benches, features, gradients, training, ranking);
criterion_main!(benches);

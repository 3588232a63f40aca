use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use sentimix_bench::{synthetic_conll, synthetic_corpus, synthetic_predictions};
use sentimix_core::*;

const SIZES: [usize; 2] = [1_000, 10_000];

fn corpus_io(c: &mut Criterion) {
    let mut g = c.benchmark_group("corpus");
    for n in SIZES {
        let text = synthetic_conll(n, 7);
        g.bench_with_input(BenchmarkId::new("parse", n), &text, |b, t| {
            b.iter(|| parse_conll_str(black_box(t)).unwrap())
        });
        let corpus = parse_conll_str(&text).unwrap();
        g.bench_with_input(BenchmarkId::new("write", n), &corpus, |b, c| {
            b.iter(|| write_conll(black_box(c)))
        });
        g.bench_with_input(BenchmarkId::new("normalize", n), &corpus, |b, c| {
            b.iter(|| normalize_corpus(black_box(c)))
        });
    }
    g.finish();
}

fn naive_bayes(c: &mut Criterion) {
    let mut g = c.benchmark_group("naive_bayes");
    g.sample_size(20);
    let train_corpus = synthetic_corpus(5_000, 11);
    let test_corpus = synthetic_corpus(1_000, 12);
    let train_clean = normalize_corpus(&train_corpus);
    let test_clean = normalize_corpus(&test_corpus);
    let data: Vec<(&CleanText, SentimentLabel)> = train_clean
        .iter()
        .zip(&train_corpus)
        .map(|((_, t), tw)| (t, tw.gold().unwrap()))
        .collect();
    for config in [
        NbConfig::default(),
        NbConfig::new(NgramUnit::Char, 2, 4, 1.0).unwrap(),
    ] {
        let id = config.model_id();
        g.bench_function(BenchmarkId::new("train", &id), |b| {
            b.iter(|| train(data.iter().map(|&(t, l)| (t, l)), black_box(&config)).unwrap())
        });
        let model = train(data.iter().copied(), &config).unwrap();
        g.bench_function(BenchmarkId::new("predict", &id), |b| {
            b.iter(|| model.predict_corpus(black_box(&test_clean), &id).unwrap())
        });
    }
    g.finish();
}

fn ensemble_and_metrics(c: &mut Criterion) {
    let mut g = c.benchmark_group("ensemble");
    for n in SIZES {
        let corpus = synthetic_corpus(n, 21);
        let sets: Vec<PredictionSet> = (0..4)
            .map(|j| synthetic_predictions(&corpus, &format!("m{j}"), 100 + j as u64))
            .collect();
        let uniform = EnsembleConfig::uniform();
        g.bench_with_input(BenchmarkId::new("combine4", n), &sets, |b, s| {
            b.iter(|| combine(black_box(s), &uniform).unwrap())
        });
        let combined = combine(&sets, &uniform).unwrap();
        let text = format_predictions(&combined);
        g.bench_with_input(BenchmarkId::new("tsv_write", n), &combined, |b, s| {
            b.iter(|| format_predictions(black_box(s)))
        });
        g.bench_with_input(BenchmarkId::new("tsv_read", n), &text, |b, t| {
            b.iter(|| read_predictions_str(black_box(t)).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("evaluate", n), &combined, |b, s| {
            b.iter(|| evaluate(&corpus, black_box(s)).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, corpus_io, naive_bayes, ensemble_and_metrics);
criterion_main!(benches);

use criterion::{criterion_group, criterion_main, Criterion};
use relaylab_bench::{argmax_distribution, orthogonal_bsc, sim_params};
use relaylab_core::{
    build_joint, cf_rate, evaluate_bounds, CfMode, DecoderKind, Protocol, SearchConfig,
};
use std::hint::black_box;

fn information(c: &mut Criterion) {
    let ch = orthogonal_bsc();
    let d = argmax_distribution(&ch);
    let joint = build_joint(&ch, &d).unwrap();
    c.bench_function("mutual_information", |b| {
        b.iter(|| {
            joint
                .mutual_information(black_box(&["X1"]), &["Yhat", "Y3"], &["X2"])
                .unwrap()
        })
    });
    c.bench_function("evaluate_bounds", |b| {
        b.iter(|| evaluate_bounds(&ch, black_box(&d)).unwrap())
    });
}

fn search(c: &mut Criterion) {
    let ch = orthogonal_bsc();
    let mut g = c.benchmark_group("cf_rate");
    g.sample_size(10);
    for (res, yhat) in [(4, 2), (8, 3)] {
        let cfg = SearchConfig {
            grid_resolution: res,
            yhat_max_size: yhat,
            include_degenerate: true,
        };
        g.bench_function(format!("grid{res}_yhat{yhat}"), |b| {
            b.iter(|| cf_rate(&ch, black_box(&cfg), CfMode::MinForm).unwrap())
        });
    }
    g.finish();
}

fn trial(c: &mut Criterion) {
    let ch = orthogonal_bsc();
    let d = argmax_distribution(&ch);
    let mut g = c.benchmark_group("trial");
    for decoder in [DecoderKind::Sliding, DecoderKind::Backward] {
        let proto = Protocol::new(&ch, &d, &sim_params(8, decoder)).unwrap();
        let mut t = 0u64;
        g.bench_function(decoder.as_str(), |b| {
            b.iter(|| {
                t += 1;
                proto.run_trial(t).unwrap()
            })
        });
    }
    g.finish();
}

criterion_group!(benches, information, search, trial);
criterion_main!(benches);

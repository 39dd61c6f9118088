//! Pipeline timings. Benchmark ids carry the build mode, so running
//!
//! ```text
//! cargo bench -p labe-core
//! cargo bench -p labe-core --no-default-features
//! ```
//!
//! leaves `parallel/...` and `sequential/...` results side by side.

use std::time::Duration;

use criterion::{criterion_group, criterion_main, Criterion};
use labe_core::abe::{decrypt_bytes, encrypt_bytes, keygen, select_params, setup, Profile};
use labe_core::lsss::{attr_set, compile_lsss, parse_policy};
use labe_core::par::PARALLEL;
use labe_core::RandomSource;

fn mode() -> &'static str {
    if PARALLEL {
        "parallel"
    } else {
        "sequential"
    }
}

fn pipeline(c: &mut Criterion) {
    let params = select_params(4, 2, Profile::Toy).unwrap();
    let mut rng = RandomSource::from_seed([7; 32]);
    let (pp, msk) = setup(&params, &mut rng).unwrap();
    let policy = compile_lsss(&parse_policy("a AND b").unwrap(), params.q()).padded(2).unwrap();
    let sk = keygen(&pp, &msk, &policy, &mut rng).unwrap();
    let attrs = attr_set(["a", "b"]);
    let payload = *b"0123456789abcdef";
    let cts = encrypt_bytes(&pp, &attrs, &payload, &mut rng).unwrap();

    let mut group = c.benchmark_group(mode());
    group.sample_size(10).measurement_time(Duration::from_secs(10));
    group.bench_function("setup n=4 L=2", |b| b.iter(|| setup(&params, &mut rng).unwrap()));
    group.bench_function("keygen a AND b", |b| b.iter(|| keygen(&pp, &msk, &policy, &mut rng).unwrap()));
    group.bench_function("encrypt 16 bytes", |b| b.iter(|| encrypt_bytes(&pp, &attrs, &payload, &mut rng).unwrap()));
    group.bench_function("decrypt 16 bytes", |b| b.iter(|| decrypt_bytes(&pp, &sk, &cts).unwrap()));
    group.finish();
}

criterion_group!(benches, pipeline);
criterion_main!(benches);

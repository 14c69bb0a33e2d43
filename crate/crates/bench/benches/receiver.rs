use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion, Throughput};
use epmodem::experiments::{build_link, LinkConfig};
use epmodem::{receive, ReceiverConfig};

fn receiver(c: &mut Criterion) {
    let link = build_link(&LinkConfig::new(10, 3)).unwrap();
    let cfg = ReceiverConfig::default();
    let mut g = c.benchmark_group("receive");
    g.sample_size(20);
    g.throughput(Throughput::Elements(link.signal.len() as u64));
    g.bench_function("ten_frames", |b| b.iter(|| receive(black_box(&link.signal), 3, &cfg).unwrap()));
    g.finish();
}

criterion_group!(benches, receiver);
criterion_main!(benches);

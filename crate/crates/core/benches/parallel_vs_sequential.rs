use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use spanlab::graph_model::{sample_instance, LowerBoundParams};
use spanlab::spanners::greedy_spanner;
use spanlab::traversal::critical_edges_k;
use spanlab::verify::stretch_check;
use spanlab::Execution;

const POLICIES: [(&str, Execution); 2] = [
    ("sequential", Execution::Sequential),
    ("parallel", Execution::Parallel),
];

fn criticality(c: &mut Criterion) {
    let mut group = c.benchmark_group("critical_edges");
    for (n, t) in [(256, 2), (1024, 2), (256, 3)] {
        let p = LowerBoundParams::derive(n, t).unwrap();
        let g = sample_instance(&p, 1);
        for (name, exec) in POLICIES {
            group.bench_with_input(BenchmarkId::new(name, format!("n{n}_t{t}")), &g, |b, g| {
                b.iter(|| critical_edges_k(black_box(g), p.k as usize, exec))
            });
        }
    }
    group.finish();
}

fn stretch(c: &mut Criterion) {
    let mut group = c.benchmark_group("stretch_check");
    group.sample_size(20);
    for n in [1024, 4096] {
        let p = LowerBoundParams::derive(n, 2).unwrap();
        let g = sample_instance(&p, 2).to_graph();
        let s = greedy_spanner(&g, 3).edges;
        for (name, exec) in POLICIES {
            group.bench_with_input(BenchmarkId::new(name, n), &(&g, &s), |b, (g, s)| {
                b.iter(|| stretch_check(black_box(g), black_box(s), 3, exec).unwrap())
            });
        }
    }
    group.finish();
}

fn batch_sampling(c: &mut Criterion) {
    let mut group = c.benchmark_group("sample_batch");
    group.sample_size(10);
    let p = LowerBoundParams::derive(4096, 2).unwrap();
    for (name, exec) in POLICIES {
        group.bench_function(BenchmarkId::new(name, "n4096_x16"), |b| {
            b.iter(|| exec.map_range(16, |s| sample_instance(&p, s as u64).red_edge_count()))
        });
    }
    group.finish();
}

criterion_group!(benches, criticality, stretch, batch_sampling);
criterion_main!(benches);

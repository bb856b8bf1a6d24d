use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use ecnf2mip::ecnf::{normalize_theory, Theory};
use ecnf2mip::io::parse_ecnf_text;
use ecnf2mip::oracle::brute_force_optimum_with;
use ecnf2mip::par::Execution;
use ecnf2mip::verify::{verify_theory, VerifyOptions};

fn load(text: &str) -> Theory {
    normalize_theory(&parse_ecnf_text(text).unwrap()).unwrap()
}

/// A chain of 16 atoms with pairwise exclusions; 2^16 candidate assignments.
fn chain() -> Theory {
    let mut text = String::from("theory chain\natom");
    for i in 0..16 {
        text.push_str(&format!(" p{i}"));
    }
    text.push('\n');
    for i in 0..15 {
        text.push_str(&format!("clause -p{i} | -p{}\n", i + 1));
    }
    text.push_str("minimize");
    for i in 0..16 {
        text.push_str(&format!(" - {} p{i}", i % 3 + 1));
    }
    text.push('\n');
    load(&text)
}

fn modes() -> Vec<(&'static str, Execution)> {
    let mut m = vec![("sequential", Execution::Sequential)];
    if Execution::parallel_available() {
        m.push(("parallel", Execution::Parallel));
    }
    m
}

fn oracle(c: &mut Criterion) {
    let theories = [
        ("chain16", chain()),
        ("shifts", load(include_str!("../tests/golden/shifts.ecnf"))),
        ("tsp3", load(include_str!("../tests/data/tsp3.ecnf"))),
    ];
    let mut group = c.benchmark_group("oracle");
    group.sample_size(10);
    for (name, t) in &theories {
        for (mode, exec) in modes() {
            group.bench_with_input(BenchmarkId::new(mode, name), t, |b, t| {
                b.iter(|| brute_force_optimum_with(black_box(t), exec).unwrap())
            });
        }
    }
    group.finish();
}

fn verify(c: &mut Criterion) {
    let t = parse_ecnf_text(include_str!("../tests/golden/shifts.ecnf")).unwrap();
    let mut group = c.benchmark_group("verify");
    group.sample_size(10);
    for (mode, exec) in modes() {
        let opts = VerifyOptions { execution: exec, ..VerifyOptions::default() };
        group.bench_function(BenchmarkId::new(mode, "shifts"), |b| {
            b.iter(|| verify_theory(black_box(&t), &opts).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, oracle, verify);
criterion_main!(benches);

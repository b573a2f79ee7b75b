// SPDX-License-Identifier: Apache-2.0

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use mrfbound_core::coretail::check_all;
use mrfbound_core::mechanisms::optimal_rev;
use mrfbound_core::mrf::{
    agreement_potential, check_conditioning_bounds, numeric_labels, ConditioningOptions, HyperEdge, Mrf,
};
use mrfbound_core::ocrs::{hard_ocrs_instance, verify_ocrs_separation};
use mrfbound_core::prophet::{hard_instance, optimal_online, verify_lower_bound};
use mrfbound_core::valuation::{SetValuation, ValuationDistribution};

/// Cycle of `n` ternary vertices with agreement edges of strength `beta`.
fn cycle(n: usize, beta: f64) -> Mrf {
    let edges = (0..n).map(|i| {
        let (a, b) = (i.min((i + 1) % n), i.max((i + 1) % n));
        HyperEdge::new(vec![a, b], agreement_potential(3, beta))
    });
    let vertex = (0..n).map(|i| vec![0.1 * i as f64, 0.0, -0.2]).collect();
    Mrf::new(vec![numeric_labels(3); n], vertex, edges.collect()).unwrap()
}

fn singletons(n: usize) -> Vec<Vec<f64>> {
    (0..n).map(|i| vec![1.0, 2f64.sqrt() + i as f64, 4.0]).collect()
}

fn joint(c: &mut Criterion) {
    let mut g = c.benchmark_group("joint_table");
    for n in [4, 8, 12] {
        let mrf = cycle(n, 0.5);
        g.bench_with_input(BenchmarkId::from_parameter(n), &mrf, |b, m| b.iter(|| m.joint_table().unwrap()));
    }
    g.finish();
}

fn conditioning(c: &mut Criterion) {
    let mrf = cycle(4, 0.5);
    let j = mrf.joint_table().unwrap();
    let opts = ConditioningOptions { samples: 1000, ..Default::default() };
    c.bench_function("conditioning_n4", |b| b.iter(|| check_conditioning_bounds(&j, 1.0, &opts)));
}

fn revenue(c: &mut Criterion) {
    let mut g = c.benchmark_group("optimal_rev");
    for n in [2, 3] {
        let mrf = cycle(n, 0.5);
        let additive =
            ValuationDistribution::new(mrf.joint_table().unwrap(), SetValuation::additive(singletons(n)).unwrap())
                .unwrap();
        let unit =
            ValuationDistribution::new(mrf.joint_table().unwrap(), SetValuation::unit_demand(singletons(n)).unwrap())
                .unwrap();
        g.bench_with_input(BenchmarkId::new("additive", n), &additive, |b, d| b.iter(|| optimal_rev(d).unwrap()));
        g.bench_with_input(BenchmarkId::new("unit_demand", n), &unit, |b, d| b.iter(|| optimal_rev(d).unwrap()));
    }
    g.finish();
    let d = ValuationDistribution::new(
        cycle(3, 0.5).joint_table().unwrap(),
        SetValuation::additive(singletons(3)).unwrap(),
    )
    .unwrap();
    c.bench_function("check_all_additive_n3", |b| b.iter(|| check_all(&d, 1.0).unwrap()));
}

fn prophet(c: &mut Criterion) {
    let mut g = c.benchmark_group("prophet_hard");
    for delta in [1.0, 2.0] {
        let (inst, cf) = hard_instance(delta).unwrap();
        g.bench_with_input(BenchmarkId::new("optimal_online", delta), &inst, |b, i| {
            b.iter(|| optimal_online(i).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("verify", delta), &(inst, cf), |b, (i, cf)| {
            b.iter(|| verify_lower_bound(i, cf).unwrap())
        });
    }
    g.finish();
}

fn ocrs(c: &mut Criterion) {
    let mut g = c.benchmark_group("ocrs_hard");
    g.sample_size(10);
    for delta in [1.0, 2.0] {
        g.bench_with_input(BenchmarkId::new("build", delta), &delta, |b, &d| b.iter(|| hard_ocrs_instance(d).unwrap()));
        g.bench_with_input(BenchmarkId::new("verify", delta), &delta, |b, &d| {
            b.iter(|| verify_ocrs_separation(d).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, joint, conditioning, revenue, prophet, ocrs);
criterion_main!(benches);

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use metagrad::{
    CoordMetaGrad, Domain, DomainShape, Execution, MetaGradFull, MetaGradSketch, OnlineLearner,
};
use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const ROUNDS: usize = 200;

fn stream(d: usize, seed: u64) -> Vec<(Domain, DVector<f64>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..ROUNDS)
        .map(|_| {
            let x = DVector::from_fn(d, |_, _| rng.random::<f64>() * 2.0 - 1.0);
            let g = &x * (rng.random::<f64>() - 0.5);
            (Domain::slab(1.0, x), g)
        })
        .collect()
}

fn run(learner: &mut dyn OnlineLearner, data: &[(Domain, DVector<f64>)]) {
    for (dom, g) in data {
        learner.predict(dom).unwrap();
        learner.update(g, dom).unwrap();
    }
}

fn full(c: &mut Criterion) {
    let mut group = c.benchmark_group("mgfull");
    group.sample_size(10);
    for d in [16usize, 64, 128] {
        let data = stream(d, d as u64);
        for exec in [Execution::Sequential, Execution::Parallel] {
            group.bench_with_input(
                BenchmarkId::new(format!("{exec:?}"), d),
                &data,
                |b, data| {
                    b.iter(|| {
                        let mut mg = MetaGradFull::full(1.0, d, DomainShape::Slab)
                            .unwrap()
                            .with_execution(exec);
                        run(&mut mg, data)
                    })
                },
            );
        }
    }
    group.finish();
}

fn sketched(c: &mut Criterion) {
    let mut group = c.benchmark_group("mgf11");
    group.sample_size(10);
    for d in [64usize, 512] {
        let data = stream(d, d as u64 + 1);
        for exec in [Execution::Sequential, Execution::Parallel] {
            group.bench_with_input(
                BenchmarkId::new(format!("{exec:?}"), d),
                &data,
                |b, data| {
                    b.iter(|| {
                        let mut mg = MetaGradSketch::sketched(1.0, 11, d)
                            .unwrap()
                            .with_execution(exec);
                        run(&mut mg, data)
                    })
                },
            );
        }
    }
    group.finish();
}

fn coordinate(c: &mut Criterion) {
    let mut group = c.benchmark_group("mgco");
    group.sample_size(10);
    for d in [64usize, 4096] {
        let mut rng = ChaCha8Rng::seed_from_u64(d as u64 + 2);
        let widths = DVector::from_element(d, 1.0);
        let dom = Domain::Box {
            half_widths: widths.clone(),
        };
        let grads: Vec<DVector<f64>> = (0..ROUNDS)
            .map(|_| DVector::from_fn(d, |_, _| rng.random::<f64>() - 0.5))
            .collect();
        for exec in [Execution::Sequential, Execution::Parallel] {
            group.bench_with_input(
                BenchmarkId::new(format!("{exec:?}"), d),
                &grads,
                |b, grads| {
                    b.iter(|| {
                        let mut co = CoordMetaGrad::new(1.0, &widths)
                            .unwrap()
                            .with_execution(exec);
                        for g in grads {
                            OnlineLearner::predict(&mut co, &dom).unwrap();
                            OnlineLearner::update(&mut co, g, &dom).unwrap();
                        }
                    })
                },
            );
        }
    }
    group.finish();
}

criterion_group!(benches, full, sketched, coordinate);
criterion_main!(benches);

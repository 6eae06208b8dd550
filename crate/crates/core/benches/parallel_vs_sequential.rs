use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use cohomkit::lie_algebra::{betti, AssemblyOptions, LieAlgebra};
use cohomkit::matrix_group::CMatrix;
use cohomkit::sampling::{random_gl, rng};
use cohomkit::vanest::{v_generator, QuadratureSpec};
use cohomkit::Exec;

const STRATEGIES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn ce_betti(c: &mut Criterion) {
    let g = LieAlgebra::gl_complex(2).unwrap();
    let mut group = c.benchmark_group("betti_gl2C");
    group.sample_size(10);
    for (name, exec) in STRATEGIES {
        let opts = AssemblyOptions { exec, ..AssemblyOptions::default() };
        group.bench_with_input(BenchmarkId::from_parameter(name), &opts, |b, opts| {
            b.iter(|| betti(&g, *opts).unwrap())
        });
    }
    group.finish();
}

fn v3_quadrature(c: &mut Criterion) {
    let mut r = rng(1);
    let t: Vec<CMatrix> = (0..3).map(|_| random_gl(&mut r, 2)).collect();
    let mut group = c.benchmark_group("v3_eval");
    group.sample_size(10);
    for (name, exec) in STRATEGIES {
        let v3 = v_generator(2, 2, &QuadratureSpec::default().with_exec(exec)).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(name), &t, |b, t| b.iter(|| v3.eval(t).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, ce_betti, v3_quadrature);
criterion_main!(benches);

use criterion::{black_box, criterion_group, criterion_main, Criterion};

use cornerhodge::deccomplex::{assemble, hodge_laplacian, BoundaryConditionSpec};
use cornerhodge::meshgen::triangulate;
use cornerhodge::oracles::{capacity_energy, l2_defect};
use cornerhodge::polygeom::{build_fold_pair, FoldPairParams, PolygonalDomain};
use cornerhodge::spectral::low_spectrum;
use cornerhodge_bench::{annulus_mesh, annulus_system};

fn bench_triangulation(c: &mut Criterion) {
    let mut group = c.benchmark_group("triangulate");
    let annulus = PolygonalDomain::square_annulus();
    for h in [0.125, 0.0625, 0.03125] {
        group.bench_function(format!("square-annulus h={h}"), |b| {
            b.iter(|| triangulate(black_box(&annulus), black_box(h), 1.0).unwrap())
        });
    }
    let pentagon = build_fold_pair(&FoldPairParams::default()).unwrap().source().clone();
    group.bench_function("pentagon-notched cdt h=0.125", |b| {
        b.iter(|| triangulate(black_box(&pentagon), 0.125, 1.0).unwrap())
    });
    group.finish();
}

fn bench_assembly(c: &mut Criterion) {
    let mut group = c.benchmark_group("assemble");
    for h in [0.125, 0.0625] {
        let mesh = annulus_mesh(h);
        group.bench_function(format!("maximal h={h}"), |b| {
            b.iter(|| assemble(black_box(mesh.clone()), BoundaryConditionSpec::maximal()).unwrap())
        });
    }
    let sys = annulus_system(0.0625);
    for degree in 0..=2usize {
        group.bench_function(format!("pencil degree {degree}"), |b| {
            b.iter(|| hodge_laplacian(black_box(&sys), degree).unwrap())
        });
    }
    group.finish();
}

fn bench_eigensolve(c: &mut Criterion) {
    let mut group = c.benchmark_group("low_spectrum");
    group.sample_size(10);
    for h in [0.125, 0.0625] {
        let sys = annulus_system(h);
        for degree in [0usize, 1] {
            let pencil = hodge_laplacian(&sys, degree).unwrap();
            group.bench_function(format!("degree {degree} h={h}"), |b| {
                b.iter(|| {
                    low_spectrum(
                        black_box(&pencil.stiffness),
                        black_box(&pencil.mass),
                        12,
                        1e-9,
                    )
                    .unwrap()
                })
            });
        }
    }
    group.finish();
}

fn bench_quadrature(c: &mut Criterion) {
    let mut group = c.benchmark_group("quadrature");
    group.bench_function("capacity energy alpha=0.05 eps=1e-4", |b| {
        b.iter(|| capacity_energy(black_box(0.05), black_box(1e-4), 0.785, 64))
    });
    group.bench_function("l2 defect alpha=0.05 eps=1e-4", |b| {
        b.iter(|| l2_defect(black_box(0.05), black_box(1e-4), 0.785, 64))
    });
    group.finish();
}

criterion_group!(
    pipeline,
    bench_triangulation,
    bench_assembly,
    bench_eigensolve,
    bench_quadrature
);
criterion_main!(pipeline);

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use spectral_core::certify::minimal_constant;
use spectral_core::fem::{assemble, solve_smallest};
use spectral_core::geometry::{maximal_separated_net, voronoi_partition};
use spectral_core::mesh::build_mesh;
use spectral_core::special::{bessel_j, bessel_zero, BesselOrder};
use spectral_core::{ConvexPolygon, Point2, Rectangle};
use std::hint::black_box;

fn hexagon() -> ConvexPolygon {
    ConvexPolygon::regular(6, Point2::default(), 1.0, 0.0).unwrap()
}

fn fem(c: &mut Criterion) {
    let mut g = c.benchmark_group("fem");
    g.sample_size(10);
    for levels in [3, 4, 5] {
        let mesh = build_mesh(&hexagon(), levels);
        g.bench_with_input(BenchmarkId::new("assemble", levels), &mesh, |b, m| b.iter(|| assemble(black_box(m)).unwrap()));
        let (k, m) = assemble(&mesh).unwrap();
        g.bench_with_input(BenchmarkId::new("solve_m8", levels), &(k, m), |b, (k, m)| {
            b.iter(|| solve_smallest(black_box(k), black_box(m), 8).unwrap())
        });
    }
    g.finish();
}

fn special(c: &mut Criterion) {
    let nu = BesselOrder::new(2.5).unwrap();
    c.bench_function("bessel_j/x=30", |b| b.iter(|| bessel_j(nu, black_box(30.0)).unwrap()));
    c.bench_function("bessel_zero/k=1..20", |b| {
        b.iter(|| (1..=20).map(|k| bessel_zero(nu, k).unwrap()).sum::<f64>())
    });
}

fn geometry(c: &mut Criterion) {
    let poly = ConvexPolygon::regular(8, Point2::default(), 1.0, 0.1).unwrap();
    let sites = maximal_separated_net(&poly, 0.2).unwrap();
    c.bench_function("net/sep=0.2", |b| b.iter(|| maximal_separated_net(black_box(&poly), 0.2).unwrap()));
    c.bench_function("voronoi/octagon", |b| b.iter(|| voronoi_partition(black_box(&poly), &sites).unwrap()));
    let rect = Rectangle::centered(0.5, 1.0).unwrap();
    c.bench_function("minimal_constant/rect2x1/(8,4)", |b| b.iter(|| minimal_constant(black_box(&rect), 8, 4).unwrap()));
}

criterion_group!(benches, fem, special, geometry);
criterion_main!(benches);

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use rodtaper::decomposition::{elementary_decompose, warping_orthogonality, FieldFamily, RodDomain};
use rodtaper::fem2d::solve_torsion;
use rodtaper::mesh::triangulate_levels;
use rodtaper::ode1d::{solve_weighted_fem_all, LimitModel, LoadCase, SectionConstants};
use rodtaper::verify3d::ConvergenceSetup;
use rodtaper::{principal_frame, shapes, CrossSection, Material, RodProfile};

fn square() -> CrossSection {
    principal_frame(&shapes::rectangle(1.0, 1.0).unwrap()).unwrap()
}

fn torsion(c: &mut Criterion) {
    let s = principal_frame(&shapes::ellipse(2.0, 1.0, 64).unwrap()).unwrap();
    for levels in [2, 3, 4] {
        let mesh = triangulate_levels(&s, levels).unwrap();
        c.bench_function(&format!("torsion/ellipse_lv{levels}"), |b| {
            b.iter(|| solve_torsion(black_box(&mesh)).unwrap())
        });
    }
}

fn limit_1d(c: &mut Criterion) {
    let s = square();
    let m = LimitModel::new(1.0, Material::new(1.0, 1.0).unwrap(), SectionConstants::new(&s, 0.1406)).unwrap();
    let f = LoadCase::Bending1.unit_forces(1.0);
    c.bench_function("limit1d/exact_solve_and_energy", |b| {
        b.iter(|| m.solve(black_box(&f)).unwrap().energy().unwrap())
    });
    c.bench_function("limit1d/weighted_fem_n256", |b| {
        b.iter(|| solve_weighted_fem_all(&m, black_box(&f), 256).unwrap())
    });
}

fn decomposition(c: &mut Criterion) {
    let s = square();
    let d = RodDomain::standard(RodProfile::new(1.0, 0.1).unwrap(), &s).unwrap();
    let f = FieldFamily::RandomPolynomial { seed: 1, degree: 3, clamped: true }.field().unwrap();
    let grid = [0.0, 0.25, 0.5, 0.75, 1.0];
    c.bench_function("decomposition/random_cubic_orthogonality", |b| {
        b.iter(|| warping_orthogonality(&elementary_decompose(black_box(&f), &d), &grid))
    });
}

fn verify(c: &mut Criterion) {
    let setup = ConvergenceSetup::new(&square(), Material::new(1.0, 1.0).unwrap(), 1.0, 1).unwrap();
    let mut g = c.benchmark_group("verify3d");
    g.sample_size(10);
    g.bench_function("square_lv1_eps0.1", |b| b.iter(|| setup.run(&[0.1], &LoadCase::ALL).unwrap()));
    g.finish();
}

criterion_group!(benches, torsion, limit_1d, decomposition, verify);
criterion_main!(benches);

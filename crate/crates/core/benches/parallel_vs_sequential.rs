use criterion::{criterion_group, criterion_main, Criterion};
use num_complex::Complex64;
use periods_core::exact::verify_sigma_span;
use periods_core::par;
use periods_core::riemann::{period_matrix, HyperellipticCurve};
use periods_core::suite::collision_family;
use periods_core::theta::{lattice_theta, theta_constants, LatticeSpec, LatticeThetaOptions, SiegelPoint};
use periods_core::variation::{fay_degeneration_fit, FitOptions};

const MODES: [(&str, bool); 2] = [("parallel", true), ("sequential", false)];

fn sigma_span(c: &mut Criterion) {
    let mut group = c.benchmark_group("sigma_span_n10_8_trials");
    for (name, on) in MODES {
        group.bench_function(name, |b| {
            par::set_parallel(on);
            b.iter(|| verify_sigma_span(10, 10, 8, false, 1).unwrap())
        });
    }
    group.finish();
}

fn periods(c: &mut Criterion) {
    let curve = HyperellipticCurve::new(
        (0..12).map(|k| Complex64::from_polar(1.0 + 0.1 * (k % 3) as f64, 0.52 * k as f64)).collect(),
    )
    .unwrap();
    let mut group = c.benchmark_group("period_matrix_genus5");
    for (name, on) in MODES {
        group.bench_function(name, |b| {
            par::set_parallel(on);
            b.iter(|| period_matrix(&curve, 1e-12).unwrap())
        });
    }
    group.finish();

    let family = collision_family(10);
    let mut group = c.benchmark_group("degeneration_sweep_10_points");
    group.sample_size(10);
    for (name, on) in MODES {
        group.bench_function(name, |b| {
            par::set_parallel(on);
            b.iter(|| fay_degeneration_fit(&family, FitOptions::default()).unwrap())
        });
    }
    group.finish();
}

fn theta(c: &mut Criterion) {
    let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(1);
    let t4 = SiegelPoint::random(&mut rng, 4, 0.5).unwrap();
    let mut group = c.benchmark_group("theta_constants_degree4");
    for (name, on) in MODES {
        group.bench_function(name, |b| {
            par::set_parallel(on);
            b.iter(|| theta_constants(&t4, 1e-15).unwrap())
        });
    }
    group.finish();

    let t2 = SiegelPoint::random(&mut rng, 2, 1.5).unwrap();
    let opts = LatticeThetaOptions { tol: 1e-8, ..Default::default() };
    let mut group = c.benchmark_group("lattice_theta_e8_degree2");
    group.sample_size(10);
    for (name, on) in MODES {
        group.bench_function(name, |b| {
            par::set_parallel(on);
            b.iter(|| lattice_theta(&LatticeSpec::e8(), &t2, opts).unwrap())
        });
    }
    group.finish();
    par::set_parallel(true);
}

criterion_group!(benches, sigma_span, periods, theta);
criterion_main!(benches);

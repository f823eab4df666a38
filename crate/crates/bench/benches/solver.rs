use std::f64::consts::PI;
use std::hint::black_box;

use crd_core::certificates::{cert2_build, scan_c4, Cert2Inputs};
use crd_core::entropy::psi;
use crd_core::grid::integrate;
use crd_core::network::{preset_3species, TwoSpeciesExponents};
use crd_core::{Grid1D, SolverConfig, StateField};
use criterion::{criterion_group, criterion_main, Criterion};

fn cosine_state(n: usize) -> StateField {
    let g = Grid1D::new(n).unwrap();
    let field = |base: f64, amp: f64| g.centers().iter().map(|x| base + amp * (PI * x).cos()).collect::<Vec<_>>();
    StateField::new(g, vec![field(1.0, 0.5), field(1.0, -0.3), field(1.0, 0.4)], 0.0).unwrap()
}

fn solver(c: &mut Criterion) {
    let net = preset_3species(2, 1.0, 1.0).unwrap();
    for n in [100, 400] {
        let init = cosine_state(n);
        let cfg = SolverConfig::new(vec![1.0, 2.0, 0.5], 1e-4, 1e-2);
        c.bench_function(&format!("imex 100 steps, {n} cells"), |b| {
            b.iter(|| integrate(&net, black_box(&init), &cfg).unwrap())
        });
    }
}

fn certificates(c: &mut Criterion) {
    c.bench_function("class scan, 2000 points", |b| b.iter(|| scan_c4(black_box(2.0), 3.0, 0.1, 2000).unwrap()));
    let inputs = Cert2Inputs {
        alpha: 0.8,
        beta: 1.25,
        exps: TwoSpeciesExponents::new(2, 1, 1, 3).unwrap(),
        total: 3.0,
        diffusions: [1.0, 1.0],
        c_lsi: PI * PI,
        c_p: PI * PI,
        l: None,
    };
    c.bench_function("two-species certificate", |b| b.iter(|| cert2_build(black_box(&inputs)).unwrap()));
    c.bench_function("psi, 1000 pairs", |b| {
        b.iter(|| (1..=1000).map(|i| psi(black_box(i as f64 * 0.01), 1.0).unwrap()).sum::<f64>())
    });
}

criterion_group!(benches, solver, certificates);
criterion_main!(benches);

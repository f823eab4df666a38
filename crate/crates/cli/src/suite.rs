//! Scenario-independent measurements shared by `verify` and the acceptance tests.

use std::f64::consts::PI;

use crd_core::certificates::{
    class_mu_2species, class_mu_3species, class_point, d2, mu_inequality_2species, mu_inequality_3species,
    quadratic_limit, s2,
};
use crd_core::entropy::{entropy_rel_const, psi, psi_ratio, sqrt_gap_sq};
use crd_core::equilibria::{
    monomial_scale, positive_equilibrium_2species, positive_equilibrium_3species, verify_equilibrium,
};
use crd_core::grid::{integrate_tracked, Grid1D, SolverConfig, StateField};
use crd_core::network::{preset_2species, preset_3species, Complex, Reaction, TwoSpeciesExponents};
use crd_core::Network;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

fn log_uniform(rng: &mut ChaCha8Rng, lo_exp: f64, hi_exp: f64) -> f64 {
    10f64.powf(rng.random_range(lo_exp..hi_exp))
}

/// `A -> B` at a rate far below the resolution of any cell value, so the
/// first species evolves by diffusion alone.
fn inert_network() -> Network {
    Network::new(
        vec!["U".into(), "V".into()],
        vec![Reaction::new(Complex::new(vec![1, 0]), Complex::new(vec![0, 1]), 1e-300).expect("valid reaction")],
    )
    .expect("valid network")
}

/// Decay rate of the `cos(pi x)` mode under pure diffusion with coefficient `d`.
pub fn heat_mode_rate(n_cells: usize, dt: f64, d: f64, t_end: f64) -> crd_core::Result<f64> {
    let g = Grid1D::new(n_cells)?;
    let xs = g.centers();
    let u: Vec<f64> = xs.iter().map(|x| 1.0 + 0.5 * (PI * x).cos()).collect();
    let init = StateField::new(g, vec![u, vec![0.0; n_cells]], 0.0)?;
    let mut cfg = SolverConfig::new(vec![d, d], dt, t_end);
    cfg.snapshot_every = t_end;
    let traj = integrate_tracked(&inert_network(), &init, &cfg, None, &[])?;
    let amp = |s: &StateField| -> f64 {
        let mean = s.integral(0);
        2.0 * s.species(0).iter().zip(&xs).map(|(v, x)| (v - mean) * (PI * x).cos()).sum::<f64>() * g.h()
    };
    let last = traj.final_state();
    Ok(-(amp(last) / amp(&init)).ln() / last.time)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeatReport {
    pub exact: f64,
    pub coarse: f64,
    pub fine: f64,
    pub rel_err_coarse: f64,
    pub rel_err_fine: f64,
    /// `rel_err_coarse / rel_err_fine`.
    pub reduction: f64,
}

/// Coarse run at `(n, dt)`, fine run at `(2n, dt/4)` so that both error terms shrink together.
pub fn heat_kernel(n_cells: usize, dt: f64, d: f64, t_end: f64) -> crd_core::Result<HeatReport> {
    let exact = d * PI * PI;
    let coarse = heat_mode_rate(n_cells, dt, d, t_end)?;
    let fine = heat_mode_rate(2 * n_cells, dt / 4.0, d, t_end)?;
    let rel_err_coarse = (coarse - exact).abs() / exact;
    let rel_err_fine = (fine - exact).abs() / exact;
    Ok(HeatReport { exact, coarse, fine, rel_err_coarse, rel_err_fine, reduction: rel_err_coarse / rel_err_fine })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleReport {
    pub samples: usize,
    pub violations: usize,
    /// Largest shortfall seen, in the units of the tested inequality.
    pub worst: f64,
    /// Inputs at the worst shortfall.
    pub worst_at: Vec<f64>,
}

impl SampleReport {
    fn new() -> Self {
        Self { samples: 0, violations: 0, worst: f64::NEG_INFINITY, worst_at: Vec::new() }
    }

    fn record(&mut self, shortfall: f64, tol: f64, at: &[f64]) {
        self.samples += 1;
        if shortfall > tol {
            self.violations += 1;
        }
        if shortfall > self.worst {
            self.worst = shortfall;
            self.worst_at = at.to_vec();
        }
    }
}

/// `Psi(x, y) >= (sqrt x - sqrt y)^2` on log-uniform pairs in `[1e-6, 1e6]^2`.
pub fn psi_dominance(samples: usize, seed: u64) -> SampleReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rep = SampleReport::new();
    for _ in 0..samples {
        let x = log_uniform(&mut rng, -6.0, 6.0);
        let y = log_uniform(&mut rng, -6.0, 6.0);
        let p = psi(x, y).expect("positive inputs");
        let g = sqrt_gap_sq(x, y);
        // relative shortfall, zero when the bound holds
        rep.record((g - p) / g.max(f64::MIN_POSITIVE), 1e-12, &[x, y]);
    }
    rep
}

/// `x -> Psi(x, y) / (sqrt x - sqrt y)^2` is non-decreasing along a 200-point
/// log grid in `[1e-4 y, 1e4 y]`, for random `y`.
pub fn psi_ratio_monotone(n_y: usize, seed: u64) -> SampleReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rep = SampleReport::new();
    for _ in 0..n_y {
        let y = log_uniform(&mut rng, -4.0, 4.0);
        let mut prev = psi_ratio(y * 1e-4, y).expect("positive");
        for j in 1..200 {
            let x = y * 10f64.powf(-4.0 + 8.0 * j as f64 / 199.0);
            let cur = psi_ratio(x, y).expect("positive");
            rep.record(prev - cur, 1e-12, &[x, y]);
            prev = cur;
        }
    }
    rep
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumReport {
    pub classes_3: usize,
    /// Largest `|R(u_inf)| / (largest monomial)` and class residual over the three-species sample.
    pub max_residual_3: f64,
    pub classes_2: usize,
    pub max_residual_2: f64,
    /// Largest `|u_inf - 1|` in the class `M1 = M2 = 2`.
    pub symmetric_error: f64,
}

/// Equilibrium residuals on random classes; relative to the monomial scale.
pub fn equilibrium_solvers(n: usize, seed: u64) -> crd_core::Result<EquilibriumReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let net3 = preset_3species(2, 1.0, 1.0)?;
    let mut max3: f64 = 0.0;
    for _ in 0..n {
        let (m1, m2) = (log_uniform(&mut rng, -2.0, 2.0), log_uniform(&mut rng, -2.0, 2.0));
        let eq = positive_equilibrium_3species(m1, m2, 1.0)?;
        let v = &eq.values;
        let r = verify_equilibrium(&net3, v)? / monomial_scale(&net3, v);
        let cls = ((v[0] + v[2] - m1).abs() / m1).max((v[1] + v[2] - m2).abs() / m2);
        max3 = max3.max(r).max(cls);
    }
    let mut max2: f64 = 0.0;
    for _ in 0..n {
        let m2 = rng.random_range(1..4u32);
        let mb = rng.random_range(1..3u32);
        let n1 = rng.random_range(1..4u32);
        let nb = mb + rng.random_range(1..3u32);
        let exps = TwoSpeciesExponents::new(m2 + mb, n1, m2, n1 + nb)?;
        let total = log_uniform(&mut rng, -2.0, 2.0);
        let eq = positive_equilibrium_2species(exps, total)?;
        let net = preset_2species(exps, 1.0, 1.0)?;
        let v = &eq.values;
        let r = verify_equilibrium(&net, v)? / monomial_scale(&net, v);
        let cls = (nb as f64 * v[0] + mb as f64 * v[1] - total).abs() / total;
        max2 = max2.max(r).max(cls);
    }
    let sym = positive_equilibrium_3species(2.0, 2.0, 1.0)?;
    let symmetric_error = sym.values.iter().map(|v| (v - 1.0).abs()).fold(0.0, f64::max);
    Ok(EquilibriumReport { classes_3: n, max_residual_3: max3, classes_2: n, max_residual_2: max2, symmetric_error })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadraticLimit {
    pub m1: f64,
    pub m2: f64,
    pub eq: Vec<f64>,
    /// `2 (1/a_inf + 1/b_inf + 1/c_inf)`.
    pub two_sigma: f64,
    /// `D2 / E` at `c = c_inf (1 + delta)`, the larger of the two signs of `delta`.
    pub d2_ratio: f64,
    pub s2_ratio: f64,
}

/// `D2 / E` and `S2 / E` at relative class perturbation `delta`, averaged over both signs.
pub fn quadratic_limit_at(m1: f64, m2: f64, delta: f64) -> crd_core::Result<QuadraticLimit> {
    let eq = positive_equilibrium_3species(m1, m2, 1.0)?.values;
    let (mut dr, mut sr) = (0.0, 0.0);
    for sign in [-1.0, 1.0] {
        let v = class_point(m1, m2, eq[2] * (1.0 + sign * delta));
        let e = entropy_rel_const(&v, &eq)?;
        dr += 0.5 * d2(&v, &eq) / e;
        sr += 0.5 * s2(&v, &eq) / e;
    }
    Ok(QuadraticLimit { m1, m2, two_sigma: quadratic_limit(&eq), eq, d2_ratio: dr, s2_ratio: sr })
}

/// Largest relative gap between `D2` and `b c_inf S2` on random class points.
pub fn d2_identity(n: usize, seed: u64) -> crd_core::Result<SampleReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rep = SampleReport::new();
    for _ in 0..n {
        let (m1, m2) = (log_uniform(&mut rng, -1.0, 1.0), log_uniform(&mut rng, -1.0, 1.0));
        let eq = positive_equilibrium_3species(m1, m2, 1.0)?.values;
        let z = rng.random_range(0.0..1.0) * m1.min(m2);
        let v = class_point(m1, m2, z);
        let lhs = d2(&v, &eq);
        let rhs = v[1] * eq[2] * s2(&v, &eq);
        let scale = lhs.abs().max(rhs.abs());
        let rel = if scale == 0.0 { 0.0 } else { (lhs - rhs).abs() / scale };
        rep.record(rel, 1e-12, &[m1, m2, z]);
    }
    Ok(rep)
}

/// Where the sampled classes come from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassSource {
    /// `(M1, M2)` uniform in `(0.1, 10)^2`, or `M` uniform in `(0.1, 10)`.
    Random,
    /// The given class only.
    Fixed { m1: f64, m2: f64 },
}

fn mu_shortfall(lhs: f64, rhs: f64) -> f64 {
    (rhs - lhs) / rhs.max(1.0)
}

/// `[(1+mu_a)(1+mu_b) - (1+mu_c)]^2 >= mu_a^2 + mu_b^2 + mu_c^2` on class-consistent samples.
pub fn mu_three_species(n: usize, seed: u64, source: ClassSource) -> crd_core::Result<SampleReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rep = SampleReport::new();
    for _ in 0..n {
        let (m1, m2) = match source {
            ClassSource::Random => (rng.random_range(0.1..10.0), rng.random_range(0.1..10.0)),
            ClassSource::Fixed { m1, m2 } => (m1, m2),
        };
        let eq = positive_equilibrium_3species(m1, m2, 1.0)?.values;
        let hi = eq[0].min(eq[1]) / eq[2];
        let mu_c = rng.random_range(-1.0..=hi);
        let (ma, mb, mc) = class_mu_3species(&eq, mu_c)?;
        let (lhs, rhs) = mu_inequality_3species(ma, mb, mc);
        rep.record(mu_shortfall(lhs, rhs), 1e-12, &[m1, m2, ma, mb, mc]);
    }
    Ok(rep)
}

/// `[(1+mu_a)^m - (1+mu_b)^n]^2 >= mu_a^2 + mu_b^2` on class-consistent samples.
pub fn mu_two_species(
    n: usize,
    seed: u64,
    exps: Option<TwoSpeciesExponents>,
    total: Option<f64>,
) -> crd_core::Result<SampleReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rep = SampleReport::new();
    for _ in 0..n {
        let e = match exps {
            Some(e) => e,
            None => {
                let mb = rng.random_range(1..3u32);
                TwoSpeciesExponents::new(1 + mb, 1, 1, 1 + mb + rng.random_range(1..3u32))?
            }
        };
        let m = total.unwrap_or_else(|| rng.random_range(0.1..10.0));
        let eq = positive_equilibrium_2species(e, m)?.values;
        let (mbar, nbar) = (e.m_bar(), e.n_bar());
        let hi = nbar as f64 * eq[0] / (mbar as f64 * eq[1]);
        let mu_b = rng.random_range(-1.0..=hi);
        let (ma, mub) = class_mu_2species(&eq, mu_b, mbar, nbar)?;
        let (lhs, rhs) = mu_inequality_2species(ma, mub, mbar, nbar);
        rep.record(mu_shortfall(lhs, rhs), 1e-12, &[m, ma, mub, mbar as f64, nbar as f64]);
    }
    Ok(rep)
}

use serde::{Deserialize, Serialize};

use super::functionals::{entropy_rel, sqrt_gradient_sq};
use crate::grid::{StateField, Trajectory};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DdtReport {
    /// `max |dE/dt + D|` over interior samples.
    pub max_residual: f64,
    pub max_d: f64,
    pub samples: usize,
}

/// Compares a three-point finite difference of `E_rel` with `-D` at every
/// interior diagnostic sample.
pub fn d_dt_entropy_check(traj: &Trajectory) -> Result<DdtReport> {
    let rec: Vec<(f64, f64, f64)> = traj.entropy_series();
    if rec.len() < 3 {
        return Err(Error::Contract(format!("dE/dt check needs at least 3 entropy samples, got {}", rec.len())));
    }
    let mut max_residual = 0.0_f64;
    let mut samples = 0;
    for w in rec.windows(3) {
        let (t0, e0, _) = w[0];
        let (t1, e1, d1) = w[1];
        let (t2, e2, _) = w[2];
        let h1 = t1 - t0;
        let h2 = t2 - t1;
        if !(h1 > 0.0 && h2 > 0.0) {
            continue;
        }
        // second-order derivative on a non-uniform stencil
        let dedt = (h1 * h1 * e2 - h2 * h2 * e0 + (h2 * h2 - h1 * h1) * e1) / (h1 * h2 * (h1 + h2));
        max_residual = max_residual.max((dedt + d1).abs());
        samples += 1;
    }
    let max_d = rec.iter().map(|r| r.2).fold(0.0, f64::max);
    Ok(DdtReport { max_residual, max_d, samples })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinfSlack {
    pub sup: f64,
    pub bound: f64,
    pub slack: f64,
    pub holds: bool,
}

/// `sup u <= 2 int u + 2 int |(sqrt u)_x|^2` per species.
pub fn linf_estimate_check(state: &StateField) -> Vec<LinfSlack> {
    let h = state.grid().h();
    (0..state.n_species())
        .map(|s| {
            let sup = state.max(s);
            let bound = 2.0 * state.integral(s) + 2.0 * sqrt_gradient_sq(state.species(s), h);
            LinfSlack { sup, bound, slack: bound - sup, holds: sup <= bound }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CylinderReport {
    pub tau: f64,
    /// `||u||^2` over `[0,1] x [tau, tau+1]` per species.
    pub measured: Vec<f64>,
    pub bound: Vec<f64>,
    pub holds: bool,
}

/// Space-time `L^2` norm over the cylinder `[tau, tau+1]` by the trapezoid rule
/// on snapshots, against `2 M^2 + 2 M C_1` with `M = totals[s]`.
///
/// `totals` gives the mass bound per species (for the three-species system
/// `M1` for `a`, `M2` for `b`, `min(M1, M2)` for `c`); `c1 = (E_abs(0) + 3) / (4 min d)`.
pub fn cylinder_l2_check(traj: &Trajectory, tau: f64, totals: &[f64], c1: f64) -> Result<CylinderReport> {
    let snaps = &traj.snapshots;
    let lo = tau;
    let hi = tau + 1.0;
    let tol = 1e-9 * hi.max(1.0);
    if snaps.first().is_none_or(|s| s.time > lo + tol) || snaps.last().is_none_or(|s| s.time < hi - tol) {
        return Err(Error::Contract(format!("trajectory does not cover [{lo}, {hi}]")));
    }
    let ns = snaps[0].n_species();
    if totals.len() != ns {
        return Err(Error::Contract("one mass bound per species required".into()));
    }
    let sq = |s: &StateField, k: usize| s.species(k).iter().map(|v| v * v).sum::<f64>() * s.grid().h();
    let mut measured = vec![0.0; ns];
    for w in snaps.windows(2) {
        let (t0, t1) = (w[0].time, w[1].time);
        let a = t0.max(lo);
        let b = t1.min(hi);
        if b <= a {
            continue;
        }
        for (k, m) in measured.iter_mut().enumerate() {
            let f0 = sq(&w[0], k);
            let f1 = sq(&w[1], k);
            let at = |t: f64| f0 + (f1 - f0) * (t - t0) / (t1 - t0);
            *m += 0.5 * (at(a) + at(b)) * (b - a);
        }
    }
    let bound: Vec<f64> = totals.iter().map(|m| 2.0 * m * m + 2.0 * m * c1).collect();
    let holds = measured.iter().zip(&bound).all(|(m, b)| m <= b);
    Ok(CylinderReport { tau, measured, bound, holds })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinBReport {
    pub violations: usize,
    /// `min_t inf_x b * (beta + k t)`; at least 1 when the bound holds.
    pub min_scaled: f64,
    pub holds: bool,
}

/// `inf_x b(x,t) >= (beta + k t)^{-1}` at every snapshot.
pub fn min_b_bound_check(traj: &Trajectory, b_index: usize, beta: f64, k_bound: f64) -> MinBReport {
    let mut violations = 0;
    let mut min_scaled = f64::INFINITY;
    for s in &traj.snapshots {
        let scaled = s.min(b_index) * (beta + k_bound * s.time);
        min_scaled = min_scaled.min(scaled);
        // the t = 0 case is an identity up to one rounding
        if scaled < 1.0 - 1e-12 {
            violations += 1;
        }
    }
    MinBReport { violations, min_scaled, holds: violations == 0 }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct L1Sample {
    pub t: f64,
    /// `sum_s ||u_s - u_s,inf||_1^2`.
    pub dist_sq: f64,
    pub e_rel: f64,
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct L1Monitor {
    pub samples: Vec<L1Sample>,
    pub min_ratio: Option<f64>,
    pub initial_ratio: Option<f64>,
}

/// Empirical ratio `E_rel / sum ||u - u_inf||_1^2` along the snapshots.
pub fn l1_distance_monitor(traj: &Trajectory, eq: &[f64]) -> Result<L1Monitor> {
    let mut samples = Vec::with_capacity(traj.snapshots.len());
    for s in &traj.snapshots {
        let h = s.grid().h();
        let dist_sq: f64 = eq
            .iter()
            .enumerate()
            .map(|(k, e)| {
                let l1 = s.species(k).iter().map(|v| (v - e).abs()).sum::<f64>() * h;
                l1 * l1
            })
            .sum();
        let e_rel = entropy_rel(s, eq)?;
        let ratio = if dist_sq > 0.0 && e_rel > 0.0 { Some(e_rel / dist_sq) } else { None };
        samples.push(L1Sample { t: s.time, dist_sq, e_rel, ratio });
    }
    let min_ratio = samples.iter().filter_map(|s| s.ratio).reduce(f64::min);
    let initial_ratio = samples.first().and_then(|s| s.ratio);
    Ok(L1Monitor { samples, min_ratio, initial_ratio })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{integrate_tracked, Grid1D, SolverConfig};
    use crate::network::preset_3species;
    use std::f64::consts::PI;

    fn eq_run() -> Trajectory {
        let g = Grid1D::new(20).unwrap();
        let net = preset_3species(2, 1.0, 1.0).unwrap();
        let s0 = StateField::constant(g, &[1.0, 1.0, 1.0]).unwrap();
        let mut cfg = SolverConfig::new(vec![1.0; 3], 0.01, 10.0);
        cfg.snapshot_every = 0.1;
        integrate_tracked(&net, &s0, &cfg, Some(&[1.0; 3]), &[vec![1.0, 0.0, 1.0], vec![0.0, 1.0, 1.0]]).unwrap()
    }

    #[test]
    fn equilibrium_checks() {
        let traj = eq_run();
        let r = d_dt_entropy_check(&traj).unwrap();
        assert!(r.max_residual <= 1e-12);
        let c = cylinder_l2_check(&traj, 2.0, &[2.0, 2.0, 2.0], 0.0).unwrap();
        for m in &c.measured {
            assert!((m - 1.0).abs() < 1e-12);
        }
        assert!(c.holds && c.bound[0] == 8.0);
        assert!(cylinder_l2_check(&traj, 9.5, &[2.0; 3], 0.0).is_err());
        let b = min_b_bound_check(&traj, 1, 1.0, 1.0);
        assert!(b.holds);
        let m = l1_distance_monitor(&traj, &[1.0; 3]).unwrap();
        assert!(m.samples[0].ratio.is_none());
        assert!(m.samples.iter().all(|s| s.dist_sq < 1e-25));
    }

    #[test]
    fn linf_examples() {
        let g = Grid1D::new(100).unwrap();
        let one = StateField::constant(g, &[1.0]).unwrap();
        let r = &linf_estimate_check(&one)[0];
        assert!(r.holds && (r.slack - 1.0).abs() < 1e-14);
        let u: Vec<f64> = g.centers().iter().map(|x| 1.0 + 0.5 * (PI * x).cos()).collect();
        let r = &linf_estimate_check(&StateField::new(g, vec![u], 0.0).unwrap())[0];
        assert!(r.holds && r.slack > 0.0);
    }

    #[test]
    fn l1_ratio_constant_state() {
        let g = Grid1D::new(10).unwrap();
        let net = preset_3species(2, 1.0, 1.0).unwrap();
        let s0 = StateField::constant(g, &[2.0, 1.0, 1.0]).unwrap();
        let mut cfg = SolverConfig::new(vec![1.0; 3], 0.01, 0.01);
        cfg.snapshot_every = 0.01;
        let traj = integrate_tracked(&net, &s0, &cfg, None, &[]).unwrap();
        let m = l1_distance_monitor(&traj, &[1.0; 3]).unwrap();
        assert!((m.initial_ratio.unwrap() - (2.0 * 2f64.ln() - 1.0)).abs() < 1e-14);
    }
}

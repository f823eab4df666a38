use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::field::StateField;
use super::tridiag::solve_neumann_implicit;
use crate::entropy::{entropy_record, EntropyRecord};
use crate::network::Network;
use crate::{Error, Result};

/// Grids at least this fine solve the per-species systems in parallel.
const PARALLEL_CELLS: usize = 2048;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    Imex,
    Explicit,
}

fn default_grow_after() -> usize {
    50
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub diffusions: Vec<f64>,
    pub dt_init: f64,
    pub dt_min: f64,
    pub t_end: f64,
    pub scheme: Scheme,
    pub snapshot_every: f64,
    /// Clean steps before the step size doubles again (capped at `dt_init`).
    #[serde(default = "default_grow_after")]
    pub grow_after: usize,
    /// Clamp negative reaction updates to zero instead of rejecting the step.
    /// Only for negative controls: it breaks the conservation laws.
    #[serde(default)]
    pub debug_clamp_negative: bool,
}

impl SolverConfig {
    pub fn new(diffusions: Vec<f64>, dt_init: f64, t_end: f64) -> Self {
        Self {
            diffusions,
            dt_init,
            dt_min: dt_init * 1e-6,
            t_end,
            scheme: Scheme::Imex,
            snapshot_every: t_end / 10.0,
            grow_after: default_grow_after(),
            debug_clamp_negative: false,
        }
    }

    pub fn validate(&self, n_species: usize) -> Result<()> {
        if self.diffusions.len() != n_species {
            return Err(Error::Contract(format!(
                "diffusions has {} entries for {n_species} species",
                self.diffusions.len()
            )));
        }
        if let Some(d) = self.diffusions.iter().find(|d| !(**d > 0.0 && d.is_finite())) {
            return Err(Error::Contract(format!("diffusions must be positive, got {d}")));
        }
        if !(self.dt_min > 0.0 && self.dt_min <= self.dt_init && self.dt_init.is_finite()) {
            return Err(Error::Contract(format!(
                "need 0 < dt_min <= dt_init, got dt_min={} dt_init={}",
                self.dt_min, self.dt_init
            )));
        }
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return Err(Error::Contract(format!("t_end must be positive, got {}", self.t_end)));
        }
        if !(self.snapshot_every > 0.0) {
            return Err(Error::Contract(format!("snapshot_every must be positive, got {}", self.snapshot_every)));
        }
        if self.grow_after == 0 {
            return Err(Error::Contract("grow_after must be at least 1".into()));
        }
        Ok(())
    }
}

/// Scalar diagnostics after one accepted step (or at the initial time, with `dt = 0`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub t: f64,
    pub dt: f64,
    /// `sum_i w . u_i h` for each tracked conservation vector.
    pub conserved: Vec<f64>,
    pub min: Vec<f64>,
    pub max: Vec<f64>,
    pub l1: Vec<f64>,
    /// Present when an equilibrium is tracked and every cell is positive.
    pub entropy: Option<EntropyRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub snapshots: Vec<StateField>,
    pub diagnostics: Vec<StepRecord>,
    pub conserved_vectors: Vec<Vec<f64>>,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
    /// Set when the run stopped before `t_end`.
    pub failure: Option<String>,
}

impl Trajectory {
    pub fn completed(&self) -> bool {
        self.failure.is_none()
    }

    pub fn final_state(&self) -> &StateField {
        self.snapshots.last().expect("trajectory always holds the initial snapshot")
    }

    /// Largest value of species `s` seen over all steps.
    pub fn running_sup(&self, s: usize) -> f64 {
        self.diagnostics.iter().map(|r| r.max[s]).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Largest relative drift of each tracked conserved total.
    pub fn conservation_drift(&self) -> Vec<f64> {
        let first = &self.diagnostics[0].conserved;
        (0..first.len())
            .map(|k| {
                let scale = first[k].abs().max(f64::MIN_POSITIVE);
                self.diagnostics.iter().map(|r| (r.conserved[k] - first[k]).abs() / scale).fold(0.0, f64::max)
            })
            .collect()
    }

    /// `(t, E_rel, D)` for every step with an entropy record.
    pub fn entropy_series(&self) -> Vec<(f64, f64, f64)> {
        self.diagnostics.iter().filter_map(|r| r.entropy.as_ref().map(|e| (r.t, e.e_rel, e.d))).collect()
    }
}

/// `(u_{i-1} - 2u_i + u_{i+1}) / h^2` with reflective ghosts.
pub fn laplacian_neumann(u: &[f64], h: f64) -> Result<Vec<f64>> {
    let n = u.len();
    if n < 2 {
        return Err(Error::Contract(format!("laplacian needs at least 2 cells, got {n}")));
    }
    if !(h > 0.0) {
        return Err(Error::Contract(format!("h must be positive, got {h}")));
    }
    let inv = 1.0 / (h * h);
    // built from face fluxes so the sum telescopes exactly
    let mut out = vec![0.0; n];
    for i in 0..n - 1 {
        let flux = u[i + 1] - u[i];
        out[i] += flux;
        out[i + 1] -= flux;
    }
    for v in &mut out {
        *v *= inv;
    }
    Ok(out)
}

fn reaction_update(state: &StateField, net: &Network, dt: f64, clamp: bool) -> Result<Vec<Vec<f64>>> {
    let ns = state.n_species();
    if net.n_species() != ns {
        return Err(Error::Contract(format!("network has {} species, state has {ns}", net.n_species())));
    }
    let n = state.grid().n_cells();
    let mut out: Vec<Vec<f64>> = state.all_species().to_vec();
    let mut c = vec![0.0; ns];
    let mut r = vec![0.0; ns];
    for i in 0..n {
        for s in 0..ns {
            c[s] = state.species(s)[i];
        }
        net.net_production_unchecked(&c, &mut r);
        for s in 0..ns {
            let v = c[s] + dt * r[s];
            if v < 0.0 {
                if clamp {
                    out[s][i] = 0.0;
                    continue;
                }
                return Err(Error::Positivity { species: s, cell: i });
            }
            out[s][i] = v;
        }
    }
    Ok(out)
}

/// One first-order IMEX step: explicit reaction, implicit diffusion.
pub fn step_imex(state: &StateField, net: &Network, cfg: &SolverConfig, dt: f64) -> Result<StateField> {
    if !(dt >= 0.0) {
        return Err(Error::Contract(format!("dt must be non-negative, got {dt}")));
    }
    let grid = state.grid();
    let h2 = grid.h() * grid.h();
    let star = reaction_update(state, net, dt, cfg.debug_clamp_negative)?;
    let solve = |(u, d): (&Vec<f64>, &f64)| solve_neumann_implicit(u, dt * d / h2);
    let new: Result<Vec<Vec<f64>>> = if grid.n_cells() >= PARALLEL_CELLS {
        star.par_iter().zip(cfg.diffusions.par_iter()).map(solve).collect()
    } else {
        star.iter().zip(cfg.diffusions.iter()).map(solve).collect()
    };
    Ok(StateField::from_parts_unchecked(grid, new?, state.time + dt))
}

/// Forward Euler on diffusion and reaction under the diffusive CFL bound.
pub fn step_explicit(state: &StateField, net: &Network, cfg: &SolverConfig, dt: f64) -> Result<StateField> {
    if !(dt >= 0.0) {
        return Err(Error::Contract(format!("dt must be non-negative, got {dt}")));
    }
    let grid = state.grid();
    let bound = cfl_bound(grid.h(), &cfg.diffusions);
    if dt > bound * (1.0 + 1e-12) {
        return Err(Error::Contract(format!(
            "explicit step dt={dt} exceeds the diffusive bound h^2/(2 max d) = {bound:e}"
        )));
    }
    let ns = state.n_species();
    if net.n_species() != ns || cfg.diffusions.len() != ns {
        return Err(Error::Contract("species count mismatch".into()));
    }
    let n = grid.n_cells();
    let mut out = state.all_species().to_vec();
    let mut lap = Vec::with_capacity(ns);
    for s in 0..ns {
        lap.push(laplacian_neumann(state.species(s), grid.h())?);
    }
    let mut c = vec![0.0; ns];
    let mut r = vec![0.0; ns];
    for i in 0..n {
        for s in 0..ns {
            c[s] = state.species(s)[i];
        }
        net.net_production_unchecked(&c, &mut r);
        for s in 0..ns {
            let v = c[s] + dt * (cfg.diffusions[s] * lap[s][i] + r[s]);
            if v < 0.0 {
                if cfg.debug_clamp_negative {
                    out[s][i] = 0.0;
                    continue;
                }
                return Err(Error::Positivity { species: s, cell: i });
            }
            out[s][i] = v;
        }
    }
    Ok(StateField::from_parts_unchecked(grid, out, state.time + dt))
}

fn cfl_bound(h: f64, diffusions: &[f64]) -> f64 {
    let dmax = diffusions.iter().copied().fold(0.0, f64::max);
    if dmax == 0.0 {
        f64::INFINITY
    } else {
        h * h / (2.0 * dmax)
    }
}

fn record(
    state: &StateField,
    dt: f64,
    net: &Network,
    cfg: &SolverConfig,
    eq: Option<&[f64]>,
    conserved: &[Vec<f64>],
) -> Result<StepRecord> {
    let ns = state.n_species();
    let entropy = match eq {
        Some(eq) => match entropy_record(state, eq, net, &cfg.diffusions) {
            Ok(rec) => Some(rec),
            Err(Error::BoundaryTouch { .. }) => None,
            Err(e) => return Err(e),
        },
        None => None,
    };
    Ok(StepRecord {
        t: state.time,
        dt,
        conserved: conserved.iter().map(|w| state.linear_total(w)).collect(),
        min: (0..ns).map(|s| state.min(s)).collect(),
        max: (0..ns).map(|s| state.max(s)).collect(),
        l1: (0..ns).map(|s| state.integral(s)).collect(),
        entropy,
    })
}

/// Integrates to `t_end`, tracking the network's conservation basis.
pub fn integrate(net: &Network, init: &StateField, cfg: &SolverConfig) -> Result<Trajectory> {
    let basis = crate::network::conservation_basis(net);
    integrate_tracked(net, init, cfg, None, &basis.vectors)
}

/// Integrates to `t_end`, recording entropy diagnostics against `eq` (when given)
/// and the totals of the supplied conservation vectors at every step.
pub fn integrate_tracked(
    net: &Network,
    init: &StateField,
    cfg: &SolverConfig,
    eq: Option<&[f64]>,
    conserved: &[Vec<f64>],
) -> Result<Trajectory> {
    cfg.validate(init.n_species())?;
    if net.n_species() != init.n_species() {
        return Err(Error::Contract(format!(
            "network has {} species, initial state has {}",
            net.n_species(),
            init.n_species()
        )));
    }
    if let Some(w) = conserved.iter().find(|w| w.len() != init.n_species()) {
        return Err(Error::Contract(format!("conservation vector of length {}", w.len())));
    }
    if cfg.scheme == Scheme::Explicit {
        let bound = cfl_bound(init.grid().h(), &cfg.diffusions);
        if cfg.dt_init > bound * (1.0 + 1e-12) {
            return Err(Error::Contract(format!(
                "explicit dt_init={} exceeds the diffusive bound h^2/(2 max d) = {bound:e}",
                cfg.dt_init
            )));
        }
    }

    let mut state = init.clone();
    state.time = 0.0;
    let mut traj = Trajectory {
        snapshots: vec![state.clone()],
        diagnostics: vec![record(&state, 0.0, net, cfg, eq, conserved)?],
        conserved_vectors: conserved.to_vec(),
        accepted_steps: 0,
        rejected_steps: 0,
        failure: None,
    };

    let t_end = cfg.t_end;
    let mut snap_index = 1usize;
    let next_snap = |k: usize| {
        let t = k as f64 * cfg.snapshot_every;
        if t >= t_end * (1.0 - 1e-12) {
            t_end
        } else {
            t
        }
    };
    let mut dt = cfg.dt_init;
    let mut clean = 0usize;
    let mut t = 0.0;
    while t < t_end {
        let target = next_snap(snap_index);
        let mut step = dt;
        let hits = t + step * (1.0 + 1e-9) >= target;
        if hits {
            step = target - t;
        } else if t + 2.0 * step > target {
            // split the remainder so no sliver step is left before the target
            step = 0.5 * (target - t);
        }
        let result = match cfg.scheme {
            Scheme::Imex => step_imex(&state, net, cfg, step),
            Scheme::Explicit => step_explicit(&state, net, cfg, step),
        };
        match result {
            Ok(mut next) => {
                t = if hits { target } else { t + step };
                next.time = t;
                state = next;
                traj.accepted_steps += 1;
                clean += 1;
                if clean >= cfg.grow_after && dt < cfg.dt_init {
                    dt = (2.0 * dt).min(cfg.dt_init);
                    clean = 0;
                }
                traj.diagnostics.push(record(&state, step, net, cfg, eq, conserved)?);
                if hits {
                    traj.snapshots.push(state.clone());
                    snap_index += 1;
                }
            }
            Err(Error::Positivity { species, cell }) => {
                traj.rejected_steps += 1;
                clean = 0;
                dt *= 0.5;
                if dt < cfg.dt_min {
                    traj.failure = Some(format!(
                        "step size underflow at t={t:e}: dt={dt:e} < dt_min={:e} \
                         (species {species} went negative at cell {cell})",
                        cfg.dt_min
                    ));
                    if traj.snapshots.last().map(|s| s.time) != Some(t) {
                        traj.snapshots.push(state.clone());
                    }
                    break;
                }
            }
            Err(e) => return Err(e),
        }
    }
    Ok(traj)
}

/// `t,x,<species>` with one row per cell per snapshot.
pub fn write_snapshots_csv<W: Write>(mut w: W, traj: &Trajectory, species: &[String]) -> std::io::Result<()> {
    write!(w, "t,x")?;
    for s in species {
        write!(w, ",{s}")?;
    }
    writeln!(w)?;
    for snap in &traj.snapshots {
        let grid = snap.grid();
        for i in 0..grid.n_cells() {
            write!(w, "{:e},{:e}", snap.time, grid.center(i))?;
            for s in 0..snap.n_species() {
                write!(w, ",{:e}", snap.species(s)[i])?;
            }
            writeln!(w)?;
        }
    }
    Ok(())
}

/// `t,dt,E,D,M1,M2,min_*,max_*`; `E` and `D` are blank where no entropy record exists.
pub fn write_diagnostics_csv<W: Write>(mut w: W, traj: &Trajectory, species: &[String]) -> std::io::Result<()> {
    let nc = traj.conserved_vectors.len();
    write!(w, "t,dt,E,D")?;
    if nc == 1 {
        write!(w, ",M")?;
    } else {
        for k in 0..nc {
            write!(w, ",M{}", k + 1)?;
        }
    }
    for s in species {
        write!(w, ",min_{s}")?;
    }
    for s in species {
        write!(w, ",max_{s}")?;
    }
    writeln!(w)?;
    for r in &traj.diagnostics {
        write!(w, "{:e},{:e}", r.t, r.dt)?;
        match &r.entropy {
            Some(e) => write!(w, ",{:e},{:e}", e.e_rel, e.d)?,
            None => write!(w, ",,")?,
        }
        for v in r.conserved.iter().chain(&r.min).chain(&r.max) {
            write!(w, ",{v:e}")?;
        }
        writeln!(w)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid1D;
    use crate::network::{preset_3species, Complex, Reaction};
    use std::f64::consts::PI;

    fn heat_net() -> Network {
        // a single inert species needs some reaction; A -> A is not allowed, so use
        // a two-species isomerisation with zero initial mass in the second species
        // and a rate so small it never matters for these checks.
        Network::new(
            vec!["A".into(), "B".into()],
            vec![Reaction::new(Complex::new(vec![1, 0]), Complex::new(vec![0, 1]), 1e-300).unwrap()],
        )
        .unwrap()
    }

    #[test]
    fn laplacian_examples() {
        let g = Grid1D::new(64).unwrap();
        let lap = laplacian_neumann(&vec![3.0; 64], g.h()).unwrap();
        assert!(lap.iter().all(|v| *v == 0.0));
        let u: Vec<f64> = g.centers().iter().map(|x| (PI * x).cos()).collect();
        let lap = laplacian_neumann(&u, g.h()).unwrap();
        let err = lap.iter().zip(&u).map(|(l, v)| (l + PI * PI * v).abs()).fold(0.0, f64::max);
        assert!(err < 2.0 * PI.powi(4) * g.h() * g.h());
        let s: f64 = lap.iter().sum();
        let norm = u.iter().map(|v| v.abs()).fold(0.0, f64::max);
        assert!(s.abs() <= 1e-13 * norm / (g.h() * g.h()));
        assert!(laplacian_neumann(&[1.0], 0.5).is_err());
    }

    #[test]
    fn zero_rates_constant_state_unchanged() {
        let g = Grid1D::new(20).unwrap();
        let net = preset_3species(2, 1.0, 1.0).unwrap();
        let s = StateField::constant(g, &[1.0, 1.0, 1.0]).unwrap();
        let cfg = SolverConfig::new(vec![1.0, 2.0, 0.5], 1e-2, 1.0);
        let next = step_imex(&s, &net, &cfg, 1e-2).unwrap();
        for k in 0..3 {
            assert!(next.species(k).iter().all(|v| (*v - 1.0).abs() < 1e-15));
        }
    }

    #[test]
    fn zero_diffusion_is_forward_euler() {
        let g = Grid1D::new(10).unwrap();
        let net = preset_3species(2, 1.0, 1.0).unwrap();
        let s = StateField::constant(g, &[2.0, 1.0, 1.0]).unwrap();
        let mut cfg = SolverConfig::new(vec![0.0; 3], 0.1, 1.0);
        cfg.scheme = Scheme::Explicit;
        for next in [step_imex(&s, &net, &cfg, 0.1).unwrap(), step_explicit(&s, &net, &cfg, 0.1).unwrap()] {
            // R(2,1,1) = (-1,-1,1)
            assert!(next.species(0).iter().all(|v| (*v - 1.9).abs() < 1e-15));
            assert!(next.species(1).iter().all(|v| (*v - 0.9).abs() < 1e-15));
            assert!(next.species(2).iter().all(|v| (*v - 1.1).abs() < 1e-15));
        }
    }

    #[test]
    fn explicit_cfl_and_zero_step() {
        let g = Grid1D::new(100).unwrap();
        let net = heat_net();
        let s = StateField::constant(g, &[1.0, 0.0]).unwrap();
        let cfg = SolverConfig::new(vec![1.0, 1.0], 1e-3, 1.0);
        let err = step_explicit(&s, &net, &cfg, 1e-3).unwrap_err();
        assert!(err.to_string().contains("5e-5"), "{err}");
        let same = step_explicit(&s, &net, &cfg, 0.0).unwrap();
        assert_eq!(same.all_species(), s.all_species());
    }

    fn cosine_amplitude(s: &StateField) -> f64 {
        let g = s.grid();
        let u = s.species(0);
        let mean = s.integral(0);
        2.0 * u.iter().enumerate().map(|(i, v)| (v - mean) * (PI * g.center(i)).cos()).sum::<f64>() * g.h()
    }

    #[test]
    fn heat_mode_decay() {
        let g = Grid1D::new(200).unwrap();
        let net = heat_net();
        let a0: Vec<f64> = g.centers().iter().map(|x| 1.0 + 0.1 * (PI * x).cos()).collect();
        let s0 = StateField::new(g, vec![a0, vec![0.0; 200]], 0.0).unwrap();
        let t = 0.5;
        let cfg = SolverConfig::new(vec![1.0, 1.0], 1e-4, t);
        let traj = integrate(&net, &s0, &cfg).unwrap();
        let amp = cosine_amplitude(traj.final_state()) / cosine_amplitude(&s0);
        let exact = (-PI * PI * t).exp();
        assert!((amp / exact - 1.0).abs() < 0.01, "{amp} vs {exact}");
    }

    #[test]
    fn equilibrium_is_stationary() {
        let g = Grid1D::new(50).unwrap();
        let net = preset_3species(2, 1.0, 1.0).unwrap();
        let s0 = StateField::constant(g, &[1.0, 1.0, 1.0]).unwrap();
        let cfg = SolverConfig::new(vec![1.0, 2.0, 0.5], 1e-2, 2.0);
        let traj = integrate(&net, &s0, &cfg).unwrap();
        for snap in &traj.snapshots {
            for k in 0..3 {
                assert!(snap.species(k).iter().all(|v| (*v - 1.0).abs() <= 1e-13));
            }
        }
        let times: Vec<f64> = traj.snapshots.iter().map(|s| s.time).collect();
        assert!(times.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(*times.last().unwrap(), 2.0);
    }

    #[test]
    fn positivity_failure_halves_dt() {
        let g = Grid1D::new(10).unwrap();
        let net = preset_3species(2, 1.0, 1.0).unwrap();
        let s0 = StateField::constant(g, &[0.01, 50.0, 1.0]).unwrap();
        let cfg = SolverConfig::new(vec![1.0; 3], 0.5, 1.0);
        assert!(matches!(step_imex(&s0, &net, &cfg, 0.5), Err(Error::Positivity { .. })));
        let traj = integrate(&net, &s0, &cfg).unwrap();
        assert!(traj.completed());
        assert!(traj.rejected_steps > 0);
        for snap in &traj.snapshots {
            assert!(snap.first_zero().is_none() || snap.all_species().iter().flatten().all(|v| *v >= 0.0));
        }
    }

    #[test]
    fn underflow_flags_partial_trajectory() {
        let g = Grid1D::new(10).unwrap();
        let net = preset_3species(2, 1.0, 1.0).unwrap();
        let s0 = StateField::constant(g, &[0.01, 50.0, 1.0]).unwrap();
        let mut cfg = SolverConfig::new(vec![1.0; 3], 0.5, 1.0);
        cfg.dt_min = 0.2;
        let traj = integrate(&net, &s0, &cfg).unwrap();
        assert!(!traj.completed());
        assert!(traj.failure.as_ref().unwrap().contains("underflow"));
    }

    #[test]
    fn csv_headers() {
        let g = Grid1D::new(4).unwrap();
        let net = preset_3species(2, 1.0, 1.0).unwrap();
        let s0 = StateField::constant(g, &[1.0, 1.0, 1.0]).unwrap();
        let cfg = SolverConfig::new(vec![1.0; 3], 0.1, 0.2);
        let traj =
            integrate_tracked(&net, &s0, &cfg, Some(&[1.0, 1.0, 1.0]), &[vec![1.0, 0.0, 1.0], vec![0.0, 1.0, 1.0]])
                .unwrap();
        let names: Vec<String> = ["a", "b", "c"].iter().map(|s| s.to_string()).collect();
        let mut buf = Vec::new();
        write_diagnostics_csv(&mut buf, &traj, &names).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("t,dt,E,D,M1,M2,min_a,min_b,min_c,max_a,max_b,max_c\n"));
        let mut buf = Vec::new();
        write_snapshots_csv(&mut buf, &traj, &names).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("t,x,a,b,c\n"));
        assert_eq!(text.lines().count(), 1 + 4 * traj.snapshots.len());
    }
}

use crd_core::grid::integrate_tracked;
use crd_core::network::preset_3species;
use crd_core::{Grid1D, SolverConfig, StateField};

fn stiff_start() -> StateField {
    let g = Grid1D::new(8).unwrap();
    StateField::new(g, vec![vec![0.01; 8], vec![50.0; 8], vec![1.0; 8]], 0.0).unwrap()
}

fn run(clamp: bool) -> crd_core::Trajectory {
    let net = preset_3species(2, 1.0, 1.0).unwrap();
    let mut cfg = SolverConfig::new(vec![1.0, 1.0, 1.0], 0.01, 0.1);
    cfg.debug_clamp_negative = clamp;
    let conserved = vec![vec![1.0, 0.0, 1.0], vec![0.0, 1.0, 1.0]];
    integrate_tracked(&net, &stiff_start(), &cfg, None, &conserved).unwrap()
}

#[test]
fn clamping_negative_updates_breaks_conservation() {
    let drift = run(true).conservation_drift();
    assert!(drift.iter().any(|d| *d > 1e-3), "clamped run should lose mass, drift {drift:?}");
}

#[test]
fn rejecting_negative_updates_keeps_conservation() {
    let traj = run(false);
    assert!(traj.completed());
    assert!(traj.rejected_steps > 0);
    assert!(traj.conservation_drift().iter().all(|d| *d <= 1e-12));
}

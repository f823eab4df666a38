use crd_core::certificates::{
    cert2_build, cert3_build, functional_constants, Cert2Inputs, Cert3Inputs, CertBundle2, CertBundle3,
    FunctionalConstants,
};
use crd_core::entropy::{entropy_abs, entropy_rel};
use crd_core::equilibria::{positive_equilibrium_2species, positive_equilibrium_3species_n};
use crd_core::grid::{integrate_tracked, make_initial, Grid1D, InitialBounds};
use crd_core::network::TwoSpeciesExponents;
use crd_core::{Equilibrium, Network, StateField, Trajectory};
use serde::{Deserialize, Serialize};

use crate::error::CliError;
use crate::scenario::{Scenario, System};

/// Everything produced by one simulation of a scenario.
#[derive(Debug, Clone)]
pub struct SimRun {
    pub net: Network,
    pub init: StateField,
    pub bounds: InitialBounds,
    pub eq: Equilibrium,
    pub traj: Trajectory,
}

/// Positive equilibrium in the class of `init`.
pub fn equilibrium_for(system: &System, init: &StateField) -> Result<Equilibrium, CliError> {
    let m = init.means();
    Ok(match *system {
        System::ThreeSpecies { n, k1, k2 } => positive_equilibrium_3species_n(n, m[0] + m[2], m[1] + m[2], k1 / k2)?,
        System::TwoSpecies { m1, n1, m2, n2 } => {
            let e = TwoSpeciesExponents::new(m1, n1, m2, n2)?;
            positive_equilibrium_2species(e, e.n_bar() as f64 * m[0] + e.m_bar() as f64 * m[1])?
        }
    })
}

pub fn initial_state(sc: &Scenario) -> Result<(StateField, InitialBounds), CliError> {
    let grid = Grid1D::new(sc.n_cells)?;
    let (init, bounds) = make_initial(&sc.init.kind, grid, sc.init.seed)?;
    if init.n_species() != sc.system.n_species() {
        return Err(CliError::Config(format!(
            "field `init`: {} species given, system has {}",
            init.n_species(),
            sc.system.n_species()
        )));
    }
    Ok((init, bounds))
}

/// Runs the scenario to `t_end`. A run stopped by step-size underflow is
/// returned with `traj.failure` set.
pub fn simulate(sc: &Scenario) -> Result<SimRun, CliError> {
    let net = sc.system.network()?;
    let (init, bounds) = initial_state(sc)?;
    let eq = equilibrium_for(&sc.system, &init)?;
    let traj = integrate_tracked(&net, &init, &sc.solver, Some(&eq.values), &sc.system.conserved_vectors())?;
    Ok(SimRun { net, init, bounds, eq, traj })
}

/// How the simulation-dependent certificate inputs were chosen.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub k_bound: Option<f64>,
    pub k_rule: Option<String>,
    pub eps_sq: Option<f64>,
    pub eps_rule: Option<String>,
    /// First time after which every species keeps `||u||_1 > eps^2`.
    pub t_eps: Option<f64>,
    pub beta: f64,
    pub beta_rule: String,
    pub alpha: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "system", rename_all = "snake_case")]
pub enum Bundle {
    ThreeSpecies(Box<CertBundle3>),
    TwoSpecies(Box<CertBundle2>),
}

impl Bundle {
    pub fn labeled(&self) -> Vec<(&'static str, f64)> {
        match self {
            Bundle::ThreeSpecies(b) => b.labeled(),
            Bundle::TwoSpecies(b) => b.labeled(),
        }
    }

    /// Certified exponential rate: `C13` or `D8`.
    pub fn rate(&self) -> f64 {
        match self {
            Bundle::ThreeSpecies(b) => b.c13,
            Bundle::TwoSpecies(b) => b.d8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub functional: FunctionalConstants,
    pub provenance: Provenance,
    pub bundle: Bundle,
}

/// `eps^2 = min(min(u_inf) / 2, 1/2)`.
pub fn eps_sq_rule(eq: &[f64]) -> f64 {
    (0.5 * eq.iter().copied().fold(f64::INFINITY, f64::min)).min(0.5)
}

/// First diagnostic time after which all L1 norms stay above `eps_sq`.
pub fn t_eps(traj: &Trajectory, eps_sq: f64) -> Option<f64> {
    let mut candidate = None;
    for r in &traj.diagnostics {
        if r.l1.iter().all(|v| *v > eps_sq) {
            candidate.get_or_insert(r.t);
        } else {
            candidate = None;
        }
    }
    candidate
}

/// Largest cell value of any species over the run.
pub fn k_bound(traj: &Trajectory) -> f64 {
    let ns = traj.diagnostics[0].max.len();
    (0..ns).map(|s| traj.running_sup(s)).fold(0.0, f64::max)
}

pub fn certify(sc: &Scenario, run: &SimRun) -> Result<Certificate, CliError> {
    let functional = functional_constants(&sc.certificate.functional());
    let cfg = &sc.certificate;
    let d = &sc.solver.diffusions;
    match sc.system {
        System::ThreeSpecies { n, k1, k2 } => {
            if n != 2 || k1 != 1.0 || k2 != 1.0 {
                return Err(CliError::Hypothesis(format!(
                    "the three-species certificate covers A + 2B <-> B + C with unit rates; got n = {n}, k1 = {k1}, k2 = {k2}"
                )));
            }
            let k = k_bound(&run.traj);
            let eps_sq = eps_sq_rule(&run.eq.values);
            let inputs = Cert3Inputs {
                m1: run.eq.class_data[0],
                m2: run.eq.class_data[1],
                diffusions: [d[0], d[1], d[2]],
                e0_abs: entropy_abs(&run.init),
                e0_rel: entropy_rel(&run.init, &run.eq.values)?,
                beta: run.bounds.inv_sup[1],
                k_bound: k,
                eps_sq,
                c_lsi: functional.c_lsi,
                c_p: functional.c_p,
                l: cfg.l,
                scan_size: cfg.scan_size,
            };
            let bundle = cert3_build(&inputs)?;
            Ok(Certificate {
                provenance: Provenance {
                    k_bound: Some(k),
                    k_rule: Some("largest cell value of any species over the simulated run".into()),
                    eps_sq: Some(eps_sq),
                    eps_rule: Some("min(min(u_inf) / 2, 1/2)".into()),
                    t_eps: t_eps(&run.traj, eps_sq),
                    beta: inputs.beta,
                    beta_rule: "sup of 1/b over the initial cells".into(),
                    alpha: None,
                },
                functional,
                bundle: Bundle::ThreeSpecies(Box::new(bundle)),
            })
        }
        System::TwoSpecies { m1, n1, m2, n2 } => {
            let exps = TwoSpeciesExponents::new(m1, n1, m2, n2)?;
            let inputs = Cert2Inputs {
                alpha: run.bounds.alpha(),
                beta: run.bounds.beta(),
                exps,
                total: run.eq.class_data[0],
                diffusions: [d[0], d[1]],
                c_lsi: functional.c_lsi,
                c_p: functional.c_p,
                l: cfg.l,
            };
            let bundle = cert2_build(&inputs)?;
            Ok(Certificate {
                provenance: Provenance {
                    k_bound: None,
                    k_rule: None,
                    eps_sq: Some(bundle.eps_sq),
                    eps_rule: Some("uniform lower bound from the initial box".into()),
                    t_eps: Some(0.0),
                    beta: inputs.beta,
                    beta_rule: "largest initial cell value of either species".into(),
                    alpha: Some(inputs.alpha),
                },
                functional,
                bundle: Bundle::TwoSpecies(Box::new(bundle)),
            })
        }
    }
}

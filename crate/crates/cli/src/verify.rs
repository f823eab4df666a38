use crd_core::certificates::{
    eedi_pointwise_check, envelope_check2, envelope_check3, lp_monotone_check, CheckStatus, EediReport,
    Envelope2Report, Envelope3Report, LpReport,
};
use crd_core::entropy::{
    cylinder_l2_check, d_dt_entropy_check, min_b_bound_check, CylinderReport, DdtReport, MinBReport, RateFit,
};
use crd_core::grid::{write_diagnostics_csv, write_snapshots_csv, RNG_NAME};
use crd_core::network::TwoSpeciesExponents;
use serde::{Deserialize, Serialize};

use crate::error::CliError;
use crate::pipeline::{certify, simulate, Bundle, Certificate, SimRun};
use crate::scenario::{Scenario, System};
use crate::suite::{self, ClassSource};

/// Seed for the scenario-independent samplers, fixed so reports are reproducible.
pub const SUITE_SEED: u64 = 0x5eed_2024;

/// Relative entropy at or below this is numerical zero.
pub const E_ZERO: f64 = 1e-20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
    NotApplicable,
}

impl Verdict {
    pub fn label(self) -> &'static str {
        match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Inconclusive => "INCONCLUSIVE",
            Verdict::NotApplicable => "N/A",
        }
    }

    fn of(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

impl From<CheckStatus> for Verdict {
    fn from(s: CheckStatus) -> Self {
        match s {
            CheckStatus::Pass => Verdict::Pass,
            CheckStatus::Fail => Verdict::Fail,
            CheckStatus::Inconclusive => Verdict::Inconclusive,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionResult {
    pub id: u8,
    pub name: String,
    pub verdict: Verdict,
    /// Measured value over its threshold (or the reverse), when one number says it.
    pub margin: Option<f64>,
    pub detail: String,
}

fn crit(id: u8, name: &str, verdict: Verdict, margin: Option<f64>, detail: String) -> CriterionResult {
    CriterionResult { id, name: name.into(), verdict, margin, detail }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "system", rename_all = "snake_case")]
pub enum EnvelopeReport {
    ThreeSpecies(Envelope3Report),
    TwoSpecies(Envelope2Report),
}

impl EnvelopeReport {
    pub fn status(&self) -> CheckStatus {
        match self {
            EnvelopeReport::ThreeSpecies(r) => r.status,
            EnvelopeReport::TwoSpecies(r) => r.status,
        }
    }

    pub fn fit(&self) -> Option<&RateFit> {
        match self {
            EnvelopeReport::ThreeSpecies(r) => r.fit.as_ref(),
            EnvelopeReport::TwoSpecies(r) => r.fit.as_ref(),
        }
    }

    pub fn rate_margin(&self) -> Option<f64> {
        match self {
            EnvelopeReport::ThreeSpecies(r) => r.rate_margin,
            EnvelopeReport::TwoSpecies(r) => r.rate_margin,
        }
    }

    pub fn note(&self) -> &str {
        match self {
            EnvelopeReport::ThreeSpecies(r) => &r.note,
            EnvelopeReport::TwoSpecies(r) => &r.note,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub scenario: Scenario,
    pub rng: String,
    pub equilibrium: Vec<f64>,
    pub conserved_labels: Vec<String>,
    pub conservation_drift: Vec<f64>,
    /// Steps where the relative entropy rose by more than `1e-12 max(1, E)`.
    pub entropy_increases: usize,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
    pub certificate: Certificate,
    pub ddt: Option<DdtReport>,
    pub eedi: EediReport,
    pub envelope: EnvelopeReport,
    pub fitted_rate: Option<RateFit>,
    pub min_b: Option<MinBReport>,
    pub cylinder: Vec<CylinderReport>,
    pub lp: Option<LpReport>,
    pub criteria: Vec<CriterionResult>,
    pub overall: Verdict,
}

impl RunReport {
    pub fn failing(&self, strict: bool) -> Vec<&CriterionResult> {
        self.criteria
            .iter()
            .filter(|c| c.verdict == Verdict::Fail || (strict && c.verdict == Verdict::Inconclusive))
            .collect()
    }
}

/// Wall-clock data kept apart from the deterministic report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMeta {
    pub started_unix_s: u64,
    pub wall_clock_s: f64,
    pub threads: usize,
    pub version: String,
}

fn csv_bytes(run: &SimRun) -> Vec<u8> {
    let species: Vec<String> = run.net.species().to_vec();
    let mut buf = Vec::new();
    write_diagnostics_csv(&mut buf, &run.traj, &species).expect("write to memory");
    write_snapshots_csv(&mut buf, &run.traj, &species).expect("write to memory");
    buf
}

fn entropy_increases(run: &SimRun) -> usize {
    let series = run.traj.entropy_series();
    series.windows(2).filter(|w| w[1].1 - w[0].1 > 1e-12 * w[0].1.max(1.0)).count()
}

fn conservation(run: &SimRun, drift: &[f64]) -> CriterionResult {
    let worst = drift.iter().copied().fold(0.0, f64::max);
    crit(
        1,
        "conservation laws",
        Verdict::of(worst <= 1e-11),
        Some(worst / 1e-11),
        format!(
            "relative drift [{}] over {} steps (limit 1e-11)",
            drift.iter().map(|d| format!("{d:.3e}")).collect::<Vec<_>>().join(", "),
            run.traj.accepted_steps
        ),
    )
}

fn heat_kernel() -> CriterionResult {
    match suite::heat_kernel(200, 1e-4, 1.0, 0.2) {
        Ok(h) => crit(
            2,
            "heat-kernel oracle",
            Verdict::of(h.rel_err_coarse <= 0.01 && h.reduction >= 3.5),
            Some(h.rel_err_coarse / 0.01),
            format!(
                "rate {:.8} vs d pi^2 = {:.8} (rel err {:.2e}); refined {:.2e}, reduction {:.2}x",
                h.coarse, h.exact, h.rel_err_coarse, h.rel_err_fine, h.reduction
            ),
        ),
        Err(e) => crit(2, "heat-kernel oracle", Verdict::Fail, None, e.to_string()),
    }
}

fn ddt(ddt: &Option<DdtReport>, err: Option<String>, e_max: f64) -> CriterionResult {
    let name = "entropy identity dE/dt = -D";
    match ddt {
        Some(r) if e_max <= E_ZERO => crit(
            3,
            name,
            Verdict::Pass,
            None,
            format!(
                "equilibrium start: E <= {E_ZERO:e} throughout (residual {:.1e}, max D {:.1e})",
                r.max_residual, r.max_d
            ),
        ),
        Some(r) => crit(
            3,
            name,
            Verdict::of(r.max_residual <= 1e-2 * r.max_d),
            Some(r.max_residual / (1e-2 * r.max_d)),
            format!("max |dE/dt + D| = {:.3e}, max D = {:.3e}, {} samples", r.max_residual, r.max_d, r.samples),
        ),
        None => crit(3, name, Verdict::Inconclusive, None, err.unwrap_or_default()),
    }
}

fn sample_crit(id: u8, name: &str, rep: &suite::SampleReport, what: &str) -> CriterionResult {
    crit(
        id,
        name,
        Verdict::of(rep.violations == 0),
        None,
        format!(
            "{} violations in {} samples {what}; worst shortfall {:.3e} at {:?}",
            rep.violations, rep.samples, rep.worst, rep.worst_at
        ),
    )
}

fn split(run: &SimRun) -> CriterionResult {
    let worst = run
        .traj
        .diagnostics
        .iter()
        .filter_map(|r| r.entropy.as_ref().map(|e| e.split_discrepancy()))
        .fold(0.0, f64::max);
    let n = run.traj.diagnostics.iter().filter(|r| r.entropy.is_some()).count();
    crit(
        6,
        "entropy split identity",
        Verdict::of(worst <= 1e-12 && n > 0),
        Some(worst / 1e-12),
        format!("max discrepancy {worst:.3e} over {n} records (limit 1e-12)"),
    )
}

fn equilibria() -> CriterionResult {
    match suite::equilibrium_solvers(1000, SUITE_SEED) {
        Ok(e) => crit(
            7,
            "equilibrium solvers",
            Verdict::of(e.max_residual_3 <= 1e-12 && e.max_residual_2 <= 1e-12 && e.symmetric_error <= 1e-14),
            None,
            format!(
                "three-species max residual {:.2e} ({} classes), two-species {:.2e} ({} classes), symmetric error {:.1e}",
                e.max_residual_3, e.classes_3, e.max_residual_2, e.classes_2, e.symmetric_error
            ),
        ),
        Err(e) => crit(7, "equilibrium solvers", Verdict::Fail, None, e.to_string()),
    }
}

fn quadratic() -> CriterionResult {
    match suite::quadratic_limit_at(2.0, 2.0, 1e-3) {
        Ok(q) => {
            let rel = (q.d2_ratio - q.two_sigma).abs() / q.two_sigma;
            crit(
                12,
                "quadratic limit of D2/E",
                Verdict::of(rel <= 0.01),
                Some(rel / 0.01),
                format!(
                    "symmetric class: D2/E = {:.6}, 2 sum 1/u_inf = {:.6}; S2/E = {:.6}",
                    q.d2_ratio, q.two_sigma, q.s2_ratio
                ),
            )
        }
        Err(e) => crit(12, "quadratic limit of D2/E", Verdict::Fail, None, e.to_string()),
    }
}

/// Runs the scenario end to end and evaluates every criterion that can be
/// decided from it, plus the scenario-independent suites.
pub fn verify(sc: &Scenario) -> Result<RunReport, CliError> {
    let run = simulate(sc)?;
    if let Some(f) = &run.traj.failure {
        return Err(CliError::Solver(f.clone()));
    }
    let cert = certify(sc, &run)?;
    let rerun = simulate(sc)?;
    let mut criteria = Vec::with_capacity(16);

    let drift = run.traj.conservation_drift();
    criteria.push(conservation(&run, &drift));
    criteria.push(heat_kernel());
    let (ddt_rep, ddt_err) = match d_dt_entropy_check(&run.traj) {
        Ok(r) => (Some(r), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let e_max = run.traj.entropy_series().iter().map(|p| p.1).fold(0.0, f64::max);
    criteria.push(ddt(&ddt_rep, ddt_err, e_max));
    criteria.push(sample_crit(
        4,
        "Psi dominates (sqrt x - sqrt y)^2",
        &suite::psi_dominance(1_000_000, SUITE_SEED),
        "over [1e-6, 1e6]^2",
    ));
    criteria.push(sample_crit(
        5,
        "Psi ratio non-decreasing",
        &suite::psi_ratio_monotone(10_000, SUITE_SEED),
        "(200-point grids)",
    ));
    criteria.push(split(&run));
    criteria.push(equilibria());

    let series = run.traj.entropy_series();
    let (min_b, cylinder, lp, eedi, envelope) = match (&cert.bundle, &sc.system) {
        (Bundle::ThreeSpecies(b), _) => {
            let mb = min_b_bound_check(&run.traj, 1, b.inputs.beta, b.inputs.k_bound);
            criteria.push(crit(
                8,
                "lower bound on b",
                Verdict::of(mb.holds),
                Some(mb.min_scaled),
                format!("{} violations; min of inf b (beta + k t) = {:.4}", mb.violations, mb.min_scaled),
            ));
            let (m1, m2) = (b.inputs.m1, b.inputs.m2);
            let t_end = sc.solver.t_end;
            let cyl: Vec<CylinderReport> = (0..=8)
                .map(|t| t as f64)
                .filter(|t| t + 1.0 <= t_end + 1e-9)
                .map(|t| cylinder_l2_check(&run.traj, t, &[m1, m2, m1.min(m2)], b.c1))
                .collect::<Result<_, _>>()?;
            let worst =
                cyl.iter().flat_map(|c| c.measured.iter().zip(&c.bound).map(|(m, b)| m / b)).fold(0.0, f64::max);
            criteria.push(if cyl.is_empty() {
                crit(9, "space-time L2 bound", Verdict::Inconclusive, None, "run shorter than one time unit".into())
            } else {
                crit(
                    9,
                    "space-time L2 bound",
                    Verdict::of(cyl.iter().all(|c| c.holds)),
                    Some(worst),
                    format!("{} windows, largest measured/bound {worst:.4}", cyl.len()),
                )
            });
            criteria.push(crit(
                10,
                "two-species L-infinity box",
                Verdict::NotApplicable,
                None,
                "three-species scenario".into(),
            ));
            criteria.push(crit(11, "L^p functionals", Verdict::NotApplicable, None, "three-species scenario".into()));
            let t_eps = cert.provenance.t_eps;
            let eedi = eedi_pointwise_check(&series, b.c13, t_eps.unwrap_or(f64::INFINITY));
            let env = envelope_check3(&run.traj, b, t_eps.unwrap_or(sc.solver.t_end));
            (Some(mb), cyl, None, eedi, EnvelopeReport::ThreeSpecies(env))
        }
        (Bundle::TwoSpecies(b), System::TwoSpecies { m1, n1, m2, n2 }) => {
            criteria.push(crit(8, "lower bound on b", Verdict::NotApplicable, None, "two-species scenario".into()));
            criteria.push(crit(9, "space-time L2 bound", Verdict::NotApplicable, None, "two-species scenario".into()));
            let lo = run.traj.diagnostics.iter().flat_map(|r| r.min.iter().copied()).fold(f64::INFINITY, f64::min);
            let hi = run.traj.diagnostics.iter().flat_map(|r| r.max.iter().copied()).fold(0.0, f64::max);
            let violations = run
                .traj
                .diagnostics
                .iter()
                .filter(|r| r.min.iter().any(|v| *v < b.eps_sq) || r.max.iter().any(|v| *v > b.omega))
                .count();
            criteria.push(crit(
                10,
                "two-species L-infinity box",
                Verdict::of(violations == 0),
                Some((b.eps_sq / lo).max(hi / b.omega)),
                format!(
                    "cell range [{lo:.6}, {hi:.6}] vs [eps^2, omega] = [{:.6}, {:.6}]; {violations} steps outside",
                    b.eps_sq, b.omega
                ),
            ));
            let e = TwoSpeciesExponents::new(*m1, *n1, *m2, *n2)?;
            let lp = lp_monotone_check(&run.traj, &sc.certificate.lp_exponents, e.m_bar(), e.n_bar())?;
            let rises: Vec<String> = lp
                .families
                .iter()
                .map(|f| format!("p={}: {}+{} rises", f.p, f.violations_inverse, f.violations_direct))
                .collect();
            criteria.push(crit(
                11,
                "L^p functionals",
                lp.status.into(),
                None,
                format!("{} snapshot steps; {}", lp.steps, rises.join(", ")),
            ));
            let eedi = eedi_pointwise_check(&series, b.d8, 0.0);
            let env = envelope_check2(&run.traj, b);
            (None, Vec::new(), Some(lp), eedi, EnvelopeReport::TwoSpecies(env))
        }
        _ => unreachable!("bundle matches the scenario system"),
    };

    criteria.push(quadratic());
    match suite::d2_identity(10_000, SUITE_SEED) {
        Ok(r) => criteria.push(sample_crit(13, "identity D2 = b c_inf S2", &r, "(relative gap, limit 1e-12)")),
        Err(e) => criteria.push(crit(13, "identity D2 = b c_inf S2", Verdict::Fail, None, e.to_string())),
    }
    let mu = match (&sc.system, &cert.bundle) {
        (System::ThreeSpecies { .. }, Bundle::ThreeSpecies(b)) => {
            suite::mu_three_species(100_000, SUITE_SEED, ClassSource::Fixed { m1: b.inputs.m1, m2: b.inputs.m2 })
        }
        (System::TwoSpecies { m1, n1, m2, n2 }, Bundle::TwoSpecies(b)) => suite::mu_two_species(
            100_000,
            SUITE_SEED,
            Some(TwoSpeciesExponents::new(*m1, *n1, *m2, *n2)?),
            Some(b.inputs.total),
        ),
        _ => unreachable!("bundle matches the scenario system"),
    }?;
    criteria.push(sample_crit(14, "mean-deviation inequality", &mu, "in the scenario's class"));

    let env_status: Verdict = envelope.status().into();
    let eedi_status: Verdict = if cert.provenance.t_eps.is_none() { Verdict::Inconclusive } else { eedi.status.into() };
    let verdict = if env_status == Verdict::Fail || eedi_status == Verdict::Fail {
        Verdict::Fail
    } else if env_status == Verdict::Inconclusive || eedi_status == Verdict::Inconclusive {
        Verdict::Inconclusive
    } else {
        Verdict::Pass
    };
    let mut detail = format!(
        "certified rate {:.4e}; min D/E = {} after t = {}; fitted rate {}",
        cert.bundle.rate(),
        eedi.min_ratio.map_or("n/a".to_string(), |r| format!("{r:.4e}")),
        eedi.t_from,
        envelope.fit().map_or("n/a".to_string(), |f| format!("{:.4e}", f.lambda)),
    );
    if !envelope.note().is_empty() {
        detail.push_str("; ");
        detail.push_str(envelope.note());
    }
    criteria.push(crit(15, "entropy-dissipation inequality and envelope", verdict, envelope.rate_margin(), detail));

    let same = csv_bytes(&run) == csv_bytes(&rerun);
    criteria.push(crit(
        16,
        "determinism",
        Verdict::of(same),
        None,
        format!(
            "second run with seed {} {} byte-identical CSV output",
            sc.init.seed,
            if same { "gave" } else { "did not give" }
        ),
    ));

    let overall = if criteria.iter().any(|c| c.verdict == Verdict::Fail) {
        Verdict::Fail
    } else if criteria.iter().any(|c| c.verdict == Verdict::Inconclusive) {
        Verdict::Inconclusive
    } else {
        Verdict::Pass
    };
    Ok(RunReport {
        scenario: sc.clone(),
        rng: RNG_NAME.into(),
        equilibrium: run.eq.values.clone(),
        conserved_labels: sc.system.conserved_labels(),
        conservation_drift: drift,
        entropy_increases: entropy_increases(&run),
        accepted_steps: run.traj.accepted_steps,
        rejected_steps: run.traj.rejected_steps,
        fitted_rate: envelope.fit().cloned(),
        certificate: cert,
        ddt: ddt_rep,
        eedi,
        envelope,
        min_b,
        cylinder,
        lp,
        criteria,
        overall,
    })
}

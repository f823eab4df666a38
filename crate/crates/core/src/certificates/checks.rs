//! Simulation-side checks of the certified bounds.

use serde::{Deserialize, Serialize};

use super::{CertBundle2, CertBundle3};
use crate::entropy::{fit_decay_rate, FitWindow, RateFit, DEFAULT_FIT_FLOOR};
use crate::grid::{StateField, Trajectory};
use crate::{Error, Result};

const LP_TOL: f64 = 1e-9;
const ENVELOPE_TOL: f64 = 1e-9;
/// Below this the relative entropy is treated as zero.
const E_ZERO: f64 = 1e-20;
const MIN_DROP: f64 = 10.0;
const MIN_FIT_SAMPLES: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckStatus {
    Pass,
    Fail,
    Inconclusive,
}

impl CheckStatus {
    pub fn label(self) -> &'static str {
        match self {
            CheckStatus::Pass => "PASS",
            CheckStatus::Fail => "FAIL",
            CheckStatus::Inconclusive => "INCONCLUSIVE",
        }
    }

    fn from_bool(ok: bool) -> Self {
        if ok {
            CheckStatus::Pass
        } else {
            CheckStatus::Fail
        }
    }
}

/// Exponents `(q_inverse, q_direct)` paired with `p`.
pub fn lp_q_pair(p: f64, m_bar: u32, n_bar: u32) -> (f64, f64) {
    let r = n_bar as f64 / m_bar as f64;
    ((p + 1.0) * r - 1.0, (p - 1.0) * r + 1.0)
}

/// `(F_inverse, F_direct)` with
/// `F_inverse = int a^-p / (p m) + b^-q / (q n)` and
/// `F_direct = int a^p / (p m) + b^q / (q n)`.
pub fn lp_functionals(state: &StateField, p: f64, m_bar: u32, n_bar: u32) -> Result<(f64, f64)> {
    if state.n_species() != 2 {
        return Err(Error::Contract(format!("expected 2 species, got {}", state.n_species())));
    }
    if let Some((species, cell)) = state.first_zero() {
        return Err(Error::BoundaryTouch { species, cell });
    }
    let (qi, qd) = lp_q_pair(p, m_bar, n_bar);
    let (m, n) = (m_bar as f64, n_bar as f64);
    let h = state.grid().h();
    let (a, b) = (state.species(0), state.species(1));
    let mut inv = 0.0;
    let mut dir = 0.0;
    for (&x, &y) in a.iter().zip(b) {
        inv += x.powf(-p) / (p * m) + y.powf(-qi) / (qi * n);
        dir += x.powf(p) / (p * m) + y.powf(qd) / (qd * n);
    }
    Ok((inv * h, dir * h))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LpFamily {
    pub p: f64,
    pub q_inverse: f64,
    pub q_direct: f64,
    pub violations_inverse: usize,
    pub violations_direct: usize,
    /// Largest relative step increase seen, zero when monotone.
    pub max_rise_inverse: f64,
    pub max_rise_direct: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LpReport {
    pub families: Vec<LpFamily>,
    pub steps: usize,
    pub status: CheckStatus,
}

/// Checks both functional families are non-increasing between consecutive snapshots.
pub fn lp_monotone_check(traj: &Trajectory, p_list: &[f64], m_bar: u32, n_bar: u32) -> Result<LpReport> {
    let mut families = Vec::with_capacity(p_list.len());
    for &p in p_list {
        let (q_inverse, q_direct) = lp_q_pair(p, m_bar, n_bar);
        let values = traj.snapshots.iter().map(|s| lp_functionals(s, p, m_bar, n_bar)).collect::<Result<Vec<_>>>()?;
        let mut fam = LpFamily {
            p,
            q_inverse,
            q_direct,
            violations_inverse: 0,
            violations_direct: 0,
            max_rise_inverse: 0.0,
            max_rise_direct: 0.0,
        };
        for w in values.windows(2) {
            let rise = |prev: f64, next: f64| (next - prev) / prev.abs().max(1.0);
            let ri = rise(w[0].0, w[1].0);
            let rd = rise(w[0].1, w[1].1);
            fam.max_rise_inverse = fam.max_rise_inverse.max(ri);
            fam.max_rise_direct = fam.max_rise_direct.max(rd);
            fam.violations_inverse += usize::from(ri > LP_TOL);
            fam.violations_direct += usize::from(rd > LP_TOL);
        }
        families.push(fam);
    }
    let ok = families.iter().all(|f| f.violations_inverse == 0 && f.violations_direct == 0);
    Ok(LpReport { families, steps: traj.snapshots.len().saturating_sub(1), status: CheckStatus::from_bool(ok) })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EediReport {
    pub rate: f64,
    pub t_from: f64,
    pub samples: usize,
    /// Samples skipped because the entropy was numerically zero.
    pub skipped: usize,
    pub violations: usize,
    pub min_ratio: Option<f64>,
    pub argmin_t: Option<f64>,
    pub status: CheckStatus,
}

/// Checks `D >= rate * E` on every `(t, E, D)` sample with `t >= t_from`.
pub fn eedi_pointwise_check(series: &[(f64, f64, f64)], rate: f64, t_from: f64) -> EediReport {
    let mut report = EediReport {
        rate,
        t_from,
        samples: 0,
        skipped: 0,
        violations: 0,
        min_ratio: None,
        argmin_t: None,
        status: CheckStatus::Pass,
    };
    for &(t, e, d) in series.iter().filter(|p| p.0 >= t_from) {
        if e <= E_ZERO {
            report.skipped += 1;
            continue;
        }
        report.samples += 1;
        let ratio = d / e;
        if report.min_ratio.is_none_or(|m| ratio < m) {
            report.min_ratio = Some(ratio);
            report.argmin_t = Some(t);
        }
        if ratio < rate * (1.0 - 1e-12) {
            report.violations += 1;
        }
    }
    report.status = CheckStatus::from_bool(report.violations == 0);
    report
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Envelope3Report {
    pub e0: f64,
    /// Samples above `E0 (beta / (beta + k t))^{C5/k}`.
    pub algebraic_violations: usize,
    /// Smallest `bound / E` over the run.
    pub algebraic_min_margin: Option<f64>,
    /// Samples above `E0 (beta + k t)^{-C5/k}`; differs from the normalised
    /// form by the factor `beta^{C5/k}`.
    pub unnormalised_violations: usize,
    pub t_eps: f64,
    pub fit: Option<RateFit>,
    pub certified_rate: f64,
    /// `lambda / C13`.
    pub rate_margin: Option<f64>,
    pub status: CheckStatus,
    pub note: String,
}

fn drop_and_fit(series: &[(f64, f64)], t_from: f64) -> (f64, Option<RateFit>) {
    let tail: Vec<(f64, f64)> = series.iter().copied().filter(|p| p.0 >= t_from).collect();
    let e0 = series.first().map_or(0.0, |p| p.1);
    let e_min = series.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    let drop = if e_min > 0.0 { e0 / e_min } else { f64::INFINITY };
    let fit = fit_decay_rate(&tail, FitWindow::Tail { fraction: 0.5 }, DEFAULT_FIT_FLOOR).ok();
    (drop, fit)
}

fn classify_fit(drop: f64, fit: &Option<RateFit>, rate: f64) -> (CheckStatus, Option<f64>, String) {
    match fit {
        Some(f) if drop >= MIN_DROP && f.n_samples >= MIN_FIT_SAMPLES => {
            let margin = f.lambda / rate;
            (CheckStatus::from_bool(f.lambda >= rate), Some(margin), String::new())
        }
        Some(f) => (
            CheckStatus::Inconclusive,
            Some(f.lambda / rate),
            format!(
                "entropy dropped {drop:.3e}x with {} fit samples; need {MIN_DROP}x and {MIN_FIT_SAMPLES}",
                f.n_samples
            ),
        ),
        None => (CheckStatus::Inconclusive, None, "too few samples for a rate fit".into()),
    }
}

/// Checks the two-phase three-species envelope.
pub fn envelope_check3(traj: &Trajectory, cert: &CertBundle3, t_eps: f64) -> Envelope3Report {
    let series: Vec<(f64, f64)> = traj.entropy_series().into_iter().map(|(t, e, _)| (t, e)).collect();
    let e0 = series.first().map_or(0.0, |p| p.1);
    let (beta, k) = (cert.inputs.beta, cert.inputs.k_bound);
    let expo = cert.envelope.algebraic_exponent;
    let mut report = Envelope3Report {
        e0,
        algebraic_violations: 0,
        algebraic_min_margin: None,
        unnormalised_violations: 0,
        t_eps,
        fit: None,
        certified_rate: cert.c13,
        rate_margin: None,
        status: CheckStatus::Pass,
        note: String::new(),
    };
    if e0 <= E_ZERO {
        report.note = "equilibrium start: entropy is identically zero".into();
        return report;
    }
    for &(t, e) in &series {
        let bound = e0 * (beta / (beta + k * t)).powf(expo);
        if e > bound * (1.0 + ENVELOPE_TOL) {
            report.algebraic_violations += 1;
        }
        if e > E_ZERO {
            let m = bound / e;
            report.algebraic_min_margin = Some(report.algebraic_min_margin.map_or(m, |x: f64| x.min(m)));
        }
        if e > e0 * (beta + k * t).powf(-expo) * (1.0 + ENVELOPE_TOL) {
            report.unnormalised_violations += 1;
        }
    }
    let (drop, fit) = drop_and_fit(&series, t_eps);
    let (status, margin, note) = classify_fit(drop, &fit, cert.c13);
    report.fit = fit;
    report.rate_margin = margin;
    report.note = note;
    report.status = if report.algebraic_violations > 0 { CheckStatus::Fail } else { status };
    report
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Envelope2Report {
    pub e0: f64,
    /// Samples above `E0 exp(-D8 t)`.
    pub violations: usize,
    /// Steps where `E exp(D8 t)` increased, among samples with `E` above the zero floor.
    pub monotone_violations: usize,
    pub min_margin: Option<f64>,
    pub fit: Option<RateFit>,
    pub certified_rate: f64,
    pub rate_margin: Option<f64>,
    pub status: CheckStatus,
    pub note: String,
}

/// Checks the exponential two-species envelope.
pub fn envelope_check2(traj: &Trajectory, cert: &CertBundle2) -> Envelope2Report {
    let series: Vec<(f64, f64)> = traj.entropy_series().into_iter().map(|(t, e, _)| (t, e)).collect();
    let e0 = series.first().map_or(0.0, |p| p.1);
    let rate = cert.d8;
    let mut report = Envelope2Report {
        e0,
        violations: 0,
        monotone_violations: 0,
        min_margin: None,
        fit: None,
        certified_rate: rate,
        rate_margin: None,
        status: CheckStatus::Pass,
        note: String::new(),
    };
    if e0 <= E_ZERO {
        report.note = "equilibrium start: entropy is identically zero".into();
        return report;
    }
    let scaled: Vec<f64> = series.iter().map(|&(t, e)| e * (rate * t).exp()).collect();
    for (&(_, e), &s) in series.iter().zip(&scaled) {
        if s > e0 * (1.0 + ENVELOPE_TOL) {
            report.violations += 1;
        }
        if e > E_ZERO {
            let m = e0 / s;
            report.min_margin = Some(report.min_margin.map_or(m, |x: f64| x.min(m)));
        }
    }
    for (w, s) in series.windows(2).zip(scaled.windows(2)) {
        if w[1].1 > E_ZERO && s[1] > s[0] * (1.0 + ENVELOPE_TOL) {
            report.monotone_violations += 1;
        }
    }
    let (drop, fit) = drop_and_fit(&series, 0.0);
    let (status, margin, note) = classify_fit(drop, &fit, rate);
    report.fit = fit;
    report.rate_margin = margin;
    report.note = note;
    report.status = if report.violations > 0 || report.monotone_violations > 0 { CheckStatus::Fail } else { status };
    report
}

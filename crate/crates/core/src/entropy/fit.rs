use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Samples of `E_rel` below this are treated as round-off and dropped before fitting.
pub const DEFAULT_FIT_FLOOR: f64 = 1e-20;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FitWindow {
    /// Fixed `[t_lo, t_hi]`.
    Range { t_lo: f64, t_hi: f64 },
    /// The trailing `fraction` of the span over which `E_rel` stays above the floor.
    Tail { fraction: f64 },
}

impl Default for FitWindow {
    fn default() -> Self {
        FitWindow::Tail { fraction: 0.5 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub lambda: f64,
    pub intercept: f64,
    pub window: (f64, f64),
    pub r_squared: f64,
    pub n_samples: usize,
    /// Some samples were dropped for falling below the floor.
    pub truncated: bool,
}

/// Least-squares line through `(t, ln y)`; returns `(slope, intercept, r^2)`.
pub fn fit_log_linear(points: &[(f64, f64)]) -> Result<(f64, f64, f64)> {
    if points.len() < 2 {
        return Err(Error::Contract(format!("need at least 2 samples to fit, got {}", points.len())));
    }
    let n = points.len() as f64;
    let tm = points.iter().map(|p| p.0).sum::<f64>() / n;
    let ym = points.iter().map(|p| p.1.ln()).sum::<f64>() / n;
    let mut stt = 0.0;
    let mut sty = 0.0;
    let mut syy = 0.0;
    for (t, y) in points {
        let dt = t - tm;
        let dy = y.ln() - ym;
        stt += dt * dt;
        sty += dt * dy;
        syy += dy * dy;
    }
    if stt == 0.0 {
        return Err(Error::Contract("fit window has zero time extent".into()));
    }
    let slope = sty / stt;
    let intercept = ym - slope * tm;
    let r2 = if syy == 0.0 { 1.0 } else { (sty * sty / (stt * syy)).clamp(0.0, 1.0) };
    Ok((slope, intercept, r2))
}

/// Fits `E_rel(t) ~ exp(intercept - lambda t)` to `(t, E_rel)` samples.
pub fn fit_decay_rate(series: &[(f64, f64)], window: FitWindow, floor: f64) -> Result<RateFit> {
    let floor = floor.max(1e-300);
    let above: Vec<(f64, f64)> = series.iter().copied().filter(|(_, e)| *e > floor).collect();
    let truncated = above.len() < series.len();
    let (t_lo, t_hi) = match window {
        FitWindow::Range { t_lo, t_hi } => (t_lo, t_hi),
        FitWindow::Tail { fraction } => {
            if !(fraction > 0.0 && fraction <= 1.0) {
                return Err(Error::Contract(format!("tail fraction must lie in (0,1], got {fraction}")));
            }
            let first = above.first().map(|p| p.0).unwrap_or(0.0);
            let last = above.last().map(|p| p.0).unwrap_or(0.0);
            (last - fraction * (last - first), last)
        }
    };
    let pts: Vec<(f64, f64)> = above.into_iter().filter(|(t, _)| *t >= t_lo && *t <= t_hi).collect();
    let (slope, intercept, r_squared) = fit_log_linear(&pts)?;
    Ok(RateFit { lambda: -slope, intercept, window: (t_lo, t_hi), r_squared, n_samples: pts.len(), truncated })
}

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct FunctionalConfig {
    /// Overrides the default `pi^2`.
    #[serde(default)]
    pub c_lsi: Option<f64>,
    #[serde(default)]
    pub c_p: Option<f64>,
    /// Also run the trial-family estimator for the log-Sobolev constant.
    #[serde(default)]
    pub estimate_lsi: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LsiEstimate {
    /// Smallest ratio `int |f'|^2/f / int f ln(f/mean f)` found; an upper
    /// estimate of the sharp constant.
    pub min_ratio: f64,
    pub argmin: (u32, f64),
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionalConstants {
    pub c_lsi: f64,
    pub c_p: f64,
    pub c_lsi_source: String,
    pub c_p_source: String,
    pub estimate: Option<LsiEstimate>,
    pub warning: Option<String>,
}

/// `(C_LSI, C_P)` for the unit interval, with defaults `pi^2` for both.
pub fn functional_constants(cfg: &FunctionalConfig) -> FunctionalConstants {
    let (c_lsi, c_lsi_source) = match cfg.c_lsi {
        Some(v) => (v, "configured".to_string()),
        None => (PI * PI, "default pi^2 (configurable placeholder)".to_string()),
    };
    let (c_p, c_p_source) = match cfg.c_p {
        Some(v) => (v, "configured".to_string()),
        None => (PI * PI, "first nonzero Neumann eigenvalue on [0,1]".to_string()),
    };
    let mut warning = None;
    let estimate = if cfg.estimate_lsi {
        let est = lsi_estimate(400);
        if !est.converged {
            warning = Some("log-Sobolev estimator did not converge; default kept".into());
        } else if est.min_ratio < c_lsi {
            warning =
                Some(format!("trial family reaches ratio {} below the configured C_LSI {}", est.min_ratio, c_lsi));
        }
        Some(est)
    } else {
        None
    };
    FunctionalConstants { c_lsi, c_p, c_lsi_source, c_p_source, estimate, warning }
}

/// Discrete Rayleigh quotient `||f'||^2 / ||f - mean f||^2` on cell values.
pub fn poincare_ratio(f: &[f64], h: f64) -> f64 {
    let n = f.len() as f64;
    let mean = f.iter().sum::<f64>() / n;
    let num: f64 = f.windows(2).map(|w| (w[1] - w[0]).powi(2)).sum::<f64>() / h;
    let den: f64 = f.iter().map(|v| (v - mean).powi(2)).sum::<f64>() * h;
    num / den
}

/// Minimises the log-Sobolev quotient over `f = 1 + e cos(k pi x)` with
/// `k = 1..4` and `e` on a grid in `(0, 1)`.
pub fn lsi_estimate(n_cells: usize) -> LsiEstimate {
    let h = 1.0 / n_cells as f64;
    let xs: Vec<f64> = (0..n_cells).map(|i| (i as f64 + 0.5) * h).collect();
    let mut best = (f64::INFINITY, (0, 0.0));
    for k in 1..=4u32 {
        for j in 1..=99 {
            let e = j as f64 * 0.01;
            let f: Vec<f64> = xs.iter().map(|x| 1.0 + e * (k as f64 * PI * x).cos()).collect();
            let mean = f.iter().sum::<f64>() * h;
            let fisher: f64 = f.windows(2).map(|w| (w[1] - w[0]) * (w[1] / w[0]).ln()).sum::<f64>() / h;
            let ent: f64 = f.iter().map(|v| v * (v / mean).ln()).sum::<f64>() * h;
            if ent > 0.0 {
                let r = fisher / ent;
                if r < best.0 {
                    best = (r, (k, e));
                }
            }
        }
    }
    LsiEstimate { min_ratio: best.0, argmin: best.1, converged: best.0.is_finite() }
}

/// Log-spaced radii `0.1 .. 10` for the decomposition `|delta| <= L`.
pub fn l_grid() -> Vec<f64> {
    (0..=40).map(|j| 10f64.powf(-1.0 + j as f64 * 0.05)).collect()
}

/// Smallest `10^{j/20}` strictly above `threshold`.
pub fn k_grid_pick(threshold: f64) -> f64 {
    let mut j = (20.0 * threshold.max(1e-300).log10()).floor() as i64 - 1;
    loop {
        let k = 10f64.powf(j as f64 / 20.0);
        if k > threshold {
            return k;
        }
        j += 1;
    }
}

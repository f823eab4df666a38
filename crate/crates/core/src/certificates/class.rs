use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::entropy::entropy_rel_const;
use crate::entropy::psi::psi_raw;
use crate::equilibria::positive_equilibrium_3species;
use crate::{Error, Result};

/// Constant state `(M1 - z, M2 - z, z)` of the class.
pub fn class_point(m1: f64, m2: f64, z: f64) -> [f64; 3] {
    [m1 - z, m2 - z, z]
}

/// `psi(ab/(ab)_inf ; c/c_inf) + psi(c/c_inf ; ab/(ab)_inf)`.
pub fn s2(v: &[f64], eq: &[f64]) -> f64 {
    let x = v[0] * v[1] / (eq[0] * eq[1]);
    let y = v[2] / eq[2];
    psi_raw(x, y) + psi_raw(y, x)
}

/// `(a b^2)_inf psi(ab^2/(ab^2)_inf ; bc/(bc)_inf) + (bc)_inf psi(bc/(bc)_inf ; ab^2/(ab^2)_inf)`.
pub fn d2(v: &[f64], eq: &[f64]) -> f64 {
    let w1 = eq[0] * eq[1] * eq[1];
    let w2 = eq[1] * eq[2];
    let x = v[0] * v[1] * v[1] / w1;
    let y = v[1] * v[2] / w2;
    w1 * psi_raw(x, y) + w2 * psi_raw(y, x)
}

/// `2 (1/a_inf + 1/b_inf + 1/c_inf)`.
pub fn quadratic_limit(eq: &[f64]) -> f64 {
    2.0 * eq.iter().map(|v| 1.0 / v).sum::<f64>()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassScan {
    pub eq: Vec<f64>,
    pub z: Vec<f64>,
    /// `S2 / E` on the admissible grid points.
    pub s2_ratio: Vec<f64>,
    /// `D2 / E` on the same points.
    pub d2_ratio: Vec<f64>,
    pub inf: f64,
    pub argmin_z: f64,
    /// `S2 / E` at `z = c_inf (1 +- 1e-3)`, smaller side.
    pub limit_s2: f64,
    /// `D2 / E` at the same perturbation.
    pub limit_d2: f64,
}

/// Scans `S2(v)/E(v|v_inf)` along the class `v(z) = (M1 - z, M2 - z, z)`,
/// `z in (0, min(M1, M2))`, keeping points with `E(v|v_inf) <= e0_rel`.
pub fn scan_c4(m1: f64, m2: f64, e0_rel: f64, grid_size: usize) -> Result<ClassScan> {
    let eq = positive_equilibrium_3species(m1, m2, 1.0)?.values;
    if grid_size < 2 {
        return Err(Error::Contract("class scan needs at least 2 grid points".into()));
    }
    let zmax = m1.min(m2);
    let samples: Vec<Option<(f64, f64, f64)>> = (0..grid_size)
        .into_par_iter()
        .map(|j| {
            let z = zmax * (j as f64 + 0.5) / grid_size as f64;
            let v = class_point(m1, m2, z);
            let e = entropy_rel_const(&v, &eq).ok()?;
            if e <= 0.0 || e > e0_rel {
                return None;
            }
            Some((z, s2(&v, &eq) / e, d2(&v, &eq) / e))
        })
        .collect();
    let mut z = Vec::new();
    let mut s2_ratio = Vec::new();
    let mut d2_ratio = Vec::new();
    for (zi, s, d) in samples.into_iter().flatten() {
        z.push(zi);
        s2_ratio.push(s);
        d2_ratio.push(d);
    }
    let near = |sign: f64| {
        let v = class_point(m1, m2, eq[2] * (1.0 + sign * 1e-3));
        let e = entropy_rel_const(&v, &eq).unwrap_or(f64::NAN);
        (s2(&v, &eq) / e, d2(&v, &eq) / e)
    };
    let (sp, dp) = near(1.0);
    let (sm, dm) = near(-1.0);
    if z.is_empty() {
        return Err(Error::DegenerateClass(format!("no class point with 0 < E <= {e0_rel} on a grid of {grid_size}")));
    }
    // index-ordered reduction keeps the result independent of the thread count
    let (mut inf, mut argmin_z) = (f64::INFINITY, 0.0);
    for (zi, r) in z.iter().zip(&s2_ratio) {
        if *r < inf {
            inf = *r;
            argmin_z = *zi;
        }
    }
    Ok(ClassScan { eq, z, s2_ratio, d2_ratio, inf, argmin_z, limit_s2: sp.min(sm), limit_d2: dp.min(dm) })
}

use serde::{Deserialize, Serialize};

use super::class::{scan_c4, ClassScan};
use super::constants::{k_grid_pick, l_grid};
use super::positive;
use crate::entropy::psi_ratio;
use crate::equilibria::{positive_equilibrium_3species, Equilibrium};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cert3Inputs {
    pub m1: f64,
    pub m2: f64,
    pub diffusions: [f64; 3],
    /// Absolute entropy of the initial data.
    pub e0_abs: f64,
    /// Relative entropy of the initial data.
    pub e0_rel: f64,
    /// `||1/b_0||_inf`.
    pub beta: f64,
    /// Uniform bound on `a`.
    pub k_bound: f64,
    /// Lower bound `eps^2` on the species masses after `T_eps`.
    pub eps_sq: f64,
    pub c_lsi: f64,
    pub c_p: f64,
    /// Fixed radius; scanned on [`l_grid`] when absent.
    #[serde(default)]
    pub l: Option<f64>,
    #[serde(default = "default_scan")]
    pub scan_size: usize,
}

fn default_scan() -> usize {
    2000
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Envelope3 {
    /// Exponent `C5 / k` of the algebraic phase.
    pub algebraic_exponent: f64,
    /// Exponential rate `C13`.
    pub rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertBundle3 {
    pub inputs: Cert3Inputs,
    pub eq: Equilibrium,
    pub c1: f64,
    pub c2: f64,
    /// `min{beta C2, a b^2, b c}` at equilibrium, the coefficient used by `C5`.
    pub c3_coeff: f64,
    /// `min{beta C2, a b, c}`, the coefficient written next to the definition of `C3`.
    pub c3_coeff_alt: f64,
    pub c4: f64,
    pub c5: f64,
    /// `C5` built from `c3_coeff_alt`.
    pub c5_alt: f64,
    pub c7: f64,
    pub c8: f64,
    pub c9: f64,
    pub c10: f64,
    pub c11: f64,
    pub c12: f64,
    pub c13: f64,
    pub l: f64,
    pub k: f64,
    pub r1: f64,
    pub r2: f64,
    pub r: f64,
    pub r_tilde: f64,
    pub c_kr: f64,
    pub mu_k: f64,
    pub c4_source: String,
    pub l_source: String,
    pub envelope: Envelope3,
    pub scan: ClassScan,
}

impl CertBundle3 {
    /// Every constant with its label, in dependency order.
    pub fn labeled(&self) -> Vec<(&'static str, f64)> {
        vec![
            ("C1", self.c1),
            ("C2", self.c2),
            ("C3 coefficient", self.c3_coeff),
            ("C4", self.c4),
            ("C5", self.c5),
            ("C5 (alternative)", self.c5_alt),
            ("C7", self.c7),
            ("C8", self.c8),
            ("R1", self.r1),
            ("R2", self.r2),
            ("R", self.r),
            ("R~", self.r_tilde),
            ("L", self.l),
            ("K", self.k),
            ("C_KR", self.c_kr),
            ("C9", self.c9),
            ("mu_k", self.mu_k),
            ("C11", self.c11),
            ("C12", self.c12),
            ("C10", self.c10),
            ("C13", self.c13),
        ]
    }
}

/// The `L`-dependent part: `(R1, R2, R, R~, K, C_KR, C9)`.
pub(crate) fn c9_at(l: f64, m1: f64, m2: f64, eq: &[f64], c_p: f64) -> [f64; 7] {
    let (a, b, c) = (eq[0], eq[1], eq[2]);
    let (s1, s2) = (m1.sqrt(), m2.sqrt());
    let r1 = (s2 + l).powi(2) + s1 * (2.0 * s2 + l);
    let r2 = s2 + (s2 + l);
    let r = 4.0 * r1 * r1 / (a * b * b) + 4.0 * r2 * r2 / (b * c);
    let denom = (m1 * m2 * m2).sqrt() / (a * b * b).sqrt() + m2 / (b * c).sqrt();
    let r_tilde = c_p * l * l / (denom * denom);
    let k = k_grid_pick((r + 1.0) / c_p.min(1.0));
    let c_kr = (k * r_tilde).min(0.5);
    [r1, r2, r, r_tilde, k, c_kr, c_kr / (3.0 * k)]
}

/// Builds every constant of the three-species certificate in dependency order.
pub fn cert3_build(inputs: &Cert3Inputs) -> Result<CertBundle3> {
    let i = inputs;
    if !(i.beta.is_finite() && i.beta > 0.0) {
        return Err(Error::Hypothesis(format!(
            "b_0 must be bounded below by a positive constant (beta = ||1/b_0|| = {})",
            i.beta
        )));
    }
    if !(i.k_bound > 0.0 && i.k_bound.is_finite()) {
        return Err(Error::Contract(format!("k_bound must be positive, got {}", i.k_bound)));
    }
    if !(i.eps_sq > 0.0 && i.eps_sq < 1.0) {
        return Err(Error::Contract(format!("eps^2 must lie in (0,1), got {}", i.eps_sq)));
    }
    if i.diffusions.iter().any(|d| !(*d > 0.0)) {
        return Err(Error::Contract("diffusions must be positive".into()));
    }
    let eq = positive_equilibrium_3species(i.m1, i.m2, 1.0)?;
    let (a, b, c) = (eq.values[0], eq.values[1], eq.values[2]);
    let ctx = || format!("{i:?}");
    let dmin = i.diffusions.iter().copied().fold(f64::INFINITY, f64::min);

    let c1 = (i.e0_abs + 3.0) / (4.0 * dmin);
    if !(c1.is_finite() && c1 >= 0.0) {
        return Err(Error::Constant { name: "C1", value: c1, inputs: ctx() });
    }
    let c2 = positive("C2", dmin * i.c_lsi, ctx)?;

    let (scan, c4_source) = match scan_c4(i.m1, i.m2, i.e0_rel, i.scan_size) {
        Ok(s) => (s, "infimum of S2/E over the class grid".to_string()),
        Err(Error::DegenerateClass(_)) => {
            // only the equilibrium itself is admissible: the liminf is all that is left
            let mut s = scan_c4(i.m1, i.m2, f64::INFINITY, i.scan_size)?;
            s.inf = s.limit_s2;
            s.argmin_z = c;
            (s, "near-equilibrium limit of S2/E (admissible set is the equilibrium)".to_string())
        }
        Err(e) => return Err(e),
    };
    let c4 = positive("C4", scan.inf, ctx)?;
    let c3_coeff = positive("C3", (i.beta * c2).min(a * b * b).min(b * c), ctx)?;
    let c3_coeff_alt = (i.beta * c2).min(a * b).min(c);
    let c5 = positive("C5", c4.min(1.0) * c3_coeff, ctx)?;
    let c5_alt = c4.min(1.0) * c3_coeff_alt;

    let c7 = positive(
        "C7",
        (4.0 * i.diffusions[0]).min(4.0 * i.diffusions[1]).min(4.0 * i.diffusions[2]).min(a * b * b + b * c),
        ctx,
    )?;
    let m = i.m1.max(i.m2);
    let c8 = positive("C8", psi_ratio(m, a)?.max(psi_ratio(m, b)?).max(psi_ratio(m, c)?), ctx)?;

    let (l, l_source, parts) = match i.l {
        Some(l) => (l, "configured".to_string(), c9_at(l, i.m1, i.m2, &eq.values, i.c_p)),
        None => {
            let mut best: Option<(f64, [f64; 7])> = None;
            for l in l_grid() {
                let p = c9_at(l, i.m1, i.m2, &eq.values, i.c_p);
                if best.is_none_or(|(_, b)| p[6] > b[6]) {
                    best = Some((l, p));
                }
            }
            let (l, p) = best.expect("grid is non-empty");
            (l, "argmax of C9 over 41 log-spaced radii in [0.1, 10]".to_string(), p)
        }
    };
    let [r1, r2, r, r_tilde, k, c_kr, c9] = parts;
    let c9 = positive("C9", c9, ctx)?;

    let kb = i.k_bound;
    let mu_k = kb.sqrt() / a.sqrt().min(b.sqrt()).min(c.sqrt()) - 1.0;
    let q = 4.0 * (1.0 + mu_k).powi(2);
    let c11 = positive("C11", ((4.0 * kb * kb + q) / (a * b)).max(q / (b * b)).max(q / (b * c)), ctx)?;
    let c12 = positive("C12", i.c_p * i.eps_sq * i.eps_sq / (2.0 * b * kb * c11), ctx)?;
    let c10 = positive("C10", c12 / a.max(b).max(c), ctx)?;
    let c13 = positive("C13", (c7 * c9 * c10 / c8).min(c2), ctx)?;

    Ok(CertBundle3 {
        inputs: inputs.clone(),
        eq,
        c1,
        c2,
        c3_coeff,
        c3_coeff_alt,
        c4,
        c5,
        c5_alt,
        c7,
        c8,
        c9,
        c10,
        c11,
        c12,
        c13,
        l,
        k,
        r1,
        r2,
        r,
        r_tilde,
        c_kr,
        mu_k,
        c4_source,
        l_source,
        envelope: Envelope3 { algebraic_exponent: c5 / kb, rate: c13 },
        scan,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn symmetric() -> Cert3Inputs {
        Cert3Inputs {
            m1: 2.0,
            m2: 2.0,
            diffusions: [1.0, 1.0, 1.0],
            e0_abs: -3.0,
            e0_rel: 0.1,
            beta: 1.0,
            k_bound: 1.5,
            eps_sq: 0.5,
            c_lsi: PI * PI,
            c_p: PI * PI,
            l: None,
            scan_size: 500,
        }
    }

    #[test]
    fn symmetric_plug_in() {
        let b = cert3_build(&symmetric()).unwrap();
        assert_eq!(b.c1, 0.0);
        assert_eq!(b.c2, PI * PI);
        assert_eq!(b.c7, 2.0);
        let c8 = (2.0 * 2f64.ln() - 1.0) / (3.0 - 2.0 * 2f64.sqrt());
        assert!((b.c8 - c8).abs() < 1e-12);
        assert!((b.c8 - 2.2515).abs() < 1e-4);
        assert_eq!(b.c13, (b.c7 * b.c9 * b.c10 / b.c8).min(b.c2));
    }

    #[test]
    fn larger_k_bound_lowers_rates() {
        let mut prev: Option<CertBundle3> = None;
        for k in [1.0, 1.5, 2.0, 4.0, 8.0] {
            let b = cert3_build(&Cert3Inputs { k_bound: k, ..symmetric() }).unwrap();
            if let Some(p) = &prev {
                assert!(b.c10 < p.c10);
                assert!(b.c13 <= p.c13);
            }
            prev = Some(b);
        }
    }

    #[test]
    fn hypothesis_and_equilibrium_start() {
        let bad = Cert3Inputs { beta: f64::INFINITY, ..symmetric() };
        assert!(matches!(cert3_build(&bad), Err(Error::Hypothesis(_))));
        let at_eq = cert3_build(&Cert3Inputs { e0_rel: 0.0, ..symmetric() }).unwrap();
        assert!(at_eq.c4_source.contains("limit"));
        assert!(at_eq.c4 > 0.0);
    }
}

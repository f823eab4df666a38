use serde::{Deserialize, Serialize};

use super::constants::{k_grid_pick, l_grid};
use super::positive;
use crate::entropy::psi_ratio;
use crate::equilibria::{positive_equilibrium_2species, Equilibrium};
use crate::network::TwoSpeciesExponents;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cert2Inputs {
    /// Lower bound of the initial box.
    pub alpha: f64,
    /// Upper bound of the initial box.
    pub beta: f64,
    pub exps: TwoSpeciesExponents,
    /// Conserved total `n̄ mean(a) + m̄ mean(b)`.
    pub total: f64,
    pub diffusions: [f64; 2],
    pub c_lsi: f64,
    pub c_p: f64,
    #[serde(default)]
    pub l: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertBundle2 {
    pub inputs: Cert2Inputs,
    pub eq: Equilibrium,
    pub l_a: f64,
    pub l_b: f64,
    pub u_a: f64,
    pub u_b: f64,
    pub eps_sq: f64,
    pub omega: f64,
    /// Bound on both spatial means.
    pub n: f64,
    pub d1: f64,
    pub d2: f64,
    pub d3: f64,
    pub d4: f64,
    pub d5: f64,
    pub d6: f64,
    pub d7: f64,
    pub d8: f64,
    pub r1: f64,
    pub r2: f64,
    pub r: f64,
    pub r_tilde: f64,
    pub l: f64,
    pub k: f64,
    pub c_kr: f64,
    pub mu_eps: f64,
    pub mu_omega: f64,
    pub s_bound: f64,
    pub l_source: String,
}

impl CertBundle2 {
    pub fn labeled(&self) -> Vec<(&'static str, f64)> {
        vec![
            ("L_a", self.l_a),
            ("L_b", self.l_b),
            ("eps^2", self.eps_sq),
            ("U_a", self.u_a),
            ("U_b", self.u_b),
            ("omega", self.omega),
            ("N", self.n),
            ("D1", self.d1),
            ("D2", self.d2),
            ("D3", self.d3),
            ("R1", self.r1),
            ("R2", self.r2),
            ("R", self.r),
            ("R~", self.r_tilde),
            ("L", self.l),
            ("K", self.k),
            ("C_KR", self.c_kr),
            ("D4", self.d4),
            ("mu_eps", self.mu_eps),
            ("mu_omega", self.mu_omega),
            ("S", self.s_bound),
            ("D6", self.d6),
            ("D7", self.d7),
            ("D5", self.d5),
            ("D8", self.d8),
        ]
    }
}

fn binom(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, j| acc * (n - j) as f64 / (j + 1) as f64)
}

/// `(R1, R2, R, R~, K, C_KR, D4)` for one radius `L`.
///
/// `R_j = max(m_j, n_j) (sqrt N + L)^{m_j + n_j - 1}` bounds the gradient of
/// `(x, y) -> x^{m_j} y^{n_j}` on the box `x, y <= sqrt N + L`.
pub(crate) fn d4_at(l: f64, n: f64, e: TwoSpeciesExponents, eq: &[f64], c_p: f64) -> [f64; 7] {
    let (a, b) = (eq[0], eq[1]);
    let sn = n.sqrt();
    let rj = |m: u32, k: u32| m.max(k) as f64 * (sn + l).powi((m + k) as i32 - 1);
    let r1 = rj(e.m1, e.n1);
    let r2 = rj(e.m2, e.n2);
    let w1 = a.powi(e.m1 as i32) * b.powi(e.n1 as i32);
    let w2 = a.powi(e.m2 as i32) * b.powi(e.n2 as i32);
    let r = 4.0 * r1 * r1 / w1 + 4.0 * r2 * r2 / w2;
    let denom = sn.powi((e.m1 + e.n1) as i32) / w1.sqrt() + sn.powi((e.m2 + e.n2) as i32) / w2;
    let r_tilde = c_p * l * l / (denom * denom);
    let k = k_grid_pick((r + 1.0) / c_p.min(1.0));
    let c_kr = (k * r_tilde).min(0.5);
    [r1, r2, r, r_tilde, k, c_kr, c_kr / (3.0 * k)]
}

/// Sup of `|S|` where `(x - s v)^p = x^p + s S` with `x` in `[x_lo, x_hi]`,
/// `0 <= v <= v_max`, `0 <= s <= s_max`.
fn remainder_bound(p: u32, x_lo: f64, x_hi: f64, v_max: f64, s_max: f64) -> f64 {
    let xm = x_lo.abs().max(x_hi.abs());
    (1..=p).map(|j| binom(p, j) * xm.powi((p - j) as i32) * v_max.powi(j as i32) * s_max.powi(j as i32 - 1)).sum()
}

/// Builds the two-species certificate.
pub fn cert2_build(inputs: &Cert2Inputs) -> Result<CertBundle2> {
    let i = inputs;
    if !(i.alpha > 0.0) {
        return Err(Error::Hypothesis(format!(
            "initial data must satisfy 0 < alpha <= a_0, b_0; got alpha = {}",
            i.alpha
        )));
    }
    if !(i.beta >= i.alpha && i.beta.is_finite()) {
        return Err(Error::Hypothesis(format!(
            "initial data must satisfy a_0, b_0 <= beta < inf with alpha <= beta; got [{}, {}]",
            i.alpha, i.beta
        )));
    }
    if i.diffusions.iter().any(|d| !(*d > 0.0)) {
        return Err(Error::Contract("diffusions must be positive".into()));
    }
    let e = i.exps;
    e.validate()?;
    let (mb, nb) = (e.m_bar() as f64, e.n_bar() as f64);
    let ratio = nb / mb;
    let ctx = || format!("{i:?}");

    let l_a = 2f64.max(2.0 * i.alpha.powf(-2.0 * ratio));
    let l_b = (2.0 * ratio * ratio + 1.0) * 1f64.max(1.0 / i.alpha);
    let eps_sq = positive("eps^2", (1.0 / l_a).min(1.0 / l_b), ctx)?;
    let u_a = 2f64.max(2.0 * i.beta.powf(ratio));
    let u_b = (ratio * ratio + 1.0) * 1f64.max(i.beta);
    let omega = positive("omega", u_a.max(u_b), ctx)?;

    let eq = positive_equilibrium_2species(e, i.total)?;
    let (a, b) = (eq.values[0], eq.values[1]);
    let n = positive("N", i.total / mb.min(nb), ctx)?;

    let d1 = positive("D1", i.diffusions[0].min(i.diffusions[1]) * i.c_lsi, ctx)?;
    let w1 = a.powi(e.m1 as i32) * b.powi(e.n1 as i32);
    let w2 = a.powi(e.m2 as i32) * b.powi(e.n2 as i32);
    let d2 = positive("D2", (4.0 * i.diffusions[0]).min(4.0 * i.diffusions[1]).min(w1 + w2), ctx)?;
    let d3 = positive("D3", psi_ratio(n, a)?.max(psi_ratio(n, b)?), ctx)?;

    let (l, l_source, parts) = match i.l {
        Some(l) => (l, "configured".to_string(), d4_at(l, n, e, &eq.values, i.c_p)),
        None => {
            let mut best: Option<(f64, [f64; 7])> = None;
            for l in l_grid() {
                let p = d4_at(l, n, e, &eq.values, i.c_p);
                if best.is_none_or(|(_, q)| p[6] > q[6]) {
                    best = Some((l, p));
                }
            }
            let (l, p) = best.expect("grid is non-empty");
            (l, "argmax of D4 over 41 log-spaced radii in [0.1, 10]".to_string(), p)
        }
    };
    let [r1, r2, r, r_tilde, k, c_kr, d4] = parts;
    let d4 = positive("D4", d4, ctx)?;

    let eps = eps_sq.sqrt();
    let (sa, sb) = (a.sqrt(), b.sqrt());
    let mu_eps = eps / sa.max(sb) - 1.0;
    let mu_omega = omega.sqrt() / sa.min(sb) - 1.0;
    let s_max = omega.sqrt();
    let s_a = remainder_bound(e.m_bar(), 1.0 + mu_eps, 1.0 + mu_omega, s_max / (eps * sa), s_max);
    let s_b = remainder_bound(e.n_bar(), 1.0 + mu_eps, 1.0 + mu_omega, s_max / (eps * sb), s_max);
    let s_bound = positive("S", s_a.max(s_b), ctx)?;

    let pref = eps.powi(2 * (e.m2 + e.n1) as i32) / (a.powi(e.m2 as i32) * b.powi(e.n1 as i32));
    let d6 = positive("D6", 4.0 * pref * s_bound, ctx)?;
    let d7 = positive("D7", pref / 2.0 / d6 * i.c_p, ctx)?;
    let d5 = positive("D5", d7 / a.max(b), ctx)?;
    let d8 = positive("D8", (d2 * d4 * d5 / d3).min(d1), ctx)?;

    Ok(CertBundle2 {
        inputs: inputs.clone(),
        eq,
        l_a,
        l_b,
        u_a,
        u_b,
        eps_sq,
        omega,
        n,
        d1,
        d2,
        d3,
        d4,
        d5,
        d6,
        d7,
        d8,
        r1,
        r2,
        r,
        r_tilde,
        l,
        k,
        c_kr,
        mu_eps,
        mu_omega,
        s_bound,
        l_source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn inputs(alpha: f64, beta: f64) -> Cert2Inputs {
        Cert2Inputs {
            alpha,
            beta,
            exps: TwoSpeciesExponents::new(2, 1, 1, 3).unwrap(),
            total: 3.0,
            diffusions: [1.0, 1.0],
            c_lsi: PI * PI,
            c_p: PI * PI,
            l: None,
        }
    }

    #[test]
    fn unit_box() {
        let c = cert2_build(&inputs(1.0, 1.0)).unwrap();
        assert_eq!((c.l_a, c.l_b), (2.0, 9.0));
        assert!((c.eps_sq - 1.0 / 9.0).abs() < 1e-15);
        assert_eq!((c.u_a, c.u_b, c.omega), (2.0, 5.0, 5.0));
        assert_eq!(c.d8, (c.d2 * c.d4 * c.d5 / c.d3).min(c.d1));
    }

    #[test]
    fn half_alpha() {
        let c = cert2_build(&inputs(0.5, 1.0)).unwrap();
        assert_eq!(c.l_a, 32.0);
        assert!(c.eps_sq <= 1.0 / 32.0);
    }

    #[test]
    fn desk_box() {
        let c = cert2_build(&inputs(0.8, 1.25)).unwrap();
        assert!((c.eps_sq - 1.0 / 11.25).abs() < 1e-15);
        assert!((c.omega - 6.25).abs() < 1e-15);
    }

    #[test]
    fn alpha_zero_rejected() {
        let err = cert2_build(&inputs(0.0, 1.0)).unwrap_err();
        assert!(matches!(err, Error::Hypothesis(_)));
        assert!(err.to_string().contains("0 < alpha"));
    }

    #[test]
    fn binomials() {
        assert_eq!(binom(5, 2), 10.0);
        assert_eq!(binom(3, 3), 1.0);
        // (x - s v)^1 = x - s v, so |S| = v
        assert_eq!(remainder_bound(1, 0.5, 2.0, 3.0, 7.0), 3.0);
    }
}

//! Steady states of the two preset families.

use serde::{Deserialize, Serialize};

use crate::network::{self, Network, TwoSpeciesExponents};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EquilibriumKind {
    Positive,
    Boundary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Equilibrium {
    pub values: Vec<f64>,
    /// Conserved totals of the class: `(M1, M2)` for three species, `(M)` for two.
    pub class_data: Vec<f64>,
    /// Max-norm of the net production at `values`.
    pub residual: f64,
    pub kind: EquilibriumKind,
}

impl Equilibrium {
    pub fn is_positive(&self) -> bool {
        self.kind == EquilibriumKind::Positive
    }
}

/// Max-norm of `R(c)`.
pub fn verify_equilibrium(net: &Network, c: &[f64]) -> Result<f64> {
    let r = network::net_production(net, c)?;
    Ok(r.iter().fold(0.0_f64, |m, v| m.max(v.abs())))
}

/// Largest reaction monomial at `c`, the scale for residual tolerances.
pub fn monomial_scale(net: &Network, c: &[f64]) -> f64 {
    net.reactions().iter().map(|r| r.rate_const * r.reactant.monomial(c)).fold(0.0, f64::max)
}

/// Roots of `kappa (M1 - c)(M2 - c) = c`, returned as `(inside, outside)`.
///
/// The product of the roots is `M1 M2` and the larger one is formed without
/// subtraction, so the small root `M1 M2 / big` is free of cancellation.
pub fn class_quadratic_roots(m1: f64, m2: f64, kappa: f64) -> (f64, f64) {
    let b = kappa * (m1 + m2) + 1.0;
    let disc = b * b - 4.0 * kappa * kappa * m1 * m2;
    let q = 0.5 * (b + disc.max(0.0).sqrt());
    let big = q / kappa;
    let small = kappa * m1 * m2 / q;
    (small, big)
}

/// Unique positive equilibrium of `A + 2B <-> B + C` in the class
/// `a + c = M1`, `b + c = M2`, with `kappa = k1 / k2`.
pub fn positive_equilibrium_3species(m1: f64, m2: f64, kappa: f64) -> Result<Equilibrium> {
    if !(m1 > 0.0 && m2 > 0.0) {
        return Err(Error::DegenerateClass(format!("M1={m1}, M2={m2}: no positive equilibrium")));
    }
    if !(kappa > 0.0 && kappa.is_finite()) {
        return Err(Error::Contract(format!("kappa must be positive, got {kappa}")));
    }
    let upper = m1.min(m2);
    let (c, other) = class_quadratic_roots(m1, m2, kappa);
    if !(c > 0.0 && c < upper) || (other > 0.0 && other < upper) {
        return Err(Error::Contract(format!("root selection failed: c={c}, other={other}, bound={upper}")));
    }
    let values = vec![m1 - c, m2 - c, c];
    let net = network::preset_3species(2, kappa, 1.0)?;
    let residual = verify_equilibrium(&net, &values)?;
    Ok(Equilibrium { values, class_data: vec![m1, m2], residual, kind: EquilibriumKind::Positive })
}

/// Positive equilibrium of `A + nB <-> B + C` for any `n >= 2`: bisection on
/// `kappa (M1 - c)(M2 - c)^{n-1} - c`, which is strictly decreasing on `(0, min(M1, M2))`.
pub fn positive_equilibrium_3species_n(n: u32, m1: f64, m2: f64, kappa: f64) -> Result<Equilibrium> {
    if n == 2 {
        return positive_equilibrium_3species(m1, m2, kappa);
    }
    if n < 2 {
        return Err(Error::Contract(format!("n must be at least 2, got {n}")));
    }
    if !(m1 > 0.0 && m2 > 0.0) {
        return Err(Error::DegenerateClass(format!("M1={m1}, M2={m2}: no positive equilibrium")));
    }
    let f = |c: f64| kappa * (m1 - c) * (m2 - c).powi(n as i32 - 1) - c;
    let c = bisect(f, 0.0, m1.min(m2), true);
    let values = vec![m1 - c, m2 - c, c];
    let net = network::preset_3species(n, kappa, 1.0)?;
    let residual = verify_equilibrium(&net, &values)?;
    Ok(Equilibrium { values, class_data: vec![m1, m2], residual, kind: EquilibriumKind::Positive })
}

/// Boundary steady states of the three-species family with positive totals.
///
/// With `b = 0` both monomials vanish, the class forces `c = M2` and
/// `a = M1 - M2`, which is feasible only when `M1 >= M2`.
pub fn boundary_equilibria_3species(m1: f64, m2: f64) -> Vec<Equilibrium> {
    if !(m1 > 0.0 && m2 > 0.0) || m1 < m2 {
        return Vec::new();
    }
    let values = vec![m1 - m2, 0.0, m2];
    // every monomial carries a factor of b
    vec![Equilibrium { values, class_data: vec![m1, m2], residual: 0.0, kind: EquilibriumKind::Boundary }]
}

/// Bisection on a sign change in `(lo, hi)`. `decreasing` states the sign of
/// `f(lo)`. Stops when the bracket no longer shrinks or is below `1e-14` relative.
fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, decreasing: bool) -> f64 {
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi || hi - lo <= 1e-14 * hi.abs().max(1.0) {
            break;
        }
        let v = f(mid);
        if v == 0.0 {
            return mid;
        }
        if (v > 0.0) == decreasing {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// `b^{n̄/m̄}` with `0 -> 0`.
pub(crate) fn frac_pow(b: f64, num: u32, den: u32) -> f64 {
    if b == 0.0 {
        0.0
    } else if num.is_multiple_of(den) {
        b.powi((num / den) as i32)
    } else {
        (num as f64 / den as f64 * b.ln()).exp()
    }
}

/// Positive equilibrium of `m1 A + n1 B <-> m2 A + n2 B` (unit rates) in the
/// class `n̄ a + m̄ b = M`: solve `g(b) = n̄ b^{n̄/m̄} + m̄ b - M = 0` by bisection.
pub fn positive_equilibrium_2species(exps: TwoSpeciesExponents, total: f64) -> Result<Equilibrium> {
    exps.validate()?;
    if !(total > 0.0) {
        return Err(Error::DegenerateClass(format!("M={total}: no positive equilibrium")));
    }
    let (mb, nb) = (exps.m_bar(), exps.n_bar());
    let g = |b: f64| nb as f64 * frac_pow(b, nb, mb) + mb as f64 * b - total;
    let b = bisect(g, 0.0, total / mb as f64, false);
    let a = frac_pow(b, nb, mb);
    let values = vec![a, b];
    let net = network::preset_2species(exps, 1.0, 1.0)?;
    let residual = verify_equilibrium(&net, &values)?;
    Ok(Equilibrium { values, class_data: vec![total], residual, kind: EquilibriumKind::Positive })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol(eq: &Equilibrium, net: &Network) -> f64 {
        1e-12 * (1.0 + monomial_scale(net, &eq.values))
    }

    #[test]
    fn symmetric_class_is_all_ones() {
        let eq = positive_equilibrium_3species(2.0, 2.0, 1.0).unwrap();
        for v in &eq.values {
            assert!((v - 1.0).abs() <= 1e-14);
        }
        assert!(eq.is_positive());
    }

    #[test]
    fn equal_totals_give_equal_a_b() {
        for m in [0.3, 1.0, 4.5, 9.0] {
            let eq = positive_equilibrium_3species(m, m, 1.0).unwrap();
            assert_eq!(eq.values[0], eq.values[1]);
        }
    }

    #[test]
    fn asymmetric_class() {
        let eq = positive_equilibrium_3species(3.0, 1.0, 1.0).unwrap();
        let c = (5.0 - 13f64.sqrt()) / 2.0;
        assert!((eq.values[2] - c).abs() < 1e-14);
        assert!((eq.values[0] - (3.0 - c)).abs() < 1e-14);
        assert!((eq.values[1] - (1.0 - c)).abs() < 1e-14);
        let net = network::preset_3species(2, 1.0, 1.0).unwrap();
        assert!(eq.residual <= tol(&eq, &net));
    }

    #[test]
    fn degenerate_class() {
        assert!(matches!(positive_equilibrium_3species(0.0, 1.0, 1.0), Err(Error::DegenerateClass(_))));
        assert!(matches!(
            positive_equilibrium_2species(TwoSpeciesExponents::new(2, 1, 1, 3).unwrap(), 0.0),
            Err(Error::DegenerateClass(_))
        ));
    }

    #[test]
    fn kappa_extension() {
        let eq = positive_equilibrium_3species(2.0, 3.0, 2.5).unwrap();
        let [a, b, c] = [eq.values[0], eq.values[1], eq.values[2]];
        assert!((2.5 * a * b - c).abs() < 1e-12);
        assert!((a + c - 2.0).abs() < 1e-14 && (b + c - 3.0).abs() < 1e-14);
    }

    #[test]
    fn general_n_matches_closed_form_at_two() {
        let closed = positive_equilibrium_3species(3.0, 1.0, 1.0).unwrap();
        let f = |c: f64| (3.0 - c) * (1.0 - c) - c;
        let bis = super::bisect(f, 0.0, 1.0, true);
        assert!((bis - closed.values[2]).abs() < 1e-13);
        let eq3 = positive_equilibrium_3species_n(3, 2.0, 2.0, 1.0).unwrap();
        let net = network::preset_3species(3, 1.0, 1.0).unwrap();
        assert!(eq3.residual <= tol(&eq3, &net));
    }

    #[test]
    fn boundary_examples() {
        let b = boundary_equilibria_3species(3.0, 1.0);
        assert_eq!(b.len(), 1);
        assert_eq!(b[0].values, vec![2.0, 0.0, 1.0]);
        assert!(boundary_equilibria_3species(1.0, 3.0).is_empty());
        assert_eq!(boundary_equilibria_3species(1.0, 1.0)[0].values, vec![0.0, 0.0, 1.0]);
        let net = network::preset_3species(2, 1.0, 1.0).unwrap();
        for eq in boundary_equilibria_3species(5.0, 2.0) {
            assert_eq!(verify_equilibrium(&net, &eq.values).unwrap(), 0.0);
        }
    }

    #[test]
    fn two_species_examples() {
        let e = TwoSpeciesExponents::new(2, 1, 1, 3).unwrap();
        let eq = positive_equilibrium_2species(e, 3.0).unwrap();
        assert!((eq.values[0] - 1.0).abs() < 1e-13 && (eq.values[1] - 1.0).abs() < 1e-13);

        // 2b^2 + b = 10 has the root b = (-1 + sqrt 81)/4 = 2
        let eq = positive_equilibrium_2species(e, 10.0).unwrap();
        assert!((eq.values[1] - 2.0).abs() < 1e-13 && (eq.values[0] - 4.0).abs() < 1e-12);
        // 2b^2 + b = 5 gives b = (-1 + sqrt 41)/4
        let eq = positive_equilibrium_2species(e, 5.0).unwrap();
        let b = (-1.0 + 41f64.sqrt()) / 4.0;
        assert!((eq.values[1] - b).abs() < 1e-13);
        assert!((eq.values[0] - b * b).abs() < 1e-12);

        for (m1, n1, m2, n2) in [(3, 1, 1, 4), (4, 2, 3, 5), (5, 1, 2, 7)] {
            let e = TwoSpeciesExponents::new(m1, n1, m2, n2).unwrap();
            let eq = positive_equilibrium_2species(e, (e.m_bar() + e.n_bar()) as f64).unwrap();
            assert!((eq.values[0] - 1.0).abs() < 1e-12 && (eq.values[1] - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn verify_examples() {
        let net = network::preset_3species(2, 1.0, 1.0).unwrap();
        assert_eq!(verify_equilibrium(&net, &[1.0, 1.0, 1.0]).unwrap(), 0.0);
        assert_eq!(verify_equilibrium(&net, &[2.0, 0.0, 1.0]).unwrap(), 0.0);
        assert_eq!(verify_equilibrium(&net, &[2.0, 1.0, 1.0]).unwrap(), 1.0);
    }

    #[test]
    fn g_is_monotone() {
        let e = TwoSpeciesExponents::new(3, 1, 1, 6).unwrap();
        let (mb, nb) = (e.m_bar(), e.n_bar());
        let g = |b: f64| nb as f64 * frac_pow(b, nb, mb) + mb as f64 * b;
        let mut prev = g(0.0);
        for i in 1..2000 {
            let v = g(i as f64 * 0.005);
            assert!(v > prev);
            prev = v;
        }
    }
}

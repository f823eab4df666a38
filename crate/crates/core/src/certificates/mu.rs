//! Mean-deviation parametrisation `mean(u) / u_inf = 1 + mu_u` and the
//! quadratic comparison used to close the entropy estimate.

use crate::{Error, Result};

/// `([(1+mu_a)(1+mu_b) - (1+mu_c)]^2, mu_a^2 + mu_b^2 + mu_c^2)`.
pub fn mu_inequality_3species(mu_a: f64, mu_b: f64, mu_c: f64) -> (f64, f64) {
    let gap = (1.0 + mu_a) * (1.0 + mu_b) - (1.0 + mu_c);
    (gap * gap, mu_a * mu_a + mu_b * mu_b + mu_c * mu_c)
}

/// `([(1+mu_a)^m - (1+mu_b)^n]^2, mu_a^2 + mu_b^2)`.
pub fn mu_inequality_2species(mu_a: f64, mu_b: f64, m_bar: u32, n_bar: u32) -> (f64, f64) {
    let gap = (1.0 + mu_a).powi(m_bar as i32) - (1.0 + mu_b).powi(n_bar as i32);
    (gap * gap, mu_a * mu_a + mu_b * mu_b)
}

/// `(mu_a, mu_b, mu_c)` of the constant state in the class of `eq` whose
/// third component is `c_inf (1 + mu_c)`.
///
/// Both conservation laws force `a_inf mu_a = b_inf mu_b = -c_inf mu_c`, and
/// non-negativity restricts `mu_c` to `[-1, min(a_inf, b_inf) / c_inf]`.
pub fn class_mu_3species(eq: &[f64], mu_c: f64) -> Result<(f64, f64, f64)> {
    let (a, b, c) = (eq[0], eq[1], eq[2]);
    if eq.len() != 3 || !(a > 0.0 && b > 0.0 && c > 0.0) {
        return Err(Error::Domain(format!("need a positive three-species equilibrium, got {eq:?}")));
    }
    let hi = a.min(b) / c;
    if !(-1.0..=hi).contains(&mu_c) {
        return Err(Error::Domain(format!("mu_c = {mu_c} outside [-1, {hi}]")));
    }
    Ok((-c * mu_c / a, -c * mu_c / b, mu_c))
}

/// `(mu_a, mu_b)` of the constant state in the class of `eq` with
/// `mean(b) = b_inf (1 + mu_b)`, using `n a_inf mu_a + m b_inf mu_b = 0`.
pub fn class_mu_2species(eq: &[f64], mu_b: f64, m_bar: u32, n_bar: u32) -> Result<(f64, f64)> {
    let (a, b) = (eq[0], eq[1]);
    if eq.len() != 2 || !(a > 0.0 && b > 0.0) || m_bar == 0 || n_bar == 0 {
        return Err(Error::Domain(format!("need a positive two-species equilibrium, got {eq:?}")));
    }
    let (m, n) = (m_bar as f64, n_bar as f64);
    let hi = n * a / (m * b);
    if !(-1.0..=hi).contains(&mu_b) {
        return Err(Error::Domain(format!("mu_b = {mu_b} outside [-1, {hi}]")));
    }
    Ok((-m * b * mu_b / (n * a), mu_b))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_deviation_is_equality() {
        assert_eq!(mu_inequality_3species(0.0, 0.0, 0.0), (0.0, 0.0));
        assert_eq!(mu_inequality_2species(0.0, 0.0, 1, 2), (0.0, 0.0));
    }

    #[test]
    fn class_parametrisation_preserves_totals() {
        let eq = [1.0, 2.0, 0.5];
        let (ma, mb, mc) = class_mu_3species(&eq, 0.4).unwrap();
        let (a, b, c) = (eq[0] * (1.0 + ma), eq[1] * (1.0 + mb), eq[2] * (1.0 + mc));
        assert!((a + c - 1.5).abs() < 1e-15);
        assert!((b + c - 2.5).abs() < 1e-15);

        let eq2 = [1.5, 0.75];
        let (ma, mb) = class_mu_2species(&eq2, -0.3, 1, 2).unwrap();
        let total = 2.0 * eq2[0] * (1.0 + ma) + eq2[1] * (1.0 + mb);
        assert!((total - (2.0 * 1.5 + 0.75)).abs() < 1e-14);
    }

    #[test]
    fn out_of_range_rejected() {
        assert!(class_mu_3species(&[1.0, 1.0, 1.0], 1.5).is_err());
        assert!(class_mu_2species(&[1.0, 1.0], -1.5, 1, 2).is_err());
    }

    #[test]
    fn large_classes_break_three_species_comparison() {
        // class M1 = M2 = 9.96 with kappa = 1: a = b near 2.696, c near 7.268
        let a = (-1.0 + (1.0 + 4.0 * 9.96f64).sqrt()) / 2.0;
        let eq = [a, a, a * a];
        let (ma, mb, mc) = class_mu_3species(&eq, a / eq[2]).unwrap();
        let (lhs, rhs) = mu_inequality_3species(ma, mb, mc);
        assert!(lhs < rhs, "lhs {lhs} rhs {rhs}");
    }
}

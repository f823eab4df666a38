use std::io::Write;

use serde::{Deserialize, Serialize};

use super::psi::psi_raw;
use crate::grid::StateField;
use crate::network::Network;
use crate::{Error, Result};

/// Entropy and dissipation of one state against a positive equilibrium.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropyRecord {
    pub t: f64,
    pub e_abs: f64,
    pub e_rel: f64,
    /// Relative entropy to the spatial means.
    pub e_rel_mean: f64,
    /// Relative entropy of the means to the equilibrium.
    pub e_means: f64,
    pub d: f64,
    /// `int |u_x|^2 / u` per species.
    pub fisher: Vec<f64>,
    /// `int |(sqrt u)_x|^2` per species.
    pub sqrt_grad: Vec<f64>,
    pub reaction_d: f64,
}

impl EntropyRecord {
    /// `|E_rel - (E_rel_mean + E(means|eq))|`.
    pub fn split_discrepancy(&self) -> f64 {
        (self.e_rel - self.e_rel_mean - self.e_means).abs()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dissipation {
    pub fisher: Vec<f64>,
    pub reaction: f64,
    pub total: f64,
}

fn check_eq(eq: &[f64], ns: usize) -> Result<()> {
    if eq.len() != ns {
        return Err(Error::Contract(format!("equilibrium has {} entries for {ns} species", eq.len())));
    }
    if let Some(v) = eq.iter().find(|v| !(**v > 0.0 && v.is_finite())) {
        return Err(Error::Domain(format!(
            "relative entropy needs a strictly positive equilibrium, got component {v}"
        )));
    }
    Ok(())
}

/// `sum_s sum_i u (ln u - 1) h` with `0 ln 0 = 0`.
pub fn entropy_abs(state: &StateField) -> f64 {
    let h = state.grid().h();
    state
        .all_species()
        .iter()
        .map(|u| u.iter().map(|v| if *v == 0.0 { 0.0 } else { v * (v.ln() - 1.0) }).sum::<f64>())
        .sum::<f64>()
        * h
}

/// `sum_s int psi(u_s, eq_s)`.
pub fn entropy_rel(state: &StateField, eq: &[f64]) -> Result<f64> {
    check_eq(eq, state.n_species())?;
    let h = state.grid().h();
    Ok(state.all_species().iter().zip(eq).map(|(u, e)| u.iter().map(|v| psi_raw(*v, *e)).sum::<f64>()).sum::<f64>() * h)
}

/// Relative entropy between two constant states.
pub fn entropy_rel_const(u: &[f64], eq: &[f64]) -> Result<f64> {
    check_eq(eq, u.len())?;
    if let Some(v) = u.iter().find(|v| !(**v >= 0.0)) {
        return Err(Error::Domain(format!("negative concentration {v}")));
    }
    Ok(u.iter().zip(eq).map(|(v, e)| psi_raw(*v, *e)).sum())
}

/// `sum_s int psi(u_s, mean(u_s))`; a species that is identically zero contributes 0.
pub fn entropy_rel_to_means(state: &StateField) -> f64 {
    let h = state.grid().h();
    let means = state.means();
    state
        .all_species()
        .iter()
        .zip(&means)
        .map(|(u, m)| if *m == 0.0 { 0.0 } else { u.iter().map(|v| psi_raw(*v, *m)).sum::<f64>() })
        .sum::<f64>()
        * h
}

/// Discrete `int |u_x|^2 / u`: face differences divided by the logarithmic mean
/// of the neighbouring cells, `sum (u_{i+1} - u_i) ln(u_{i+1}/u_i) / h`.
///
/// This pairs exactly with the Neumann stencil: along the semi-discrete flow the
/// diffusion part of `dE/dt` equals `-d` times this sum.
pub fn fisher_log_mean(u: &[f64], h: f64) -> f64 {
    u.windows(2).map(|w| if w[0] == w[1] { 0.0 } else { (w[1] - w[0]) * (w[1] / w[0]).ln() }).sum::<f64>() / h
}

/// Discrete `int |(sqrt u)_x|^2` from differences of cell square roots.
pub fn sqrt_gradient_sq(u: &[f64], h: f64) -> f64 {
    u.windows(2)
        .map(|w| {
            let d = w[1].sqrt() - w[0].sqrt();
            d * d
        })
        .sum::<f64>()
        / h
}

/// Fisher parts `d_s int |u_x|^2/u` plus the reaction part
/// `sum_r k_r c_inf^{y_r} int psi(c^{y_r}/c_inf^{y_r}, c^{y'_r}/c_inf^{y'_r})`.
///
/// For the three-species preset the reaction part is
/// `a b^2 psi(ab^2/(a b^2)_inf, bc/(bc)_inf) + (bc)_inf psi(bc/(bc)_inf, ab^2/(ab^2)_inf)`.
pub fn dissipation_rel(state: &StateField, eq: &[f64], net: &Network, diffusions: &[f64]) -> Result<Dissipation> {
    let ns = state.n_species();
    check_eq(eq, ns)?;
    if diffusions.len() != ns || net.n_species() != ns {
        return Err(Error::Contract("species count mismatch in dissipation".into()));
    }
    if let Some((species, cell)) = state.first_zero() {
        return Err(Error::BoundaryTouch { species, cell });
    }
    let h = state.grid().h();
    let fisher: Vec<f64> = state.all_species().iter().map(|u| fisher_log_mean(u, h)).collect();
    let weights: Vec<(f64, f64, f64)> = net
        .reactions()
        .iter()
        .map(|r| {
            let from = r.reactant.monomial(eq);
            let to = r.product.monomial(eq);
            (r.rate_const * from, from, to)
        })
        .collect();
    let mut reaction = 0.0;
    let mut c = vec![0.0; ns];
    for i in 0..state.grid().n_cells() {
        for s in 0..ns {
            c[s] = state.species(s)[i];
        }
        for (r, (w, from, to)) in net.reactions().iter().zip(&weights) {
            let x = r.reactant.monomial(&c) / from;
            let y = r.product.monomial(&c) / to;
            reaction += w * psi_raw(x, y);
        }
    }
    reaction *= h;
    let total = fisher.iter().zip(diffusions).map(|(f, d)| f * d).sum::<f64>() + reaction;
    Ok(Dissipation { fisher, reaction, total })
}

/// Every entropy quantity of `state` in one record.
pub fn entropy_record(state: &StateField, eq: &[f64], net: &Network, diffusions: &[f64]) -> Result<EntropyRecord> {
    let diss = dissipation_rel(state, eq, net, diffusions)?;
    let h = state.grid().h();
    Ok(EntropyRecord {
        t: state.time,
        e_abs: entropy_abs(state),
        e_rel: entropy_rel(state, eq)?,
        e_rel_mean: entropy_rel_to_means(state),
        e_means: entropy_rel_const(&state.means(), eq)?,
        d: diss.total,
        sqrt_grad: state.all_species().iter().map(|u| sqrt_gradient_sq(u, h)).collect(),
        fisher: diss.fisher,
        reaction_d: diss.reaction,
    })
}

/// `t,E_abs,E_rel,E_rel_mean,D,fisher_<s>...,reaction_D`.
pub fn write_entropy_csv<'a, W: Write>(
    mut w: W,
    records: impl IntoIterator<Item = &'a EntropyRecord>,
    species: &[String],
) -> std::io::Result<()> {
    write!(w, "t,E_abs,E_rel,E_rel_mean,D")?;
    for s in species {
        write!(w, ",fisher_{s}")?;
    }
    writeln!(w, ",reaction_D")?;
    for r in records {
        write!(w, "{:e},{:e},{:e},{:e},{:e}", r.t, r.e_abs, r.e_rel, r.e_rel_mean, r.d)?;
        for f in &r.fisher {
            write!(w, ",{f:e}")?;
        }
        writeln!(w, ",{:e}", r.reaction_d)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid1D;
    use crate::network::preset_3species;
    use std::f64::consts::{E, PI};

    fn constant(values: &[f64]) -> StateField {
        StateField::constant(Grid1D::new(16).unwrap(), values).unwrap()
    }

    #[test]
    fn absolute_entropy_examples() {
        assert!((entropy_abs(&constant(&[1.0, 1.0, 1.0])) + 3.0).abs() < 1e-14);
        assert!(entropy_abs(&constant(&[E, E, E])).abs() < 1e-14);
        assert_eq!(entropy_abs(&constant(&[0.0, 0.0, 0.0])), 0.0);
    }

    #[test]
    fn relative_entropy_examples() {
        let eq = [1.0, 1.0, 1.0];
        assert_eq!(entropy_rel(&constant(&eq), &eq).unwrap(), 0.0);
        let e = entropy_rel(&constant(&[2.0, 1.0, 1.0]), &eq).unwrap();
        assert!((e - (2.0 * 2f64.ln() - 1.0)).abs() < 1e-14);
        assert!(matches!(entropy_rel(&constant(&eq), &[1.0, 0.0, 1.0]), Err(Error::Domain(_))));
    }

    #[test]
    fn split_identity_on_cosines() {
        let g = Grid1D::new(50).unwrap();
        let xs = g.centers();
        let u: Vec<Vec<f64>> = (1..4)
            .map(|k| xs.iter().map(|x| 1.0 + 0.4 * (k as f64 * PI * x).cos() + 0.1 * k as f64).collect())
            .collect();
        let s = StateField::new(g, u, 0.0).unwrap();
        let eq = [0.7, 1.3, 2.0];
        let lhs = entropy_rel(&s, &eq).unwrap();
        let rhs = entropy_rel_to_means(&s) + entropy_rel_const(&s.means(), &eq).unwrap();
        assert!((lhs - rhs).abs() < 1e-13);
    }

    #[test]
    fn dissipation_examples() {
        let net = preset_3species(2, 1.0, 1.0).unwrap();
        let eq = [1.0, 1.0, 1.0];
        let d = [1.0, 1.0, 1.0];
        assert_eq!(dissipation_rel(&constant(&eq), &eq, &net, &d).unwrap().total, 0.0);
        let diss = dissipation_rel(&constant(&[2.0, 1.0, 2.0]), &eq, &net, &d).unwrap();
        assert_eq!(diss.reaction, 0.0);
        assert!(diss.fisher.iter().all(|f| *f == 0.0));
        let diss = dissipation_rel(&constant(&[2.0, 1.0, 1.0]), &eq, &net, &d).unwrap();
        // psi(2,1) + psi(1,2)
        let want = (2.0 * 2f64.ln() - 1.0) + (1.0 - 2f64.ln());
        assert!((diss.reaction - want).abs() < 1e-14);
        let touch = dissipation_rel(&constant(&[0.0, 1.0, 1.0]), &eq, &net, &d);
        assert!(matches!(touch, Err(Error::BoundaryTouch { species: 0, cell: 0 })));
    }

    #[test]
    fn fisher_is_nonnegative_and_consistent() {
        let g = Grid1D::new(400).unwrap();
        let u: Vec<f64> = g.centers().iter().map(|x| 1.0 + 0.5 * (PI * x).cos()).collect();
        let f = fisher_log_mean(&u, g.h());
        let s = sqrt_gradient_sq(&u, g.h());
        assert!(f > 0.0 && s > 0.0);
        // int |u_x|^2/u = 4 int |(sqrt u)_x|^2 in the continuum
        assert!((f / (4.0 * s) - 1.0).abs() < 1e-3);
    }
}

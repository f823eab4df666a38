//! Mass-action reaction networks.
//!
//! A [`Network`] is an ordered list of species plus a list of reactions
//! `y -> y'` between complexes, each with a positive rate constant. The net
//! production vector is `R(c) = sum_r k_r c^{y_r} (y'_r - y_r)`.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Stoichiometric coefficients of a complex, one entry per species.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Complex(Vec<u32>);

impl Complex {
    pub fn new(coeffs: Vec<u32>) -> Self {
        Complex(coeffs)
    }

    pub fn coeffs(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Molecularity `|y|`.
    pub fn order(&self) -> u32 {
        self.0.iter().sum()
    }

    /// `c^y = prod c_i^{y_i}` with `0^0 = 1`.
    pub fn monomial(&self, c: &[f64]) -> f64 {
        self.0.iter().zip(c).filter(|(&y, _)| y > 0).map(|(&y, &ci)| ci.powi(y as i32)).product()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Reaction {
    pub reactant: Complex,
    pub product: Complex,
    pub rate_const: f64,
}

impl Reaction {
    pub fn new(reactant: Complex, product: Complex, rate_const: f64) -> Result<Self> {
        if !(rate_const > 0.0 && rate_const.is_finite()) {
            return Err(Error::Contract(format!("rate constant must be positive, got {rate_const}")));
        }
        if reactant == product {
            return Err(Error::Contract("reactant and product complexes coincide".into()));
        }
        if reactant.len() != product.len() {
            return Err(Error::Contract("complexes of different dimension".into()));
        }
        Ok(Reaction { reactant, product, rate_const })
    }

    /// Reaction vector `y' - y`.
    pub fn stoichiometry(&self) -> Vec<i64> {
        self.product.coeffs().iter().zip(self.reactant.coeffs()).map(|(&p, &r)| p as i64 - r as i64).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    species: Vec<String>,
    reactions: Vec<Reaction>,
}

impl Network {
    pub fn new(species: Vec<String>, reactions: Vec<Reaction>) -> Result<Self> {
        if reactions.is_empty() {
            return Err(Error::Contract("network needs at least one reaction".into()));
        }
        let n = species.len();
        let unique: BTreeSet<_> = species.iter().collect();
        if unique.len() != n {
            return Err(Error::Contract("duplicate species names".into()));
        }
        for (i, r) in reactions.iter().enumerate() {
            if r.reactant.len() != n || r.product.len() != n {
                return Err(Error::Contract(format!(
                    "reaction {i} has complexes of dimension {} but the network has {n} species",
                    r.reactant.len()
                )));
            }
        }
        Ok(Network { species, reactions })
    }

    pub fn species(&self) -> &[String] {
        &self.species
    }

    pub fn n_species(&self) -> usize {
        self.species.len()
    }

    pub fn reactions(&self) -> &[Reaction] {
        &self.reactions
    }

    fn check_dim(&self, c: &[f64]) -> Result<()> {
        if c.len() != self.n_species() {
            return Err(Error::Contract(format!(
                "concentration vector has length {} but the network has {} species",
                c.len(),
                self.n_species()
            )));
        }
        Ok(())
    }

    /// Distinct complexes in lexicographic order.
    pub fn complexes(&self) -> Vec<Complex> {
        let set: BTreeSet<Complex> =
            self.reactions.iter().flat_map(|r| [r.reactant.clone(), r.product.clone()]).collect();
        set.into_iter().collect()
    }

    /// Stoichiometric matrix, species x reactions.
    pub fn stoichiometric_matrix(&self) -> Vec<Vec<i64>> {
        let cols: Vec<Vec<i64>> = self.reactions.iter().map(Reaction::stoichiometry).collect();
        (0..self.n_species()).map(|i| cols.iter().map(|col| col[i]).collect()).collect()
    }

    /// Net production `R(c)`. Evaluates without checking signs; see
    /// [`net_production`] for the checked entry point.
    pub(crate) fn net_production_unchecked(&self, c: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
        for r in &self.reactions {
            let rate = r.rate_const * r.reactant.monomial(c);
            if rate == 0.0 {
                continue;
            }
            for (i, (&p, &q)) in r.product.coeffs().iter().zip(r.reactant.coeffs()).enumerate() {
                if p != q {
                    out[i] += rate * (p as f64 - q as f64);
                }
            }
        }
    }
}

fn check_nonnegative(c: &[f64]) -> Result<()> {
    if let Some((i, v)) = c.iter().enumerate().find(|(_, v)| !(**v >= 0.0)) {
        return Err(Error::Domain(format!("concentration {i} is {v}")));
    }
    Ok(())
}

/// Mass-action rate `k c^y` of reaction `r`.
pub fn mass_action_rate(net: &Network, r: &Reaction, c: &[f64]) -> Result<f64> {
    net.check_dim(c)?;
    check_nonnegative(c)?;
    if r.reactant.len() != net.n_species() {
        return Err(Error::Contract("reaction does not belong to the network".into()));
    }
    Ok(r.rate_const * r.reactant.monomial(c))
}

pub fn net_production(net: &Network, c: &[f64]) -> Result<Vec<f64>> {
    net.check_dim(c)?;
    check_nonnegative(c)?;
    let mut out = vec![0.0; c.len()];
    net.net_production_unchecked(c, &mut out);
    Ok(out)
}

/// Basis of the left null space of the stoichiometric matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConservationBasis {
    pub vectors: Vec<Vec<f64>>,
}

impl ConservationBasis {
    /// Whether `w` lies in the span of the basis (least-squares residual test).
    pub fn spans(&self, w: &[f64], tol: f64) -> bool {
        let mut rows: Vec<Vec<f64>> = self.vectors.clone();
        let before = rank(&mut rows.clone(), tol);
        rows.push(w.to_vec());
        rank(&mut rows, tol) == before
    }
}

fn rank(rows: &mut [Vec<f64>], tol: f64) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let ncol = rows[0].len();
    let mut r = 0;
    for col in 0..ncol {
        let Some(piv) = (r..rows.len())
            .filter(|&i| rows[i][col].abs() > tol)
            .max_by(|&i, &j| rows[i][col].abs().total_cmp(&rows[j][col].abs()))
        else {
            continue;
        };
        rows.swap(r, piv);
        for i in 0..rows.len() {
            if i != r {
                let f = rows[i][col] / rows[r][col];
                for j in col..ncol {
                    rows[i][j] -= f * rows[r][j];
                }
            }
        }
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    r
}

/// Exact rational Gaussian elimination on `S^T`; each null-space vector is
/// scaled to coprime integers before conversion.
pub fn conservation_basis(net: &Network) -> ConservationBasis {
    let n = net.n_species();
    let mut rows: Vec<Vec<BigRational>> = net
        .reactions()
        .iter()
        .map(|r| r.stoichiometry().into_iter().map(|v| BigRational::from_integer(BigInt::from(v))).collect())
        .collect();

    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..n {
        let Some(p) = (row..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(row, p);
        let inv = rows[row][col].recip();
        for v in rows[row].iter_mut() {
            *v = &*v * &inv;
        }
        for i in 0..rows.len() {
            if i != row && !rows[i][col].is_zero() {
                let f = rows[i][col].clone();
                for j in 0..n {
                    let delta = &f * &rows[row][j];
                    rows[i][j] = &rows[i][j] - &delta;
                }
            }
        }
        pivots.push(col);
        row += 1;
        if row == rows.len() {
            break;
        }
    }

    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    let vectors = free
        .iter()
        .map(|&f| {
            let mut v = vec![BigRational::zero(); n];
            v[f] = BigRational::one();
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = -rows[r][f].clone();
            }
            to_integer_vector(v)
        })
        .collect();
    ConservationBasis { vectors }
}

fn to_integer_vector(v: Vec<BigRational>) -> Vec<f64> {
    use num_integer::Integer;
    let lcm = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = v.iter().map(|x| (x * &lcm).to_integer()).collect();
    let gcd = ints.iter().filter(|x| !x.is_zero()).fold(BigInt::zero(), |acc, x| acc.gcd(x));
    let gcd = if gcd.is_zero() { BigInt::one() } else { gcd.abs() };
    ints.iter().map(|x| (x / &gcd).to_f64().unwrap_or(f64::NAN)).collect()
}

/// Complex-balance test: for each complex, outgoing flux equals incoming flux within `tol`.
pub fn is_complex_balanced_at(net: &Network, c0: &[f64], tol: f64) -> Result<bool> {
    net.check_dim(c0)?;
    if let Some((i, v)) = c0.iter().enumerate().find(|(_, v)| !(**v > 0.0)) {
        return Err(Error::Domain(format!("complex balance needs a positive state, entry {i} is {v}")));
    }
    for cx in net.complexes() {
        let mut out = 0.0;
        let mut inflow = 0.0;
        for r in net.reactions() {
            let flux = r.rate_const * r.reactant.monomial(c0);
            if r.reactant == cx {
                out += flux;
            }
            if r.product == cx {
                inflow += flux;
            }
        }
        if (out - inflow).abs() > tol {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `A + nB <-> B + C` over species (A, B, C).
pub fn preset_3species(n: u32, k1: f64, k2: f64) -> Result<Network> {
    if n < 2 {
        return Err(Error::Contract(format!("n must be at least 2, got {n}")));
    }
    let left = Complex::new(vec![1, n, 0]);
    let right = Complex::new(vec![0, 1, 1]);
    Network::new(
        vec!["A".into(), "B".into(), "C".into()],
        vec![Reaction::new(left.clone(), right.clone(), k1)?, Reaction::new(right, left, k2)?],
    )
}

/// Exponents of the two-species family `m1 A + n1 B <-> m2 A + n2 B`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwoSpeciesExponents {
    pub m1: u32,
    pub n1: u32,
    pub m2: u32,
    pub n2: u32,
}

impl TwoSpeciesExponents {
    pub fn new(m1: u32, n1: u32, m2: u32, n2: u32) -> Result<Self> {
        let e = TwoSpeciesExponents { m1, n1, m2, n2 };
        e.validate()?;
        Ok(e)
    }

    pub fn validate(&self) -> Result<()> {
        let TwoSpeciesExponents { m1, n1, m2, n2 } = *self;
        if !(m1 > m2 && m2 > 0) {
            return Err(Error::Contract(format!("assumption m1 > m2 > 0 violated (m1={m1}, m2={m2})")));
        }
        if !(n1 > 0 && n1 < n2) {
            return Err(Error::Contract(format!("assumption 0 < n1 < n2 violated (n1={n1}, n2={n2})")));
        }
        if m1 - m2 >= n2 - n1 {
            return Err(Error::Contract(format!("assumption m̄ < n̄ violated (m̄={}, n̄={})", m1 - m2, n2 - n1)));
        }
        Ok(())
    }

    /// `m̄ = m1 - m2`.
    pub fn m_bar(&self) -> u32 {
        self.m1 - self.m2
    }

    /// `n̄ = n2 - n1`.
    pub fn n_bar(&self) -> u32 {
        self.n2 - self.n1
    }
}

pub fn preset_2species(exps: TwoSpeciesExponents, kf: f64, kb: f64) -> Result<Network> {
    exps.validate()?;
    let left = Complex::new(vec![exps.m1, exps.n1]);
    let right = Complex::new(vec![exps.m2, exps.n2]);
    Network::new(
        vec!["A".into(), "B".into()],
        vec![Reaction::new(left.clone(), right.clone(), kf)?, Reaction::new(right, left, kb)?],
    )
}

#[derive(Serialize, Deserialize)]
struct ReactionDoc {
    reactant: BTreeMap<String, u32>,
    product: BTreeMap<String, u32>,
    k: f64,
}

#[derive(Serialize, Deserialize)]
struct NetworkDoc {
    species: Vec<String>,
    reactions: Vec<ReactionDoc>,
}

impl Network {
    pub fn to_json(&self) -> serde_json::Value {
        let sparse = |cx: &Complex| -> BTreeMap<String, u32> {
            self.species.iter().zip(cx.coeffs()).filter(|(_, &v)| v > 0).map(|(s, &v)| (s.clone(), v)).collect()
        };
        let doc = NetworkDoc {
            species: self.species.clone(),
            reactions: self
                .reactions
                .iter()
                .map(|r| ReactionDoc { reactant: sparse(&r.reactant), product: sparse(&r.product), k: r.rate_const })
                .collect(),
        };
        serde_json::to_value(doc).expect("network document is always serialisable")
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self> {
        let doc: NetworkDoc = serde_json::from_value(value.clone())
            .map_err(|e| Error::Contract(format!("invalid network document: {e}")))?;
        let dense = |m: &BTreeMap<String, u32>| -> Result<Complex> {
            let mut v = vec![0u32; doc.species.len()];
            for (name, &coeff) in m {
                let idx = doc
                    .species
                    .iter()
                    .position(|s| s == name)
                    .ok_or_else(|| Error::Contract(format!("unknown species `{name}`")))?;
                v[idx] = coeff;
            }
            Ok(Complex::new(v))
        };
        let reactions = doc
            .reactions
            .iter()
            .map(|r| Reaction::new(dense(&r.reactant)?, dense(&r.product)?, r.k))
            .collect::<Result<Vec<_>>>()?;
        Network::new(doc.species.clone(), reactions)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single(reactant: Vec<u32>, product: Vec<u32>, k: f64) -> Network {
        let n = reactant.len();
        let names = (0..n).map(|i| format!("S{i}")).collect();
        Network::new(names, vec![Reaction::new(Complex::new(reactant), Complex::new(product), k).unwrap()]).unwrap()
    }

    fn reversible(k1: f64, k2: f64) -> Network {
        Network::new(
            vec!["A".into(), "B".into()],
            vec![
                Reaction::new(Complex::new(vec![1, 0]), Complex::new(vec![0, 1]), k1).unwrap(),
                Reaction::new(Complex::new(vec![0, 1]), Complex::new(vec![1, 0]), k2).unwrap(),
            ],
        )
        .unwrap()
    }

    #[test]
    fn rate_examples() {
        let net = single(vec![1, 1, 0], vec![0, 0, 1], 1.0);
        let r = &net.reactions()[0];
        assert_eq!(mass_action_rate(&net, r, &[2.0, 3.0, 4.0]).unwrap(), 6.0);

        let net = single(vec![1, 2, 0], vec![0, 1, 1], 1.0);
        let r = &net.reactions()[0];
        assert_eq!(mass_action_rate(&net, r, &[1.0, 1.0, 1.0]).unwrap(), 1.0);

        let net = single(vec![2, 0], vec![0, 1], 3.0);
        let r = &net.reactions()[0];
        assert_eq!(mass_action_rate(&net, r, &[2.0, 0.0]).unwrap(), 12.0);
    }

    #[test]
    fn zero_to_the_zero_is_one() {
        let net = single(vec![1, 0], vec![0, 1], 2.0);
        assert_eq!(mass_action_rate(&net, &net.reactions()[0], &[1.5, 0.0]).unwrap(), 3.0);
    }

    #[test]
    fn negative_concentration_is_domain_error() {
        let net = single(vec![1, 0], vec![0, 1], 1.0);
        let err = mass_action_rate(&net, &net.reactions()[0], &[-1.0, 0.0]).unwrap_err();
        assert!(matches!(err, Error::Domain(_)));
        assert!(matches!(net_production(&net, &[1.0, -0.5]), Err(Error::Domain(_))));
    }

    #[test]
    fn dimension_mismatch_is_contract_error() {
        let net = preset_3species(2, 1.0, 1.0).unwrap();
        assert!(matches!(net_production(&net, &[1.0, 1.0]), Err(Error::Contract(_))));
    }

    #[test]
    fn net_production_examples() {
        let net = preset_3species(2, 1.0, 1.0).unwrap();
        assert_eq!(net_production(&net, &[1.0, 1.0, 1.0]).unwrap(), vec![0.0, 0.0, 0.0]);
        assert_eq!(net_production(&net, &[2.0, 1.0, 1.0]).unwrap(), vec![-1.0, -1.0, 1.0]);

        let e = TwoSpeciesExponents::new(2, 1, 1, 3).unwrap();
        let net2 = preset_2species(e, 1.0, 1.0).unwrap();
        assert_eq!(net_production(&net2, &[1.0, 1.0]).unwrap(), vec![0.0, 0.0]);
        assert_eq!(net_production(&net2, &[1.0, 2.0]).unwrap(), vec![6.0, -12.0]);
    }

    #[test]
    fn conservation_examples() {
        let b = conservation_basis(&preset_3species(2, 1.0, 1.0).unwrap());
        assert_eq!(b.vectors.len(), 2);
        assert!(b.spans(&[1.0, 0.0, 1.0], 1e-12));
        assert!(b.spans(&[0.0, 1.0, 1.0], 1e-12));
        assert!(!b.spans(&[1.0, 0.0, 0.0], 1e-12));

        let e = TwoSpeciesExponents::new(2, 1, 1, 3).unwrap();
        let b = conservation_basis(&preset_2species(e, 1.0, 1.0).unwrap());
        assert_eq!(b.vectors.len(), 1);
        assert!(b.spans(&[e.n_bar() as f64, e.m_bar() as f64], 1e-12));

        let b = conservation_basis(&single(vec![1, 0], vec![0, 1], 1.0));
        assert!(b.spans(&[1.0, 1.0], 1e-12));
    }

    #[test]
    fn conservation_basis_is_exact() {
        let net = preset_3species(3, 2.0, 0.5).unwrap();
        let basis = conservation_basis(&net);
        for w in &basis.vectors {
            for r in net.reactions() {
                let dot: f64 = w.iter().zip(r.stoichiometry()).map(|(a, b)| a * b as f64).sum();
                assert_eq!(dot, 0.0);
            }
        }
    }

    #[test]
    fn complex_balance_examples() {
        assert!(is_complex_balanced_at(&reversible(1.0, 1.0), &[1.0, 1.0], 1e-12).unwrap());
        assert!(!is_complex_balanced_at(&reversible(2.0, 1.0), &[1.0, 1.0], 1e-12).unwrap());
        let net = preset_3species(2, 1.0, 1.0).unwrap();
        assert!(is_complex_balanced_at(&net, &[1.0, 1.0, 1.0], 1e-12).unwrap());
        assert!(matches!(is_complex_balanced_at(&net, &[1.0, 0.0, 1.0], 1e-12), Err(Error::Domain(_))));
    }

    #[test]
    fn presets() {
        let net = preset_3species(2, 1.0, 1.0).unwrap();
        assert_eq!(net.reactions()[0].reactant.coeffs(), &[1, 2, 0]);
        assert_eq!(net.reactions()[0].product.coeffs(), &[0, 1, 1]);
        let net = preset_3species(3, 1.0, 1.0).unwrap();
        assert_eq!(net.reactions()[0].reactant.coeffs(), &[1, 3, 0]);
        let net = preset_3species(2, 5.0, 1.0).unwrap();
        let r = &net.reactions()[0];
        assert_eq!(mass_action_rate(&net, r, &[1.0, 1.0, 1.0]).unwrap(), 5.0);
        assert!(matches!(preset_3species(1, 1.0, 1.0), Err(Error::Contract(_))));
    }

    #[test]
    fn two_species_assumptions() {
        let e = TwoSpeciesExponents::new(2, 1, 1, 3).unwrap();
        assert_eq!((e.m_bar(), e.n_bar()), (1, 2));
        let err = TwoSpeciesExponents::new(3, 1, 1, 2).unwrap_err();
        assert!(err.to_string().contains("m̄ < n̄"), "{err}");
        assert!(TwoSpeciesExponents::new(1, 1, 1, 3).is_err());
        assert!(TwoSpeciesExponents::new(2, 3, 1, 3).is_err());
    }

    #[test]
    fn complexes_are_sorted_and_deduplicated() {
        let net = preset_3species(2, 1.0, 1.0).unwrap();
        let cx = net.complexes();
        assert_eq!(cx.len(), 2);
        assert!(cx[0] < cx[1]);
    }

    #[test]
    fn json_roundtrip() {
        let net = preset_3species(2, 1.5, 0.5).unwrap();
        let v = net.to_json();
        assert_eq!(v["reactions"][0]["reactant"]["B"], 2);
        assert!(v["reactions"][0]["reactant"].get("C").is_none());
        assert_eq!(Network::from_json(&v).unwrap(), net);
    }

    #[test]
    fn reaction_invariants() {
        let c = Complex::new(vec![1, 0]);
        assert!(Reaction::new(c.clone(), c.clone(), 1.0).is_err());
        assert!(Reaction::new(c, Complex::new(vec![0, 1]), 0.0).is_err());
        assert!(Network::new(vec!["A".into()], vec![]).is_err());
    }
}

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::field::{Grid1D, StateField};
use crate::{Error, Result};

/// Name of the generator behind `random_bounded`, for reports.
pub const RNG_NAME: &str = "ChaCha8Rng";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InitKind {
    Constant {
        values: Vec<f64>,
    },
    /// `base_s + amp_s cos(mode pi x)`.
    CosinePerturbed {
        base: Vec<f64>,
        amp: Vec<f64>,
        #[serde(default = "one")]
        mode: u32,
    },
    /// `left` on `x < split`, `right` elsewhere.
    Piecewise {
        left: Vec<f64>,
        right: Vec<f64>,
        split: f64,
    },
    /// Independent uniform draws in `[lower_s, upper_s]` per cell.
    RandomBounded {
        lower: Vec<f64>,
        upper: Vec<f64>,
    },
}

fn one() -> u32 {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InitialCondition {
    #[serde(flatten)]
    pub kind: InitKind,
    #[serde(default)]
    pub seed: u64,
}

/// Realised bounds of an initial field, per species.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InitialBounds {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    /// `||1/u_0||_inf`; infinite when the species touches zero.
    pub inv_sup: Vec<f64>,
}

impl InitialBounds {
    pub fn of(state: &StateField) -> Self {
        let ns = state.n_species();
        let lower: Vec<f64> = (0..ns).map(|s| state.min(s)).collect();
        let upper = (0..ns).map(|s| state.max(s)).collect();
        let inv_sup = lower.iter().map(|l| if *l > 0.0 { 1.0 / l } else { f64::INFINITY }).collect();
        Self { lower, upper, inv_sup }
    }

    /// Smallest value over all species.
    pub fn alpha(&self) -> f64 {
        self.lower.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Largest value over all species.
    pub fn beta(&self) -> f64 {
        self.upper.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

fn check_nonneg(name: &str, v: &[f64]) -> Result<()> {
    if let Some(x) = v.iter().find(|x| !(**x >= 0.0 && x.is_finite())) {
        return Err(Error::Contract(format!("{name} must be finite and non-negative, got {x}")));
    }
    Ok(())
}

/// Builds a deterministic initial field. `seed` only matters for `random_bounded`.
pub fn make_initial(kind: &InitKind, grid: Grid1D, seed: u64) -> Result<(StateField, InitialBounds)> {
    let n = grid.n_cells();
    let species: Vec<Vec<f64>> = match kind {
        InitKind::Constant { values } => {
            check_nonneg("values", values)?;
            values.iter().map(|v| vec![*v; n]).collect()
        }
        InitKind::CosinePerturbed { base, amp, mode } => {
            if base.len() != amp.len() {
                return Err(Error::Contract("base and amp lengths differ".into()));
            }
            for (b, a) in base.iter().zip(amp) {
                if !(b - a.abs() >= 0.0) {
                    return Err(Error::Contract(format!("cosine perturbation base={b} amp={a} goes negative")));
                }
            }
            let k = *mode as f64;
            base.iter()
                .zip(amp)
                .map(|(b, a)| (0..n).map(|i| b + a * (k * PI * grid.center(i)).cos()).collect())
                .collect()
        }
        InitKind::Piecewise { left, right, split } => {
            if left.len() != right.len() {
                return Err(Error::Contract("left and right lengths differ".into()));
            }
            if !(*split > 0.0 && *split < 1.0) {
                return Err(Error::Contract(format!("split must lie in (0,1), got {split}")));
            }
            check_nonneg("left", left)?;
            check_nonneg("right", right)?;
            left.iter()
                .zip(right)
                .map(|(l, r)| (0..n).map(|i| if grid.center(i) < *split { *l } else { *r }).collect())
                .collect()
        }
        InitKind::RandomBounded { lower, upper } => {
            if lower.len() != upper.len() {
                return Err(Error::Contract("lower and upper lengths differ".into()));
            }
            check_nonneg("lower", lower)?;
            for (l, u) in lower.iter().zip(upper) {
                if !(u >= l && u.is_finite()) {
                    return Err(Error::Contract(format!("need lower <= upper, got [{l}, {u}]")));
                }
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            lower
                .iter()
                .zip(upper)
                .map(|(l, u)| (0..n).map(|_| if l == u { *l } else { rng.random_range(*l..=*u) }).collect())
                .collect()
        }
    };
    let state = StateField::new(grid, species, 0.0)?;
    let bounds = InitialBounds::of(&state);
    Ok((state, bounds))
}

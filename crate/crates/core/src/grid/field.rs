use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Uniform cell-centred grid of the unit interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid1D {
    n_cells: usize,
    h: f64,
}

impl Grid1D {
    pub fn new(n_cells: usize) -> Result<Self> {
        if n_cells < 2 {
            return Err(Error::Contract(format!("n_cells must be at least 2, got {n_cells}")));
        }
        Ok(Self { n_cells, h: 1.0 / n_cells as f64 })
    }

    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    /// Cell centre `x_i = (i + 1/2) h`.
    pub fn center(&self, i: usize) -> f64 {
        (i as f64 + 0.5) * self.h
    }

    pub fn centers(&self) -> Vec<f64> {
        (0..self.n_cells).map(|i| self.center(i)).collect()
    }
}

/// Per-species cell averages at one instant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateField {
    grid: Grid1D,
    species: Vec<Vec<f64>>,
    pub time: f64,
}

impl StateField {
    /// Validates lengths and non-negativity.
    pub fn new(grid: Grid1D, species: Vec<Vec<f64>>, time: f64) -> Result<Self> {
        if species.is_empty() {
            return Err(Error::Contract("state needs at least one species".into()));
        }
        for (s, u) in species.iter().enumerate() {
            if u.len() != grid.n_cells() {
                return Err(Error::Contract(format!("species {s} has {} cells, grid has {}", u.len(), grid.n_cells())));
            }
            if let Some(i) = u.iter().position(|v| !(*v >= 0.0) || !v.is_finite()) {
                return Err(Error::Domain(format!("species {s} has invalid value {} at cell {i}", u[i])));
            }
        }
        if !(time >= 0.0) {
            return Err(Error::Contract(format!("time must be non-negative, got {time}")));
        }
        Ok(Self { grid, species, time })
    }

    pub fn constant(grid: Grid1D, values: &[f64]) -> Result<Self> {
        Self::new(grid, values.iter().map(|v| vec![*v; grid.n_cells()]).collect(), 0.0)
    }

    pub(crate) fn from_parts_unchecked(grid: Grid1D, species: Vec<Vec<f64>>, time: f64) -> Self {
        Self { grid, species, time }
    }

    pub fn grid(&self) -> Grid1D {
        self.grid
    }

    pub fn n_species(&self) -> usize {
        self.species.len()
    }

    pub fn species(&self, s: usize) -> &[f64] {
        &self.species[s]
    }

    pub fn all_species(&self) -> &[Vec<f64>] {
        &self.species
    }

    /// Concentration vector in cell `i`.
    pub fn cell(&self, i: usize) -> Vec<f64> {
        self.species.iter().map(|u| u[i]).collect()
    }

    /// Midpoint rule `sum u_i h`.
    pub fn integral(&self, s: usize) -> f64 {
        self.species[s].iter().sum::<f64>() * self.grid.h()
    }

    /// Spatial means; equal to the integrals on the unit interval.
    pub fn means(&self) -> Vec<f64> {
        (0..self.n_species()).map(|s| self.integral(s)).collect()
    }

    pub fn min(&self, s: usize) -> f64 {
        self.species[s].iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self, s: usize) -> f64 {
        self.species[s].iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// `sum_i w . u(x_i) h` for a conservation vector `w`.
    pub fn linear_total(&self, w: &[f64]) -> f64 {
        w.iter().zip(&self.species).map(|(wi, u)| wi * u.iter().sum::<f64>()).sum::<f64>() * self.grid.h()
    }

    /// First zero cell, if any.
    pub fn first_zero(&self) -> Option<(usize, usize)> {
        for (s, u) in self.species.iter().enumerate() {
            if let Some(i) = u.iter().position(|v| *v <= 0.0) {
                return Some((s, i));
            }
        }
        None
    }
}

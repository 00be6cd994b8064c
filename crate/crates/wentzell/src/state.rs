//! Discrete population state: interior density samples plus the two
//! boundary masses, stored as one flat vector.

use nalgebra::DVector;

use crate::grid::Grid;

/// State vector over a grid with `n + 1` nodes. Entry `0` and entry `n` are
/// the boundary compartments, entries `1..n` sample the interior density.
#[derive(Clone, Debug, PartialEq)]
pub struct PopulationState {
    values: DVector<f64>,
}

impl PopulationState {
    pub fn new(values: DVector<f64>) -> Self {
        PopulationState { values }
    }

    pub fn from_vec(values: Vec<f64>) -> Self {
        PopulationState {
            values: DVector::from_vec(values),
        }
    }

    pub fn constant(grid: &Grid, value: f64) -> Self {
        PopulationState {
            values: DVector::from_element(grid.len(), value),
        }
    }

    /// Samples `f` at the grid nodes.
    pub fn from_fn(grid: &Grid, mut f: impl FnMut(f64) -> f64) -> Self {
        PopulationState {
            values: DVector::from_iterator(grid.len(), (0..grid.len()).map(|i| f(grid.node(i)))),
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &DVector<f64> {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut DVector<f64> {
        &mut self.values
    }

    pub fn into_vector(self) -> DVector<f64> {
        self.values
    }

    pub fn as_slice(&self) -> &[f64] {
        self.values.as_slice()
    }

    /// Boundary mass at `s = 0`.
    pub fn boundary_low(&self) -> f64 {
        self.values[0]
    }

    /// Boundary mass at `s = m`.
    pub fn boundary_high(&self) -> f64 {
        self.values[self.values.len() - 1]
    }

    pub fn min_entry(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn is_nonnegative(&self) -> bool {
        self.values.iter().all(|&v| v >= 0.0)
    }
}

impl std::ops::Index<usize> for PopulationState {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.values[i]
    }
}

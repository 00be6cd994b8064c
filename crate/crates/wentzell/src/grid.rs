//! Uniform vertex-centered size grid.

use crate::error::{Error, Result};

/// Nodes `s_i = i * h`, `i = 0..=n`, with `h = m / n`. Nodes `0` and `n` are
/// the boundary compartments; the `n - 1` interior nodes carry the density.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid {
    max_size: f64,
    n: usize,
    h: f64,
}

impl Grid {
    /// At least one interior node is required, so `n >= 2`.
    pub fn build(max_size: f64, n: usize) -> Result<Grid> {
        if !(max_size > 0.0) || !max_size.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "maximum size m = {max_size} must be positive and finite"
            )));
        }
        if n < 2 {
            return Err(Error::InvalidArgument(format!(
                "grid needs n >= 2 cells (got {n}): no interior node otherwise"
            )));
        }
        Ok(Grid {
            max_size,
            n,
            h: max_size / n as f64,
        })
    }

    pub fn max_size(&self) -> f64 {
        self.max_size
    }

    /// Number of cells; the state vector has `n + 1` entries.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    /// Number of nodes, `n + 1`.
    pub fn len(&self) -> usize {
        self.n + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Node coordinate; the last node is pinned to `m` exactly.
    pub fn node(&self, i: usize) -> f64 {
        debug_assert!(i <= self.n);
        if i == self.n {
            self.max_size
        } else {
            i as f64 * self.h
        }
    }

    /// Face coordinate between nodes `i` and `i + 1`, for `i < n`.
    pub fn face(&self, i: usize) -> f64 {
        debug_assert!(i < self.n);
        (i as f64 + 0.5) * self.h
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..=self.n).map(|i| self.node(i)).collect()
    }
}

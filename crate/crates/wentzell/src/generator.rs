//! Finite-volume assembly of the population generator.
//!
//! The interior discretization is a vertex-centered flux form: through the
//! face between nodes `k` and `k + 1` mass moves with the upwinded growth
//! rate plus a diffusive exchange,
//!
//! ```text
//! F_{k+1/2} = gamma(s_{k+1/2}) * u_upwind - d(s_{k+1/2}) * (u_{k+1} - u_k) / h
//! ```
//!
//! and interior row `i` reads `-(F_{i+1/2} - F_{i-1/2}) / h - mu_i u_i`
//! plus recruitment. The two boundary compartments are ordinary ODE rows
//! driven by the same face fluxes (`-F_{1/2}` and `+F_{n-1/2}`), which makes
//! the weighted total mass telescope exactly: with conservative boundary
//! constants the discrete generator conserves population when recruitment
//! and mortality vanish, step for step, not just up to truncation error.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::model::{norm_weights, validate, Model};
use crate::state::PopulationState;

/// Assembled generator: tridiagonal transport/diffusion part, dense
/// recruitment part, and the mass weights of the state norm.
#[derive(Clone, Debug)]
pub struct GeneratorMatrix {
    grid: Grid,
    /// Subdiagonal: `sub[i] = A[i+1][i]`.
    sub: DVector<f64>,
    /// Diagonal of the local part.
    diag: DVector<f64>,
    /// Superdiagonal: `sup[i] = A[i][i+1]`.
    sup: DVector<f64>,
    /// Dense recruitment part `h * beta(s_i, s_j)`; columns `0` and `n` stay
    /// empty because boundary mass does not reproduce (no quadrature weight).
    recruitment: DMatrix<f64>,
    /// Mass weights `(w_low, h, ..., h, w_high)`.
    weights: DVector<f64>,
    mu_nodes: DVector<f64>,
    omega_bound: f64,
}

impl GeneratorMatrix {
    /// Assembles the generator for a validated model.
    pub fn assemble(model: &Model, grid: &Grid) -> Result<Self> {
        Self::assemble_inner(model, grid, false)
    }

    /// Assembles with recruitment forced to zero, regardless of the model's
    /// kernel. This is the transport-diffusion-mortality part whose resolvent
    /// the dissipativity estimates apply to.
    pub fn assemble_recruitment_free(model: &Model, grid: &Grid) -> Result<Self> {
        Self::assemble_inner(model, grid, true)
    }

    fn assemble_inner(model: &Model, grid: &Grid, drop_recruitment: bool) -> Result<Self> {
        if (model.max_size() - grid.max_size()).abs() > f64::EPSILON * model.max_size() {
            return Err(Error::InvalidArgument(format!(
                "grid covers [0, {}] but the model lives on [0, {}]",
                grid.max_size(),
                model.max_size()
            )));
        }
        let report = validate(model);
        if !report.is_admissible() {
            return Err(Error::Admissibility(report.violations.join("; ")));
        }
        let w = norm_weights(model)?;

        let n = grid.n();
        let h = grid.h();

        // Per-face transfer coefficients: through face k, `t_up[k]` carries
        // mass from node k to k+1 and `t_down[k]` from k+1 to k. Reusing the
        // same float value in both adjacent rows keeps the column sums exact
        // up to one rounding each.
        let mut t_up = DVector::zeros(n);
        let mut t_down = DVector::zeros(n);
        for k in 0..n {
            let s = grid.face(k);
            let g = model.growth().eval(s)?;
            let d = model.diffusion().eval(s)?;
            let dh = d / h;
            t_up[k] = g.max(0.0) + dh;
            t_down[k] = (-g).max(0.0) + dh;
        }

        let mut mu_nodes = DVector::zeros(n + 1);
        for i in 0..=n {
            mu_nodes[i] = model.mortality().eval(grid.node(i))?;
        }

        let mut sub = DVector::zeros(n);
        let mut diag = DVector::zeros(n + 1);
        let mut sup = DVector::zeros(n);

        diag[0] = -t_up[0] - mu_nodes[0];
        sup[0] = t_down[0];
        for i in 1..n {
            sub[i - 1] = t_up[i - 1] / h;
            diag[i] = -(t_up[i] + t_down[i - 1]) / h - mu_nodes[i];
            if i < n - 1 {
                sup[i] = t_down[i] / h;
            }
        }
        sup[n - 1] = t_down[n - 1] / h;
        // Boundary rows are plain ODEs in the face flux, not flux differences.
        sub[n - 1] = t_up[n - 1];
        diag[n] = -t_down[n - 1] - mu_nodes[n];

        let mut recruitment = DMatrix::zeros(n + 1, n + 1);
        if !drop_recruitment && !model.recruitment().is_zero() {
            for i in 0..=n {
                let s = grid.node(i);
                for j in 1..n {
                    recruitment[(i, j)] = h * model.recruitment().eval(s, grid.node(j))?;
                }
            }
        }

        let mut weights = DVector::from_element(n + 1, h);
        weights[0] = w.low;
        weights[n] = w.high;

        let mut g = GeneratorMatrix {
            grid: *grid,
            sub,
            diag,
            sup,
            recruitment,
            weights,
            mu_nodes,
            omega_bound: 0.0,
        };
        g.omega_bound = g.compute_omega_bound();
        Ok(g)
    }

    /// Raw constructor for tests that need matrices assembly cannot produce
    /// (e.g. reducible coupling patterns).
    #[cfg(test)]
    #[allow(clippy::too_many_arguments)]
    pub(crate) fn from_parts_unchecked(
        grid: Grid,
        sub: DVector<f64>,
        diag: DVector<f64>,
        sup: DVector<f64>,
        recruitment: DMatrix<f64>,
        weights: DVector<f64>,
        mu_nodes: DVector<f64>,
    ) -> Self {
        let mut g = GeneratorMatrix {
            grid,
            sub,
            diag,
            sup,
            recruitment,
            weights,
            mu_nodes,
            omega_bound: 0.0,
        };
        g.omega_bound = g.compute_omega_bound();
        g
    }

    /// Gershgorin row bound on the spectral abscissa:
    /// `max_i (A_ii + sum_{j != i} |A_ij|)`.
    fn compute_omega_bound(&self) -> f64 {
        let n = self.grid.n();
        let mut bound = f64::NEG_INFINITY;
        for i in 0..=n {
            let mut row = self.diag[i] + self.recruitment[(i, i)];
            if i > 0 {
                row += (self.sub[i - 1] + self.recruitment[(i, i - 1)]).abs()
                    - self.recruitment[(i, i - 1)].abs();
            }
            if i < n {
                row += (self.sup[i] + self.recruitment[(i, i + 1)]).abs()
                    - self.recruitment[(i, i + 1)].abs();
            }
            for j in 0..=n {
                if j != i {
                    row += self.recruitment[(i, j)].abs();
                }
            }
            bound = bound.max(row);
        }
        bound
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Number of nodes (`n + 1`).
    pub fn size(&self) -> usize {
        self.grid.len()
    }

    pub fn weights(&self) -> &DVector<f64> {
        &self.weights
    }

    pub fn omega_bound(&self) -> f64 {
        self.omega_bound
    }

    pub fn is_recruitment_free(&self) -> bool {
        self.recruitment.iter().all(|&v| v == 0.0)
    }

    fn check_len(&self, u: &PopulationState) -> Result<()> {
        if u.len() != self.size() {
            return Err(Error::DimensionMismatch {
                expected: self.size(),
                got: u.len(),
            });
        }
        Ok(())
    }

    /// Generator action `A u` (tridiagonal part plus dense recruitment).
    pub fn apply(&self, u: &PopulationState) -> Result<PopulationState> {
        self.check_len(u)?;
        let v = u.values();
        let n = self.grid.n();
        let mut y = DVector::zeros(n + 1);
        y[0] = self.diag[0] * v[0] + self.sup[0] * v[1];
        for i in 1..n {
            y[i] = self.sub[i - 1] * v[i - 1] + self.diag[i] * v[i] + self.sup[i] * v[i + 1];
        }
        y[n] = self.sub[n - 1] * v[n - 1] + self.diag[n] * v[n];
        if !self.is_recruitment_free() {
            y.gemv(1.0, &self.recruitment, v, 1.0);
        }
        Ok(PopulationState::new(y))
    }

    /// Weighted total population `sum_i w_i u_i`.
    pub fn total_mass(&self, u: &PopulationState) -> f64 {
        assert_eq!(u.len(), self.size(), "state does not match grid");
        self.weights.dot(u.values())
    }

    /// Weighted state norm `sum_i w_i |u_i|`.
    pub fn weighted_norm(&self, u: &PopulationState) -> f64 {
        assert_eq!(u.len(), self.size(), "state does not match grid");
        self.weights
            .iter()
            .zip(u.values().iter())
            .map(|(w, x)| w * x.abs())
            .sum()
    }

    /// Weighted birth and death rates `(B, D)` with
    /// `B = sum_i w_i (K u)_i` and `D = sum_i w_i mu(s_i) u_i`, so that
    /// `d/dt total_mass = B - D` exactly for conservative boundary constants
    /// (for general constants the boundary flux terms do not cancel).
    pub fn birth_death_rates(&self, u: &PopulationState) -> Result<(f64, f64)> {
        self.check_len(u)?;
        let births = if self.is_recruitment_free() {
            0.0
        } else {
            let ku = &self.recruitment * u.values();
            self.weights.dot(&ku)
        };
        let deaths = self
            .weights
            .iter()
            .zip(self.mu_nodes.iter())
            .zip(u.values().iter())
            .map(|((w, mu), x)| w * mu * x)
            .sum();
        Ok((births, deaths))
    }

    /// Largest recruitment row sum `max_i sum_j K_ij`: the discrete analogue
    /// of the kernel bound that gates the implicit-Euler positivity warning.
    pub fn recruitment_row_bound(&self) -> f64 {
        let n = self.grid.n();
        (0..=n)
            .map(|i| self.recruitment.row(i).sum())
            .fold(0.0, f64::max)
    }

    /// Largest weighted recruitment column sum `max_j (sum_i w_i K_ij) / w_j`:
    /// the operator norm of the recruitment part in the weighted state norm,
    /// which bounds the actual per-step mass amplification.
    pub fn recruitment_weighted_column_bound(&self) -> f64 {
        let n = self.grid.n();
        (0..=n)
            .map(|j| {
                let col: f64 = (0..=n)
                    .map(|i| self.weights[i] * self.recruitment[(i, j)])
                    .sum();
                col / self.weights[j]
            })
            .fold(0.0, f64::max)
    }

    /// Densifies `local + recruitment` (desk scale only).
    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.grid.n();
        let mut a = self.recruitment.clone();
        for i in 0..=n {
            a[(i, i)] += self.diag[i];
        }
        for i in 0..n {
            a[(i + 1, i)] += self.sub[i];
            a[(i, i + 1)] += self.sup[i];
        }
        a
    }

    /// Mortality samples at the grid nodes.
    pub fn mortality_nodes(&self) -> &DVector<f64> {
        &self.mu_nodes
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{conservative_constants, Coefficient, Kernel};

    fn pure_diffusion_n2() -> (Model, Grid) {
        let gamma = Coefficient::Constant(0.0);
        let d = Coefficient::Constant(1.0);
        let bc = conservative_constants(&gamma, &d, 1.0).unwrap();
        let model = Model::new(
            1.0,
            Coefficient::Constant(0.0),
            gamma,
            d,
            Kernel::Constant(0.0),
            bc,
        )
        .unwrap();
        let grid = Grid::build(1.0, 2).unwrap();
        (model, grid)
    }

    #[test]
    fn hand_assembled_three_node_matrix() {
        let (model, grid) = pure_diffusion_n2();
        let g = GeneratorMatrix::assemble(&model, &grid).unwrap();
        let a = g.to_dense();
        let expected = [[-2.0, 2.0, 0.0], [4.0, -8.0, 4.0], [0.0, 2.0, -2.0]];
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(a[(i, j)], expected[i][j], "entry ({i}, {j})");
            }
        }
        assert_eq!(g.weights().as_slice(), &[1.0, 0.5, 1.0]);
    }

    #[test]
    fn apply_matches_first_column() {
        let (model, grid) = pure_diffusion_n2();
        let g = GeneratorMatrix::assemble(&model, &grid).unwrap();
        let y = g
            .apply(&PopulationState::from_vec(vec![1.0, 0.0, 0.0]))
            .unwrap();
        assert_eq!(y.as_slice(), &[-2.0, 4.0, 0.0]);
    }

    #[test]
    fn apply_rejects_wrong_length() {
        let (model, grid) = pure_diffusion_n2();
        let g = GeneratorMatrix::assemble(&model, &grid).unwrap();
        let err = g
            .apply(&PopulationState::from_vec(vec![1.0, 0.0]))
            .unwrap_err();
        assert!(matches!(
            err,
            Error::DimensionMismatch {
                expected: 3,
                got: 2
            }
        ));
    }

    fn birth_model(n: usize) -> (GeneratorMatrix, Model) {
        let gamma = Coefficient::Constant(0.0);
        let d = Coefficient::Constant(1.0);
        let bc = conservative_constants(&gamma, &d, 1.0).unwrap();
        let model = Model::new(
            1.0,
            Coefficient::Constant(0.0),
            gamma,
            d,
            Kernel::Constant(0.4),
            bc,
        )
        .unwrap();
        let grid = Grid::build(1.0, n).unwrap();
        let g = GeneratorMatrix::assemble(&model, &grid).unwrap();
        (g, model)
    }

    #[test]
    fn total_mass_weights_boundary_and_interior() {
        let (model, grid) = pure_diffusion_n2();
        let g = GeneratorMatrix::assemble(&model, &grid).unwrap();
        let u = PopulationState::from_vec(vec![2.0, 1.0, 3.0]);
        assert_eq!(g.total_mass(&u), 5.5);

        let (g10, _) = birth_model(10);
        let ones = PopulationState::constant(g10.grid(), 1.0);
        assert!((g10.total_mass(&ones) - 2.9).abs() < 1e-14);
    }

    #[test]
    fn birth_rate_matches_brute_force_double_sum() {
        let (g, model) = birth_model(10);
        let grid = *g.grid();
        let u = PopulationState::from_fn(&grid, |s| 1.0 + 0.5 * s);
        let (births, deaths) = g.birth_death_rates(&u).unwrap();
        assert_eq!(deaths, 0.0);

        // Independent quadrature: nested loops straight from the kernel.
        let mut expected = 0.0;
        for i in 0..grid.len() {
            let w = g.weights()[i];
            for j in 1..grid.n() {
                let beta = model
                    .recruitment()
                    .eval(grid.node(i), grid.node(j))
                    .unwrap();
                expected += w * grid.h() * beta * u[j];
            }
        }
        assert!((births - expected).abs() <= 1e-12 * expected.abs());

        let ones = PopulationState::constant(&grid, 1.0);
        let (b1, _) = g.birth_death_rates(&ones).unwrap();
        assert!((b1 - 0.36 * 2.9).abs() < 1e-12);
    }

    #[test]
    fn death_rate_weights_mortality() {
        let gamma = Coefficient::Constant(0.0);
        let d = Coefficient::Constant(1.0);
        let bc = conservative_constants(&gamma, &d, 1.0).unwrap();
        let model = Model::new(
            1.0,
            Coefficient::Constant(0.3),
            gamma,
            d,
            Kernel::Constant(0.0),
            bc,
        )
        .unwrap();
        let grid = Grid::build(1.0, 10).unwrap();
        let g = GeneratorMatrix::assemble(&model, &grid).unwrap();
        let ones = PopulationState::constant(&grid, 1.0);
        let (b, d_rate) = g.birth_death_rates(&ones).unwrap();
        assert_eq!(b, 0.0);
        assert!((d_rate - 0.3 * 2.9).abs() < 1e-14);
        assert!((g.omega_bound() + 0.3).abs() < 1e-14);
    }

    #[test]
    fn upwinding_keeps_off_diagonals_nonnegative_for_signed_growth() {
        // gamma changes sign at s = 0.5, so both upwind branches are hit.
        let gamma = Coefficient::Polynomial(vec![0.5, -1.0]);
        let d = Coefficient::Constant(0.05);
        let bc = conservative_constants(&gamma, &d, 1.0).unwrap();
        let model = Model::new(
            1.0,
            Coefficient::Constant(0.1),
            gamma,
            d,
            Kernel::Constant(0.2),
            bc,
        )
        .unwrap();
        let grid = Grid::build(1.0, 17).unwrap();
        let g = GeneratorMatrix::assemble(&model, &grid).unwrap();
        let a = g.to_dense();
        for i in 0..grid.len() {
            for j in 0..grid.len() {
                if i != j {
                    assert!(a[(i, j)] >= 0.0, "A[{i}][{j}] = {}", a[(i, j)]);
                }
            }
        }
    }

    #[test]
    fn assemble_rejects_inadmissible_models() {
        let gamma = Coefficient::Constant(0.0);
        let d = Coefficient::Constant(1.0);
        let bc = conservative_constants(&gamma, &d, 1.0).unwrap();
        let model = Model::new(
            1.0,
            Coefficient::Constant(-0.1),
            gamma,
            d,
            Kernel::Constant(0.0),
            bc,
        )
        .unwrap();
        let grid = Grid::build(1.0, 4).unwrap();
        let err = GeneratorMatrix::assemble(&model, &grid).unwrap_err();
        assert!(err.to_string().contains("mortality must be nonnegative"));
    }

    #[test]
    fn recruitment_bounds_for_constant_kernel() {
        let (g, _) = birth_model(10);
        // Row sum: 0.4 * h * 9 interior columns = 0.36.
        assert!((g.recruitment_row_bound() - 0.36).abs() < 1e-14);
        // Weighted column sum: 0.4 * (w_low + 9h + w_high) / h * h = 0.4 * 2.9.
        assert!((g.recruitment_weighted_column_bound() - 0.4 * 2.9).abs() < 1e-13);
    }

    #[test]
    fn constant_vector_spans_kernel_of_pure_diffusion() {
        // Variable diffusivity, no transport, no birth/death: a flat state
        // produces zero flux through every face, so A * 1 = 0 to roundoff.
        let gamma = Coefficient::Constant(0.0);
        let d = Coefficient::Polynomial(vec![0.2, 0.1]);
        let bc = conservative_constants(&gamma, &d, 1.0).unwrap();
        let model = Model::new(
            1.0,
            Coefficient::Constant(0.0),
            gamma,
            d,
            Kernel::Constant(0.0),
            bc,
        )
        .unwrap();
        let grid = Grid::build(1.0, 50).unwrap();
        let g = GeneratorMatrix::assemble(&model, &grid).unwrap();
        let ones = PopulationState::constant(&grid, 1.0);
        let y = g.apply(&ones).unwrap();
        let scale = 0.3 / grid.h() / grid.h();
        for (i, v) in y.as_slice().iter().enumerate() {
            assert!(v.abs() <= 1e-12 * scale, "row {i}: {v}");
        }
    }
}

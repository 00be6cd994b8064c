//! Random admissible models and states for stress testing.
//!
//! The model family is deliberately conservative-boundary only: that is the
//! regime with exact discrete mass bookkeeping, so randomized conservation,
//! positivity, and contraction checks have sharp expected answers. Growth
//! ramps down to zero at the maximum size, which is also what keeps the
//! boundary constants admissible.

use rand::Rng;

use crate::generator::GeneratorMatrix;
use crate::grid::Grid;
use crate::model::{conservative_constants, Coefficient, Kernel, Model};
use crate::state::PopulationState;

/// How much recruitment a sampled model carries.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BetaMode {
    /// No recruitment: the pure transport-diffusion-mortality part.
    Zero,
    /// Recruitment present in roughly half the draws.
    Sometimes,
    /// Recruitment bounded away from zero on the whole square.
    StrictlyPositive,
}

fn random_diffusion(rng: &mut impl Rng, m: f64) -> Coefficient {
    if rng.gen_bool(0.5) {
        Coefficient::Constant(rng.gen_range(0.05..0.6))
    } else {
        let slope: f64 = rng.gen_range(-0.3..0.3);
        let floor = 0.05 + (-slope * m).max(0.0);
        Coefficient::Polynomial(vec![rng.gen_range(floor..floor + 0.5), slope])
    }
}

fn random_growth(rng: &mut impl Rng, m: f64) -> Coefficient {
    let amplitude: f64 = rng.gen_range(0.0..0.7);
    if amplitude < 0.05 {
        Coefficient::Constant(0.0)
    } else {
        // gamma(s) = a (1 - s/m): positive transport that stalls at max size.
        Coefficient::Polynomial(vec![amplitude, -amplitude / m])
    }
}

fn random_mortality(rng: &mut impl Rng) -> Coefficient {
    if rng.gen_bool(0.5) {
        Coefficient::Constant(rng.gen_range(0.0..0.5))
    } else {
        Coefficient::Polynomial(vec![rng.gen_range(0.0..0.4), rng.gen_range(0.0..0.5)])
    }
}

fn positive_affine(rng: &mut impl Rng) -> Coefficient {
    Coefficient::Polynomial(vec![rng.gen_range(0.1..0.6), rng.gen_range(0.0..0.4)])
}

fn random_recruitment(rng: &mut impl Rng, mode: BetaMode) -> Kernel {
    let positive = match mode {
        BetaMode::Zero => false,
        BetaMode::Sometimes => rng.gen_bool(0.5),
        BetaMode::StrictlyPositive => true,
    };
    if !positive {
        Kernel::Constant(0.0)
    } else if rng.gen_bool(0.5) {
        Kernel::Constant(rng.gen_range(0.1..0.8))
    } else {
        Kernel::Separable {
            factor_s: positive_affine(rng),
            factor_y: positive_affine(rng),
        }
    }
}

/// Draws an admissible model with conservative boundary constants.
pub fn random_conservative_model(rng: &mut impl Rng, mode: BetaMode) -> Model {
    let m = rng.gen_range(0.6..1.6);
    let diffusion = random_diffusion(rng, m);
    let growth = random_growth(rng, m);
    let mortality = random_mortality(rng);
    let recruitment = random_recruitment(rng, mode);
    let bc = conservative_constants(&growth, &diffusion, m)
        .expect("ramp growth and positive diffusion always admit conservative constants");
    Model::new(m, mortality, growth, diffusion, recruitment, bc)
        .expect("sampled coefficients are admissible by construction")
}

/// Entrywise uniform draw from `[0, 1)`.
pub fn random_nonnegative_state(rng: &mut impl Rng, grid: &Grid) -> PopulationState {
    PopulationState::from_vec((0..grid.len()).map(|_| rng.gen_range(0.0..1.0)).collect())
}

/// Entrywise uniform draw from `[-1, 1)`.
pub fn random_signed_state(rng: &mut impl Rng, grid: &Grid) -> PopulationState {
    PopulationState::from_vec((0..grid.len()).map(|_| rng.gen_range(-1.0..1.0)).collect())
}

/// Step size with a factor-two margin inside the implicit-Euler positivity
/// gate: `dt` such that `dt * max(row bound, weighted column bound) = 1/2`.
/// Infinite when there is no recruitment (any step preserves positivity for
/// conservative models).
pub fn positivity_safe_dt(g: &GeneratorMatrix) -> f64 {
    let bound = g
        .recruitment_row_bound()
        .max(g.recruitment_weighted_column_bound());
    if bound <= 0.0 {
        f64::INFINITY
    } else {
        0.5 / bound
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evolution::{simulate, Scheme};
    use crate::model::validate;
    use crate::resolvent::omega_min;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn sampled_models_are_admissible_and_assemble() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let model = random_conservative_model(&mut rng, BetaMode::Sometimes);
            assert!(validate(&model).is_admissible());
            assert_eq!(omega_min(&model).unwrap(), 0.0);
            let n = rng.gen_range(4..=24);
            let grid = Grid::build(model.max_size(), n).unwrap();
            GeneratorMatrix::assemble(&model, &grid).unwrap();
        }
    }

    #[test]
    fn beta_modes_control_recruitment() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..10 {
            let zero = random_conservative_model(&mut rng, BetaMode::Zero);
            let pos = random_conservative_model(&mut rng, BetaMode::StrictlyPositive);
            let grid = Grid::build(zero.max_size(), 8).unwrap();
            assert!(GeneratorMatrix::assemble(&zero, &grid)
                .unwrap()
                .is_recruitment_free());
            let gp = Grid::build(pos.max_size(), 8).unwrap();
            let g = GeneratorMatrix::assemble(&pos, &gp).unwrap();
            assert!(g.recruitment_row_bound() > 0.0);
        }
    }

    #[test]
    fn same_seed_reproduces_the_generator() {
        let draw = |seed: u64| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let model = random_conservative_model(&mut rng, BetaMode::StrictlyPositive);
            let grid = Grid::build(model.max_size(), 10).unwrap();
            GeneratorMatrix::assemble(&model, &grid).unwrap().to_dense()
        };
        assert_eq!(draw(99), draw(99));
        assert_ne!(draw(99), draw(100));
    }

    #[test]
    fn safe_step_keeps_random_runs_nonnegative() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..5 {
            let model = random_conservative_model(&mut rng, BetaMode::StrictlyPositive);
            let grid = Grid::build(model.max_size(), 12).unwrap();
            let g = GeneratorMatrix::assemble(&model, &grid).unwrap();
            let dt = positivity_safe_dt(&g).min(0.1);
            let u0 = random_nonnegative_state(&mut rng, &grid);
            let traj = simulate(&g, &u0, dt, 50.0 * dt, Scheme::ImplicitEuler, 0).unwrap();
            assert!(
                traj.min_entry >= -1e-13,
                "positivity violated: {}",
                traj.min_entry
            );
        }
    }
}

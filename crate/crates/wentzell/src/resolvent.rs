//! Resolvent of the recruitment-free generator and its contraction
//! diagnostics.
//!
//! For the transport-diffusion-mortality part `A~` (no recruitment), the
//! shifted resolvent solve `(I - lambda (A~ - omega I)) u = h` is a weighted
//! contraction once `omega` clears a model-dependent threshold: every
//! weighted column sum of `A~ - omega I` is then nonpositive, which gives
//! `||u|| <= ||h||` in the weighted norm and entrywise nonnegativity of `u`
//! for nonnegative `h`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::generator::GeneratorMatrix;
use crate::grid::Grid;
use crate::linalg::{shifted_system, DenseSolver};
use crate::model::{norm_weights, Model};
use crate::sampling::{random_nonnegative_state, random_signed_state};
use crate::state::PopulationState;

/// Smallest shift for which the recruitment-free part is dissipative in the
/// weighted norm. Zero for conservative boundary constants with
/// nonnegative mortality; positive only when the boundary terms inject more
/// mass than the local losses remove.
pub fn omega_min(model: &Model) -> Result<f64> {
    let m = model.max_size();
    if model.boundary().is_conservative() {
        // The general expression telescopes to max(0, -mu(0), -mu(m));
        // evaluating it that way avoids cancellation noise around zero.
        let mu0 = model.mortality().eval(0.0)?;
        let mum = model.mortality().eval(m)?;
        return Ok(0.0_f64.max(-mu0).max(-mum));
    }
    let weights = norm_weights(model)?;
    let gamma0 = model.growth().eval(0.0)?;
    let gamma_m = model.growth().eval(m)?;
    let rho_low = model.boundary_loss_low()?;
    let rho_high = model.boundary_loss_high()?;
    Ok(0.0_f64
        .max(gamma0 / weights.low - rho_low)
        .max(-gamma_m / weights.high - rho_high))
}

/// Factored solve operator for `(I - lambda (A~ - omega I)) u = h` at fixed
/// `lambda` and `omega`; build once, apply to many right-hand sides.
pub struct ResolventOperator<'a> {
    g: &'a GeneratorMatrix,
    solver: DenseSolver,
}

impl<'a> ResolventOperator<'a> {
    pub fn new(g: &'a GeneratorMatrix, lambda: f64, omega: f64) -> Result<Self> {
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "resolvent parameter lambda = {lambda} must be positive and finite"
            )));
        }
        if !omega.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "shift omega = {omega} must be finite"
            )));
        }
        if !g.is_recruitment_free() {
            return Err(Error::InvalidArgument(
                "resolvent contraction applies to the recruitment-free part; \
                 assemble it with GeneratorMatrix::assemble_recruitment_free"
                    .into(),
            ));
        }
        let matrix = shifted_system(&g.to_dense(), 1.0 + lambda * omega, lambda);
        let solver = DenseSolver::factor(matrix, None)?;
        Ok(ResolventOperator { g, solver })
    }

    pub fn apply(&self, h: &PopulationState) -> Result<PopulationState> {
        if h.len() != self.g.size() {
            return Err(Error::DimensionMismatch {
                expected: self.g.size(),
                got: h.len(),
            });
        }
        Ok(PopulationState::new(self.solver.solve(h.values())?))
    }
}

/// One-shot convenience around [`ResolventOperator`].
pub fn solve_resolvent(
    g: &GeneratorMatrix,
    lambda: f64,
    omega: f64,
    h: &PopulationState,
) -> Result<PopulationState> {
    ResolventOperator::new(g, lambda, omega)?.apply(h)
}

/// Outcome of a randomized contraction sweep; see [`dissipativity_check`].
#[derive(Clone, Debug)]
pub struct DissipativityReport {
    pub omega: f64,
    pub omega_min: f64,
    /// The sweep ran below the provable threshold, so the contraction bound
    /// carries no guarantee; reported for information, never an error.
    pub below_omega_min: bool,
    pub lambdas: Vec<f64>,
    pub samples_per_lambda: usize,
    /// Largest `||u|| / ||h||` over all signed samples.
    pub max_ratio: f64,
    pub worst_lambda: f64,
    /// Nonnegative inputs whose solution dipped below `-1e-12`.
    pub positivity_violations: usize,
    /// Most negative solution entry seen across the nonnegative inputs.
    pub min_entry: f64,
    pub seed: u64,
}

/// Sweeps the resolvent over `lambdas` with `samples_per_lambda` random
/// signed states (norm ratios) and as many random nonnegative states
/// (positivity), factoring once per `lambda`. `omega = None` uses the
/// model's own threshold.
pub fn dissipativity_check(
    model: &Model,
    grid: &Grid,
    lambdas: &[f64],
    omega: Option<f64>,
    samples_per_lambda: usize,
    seed: u64,
) -> Result<DissipativityReport> {
    if lambdas.is_empty() {
        return Err(Error::InvalidArgument(
            "dissipativity sweep needs at least one lambda".into(),
        ));
    }
    if samples_per_lambda == 0 {
        return Err(Error::InvalidArgument(
            "dissipativity sweep needs at least one sample per lambda".into(),
        ));
    }
    let g = GeneratorMatrix::assemble_recruitment_free(model, grid)?;
    let threshold = omega_min(model)?;
    let omega = omega.unwrap_or(threshold);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = DissipativityReport {
        omega,
        omega_min: threshold,
        below_omega_min: omega < threshold,
        lambdas: lambdas.to_vec(),
        samples_per_lambda,
        max_ratio: 0.0,
        worst_lambda: lambdas[0],
        positivity_violations: 0,
        min_entry: 0.0,
        seed,
    };

    for &lambda in lambdas {
        let op = ResolventOperator::new(&g, lambda, omega)?;
        for _ in 0..samples_per_lambda {
            let h = random_signed_state(&mut rng, grid);
            let h_norm = g.weighted_norm(&h);
            if h_norm == 0.0 {
                continue;
            }
            let u = op.apply(&h)?;
            let ratio = g.weighted_norm(&u) / h_norm;
            if ratio > report.max_ratio {
                report.max_ratio = ratio;
                report.worst_lambda = lambda;
            }
        }
        for _ in 0..samples_per_lambda {
            let h = random_nonnegative_state(&mut rng, grid);
            let u = op.apply(&h)?;
            let low = u.min_entry();
            report.min_entry = report.min_entry.min(low);
            if low < -1e-12 {
                report.positivity_violations += 1;
            }
        }
    }
    Ok(report)
}

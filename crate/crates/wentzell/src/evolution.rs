//! Time integration of `u' = A u`.
//!
//! Implicit Euler is the workhorse: unconditionally stable, and it maps
//! nonnegative states to nonnegative states whenever `dt * s(A) < 1`
//! because the step matrix is then an inverse M-matrix. Crank-Nicolson
//! trades that positivity guarantee for second-order accuracy; it shares
//! the exact mass bookkeeping of the flux-form generator.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::generator::GeneratorMatrix;
use crate::linalg::{shifted_system, DenseSolver};
use crate::state::PopulationState;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scheme {
    ImplicitEuler,
    CrankNicolson,
}

/// Recorded run: masses and boundary values every step, full states at the
/// snapshot stride (plus the initial and final state).
#[derive(Clone, Debug)]
pub struct Trajectory {
    /// `t_k = k * dt`, one entry per step including `t = 0`.
    pub times: Vec<f64>,
    /// Weighted total mass at every step.
    pub masses: Vec<f64>,
    /// `(u(0), u(m))` at every step.
    pub boundary_series: Vec<(f64, f64)>,
    /// Step indices of the stored snapshots.
    pub snapshot_steps: Vec<usize>,
    pub snapshots: Vec<PopulationState>,
    /// Smallest entry seen at any step (including between snapshots).
    pub min_entry: f64,
}

impl Trajectory {
    pub fn final_state(&self) -> &PopulationState {
        self.snapshots
            .last()
            .expect("trajectory stores the final state")
    }

    /// Time of snapshot `k`.
    pub fn snapshot_time(&self, k: usize) -> f64 {
        self.times[self.snapshot_steps[k]]
    }
}

/// Number of whole steps covering `t_final`: `t_final / dt` rounded when it
/// is within relative 1e-9 of an integer, otherwise rounded up.
pub fn step_count(t_final: f64, dt: f64) -> usize {
    let ratio = t_final / dt;
    let rounded = ratio.round();
    let n = if (ratio - rounded).abs() <= 1e-9 * ratio.max(1.0) {
        rounded as usize
    } else {
        ratio.ceil() as usize
    };
    n.max(1)
}

/// Positivity caveats for a planned step configuration, to surface to users.
/// Empty when the scheme preserves nonnegativity under the usual gate.
pub fn step_warnings(g: &GeneratorMatrix, scheme: Scheme, dt: f64) -> Vec<String> {
    match scheme {
        Scheme::ImplicitEuler => {
            let bq = g.recruitment_row_bound();
            if dt * bq >= 1.0 {
                vec![format!(
                    "implicit Euler positivity is not guaranteed: dt * max recruitment row sum \
                     = {:.3e} >= 1",
                    dt * bq
                )]
            } else {
                Vec::new()
            }
        }
        Scheme::CrankNicolson => {
            vec![
                "Crank-Nicolson does not preserve nonnegativity; use implicit Euler when \
                  positivity matters"
                    .into(),
            ]
        }
    }
}

/// Step operator with a cached factorization; reuse it whenever `dt` is
/// constant across steps.
pub struct Stepper<'a> {
    g: &'a GeneratorMatrix,
    scheme: Scheme,
    dt: f64,
    solver: DenseSolver,
}

impl<'a> Stepper<'a> {
    pub fn new(g: &'a GeneratorMatrix, scheme: Scheme, dt: f64) -> Result<Self> {
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "time step dt = {dt} must be positive and finite"
            )));
        }
        let a = g.to_dense();
        let matrix = match scheme {
            Scheme::ImplicitEuler => shifted_system(&a, 1.0, dt),
            Scheme::CrankNicolson => shifted_system(&a, 1.0, 0.5 * dt),
        };
        let solver = DenseSolver::factor(matrix, Some(dt)).map_err(|e| match e {
            Error::SingularSystem { cond_estimate, .. } => Error::SingularSystem {
                cond_estimate,
                dt: Some(dt),
            },
            other => other,
        })?;
        Ok(Stepper {
            g,
            scheme,
            dt,
            solver,
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn step(&self, u: &PopulationState) -> Result<PopulationState> {
        if u.len() != self.g.size() {
            return Err(Error::DimensionMismatch {
                expected: self.g.size(),
                got: u.len(),
            });
        }
        let rhs: DVector<f64> = match self.scheme {
            Scheme::ImplicitEuler => u.values().clone(),
            Scheme::CrankNicolson => {
                // u + dt/2 * A u through the banded + dense action.
                let au = self.g.apply(u)?;
                u.values() + au.values() * (0.5 * self.dt)
            }
        };
        Ok(PopulationState::new(self.solver.solve(&rhs)?))
    }
}

/// One implicit-Euler step `(I - dt A) u_next = u`.
pub fn step_implicit_euler(
    g: &GeneratorMatrix,
    u: &PopulationState,
    dt: f64,
) -> Result<PopulationState> {
    Stepper::new(g, Scheme::ImplicitEuler, dt)?.step(u)
}

/// One Crank-Nicolson step `(I - dt/2 A) u_next = (I + dt/2 A) u`.
pub fn step_crank_nicolson(
    g: &GeneratorMatrix,
    u: &PopulationState,
    dt: f64,
) -> Result<PopulationState> {
    Stepper::new(g, Scheme::CrankNicolson, dt)?.step(u)
}

/// Integrates from `u0` over `[0, t_final]` with constant `dt` (factored
/// once). `snapshot_stride = 0` stores only the initial and final state.
pub fn simulate(
    g: &GeneratorMatrix,
    u0: &PopulationState,
    dt: f64,
    t_final: f64,
    scheme: Scheme,
    snapshot_stride: usize,
) -> Result<Trajectory> {
    if u0.len() != g.size() {
        return Err(Error::DimensionMismatch {
            expected: g.size(),
            got: u0.len(),
        });
    }
    if !(t_final >= dt) {
        return Err(Error::InvalidArgument(format!(
            "t_final = {t_final} must be at least one step dt = {dt}"
        )));
    }
    if !u0.is_finite() {
        return Err(Error::NonFinite { step: 0 });
    }
    let stepper = Stepper::new(g, scheme, dt)?;
    let n_steps = step_count(t_final, dt);

    let mut traj = Trajectory {
        times: Vec::with_capacity(n_steps + 1),
        masses: Vec::with_capacity(n_steps + 1),
        boundary_series: Vec::with_capacity(n_steps + 1),
        snapshot_steps: Vec::new(),
        snapshots: Vec::new(),
        min_entry: f64::INFINITY,
    };

    let record = |traj: &mut Trajectory, k: usize, u: &PopulationState| {
        traj.times.push(k as f64 * dt);
        traj.masses.push(g.total_mass(u));
        traj.boundary_series
            .push((u.boundary_low(), u.boundary_high()));
        traj.min_entry = traj.min_entry.min(u.min_entry());
        let wanted =
            k == 0 || k == n_steps || (snapshot_stride > 0 && k.is_multiple_of(snapshot_stride));
        if wanted {
            traj.snapshot_steps.push(k);
            traj.snapshots.push(u.clone());
        }
    };

    let mut u = u0.clone();
    record(&mut traj, 0, &u);
    for k in 1..=n_steps {
        u = stepper.step(&u)?;
        if !u.is_finite() {
            return Err(Error::NonFinite { step: k });
        }
        record(&mut traj, k, &u);
    }
    Ok(traj)
}

//! Dominant spectral data of the generator and asynchronous-growth
//! diagnostics.
//!
//! The generator is Metzler (nonnegative off-diagonal), so its rightmost
//! eigenvalue is real with a nonnegative eigenvector, and strictly positive
//! when the coupling graph is strongly connected. Inverse power iteration
//! on `(sigma I - A)^{-1}` with `sigma` above the Gershgorin bound converges
//! to exactly that pair: the transform maps the rightmost eigenvalue to the
//! one of strictly largest modulus.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::evolution::Trajectory;
use crate::generator::GeneratorMatrix;
use crate::linalg::{shifted_system, DenseSolver};
use crate::state::PopulationState;

/// Dominant eigendata: growth bound, normalized profiles, and the quality
/// of the iteration that produced them.
#[derive(Clone, Debug)]
pub struct SpectralResult {
    /// Rightmost eigenvalue (asymptotic exponential growth rate).
    pub malthus: f64,
    /// Eigenprofile scaled to unit weighted mass.
    pub right_vector: PopulationState,
    /// Left eigenvector, scaled so its Euclidean pairing with
    /// `right_vector` is one.
    pub left_vector: DVector<f64>,
    /// Weighted-norm residual `||A v - malthus v|| / ||v||`.
    pub residual: f64,
    pub iterations: usize,
    pub irreducible: bool,
}

fn power_iterate(
    solver: &DenseSolver,
    sigma: f64,
    size: usize,
    tol: f64,
    max_iter: usize,
    residual_of: impl Fn(&DVector<f64>, f64) -> f64,
) -> Result<(DVector<f64>, f64, usize)> {
    let mut v = DVector::from_element(size, 1.0);
    v /= v.norm();
    for iter in 1..=max_iter {
        let y = solver.solve(&v)?;
        let vy = v.dot(&y);
        if vy == 0.0 || !vy.is_finite() {
            return Err(Error::DegenerateIteration);
        }
        // Rayleigh quotient of the inverse: y ~ v / (sigma - malthus).
        let eigenvalue = sigma - v.dot(&v) / vy;
        let norm = y.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::DegenerateIteration);
        }
        v = y / norm;
        let residual = residual_of(&v, eigenvalue);
        if residual <= tol {
            return Ok((v, eigenvalue, iter));
        }
        if iter == max_iter {
            return Err(Error::NoConvergence {
                iterations: iter,
                residual,
            });
        }
    }
    unreachable!("loop either converges or errors at max_iter")
}

/// Computes the rightmost eigenvalue and its eigenpair by inverse power
/// iteration, gated on the weighted residual dropping below `tol`.
pub fn spectral_bound(g: &GeneratorMatrix, tol: f64, max_iter: usize) -> Result<SpectralResult> {
    if !(tol > 0.0) || max_iter == 0 {
        return Err(Error::InvalidArgument(
            "spectral iteration needs tol > 0 and at least one iteration".into(),
        ));
    }
    let a = g.to_dense();
    let sigma = g.omega_bound() + 1.0;
    let shifted = shifted_system(&a, sigma, 1.0);
    let solver = DenseSolver::factor(shifted.clone(), None)?;
    let solver_t = DenseSolver::factor(shifted.transpose(), None)?;
    let size = g.size();

    let (mut v, malthus, iterations) =
        power_iterate(&solver, sigma, size, tol, max_iter, |v, lambda| {
            let r = &a * v - v * lambda;
            g.weighted_norm(&PopulationState::new(r.clone()))
                / g.weighted_norm(&PopulationState::new(v.clone()))
        })?;

    // The Perron profile is signed-arbitrary out of the iteration; fix the
    // physical scale (unit total mass) when that is possible.
    let mass = g.weights().dot(&v);
    if mass.abs() > 1e-12 * g.weighted_norm(&PopulationState::new(v.clone())) {
        v /= mass;
    }

    let at = a.transpose();
    let (mut phi, _, _) = power_iterate(&solver_t, sigma, size, tol, max_iter, |w, lambda| {
        let r = &at * w - w * lambda;
        r.norm() / w.norm()
    })?;
    let pairing = phi.dot(&v);
    if pairing.abs() < 1e-300 {
        return Err(Error::DegenerateIteration);
    }
    phi /= pairing;

    let right_vector = PopulationState::new(v);
    let residual = {
        let r = &a * right_vector.values() - right_vector.values() * malthus;
        g.weighted_norm(&PopulationState::new(r)) / g.weighted_norm(&right_vector)
    };

    Ok(SpectralResult {
        malthus,
        right_vector,
        left_vector: phi,
        residual,
        iterations,
        irreducible: irreducibility_check(g),
    })
}

/// Strong connectivity of the positive-coupling graph (`A_ij > 0`, `i != j`):
/// forward and backward reachability from node 0. Guarantees a strictly
/// positive dominant eigenpair.
pub fn irreducibility_check(g: &GeneratorMatrix) -> bool {
    let a = g.to_dense();
    let n = g.size();
    let reaches_all = |transpose: bool| {
        let mut seen = vec![false; n];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut count = 1;
        while let Some(i) = stack.pop() {
            for j in 0..n {
                let entry = if transpose { a[(j, i)] } else { a[(i, j)] };
                if i != j && entry > 0.0 && !seen[j] {
                    seen[j] = true;
                    count += 1;
                    stack.push(j);
                }
            }
        }
        count == n
    };
    reaches_all(false) && reaches_all(true)
}

/// Least-squares slope of `log(mass)` over the trailing `window` fraction of
/// a trajectory: the empirical exponential growth rate.
pub fn growth_rate_from_trajectory(traj: &Trajectory, window: f64) -> Result<f64> {
    if !(window > 0.0 && window <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "window = {window} must lie in (0, 1]"
        )));
    }
    let total = traj.times.len();
    let start = ((1.0 - window) * total as f64).floor() as usize;
    let count = total - start;
    if count < 2 {
        return Err(Error::InvalidArgument(
            "growth-rate fit needs at least two trajectory points in the window".into(),
        ));
    }
    let mut st = 0.0;
    let mut sl = 0.0;
    for k in start..total {
        if !(traj.masses[k] > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "growth-rate fit needs positive masses, found {} at t = {}",
                traj.masses[k], traj.times[k]
            )));
        }
        st += traj.times[k];
        sl += traj.masses[k].ln();
    }
    let t_mean = st / count as f64;
    let l_mean = sl / count as f64;
    let mut cov = 0.0;
    let mut var = 0.0;
    for k in start..total {
        let dt = traj.times[k] - t_mean;
        cov += dt * (traj.masses[k].ln() - l_mean);
        var += dt * dt;
    }
    if var == 0.0 {
        return Err(Error::InvalidArgument(
            "growth-rate fit needs more than one distinct time".into(),
        ));
    }
    Ok(cov / var)
}

/// Distance of each mass-normalized snapshot to the dominant profile, in the
/// weighted norm. Decay of this sequence is the shape-convergence part of
/// asynchronous exponential growth.
pub fn aeg_diagnostic(
    traj: &Trajectory,
    spectral: &SpectralResult,
    g: &GeneratorMatrix,
) -> Result<Vec<(f64, f64)>> {
    let mut out = Vec::with_capacity(traj.snapshots.len());
    for (k, snap) in traj.snapshots.iter().enumerate() {
        let mass = g.total_mass(snap);
        if !(mass > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "snapshot at t = {} has nonpositive mass {mass}; cannot normalize",
                traj.snapshot_time(k)
            )));
        }
        let diff = snap.values() / mass - spectral.right_vector.values();
        out.push((
            traj.snapshot_time(k),
            g.weighted_norm(&PopulationState::new(diff)),
        ));
    }
    Ok(out)
}

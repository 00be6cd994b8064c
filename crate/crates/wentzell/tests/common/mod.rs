//! Independent oracles for the integration suites.
//!
//! The dense assembly below rebuilds the generator straight from the flux
//! formulas, sharing no code with the library's banded assembly, so the two
//! can check each other. Eigenvalues come from the general-purpose complex
//! eigensolver rather than the library's inverse iteration.

// Each test target compiles this module separately and uses a subset of it.
#![allow(dead_code)]

use nalgebra::DMatrix;
use wentzell::{Grid, Model};

/// Row-by-row dense assembly from the face-flux definition.
///
/// Face k+1/2 carries `F = gamma_f * u_up - d_f * (u_{k+1} - u_k) / h`, so
/// its linear coefficients are `max(gamma_f, 0) + d_f/h` on `u_k` and
/// `min(gamma_f, 0) - d_f/h` on `u_{k+1}`. Row 0 subtracts face 1/2 whole,
/// row N adds face N-1/2 whole, interior rows take flux differences over h;
/// every row then loses `mu` on the diagonal and gains the recruitment
/// quadrature over interior columns.
pub fn dense_assembly(model: &Model, grid: &Grid) -> DMatrix<f64> {
    let n = grid.n();
    let h = grid.h();
    let mut a = DMatrix::zeros(n + 1, n + 1);
    let gamma = |s: f64| model.growth().eval(s).unwrap();
    let diff = |s: f64| model.diffusion().eval(s).unwrap();
    let mu = |s: f64| model.mortality().eval(s).unwrap();

    for k in 0..n {
        let f = grid.face(k);
        let gf = gamma(f);
        let df = diff(f);
        let on_left = gf.max(0.0) + df / h;
        let on_right = gf.min(0.0) - df / h;
        let row_k_scale = if k == 0 { 1.0 } else { 1.0 / h };
        a[(k, k)] -= row_k_scale * on_left;
        a[(k, k + 1)] -= row_k_scale * on_right;
        let row_k1_scale = if k + 1 == n { 1.0 } else { 1.0 / h };
        a[(k + 1, k)] += row_k1_scale * on_left;
        a[(k + 1, k + 1)] += row_k1_scale * on_right;
    }
    for i in 0..=n {
        a[(i, i)] -= mu(grid.node(i));
        for j in 1..n {
            a[(i, j)] += h * model
                .recruitment()
                .eval(grid.node(i), grid.node(j))
                .unwrap();
        }
    }
    a
}

/// All eigenvalue real parts, descending.
pub fn real_parts_descending(a: &DMatrix<f64>) -> Vec<f64> {
    let mut re: Vec<f64> = a
        .clone()
        .complex_eigenvalues()
        .iter()
        .map(|z| z.re)
        .collect();
    re.sort_by(|x, y| y.partial_cmp(x).unwrap());
    re
}

/// Rightmost eigenvalue real part via the dense eigensolver.
pub fn max_real_eigenvalue(a: &DMatrix<f64>) -> f64 {
    real_parts_descending(a)[0]
}

/// Spectral gap `lambda_1 - max(Re lambda_k, k >= 2)`; the decay rate of the
/// shape-convergence distance.
pub fn spectral_gap(a: &DMatrix<f64>) -> f64 {
    let re = real_parts_descending(a);
    re[0] - re[1]
}

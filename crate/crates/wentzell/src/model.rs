//! Continuous model data: size-dependent coefficients, the recruitment
//! kernel, boundary constants and the weighted state norm.
//!
//! A model lives on the size interval `[0, m]`. Individuals grow with rate
//! `gamma(s)`, spread in size with diffusivity `d(s)`, die with rate `mu(s)`
//! and produce offspring of size `s` at rate `beta(s, y)` per parent of size
//! `y`. The two endpoints carry their own population mass, coupled to the
//! interior through dynamic (Wentzell-Robin) boundary conditions that are
//! parameterized by four constants `b0, bm, c0, cm`.

use crate::error::{Error, Result};

/// Number of sample points used for admissibility checks on `[0, m]`.
///
/// Dense sampling instead of symbolic positivity: simple, predictable, and
/// any real-world coefficient that is negative only between samples is
/// already numerically indistinguishable from inadmissible.
const VALIDATION_SAMPLES: usize = 257;

/// Scalar coefficient of the size variable, evaluable with a derivative.
#[derive(Clone, Debug, PartialEq)]
pub enum Coefficient {
    Constant(f64),
    /// Coefficients in ascending degree order: `a[0] + a[1] s + a[2] s^2 + ...`
    Polynomial(Vec<f64>),
    /// Piecewise-linear interpolant over strictly increasing breakpoints.
    Table(Vec<(f64, f64)>),
}

impl Coefficient {
    /// Builds a piecewise-linear table, rejecting unusable breakpoint data.
    pub fn table(points: Vec<(f64, f64)>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::InvalidTable(
                "a table needs at least two breakpoints".into(),
            ));
        }
        for (x, v) in &points {
            if !x.is_finite() || !v.is_finite() {
                return Err(Error::InvalidTable("non-finite table entry".into()));
            }
        }
        if points.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(Error::InvalidTable(
                "breakpoints must be strictly increasing".into(),
            ));
        }
        Ok(Coefficient::Table(points))
    }

    /// Index of the segment containing `s`, for a table that covers `s`.
    fn segment(points: &[(f64, f64)], s: f64) -> Result<usize> {
        let first = points[0].0;
        let last = points[points.len() - 1].0;
        if !s.is_finite() || s < first || s > last {
            return Err(Error::Domain { s });
        }
        // partition_point gives the first breakpoint strictly above s.
        let k = points.partition_point(|&(x, _)| x <= s);
        Ok(k.saturating_sub(1).min(points.len() - 2))
    }

    /// Value at `s`. Table lookups return the stored value exactly at a
    /// breakpoint and error outside the covered range.
    pub fn eval(&self, s: f64) -> Result<f64> {
        if !s.is_finite() {
            return Err(Error::Domain { s });
        }
        match self {
            Coefficient::Constant(c) => Ok(*c),
            Coefficient::Polynomial(a) => Ok(a.iter().rev().fold(0.0, |acc, &c| acc * s + c)),
            Coefficient::Table(points) => {
                let k = Self::segment(points, s)?;
                let (x0, v0) = points[k];
                let (x1, v1) = points[k + 1];
                if s == x0 {
                    return Ok(v0);
                }
                if s == x1 {
                    return Ok(v1);
                }
                Ok(v0 + (s - x0) * ((v1 - v0) / (x1 - x0)))
            }
        }
    }

    /// Derivative at `s`. For tables this is the slope of the containing
    /// segment; at an interior breakpoint the right segment wins, at the
    /// last breakpoint the left one (so the covered range has a one-sided
    /// derivative at both ends).
    pub fn eval_deriv(&self, s: f64) -> Result<f64> {
        if !s.is_finite() {
            return Err(Error::Domain { s });
        }
        match self {
            Coefficient::Constant(_) => Ok(0.0),
            Coefficient::Polynomial(a) => {
                let mut acc = 0.0;
                for k in (1..a.len()).rev() {
                    acc = acc * s + a[k] * k as f64;
                }
                Ok(acc)
            }
            Coefficient::Table(points) => {
                let k = Self::segment(points, s)?;
                let (x0, v0) = points[k];
                let (x1, v1) = points[k + 1];
                // `segment` already resolves an interior breakpoint to the
                // right segment and the last breakpoint to the left one.
                let _ = (x0, v0);
                Ok((v1 - v0) / (x1 - x0))
            }
        }
    }
}

/// Recruitment kernel `beta(s, y)`: rate of offspring of size `s` produced
/// per parent of size `y`.
#[derive(Clone, Debug, PartialEq)]
pub enum Kernel {
    Constant(f64),
    /// `beta(s, y) = factor_s(s) * factor_y(y)`.
    Separable {
        factor_s: Coefficient,
        factor_y: Coefficient,
    },
    /// Bilinear interpolation of `values[i][j] = beta(s_nodes[i], y_nodes[j])`.
    Grid {
        s_nodes: Vec<f64>,
        y_nodes: Vec<f64>,
        values: Vec<Vec<f64>>,
    },
}

impl Kernel {
    /// Builds a gridded kernel, rejecting mismatched or unordered data.
    pub fn grid(s_nodes: Vec<f64>, y_nodes: Vec<f64>, values: Vec<Vec<f64>>) -> Result<Self> {
        for nodes in [&s_nodes, &y_nodes] {
            if nodes.len() < 2 {
                return Err(Error::InvalidTable(
                    "kernel grid needs at least two nodes per axis".into(),
                ));
            }
            if nodes.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::InvalidTable(
                    "kernel grid nodes must be strictly increasing".into(),
                ));
            }
        }
        if values.len() != s_nodes.len() || values.iter().any(|row| row.len() != y_nodes.len()) {
            return Err(Error::InvalidTable(
                "kernel value matrix does not match the node counts".into(),
            ));
        }
        if values.iter().any(|row| row.iter().any(|v| !v.is_finite())) {
            return Err(Error::InvalidTable("non-finite kernel value".into()));
        }
        Ok(Kernel::Grid {
            s_nodes,
            y_nodes,
            values,
        })
    }

    fn bracket(nodes: &[f64], x: f64) -> Result<usize> {
        if !x.is_finite() || x < nodes[0] || x > nodes[nodes.len() - 1] {
            return Err(Error::Domain { s: x });
        }
        let k = nodes.partition_point(|&n| n <= x);
        Ok(k.saturating_sub(1).min(nodes.len() - 2))
    }

    pub fn eval(&self, s: f64, y: f64) -> Result<f64> {
        match self {
            Kernel::Constant(c) => {
                if !s.is_finite() {
                    return Err(Error::Domain { s });
                }
                if !y.is_finite() {
                    return Err(Error::Domain { s: y });
                }
                Ok(*c)
            }
            Kernel::Separable { factor_s, factor_y } => Ok(factor_s.eval(s)? * factor_y.eval(y)?),
            Kernel::Grid {
                s_nodes,
                y_nodes,
                values,
            } => {
                let i = Self::bracket(s_nodes, s)?;
                let j = Self::bracket(y_nodes, y)?;
                let ts = (s - s_nodes[i]) / (s_nodes[i + 1] - s_nodes[i]);
                let ty = (y - y_nodes[j]) / (y_nodes[j + 1] - y_nodes[j]);
                let v00 = values[i][j];
                let v01 = values[i][j + 1];
                let v10 = values[i + 1][j];
                let v11 = values[i + 1][j + 1];
                Ok(v00 * (1.0 - ts) * (1.0 - ty)
                    + v10 * ts * (1.0 - ty)
                    + v01 * (1.0 - ts) * ty
                    + v11 * ts * ty)
            }
        }
    }

    /// Structurally zero kernel (no recruitment term at all).
    pub fn is_zero(&self) -> bool {
        matches!(self, Kernel::Constant(c) if *c == 0.0)
    }
}

/// The four constants of the dynamic boundary conditions.
///
/// `conservative` records that the constants were produced by
/// [`conservative_constants`], in which case the boundary mass weights are
/// exactly one and total population is invariant when `beta = mu = 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundaryConstants {
    pub b0: f64,
    pub bm: f64,
    pub c0: f64,
    pub cm: f64,
    conservative: bool,
}

impl BoundaryConstants {
    /// Explicit constants; signs are checked here, the coupling with the
    /// growth coefficient (`b0 > gamma(0)`, `gamma(m) + bm > 0`) is checked
    /// by [`validate`] and [`norm_weights`] where `gamma` is known.
    pub fn explicit(b0: f64, bm: f64, c0: f64, cm: f64) -> Result<Self> {
        let mut bad = Vec::new();
        if !(b0 > 0.0) {
            bad.push(format!("b0 = {b0} must be positive"));
        }
        if !(bm > 0.0) {
            bad.push(format!("bm = {bm} must be positive"));
        }
        if !(c0 >= 0.0) {
            bad.push(format!("c0 = {c0} must be nonnegative"));
        }
        if !(cm >= 0.0) {
            bad.push(format!("cm = {cm} must be nonnegative"));
        }
        if !bad.is_empty() {
            return Err(Error::Admissibility(bad.join("; ")));
        }
        Ok(BoundaryConstants {
            b0,
            bm,
            c0,
            cm,
            conservative: false,
        })
    }

    pub fn is_conservative(&self) -> bool {
        self.conservative
    }
}

/// Boundary constants that make total population invariant in the absence
/// of recruitment and mortality:
/// `b0 = d(0) + gamma(0)`, `bm = d(m) - gamma(m)`,
/// `c0 = gamma(0) - gamma'(0)`, `cm = -gamma(m) - gamma'(m)`.
pub fn conservative_constants(
    gamma: &Coefficient,
    d: &Coefficient,
    m: f64,
) -> Result<BoundaryConstants> {
    if !(m > 0.0) || !m.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "maximum size m = {m} must be positive and finite"
        )));
    }
    let g0 = gamma.eval(0.0)?;
    let gm = gamma.eval(m)?;
    let dg0 = gamma.eval_deriv(0.0)?;
    let dgm = gamma.eval_deriv(m)?;
    let d0 = d.eval(0.0)?;
    let dm = d.eval(m)?;

    let b0 = d0 + g0;
    let bm = dm - gm;
    let c0 = g0 - dg0;
    let cm = -gm - dgm;

    let mut bad = Vec::new();
    if !(b0 > 0.0) {
        bad.push(format!("b0 = d(0) + gamma(0) = {b0} must be positive"));
    }
    if !(bm > 0.0) {
        bad.push(format!("bm = d(m) - gamma(m) = {bm} must be positive"));
    }
    if !(c0 >= 0.0) {
        bad.push(format!(
            "c0 = gamma(0) - gamma'(0) = {c0} must be nonnegative"
        ));
    }
    if !(cm >= 0.0) {
        bad.push(format!(
            "cm = -gamma(m) - gamma'(m) = {cm} must be nonnegative"
        ));
    }
    if !bad.is_empty() {
        return Err(Error::Admissibility(bad.join("; ")));
    }
    Ok(BoundaryConstants {
        b0,
        bm,
        c0,
        cm,
        conservative: true,
    })
}

/// Weights of the two boundary atoms in the state norm
/// `|u| = integral |u| ds + low * |u(0)| + high * |u(m)|`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NormWeights {
    pub low: f64,
    pub high: f64,
}

/// Boundary weights `d(0) / (b0 - gamma(0))` and `d(m) / (gamma(m) + bm)`.
///
/// For conservative constants both denominators equal the diffusivity at the
/// endpoint algebraically, so the weights are returned as exactly one rather
/// than recomputed through the cancellation.
pub fn norm_weights(model: &Model) -> Result<NormWeights> {
    if model.boundary.conservative {
        return Ok(NormWeights {
            low: 1.0,
            high: 1.0,
        });
    }
    let g0 = model.growth.eval(0.0)?;
    let gm = model.growth.eval(model.max_size)?;
    let d0 = model.diffusion.eval(0.0)?;
    let dm = model.diffusion.eval(model.max_size)?;
    let den0 = model.boundary.b0 - g0;
    let denm = gm + model.boundary.bm;
    if !(den0 > 0.0) {
        return Err(Error::Admissibility(format!(
            "b0 - gamma(0) = {den0} must be positive"
        )));
    }
    if !(denm > 0.0) {
        return Err(Error::Admissibility(format!(
            "gamma(m) + bm = {denm} must be positive"
        )));
    }
    let low = d0 / den0;
    let high = dm / denm;
    if !(low > 0.0) || !(high > 0.0) {
        return Err(Error::Admissibility(
            "norm weights must be positive (diffusivity must be positive at the endpoints)".into(),
        ));
    }
    Ok(NormWeights { low, high })
}

/// A complete size-structured model on `[0, max_size]`.
#[derive(Clone, Debug)]
pub struct Model {
    max_size: f64,
    mortality: Coefficient,
    growth: Coefficient,
    diffusion: Coefficient,
    recruitment: Kernel,
    boundary: BoundaryConstants,
    /// Zero-order loss rate in the boundary equation at `s = 0`:
    /// `mu(0) + c0 + gamma'(0)`. `None` when the endpoint is not evaluable.
    boundary_loss_low: Option<f64>,
    /// Same at `s = m`: `mu(m) + cm + gamma'(m)`.
    boundary_loss_high: Option<f64>,
}

impl Model {
    /// Builds a model. Deliberately permissive: sign constraints are reported
    /// by [`validate`], so that inadmissible models can be constructed and
    /// diagnosed instead of panicking at the door.
    pub fn new(
        max_size: f64,
        mortality: Coefficient,
        growth: Coefficient,
        diffusion: Coefficient,
        recruitment: Kernel,
        boundary: BoundaryConstants,
    ) -> Result<Self> {
        if !(max_size > 0.0) || !max_size.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "maximum size m = {max_size} must be positive and finite"
            )));
        }
        let loss = |at: f64, c: f64| -> Option<f64> {
            let mu = mortality.eval(at).ok()?;
            let dg = growth.eval_deriv(at).ok()?;
            Some(mu + c + dg)
        };
        let boundary_loss_low = loss(0.0, boundary.c0);
        let boundary_loss_high = loss(max_size, boundary.cm);
        Ok(Model {
            max_size,
            mortality,
            growth,
            diffusion,
            recruitment,
            boundary,
            boundary_loss_low,
            boundary_loss_high,
        })
    }

    pub fn max_size(&self) -> f64 {
        self.max_size
    }
    pub fn mortality(&self) -> &Coefficient {
        &self.mortality
    }
    pub fn growth(&self) -> &Coefficient {
        &self.growth
    }
    pub fn diffusion(&self) -> &Coefficient {
        &self.diffusion
    }
    pub fn recruitment(&self) -> &Kernel {
        &self.recruitment
    }
    pub fn boundary(&self) -> &BoundaryConstants {
        &self.boundary
    }

    /// Zero-order loss rate of the boundary equation at `s = 0`.
    pub fn boundary_loss_low(&self) -> Result<f64> {
        self.boundary_loss_low
            .ok_or_else(|| Error::Admissibility("coefficients are not evaluable at s = 0".into()))
    }

    /// Zero-order loss rate of the boundary equation at `s = m`.
    pub fn boundary_loss_high(&self) -> Result<f64> {
        self.boundary_loss_high
            .ok_or_else(|| Error::Admissibility("coefficients are not evaluable at s = m".into()))
    }

    /// The same model with recruitment removed (`beta = 0`).
    pub fn without_recruitment(&self) -> Model {
        let mut m = self.clone();
        m.recruitment = Kernel::Constant(0.0);
        m
    }

    /// The same model with recruitment and mortality removed; with
    /// conservative boundary constants its total population is invariant.
    pub fn without_birth_death(&self) -> Model {
        let mut m = self.clone();
        m.recruitment = Kernel::Constant(0.0);
        m.mortality = Coefficient::Constant(0.0);
        m
    }
}

/// Outcome of admissibility validation: hard violations and informational
/// warnings (a warning never blocks assembly).
#[derive(Clone, Debug, Default)]
pub struct ValidationReport {
    pub violations: Vec<String>,
    pub warnings: Vec<String>,
}

impl ValidationReport {
    pub fn is_admissible(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks sign constraints on a dense sample grid and the boundary-constant
/// inequalities. Returns a report instead of erroring so every violated
/// constraint can be listed at once.
pub fn validate(model: &Model) -> ValidationReport {
    let mut report = ValidationReport::default();
    let m = model.max_size;
    let samples: Vec<f64> = (0..VALIDATION_SAMPLES)
        .map(|k| {
            if k == VALIDATION_SAMPLES - 1 {
                m
            } else {
                m * k as f64 / (VALIDATION_SAMPLES - 1) as f64
            }
        })
        .collect();

    // One message per constraint, carrying the first offending sample.
    let mut first_bad_d: Option<(f64, f64)> = None;
    let mut first_bad_mu: Option<(f64, f64)> = None;
    let mut eval_failure: Option<String> = None;
    for &s in &samples {
        match model.diffusion.eval(s) {
            Ok(v) if v > 0.0 => {}
            Ok(v) => {
                first_bad_d.get_or_insert((s, v));
            }
            Err(e) => {
                eval_failure.get_or_insert(format!("diffusion not evaluable at s = {s}: {e}"));
            }
        }
        match model.mortality.eval(s) {
            Ok(v) if v >= 0.0 => {}
            Ok(v) => {
                first_bad_mu.get_or_insert((s, v));
            }
            Err(e) => {
                eval_failure.get_or_insert(format!("mortality not evaluable at s = {s}: {e}"));
            }
        }
        if let Err(e) = model.growth.eval(s) {
            eval_failure.get_or_insert(format!("growth not evaluable at s = {s}: {e}"));
        }
    }
    if let Some((s, v)) = first_bad_d {
        report.violations.push(format!(
            "diffusion must be strictly positive (d({s:.6}) = {v})"
        ));
    }
    if let Some((s, v)) = first_bad_mu {
        report
            .violations
            .push(format!("mortality must be nonnegative (mu({s:.6}) = {v})"));
    }

    // Kernel sign on the sample grid; also watch for offspring at least as
    // large as their parent, which is biologically suspect but allowed.
    let mut first_bad_beta: Option<(f64, f64, f64)> = None;
    let mut oversized_offspring = false;
    if !model.recruitment.is_zero() {
        for &s in &samples {
            for &y in &samples {
                match model.recruitment.eval(s, y) {
                    Ok(v) if v >= 0.0 => {
                        if v > 0.0 && s >= y {
                            oversized_offspring = true;
                        }
                    }
                    Ok(v) => {
                        first_bad_beta.get_or_insert((s, y, v));
                    }
                    Err(e) => {
                        eval_failure.get_or_insert(format!(
                            "recruitment kernel not evaluable at ({s}, {y}): {e}"
                        ));
                    }
                }
            }
        }
    }
    if let Some((s, y, v)) = first_bad_beta {
        report.violations.push(format!(
            "recruitment kernel must be nonnegative (beta({s:.6}, {y:.6}) = {v})"
        ));
    }
    if oversized_offspring {
        report.warnings.push(
            "recruitment kernel is positive for offspring at least as large as the parent \
             (beta(s, y) > 0 with s >= y)"
                .into(),
        );
    }
    if let Some(msg) = eval_failure {
        report.violations.push(msg);
    }

    let bc = &model.boundary;
    if !(bc.b0 > 0.0) {
        report
            .violations
            .push(format!("b0 = {} must be positive", bc.b0));
    }
    if !(bc.bm > 0.0) {
        report
            .violations
            .push(format!("bm = {} must be positive", bc.bm));
    }
    if !(bc.c0 >= 0.0) {
        report
            .violations
            .push(format!("c0 = {} must be nonnegative", bc.c0));
    }
    if !(bc.cm >= 0.0) {
        report
            .violations
            .push(format!("cm = {} must be nonnegative", bc.cm));
    }

    // Norm-weight denominators couple the constants to the growth rate.
    if let (Ok(g0), Ok(gm)) = (model.growth.eval(0.0), model.growth.eval(m)) {
        if !(bc.b0 - g0 > 0.0) {
            report
                .violations
                .push(format!("b0 - gamma(0) = {} must be positive", bc.b0 - g0));
        }
        if !(gm + bc.bm > 0.0) {
            report
                .violations
                .push(format!("gamma(m) + bm = {} must be positive", gm + bc.bm));
        }
    }

    report
}

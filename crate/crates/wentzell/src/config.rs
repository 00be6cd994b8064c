//! Declarative run configuration.
//!
//! A run file has four TOML sections: `[model]` (coefficients, kernel,
//! boundary constants), `[grid]` (resolution), `[run]` (scheme and horizon),
//! and `[initial]` (starting profile). Parsing is strict: unknown keys are
//! rejected, `boundary = "conservative"` is resolved immediately, and the
//! model must pass admissibility before a config is handed out.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolution::Scheme;
use crate::grid::Grid;
use crate::model::{
    conservative_constants, validate, BoundaryConstants, Coefficient, Kernel, Model,
};
use crate::state::PopulationState;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoefficientSpec {
    #[serde(rename = "type")]
    kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    coefficients: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    s: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    values: Option<Vec<f64>>,
}

impl CoefficientSpec {
    pub fn constant(value: f64) -> Self {
        CoefficientSpec {
            kind: "constant".into(),
            value: Some(value),
            coefficients: None,
            s: None,
            values: None,
        }
    }

    fn reject_extras(&self, context: &str, allowed: &[&str]) -> Result<()> {
        let mut stray = Vec::new();
        if self.value.is_some() && !allowed.contains(&"value") {
            stray.push("value");
        }
        if self.coefficients.is_some() && !allowed.contains(&"coefficients") {
            stray.push("coefficients");
        }
        if self.s.is_some() && !allowed.contains(&"s") {
            stray.push("s");
        }
        if self.values.is_some() && !allowed.contains(&"values") {
            stray.push("values");
        }
        if stray.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(format!(
                "{context}: keys {stray:?} do not belong to type \"{}\"",
                self.kind
            )))
        }
    }

    fn build(&self, context: &str) -> Result<Coefficient> {
        match self.kind.as_str() {
            "constant" => {
                self.reject_extras(context, &["value"])?;
                let v = self.value.ok_or_else(|| {
                    Error::Config(format!("{context}: constant coefficient needs `value`"))
                })?;
                Ok(Coefficient::Constant(v))
            }
            "polynomial" => {
                self.reject_extras(context, &["coefficients"])?;
                let c = self.coefficients.clone().ok_or_else(|| {
                    Error::Config(format!(
                        "{context}: polynomial coefficient needs `coefficients` \
                         (ascending powers)"
                    ))
                })?;
                Ok(Coefficient::Polynomial(c))
            }
            "table" => {
                self.reject_extras(context, &["s", "values"])?;
                let (s, values) = match (&self.s, &self.values) {
                    (Some(s), Some(v)) => (s, v),
                    _ => {
                        return Err(Error::Config(format!(
                            "{context}: table coefficient needs `s` and `values`"
                        )))
                    }
                };
                if s.len() != values.len() {
                    return Err(Error::Config(format!(
                        "{context}: table has {} breakpoints but {} values",
                        s.len(),
                        values.len()
                    )));
                }
                Coefficient::table(s.iter().copied().zip(values.iter().copied()).collect())
                    .map_err(|e| Error::Config(format!("{context}: {e}")))
            }
            other => Err(Error::Config(format!(
                "{context}: unknown coefficient type \"{other}\" \
                 (expected constant, polynomial, or table)"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelSpec {
    #[serde(rename = "type")]
    kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    factor_s: Option<CoefficientSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    factor_y: Option<CoefficientSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    s: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    y: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    values: Option<Vec<Vec<f64>>>,
}

impl KernelSpec {
    pub fn constant(value: f64) -> Self {
        KernelSpec {
            kind: "constant".into(),
            value: Some(value),
            factor_s: None,
            factor_y: None,
            s: None,
            y: None,
            values: None,
        }
    }

    fn build(&self) -> Result<Kernel> {
        let context = "model.beta";
        let present: Vec<&str> = [
            ("value", self.value.is_some()),
            ("factor_s", self.factor_s.is_some()),
            ("factor_y", self.factor_y.is_some()),
            ("s", self.s.is_some()),
            ("y", self.y.is_some()),
            ("values", self.values.is_some()),
        ]
        .iter()
        .filter_map(|&(k, set)| set.then_some(k))
        .collect();
        let expect = |wanted: &[&str]| -> Result<()> {
            if present == wanted {
                Ok(())
            } else {
                Err(Error::Config(format!(
                    "{context}: type \"{}\" takes keys {wanted:?}, found {present:?}",
                    self.kind
                )))
            }
        };
        match self.kind.as_str() {
            "constant" => {
                expect(&["value"])?;
                Ok(Kernel::Constant(self.value.unwrap()))
            }
            "separable" => {
                expect(&["factor_s", "factor_y"])?;
                Ok(Kernel::Separable {
                    factor_s: self
                        .factor_s
                        .as_ref()
                        .unwrap()
                        .build("model.beta.factor_s")?,
                    factor_y: self
                        .factor_y
                        .as_ref()
                        .unwrap()
                        .build("model.beta.factor_y")?,
                })
            }
            "grid" => {
                expect(&["s", "y", "values"])?;
                Kernel::grid(
                    self.s.clone().unwrap(),
                    self.y.clone().unwrap(),
                    self.values.clone().unwrap(),
                )
                .map_err(|e| Error::Config(format!("{context}: {e}")))
            }
            other => Err(Error::Config(format!(
                "{context}: unknown kernel type \"{other}\" \
                 (expected constant, separable, or grid)"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExplicitBoundary {
    b0: f64,
    bm: f64,
    c0: f64,
    cm: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BoundarySpec {
    Named(String),
    Explicit(ExplicitBoundary),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    m: f64,
    boundary: BoundarySpec,
    mu: CoefficientSpec,
    gamma: CoefficientSpec,
    d: CoefficientSpec,
    beta: KernelSpec,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    #[serde(rename = "N", alias = "n")]
    n: usize,
}

fn default_scheme() -> String {
    "implicit-euler".into()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    #[serde(default = "default_scheme")]
    scheme: String,
    dt: f64,
    #[serde(rename = "T", alias = "t_final")]
    t_final: f64,
    #[serde(default)]
    snapshot_stride: usize,
    #[serde(default)]
    seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialSection {
    #[serde(rename = "type")]
    kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    center: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    width: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    amplitude: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    s: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    values: Option<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    model: ModelSection,
    grid: GridSection,
    run: RunSection,
    initial: InitialSection,
}

impl RunConfig {
    pub fn model(&self) -> Result<Model> {
        let m = self.model.m;
        let gamma = self.model.gamma.build("model.gamma")?;
        let d = self.model.d.build("model.d")?;
        let boundary = match &self.model.boundary {
            BoundarySpec::Named(name) if name == "conservative" => {
                conservative_constants(&gamma, &d, m)?
            }
            BoundarySpec::Named(name) => {
                return Err(Error::Config(format!(
                    "model.boundary: unknown name \"{name}\" \
                     (expected \"conservative\" or an explicit table)"
                )))
            }
            BoundarySpec::Explicit(e) => BoundaryConstants::explicit(e.b0, e.bm, e.c0, e.cm)?,
        };
        Model::new(
            m,
            self.model.mu.build("model.mu")?,
            gamma,
            d,
            self.model.beta.build()?,
            boundary,
        )
    }

    pub fn grid(&self) -> Result<Grid> {
        Grid::build(self.model.m, self.grid.n)
    }

    pub fn scheme(&self) -> Result<Scheme> {
        match self.run.scheme.as_str() {
            "implicit-euler" => Ok(Scheme::ImplicitEuler),
            "crank-nicolson" => Ok(Scheme::CrankNicolson),
            other => Err(Error::Config(format!(
                "run.scheme: unknown scheme \"{other}\" \
                 (expected \"implicit-euler\" or \"crank-nicolson\")"
            ))),
        }
    }

    pub fn dt(&self) -> f64 {
        self.run.dt
    }

    pub fn t_final(&self) -> f64 {
        self.run.t_final
    }

    pub fn snapshot_stride(&self) -> usize {
        self.run.snapshot_stride
    }

    pub fn seed(&self) -> u64 {
        self.run.seed
    }

    /// Starting profile sampled on `grid`. Population runs require it
    /// nonnegative; that is enforced here, at the configuration surface.
    pub fn initial_state(&self, grid: &Grid) -> Result<PopulationState> {
        let sec = &self.initial;
        let state = match sec.kind.as_str() {
            "constant" => {
                let v = sec.value.ok_or_else(|| {
                    Error::Config("initial: constant profile needs `value`".into())
                })?;
                PopulationState::constant(grid, v)
            }
            "gaussian" => {
                let (center, width, amplitude) =
                    match (sec.center, sec.width, sec.amplitude) {
                        (Some(c), Some(w), Some(a)) => (c, w, a),
                        _ => return Err(Error::Config(
                            "initial: gaussian profile needs `center`, `width`, and `amplitude`"
                                .into(),
                        )),
                    };
                if !(width > 0.0) {
                    return Err(Error::Config(format!(
                        "initial: gaussian width = {width} must be positive"
                    )));
                }
                PopulationState::from_fn(grid, |s| {
                    let z = (s - center) / width;
                    amplitude * (-0.5 * z * z).exp()
                })
            }
            "table" => {
                let (s, values) = match (&sec.s, &sec.values) {
                    (Some(s), Some(v)) => (s, v),
                    _ => {
                        return Err(Error::Config(
                            "initial: table profile needs `s` and `values`".into(),
                        ))
                    }
                };
                if s.len() != values.len() {
                    return Err(Error::Config(format!(
                        "initial: table has {} breakpoints but {} values",
                        s.len(),
                        values.len()
                    )));
                }
                let table =
                    Coefficient::table(s.iter().copied().zip(values.iter().copied()).collect())
                        .map_err(|e| Error::Config(format!("initial: {e}")))?;
                let mut out = Vec::with_capacity(grid.len());
                for i in 0..grid.len() {
                    out.push(table.eval(grid.node(i)).map_err(|e| {
                        Error::Config(format!("initial: table does not cover the grid ({e})"))
                    })?);
                }
                PopulationState::from_vec(out)
            }
            other => {
                return Err(Error::Config(format!(
                    "initial: unknown profile type \"{other}\" \
                     (expected constant, gaussian, or table)"
                )))
            }
        };
        if !state.is_finite() {
            return Err(Error::Config(
                "initial: profile has non-finite entries".into(),
            ));
        }
        if !state.is_nonnegative() {
            return Err(Error::Config(format!(
                "initial: population profiles must be nonnegative \
                 (smallest entry {})",
                state.min_entry()
            )));
        }
        Ok(state)
    }
}

/// Parses and fully validates a run file: strict keys, resolved boundary
/// constants, admissible model, well-formed grid, scheme, horizon, and
/// initial profile.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let cfg: RunConfig = toml::from_str(text)?;
    let model = cfg.model()?;
    let report = validate(&model);
    if !report.is_admissible() {
        return Err(Error::Admissibility(report.violations.join("; ")));
    }
    let grid = cfg.grid()?;
    cfg.scheme()?;
    if !(cfg.run.dt > 0.0) || !cfg.run.dt.is_finite() {
        return Err(Error::Config(format!(
            "run.dt = {} must be positive and finite",
            cfg.run.dt
        )));
    }
    if !(cfg.run.t_final >= cfg.run.dt) || !cfg.run.t_final.is_finite() {
        return Err(Error::Config(format!(
            "run.T = {} must be finite and at least one step dt = {}",
            cfg.run.t_final, cfg.run.dt
        )));
    }
    cfg.initial_state(&grid)?;
    Ok(cfg)
}

/// Canonical text form; `parse_config(serialize_config(&c))` reproduces `c`.
pub fn serialize_config(cfg: &RunConfig) -> Result<String> {
    toml::to_string_pretty(cfg)
        .map_err(|e| Error::Config(format!("cannot serialize configuration: {e}")))
}

//! Job configuration: parsing, validation and default resolution.

use std::collections::BTreeMap;
use std::fmt;

use dunkl_frft::checks::{CheckOptions, SUITES};
use dunkl_frft::polyengine::MultiPoly;
use dunkl_frft::quadrature::{default_half_width, default_points};
use dunkl_frft::semigroup::DEFAULT_Q;
use dunkl_frft::specfun::Multiplicity;
use dunkl_frft::transform::{Route, default_degree};
use serde::{Deserialize, Serialize};

/// A config problem, located by its field path.
#[derive(Debug, Clone, PartialEq)]
pub struct UsageError {
    pub field: String,
    pub message: String,
}

impl UsageError {
    pub fn new(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self { field: field.into(), message: message.into() }
    }
}

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.field.is_empty() {
            write!(f, "{}", self.message)
        } else {
            write!(f, "config field `{}`: {}", self.field, self.message)
        }
    }
}

impl std::error::Error for UsageError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Basis,
    Kernel,
    Transform,
    Hankel,
    Projection,
    Resolvent,
    Check,
    Convergence,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelKind {
    /// A_α K_α(x, y).
    Alpha,
    /// Mehler kernel with smoothing r.
    Smoothed,
    /// Truncated Hermite expansion.
    Spectral,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Vary {
    /// Mehler limit residual along the smoothing parameter.
    R,
    /// Integral vs spectral route as the grid density grows.
    Points,
    /// Spectral coefficient tail as the truncation degree grows.
    Degree,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridParams {
    pub half_width: Option<f64>,
    pub points_per_axis: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HermiteTerm {
    pub nu: Vec<u32>,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

/// Declarative input functions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FunctionSpec {
    /// Σ c_ν h_ν.
    HermiteCombo { terms: Vec<HermiteTerm> },
    /// scale · p(x) e^{−|x|²/2} with p in exact-rational JSON.
    GaussPoly {
        poly: MultiPoly,
        #[serde(default)]
        scale: Option<f64>,
    },
    /// Values [re, im] at the job grid's nodes, in node order.
    Samples { values: Vec<[f64; 2]> },
    /// e^{−b|x − c|²/2}.
    Gaussian { width: Option<f64>, center: Option<Vec<f64>> },
    /// L_m^{(a)}(|x|²) e^{−|x|²/2}; `a` defaults to λ = γ + N/2 − 1.
    LaguerreGaussian { m: usize, a: Option<f64> },
}

/// A function given either as a family name or as a full spec.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FunctionInput {
    Named(String),
    Spec(FunctionSpec),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UniformSpec {
    pub half_width: f64,
    pub count: usize,
}

/// Where results are evaluated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputSpec {
    Points(Vec<Vec<f64>>),
    /// Tensor product of `count` equispaced values on [−h, h] per axis.
    Uniform(UniformSpec),
    /// The quadrature nodes of the job grid.
    QuadratureGrid,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobConfig {
    pub command: Option<Command>,
    pub mu: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    #[serde(alias = "M")]
    pub degree: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub route: Option<Route>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s_min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub function: Option<FunctionInput>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputSpec>,
    /// Shorthand for `output: {"points": …}`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outputs: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kernel: Option<KernelKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y_points: Option<Vec<Vec<f64>>>,
    /// Bessel order of the Hankel transform.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<f64>,
    /// Eigenvalue index of the spectral projection.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<i64>,
    /// Resolvent parameter [re, im].
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<[f64; 2]>,
    /// Nodes of the periodic group sampler.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub suite: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alphas: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vary: Option<Vary>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance_scale: Option<f64>,
    /// Per-check tolerance overrides keyed by "suite.check".
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerances: Option<BTreeMap<String, f64>>,
}

/// Parses a config, reporting the path of the first offending field.
pub fn parse_config(text: &str) -> Result<JobConfig, UsageError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        if path == "function"
            && let Some(inner) = function_spec_error(text)
        {
            return inner;
        }
        let field = if path == "." { String::new() } else { path };
        UsageError::new(field, e.into_inner().to_string())
    })
}

/// The untagged function field hides the real failure; reparse it as a spec.
fn function_spec_error(text: &str) -> Option<UsageError> {
    let doc: serde_json::Value = serde_json::from_str(text).ok()?;
    let value = doc.get("function")?;
    if value.is_string() {
        return None;
    }
    match serde_path_to_error::deserialize::<_, FunctionSpec>(value) {
        Ok(_) => None,
        Err(e) => {
            let path = e.path().to_string();
            let field = if path == "." { "function".to_string() } else { format!("function.{path}") };
            Some(UsageError::new(field, e.into_inner().to_string()))
        }
    }
}

fn require<T: Clone>(value: &Option<T>, field: &str, command: Command) -> Result<T, UsageError> {
    value.clone().ok_or_else(|| UsageError::new(field, format!("required by the {command:?} command").to_lowercase()))
}

fn check_finite(value: f64, field: &str) -> Result<f64, UsageError> {
    if value.is_finite() { Ok(value) } else { Err(UsageError::new(field, "must be finite")) }
}

fn check_points(points: &[Vec<f64>], dim: usize, field: &str) -> Result<(), UsageError> {
    if points.is_empty() {
        return Err(UsageError::new(field, "needs at least one point"));
    }
    for (i, p) in points.iter().enumerate() {
        if p.len() != dim {
            return Err(UsageError::new(
                format!("{field}[{i}]"),
                format!("expected {dim} coordinates, got {}", p.len()),
            ));
        }
        if p.iter().any(|v| !v.is_finite()) {
            return Err(UsageError::new(format!("{field}[{i}]"), "coordinates must be finite"));
        }
    }
    Ok(())
}

impl JobConfig {
    pub fn command(&self) -> Command {
        self.command.expect("resolved config has a command")
    }

    pub fn mult(&self) -> Multiplicity {
        Multiplicity::new(self.mu.clone().expect("resolved config has mu")).expect("validated multiplicity")
    }

    pub fn dim(&self) -> usize {
        self.mu.as_ref().map_or(0, Vec::len)
    }

    /// Fills every default the command uses and validates field values.
    pub fn resolve(&self) -> Result<JobConfig, UsageError> {
        let command = self.command.ok_or_else(|| UsageError::new("command", "missing"))?;
        let mu = self.mu.clone().ok_or_else(|| UsageError::new("mu", "missing"))?;
        let mult = Multiplicity::new(mu.clone()).map_err(|e| UsageError::new("mu", e.to_string()))?;
        let dim = mult.dim();
        let mut out = JobConfig { command: Some(command), mu: Some(mu), ..Default::default() };

        let grid = self.grid.clone().unwrap_or(GridParams { half_width: None, points_per_axis: None });
        let half_width = check_finite(grid.half_width.unwrap_or(default_half_width(dim)), "grid.half_width")?;
        if half_width <= 0.0 {
            return Err(UsageError::new("grid.half_width", "must be positive"));
        }
        let points = grid.points_per_axis.unwrap_or(default_points(dim));
        if points < 8 {
            return Err(UsageError::new("grid.points_per_axis", "must be at least 8"));
        }
        out.grid = Some(GridParams { half_width: Some(half_width), points_per_axis: Some(points) });
        out.seed = Some(self.seed.unwrap_or(0));

        let uses_plan = !matches!(command, Command::Check);
        if uses_plan {
            out.degree = Some(self.degree.unwrap_or(default_degree(dim)));
            out.r = Some(check_finite(self.r.unwrap_or(1.0), "r")?);
            if !(out.r.unwrap() > 0.0 && out.r.unwrap() <= 1.0) {
                return Err(UsageError::new("r", "must lie in (0, 1]"));
            }
            if let Some(s) = self.s_min {
                if !(s > 0.0 && s < 1.0) {
                    return Err(UsageError::new("s_min", "must lie in (0, 1)"));
                }
                out.s_min = Some(s);
            }
        }
        let needs_alpha = matches!(command, Command::Kernel | Command::Transform | Command::Hankel)
            || (command == Command::Convergence && self.vary != Some(Vary::Degree));
        if needs_alpha {
            out.alpha = Some(check_finite(require(&self.alpha, "alpha", command)?, "alpha")?);
        }
        let needs_function =
            matches!(command, Command::Transform | Command::Hankel | Command::Projection | Command::Resolvent)
                || (command == Command::Convergence && self.vary != Some(Vary::R));
        if needs_function {
            out.function =
                Some(FunctionInput::Spec(resolve_function(require(&self.function, "function", command)?, &mult)?));
        }
        let given_output = match (&self.output, &self.outputs) {
            (Some(_), Some(_)) => return Err(UsageError::new("outputs", "give either output or outputs, not both")),
            (None, Some(points)) => Some(OutputSpec::Points(points.clone())),
            (o, None) => o.clone(),
        };
        let needs_output =
            !matches!(command, Command::Check | Command::Convergence | Command::Projection | Command::Resolvent)
                || self.vary == Some(Vary::R);
        if needs_output {
            let output = given_output
                .unwrap_or(OutputSpec::Uniform(UniformSpec { half_width: 4.0, count: if dim == 1 { 81 } else { 21 } }));
            match &output {
                OutputSpec::Points(p) => check_points(p, dim, "output.points")?,
                OutputSpec::Uniform(u) => {
                    if !(u.half_width.is_finite() && u.half_width > 0.0) || u.count < 1 {
                        return Err(UsageError::new("output.uniform", "needs half_width > 0 and count >= 1"));
                    }
                }
                OutputSpec::QuadratureGrid => {}
            }
            out.output = Some(output);
        }

        match command {
            Command::Basis => {}
            Command::Kernel => {
                let kind = self.kernel.unwrap_or(KernelKind::Alpha);
                if kind == KernelKind::Smoothed && out.r == Some(1.0) {
                    return Err(UsageError::new("r", "the smoothed kernel needs r < 1"));
                }
                out.kernel = Some(kind);
                let y = require(&self.y_points, "y_points", command)?;
                check_points(&y, dim, "y_points")?;
                out.y_points = Some(y);
            }
            Command::Transform => {
                let route = self.route.unwrap_or(if out.r.unwrap() < 1.0 { Route::Smoothed } else { Route::Integral });
                if route == Route::Smoothed && out.r == Some(1.0) {
                    return Err(UsageError::new("r", "the smoothed route needs r < 1"));
                }
                out.route = Some(route);
            }
            Command::Hankel => {
                let order = self.order.unwrap_or(mult.lambda_index());
                if !(order.is_finite() && order >= -0.5) {
                    return Err(UsageError::new("order", "Bessel order must be >= -1/2"));
                }
                out.order = Some(order);
                match &out.function {
                    Some(FunctionInput::Spec(FunctionSpec::Gaussian { center: Some(c), .. }))
                        if c.iter().any(|v| *v != 0.0) =>
                    {
                        return Err(UsageError::new(
                            "function.center",
                            "the Hankel transform needs a radial (centered) profile",
                        ));
                    }
                    Some(FunctionInput::Spec(
                        FunctionSpec::Gaussian { .. } | FunctionSpec::LaguerreGaussian { .. },
                    )) => {}
                    _ => {
                        return Err(UsageError::new(
                            "function",
                            "the Hankel transform takes a gaussian or laguerre_gaussian profile",
                        ));
                    }
                }
            }
            Command::Projection => {
                out.n = Some(self.n.unwrap_or(0));
                out.q = Some(self.q.unwrap_or(DEFAULT_Q));
            }
            Command::Resolvent => {
                let lambda = require(&self.lambda, "lambda", command)?;
                check_finite(lambda[0], "lambda[0]")?;
                check_finite(lambda[1], "lambda[1]")?;
                out.lambda = Some(lambda);
                out.q = Some(self.q.unwrap_or(DEFAULT_Q));
            }
            Command::Check => {
                let suite = self.suite.clone().unwrap_or_else(|| "all".into());
                if suite != "all" && !SUITES.contains(&suite.as_str()) {
                    return Err(UsageError::new(
                        "suite",
                        format!("unknown suite {suite:?}; expected \"all\" or one of {SUITES:?}"),
                    ));
                }
                out.suite = Some(suite);
                let defaults = CheckOptions::new(mult.mu().to_vec());
                out.degree = Some(self.degree.unwrap_or(defaults.degree));
                out.samples = Some(self.samples.unwrap_or(defaults.samples).max(1));
                let alphas = self.alphas.clone().unwrap_or(defaults.alphas);
                if alphas.is_empty() || alphas.iter().any(|a| !a.is_finite()) {
                    return Err(UsageError::new("alphas", "needs at least one finite angle"));
                }
                out.alphas = Some(alphas);
                let scale = self.tolerance_scale.unwrap_or(1.0);
                if !(scale.is_finite() && scale > 0.0) {
                    return Err(UsageError::new("tolerance_scale", "must be positive"));
                }
                out.tolerance_scale = Some(scale);
                out.tolerances = self.tolerances.clone();
            }
            Command::Convergence => {
                let vary = require(&self.vary, "vary", command)?;
                out.vary = Some(vary);
                let values = match (&self.values, vary) {
                    (Some(v), _) => v.clone(),
                    (None, Vary::R) => (1..=12).map(|j| 1.0 - 2f64.powi(-j)).collect(),
                    (None, Vary::Points) if dim == 1 => vec![60.0, 80.0, 100.0, 120.0, 160.0, 240.0, 320.0],
                    (None, Vary::Points) => vec![40.0, 60.0, 80.0, 100.0, 120.0],
                    (None, Vary::Degree) => (1..=6).map(|k| 4.0 * k as f64).collect(),
                };
                if values.is_empty() {
                    return Err(UsageError::new("values", "needs at least one value"));
                }
                for (i, &v) in values.iter().enumerate() {
                    let ok = match vary {
                        Vary::R => v > 0.0 && v < 1.0,
                        Vary::Points | Vary::Degree => v >= 1.0 && v.fract() == 0.0,
                    };
                    if !ok {
                        return Err(UsageError::new(
                            format!("values[{i}]"),
                            format!("{v} is not valid when varying {vary:?}").to_lowercase(),
                        ));
                    }
                }
                out.values = Some(values);
                if vary == Vary::R {
                    let y = self.y_points.clone().unwrap_or_else(|| vec![vec![0.5; dim]]);
                    check_points(&y, dim, "y_points")?;
                    out.y_points = Some(y);
                }
            }
        }
        Ok(out)
    }
}

fn resolve_function(input: FunctionInput, mult: &Multiplicity) -> Result<FunctionSpec, UsageError> {
    let dim = mult.dim();
    let spec = match input {
        FunctionInput::Named(name) => match name.as_str() {
            "gaussian" => FunctionSpec::Gaussian { width: None, center: None },
            "laguerre_gaussian" => FunctionSpec::LaguerreGaussian { m: 1, a: None },
            other => {
                return Err(UsageError::new(
                    "function",
                    format!(
                        "unknown family {other:?}; expected \"gaussian\", \"laguerre_gaussian\" or an object with a \"type\" field"
                    ),
                ));
            }
        },
        FunctionInput::Spec(s) => s,
    };
    Ok(match spec {
        FunctionSpec::Gaussian { width, center } => {
            let width = width.unwrap_or(1.0);
            if !(width.is_finite() && width > 0.0) {
                return Err(UsageError::new("function.width", "must be positive"));
            }
            let center = center.unwrap_or_else(|| vec![0.0; dim]);
            if center.len() != dim || center.iter().any(|v| !v.is_finite()) {
                return Err(UsageError::new("function.center", format!("needs {dim} finite coordinates")));
            }
            FunctionSpec::Gaussian { width: Some(width), center: Some(center) }
        }
        FunctionSpec::LaguerreGaussian { m, a } => {
            let a = a.unwrap_or(mult.lambda_index());
            if !(a.is_finite() && a > -1.0) {
                return Err(UsageError::new("function.a", "Laguerre parameter must exceed -1"));
            }
            FunctionSpec::LaguerreGaussian { m, a: Some(a) }
        }
        FunctionSpec::HermiteCombo { terms } => {
            if terms.is_empty() {
                return Err(UsageError::new("function.terms", "needs at least one term"));
            }
            for (i, t) in terms.iter().enumerate() {
                if t.nu.len() != dim {
                    return Err(UsageError::new(format!("function.terms[{i}].nu"), format!("expected {dim} indices")));
                }
            }
            FunctionSpec::HermiteCombo { terms }
        }
        FunctionSpec::GaussPoly { poly, scale } => {
            if poly.dim() != dim {
                return Err(UsageError::new("function.poly.dim", format!("expected {dim}")));
            }
            FunctionSpec::GaussPoly { poly, scale: Some(scale.unwrap_or(1.0)) }
        }
        s @ FunctionSpec::Samples { .. } => s,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_fields_are_located() {
        let err = parse_config(r#"{"command": "transform", "mu": [0.5], "alpah": 1.0}"#).unwrap_err();
        assert!(err.message.contains("alpah"), "{err}");
        let err = parse_config(r#"{"command": "transform", "mu": [0.5], "grid": {"half_width": "x"}}"#).unwrap_err();
        assert_eq!(err.field, "grid.half_width");
    }

    #[test]
    fn resolution_materializes_defaults() {
        let cfg = parse_config(
            r#"{"command": "transform", "mu": [0], "alpha": -1.5707963267948966, "function": "gaussian"}"#,
        )
        .unwrap();
        let r = cfg.resolve().unwrap();
        assert_eq!(r.route, Some(Route::Integral));
        assert_eq!(r.degree, Some(24));
        assert_eq!(r.grid.as_ref().unwrap().points_per_axis, Some(default_points(1)));
        assert!(matches!(
            r.function,
            Some(FunctionInput::Spec(FunctionSpec::Gaussian { width: Some(_), center: Some(_) }))
        ));
        let again = parse_config(&serde_json::to_string(&r).unwrap()).unwrap().resolve().unwrap();
        assert_eq!(again, r);
    }

    #[test]
    fn missing_and_invalid_fields() {
        let err = parse_config(r#"{"command": "transform", "mu": [0.5]}"#).unwrap().resolve().unwrap_err();
        assert_eq!(err.field, "alpha");
        let err = parse_config(r#"{"command": "kernel", "mu": [0.5], "alpha": 1, "y_points": [[1, 2]]}"#)
            .unwrap()
            .resolve()
            .unwrap_err();
        assert_eq!(err.field, "y_points[0]");
        let err = parse_config(r#"{"command": "check", "mu": [-1]}"#).unwrap().resolve().unwrap_err();
        assert_eq!(err.field, "mu");
        let err = parse_config(r#"{"command": "convergence", "mu": [0.5], "alpha": 1, "vary": "r", "values": [1.5]}"#)
            .unwrap()
            .resolve()
            .unwrap_err();
        assert_eq!(err.field, "values[0]");
    }
}

//! Experiment configuration files.
//!
//! Configs are JSON objects with a `schema_version` field; unknown fields are
//! rejected everywhere so that typos surface as schema errors.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Identities,
    Evolve,
    Duhamel,
    ParamDerivative,
    Approx,
    Muconvex,
    Mackey,
    Groenwall,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 8] = [
        ExperimentKind::Identities,
        ExperimentKind::Evolve,
        ExperimentKind::Duhamel,
        ExperimentKind::ParamDerivative,
        ExperimentKind::Approx,
        ExperimentKind::Muconvex,
        ExperimentKind::Mackey,
        ExperimentKind::Groenwall,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Identities => "identities",
            ExperimentKind::Evolve => "evolve",
            ExperimentKind::Duhamel => "duhamel",
            ExperimentKind::ParamDerivative => "param-derivative",
            ExperimentKind::Approx => "approx",
            ExperimentKind::Muconvex => "muconvex",
            ExperimentKind::Mackey => "mackey",
            ExperimentKind::Groenwall => "groenwall",
        }
    }

    /// Core module exercised by the experiment.
    pub fn module(self) -> &'static str {
        match self {
            ExperimentKind::Identities => "logderiv, evolution",
            ExperimentKind::Evolve => "evolution",
            ExperimentKind::Duhamel => "calculus",
            ExperimentKind::ParamDerivative => "calculus",
            ExperimentKind::Approx => "lcvs",
            ExperimentKind::Muconvex => "muconvex",
            ExperimentKind::Mackey => "smoothing",
            ExperimentKind::Groenwall => "adjoint",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            ExperimentKind::Identities => "Der rules and product-integral rules for products, quotients, inverses, concatenation, substitution and homomorphisms",
            ExperimentKind::Evolve => "convergence orders of lie_euler and midpoint, abelian closed form, Der reconstruction",
            ExperimentKind::Duhamel => "Duhamel's formula: finite difference vs integral and closed forms",
            ExperimentKind::ParamDerivative => "parameter-dependent integrals, derivative at zero, Evol differential",
            ExperimentKind::Approx => "iterated integration, convolution smoothing, polygonal approximation",
            ExperimentKind::Muconvex => "mu-convexity probes, smallest o = c*u, continuity estimates",
            ExperimentKind::Mackey => "bump smoothing of piecewise curves and the Mackey glueing demo",
            ExperimentKind::Groenwall => "Ad series, Omori transport and the Groenwall bound",
        }
    }

    /// The identity or estimate the experiment's rows verify.
    pub fn anchor(self) -> &'static str {
        match self {
            ExperimentKind::Identities => "Der(mu nu) = Der mu + Ad_mu Der nu; product-integral product, quotient, inverse, concatenation, substitution and homomorphism rules",
            ExperimentKind::Evolve => "Der(int phi) = phi; abelian: int phi = exp(integral of phi)",
            ExperimentKind::Duhamel => "d exp(X) = dL_exp(X) int_0^1 Ad_exp(-sX) dX ds",
            ExperimentKind::ParamDerivative => "d/dx int Phi(x) = dL(int Ad_[int^s Phi]^-1 dPhi/dx ds)",
            ExperimentKind::Approx => "phi = I[p](phi^(p-1)(r), ..., phi(r), phi^(p))",
            ExperimentKind::Muconvex => "u(X1 * ... * Xn) <= o(X1) + ... + o(Xn)",
            ExperimentKind::Mackey => "int psi = int phi for psi = rho * phi o varrho",
            ExperimentKind::Groenwall => "w(Ad_(int phi) Y) <= exp(int w(phi)) w(Y)",
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// `"unit_group(3)"` or `{"name": "unit_group", "n": 3}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GroupRef {
    Name(String),
    Spec {
        name: String,
        #[serde(default)]
        n: Option<usize>,
    },
}

impl GroupRef {
    pub fn canonical(&self) -> String {
        match self {
            GroupRef::Name(s) => s.clone(),
            GroupRef::Spec { name, n: Some(n) } => format!("{name}({n})"),
            GroupRef::Spec { name, n: None } => name.clone(),
        }
    }
}

impl Default for GroupRef {
    fn default() -> Self {
        GroupRef::Name("so3".into())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchemeConfig {
    #[serde(default = "default_scheme")]
    pub name: String,
    #[serde(default = "default_h")]
    pub h: f64,
    #[serde(default = "default_max_steps")]
    pub max_steps: usize,
    #[serde(default)]
    pub tolerance: Option<f64>,
}

fn default_scheme() -> String {
    "midpoint".into()
}

fn default_h() -> f64 {
    1.0 / 64.0
}

fn default_max_steps() -> usize {
    1 << 22
}

impl Default for SchemeConfig {
    fn default() -> Self {
        Self {
            name: default_scheme(),
            h: default_h(),
            max_steps: default_max_steps(),
            tolerance: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FourierTermSpec {
    pub frequency: f64,
    pub cos: Vec<f64>,
    pub sin: Vec<f64>,
}

/// A curve in the algebra. Segments of a piecewise curve take their
/// intervals from the breakpoints and may omit `interval`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CurveDescriptor {
    Constant {
        #[serde(default)]
        interval: Option<[f64; 2]>,
        value: Vec<f64>,
    },
    Polynomial {
        #[serde(default)]
        interval: Option<[f64; 2]>,
        /// `coefficients[k]` multiplies `tᵏ`.
        coefficients: Vec<Vec<f64>>,
    },
    Fourier {
        #[serde(default)]
        interval: Option<[f64; 2]>,
        #[serde(default)]
        polynomial: Vec<Vec<f64>>,
        terms: Vec<FourierTermSpec>,
    },
    Piecewise {
        breakpoints: Vec<f64>,
        segments: Vec<CurveDescriptor>,
    },
}

/// Tolerances; every field defaults to the acceptance value.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub der_rules: f64,
    pub estimate_factor: f64,
    pub estimate_floor: f64,
    pub exactness: f64,
    pub abelian: f64,
    pub order_band: f64,
    pub reconstruct: f64,
    pub duhamel: f64,
    pub duhamel_forms: f64,
    pub param_derivative: f64,
    pub fd_slope: f64,
    pub directional: f64,
    pub chain: f64,
    pub jumps: f64,
    pub mackey: f64,
    pub series: f64,
    pub nilpotent: f64,
    pub iterated: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            der_rules: 1e-8,
            estimate_factor: 5.0,
            estimate_floor: 1e-12,
            exactness: 1e-13,
            abelian: 1e-10,
            order_band: 0.2,
            reconstruct: 1e-6,
            duhamel: 1e-6,
            duhamel_forms: 1e-10,
            param_derivative: 1e-6,
            fd_slope: 1.8,
            directional: 1e-8,
            chain: 1e-10,
            jumps: 1e-8,
            mackey: 1e-5,
            series: 1e-11,
            nilpotent: 1e-14,
            iterated: 1e-10,
        }
    }
}

/// Experiment-specific parameters; irrelevant ones are ignored.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Params {
    /// Coefficient size of random curves.
    pub curve_scale: Option<f64>,
    /// Step sizes of the convergence study.
    pub hs: Vec<f64>,
    pub oracle_h: f64,
    pub schemes: Vec<String>,
    /// Evaluation point of parameter families (default 0.2) and Duhamel
    /// paths on `[0, 2]` (default 1).
    pub x: Option<f64>,
    pub n_max: usize,
    pub o_factor: Option<f64>,
    pub search: [f64; 2],
    /// Mackey truncation `N` and decay constant `c`.
    pub mackey_n: usize,
    pub decay: f64,
    pub p_max: usize,
    pub convolution_n: Vec<usize>,
    pub homomorphism: Option<String>,
    pub breakpoints: Vec<f64>,
    pub scalar_tuples: usize,
}

impl Default for Params {
    fn default() -> Self {
        Self {
            curve_scale: None,
            hs: (4..=10).map(|k| 2f64.powi(-k)).collect(),
            oracle_h: 2f64.powi(-14),
            schemes: vec!["lie_euler".into(), "midpoint".into()],
            x: None,
            n_max: 8,
            o_factor: None,
            search: [1.0, 4.0],
            mackey_n: 6,
            decay: 1.0,
            p_max: 4,
            convolution_n: vec![8, 32, 128],
            homomorphism: None,
            breakpoints: vec![0.3, 0.71],
            scalar_tuples: 100_000,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub dir: Option<String>,
    /// Also write per-h convergence tables.
    pub convergence_tables: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub experiment: ExperimentKind,
    #[serde(default)]
    pub group: GroupRef,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default)]
    pub scheme: SchemeConfig,
    #[serde(default)]
    pub curves: Vec<CurveDescriptor>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub params: Params,
    #[serde(default)]
    pub output: OutputConfig,
}

fn default_samples() -> usize {
    20
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: ExperimentConfig = serde_json::from_str(text)
            .map_err(|e| CliError::Schema(format!("line {}, column {}: {e}", e.line(), e.column())))?;
        if cfg.schema_version != SCHEMA_VERSION {
            return Err(CliError::Schema(format!(
                "field `schema_version`: expected {SCHEMA_VERSION}, found {}",
                cfg.schema_version
            )));
        }
        if !(cfg.scheme.h > 0.0 && cfg.scheme.h.is_finite()) {
            return Err(CliError::Schema(format!("field `scheme.h`: must be positive, found {}", cfg.scheme.h)));
        }
        if !matches!(cfg.scheme.name.as_str(), "lie_euler" | "midpoint") {
            return Err(CliError::Schema(format!("field `scheme.name`: unknown scheme `{}`", cfg.scheme.name)));
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Schema(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }
}

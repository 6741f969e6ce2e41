//! Scenario files: one JSON document per computation.
//!
//! ```json
//! { "version": 1, "name": "riccati-tanh", "kind": "riccati",
//!   "gate": 1e-5, "gates": { "substitution": 1e-6 }, "payload": { ... } }
//! ```
//!
//! Complex numbers are `[re, im]` pairs or bare reals; matrices are row-major
//! arrays of rows.

use std::collections::BTreeMap;

use graded_riccati::algebra::{CMatrix, GradedContext};
use graded_riccati::flow::{uniform_axis, FieldOnGrid, MatrixField, MatrixPolynomial, Method, Monomial, Side};
use graded_riccati::riccati::Component;
use serde::de::{Deserializer, Error as _};
use serde::Deserialize;

pub const SCHEMA_VERSION: u32 = 1;
pub const DEFAULT_GATE: f64 = 1e-5;
pub const MAX_DEGREE: u32 = 8;

/// Invalid configuration; maps to exit code 2.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

impl From<graded_riccati::Error> for ConfigError {
    fn from(e: graded_riccati::Error) -> Self {
        ConfigError(e.to_string())
    }
}

fn bad<T>(msg: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError(msg.into()))
}

#[derive(Clone, Debug, Deserialize)]
pub struct Scenario {
    pub version: u32,
    pub name: String,
    #[serde(default)]
    pub description: Option<String>,
    /// Upper bound for every residual in the report.
    #[serde(default)]
    pub gate: Option<f64>,
    /// Per-residual bounds, overriding `gate` for the named entries.
    #[serde(default)]
    pub gates: BTreeMap<String, f64>,
    #[serde(flatten)]
    pub problem: Problem,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "kind", content = "payload", rename_all = "kebab-case")]
pub enum Problem {
    Gauss(GaussPayload),
    Flow(FlowPayload),
    Riccati(RiccatiPayload),
    RiccatiMd(RiccatiMdPayload),
    ClosedForm(ClosedPayload),
    Toda(TodaPayload),
    WznwCheck(TodaPayload),
}

impl Problem {
    pub fn kind(&self) -> &'static str {
        match self {
            Problem::Gauss(_) => "gauss",
            Problem::Flow(_) => "flow",
            Problem::Riccati(_) => "riccati",
            Problem::RiccatiMd(_) => "riccati-md",
            Problem::ClosedForm(_) => "closed-form",
            Problem::Toda(_) => "toda",
            Problem::WznwCheck(_) => "wznw-check",
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaussPayload {
    pub sizes: Vec<usize>,
    pub matrix: CMatrix,
    /// Decompose as `upper · zero · lower` instead.
    #[serde(default)]
    pub opposite: bool,
    #[serde(default = "default_gauss_tol")]
    pub tol: f64,
}

fn default_gauss_tol() -> f64 {
    graded_riccati::algebra::DEFAULT_GAUSS_TOL
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    pub steps: usize,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisSpec {
    pub lo: f64,
    pub hi: f64,
    pub nodes: usize,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridDomain {
    pub axes: Vec<AxisSpec>,
    #[serde(default = "default_substeps")]
    pub substeps: usize,
}

fn default_substeps() -> usize {
    8
}

impl GridDomain {
    pub fn axes(&self) -> Vec<Vec<f64>> {
        self.axes.iter().map(|a| uniform_axis(a.lo, a.hi, a.nodes)).collect()
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub enum Domain {
    Interval(Interval),
    Grid(GridDomain),
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlowPayload {
    /// One component per coordinate of the domain.
    pub field: Components,
    #[serde(default)]
    pub initial: Option<CMatrix>,
    #[serde(default)]
    pub side: Side,
    #[serde(default)]
    pub method: Method,
    pub domain: Domain,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Solver {
    Direct,
    Linearization,
    #[default]
    Both,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RiccatiPayload {
    pub sizes: Vec<usize>,
    pub field: Components,
    /// Two-block initial value `U(0) = m`.
    #[serde(default)]
    pub m: Option<CMatrix>,
    /// Full unit block-triangular initial value.
    #[serde(default)]
    pub initial: Option<CMatrix>,
    #[serde(default)]
    pub component: Component,
    pub interval: Interval,
    #[serde(default)]
    pub solver: Solver,
    #[serde(default)]
    pub method: Method,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RiccatiMdPayload {
    pub sizes: Vec<usize>,
    pub field: Components,
    #[serde(default)]
    pub m: Option<CMatrix>,
    #[serde(default)]
    pub initial: Option<CMatrix>,
    #[serde(default)]
    pub component: Component,
    pub grid: GridDomain,
    #[serde(default)]
    pub solver: Solver,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ClosedPayload {
    /// `λ = [[A, 0], [C, D]]`.
    BZero {
        a: FieldSpec,
        c: FieldSpec,
        d: FieldSpec,
        m: CMatrix,
        x: f64,
        steps: usize,
    },
    /// `λ = [[0, B], [B, 0]]`.
    CEqualsB { b: FieldSpec, m: CMatrix, x: f64, steps: usize },
    /// `λ = [[0, B], [C, 0]]` with constant nondegenerate `B`, `C`.
    ConstantBc {
        b: CMatrix,
        c: CMatrix,
        m: CMatrix,
        x: f64,
        steps: usize,
    },
    /// Strictly block-lower three-block `λ`.
    ThreeBlockNilpotent {
        c21: FieldSpec,
        c31: FieldSpec,
        c32: FieldSpec,
        m12: CMatrix,
        m13: CMatrix,
        m23: CMatrix,
        x: f64,
        steps: usize,
    },
    /// `λ_i = [[0, 0], [C_i, 0]]` with `C_i` a gradient.
    MdNilpotent { c: Components, m: CMatrix, grid: GridDomain },
}

impl ClosedPayload {
    pub fn family(&self) -> &'static str {
        match self {
            ClosedPayload::BZero { .. } => "b-zero",
            ClosedPayload::CEqualsB { .. } => "c-equals-b",
            ClosedPayload::ConstantBc { .. } => "constant-bc",
            ClosedPayload::ThreeBlockNilpotent { .. } => "three-block-nilpotent",
            ClosedPayload::MdNilpotent { .. } => "md-nilpotent",
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TodaPayload {
    pub data: TodaDataSpec,
    pub grid: GridDomain,
    /// Two-block Riccati family generated by the solution.
    #[serde(default)]
    pub riccati: Option<FamilySpec>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub enum TodaDataSpec {
    /// Fields on `R^{2d}`, coordinates `(z^{-1..d}, z^{+1..d})`.
    General {
        sizes: Vec<usize>,
        d: usize,
        gamma_minus: FieldSpec,
        gamma_plus: FieldSpec,
        c_minus: Components,
        c_plus: Components,
        #[serde(default)]
        xi_minus: Option<FieldSpec>,
        #[serde(default)]
        xi_plus: Option<FieldSpec>,
    },
    /// Free functions of the `(d, 1)` family, each on `R^d`.
    Nonabelian {
        d: usize,
        f_minus: FieldSpec,
        h_minus: FieldSpec,
        f_plus: FieldSpec,
        h_plus: FieldSpec,
        #[serde(default)]
        xi_plus: Option<FieldSpec>,
        #[serde(default)]
        xi_minus: Option<FieldSpec>,
    },
}

impl TodaDataSpec {
    pub fn d(&self) -> usize {
        match self {
            TodaDataSpec::General { d, .. } | TodaDataSpec::Nonabelian { d, .. } => *d,
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilySpec {
    pub m_minus: CMatrix,
    pub m_plus: CMatrix,
}

/// A matrix-valued function of the scenario's coordinates.
#[derive(Clone, Debug, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub enum FieldSpec {
    Constant(CMatrix),
    Polynomial(PolynomialSpec),
    Grid(GridSpec),
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolynomialSpec {
    /// Optional coordinate names, one per exponent.
    #[serde(default)]
    pub variables: Option<Vec<String>>,
    pub terms: Vec<Monomial>,
}

/// Samples on a tensor grid, interpolated multilinearly.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub axes: Vec<Vec<f64>>,
    pub values: Vec<CMatrix>,
}

/// One field spec, or an array of them (one per direction).
#[derive(Clone, Debug)]
pub struct Components(pub Vec<FieldSpec>);

impl<'de> Deserialize<'de> for Components {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let value = serde_json::Value::deserialize(d)?;
        let specs = if value.is_array() {
            Vec::<FieldSpec>::deserialize(value).map_err(D::Error::custom)?
        } else {
            vec![FieldSpec::deserialize(value).map_err(D::Error::custom)?]
        };
        if specs.is_empty() {
            return Err(D::Error::custom("a field needs at least one component"));
        }
        Ok(Components(specs))
    }
}

impl FieldSpec {
    pub fn build(&self, dim_in: usize, what: &str) -> Result<MatrixField, ConfigError> {
        match self {
            FieldSpec::Constant(m) => Ok(MatrixField::constant(dim_in, m.clone())),
            FieldSpec::Polynomial(p) => Ok(MatrixField::from_polynomials(vec![p.polynomial(dim_in, what)?])?),
            FieldSpec::Grid(g) => Ok(MatrixField::from_grid(vec![g.grid(dim_in, what)?])?),
        }
    }

    pub fn shape(&self) -> Option<(usize, usize)> {
        match self {
            FieldSpec::Constant(m) => Some(m.shape()),
            FieldSpec::Polynomial(p) => p.terms.first().map(|t| t.coeff.shape()),
            FieldSpec::Grid(g) => g.values.first().map(CMatrix::shape),
        }
    }
}

impl PolynomialSpec {
    fn polynomial(&self, dim_in: usize, what: &str) -> Result<MatrixPolynomial, ConfigError> {
        if let Some(vars) = &self.variables {
            if vars.len() != dim_in {
                return bad(format!("{what}: {} variables named, the domain has {dim_in}", vars.len()));
            }
        }
        let Some(first) = self.terms.first() else {
            return bad(format!("{what}: polynomial without terms"));
        };
        let poly = MatrixPolynomial::new(dim_in, first.coeff.shape(), self.terms.clone())
            .map_err(|e| ConfigError(format!("{what}: {e}")))?;
        if poly.degree() > MAX_DEGREE {
            return bad(format!("{what}: degree {} exceeds {MAX_DEGREE}", poly.degree()));
        }
        Ok(poly)
    }
}

impl GridSpec {
    fn grid(&self, dim_in: usize, what: &str) -> Result<FieldOnGrid, ConfigError> {
        if self.axes.len() != dim_in {
            return bad(format!("{what}: grid has {} axes, the domain has {dim_in}", self.axes.len()));
        }
        let shape = self.values.first().map(CMatrix::shape);
        if self.values.iter().any(|v| Some(v.shape()) != shape) {
            return bad(format!("{what}: grid values differ in shape"));
        }
        FieldOnGrid::new(self.axes.clone(), self.values.clone()).map_err(|e| ConfigError(format!("{what}: {e}")))
    }
}

impl Components {
    /// Builds a field with `components` entries of shape `shape` on `R^dim_in`.
    pub fn build(
        &self,
        dim_in: usize,
        components: usize,
        shape: (usize, usize),
        what: &str,
    ) -> Result<MatrixField, ConfigError> {
        if self.0.len() != components {
            return bad(format!("{what}: expected {components} component(s), got {}", self.0.len()));
        }
        for (i, s) in self.0.iter().enumerate() {
            if s.shape() != Some(shape) {
                return bad(format!(
                    "{what}[{i}]: expected {}x{} values, got {:?}",
                    shape.0, shape.1,
                    s.shape()
                ));
            }
        }
        if let [single] = &self.0[..] {
            return single.build(dim_in, what);
        }
        if self.0.iter().all(|s| matches!(s, FieldSpec::Constant(_))) {
            let ms = self.0.iter().map(|s| match s {
                FieldSpec::Constant(m) => m.clone(),
                _ => unreachable!(),
            });
            return Ok(MatrixField::constant_multi(dim_in, ms.collect()));
        }
        if self.0.iter().all(|s| matches!(s, FieldSpec::Polynomial(_))) {
            let polys = self
                .0
                .iter()
                .enumerate()
                .map(|(i, s)| match s {
                    FieldSpec::Polynomial(p) => p.polynomial(dim_in, &format!("{what}[{i}]")),
                    _ => unreachable!(),
                })
                .collect::<Result<Vec<_>, _>>()?;
            return Ok(MatrixField::from_polynomials(polys)?);
        }
        let parts = self
            .0
            .iter()
            .enumerate()
            .map(|(i, s)| s.build(dim_in, &format!("{what}[{i}]")))
            .collect::<Result<Vec<_>, _>>()?;
        let nan = CMatrix::from_fn(shape.0, shape.1, |_, _| f64::NAN.into());
        let (ev, pa) = (parts.clone(), parts);
        Ok(
            MatrixField::multi(dim_in, ev.len(), shape, move |c, x| ev[c].at(x).unwrap_or_else(|_| nan.clone()))
                .with_partials(move |c, k, x| pa[c].partial(0, k, x).expect("coordinate in range")),
        )
    }
}

/// Command-line overrides applied after parsing.
#[derive(Clone, Copy, Debug, Default)]
pub struct Overrides {
    pub steps: Option<usize>,
    pub grid: Option<usize>,
    pub gate: Option<f64>,
}

impl Scenario {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let s: Scenario = serde_json::from_str(text).map_err(|e| ConfigError(format!("invalid scenario: {e}")))?;
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.version != SCHEMA_VERSION {
            return bad(format!("unsupported version {} (expected {SCHEMA_VERSION})", self.version));
        }
        if self.name.is_empty() || !self.name.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_') {
            return bad(format!("name {:?} must be non-empty and use only [A-Za-z0-9_-]", self.name));
        }
        for (label, tol) in self.gate.iter().map(|g| ("gate", g)).chain(self.gates.iter().map(|(k, v)| (k.as_str(), v))) {
            if !(*tol > 0.0 && tol.is_finite()) {
                return bad(format!("tolerance {label} must be positive, got {tol}"));
            }
        }
        if let Problem::WznwCheck(p) = &self.problem {
            if p.riccati.is_some() {
                return bad("wznw-check does not take a riccati family");
            }
        }
        Ok(())
    }

    pub fn apply(&mut self, o: &Overrides) -> Result<(), ConfigError> {
        if let Some(g) = o.gate {
            if !(g > 0.0 && g.is_finite()) {
                return bad(format!("--gate must be positive, got {g}"));
            }
            self.gate = Some(g);
        }
        if o.steps == Some(0) {
            return bad("--steps must be at least 1");
        }
        if matches!(o.grid, Some(n) if n < 2) {
            return bad("--grid must be at least 2");
        }
        let set_axes = |g: &mut GridDomain| {
            if let Some(n) = o.grid {
                g.axes.iter_mut().for_each(|a| a.nodes = n);
            }
            if let Some(s) = o.steps {
                g.substeps = s;
            }
        };
        let set_steps = |s: &mut usize| {
            if let Some(n) = o.steps {
                *s = n;
            }
        };
        match &mut self.problem {
            Problem::Gauss(_) => {}
            Problem::Flow(p) => match &mut p.domain {
                Domain::Interval(i) => set_steps(&mut i.steps),
                Domain::Grid(g) => set_axes(g),
            },
            Problem::Riccati(p) => set_steps(&mut p.interval.steps),
            Problem::RiccatiMd(p) => set_axes(&mut p.grid),
            Problem::ClosedForm(c) => match c {
                ClosedPayload::BZero { steps, .. }
                | ClosedPayload::CEqualsB { steps, .. }
                | ClosedPayload::ConstantBc { steps, .. }
                | ClosedPayload::ThreeBlockNilpotent { steps, .. } => set_steps(steps),
                ClosedPayload::MdNilpotent { grid, .. } => set_axes(grid),
            },
            Problem::Toda(p) | Problem::WznwCheck(p) => set_axes(&mut p.grid),
        }
        Ok(())
    }

    /// Bound applied to residual `key`.
    pub fn gate_for(&self, key: &str) -> f64 {
        self.gates.get(key).copied().unwrap_or(self.gate.unwrap_or(DEFAULT_GATE))
    }
}

pub fn context(sizes: &[usize]) -> Result<GradedContext, ConfigError> {
    GradedContext::from_sizes(sizes).map_err(|e| ConfigError(format!("sizes {sizes:?}: {e}")))
}

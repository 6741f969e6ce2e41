//! Executes scenarios: builds the problem, solves it, and collects
//! residuals and data sets.

use graded_riccati::algebra::{gauss_decompose, gauss_decompose_opposite, CMatrix, GradedContext, Part};
use graded_riccati::closed::{
    curl_residual, solve_b_zero_path, solve_cb_equal_path, solve_constant_bc, solve_md_nilpotent_grid,
    three_block_trajectory, ConstantBC, ThreeBlockNilpotent, TriangularCoeffs1D,
};
use graded_riccati::flow::{
    solve_linear_1d, solve_linear_md, uniform_axis, zero_curvature_residual_side, FieldOnGrid, MatrixField,
    MdOptions, ResidualReport, Side, Stencil,
};
use graded_riccati::riccati::{
    solve_by_linearization_md, solve_by_linearization_with, solve_direct, solve_direct_md, substitution_residual,
    RiccatiProblem, RiccatiSolution,
};
use graded_riccati::toda::{
    connection_curvature, construct_solution, maximally_nonabelian_data, reconstruct_wznw, redheffer_reid_fields,
    riccati_md_solutions, riccati_md_substitution, NonabelianSpec, TodaData, TodaOptions, TodaSolution,
};
use graded_riccati::Error;

use crate::scenario::{
    context, ClosedPayload, ConfigError, Domain, FieldSpec, FlowPayload, GaussPayload, Problem,
    RiccatiMdPayload, RiccatiPayload, Solver, TodaDataSpec, TodaPayload,
};

/// Stencil of every finite-difference residual computed here.
const STENCIL: Stencil = Stencil::Central4;

/// Samples of one output: a coordinate tuple and a matrix per row.
#[derive(Clone, Debug)]
pub struct Dataset {
    /// File-name suffix; empty for the primary output.
    pub label: String,
    pub coordinates: Vec<String>,
    /// Tensor-grid axes, when the samples form one.
    pub axes: Option<Vec<Vec<f64>>>,
    pub points: Vec<Vec<f64>>,
    pub values: Vec<CMatrix>,
}

impl Dataset {
    fn grid(label: &str, coordinates: Vec<String>, grid: &FieldOnGrid) -> Self {
        Self {
            label: label.into(),
            coordinates,
            axes: Some(grid.axes().to_vec()),
            points: grid.points(),
            values: grid.values().to_vec(),
        }
    }

    fn path(label: &str, nodes: &[f64], values: Vec<CMatrix>) -> Self {
        Self {
            label: label.into(),
            coordinates: vec!["x".into()],
            axes: Some(vec![nodes.to_vec()]),
            points: nodes.iter().map(|&x| vec![x]).collect(),
            values,
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct Outcome {
    pub report: ResidualReport,
    pub datasets: Vec<Dataset>,
}

#[derive(Debug)]
pub enum RunError {
    Config(ConfigError),
    Numeric(Error),
}

impl From<ConfigError> for RunError {
    fn from(e: ConfigError) -> Self {
        RunError::Config(e)
    }
}

impl From<Error> for RunError {
    fn from(e: Error) -> Self {
        match e {
            Error::Shape(_) | Error::Index(_) | Error::InvalidInput(_) | Error::TooFewNodes { .. } => {
                RunError::Config(ConfigError(e.to_string()))
            }
            other => RunError::Numeric(other),
        }
    }
}

/// Coordinates attached to a numeric failure.
pub fn failure_coordinates(e: &Error) -> Vec<Vec<f64>> {
    match e {
        Error::Divergence { coordinate, .. } | Error::BlowupAtNode { coordinate, .. } | Error::Blowup { coordinate } => {
            vec![coordinate.clone()]
        }
        Error::NotDecomposableOnGrid { points } => points.clone(),
        _ => vec![],
    }
}

type Run = Result<Outcome, RunError>;

pub fn execute(problem: &Problem) -> Run {
    match problem {
        Problem::Gauss(p) => gauss(p),
        Problem::Flow(p) => flow(p),
        Problem::Riccati(p) => riccati(p),
        Problem::RiccatiMd(p) => riccati_md(p),
        Problem::ClosedForm(p) => closed(p),
        Problem::Toda(p) => toda(p, false),
        Problem::WznwCheck(p) => toda(p, true),
    }
}

fn rel(a: &[CMatrix], b: &[CMatrix]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.max_abs_diff(y) / y.norm_max().max(1.0))
        .fold(0.0, f64::max)
}

fn square(ctx: &GradedContext, m: &CMatrix, what: &str) -> Result<(), ConfigError> {
    let n = ctx.dim();
    if m.shape() != (n, n) {
        return Err(ConfigError(format!("{what} must be {n}x{n}, got {}x{}", m.rows(), m.cols())));
    }
    Ok(())
}

fn names(prefix: &str, d: usize) -> Vec<String> {
    if d == 1 {
        return vec![prefix.into()];
    }
    (1..=d).map(|i| format!("{prefix}{i}")).collect()
}

fn gauss(p: &GaussPayload) -> Run {
    let ctx = context(&p.sizes)?;
    square(&ctx, &p.matrix, "matrix")?;
    if !(p.tol > 0.0) {
        return Err(ConfigError("tol must be positive".into()).into());
    }
    let (factors, rebuilt, order) = if p.opposite {
        let f = gauss_decompose_opposite(&ctx, &p.matrix, p.tol)?;
        let r = f.reconstruct();
        (vec![f.upper, f.zero, f.lower], r, "upper,zero,lower")
    } else {
        let f = gauss_decompose(&ctx, &p.matrix, p.tol)?;
        let r = f.reconstruct();
        (vec![f.lower, f.zero, f.upper], r, "lower,zero,upper")
    };
    let (first, last) = if p.opposite { (Part::Positive, Part::Negative) } else { (Part::Negative, Part::Positive) };
    let structure = ctx
        .unit_triangular_defect(&factors[0], first)?
        .max(ctx.off_diagonal_defect(&factors[1])?)
        .max(ctx.unit_triangular_defect(&factors[2], last)?);
    let mut report = ResidualReport::default();
    report.insert("reconstruction", rebuilt.max_abs_diff(&p.matrix) / p.matrix.norm_max().max(1.0));
    report.insert("structure", structure);
    report.note("order", order);
    let data = Dataset {
        label: String::new(),
        coordinates: vec!["factor".into()],
        axes: None,
        points: (0..3).map(|k| vec![k as f64]).collect(),
        values: factors,
    };
    Ok(Outcome { report, datasets: vec![data] })
}

fn flow(p: &FlowPayload) -> Run {
    let d = match &p.domain {
        Domain::Interval(_) => 1,
        Domain::Grid(g) => g.axes.len(),
    };
    let shape = p.field.0[0].shape().unwrap_or((0, 0));
    if shape.0 != shape.1 || shape.0 == 0 {
        return Err(ConfigError("flow field must be square".into()).into());
    }
    let n = shape.0;
    let field = p.field.build(d, d, shape, "field")?;
    let psi0 = p.initial.clone().unwrap_or_else(|| CMatrix::identity(n));
    if psi0.shape() != (n, n) {
        return Err(ConfigError(format!("initial must be {n}x{n}")).into());
    }
    let mut report = ResidualReport::default();
    let data = match &p.domain {
        Domain::Interval(i) => {
            let coarse = solve_linear_1d(&field, &psi0, (i.lo, i.hi), i.steps, p.side, p.method)?;
            let fine = solve_linear_1d(&field, &psi0, (i.lo, i.hi), 2 * i.steps, p.side, p.method)?;
            let every_other: Vec<CMatrix> = fine.values.iter().step_by(2).cloned().collect();
            report.insert("refinement", rel(&coarse.values, &every_other));
            Dataset::path("", &coarse.nodes, coarse.values)
        }
        Domain::Grid(g) => {
            let axes = g.axes();
            let options = MdOptions {
                side: p.side,
                method: p.method,
                substeps: g.substeps,
                curvature_gate: None,
                ..MdOptions::default()
            };
            let sol = solve_linear_md(&field, &psi0, &axes, &options)?;
            if d >= 2 {
                let curv = zero_curvature_residual_side(&field, &axes, p.side)?;
                report.insert("zero-curvature", curv.max_residual());
                let reversed = MdOptions {
                    order: Some((0..d).rev().collect()),
                    ..options
                };
                let other = solve_linear_md(&field, &psi0, &axes, &reversed)?;
                report.insert("order-discrepancy", rel(sol.grid.values(), other.grid.values()));
            }
            Dataset::grid("", names("x", d), &sol.grid)
        }
    };
    report.note("side", format!("{:?}", p.side));
    Ok(Outcome { report, datasets: vec![data] })
}

fn problem(
    ctx: &GradedContext,
    field: MatrixField,
    m: &Option<CMatrix>,
    initial: &Option<CMatrix>,
    component: graded_riccati::riccati::Component,
) -> Result<RiccatiProblem, RunError> {
    let n = ctx.dim();
    Ok(match (m, initial) {
        (Some(_), Some(_)) => return Err(ConfigError("give either m or initial, not both".into()).into()),
        (Some(m), None) => RiccatiProblem::two_block(ctx.clone(), field, m, component)?,
        (None, Some(a)) => RiccatiProblem::new(ctx.clone(), field, a.clone(), component)?,
        (None, None) => RiccatiProblem::new(ctx.clone(), field, CMatrix::identity(n), component)?,
    })
}

/// Primary solution plus, for two blocks, the `U` block.
fn solution_sets(sol: &RiccatiSolution, label: &str, coordinates: Vec<String>) -> Result<Vec<Dataset>, RunError> {
    let grid = sol.grid();
    let mut out = vec![Dataset::grid(label, coordinates.clone(), &grid)];
    if sol.ctx.blocks() == 2 {
        let u = FieldOnGrid::new(grid.axes().to_vec(), sol.u()?)?;
        let ulabel = if label.is_empty() { "u".to_string() } else { format!("{label}-u") };
        out.push(Dataset::grid(&ulabel, coordinates, &u));
    }
    Ok(out)
}

fn solve_pair(
    solver: Solver,
    direct: impl FnOnce() -> graded_riccati::Result<RiccatiSolution>,
    linear: impl FnOnce() -> graded_riccati::Result<RiccatiSolution>,
    report: &mut ResidualReport,
) -> Result<(RiccatiSolution, Option<RiccatiSolution>), RunError> {
    Ok(match solver {
        Solver::Direct => (direct()?, None),
        Solver::Linearization => (linear()?, None),
        Solver::Both => {
            let a = direct()?;
            let b = linear()?;
            report.insert("method-discrepancy", a.relative_diff(&b));
            (a, Some(b))
        }
    })
}

fn riccati(p: &RiccatiPayload) -> Run {
    let ctx = context(&p.sizes)?;
    let n = ctx.dim();
    let field = p.field.build(1, 1, (n, n), "field")?;
    let prob = problem(&ctx, field.clone(), &p.m, &p.initial, p.component)?;
    let interval = (p.interval.lo, p.interval.hi);
    let steps = p.interval.steps;
    let mut report = ResidualReport::default();
    let (main, second) = solve_pair(
        p.solver,
        || solve_direct(&prob, interval, steps),
        || solve_by_linearization_with(&prob, interval, steps, p.method),
        &mut report,
    )?;
    report.merge("substitution ", substitution_residual(&field, &main, STENCIL)?);
    let mut datasets = solution_sets(&main, "", vec!["x".into()])?;
    if let Some(s) = second {
        datasets.extend(solution_sets(&s, "linearization", vec!["x".into()])?);
    }
    report.note("solver", format!("{:?}", p.solver));
    Ok(Outcome { report, datasets })
}

fn riccati_md(p: &RiccatiMdPayload) -> Run {
    let ctx = context(&p.sizes)?;
    let n = ctx.dim();
    let axes = p.grid.axes();
    let d = axes.len();
    let field = p.field.build(d, d, (n, n), "field")?;
    let prob = problem(&ctx, field.clone(), &p.m, &p.initial, p.component)?;
    let mut report = ResidualReport::default();
    if d >= 2 {
        report.insert("zero-curvature", zero_curvature_residual_side(&field, &axes, Side::Right)?.max_residual());
    }
    let (main, second) = solve_pair(
        p.solver,
        || solve_direct_md(&prob, &axes, None, p.grid.substeps),
        || solve_by_linearization_md(&prob, &axes, p.grid.substeps),
        &mut report,
    )?;
    report.merge("substitution ", substitution_residual(&field, &main, STENCIL)?);
    let mut datasets = solution_sets(&main, "", names("x", d))?;
    if let Some(s) = second {
        datasets.extend(solution_sets(&s, "linearization", names("x", d))?);
    }
    Ok(Outcome { report, datasets })
}

/// Assembles a one-coordinate field from blocks of `ctx`.
fn block_field(ctx: &GradedContext, blocks: Vec<(usize, usize, MatrixField)>, dim_in: usize, comps: usize) -> MatrixField {
    let ctx = ctx.clone();
    let n = ctx.dim();
    MatrixField::multi(dim_in, comps, (n, n), move |c, x| {
        let mut m = CMatrix::zeros(n, n);
        for (r, s, f) in &blocks {
            match f.eval(c, x) {
                Ok(v) => ctx.block_set(&mut m, *r, *s, &v).expect("block shapes checked"),
                Err(_) => return CMatrix::from_fn(n, n, |_, _| f64::NAN.into()),
            }
        }
        m
    })
}

fn one(spec: &FieldSpec, what: &str) -> Result<MatrixField, ConfigError> {
    spec.build(1, what)
}

fn shape_of(spec: &FieldSpec, what: &str) -> Result<(usize, usize), ConfigError> {
    spec.shape().ok_or_else(|| ConfigError(format!("{what}: empty field")))
}

fn closed(p: &ClosedPayload) -> Run {
    let mut report = ResidualReport::default();
    report.note("family", p.family());
    let compare = |closed: Vec<CMatrix>, numeric: Vec<CMatrix>, nodes: &[f64], report: &mut ResidualReport| {
        report.insert("closed-vs-numeric", rel(&closed, &numeric));
        vec![Dataset::path("", nodes, closed), Dataset::path("numeric", nodes, numeric)]
    };
    let two_block_direct = |ctx: &GradedContext, field: MatrixField, m: &CMatrix, x: f64, steps: usize| -> Result<Vec<CMatrix>, RunError> {
        let prob = RiccatiProblem::two_block(ctx.clone(), field, m, Default::default())?;
        Ok(solve_direct(&prob, (0.0, x), steps)?.u()?)
    };
    let datasets = match p {
        ClosedPayload::BZero { a, c, d, m, x, steps } => {
            let (n1, n2) = (shape_of(a, "a")?.0, shape_of(d, "d")?.0);
            let ctx = context(&[n1, n2])?;
            let (a, c, d) = (one(a, "a")?, one(c, "c")?, one(d, "d")?);
            let field = block_field(&ctx, vec![(0, 0, a.clone()), (1, 0, c.clone()), (1, 1, d.clone())], 1, 1);
            let closed = solve_b_zero_path(&TriangularCoeffs1D::new(a, c, d, m.clone())?, *x, *steps)?;
            let numeric = two_block_direct(&ctx, field, m, *x, *steps)?;
            compare(closed.values, numeric, &closed.nodes, &mut report)
        }
        ClosedPayload::CEqualsB { b, m, x, steps } => {
            let n = shape_of(b, "b")?.0;
            let ctx = context(&[n, n])?;
            let b = one(b, "b")?;
            let field = block_field(&ctx, vec![(0, 1, b.clone()), (1, 0, b.clone())], 1, 1);
            let closed = solve_cb_equal_path(&b, m, *x, *steps)?;
            let numeric = two_block_direct(&ctx, field, m, *x, *steps)?;
            compare(closed.values, numeric, &closed.nodes, &mut report)
        }
        ClosedPayload::ConstantBc { b, c, m, x, steps } => {
            let family = ConstantBC::new(b.clone(), c.clone(), m.clone())?;
            let n = b.rows();
            let ctx = context(&[n, n])?;
            let mut lam = CMatrix::zeros(2 * n, 2 * n);
            lam.set_submatrix(0, n, b);
            lam.set_submatrix(n, 0, c);
            if *steps == 0 {
                return Err(ConfigError("steps must be at least 1".into()).into());
            }
            let nodes = uniform_axis(0.0, *x, steps + 1);
            let closed = nodes.iter().map(|&t| solve_constant_bc(&family, t)).collect::<Result<Vec<_>, _>>()?;
            let numeric = two_block_direct(&ctx, MatrixField::constant(1, lam), m, *x, *steps)?;
            compare(closed, numeric, &nodes, &mut report)
        }
        ClosedPayload::ThreeBlockNilpotent { c21, c31, c32, m12, m13, m23, x, steps } => {
            let (n2, n1) = shape_of(c21, "c21")?;
            let n3 = shape_of(c31, "c31")?.0;
            let ctx = context(&[n1, n2, n3])?;
            let sys = ThreeBlockNilpotent {
                c21: one(c21, "c21")?,
                c31: one(c31, "c31")?,
                c32: one(c32, "c32")?,
                m12: m12.clone(),
                m13: m13.clone(),
                m23: m23.clone(),
            };
            let closed = three_block_trajectory(&sys, *x, *steps)?;
            let field = block_field(
                &ctx,
                vec![(1, 0, sys.c21.clone()), (2, 0, sys.c31.clone()), (2, 1, sys.c32.clone())],
                1,
                1,
            );
            let mut initial = CMatrix::identity(ctx.dim());
            ctx.block_set(&mut initial, 0, 1, m12)?;
            ctx.block_set(&mut initial, 0, 2, m13)?;
            ctx.block_set(&mut initial, 1, 2, m23)?;
            let prob = RiccatiProblem::upper(ctx, field, initial)?;
            let numeric = solve_direct(&prob, (0.0, *x), *steps)?;
            compare(closed.values, numeric.values().to_vec(), &closed.nodes, &mut report)
        }
        ClosedPayload::MdNilpotent { c, m, grid } => {
            let axes = grid.axes();
            let d = axes.len();
            let shape = c.0[0].shape().ok_or_else(|| ConfigError("c: empty field".into()))?;
            let (n2, n1) = shape;
            let cf = c.build(d, d, shape, "c")?;
            let probe = FieldOnGrid::from_fn(axes.clone(), |_| Ok(CMatrix::zeros(1, 1)))?;
            report.insert("curl", curl_residual(&cf, &probe.points())?);
            let closed = solve_md_nilpotent_grid(&cf, m, &axes, grid.substeps)?;
            let ctx = context(&[n1, n2])?;
            let field = block_field(&ctx, vec![(1, 0, cf)], d, d);
            let prob = RiccatiProblem::two_block(ctx, field, m, Default::default())?;
            let numeric = solve_direct_md(&prob, &axes, None, grid.substeps)?;
            let numeric = FieldOnGrid::new(axes.clone(), numeric.u()?)?;
            report.insert("closed-vs-numeric", rel(closed.values(), numeric.values()));
            vec![Dataset::grid("", names("x", d), &closed), Dataset::grid("numeric", names("x", d), &numeric)]
        }
    };
    Ok(Outcome { report, datasets })
}

fn toda_data(spec: &TodaDataSpec, axes: &[Vec<f64>]) -> Result<TodaData, RunError> {
    let d = spec.d();
    if d == 0 {
        return Err(ConfigError("d must be positive".into()).into());
    }
    if axes.len() != 2 * d {
        return Err(ConfigError(format!("the grid needs {} axes for d = {d}", 2 * d)).into());
    }
    let optional = |f: &Option<FieldSpec>, dim: usize, what: &str| f.as_ref().map(|f| f.build(dim, what)).transpose();
    Ok(match spec {
        TodaDataSpec::General { sizes, d, gamma_minus, gamma_plus, c_minus, c_plus, xi_minus, xi_plus } => {
            let ctx = context(sizes)?;
            let n = ctx.dim();
            let dim = 2 * d;
            TodaData::new(
                ctx,
                *d,
                gamma_minus.build(dim, "gamma_minus")?,
                gamma_plus.build(dim, "gamma_plus")?,
                c_minus.build(dim, *d, (n, n), "c_minus")?,
                c_plus.build(dim, *d, (n, n), "c_plus")?,
                optional(xi_minus, dim, "xi_minus")?,
                optional(xi_plus, dim, "xi_plus")?,
            )?
        }
        TodaDataSpec::Nonabelian { d, f_minus, h_minus, f_plus, h_plus, xi_plus, xi_minus } => {
            let spec = NonabelianSpec {
                d: *d,
                f_minus: f_minus.build(*d, "f_minus")?,
                h_minus: h_minus.build(*d, "h_minus")?,
                f_plus: f_plus.build(*d, "f_plus")?,
                h_plus: h_plus.build(*d, "h_plus")?,
                xi_plus: optional(xi_plus, *d, "xi_plus")?,
                xi_minus: optional(xi_minus, *d, "xi_minus")?,
            };
            maximally_nonabelian_data(&spec, axes)?
        }
    })
}

fn toda_coordinates(d: usize) -> Vec<String> {
    let mut c = names("zm", d);
    c.extend(names("zp", d));
    c
}

fn toda(p: &TodaPayload, wznw: bool) -> Run {
    let axes = p.grid.axes();
    let data = toda_data(&p.data, &axes)?;
    let d = data.d;
    let options = TodaOptions {
        substeps: p.grid.substeps,
        ..TodaOptions::default()
    };
    let sol: TodaSolution = construct_solution(&data, &axes, &options)?;
    let mut report = sol.report.clone();
    let gamma = Dataset::grid(if wznw { "gamma" } else { "" }, toda_coordinates(d), &sol.gamma);
    let mut datasets = vec![];
    if wznw {
        let w = reconstruct_wznw(&sol, &data, STENCIL)?;
        report.merge("", w.report);
        report.merge("", connection_curvature(&sol.gamma, &data.c_minus, &data.c_plus, STENCIL)?);
        datasets.push(Dataset::grid("", toda_coordinates(d), &w.psi));
    }
    datasets.push(gamma);
    if let Some(f) = &p.riccati {
        let rr = redheffer_reid_fields(&data, &axes)?;
        report.merge("", rr.zero_curvature(&axes)?);
        let fam = riccati_md_solutions(&data, &sol, &f.m_minus, &f.m_plus)?;
        report.merge("family ", riccati_md_substitution(&data, &rr, &fam, STENCIL)?);
        datasets.extend(solution_sets(&fam.minus, "riccati-minus", names("zm", d))?);
        datasets.extend(solution_sets(&fam.plus, "riccati-plus", names("zp", d))?);
    }
    Ok(Outcome { report, datasets })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::Scenario;

    fn run(text: &str) -> Run {
        execute(&Scenario::parse(text).unwrap().problem)
    }

    #[test]
    fn identity_factors_are_identity() {
        let out = run(r#"{"version": 1, "name": "g", "kind": "gauss",
            "payload": {"sizes": [1, 2], "matrix": [[1,0,0],[0,1,0],[0,0,1]]}}"#)
        .unwrap();
        assert!(out.datasets[0].values.iter().all(|v| v.max_abs_diff(&CMatrix::identity(3)) == 0.0));
        assert_eq!(out.report.max_residual(), 0.0);
    }

    #[test]
    fn singular_leading_minor_is_numeric() {
        let e = run(r#"{"version": 1, "name": "g", "kind": "gauss",
            "payload": {"sizes": [1, 1], "matrix": [[0,1],[1,1]]}}"#)
        .unwrap_err();
        assert!(matches!(e, RunError::Numeric(Error::NotDecomposable { .. })));
    }

    #[test]
    fn shape_mismatch_is_config() {
        let e = run(r#"{"version": 1, "name": "g", "kind": "gauss",
            "payload": {"sizes": [1, 1], "matrix": [[1]]}}"#)
        .unwrap_err();
        assert!(matches!(e, RunError::Config(_)));
    }

    #[test]
    fn commuting_flow_is_path_independent() {
        let out = run(r#"{"version": 1, "name": "f", "kind": "flow", "payload": {
            "field": [{"constant": [[0.3, 0.1], [0, -0.2]]}, {"constant": [[0.6, 0.2], [0, -0.4]]}],
            "domain": {"grid": {"axes": [{"lo": 0, "hi": 1, "nodes": 5}, {"lo": 0, "hi": 1, "nodes": 5}]}}}}"#)
        .unwrap();
        assert!(out.report.residuals["zero-curvature"] < 1e-12);
        assert!(out.report.residuals["order-discrepancy"] < 1e-8);
    }

    #[test]
    fn blowup_reports_a_coordinate() {
        // U' = 1 + U², U(0) = 0 is tan x, singular at pi/2.
        let e = run(r#"{"version": 1, "name": "r", "kind": "riccati", "payload": {
            "sizes": [1, 1], "field": {"constant": [[0, 1], [-1, 0]]}, "m": [[0]],
            "interval": {"lo": 0, "hi": 2, "steps": 400}, "solver": "linearization"}}"#)
        .unwrap_err();
        let RunError::Numeric(e) = e else { panic!("{e:?}") };
        let c = failure_coordinates(&e);
        assert_eq!(c.len(), 1);
        assert!((c[0][0] - std::f64::consts::FRAC_PI_2).abs() < 0.01, "{c:?}");
    }
}

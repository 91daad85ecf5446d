//! Command implementations. Each returns a [`Table`] of results.

use std::collections::BTreeMap;
use std::sync::Arc;

use dunkl_frft::checks::{CheckOptions, run_suite, tolerance_scale_from_env};
use dunkl_frft::eval::{Evaluable, FnEval, GridSamples, HermiteCombo};
use dunkl_frft::polyengine::{GaussPoly, HermiteBasis};
use dunkl_frft::quadrature::{GridSpec, QuadGrid};
use dunkl_frft::semigroup::{GroupSampler, distance_to_imaginary_integers, resolvent_apply, spectral_projection};
use dunkl_frft::specfun::{BesselOrder, laguerre_eval};
use dunkl_frft::transform::{
    DEFAULT_S_MIN, Route, TransformPlan, fdt, fdt_integral_grid_samples, fdt_spectral, fdt_spectral_samples,
    fractional_hankel, kernel_alpha, kernel_smoothed, kernel_spectral,
};
use num_complex::Complex64;
use serde_json::{Value, json};

use crate::config::{FunctionInput, FunctionSpec, JobConfig, KernelKind, OutputSpec, UsageError, Vary};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
}

/// Tabular result with free-form notes.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    pub notes: BTreeMap<String, Value>,
    /// False when a check failed.
    pub passed: bool,
}

impl Table {
    fn new(columns: Vec<String>) -> Self {
        Self { columns, rows: Vec::new(), notes: BTreeMap::new(), passed: true }
    }

    fn note(&mut self, key: &str, value: Value) {
        self.notes.insert(key.to_string(), value);
    }
}

#[derive(Debug)]
pub enum JobError {
    Usage(UsageError),
    Numeric(dunkl_frft::Error),
}

impl std::fmt::Display for JobError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            JobError::Usage(e) => write!(f, "{e}"),
            JobError::Numeric(e) => write!(f, "{e}"),
        }
    }
}

impl From<UsageError> for JobError {
    fn from(e: UsageError) -> Self {
        JobError::Usage(e)
    }
}

impl From<dunkl_frft::Error> for JobError {
    fn from(e: dunkl_frft::Error) -> Self {
        JobError::Numeric(e)
    }
}

type JobResult<T> = Result<T, JobError>;

fn at_field<T>(r: dunkl_frft::Result<T>, field: &str) -> JobResult<T> {
    r.map_err(|e| JobError::Usage(UsageError::new(field, e.to_string())))
}

fn axis_names(prefix: &str, dim: usize) -> Vec<String> {
    (1..=dim).map(|j| format!("{prefix}{j}")).collect()
}

fn complex_cells(v: Complex64) -> [Cell; 2] {
    [Cell::Num(v.re), Cell::Num(v.im)]
}

fn point_cells(x: &[f64]) -> impl Iterator<Item = Cell> + '_ {
    x.iter().map(|&v| Cell::Num(v))
}

fn job_grid(cfg: &JobConfig) -> JobResult<Arc<QuadGrid>> {
    let g = cfg.grid.as_ref().expect("resolved grid");
    let spec = GridSpec {
        dim: cfg.dim(),
        half_width: g.half_width.unwrap(),
        points_per_axis: g.points_per_axis.unwrap(),
        mu: cfg.mu.clone().unwrap(),
    };
    Ok(Arc::new(at_field(QuadGrid::from_spec(&spec), "grid")?))
}

fn job_plan(cfg: &JobConfig, grid: Arc<QuadGrid>) -> JobResult<TransformPlan> {
    let mut plan = at_field(TransformPlan::with_grid(grid, cfg.alpha.unwrap_or(1.0), cfg.degree.unwrap()), "alpha")?;
    if let Some(s) = cfg.s_min {
        plan = at_field(plan.with_s_min(s), "s_min")?;
    }
    at_field(plan.with_r(cfg.r.unwrap()), "r")
}

fn output_points(cfg: &JobConfig, grid: &QuadGrid) -> Vec<Vec<f64>> {
    let dim = cfg.dim();
    match cfg.output.as_ref().expect("resolved output") {
        OutputSpec::Points(p) => p.clone(),
        OutputSpec::QuadratureGrid => grid.nodes().map(|x| x.to_vec()).collect(),
        OutputSpec::Uniform(u) => {
            let axis: Vec<f64> = if u.count == 1 {
                vec![0.0]
            } else {
                (0..u.count).map(|i| -u.half_width + 2.0 * u.half_width * i as f64 / (u.count - 1) as f64).collect()
            };
            let mut out = vec![Vec::new()];
            for _ in 0..dim {
                out = out.into_iter().flat_map(|p| axis.iter().map(move |&v| [p.clone(), vec![v]].concat())).collect();
            }
            out
        }
    }
}

type PointFn = Box<dyn Fn(&[f64]) -> Complex64 + Sync>;

/// A function spec turned into something the library can sample.
enum Input {
    Combo(HermiteCombo),
    Poly(GaussPoly),
    Samples(GridSamples),
    Closure(PointFn, usize),
}

impl Input {
    fn with<R>(&self, f: impl FnOnce(&dyn Evaluable) -> R) -> R {
        match self {
            Input::Combo(c) => f(c),
            Input::Poly(p) => f(p),
            Input::Samples(s) => f(s),
            Input::Closure(g, dim) => f(&FnEval::new(*dim, |x: &[f64]| g(x))),
        }
    }
}

fn function_spec(cfg: &JobConfig) -> &FunctionSpec {
    match cfg.function.as_ref().expect("resolved function") {
        FunctionInput::Spec(s) => s,
        FunctionInput::Named(_) => unreachable!("resolution replaces names"),
    }
}

fn build_input(cfg: &JobConfig, grid: &Arc<QuadGrid>) -> JobResult<Input> {
    let mult = cfg.mult();
    let dim = mult.dim();
    Ok(match function_spec(cfg).clone() {
        FunctionSpec::HermiteCombo { terms } => {
            let degree = terms.iter().map(|t| t.nu.iter().sum::<u32>() as usize).max().unwrap_or(0);
            let basis = Arc::new(at_field(HermiteBasis::new(&mult, degree), "function.terms")?);
            let pairs: Vec<(Vec<u32>, Complex64)> =
                terms.iter().map(|t| (t.nu.clone(), Complex64::new(t.re, t.im))).collect();
            Input::Combo(at_field(HermiteCombo::from_pairs(basis, &pairs), "function.terms")?)
        }
        FunctionSpec::GaussPoly { poly, scale } => Input::Poly(GaussPoly::with_scale(poly, scale.unwrap_or(1.0))),
        FunctionSpec::Samples { values } => {
            let values: Vec<Complex64> = values.iter().map(|v| Complex64::new(v[0], v[1])).collect();
            Input::Samples(at_field(GridSamples::new(grid, values), "function.values")?)
        }
        FunctionSpec::Gaussian { width, center } => {
            let (b, c) = (width.unwrap(), center.unwrap());
            Input::Closure(
                Box::new(move |x: &[f64]| {
                    let d2: f64 = x.iter().zip(&c).map(|(a, b)| (a - b) * (a - b)).sum();
                    Complex64::new((-b * d2 / 2.0).exp(), 0.0)
                }),
                dim,
            )
        }
        FunctionSpec::LaguerreGaussian { m, a } => {
            let a = a.unwrap();
            Input::Closure(
                Box::new(move |x: &[f64]| {
                    let r2: f64 = x.iter().map(|v| v * v).sum();
                    Complex64::new(laguerre_eval(m, a, r2) * (-r2 / 2.0).exp(), 0.0)
                }),
                dim,
            )
        }
    })
}

fn sample_input(input: &Input, grid: &QuadGrid) -> JobResult<Vec<Complex64>> {
    Ok(input.with(|f| f.sample_on(grid))?)
}

/// Runs a resolved config.
pub fn run_job(cfg: &JobConfig) -> JobResult<Table> {
    use crate::config::Command::*;
    match cfg.command() {
        Basis => basis(cfg),
        Kernel => kernel(cfg),
        Transform => transform(cfg),
        Hankel => hankel(cfg),
        Projection => projection(cfg),
        Resolvent => resolvent(cfg),
        Check => check(cfg),
        Convergence => convergence(cfg),
    }
}

fn basis(cfg: &JobConfig) -> JobResult<Table> {
    let mult = cfg.mult();
    let dim = mult.dim();
    let grid = job_grid(cfg)?;
    let basis = at_field(HermiteBasis::new(&mult, cfg.degree.unwrap()), "degree")?;
    let xs = output_points(cfg, &grid);
    let mut t = Table::new([axis_names("nu", dim), axis_names("x", dim), vec!["value".into()]].concat());
    for x in &xs {
        let values = basis.eval_all(x)?;
        for (nu, v) in basis.indices().iter().zip(values) {
            let mut row: Vec<Cell> = nu.iter().map(|&k| Cell::Int(k as i64)).collect();
            row.extend(point_cells(x));
            row.push(Cell::Num(v));
            t.rows.push(row);
        }
    }
    // Gram residual on the job grid, a check that the basis is resolved.
    let rows: Vec<Vec<f64>> = grid.nodes().map(|x| basis.eval_all(x)).collect::<Result<_, _>>()?;
    let k = basis.indices().len();
    let mut gram: f64 = 0.0;
    for a in 0..k {
        for b in a..k {
            let g: f64 = rows.iter().zip(grid.weights()).map(|(r, w)| r[a] * r[b] * w).sum();
            gram = gram.max((g - if a == b { 1.0 } else { 0.0 }).abs());
        }
    }
    t.note("gram_residual", json!(gram));
    t.note("basis_size", json!(k));
    Ok(t)
}

fn kernel(cfg: &JobConfig) -> JobResult<Table> {
    let dim = cfg.dim();
    let grid = job_grid(cfg)?;
    let plan = job_plan(cfg, grid.clone())?;
    let xs = output_points(cfg, &grid);
    let ys = cfg.y_points.clone().unwrap();
    let kind = cfg.kernel.unwrap();
    let a_alpha = if kind == KernelKind::Alpha { Some(at_field(plan.a_alpha(), "alpha")?) } else { None };
    let mut t = Table::new([axis_names("x", dim), axis_names("y", dim), vec!["re".into(), "im".into()]].concat());
    for x in &xs {
        for y in &ys {
            let v = match kind {
                KernelKind::Alpha => a_alpha.unwrap() * at_field(kernel_alpha(&plan, x, y), "alpha")?,
                KernelKind::Smoothed => at_field(kernel_smoothed(&plan, x, y), "r")?,
                KernelKind::Spectral => kernel_spectral(&plan, x, y)?,
            };
            t.rows.push(point_cells(x).chain(point_cells(y)).chain(complex_cells(v)).collect());
        }
    }
    t.note("regime", json!(plan.regime()));
    Ok(t)
}

fn transform(cfg: &JobConfig) -> JobResult<Table> {
    let dim = cfg.dim();
    let grid = job_grid(cfg)?;
    let plan = job_plan(cfg, grid.clone())?;
    let input = build_input(cfg, &grid)?;
    let xs = output_points(cfg, &grid);
    let route = cfg.route.unwrap();
    let values = at_field(input.with(|f| fdt(f, &plan, route, &xs)), "route")?;
    let mut t = Table::new([axis_names("x", dim), vec!["re".into(), "im".into()]].concat());
    for (x, v) in xs.iter().zip(values) {
        t.rows.push(point_cells(x).chain(complex_cells(v)).collect());
    }
    t.note("regime", json!(plan.regime()));
    t.note("alpha_normalized", json!(plan.alpha()));
    t.note("s_min", json!(plan.s_min()));
    if route == Route::Spectral {
        t.note("coefficient_tail", json!(input.with(|f| fdt_spectral(f, &plan))?.tail));
    }
    Ok(t)
}

fn hankel(cfg: &JobConfig) -> JobResult<Table> {
    let grid = job_grid(cfg)?;
    let plan = job_plan(cfg, grid.clone())?;
    let order = at_field(BesselOrder::new(cfg.order.unwrap()), "order")?;
    let psi: Box<dyn Fn(f64) -> Complex64 + Sync> = match function_spec(cfg).clone() {
        FunctionSpec::Gaussian { width, .. } => {
            let b = width.unwrap();
            Box::new(move |y: f64| Complex64::new((-b * y * y / 2.0).exp(), 0.0))
        }
        FunctionSpec::LaguerreGaussian { m, a } => {
            let a = a.unwrap();
            Box::new(move |y: f64| Complex64::new(laguerre_eval(m, a, y * y) * (-y * y / 2.0).exp(), 0.0))
        }
        _ => unreachable!("resolution admits radial families only"),
    };
    let mut radii: Vec<f64> =
        output_points(cfg, &grid).iter().map(|x| x.iter().map(|v| v * v).sum::<f64>().sqrt()).collect();
    radii.sort_by(f64::total_cmp);
    radii.dedup();
    let mut t = Table::new(vec!["radius".into(), "re".into(), "im".into()]);
    for r in radii {
        let v = at_field(fractional_hankel(&*psi, order, &plan, r), "alpha")?;
        t.rows.push([Cell::Num(r)].into_iter().chain(complex_cells(v)).collect());
    }
    t.note("order", json!(order.value()));
    Ok(t)
}

fn sampler_for(cfg: &JobConfig, grid: Arc<QuadGrid>) -> JobResult<GroupSampler> {
    let basis = Arc::new(at_field(HermiteBasis::new(&cfg.mult(), cfg.degree.unwrap()), "degree")?);
    at_field(GroupSampler::new(grid, basis, cfg.q.unwrap()), "q")
}

fn combo_on_sampler(cfg: &JobConfig, sampler: &GroupSampler) -> JobResult<(HermiteCombo, f64)> {
    let grid = sampler.grid().clone();
    let input = build_input(cfg, &grid)?;
    let samples = sample_input(&input, &grid)?;
    let coeffs = dunkl_frft::transform::hermite_coefficients(&samples, &grid, sampler.basis())?;
    let norm2 = grid.inner_product_samples(&samples, &samples)?.re;
    let captured: f64 = coeffs.coeffs().iter().map(|c| c.norm_sqr()).sum();
    Ok((coeffs, (norm2 - captured).max(0.0).sqrt()))
}

fn coefficient_table(cfg: &JobConfig, f: &HermiteCombo) -> Table {
    let mut t = Table::new([axis_names("nu", cfg.dim()), vec!["re".into(), "im".into()]].concat());
    for (nu, c) in f.terms() {
        let row: Vec<Cell> = nu.iter().map(|&k| Cell::Int(k as i64)).chain(complex_cells(c)).collect();
        t.rows.push(row);
    }
    t
}

fn projection(cfg: &JobConfig) -> JobResult<Table> {
    let grid = job_grid(cfg)?;
    let sampler = sampler_for(cfg, grid)?;
    let (f, tail) = combo_on_sampler(cfg, &sampler)?;
    let p = spectral_projection(&f, cfg.n.unwrap(), &sampler)?;
    let mut t = coefficient_table(cfg, &p);
    t.note("projection_norm", json!(p.norm()));
    t.note("input_norm_captured", json!(f.norm()));
    t.note("coefficient_tail", json!(tail));
    Ok(t)
}

fn resolvent(cfg: &JobConfig) -> JobResult<Table> {
    let grid = job_grid(cfg)?;
    let sampler = sampler_for(cfg, grid)?;
    let (f, tail) = combo_on_sampler(cfg, &sampler)?;
    let [re, im] = cfg.lambda.unwrap();
    let lambda = Complex64::new(re, im);
    let r = at_field(resolvent_apply(&f, lambda, &sampler), "lambda")?;
    let mut t = coefficient_table(cfg, &r);
    t.note("distance_to_spectrum", json!(distance_to_imaginary_integers(lambda)));
    t.note("coefficient_tail", json!(tail));
    Ok(t)
}

fn check(cfg: &JobConfig) -> JobResult<Table> {
    let env_scale = at_field(tolerance_scale_from_env(), "DUNKL_FRFT_TOL")?;
    let g = cfg.grid.as_ref().unwrap();
    let opts = CheckOptions {
        mu: cfg.mu.clone().unwrap(),
        degree: cfg.degree.unwrap(),
        alphas: cfg.alphas.clone().unwrap(),
        seed: cfg.seed.unwrap(),
        samples: cfg.samples.unwrap(),
        tolerance_scale: cfg.tolerance_scale.unwrap() * env_scale,
        grid: Some(GridSpec {
            dim: cfg.dim(),
            half_width: g.half_width.unwrap(),
            points_per_axis: g.points_per_axis.unwrap(),
            mu: cfg.mu.clone().unwrap(),
        }),
    };
    let rows = at_field(run_suite(cfg.suite.as_deref().unwrap(), &opts), "suite")?;
    let overrides = cfg.tolerances.clone().unwrap_or_default();
    for key in overrides.keys() {
        if !rows.iter().any(|r| format!("{}.{}", r.suite, r.check) == *key) {
            return Err(UsageError::new(format!("tolerances.{key}"), "no such check in the selected suites").into());
        }
    }
    let mut t = Table::new(["suite", "check", "measured", "tolerance", "status"].map(String::from).to_vec());
    for row in rows {
        let key = format!("{}.{}", row.suite, row.check);
        let tolerance = overrides.get(&key).map_or(row.tolerance, |v| v * opts.tolerance_scale);
        let passed = row.measured <= tolerance;
        t.passed &= passed;
        t.rows.push(vec![
            Cell::Text(row.suite),
            Cell::Text(row.check),
            Cell::Num(row.measured),
            Cell::Num(tolerance),
            Cell::Text(if passed { "PASS" } else { "FAIL" }.into()),
        ]);
    }
    t.note("tolerance_scale", json!(opts.tolerance_scale));
    Ok(t)
}

fn convergence(cfg: &JobConfig) -> JobResult<Table> {
    let values = cfg.values.clone().unwrap();
    let vary = cfg.vary.unwrap();
    let column = match vary {
        Vary::R => "r",
        Vary::Points => "points_per_axis",
        Vary::Degree => "degree",
    };
    let mut t = Table::new(vec![column.into(), "residual".into()]);
    let mut residuals = Vec::new();
    match vary {
        Vary::R => {
            let grid = job_grid(cfg)?;
            let plan = job_plan(cfg, grid.clone())?;
            let xs = output_points(cfg, &grid);
            let ys = cfg.y_points.clone().unwrap();
            let a = at_field(plan.a_alpha(), "alpha")?;
            let mut limits = Vec::new();
            for x in &xs {
                for y in &ys {
                    limits.push(a * at_field(kernel_alpha(&plan, x, y), "alpha")?);
                }
            }
            for &r in &values {
                let pr = at_field(plan.clone().with_r(r), "values")?;
                let mut worst: f64 = 0.0;
                let mut k = 0;
                for x in &xs {
                    for y in &ys {
                        worst = worst.max((kernel_smoothed(&pr, x, y)? - limits[k]).norm());
                        k += 1;
                    }
                }
                residuals.push(worst);
            }
            t.note("quantity", json!("max |K_alpha(r, x, y) - A_alpha K_alpha(x, y)| over output and y points"));
        }
        Vary::Points => {
            let mult = cfg.mult();
            let half_width = cfg.grid.as_ref().unwrap().half_width.unwrap();
            for &n in &values {
                let grid = QuadGrid::new(&mult, half_width, n as usize)
                    .map_err(|e| UsageError::new("values", format!("{n} points per axis: {e}")))?;
                let grid = Arc::new(grid);
                // Keep the fixed floor so under-resolved grids show up as residuals, not refusals.
                let mut plan = job_plan(cfg, grid.clone())?;
                if cfg.s_min.is_none() {
                    plan = at_field(plan.with_s_min(DEFAULT_S_MIN), "alpha")?;
                }
                let input = build_input(cfg, &grid)?;
                let samples = sample_input(&input, &grid)?;
                let integral = at_field(fdt_integral_grid_samples(&samples, &plan), "alpha")?;
                let spectral = fdt_spectral_samples(&samples, &plan)?.output.sample_on(&grid)?;
                let d: Vec<Complex64> = integral.iter().zip(&spectral).map(|(a, b)| a - b).collect();
                residuals.push(grid.norm_samples(&d)?);
            }
            t.note("quantity", json!("L2 distance between integral and spectral routes on each grid"));
        }
        Vary::Degree => {
            let grid = job_grid(cfg)?;
            let input = build_input(cfg, &grid)?;
            for &m in &values {
                let plan = at_field(TransformPlan::with_grid(grid.clone(), 1.0, m as usize), "values")?;
                let tail = input.with(|f| fdt_spectral(f, &plan))?.tail;
                residuals.push(tail);
            }
            t.note("quantity", json!("spectral coefficient tail (norm of the part beyond the truncation)"));
        }
    }
    let monotone = residuals.windows(2).all(|w| w[1] <= w[0]);
    for (v, r) in values.iter().zip(&residuals) {
        let first = if vary == Vary::R { Cell::Num(*v) } else { Cell::Int(*v as i64) };
        t.rows.push(vec![first, Cell::Num(*r)]);
    }
    t.note("monotone", json!(monotone));
    Ok(t)
}

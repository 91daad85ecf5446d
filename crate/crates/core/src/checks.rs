//! Named invariant suites with measured residuals and pinned tolerances, as
//! run by the command-line `check` command.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eval::{Evaluable, FnEval, HermiteCombo};
use crate::polyengine::{GaussPoly, HermiteBasis, MultiPoly, harmonic_basis, homogeneous_indices};
use crate::quadrature::{GridSpec, QuadGrid, WeightedCircleGrid};
use crate::rational::qc_one;
use crate::semigroup::{
    DEFAULT_Q, GroupSampler, difference_quotient, distance_to_imaginary_integers, generator_exact, generator_integral,
    observed_order, resolvent_apply, shifted_generator_combo, spectral_projection,
};
use crate::specfun::{BesselOrder, Multiplicity, dunkl_kernel_1d, normalized_ibessel, normalized_ibessel_series};
use crate::transform::{
    Regime, TransformPlan, eigen_psi, fdt_integral, fdt_integral_grid_samples, fdt_integral_on_grid,
    fdt_integral_samples, fdt_smoothed_on_grid, fdt_spectral, fractional_hankel, funk_hecke_check,
    gaussian_bilinear_check, kernel_alpha, kernel_smoothed, master_formula_input, mehta_sphere_check,
    smoothed_kernel_bound, smoothed_kernel_core,
};

/// Environment variable scaling every tolerance.
pub const TOLERANCE_ENV: &str = "DUNKL_FRFT_TOL";

pub const SUITES: &[&str] = &[
    "basis",
    "kernel",
    "unitarity",
    "group_law",
    "adjoint",
    "route_agreement",
    "mehler",
    "master_formula",
    "eigenbasis",
    "funk_hecke",
    "gaussian",
    "generator",
    "spectral",
    "classical",
];

/// Tolerance multiplier from `DUNKL_FRFT_TOL` (default 1).
pub fn tolerance_scale_from_env() -> Result<f64> {
    match std::env::var(TOLERANCE_ENV) {
        Err(_) => Ok(1.0),
        Ok(v) => {
            let s: f64 =
                v.trim().parse().map_err(|_| Error::Usage(format!("{TOLERANCE_ENV}={v:?} is not a number")))?;
            if s > 0.0 && s.is_finite() {
                Ok(s)
            } else {
                Err(Error::Usage(format!("{TOLERANCE_ENV} must be positive, got {s}")))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckOptions {
    pub mu: Vec<f64>,
    /// Polynomial or Hermite degree bound used by the suite.
    pub degree: usize,
    pub alphas: Vec<f64>,
    pub seed: u64,
    /// Random cases per suite.
    pub samples: usize,
    pub tolerance_scale: f64,
    pub grid: Option<GridSpec>,
}

impl CheckOptions {
    pub fn new(mu: Vec<f64>) -> Self {
        Self {
            mu,
            degree: 4,
            alphas: vec![PI / 6.0, -PI / 3.0, 2.0 * PI / 5.0],
            seed: 0,
            samples: 5,
            tolerance_scale: 1.0,
            grid: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRow {
    pub suite: String,
    pub check: String,
    pub measured: f64,
    pub tolerance: f64,
    pub passed: bool,
}

struct Ctx<'a> {
    opts: &'a CheckOptions,
    mult: Multiplicity,
    base: TransformPlan,
    rng: ChaCha8Rng,
    rows: Vec<CheckRow>,
    suite: &'static str,
}

impl Ctx<'_> {
    fn plan(&self, alpha: f64) -> Result<TransformPlan> {
        self.base.at_alpha(alpha)
    }

    fn record(&mut self, check: &str, measured: f64, tolerance: f64) {
        let tolerance = tolerance * self.opts.tolerance_scale;
        self.rows.push(CheckRow {
            suite: self.suite.to_string(),
            check: check.to_string(),
            measured,
            tolerance,
            passed: measured <= tolerance,
        });
    }

    fn combo(&mut self, basis: &Arc<HermiteBasis>) -> Result<HermiteCombo> {
        let raw: Vec<Complex64> = basis
            .indices()
            .iter()
            .map(|_| Complex64::new(self.rng.random_range(-1.0..1.0), self.rng.random_range(-1.0..1.0)))
            .collect();
        let norm = raw.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        HermiteCombo::new(basis.clone(), raw.into_iter().map(|c| c / norm).collect())
    }

    fn point(&mut self, radius: f64) -> Vec<f64> {
        (0..self.mult.dim()).map(|_| self.rng.random_range(-radius..radius)).collect()
    }
}

fn probes(dim: usize) -> Vec<Vec<f64>> {
    let v = [-2.1, -0.6, 0.0, 0.8, 1.7];
    match dim {
        1 => v.iter().map(|&x| vec![x]).collect(),
        _ => {
            let w = [-1.4, 0.3, 1.2];
            (0..9).map(|k| (0..dim).map(|j| w[(k / 3usize.pow(j as u32 % 2)) % 3]).collect()).collect()
        }
    }
}

fn l2_diff(grid: &QuadGrid, a: &[Complex64], b: &[Complex64]) -> Result<f64> {
    let d: Vec<Complex64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    grid.norm_samples(&d)
}

fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Runs one named suite, or every suite for `"all"`.
pub fn run_suite(name: &str, opts: &CheckOptions) -> Result<Vec<CheckRow>> {
    if name == "all" {
        let mut rows = Vec::new();
        for s in SUITES {
            rows.extend(run_suite(s, opts)?);
        }
        return Ok(rows);
    }
    let suite = *SUITES
        .iter()
        .find(|s| **s == name)
        .ok_or_else(|| Error::Usage(format!("unknown suite {name:?}; expected one of {SUITES:?} or \"all\"")))?;
    let mult = Multiplicity::new(opts.mu.clone())?;
    let grid = match &opts.grid {
        Some(spec) => QuadGrid::from_spec(spec)?,
        None => QuadGrid::with_defaults(&mult)?,
    };
    if grid.mult() != &mult {
        return Err(Error::Usage("grid multiplicity differs from mu".into()));
    }
    let degree = crate::transform::default_degree(mult.dim());
    let base = TransformPlan::with_grid(Arc::new(grid), 1.0, degree)?;
    let mut ctx = Ctx { opts, mult, base, rng: ChaCha8Rng::seed_from_u64(opts.seed), rows: Vec::new(), suite };
    match suite {
        "basis" => basis(&mut ctx)?,
        "kernel" => kernel(&mut ctx)?,
        "unitarity" => unitarity(&mut ctx)?,
        "group_law" => group_law(&mut ctx)?,
        "adjoint" => adjoint(&mut ctx)?,
        "route_agreement" => route_agreement(&mut ctx)?,
        "mehler" => mehler(&mut ctx)?,
        "master_formula" => master_formula(&mut ctx)?,
        "eigenbasis" => eigenbasis(&mut ctx)?,
        "funk_hecke" => funk_hecke(&mut ctx)?,
        "gaussian" => gaussian(&mut ctx)?,
        "generator" => generator(&mut ctx)?,
        "spectral" => spectral(&mut ctx)?,
        "classical" => classical(&mut ctx)?,
        _ => unreachable!(),
    }
    Ok(ctx.rows)
}

fn basis(ctx: &mut Ctx) -> Result<()> {
    let basis = HermiteBasis::new(&ctx.mult, ctx.opts.degree.max(1))?;
    let grid = ctx.base.grid().clone();
    let rows: Vec<Vec<f64>> = grid.nodes().map(|x| basis.eval_all(x)).collect::<Result<_>>()?;
    let k = basis.indices().len();
    let mut gram: f64 = 0.0;
    for a in 0..k {
        for b in a..k {
            let g: f64 = rows.iter().zip(grid.weights()).map(|(r, w)| r[a] * r[b] * w).sum();
            gram = gram.max((g - if a == b { 1.0 } else { 0.0 }).abs());
        }
    }
    ctx.record("gram_identity", gram, 1e-9);
    let mut parity: f64 = 0.0;
    for _ in 0..ctx.opts.samples {
        let x = ctx.point(3.0);
        let minus: Vec<f64> = x.iter().map(|t| -t).collect();
        for (nu, (a, b)) in basis.indices().iter().zip(basis.eval_all(&x)?.iter().zip(basis.eval_all(&minus)?)) {
            let sign = if nu.iter().sum::<u32>() % 2 == 0 { 1.0 } else { -1.0 };
            parity = parity.max((sign * a - b).abs());
        }
    }
    ctx.record("parity", parity, 1e-13);
    Ok(())
}

fn kernel(ctx: &mut Ctx) -> Result<()> {
    let (mut even, mut modulus, mut series, mut margin) = (0.0f64, 0.0f64, 0.0f64, f64::INFINITY);
    let orders = ctx.mult.orders().to_vec();
    for k in 0..ctx.opts.samples * 20 {
        let order = orders[k % orders.len()];
        let u = Complex64::new(ctx.rng.random_range(-20.0..20.0), ctx.rng.random_range(-20.0..20.0));
        even = even.max(
            (normalized_ibessel(order, u)? - normalized_ibessel(order, -u)?).norm()
                / normalized_ibessel(order, u)?.norm().max(1.0),
        );
        let (x, y) = (ctx.rng.random_range(-6.0..6.0), ctx.rng.random_range(-6.0..6.0));
        modulus = modulus.max(dunkl_kernel_1d(order, Complex64::new(0.0, x), y)?.norm() - 1.0);
        let small = Complex64::new(ctx.rng.random_range(-8.0..8.0), ctx.rng.random_range(-8.0..8.0));
        let hybrid = normalized_ibessel(order, small)?;
        series = series.max((hybrid - normalized_ibessel_series(order, small)).norm() / hybrid.norm().max(1.0));
        let r = ctx.rng.random_range(0.01..0.99);
        let alpha = ctx.rng.random_range(-PI..PI);
        let (xv, yv) = (ctx.point(4.0), ctx.point(4.0));
        let core = smoothed_kernel_core(&ctx.mult, r, alpha, &xv, &yv)?;
        let bound = smoothed_kernel_bound(r, alpha, xv.iter().map(|t| t * t).sum::<f64>().sqrt());
        margin = margin.min((bound - core) / bound);
    }
    ctx.record("bessel_even", even, 1e-13);
    ctx.record("modulus_le_one", modulus.max(0.0), 1e-12);
    ctx.record("series_agreement", series, 1e-11);
    ctx.record("mehler_bound_violation", (-margin).max(0.0), 0.0);
    Ok(())
}

fn random_cases(ctx: &mut Ctx, degree: usize) -> Result<Vec<HermiteCombo>> {
    let basis = Arc::new(HermiteBasis::new(&ctx.mult, degree)?);
    (0..ctx.opts.samples).map(|_| ctx.combo(&basis)).collect()
}

fn unitarity(ctx: &mut Ctx) -> Result<()> {
    let cases = random_cases(ctx, ctx.opts.degree.min(6))?;
    let (mut spec, mut integ) = (0.0f64, 0.0f64);
    for alpha in ctx.opts.alphas.clone() {
        let plan = ctx.plan(alpha)?;
        for f in &cases {
            spec = spec.max((fdt_spectral(f, &plan)?.output.norm() - f.norm()).abs());
            if plan.regime() == Regime::Generic && alpha.sin().abs() >= 0.3 {
                let out = fdt_integral_on_grid(f, &plan)?;
                integ = integ.max((plan.grid().norm_samples(&out)? - f.norm()).abs());
            }
        }
    }
    ctx.record("spectral_norm", spec, 1e-10);
    ctx.record("integral_norm", integ, 1e-7);
    Ok(())
}

fn group_law(ctx: &mut Ctx) -> Result<()> {
    let cases = random_cases(ctx, ctx.opts.degree.min(6))?;
    let xs = probes(ctx.mult.dim());
    let alphas = ctx.opts.alphas.clone();
    let (mut group, mut period, mut inversion) = (0.0f64, 0.0f64, 0.0f64);
    for (k, f) in cases.iter().enumerate() {
        let alpha = alphas[k % alphas.len()];
        let beta = alphas[(k + 1) % alphas.len()];
        let plan = ctx.plan(alpha)?;
        let once = fdt_integral_on_grid(f, &plan)?;
        let twice = fdt_integral_samples(&once, &ctx.plan(beta)?, &xs)?;
        let sum = fdt_spectral(f, &ctx.plan(alpha + beta)?)?.output.eval_many(&xs)?;
        group = group.max(max_diff(&twice, &sum));
        let shifted = fdt_integral_on_grid(f, &ctx.plan(alpha + 2.0 * PI)?)?;
        period = period.max(l2_diff(plan.grid(), &shifted, &once)?);
        let dunkl = ctx.plan(-PI / 2.0)?;
        let d1 = fdt_integral_on_grid(f, &dunkl)?;
        let d2 = fdt_integral_samples(&d1, &dunkl, &xs)?;
        let reflected: Vec<Complex64> =
            xs.iter().map(|x| f.eval(&x.iter().map(|t| -t).collect::<Vec<_>>())).collect::<Result<_>>()?;
        inversion = inversion.max(max_diff(&d2, &reflected));
    }
    ctx.record("group_law", group, 1e-6);
    ctx.record("periodicity", period, 1e-6);
    ctx.record("inversion", inversion, 1e-6);
    Ok(())
}

fn adjoint(ctx: &mut Ctx) -> Result<()> {
    let degree = ctx.opts.degree.min(6);
    let cases = random_cases(ctx, degree)?;
    let others = random_cases(ctx, degree)?;
    let mut worst: f64 = 0.0;
    for alpha in ctx.opts.alphas.clone() {
        let plan = ctx.plan(alpha)?;
        let back = ctx.plan(-alpha)?;
        let grid = plan.grid();
        for (f, g) in cases.iter().zip(&others) {
            let df = fdt_integral_on_grid(f, &plan)?;
            let dg = fdt_integral_on_grid(g, &back)?;
            let lhs = grid.inner_product_samples(&df, &g.sample_on(grid)?)?;
            let rhs = grid.inner_product_samples(&f.sample_on(grid)?, &dg)?;
            worst = worst.max((lhs - rhs).norm());
        }
    }
    ctx.record("adjoint", worst, 1e-8);
    Ok(())
}

fn route_agreement(ctx: &mut Ctx) -> Result<()> {
    let cases = random_cases(ctx, ctx.opts.degree.min(6))?;
    let r = 1.0 - 2f64.powi(-10);
    let (mut routes, mut smooth) = (0.0f64, 0.0f64);
    for alpha in ctx.opts.alphas.clone() {
        let plan = ctx.plan(alpha)?;
        let grid = plan.grid().clone();
        for f in &cases {
            let spectral = fdt_spectral(f, &plan)?.output.sample_on(&grid)?;
            routes = routes.max(l2_diff(&grid, &spectral, &fdt_integral_on_grid(f, &plan)?)?);
            let plan_r = plan.clone().with_r(r)?;
            let spectral_r = fdt_spectral(f, &plan_r)?.output.sample_on(&grid)?;
            smooth = smooth.max(l2_diff(&grid, &spectral_r, &fdt_smoothed_on_grid(f, &plan_r)?)?);
        }
    }
    ctx.record("spectral_vs_integral", routes, 1e-6);
    ctx.record("smoothed_vs_spectral", smooth, 1e-4);
    Ok(())
}

/// Residuals of the Mehler limit along r = 1 − 2^{−j}, j = 3..12.
pub fn mehler_gaps(plan: &TransformPlan, x: &[f64], y: &[f64]) -> Result<Vec<f64>> {
    let limit = plan.a_alpha()? * kernel_alpha(plan, x, y)?;
    (3..=12)
        .map(|j| {
            let p = plan.clone().with_r(1.0 - 2f64.powi(-j))?;
            Ok((kernel_smoothed(&p, x, y)? - limit).norm())
        })
        .collect()
}

fn mehler(ctx: &mut Ctx) -> Result<()> {
    let mut steps = 0usize;
    for k in 0..ctx.opts.samples * 4 {
        let alpha = ctx.opts.alphas[k % ctx.opts.alphas.len()];
        let plan = ctx.plan(alpha)?;
        let (x, y) = (ctx.point(3.0), ctx.point(3.0));
        let gaps = mehler_gaps(&plan, &x, &y)?;
        steps += gaps.windows(2).filter(|w| !(w[1] < w[0])).count();
    }
    ctx.record("non_monotone_steps", steps as f64, 0.0);
    Ok(())
}

fn master_formula(ctx: &mut Ctx) -> Result<()> {
    let dim = ctx.mult.dim();
    let (mut master, mut hecke) = (0.0f64, 0.0f64);
    for alpha in ctx.opts.alphas.clone() {
        let plan = ctx.plan(alpha)?;
        let grid = plan.grid().clone();
        for deg in 0..=ctx.opts.degree {
            let phase = Complex64::from_polar(1.0, deg as f64 * alpha);
            for e in homogeneous_indices(dim, deg) {
                let input = master_formula_input(&MultiPoly::monomial(e, qc_one()), &ctx.mult)?.sample_on(&grid)?;
                let lhs = fdt_integral_grid_samples(&input, &plan)?;
                let rhs: Vec<Complex64> = input.iter().map(|v| phase * v).collect();
                master = master.max(l2_diff(&grid, &lhs, &rhs)? / grid.norm_samples(&rhs)?);
            }
            for p in harmonic_basis(&ctx.mult, deg)? {
                let input = GaussPoly::new(p).sample_on(&grid)?;
                let lhs = fdt_integral_grid_samples(&input, &plan)?;
                let rhs: Vec<Complex64> = input.iter().map(|v| phase * v).collect();
                hecke = hecke.max(l2_diff(&grid, &lhs, &rhs)? / grid.norm_samples(&rhs)?);
            }
        }
    }
    ctx.record("master", master, 1e-7);
    ctx.record("hecke", hecke, 1e-7);
    Ok(())
}

fn eigenbasis(ctx: &mut Ctx) -> Result<()> {
    let m_max = ctx.opts.degree.min(4);
    let mut worst: f64 = 0.0;
    for alpha in ctx.opts.alphas.clone() {
        let plan = ctx.plan(alpha)?;
        let grid = plan.grid().clone();
        for n in 0..=1usize {
            for harmonic in harmonic_basis(&ctx.mult, n)? {
                for m in 0..=m_max {
                    let samples = eigen_psi(&ctx.mult, m, &harmonic)?.sample_on(&grid)?;
                    let out = fdt_integral_grid_samples(&samples, &plan)?;
                    let phase = Complex64::from_polar(1.0, alpha * (n + 2 * m) as f64);
                    let target: Vec<Complex64> = samples.iter().map(|v| phase * v).collect();
                    worst = worst.max(l2_diff(&grid, &out, &target)? / grid.norm_samples(&samples)?);
                }
            }
        }
    }
    ctx.record("eigenfunctions", worst, 1e-6);
    if ctx.mult.dim() == 1 {
        let order = BesselOrder::new(ctx.mult.mu()[0] - 0.5)?;
        let mut hankel: f64 = 0.0;
        for alpha in ctx.opts.alphas.clone() {
            let plan = ctx.plan(alpha)?;
            for m in 0..=m_max {
                let nu = order.value();
                let psi = move |y: f64| {
                    Complex64::new(crate::specfun::laguerre_eval(m, nu, y * y) * (-y * y / 2.0).exp(), 0.0)
                };
                for x in [0.0, 0.5, 1.3, 2.6] {
                    let got = fractional_hankel(&psi, order, &plan, x)?;
                    hankel = hankel.max((got - Complex64::from_polar(1.0, 2.0 * alpha * m as f64) * psi(x)).norm());
                }
            }
        }
        ctx.record("hankel_laguerre", hankel, 1e-6);
    }
    Ok(())
}

fn funk_hecke(ctx: &mut Ctx) -> Result<()> {
    if ctx.mult.dim() != 2 {
        return Err(Error::Usage("the funk_hecke suite needs N = 2".into()));
    }
    let circle = WeightedCircleGrid::new(&ctx.mult, 64)?;
    let mut worst: f64 = 0.0;
    for _ in 0..ctx.opts.samples * 4 {
        let x = ctx.point(7.0);
        worst = worst.max(funk_hecke_check(&ctx.mult, &x, &circle)?.residual());
    }
    ctx.record("radial_average", worst, 1e-8);
    ctx.record("ck_dk_relation", mehta_sphere_check(&ctx.mult, &circle)?.relative(), 1e-9);
    Ok(())
}

fn gaussian(ctx: &mut Ctx) -> Result<()> {
    let grid = ctx.base.grid().clone();
    let mut worst: f64 = 0.0;
    for _ in 0..ctx.opts.samples {
        let z: Vec<Complex64> = (0..ctx.mult.dim())
            .map(|_| Complex64::new(ctx.rng.random_range(-0.8..0.8), ctx.rng.random_range(-0.8..0.8)))
            .collect();
        let w: Vec<Complex64> = (0..ctx.mult.dim())
            .map(|_| Complex64::new(ctx.rng.random_range(-0.8..0.8), ctx.rng.random_range(-0.8..0.8)))
            .collect();
        let a = Complex64::new(1.3, 0.4);
        worst = worst.max(gaussian_bilinear_check(&ctx.mult, &z, &w, a, &grid)?.relative());
    }
    ctx.record("bilinear", worst, 1e-8);
    let mut moment: f64 = 0.0;
    for deg in 0..=ctx.opts.degree.min(3) {
        for e in homogeneous_indices(ctx.mult.dim(), deg) {
            let p = MultiPoly::monomial(e, qc_one());
            let x: Vec<Complex64> =
                (0..ctx.mult.dim()).map(|_| Complex64::new(ctx.rng.random_range(-0.7..0.7), 0.3)).collect();
            let check = crate::transform::gaussian_moment_check(&p, &ctx.mult, Complex64::new(1.1, 0.2), &x, &grid)?;
            moment = moment.max(check.relative());
        }
    }
    ctx.record("moment", moment, 1e-8);
    Ok(())
}

fn generator(ctx: &mut Ctx) -> Result<()> {
    let dim = ctx.mult.dim();
    let plan = ctx.plan(-PI / 2.0)?;
    let xs = probes(dim);
    let mut worst: f64 = 0.0;
    for deg in 0..=ctx.opts.degree {
        for e in homogeneous_indices(dim, deg) {
            let f = GaussPoly::new(MultiPoly::monomial(e, qc_one()));
            let exact = generator_exact(&f, &ctx.mult)?;
            let numeric = generator_integral(&f, &plan, &xs)?;
            let reference: Vec<Complex64> = xs.iter().map(|x| exact.eval(x)).collect::<Result<_>>()?;
            let scale = reference.iter().map(|v| v.norm()).fold(1.0, f64::max);
            worst = worst.max(max_diff(&numeric, &reference) / scale);
        }
    }
    ctx.record("integral_vs_exact", worst, 1e-6);
    let basis = Arc::new(HermiteBasis::new(&ctx.mult, 3)?);
    let f = ctx.combo(&basis)?;
    let alphas: Vec<f64> = (0..5).map(|k| 0.2 / 2f64.powi(k)).collect();
    let res = difference_quotient(&f, &alphas, &ctx.plan(0.3)?)?;
    ctx.record("quotient_order_deviation", (observed_order(&alphas, &res)? - 1.0).abs(), 0.3);
    Ok(())
}

fn spectral(ctx: &mut Ctx) -> Result<()> {
    let degree = ctx.opts.degree.max(1);
    let basis = Arc::new(HermiteBasis::new(&ctx.mult, degree)?);
    let grid = ctx.base.grid().clone();
    let sampler = GroupSampler::new(grid.clone(), basis.clone(), DEFAULT_Q)?;
    let f = ctx.combo(&basis)?;
    let mut pick: f64 = 0.0;
    for n in 0..=degree as i64 {
        let p = spectral_projection(&f, n, &sampler)?;
        for (nu, (c, got)) in basis.indices().iter().zip(f.coeffs().iter().zip(p.coeffs())) {
            let want = if nu.iter().sum::<u32>() as i64 == n { *c } else { Complex64::new(0.0, 0.0) };
            pick = pick.max((got - want).norm());
        }
    }
    ctx.record("projection", pick, 1e-10);
    let mut negative: f64 = 0.0;
    for n in -4..0 {
        negative = negative.max(spectral_projection(&f, n, &sampler)?.norm());
    }
    ctx.record("negative_projection", negative, 1e-12);
    let target = f.sample_on(&grid)?;
    let (mut resolvent, mut count) = (0.0f64, 0);
    while count < ctx.opts.samples {
        let lambda = Complex64::new(ctx.rng.random_range(-2.0..2.0), ctx.rng.random_range(-2.0..(degree as f64 + 3.0)));
        if distance_to_imaginary_integers(lambda) < 0.1 {
            continue;
        }
        count += 1;
        let r = resolvent_apply(&f, lambda, &sampler)?;
        let g = r.to_gauss_poly()?;
        let tg = generator_exact(&g, &ctx.mult)?;
        let back = grid.sample(|x| Ok(lambda * g.eval(x)? - tg.eval(x)?))?;
        resolvent = resolvent.max(l2_diff(&grid, &back, &target)?);
        let d = shifted_generator_combo(&r, lambda).add(&f.scale(Complex64::new(-1.0, 0.0)))?.norm();
        resolvent = resolvent.max(d);
    }
    ctx.record("resolvent_identity", resolvent, 1e-8);
    Ok(())
}

fn classical(ctx: &mut Ctx) -> Result<()> {
    if ctx.mult.mu().iter().any(|&m| m != 0.0) || ctx.mult.dim() != 1 {
        return Err(Error::Usage("the classical suite needs mu = [0]".into()));
    }
    let xs = probes(1);
    let mut worst: f64 = 0.0;
    for alpha in ctx.opts.alphas.clone() {
        let plan = ctx.plan(alpha)?;
        for a in [0.7, -1.2] {
            let f = FnEval::new(1, move |y: &[f64]| Complex64::new((-(y[0] - a).powi(2) / 2.0).exp(), 0.0));
            let got = fdt_integral(&f, &plan, &xs)?;
            let e = Complex64::from_polar(1.0, alpha);
            let want: Vec<Complex64> = xs
                .iter()
                .map(|x| (-a * a / 4.0 - x[0] * x[0] / 2.0 + a * e * x[0] - a * a * e * e / 4.0).exp())
                .collect();
            worst = worst.max(max_diff(&got, &want));
        }
    }
    ctx.record("coherent_states", worst, 1e-8);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_suite_is_usage_error() {
        let opts = CheckOptions::new(vec![0.5]);
        assert!(matches!(run_suite("nope", &opts), Err(Error::Usage(_))));
    }

    #[test]
    fn small_suites_pass() {
        let mut opts = CheckOptions::new(vec![0.5]);
        opts.samples = 2;
        opts.degree = 3;
        for suite in ["basis", "kernel", "spectral"] {
            let rows = run_suite(suite, &opts).unwrap();
            assert!(!rows.is_empty());
            for r in rows {
                assert!(r.passed, "{r:?}");
            }
        }
    }

    #[test]
    fn probe_sets() {
        assert_eq!(probes(1).len(), 5);
        assert_eq!(probes(2).len(), 9);
    }
}

//! The fractional Dunkl transform D^α by spectral expansion, integral kernel
//! and smoothed (Mehler) kernel, plus the fractional Hankel transform and the
//! Bochner, Master, Funk–Hecke and Gaussian identities.
//!
//! For ℤ₂ᴺ every kernel is a product over coordinates, so transforms are
//! applied axis by axis.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::One;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, check_dim};
use crate::eval::{Evaluable, HermiteCombo};
use crate::polyengine::{GaussPoly, HermiteBasis, MultiPoly, dunkl_laplacian, heat_exp_poly, heat_exp_poly_rational};
use crate::quadrature::{GridSpec, QuadGrid, RadialGrid, WeightedCircleGrid, radial_grid, sphere_weight_mass};
use crate::rational::{q, qc_from_c64, qint};
use crate::specfun::{
    BesselOrder, Multiplicity, dunkl_kernel_1d, dunkl_kernel_1d_scaled, dunkl_kernel_prod, dunkl_kernel_prod_complex,
    gamma_fn, normalized_jbessel,
};

/// Floor on the |sin α| below which the integral route refuses; plans raise
/// it to what their grid resolves.
pub const DEFAULT_S_MIN: f64 = 0.05;

/// Largest threshold a plan picks on its own; coarser grids still admit α near ±π/2.
const MAX_AUTO_S_MIN: f64 = 0.9;

/// Minimum radial box for Hankel integrals; the weight y^{2ν+1} and Laguerre
/// profiles keep the integrand near 1e-5 at y = 8 when ν ≈ 1.
pub const RADIAL_HALF_WIDTH: f64 = 12.0;

/// Default spectral truncation degree.
pub fn default_degree(dim: usize) -> usize {
    if dim == 1 { 24 } else { 16 }
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// α ≡ 0: the identity.
    Identity,
    /// α ≡ π: f ↦ f(−x).
    Parity,
    Generic,
    /// 0 < |sin α| < s_min.
    NearSingular,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Route {
    Spectral,
    Integral,
    Smoothed,
}

/// Canonical representative of α in (−π, π] and its regime.
pub fn normalize_alpha(alpha: f64) -> Result<(f64, Regime)> {
    normalize_alpha_with(alpha, DEFAULT_S_MIN)
}

pub fn normalize_alpha_with(alpha: f64, s_min: f64) -> Result<(f64, Regime)> {
    if !alpha.is_finite() {
        return Err(Error::Domain(format!("order must be finite, got {alpha}")));
    }
    let mut a = alpha;
    if !(a > -PI && a <= PI) {
        a = a.rem_euclid(2.0 * PI);
        if a > PI {
            a -= 2.0 * PI;
        }
    }
    if a.abs() < 1e-12 {
        return Ok((0.0, Regime::Identity));
    }
    if (a.abs() - PI).abs() < 1e-12 {
        return Ok((PI, Regime::Parity));
    }
    let regime = if a.sin().abs() < s_min { Regime::NearSingular } else { Regime::Generic };
    Ok((a, regime))
}

fn alpha_hat(alpha: f64) -> f64 {
    alpha.sin().signum()
}

/// B_ν(α) = e^{i(ν+1)(α̂π/2 − α)} / (Γ(ν+1)(2|sin α|)^{ν+1}).
pub fn hankel_constant(order: BesselOrder, alpha: f64) -> Result<Complex64> {
    let s = alpha.sin().abs();
    if s == 0.0 {
        return Err(Error::Usage(format!("no kernel constant at alpha = {alpha}")));
    }
    let p = order.value() + 1.0;
    let phase = Complex64::from_polar(1.0, p * (alpha_hat(alpha) * PI / 2.0 - alpha));
    Ok(phase / (gamma_fn(p)? * (2.0 * s).powf(p)))
}

/// Order, multiplicity and discretization of a transform.
#[derive(Debug, Clone)]
pub struct TransformPlan {
    mult: Multiplicity,
    alpha: f64,
    regime: Regime,
    r: f64,
    degree: usize,
    s_min: f64,
    grid: Arc<QuadGrid>,
    basis: Arc<HermiteBasis>,
}

/// Serializable summary of a plan, used for reproducibility stamps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanSummary {
    pub mu: Vec<f64>,
    pub alpha: f64,
    pub regime: Regime,
    pub r: f64,
    pub degree: usize,
    pub s_min: f64,
    pub grid: GridSpec,
}

impl TransformPlan {
    /// Plan with the default grid and truncation degree.
    pub fn new(mult: &Multiplicity, alpha: f64) -> Result<Self> {
        let grid = Arc::new(QuadGrid::with_defaults(mult)?);
        Self::with_grid(grid, alpha, default_degree(mult.dim()))
    }

    pub fn with_grid(grid: Arc<QuadGrid>, alpha: f64, degree: usize) -> Result<Self> {
        let mult = grid.mult().clone();
        let basis = Arc::new(HermiteBasis::new(&mult, degree)?);
        let s_min = grid.resolved_sin_min().clamp(DEFAULT_S_MIN, MAX_AUTO_S_MIN);
        let (alpha, regime) = normalize_alpha_with(alpha, s_min)?;
        Ok(Self { mult, alpha, regime, r: 1.0, degree, s_min, grid, basis })
    }

    /// Same discretization at another order.
    pub fn at_alpha(&self, alpha: f64) -> Result<Self> {
        let (alpha, regime) = normalize_alpha_with(alpha, self.s_min)?;
        Ok(Self { alpha, regime, ..self.clone() })
    }

    /// Smoothing parameter r ∈ (0, 1]; r = 1 means no smoothing.
    pub fn with_r(mut self, r: f64) -> Result<Self> {
        if !(r > 0.0 && r <= 1.0) {
            return Err(Error::Usage(format!("smoothing parameter must lie in (0, 1], got {r}")));
        }
        self.r = r;
        Ok(self)
    }

    pub fn with_s_min(mut self, s_min: f64) -> Result<Self> {
        if !(s_min > 0.0 && s_min < 1.0) {
            return Err(Error::Usage(format!("s_min must lie in (0, 1), got {s_min}")));
        }
        self.s_min = s_min;
        let (alpha, regime) = normalize_alpha_with(self.alpha, s_min)?;
        self.alpha = alpha;
        self.regime = regime;
        Ok(self)
    }

    pub fn with_degree(mut self, degree: usize) -> Result<Self> {
        if degree != self.degree {
            self.basis = Arc::new(HermiteBasis::new(&self.mult, degree)?);
            self.degree = degree;
        }
        Ok(self)
    }

    pub fn with_basis(mut self, basis: Arc<HermiteBasis>) -> Result<Self> {
        if basis.mult() != &self.mult {
            return Err(Error::Usage("basis multiplicity differs from the plan".into()));
        }
        self.degree = basis.max_degree();
        self.basis = basis;
        Ok(self)
    }

    pub fn mult(&self) -> &Multiplicity {
        &self.mult
    }

    pub fn dim(&self) -> usize {
        self.mult.dim()
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn regime(&self) -> Regime {
        self.regime
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn s_min(&self) -> f64 {
        self.s_min
    }

    pub fn grid(&self) -> &Arc<QuadGrid> {
        &self.grid
    }

    pub fn basis(&self) -> &Arc<HermiteBasis> {
        &self.basis
    }

    pub fn summary(&self) -> PlanSummary {
        PlanSummary {
            mu: self.mult.mu().to_vec(),
            alpha: self.alpha,
            regime: self.regime,
            r: self.r,
            degree: self.degree,
            s_min: self.s_min,
            grid: self.grid.spec(),
        }
    }

    fn require_kernel(&self) -> Result<()> {
        match self.regime {
            Regime::Identity | Regime::Parity => {
                Err(Error::Usage(format!("no integral kernel at alpha = {} ({:?} regime)", self.alpha, self.regime)))
            }
            _ => Ok(()),
        }
    }

    fn require_generic(&self) -> Result<()> {
        self.require_kernel()?;
        if self.regime == Regime::NearSingular {
            return Err(Error::NearSingular { alpha: self.alpha, sin_abs: self.alpha.sin().abs(), s_min: self.s_min });
        }
        Ok(())
    }

    fn require_smoothing(&self) -> Result<()> {
        if self.r >= 1.0 {
            return Err(Error::Usage("the smoothed kernel needs 0 < r < 1".into()));
        }
        Ok(())
    }

    /// Per-axis factors B_{μ_j − 1/2}(α); their product is A_α.
    pub fn axis_constants(&self) -> Result<Vec<Complex64>> {
        self.require_kernel()?;
        self.mult.orders().iter().map(|&o| hankel_constant(o, self.alpha)).collect()
    }

    /// A_α = c_k e^{i(γ+N/2)(α̂π/2 − α)} / (2|sin α|)^{γ+N/2}.
    pub fn a_alpha(&self) -> Result<Complex64> {
        self.require_kernel()?;
        let p = self.mult.half_weight_degree();
        let phase = Complex64::from_polar(1.0, p * (alpha_hat(self.alpha) * PI / 2.0 - self.alpha));
        Ok(self.mult.c_k() * phase / (2.0 * self.alpha.sin().abs()).powf(p))
    }

    /// Radial rule for Bessel order ν on [0, max(L, RADIAL_HALF_WIDTH)].
    pub fn radial_rule(&self, order: BesselOrder) -> Result<RadialGrid> {
        let width = self.grid.half_width().max(RADIAL_HALF_WIDTH);
        radial_grid(order.value(), width, self.grid.points_per_axis())
    }
}

/// e^{−(i/2)cot α (x² + y²)} K_ν(ix/sin α, y) for one coordinate.
pub fn kernel_alpha_axis(order: BesselOrder, alpha: f64, x: f64, y: f64) -> Result<Complex64> {
    let (s, co) = alpha.sin_cos();
    let phase = Complex64::from_polar(1.0, -0.5 * co / s * (x * x + y * y));
    Ok(phase * dunkl_kernel_1d(order, Complex64::new(0.0, x / s), y)?)
}

/// K_α(x, y) = e^{−(i/2)cot α(|x|² + |y|²)} K(ix/sin α, y).
pub fn kernel_alpha(plan: &TransformPlan, x: &[f64], y: &[f64]) -> Result<Complex64> {
    plan.require_kernel()?;
    check_dim(plan.dim(), x.len())?;
    check_dim(plan.dim(), y.len())?;
    plan.mult
        .orders()
        .iter()
        .zip(x.iter().zip(y))
        .try_fold(c(1.0), |acc, (&o, (&xj, &yj))| Ok(acc * kernel_alpha_axis(o, plan.alpha, xj, yj)?))
}

/// One coordinate of the Mehler kernel, including 1/Γ(μ_j + 1/2); z = r e^{iα}.
pub fn kernel_smoothed_axis(order: BesselOrder, z: Complex64, x: f64, y: f64) -> Result<Complex64> {
    let z2 = z * z;
    let d = 1.0 - z2;
    let p = order.value() + 1.0;
    let (v, s) = dunkl_kernel_1d_scaled(order, 2.0 * z * x * y / d)?;
    let expo = -(1.0 + z2) * (x * x + y * y) / (2.0 * d) + s;
    Ok(v * expo.exp() * d.powc(c(-p)) / gamma_fn(p)?)
}

/// K_α(r, x, y) = c_k (1−z²)^{−(γ+N/2)} exp(−(1+z²)(|x|²+|y|²)/(2(1−z²))) K(2zx/(1−z²), y), z = r e^{iα}.
pub fn kernel_smoothed(plan: &TransformPlan, x: &[f64], y: &[f64]) -> Result<Complex64> {
    plan.require_smoothing()?;
    check_dim(plan.dim(), x.len())?;
    check_dim(plan.dim(), y.len())?;
    let z = Complex64::from_polar(plan.r, plan.alpha);
    plan.mult
        .orders()
        .iter()
        .zip(x.iter().zip(y))
        .try_fold(c(1.0), |acc, (&o, (&xj, &yj))| Ok(acc * kernel_smoothed_axis(o, z, xj, yj)?))
}

/// Σ_{|ν| ≤ M} r^{|ν|} e^{i|ν|α} h_ν(x) h_ν(y).
pub fn kernel_spectral(plan: &TransformPlan, x: &[f64], y: &[f64]) -> Result<Complex64> {
    let hx = plan.basis.eval_all(x)?;
    let hy = plan.basis.eval_all(y)?;
    Ok(plan
        .basis
        .indices()
        .iter()
        .zip(hx.iter().zip(&hy))
        .map(|(nu, (a, b))| {
            let n = nu.iter().sum::<u32>() as f64;
            Complex64::from_polar(plan.r.powf(n), n * plan.alpha) * (a * b)
        })
        .sum())
}

/// Bound on the Gaussian-times-kernel part of the Mehler kernel:
/// exp(2r²(1−r²)cos²α|x|² / ((r⁴ − 2r²cos 2α + 1)(r² + 1))).
pub fn smoothed_kernel_bound(r: f64, alpha: f64, x_norm: f64) -> f64 {
    let r2 = r * r;
    let num = 2.0 * r2 * (1.0 - r2) * alpha.cos().powi(2) * x_norm * x_norm;
    let den = (r2 * r2 - 2.0 * r2 * (2.0 * alpha).cos() + 1.0) * (r2 + 1.0);
    (num / den).exp()
}

/// |exp(−(1+z²)|y|²/(2(1−z²))) K(2zx/(1−z²), y)|, the quantity bounded by
/// [`smoothed_kernel_bound`].
pub fn smoothed_kernel_core(mult: &Multiplicity, r: f64, alpha: f64, x: &[f64], y: &[f64]) -> Result<f64> {
    check_dim(mult.dim(), x.len())?;
    check_dim(mult.dim(), y.len())?;
    let z = Complex64::from_polar(r, alpha);
    let d = 1.0 - z * z;
    let y2: f64 = y.iter().map(|v| v * v).sum();
    let mut log_mod = (-(1.0 + z * z) * y2 / (2.0 * d)).re;
    let mut modulus = 1.0;
    for (&o, (&xj, &yj)) in mult.orders().iter().zip(x.iter().zip(y)) {
        let (v, s) = dunkl_kernel_1d_scaled(o, 2.0 * z * xj * yj / d)?;
        log_mod += s;
        modulus *= v.norm();
    }
    Ok(modulus * log_mod.exp())
}

// ---- separable application -------------------------------------------------

/// Σ over a row-major tensor of ∏_j rows[j][i_j] · data[i].
fn contract_point(data: &[Complex64], rows: &[&[Complex64]]) -> Complex64 {
    match rows {
        [] => data[0],
        [last] => last.iter().zip(data).map(|(a, b)| a * b).sum(),
        [first, rest @ ..] => {
            let m = data.len() / first.len();
            first.iter().enumerate().map(|(i, a)| a * contract_point(&data[i * m..(i + 1) * m], rest)).sum()
        }
    }
}

/// Applies `mat` (rows × shape[axis]) along one axis of a row-major tensor.
fn contract_axis(
    data: &[Complex64],
    shape: &[usize],
    axis: usize,
    mat: &[Vec<Complex64>],
) -> (Vec<Complex64>, Vec<usize>) {
    let outer: usize = shape[..axis].iter().product();
    let inner: usize = shape[axis + 1..].iter().product();
    let n = shape[axis];
    let m = mat.len();
    let mut out = vec![c(0.0); outer * m * inner];
    out.par_chunks_mut(m * inner).enumerate().for_each(|(o, block)| {
        let src = &data[o * n * inner..(o + 1) * n * inner];
        for (k, row) in mat.iter().enumerate() {
            let dst = &mut block[k * inner..(k + 1) * inner];
            for (i, &a) in row.iter().enumerate() {
                if a == c(0.0) {
                    continue;
                }
                let s = &src[i * inner..(i + 1) * inner];
                for (d, v) in dst.iter_mut().zip(s) {
                    *d += a * v;
                }
            }
        }
    });
    let mut new_shape = shape.to_vec();
    new_shape[axis] = m;
    (out, new_shape)
}

type RowFn<'a> = dyn Fn(usize, f64) -> Result<Vec<Complex64>> + Sync + 'a;

/// Values Σ_y K(x, y) f(y) w(y) at arbitrary points for a product kernel whose
/// weighted rows are produced by `row`.
fn apply_at_points(grid: &QuadGrid, samples: &[Complex64], xs: &[Vec<f64>], row: &RowFn) -> Result<Vec<Complex64>> {
    check_dim(grid.len(), samples.len())?;
    let dim = grid.dim();
    for x in xs {
        check_dim(dim, x.len())?;
    }
    let mut caches: Vec<HashMap<u64, Vec<Complex64>>> = Vec::with_capacity(dim);
    for j in 0..dim {
        let mut keys: Vec<u64> = xs.iter().map(|x| x[j].to_bits()).collect();
        keys.sort_unstable();
        keys.dedup();
        let rows = keys.par_iter().map(|&k| row(j, f64::from_bits(k))).collect::<Result<Vec<_>>>()?;
        caches.push(keys.into_iter().zip(rows).collect());
    }
    Ok(xs
        .par_iter()
        .map(|x| {
            let rows: Vec<&[Complex64]> = (0..dim).map(|j| caches[j][&x[j].to_bits()].as_slice()).collect();
            contract_point(samples, &rows)
        })
        .collect())
}

/// Same as [`apply_at_points`] with the output on the grid nodes.
fn apply_on_grid(grid: &QuadGrid, samples: &[Complex64], row: &RowFn) -> Result<Vec<Complex64>> {
    check_dim(grid.len(), samples.len())?;
    let mut data = samples.to_vec();
    let mut shape = grid.shape();
    for j in 0..grid.dim() {
        let mat = grid.axis(j).nodes().par_iter().map(|&x| row(j, x)).collect::<Result<Vec<_>>>()?;
        (data, shape) = contract_axis(&data, &shape, j, &mat);
    }
    Ok(data)
}

/// Σ_y ∏_j kernel(j, x_j, y_j) g(y) w(y) at every grid node x, for any
/// product kernel.
pub(crate) fn apply_axis_kernel_on_grid(
    grid: &QuadGrid,
    samples: &[Complex64],
    kernel: impl Fn(usize, f64, f64) -> Result<Complex64> + Sync,
) -> Result<Vec<Complex64>> {
    let row = |j: usize, x: f64| -> Result<Vec<Complex64>> {
        let axis = grid.axis(j);
        axis.nodes().iter().zip(axis.weights()).map(|(&y, &w)| Ok(kernel(j, x, y)? * w)).collect()
    };
    apply_on_grid(grid, samples, &row)
}

fn alpha_rows<'a>(
    plan: &'a TransformPlan,
    alpha: f64,
) -> Result<impl Fn(usize, f64) -> Result<Vec<Complex64>> + Sync + 'a> {
    let at = plan.at_alpha(alpha)?;
    let consts = at.axis_constants()?;
    let orders = plan.mult.orders().to_vec();
    let grid = plan.grid.clone();
    let alpha = at.alpha;
    Ok(move |j: usize, x: f64| {
        let axis = grid.axis(j);
        axis.nodes()
            .iter()
            .zip(axis.weights())
            .map(|(&y, &w)| Ok(consts[j] * kernel_alpha_axis(orders[j], alpha, x, y)? * w))
            .collect()
    })
}

fn smoothed_rows(plan: &TransformPlan) -> impl Fn(usize, f64) -> Result<Vec<Complex64>> + Sync + '_ {
    let z = Complex64::from_polar(plan.r, plan.alpha);
    move |j: usize, x: f64| {
        let axis = plan.grid.axis(j);
        let o = plan.mult.orders()[j];
        axis.nodes().iter().zip(axis.weights()).map(|(&y, &w)| Ok(kernel_smoothed_axis(o, z, x, y)? * w)).collect()
    }
}

// ---- spectral route ---------------------------------------------------------

/// Result of the spectral route.
#[derive(Debug, Clone)]
pub struct SpectralTransform {
    /// ⟨f, h_ν⟩ for |ν| ≤ M.
    pub input: HermiteCombo,
    /// r^{|ν|} e^{i|ν|α} ⟨f, h_ν⟩, the transformed function.
    pub output: HermiteCombo,
    /// (‖f‖² − Σ|⟨f, h_ν⟩|²)^{1/2}: the part of f the truncation misses.
    pub tail: f64,
}

/// ⟨f, h_ν⟩ for all |ν| ≤ M from samples on the plan grid.
pub fn hermite_coefficients(samples: &[Complex64], grid: &QuadGrid, basis: &Arc<HermiteBasis>) -> Result<HermiteCombo> {
    check_dim(grid.len(), samples.len())?;
    check_dim(grid.dim(), basis.dim())?;
    let m = basis.max_degree();
    let mut data = samples.to_vec();
    let mut shape = grid.shape();
    for j in 0..grid.dim() {
        let axis = grid.axis(j);
        let tables: Vec<Vec<f64>> = axis.nodes().iter().map(|&y| basis.axis_values(j, y)).collect();
        let mat: Vec<Vec<Complex64>> =
            (0..=m).map(|n| tables.iter().zip(axis.weights()).map(|(t, &w)| c(t[n] * w)).collect()).collect();
        (data, shape) = contract_axis(&data, &shape, j, &mat);
    }
    let coeffs = basis
        .indices()
        .iter()
        .map(|nu| {
            let flat = nu.iter().fold(0usize, |acc, &k| acc * (m + 1) + k as usize);
            data[flat]
        })
        .collect();
    HermiteCombo::new(basis.clone(), coeffs)
}

/// Multiplies each coefficient by r^{|ν|} e^{i|ν|α}.
pub fn apply_spectral_phases(combo: &HermiteCombo, alpha: f64, r: f64) -> HermiteCombo {
    combo.map_by_degree(|n| Complex64::from_polar(r.powi(n as i32), n as f64 * alpha))
}

/// D^α f = Σ e^{i|ν|α} ⟨f, h_ν⟩ h_ν truncated at |ν| ≤ M (smoothed by r^{|ν|}
/// when the plan has r < 1).
pub fn fdt_spectral(f: &dyn Evaluable, plan: &TransformPlan) -> Result<SpectralTransform> {
    let samples = f.sample_on(&plan.grid)?;
    fdt_spectral_samples(&samples, plan)
}

pub fn fdt_spectral_samples(samples: &[Complex64], plan: &TransformPlan) -> Result<SpectralTransform> {
    let input = hermite_coefficients(samples, &plan.grid, &plan.basis)?;
    let norm2 = plan.grid.inner_product_samples(samples, samples)?.re;
    let captured: f64 = input.coeffs().iter().map(|c| c.norm_sqr()).sum();
    let tail = (norm2 - captured).max(0.0).sqrt();
    let output = apply_spectral_phases(&input, plan.alpha, plan.r);
    Ok(SpectralTransform { input, output, tail })
}

// ---- integral and smoothed routes ------------------------------------------

/// D^α f(x) = A_α ∫ f(y) K_α(x, y) ω_k(y) dy at the given points.
pub fn fdt_integral(f: &dyn Evaluable, plan: &TransformPlan, xs: &[Vec<f64>]) -> Result<Vec<Complex64>> {
    plan.require_generic()?;
    let samples = f.sample_on(&plan.grid)?;
    fdt_integral_samples(&samples, plan, xs)
}

pub fn fdt_integral_samples(samples: &[Complex64], plan: &TransformPlan, xs: &[Vec<f64>]) -> Result<Vec<Complex64>> {
    plan.require_generic()?;
    let rows = alpha_rows(plan, plan.alpha)?;
    apply_at_points(&plan.grid, samples, xs, &rows)
}

/// Integral route with output on the plan grid's nodes.
pub fn fdt_integral_on_grid(f: &dyn Evaluable, plan: &TransformPlan) -> Result<Vec<Complex64>> {
    plan.require_generic()?;
    let samples = f.sample_on(&plan.grid)?;
    fdt_integral_grid_samples(&samples, plan)
}

pub fn fdt_integral_grid_samples(samples: &[Complex64], plan: &TransformPlan) -> Result<Vec<Complex64>> {
    plan.require_generic()?;
    let rows = alpha_rows(plan, plan.alpha)?;
    apply_on_grid(&plan.grid, samples, &rows)
}

/// D_{k,r}^α f(x) = ∫ K_α(r, x, y) f(y) ω_k(y) dy.
pub fn fdt_smoothed(f: &dyn Evaluable, plan: &TransformPlan, xs: &[Vec<f64>]) -> Result<Vec<Complex64>> {
    plan.require_smoothing()?;
    let samples = f.sample_on(&plan.grid)?;
    apply_at_points(&plan.grid, &samples, xs, &smoothed_rows(plan))
}

pub fn fdt_smoothed_on_grid(f: &dyn Evaluable, plan: &TransformPlan) -> Result<Vec<Complex64>> {
    plan.require_smoothing()?;
    let samples = f.sample_on(&plan.grid)?;
    apply_on_grid(&plan.grid, &samples, &smoothed_rows(plan))
}

/// The Dunkl transform D^{−π/2} f on the grid nodes, by the integral route.
pub fn dunkl_transform_on_grid(samples: &[Complex64], plan: &TransformPlan) -> Result<Vec<Complex64>> {
    fdt_integral_grid_samples(samples, &plan.at_alpha(-PI / 2.0)?)
}

/// D^α f written as the kernel of order α + π/2 applied to the Dunkl
/// transform of f; usable for |cos α| ≥ s_min, including α near 0.
pub fn fdt_alternative(f: &dyn Evaluable, plan: &TransformPlan, xs: &[Vec<f64>]) -> Result<Vec<Complex64>> {
    let samples = f.sample_on(&plan.grid)?;
    let dk = dunkl_transform_on_grid(&samples, plan)?;
    let shifted = plan.at_alpha(plan.alpha + PI / 2.0)?;
    fdt_integral_samples(&dk, &shifted, xs)
}

/// Values of D^α f by the chosen route.
pub fn fdt(f: &dyn Evaluable, plan: &TransformPlan, route: Route, xs: &[Vec<f64>]) -> Result<Vec<Complex64>> {
    match route {
        Route::Spectral => fdt_spectral(f, plan)?.output.eval_many(xs),
        Route::Integral => fdt_integral(f, plan, xs),
        Route::Smoothed => fdt_smoothed(f, plan, xs),
    }
}

// ---- Hankel, Bochner, Master ------------------------------------------------

/// H_ν^α ψ(x) = 2B_ν ∫_0^∞ e^{−(i/2)(x²+y²)cot α} j_ν(xy/sin α) ψ(y) y^{2ν+1} dy
/// on a given radial rule.
pub fn fractional_hankel_with(
    psi: &(dyn Fn(f64) -> Complex64 + Sync),
    order: BesselOrder,
    alpha: f64,
    rule: &RadialGrid,
    x: f64,
) -> Result<Complex64> {
    if (rule.power() - (2.0 * order.value() + 1.0)).abs() > 1e-12 {
        return Err(Error::Usage("radial rule weight does not match the Bessel order".into()));
    }
    let b = hankel_constant(order, alpha)?;
    let (s, co) = alpha.sin_cos();
    let cot = co / s;
    let terms = rule
        .nodes()
        .iter()
        .zip(rule.weights())
        .map(|(&y, &w)| {
            let phase = Complex64::from_polar(1.0, -0.5 * cot * (x * x + y * y));
            Ok(phase * normalized_jbessel(order, x * y / s)? * psi(y) * w)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(2.0 * b * crate::quadrature::pairwise_sum(&terms))
}

/// Fractional Hankel transform with the plan's order, regime checks and box.
pub fn fractional_hankel(
    psi: &(dyn Fn(f64) -> Complex64 + Sync),
    order: BesselOrder,
    plan: &TransformPlan,
    x: f64,
) -> Result<Complex64> {
    plan.require_generic()?;
    fractional_hankel_with(psi, order, plan.alpha, &plan.radial_rule(order)?, x)
}

fn require_harmonic(p: &MultiPoly, mult: &Multiplicity) -> Result<usize> {
    check_dim(mult.dim(), p.dim())?;
    let n = p.homogeneous_degree().ok_or_else(|| Error::Usage("polynomial must be homogeneous".into()))?;
    if !dunkl_laplacian(p, mult)?.is_zero() {
        return Err(Error::Usage("polynomial is not annihilated by the Dunkl Laplacian".into()));
    }
    Ok(n)
}

/// e^{inα} p(x) H^α_{n+λ} ψ(|x|) for a Δ_k-harmonic p of degree n, N ≥ 2.
pub fn bochner_fdt(
    p: &MultiPoly,
    psi: &(dyn Fn(f64) -> Complex64 + Sync),
    plan: &TransformPlan,
    x: &[f64],
) -> Result<Complex64> {
    if plan.dim() < 2 {
        return Err(Error::Usage("the Bochner identity needs N >= 2".into()));
    }
    let n = require_harmonic(p, &plan.mult)?;
    check_dim(plan.dim(), x.len())?;
    let order = BesselOrder::new(n as f64 + plan.mult.lambda_index())?;
    let radius = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    let h = fractional_hankel(psi, order, plan, radius)?;
    Ok(Complex64::from_polar(1.0, n as f64 * plan.alpha) * p.eval(x)? * h)
}

/// e^{−|y|²/2} e^{−Δ_k/4} p, the input side of the Master formula.
pub fn master_formula_input(p: &MultiPoly, mult: &Multiplicity) -> Result<GaussPoly> {
    check_dim(mult.dim(), p.dim())?;
    Ok(GaussPoly::new(heat_exp_poly_rational(p, &q(-1, 4), mult)?))
}

/// e^{inα} e^{−|x|²/2} (e^{−Δ_k/4} p)(x) for homogeneous p of degree n.
pub fn master_formula_rhs(p: &MultiPoly, plan: &TransformPlan, x: &[f64]) -> Result<Complex64> {
    let n = p.homogeneous_degree().ok_or_else(|| Error::Usage("polynomial must be homogeneous".into()))?;
    let g = master_formula_input(p, &plan.mult)?;
    Ok(Complex64::from_polar(1.0, n as f64 * plan.alpha) * g.eval(x)?)
}

/// Exact L_m^{(a)}(|x|²) as a polynomial in N variables.
pub fn laguerre_radial_poly(dim: usize, m: usize, a: &BigRational) -> MultiPoly {
    let r2 = MultiPoly::norm_squared(dim);
    let mut out = MultiPoly::zero(dim);
    let mut power = MultiPoly::one(dim);
    let mut k_fact = BigRational::one();
    for k in 0..=m {
        if k > 0 {
            power = &power * &r2;
            k_fact *= qint(k as i64);
        }
        // C(m + a, m − k) = ∏_{i=1}^{m−k} (a + k + i)/i
        let mut binom = BigRational::one();
        for i in 1..=(m - k) {
            binom *= (a + qint((k + i) as i64)) / qint(i as i64);
        }
        let sign = if k % 2 == 0 { BigRational::one() } else { -BigRational::one() };
        out = &out + &power.scale_rational(&(sign * binom / &k_fact));
    }
    out
}

/// ψ = Y(x) L_m^{(n+λ)}(|x|²) e^{−|x|²/2} for a harmonic Y of degree n; an
/// eigenfunction of D^α with eigenvalue e^{iα(n+2m)}.
pub fn eigen_psi(mult: &Multiplicity, m: usize, harmonic: &MultiPoly) -> Result<GaussPoly> {
    let n = require_harmonic(harmonic, mult)?;
    let dim = mult.dim();
    let lambda = mult.gamma_index_exact() + q(dim as i64, 2) - BigRational::one();
    let a = lambda + qint(n as i64);
    Ok(GaussPoly::new(harmonic * &laguerre_radial_poly(dim, m, &a)))
}

// ---- identities checked by quadrature --------------------------------------

/// Two sides of an identity evaluated independently.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IdentityCheck {
    pub lhs: Complex64,
    pub rhs: Complex64,
}

impl IdentityCheck {
    pub fn residual(&self) -> f64 {
        (self.lhs - self.rhs).norm()
    }

    pub fn relative(&self) -> f64 {
        self.residual() / self.rhs.norm().max(f64::MIN_POSITIVE)
    }
}

/// (1/d_k) ∫_{S¹} K(ix, y) ω_k(y) dσ(y) on a weighted circle rule, N = 2.
pub fn funk_hecke_radial(mult: &Multiplicity, x: &[f64], circle: &WeightedCircleGrid) -> Result<Complex64> {
    check_dim(2, mult.dim())?;
    check_dim(2, x.len())?;
    let dk = sphere_weight_mass(mult)?;
    let z = [Complex64::new(0.0, x[0]), Complex64::new(0.0, x[1])];
    let terms = circle
        .points()
        .iter()
        .zip(circle.weights())
        .map(|(y, &w)| Ok(dunkl_kernel_prod(mult, &z, y)? * w))
        .collect::<Result<Vec<_>>>()?;
    Ok(crate::quadrature::pairwise_sum(&terms) / dk)
}

fn quadratic_form(z: &[Complex64]) -> Complex64 {
    z.iter().map(|v| v * v).sum()
}

/// c_k ∫ K(2z, x) K(2w, x) e^{−A|x|²} ω_k dx against e^{(l(z)+l(w))/A} A^{−(γ+N/2)} K(2z/A, w).
pub fn gaussian_bilinear_check(
    mult: &Multiplicity,
    z: &[Complex64],
    w: &[Complex64],
    a: Complex64,
    grid: &QuadGrid,
) -> Result<IdentityCheck> {
    if !(a.re > 0.0) {
        return Err(Error::Domain(format!("Re A must be positive, got {a}")));
    }
    check_dim(mult.dim(), z.len())?;
    check_dim(mult.dim(), w.len())?;
    check_dim(mult.dim(), grid.dim())?;
    let z2: Vec<Complex64> = z.iter().map(|v| 2.0 * v).collect();
    let w2: Vec<Complex64> = w.iter().map(|v| 2.0 * v).collect();
    let samples = grid.sample(|x| {
        let x2: f64 = x.iter().map(|v| v * v).sum();
        Ok(dunkl_kernel_prod(mult, &z2, x)? * dunkl_kernel_prod(mult, &w2, x)? * (-a * x2).exp())
    })?;
    let lhs = mult.c_k() * grid.integrate_samples(&samples)?;
    let za: Vec<Complex64> = z2.iter().map(|v| v / a).collect();
    let rhs = ((quadratic_form(z) + quadratic_form(w)) / a).exp()
        * a.powc(c(-mult.half_weight_degree()))
        * dunkl_kernel_prod_complex(mult, &za, w)?;
    Ok(IdentityCheck { lhs, rhs })
}

/// c_k ∫ p(y) K(x, 2y) e^{−ω|y|²} ω_k dy against
/// e^{l(x)/ω} ω^{−(γ+n+N/2)} (e^{(ω/4)Δ_k} p)(x), with l(x) = Σ x_j².
pub fn gaussian_moment_check(
    p: &MultiPoly,
    mult: &Multiplicity,
    omega: Complex64,
    x: &[Complex64],
    grid: &QuadGrid,
) -> Result<IdentityCheck> {
    if !(omega.re > 0.0) {
        return Err(Error::Domain(format!("Re omega must be positive, got {omega}")));
    }
    check_dim(mult.dim(), p.dim())?;
    check_dim(mult.dim(), x.len())?;
    check_dim(mult.dim(), grid.dim())?;
    let n = p.homogeneous_degree().ok_or_else(|| Error::Usage("polynomial must be homogeneous".into()))?;
    let fp = p.compile();
    let samples = grid.sample(|y| {
        let y2: f64 = y.iter().map(|v| v * v).sum();
        let twice: Vec<Complex64> = y.iter().map(|v| c(2.0 * v)).collect();
        Ok(fp.eval(y)? * dunkl_kernel_prod_complex(mult, x, &twice)? * (-omega * y2).exp())
    })?;
    let lhs = mult.c_k() * grid.integrate_samples(&samples)?;
    let heat = heat_exp_poly(p, &qc_from_c64(omega / 4.0)?, mult)?;
    let rhs = (quadratic_form(x) / omega).exp()
        * omega.powc(c(-(mult.half_weight_degree() + n as f64)))
        * heat.eval_complex(x)?;
    Ok(IdentityCheck { lhs, rhs })
}

/// (1/d_k)∫ K(ix, y) ω_k dσ should equal j_λ(|x|); returns both sides.
pub fn funk_hecke_check(mult: &Multiplicity, x: &[f64], circle: &WeightedCircleGrid) -> Result<IdentityCheck> {
    let lhs = funk_hecke_radial(mult, x, circle)?;
    let radius = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    let rhs = c(normalized_jbessel(BesselOrder::new(mult.lambda_index())?, radius)?);
    Ok(IdentityCheck { lhs, rhs })
}

/// c_k^{−1} against π^{N/2} Γ(λ+1) d_k / Γ(N/2) with d_k from the circle rule.
pub fn mehta_sphere_check(mult: &Multiplicity, circle: &WeightedCircleGrid) -> Result<IdentityCheck> {
    check_dim(2, mult.dim())?;
    let lhs = c(1.0 / mult.c_k());
    let rhs = c(PI * gamma_fn(mult.lambda_index() + 1.0)? * circle.total_mass());
    Ok(IdentityCheck { lhs, rhs })
}

//! Deterministic quadrature for ∫ f(y) ω_k(y) dy on ℝᴺ, the unit circle and
//! the half line.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, check_dim};
use crate::eval::Evaluable;
use crate::specfun::{Multiplicity, gamma_fn, ln_gamma};

/// Default half-width of the truncation box. N = 1 uses a wider box so that
/// Hermite functions up to the default degree 24 stay inside it.
pub fn default_half_width(dim: usize) -> f64 {
    if dim == 1 { 10.0 } else { 8.0 }
}

/// Relative tolerance of the calibration identity Σ w e^{−|y|²} = c_k^{−1}.
pub const CALIBRATION_TOL: f64 = 1e-9;

/// Default points per axis (even; half of them on each side of the origin).
pub fn default_points(dim: usize) -> usize {
    if dim == 1 { 320 } else { 160 }
}

/// Gauss–Legendre nodes (ascending) and weights on [−1, 1].
pub fn gauss_legendre(n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if !(1..=512).contains(&n) {
        return Err(Error::Usage(format!("gauss_legendre supports 1 <= n <= 512, got {n}")));
    }
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    Ok((nodes, weights))
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Gauss–Jacobi nodes (ascending) and weights on [−1, 1] for the weight
/// (1−x)^a (1+x)^b, a, b > −1.
pub fn gauss_jacobi(n: usize, a: f64, b: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    if n == 0 || n > 2048 {
        return Err(Error::Usage(format!("gauss_jacobi supports 1 <= n <= 2048, got {n}")));
    }
    if !(a > -1.0 && b > -1.0) {
        return Err(Error::Domain(format!("Jacobi exponents must exceed -1, got ({a}, {b})")));
    }
    let (diag, off) = jacobi_matrix(n, a, b);
    let mu0 = ((a + b + 1.0) * 2f64.ln() + ln_gamma(a + 1.0)? + ln_gamma(b + 1.0)? - ln_gamma(a + b + 2.0)?).exp();
    let mut nodes = tridiagonal_eigenvalues(&diag, &off);
    let mut weights = Vec::with_capacity(n);
    for x in nodes.iter_mut() {
        // polish as a root of the degree-n orthonormal polynomial
        for _ in 0..3 {
            let (p, dp, _) = orthonormal_values(&diag, &off, *x);
            if dp == 0.0 {
                break;
            }
            let step = p / dp;
            if !step.is_finite() || step.abs() > 1e-8 {
                break;
            }
            *x -= step;
        }
        let (_, _, sumsq) = orthonormal_values(&diag, &off, *x);
        weights.push(mu0 / sumsq);
    }
    Ok((nodes, weights))
}

fn jacobi_matrix(n: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let ab = a + b;
    let diag = (0..n)
        .map(|k| {
            let k = k as f64;
            if k == 0.0 { (b - a) / (ab + 2.0) } else { (b * b - a * a) / ((2.0 * k + ab) * (2.0 * k + ab + 2.0)) }
        })
        .collect();
    // off[k-1] = sqrt(β_k), k = 1..n-1
    let off = (1..n)
        .map(|k| {
            let k = k as f64;
            let beta = if k == 1.0 {
                4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + ab).powi(2) * (3.0 + ab))
            } else {
                let s = 2.0 * k + ab;
                4.0 * k * (k + a) * (k + b) * (k + ab) / (s * s * (s + 1.0) * (s - 1.0))
            };
            beta.sqrt()
        })
        .collect();
    (diag, off)
}

/// Value and derivative of the degree-n orthonormal polynomial (up to a
/// positive factor) and Σ_{k<n} p̂_k(x)².
fn orthonormal_values(diag: &[f64], off: &[f64], x: f64) -> (f64, f64, f64) {
    let n = diag.len();
    let (mut p_prev, mut p) = (0.0, 1.0);
    let (mut d_prev, mut d) = (0.0, 0.0);
    let mut sumsq = 0.0;
    for k in 0..n {
        sumsq += p * p;
        let b_k = if k == 0 { 0.0 } else { off[k - 1] };
        let b_next = if k + 1 < n { off[k] } else { 1.0 };
        let p_next = ((x - diag[k]) * p - b_k * p_prev) / b_next;
        let d_next = (p + (x - diag[k]) * d - b_k * d_prev) / b_next;
        p_prev = p;
        p = p_next;
        d_prev = d;
        d = d_next;
    }
    (p, d, sumsq)
}

/// Eigenvalues (ascending) of a symmetric tridiagonal matrix by Sturm bisection.
fn tridiagonal_eigenvalues(diag: &[f64], off: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let radius = |i: usize| {
        let l = if i > 0 { off[i - 1].abs() } else { 0.0 };
        let r = if i + 1 < n { off[i].abs() } else { 0.0 };
        l + r
    };
    let lo = (0..n).map(|i| diag[i] - radius(i)).fold(f64::INFINITY, f64::min);
    let hi = (0..n).map(|i| diag[i] + radius(i)).fold(f64::NEG_INFINITY, f64::max);
    let count_below = |x: f64| -> usize {
        let mut count = 0;
        let mut q = 1.0;
        for i in 0..n {
            let e2 = if i > 0 { off[i - 1] * off[i - 1] } else { 0.0 };
            q = diag[i] - x - if i > 0 { e2 / q } else { 0.0 };
            if q == 0.0 {
                q = -1e-300;
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    };
    (0..n)
        .map(|k| {
            let (mut a, mut b) = (lo, hi);
            for _ in 0..200 {
                let mid = 0.5 * (a + b);
                if mid <= a || mid >= b {
                    break;
                }
                if count_below(mid) > k {
                    b = mid;
                } else {
                    a = mid;
                }
            }
            0.5 * (a + b)
        })
        .collect()
}

/// Rule for ∫_0^L g(y) y^p dy with the power weight folded into the weights.
#[derive(Debug, Clone, PartialEq)]
pub struct HalfLineRule {
    power: f64,
    half_width: f64,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl HalfLineRule {
    pub fn new(power: f64, half_width: f64, n: usize) -> Result<Self> {
        if !(half_width > 0.0) {
            return Err(Error::Domain(format!("half-width must be positive, got {half_width}")));
        }
        if !(power > -1.0) {
            return Err(Error::Domain(format!("weight power must exceed -1, got {power}")));
        }
        let (t, w) = gauss_jacobi(n, 0.0, power)?;
        let h = half_width / 2.0;
        let scale = h.powf(power + 1.0);
        let nodes = t.iter().map(|t| h * (1.0 + t)).collect();
        let weights = w.iter().map(|w| w * scale).collect();
        Ok(Self { power, half_width, nodes, weights })
    }

    pub fn power(&self) -> f64 {
        self.power
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn integrate(&self, f: impl Fn(f64) -> Complex64) -> Complex64 {
        let terms: Vec<Complex64> = self.nodes.iter().zip(&self.weights).map(|(&y, &w)| f(y) * w).collect();
        pairwise_sum(&terms)
    }
}

/// Radial rule for ∫_0^∞ ψ(y) y^{2ν+1} dy, used by the fractional Hankel transform.
pub type RadialGrid = HalfLineRule;

/// Radial rule for Bessel order ν with the default box.
pub fn radial_grid(order: f64, half_width: f64, n: usize) -> Result<RadialGrid> {
    HalfLineRule::new(2.0 * order + 1.0, half_width, n)
}

/// Symmetric rule on [−L, L] for the weight |y|^{2μ}.
#[derive(Debug, Clone, PartialEq)]
pub struct AxisRule {
    mu: f64,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl AxisRule {
    /// `n` points in total; must be even.
    pub fn new(mu: f64, half_width: f64, n: usize) -> Result<Self> {
        if !n.is_multiple_of(2) || n < 2 {
            return Err(Error::Usage(format!("points per axis must be even and >= 2, got {n}")));
        }
        let half = HalfLineRule::new(2.0 * mu, half_width, n / 2)?;
        let mut nodes: Vec<f64> = half.nodes.iter().rev().map(|y| -y).collect();
        nodes.extend_from_slice(&half.nodes);
        let mut weights: Vec<f64> = half.weights.iter().rev().copied().collect();
        weights.extend_from_slice(&half.weights);
        Ok(Self { mu, nodes, weights })
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Serializable description of a [`QuadGrid`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub dim: usize,
    pub half_width: f64,
    pub points_per_axis: usize,
    pub mu: Vec<f64>,
}

/// Tensor grid on [−L, L]ᴺ with ω_k folded into the weights. Nodes are stored
/// row-major with the last axis varying fastest.
#[derive(Debug, Clone)]
pub struct QuadGrid {
    mult: Multiplicity,
    half_width: f64,
    points_per_axis: usize,
    axes: Vec<AxisRule>,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl QuadGrid {
    /// Builds the grid and checks the calibration identity.
    pub fn new(mult: &Multiplicity, half_width: f64, points_per_axis: usize) -> Result<Self> {
        if points_per_axis < 8 {
            return Err(Error::Usage(format!("points per axis must be >= 8, got {points_per_axis}")));
        }
        let n = points_per_axis + points_per_axis % 2;
        let axes = mult.mu().iter().map(|&m| AxisRule::new(m, half_width, n)).collect::<Result<Vec<_>>>()?;
        let dim = mult.dim();
        let total = n.pow(dim as u32);
        let mut nodes = Vec::with_capacity(total * dim);
        let mut weights = Vec::with_capacity(total);
        let mut idx = vec![0usize; dim];
        for _ in 0..total {
            let mut w = 1.0;
            for (j, &i) in idx.iter().enumerate() {
                nodes.push(axes[j].nodes[i]);
                w *= axes[j].weights[i];
            }
            weights.push(w);
            for j in (0..dim).rev() {
                idx[j] += 1;
                if idx[j] < n {
                    break;
                }
                idx[j] = 0;
            }
        }
        let grid = Self { mult: mult.clone(), half_width, points_per_axis: n, axes, nodes, weights };
        let residual = grid.calibration_residual();
        if !(residual <= CALIBRATION_TOL) {
            return Err(Error::Calibration { residual, tolerance: CALIBRATION_TOL });
        }
        Ok(grid)
    }

    pub fn with_defaults(mult: &Multiplicity) -> Result<Self> {
        Self::new(mult, default_half_width(mult.dim()), default_points(mult.dim()))
    }

    pub fn from_spec(spec: &GridSpec) -> Result<Self> {
        check_dim(spec.dim, spec.mu.len())?;
        Self::new(&Multiplicity::new(spec.mu.clone())?, spec.half_width, spec.points_per_axis)
    }

    pub fn spec(&self) -> GridSpec {
        GridSpec {
            dim: self.dim(),
            half_width: self.half_width,
            points_per_axis: self.points_per_axis,
            mu: self.mult.mu().to_vec(),
        }
    }

    /// |Σ w e^{−|y|²} · c_k − 1|.
    pub fn calibration_residual(&self) -> f64 {
        let terms: Vec<f64> = (0..self.len())
            .map(|i| {
                let r2: f64 = self.node(i).iter().map(|v| v * v).sum();
                self.weights[i] * (-r2).exp()
            })
            .collect();
        (pairwise_sum_real(&terms) * self.mult.c_k() - 1.0).abs()
    }

    /// Smallest |sin α| at which the oscillatory kernel is still resolved on
    /// this grid, 1.1 L²/n. Measured route errors jump from 1e-14 to O(1)
    /// just below L²/n.
    pub fn resolved_sin_min(&self) -> f64 {
        1.1 * self.half_width() * self.half_width() / self.points_per_axis() as f64
    }

    pub fn mult(&self) -> &Multiplicity {
        &self.mult
    }

    pub fn dim(&self) -> usize {
        self.mult.dim()
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn points_per_axis(&self) -> usize {
        self.points_per_axis
    }

    pub fn axis(&self, j: usize) -> &AxisRule {
        &self.axes[j]
    }

    pub fn axes(&self) -> &[AxisRule] {
        &self.axes
    }

    /// Shape of sample tensors, one entry per axis.
    pub fn shape(&self) -> Vec<usize> {
        vec![self.points_per_axis; self.dim()]
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn node(&self, i: usize) -> &[f64] {
        let d = self.dim();
        &self.nodes[i * d..(i + 1) * d]
    }

    pub fn nodes(&self) -> impl Iterator<Item = &[f64]> {
        self.nodes.chunks(self.dim())
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Σ w f.
    pub fn integrate_samples(&self, f: &[Complex64]) -> Result<Complex64> {
        check_dim(self.len(), f.len())?;
        let terms: Vec<Complex64> = f.iter().zip(&self.weights).map(|(v, w)| v * w).collect();
        Ok(pairwise_sum(&terms))
    }

    /// Σ w f conj(g) on sample vectors.
    pub fn inner_product_samples(&self, f: &[Complex64], g: &[Complex64]) -> Result<Complex64> {
        check_dim(self.len(), f.len())?;
        check_dim(self.len(), g.len())?;
        let terms: Vec<Complex64> = f.iter().zip(g).zip(&self.weights).map(|((a, b), w)| a * b.conj() * w).collect();
        Ok(pairwise_sum(&terms))
    }

    /// ‖f‖₂ from samples.
    pub fn norm_samples(&self, f: &[Complex64]) -> Result<f64> {
        Ok(self.inner_product_samples(f, f)?.re.max(0.0).sqrt())
    }

    /// Evaluates a closure at all nodes in parallel; output order is node order.
    pub fn sample(&self, f: impl Fn(&[f64]) -> Result<Complex64> + Sync) -> Result<Vec<Complex64>> {
        (0..self.len()).into_par_iter().map(|i| f(self.node(i))).collect()
    }
}

/// ⟨f, g⟩ = ∫ f conj(g) ω_k dx on the grid.
pub fn inner_product(f: &dyn Evaluable, g: &dyn Evaluable, grid: &QuadGrid) -> Result<Complex64> {
    let a = f.sample_on(grid)?;
    let b = g.sample_on(grid)?;
    grid.inner_product_samples(&a, &b)
}

/// Pairwise (tree) summation with a fixed split, independent of thread count.
pub fn pairwise_sum(v: &[Complex64]) -> Complex64 {
    if v.len() <= 32 {
        return v.iter().sum();
    }
    let mid = v.len() / 2;
    pairwise_sum(&v[..mid]) + pairwise_sum(&v[mid..])
}

pub fn pairwise_sum_real(v: &[f64]) -> f64 {
    if v.len() <= 32 {
        return v.iter().sum();
    }
    let mid = v.len() / 2;
    pairwise_sum_real(&v[..mid]) + pairwise_sum_real(&v[mid..])
}

/// Uniform rule on the unit circle for the normalized measure dσ = dθ/2π.
#[derive(Debug, Clone, PartialEq)]
pub struct CircleGrid {
    angles: Vec<f64>,
    weights: Vec<f64>,
}

pub fn circle_grid(n: usize) -> Result<CircleGrid> {
    if n < 8 {
        return Err(Error::Usage(format!("circle grid needs n >= 8, got {n}")));
    }
    let angles = (0..n).map(|i| 2.0 * PI * i as f64 / n as f64).collect();
    Ok(CircleGrid { angles, weights: vec![1.0 / n as f64; n] })
}

impl CircleGrid {
    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn integrate(&self, f: impl Fn([f64; 2]) -> Complex64) -> Complex64 {
        let terms: Vec<Complex64> =
            self.angles.iter().zip(&self.weights).map(|(&t, &w)| f([t.cos(), t.sin()]) * w).collect();
        pairwise_sum(&terms)
    }
}

/// Rule for ∫_{S¹} g(y) ω_k(y) dσ(y) with ω_k = |y₁|^{2μ₁}|y₂|^{2μ₂} folded in.
///
/// Per quadrant the substitution t = sin²θ turns the weight into a Jacobi
/// weight in t; mirroring into all four quadrants makes the sum exact on the
/// reflection-odd parts.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedCircleGrid {
    points: Vec<[f64; 2]>,
    weights: Vec<f64>,
}

impl WeightedCircleGrid {
    /// `n` Gauss–Jacobi nodes per quadrant.
    pub fn new(mult: &Multiplicity, n: usize) -> Result<Self> {
        check_dim(2, mult.dim())?;
        let (m1, m2) = (mult.mu()[0], mult.mu()[1]);
        let (a, b) = (m1 - 0.5, m2 - 0.5);
        let (s, w) = gauss_jacobi(n, a, b)?;
        // dσ = dθ/2π, dθ = dt / (2√(t(1−t))), t = (1+s)/2
        let factor = 2f64.powf(-(a + b + 1.0)) / (4.0 * PI);
        let mut points = Vec::with_capacity(4 * n);
        let mut weights = Vec::with_capacity(4 * n);
        for (si, wi) in s.iter().zip(&w) {
            let t = 0.5 * (1.0 + si);
            let (c, sn) = ((1.0 - t).sqrt(), t.sqrt());
            for (sx, sy) in [(1.0, 1.0), (-1.0, 1.0), (-1.0, -1.0), (1.0, -1.0)] {
                points.push([sx * c, sy * sn]);
                weights.push(wi * factor);
            }
        }
        Ok(Self { points, weights })
    }

    pub fn points(&self) -> &[[f64; 2]] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// d_k = ∫ ω_k dσ by the rule.
    pub fn total_mass(&self) -> f64 {
        pairwise_sum_real(&self.weights)
    }

    pub fn integrate(&self, f: impl Fn([f64; 2]) -> Complex64) -> Complex64 {
        let terms: Vec<Complex64> = self.points.iter().zip(&self.weights).map(|(&p, &w)| f(p) * w).collect();
        pairwise_sum(&terms)
    }
}

/// d_k for N = 2 in closed form, (1/π) B(μ₁+1/2, μ₂+1/2).
pub fn sphere_weight_mass(mult: &Multiplicity) -> Result<f64> {
    check_dim(2, mult.dim())?;
    let (a, b) = (mult.mu()[0] + 0.5, mult.mu()[1] + 0.5);
    Ok(gamma_fn(a)? * gamma_fn(b)? / (gamma_fn(a + b)? * PI))
}

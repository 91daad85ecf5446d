//! The unitary group s ↦ D^s: spectral projections, resolvent, generator and
//! difference quotients.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use num_traits::One;

use crate::error::{Error, Result, check_dim};
use crate::eval::{Evaluable, HermiteCombo};
use crate::polyengine::{GaussPoly, HermiteBasis, hermite_operator};
use crate::quadrature::{QuadGrid, gauss_legendre};
use crate::rational::{q, qc_i, qc_real};
use crate::specfun::{Multiplicity, dunkl_kernel_1d};
use crate::transform::{
    TransformPlan, apply_axis_kernel_on_grid, apply_spectral_phases, dunkl_transform_on_grid, fdt_integral_samples,
    hermite_coefficients,
};

/// Default number of s-nodes on [0, 2π).
pub const DEFAULT_Q: usize = 64;

/// Smallest admitted distance from λ to iℤ in the resolvent.
pub const RESOLVENT_MIN_DIST: f64 = 0.1;

/// Equispaced s-nodes on [0, 2π) together with the discretization used to
/// turn functions into Hermite coefficients.
#[derive(Debug, Clone)]
pub struct GroupSampler {
    grid: Arc<QuadGrid>,
    basis: Arc<HermiteBasis>,
    nodes: Vec<f64>,
}

impl GroupSampler {
    pub fn new(grid: Arc<QuadGrid>, basis: Arc<HermiteBasis>, q: usize) -> Result<Self> {
        check_dim(grid.dim(), basis.dim())?;
        let need = 2 * basis.max_degree() + 2;
        if q < need {
            return Err(Error::Usage(format!(
                "Q = {q} is below the Nyquist bound {need} for degree {}",
                basis.max_degree()
            )));
        }
        let nodes = (0..q).map(|k| 2.0 * PI * k as f64 / q as f64).collect();
        Ok(Self { grid, basis, nodes })
    }

    pub fn from_plan(plan: &TransformPlan, q: usize) -> Result<Self> {
        Self::new(plan.grid().clone(), plan.basis().clone(), q)
    }

    pub fn q(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn basis(&self) -> &Arc<HermiteBasis> {
        &self.basis
    }

    pub fn grid(&self) -> &Arc<QuadGrid> {
        &self.grid
    }

    /// Hermite coefficients of an arbitrary function by quadrature.
    pub fn coefficients(&self, f: &dyn Evaluable) -> Result<HermiteCombo> {
        let samples = f.sample_on(&self.grid)?;
        hermite_coefficients(&samples, &self.grid, &self.basis)
    }

    /// D^{s_q} f at every node, by the spectral route.
    pub fn orbit(&self, f: &HermiteCombo) -> Result<GroupOrbit> {
        self.check_basis(f)?;
        let values = self.nodes.iter().map(|&s| apply_spectral_phases(f, s, 1.0)).collect();
        Ok(GroupOrbit { nodes: self.nodes.clone(), values })
    }

    fn check_basis(&self, f: &HermiteCombo) -> Result<()> {
        if !Arc::ptr_eq(f.basis(), &self.basis) && f.basis().indices() != self.basis.indices() {
            return Err(Error::Usage("function is expanded in a different Hermite basis".into()));
        }
        Ok(())
    }
}

/// Cached values of the group path at the sampler nodes.
#[derive(Debug, Clone)]
pub struct GroupOrbit {
    nodes: Vec<f64>,
    values: Vec<HermiteCombo>,
}

impl GroupOrbit {
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn values(&self) -> &[HermiteCombo] {
        &self.values
    }

    /// Σ_q weights[q] D^{s_q} f.
    pub fn combine(&self, weights: &[Complex64]) -> Result<HermiteCombo> {
        check_dim(self.values.len(), weights.len())?;
        let basis = self.values[0].basis().clone();
        let mut coeffs = vec![Complex64::new(0.0, 0.0); basis.indices().len()];
        for (v, w) in self.values.iter().zip(weights) {
            for (c, a) in coeffs.iter_mut().zip(v.coeffs()) {
                *c += w * a;
            }
        }
        HermiteCombo::new(basis, coeffs)
    }

    /// P_n f = (1/2π)∫ e^{−ins} D^s f ds by the trapezoid rule.
    pub fn projection(&self, n: i64) -> Result<HermiteCombo> {
        let q = self.nodes.len() as f64;
        let w: Vec<Complex64> = self.nodes.iter().map(|&s| Complex64::from_polar(1.0 / q, -(n as f64) * s)).collect();
        self.combine(&w)
    }
}

/// P_n f, projection onto the eigenspace of T for the eigenvalue in.
pub fn spectral_projection(f: &HermiteCombo, n: i64, sampler: &GroupSampler) -> Result<HermiteCombo> {
    sampler.orbit(f)?.projection(n)
}

/// Σ_{n=0}^{n_max} P_n f.
pub fn eigen_decomposition_sum(f: &HermiteCombo, sampler: &GroupSampler, n_max: usize) -> Result<HermiteCombo> {
    weighted_projection_sum(f, sampler, n_max, |_| Complex64::one())
}

/// Σ_{n=0}^{n_max} in P_n f, which equals T f on the Hermite span.
pub fn eigen_generator_sum(f: &HermiteCombo, sampler: &GroupSampler, n_max: usize) -> Result<HermiteCombo> {
    weighted_projection_sum(f, sampler, n_max, |n| Complex64::new(0.0, n as f64))
}

fn weighted_projection_sum(
    f: &HermiteCombo,
    sampler: &GroupSampler,
    n_max: usize,
    weight: impl Fn(usize) -> Complex64,
) -> Result<HermiteCombo> {
    let orbit = sampler.orbit(f)?;
    let mut acc = HermiteCombo::zero(f.basis().clone());
    for n in 0..=n_max {
        acc = acc.add(&orbit.projection(n as i64)?.scale(weight(n)))?;
    }
    Ok(acc)
}

/// Distance from λ to iℤ.
pub fn distance_to_imaginary_integers(lambda: Complex64) -> f64 {
    lambda.re.hypot(lambda.im - lambda.im.round())
}

/// Weights w_q with Σ_q w_q D^{s_q} f = (1 − e^{−2πλ})^{−1} ∫_0^{2π} e^{−λs} D^s f ds
/// exactly for paths band-limited to |k| < Q/2.
pub fn filon_weights(q: usize, lambda: Complex64) -> Vec<Complex64> {
    let half = (q as i64 - 1) / 2;
    (0..q)
        .map(|j| {
            let s = 2.0 * PI * j as f64 / q as f64;
            (-half..=half)
                .map(|k| Complex64::from_polar(1.0, -(k as f64) * s) / (lambda - Complex64::new(0.0, k as f64)))
                .sum::<Complex64>()
                / q as f64
        })
        .collect()
}

/// R(λ, T) f = (1 − e^{−2πλ})^{−1} ∫_0^{2π} e^{−λs} D^s f ds.
pub fn resolvent_apply(f: &HermiteCombo, lambda: Complex64, sampler: &GroupSampler) -> Result<HermiteCombo> {
    let dist = distance_to_imaginary_integers(lambda);
    if !(dist >= RESOLVENT_MIN_DIST) {
        return Err(Error::Domain(format!(
            "lambda = {lambda} lies within {dist:.3e} of iZ; the resolvent quadrature needs at least {RESOLVENT_MIN_DIST}"
        )));
    }
    sampler.orbit(f)?.combine(&filon_weights(sampler.q(), lambda))
}

/// T f = i[½(|x|² − Δ_k) − (γ + N/2)] f in exact arithmetic.
pub fn generator_exact(f: &GaussPoly, mult: &Multiplicity) -> Result<GaussPoly> {
    check_dim(mult.dim(), f.dim())?;
    let shift = mult.gamma_index_exact() + q(mult.dim() as i64, 2);
    let half_oscillator = hermite_operator(f, mult)?.scale_exact(&qc_real(q(-1, 2)));
    Ok(half_oscillator.try_sub(&f.scale_exact(&qc_real(shift)))?.scale_exact(&qc_i()))
}

/// T on Hermite coefficients: c_ν ↦ i|ν| c_ν.
pub fn generator_combo(f: &HermiteCombo) -> HermiteCombo {
    f.map_by_degree(|n| Complex64::new(0.0, n as f64))
}

/// (λ − T) f on Hermite coefficients.
pub fn shifted_generator_combo(f: &HermiteCombo, lambda: Complex64) -> HermiteCombo {
    f.map_by_degree(|n| lambda - Complex64::new(0.0, n as f64))
}

/// T f(x) = −i(γ+N/2) f(x) + (i/2)|x|² f(x) + (i/2) D_k[|y|² D_k f](−x), with
/// both Dunkl transforms computed by quadrature.
pub fn generator_integral(f: &dyn Evaluable, plan: &TransformPlan, xs: &[Vec<f64>]) -> Result<Vec<Complex64>> {
    let grid = plan.grid();
    let samples = f.sample_on(grid)?;
    let transformed = dunkl_transform_on_grid(&samples, plan)?;
    let weighted: Vec<Complex64> =
        grid.nodes().zip(&transformed).map(|(y, v)| v * y.iter().map(|t| t * t).sum::<f64>()).collect();
    let reflected: Vec<Vec<f64>> = xs.iter().map(|x| x.iter().map(|t| -t).collect()).collect();
    let back = fdt_integral_samples(&weighted, &plan.at_alpha(-PI / 2.0)?, &reflected)?;
    let shift = plan.mult().half_weight_degree();
    let i = Complex64::new(0.0, 1.0);
    xs.iter()
        .zip(back)
        .map(|(x, b)| {
            let fx = f.eval(x)?;
            let r2: f64 = x.iter().map(|t| t * t).sum();
            Ok(-i * shift * fx + 0.5 * i * r2 * fx + 0.5 * i * b)
        })
        .collect()
}

/// e^z − 1 without cancellation for small z.
fn expm1_complex(z: Complex64) -> Complex64 {
    2.0 * (z / 2.0).exp() * (z / 2.0).sinh()
}

/// ((e^{−iα}/cos α)^{γ+N/2} − 1)/α.
pub fn quotient_prefactor(mult: &Multiplicity, alpha: f64) -> Complex64 {
    let log_cos = (-2.0 * (alpha / 2.0).sin().powi(2)).ln_1p();
    let z = mult.half_weight_degree() * Complex64::new(-log_cos, -alpha);
    expm1_complex(z) / alpha
}

/// (D^α f − f)/α on the grid nodes, assembled as
/// r₁(α)·c_k 2^{−(γ+N/2)}∫ r₃ D_k f ω_k + c_k 2^{−(γ+N/2)}∫ r₂ D_k f ω_k with
/// r₃(α) = e^{(i/2)tan α(|x|²+|y|²)} K(ix/cos α, y) and r₂ = (r₃(α) − r₃(0))/α.
pub fn difference_quotient_on_grid(f: &dyn Evaluable, alpha: f64, plan: &TransformPlan) -> Result<Vec<Complex64>> {
    if !(alpha.abs() > 0.0 && alpha.cos().abs() >= plan.s_min()) {
        return Err(Error::Usage(format!(
            "difference quotient needs alpha != 0 with |cos alpha| >= s_min, got {alpha}"
        )));
    }
    let grid = plan.grid();
    let mult = plan.mult();
    let samples = f.sample_on(grid)?;
    let dk = dunkl_transform_on_grid(&samples, plan)?;
    let scale = mult.c_k() / 2f64.powf(mult.half_weight_degree());
    let r3 = chirp_kernel_on_grid(&dk, alpha, plan)?;
    let r3_zero = chirp_kernel_on_grid(&dk, 0.0, plan)?;
    let r1 = quotient_prefactor(mult, alpha);
    Ok(r3.iter().zip(&r3_zero).map(|(a, b)| scale * (r1 * a + (a - b) / alpha)).collect())
}

/// ∫ e^{(i/2)tan α(|x|²+|y|²)} K(ix/cos α, y) g(y) ω_k(y) dy on the grid nodes.
fn chirp_kernel_on_grid(g: &[Complex64], alpha: f64, plan: &TransformPlan) -> Result<Vec<Complex64>> {
    let orders = plan.mult().orders().to_vec();
    let (s, c) = alpha.sin_cos();
    let tan = s / c;
    apply_axis_kernel_on_grid(plan.grid(), g, |j, x, y| {
        Ok(Complex64::from_polar(1.0, 0.5 * tan * (x * x + y * y))
            * dunkl_kernel_1d(orders[j], Complex64::new(0.0, x / c), y)?)
    })
}

/// ‖(D^α f − f)/α − T f‖₂ for each α, with f in the Hermite span.
pub fn difference_quotient(f: &HermiteCombo, alphas: &[f64], plan: &TransformPlan) -> Result<Vec<f64>> {
    let grid = plan.grid();
    let target = generator_combo(f).sample_on(grid)?;
    alphas
        .iter()
        .map(|&a| {
            let dq = difference_quotient_on_grid(f, a, plan)?;
            let diff: Vec<Complex64> = dq.iter().zip(&target).map(|(p, t)| p - t).collect();
            grid.norm_samples(&diff)
        })
        .collect()
}

/// Least-squares slope of log(residual) against log(α).
pub fn observed_order(alphas: &[f64], residuals: &[f64]) -> Result<f64> {
    check_dim(alphas.len(), residuals.len())?;
    if alphas.len() < 2 || residuals.iter().any(|r| !(*r > 0.0)) {
        return Err(Error::Usage("need at least two positive residuals".into()));
    }
    let lx: Vec<f64> = alphas.iter().map(|a| a.ln()).collect();
    let ly: Vec<f64> = residuals.iter().map(|r| r.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    Ok(sxy / sxx)
}

/// ∫_0^α D^s f ds by Gauss–Legendre in s with `q` nodes.
pub fn orbit_integral(f: &HermiteCombo, alpha: f64, q: usize) -> Result<HermiteCombo> {
    let (nodes, weights) = gauss_legendre(q)?;
    let mut acc = HermiteCombo::zero(f.basis().clone());
    for (t, w) in nodes.iter().zip(&weights) {
        let s = 0.5 * alpha * (t + 1.0);
        acc = acc.add(&apply_spectral_phases(f, s, 1.0).scale(Complex64::new(0.5 * alpha * w, 0.0)))?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyengine::MultiPoly;

    fn setup(mu: &[f64], degree: usize) -> GroupSampler {
        let m = Multiplicity::new(mu.to_vec()).unwrap();
        let grid = Arc::new(QuadGrid::new(&m, 8.0, 64).unwrap());
        let basis = Arc::new(HermiteBasis::new(&m, degree).unwrap());
        GroupSampler::new(grid, basis, DEFAULT_Q).unwrap()
    }

    #[test]
    fn projection_examples() {
        let s = setup(&[0.5], 8);
        let h3 = HermiteCombo::basis_function(s.basis().clone(), &[3]).unwrap();
        let p = spectral_projection(&h3, 3, &s).unwrap();
        assert!((p.coeff(&[3]).unwrap() - 1.0).norm() < 1e-14);
        assert!(spectral_projection(&h3, 2, &s).unwrap().norm() < 1e-12);
        assert!(spectral_projection(&h3, -3, &s).unwrap().norm() < 1e-12);
        assert!(GroupSampler::new(s.grid().clone(), s.basis().clone(), 10).is_err());
    }

    #[test]
    fn resolvent_examples() {
        let s = setup(&[0.5], 8);
        let h0 = HermiteCombo::basis_function(s.basis().clone(), &[0]).unwrap();
        let r = resolvent_apply(&h0, Complex64::new(1.0, 0.0), &s).unwrap();
        assert!((r.coeff(&[0]).unwrap() - 1.0).norm() < 1e-13);
        let h2 = HermiteCombo::basis_function(s.basis().clone(), &[2]).unwrap();
        let r = resolvent_apply(&h2, Complex64::new(1.0, 1.0), &s).unwrap();
        assert!((r.coeff(&[2]).unwrap() - 1.0 / Complex64::new(1.0, -1.0)).norm() < 1e-13);
        assert!(resolvent_apply(&h2, Complex64::new(0.05, 2.0), &s).is_err());
    }

    #[test]
    fn generator_on_basis() {
        let m = Multiplicity::new(vec![0.5, 1.5]).unwrap();
        let basis = HermiteBasis::new(&m, 3).unwrap();
        for nu in basis.indices() {
            let h = basis.hermite_function(nu).unwrap();
            let t = generator_exact(&h, &m).unwrap();
            let n = nu.iter().sum::<u32>() as i64;
            let expected = h.scale_exact(&(qc_i() * qc_real(q(n, 1))));
            assert!(t.try_sub(&expected).unwrap().poly().is_zero(), "nu={nu:?}");
        }
        let x1 = GaussPoly::new(MultiPoly::var(2, 0));
        let t = generator_exact(&x1, &m).unwrap();
        assert!(t.try_sub(&x1.scale_exact(&qc_i())).unwrap().poly().is_zero());
    }

    #[test]
    fn filon_weights_are_exact_on_band_limited_paths() {
        let lambda = Complex64::new(0.4, 0.7);
        let w = filon_weights(16, lambda);
        for k in -5i64..=5 {
            let got: Complex64 = w
                .iter()
                .enumerate()
                .map(|(j, wj)| wj * Complex64::from_polar(1.0, k as f64 * 2.0 * PI * j as f64 / 16.0))
                .sum();
            let expected = 1.0 / (lambda - Complex64::new(0.0, k as f64));
            assert!((got - expected).norm() < 1e-13);
        }
    }

    #[test]
    fn prefactor_small_alpha() {
        let m = Multiplicity::new(vec![0.5]).unwrap();
        // r₁(α) → −i(γ + N/2) as α → 0
        let r = quotient_prefactor(&m, 1e-9);
        assert!((r - Complex64::new(0.0, -1.0)).norm() < 1e-8);
        let a: f64 = 0.3;
        let direct = ((Complex64::from_polar(1.0, -a) / a.cos()).powf(1.0) - 1.0) / a;
        assert!((quotient_prefactor(&m, a) - direct).norm() < 1e-14);
    }

    #[test]
    fn order_of_linear_residuals() {
        let a = [0.1, 0.05, 0.025];
        let r = [0.3, 0.15, 0.075];
        assert!((observed_order(&a, &r).unwrap() - 1.0).abs() < 1e-12);
    }
}

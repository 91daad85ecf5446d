//! Scalar special functions: Γ, the entire normalized Bessel function ĵ_ν,
//! Laguerre polynomials and the rank-one / product Dunkl kernels of ℤ₂ᴺ.

use std::f64::consts::PI;

use complex_bessel::{Scaling, besseli_seq};
use num_complex::Complex64;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, check_dim};
use crate::rational::simplest_rational;

/// Largest |u| accepted by [`normalized_ibessel`] and the kernels; callers
/// should shrink the quadrature box instead.
pub const U_MAX: f64 = 2000.0;

/// Largest |Re u| for unscaled values; e^{|Re u|} overflows soon after.
pub const U_MAX_REAL: f64 = 700.0;

/// Largest |u| accepted by [`dunkl_kernel_1d_scaled`].
pub const U_MAX_SCALED: f64 = 1e5;

/// Below this modulus (or close to the real axis) the power series is used.
const SERIES_RADIUS: f64 = 4.0;

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Γ(x) for real x > 0.
pub fn gamma_fn(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("gamma_fn requires x > 0, got {x}")));
    }
    if x > 171.0 {
        return Err(Error::Range(format!("gamma_fn({x}) overflows f64")));
    }
    Ok(gamma_positive(x))
}

fn gamma_positive(x: f64) -> f64 {
    if x < 0.5 {
        // reflection keeps the Lanczos sum in its accurate range
        return PI / ((PI * x).sin() * gamma_positive(1.0 - x));
    }
    if x == x.floor() && x <= 23.0 {
        return (1..x as u64).map(|k| k as f64).product();
    }
    let z = x - 1.0;
    let mut acc = LANCZOS_COEFFS[0];
    for (k, c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        acc += c / (z + k as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    // split the power so t^(z+0.5) does not overflow before e^{-t} brings it down
    let half = t.powf((z + 0.5) / 2.0);
    (2.0 * PI).sqrt() * half * (half * (-t).exp()) * acc
}

/// ln Γ(x) for x > 0.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("ln_gamma requires x > 0, got {x}")));
    }
    if x < 100.0 {
        return Ok(gamma_positive(x).ln());
    }
    let z = x - 1.0;
    let mut acc = LANCZOS_COEFFS[0];
    for (k, c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        acc += c / (z + k as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    Ok(0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + acc.ln())
}

/// Order ν ≥ −1/2 of a normalized Bessel function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BesselOrder(f64);

impl BesselOrder {
    pub fn new(nu: f64) -> Result<Self> {
        if nu.is_finite() && nu >= -0.5 {
            Ok(Self(nu))
        } else {
            Err(Error::Domain(format!("Bessel order must be >= -1/2, got {nu}")))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// ν + 1, used by the odd part of the Dunkl kernel.
    pub fn shifted(self) -> Self {
        Self(self.0 + 1.0)
    }
}

/// Multiplicity vector μ of the reflection group ℤ₂ᴺ together with its
/// derived constants.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Multiplicity {
    mu: Vec<f64>,
    mu_exact: Vec<BigRational>,
    gamma_index: f64,
    c_k: f64,
    orders: Vec<BesselOrder>,
}

impl Multiplicity {
    pub fn new(mu: Vec<f64>) -> Result<Self> {
        if mu.is_empty() {
            return Err(Error::Domain("multiplicity needs N >= 1 entries".into()));
        }
        if let Some(bad) = mu.iter().find(|m| !(m.is_finite() && **m >= 0.0)) {
            return Err(Error::Domain(format!("multiplicities must be >= 0, got {bad}")));
        }
        let mu_exact = mu.iter().map(|&m| simplest_rational(m)).collect::<Result<Vec<_>>>()?;
        let gamma_index = mu.iter().sum();
        let c_k = mu.iter().map(|&m| gamma_fn(m + 0.5).map(|g| 1.0 / g)).product::<Result<f64>>()?;
        let orders = mu.iter().map(|&m| BesselOrder::new(m - 0.5)).collect::<Result<_>>()?;
        Ok(Self { mu, mu_exact, gamma_index, c_k, orders })
    }

    /// Multiplicity zero in `dim` coordinates (classical Fourier setting).
    pub fn zero(dim: usize) -> Result<Self> {
        Self::new(vec![0.0; dim])
    }

    pub fn dim(&self) -> usize {
        self.mu.len()
    }

    pub fn mu(&self) -> &[f64] {
        &self.mu
    }

    /// μ_j as the shortest rational that rounds to the stored float.
    pub fn mu_exact(&self) -> &[BigRational] {
        &self.mu_exact
    }

    /// γ = Σ μ_j.
    pub fn gamma_index(&self) -> f64 {
        self.gamma_index
    }

    pub fn gamma_index_exact(&self) -> BigRational {
        self.mu_exact.iter().cloned().sum()
    }

    /// Mehta constant c_k = (∫ e^{−|x|²} ω_k dx)^{−1} = ∏ 1/Γ(μ_j + 1/2).
    pub fn c_k(&self) -> f64 {
        self.c_k
    }

    /// λ = γ + N/2 − 1.
    pub fn lambda_index(&self) -> f64 {
        self.gamma_index + self.dim() as f64 / 2.0 - 1.0
    }

    /// γ + N/2, the homogeneity exponent of the Gaussian normalizations.
    pub fn half_weight_degree(&self) -> f64 {
        self.gamma_index + self.dim() as f64 / 2.0
    }

    /// Per-coordinate Bessel orders ν_j = μ_j − 1/2.
    pub fn orders(&self) -> &[BesselOrder] {
        &self.orders
    }

    /// ω_k(x) = ∏ |x_j|^{2μ_j}.
    pub fn weight(&self, x: &[f64]) -> f64 {
        self.mu.iter().zip(x).map(|(&m, &xi)| if m == 0.0 { 1.0 } else { xi.abs().powf(2.0 * m) }).product()
    }
}

impl TryFrom<Vec<f64>> for Multiplicity {
    type Error = Error;
    fn try_from(mu: Vec<f64>) -> Result<Self> {
        Self::new(mu)
    }
}

impl From<Multiplicity> for Vec<f64> {
    fn from(m: Multiplicity) -> Self {
        m.mu
    }
}

impl PartialEq for Multiplicity {
    fn eq(&self, other: &Self) -> bool {
        self.mu == other.mu
    }
}

/// Power series Γ(ν+1) Σ (u/2)^{2n} / (n! Γ(n+ν+1)), summed to a relative
/// tail below 1e-16. Accurate when |u| is small or u is close to the real axis.
pub fn normalized_ibessel_series(order: BesselOrder, u: Complex64) -> Complex64 {
    let nu = order.value();
    let w = u * u / 4.0;
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    for n in 1..2000 {
        let n = n as f64;
        term *= w / (n * (n + nu));
        sum += term;
        if n * n > w.norm() && term.norm() <= 1e-17 * sum.norm().max(1e-300) {
            break;
        }
    }
    sum
}

fn use_series(u: Complex64) -> bool {
    let m = u.norm();
    m <= SERIES_RADIUS || (u.im.abs() <= 1.5 && m <= 40.0)
}

fn range_check(u: Complex64) -> Result<()> {
    if !(u.re.is_finite() && u.im.is_finite()) {
        return Err(Error::Domain(format!("non-finite Bessel argument {u}")));
    }
    if u.norm() > U_MAX || u.re.abs() > U_MAX_REAL {
        return Err(Error::Range(format!(
            "u = {u:.3} is outside |u| <= {U_MAX}, |Re u| <= {U_MAX_REAL}; shrink the quadrature box"
        )));
    }
    Ok(())
}

/// `I_ν(v), I_{ν+1}(v)` for Re v ≥ 0 through the Amos algorithm.
fn bessel_i_pair(nu: f64, v: Complex64) -> Result<(Complex64, Complex64)> {
    let res = besseli_seq(nu, v, 2, Scaling::Unscaled)
        .map_err(|e| Error::Range(format!("Bessel I evaluation failed at {v}: {e}")))?;
    Ok((res.values[0], res.values[1]))
}

/// Γ(ν+1) (v/2)^{−ν}, the factor turning I_ν into ĵ_ν.
fn bessel_prefactor(nu: f64, v: Complex64) -> Result<Complex64> {
    Ok(gamma_fn(nu + 1.0)? * (v / 2.0).powc(Complex64::new(-nu, 0.0)))
}

/// ĵ_ν(u), the entire even function with ĵ_ν(0) = 1 and j_ν(x) = ĵ_ν(ix).
pub fn normalized_ibessel(order: BesselOrder, u: Complex64) -> Result<Complex64> {
    range_check(u)?;
    if use_series(u) {
        return Ok(normalized_ibessel_series(order, u));
    }
    let v = if u.re < 0.0 { -u } else { u };
    let nu = order.value();
    let (i_nu, _) = bessel_i_pair(nu, v)?;
    Ok(bessel_prefactor(nu, v)? * i_nu)
}

/// j_ν(x) = ĵ_ν(ix) for real x.
pub fn normalized_jbessel(order: BesselOrder, x: f64) -> Result<f64> {
    Ok(normalized_ibessel(order, Complex64::new(0.0, x))?.re)
}

/// L_m^{(a)}(t) by the three-term recurrence.
pub fn laguerre_eval(m: usize, a: f64, t: f64) -> f64 {
    let mut prev = 1.0;
    if m == 0 {
        return prev;
    }
    let mut cur = 1.0 + a - t;
    for k in 1..m {
        let k = k as f64;
        let next = ((2.0 * k + 1.0 + a - t) * cur - (k + a) * prev) / (k + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// ₁F₁(a; b; w) by its power series.
fn kummer_series(a: f64, b: f64, w: Complex64) -> Complex64 {
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    for k in 0..4000 {
        let k = k as f64;
        term *= w * ((a + k) / ((b + k) * (k + 1.0)));
        sum += term;
        if k > w.norm() && term.norm() <= 1e-17 * sum.norm() {
            break;
        }
    }
    sum
}

/// Near the negative real axis the Bessel form cancels down to the decaying
/// result; Kummer's form e^u ₁F₁(ν+1/2; 2ν+2; −2u) sums positive terms there.
fn use_kummer(u: Complex64) -> bool {
    u.re < -1.0 && u.im.abs() <= 1.5 && u.norm() <= 40.0
}

/// Rank-one Dunkl kernel K(z, y) as a function of the product u = z·y:
/// ĵ_ν(u) + u/(2(ν+1)) ĵ_{ν+1}(u).
pub fn dunkl_kernel_1d_at(order: BesselOrder, u: Complex64) -> Result<Complex64> {
    range_check(u)?;
    let nu = order.value();
    if nu == -0.5 {
        return Ok(u.exp());
    }
    if use_kummer(u) {
        return Ok(u.exp() * kummer_series(nu + 0.5, 2.0 * nu + 2.0, -2.0 * u));
    }
    if use_series(u) {
        let even = normalized_ibessel_series(order, u);
        let odd = normalized_ibessel_series(order.shifted(), u);
        return Ok(even + u / (2.0 * (nu + 1.0)) * odd);
    }
    // ĵ_ν(v) ± (v/(2(ν+1))) ĵ_{ν+1}(v) = Γ(ν+1)(v/2)^{-ν} (I_ν(v) ± I_{ν+1}(v))
    let (v, sign) = if u.re < 0.0 { (-u, -1.0) } else { (u, 1.0) };
    let (i_nu, i_next) = bessel_i_pair(nu, v)?;
    Ok(bessel_prefactor(nu, v)? * (i_nu + sign * i_next))
}

/// K_ν(u) = v·e^{s} returned as (v, s), so that large |Re u| can be combined
/// with decaying factors before exponentiation.
pub fn dunkl_kernel_1d_scaled(order: BesselOrder, u: Complex64) -> Result<(Complex64, f64)> {
    if !(u.re.is_finite() && u.im.is_finite()) {
        return Err(Error::Domain(format!("non-finite Bessel argument {u}")));
    }
    if u.norm() > U_MAX_SCALED {
        return Err(Error::Range(format!("|u| = {:.3e} exceeds {U_MAX_SCALED:e}", u.norm())));
    }
    let nu = order.value();
    if nu == -0.5 {
        return Ok((Complex64::from_polar(1.0, u.im), u.re));
    }
    if use_series(u) {
        return Ok((dunkl_kernel_1d_at(order, u)?, 0.0));
    }
    let (v, sign) = if u.re < 0.0 { (-u, -1.0) } else { (u, 1.0) };
    let res = besseli_seq(nu, v, 2, Scaling::Exponential)
        .map_err(|e| Error::Range(format!("Bessel I evaluation failed at {v}: {e}")))?;
    let (i_nu, i_next) = (res.values[0], res.values[1]);
    Ok((bessel_prefactor(nu, v)? * (i_nu + sign * i_next), v.re))
}

/// Rank-one Dunkl kernel K(z, y) with complex z and real y.
pub fn dunkl_kernel_1d(order: BesselOrder, z: Complex64, y: f64) -> Result<Complex64> {
    dunkl_kernel_1d_at(order, z * y)
}

/// Product kernel K(z, y) = ∏_j K_{ν_j}(z_j, y_j) of ℤ₂ᴺ.
pub fn dunkl_kernel_prod(mult: &Multiplicity, z: &[Complex64], y: &[f64]) -> Result<Complex64> {
    check_dim(mult.dim(), z.len())?;
    check_dim(mult.dim(), y.len())?;
    mult.orders()
        .iter()
        .zip(z.iter().zip(y))
        .try_fold(Complex64::new(1.0, 0.0), |acc, (&o, (&zj, &yj))| Ok(acc * dunkl_kernel_1d(o, zj, yj)?))
}

/// Product kernel with both arguments complex, K(z, w) = ∏_j K_{ν_j}(z_j w_j, 1).
pub fn dunkl_kernel_prod_complex(mult: &Multiplicity, z: &[Complex64], w: &[Complex64]) -> Result<Complex64> {
    check_dim(mult.dim(), z.len())?;
    check_dim(mult.dim(), w.len())?;
    mult.orders()
        .iter()
        .zip(z.iter().zip(w))
        .try_fold(Complex64::new(1.0, 0.0), |acc, (&o, (&zj, &wj))| Ok(acc * dunkl_kernel_1d_at(o, zj * wj)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn gamma_known_values() {
        assert_eq!(gamma_fn(1.0).unwrap(), 1.0);
        assert_relative_eq!(gamma_fn(0.5).unwrap(), PI.sqrt(), max_relative = 1e-14);
        // Γ(7.5) by the recurrence Γ(x+1) = xΓ(x) up from Γ(1/2)
        let mut g = PI.sqrt();
        let mut x = 0.5;
        while x < 7.5 {
            g *= x;
            x += 1.0;
        }
        assert_relative_eq!(gamma_fn(7.5).unwrap(), g, max_relative = 1e-13);
        assert!(gamma_fn(0.0).is_err());
        assert!(gamma_fn(-1.5).is_err());
    }

    #[test]
    fn gamma_recurrence_on_grid() {
        let mut x = 0.5;
        while x < 49.0 {
            let lhs = gamma_fn(x + 1.0).unwrap();
            let rhs = x * gamma_fn(x).unwrap();
            assert_relative_eq!(lhs, rhs, max_relative = 1e-13);
            x += 0.37;
        }
        assert_relative_eq!(ln_gamma(120.5).unwrap(), ln_gamma(119.5).unwrap() + 119.5f64.ln(), max_relative = 1e-14);
    }

    #[test]
    fn multiplicity_constants() {
        let m = Multiplicity::zero(3).unwrap();
        assert_relative_eq!(m.c_k(), PI.powf(-1.5), max_relative = 1e-14);
        let m = Multiplicity::new(vec![0.3, 0.7]).unwrap();
        assert_relative_eq!(m.gamma_index(), 1.0, max_relative = 1e-15);
        assert_relative_eq!(m.lambda_index(), 1.0, max_relative = 1e-15);
        let ck = 1.0 / (gamma_fn(0.8).unwrap() * gamma_fn(1.2).unwrap());
        assert_relative_eq!(m.c_k(), ck, max_relative = 1e-14);
        assert_eq!(m.orders()[0].value(), 0.3 - 0.5);
        assert!(Multiplicity::new(vec![]).is_err());
        assert!(Multiplicity::new(vec![-0.1]).is_err());
        assert!(BesselOrder::new(-0.6).is_err());
    }

    #[test]
    fn ibessel_closed_forms() {
        let half = BesselOrder::new(0.5).unwrap();
        let mhalf = BesselOrder::new(-0.5).unwrap();
        assert_eq!(normalized_ibessel(half, c(0.0, 0.0)).unwrap(), c(1.0, 0.0));
        for &x in &[0.3, 2.0, 3.9, 7.5, 25.0, 61.0, 140.0] {
            let v = normalized_ibessel(half, c(0.0, x)).unwrap();
            assert!((v - c(x.sin() / x, 0.0)).norm() < 1e-14, "x={x} v={v}");
            let v = normalized_ibessel(mhalf, c(0.0, x)).unwrap();
            assert!((v - c(x.cos(), 0.0)).norm() < 1e-14, "x={x} v={v}");
        }
        for &u in &[c(1.2, 0.4), c(-3.0, 7.0), c(10.0, -20.0), c(0.5, 33.0)] {
            let v = normalized_ibessel(mhalf, u).unwrap();
            assert!((v - u.cosh()).norm() < 1e-13 * u.cosh().norm().max(1.0), "u={u}");
        }
        assert!(matches!(normalized_ibessel(half, c(0.0, 2500.0)), Err(Error::Range(_))));
        assert!(matches!(normalized_ibessel(half, c(800.0, 0.0)), Err(Error::Range(_))));
    }

    #[test]
    fn series_and_amos_paths_agree_in_overlap() {
        for &nu in &[-0.5, -0.2, 0.0, 0.3, 1.7, 4.0] {
            let o = BesselOrder::new(nu).unwrap();
            for &u in &[c(4.5, 0.5), c(0.0, 5.0), c(-3.0, 3.5), c(6.0, -2.0)] {
                let series = normalized_ibessel_series(o, u);
                let v = if u.re < 0.0 { -u } else { u };
                let (i_nu, _) = bessel_i_pair(nu, v).unwrap();
                let amos = bessel_prefactor(nu, v).unwrap() * i_nu;
                assert!((series - amos).norm() < 1e-12 * series.norm().max(1.0), "nu={nu} u={u}");
            }
        }
    }

    #[test]
    fn laguerre_values() {
        assert_eq!(laguerre_eval(0, 0.3, 5.0), 1.0);
        assert_relative_eq!(laguerre_eval(1, 0.3, 5.0), 1.3 - 5.0, max_relative = 1e-15);
        // L_3^{(a)}(t) = Σ_k (−1)^k C(3+a, 3−k) t^k / k!, expanded at a = 1/2, t = 2
        let a = 0.5;
        let t: f64 = 2.0;
        let binom = |n: f64, k: u32| -> f64 { (0..k).map(|i| (n - i as f64) / (i as f64 + 1.0)).product() };
        let expected: f64 = (0..=3u32)
            .map(|k| {
                (-1f64).powi(k as i32) * binom(3.0 + a, 3 - k) * t.powi(k as i32) / gamma_fn(k as f64 + 1.0).unwrap()
            })
            .sum();
        assert_relative_eq!(laguerre_eval(3, a, t), expected, max_relative = 1e-14);
    }

    #[test]
    fn kernel_reduces_to_exponential_at_zero_multiplicity() {
        let o = BesselOrder::new(-0.5).unwrap();
        for &(z, y) in &[(c(0.0, 1.0), 0.7), (c(0.4, -2.0), 3.0), (c(1.0, 10.0), -4.5)] {
            let k = dunkl_kernel_1d(o, z, y).unwrap();
            assert!((k - (z * y).exp()).norm() < 1e-13 * (z * y).exp().norm().max(1.0));
        }
        assert_eq!(dunkl_kernel_1d(BesselOrder::new(1.3).unwrap(), c(0.0, 0.0), 2.0).unwrap(), c(1.0, 0.0));
    }

    #[test]
    fn kernel_half_order_at_unit_point() {
        // K(i, 1) = j_{1/2}(1) + (i/3) j_{3/2}(1) with j from 30 explicit series terms
        let j = |nu: f64, x: f64| -> f64 {
            let g = gamma_fn(nu + 1.0).unwrap();
            (0..30)
                .map(|n| {
                    let n = n as f64;
                    (-1f64).powf(n) * (x / 2.0).powf(2.0 * n)
                        / (gamma_fn(n + 1.0).unwrap() * gamma_fn(n + nu + 1.0).unwrap())
                })
                .sum::<f64>()
                * g
        };
        let expected = c(j(0.5, 1.0), j(1.5, 1.0) / 3.0);
        let got = dunkl_kernel_1d(BesselOrder::new(0.5).unwrap(), c(0.0, 1.0), 1.0).unwrap();
        assert!((got - expected).norm() < 1e-14);
    }

    #[test]
    fn negative_axis_kernel_keeps_relative_accuracy() {
        let o = BesselOrder::new(-0.5).unwrap();
        for u in [-8.16, -30.0, -600.0] {
            let k = dunkl_kernel_1d_at(o, c(u, 0.3)).unwrap();
            let e = c(u, 0.3).exp();
            assert!((k - e).norm() < 1e-14 * e.norm(), "{u}: {k}");
        }
        // Kummer branch against the Bessel series where cancellation is mild.
        for nu in [0.0, 0.7, 2.2] {
            let o = BesselOrder::new(nu).unwrap();
            let u = c(-2.5, 0.4);
            let series =
                normalized_ibessel_series(o, u) + u / (2.0 * (nu + 1.0)) * normalized_ibessel_series(o.shifted(), u);
            let k = dunkl_kernel_1d_at(o, u).unwrap();
            assert!((k - series).norm() < 1e-14 * series.norm().max(1.0), "nu={nu}: {k} vs {series}");
            // and against the Amos pair, which loses only a few digits at |u| = 30
            let u = c(-30.0, 0.5);
            let (i_nu, i_next) = bessel_i_pair(nu, -u).unwrap();
            let amos = bessel_prefactor(nu, -u).unwrap() * (i_nu - i_next);
            let k = dunkl_kernel_1d_at(o, u).unwrap();
            assert!((k - amos).norm() < 1e-10 * k.norm(), "nu={nu}: {k} vs {amos}");
        }
    }

    #[test]
    fn product_kernel() {
        let m0 = Multiplicity::zero(2).unwrap();
        let x = [0.8, -1.3];
        let y = [2.0, 0.4];
        let z: Vec<_> = x.iter().map(|&v| c(0.0, v)).collect();
        let k = dunkl_kernel_prod(&m0, &z, &y).unwrap();
        let dot = x[0] * y[0] + x[1] * y[1];
        assert!((k - c(dot.cos(), dot.sin())).norm() < 1e-14);

        let m = Multiplicity::new(vec![0.7, 0.3]).unwrap();
        let z = [c(0.0, 1.0), c(0.0, 2.0)];
        let y = [0.5, -1.0];
        let expected =
            dunkl_kernel_1d(m.orders()[0], z[0], y[0]).unwrap() * dunkl_kernel_1d(m.orders()[1], z[1], y[1]).unwrap();
        assert!((dunkl_kernel_prod(&m, &z, &y).unwrap() - expected).norm() < 1e-15);
        assert_eq!(dunkl_kernel_prod(&m, &[c(0.0, 0.0); 2], &y).unwrap(), c(1.0, 0.0));
        assert!(matches!(dunkl_kernel_prod(&m, &z, &[1.0]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn scaled_kernel_matches_unscaled() {
        for &nu in &[-0.5, 0.2, 1.7] {
            let o = BesselOrder::new(nu).unwrap();
            for &u in &[c(0.5, 0.1), c(30.0, 5.0), c(-45.0, 12.0), c(3.0, 60.0)] {
                let (v, s) = dunkl_kernel_1d_scaled(o, u).unwrap();
                let direct = dunkl_kernel_1d_at(o, u).unwrap();
                assert!((v * s.exp() - direct).norm() < 1e-13 * direct.norm().max(1.0), "nu={nu} u={u}");
            }
        }
        // e^{u} in scaled form far beyond the unscaled range
        let (v, s) = dunkl_kernel_1d_scaled(BesselOrder::new(-0.5).unwrap(), c(5000.0, 1.0)).unwrap();
        assert!((s - 5000.0).abs() < 1e-12);
        assert!((v - c(0.0, 1.0).exp()).norm() < 1e-12);
    }

    proptest! {
        #[test]
        fn ibessel_is_even(re in -28.0..28.0f64, im in -28.0..28.0f64, nu in -0.5..3.0f64) {
            let o = BesselOrder::new(nu).unwrap();
            let u = c(re, im);
            let a = normalized_ibessel(o, u).unwrap();
            let b = normalized_ibessel(o, -u).unwrap();
            prop_assert!((a - b).norm() <= 1e-14 * a.norm().max(1.0));
        }

        #[test]
        fn oscillatory_kernel_is_bounded(x in -10.0..10.0f64, y in -4.0..4.0f64, nu in -0.5..3.0f64) {
            let k = dunkl_kernel_1d(BesselOrder::new(nu).unwrap(), c(0.0, x), y).unwrap();
            prop_assert!(k.norm() <= 1.0 + 1e-12);
        }

        #[test]
        fn kernel_homogeneity(re in -5.0..5.0f64, im in -8.0..8.0f64, y in -4.0..4.0f64, nu in -0.5..2.0f64) {
            let o = BesselOrder::new(nu).unwrap();
            let z = c(re, im);
            let a = dunkl_kernel_1d(o, z, y).unwrap();
            let b = dunkl_kernel_1d(o, z * y, 1.0).unwrap();
            prop_assert!((a - b).norm() <= 1e-13 * a.norm().max(1.0));
        }

        #[test]
        fn kernel_exponential_bound(re in -5.0..5.0f64, im in -8.0..8.0f64, y in -4.0..4.0f64, nu in -0.5..2.0f64) {
            let k = dunkl_kernel_1d(BesselOrder::new(nu).unwrap(), c(re, im), y).unwrap();
            prop_assert!(k.norm() <= (re.abs() * y.abs()).exp() * (1.0 + 1e-12));
        }
    }
}

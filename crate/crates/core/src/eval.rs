//! Functions that can be sampled at points and on quadrature grids.

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result, check_dim};
use crate::polyengine::{CompiledGaussPoly, GaussPoly, HermiteBasis, MultiPoly};
use crate::quadrature::{GridSpec, QuadGrid};
use crate::rational::qc_from_c64;

/// A complex-valued function on ℝᴺ.
pub trait Evaluable: Sync {
    fn dim(&self) -> usize;

    fn eval(&self, x: &[f64]) -> Result<Complex64>;

    /// Values at every grid node, in node order.
    fn sample_on(&self, grid: &QuadGrid) -> Result<Vec<Complex64>> {
        check_dim(grid.dim(), self.dim())?;
        grid.sample(|x| self.eval(x))
    }

    fn eval_many(&self, xs: &[Vec<f64>]) -> Result<Vec<Complex64>> {
        xs.par_iter().map(|x| self.eval(x)).collect()
    }
}

impl Evaluable for CompiledGaussPoly {
    fn dim(&self) -> usize {
        CompiledGaussPoly::dim(self)
    }

    fn eval(&self, x: &[f64]) -> Result<Complex64> {
        CompiledGaussPoly::eval(self, x)
    }
}

impl Evaluable for GaussPoly {
    fn dim(&self) -> usize {
        GaussPoly::dim(self)
    }

    fn eval(&self, x: &[f64]) -> Result<Complex64> {
        GaussPoly::eval(self, x)
    }

    fn sample_on(&self, grid: &QuadGrid) -> Result<Vec<Complex64>> {
        self.compile().sample_on(grid)
    }

    fn eval_many(&self, xs: &[Vec<f64>]) -> Result<Vec<Complex64>> {
        self.compile().eval_many(xs)
    }
}

/// Σ c_ν h_ν over a Hermite basis; coefficients follow `basis.indices()`.
#[derive(Debug, Clone)]
pub struct HermiteCombo {
    basis: Arc<HermiteBasis>,
    coeffs: Vec<Complex64>,
}

impl HermiteCombo {
    pub fn new(basis: Arc<HermiteBasis>, coeffs: Vec<Complex64>) -> Result<Self> {
        check_dim(basis.indices().len(), coeffs.len())?;
        Ok(Self { basis, coeffs })
    }

    pub fn zero(basis: Arc<HermiteBasis>) -> Self {
        let n = basis.indices().len();
        Self { basis, coeffs: vec![Complex64::new(0.0, 0.0); n] }
    }

    /// A single basis function h_ν.
    pub fn basis_function(basis: Arc<HermiteBasis>, nu: &[u32]) -> Result<Self> {
        let pos = basis
            .position(nu)
            .ok_or_else(|| Error::Range(format!("index {nu:?} not in basis of degree {}", basis.max_degree())))?;
        let mut c = Self::zero(basis);
        c.coeffs[pos] = Complex64::new(1.0, 0.0);
        Ok(c)
    }

    /// Builds from `(ν, coefficient)` pairs.
    pub fn from_pairs(basis: Arc<HermiteBasis>, pairs: &[(Vec<u32>, Complex64)]) -> Result<Self> {
        let mut c = Self::zero(basis);
        for (nu, v) in pairs {
            let pos = c
                .basis
                .position(nu)
                .ok_or_else(|| Error::Range(format!("index {nu:?} not in basis of degree {}", c.basis.max_degree())))?;
            c.coeffs[pos] += v;
        }
        Ok(c)
    }

    pub fn basis(&self) -> &Arc<HermiteBasis> {
        &self.basis
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeff(&self, nu: &[u32]) -> Option<Complex64> {
        self.basis.position(nu).map(|p| self.coeffs[p])
    }

    /// Multiplies coefficient ν by `phase(|ν|)`.
    pub fn map_by_degree(&self, phase: impl Fn(usize) -> Complex64) -> Self {
        let coeffs = self
            .basis
            .indices()
            .iter()
            .zip(&self.coeffs)
            .map(|(nu, c)| c * phase(nu.iter().map(|&k| k as usize).sum()))
            .collect();
        Self { basis: self.basis.clone(), coeffs }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        check_dim(self.coeffs.len(), other.coeffs.len())?;
        Ok(Self {
            basis: self.basis.clone(),
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self { basis: self.basis.clone(), coeffs: self.coeffs.iter().map(|c| c * s).collect() }
    }

    /// ℓ² norm of the coefficients, equal to the L² norm of the function.
    pub fn norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// The same function as a Gaussian polynomial, each coefficient c_ν/‖p_ν‖
    /// rounded once to an exact rational.
    pub fn to_gauss_poly(&self) -> Result<GaussPoly> {
        let dim = self.basis.dim();
        let mut poly = MultiPoly::zero(dim);
        for (nu, c) in self.terms() {
            let mut term = MultiPoly::one(dim);
            for (j, &n) in nu.iter().enumerate() {
                term = &term * &self.basis.monic_1d(j, n as usize)?.embed(dim, &[j])?;
            }
            poly = &poly + &term.scale(&qc_from_c64(c / self.basis.norm(nu)?)?);
        }
        Ok(GaussPoly::new(poly))
    }

    /// Populated terms (ν, c_ν).
    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, Complex64)> {
        self.basis.indices().iter().zip(self.coeffs.iter().copied()).filter(|(_, c)| *c != Complex64::new(0.0, 0.0))
    }
}

impl Evaluable for HermiteCombo {
    fn dim(&self) -> usize {
        self.basis.dim()
    }

    fn eval(&self, x: &[f64]) -> Result<Complex64> {
        let vals = self.basis.eval_all(x)?;
        Ok(vals.iter().zip(&self.coeffs).map(|(h, c)| c * h).sum())
    }
}

/// Values of a function on the nodes of a particular grid.
#[derive(Debug, Clone)]
pub struct GridSamples {
    spec: GridSpec,
    values: Vec<Complex64>,
}

impl GridSamples {
    pub fn new(grid: &QuadGrid, values: Vec<Complex64>) -> Result<Self> {
        check_dim(grid.len(), values.len())?;
        Ok(Self { spec: grid.spec(), values })
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }
}

impl Evaluable for GridSamples {
    fn dim(&self) -> usize {
        self.spec.dim
    }

    fn eval(&self, _x: &[f64]) -> Result<Complex64> {
        Err(Error::Usage("sampled functions are only defined on their own grid nodes".into()))
    }

    fn sample_on(&self, grid: &QuadGrid) -> Result<Vec<Complex64>> {
        if grid.spec() != self.spec {
            return Err(Error::Usage("samples were taken on a different grid".into()));
        }
        Ok(self.values.clone())
    }
}

/// Wraps a closure as an [`Evaluable`].
pub struct FnEval<F> {
    dim: usize,
    f: F,
}

impl<F> FnEval<F>
where
    F: Fn(&[f64]) -> Complex64 + Sync,
{
    pub fn new(dim: usize, f: F) -> Self {
        Self { dim, f }
    }
}

impl<F> Evaluable for FnEval<F>
where
    F: Fn(&[f64]) -> Complex64 + Sync,
{
    fn dim(&self) -> usize {
        self.dim
    }

    fn eval(&self, x: &[f64]) -> Result<Complex64> {
        check_dim(self.dim, x.len())?;
        Ok((self.f)(x))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::inner_product;
    use crate::specfun::Multiplicity;

    #[test]
    fn basis_inner_products() {
        let m = Multiplicity::new(vec![0.5]).unwrap();
        let basis = Arc::new(HermiteBasis::new(&m, 4).unwrap());
        let grid = QuadGrid::with_defaults(&m).unwrap();
        let h0 = HermiteCombo::basis_function(basis.clone(), &[0]).unwrap();
        let h1 = HermiteCombo::basis_function(basis.clone(), &[1]).unwrap();
        let h2 = basis.hermite_function(&[2]).unwrap();
        assert!((inner_product(&h0, &h0, &grid).unwrap().re - 1.0).abs() < 1e-10);
        assert!(inner_product(&h0, &h1, &grid).unwrap().norm() < 1e-12);
        assert!((inner_product(&h2, &h2, &grid).unwrap().re - 1.0).abs() < 1e-9);
        let combo = HermiteCombo::from_pairs(
            basis,
            &[(vec![1], Complex64::new(0.5, -1.0)), (vec![4], Complex64::new(2.0, 0.0))],
        )
        .unwrap();
        let g = combo.to_gauss_poly().unwrap();
        for x in [-1.3, 0.0, 0.4, 2.2] {
            assert!((g.eval(&[x]).unwrap() - combo.eval(&[x]).unwrap()).norm() < 1e-13);
        }
    }

    #[test]
    fn samples_stay_on_their_grid() {
        let m = Multiplicity::zero(1).unwrap();
        let g = QuadGrid::new(&m, 8.0, 40).unwrap();
        let other = QuadGrid::new(&m, 8.0, 42).unwrap();
        let s = GridSamples::new(&g, vec![Complex64::new(1.0, 0.0); g.len()]).unwrap();
        assert!(s.sample_on(&g).is_ok());
        assert!(s.sample_on(&other).is_err());
        assert!(s.eval(&[0.0]).is_err());
    }
}

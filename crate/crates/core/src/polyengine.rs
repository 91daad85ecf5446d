//! Exact polynomial algebra under the ℤ₂ᴺ Dunkl operators, Gaussian-times-
//! polynomial functions, and the generalized Hermite basis.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result, check_dim};
use crate::rational::{
    QComplex, exact_from_f64, format_rational, parse_rational, qc_i, qc_one, qc_real, qc_to_f64, qint, to_f64,
};
use crate::specfun::{Multiplicity, ln_gamma};

fn qc_is_zero(c: &QComplex) -> bool {
    c.re.is_zero() && c.im.is_zero()
}

/// Polynomial in N variables with exact complex-rational coefficients.
#[derive(Clone, PartialEq, Eq)]
pub struct MultiPoly {
    dim: usize,
    coeffs: BTreeMap<Vec<u32>, QComplex>,
}

impl fmt::Debug for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .map(|(e, c)| format!("({} + {}i)x^{:?}", format_rational(&c.re), format_rational(&c.im), e))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl MultiPoly {
    pub fn zero(dim: usize) -> Self {
        Self { dim, coeffs: BTreeMap::new() }
    }

    pub fn one(dim: usize) -> Self {
        Self::constant(dim, qc_one())
    }

    pub fn constant(dim: usize, c: QComplex) -> Self {
        Self::monomial(vec![0; dim], c)
    }

    pub fn monomial(exp: Vec<u32>, c: QComplex) -> Self {
        let mut p = Self::zero(exp.len());
        p.add_term(exp, c);
        p
    }

    /// The coordinate function x_j.
    pub fn var(dim: usize, j: usize) -> Self {
        let mut e = vec![0; dim];
        e[j] = 1;
        Self::monomial(e, qc_one())
    }

    /// Σ x_j².
    pub fn norm_squared(dim: usize) -> Self {
        let mut p = Self::zero(dim);
        for j in 0..dim {
            let mut e = vec![0; dim];
            e[j] = 2;
            p.add_term(e, qc_one());
        }
        p
    }

    /// Builds from `(exponent, coefficient)` pairs; repeated exponents are summed.
    pub fn from_terms(dim: usize, terms: impl IntoIterator<Item = (Vec<u32>, QComplex)>) -> Result<Self> {
        let mut p = Self::zero(dim);
        for (e, c) in terms {
            check_dim(dim, e.len())?;
            p.add_term(e, c);
        }
        Ok(p)
    }

    fn add_term(&mut self, exp: Vec<u32>, c: QComplex) {
        if qc_is_zero(&c) {
            return;
        }
        match self.coeffs.entry(exp) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = o.get().clone() + c;
                if qc_is_zero(&sum) {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &QComplex)> {
        self.coeffs.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeff(&self, exp: &[u32]) -> QComplex {
        self.coeffs.get(exp).cloned().unwrap_or_else(|| qc_real(BigRational::zero()))
    }

    /// Total degree; the zero polynomial has degree 0.
    pub fn degree(&self) -> usize {
        self.coeffs.keys().map(|e| total(e)).max().unwrap_or(0)
    }

    /// `Some(n)` when every term has total degree n (the zero polynomial is
    /// homogeneous of every degree and reports 0).
    pub fn homogeneous_degree(&self) -> Option<usize> {
        let mut degs = self.coeffs.keys().map(|e| total(e));
        match degs.next() {
            None => Some(0),
            Some(d) => degs.all(|x| x == d).then_some(d),
        }
    }

    pub fn scale(&self, c: &QComplex) -> Self {
        if qc_is_zero(c) {
            return Self::zero(self.dim);
        }
        Self { dim: self.dim, coeffs: self.coeffs.iter().map(|(e, v)| (e.clone(), v.clone() * c.clone())).collect() }
    }

    pub fn scale_rational(&self, c: &BigRational) -> Self {
        self.scale(&qc_real(c.clone()))
    }

    /// x_j · p.
    pub fn mul_coord(&self, j: usize) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .map(|(e, v)| {
                let mut e = e.clone();
                e[j] += 1;
                (e, v.clone())
            })
            .collect();
        Self { dim: self.dim, coeffs }
    }

    /// p(−x).
    pub fn reflect(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .map(|(e, v)| (e.clone(), if total(e) % 2 == 1 { -v.clone() } else { v.clone() }))
            .collect();
        Self { dim: self.dim, coeffs }
    }

    /// Embeds a polynomial in fewer variables, placing variable `i` of `self`
    /// at position `axes[i]` of an N-variable polynomial.
    pub fn embed(&self, dim: usize, axes: &[usize]) -> Result<Self> {
        check_dim(self.dim, axes.len())?;
        let mut p = Self::zero(dim);
        for (e, v) in &self.coeffs {
            let mut f = vec![0; dim];
            for (i, &a) in axes.iter().enumerate() {
                if a >= dim {
                    return Err(Error::Usage(format!("axis {a} out of range for dimension {dim}")));
                }
                f[a] += e[i];
            }
            p.add_term(f, v.clone());
        }
        Ok(p)
    }

    fn assert_dim(&self, other: &Self) {
        assert_eq!(self.dim, other.dim, "polynomial dimension mismatch");
    }

    /// Float copy of the coefficients for fast repeated evaluation.
    pub fn compile(&self) -> FloatPoly {
        FloatPoly {
            dim: self.dim,
            degree: self.degree(),
            terms: self.coeffs.iter().map(|(e, c)| (e.clone(), qc_to_f64(c))).collect(),
        }
    }

    /// Value at a real point, computed in floating point.
    pub fn eval(&self, x: &[f64]) -> Result<Complex64> {
        self.compile().eval(x)
    }

    /// Value at a complex point, computed in floating point.
    pub fn eval_complex(&self, z: &[Complex64]) -> Result<Complex64> {
        self.compile().eval_complex(z)
    }

    /// Exact value at a point whose coordinates are read as exact binary
    /// fractions, rounded once at the end.
    pub fn eval_exact(&self, x: &[f64]) -> Result<Complex64> {
        check_dim(self.dim, x.len())?;
        let xq = x.iter().map(|&v| exact_from_f64(v)).collect::<Result<Vec<_>>>()?;
        let mut re = BigRational::zero();
        let mut im = BigRational::zero();
        for (e, c) in &self.coeffs {
            let mut m = BigRational::one();
            for (xi, &k) in xq.iter().zip(e) {
                m *= num_traits::pow(xi.clone(), k as usize);
            }
            re += &c.re * &m;
            im += &c.im * &m;
        }
        Ok(Complex64::new(to_f64(&re), to_f64(&im)))
    }
}

fn total(e: &[u32]) -> usize {
    e.iter().map(|&k| k as usize).sum()
}

impl std::ops::Add<&MultiPoly> for &MultiPoly {
    type Output = MultiPoly;
    fn add(self, rhs: &MultiPoly) -> MultiPoly {
        self.assert_dim(rhs);
        let mut out = self.clone();
        for (e, c) in &rhs.coeffs {
            out.add_term(e.clone(), c.clone());
        }
        out
    }
}

impl std::ops::Sub<&MultiPoly> for &MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: &MultiPoly) -> MultiPoly {
        self.assert_dim(rhs);
        let mut out = self.clone();
        for (e, c) in &rhs.coeffs {
            out.add_term(e.clone(), -c.clone());
        }
        out
    }
}

impl std::ops::Mul<&MultiPoly> for &MultiPoly {
    type Output = MultiPoly;
    // Exponents add under multiplication.
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn mul(self, rhs: &MultiPoly) -> MultiPoly {
        self.assert_dim(rhs);
        let mut out = MultiPoly::zero(self.dim);
        for (ea, ca) in &self.coeffs {
            for (eb, cb) in &rhs.coeffs {
                let e = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(e, ca.clone() * cb.clone());
            }
        }
        out
    }
}

impl std::ops::Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        self.scale(&qc_real(-BigRational::one()))
    }
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    exp: Vec<u32>,
    re: String,
    im: String,
}

#[derive(Serialize, Deserialize)]
struct PolyJson {
    dim: usize,
    terms: Vec<TermJson>,
}

impl Serialize for MultiPoly {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PolyJson {
            dim: self.dim,
            terms: self
                .coeffs
                .iter()
                .map(|(e, c)| TermJson { exp: e.clone(), re: format_rational(&c.re), im: format_rational(&c.im) })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for MultiPoly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = PolyJson::deserialize(d)?;
        let terms = raw
            .terms
            .into_iter()
            .map(|t| Ok((t.exp, QComplex::new(parse_rational(&t.re)?, parse_rational(&t.im)?))))
            .collect::<Result<Vec<_>>>()
            .map_err(serde::de::Error::custom)?;
        MultiPoly::from_terms(raw.dim, terms).map_err(serde::de::Error::custom)
    }
}

/// Floating-point image of a [`MultiPoly`].
#[derive(Debug, Clone)]
pub struct FloatPoly {
    dim: usize,
    degree: usize,
    terms: Vec<(Vec<u32>, Complex64)>,
}

impl FloatPoly {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn eval(&self, x: &[f64]) -> Result<Complex64> {
        check_dim(self.dim, x.len())?;
        let powers: Vec<Vec<f64>> = x
            .iter()
            .map(|&xi| std::iter::successors(Some(1.0), |p| Some(p * xi)).take(self.degree + 1).collect())
            .collect();
        let mut acc = Complex64::new(0.0, 0.0);
        for (e, c) in &self.terms {
            let m: f64 = e.iter().zip(&powers).map(|(&k, pw)| pw[k as usize]).product();
            acc += c * m;
        }
        Ok(acc)
    }

    pub fn eval_complex(&self, z: &[Complex64]) -> Result<Complex64> {
        check_dim(self.dim, z.len())?;
        let powers: Vec<Vec<Complex64>> = z
            .iter()
            .map(|&zi| {
                std::iter::successors(Some(Complex64::new(1.0, 0.0)), |p| Some(p * zi)).take(self.degree + 1).collect()
            })
            .collect();
        let mut acc = Complex64::new(0.0, 0.0);
        for (e, c) in &self.terms {
            let m: Complex64 = e.iter().zip(&powers).map(|(&k, pw)| pw[k as usize]).product();
            acc += c * m;
        }
        Ok(acc)
    }
}

/// T_j p for the ℤ₂ᴺ Dunkl operator: on x_j^n the factor is n for even n and
/// n + 2μ_j for odd n.
pub fn dunkl_derivative(p: &MultiPoly, j: usize, mult: &Multiplicity) -> Result<MultiPoly> {
    check_dim(mult.dim(), p.dim())?;
    if j >= p.dim() {
        return Err(Error::Usage(format!("axis {j} out of range for dimension {}", p.dim())));
    }
    let two_mu = &mult.mu_exact()[j] * qint(2);
    let mut out = MultiPoly::zero(p.dim());
    for (e, c) in &p.coeffs {
        let n = e[j];
        if n == 0 {
            continue;
        }
        let mut factor = qint(n as i64);
        if n % 2 == 1 {
            factor += &two_mu;
        }
        let mut f = e.clone();
        f[j] -= 1;
        out.add_term(f, c.clone() * qc_real(factor));
    }
    Ok(out)
}

/// Δ_k p = Σ_j T_j² p.
pub fn dunkl_laplacian(p: &MultiPoly, mult: &Multiplicity) -> Result<MultiPoly> {
    let mut out = MultiPoly::zero(p.dim());
    for j in 0..p.dim() {
        let t = dunkl_derivative(&dunkl_derivative(p, j, mult)?, j, mult)?;
        out = &out + &t;
    }
    Ok(out)
}

/// e^{cΔ_k} p as the finite sum Σ_s c^s Δ_k^s p / s!.
pub fn heat_exp_poly(p: &MultiPoly, c: &QComplex, mult: &Multiplicity) -> Result<MultiPoly> {
    let mut out = p.clone();
    let mut term = p.clone();
    let mut s = 1i64;
    loop {
        term = dunkl_laplacian(&term, mult)?;
        if term.is_zero() || qc_is_zero(c) {
            return Ok(out);
        }
        term = term.scale(&(c.clone() * qc_real(BigRational::new(1.into(), s.into()))));
        out = &out + &term;
        s += 1;
    }
}

/// [`heat_exp_poly`] with a rational parameter.
pub fn heat_exp_poly_rational(p: &MultiPoly, c: &BigRational, mult: &Multiplicity) -> Result<MultiPoly> {
    heat_exp_poly(p, &qc_real(c.clone()), mult)
}

/// Multi-indices of total degree `degree` in `dim` variables, lexicographically
/// descending (x₁ⁿ first).
pub fn homogeneous_indices(dim: usize, degree: usize) -> Vec<Vec<u32>> {
    fn rec(dim: usize, left: usize, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if prefix.len() + 1 == dim {
            prefix.push(left as u32);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for k in (0..=left).rev() {
            prefix.push(k as u32);
            rec(dim, left - k, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if dim == 0 {
        return out;
    }
    rec(dim, degree, &mut Vec::with_capacity(dim), &mut out);
    out
}

/// All multi-indices with |ν| ≤ max_degree in graded-lex order.
pub fn graded_indices(dim: usize, max_degree: usize) -> Vec<Vec<u32>> {
    (0..=max_degree).flat_map(|d| homogeneous_indices(dim, d)).collect()
}

/// Basis of the homogeneous Δ_k-harmonic polynomials of the given degree,
/// obtained as an exact nullspace.
pub fn harmonic_basis(mult: &Multiplicity, degree: usize) -> Result<Vec<MultiPoly>> {
    let dim = mult.dim();
    let cols = homogeneous_indices(dim, degree);
    if degree < 2 {
        return Ok(cols.into_iter().map(|e| MultiPoly::monomial(e, qc_one())).collect());
    }
    let rows = homogeneous_indices(dim, degree - 2);
    let row_of: BTreeMap<&Vec<u32>, usize> = rows.iter().enumerate().map(|(i, e)| (e, i)).collect();
    let mut a = vec![vec![BigRational::zero(); cols.len()]; rows.len()];
    for (ci, e) in cols.iter().enumerate() {
        let lap = dunkl_laplacian(&MultiPoly::monomial(e.clone(), qc_one()), mult)?;
        for (f, c) in lap.terms() {
            a[row_of[f]][ci] = c.re.clone();
        }
    }
    let pivots = rref(&mut a);
    let mut out = Vec::new();
    for free in (0..cols.len()).filter(|c| !pivots.contains(c)) {
        let mut terms = vec![(cols[free].clone(), qc_one())];
        for (r, &pc) in pivots.iter().enumerate() {
            if !a[r][free].is_zero() {
                terms.push((cols[pc].clone(), qc_real(-a[r][free].clone())));
            }
        }
        out.push(MultiPoly::from_terms(dim, terms)?);
    }
    Ok(out)
}

/// In-place reduced row echelon form; returns pivot columns by row.
fn rref(a: &mut [Vec<BigRational>]) -> Vec<usize> {
    let ncols = a.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..ncols {
        let Some(p) = (row..a.len()).find(|&r| !a[r][col].is_zero()) else { continue };
        a.swap(row, p);
        let inv = a[row][col].recip();
        for v in a[row].iter_mut() {
            *v *= &inv;
        }
        for r in 0..a.len() {
            if r != row && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                let pivot_row = a[row].clone();
                for (v, pv) in a[r].iter_mut().zip(&pivot_row) {
                    *v -= &f * pv;
                }
            }
        }
        pivots.push(col);
        row += 1;
        if row == a.len() {
            break;
        }
    }
    pivots
}

/// The function x ↦ scale · poly(x) · e^{−|x|²/2}.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussPoly {
    poly: MultiPoly,
    #[serde(default = "unit_scale")]
    scale: f64,
}

fn unit_scale() -> f64 {
    1.0
}

impl GaussPoly {
    pub fn new(poly: MultiPoly) -> Self {
        Self { poly, scale: 1.0 }
    }

    /// A polynomial times the Gaussian with an extra real factor that need not
    /// be rational (normalization constants).
    pub fn with_scale(poly: MultiPoly, scale: f64) -> Self {
        Self { poly, scale }
    }

    pub fn poly(&self) -> &MultiPoly {
        &self.poly
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn dim(&self) -> usize {
        self.poly.dim()
    }

    fn map_poly(&self, poly: MultiPoly) -> Self {
        Self { poly, scale: self.scale }
    }

    /// T_j(q e^{−|x|²/2}) = (T_j q − x_j q) e^{−|x|²/2}.
    pub fn dunkl_derivative(&self, j: usize, mult: &Multiplicity) -> Result<Self> {
        let tq = dunkl_derivative(&self.poly, j, mult)?;
        Ok(self.map_poly(&tq - &self.poly.mul_coord(j)))
    }

    pub fn mul_coord(&self, j: usize) -> Self {
        self.map_poly(self.poly.mul_coord(j))
    }

    pub fn mul_poly(&self, p: &MultiPoly) -> Self {
        self.map_poly(&self.poly * p)
    }

    pub fn scale_exact(&self, c: &QComplex) -> Self {
        self.map_poly(self.poly.scale(c))
    }

    pub fn dunkl_laplacian(&self, mult: &Multiplicity) -> Result<Self> {
        let mut out = MultiPoly::zero(self.dim());
        for j in 0..self.dim() {
            let t = self.dunkl_derivative(j, mult)?.dunkl_derivative(j, mult)?;
            out = &out + &t.poly;
        }
        Ok(self.map_poly(out))
    }

    /// Sum of two Gaussian polynomials carrying the same scale.
    pub fn try_add(&self, other: &Self) -> Result<Self> {
        check_dim(self.dim(), other.dim())?;
        if self.scale != other.scale {
            return Err(Error::Usage("cannot add Gaussian polynomials with different scales exactly".into()));
        }
        Ok(self.map_poly(&self.poly + &other.poly))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.try_add(&Self { poly: -&other.poly, scale: other.scale })
    }

    pub fn reflect(&self) -> Self {
        self.map_poly(self.poly.reflect())
    }

    pub fn eval(&self, x: &[f64]) -> Result<Complex64> {
        self.compile().eval(x)
    }

    pub fn compile(&self) -> CompiledGaussPoly {
        CompiledGaussPoly { poly: self.poly.compile(), scale: self.scale }
    }
}

/// Float image of a [`GaussPoly`].
#[derive(Debug, Clone)]
pub struct CompiledGaussPoly {
    poly: FloatPoly,
    scale: f64,
}

impl CompiledGaussPoly {
    pub fn dim(&self) -> usize {
        self.poly.dim()
    }

    pub fn eval(&self, x: &[f64]) -> Result<Complex64> {
        let r2: f64 = x.iter().map(|v| v * v).sum();
        Ok(self.poly.eval(x)? * (self.scale * (-0.5 * r2).exp()))
    }
}

/// (Δ_k − |x|²) f, exactly.
pub fn hermite_operator(f: &GaussPoly, mult: &Multiplicity) -> Result<GaussPoly> {
    let lap = f.dunkl_laplacian(mult)?;
    let r2 = f.mul_poly(&MultiPoly::norm_squared(f.dim()));
    lap.try_sub(&r2)
}

/// Orthonormal generalized Hermite functions h_ν, |ν| ≤ max_degree, built as
/// tensor products of one-dimensional families.
#[derive(Debug, Clone)]
pub struct HermiteBasis {
    mult: Multiplicity,
    max_degree: usize,
    /// Per axis: monic p_n = e^{−Δ/4} xⁿ for n ≤ max_degree, one variable.
    monic: Vec<Vec<MultiPoly>>,
    /// Per axis: ln ‖p_n‖ in L²(|x|^{2μ} e^{−x²} dx).
    log_norms: Vec<Vec<f64>>,
    /// Per axis: √b_n for the orthonormal recurrence x h_n = √b_{n+1} h_{n+1} + √b_n h_{n−1}.
    recur: Vec<Vec<f64>>,
    /// Per axis: 1/√Γ(μ+1/2).
    h0: Vec<f64>,
    indices: Vec<Vec<u32>>,
}

impl HermiteBasis {
    pub fn new(mult: &Multiplicity, max_degree: usize) -> Result<Self> {
        let dim = mult.dim();
        let one_var = |j: usize| Multiplicity::new(vec![mult.mu()[j]]);
        let mut monic = Vec::with_capacity(dim);
        let mut log_norms = Vec::with_capacity(dim);
        let mut recur = Vec::with_capacity(dim);
        let mut h0 = Vec::with_capacity(dim);
        let quarter = qc_real(BigRational::new((-1).into(), 4.into()));
        for j in 0..dim {
            let m1 = one_var(j)?;
            let mu = mult.mu()[j];
            let polys = (0..=max_degree)
                .map(|n| heat_exp_poly(&MultiPoly::monomial(vec![n as u32], qc_one()), &quarter, &m1))
                .collect::<Result<Vec<_>>>()?;
            let norms = (0..=max_degree)
                .map(|n| {
                    let m = (n / 2) as f64;
                    let shift = if n % 2 == 0 { 0.5 } else { 1.5 };
                    Ok(0.5 * (ln_gamma(m + 1.0)? + ln_gamma(m + mu + shift)?))
                })
                .collect::<Result<Vec<_>>>()?;
            let b = (0..=max_degree + 1)
                .map(|n| {
                    let n = n as f64;
                    if n == 0.0 {
                        0.0
                    } else if (n as usize).is_multiple_of(2) {
                        (n / 2.0).sqrt()
                    } else {
                        ((n + 2.0 * mu) / 2.0).sqrt()
                    }
                })
                .collect();
            monic.push(polys);
            log_norms.push(norms);
            recur.push(b);
            h0.push((-0.5 * ln_gamma(mu + 0.5)?).exp());
        }
        Ok(Self {
            mult: mult.clone(),
            max_degree,
            monic,
            log_norms,
            recur,
            h0,
            indices: graded_indices(dim, max_degree),
        })
    }

    pub fn mult(&self) -> &Multiplicity {
        &self.mult
    }

    pub fn dim(&self) -> usize {
        self.mult.dim()
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    /// Multi-indices |ν| ≤ M in graded-lex order; positions index coefficient vectors.
    pub fn indices(&self) -> &[Vec<u32>] {
        &self.indices
    }

    pub fn position(&self, nu: &[u32]) -> Option<usize> {
        self.indices.iter().position(|e| e.as_slice() == nu)
    }

    fn check_index(&self, nu: &[u32]) -> Result<()> {
        check_dim(self.dim(), nu.len())?;
        let deg = total(nu);
        if deg > self.max_degree {
            return Err(Error::Range(format!("|nu| = {deg} exceeds basis degree {}", self.max_degree)));
        }
        Ok(())
    }

    /// Normalization ‖e^{−Δ_k/4}x^ν‖ applied to turn the monic product into h_ν.
    pub fn norm(&self, nu: &[u32]) -> Result<f64> {
        self.check_index(nu)?;
        Ok(nu.iter().enumerate().map(|(j, &n)| self.log_norms[j][n as usize]).sum::<f64>().exp())
    }

    /// Exact monic one-variable polynomial e^{−Δ/4}xⁿ on the given axis.
    pub fn monic_1d(&self, axis: usize, n: usize) -> Result<&MultiPoly> {
        self.monic
            .get(axis)
            .and_then(|v| v.get(n))
            .ok_or_else(|| Error::Range(format!("no 1-D Hermite polynomial for axis {axis}, degree {n}")))
    }

    /// h_ν as scale · (∏_j p_{ν_j}(x_j)) · e^{−|x|²/2}.
    pub fn hermite_function(&self, nu: &[u32]) -> Result<GaussPoly> {
        self.check_index(nu)?;
        let dim = self.dim();
        let mut poly = MultiPoly::one(dim);
        for (j, &n) in nu.iter().enumerate() {
            poly = &poly * &self.monic[j][n as usize].embed(dim, &[j])?;
        }
        Ok(GaussPoly::with_scale(poly, 1.0 / self.norm(nu)?))
    }

    /// h_0, …, h_M on one axis at a point, by the orthonormal recurrence.
    pub fn axis_values(&self, axis: usize, x: f64) -> Vec<f64> {
        let m = self.max_degree;
        let b = &self.recur[axis];
        let mut out = Vec::with_capacity(m + 1);
        out.push(self.h0[axis] * (-0.5 * x * x).exp());
        if m >= 1 {
            out.push(x * out[0] / b[1]);
        }
        for n in 1..m {
            let next = (x * out[n] - b[n] * out[n - 1]) / b[n + 1];
            out.push(next);
        }
        out
    }

    /// All h_ν(x) in index order.
    pub fn eval_all(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.dim(), x.len())?;
        let tables: Vec<Vec<f64>> = x.iter().enumerate().map(|(j, &v)| self.axis_values(j, v)).collect();
        Ok(self.indices.iter().map(|nu| nu.iter().enumerate().map(|(j, &n)| tables[j][n as usize]).product()).collect())
    }

    /// h_ν(x) by the recurrence.
    pub fn eval(&self, nu: &[u32], x: &[f64]) -> Result<f64> {
        self.check_index(nu)?;
        check_dim(self.dim(), x.len())?;
        Ok(nu.iter().zip(x).enumerate().map(|(j, (&n, &v))| self.axis_values(j, v)[n as usize]).product())
    }
}

/// Coefficient i as an exact constant, convenient for generator algebra.
pub fn imag_unit() -> QComplex {
    qc_i()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;
    use crate::specfun::{gamma_fn, laguerre_eval};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn mu(v: &[f64]) -> Multiplicity {
        Multiplicity::new(v.to_vec()).unwrap()
    }

    fn xpow(dim: usize, e: &[u32]) -> MultiPoly {
        assert_eq!(dim, e.len());
        MultiPoly::monomial(e.to_vec(), qc_one())
    }

    fn rq(n: i64, d: i64) -> QComplex {
        qc_real(q(n, d))
    }

    #[test]
    fn derivative_examples() {
        let m = mu(&[0.5]);
        assert_eq!(dunkl_derivative(&xpow(1, &[2]), 0, &m).unwrap(), MultiPoly::monomial(vec![1], rq(2, 1)));
        assert_eq!(dunkl_derivative(&xpow(1, &[1]), 0, &m).unwrap(), MultiPoly::constant(1, rq(2, 1)));
        assert_eq!(dunkl_derivative(&xpow(1, &[3]), 0, &m).unwrap(), MultiPoly::monomial(vec![2], rq(4, 1)));
        let m = mu(&[0.3]);
        assert_eq!(dunkl_derivative(&xpow(1, &[1]), 0, &m).unwrap(), MultiPoly::constant(1, rq(8, 5)));
        assert!(dunkl_derivative(&xpow(1, &[1]), 1, &m).is_err());
    }

    #[test]
    fn laplacian_examples() {
        let m = mu(&[0.3, 0.7]);
        assert!(dunkl_laplacian(&xpow(2, &[1, 0]), &m).unwrap().is_zero());
        // x₁²x₂ → (2 + 4a) x₂ with a = 3/10
        let lap = dunkl_laplacian(&xpow(2, &[2, 1]), &m).unwrap();
        assert_eq!(lap, MultiPoly::monomial(vec![0, 1], rq(16, 5)));
        let m1 = mu(&[1.7]);
        assert_eq!(dunkl_laplacian(&xpow(1, &[2]), &m1).unwrap(), MultiPoly::constant(1, rq(44, 5)));
    }

    #[test]
    fn heat_examples() {
        let m = mu(&[0.5]);
        let p = xpow(1, &[2]);
        assert_eq!(heat_exp_poly_rational(&p, &q(0, 1), &m).unwrap(), p);
        // x² − (1 + 2μ)/2
        let expected = &p - &MultiPoly::constant(1, rq(1, 1));
        assert_eq!(heat_exp_poly_rational(&p, &q(-1, 4), &m).unwrap(), expected);
        let p4 = xpow(1, &[4]);
        let there = heat_exp_poly_rational(&p4, &q(-1, 4), &m).unwrap();
        assert_eq!(heat_exp_poly_rational(&there, &q(1, 4), &m).unwrap(), p4);
    }

    #[test]
    fn eval_examples() {
        assert_eq!(MultiPoly::one(2).eval(&[3.0, -1.0]).unwrap(), Complex64::new(1.0, 0.0));
        assert_eq!(xpow(2, &[2, 1]).eval(&[2.0, 3.0]).unwrap(), Complex64::new(12.0, 0.0));
        assert_eq!(xpow(2, &[2, 1]).eval_exact(&[2.0, 3.0]).unwrap(), Complex64::new(12.0, 0.0));
        assert!(xpow(2, &[2, 1]).eval(&[2.0]).is_err());
        let basis = HermiteBasis::new(&mu(&[0.0]), 3).unwrap();
        let h0 = basis.hermite_function(&[0]).unwrap();
        assert_relative_eq!(h0.eval(&[0.0]).unwrap().re, std::f64::consts::PI.powf(-0.25), max_relative = 1e-15);
    }

    #[test]
    fn json_round_trip() {
        let p = MultiPoly::from_terms(2, vec![(vec![2, 1], rq(3, 4)), (vec![0, 0], QComplex::new(q(-1, 3), q(5, 2)))])
            .unwrap();
        let s = serde_json::to_string(&p).unwrap();
        assert!(s.contains("\"re\":\"3/4\""));
        let back: MultiPoly = serde_json::from_str(&s).unwrap();
        assert_eq!(back, p);
        let bad = r#"{"dim":2,"terms":[{"exp":[1],"re":"1","im":"0"}]}"#;
        assert!(serde_json::from_str::<MultiPoly>(bad).is_err());
    }

    #[test]
    fn harmonics_are_annihilated() {
        let m = mu(&[0.3, 0.7]);
        for deg in 0..6 {
            let hs = harmonic_basis(&m, deg).unwrap();
            let expected = if deg == 0 { 1 } else { 2 };
            assert_eq!(hs.len(), expected, "degree {deg}");
            for h in hs {
                assert!(dunkl_laplacian(&h, &m).unwrap().is_zero());
                assert_eq!(h.homogeneous_degree(), Some(deg));
            }
        }
        let m3 = mu(&[0.5, 0.0, 1.0]);
        // dim of harmonics of degree n in 3 variables: C(n+2,2) − C(n,2)
        assert_eq!(harmonic_basis(&m3, 4).unwrap().len(), 15 - 6);
    }

    #[test]
    fn monic_family_matches_recurrence() {
        // p_{n+1} = x p_n − (b_n²) p_{n−1} exactly
        let m = mu(&[1.7]);
        let basis = HermiteBasis::new(&m, 10).unwrap();
        let x = MultiPoly::var(1, 0);
        for n in 1..10 {
            let bn = if n % 2 == 0 { q(n as i64, 2) } else { (qint(n as i64) + q(34, 10)) * q(1, 2) };
            let rhs = &(&x * basis.monic_1d(0, n).unwrap()) - &basis.monic_1d(0, n - 1).unwrap().scale_rational(&bn);
            assert_eq!(basis.monic_1d(0, n + 1).unwrap(), &rhs, "n={n}");
        }
    }

    fn laguerre_closed_form(n: usize, mu: f64, x: f64) -> f64 {
        let m = n / 2;
        let sign = if m.is_multiple_of(2) { 1.0 } else { -1.0 };
        let mf = m as f64;
        let g = |v: f64| gamma_fn(v).unwrap();
        let e = (-x * x / 2.0).exp();
        if n.is_multiple_of(2) {
            sign * (g(mf + 1.0) / g(mf + mu + 0.5)).sqrt() * laguerre_eval(m, mu - 0.5, x * x) * e
        } else {
            sign * (g(mf + 1.0) / g(mf + mu + 1.5)).sqrt() * x * laguerre_eval(m, mu + 0.5, x * x) * e
        }
    }

    #[test]
    fn heat_construction_matches_laguerre_closed_form() {
        for &m in &[0.0, 0.5, 1.7] {
            let basis = HermiteBasis::new(&mu(&[m]), 12).unwrap();
            for n in 0..=12u32 {
                let h = basis.hermite_function(&[n]).unwrap();
                for i in 0..21 {
                    let x = -5.0 + 0.5 * i as f64;
                    let oracle = laguerre_closed_form(n as usize, m, x);
                    let exact = h.poly().eval_exact(&[x]).unwrap().re * h.scale() * (-x * x / 2.0).exp();
                    let recur = basis.eval(&[n], &[x]).unwrap();
                    assert!((exact - oracle).abs() < 1e-12, "mu={m} n={n} x={x}: {exact} vs {oracle}");
                    assert!((recur - oracle).abs() < 1e-12, "mu={m} n={n} x={x}: {recur} vs {oracle}");
                }
            }
        }
    }

    #[test]
    fn hermite_operator_eigenrelation_is_exact() {
        let m = mu(&[0.3, 0.7]);
        let basis = HermiteBasis::new(&m, 5).unwrap();
        for nu in basis.indices() {
            let h = basis.hermite_function(nu).unwrap();
            let lhs = hermite_operator(&h, &m).unwrap();
            let deg = total(nu) as i64;
            // −(2|ν| + 2γ + N) with γ = 1, N = 2
            let rhs = h.scale_exact(&rq(-(2 * deg + 4), 1));
            assert_eq!(lhs, rhs);
        }
        let ground = GaussPoly::new(MultiPoly::one(1));
        let out = hermite_operator(&ground, &mu(&[0.0])).unwrap();
        assert_eq!(out.poly(), &MultiPoly::constant(1, rq(-1, 1)));
    }

    #[test]
    fn hermite_parity() {
        let basis = HermiteBasis::new(&mu(&[0.4, 1.0]), 6).unwrap();
        for nu in basis.indices() {
            let h = basis.hermite_function(nu).unwrap();
            let expected = if total(nu).is_multiple_of(2) { h.clone() } else { h.scale_exact(&rq(-1, 1)) };
            assert_eq!(h.reflect(), expected);
        }
    }

    #[test]
    fn index_order() {
        assert_eq!(graded_indices(2, 2), vec![vec![0, 0], vec![1, 0], vec![0, 1], vec![2, 0], vec![1, 1], vec![0, 2]]);
        assert_eq!(homogeneous_indices(3, 2).len(), 6);
    }

    fn arb_poly(dim: usize) -> impl Strategy<Value = MultiPoly> {
        prop::collection::vec((prop::collection::vec(0u32..4, dim), -9i64..10, 1i64..5), 1..8).prop_map(move |terms| {
            MultiPoly::from_terms(dim, terms.into_iter().map(|(e, n, d)| (e, rq(n, d)))).unwrap()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(50))]

        #[test]
        fn dunkl_operators_commute(p in arb_poly(3), a in 0u32..8, b in 0u32..8, c in 0u32..8) {
            let m = Multiplicity::new(vec![a as f64 / 4.0, b as f64 / 4.0, c as f64 / 10.0]).unwrap();
            for i in 0..3 {
                for j in 0..3 {
                    let ij = dunkl_derivative(&dunkl_derivative(&p, j, &m).unwrap(), i, &m).unwrap();
                    let ji = dunkl_derivative(&dunkl_derivative(&p, i, &m).unwrap(), j, &m).unwrap();
                    prop_assert_eq!(ij, ji);
                }
            }
        }

        #[test]
        fn laplacian_is_nilpotent(n in 0usize..7, a in 0u32..8, b in 0u32..8, seed in prop::collection::vec(-5i64..6, 1..8)) {
            let m = Multiplicity::new(vec![a as f64 / 4.0, b as f64 / 10.0]).unwrap();
            let idx = homogeneous_indices(2, n);
            let p = MultiPoly::from_terms(2, idx.iter().zip(seed.iter().cycle()).map(|(e, &c)| (e.clone(), rq(c, 1)))).unwrap();
            let mut t = p;
            for _ in 0..(n / 2 + 1) {
                t = dunkl_laplacian(&t, &m).unwrap();
            }
            prop_assert!(t.is_zero());
        }

        #[test]
        fn heat_pair_is_inverse(p in arb_poly(2), a in 0u32..8) {
            let m = Multiplicity::new(vec![a as f64 / 4.0, 0.5]).unwrap();
            let there = heat_exp_poly_rational(&p, &q(-1, 4), &m).unwrap();
            prop_assert_eq!(heat_exp_poly_rational(&there, &q(1, 4), &m).unwrap(), p);
        }
    }
}

//! Exact rational helpers shared by the polynomial engine.

use num_bigint::BigInt;
use num_complex::Complex;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Complex number with exact rational parts.
pub type QComplex = Complex<BigRational>;

pub fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn qint(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn qc_real(r: BigRational) -> QComplex {
    Complex::new(r, BigRational::zero())
}

pub fn qc_one() -> QComplex {
    Complex::new(BigRational::one(), BigRational::zero())
}

pub fn qc_i() -> QComplex {
    Complex::new(BigRational::zero(), BigRational::one())
}

pub fn qc_to_f64(c: &QComplex) -> Complex64 {
    Complex64::new(to_f64(&c.re), to_f64(&c.im))
}

pub fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Exact value of a finite float.
pub fn exact_from_f64(x: f64) -> Result<BigRational> {
    BigRational::from_float(x).ok_or_else(|| Error::Domain(format!("non-finite value {x}")))
}

pub fn qc_from_c64(z: Complex64) -> Result<QComplex> {
    Ok(Complex::new(exact_from_f64(z.re)?, exact_from_f64(z.im)?))
}

/// The rational with the smallest denominator among the continued-fraction
/// convergents of `x` that rounds back to `x` exactly; `1.7` maps to `17/10`.
pub fn simplest_rational(x: f64) -> Result<BigRational> {
    let exact = exact_from_f64(x)?;
    let negative = exact.is_negative();
    let mut rem = exact.abs();
    let (mut p0, mut q0) = (BigInt::zero(), BigInt::one());
    let (mut p1, mut q1) = (BigInt::one(), BigInt::zero());
    loop {
        let a = rem.floor().to_integer();
        let p2 = &a * &p1 + &p0;
        let q2 = &a * &q1 + &q0;
        let mut cand = BigRational::new(p2.clone(), q2.clone());
        if negative {
            cand = -cand;
        }
        if to_f64(&cand) == x {
            return Ok(cand);
        }
        let frac = &rem - BigRational::from_integer(a);
        if frac.is_zero() {
            return Ok(if negative { -exact.abs() } else { exact });
        }
        rem = frac.recip();
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
    }
}

/// Parses `"p/q"`, `"p"` or a decimal literal such as `"0.25"` exactly.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("invalid rational literal {s:?}"));
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let negative = int.starts_with('-');
        let digits = format!("{}{}", int.trim_start_matches(['-', '+']), frac);
        if digits.is_empty() || !digits.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let n: BigInt = digits.parse().map_err(|_| bad())?;
        let d = num_traits::pow(BigInt::from(10), frac.len());
        let r = BigRational::new(n, d);
        return Ok(if negative { -r } else { r });
    }
    let n: BigInt = s.parse().map_err(|_| bad())?;
    Ok(BigRational::from_integer(n))
}

pub fn format_rational(r: &BigRational) -> String {
    if r.is_integer() { r.numer().to_string() } else { format!("{}/{}", r.numer(), r.denom()) }
}

//! Exact scalars: rationals, Gaussian rationals and single radicals `c * sqrt(q)`.
//!
//! Every operator entry and every Hermitian form value produced by this crate
//! for an exact parameter lives in this closure. Radicands are kept square-free
//! and integral, which makes equality structural and lets like radicals add.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub type Rat = BigRational;

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn parse_rat(s: &str) -> Result<Rat> {
    let s = s.trim();
    let s = s.strip_prefix('+').unwrap_or(s);
    Rat::from_str(s).map_err(|_| Error::Parse(format!("not a rational: {s:?}")))
}

/// Exact `re + i*im` with rational parts.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CRat {
    pub re: Rat,
    pub im: Rat,
}

impl CRat {
    pub fn new(re: Rat, im: Rat) -> Self {
        Self { re, im }
    }

    pub fn real(re: Rat) -> Self {
        Self {
            re,
            im: Rat::zero(),
        }
    }

    pub fn imag(im: Rat) -> Self {
        Self {
            re: Rat::zero(),
            im,
        }
    }

    pub fn from_int(n: i64) -> Self {
        Self::real(rat_int(n))
    }

    pub fn zero() -> Self {
        Self::from_int(0)
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Self {
            re: self.re.clone(),
            im: -self.im.clone(),
        }
    }

    /// `|z|^2`, always rational.
    pub fn norm_sqr(&self) -> Rat {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let n = self.norm_sqr();
        Some(Self {
            re: &self.re / &n,
            im: -(&self.im / &n),
        })
    }

    pub fn scale(&self, r: &Rat) -> Self {
        Self {
            re: &self.re * r,
            im: &self.im * r,
        }
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::new(rat_to_f64(&self.re), rat_to_f64(&self.im))
    }
}

impl From<Rat> for CRat {
    fn from(r: Rat) -> Self {
        CRat::real(r)
    }
}

impl Add for &CRat {
    type Output = CRat;
    fn add(self, o: &CRat) -> CRat {
        CRat {
            re: &self.re + &o.re,
            im: &self.im + &o.im,
        }
    }
}

impl Sub for &CRat {
    type Output = CRat;
    fn sub(self, o: &CRat) -> CRat {
        CRat {
            re: &self.re - &o.re,
            im: &self.im - &o.im,
        }
    }
}

impl Mul for &CRat {
    type Output = CRat;
    fn mul(self, o: &CRat) -> CRat {
        CRat {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }
}

impl Neg for &CRat {
    type Output = CRat;
    fn neg(self) -> CRat {
        CRat {
            re: -self.re.clone(),
            im: -self.im.clone(),
        }
    }
}

impl fmt::Display for CRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re.is_zero(), self.im.is_zero()) {
            (_, true) => write!(f, "{}", self.re),
            (true, false) => write!(f, "{}i", self.im),
            (false, false) => {
                if self.im.is_negative() {
                    write!(f, "{}-{}i", self.re, -self.im.clone())
                } else {
                    write!(f, "{}+{}i", self.re, self.im)
                }
            }
        }
    }
}

pub(crate) fn rat_to_f64(r: &Rat) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Splits `n = root^2 * core` with `core` square-free.
fn square_free_split(n: &BigUint) -> (BigUint, BigUint) {
    if n.is_zero() {
        return (BigUint::zero(), BigUint::one());
    }
    let s = n.sqrt();
    if &s * &s == *n {
        return (s, BigUint::one());
    }
    let mut rest = n.clone();
    let mut root = BigUint::one();
    let mut core = BigUint::one();
    let mut p = BigUint::from(2u32);
    while &p * &p <= rest {
        let mut k = 0u32;
        while (&rest % &p).is_zero() {
            rest /= &p;
            k += 1;
        }
        if k > 0 {
            root *= p.pow(k / 2);
            if k % 2 == 1 {
                core *= &p;
            }
        }
        p += if p == BigUint::from(2u32) { 1u32 } else { 2u32 };
    }
    core *= rest;
    (root, core)
}

/// Exact `coeff * sqrt(radicand)`.
///
/// The radicand is a square-free positive integer; a rational radicand
/// `u/v` is rewritten as `sqrt(u*v)/v` before the square part is pulled out.
/// Zero is always stored as `0 * sqrt(1)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RadicalScalar {
    coeff: CRat,
    radicand: BigInt,
}

impl RadicalScalar {
    pub fn new(coeff: CRat, radicand: Rat) -> Result<Self> {
        let root = Self::sqrt(&radicand)?;
        Ok(root.scale(&coeff))
    }

    pub fn zero() -> Self {
        Self {
            coeff: CRat::zero(),
            radicand: BigInt::one(),
        }
    }

    pub fn one() -> Self {
        Self::from_crat(CRat::one())
    }

    pub fn from_crat(coeff: CRat) -> Self {
        Self {
            coeff,
            radicand: BigInt::one(),
        }
    }

    pub fn from_rat(r: Rat) -> Self {
        Self::from_crat(CRat::real(r))
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_crat(CRat::from_int(n))
    }

    /// Non-negative square root of a non-negative rational.
    pub fn sqrt(r: &Rat) -> Result<Self> {
        if r.is_negative() {
            return Err(Error::NegativeRadicand(r.to_string()));
        }
        if r.is_zero() {
            return Ok(Self::zero());
        }
        // sqrt(n/d) = sqrt(n*d) / d
        let n = r.numer().magnitude() * r.denom().magnitude();
        let (root, core) = square_free_split(&n);
        let coeff = Rat::new(BigInt::from(root), r.denom().clone());
        Ok(Self {
            coeff: CRat::real(coeff),
            radicand: BigInt::from(core),
        })
    }

    /// `sqrt(|a| / |b|)` for Gaussian rationals whose modulus ratio is rational.
    ///
    /// This covers every quotient `|nu + k| / |nu - k|` with `nu` real or
    /// purely imaginary. Fails with `NotExact` when `|a|^2/|b|^2` is not the
    /// square of a rational.
    pub fn sqrt_modulus_ratio(a: &CRat, b: &CRat) -> Result<Self> {
        let den = b.norm_sqr();
        if den.is_zero() {
            return Err(Error::NotExact(format!("|{a}|/|{b}|")));
        }
        let ratio_sq = a.norm_sqr() / den;
        let ratio =
            rat_sqrt_exact(&ratio_sq).ok_or_else(|| Error::NotExact(format!("|{a}|/|{b}|")))?;
        Self::sqrt(&ratio)
    }

    pub fn coeff(&self) -> &CRat {
        &self.coeff
    }

    pub fn radicand(&self) -> &BigInt {
        &self.radicand
    }

    pub fn is_zero(&self) -> bool {
        self.coeff.is_zero()
    }

    /// The value as a Gaussian rational, when the radicand is 1.
    pub fn as_crat(&self) -> Option<&CRat> {
        self.radicand.is_one().then_some(&self.coeff)
    }

    pub fn scale(&self, c: &CRat) -> Self {
        Self::canonical(&self.coeff * c, self.radicand.clone())
    }

    pub fn scale_rat(&self, r: &Rat) -> Self {
        Self::canonical(self.coeff.scale(r), self.radicand.clone())
    }

    pub fn conj(&self) -> Self {
        Self {
            coeff: self.coeff.conj(),
            radicand: self.radicand.clone(),
        }
    }

    pub fn inv(&self) -> Option<Self> {
        // 1/(c sqrt q) = sqrt(q) / (c q)
        let q = Rat::from_integer(self.radicand.clone());
        let c = self.coeff.inv()?.scale(&q.recip());
        Some(Self {
            coeff: c,
            radicand: self.radicand.clone(),
        })
    }

    pub fn mul(&self, other: &Self) -> Self {
        // Both radicands are square-free, so (q1/g)(q2/g) is square-free too.
        let g = self.radicand.gcd(&other.radicand);
        let core = (&self.radicand / &g) * (&other.radicand / &g);
        let coeff = (&self.coeff * &other.coeff).scale(&Rat::from_integer(g));
        Self::canonical(coeff, core)
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        if other.is_zero() {
            return Ok(self.clone());
        }
        if self.is_zero() {
            return Ok(other.clone());
        }
        if self.radicand != other.radicand {
            return Err(Error::NonClosedSum(
                self.radicand.to_string(),
                other.radicand.to_string(),
            ));
        }
        Ok(Self::canonical(
            &self.coeff + &other.coeff,
            self.radicand.clone(),
        ))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.checked_add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        Self {
            coeff: -&self.coeff,
            radicand: self.radicand.clone(),
        }
    }

    /// Sign of a real value; `None` for non-real values.
    pub fn real_sign(&self) -> Option<Ordering> {
        self.coeff
            .is_real()
            .then(|| self.coeff.re.cmp(&Rat::zero()))
    }

    pub fn to_float(&self) -> Complex64 {
        let root = self.radicand.to_f64().unwrap_or(f64::NAN).sqrt();
        self.coeff.to_complex() * root
    }

    fn canonical(coeff: CRat, radicand: BigInt) -> Self {
        if coeff.is_zero() {
            Self::zero()
        } else {
            Self { coeff, radicand }
        }
    }
}

/// Exact square root of a non-negative rational, if it is a perfect square.
pub fn rat_sqrt_exact(r: &Rat) -> Option<Rat> {
    if r.is_negative() {
        return None;
    }
    let n = r.numer().magnitude();
    let d = r.denom().magnitude();
    let (sn, sd) = (n.sqrt(), d.sqrt());
    (&sn * &sn == *n && &sd * &sd == *d)
        .then(|| Rat::new(BigInt::from_biguint(Sign::Plus, sn), BigInt::from(sd)))
}

pub fn radical_mul(a: &RadicalScalar, b: &RadicalScalar) -> RadicalScalar {
    a.mul(b)
}

pub fn radical_add(a: &RadicalScalar, b: &RadicalScalar) -> Result<RadicalScalar> {
    a.checked_add(b)
}

pub fn to_float(a: &RadicalScalar) -> Complex64 {
    a.to_float()
}

impl fmt::Display for RadicalScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.radicand.is_one() {
            write!(f, "{}", self.coeff)
        } else if self.coeff.re.is_zero() || self.coeff.im.is_zero() {
            write!(f, "{}*sqrt({})", self.coeff, self.radicand)
        } else {
            write!(f, "({})*sqrt({})", self.coeff, self.radicand)
        }
    }
}

#[derive(Serialize, Deserialize)]
struct RadicalRepr {
    c: [String; 2],
    q: String,
}

impl Serialize for RadicalScalar {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        RadicalRepr {
            c: [self.coeff.re.to_string(), self.coeff.im.to_string()],
            q: self.radicand.to_string(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for RadicalScalar {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = RadicalRepr::deserialize(d)?;
        let re = parse_rat(&repr.c[0]).map_err(D::Error::custom)?;
        let im = parse_rat(&repr.c[1]).map_err(D::Error::custom)?;
        let q = parse_rat(&repr.q).map_err(D::Error::custom)?;
        RadicalScalar::new(CRat::new(re, im), q).map_err(D::Error::custom)
    }
}

/// An operator entry or form value: exact radical, or floating complex.
#[derive(Clone, Debug, PartialEq)]
pub enum Scalar {
    Exact(RadicalScalar),
    Float(Complex64),
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar::Exact(RadicalScalar::zero())
    }

    pub fn one() -> Self {
        Scalar::Exact(RadicalScalar::one())
    }

    pub fn from_crat(c: CRat) -> Self {
        Scalar::Exact(RadicalScalar::from_crat(c))
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Scalar::Exact(_))
    }

    pub fn exact(&self) -> Option<&RadicalScalar> {
        match self {
            Scalar::Exact(r) => Some(r),
            Scalar::Float(_) => None,
        }
    }

    /// Exact zero test; floats compare against literal 0.
    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Exact(r) => r.is_zero(),
            Scalar::Float(z) => *z == Complex64::new(0.0, 0.0),
        }
    }

    pub fn to_float(&self) -> Complex64 {
        match self {
            Scalar::Exact(r) => r.to_float(),
            Scalar::Float(z) => *z,
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        match (self, o) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a.mul(b)),
            _ => Scalar::Float(self.to_float() * o.to_float()),
        }
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        match (self, o) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a.checked_add(b).map(Scalar::Exact),
            _ => Ok(Scalar::Float(self.to_float() + o.to_float())),
        }
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        match self {
            Scalar::Exact(a) => Scalar::Exact(a.neg()),
            Scalar::Float(z) => Scalar::Float(-z),
        }
    }

    pub fn conj(&self) -> Self {
        match self {
            Scalar::Exact(a) => Scalar::Exact(a.conj()),
            Scalar::Float(z) => Scalar::Float(z.conj()),
        }
    }

    pub fn inv(&self) -> Option<Self> {
        match self {
            Scalar::Exact(a) => a.inv().map(Scalar::Exact),
            Scalar::Float(z) => (!self.is_zero()).then(|| Scalar::Float(z.inv())),
        }
    }

    pub fn scale_rat(&self, r: &Rat) -> Self {
        match self {
            Scalar::Exact(a) => Scalar::Exact(a.scale_rat(r)),
            Scalar::Float(z) => Scalar::Float(z * rat_to_f64(r)),
        }
    }

    /// Exact equality for exact pairs; absolute tolerance otherwise.
    pub fn approx_eq(&self, o: &Self, tol: f64) -> bool {
        match (self, o) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a == b,
            _ => (self.to_float() - o.to_float()).norm() <= tol,
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(r) => write!(f, "{r}"),
            Scalar::Float(z) => write!(f, "{}{:+}i", z.re, z.im),
        }
    }
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct FloatRepr {
            float: [f64; 2],
        }
        match self {
            Scalar::Exact(r) => r.serialize(s),
            Scalar::Float(z) => FloatRepr {
                float: [z.re, z.im],
            }
            .serialize(s),
        }
    }
}

/// The deformation parameter.
#[derive(Clone, Debug, PartialEq)]
pub enum NuParameter {
    ExactReal(Rat),
    /// `nu = i * t`.
    ExactImaginary(Rat),
    Float(Complex64),
}

impl NuParameter {
    pub fn real(n: i64, d: i64) -> Self {
        NuParameter::ExactReal(rat(n, d))
    }

    pub fn int(n: i64) -> Self {
        NuParameter::ExactReal(rat_int(n))
    }

    pub fn imag(n: i64, d: i64) -> Self {
        NuParameter::ExactImaginary(rat(n, d))
    }

    /// Builds an exact parameter from a Gaussian rational on one of the two axes.
    pub fn from_crat(c: &CRat) -> Result<Self> {
        if c.im.is_zero() {
            Ok(NuParameter::ExactReal(c.re.clone()))
        } else if c.re.is_zero() {
            Ok(NuParameter::ExactImaginary(c.im.clone()))
        } else {
            Err(Error::NotExact(format!(
                "nu = {c} is off both axes; use a float parameter"
            )))
        }
    }

    pub fn exact(&self) -> Option<CRat> {
        match self {
            NuParameter::ExactReal(r) => Some(CRat::real(r.clone())),
            NuParameter::ExactImaginary(t) => Some(CRat::imag(t.clone())),
            NuParameter::Float(_) => None,
        }
    }

    pub fn is_exact(&self) -> bool {
        !matches!(self, NuParameter::Float(_))
    }

    pub fn to_complex(&self) -> Complex64 {
        match self {
            NuParameter::ExactReal(r) => Complex64::new(rat_to_f64(r), 0.0),
            NuParameter::ExactImaginary(t) => Complex64::new(0.0, rat_to_f64(t)),
            NuParameter::Float(z) => *z,
        }
    }

    /// The integer value of an exact real parameter, if integral.
    pub fn as_integer(&self) -> Option<i64> {
        let r = match self {
            NuParameter::ExactReal(r) => r,
            NuParameter::ExactImaginary(t) if t.is_zero() => return Some(0),
            _ => return None,
        };
        r.is_integer().then(|| r.to_integer().to_i64()).flatten()
    }

    /// `nu + k` as a scalar.
    pub fn shifted(&self, k: i64) -> Scalar {
        match self.exact() {
            Some(c) => Scalar::from_crat(&c + &CRat::from_int(k)),
            None => Scalar::Float(self.to_complex() + k as f64),
        }
    }
}

impl fmt::Display for NuParameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NuParameter::ExactReal(r) => write!(f, "{r}"),
            NuParameter::ExactImaginary(t) => {
                if t.is_zero() {
                    write!(f, "0")
                } else if t.is_one() {
                    write!(f, "i")
                } else if *t == -Rat::one() {
                    write!(f, "-i")
                } else {
                    write!(f, "i*{t}")
                }
            }
            NuParameter::Float(z) => {
                if z.im == 0.0 {
                    write!(f, "{}", z.re)
                } else {
                    write!(f, "{}{:+}i", z.re, z.im)
                }
            }
        }
    }
}

impl FromStr for NuParameter {
    type Err = Error;

    /// Accepts `p/q`, and imaginary forms `i`, `-i`, `2i`, `i/3`, `i*3/4`, `3/4i`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Err(Error::Parse("empty nu".into()));
        }
        if !s.contains('i') {
            return parse_rat(s).map(NuParameter::ExactReal);
        }
        if s.matches('i').count() != 1 {
            return Err(Error::Parse(format!("malformed nu: {s:?}")));
        }
        let t = s.replace(['i', '*'], "");
        let (neg, body) = match t.strip_prefix('-') {
            Some(rest) => (true, rest.to_string()),
            None => (false, t.strip_prefix('+').unwrap_or(&t).to_string()),
        };
        if body.contains(['+', '-']) {
            return Err(Error::Parse(format!("malformed nu: {s:?}")));
        }
        let body = if body.is_empty() {
            "1".to_string()
        } else if body.starts_with('/') {
            format!("1{body}")
        } else {
            body
        };
        let v = parse_rat(&body).map_err(|_| Error::Parse(format!("malformed nu: {s:?}")))?;
        Ok(NuParameter::ExactImaginary(if neg { -v } else { v }))
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum NuRepr {
    Exact { re: String, im: String },
    Float { float: [f64; 2] },
}

impl Serialize for NuParameter {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let repr = match self {
            NuParameter::Float(z) => NuRepr::Float {
                float: [z.re, z.im],
            },
            _ => {
                let c = self.exact().expect("exact parameter");
                NuRepr::Exact {
                    re: c.re.to_string(),
                    im: c.im.to_string(),
                }
            }
        };
        repr.serialize(s)
    }
}

impl<'de> Deserialize<'de> for NuParameter {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        match NuRepr::deserialize(d)? {
            NuRepr::Float { float } => Ok(NuParameter::Float(Complex64::new(float[0], float[1]))),
            NuRepr::Exact { re, im } => {
                let c = CRat::new(
                    parse_rat(&re).map_err(D::Error::custom)?,
                    parse_rat(&im).map_err(D::Error::custom)?,
                );
                NuParameter::from_crat(&c).map_err(D::Error::custom)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn r(n: i64, d: i64) -> Rat {
        rat(n, d)
    }

    fn rad(c: Rat, q: i64) -> RadicalScalar {
        RadicalScalar::new(CRat::real(c), rat_int(q)).unwrap()
    }

    #[test]
    fn sqrt2_squared_is_two() {
        let a = rad(r(1, 1), 2);
        assert_eq!(a.mul(&a), RadicalScalar::from_int(2));
        assert!(a.mul(&a).radicand().is_one());
    }

    #[test]
    fn radicand_normalization_absorbs_squares() {
        let a = rad(r(1, 1), 8);
        assert_eq!(a.coeff(), &CRat::from_int(2));
        assert_eq!(a.radicand(), &BigInt::from(2));
        let b = rad(r(3, 1), 2);
        assert_eq!(a.mul(&b), RadicalScalar::from_int(12));
    }

    #[test]
    fn half_root_five_squared() {
        let a = rad(r(1, 2), 5);
        assert_eq!(a.mul(&a), RadicalScalar::from_rat(r(5, 4)));
    }

    #[test]
    fn rational_radicand_moves_denominator() {
        // sqrt(1/2) = (1/2) sqrt(2)
        let a = RadicalScalar::sqrt(&r(1, 2)).unwrap();
        assert_eq!(a, rad(r(1, 2), 2));
        let b = RadicalScalar::sqrt(&r(4, 2)).unwrap();
        assert_eq!(b, rad(r(1, 1), 2));
    }

    #[test]
    fn addition_of_like_and_unlike_radicals() {
        let a = rad(r(1, 1), 2);
        let b = rad(r(3, 1), 2);
        assert_eq!(radical_add(&a, &b).unwrap(), rad(r(4, 1), 2));
        assert_eq!(radical_add(&a, &RadicalScalar::zero()).unwrap(), a);
        assert_eq!(radical_add(&RadicalScalar::zero(), &a).unwrap(), a);
        let c = rad(r(1, 1), 3);
        assert!(matches!(
            radical_add(&a, &c),
            Err(Error::NonClosedSum(_, _))
        ));
    }

    #[test]
    fn zero_is_canonical() {
        let a = rad(r(1, 1), 2);
        let z = a.checked_sub(&a).unwrap();
        assert_eq!(z, RadicalScalar::zero());
        assert!(z.radicand().is_one());
        assert_eq!(
            RadicalScalar::new(CRat::zero(), rat_int(7)).unwrap(),
            RadicalScalar::zero()
        );
    }

    #[test]
    fn negative_radicand_rejected() {
        assert!(RadicalScalar::sqrt(&r(-2, 1)).is_err());
    }

    #[test]
    fn float_conversions() {
        assert_eq!(
            RadicalScalar::from_int(2).to_float(),
            Complex64::new(2.0, 0.0)
        );
        let h = rad(r(1, 2), 5).to_float();
        assert!((h.re - 5f64.sqrt() / 2.0).abs() <= 4.0 * f64::EPSILON * h.re);
        let i2 = RadicalScalar::new(CRat::imag(rat_int(1)), rat_int(2))
            .unwrap()
            .to_float();
        assert_eq!(i2.re, 0.0);
        assert!((i2.im - std::f64::consts::SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn inverse() {
        let a = rad(r(3, 2), 5);
        assert_eq!(a.mul(&a.inv().unwrap()), RadicalScalar::one());
        let c = RadicalScalar::from_crat(CRat::new(rat_int(1), rat_int(1)));
        assert_eq!(c.mul(&c.inv().unwrap()), RadicalScalar::one());
        assert!(RadicalScalar::zero().inv().is_none());
    }

    #[test]
    fn modulus_ratio_roots() {
        // sqrt(|3+1|/|3-1|) = sqrt 2
        let a = RadicalScalar::sqrt_modulus_ratio(&CRat::from_int(4), &CRat::from_int(2)).unwrap();
        assert_eq!(a, rad(r(1, 1), 2));
        // |i+1| / |i-1| = 1
        let one = RadicalScalar::sqrt_modulus_ratio(
            &CRat::new(rat_int(1), rat_int(1)),
            &CRat::new(rat_int(-1), rat_int(1)),
        )
        .unwrap();
        assert_eq!(one, RadicalScalar::one());
        // |1+i| / 1 = sqrt 2, whose square root is not a single radical
        assert!(RadicalScalar::sqrt_modulus_ratio(
            &CRat::new(rat_int(1), rat_int(1)),
            &CRat::one()
        )
        .is_err());
    }

    #[test]
    fn json_shape() {
        let a = rad(r(1, 2), 5);
        let s = serde_json::to_string(&a).unwrap();
        assert_eq!(s, r#"{"c":["1/2","0"],"q":"5"}"#);
        let back: RadicalScalar = serde_json::from_str(r#"{"c":["1","0"],"q":"8"}"#).unwrap();
        assert_eq!(back, rad(r(2, 1), 2));
    }

    #[test]
    fn nu_parsing() {
        let cases = [
            ("7/2", NuParameter::real(7, 2)),
            ("-5/2", NuParameter::real(-5, 2)),
            ("0", NuParameter::int(0)),
            ("i", NuParameter::imag(1, 1)),
            ("-i", NuParameter::imag(-1, 1)),
            ("2i", NuParameter::imag(2, 1)),
            ("i/3", NuParameter::imag(1, 3)),
            ("i*3/4", NuParameter::imag(3, 4)),
            ("-3/4i", NuParameter::imag(-3, 4)),
        ];
        for (s, want) in cases {
            assert_eq!(s.parse::<NuParameter>().unwrap(), want, "{s}");
        }
        for bad in ["", "abc", "1+i", "ii", "3/0x", "1-2i"] {
            assert!(bad.parse::<NuParameter>().is_err(), "{bad}");
        }
    }

    #[test]
    fn nu_display_round_trips() {
        for s in ["7/2", "-5/2", "i", "-i", "i*2", "i*1/3"] {
            let nu: NuParameter = s.parse().unwrap();
            assert_eq!(nu.to_string(), s);
        }
    }

    #[test]
    fn nu_json() {
        let nu: NuParameter = serde_json::from_str(r#"{"re":"0","im":"1/3"}"#).unwrap();
        assert_eq!(nu, NuParameter::imag(1, 3));
        let f: NuParameter = serde_json::from_str(r#"{"float":[0.5,0.25]}"#).unwrap();
        assert_eq!(f, NuParameter::Float(Complex64::new(0.5, 0.25)));
        assert!(serde_json::from_str::<NuParameter>(r#"{"re":"1","im":"1"}"#).is_err());
    }

    fn arb_radical() -> impl Strategy<Value = RadicalScalar> {
        (
            -50i64..50,
            1i64..20,
            -50i64..50,
            1i64..20,
            0i64..200,
            1i64..30,
        )
            .prop_map(|(a, b, c, d, qn, qd)| {
                RadicalScalar::new(CRat::new(r(a, b), r(c, d)), r(qn, qd)).unwrap()
            })
    }

    proptest! {
        #[test]
        fn normalization_is_idempotent(a in arb_radical()) {
            let again = RadicalScalar::new(a.coeff().clone(), Rat::from_integer(a.radicand().clone())).unwrap();
            prop_assert_eq!(again, a);
        }

        #[test]
        fn mul_commutes_and_associates(a in arb_radical(), b in arb_radical(), c in arb_radical()) {
            prop_assert_eq!(a.mul(&b), b.mul(&a));
            prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        }

        #[test]
        fn square_factors_distribute(a in arb_radical(), b in arb_radical(), rn in 1i64..30, rd in 1i64..30) {
            // a * sqrt(r^2 q) == (r a) * sqrt(q) for the radicand q of b
            let q = Rat::from_integer(b.radicand().clone());
            let rr = r(rn, rd);
            let lhs = a.mul(&RadicalScalar::sqrt(&(&rr * &rr * &q)).unwrap());
            let rhs = a.scale_rat(&rr).mul(&RadicalScalar::sqrt(&q).unwrap());
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn float_mul_agrees(a in arb_radical(), b in arb_radical()) {
            let (fa, fb) = (a.to_float(), b.to_float());
            prop_assume!(fa.norm() >= 1e-6 && fa.norm() <= 1e6);
            prop_assume!(fb.norm() >= 1e-6 && fb.norm() <= 1e6);
            let exact = a.mul(&b).to_float();
            let approx = fa * fb;
            prop_assert!((exact - approx).norm() <= 1e-12 * approx.norm());
        }
    }
}

//! Exact arithmetic in the degree-8 field `Q(i, √2, √3)`.
//!
//! Elements are stored over the basis `{1, √2, √3, √6} ⊗ {1, i}` as eight
//! integer numerators sharing one positive denominator. The representation is
//! normalized (`gcd(numerators, denominator) = 1`), so derived equality and
//! hashing coincide with equality of field elements.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Number of Q-coordinates of a field element.
pub const DEGREE: usize = 8;

/// Human-readable names of the basis elements, in coordinate order.
pub const BASIS_NAMES: [&str; DEGREE] = ["1", "√2", "√3", "√6", "i", "i√2", "i√3", "i√6"];

/// An exact rational number with a positive denominator in lowest terms.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QRat(BigRational);

impl QRat {
    pub fn new(numerator: BigInt, denominator: BigInt) -> Result<Self> {
        if denominator.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(QRat(BigRational::new(numerator, denominator)))
    }

    pub fn from_integer(n: i64) -> Self {
        QRat(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn numerator(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denominator(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn to_f64(&self) -> f64 {
        ratio_to_f64(self.0.numer(), self.0.denom())
    }

    pub fn as_ratio(&self) -> &BigRational {
        &self.0
    }

    pub fn into_ratio(self) -> BigRational {
        self.0
    }
}

impl From<BigRational> for QRat {
    fn from(r: BigRational) -> Self {
        QRat(r)
    }
}

impl fmt::Display for QRat {
    /// Always `p/q`, including `q = 1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

impl FromStr for QRat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let parse = |t: &str| {
            t.trim()
                .parse::<BigInt>()
                .map_err(|_| Error::Parse(format!("bad rational `{s}`")))
        };
        match s.split_once('/') {
            Some((n, d)) => QRat::new(parse(n)?, parse(d)?),
            None => Ok(QRat(BigRational::from_integer(parse(s)?))),
        }
    }
}

fn ratio_to_f64(n: &BigInt, d: &BigInt) -> f64 {
    BigRational::new_raw(n.clone(), d.clone())
        .to_f64()
        .unwrap_or(f64::NAN)
}

/// An element of `Q(i, √2, √3)`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FieldElem {
    num: [BigInt; DEGREE],
    den: BigInt,
}

/// Real subfield generators, as `√(2^a 3^b)` for basis index `a + 2b`.
const fn real_product(a: usize, b: usize) -> (i64, usize) {
    let two = if a & b & 1 != 0 { 2 } else { 1 };
    let three = if a & b & 2 != 0 { 3 } else { 1 };
    (two * three, a ^ b)
}

impl FieldElem {
    fn from_parts(num: [BigInt; DEGREE], den: BigInt) -> Self {
        let mut e = FieldElem { num, den };
        e.normalize();
        e
    }

    fn normalize(&mut self) {
        if self.den.is_negative() {
            self.den = -std::mem::take(&mut self.den);
            for n in self.num.iter_mut() {
                *n = -std::mem::take(n);
            }
        }
        if self.num.iter().all(Zero::is_zero) {
            self.den = BigInt::one();
            return;
        }
        let mut g = self.den.clone();
        for n in &self.num {
            if g.is_one() {
                return;
            }
            if !n.is_zero() {
                g = g.gcd(n);
            }
        }
        if !g.is_one() {
            for n in self.num.iter_mut() {
                *n /= &g;
            }
            self.den /= &g;
        }
    }

    pub fn zero() -> Self {
        FieldElem {
            num: Default::default(),
            den: BigInt::one(),
        }
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn from_int(n: i64) -> Self {
        Self::basis_scaled(0, BigInt::from(n), BigInt::one())
    }

    /// `p/q` as a field element.
    pub fn from_frac(p: i64, q: i64) -> Result<Self> {
        if q == 0 {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::basis_scaled(0, BigInt::from(p), BigInt::from(q)))
    }

    pub fn from_qrat(q: &QRat) -> Self {
        Self::basis_scaled(0, q.numerator().clone(), q.denominator().clone())
    }

    /// `(n/d) · e_k` for basis index `k`.
    pub fn basis_scaled(k: usize, n: BigInt, d: BigInt) -> Self {
        let mut num: [BigInt; DEGREE] = Default::default();
        num[k] = n;
        Self::from_parts(num, d)
    }

    pub fn basis(k: usize) -> Self {
        Self::basis_scaled(k, BigInt::one(), BigInt::one())
    }

    /// Builds an element from eight rational coordinates in basis order.
    pub fn from_coords(coords: &[QRat; DEGREE]) -> Self {
        let den = coords
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denominator()));
        let num = std::array::from_fn(|k| {
            let c = &coords[k];
            c.numerator() * (&den / c.denominator())
        });
        Self::from_parts(num, den)
    }

    /// Integer coordinates `[c0, …, c7]` with common denominator `d`.
    pub fn from_int_coords(c: [i64; DEGREE], d: i64) -> Result<Self> {
        if d == 0 {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::from_parts(c.map(BigInt::from), BigInt::from(d)))
    }

    pub fn sqrt2() -> Self {
        Self::basis(1)
    }

    pub fn sqrt3() -> Self {
        Self::basis(2)
    }

    pub fn sqrt6() -> Self {
        Self::basis(3)
    }

    pub fn i() -> Self {
        Self::basis(4)
    }

    /// `ζ = exp(iπ/3) = (1 + i√3)/2`, a primitive sixth root of unity.
    pub fn zeta() -> Self {
        Self::from_parts(
            [1, 0, 0, 0, 0, 0, 1, 0].map(BigInt::from),
            BigInt::from(2),
        )
    }

    /// `ω = ζ² = (-1 + i√3)/2`, a primitive cube root of unity.
    pub fn omega() -> Self {
        Self::from_parts(
            [-1, 0, 0, 0, 0, 0, 1, 0].map(BigInt::from),
            BigInt::from(2),
        )
    }

    pub fn coord(&self, k: usize) -> QRat {
        QRat(BigRational::new(self.num[k].clone(), self.den.clone()))
    }

    pub fn coords(&self) -> [QRat; DEGREE] {
        std::array::from_fn(|k| self.coord(k))
    }

    pub fn is_zero(&self) -> bool {
        self.num.iter().all(Zero::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.den.is_one() && self.num[0].is_one() && self.num[1..].iter().all(Zero::is_zero)
    }

    /// True when the four `i`-coordinates vanish.
    pub fn is_real(&self) -> bool {
        self.num[4..].iter().all(Zero::is_zero)
    }

    /// True when the element is a rational number.
    pub fn is_rational(&self) -> bool {
        self.num[1..].iter().all(Zero::is_zero)
    }

    pub fn as_rational(&self) -> Option<QRat> {
        self.is_rational().then(|| self.coord(0))
    }

    /// Complex conjugation: negates the four `i`-coordinates.
    pub fn conj(&self) -> Self {
        self.negate_where(|k| k >= 4)
    }

    /// The automorphism `√3 ↦ -√3` fixing `i` and `√2`.
    pub fn sigma3(&self) -> Self {
        self.negate_where(|k| k & 2 != 0)
    }

    /// The automorphism `√2 ↦ -√2` fixing `i` and `√3`.
    pub fn sigma2(&self) -> Self {
        self.negate_where(|k| k & 1 != 0)
    }

    fn negate_where(&self, pred: impl Fn(usize) -> bool) -> Self {
        let mut out = self.clone();
        for (k, n) in out.num.iter_mut().enumerate() {
            if pred(k) {
                *n = -std::mem::take(n);
            }
        }
        out
    }

    pub fn re(&self) -> Self {
        let mut out = self.clone();
        for n in out.num[4..].iter_mut() {
            *n = BigInt::zero();
        }
        out.normalize();
        out
    }

    pub fn im(&self) -> Self {
        let mut num: [BigInt; DEGREE] = Default::default();
        num[..4].clone_from_slice(&self.num[4..]);
        Self::from_parts(num, self.den.clone())
    }

    /// `|a|² = a · conj(a)`, a real element.
    pub fn abs2(&self) -> Self {
        self * &self.conj()
    }

    pub fn scale_int(&self, k: i64) -> Self {
        let k = BigInt::from(k);
        Self::from_parts(self.num.clone().map(|n| n * &k), self.den.clone())
    }

    pub fn scale(&self, q: &QRat) -> Self {
        Self::from_parts(
            self.num.clone().map(|n| n * q.numerator()),
            &self.den * q.denominator(),
        )
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        // Norm tower: K -> Q(√2,√3) -> Q(√2) -> Q.
        let c1 = self.conj();
        let n1 = self * &c1;
        let c2 = n1.sigma3();
        let n2 = &n1 * &c2;
        let c3 = n2.sigma2();
        let n3 = &n2 * &c3;
        let q = n3
            .as_rational()
            .expect("field norm is rational by construction");
        let adj = &(&c1 * &c2) * &c3;
        Ok(adj.scale(&QRat(q.0.recip())))
    }

    pub fn checked_div(&self, rhs: &Self) -> Result<Self> {
        Ok(self * &rhs.inv()?)
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// Exact sign of a real element under the embedding `√2, √3 > 0`.
    ///
    /// Refines dyadic enclosures of `√2, √3, √6` until zero is excluded. The
    /// exact zero test beforehand guarantees termination.
    pub fn sign_of_real(&self) -> Result<Ordering> {
        if !self.is_real() {
            return Err(Error::NotReal(self.to_string()));
        }
        if self.is_zero() {
            return Ok(Ordering::Equal);
        }
        let mut bits: u32 = 32;
        loop {
            let (lo, hi) = self.real_enclosure(bits);
            if lo.is_positive() {
                return Ok(Ordering::Greater);
            }
            if hi.is_negative() {
                return Ok(Ordering::Less);
            }
            bits *= 2;
        }
    }

    /// `[lo, hi]` scaled by `2^bits` enclosing the (denominator-free) real value.
    fn real_enclosure(&self, bits: u32) -> (BigInt, BigInt) {
        let scale = BigInt::one() << bits;
        let root = |m: u32| -> (BigInt, BigInt) {
            if m == 1 {
                return (scale.clone(), scale.clone());
            }
            let s = (BigInt::from(m) * &scale * &scale).sqrt();
            let exact = &s * &s == BigInt::from(m) * &scale * &scale;
            let hi = if exact { s.clone() } else { &s + 1 };
            (s, hi)
        };
        let mut lo = BigInt::zero();
        let mut hi = BigInt::zero();
        for (k, m) in [1u32, 2, 3, 6].into_iter().enumerate() {
            let c = &self.num[k];
            if c.is_zero() {
                continue;
            }
            let (rlo, rhi) = root(m);
            if c.is_positive() {
                lo += c * rlo;
                hi += c * rhi;
            } else {
                lo += c * rhi;
                hi += c * rlo;
            }
        }
        (lo, hi)
    }

    pub fn to_complex_float(&self) -> Complex64 {
        let d = &self.den;
        let c: [f64; DEGREE] = std::array::from_fn(|k| ratio_to_f64(&self.num[k], d));
        let s2 = std::f64::consts::SQRT_2;
        let s3 = 3f64.sqrt();
        let s6 = 6f64.sqrt();
        Complex64::new(
            c[0] + c[1] * s2 + c[2] * s3 + c[3] * s6,
            c[4] + c[5] * s2 + c[6] * s3 + c[7] * s6,
        )
    }

    /// Square root inside the field, when one exists.
    ///
    /// Works down the tower `Q ⊂ Q(√2) ⊂ Q(√2,√3) ⊂ Q(√2,√3,i)`. Returns one
    /// of the two roots; the other is its negative.
    pub fn sqrt(&self) -> Option<Self> {
        sqrt_at_level(self, 3)
    }

    /// The 8-tuple of `"p/q"` strings used by every serialized output.
    pub fn to_strings(&self) -> [String; DEGREE] {
        std::array::from_fn(|k| self.coord(k).to_string())
    }

    pub fn from_strings<S: AsRef<str>>(parts: &[S]) -> Result<Self> {
        if parts.len() != DEGREE {
            return Err(Error::Parse(format!(
                "field element needs {DEGREE} coordinates, got {}",
                parts.len()
            )));
        }
        let mut coords: [QRat; DEGREE] = std::array::from_fn(|_| QRat::from_integer(0));
        for (c, p) in coords.iter_mut().zip(parts) {
            *c = p.as_ref().parse()?;
        }
        Ok(Self::from_coords(&coords))
    }

    /// Compact canonical text: the eight `p/q` strings joined by `,`.
    pub fn canonical_string(&self) -> String {
        self.to_strings().join(",")
    }
}

/// Generators of the tower, outermost last: `(basis index, square)`.
const TOWER: [(usize, i64); 3] = [(1, 2), (2, 3), (4, -1)];

/// Mask of coordinates that live in the subfield below `level`.
fn level_mask(level: usize) -> usize {
    match level {
        0 => 1,
        1 => 2,
        2 => 4,
        _ => 8,
    }
}

fn split(a: &FieldElem, level: usize) -> (FieldElem, FieldElem) {
    let (g, _) = TOWER[level - 1];
    let mut x: [BigInt; DEGREE] = Default::default();
    let mut y: [BigInt; DEGREE] = Default::default();
    for k in 0..level_mask(level) {
        // e_j · e_g = e_{j|g} with coefficient 1 whenever j & g = 0.
        if k & g == 0 {
            x[k] = a.num[k].clone();
        } else {
            y[k ^ g] = a.num[k].clone();
        }
    }
    (
        FieldElem::from_parts(x, a.den.clone()),
        FieldElem::from_parts(y, a.den.clone()),
    )
}

fn sqrt_at_level(a: &FieldElem, level: usize) -> Option<FieldElem> {
    if a.is_zero() {
        return Some(FieldElem::zero());
    }
    if level == 0 {
        let q = a.as_rational()?;
        if q.numerator().is_negative() {
            return None;
        }
        let n = q.numerator().sqrt();
        let d = q.denominator().sqrt();
        return (&n * &n == *q.numerator() && &d * &d == *q.denominator())
            .then(|| FieldElem::basis_scaled(0, n, d));
    }
    let (gk, d) = TOWER[level - 1];
    let gen = FieldElem::basis(gk);
    let (x, y) = split(a, level);
    if y.is_zero() {
        if let Some(u) = sqrt_at_level(&x, level - 1) {
            return Some(u);
        }
        let xd = x.scale(&QRat(BigRational::new(BigInt::one(), BigInt::from(d))));
        return sqrt_at_level(&xd, level - 1).map(|v| &v * &gen);
    }
    let norm = &(&x * &x) - &(&y * &y).scale_int(d);
    let s = sqrt_at_level(&norm, level - 1)?;
    let half = QRat(BigRational::new(BigInt::one(), BigInt::from(2)));
    for s in [s.clone(), -&s] {
        let u2 = (&x + &s).scale(&half);
        if let Some(u) = sqrt_at_level(&u2, level - 1) {
            if u.is_zero() {
                continue;
            }
            let v = y.checked_div(&u.scale_int(2)).ok()?;
            let cand = &u + &(&v * &gen);
            if &cand * &cand == *a {
                return Some(cand);
            }
        }
    }
    None
}

impl Default for FieldElem {
    fn default() -> Self {
        Self::zero()
    }
}

impl fmt::Debug for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FieldElem({self})")
    }
}

impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for k in 0..DEGREE {
            let n = &self.num[k];
            if n.is_zero() {
                continue;
            }
            let sign = if n.sign() == Sign::Minus { "-" } else { "+" };
            if first {
                if sign == "-" {
                    f.write_str("-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let mag = n.abs();
            let q = BigRational::new(mag, self.den.clone());
            let unit = k == 0;
            if q.is_one() && !unit {
                f.write_str(BASIS_NAMES[k])?;
            } else if unit {
                write!(f, "{q}")?;
            } else {
                write!(f, "{q}·{}", BASIS_NAMES[k])?;
            }
        }
        Ok(())
    }
}

impl Serialize for FieldElem {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_strings().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for FieldElem {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let parts = Vec::<String>::deserialize(deserializer)?;
        FieldElem::from_strings(&parts).map_err(D::Error::custom)
    }
}

impl Add for &FieldElem {
    type Output = FieldElem;

    fn add(self, rhs: &FieldElem) -> FieldElem {
        if self.den == rhs.den {
            let num = std::array::from_fn(|k| &self.num[k] + &rhs.num[k]);
            return FieldElem::from_parts(num, self.den.clone());
        }
        let num = std::array::from_fn(|k| &self.num[k] * &rhs.den + &rhs.num[k] * &self.den);
        FieldElem::from_parts(num, &self.den * &rhs.den)
    }
}

impl Sub for &FieldElem {
    type Output = FieldElem;

    fn sub(self, rhs: &FieldElem) -> FieldElem {
        if self.den == rhs.den {
            let num = std::array::from_fn(|k| &self.num[k] - &rhs.num[k]);
            return FieldElem::from_parts(num, self.den.clone());
        }
        let num = std::array::from_fn(|k| &self.num[k] * &rhs.den - &rhs.num[k] * &self.den);
        FieldElem::from_parts(num, &self.den * &rhs.den)
    }
}

impl Mul for &FieldElem {
    type Output = FieldElem;

    fn mul(self, rhs: &FieldElem) -> FieldElem {
        let mut acc: [BigInt; DEGREE] = Default::default();
        for (ka, a) in self.num.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (kb, b) in rhs.num.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                let (c, r) = real_product(ka & 3, kb & 3);
                let imag = (ka >> 2) ^ (kb >> 2);
                let neg = (ka >> 2) & (kb >> 2) == 1;
                let prod = a * b;
                let term = if c == 1 { prod } else { prod * c };
                let slot = &mut acc[r + 4 * imag];
                if neg {
                    *slot -= term;
                } else {
                    *slot += term;
                }
            }
        }
        FieldElem::from_parts(acc, &self.den * &rhs.den)
    }
}

impl Neg for &FieldElem {
    type Output = FieldElem;

    fn neg(self) -> FieldElem {
        FieldElem {
            num: self.num.clone().map(|n| -n),
            den: self.den.clone(),
        }
    }
}

macro_rules! forward_owned {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr for FieldElem {
            type Output = FieldElem;
            fn $m(self, rhs: FieldElem) -> FieldElem { (&self).$m(&rhs) }
        }
        impl $tr<&FieldElem> for FieldElem {
            type Output = FieldElem;
            fn $m(self, rhs: &FieldElem) -> FieldElem { (&self).$m(rhs) }
        }
    )*};
}
forward_owned!(Add add, Sub sub, Mul mul);

impl Neg for FieldElem {
    type Output = FieldElem;

    fn neg(self) -> FieldElem {
        -&self
    }
}

impl From<i64> for FieldElem {
    fn from(n: i64) -> Self {
        FieldElem::from_int(n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn elem(c: [i64; 8], d: i64) -> FieldElem {
        FieldElem::from_int_coords(c, d).unwrap()
    }

    #[test]
    fn basis_products() {
        assert_eq!(&FieldElem::sqrt2() * &FieldElem::sqrt3(), FieldElem::sqrt6());
        assert_eq!(&FieldElem::sqrt6() * &FieldElem::sqrt6(), FieldElem::from_int(6));
        assert_eq!(&FieldElem::sqrt3() * &FieldElem::sqrt6(), FieldElem::sqrt2().scale_int(3));
        assert_eq!(&FieldElem::i() * &FieldElem::i(), FieldElem::from_int(-1));
        let i_s6 = FieldElem::basis(7);
        assert_eq!(&i_s6 * &i_s6, FieldElem::from_int(-6));
    }

    #[test]
    fn zeta_has_unit_modulus() {
        let z = FieldElem::zeta();
        assert!(z.abs2().is_one());
        assert_eq!(z.conj(), elem([1, 0, 0, 0, 0, 0, -1, 0], 2));
        assert_eq!(z.pow(6), FieldElem::one());
        assert_eq!(z.pow(2), FieldElem::omega());
    }

    #[test]
    fn division_by_conjugate() {
        // (3 + 6i√3)^{-1} · (-16) = (-16 + 32 i√3)/39
        let b = elem([3, 0, 0, 0, 0, 0, 6, 0], 1);
        let got = FieldElem::from_int(-16).checked_div(&b).unwrap();
        assert_eq!(got, elem([-16, 0, 0, 0, 0, 0, 32, 0], 39));
    }

    #[test]
    fn division_by_zero_is_an_error() {
        assert!(matches!(FieldElem::one().checked_div(&FieldElem::zero()), Err(Error::DivisionByZero)));
        assert!(FieldElem::zero().inv().is_err());
    }

    #[test]
    fn conj_fixes_reals() {
        assert_eq!(FieldElem::sqrt6().conj(), FieldElem::sqrt6());
    }

    #[test]
    fn sign_examples() {
        assert_eq!(FieldElem::zero().sign_of_real().unwrap(), Ordering::Equal);
        let a = elem([3, -2, 0, 0, 0, 0, 0, 0], 1);
        assert_eq!(a.sign_of_real().unwrap(), Ordering::Greater);
        assert_eq!(FieldElem::from_int(-8).sign_of_real().unwrap(), Ordering::Less);
        assert!(FieldElem::i().sign_of_real().is_err());
        // 5√2 + 7 - 2√3 - 5√6 ≈ -0.56
        let b = elem([7, 5, -2, -5, 0, 0, 0, 0], 1);
        assert_eq!(b.sign_of_real().unwrap(), Ordering::Less);
    }

    #[test]
    fn sign_of_tiny_values() {
        // (√2 - 1)^20 is positive and about 2e-8.
        let a = elem([-1, 1, 0, 0, 0, 0, 0, 0], 1).pow(20);
        assert_eq!(a.sign_of_real().unwrap(), Ordering::Greater);
        assert_eq!((-a).sign_of_real().unwrap(), Ordering::Less);
    }

    #[test]
    fn floats() {
        let z = FieldElem::zeta().to_complex_float();
        assert!((z.re - 0.5).abs() < 1e-15 && (z.im - 0.866_025_403_784_438_6).abs() < 1e-15);
        assert!((FieldElem::sqrt6().to_complex_float().re - 2.449_489_742_783_178).abs() < 1e-15);
        assert_eq!(FieldElem::from_int(-16).to_complex_float().re, -16.0);
    }

    #[test]
    fn sqrt_in_tower() {
        for c in [
            elem([2, 0, 0, 0, 0, 0, 0, 0], 1),
            elem([-3, 0, 0, 0, 0, 0, 0, 0], 4),
            elem([0, 0, 0, 0, 1, 0, 0, 0], 1),
            elem([3, 2, 0, 0, 0, 0, 0, 0], 1),
            elem([5, 0, 0, 2, 0, 0, 0, 0], 1),
            FieldElem::zeta(),
            elem([1, 0, 0, 0, 0, 0, 0, 0], 2),
        ] {
            let s = c.sqrt().unwrap_or_else(|| panic!("no root of {c}"));
            assert_eq!(&s * &s, c);
        }
        // Squares of arbitrary elements always have roots.
        let a = elem([1, -2, 3, 1, 4, 0, -1, 2], 7);
        let sq = &a * &a;
        let s = sq.sqrt().unwrap();
        assert!(s == a || s == -&a);
        assert!(FieldElem::basis(0).scale_int(5).sqrt().is_none());
    }

    #[test]
    fn strings_round_trip() {
        let a = elem([1, -2, 3, 0, 4, 0, -1, 2], 7);
        let s = a.to_strings();
        assert_eq!(s[0], "1/7");
        assert_eq!(s[3], "0/1");
        assert_eq!(FieldElem::from_strings(&s).unwrap(), a);
        let json = serde_json::to_string(&a).unwrap();
        assert_eq!(serde_json::from_str::<FieldElem>(&json).unwrap(), a);
    }

    fn arb_elem() -> impl Strategy<Value = FieldElem> {
        (prop::array::uniform8(-20i64..20), 1i64..12)
            .prop_map(|(c, d)| FieldElem::from_int_coords(c, d).unwrap())
    }

    proptest! {
        #[test]
        fn ring_axioms(a in arb_elem(), b in arb_elem(), c in arb_elem()) {
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&(&a + &b) - &b, a.clone());
        }

        #[test]
        fn conj_is_an_involutive_automorphism(a in arb_elem(), b in arb_elem()) {
            prop_assert_eq!((&a * &b).conj(), &a.conj() * &b.conj());
            prop_assert_eq!(a.conj().conj(), a.clone());
            prop_assert_eq!((&a * &b).sigma3(), &a.sigma3() * &b.sigma3());
            prop_assert_eq!((&a * &b).sigma2(), &a.sigma2() * &b.sigma2());
        }

        #[test]
        fn inverse(a in arb_elem()) {
            prop_assume!(!a.is_zero());
            prop_assert!((&a * &a.inv().unwrap()).is_one());
        }

        #[test]
        fn sign_matches_float(a in arb_elem()) {
            let r = a.re();
            let f = r.to_complex_float().re;
            prop_assume!(f.abs() > 1e-6);
            let expect = if f > 0.0 { Ordering::Greater } else { Ordering::Less };
            prop_assert_eq!(r.sign_of_real().unwrap(), expect);
        }
    }
}

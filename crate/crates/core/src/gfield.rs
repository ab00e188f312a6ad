//! Exact scalar arithmetic: prime fields, a frozen table of small extension
//! fields, and arbitrary-precision rationals.
//!
//! Finite field elements are plain `u32` integers encoding polynomial-basis
//! coefficients base `p` (`c0 + c1*p + c2*p^2 + ...`). Fields of order at most
//! 256 use precomputed addition/multiplication tables.

use std::fmt;
use std::hash::Hash;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FieldError {
    #[error("characteristic {0} is not prime")]
    NonPrime(u64),
    #[error("no modulus registered for GF({p}^{k})")]
    Unsupported { p: u64, k: u32 },
    #[error("the rationals have degree 1, got degree {0}")]
    RationalDegree(u32),
    #[error("degree must be at least 1")]
    ZeroDegree,
    #[error("modulus {0:?} is reducible")]
    Reducible(Vec<u64>),
    #[error("operation requires a finite field")]
    NotFinite,
    #[error("GF(2) has no non-trivial unit")]
    TooSmall,
    #[error("malformed field element {0}")]
    BadElement(String),
    #[error("field descriptor mismatch: expected {expected}, got {got}")]
    DescriptorMismatch { expected: String, got: String },
    #[error("bad field spec {0:?} (expected a prime power \"q\" or \"p^k\")")]
    BadSpec(String),
}

/// JSON description of a field: `{"char": p, "degree": k, "modulus": [c0,...,ck]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldDescriptor {
    pub char: u64,
    pub degree: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modulus: Option<Vec<u64>>,
}

impl fmt::Display for FieldDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.char, self.degree) {
            (0, _) => write!(f, "Q"),
            (p, 1) => write!(f, "GF({p})"),
            (p, k) => write!(f, "GF({p}^{k})"),
        }
    }
}

/// A field context. Elements are bare values interpreted relative to the
/// context; every operation goes through it.
pub trait Field: Clone + fmt::Debug + PartialEq + Send + Sync + 'static {
    type Elem: Clone + fmt::Debug + PartialEq + Eq + Hash + Ord + Send + Sync;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem>;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    /// Image of an integer under the canonical ring map `Z -> F`.
    fn from_int(&self, k: i64) -> Self::Elem;
    /// 0 for the rationals.
    fn characteristic(&self) -> u64;
    /// `None` for the rationals.
    fn order(&self) -> Option<u64>;
    fn descriptor(&self) -> FieldDescriptor;
    fn elem_to_json(&self, a: &Self::Elem) -> Value;
    fn elem_from_json(&self, v: &Value) -> Result<Self::Elem, FieldError>;
    fn random_elem<R: Rng + ?Sized>(&self, rng: &mut R) -> Self::Elem;

    fn enumerate(&self) -> Result<Vec<Self::Elem>, FieldError> {
        Err(FieldError::NotFinite)
    }

    fn frobenius(&self, _a: &Self::Elem) -> Result<Self::Elem, FieldError> {
        Err(FieldError::NotFinite)
    }

    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.add(a, &self.neg(b))
    }

    fn div(&self, a: &Self::Elem, b: &Self::Elem) -> Option<Self::Elem> {
        self.inv(b).map(|bi| self.mul(a, &bi))
    }

    fn is_one(&self, a: &Self::Elem) -> bool {
        *a == self.one()
    }

    fn pow(&self, a: &Self::Elem, mut e: u64) -> Self::Elem {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    /// `dst -= factor * src`, elementwise.
    fn sub_scaled(&self, dst: &mut [Self::Elem], src: &[Self::Elem], factor: &Self::Elem) {
        for (d, s) in dst.iter_mut().zip(src) {
            if !self.is_zero(s) {
                *d = self.sub(d, &self.mul(factor, s));
            }
        }
    }

    fn scale(&self, row: &mut [Self::Elem], factor: &Self::Elem) {
        for x in row.iter_mut() {
            *x = self.mul(x, factor);
        }
    }

    fn is_finite(&self) -> bool {
        self.order().is_some()
    }
}

/// Fixed moduli for the supported extension fields, low coefficient first.
fn registered_modulus(p: u64, k: u32) -> Option<Vec<u64>> {
    match (p, k) {
        (2, 2) => Some(vec![1, 1, 1]),
        (2, 3) => Some(vec![1, 1, 0, 1]),
        (3, 2) => Some(vec![1, 0, 1]),
        (5, 2) => Some(vec![1, 1, 1]),
        _ => None,
    }
}

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Remainder of `a` modulo the monic polynomial `m` over GF(p).
fn poly_rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let mut r = a.to_vec();
    let dm = m.len() - 1;
    while r.len() > dm {
        let lead = r.pop().unwrap() % p;
        if lead != 0 {
            let shift = r.len() - dm;
            for (i, &c) in m[..dm].iter().enumerate() {
                let idx = shift + i;
                r[idx] = (r[idx] + p - (lead * c) % p) % p;
            }
        }
    }
    r
}

/// Trial division by every monic polynomial of degree 1..=deg/2.
fn is_irreducible(m: &[u64], p: u64) -> bool {
    let deg = m.len() - 1;
    for d in 1..=deg / 2 {
        let count = p.pow(d as u32);
        for low in 0..count {
            let mut f = Vec::with_capacity(d + 1);
            let mut x = low;
            for _ in 0..d {
                f.push(x % p);
                x /= p;
            }
            f.push(1);
            if poly_rem(m, &f, p).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

#[derive(Debug)]
struct Tables {
    add: Vec<u32>,
    mul: Vec<u32>,
    neg: Vec<u32>,
    inv: Vec<u32>,
}

/// GF(p^k). Cheap to clone.
#[derive(Clone)]
pub struct GaloisField {
    p: u32,
    k: u32,
    q: u32,
    modulus: Arc<Vec<u64>>,
    tables: Option<Arc<Tables>>,
}

impl fmt::Debug for GaloisField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.descriptor())
    }
}

impl PartialEq for GaloisField {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.k == other.k && self.modulus == other.modulus
    }
}

impl Eq for GaloisField {}

const TABLE_LIMIT: u32 = 256;

impl GaloisField {
    pub fn new(p: u64, k: u32) -> Result<Self, FieldError> {
        if k == 0 {
            return Err(FieldError::ZeroDegree);
        }
        if !is_prime(p) {
            return Err(FieldError::NonPrime(p));
        }
        let modulus = if k == 1 {
            vec![0, 1]
        } else {
            registered_modulus(p, k).ok_or(FieldError::Unsupported { p, k })?
        };
        Self::with_modulus(p, modulus)
    }

    /// Builds GF(p^k) from an explicit monic modulus of degree k.
    pub fn with_modulus(p: u64, modulus: Vec<u64>) -> Result<Self, FieldError> {
        if !is_prime(p) {
            return Err(FieldError::NonPrime(p));
        }
        let k = (modulus.len() - 1) as u32;
        if k == 0 || *modulus.last().unwrap() != 1 {
            return Err(FieldError::Reducible(modulus));
        }
        if k > 1 && !is_irreducible(&modulus, p) {
            return Err(FieldError::Reducible(modulus));
        }
        let q64 = p.pow(k);
        if q64 > u32::MAX as u64 / 2 {
            return Err(FieldError::Unsupported { p, k });
        }
        if k > 1 && q64 > TABLE_LIMIT as u64 {
            return Err(FieldError::Unsupported { p, k });
        }
        let mut f = GaloisField {
            p: p as u32,
            k,
            q: q64 as u32,
            modulus: Arc::new(modulus),
            tables: None,
        };
        if f.q <= TABLE_LIMIT {
            f.tables = Some(Arc::new(f.build_tables()));
        }
        Ok(f)
    }

    pub fn prime(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.k
    }

    pub fn size(&self) -> u32 {
        self.q
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    fn digits(&self, a: u32) -> Vec<u64> {
        let mut out = Vec::with_capacity(self.k as usize);
        let mut x = a;
        for _ in 0..self.k {
            out.push((x % self.p) as u64);
            x /= self.p;
        }
        out
    }

    fn undigits(&self, d: &[u64]) -> u32 {
        d.iter()
            .rev()
            .fold(0u64, |acc, &c| acc * self.p as u64 + c) as u32
    }

    fn raw_add(&self, a: u32, b: u32) -> u32 {
        if self.k == 1 {
            return ((a as u64 + b as u64) % self.p as u64) as u32;
        }
        let (da, db) = (self.digits(a), self.digits(b));
        let s: Vec<u64> = da
            .iter()
            .zip(&db)
            .map(|(x, y)| (x + y) % self.p as u64)
            .collect();
        self.undigits(&s)
    }

    fn raw_mul(&self, a: u32, b: u32) -> u32 {
        if self.k == 1 {
            return ((a as u64 * b as u64) % self.p as u64) as u32;
        }
        let p = self.p as u64;
        let (da, db) = (self.digits(a), self.digits(b));
        let mut prod = vec![0u64; da.len() + db.len() - 1];
        for (i, x) in da.iter().enumerate() {
            for (j, y) in db.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x * y) % p;
            }
        }
        let mut r = poly_rem(&prod, &self.modulus, p);
        r.resize(self.k as usize, 0);
        self.undigits(&r)
    }

    fn raw_neg(&self, a: u32) -> u32 {
        if self.k == 1 {
            return if a == 0 { 0 } else { self.p - a };
        }
        let d: Vec<u64> = self
            .digits(a)
            .iter()
            .map(|&c| (self.p as u64 - c) % self.p as u64)
            .collect();
        self.undigits(&d)
    }

    fn raw_pow(&self, a: u32, mut e: u64) -> u32 {
        let mut base = a;
        let mut acc = 1;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.raw_mul(acc, base);
            }
            base = self.raw_mul(base, base);
            e >>= 1;
        }
        acc
    }

    fn build_tables(&self) -> Tables {
        let q = self.q as usize;
        let mut add = vec![0; q * q];
        let mut mul = vec![0; q * q];
        let mut neg = vec![0; q];
        let mut inv = vec![0; q];
        for a in 0..q {
            neg[a] = self.raw_neg(a as u32);
            for b in 0..q {
                add[a * q + b] = self.raw_add(a as u32, b as u32);
                mul[a * q + b] = self.raw_mul(a as u32, b as u32);
            }
        }
        for a in 1..q {
            inv[a] = (1..q).find(|&b| mul[a * q + b] == 1).unwrap() as u32;
        }
        Tables { add, mul, neg, inv }
    }

    /// Multiplicative order of a nonzero element.
    pub fn multiplicative_order(&self, a: u32) -> Option<u64> {
        if a == 0 {
            return None;
        }
        let n = self.q as u64 - 1;
        let mut best = n;
        for d in divisors(n) {
            if self.pow(&a, d) == 1 {
                best = best.min(d);
            }
        }
        Some(best)
    }

    /// Least element (in repr order) generating the multiplicative group.
    pub fn primitive_element(&self) -> Result<u32, FieldError> {
        if self.q < 3 {
            return Err(FieldError::TooSmall);
        }
        let n = self.q as u64 - 1;
        (1..self.q)
            .find(|&a| self.multiplicative_order(a) == Some(n))
            .ok_or(FieldError::TooSmall)
    }
}

fn divisors(n: u64) -> Vec<u64> {
    let mut v: Vec<u64> = (1..=n).filter(|d| n.is_multiple_of(*d)).collect();
    v.sort_unstable();
    v
}

impl Field for GaloisField {
    type Elem = u32;

    #[inline]
    fn zero(&self) -> u32 {
        0
    }

    #[inline]
    fn one(&self) -> u32 {
        1
    }

    #[inline]
    fn add(&self, a: &u32, b: &u32) -> u32 {
        match &self.tables {
            Some(t) => t.add[(*a * self.q + *b) as usize],
            None => self.raw_add(*a, *b),
        }
    }

    #[inline]
    fn neg(&self, a: &u32) -> u32 {
        match &self.tables {
            Some(t) => t.neg[*a as usize],
            None => self.raw_neg(*a),
        }
    }

    #[inline]
    fn sub(&self, a: &u32, b: &u32) -> u32 {
        self.add(a, &self.neg(b))
    }

    #[inline]
    fn mul(&self, a: &u32, b: &u32) -> u32 {
        match &self.tables {
            Some(t) => t.mul[(*a * self.q + *b) as usize],
            None => self.raw_mul(*a, *b),
        }
    }

    fn inv(&self, a: &u32) -> Option<u32> {
        if *a == 0 {
            return None;
        }
        Some(match &self.tables {
            Some(t) => t.inv[*a as usize],
            None => self.raw_pow(*a, self.q as u64 - 2),
        })
    }

    #[inline]
    fn is_zero(&self, a: &u32) -> bool {
        *a == 0
    }

    fn from_int(&self, k: i64) -> u32 {
        k.rem_euclid(self.p as i64) as u32
    }

    fn characteristic(&self) -> u64 {
        self.p as u64
    }

    fn order(&self) -> Option<u64> {
        Some(self.q as u64)
    }

    fn descriptor(&self) -> FieldDescriptor {
        FieldDescriptor {
            char: self.p as u64,
            degree: self.k,
            modulus: (self.k > 1).then(|| self.modulus.to_vec()),
        }
    }

    fn elem_to_json(&self, a: &u32) -> Value {
        Value::from(*a)
    }

    fn elem_from_json(&self, v: &Value) -> Result<u32, FieldError> {
        match v.as_u64() {
            Some(x) if x < self.q as u64 => Ok(x as u32),
            _ => Err(FieldError::BadElement(v.to_string())),
        }
    }

    fn random_elem<R: Rng + ?Sized>(&self, rng: &mut R) -> u32 {
        rng.gen_range(0..self.q)
    }

    fn enumerate(&self) -> Result<Vec<u32>, FieldError> {
        Ok((0..self.q).collect())
    }

    fn frobenius(&self, a: &u32) -> Result<u32, FieldError> {
        Ok(self.pow(a, self.p as u64))
    }

    fn sub_scaled(&self, dst: &mut [u32], src: &[u32], factor: &u32) {
        if *factor == 0 {
            return;
        }
        match &self.tables {
            Some(t) => {
                let q = self.q;
                let nf = t.neg[*factor as usize] * q;
                for (d, s) in dst.iter_mut().zip(src) {
                    if *s != 0 {
                        let m = t.mul[(nf + *s) as usize];
                        *d = t.add[(*d * q + m) as usize];
                    }
                }
            }
            None => {
                let p = self.p as u64;
                let nf = (p - *factor as u64) % p;
                for (d, s) in dst.iter_mut().zip(src) {
                    *d = ((*d as u64 + nf * *s as u64) % p) as u32;
                }
            }
        }
    }
}

/// The field of rational numbers, elements kept in lowest terms.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Rationals;

impl Field for Rationals {
    type Elem = BigRational;

    fn zero(&self) -> BigRational {
        BigRational::zero()
    }

    fn one(&self) -> BigRational {
        BigRational::one()
    }

    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }

    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }

    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }

    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }

    fn inv(&self, a: &BigRational) -> Option<BigRational> {
        (!a.is_zero()).then(|| a.recip())
    }

    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }

    fn from_int(&self, k: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(k))
    }

    fn characteristic(&self) -> u64 {
        0
    }

    fn order(&self) -> Option<u64> {
        None
    }

    fn descriptor(&self) -> FieldDescriptor {
        FieldDescriptor {
            char: 0,
            degree: 1,
            modulus: None,
        }
    }

    fn elem_to_json(&self, a: &BigRational) -> Value {
        Value::from(format!("{}/{}", a.numer(), a.denom()))
    }

    fn elem_from_json(&self, v: &Value) -> Result<BigRational, FieldError> {
        let bad = || FieldError::BadElement(v.to_string());
        if let Some(i) = v.as_i64() {
            return Ok(self.from_int(i));
        }
        let s = v.as_str().ok_or_else(bad)?;
        let (num, den) = match s.split_once('/') {
            Some((n, d)) => (n, d),
            None => (s, "1"),
        };
        let num: BigInt = num.trim().parse().map_err(|_| bad())?;
        let den: BigInt = den.trim().parse().map_err(|_| bad())?;
        if den.is_zero() {
            return Err(bad());
        }
        Ok(BigRational::new(num, den))
    }

    fn random_elem<R: Rng + ?Sized>(&self, rng: &mut R) -> BigRational {
        let num: i64 = rng.gen_range(-9..=9);
        let den: i64 = rng.gen_range(1..=4);
        BigRational::new(num.into(), den.into())
    }
}

/// Runtime-selected field, as produced by [`make_field`].
#[derive(Clone, Debug, PartialEq)]
pub enum FieldCtx {
    Finite(GaloisField),
    Rational(Rationals),
}

/// `char = 0, degree = 1` gives the rationals; otherwise GF(char^degree).
pub fn make_field(char: u64, degree: u32) -> Result<FieldCtx, FieldError> {
    if char == 0 {
        return if degree == 1 {
            Ok(FieldCtx::Rational(Rationals))
        } else {
            Err(FieldError::RationalDegree(degree))
        };
    }
    GaloisField::new(char, degree).map(FieldCtx::Finite)
}

impl FieldCtx {
    pub fn descriptor(&self) -> FieldDescriptor {
        match self {
            FieldCtx::Finite(f) => f.descriptor(),
            FieldCtx::Rational(f) => f.descriptor(),
        }
    }

    pub fn finite(&self) -> Option<&GaloisField> {
        match self {
            FieldCtx::Finite(f) => Some(f),
            FieldCtx::Rational(_) => None,
        }
    }
}

/// Parses `"p^k"` or a prime-power order `"q"`, optionally prefixed by `F` or `GF`.
pub fn parse_field_spec(spec: &str) -> Result<GaloisField, FieldError> {
    let bad = || FieldError::BadSpec(spec.to_string());
    let s = spec.trim();
    let s = s.strip_prefix("GF").or_else(|| s.strip_prefix('F')).unwrap_or(s);
    let s = s.trim_start_matches('(').trim_end_matches(')');
    let (p, k) = match s.split_once('^') {
        Some((p, k)) => (
            p.trim().parse::<u64>().map_err(|_| bad())?,
            k.trim().parse::<u32>().map_err(|_| bad())?,
        ),
        None => {
            let q = s.parse::<u64>().map_err(|_| bad())?;
            let p = (2..=q).find(|d| q % d == 0).ok_or_else(bad)?;
            let (mut r, mut k) = (q, 0u32);
            while r % p == 0 {
                r /= p;
                k += 1;
            }
            if r != 1 {
                return Err(bad());
            }
            (p, k)
        }
    };
    GaloisField::new(p, k)
}

/// Builds the field described by a JSON descriptor, checking the modulus.
pub fn field_from_descriptor(d: &FieldDescriptor) -> Result<GaloisField, FieldError> {
    let f = GaloisField::new(d.char, d.degree)?;
    if let Some(m) = &d.modulus {
        if m.as_slice() != f.modulus() && !(d.degree == 1 && m == &[0, 1]) {
            return Err(FieldError::DescriptorMismatch {
                expected: format!("{:?}", f.modulus()),
                got: format!("{m:?}"),
            });
        }
    }
    Ok(f)
}

/// Signed small-integer rendering used in human-readable output.
pub fn rational_to_i64(a: &BigRational) -> Option<i64> {
    if a.denom().is_one() {
        a.numer().to_i64()
    } else {
        None
    }
}

/// `true` when `d` divides `m` in Z, treating `d = 0` as dividing only 0.
pub fn char_divides(char: u64, m: i64) -> bool {
    if char == 0 {
        m == 0
    } else {
        m.rem_euclid(char as i64) == 0
    }
}

#[allow(dead_code)]
fn gcd(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

#[allow(dead_code)]
fn abs_big(a: &BigInt) -> BigInt {
    a.abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_fields() -> Vec<GaloisField> {
        [(2, 1), (3, 1), (2, 2), (5, 1), (7, 1), (2, 3), (3, 2)]
            .iter()
            .map(|&(p, k)| GaloisField::new(p, k).unwrap())
            .collect()
    }

    #[test]
    fn make_field_table() {
        let f3 = make_field(3, 1).unwrap();
        assert_eq!(f3.finite().unwrap().order(), Some(3));
        let f4 = GaloisField::new(2, 2).unwrap();
        assert_eq!(f4.modulus(), &[1, 1, 1]);
        // x^2+x+1 has no root in GF(2)
        assert!((0..2u64).all(|x| (x * x + x + 1) % 2 != 0));
        assert_eq!(make_field(4, 1), Err(FieldError::NonPrime(4)));
        assert!(matches!(
            make_field(7, 2),
            Err(FieldError::Unsupported { p: 7, k: 2 })
        ));
        assert!(matches!(make_field(0, 1), Ok(FieldCtx::Rational(_))));
        assert_eq!(make_field(0, 2), Err(FieldError::RationalDegree(2)));
        for (p, k) in [(2, 2), (2, 3), (3, 2), (5, 2)] {
            let f = GaloisField::new(p, k).unwrap();
            assert!(is_irreducible(f.modulus(), p));
        }
        assert!(!is_irreducible(&[1, 0, 1], 2));
    }

    #[test]
    fn primitive_elements() {
        assert_eq!(GaloisField::new(3, 1).unwrap().primitive_element(), Ok(2));
        assert_eq!(GaloisField::new(2, 2).unwrap().primitive_element(), Ok(2));
        // x+1 under x^2+1 over GF(3): repr 1 + 3 = 4
        let f9 = GaloisField::new(3, 2).unwrap();
        assert_eq!(f9.multiplicative_order(3), Some(4));
        assert_eq!(f9.primitive_element(), Ok(4));
        assert_eq!(
            GaloisField::new(2, 1).unwrap().primitive_element(),
            Err(FieldError::TooSmall)
        );
        for f in small_fields().into_iter().filter(|f| f.size() > 2) {
            let z = f.primitive_element().unwrap();
            let m = f.size() as u64 - 1;
            assert_eq!(f.pow(&z, m), 1);
            for d in divisors(m).into_iter().filter(|&d| d < m) {
                assert_ne!(f.pow(&z, d), 1);
            }
        }
    }

    #[test]
    fn enumeration_order() {
        assert_eq!(GaloisField::new(3, 1).unwrap().enumerate().unwrap(), vec![0, 1, 2]);
        assert_eq!(GaloisField::new(2, 2).unwrap().enumerate().unwrap(), vec![0, 1, 2, 3]);
        assert_eq!(GaloisField::new(3, 2).unwrap().enumerate().unwrap().len(), 9);
        assert_eq!(Rationals.enumerate(), Err(FieldError::NotFinite));
    }

    #[test]
    fn frobenius_values() {
        let f4 = GaloisField::new(2, 2).unwrap();
        assert_eq!(f4.frobenius(&2), Ok(3));
        let f9 = GaloisField::new(3, 2).unwrap();
        // x -> -x = 2x, repr 6
        assert_eq!(f9.frobenius(&3), Ok(6));
        let f7 = GaloisField::new(7, 1).unwrap();
        for a in 0..7 {
            assert_eq!(f7.frobenius(&a), Ok(a));
        }
        assert_eq!(Rationals.frobenius(&Rationals.one()), Err(FieldError::NotFinite));
    }

    #[test]
    fn frobenius_is_automorphism() {
        for f in small_fields() {
            let els = f.enumerate().unwrap();
            for a in &els {
                let mut x = *a;
                for _ in 0..f.degree() {
                    x = f.frobenius(&x).unwrap();
                }
                assert_eq!(x, *a);
                for b in &els {
                    let fa = f.frobenius(a).unwrap();
                    let fb = f.frobenius(b).unwrap();
                    assert_eq!(f.frobenius(&f.add(a, b)).unwrap(), f.add(&fa, &fb));
                    assert_eq!(f.frobenius(&f.mul(a, b)).unwrap(), f.mul(&fa, &fb));
                }
            }
        }
    }

    #[test]
    fn field_axioms_exhaustive() {
        for f in small_fields() {
            let els = f.enumerate().unwrap();
            for a in &els {
                assert_eq!(f.add(a, &f.neg(a)), 0);
                if *a != 0 {
                    assert_eq!(f.mul(a, &f.inv(a).unwrap()), 1);
                }
                for b in &els {
                    assert_eq!(f.add(a, b), f.add(b, a));
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                    for c in &els {
                        assert_eq!(f.add(&f.add(a, b), c), f.add(a, &f.add(b, c)));
                        assert_eq!(f.mul(&f.mul(a, b), c), f.mul(a, &f.mul(b, c)));
                        assert_eq!(
                            f.mul(a, &f.add(b, c)),
                            f.add(&f.mul(a, b), &f.mul(a, c))
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn large_prime_without_tables() {
        let f = GaloisField::new(257, 1).unwrap();
        assert!(f.tables.is_none());
        let a = 200u32;
        assert_eq!(f.mul(&a, &f.inv(&a).unwrap()), 1);
        let mut row = vec![5u32, 7, 0];
        f.sub_scaled(&mut row, &[1, 1, 1], &5);
        assert_eq!(row, vec![0, 2, 252]);
    }

    #[test]
    fn rationals_json_and_lowest_terms() {
        let q = Rationals;
        let a = q.elem_from_json(&Value::from("6/-4")).unwrap();
        assert_eq!(q.elem_to_json(&a), Value::from("-3/2"));
        assert!(q.elem_from_json(&Value::from("1/0")).is_err());
        assert_eq!(q.elem_from_json(&Value::from(3)).unwrap(), q.from_int(3));
    }

    #[test]
    fn field_spec_parsing() {
        assert_eq!(parse_field_spec("3").unwrap().size(), 3);
        assert_eq!(parse_field_spec("2^3").unwrap().size(), 8);
        assert!(parse_field_spec("q").is_err());
        assert_eq!(parse_field_spec("9").unwrap().size(), 9);
        assert_eq!(parse_field_spec("F4").unwrap().size(), 4);
        assert_eq!(parse_field_spec("GF(8)").unwrap().size(), 8);
        assert!(parse_field_spec("6").is_err());
        assert!(parse_field_spec("1").is_err());
        let d = GaloisField::new(5, 2).unwrap().descriptor();
        let json = serde_json::to_string(&d).unwrap();
        assert_eq!(json, r#"{"char":5,"degree":2,"modulus":[1,1,1]}"#);
        assert!(field_from_descriptor(&d).is_ok());
        let bad = FieldDescriptor { modulus: Some(vec![2, 0, 1]), ..d };
        assert!(field_from_descriptor(&bad).is_err());
    }
}

//! Exact coefficient arithmetic.
//!
//! Two layers live here. [`FieldSpec`] and [`Scalar`] are the tagged, checked
//! values used at API boundaries (parsing, serialization, reports). The
//! [`Field`] trait and its implementations [`PrimeField`] and
//! [`RationalField`] are the untagged fast path the reduction kernels are
//! generic over.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Largest supported prime modulus; residues are multiplied in `u64`.
pub const MAX_PRIME: u64 = u32::MAX as u64;

/// The base field of a computation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FieldSpec {
    /// GF(p) for a prime `p`.
    Prime(u64),
    /// The rationals.
    Rational,
}

impl FieldSpec {
    /// GF(p), rejecting composite or out-of-range moduli.
    pub fn prime(p: u64) -> Result<Self> {
        if p > MAX_PRIME {
            return Err(Error::Usage(format!("prime {p} exceeds supported maximum {MAX_PRIME}")));
        }
        if !is_prime(p) {
            return Err(Error::Usage(format!("field characteristic {p} is not prime")));
        }
        Ok(FieldSpec::Prime(p))
    }

    pub fn rational() -> Self {
        FieldSpec::Rational
    }

    pub fn zero(&self) -> Scalar {
        match *self {
            FieldSpec::Prime(p) => Scalar::Mod { residue: 0, p },
            FieldSpec::Rational => Scalar::Rational(BigRational::zero()),
        }
    }

    pub fn one(&self) -> Scalar {
        match *self {
            FieldSpec::Prime(p) => Scalar::Mod { residue: 1 % p, p },
            FieldSpec::Rational => Scalar::Rational(BigRational::one()),
        }
    }

    /// Embeds an integer into the field.
    pub fn from_i64(&self, v: i64) -> Scalar {
        match *self {
            FieldSpec::Prime(p) => Scalar::Mod { residue: reduce_i64(v, p), p },
            FieldSpec::Rational => Scalar::Rational(BigRational::from_integer(BigInt::from(v))),
        }
    }

    /// `num/den` as a field element; over GF(p) this is `num * den^-1`.
    pub fn ratio(&self, num: i64, den: i64) -> Result<Scalar> {
        if den == 0 {
            return Err(Error::Domain("zero denominator".into()));
        }
        match *self {
            FieldSpec::Rational => Ok(Scalar::Rational(BigRational::new(num.into(), den.into()))),
            FieldSpec::Prime(_) => {
                let n = self.from_i64(num);
                let d = self.inv(&self.from_i64(den))?;
                self.mul(&n, &d)
            }
        }
    }

    /// Returns `true` if `a` is a value of this field.
    pub fn owns(&self, a: &Scalar) -> bool {
        match (self, a) {
            (FieldSpec::Prime(p), Scalar::Mod { residue, p: q }) => p == q && residue < p,
            (FieldSpec::Rational, Scalar::Rational(_)) => true,
            _ => false,
        }
    }

    fn check(&self, a: &Scalar) -> Result<()> {
        if self.owns(a) {
            Ok(())
        } else {
            Err(Error::Usage(format!("scalar {a} does not belong to field {self}")))
        }
    }

    pub fn add(&self, a: &Scalar, b: &Scalar) -> Result<Scalar> {
        self.check(a)?;
        self.check(b)?;
        Ok(match (a, b) {
            (Scalar::Mod { residue: x, p }, Scalar::Mod { residue: y, .. }) => {
                Scalar::Mod { residue: (x + y) % p, p: *p }
            }
            (Scalar::Rational(x), Scalar::Rational(y)) => Scalar::Rational(x + y),
            _ => unreachable!(),
        })
    }

    pub fn mul(&self, a: &Scalar, b: &Scalar) -> Result<Scalar> {
        self.check(a)?;
        self.check(b)?;
        Ok(match (a, b) {
            (Scalar::Mod { residue: x, p }, Scalar::Mod { residue: y, .. }) => {
                Scalar::Mod { residue: (x * y) % p, p: *p }
            }
            (Scalar::Rational(x), Scalar::Rational(y)) => Scalar::Rational(x * y),
            _ => unreachable!(),
        })
    }

    pub fn neg(&self, a: &Scalar) -> Result<Scalar> {
        self.check(a)?;
        Ok(match a {
            Scalar::Mod { residue, p } => Scalar::Mod { residue: (p - residue) % p, p: *p },
            Scalar::Rational(x) => Scalar::Rational(-x),
        })
    }

    /// Multiplicative inverse; zero is a domain error.
    pub fn inv(&self, a: &Scalar) -> Result<Scalar> {
        self.check(a)?;
        if a.is_zero() {
            return Err(Error::Domain("zero has no multiplicative inverse".into()));
        }
        Ok(match a {
            Scalar::Mod { residue, p } => Scalar::Mod { residue: mod_inverse(*residue, *p), p: *p },
            Scalar::Rational(x) => Scalar::Rational(x.recip()),
        })
    }

    /// Parses the text form of a scalar of this field.
    ///
    /// Prime fields accept any signed decimal integer (reduced mod p) and
    /// `a/b` with `b` invertible; the rationals accept `num` or `num/den`.
    pub fn parse_scalar(&self, text: &str) -> Result<Scalar> {
        let bad = || Error::Parse { line: 0, message: format!("invalid scalar '{text}'") };
        let (num, den) = match text.split_once('/') {
            Some((n, d)) => (n, Some(d)),
            None => (text, None),
        };
        let num = BigInt::from_str(num.trim()).map_err(|_| bad())?;
        let den = match den {
            Some(d) => BigInt::from_str(d.trim()).map_err(|_| bad())?,
            None => BigInt::one(),
        };
        if den.is_zero() {
            return Err(Error::Domain(format!("zero denominator in '{text}'")));
        }
        match *self {
            FieldSpec::Rational => Ok(Scalar::Rational(BigRational::new(num, den))),
            FieldSpec::Prime(p) => {
                let pb = BigInt::from(p);
                let reduce = |v: &BigInt| {
                    let r = ((v % &pb) + &pb) % &pb;
                    r.to_u64().expect("residue fits in u64")
                };
                let n = Scalar::Mod { residue: reduce(&num), p };
                let d = Scalar::Mod { residue: reduce(&den), p };
                if d.is_zero() {
                    return Err(Error::Domain(format!("denominator of '{text}' vanishes mod {p}")));
                }
                self.mul(&n, &self.inv(&d)?)
            }
        }
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldSpec::Prime(p) => write!(f, "{p}"),
            FieldSpec::Rational => write!(f, "q"),
        }
    }
}

impl FromStr for FieldSpec {
    type Err = Error;

    /// `"q"` (or `"Q"`) for the rationals, a decimal prime otherwise.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("q") {
            return Ok(FieldSpec::Rational);
        }
        let p: u64 = s.parse().map_err(|_| Error::Usage(format!("field must be a prime or 'q', got '{s}'")))?;
        FieldSpec::prime(p)
    }
}

/// A field element tagged with its field.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Scalar {
    /// Canonical residue in `[0, p)`.
    Mod { residue: u64, p: u64 },
    /// Always kept in lowest terms with a positive denominator.
    Rational(BigRational),
}

impl Scalar {
    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Mod { residue, .. } => *residue == 0,
            Scalar::Rational(x) => x.is_zero(),
        }
    }

    pub fn field(&self) -> FieldSpec {
        match self {
            Scalar::Mod { p, .. } => FieldSpec::Prime(*p),
            Scalar::Rational(_) => FieldSpec::Rational,
        }
    }

    /// Returns the canonical representative. Idempotent.
    pub fn normalized(&self) -> Scalar {
        match self {
            Scalar::Mod { residue, p } => Scalar::Mod { residue: residue % p, p: *p },
            Scalar::Rational(x) => Scalar::Rational(BigRational::new(x.numer().clone(), x.denom().clone())),
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Mod { residue, .. } => write!(f, "{residue}"),
            Scalar::Rational(x) => {
                if x.denom().is_one() {
                    write!(f, "{}", x.numer())
                } else {
                    write!(f, "{}/{}", x.numer(), x.denom())
                }
            }
        }
    }
}

/// Untagged field arithmetic used by the sparse kernels.
///
/// Implementations may assume their inputs are canonical elements of the
/// field; mixing fields is prevented one level up, where complexes carry a
/// single [`FieldSpec`].
// Elements are constructed through the field value, which carries the modulus.
#[allow(clippy::wrong_self_convention)]
pub trait Field: Clone + Send + Sync {
    type Elem: Clone + PartialEq + fmt::Debug + Send + Sync;

    fn spec(&self) -> FieldSpec;
    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    /// Inverse of a nonzero element. Panics on zero.
    fn inv(&self, a: &Self::Elem) -> Self::Elem;
    fn from_i64(&self, v: i64) -> Self::Elem;
    /// Converts a tagged scalar; fails if it belongs to another field.
    fn from_scalar(&self, a: &Scalar) -> Result<Self::Elem>;
    fn to_scalar(&self, a: &Self::Elem) -> Scalar;

    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.add(a, &self.neg(b))
    }
}

/// GF(p) with residues stored as `u64`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self> {
        FieldSpec::prime(p)?;
        Ok(PrimeField { p })
    }

    /// For moduli already validated by [`FieldSpec::prime`].
    pub(crate) fn from_checked(p: u64) -> Self {
        debug_assert!(is_prime(p));
        PrimeField { p }
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }
}

impl Field for PrimeField {
    type Elem = u64;

    fn spec(&self) -> FieldSpec {
        FieldSpec::Prime(self.p)
    }
    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        (a + b) % self.p
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        (a * b) % self.p
    }
    fn neg(&self, a: &u64) -> u64 {
        (self.p - a) % self.p
    }
    fn inv(&self, a: &u64) -> u64 {
        assert!(*a != 0, "inverse of zero");
        mod_inverse(*a, self.p)
    }
    fn from_i64(&self, v: i64) -> u64 {
        reduce_i64(v, self.p)
    }
    fn from_scalar(&self, a: &Scalar) -> Result<u64> {
        match a {
            Scalar::Mod { residue, p } if *p == self.p => Ok(residue % self.p),
            other => Err(Error::Usage(format!("scalar {other} does not belong to GF({})", self.p))),
        }
    }
    fn to_scalar(&self, a: &u64) -> Scalar {
        Scalar::Mod { residue: *a, p: self.p }
    }
}

/// The rationals, backed by arbitrary-precision integers.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RationalField;

impl Field for RationalField {
    type Elem = BigRational;

    fn spec(&self) -> FieldSpec {
        FieldSpec::Rational
    }
    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn one(&self) -> BigRational {
        BigRational::one()
    }
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }
    fn inv(&self, a: &BigRational) -> BigRational {
        assert!(!a.is_zero(), "inverse of zero");
        a.recip()
    }
    fn from_i64(&self, v: i64) -> BigRational {
        BigRational::from_integer(v.into())
    }
    fn from_scalar(&self, a: &Scalar) -> Result<BigRational> {
        match a {
            Scalar::Rational(x) => Ok(x.clone()),
            other => Err(Error::Usage(format!("scalar {other} is not rational"))),
        }
    }
    fn to_scalar(&self, a: &BigRational) -> Scalar {
        Scalar::Rational(a.clone())
    }
}

/// The tagged representation is itself a field, at the cost of a variant
/// check per operation. Panics if handed a scalar of another field.
impl Field for FieldSpec {
    type Elem = Scalar;

    fn spec(&self) -> FieldSpec {
        *self
    }
    fn zero(&self) -> Scalar {
        FieldSpec::zero(self)
    }
    fn one(&self) -> Scalar {
        FieldSpec::one(self)
    }
    fn is_zero(&self, a: &Scalar) -> bool {
        a.is_zero()
    }
    fn add(&self, a: &Scalar, b: &Scalar) -> Scalar {
        FieldSpec::add(self, a, b).expect("field mismatch")
    }
    fn mul(&self, a: &Scalar, b: &Scalar) -> Scalar {
        FieldSpec::mul(self, a, b).expect("field mismatch")
    }
    fn neg(&self, a: &Scalar) -> Scalar {
        FieldSpec::neg(self, a).expect("field mismatch")
    }
    fn inv(&self, a: &Scalar) -> Scalar {
        FieldSpec::inv(self, a).expect("inverse of zero or field mismatch")
    }
    fn from_i64(&self, v: i64) -> Scalar {
        FieldSpec::from_i64(self, v)
    }
    fn from_scalar(&self, a: &Scalar) -> Result<Scalar> {
        self.check(a)?;
        Ok(a.clone())
    }
    fn to_scalar(&self, a: &Scalar) -> Scalar {
        a.clone()
    }
}

pub(crate) fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    if p < 4 {
        return true;
    }
    if p.is_multiple_of(2) {
        return false;
    }
    let mut d = 3;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

fn reduce_i64(v: i64, p: u64) -> u64 {
    (v as i128).rem_euclid(p as i128) as u64
}

fn mod_inverse(a: u64, p: u64) -> u64 {
    // extended Euclid on signed 128-bit to stay clear of overflow
    let (mut r0, mut r1) = (p as i128, a as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    debug_assert_eq!(r0, 1, "{a} not invertible mod {p}");
    t0.rem_euclid(p as i128) as u64
}

#[cfg(test)]
fn rational_is_canonical(x: &BigRational) -> bool {
    x.denom().sign() == num_bigint::Sign::Plus && num_integer::Integer::gcd(x.numer(), x.denom()).is_one()
}

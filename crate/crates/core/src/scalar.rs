//! Exact arithmetic over the supported coefficient rings, together with the
//! combinatorial coefficients that drive the divided-power formulas.
//!
//! A [`ScalarRing`] is a value-level ring descriptor (the moduli `p`, `p^N`
//! are runtime data coming from job files), and a [`Scalar`] is a canonical
//! representative: arbitrary-precision integer, reduced fraction, or residue
//! strictly below the modulus. There is no floating point anywhere.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// One of the four supported coefficient rings.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ScalarRing {
    /// The ring of integers.
    Integers,
    /// The field of rationals.
    Rationals,
    /// The prime field `F_p`.
    PrimeField { p: BigUint },
    /// The truncated p-adics `Z/p^N`, a local chain ring.
    PadicTrunc { p: BigUint, n: u32, modulus: BigUint },
}

impl ScalarRing {
    pub fn integers() -> Self {
        ScalarRing::Integers
    }

    pub fn rationals() -> Self {
        ScalarRing::Rationals
    }

    pub fn prime_field(p: impl Into<BigUint>) -> Result<Self> {
        let p = p.into();
        if !is_prime(&p) {
            return Err(Error::NotPrime(p.to_string()));
        }
        Ok(ScalarRing::PrimeField { p })
    }

    pub fn padic_trunc(p: impl Into<BigUint>, n: u32) -> Result<Self> {
        let p = p.into();
        if !is_prime(&p) {
            return Err(Error::NotPrime(p.to_string()));
        }
        if n == 0 {
            return Err(Error::InvalidPresentation(
                "p-adic precision must be positive".into(),
            ));
        }
        let modulus = p.pow(n);
        Ok(ScalarRing::PadicTrunc { p, n, modulus })
    }

    pub fn is_field(&self) -> bool {
        matches!(self, ScalarRing::Rationals | ScalarRing::PrimeField { .. })
    }

    /// The residue modulus for the two modular rings.
    pub fn modulus(&self) -> Option<&BigUint> {
        match self {
            ScalarRing::PrimeField { p } => Some(p),
            ScalarRing::PadicTrunc { modulus, .. } => Some(modulus),
            _ => None,
        }
    }

    /// The residue characteristic `p` for the two modular rings.
    pub fn char_p(&self) -> Option<&BigUint> {
        match self {
            ScalarRing::PrimeField { p } => Some(p),
            ScalarRing::PadicTrunc { p, .. } => Some(p),
            _ => None,
        }
    }

    /// Precision exponent: 1 for `F_p`, `N` for `Z/p^N`.
    pub fn precision(&self) -> Option<u32> {
        match self {
            ScalarRing::PrimeField { .. } => Some(1),
            ScalarRing::PadicTrunc { n, .. } => Some(*n),
            _ => None,
        }
    }

    pub fn zero(&self) -> Scalar {
        match self {
            ScalarRing::Integers => Scalar::Int(BigInt::zero()),
            ScalarRing::Rationals => Scalar::Rat(BigRational::zero()),
            _ => Scalar::Res(BigUint::zero()),
        }
    }

    pub fn one(&self) -> Scalar {
        match self {
            ScalarRing::Integers => Scalar::Int(BigInt::one()),
            ScalarRing::Rationals => Scalar::Rat(BigRational::one()),
            _ => Scalar::Res(BigUint::one()),
        }
    }

    pub fn from_bigint(&self, v: &BigInt) -> Scalar {
        match self {
            ScalarRing::Integers => Scalar::Int(v.clone()),
            ScalarRing::Rationals => Scalar::Rat(BigRational::from_integer(v.clone())),
            _ => {
                let m = BigInt::from(self.modulus().unwrap().clone());
                let r = v.mod_floor(&m);
                Scalar::Res(r.to_biguint().unwrap())
            }
        }
    }

    pub fn from_i64(&self, v: i64) -> Scalar {
        self.from_bigint(&BigInt::from(v))
    }

    pub fn is_zero(&self, a: &Scalar) -> bool {
        match a {
            Scalar::Int(v) => v.is_zero(),
            Scalar::Rat(v) => v.is_zero(),
            Scalar::Res(v) => v.is_zero(),
        }
    }

    pub fn is_one(&self, a: &Scalar) -> bool {
        match a {
            Scalar::Int(v) => v.is_one(),
            Scalar::Rat(v) => v.is_one(),
            Scalar::Res(v) => v.is_one(),
        }
    }

    pub fn add(&self, a: &Scalar, b: &Scalar) -> Scalar {
        match (self, a, b) {
            (ScalarRing::Integers, Scalar::Int(x), Scalar::Int(y)) => Scalar::Int(x + y),
            (ScalarRing::Rationals, Scalar::Rat(x), Scalar::Rat(y)) => Scalar::Rat(x + y),
            (_, Scalar::Res(x), Scalar::Res(y)) => {
                let m = self.modulus().expect("modular ring");
                let mut s = x + y;
                if &s >= m {
                    s -= m;
                }
                Scalar::Res(s)
            }
            _ => panic!("scalar does not belong to ring {self:?}"),
        }
    }

    pub fn sub(&self, a: &Scalar, b: &Scalar) -> Scalar {
        self.add(a, &self.neg(b))
    }

    pub fn neg(&self, a: &Scalar) -> Scalar {
        match (self, a) {
            (ScalarRing::Integers, Scalar::Int(x)) => Scalar::Int(-x),
            (ScalarRing::Rationals, Scalar::Rat(x)) => Scalar::Rat(-x),
            (_, Scalar::Res(x)) => {
                if x.is_zero() {
                    Scalar::Res(BigUint::zero())
                } else {
                    Scalar::Res(self.modulus().expect("modular ring") - x)
                }
            }
            _ => panic!("scalar does not belong to ring {self:?}"),
        }
    }

    pub fn mul(&self, a: &Scalar, b: &Scalar) -> Scalar {
        match (self, a, b) {
            (ScalarRing::Integers, Scalar::Int(x), Scalar::Int(y)) => Scalar::Int(x * y),
            (ScalarRing::Rationals, Scalar::Rat(x), Scalar::Rat(y)) => Scalar::Rat(x * y),
            (_, Scalar::Res(x), Scalar::Res(y)) => {
                Scalar::Res((x * y) % self.modulus().expect("modular ring"))
            }
            _ => panic!("scalar does not belong to ring {self:?}"),
        }
    }

    pub fn pow(&self, a: &Scalar, e: u32) -> Scalar {
        let mut acc = self.one();
        for _ in 0..e {
            acc = self.mul(&acc, a);
        }
        acc
    }

    pub fn is_unit(&self, a: &Scalar) -> bool {
        match (self, a) {
            (ScalarRing::Integers, Scalar::Int(x)) => x.is_one() || (-x).is_one(),
            (ScalarRing::Rationals, Scalar::Rat(x)) => !x.is_zero(),
            (ScalarRing::PrimeField { .. }, Scalar::Res(x)) => !x.is_zero(),
            (ScalarRing::PadicTrunc { p, .. }, Scalar::Res(x)) => {
                !x.is_zero() && !(x % p).is_zero()
            }
            _ => panic!("scalar does not belong to ring {self:?}"),
        }
    }

    /// Multiplicative inverse of a unit.
    pub fn inv(&self, a: &Scalar) -> Result<Scalar> {
        if !self.is_unit(a) {
            return Err(Error::NonUnit);
        }
        Ok(match (self, a) {
            (ScalarRing::Integers, Scalar::Int(x)) => Scalar::Int(x.clone()),
            (ScalarRing::Rationals, Scalar::Rat(x)) => Scalar::Rat(x.recip()),
            (_, Scalar::Res(x)) => {
                let m = BigInt::from(self.modulus().unwrap().clone());
                let x = BigInt::from(x.clone());
                let ext = x.extended_gcd(&m);
                debug_assert!(ext.gcd.is_one());
                Scalar::Res(ext.x.mod_floor(&m).to_biguint().unwrap())
            }
            _ => unreachable!(),
        })
    }

    /// Exact division `a / b` when `b` divides `a`; `None` otherwise.
    pub fn div_exact(&self, a: &Scalar, b: &Scalar) -> Option<Scalar> {
        if self.is_zero(b) {
            return if self.is_zero(a) { Some(self.zero()) } else { None };
        }
        match self {
            ScalarRing::Integers => {
                let (Scalar::Int(x), Scalar::Int(y)) = (a, b) else { unreachable!() };
                let (q, r) = x.div_rem(y);
                if r.is_zero() {
                    Some(Scalar::Int(q))
                } else {
                    None
                }
            }
            ScalarRing::Rationals | ScalarRing::PrimeField { .. } => {
                Some(self.mul(a, &self.inv(b).ok()?))
            }
            ScalarRing::PadicTrunc { p, .. } => {
                // b = unit * p^v; divisible iff val(a) >= v.
                let vb = self.val_p(b).unwrap();
                let va = self.val_p(a).unwrap();
                if va < vb {
                    return None;
                }
                let (Scalar::Res(x), Scalar::Res(y)) = (a, b) else { unreachable!() };
                let pv = p.pow(vb);
                let a_shifted = Scalar::Res(x / &pv);
                let b_unit = Scalar::Res(y / &pv);
                let inv = self.inv(&b_unit).expect("unit part invertible");
                Some(self.mul(&a_shifted, &inv))
            }
        }
    }

    /// p-adic valuation of a residue (`N` for zero), for Smith-form pivoting.
    pub fn val_p(&self, a: &Scalar) -> Option<u32> {
        let p = self.char_p()?;
        let prec = self.precision()?;
        let Scalar::Res(x) = a else { return None };
        if x.is_zero() {
            return Some(prec);
        }
        let mut v = 0;
        let mut x = x.clone();
        while (&x % p).is_zero() {
            x /= p;
            v += 1;
        }
        Some(v.min(prec))
    }

    /// Whether a canonical coefficient-wise map into `target` exists:
    /// `Z -> anything`, `Z/p^N -> Z/p^{N' <= N} -> F_p`, and identities.
    pub fn has_canonical_map(&self, target: &ScalarRing) -> bool {
        if self == target {
            return true;
        }
        match (self, target) {
            (ScalarRing::Integers, _) => true,
            (ScalarRing::PadicTrunc { p, n, .. }, ScalarRing::PadicTrunc { p: q, n: m, .. }) => {
                p == q && m <= n
            }
            (ScalarRing::PadicTrunc { p, .. }, ScalarRing::PrimeField { p: q }) => p == q,
            _ => false,
        }
    }

    /// Apply the canonical map; errors when none exists.
    pub fn map_into(&self, target: &ScalarRing, a: &Scalar) -> Result<Scalar> {
        if !self.has_canonical_map(target) {
            return Err(Error::NoCanonicalMap {
                from: self.to_string(),
                to: target.to_string(),
            });
        }
        if self == target {
            return Ok(a.clone());
        }
        Ok(match a {
            Scalar::Int(v) => target.from_bigint(v),
            Scalar::Res(v) => target.from_bigint(&BigInt::from(v.clone())),
            Scalar::Rat(_) => unreachable!("no canonical map out of the rationals"),
        })
    }

    /// Embed into the rationals when the scalars are integers or rationals.
    pub fn embed_rational(&self, a: &Scalar) -> Result<BigRational> {
        match (self, a) {
            (ScalarRing::Integers, Scalar::Int(v)) => Ok(BigRational::from_integer(v.clone())),
            (ScalarRing::Rationals, Scalar::Rat(v)) => Ok(v.clone()),
            _ => Err(Error::UnsupportedRing(
                "scalars do not embed into the rationals".into(),
            )),
        }
    }

    pub fn render(&self, a: &Scalar) -> String {
        match a {
            Scalar::Int(v) => v.to_string(),
            Scalar::Rat(v) => {
                if v.denom().is_one() {
                    v.numer().to_string()
                } else {
                    format!("{}/{}", v.numer(), v.denom())
                }
            }
            Scalar::Res(v) => v.to_string(),
        }
    }
}

impl std::fmt::Display for ScalarRing {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ScalarRing::Integers => write!(f, "Z"),
            ScalarRing::Rationals => write!(f, "Q"),
            ScalarRing::PrimeField { p } => write!(f, "F_{p}"),
            ScalarRing::PadicTrunc { p, n, .. } => write!(f, "Z/{p}^{n}"),
        }
    }
}

/// Canonical element of a [`ScalarRing`]. The variant encodes which family
/// of rings the value lives in; the modulus itself lives on the ring.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scalar {
    Int(BigInt),
    Rat(BigRational),
    Res(BigUint),
}

impl Scalar {
    /// Magnitude used for minimal-absolute-value pivoting over the integers.
    pub fn int_abs(&self) -> BigUint {
        match self {
            Scalar::Int(v) => v.abs().to_biguint().unwrap(),
            _ => panic!("expected integer"),
        }
    }
}

/// Deterministic primality: trial division below 2^16, otherwise
/// Miller-Rabin with a fixed witness set.
pub fn is_prime(p: &BigUint) -> bool {
    if p < &BigUint::from(2u32) {
        return false;
    }
    if p < &BigUint::from(1u32 << 16) {
        let n = p.to_u64().unwrap();
        let mut d = 2;
        while d * d <= n {
            if n.is_multiple_of(d) {
                return false;
            }
            d += 1;
        }
        return true;
    }
    miller_rabin(p)
}

fn miller_rabin(n: &BigUint) -> bool {
    let one = BigUint::one();
    let two = &one + &one;
    if (n % &two).is_zero() {
        return false;
    }
    let n_minus_1 = n - &one;
    let mut d = n_minus_1.clone();
    let mut r = 0u32;
    while (&d % &two).is_zero() {
        d /= &two;
        r += 1;
    }
    'witness: for a in [2u32, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let a = BigUint::from(a);
        if &a >= n {
            continue;
        }
        let mut x = a.modpow(&d, n);
        if x == one || x == n_minus_1 {
            continue;
        }
        for _ in 0..r.saturating_sub(1) {
            x = x.modpow(&two, n);
            if x == n_minus_1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Exact binomial coefficient `C(m, n)`, zero when `n > m`.
pub fn binomial(m: u32, n: u32) -> BigInt {
    if n > m {
        return BigInt::zero();
    }
    let n = n.min(m - n);
    let mut acc = BigInt::one();
    for k in 0..n {
        acc = acc * BigInt::from(m - k) / BigInt::from(k + 1);
    }
    acc
}

/// Exponent of the prime `q` in `k!` (Legendre's formula).
fn factorial_prime_exponent(k: u64, q: u64) -> u64 {
    let mut e = 0;
    let mut pw = q;
    while pw <= k {
        e += k / pw;
        match pw.checked_mul(q) {
            Some(next) => pw = next,
            None => break,
        }
    }
    e
}

fn small_primes_upto(bound: u64) -> Vec<u64> {
    let mut sieve = vec![true; (bound + 1) as usize];
    let mut primes = Vec::new();
    for q in 2..=bound {
        if sieve[q as usize] {
            primes.push(q);
            let mut mult = q * q;
            while mult <= bound {
                sieve[mult as usize] = false;
                mult += q;
            }
        }
    }
    primes
}

/// The composition coefficient `(mn)! / ((m!)^n n!)` of the divided-power
/// calculus, computed by prime-factor exponent bookkeeping so that no large
/// factorial is ever divided. Always a positive integer.
pub fn pd_composition_coefficient(m: u32, n: u32) -> BigInt {
    assert!(m >= 1 && n >= 1, "composition coefficient needs m, n >= 1");
    let (m, n) = (m as u64, n as u64);
    let mn = m * n;
    let mut acc = BigInt::one();
    for q in small_primes_upto(mn.max(2)) {
        let e = factorial_prime_exponent(mn, q) as i128
            - (n as i128) * factorial_prime_exponent(m, q) as i128
            - factorial_prime_exponent(n, q) as i128;
        assert!(e >= 0, "composition coefficient must be integral");
        for _ in 0..e {
            acc *= BigInt::from(q);
        }
    }
    acc
}

/// `n!` as a big integer.
pub fn factorial(n: u32) -> BigInt {
    let mut acc = BigInt::one();
    for k in 2..=n {
        acc *= BigInt::from(k);
    }
    acc
}

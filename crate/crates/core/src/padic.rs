//! Exact arithmetic in the subring `Z[1/p]` of `Q_p` and the additive
//! character `χ_p(x) = exp(2πi {x}_p)`.
//!
//! Every point the library touches (grid points `l/p^M`, translations in
//! `I_p`, mask arguments `k/p^(N+1)`) has a terminating base-`p` expansion,
//! so a value is stored as `a / p^e` with an arbitrary-precision numerator.

use std::cmp::Ordering;
use std::f64::consts::TAU;
use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{MraError, Result};

/// Deterministic primality test for the small primes this library accepts.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n.is_multiple_of(2) {
        return false;
    }
    let mut d = 3;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// Checks that `p` is a prime usable as the base of a `Q_p` computation.
pub fn check_prime(p: u32) -> Result<()> {
    if is_prime(p as u64) {
        Ok(())
    } else {
        Err(MraError::NotPrime(p as u64))
    }
}

/// `p^k` as a `u64`, or `None` on overflow.
pub fn checked_pow(p: u32, k: u32) -> Option<u64> {
    (p as u64).checked_pow(k)
}

/// `p^k` for exponents known to be small (grid sizes).
///
/// Panics on overflow; callers bound `k` through the grid cap first.
pub fn pow(p: u32, k: u32) -> u64 {
    checked_pow(p, k).expect("power of p overflows u64")
}

/// `exp(2πi k / n)`, with `k` reduced modulo `n` before the angle is formed.
pub fn unit_root(k: i128, n: u64) -> Complex64 {
    let r = k.rem_euclid(n as i128) as f64;
    let (s, c) = (TAU * r / n as f64).sin_cos();
    Complex64::new(c, s)
}

/// Table of the `n`-th roots of unity `exp(2πi j / n)`, `0 <= j < n`.
#[derive(Debug, Clone)]
pub struct UnitRoots {
    n: u64,
    roots: Vec<Complex64>,
}

impl UnitRoots {
    pub fn new(n: u64) -> Self {
        let roots = (0..n).map(|j| unit_root(j as i128, n)).collect();
        UnitRoots { n, roots }
    }

    pub fn order(&self) -> u64 {
        self.n
    }

    /// `exp(2πi k / n)` for any integer `k`.
    #[inline]
    pub fn get(&self, k: u64) -> Complex64 {
        self.roots[(k % self.n) as usize]
    }
}

/// An element `a / p^e` of `Z[1/p]` in canonical form: `e == 0` or `p ∤ a`,
/// with zero stored as `0 / p^0`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PadicRational {
    prime: u32,
    num: BigInt,
    exp: u32,
}

impl PadicRational {
    /// Builds `num / p^exp`, reducing to canonical form.
    pub fn new(prime: u32, num: impl Into<BigInt>, exp: u32) -> Self {
        let mut num = num.into();
        let mut exp = exp;
        if num.is_zero() {
            return PadicRational { prime, num, exp: 0 };
        }
        let p = BigInt::from(prime);
        while exp > 0 {
            let (q, r) = num.div_rem(&p);
            if !r.is_zero() {
                break;
            }
            num = q;
            exp -= 1;
        }
        PadicRational { prime, num, exp }
    }

    pub fn zero(prime: u32) -> Self {
        PadicRational::new(prime, 0, 0)
    }

    pub fn from_int(prime: u32, n: i64) -> Self {
        PadicRational::new(prime, n, 0)
    }

    /// `num / den` where `den` must be a positive power of `prime`.
    pub fn from_fraction(prime: u32, num: impl Into<BigInt>, den: impl Into<BigInt>) -> Result<Self> {
        let den: BigInt = den.into();
        let num: BigInt = num.into();
        if !den.is_positive() {
            return Err(MraError::InvalidArgument(format!(
                "denominator {den} is not positive"
            )));
        }
        let p = BigInt::from(prime);
        let mut d = den.clone();
        let mut exp = 0u32;
        while d.is_multiple_of(&p) {
            d /= &p;
            exp += 1;
        }
        if !d.is_one() {
            return Err(MraError::InvalidArgument(format!(
                "denominator {den} is not a power of {prime}"
            )));
        }
        Ok(PadicRational::new(prime, num, exp))
    }

    /// Parses `a`, `a/b` (with `b` a power of `p`) or `a/p^e`.
    pub fn parse(s: &str, prime: u32) -> Result<Self> {
        let token = s.trim();
        let err = |reason: &str| MraError::Parse {
            token: token.to_string(),
            reason: reason.to_string(),
        };
        let parse_int = |t: &str| -> Result<BigInt> {
            t.trim().parse::<BigInt>().map_err(|_| err("expected an integer"))
        };
        match token.split_once('/') {
            None => Ok(PadicRational::new(prime, parse_int(token)?, 0)),
            Some((a, b)) => {
                let num = parse_int(a)?;
                if let Some((base, e)) = b.split_once('^') {
                    let base: u32 = base.trim().parse().map_err(|_| err("bad base"))?;
                    if base != prime {
                        return Err(err(&format!("base {base} differs from p = {prime}")));
                    }
                    let e: u32 = e.trim().parse().map_err(|_| err("bad exponent"))?;
                    Ok(PadicRational::new(prime, num, e))
                } else {
                    let den = parse_int(b)?;
                    PadicRational::from_fraction(prime, num, den)
                        .map_err(|_| err(&format!("denominator is not a power of {prime}")))
                }
            }
        }
    }

    pub fn prime(&self) -> u32 {
        self.prime
    }

    pub fn numerator(&self) -> &BigInt {
        &self.num
    }

    pub fn denom_exp(&self) -> u32 {
        self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    fn same_prime(&self, other: &Self) -> Result<()> {
        if self.prime == other.prime {
            Ok(())
        } else {
            Err(MraError::MixedPrimes(self.prime, other.prime))
        }
    }

    fn p_pow(&self, k: u32) -> BigInt {
        num_traits::pow(BigInt::from(self.prime), k as usize)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_prime(other)?;
        let e = self.exp.max(other.exp);
        let a = &self.num * self.p_pow(e - self.exp) + &other.num * self.p_pow(e - other.exp);
        Ok(PadicRational::new(self.prime, a, e))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.same_prime(other)?;
        Ok(PadicRational::new(
            self.prime,
            &self.num * &other.num,
            self.exp + other.exp,
        ))
    }

    pub fn neg(&self) -> Self {
        PadicRational {
            prime: self.prime,
            num: -&self.num,
            exp: self.exp,
        }
    }

    /// Multiplies by an ordinary integer.
    pub fn scale(&self, k: i64) -> Self {
        PadicRational::new(self.prime, &self.num * k, self.exp)
    }

    /// Multiplicity of `p` in the numerator (zero when `e > 0`).
    fn numerator_valuation(&self) -> u64 {
        let p = BigInt::from(self.prime);
        let mut v = 0;
        let mut a = self.num.clone();
        while !a.is_zero() && a.is_multiple_of(&p) {
            a /= &p;
            v += 1;
        }
        v
    }

    /// The valuation `γ(x)` with `|x|_p = p^{-γ}`; `None` for zero.
    pub fn valuation(&self) -> Option<i64> {
        if self.is_zero() {
            None
        } else {
            Some(self.numerator_valuation() as i64 - self.exp as i64)
        }
    }

    /// `log_p |x|_p`; `None` for zero.
    pub fn norm_exp(&self) -> Option<i64> {
        self.valuation().map(|g| -g)
    }

    /// `|x|_p` as a real number (`0` for zero).
    pub fn norm(&self) -> f64 {
        match self.norm_exp() {
            None => 0.0,
            Some(k) => (self.prime as f64).powi(k as i32),
        }
    }

    /// True when `|x|_p <= p^k`.
    pub fn norm_le_exp(&self, k: i64) -> bool {
        match self.norm_exp() {
            None => true,
            Some(e) => e <= k,
        }
    }

    /// The fractional part `{x}_p`: the negative-power digits of `x`, as a
    /// rational in `[0, 1)` with the same denominator.
    pub fn frac_part(&self) -> Self {
        if self.exp == 0 {
            return PadicRational::zero(self.prime);
        }
        let m = self.p_pow(self.exp);
        PadicRational::new(self.prime, self.num.mod_floor(&m), self.exp)
    }

    /// The exact phase of `χ_p(x)`: `{x}_p = k / p^e` with `0 <= k < p^e`.
    pub fn frac_numerator(&self) -> (BigInt, u32) {
        let f = self.frac_part();
        (f.num, f.exp)
    }

    /// `χ_p(x) = exp(2πi {x}_p)`.
    pub fn character(&self) -> Complex64 {
        let (k, e) = self.frac_numerator();
        if e == 0 {
            return Complex64::new(1.0, 0.0);
        }
        // Angle computed from an exactly reduced phase; large exponents
        // lose only the digits below f64 resolution.
        let den = self.p_pow(e);
        let r = k.to_f64().unwrap_or(0.0) / den.to_f64().unwrap_or(f64::INFINITY);
        let (s, c) = (TAU * r).sin_cos();
        Complex64::new(c, s)
    }

    /// Membership in `I_p = {a : {a}_p = a}`.
    pub fn is_in_ip(&self) -> bool {
        self.frac_part() == *self
    }

    /// Residue of `x · p^shift` modulo `p^modulus_exp`, provided the product
    /// lies in `Z_p`; `None` otherwise.
    pub fn scaled_residue(&self, shift: i64, modulus_exp: u32) -> Option<u64> {
        if self.is_zero() {
            return Some(0);
        }
        let m = self.p_pow(modulus_exp);
        // x p^shift = num p^(shift - exp)
        let k = shift - self.exp as i64;
        let a = if k >= 0 {
            &self.num * self.p_pow(k as u32)
        } else {
            let d = self.p_pow((-k) as u32);
            let (q, r) = self.num.div_rem(&d);
            if !r.is_zero() {
                return None;
            }
            q
        };
        a.mod_floor(&m).to_u64()
    }

    pub fn to_f64(&self) -> f64 {
        self.num.to_f64().unwrap_or(f64::NAN) / (self.prime as f64).powi(self.exp as i32)
    }

    /// Ordering of the underlying real numbers.
    pub fn real_cmp(&self, other: &Self) -> Ordering {
        let e = self.exp.max(other.exp);
        let a = &self.num * self.p_pow(e - self.exp);
        let b = &other.num * other.p_pow(e - other.exp);
        a.cmp(&b)
    }
}

impl fmt::Display for PadicRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exp == 0 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}^{}", self.num, self.prime, self.exp)
        }
    }
}

/// `I_p ∩ B_N(0) = {k / p^N : 0 <= k < p^N}` in increasing `k`.
pub fn enumerate_ip_ball(prime: u32, n: u32) -> Vec<PadicRational> {
    (0..pow(prime, n))
        .map(|k| PadicRational::new(prime, k, n))
        .collect()
}

/// JSON form `{"num": <integer>, "exp": <integer>}`; the prime comes from
/// the surrounding document. Numerators outside `i64` are written as
/// decimal strings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PadicRationalJson {
    pub num: JsonInteger,
    pub exp: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum JsonInteger {
    Small(i64),
    Big(String),
}

impl From<&PadicRational> for PadicRationalJson {
    fn from(x: &PadicRational) -> Self {
        let num = match x.num.to_i64() {
            Some(v) => JsonInteger::Small(v),
            None => JsonInteger::Big(x.num.to_string()),
        };
        PadicRationalJson { num, exp: x.exp }
    }
}

impl PadicRationalJson {
    pub fn to_rational(&self, prime: u32) -> Result<PadicRational> {
        let num = match &self.num {
            JsonInteger::Small(v) => BigInt::from(*v),
            JsonInteger::Big(s) => s
                .parse::<BigInt>()
                .map_err(|_| MraError::Schema(format!("bad integer `{s}`")))?,
        };
        Ok(PadicRational::new(prime, num, self.exp))
    }
}

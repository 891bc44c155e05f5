//! Fixed-precision arithmetic in Z/ℓᴺ with ℓ-adic valuations.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// Extra digits used internally by iterative routines.
pub const DEFAULT_GUARD: u32 = 8;

/// Residues are `u64`; the modulus ℓᴺ (and ℓ^{N+guard}) stays below this bound.
const MODULUS_LIMIT: u128 = 1 << 62;

#[inline]
pub(crate) fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

#[inline]
pub(crate) fn addmod(a: u64, b: u64, m: u64) -> u64 {
    let s = a + b;
    if s >= m {
        s - m
    } else {
        s
    }
}

#[inline]
pub(crate) fn submod(a: u64, b: u64, m: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + m - b
    }
}

pub(crate) fn powmod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, b, m);
        }
        b = mulmod(b, b, m);
        e >>= 1;
    }
    r
}

/// Inverse of `a` modulo `m`, if it exists.
pub(crate) fn invmod(a: u64, m: u64) -> Option<u64> {
    let (mut r0, mut r1) = (m as i128, (a % m) as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 != 1 {
        return if m == 1 { Some(0) } else { None };
    }
    Some(t0.rem_euclid(m as i128) as u64)
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn checked_pow(p: u64, n: u32) -> Option<u128> {
    let mut acc: u128 = 1;
    for _ in 0..n {
        acc = acc.checked_mul(p as u128)?;
        if acc >= MODULUS_LIMIT {
            return None;
        }
    }
    Some(acc)
}

/// The ring Z/ℓᴺ together with the guard used by series and iterations.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct PadicContext {
    prime: u64,
    precision: u32,
    guard: u32,
    modulus: u64,
}

impl PadicContext {
    pub fn new(prime: u64, precision: u32) -> Result<Self> {
        Self::with_guard(prime, precision, DEFAULT_GUARD)
    }

    /// The guard is silently shortened when ℓ^{N+g} would leave the `u64` range.
    pub fn with_guard(prime: u64, precision: u32, guard: u32) -> Result<Self> {
        if !is_prime(prime) {
            return Err(Error::NotPrime(prime));
        }
        if precision == 0 {
            return Err(Error::ZeroPrecision);
        }
        let modulus = checked_pow(prime, precision)
            .ok_or(Error::PrecisionTooLarge { prime, precision })? as u64;
        let mut g = guard;
        while g > 0 && checked_pow(prime, precision + g).is_none() {
            g -= 1;
        }
        Ok(PadicContext { prime, precision, guard: g, modulus })
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn guard(&self) -> u32 {
        self.guard
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// v_ℓ(2): 1 at the prime 2, 0 otherwise.
    pub fn v2(&self) -> u32 {
        u32::from(self.prime == 2)
    }

    /// Digits of precision lost by `sqrt_one_plus` (and, as an upper bound, by log/exp).
    pub fn precision_loss(&self) -> u32 {
        self.v2()
    }

    /// ℓᵏ as a residue (0 once k ≥ N).
    pub fn pow_prime(&self, k: u32) -> u64 {
        if k >= self.precision {
            0
        } else {
            self.prime.pow(k)
        }
    }

    /// Same prime at another precision, keeping the guard request.
    pub fn at_precision(&self, precision: u32) -> Result<Self> {
        Self::with_guard(self.prime, precision, DEFAULT_GUARD.max(self.guard))
    }

    pub fn int(&self, value: i64) -> PadicInt {
        PadicInt { ctx: *self, residue: self.reduce_i128(value as i128) }
    }

    pub fn from_residue(&self, residue: u64) -> PadicInt {
        PadicInt { ctx: *self, residue: residue % self.modulus }
    }

    pub fn zero(&self) -> PadicInt {
        self.from_residue(0)
    }

    pub fn one(&self) -> PadicInt {
        self.from_residue(1)
    }

    pub(crate) fn reduce_i128(&self, v: i128) -> u64 {
        v.rem_euclid(self.modulus as i128) as u64
    }

    /// Valuation of a raw residue, `None` for zero.
    pub fn valuation_of(&self, residue: u64) -> Option<u32> {
        let r = residue % self.modulus;
        if r == 0 {
            return None;
        }
        let mut v = 0;
        let mut x = r;
        while x % self.prime == 0 {
            x /= self.prime;
            v += 1;
        }
        Some(v)
    }

    /// A generator set for (Z/ℓᴺ)^×.
    pub fn unit_group_generators(&self) -> Vec<u64> {
        let (p, n, m) = (self.prime, self.precision, self.modulus);
        if p == 2 {
            let mut g = Vec::new();
            if n >= 2 {
                g.push(m - 1);
            }
            if n >= 3 {
                g.push(5);
            }
            return g;
        }
        let phi = p - 1;
        let factors = prime_factors(phi);
        let root = (2..p)
            .find(|&g| factors.iter().all(|&q| powmod(g, phi / q, p) != 1))
            .unwrap_or(1);
        let mut g = root;
        if n >= 2 && powmod(g, phi, p * p) == 1 {
            g += p;
        }
        vec![g % m]
    }
}

impl fmt::Debug for PadicContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Z/{}^{}", self.prime, self.precision)
    }
}

pub(crate) fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// An ℓ-adic integer known modulo ℓᴺ.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct PadicInt {
    ctx: PadicContext,
    residue: u64,
}

impl PadicInt {
    pub fn context(&self) -> PadicContext {
        self.ctx
    }

    pub fn residue(&self) -> u64 {
        self.residue
    }

    pub fn is_zero(&self) -> bool {
        self.residue == 0
    }

    /// `None` stands for ⊥: the residue is zero at this precision.
    pub fn valuation(&self) -> Option<u32> {
        self.ctx.valuation_of(self.residue)
    }

    pub fn is_unit(&self) -> bool {
        self.valuation() == Some(0)
    }

    pub fn pow(&self, e: u64) -> PadicInt {
        self.with(powmod(self.residue, e, self.ctx.modulus))
    }

    pub fn unit_inverse(&self) -> Result<PadicInt> {
        if !self.is_unit() {
            return Err(Error::NotAUnit);
        }
        let inv = invmod(self.residue, self.ctx.modulus).ok_or(Error::NotAUnit)?;
        Ok(self.with(inv))
    }

    /// The root λ of λ² = 1 + x with λ ≡ 1 mod ℓ (mod 4 when ℓ = 2).
    ///
    /// Exact modulo ℓᴺ for odd ℓ; modulo 2^{N−1} for ℓ = 2, where the residue of
    /// x is read as an exact integer and the root is lifted with guard digits.
    pub fn sqrt_one_plus(&self) -> Result<PadicInt> {
        let (p, n) = (self.ctx.prime, self.ctx.precision);
        let min_v = if p == 2 { 3 } else { 1 };
        if let Some(v) = self.valuation() {
            if v < min_v {
                return Err(Error::PreconditionViolated(format!(
                    "sqrt(1+x) needs v(x) >= {min_v}, got {v}"
                )));
            }
        } else {
            return Ok(self.ctx.one());
        }
        let k = n + self.ctx.guard.max(1);
        let big = checked_pow(p, k).map(|m| m as u64).unwrap_or(self.ctx.modulus);
        let u = (1 + self.residue as u128) as u64 % big;
        let lambda = if p == 2 {
            hensel_sqrt_two(u, k.min(big.trailing_zeros()))
        } else {
            newton_sqrt_odd(u, big)
        };
        Ok(self.with(lambda % self.ctx.modulus))
    }

    /// log(1 + x), summed term by term; each term is exact in Z/ℓᴺ.
    pub fn log_one_plus(&self) -> Result<PadicInt> {
        let (p, n, m) = (self.ctx.prime, self.ctx.precision, self.ctx.modulus);
        let Some(a) = self.valuation() else {
            return Ok(self.ctx.zero());
        };
        let min_v = if p == 2 { 2 } else { 1 };
        if a < min_v {
            return Err(Error::PreconditionViolated(format!(
                "log(1+x) needs v(x) >= {min_v}, got {a}"
            )));
        }
        let unit = self.residue / p.pow(a);
        let mut sum = 0u64;
        let mut upow = 1u64;
        let mut j: u64 = 1;
        loop {
            upow = mulmod(upow, unit, m);
            let vj = ilog(j, p);
            let (vpart, jpart) = split_prime(j, p);
            let e = a as u64 * j - vpart as u64;
            if e < n as u64 {
                let inv = invmod(jpart % m, m).expect("unit part");
                let term = mulmod(mulmod(upow, inv, m), p.pow(e as u32), m);
                sum = if j % 2 == 1 { addmod(sum, term, m) } else { submod(sum, term, m) };
            }
            if a as u64 * j >= n as u64 + vj as u64 + 1 {
                break;
            }
            j += 1;
        }
        Ok(self.with(sum))
    }

    /// exp(y), summed term by term; each term is exact in Z/ℓᴺ.
    pub fn exp(&self) -> Result<PadicInt> {
        let (p, n, m) = (self.ctx.prime, self.ctx.precision, self.ctx.modulus);
        let Some(a) = self.valuation() else {
            return Ok(self.ctx.one());
        };
        let min_v = if p == 2 { 2 } else { 1 };
        if a < min_v {
            return Err(Error::PreconditionViolated(format!(
                "exp(y) needs v(y) >= {min_v}, got {a}"
            )));
        }
        let unit = self.residue / p.pow(a);
        let mut sum = 1u64;
        let mut upow = 1u64;
        let mut fact_unit = 1u64;
        let mut fact_v = 0u64;
        let mut j: u64 = 1;
        loop {
            upow = mulmod(upow, unit, m);
            let (vpart, jpart) = split_prime(j, p);
            fact_v += vpart as u64;
            fact_unit = mulmod(fact_unit, jpart % m, m);
            let e = a as u64 * j - fact_v;
            if e < n as u64 {
                let inv = invmod(fact_unit, m).expect("unit part");
                sum = addmod(sum, mulmod(mulmod(upow, inv, m), p.pow(e as u32), m), m);
            }
            // v(j!) ≤ (j−1)/(ℓ−1), so later terms only grow in valuation.
            if (a as u64 * j) * (p - 1) >= n as u64 * (p - 1) + (j - 1) {
                break;
            }
            j += 1;
        }
        Ok(self.with(sum))
    }

    /// u^w = exp(w·log u) for u ≡ 1 mod ℓ (mod 4 when ℓ = 2).
    pub fn pow_padic(&self, w: &PadicInt) -> Result<PadicInt> {
        self.check_same(w)?;
        let x = *self - self.ctx.one();
        let min_v = if self.ctx.prime == 2 { 2 } else { 1 };
        if matches!(x.valuation(), Some(v) if v < min_v) {
            return Err(Error::PreconditionViolated(
                "pow_padic needs u = 1 mod l (mod 4 at l = 2)".into(),
            ));
        }
        (x.log_one_plus()? * *w).exp()
    }

    pub(crate) fn check_same(&self, other: &PadicInt) -> Result<()> {
        if self.ctx != other.ctx {
            return Err(Error::ContextMismatch);
        }
        Ok(())
    }

    fn with(&self, residue: u64) -> PadicInt {
        PadicInt { ctx: self.ctx, residue }
    }
}

/// (v_ℓ(j), j / ℓ^{v_ℓ(j)})
fn split_prime(mut j: u64, p: u64) -> (u32, u64) {
    let mut v = 0;
    while j % p == 0 {
        j /= p;
        v += 1;
    }
    (v, j)
}

fn ilog(j: u64, p: u64) -> u32 {
    let mut v = 0;
    let mut q = j;
    while q >= p {
        q /= p;
        v += 1;
    }
    v
}

fn newton_sqrt_odd(u: u64, m: u64) -> u64 {
    let mut lambda = 1u64;
    for _ in 0..128 {
        let sq = mulmod(lambda, lambda, m);
        if sq == u {
            break;
        }
        let f = submod(sq, u, m);
        let inv = invmod(mulmod(2, lambda, m), m).expect("2λ is a unit");
        lambda = submod(lambda, mulmod(f, inv, m), m);
    }
    lambda
}

/// Digit-by-digit lift of √u in Z/2ᵏ for u ≡ 1 mod 8; the result is ≡ 1 mod 4.
fn hensel_sqrt_two(u: u64, k: u32) -> u64 {
    let mask = |e: u32| if e >= 64 { u64::MAX } else { (1u64 << e) - 1 };
    let mut lambda: u64 = 1;
    for e in 3..k {
        let sq = lambda.wrapping_mul(lambda);
        if (sq ^ u) & mask(e + 1) != 0 {
            lambda += 1 << (e - 1);
        }
    }
    lambda & mask(k)
}

impl fmt::Debug for PadicInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} mod {}^{}", self.residue, self.ctx.prime, self.ctx.precision)
    }
}

impl fmt::Display for PadicInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.residue)
    }
}

impl Add for PadicInt {
    type Output = PadicInt;
    fn add(self, rhs: PadicInt) -> PadicInt {
        debug_assert_eq!(self.ctx, rhs.ctx);
        self.with(addmod(self.residue, rhs.residue, self.ctx.modulus))
    }
}

impl Sub for PadicInt {
    type Output = PadicInt;
    fn sub(self, rhs: PadicInt) -> PadicInt {
        debug_assert_eq!(self.ctx, rhs.ctx);
        self.with(submod(self.residue, rhs.residue, self.ctx.modulus))
    }
}

impl Mul for PadicInt {
    type Output = PadicInt;
    fn mul(self, rhs: PadicInt) -> PadicInt {
        debug_assert_eq!(self.ctx, rhs.ctx);
        self.with(mulmod(self.residue, rhs.residue, self.ctx.modulus))
    }
}

impl Neg for PadicInt {
    type Output = PadicInt;
    fn neg(self) -> PadicInt {
        self.with(submod(0, self.residue, self.ctx.modulus))
    }
}

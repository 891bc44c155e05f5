//! Explicit index and isogeny bounds over rigorous base-10 log magnitudes.
//!
//! Every transcendental quantity (ln, exp, π) is evaluated as a fixed-point
//! interval of [`WORK_BITS`] bits whose endpoints are exact rationals; products
//! and powers of magnitudes are exact rational operations on the stored log10.
//! Published results are rounded to the digit budget in the safe direction.
//! The interval width does not depend on the budget, so a larger budget can
//! only tighten a bound.

use std::cmp::Ordering;
use std::fmt;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub const DEFAULT_BUDGET: u32 = 64;
pub const MAX_BUDGET: u32 = 200;
const WORK_BITS: usize = 720;
/// Explicit values are only produced for magnitudes below 10^(10⁷).
const VALUE_LOG10_LIMIT: i64 = 10_000_000;

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn pow10(k: u64) -> BigInt {
    num_traits::pow(BigInt::from(10), k as usize)
}

fn ulps(k: u32) -> BigInt {
    BigInt::one() << k
}

fn from_fixed(v: BigInt) -> BigRational {
    BigRational::new(v, BigInt::one() << WORK_BITS)
}

fn to_fixed_floor(x: &BigRational) -> BigInt {
    (x.numer() << WORK_BITS).div_floor(x.denom())
}

#[derive(Clone, Debug)]
struct Interval {
    lo: BigRational,
    hi: BigRational,
}

impl Interval {
    fn exact(x: BigRational) -> Self {
        Interval { lo: x.clone(), hi: x }
    }

    fn around(v: BigInt, err: BigInt) -> Self {
        Interval { lo: from_fixed(&v - &err), hi: from_fixed(v + err) }
    }
}

/// Σ z^{2i+1}/(2i+1) in fixed point for 0 ≤ z ≤ 1/3; error below 2^14 ulps.
fn atanh_fixed(z: &BigRational) -> BigInt {
    let zf = to_fixed_floor(z);
    let z2 = (&zf * &zf) >> WORK_BITS;
    let mut pow = zf.clone();
    let mut sum = zf;
    let mut k = 1u64;
    loop {
        pow = (pow * &z2) >> WORK_BITS;
        if pow.is_zero() {
            break;
        }
        k += 2;
        sum += &pow / BigInt::from(k);
    }
    sum
}

const ATANH_ERR_BITS: u32 = 14;

fn ln2_fixed() -> &'static BigInt {
    static LN2: OnceLock<BigInt> = OnceLock::new();
    LN2.get_or_init(|| atanh_fixed(&ratio(1, 3)) << 1)
}

/// Rigorous enclosure of ln x for x > 0.
fn ln_interval(x: &BigRational) -> Interval {
    assert!(x.is_positive(), "ln of a non-positive number");
    if x.is_one() {
        return Interval::exact(BigRational::zero());
    }
    if x < &BigRational::one() {
        let r = ln_interval(&x.recip());
        return Interval { lo: -r.hi, hi: -r.lo };
    }
    let mut k = x.numer().bits() as i64 - x.denom().bits() as i64;
    let two = rat(2);
    let mut y = if k >= 0 {
        x / BigRational::from_integer(BigInt::one() << k as usize)
    } else {
        x * BigRational::from_integer(BigInt::one() << (-k) as usize)
    };
    while y >= two {
        y /= &two;
        k += 1;
    }
    while y < BigRational::one() {
        y *= &two;
        k -= 1;
    }
    let z = (&y - BigRational::one()) / (&y + BigRational::one());
    let v = (atanh_fixed(&z) << 1) + ln2_fixed() * BigInt::from(k);
    let err = ulps(ATANH_ERR_BITS + 1) * BigInt::from(k.unsigned_abs() + 1);
    Interval::around(v, err)
}

/// Rigorous enclosure of exp x for 0 ≤ x ≤ 8.
fn exp_interval(x: &BigRational) -> Interval {
    assert!(!x.is_negative() && x <= &rat(8), "exp argument out of range");
    if x.is_zero() {
        return Interval::exact(BigRational::one());
    }
    const SQUARINGS: usize = 12;
    let t = x / BigRational::from_integer(BigInt::one() << SQUARINGS);
    let tf = to_fixed_floor(&t);
    let one = BigInt::one() << WORK_BITS;
    let mut sum = one.clone();
    let mut term = one;
    let mut i = 1u64;
    loop {
        term = ((term * &tf) >> WORK_BITS) / BigInt::from(i);
        if term.is_zero() {
            break;
        }
        sum += &term;
        i += 1;
    }
    for _ in 0..SQUARINGS {
        sum = (&sum * &sum) >> WORK_BITS;
    }
    // Every step rounds down, so `sum` is a lower bound.
    let hi = &sum + ulps(40);
    Interval { lo: from_fixed(sum), hi: from_fixed(hi) }
}

fn atan_inv_fixed(m: u64) -> BigInt {
    let m2 = BigInt::from(m * m);
    let mut pow = (BigInt::one() << WORK_BITS) / BigInt::from(m);
    let mut sum = pow.clone();
    let mut k = 1u64;
    let mut neg = true;
    loop {
        pow = &pow / &m2;
        if pow.is_zero() {
            break;
        }
        k += 2;
        let t = &pow / BigInt::from(k);
        if neg {
            sum -= t;
        } else {
            sum += t;
        }
        neg = !neg;
    }
    sum
}

struct Constants {
    ln10: Interval,
    e: Interval,
    pi: Interval,
}

fn constants() -> &'static Constants {
    static C: OnceLock<Constants> = OnceLock::new();
    C.get_or_init(|| {
        let pi = atan_inv_fixed(5) * BigInt::from(16) - atan_inv_fixed(239) * BigInt::from(4);
        Constants {
            ln10: ln_interval(&rat(10)),
            e: exp_interval(&rat(1)),
            pi: Interval::around(pi, ulps(16)),
        }
    })
}

/// Upper bound on ln x.
pub fn ln_upper(x: &BigRational) -> BigRational {
    ln_interval(x).hi
}

/// Lower bound on ln x.
pub fn ln_lower(x: &BigRational) -> BigRational {
    ln_interval(x).lo
}

/// Upper bound on e.
pub fn e_upper() -> BigRational {
    constants().e.hi.clone()
}

/// Enclosure of π as (lower, upper).
pub fn pi_bounds() -> (BigRational, BigRational) {
    let c = constants();
    (c.pi.lo.clone(), c.pi.hi.clone())
}

/// Upper bound on log10(e) = 1 / ln 10.
pub fn log10_e_upper() -> BigRational {
    constants().ln10.lo.recip()
}

fn exact_log10(x: &BigRational) -> Option<BigRational> {
    let is_pow10 = |n: &BigInt| -> Option<u64> {
        let s = n.to_str_radix(10);
        (s.starts_with('1') && s[1..].bytes().all(|b| b == b'0')).then(|| (s.len() - 1) as u64)
    };
    if x.denom().is_one() {
        is_pow10(x.numer()).map(|k| rat(k as i64))
    } else if x.numer().is_one() {
        is_pow10(x.denom()).map(|k| rat(-(k as i64)))
    } else {
        None
    }
}

/// Upper bound on log10 x (x > 0); exact for powers of ten.
pub fn log10_upper(x: &BigRational) -> BigRational {
    if let Some(v) = exact_log10(x) {
        return v;
    }
    let l = ln_interval(x).hi;
    let c = &constants().ln10;
    if l.is_negative() {
        l / &c.hi
    } else {
        l / &c.lo
    }
}

/// Lower bound on log10 x (x > 0); exact for powers of ten.
pub fn log10_lower(x: &BigRational) -> BigRational {
    if let Some(v) = exact_log10(x) {
        return v;
    }
    let l = ln_interval(x).lo;
    let c = &constants().ln10;
    if l.is_negative() {
        l / &c.lo
    } else {
        l / &c.hi
    }
}

fn split_floor(l: &BigRational) -> Result<(i64, BigRational)> {
    let f = l.floor();
    let fi = f.to_integer().to_i64().filter(|v| v.abs() < VALUE_LOG10_LIMIT).ok_or(Error::MagnitudeOverflow)?;
    Ok((fi, l - f))
}

fn scale_pow10(x: BigRational, k: i64) -> BigRational {
    if k >= 0 {
        x * BigRational::from_integer(pow10(k as u64))
    } else {
        x / BigRational::from_integer(pow10((-k) as u64))
    }
}

/// Upper bound on 10^L; `MagnitudeOverflow` when |L| ≥ 10⁷.
pub fn pow10_upper(l: &BigRational) -> Result<BigRational> {
    let (f, frac) = split_floor(l)?;
    if frac.is_zero() {
        return Ok(scale_pow10(BigRational::one(), f));
    }
    let arg = frac * &constants().ln10.hi;
    Ok(scale_pow10(exp_interval(&arg).hi, f))
}

/// Lower bound on 10^L; `MagnitudeOverflow` when |L| ≥ 10⁷.
pub fn pow10_lower(l: &BigRational) -> Result<BigRational> {
    let (f, frac) = split_floor(l)?;
    if frac.is_zero() {
        return Ok(scale_pow10(BigRational::one(), f));
    }
    let arg = frac * &constants().ln10.lo;
    Ok(scale_pow10(exp_interval(&arg).lo, f))
}

/// ⌊log10 |x|⌋ for x ≠ 0.
fn floor_log10_abs(x: &BigRational) -> i64 {
    let n = x.numer().abs();
    let d = x.denom().clone();
    let mut e = ((n.bits() as f64 - d.bits() as f64) * std::f64::consts::LOG10_2).floor() as i64;
    let ge = |e: i64| -> bool {
        // |x| ≥ 10^e
        if e >= 0 {
            n >= &d * pow10(e as u64)
        } else {
            &n * pow10((-e) as u64) >= d
        }
    };
    while !ge(e) {
        e -= 1;
    }
    while ge(e + 1) {
        e += 1;
    }
    e
}

/// x rounded to `digits` significant decimal digits, upward or downward.
pub fn round_sig(x: &BigRational, digits: u32, up: bool) -> BigRational {
    if x.is_zero() {
        return x.clone();
    }
    let shift = digits as i64 - 1 - floor_log10_abs(x);
    let scaled = scale_pow10(x.clone(), shift);
    let q = if up { scaled.ceil() } else { scaled.floor() };
    scale_pow10(q, -shift)
}

/// Decimal rendering with `digits` significant digits, in scientific form when
/// the exponent is large.
pub fn format_sig(x: &BigRational, digits: u32, up: bool) -> String {
    if x.is_zero() {
        return "0".into();
    }
    if x.denom().is_one() && x.numer().abs() < pow10(21) {
        return x.numer().to_string();
    }
    let q = round_sig(x, digits, up);
    let e = floor_log10_abs(&q);
    let mant = scale_pow10(q.clone(), digits as i64 - 1 - e).to_integer();
    let sign = if mant.is_negative() { "-" } else { "" };
    let ds = mant.abs().to_string();
    if (-7..21).contains(&e) {
        let int_len = e + 1;
        let (ip, fp) = if int_len <= 0 {
            ("0".to_string(), format!("{}{}", "0".repeat((-int_len) as usize), ds))
        } else if int_len as usize >= ds.len() {
            (format!("{}{}", ds, "0".repeat(int_len as usize - ds.len())), String::new())
        } else {
            (ds[..int_len as usize].to_string(), ds[int_len as usize..].to_string())
        };
        let fp = fp.trim_end_matches('0');
        if fp.is_empty() {
            format!("{sign}{ip}")
        } else {
            format!("{sign}{ip}.{fp}")
        }
    } else {
        let frac = ds[1..].trim_end_matches('0');
        let m = if frac.is_empty() { ds[..1].to_string() } else { format!("{}.{}", &ds[..1], frac) };
        format!("{sign}{m}e{}{}", if e >= 0 { "+" } else { "" }, e)
    }
}

/// Parses a decimal such as `-3.25` or `1.5e3` exactly.
pub fn parse_decimal(s: &str) -> Result<BigRational> {
    let bad = || Error::Parse(format!("not a decimal number: {s:?}"));
    let t = s.trim();
    let (mant, exp) = match t.find(['e', 'E']) {
        Some(i) => (&t[..i], t[i + 1..].parse::<i64>().map_err(|_| bad())?),
        None => (t, 0),
    };
    let (neg, mant) = match mant.strip_prefix('-') {
        Some(r) => (true, r),
        None => (false, mant.strip_prefix('+').unwrap_or(mant)),
    };
    let (ip, fp) = mant.split_once('.').unwrap_or((mant, ""));
    if ip.is_empty() && fp.is_empty() {
        return Err(bad());
    }
    if !ip.bytes().chain(fp.bytes()).all(|b| b.is_ascii_digit()) || exp.abs() > 10_000 {
        return Err(bad());
    }
    let digits: BigInt = format!("{ip}{fp}").parse().unwrap_or_default();
    let mut v = scale_pow10(BigRational::from_integer(digits), exp - fp.len() as i64);
    if neg {
        v = -v;
    }
    Ok(v)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Rounding {
    /// The stored log10 is an upper bound.
    Up,
    /// The stored log10 is a lower bound.
    Down,
}

/// A positive real held as a rational bound on its base-10 logarithm.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LogMagnitude {
    log10: BigRational,
    rounding: Rounding,
    budget: u32,
}

impl LogMagnitude {
    pub fn from_log10(log10: BigRational, budget: u32) -> Self {
        LogMagnitude { log10, rounding: Rounding::Up, budget }
    }

    pub fn one(budget: u32) -> Self {
        Self::from_log10(BigRational::zero(), budget)
    }

    /// Upper bound for a positive rational.
    pub fn from_rational(x: &BigRational, budget: u32) -> Self {
        Self::from_log10(log10_upper(x), budget)
    }

    pub fn from_integer(n: u64, budget: u32) -> Self {
        Self::from_rational(&rat(n as i64), budget)
    }

    pub fn log10(&self) -> &BigRational {
        &self.log10
    }

    pub fn rounding(&self) -> Rounding {
        self.rounding
    }

    pub fn budget(&self) -> u32 {
        self.budget
    }

    pub fn mul(&self, o: &LogMagnitude) -> LogMagnitude {
        LogMagnitude { log10: &self.log10 + &o.log10, ..self.clone() }
    }

    /// self^k for a rational k ≥ 0.
    pub fn pow(&self, k: &BigRational) -> LogMagnitude {
        LogMagnitude { log10: &self.log10 * k, ..self.clone() }
    }

    pub fn powi(&self, k: i64) -> LogMagnitude {
        self.pow(&rat(k))
    }

    /// Upper bound on self + o.
    pub fn add(&self, o: &LogMagnitude) -> LogMagnitude {
        let (big, small) = if self.log10 >= o.log10 { (self, o) } else { (o, self) };
        let delta = &big.log10 - &small.log10;
        let cutoff = rat(self.budget as i64 + 20);
        let extra = if delta > cutoff {
            scale_pow10(BigRational::one(), -(self.budget as i64 + 20))
        } else {
            let t = pow10_upper(&-delta).expect("bounded exponent");
            log10_upper(&(BigRational::one() + t))
        };
        LogMagnitude { log10: &big.log10 + extra, rounding: Rounding::Up, budget: self.budget }
    }

    /// The same bound with log10 rounded to the budget in the safe direction.
    pub fn rounded(&self) -> LogMagnitude {
        let up = self.rounding == Rounding::Up;
        LogMagnitude { log10: round_sig(&self.log10, self.budget, up), ..self.clone() }
    }

    fn with_rounding(mut self, r: Rounding) -> Self {
        self.rounding = r;
        self
    }

    /// Upper bound on the natural logarithm.
    pub fn ln_upper(&self) -> BigRational {
        let c = &constants().ln10;
        if self.log10.is_negative() {
            &self.log10 * &c.lo
        } else {
            &self.log10 * &c.hi
        }
    }

    /// The value itself as a rational, bounded in the direction of the rounding tag.
    pub fn value(&self) -> Result<BigRational> {
        match self.rounding {
            Rounding::Up => pow10_upper(&self.log10),
            Rounding::Down => pow10_lower(&self.log10),
        }
    }

    /// Decimal digits of ⌈value⌉ (or ⌊value⌋ for lower bounds).
    pub fn to_integer_string(&self) -> Result<String> {
        let v = self.value()?;
        Ok(match self.rounding {
            Rounding::Up => v.ceil().to_integer().to_string(),
            Rounding::Down => v.floor().to_integer().to_string(),
        })
    }

    /// log10 rendered with the budget's significant digits.
    pub fn display_log10(&self) -> String {
        format_sig(&self.log10, self.budget, self.rounding == Rounding::Up)
    }
}

impl PartialOrd for LogMagnitude {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl Ord for LogMagnitude {
    fn cmp(&self, o: &Self) -> Ordering {
        self.log10.cmp(&o.log10)
    }
}

impl fmt::Display for LogMagnitude {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "10^{}", self.display_log10())
    }
}

/// Degree [K:Q], height h(E) and dimension g.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurveParams {
    pub degree: u64,
    pub height: BigRational,
    pub dim: u32,
}

impl CurveParams {
    pub fn new(degree: u64, height: BigRational) -> Result<Self> {
        Self::with_dim(degree, height, 1)
    }

    pub fn with_dim(degree: u64, height: BigRational, dim: u32) -> Result<Self> {
        if degree == 0 {
            return Err(Error::InvalidParams("degree must be at least 1".into()));
        }
        if dim == 0 {
            return Err(Error::InvalidParams("dimension must be at least 1".into()));
        }
        Ok(CurveParams { degree, height, dim })
    }

    fn with_degree(&self, degree: u64) -> Self {
        CurveParams { degree, ..self.clone() }
    }

    /// Upper bound on max(h, ln d, 1).
    pub fn max_term(&self) -> BigRational {
        let ld = ln_upper(&rat(self.degree as i64));
        [self.height.clone(), ld, BigRational::one()].into_iter().max().unwrap()
    }
}

fn check_budget(budget: u32) -> Result<()> {
    if budget == 0 || budget > MAX_BUDGET {
        return Err(Error::InvalidParams(format!("digit budget must be in 1..={MAX_BUDGET}")));
    }
    Ok(())
}

/// 2¹⁰·g³.
pub fn alpha(g: u32) -> u64 {
    1024 * (g as u64).pow(3)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IsogenyVariant {
    General,
    Elliptic,
    /// The elliptic bound for Eᴺ.
    Power(u32),
}

/// Bound on the minimal degree of an isogeny between isogenous varieties.
pub fn isogeny_bound(p: &CurveParams, variant: IsogenyVariant, budget: u32) -> Result<LogMagnitude> {
    check_budget(budget)?;
    let ld = log10_upper(&rat(p.degree as i64));
    let lm = log10_upper(&p.max_term());
    let elliptic = || rat(13) + &ld * rat(2) + &lm * rat(2);
    let l = match variant {
        IsogenyVariant::General => {
            let g = p.dim as i64;
            let inner = rat(64 * g * g) * log10_upper(&rat(14 * g)) + &ld + &lm * rat(2);
            inner * rat(alpha(p.dim) as i64)
        }
        IsogenyVariant::Elliptic => elliptic(),
        IsogenyVariant::Power(n) => {
            if n == 0 {
                return Err(Error::InvalidParams("power variant needs N >= 1".into()));
            }
            elliptic() * rat(n as i64)
        }
    };
    Ok(LogMagnitude::from_log10(l, budget).rounded())
}

/// The exponent 1 + ln Y applied to X.
pub fn masser_exponent(y: &LogMagnitude) -> BigRational {
    BigRational::one() + y.ln_upper()
}

/// 4^{e·Y}·X^{1 + ln Y} for X, Y ≥ 1.
pub fn masser_lcm_bound(x: &LogMagnitude, y: &LogMagnitude) -> Result<LogMagnitude> {
    if x.log10.is_negative() || y.log10.is_negative() {
        return Err(Error::InvalidParams("masser bound needs X, Y >= 1".into()));
    }
    let four = e_upper() * pow10_upper(&y.log10)? * log10_upper(&rat(4));
    let l = four + masser_exponent(y) * &x.log10;
    Ok(LogMagnitude::from_log10(l, x.budget).rounded())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum B0Variant {
    General,
    Elliptic,
    /// E × E.
    ESquare,
}

/// The Y of the lcm bound for extensions of degree ≤ d_ext.
pub fn b0_y(p: &CurveParams, d_ext: u64, variant: B0Variant, budget: u32) -> LogMagnitude {
    let d = rat(d_ext as i64);
    let one_plus_ln = BigRational::one() + ln_upper(&d);
    match variant {
        B0Variant::General => LogMagnitude::from_rational(&d, budget)
            .mul(&LogMagnitude::from_rational(&one_plus_ln, budget).powi(2))
            .powi(alpha(p.dim) as i64),
        B0Variant::Elliptic => LogMagnitude::from_rational(&(d * one_plus_ln), budget).powi(2),
        B0Variant::ESquare => LogMagnitude::from_rational(&(d * one_plus_ln), budget).powi(4),
    }
}

/// Bound on the lcm of the b₀ over extensions of degree ≤ d_ext.
pub fn b0_bound(p: &CurveParams, d_ext: u64, variant: B0Variant, budget: u32) -> Result<LogMagnitude> {
    check_budget(budget)?;
    if d_ext == 0 {
        return Err(Error::InvalidParams("extension degree must be at least 1".into()));
    }
    let x = match variant {
        B0Variant::General => isogeny_bound(p, IsogenyVariant::General, budget)?,
        B0Variant::Elliptic => isogeny_bound(p, IsogenyVariant::Elliptic, budget)?,
        B0Variant::ESquare => isogeny_bound(p, IsogenyVariant::Power(2), budget)?,
    };
    masser_lcm_bound(&x, &b0_y(p, d_ext, variant, budget))
}

/// Ψ = 30·b₀(E×E; 2)·b₀(E; 60).
pub fn psi_bound(p: &CurveParams, budget: u32) -> Result<LogMagnitude> {
    let l = log10_upper(&rat(30))
        + b0_bound(p, 2, B0Variant::ESquare, budget)?.log10
        + b0_bound(p, 60, B0Variant::Elliptic, budget)?.log10;
    Ok(LogMagnitude::from_log10(l, budget).rounded())
}

/// D(∞) = b₀(E; 24)⁵·b₀(E×E; 24).
pub fn d_infty_bound(p: &CurveParams, budget: u32) -> Result<LogMagnitude> {
    let l = b0_bound(p, 24, B0Variant::Elliptic, budget)?.log10 * rat(5)
        + b0_bound(p, 24, B0Variant::ESquare, budget)?.log10;
    Ok(LogMagnitude::from_log10(l, budget).rounded())
}

/// b₀(E)⁵·b₀(E×E) over a field of degree `inflation`·d.
fn d_ell_at_inflation(p: &CurveParams, inflation: u64, budget: u32) -> Result<LogMagnitude> {
    let q = p.with_degree(p.degree * inflation);
    let l = b0_bound(&q, 1, B0Variant::Elliptic, budget)?.log10 * rat(5)
        + b0_bound(&q, 1, B0Variant::ESquare, budget)?.log10;
    Ok(LogMagnitude::from_log10(l, budget).rounded())
}

/// D(2), over the field cut out by the mod-4 and det-mod-8 conditions (degree ≤ 192·d).
pub fn d2_bound(p: &CurveParams, budget: u32) -> Result<LogMagnitude> {
    d_ell_at_inflation(p, 192, budget)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AdelicVariant {
    Composed,
    Gamma12,
    Gamma34,
}

impl AdelicVariant {
    pub fn from_tag(s: &str) -> Option<Self> {
        match s {
            "composed" => Some(AdelicVariant::Composed),
            "gamma12" => Some(AdelicVariant::Gamma12),
            "gamma34" => Some(AdelicVariant::Gamma34),
            _ => None,
        }
    }
}

/// Bound on the index of the adelic image in GL₂.
pub fn adelic_index_bound(p: &CurveParams, variant: AdelicVariant, budget: u32) -> Result<LogMagnitude> {
    check_budget(budget)?;
    let ld = log10_upper(&rat(p.degree as i64));
    let m = p.max_term();
    let l = match variant {
        AdelicVariant::Composed => {
            ld + rat(222) * log10_upper(&rat(2))
                + d2_bound(p, budget)?.log10 * rat(144)
                + psi_bound(p, budget)?.log10 * rat(36)
                + d_infty_bound(p, budget)?.log10 * rat(48)
        }
        AdelicVariant::Gamma12 => {
            let gamma2 = rat(24_000_000_000);
            BigRational::from_integer(pow10(21483)) * log10_e_upper()
                + &gamma2 * ld
                + gamma2 * rat(2) * log10_upper(&m)
        }
        AdelicVariant::Gamma34 => {
            rat(19_000_000_000) * log10_e_upper()
                + rat(12395) * log10_upper(&(rat(p.degree as i64) * m))
        }
    };
    Ok(LogMagnitude::from_log10(l, budget).rounded())
}

/// ℓ³³·D⁴⁸ for odd ℓ, 2²⁵⁵·D¹⁴⁴ for ℓ = 2.
pub fn index_divisor_bound(ell: u64, d: &LogMagnitude) -> Result<LogMagnitude> {
    if !crate::padic::is_prime(ell) {
        return Err(Error::NotPrime(ell));
    }
    let (a, b) = if ell == 2 { (255, 144) } else { (33, 48) };
    let l = rat(a) * log10_upper(&rat(ell as i64)) + &d.log10 * rat(b);
    Ok(LogMagnitude::from_log10(l, d.budget).rounded())
}

/// Lower bound N²·c on the degree of the field of definition of a point of order N,
/// with c ≤ 1/(ζ(2)·index).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TorsionBound {
    pub order_squared: BigInt,
    pub per_unit: LogMagnitude,
}

impl TorsionBound {
    pub fn log10_lower(&self) -> BigRational {
        log10_lower(&BigRational::from_integer(self.order_squared.clone())) + &self.per_unit.log10
    }

    pub fn value_lower(&self) -> Result<BigRational> {
        Ok(BigRational::from_integer(self.order_squared.clone()) * self.per_unit.value()?)
    }
}

/// ζ(2) = π²/6 rounded up.
pub fn zeta2_upper() -> BigRational {
    let (_, hi) = pi_bounds();
    &hi * &hi / rat(6)
}

pub fn torsion_degree_bound(index: &LogMagnitude, order: u64) -> Result<TorsionBound> {
    if order == 0 {
        return Err(Error::InvalidParams("order must be at least 1".into()));
    }
    let l = -log10_upper(&zeta2_upper()) - &index.log10;
    let per_unit = LogMagnitude::from_log10(l, index.budget).with_rounding(Rounding::Down).rounded();
    let n = BigInt::from(order);
    Ok(TorsionBound { order_squared: &n * &n, per_unit })
}

/// D(ℓ) together with the first n for which ℓ^{n−v} exceeds it and the
/// congruence level reached in the derived subgroup.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndexReport {
    pub ell: u64,
    pub d_ell: LogMagnitude,
    pub min_n: BigInt,
    pub level: BigInt,
}

/// 16n − 4 for odd ℓ, 48n − 10 for ℓ = 2.
pub fn congruence_level(ell: u64, n: &BigInt) -> BigInt {
    if ell == 2 {
        n * 48 - 10
    } else {
        n * 16 - 4
    }
}

pub fn general_index_bound(ell: u64, p: &CurveParams, budget: u32) -> Result<IndexReport> {
    if !crate::padic::is_prime(ell) {
        return Err(Error::NotPrime(ell));
    }
    let (inflation, v) = if ell == 2 { (192, 1) } else { (24, 0) };
    let d_ell = d_ell_at_inflation(p, inflation, budget)?;
    let q = (&d_ell.log10 / log10_lower(&rat(ell as i64))).floor().to_integer();
    let min_n = q + 1 + v;
    let level = congruence_level(ell, &min_n);
    Ok(IndexReport { ell, d_ell, min_n, level })
}

//! Certified real intervals with rational endpoints, outward dyadic rounding,
//! and enclosures of `e`, `ln` and `log10` at a chosen working precision.

use std::fmt;
use std::ops::{Add, Div, Mul, Sub};

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Starting working precision in bits (about double precision).
pub const START_BITS: u64 = 64;
/// Precision at which floor evaluation gives up.
pub const MAX_BITS: u64 = 1 << 16;

/// A closed interval `[lo, hi]` containing the true value.
#[derive(Clone, PartialEq, Eq)]
pub struct Interval {
    pub lo: BigRational,
    pub hi: BigRational,
}

fn bits(n: &BigInt) -> i64 {
    n.bits() as i64
}

fn pow2(e: i64) -> BigRational {
    let one = BigInt::one();
    if e >= 0 {
        BigRational::from_integer(one << (e as usize))
    } else {
        BigRational::new(one, BigInt::one() << ((-e) as usize))
    }
}

/// Rounds `x` to a dyadic with about `p` significant bits, downward or upward.
fn round_dyadic(x: &BigRational, p: u64, up: bool) -> BigRational {
    if x.is_zero() {
        return x.clone();
    }
    let mag = bits(x.numer()) - bits(x.denom());
    let shift = p as i64 - mag;
    let scaled = x * pow2(shift);
    let n = if up { scaled.ceil() } else { scaled.floor() };
    n * pow2(-shift)
}

impl Interval {
    pub fn point(x: BigRational) -> Self {
        Self { lo: x.clone(), hi: x }
    }

    pub fn from_int(v: i64) -> Self {
        Self::point(BigRational::from_integer(v.into()))
    }

    pub fn new(lo: BigRational, hi: BigRational) -> Self {
        debug_assert!(lo <= hi);
        Self { lo, hi }
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn contains(&self, x: &BigRational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn is_positive(&self) -> bool {
        self.lo.is_positive()
    }

    /// Outward rounding to `p` significant bits, keeping denominators small.
    pub fn round(&self, p: u64) -> Self {
        Self { lo: round_dyadic(&self.lo, p, false), hi: round_dyadic(&self.hi, p, true) }
    }

    pub fn recip(&self) -> Result<Self> {
        if self.lo.is_positive() || self.hi.is_negative() {
            Ok(Self { lo: self.hi.recip(), hi: self.lo.recip() })
        } else {
            Err(Error::Precondition("reciprocal of an interval containing 0".into()))
        }
    }

    pub fn powu(&self, e: u32) -> Self {
        (0..e).fold(Interval::from_int(1), |acc, _| &acc * self)
    }

    /// `⌊x⌋` if it is the same at both endpoints.
    pub fn floor(&self) -> Option<BigInt> {
        let (a, b) = (self.lo.floor().to_integer(), self.hi.floor().to_integer());
        (a == b).then_some(a)
    }

    pub fn midpoint_f64(&self) -> f64 {
        rat_f64(&((&self.lo + &self.hi) / BigRational::from_integer(2.into())))
    }
}

fn rat_f64(r: &BigRational) -> f64 {
    crate::algebra::gaussian::rat_to_f64(r)
}

impl fmt::Debug for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:e}, {:e}]", rat_f64(&self.lo), rat_f64(&self.hi))
    }
}

impl Add for &Interval {
    type Output = Interval;
    fn add(self, o: &Interval) -> Interval {
        Interval { lo: &self.lo + &o.lo, hi: &self.hi + &o.hi }
    }
}

impl Sub for &Interval {
    type Output = Interval;
    fn sub(self, o: &Interval) -> Interval {
        Interval { lo: &self.lo - &o.hi, hi: &self.hi - &o.lo }
    }
}

impl Mul for &Interval {
    type Output = Interval;
    fn mul(self, o: &Interval) -> Interval {
        let c = [&self.lo * &o.lo, &self.lo * &o.hi, &self.hi * &o.lo, &self.hi * &o.hi];
        Interval { lo: c.iter().min().unwrap().clone(), hi: c.iter().max().unwrap().clone() }
    }
}

impl Div for &Interval {
    type Output = Result<Interval>;
    fn div(self, o: &Interval) -> Result<Interval> {
        Ok(self * &o.recip()?)
    }
}

/// Enclosure of `e` with width below `2^{-p}`.
pub fn e_interval(p: u64) -> Interval {
    let eps = pow2(-(p as i64) - 2);
    let mut sum = BigRational::zero();
    let mut term = BigRational::one();
    let mut k = 0u64;
    // the tail after term k is below 2·term/(k+1)
    loop {
        sum += &term;
        k += 1;
        term /= BigRational::from_integer(k.into());
        if term < eps {
            break;
        }
    }
    let tail = &term * BigRational::from_integer(2.into());
    Interval { lo: sum.clone(), hi: sum + tail }.round(p + 8)
}

/// `2·atanh(t)` for `0 ≤ t ≤ 1/3`, to absolute width below `2^{-p}`.
fn two_atanh(t: &BigRational, p: u64) -> Interval {
    let eps = pow2(-(p as i64) - 4);
    let t2 = t * t;
    let mut pow = t.clone();
    let mut sum = BigRational::zero();
    let mut j = 0u64;
    loop {
        let term = &pow / BigRational::from_integer((2 * j + 1).into());
        sum += &term;
        pow = (&pow * &t2).round_to_dyadic(p + 16);
        j += 1;
        // remainder ≤ t^{2j+1} / ((2j+1)(1 − t²)) ≤ 9/8 · pow
        if pow < eps {
            break;
        }
    }
    let rem = &pow * BigRational::new(9.into(), 8.into()) + pow2(-(p as i64) - 8);
    let two = BigRational::from_integer(2.into());
    let slack = pow2(-(p as i64) - 8) * BigRational::from_integer(BigInt::from(j + 1));
    Interval { lo: &two * (&sum - &slack), hi: &two * (&sum + rem + &slack) }.round(p + 8)
}

trait DyadicRound {
    fn round_to_dyadic(&self, p: u64) -> BigRational;
}

impl DyadicRound for BigRational {
    /// Rounds toward zero to a multiple of `2^{-p}`; callers account for the loss.
    fn round_to_dyadic(&self, p: u64) -> BigRational {
        let scaled = self * pow2(p as i64);
        scaled.trunc() * pow2(-(p as i64))
    }
}

/// Enclosure of `ln 2`.
pub fn ln2_interval(p: u64) -> Interval {
    two_atanh(&BigRational::new(1.into(), 3.into()), p)
}

/// Enclosure of `ln x` for rational `x > 0`.
pub fn ln_rational(x: &BigRational, p: u64) -> Result<Interval> {
    if !x.is_positive() {
        return Err(Error::Precondition(format!("logarithm of non-positive {x}")));
    }
    // x = 2^k · y with y ∈ [1, 2)
    let mut k = bits(x.numer()) - bits(x.denom());
    let mut y = x * pow2(-k);
    let two = BigRational::from_integer(2.into());
    while y >= two {
        y /= &two;
        k += 1;
    }
    while y < BigRational::one() {
        y *= &two;
        k -= 1;
    }
    let t = (&y - BigRational::one()) / (&y + BigRational::one());
    let extra = 64 - (k.unsigned_abs() | 1).leading_zeros() as u64;
    let ln_y = two_atanh(&t, p + 4);
    let ln2 = ln2_interval(p + extra + 4);
    Ok(&ln_y + &(&ln2 * &Interval::from_int(k)))
}

/// Enclosure of `ln N` for a positive integer, using its top bits.
pub fn ln_bigint(n: &BigInt, p: u64) -> Result<Interval> {
    if n.sign() != Sign::Plus {
        return Err(Error::Precondition("logarithm of a non-positive integer".into()));
    }
    let keep = p + 16;
    let b = n.bits();
    if b <= keep {
        return ln_rational(&BigRational::from_integer(n.clone()), p);
    }
    let shift = b - keep;
    let top = n >> (shift as usize);
    let lo = ln_rational(&BigRational::from_integer(top.clone()), p + 2)?;
    let hi = ln_rational(&BigRational::from_integer(top + 1), p + 2)?;
    let ln2 = ln2_interval(p + 64);
    let s = &ln2 * &Interval::from_int(shift as i64);
    Ok(Interval { lo: &lo.lo + &s.lo, hi: &hi.hi + &s.hi })
}

/// Enclosure of `ln 10`.
pub fn ln10_interval(p: u64) -> Interval {
    ln_rational(&BigRational::from_integer(10.into()), p).expect("positive")
}

/// Evaluates `f(p)` at increasing precision until its floor is unambiguous.
pub fn certified_floor<F>(what: &str, mut f: F) -> Result<(BigInt, Interval)>
where
    F: FnMut(u64) -> Result<Interval>,
{
    let mut p = START_BITS;
    loop {
        let iv = f(p)?;
        if let Some(k) = iv.floor() {
            return Ok((k, iv));
        }
        if p >= MAX_BITS {
            return Err(Error::PrecisionCap { boundary: format!("{what} ∈ {iv:?}") });
        }
        p *= 4;
    }
}

/// Exact `⌈x⌉` of a rational.
pub fn ceil_rational(x: &BigRational) -> BigInt {
    x.ceil().to_integer()
}

/// Exact `⌊(num/den)^e⌋`, by a shift when `den` is a power of two.
pub fn floor_rational_pow(base: &BigRational, e: u64) -> BigInt {
    let e32 = u32::try_from(e).expect("exponent fits in u32");
    let num = num_traits::pow::pow(base.numer().clone(), e32 as usize);
    let den = base.denom();
    if den.is_one() {
        return num;
    }
    let tz = den.trailing_zeros().unwrap_or(0);
    if (den >> (tz as usize)).is_one() {
        return num >> ((tz * e) as usize);
    }
    let d = num_traits::pow::pow(den.clone(), e32 as usize);
    num.div_floor(&d)
}

/// `log10(x)` as `f64` from a certified enclosure, with its half-width.
pub fn log10_from_ln(ln: &Interval, p: u64) -> Result<(f64, f64)> {
    let l10 = ln10_interval(p);
    let iv = (ln / &l10)?;
    let half = rat_f64(&iv.width()) / 2.0;
    Ok((iv.midpoint_f64(), half))
}

pub fn to_f64(x: &BigRational) -> f64 {
    rat_f64(x)
}

pub fn bigint_to_f64(n: &BigInt) -> f64 {
    n.to_f64().unwrap_or(f64::INFINITY)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    #[test]
    fn e_encloses() {
        for p in [64, 256] {
            let e = e_interval(p);
            assert!(to_f64(&e.lo) <= std::f64::consts::E && std::f64::consts::E <= to_f64(&e.hi));
            assert!(e.width() < pow2(-(p as i64)));
        }
    }

    #[test]
    fn ln_encloses() {
        for (x, want) in [(r(5, 4), 1.25f64.ln()), (r(10, 1), 10f64.ln()), (r(1, 3), (1.0f64 / 3.0).ln()), (r(1, 1), 0.0)] {
            let iv = ln_rational(&x, 80).unwrap();
            assert!(to_f64(&iv.lo) <= want + 1e-15 && want - 1e-15 <= to_f64(&iv.hi), "{x}: {iv:?}");
            assert!(iv.width() < pow2(-70));
        }
        let big = BigInt::from(10).pow(400u32);
        let iv = ln_bigint(&big, 80).unwrap();
        let want = 400.0 * 10f64.ln();
        assert!((iv.midpoint_f64() - want).abs() < 1e-9);
        assert!(iv.width() < pow2(-60));
    }

    #[test]
    fn floors_of_multiples_of_e() {
        for (m, want) in [(21, 57), (24, 65), (1440, 3914), (84, 228)] {
            let (k, _) = certified_floor("m·e", |p| Ok(&e_interval(p) * &Interval::from_int(m))).unwrap();
            assert_eq!(k, BigInt::from(want));
        }
    }

    #[test]
    fn exact_integer_floor_hits_the_cap() {
        let err = certified_floor("three", |_| Ok(Interval::new(r(29, 10), r(31, 10)))).unwrap_err();
        assert!(matches!(err, Error::PrecisionCap { .. }));
    }

    #[test]
    fn floor_pow() {
        assert_eq!(floor_rational_pow(&r(5, 4), 3), BigInt::from(1)); // 125/64
        assert_eq!(floor_rational_pow(&r(5, 4), 10), BigInt::from(9)); // 9.31
        assert_eq!(floor_rational_pow(&r(7, 3), 4), BigInt::from(29)); // 2401/81
        assert_eq!(floor_rational_pow(&r(3, 1), 4), BigInt::from(81));
    }

    #[test]
    fn ceilings() {
        assert_eq!(ceil_rational(&r(7, 2)), BigInt::from(4));
        assert_eq!(ceil_rational(&r(-7, 2)), BigInt::from(-3));
        assert_eq!(ceil_rational(&r(6, 2)), BigInt::from(3));
    }
}

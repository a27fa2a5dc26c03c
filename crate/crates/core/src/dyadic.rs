//! Dyadic fixed-point interval enclosures for binary logarithms.
//!
//! An interval holds big-integer mantissas `lo <= hi` scaled by
//! `2^frac_bits`; the represented set is `[lo, hi] / 2^frac_bits`. All
//! rounding is directed outward, so an enclosure produced here genuinely
//! contains its target. Logarithms are computed from the identity
//! `ln x = 2 atanh((x-1)/(x+1))` with the series evaluated in fixed point,
//! lower bounds flooring every operation and upper bounds rounding up plus a
//! tail bound; a quotient of two such enclosures then yields `log2`.
//!
//! Precision is adaptive: callers ask for a target width `2^-precision_bits`
//! and the working resolution is escalated until the result is narrow
//! enough. Requests beyond `10^6` bits are refused outright
//! ([`crate::Error::ResourceGuard`]), as is runaway escalation.

use std::cmp::Ordering;

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::{Error, Result};

/// Hard ceiling on requested precision, in bits.
pub const MAX_PRECISION_BITS: u32 = 1_000_000;

/// A closed interval of dyadic rationals, `[lo, hi] / 2^frac_bits`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DyadicInterval {
    lo: BigInt,
    hi: BigInt,
    frac_bits: u32,
}

impl DyadicInterval {
    fn new(lo: BigInt, hi: BigInt, frac_bits: u32) -> Self {
        debug_assert!(lo <= hi);
        Self { lo, hi, frac_bits }
    }

    /// The exact point interval at an integer.
    pub fn exact_int(v: i64) -> Self {
        Self::new(BigInt::from(v), BigInt::from(v), 0)
    }

    pub fn frac_bits(&self) -> u32 {
        self.frac_bits
    }

    /// `hi - lo <= 2^-bits`.
    pub fn width_within(&self, bits: u32) -> bool {
        ((&self.hi - &self.lo) << bits) <= (BigInt::one() << self.frac_bits)
    }

    fn aligned(&self, frac_bits: u32) -> (BigInt, BigInt) {
        debug_assert!(frac_bits >= self.frac_bits);
        let shift = frac_bits - self.frac_bits;
        (&self.lo << shift, &self.hi << shift)
    }

    pub fn add(&self, other: &Self) -> Self {
        let fb = self.frac_bits.max(other.frac_bits);
        let (alo, ahi) = self.aligned(fb);
        let (blo, bhi) = other.aligned(fb);
        Self::new(alo + blo, ahi + bhi, fb)
    }

    pub fn sub(&self, other: &Self) -> Self {
        let fb = self.frac_bits.max(other.frac_bits);
        let (alo, ahi) = self.aligned(fb);
        let (blo, bhi) = other.aligned(fb);
        Self::new(alo - bhi, ahi - blo, fb)
    }

    /// Multiply by a nonnegative integer scalar.
    pub fn scale_u64(&self, k: u64) -> Self {
        Self::new(&self.lo * k, &self.hi * k, self.frac_bits)
    }

    pub fn add_int(&self, v: i64) -> Self {
        let off = BigInt::from(v) << self.frac_bits;
        Self::new(&self.lo + &off, &self.hi + off, self.frac_bits)
    }

    pub fn sub_int(&self, v: i64) -> Self {
        self.add_int(-v)
    }

    /// Compare the whole interval against the rational `num/den`.
    /// `Some(Less)` means every point is strictly below it, `Some(Greater)`
    /// strictly above, `Some(Equal)` the exact point interval equal to it;
    /// `None` means the rational falls inside.
    pub fn cmp_ratio(&self, num: i64, den: u64) -> Option<Ordering> {
        assert!(den > 0);
        let target = BigInt::from(num) << self.frac_bits;
        let lo = &self.lo * den;
        let hi = &self.hi * den;
        if hi < target {
            Some(Ordering::Less)
        } else if lo > target {
            Some(Ordering::Greater)
        } else if lo == target && hi == target {
            Some(Ordering::Equal)
        } else {
            None
        }
    }

    /// The lower bound is `>= 0`.
    pub fn nonnegative(&self) -> bool {
        !self.lo.is_negative()
    }

    /// The upper bound is strictly below the integer `v`.
    pub fn below_int(&self, v: i64) -> bool {
        self.hi < (BigInt::from(v) << self.frac_bits)
    }

    /// Every point of `self` is strictly below every point of `other`.
    pub fn definitely_lt(&self, other: &Self) -> bool {
        let fb = self.frac_bits.max(other.frac_bits);
        let (_, ahi) = self.aligned(fb);
        let (blo, _) = other.aligned(fb);
        ahi < blo
    }

    pub fn definitely_gt(&self, other: &Self) -> bool {
        other.definitely_lt(self)
    }

    /// Lower bound as `f64`, display-only.
    pub fn lo_f64(&self) -> f64 {
        Self::mantissa_f64(&self.lo, self.frac_bits)
    }

    /// Upper bound as `f64`, display-only.
    pub fn hi_f64(&self) -> f64 {
        Self::mantissa_f64(&self.hi, self.frac_bits)
    }

    fn mantissa_f64(m: &BigInt, frac_bits: u32) -> f64 {
        m.to_f64().unwrap_or(f64::NAN) / 2f64.powi(frac_bits as i32)
    }

    /// Exact decimal rendering of the lower bound (dyadic rationals have
    /// finite decimal expansions).
    pub fn decimal_lo(&self) -> String {
        Self::mantissa_decimal(&self.lo, self.frac_bits)
    }

    /// Exact decimal rendering of the upper bound.
    pub fn decimal_hi(&self) -> String {
        Self::mantissa_decimal(&self.hi, self.frac_bits)
    }

    fn mantissa_decimal(m: &BigInt, frac_bits: u32) -> String {
        let neg = m.is_negative();
        let mag = m.magnitude() * BigUint::from(5u8).pow(frac_bits);
        let mut s = mag.to_string();
        let fb = frac_bits as usize;
        if s.len() <= fb {
            s = format!("{}{}", "0".repeat(fb + 1 - s.len()), s);
        }
        let split = s.len() - fb;
        let (int_part, frac_part) = s.split_at(split);
        let frac_part = frac_part.trim_end_matches('0');
        let body = if frac_part.is_empty() {
            int_part.to_string()
        } else {
            format!("{int_part}.{frac_part}")
        };
        if neg && body != "0" {
            format!("-{body}")
        } else {
            body
        }
    }
}

fn ceil_div(a: &BigUint, b: &BigUint) -> BigUint {
    (a + (b - BigUint::one())) / b
}

/// Fixed-point enclosure of `ln(u/v) * 2^frac_bits` for `1 <= u/v <= 3`.
fn ln_ratio_fixed(u: &BigUint, v: &BigUint, frac_bits: u32) -> (BigUint, BigUint) {
    assert!(!v.is_zero() && u >= v && u <= &(v * 3u8), "ln_ratio domain");
    let num = u - v;
    if num.is_zero() {
        return (BigUint::zero(), BigUint::zero());
    }
    let den = u + v;
    let unit = BigUint::one() << frac_bits;
    let round_up = &unit - BigUint::one();

    // y = (u-v)/(u+v) lies in (0, 1/2]; the series converges at least two
    // bits per term.
    let scaled = (&num << frac_bits) / &den;
    let y_lo = scaled.clone();
    let y_hi = if (&scaled * &den) == (&num << frac_bits) {
        scaled
    } else {
        y_lo.clone() + BigUint::one()
    };
    let y2_lo = (&y_lo * &y_lo) >> frac_bits;
    let y2_hi = (&y_hi * &y_hi + &round_up) >> frac_bits;

    let mut pow_lo = y_lo;
    let mut pow_hi = y_hi;
    let mut sum_lo = pow_lo.clone();
    let mut sum_hi = pow_hi.clone();
    let mut j: u64 = 3;
    loop {
        pow_lo = (&pow_lo * &y2_lo) >> frac_bits;
        pow_hi = (&pow_hi * &y2_hi + &round_up) >> frac_bits;
        if pow_hi < BigUint::from(j) {
            // Tail of the series from j on: sum y^i/i over odd i >= j is at
            // most (y^j/j) / (1 - y^2) <= (4/3) y^j / j for y <= 1/2.
            sum_hi += ceil_div(&(&pow_hi * 4u8), &(BigUint::from(j) * 3u8)) + BigUint::one();
            break;
        }
        sum_lo += &pow_lo / j;
        sum_hi += ceil_div(&pow_hi, &BigUint::from(j));
        j += 2;
    }
    (sum_lo << 1u8, sum_hi << 1u8)
}

/// Enclosure of `a/b` at `frac_bits`, given fixed-point enclosures of the
/// nonnegative numerator and the positive denominator.
fn div_fixed(
    a: &(BigUint, BigUint),
    b: &(BigUint, BigUint),
    frac_bits: u32,
) -> (BigUint, BigUint) {
    assert!(!b.0.is_zero());
    let lo = (&a.0 << frac_bits) / &b.1;
    let hi = ceil_div(&(&a.1 << frac_bits), &b.0);
    (lo, hi)
}

fn to_interval(bounds: (BigUint, BigUint), frac_bits: u32) -> DyadicInterval {
    DyadicInterval::new(
        BigInt::from_biguint(Sign::Plus, bounds.0),
        BigInt::from_biguint(Sign::Plus, bounds.1),
        frac_bits,
    )
}

fn guard_precision(precision_bits: u32) -> Result<()> {
    if precision_bits < 8 {
        return Err(Error::OutOfRange {
            what: "precision_bits",
            bound: "at least 8",
            got: precision_bits.to_string(),
        });
    }
    if precision_bits > MAX_PRECISION_BITS {
        return Err(Error::ResourceGuard(format!(
            "precision request of {precision_bits} bits exceeds {MAX_PRECISION_BITS}"
        )));
    }
    Ok(())
}

/// Enclosure of `log2(u/v)` with width at most `2^-precision_bits`, for
/// `1 <= u/v <= 3`.
pub(crate) fn log2_ratio(u: &BigUint, v: &BigUint, precision_bits: u32) -> Result<DyadicInterval> {
    guard_precision(precision_bits)?;
    let mut working = precision_bits
        .checked_add(16)
        .ok_or(Error::DenomExpOverflow)?;
    loop {
        let ln_x = ln_ratio_fixed(u, v, working);
        let ln_2 = ln_ratio_fixed(&BigUint::from(2u8), &BigUint::one(), working);
        let q = div_fixed(&ln_x, &ln_2, working);
        let interval = to_interval(q, working);
        if interval.width_within(precision_bits) {
            return Ok(interval);
        }
        working = working.checked_mul(2).ok_or_else(|| {
            Error::ResourceGuard("log2 enclosure escalation overflowed".into())
        })?;
        if working > MAX_PRECISION_BITS.saturating_mul(4) {
            return Err(Error::ResourceGuard(format!(
                "log2 enclosure failed to converge below width 2^-{precision_bits}"
            )));
        }
    }
}

/// Enclosure of `log2(3)` with width at most `2^-precision_bits`.
pub(crate) fn log2_3_uncached(precision_bits: u32) -> Result<DyadicInterval> {
    log2_ratio(&BigUint::from(3u8), &BigUint::one(), precision_bits)
}

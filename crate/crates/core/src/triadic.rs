//! Triadic rationals: numbers of the form `m / 3^r`.
//!
//! The positive triadic rationals are the union over `r >= 0` of `3^-r * N`;
//! they are exactly the numbers with a finite base-3 expansion. The type here
//! keeps the numerator as an arbitrary-precision integer and the denominator
//! exponent as a machine integer, normalized so that either `r = 0` or `3`
//! does not divide `m`. Under that normalization `r` is the least exponent
//! with `3^r * b` integral, and equality of values coincides with equality of
//! representations.
//!
//! Everything in this module is integer arithmetic. In particular
//! [`TriadicRational::floor_scale`] computes `[3^k * b]` by multiplying or
//! flooring against an explicit power of three, and
//! [`TriadicRational::log3_floor`] reads the leading-digit position straight
//! off the base-3 digit count. Floating point appears only in
//! [`TriadicRational::to_decimal_string`], which is display-only by contract
//! (and even that is computed by integer long division).
//!
//! Textual forms:
//!
//! | form          | example    | meaning            |
//! |---------------|------------|--------------------|
//! | canonical     | `17/3^3`   | `17 / 27`          |
//! | plain integer | `26`       | `26`               |
//! | base-3 digits | `2.1_3`    | `2 + 1/3 = 7/3`    |
//!
//! Parsing accepts all three; `Display` emits the canonical form.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use crate::{Error, Result};

/// `3^e` as a big integer.
pub fn pow3(e: u32) -> BigUint {
    BigUint::from(3u8).pow(e)
}

/// Number of base-3 digits of a positive integer (so `3^(len-1) <= n < 3^len`).
pub(crate) fn digit_count_base3(n: &BigUint) -> u64 {
    debug_assert!(!n.is_zero());
    if let Some(x) = n.to_u64() {
        let mut count = 1u64;
        let mut p = 3u64;
        loop {
            if x < p {
                return count;
            }
            count += 1;
            match p.checked_mul(3) {
                Some(next) => p = next,
                // x >= 3^40 and anything below 2^64 has at most 41 digits.
                None => return count,
            }
        }
    }
    n.to_radix_le(3).len() as u64
}

/// `[log3 n]` for a positive machine integer.
pub(crate) fn log3_floor_u64(n: u64) -> u32 {
    (digit_count_base3(&BigUint::from(n)) - 1) as u32
}

/// A nonnegative triadic rational `m / 3^r`, kept normalized.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TriadicRational {
    num: BigUint,
    denom_exp: u32,
}

impl TriadicRational {
    /// `num / 3^denom_exp`, normalized: factors of three shared between the
    /// numerator and the denominator are cancelled, and zero is `0 / 3^0`.
    pub fn new(num: BigUint, denom_exp: u32) -> Self {
        let mut m = num;
        let mut r = denom_exp;
        if m.is_zero() {
            return Self { num: m, denom_exp: 0 };
        }
        let three = BigUint::from(3u8);
        while r > 0 {
            let (q, rem) = m.div_rem(&three);
            if !rem.is_zero() {
                break;
            }
            m = q;
            r -= 1;
        }
        Self { num: m, denom_exp: r }
    }

    pub fn zero() -> Self {
        Self { num: BigUint::zero(), denom_exp: 0 }
    }

    pub fn one() -> Self {
        Self { num: BigUint::one(), denom_exp: 0 }
    }

    pub fn numerator(&self) -> &BigUint {
        &self.num
    }

    /// The normalized denominator exponent: the least `r` with `3^r * b`
    /// integral (the `q` of the round-up branch of `Col3`).
    pub fn denom_exp(&self) -> u32 {
        self.denom_exp
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_integer(&self) -> bool {
        self.denom_exp == 0
    }

    /// `[3^k * self]`, exact.
    pub fn floor_scale(&self, scale_exp: i64) -> BigUint {
        let e = scale_exp - i64::from(self.denom_exp);
        if e >= 0 {
            let e = u32::try_from(e).expect("scale exponent out of range");
            &self.num * pow3(e)
        } else {
            let e = u32::try_from(-e).expect("scale exponent out of range");
            &self.num / pow3(e)
        }
    }

    /// `[log3 self]`: the position of the leading base-3 digit.
    pub fn log3_floor(&self) -> Result<i64> {
        if self.is_zero() {
            return Err(Error::Zero { op: "log3_floor" });
        }
        Ok(digit_count_base3(&self.num) as i64 - 1 - i64::from(self.denom_exp))
    }

    /// `[log3 (self / 2^halvings)]`, exact via power comparisons: the result
    /// is the unique `t` with `3^t * 2^halvings * 3^r <= m < 3^(t+1) * ...`.
    pub fn log3_floor_halved(&self, halvings: u64) -> Result<i64> {
        if self.is_zero() {
            return Err(Error::Zero { op: "log3_floor_halved" });
        }
        let g = self.log3_floor()?;
        // log3(2^halvings) lies in [0, halvings], so t is in [g - halvings, g].
        let holds = |t: i64| -> bool {
            // 3^t <= b / 2^n  <=>  3^(t + r) * 2^n <= m
            let e = t + i64::from(self.denom_exp);
            if e >= 0 {
                let lhs = pow3(u32::try_from(e).expect("exponent out of range")) << halvings;
                lhs <= self.num
            } else {
                let lhs = BigUint::one() << halvings;
                let rhs = &self.num * pow3(u32::try_from(-e).expect("exponent out of range"));
                lhs <= rhs
            }
        };
        let mut lo = g - i64::try_from(halvings).expect("halving count out of range");
        let mut hi = g;
        debug_assert!(holds(lo));
        while lo < hi {
            let mid = lo + (hi - lo + 1) / 2;
            if holds(mid) {
                lo = mid;
            } else {
                hi = mid - 1;
            }
        }
        Ok(lo)
    }

    /// Base-3 digits, most significant first, with the position of the
    /// leading digit. Positions decrease by one per digit; position `-j`
    /// means the coefficient of `3^-j`.
    pub fn digits_base3(&self) -> Result<TernaryDigits> {
        if self.is_zero() {
            return Err(Error::Zero { op: "digits_base3" });
        }
        let digits = self.num.to_radix_be(3);
        let msd_position = digits.len() as i64 - 1 - i64::from(self.denom_exp);
        Ok(TernaryDigits { digits, msd_position })
    }

    /// Membership in `Phi_xi`: the window at the scale of `xi` reads exactly
    /// `xi` and the denominator exponent exceeds `[log3 xi]` (so the value
    /// carries digits strictly below that scale).
    pub fn phi_member(&self, xi: u64) -> Result<bool> {
        if xi < 2 {
            return Err(Error::OutOfRange {
                what: "xi",
                bound: "at least 2",
                got: xi.to_string(),
            });
        }
        let q0 = log3_floor_u64(xi);
        Ok(self.denom_exp > q0 && self.floor_scale(i64::from(q0)) == BigUint::from(xi))
    }

    /// Compare against a small integer without leaving integer arithmetic.
    pub fn cmp_u32(&self, t: u32) -> Ordering {
        self.num.cmp(&(BigUint::from(t) * pow3(self.denom_exp)))
    }

    /// `1 <= self < 3`, the band `Col4` lives on.
    pub fn in_unit_band(&self) -> bool {
        self.cmp_u32(1) != Ordering::Less && self.cmp_u32(3) == Ordering::Less
    }

    /// Multiply by `3^k` (negative `k` divides). Fails only when the
    /// denominator exponent would overflow.
    pub fn times_pow3(&self, k: i64) -> Result<Self> {
        if self.is_zero() {
            return Ok(Self::zero());
        }
        if k >= 0 {
            let k = u32::try_from(k).map_err(|_| Error::DenomExpOverflow)?;
            if k <= self.denom_exp {
                Ok(Self { num: self.num.clone(), denom_exp: self.denom_exp - k })
            } else {
                Ok(Self {
                    num: &self.num * pow3(k - self.denom_exp),
                    denom_exp: 0,
                })
            }
        } else {
            let k = u32::try_from(-k).map_err(|_| Error::DenomExpOverflow)?;
            let r = self.denom_exp.checked_add(k).ok_or(Error::DenomExpOverflow)?;
            Ok(Self::new(self.num.clone(), r))
        }
    }

    /// Base-3 digit string, e.g. `2.1_3` for `7/3`.
    pub fn to_ternary_string(&self) -> String {
        if self.is_zero() {
            return "0_3".to_string();
        }
        let digits = self.num.to_radix_be(3);
        let s: String = digits.iter().map(|d| char::from(b'0' + d)).collect();
        let r = self.denom_exp as usize;
        let out = if r == 0 {
            s
        } else if r >= s.len() {
            format!("0.{}{}", "0".repeat(r - s.len()), s)
        } else {
            format!("{}.{}", &s[..s.len() - r], &s[s.len() - r..])
        };
        format!("{out}_3")
    }

    /// Decimal rendering, display-only: the value floored to
    /// `max_frac_digits` decimal places, trailing zeros trimmed.
    pub fn to_decimal_string(&self, max_frac_digits: usize) -> String {
        let scaled = &self.num * BigUint::from(10u8).pow(max_frac_digits as u32)
            / pow3(self.denom_exp);
        let mut s = scaled.to_string();
        if s.len() <= max_frac_digits {
            s = format!("{}{}", "0".repeat(max_frac_digits + 1 - s.len()), s);
        }
        let split = s.len() - max_frac_digits;
        let (int_part, frac_part) = s.split_at(split);
        let frac_part = frac_part.trim_end_matches('0');
        if frac_part.is_empty() {
            int_part.to_string()
        } else {
            format!("{int_part}.{frac_part}")
        }
    }
}

impl From<u64> for TriadicRational {
    fn from(n: u64) -> Self {
        Self { num: BigUint::from(n), denom_exp: 0 }
    }
}

impl From<BigUint> for TriadicRational {
    fn from(n: BigUint) -> Self {
        Self { num: n, denom_exp: 0 }
    }
}

impl Ord for TriadicRational {
    fn cmp(&self, other: &Self) -> Ordering {
        if self.denom_exp >= other.denom_exp {
            self.num.cmp(&(&other.num * pow3(self.denom_exp - other.denom_exp)))
        } else {
            (&self.num * pow3(other.denom_exp - self.denom_exp)).cmp(&other.num)
        }
    }
}

impl PartialOrd for TriadicRational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for TriadicRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/3^{}", self.num, self.denom_exp)
    }
}

/// Base-3 digits of a triadic rational, most significant first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TernaryDigits {
    /// Each in `0..=2`; the leading digit is nonzero.
    pub digits: Vec<u8>,
    /// Power of three multiplying the leading digit.
    pub msd_position: i64,
}

impl TernaryDigits {
    /// `(position, digit)` pairs, most significant first.
    pub fn positions(&self) -> impl Iterator<Item = (i64, u8)> + '_ {
        self.digits
            .iter()
            .enumerate()
            .map(|(i, &d)| (self.msd_position - i as i64, d))
    }

    /// Rebuild the value the digits came from.
    pub fn reassemble(&self) -> TriadicRational {
        let num = BigUint::from_radix_be(&self.digits, 3).expect("digits are base-3");
        let lsd_position = self.msd_position - (self.digits.len() as i64 - 1);
        if lsd_position >= 0 {
            TriadicRational::new(num * pow3(lsd_position as u32), 0)
        } else {
            TriadicRational::new(num, (-lsd_position) as u32)
        }
    }
}

/// A floor observation `[3^k b]` together with the scale it was taken at.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TernaryWindow {
    pub value: BigUint,
    pub scale_exp: i64,
}

impl TernaryWindow {
    pub fn observe(b: &TriadicRational, scale_exp: i64) -> Self {
        Self { value: b.floor_scale(scale_exp), scale_exp }
    }
}

/// Failure to parse a [`TriadicRational`] literal.
#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum ParseTriadicError {
    #[error("empty input")]
    Empty,
    #[error("malformed triadic literal {0:?}")]
    Malformed(String),
}

impl FromStr for TriadicRational {
    type Err = ParseTriadicError;

    /// Accepts `m/3^r`, a plain decimal integer, or a base-3 digit string
    /// with the `_3` suffix such as `2.1_3`.
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() {
            return Err(ParseTriadicError::Empty);
        }
        let malformed = || ParseTriadicError::Malformed(s.to_string());
        if let Some(body) = s.strip_suffix("_3") {
            let (int_part, frac_part) = match body.split_once('.') {
                Some((_, "")) => return Err(malformed()),
                Some((i, f)) => (i, f),
                None => (body, ""),
            };
            if int_part.is_empty()
                || !int_part.bytes().all(|b| (b'0'..=b'2').contains(&b))
                || !frac_part.bytes().all(|b| (b'0'..=b'2').contains(&b))
            {
                return Err(malformed());
            }
            let digits: Vec<u8> = int_part
                .bytes()
                .chain(frac_part.bytes())
                .map(|b| b - b'0')
                .collect();
            let num = BigUint::from_radix_be(&digits, 3).ok_or_else(malformed)?;
            let r = u32::try_from(frac_part.len()).map_err(|_| malformed())?;
            return Ok(Self::new(num, r));
        }
        if let Some((m, r)) = s.split_once("/3^") {
            let num = BigUint::from_str(m).map_err(|_| malformed())?;
            let r = u32::from_str(r).map_err(|_| malformed())?;
            return Ok(Self::new(num, r));
        }
        let num = BigUint::from_str(s).map_err(|_| malformed())?;
        Ok(Self::new(num, 0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tr(num: u64, denom_exp: u32) -> TriadicRational {
        TriadicRational::new(BigUint::from(num), denom_exp)
    }

    #[test]
    fn normalize_strips_shared_powers_of_three() {
        let b = tr(9, 2);
        assert_eq!(b.numerator(), &BigUint::from(1u8));
        assert_eq!(b.denom_exp(), 0);
        let b = tr(6, 1);
        assert_eq!(b.numerator(), &BigUint::from(2u8));
        assert_eq!(b.denom_exp(), 0);
        let b = tr(22, 2);
        assert_eq!(b.numerator(), &BigUint::from(22u8));
        assert_eq!(b.denom_exp(), 2);
    }

    #[test]
    fn normalize_zero_to_canonical_form() {
        let z = tr(0, 7);
        assert!(z.is_zero());
        assert_eq!(z.denom_exp(), 0);
        assert_eq!(z, TriadicRational::zero());
    }

    #[test]
    fn floor_scale_examples() {
        assert_eq!(tr(11, 2).floor_scale(2), BigUint::from(11u8));
        assert_eq!(tr(7, 1).floor_scale(0), BigUint::from(2u8));
        assert_eq!(tr(26, 2).floor_scale(-1), BigUint::zero());
        assert_eq!(tr(26, 2).floor_scale(0), BigUint::from(2u8));
        assert_eq!(tr(23, 2).floor_scale(1), BigUint::from(7u8));
    }

    #[test]
    fn log3_floor_examples() {
        assert_eq!(tr(17, 3).log3_floor().unwrap(), -1);
        assert_eq!(tr(1, 0).log3_floor().unwrap(), 0);
        assert_eq!(tr(26, 0).log3_floor().unwrap(), 2);
        assert_eq!(tr(7, 1).log3_floor().unwrap(), 0);
        assert_eq!(
            TriadicRational::zero().log3_floor(),
            Err(Error::Zero { op: "log3_floor" })
        );
    }

    #[test]
    fn log3_floor_halved_matches_direct_floor() {
        // [log3 (7/3 / 4)] = [log3 7/12] = -1
        assert_eq!(tr(7, 1).log3_floor_halved(2).unwrap(), -1);
        // [log3 (2 / 1)] = 0, [log3 (2 / 2)] = 0, [log3 (2 / 4)] = -1
        assert_eq!(tr(2, 0).log3_floor_halved(0).unwrap(), 0);
        assert_eq!(tr(2, 0).log3_floor_halved(1).unwrap(), 0);
        assert_eq!(tr(2, 0).log3_floor_halved(2).unwrap(), -1);
        // large halving counts stay exact
        assert_eq!(tr(1, 0).log3_floor_halved(64).unwrap(), -41);
        // 3^40 <= 2^64/1 < 3^41 would mean -41: check 3^40 * 2^-64 bracket
        assert!(pow3(40) < (BigUint::one() << 64u32));
        assert!(pow3(41) > (BigUint::one() << 64u32));
    }

    #[test]
    fn digits_base3_examples() {
        let d = tr(26, 0).digits_base3().unwrap();
        assert_eq!(d.digits, vec![2, 2, 2]);
        assert_eq!(d.msd_position, 2);
        assert_eq!(
            d.positions().collect::<Vec<_>>(),
            vec![(2, 2), (1, 2), (0, 2)]
        );

        let d = tr(7, 1).digits_base3().unwrap();
        assert_eq!(d.digits, vec![2, 1]);
        assert_eq!(d.msd_position, 0);

        let d = tr(1, 2).digits_base3().unwrap();
        assert_eq!(d.digits, vec![1]);
        assert_eq!(d.msd_position, -2);

        assert!(TriadicRational::zero().digits_base3().is_err());
    }

    #[test]
    fn digits_reassemble_round_trip() {
        for (m, r) in [(26u64, 0u32), (7, 1), (17, 3), (1, 2), (53, 4), (9, 0)] {
            let b = tr(m, r);
            assert_eq!(b.digits_base3().unwrap().reassemble(), b);
        }
    }

    #[test]
    fn phi_member_examples() {
        assert!(tr(7, 1).phi_member(2).unwrap());
        assert!(!tr(2, 0).phi_member(2).unwrap());
        assert!(tr(23, 2).phi_member(7).unwrap());
        assert!(!tr(23, 2).phi_member(8).unwrap());
        assert!(tr(22, 2).phi_member(7).unwrap());
        assert_eq!(
            tr(7, 1).phi_member(1),
            Err(Error::OutOfRange { what: "xi", bound: "at least 2", got: "1".into() })
        );
    }

    #[test]
    fn ordering_is_value_ordering() {
        assert!(tr(7, 1) > tr(2, 0));
        assert!(tr(7, 1) < tr(22, 2));
        assert_eq!(tr(9, 2).cmp(&tr(1, 0)), Ordering::Equal);
        assert!(tr(11, 2) < tr(17, 2));
        assert_eq!(tr(7, 1).cmp_u32(2), Ordering::Greater);
        assert_eq!(tr(7, 1).cmp_u32(3), Ordering::Less);
        assert!(tr(7, 1).in_unit_band());
        assert!(!tr(17, 3).in_unit_band());
        assert!(tr(1, 0).in_unit_band());
    }

    #[test]
    fn times_pow3_rescales_and_renormalizes() {
        assert_eq!(tr(17, 3).times_pow3(1).unwrap(), tr(17, 2));
        assert_eq!(tr(17, 3).times_pow3(3).unwrap(), tr(17, 0));
        assert_eq!(tr(17, 3).times_pow3(4).unwrap(), tr(51, 0));
        assert_eq!(tr(6, 0).times_pow3(-1).unwrap(), tr(2, 0));
        assert_eq!(tr(2, 0).times_pow3(-2).unwrap(), tr(2, 2));
    }

    #[test]
    fn ternary_strings() {
        assert_eq!(tr(7, 1).to_ternary_string(), "2.1_3");
        assert_eq!(tr(26, 0).to_ternary_string(), "222_3");
        assert_eq!(tr(1, 2).to_ternary_string(), "0.01_3");
        assert_eq!(TriadicRational::zero().to_ternary_string(), "0_3");
        assert_eq!(tr(17, 3).to_ternary_string(), "0.122_3");
    }

    #[test]
    fn decimal_strings_are_floored_and_trimmed() {
        assert_eq!(tr(7, 1).to_decimal_string(12), "2.333333333333");
        assert_eq!(tr(5, 1).to_decimal_string(12), "1.666666666666");
        assert_eq!(tr(2, 0).to_decimal_string(12), "2");
        assert_eq!(tr(3, 1).to_decimal_string(12), "1");
        assert_eq!(tr(1, 2).to_decimal_string(4), "0.1111");
    }

    #[test]
    fn parse_accepts_all_three_forms() {
        assert_eq!("17/3^3".parse::<TriadicRational>().unwrap(), tr(17, 3));
        assert_eq!("26".parse::<TriadicRational>().unwrap(), tr(26, 0));
        assert_eq!("2.1_3".parse::<TriadicRational>().unwrap(), tr(7, 1));
        assert_eq!("222_3".parse::<TriadicRational>().unwrap(), tr(26, 0));
        assert_eq!("0.01_3".parse::<TriadicRational>().unwrap(), tr(1, 2));
        assert_eq!("9/3^2".parse::<TriadicRational>().unwrap(), tr(1, 0));
        assert_eq!(" 7/3^1 ".parse::<TriadicRational>().unwrap(), tr(7, 1));
    }

    #[test]
    fn parse_rejects_malformed_literals() {
        for bad in ["", "abc", "3.1_3", "1._3", "._3", "_3", "7/3^", "7/2^1", "-4", "1.2.3_3"] {
            assert!(bad.parse::<TriadicRational>().is_err(), "{bad:?} parsed");
        }
    }

    #[test]
    fn display_round_trips() {
        for (m, r) in [(17u64, 3u32), (7, 1), (26, 0), (0, 0), (22, 2)] {
            let b = tr(m, r);
            assert_eq!(b.to_string().parse::<TriadicRational>().unwrap(), b);
            assert_eq!(b.to_ternary_string().parse::<TriadicRational>().unwrap(), b);
        }
    }

    #[test]
    fn windows_record_scale_and_value() {
        let w = TernaryWindow::observe(&tr(23, 2), 1);
        assert_eq!(w.value, BigUint::from(7u8));
        assert_eq!(w.scale_exp, 1);
    }

    #[test]
    fn digit_counts() {
        assert_eq!(digit_count_base3(&BigUint::from(1u8)), 1);
        assert_eq!(digit_count_base3(&BigUint::from(2u8)), 1);
        assert_eq!(digit_count_base3(&BigUint::from(3u8)), 2);
        assert_eq!(digit_count_base3(&BigUint::from(80u8)), 4);
        assert_eq!(digit_count_base3(&BigUint::from(81u8)), 5);
        assert_eq!(digit_count_base3(&pow3(40)), 41);
        assert_eq!(digit_count_base3(&(pow3(40) - 1u8)), 40);
        assert_eq!(digit_count_base3(&pow3(100)), 101);
        assert_eq!(log3_floor_u64(80), 3);
    }
}

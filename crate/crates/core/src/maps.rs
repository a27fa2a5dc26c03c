//! The three Collatz maps and the orbit drivers built on them.
//!
//! `col2` is the accelerated Collatz step on positive integers:
//! `a -> (3a+1)/2` for odd `a`, `a -> a/2` for even `a`.
//!
//! `col3` acts on positive triadic rationals. Halving an even numerator stays
//! on the triadic lattice; halving an odd numerator does not, and the step
//! rounds up by `3^-(q+1)/2` where `q` is the denominator exponent:
//! `(m/3^q + 3^-(q+1)) / 2 = ((3m+1)/2) / 3^(q+1)`. On numerators `col3` is
//! therefore exactly `col2`, with the denominator exponent growing by one on
//! each odd step.
//!
//! `col4` is `col3` rescaled to stay on `[1, 3)`: it applies `col3` and
//! multiplies by `3` when the input was below `2`. Its arithmetic here is
//! written out per branch on purpose, so that checks pitting `col4` iterates
//! against rescaled `col3` iterates exercise two genuinely distinct paths.
//!
//! [`orbit`] runs `col2` from a seed and records, at every index, the
//! leading-digit exponent `q = [log3 a]` and the rescaled value
//! `c = a / 3^q` in `[1, 3)`. Along the way it verifies the coupling
//! `c_(alpha+1) = col4(c_alpha)` for every `alpha >= 1`, and for `alpha = 0`
//! too when `3` does not divide the seed; a violation is reported as
//! [`Error::Invariant`], never silently ignored.

use std::cmp::Ordering;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::triadic::{digit_count_base3, TriadicRational};
use crate::{Error, Result};

/// One accelerated Collatz step on a positive integer.
pub fn col2_step(a: &BigUint) -> Result<BigUint> {
    if a.is_zero() {
        return Err(Error::Zero { op: "col2_step" });
    }
    if a.bit(0) {
        Ok((a * 3u8 + 1u8) >> 1)
    } else {
        Ok(a >> 1)
    }
}

/// One `col3` step: exact halving when the numerator is even, halving with
/// the `3^-(q+1)/2` round-up otherwise.
pub fn col3_step(b: &TriadicRational) -> Result<TriadicRational> {
    if b.is_zero() {
        return Err(Error::Zero { op: "col3_step" });
    }
    let m = b.numerator();
    if m.bit(0) {
        let r = b
            .denom_exp()
            .checked_add(1)
            .ok_or(Error::DenomExpOverflow)?;
        Ok(TriadicRational::new((m * 3u8 + 1u8) >> 1, r))
    } else {
        Ok(TriadicRational::new(m >> 1, b.denom_exp()))
    }
}

/// `col3` applied `n` times.
pub fn col3_iterate(b: &TriadicRational, n: u64) -> Result<TriadicRational> {
    let mut cur = b.clone();
    for _ in 0..n {
        cur = col3_step(&cur)?;
    }
    Ok(cur)
}

/// One `col4` step on `[1, 3)`. The branch arithmetic is self-contained:
/// on `[2, 3)` it is the `col3` formula, on `[1, 2)` the trailing factor of
/// three is folded into the denominator exponent directly.
pub fn col4_step(b: &TriadicRational) -> Result<TriadicRational> {
    if !b.in_unit_band() {
        return Err(Error::OutOfRange {
            what: "col4_step input",
            bound: "in [1, 3)",
            got: b.to_string(),
        });
    }
    let m = b.numerator();
    let r = b.denom_exp();
    let out = if b.cmp_u32(2) != Ordering::Less {
        // [2, 3): plain col3 step.
        if m.bit(0) {
            let r = r.checked_add(1).ok_or(Error::DenomExpOverflow)?;
            TriadicRational::new((m * 3u8 + 1u8) >> 1, r)
        } else {
            TriadicRational::new(m >> 1, r)
        }
    } else {
        // [1, 2): col3 then times three, fused.
        if m.bit(0) {
            TriadicRational::new((m * 3u8 + 1u8) >> 1, r)
        } else if r > 0 {
            TriadicRational::new(m >> 1, r - 1)
        } else {
            TriadicRational::new((m >> 1) * 3u8, 0)
        }
    };
    if !out.in_unit_band() {
        return Err(Error::Invariant(format!(
            "col4_step left [1, 3): {b} -> {out}"
        )));
    }
    Ok(out)
}

/// One row of [`rescaled_iterates`]: the `n`-th `col3` iterate, the exponent
/// `k = -[log3 col3^n(b)]` it must be rescaled by, and the `n`-th `col4`
/// iterate that rescaling has to reproduce.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RescaledIterate {
    pub n: u64,
    pub col3_value: TriadicRational,
    pub rescale_exp: i64,
    pub col4_value: TriadicRational,
}

/// The first `n_max` iterates of `col4` alongside `3^k col3^n(b)`, verifying
/// at every step that the two routes agree. `b` must lie in `[1, 3)`.
pub fn rescaled_iterates(b: &TriadicRational, n_max: u64) -> Result<Vec<RescaledIterate>> {
    if !b.in_unit_band() {
        return Err(Error::OutOfRange {
            what: "rescaled_iterates input",
            bound: "in [1, 3)",
            got: b.to_string(),
        });
    }
    let mut rows = Vec::new();
    let mut c3 = b.clone();
    let mut c4 = b.clone();
    for n in 1..=n_max {
        c3 = col3_step(&c3)?;
        c4 = col4_step(&c4)?;
        let k = -c3.log3_floor()?;
        let rescaled = c3.times_pow3(k)?;
        if rescaled != c4 {
            return Err(Error::Invariant(format!(
                "rescaled col3 disagrees with col4 at n={n}: b={b}, 3^{k} col3^n = {rescaled}, col4^n = {c4}"
            )));
        }
        rows.push(RescaledIterate {
            n,
            col3_value: c3.clone(),
            rescale_exp: k,
            col4_value: c4.clone(),
        });
    }
    Ok(rows)
}

/// One orbit entry: the integer `a`, its leading-digit exponent `q`, and the
/// rescaled representative `c = a / 3^q` in `[1, 3)`. `window` is `[3^p c]`
/// when the orbit was asked to observe windows at scale `p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitRecord {
    pub alpha: u64,
    pub a: BigUint,
    pub q: i64,
    pub c: TriadicRational,
    pub window: Option<BigUint>,
}

/// Why an orbit stopped.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OrbitEnd {
    /// The orbit reached `1` (its record is included).
    ReachedOne,
    /// `max_steps` applications of `col2` were exhausted first. This is an
    /// outcome, not an error.
    StepLimit,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Orbit {
    pub records: Vec<OrbitRecord>,
    pub end: OrbitEnd,
}

impl Orbit {
    pub fn reached_one(&self) -> bool {
        self.end == OrbitEnd::ReachedOne
    }
}

/// Run `col2` from `a0` until `1` is reached or `max_steps` steps have been
/// taken, recording `(a, q, c)` at every index and verifying the rescaled
/// coupling `c_(alpha+1) = col4(c_alpha)` along the way. The coupling check
/// is armed at every step whose `a` is not divisible by 3; for seeds with
/// `3 | a0` that skips the initial run of multiples of 3 (just the seed
/// itself unless `6 | a0`), after which no multiple of 3 can reappear.
pub fn orbit(a0: &BigUint, max_steps: u64) -> Result<Orbit> {
    orbit_impl(a0, max_steps, None)
}

/// Same as [`orbit`], additionally observing the window `[3^p c]` at every
/// record.
pub fn orbit_with_window(a0: &BigUint, max_steps: u64, window_scale: i64) -> Result<Orbit> {
    orbit_impl(a0, max_steps, Some(window_scale))
}

fn orbit_impl(a0: &BigUint, max_steps: u64, window_scale: Option<i64>) -> Result<Orbit> {
    if a0.is_zero() {
        return Err(Error::Zero { op: "orbit" });
    }
    let mut records = Vec::new();
    let mut a = a0.clone();
    // The coupling c_(alpha+1) = col4(c_alpha) presumes numerator(c_alpha)
    // is a_alpha itself, which fails exactly when 3 divides a_alpha and c
    // renormalizes. Divisibility by 3 can only occur in an initial run of
    // the orbit (col2 output is never a fresh multiple of 3), so the check
    // is skipped on transitions out of that run and armed everywhere else.
    let mut prev: Option<(TriadicRational, bool)> = None;
    let mut alpha = 0u64;
    let end = loop {
        let q = digit_count_base3(&a) as i64 - 1;
        let c = TriadicRational::new(a.clone(), q as u32);
        if let Some((prev_c, prev_clean)) = &prev {
            if *prev_clean {
                let expected = col4_step(prev_c)?;
                if expected != c {
                    return Err(Error::Invariant(format!(
                        "rescaled coupling failed at alpha={alpha}: col4({prev_c}) = {expected}, c = {c}"
                    )));
                }
            }
        }
        let window = window_scale.map(|p| c.floor_scale(p));
        prev = Some((c.clone(), (&a % 3u8) != BigUint::zero()));
        records.push(OrbitRecord { alpha, a: a.clone(), q, c, window });
        if a == BigUint::one() {
            break OrbitEnd::ReachedOne;
        }
        if alpha == max_steps {
            break OrbitEnd::StepLimit;
        }
        a = col2_step(&a)?;
        alpha += 1;
    };
    Ok(Orbit { records, end })
}

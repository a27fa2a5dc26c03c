//! Constructions driven by the irrationality of `log2(3)`.
//!
//! The guiding split: integer parts of `k log2(3)` are always decided by
//! exact big-integer power comparison (`2^n <= 3^k < 2^(n+1)`), while
//! fractional-part comparisons use adaptive-precision dyadic intervals,
//! escalated until decidable. Ties are impossible because `log2(3)` is
//! irrational, so escalation always terminates (subject to the resource
//! guard).
//!
//! Three constructions live here:
//!
//! * record pairs: the `k` at which `frac(k log2 3)` sets a new running
//!   maximum, paired with `n = [k log2 3] + 1` so that `3^k / 2^n` climbs
//!   toward `1` from below;
//! * prefix targets: an integer `psi >= 2` decomposed as `psi0 = 3^(-p) psi`
//!   in `[1, 3)`, with its landing offset `tau`;
//! * steering pairs: `(k, n)` making `3^(k+p) / 2^n` land within `1/3` of
//!   `psi`, certified by exact integer inequalities.

use std::sync::Mutex;

use num_bigint::BigUint;
use num_traits::One;

use crate::dyadic::{self, DyadicInterval};
use crate::triadic::{log3_floor_u64, pow3, TriadicRational};
use crate::{Error, Result};

static LOG2_3_CACHE: Mutex<Option<DyadicInterval>> = Mutex::new(None);

/// Rigorous enclosure of `log2(3)` with width at most `2^-precision_bits`.
///
/// The widest-precision enclosure computed so far is cached process-wide;
/// narrower requests are served from it.
pub fn log2_3(precision_bits: u32) -> Result<DyadicInterval> {
    {
        let cache = LOG2_3_CACHE.lock().expect("log2_3 cache poisoned");
        if let Some(iv) = cache.as_ref() {
            if iv.width_within(precision_bits) {
                return Ok(iv.clone());
            }
        }
    }
    let fresh = dyadic::log2_3_uncached(precision_bits)?;
    let mut cache = LOG2_3_CACHE.lock().expect("log2_3 cache poisoned");
    match cache.as_ref() {
        Some(iv) if iv.width_within(precision_bits) => Ok(iv.clone()),
        _ => {
            *cache = Some(fresh.clone());
            Ok(fresh)
        }
    }
}

/// `3^k` with `k` given as `u64`, guarded against absurd exponents.
fn pow3_u64(k: u64) -> Result<BigUint> {
    let e = u32::try_from(k).map_err(|_| Error::ResourceGuard(format!("3^{k} is too large")))?;
    if e > 2_000_000 {
        return Err(Error::ResourceGuard(format!("3^{k} is too large")));
    }
    Ok(pow3(e))
}

/// The integer and fractional parts of `k log2(3)`.
#[derive(Clone, Debug)]
pub struct FracPart {
    pub k: u64,
    /// `[k log2 3]`, determined exactly: `2^n <= 3^k < 2^(n+1)`.
    pub n: u64,
    /// Enclosure of `k log2 3 - n`, contained in `[0, 1)`.
    pub frac: DyadicInterval,
}

/// [`frac_part_at`] with the default width target of `2^-64`.
pub fn frac_part(k: u64) -> Result<FracPart> {
    frac_part_at(k, 64)
}

/// Integer part of `k log2 3` by exact power comparison, fractional part as
/// an interval of width at most `2^-precision_bits` contained in `[0, 1)`.
pub fn frac_part_at(k: u64, precision_bits: u32) -> Result<FracPart> {
    if k == 0 {
        return Err(Error::OutOfRange {
            what: "frac_part k",
            bound: "at least 1",
            got: "0".into(),
        });
    }
    let n = pow3_u64(k)?.bits() - 1;
    // Scaling by k widens the enclosure by a factor of k; start with enough
    // slack to usually succeed on the first pass.
    let mut prec = precision_bits.saturating_add(64 - k.leading_zeros());
    loop {
        let frac = log2_3(prec)?.scale_u64(k).sub_int(n as i64);
        if frac.width_within(precision_bits) && frac.nonnegative() && frac.below_int(1) {
            return Ok(FracPart { k, n, frac });
        }
        prec = prec
            .checked_mul(2)
            .ok_or_else(|| Error::ResourceGuard("frac_part escalation overflowed".into()))?;
    }
}

/// Which construction produced an [`ApproxPair`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PairKind {
    /// Running-maximum fractional part, `n = [k log2 3] + 1`.
    Record,
    /// Steering pair for a prefix target.
    Steer,
}

/// An exact big-integer witness `lhs < mid < rhs`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub lhs: BigUint,
    pub mid: BigUint,
    pub rhs: BigUint,
}

impl Certificate {
    /// Re-verify the strict inequalities.
    pub fn holds(&self) -> bool {
        self.lhs < self.mid && self.mid < self.rhs
    }
}

/// A certified pair `(k, n)` relating `3^k` to `2^n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ApproxPair {
    pub k: u64,
    pub n: u64,
    pub kind: PairKind,
    /// Record kind: `2^(n-1) < 3^k < 2^n`. Steer kind: the scaled window
    /// inequality, see [`steering_pairs`].
    pub certificate: Certificate,
}

/// Decide `frac(ka log2 3) > frac(kb log2 3)` rigorously, escalating
/// precision until the enclosures separate.
fn frac_gt(ka: u64, kb: u64) -> Result<bool> {
    debug_assert_ne!(ka, kb);
    let mut prec = 64u32;
    loop {
        let fa = frac_part_at(ka, prec)?;
        let fb = frac_part_at(kb, prec)?;
        if fa.frac.definitely_gt(&fb.frac) {
            return Ok(true);
        }
        if fa.frac.definitely_lt(&fb.frac) {
            return Ok(false);
        }
        prec = prec
            .checked_mul(2)
            .ok_or_else(|| Error::ResourceGuard("record comparison escalation overflowed".into()))?;
    }
}

/// The increasing sequence of `k <= k_max` at which `frac(k log2 3)` attains
/// a new running maximum, each paired with `n = [k log2 3] + 1` and the
/// exact certificate `2^(n-1) < 3^k < 2^n`.
pub fn record_pairs(k_max: u64) -> Result<Vec<ApproxPair>> {
    if k_max == 0 {
        return Err(Error::OutOfRange {
            what: "record_pairs k_max",
            bound: "at least 1",
            got: "0".into(),
        });
    }
    let mut out: Vec<ApproxPair> = Vec::new();
    let mut best_k: Option<u64> = None;
    let mut pow = BigUint::one();
    for k in 1..=k_max {
        pow *= 3u8;
        let is_record = match best_k {
            None => true,
            Some(b) => frac_gt(k, b)?,
        };
        if !is_record {
            continue;
        }
        best_k = Some(k);
        let n = pow.bits(); // n_floor + 1
        let certificate = Certificate {
            lhs: BigUint::one() << (n - 1),
            mid: pow.clone(),
            rhs: BigUint::one() << n,
        };
        if !certificate.holds() {
            return Err(Error::Invariant(format!(
                "record certificate failed for k={k}, n={n}"
            )));
        }
        out.push(ApproxPair {
            k,
            n,
            kind: PairKind::Record,
            certificate,
        });
    }
    Ok(out)
}

/// Which side of `2` the normalized prefix `psi0` falls on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CaseTag {
    /// `1 <= psi0 < 2`
    Low,
    /// `2 <= psi0 < 3`
    High,
}

/// A prefix `psi` normalized into `[1, 3)`, with the landing offset `tau`.
#[derive(Clone, Debug)]
pub struct PrefixTarget {
    pub psi: u64,
    /// `[log3 psi]`
    pub p: u32,
    /// `3^(-p) psi`, exactly
    pub psi0: TriadicRational,
    pub case_tag: CaseTag,
    /// `log2 psi0` (low case) or `log2 psi0 + 1 - log2 3` (high case);
    /// enclosed in `[0, 1)`, exact zero when `psi` is a power of `3`.
    pub tau: DyadicInterval,
}

fn tau_interval(psi: u64, p: u32, case_tag: CaseTag) -> Result<DyadicInterval> {
    let psi0_num = BigUint::from(psi);
    let den = pow3(p);
    if case_tag == CaseTag::Low && psi0_num == den {
        return Ok(DyadicInterval::exact_int(0));
    }
    let mut prec = 66u32;
    loop {
        let l0 = dyadic::log2_ratio(&psi0_num, &den, prec)?;
        let tau = match case_tag {
            CaseTag::Low => l0,
            CaseTag::High => l0.add_int(1).sub(&log2_3(prec)?),
        };
        if tau.width_within(64) && tau.nonnegative() && tau.below_int(1) {
            return Ok(tau);
        }
        prec = prec
            .checked_mul(2)
            .ok_or_else(|| Error::ResourceGuard("tau escalation overflowed".into()))?;
    }
}

/// Decompose `psi >= 2` as `psi0 = 3^(-p) psi in [1, 3)` and compute its
/// case tag (by exact comparison with `2 * 3^p`) and landing offset `tau`.
pub fn prefix_target(psi: u64) -> Result<PrefixTarget> {
    if psi < 2 {
        return Err(Error::OutOfRange {
            what: "prefix_target psi",
            bound: "at least 2",
            got: psi.to_string(),
        });
    }
    let p = log3_floor_u64(psi);
    let psi0 = TriadicRational::new(BigUint::from(psi), p);
    let case_tag = if BigUint::from(psi) < (pow3(p) * 2u8) {
        CaseTag::Low
    } else {
        CaseTag::High
    };
    let tau = tau_interval(psi, p, case_tag)?;
    Ok(PrefixTarget {
        psi,
        p,
        psi0,
        case_tag,
        tau,
    })
}

/// Steering pairs for `target`: up to `count` pairs `(k, n)` with
/// `k <= k_max`, each certified by the exact inequality
///
/// * low case:  `(3 psi - 1) 2^n     < 3^(k+p+1) < (3 psi + 1) 2^n`
/// * high case: `(3 psi - 1) 2^(n+1) < 3^(k+p+2) < (3 psi + 1) 2^(n+1)`
///
/// both equivalent to `|3^(k+p) / 2^n - psi| < 1/3` (after multiplying the
/// high case through by the extra factor `3/2`). Exhausting `k_max` early is
/// reported by returning fewer pairs, not by an error.
pub fn steering_pairs(target: &PrefixTarget, count: usize, k_max: u64) -> Result<Vec<ApproxPair>> {
    if count == 0 {
        return Err(Error::OutOfRange {
            what: "steering_pairs count",
            bound: "at least 1",
            got: "0".into(),
        });
    }
    let lo_c = BigUint::from(target.psi) * 3u8 - 1u8;
    let hi_c = BigUint::from(target.psi) * 3u8 + 1u8;
    let exp_off = match target.case_tag {
        CaseTag::Low => target.p + 1,
        CaseTag::High => target.p + 2,
    };
    let mut out = Vec::new();
    let mut mid = pow3(exp_off);
    for k in 1..=k_max {
        mid *= 3u8; // 3^(k + exp_off)
        // The shift s must satisfy lo_c * 2^s < mid < hi_c * 2^s; the window
        // is narrower than one octave, so at most one s can work.
        let t = (&mid / &hi_c).bits();
        for s in t.saturating_sub(1)..=t + 1 {
            if (&lo_c << s) < mid && mid < (&hi_c << s) {
                let n = match target.case_tag {
                    CaseTag::Low => s,
                    CaseTag::High => {
                        if s < 2 {
                            continue;
                        }
                        s - 1
                    }
                };
                if n == 0 {
                    continue;
                }
                let certificate = Certificate {
                    lhs: &lo_c << s,
                    mid: mid.clone(),
                    rhs: &hi_c << s,
                };
                debug_assert!(certificate.holds());
                out.push(ApproxPair {
                    k,
                    n,
                    kind: PairKind::Steer,
                    certificate,
                });
                break;
            }
        }
        if out.len() == count {
            break;
        }
    }
    Ok(out)
}

/// The base-3 prefix order: `phi` precedes `theta` iff the base-3 digits of
/// `phi` form an initial segment of those of `theta`, i.e.
/// `phi = [theta / 3^(q-p)]` with `p = [log3 phi] <= q = [log3 theta]`.
pub fn prefix_order(phi: u64, theta: u64) -> bool {
    if phi == 0 || theta == 0 {
        return phi == theta;
    }
    let p = log3_floor_u64(phi);
    let q = log3_floor_u64(theta);
    q >= p && theta / 3u64.pow(q - p) == phi
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::cmp::Ordering;

    #[test]
    fn log2_3_is_cached_and_consistent() {
        let a = log2_3(64).expect("enclosure");
        let b = log2_3(64).expect("enclosure");
        assert!(a.width_within(64) && b.width_within(64));
        assert!(!a.definitely_lt(&b) && !a.definitely_gt(&b));
        let wide = log2_3(256).expect("enclosure");
        assert!(wide.width_within(256));
    }

    #[test]
    fn frac_part_small_k() {
        let f1 = frac_part(1).expect("k=1");
        assert_eq!(f1.n, 1);
        assert!((f1.frac.lo_f64() - 0.5849625007).abs() < 1e-9);
        let f2 = frac_part(2).expect("k=2");
        assert_eq!(f2.n, 3);
        assert!((f2.frac.lo_f64() - 0.1699250014).abs() < 1e-9);
        let f12 = frac_part(12).expect("k=12");
        assert_eq!(f12.n, 19);
        assert!((f12.frac.lo_f64() - 0.0195500086).abs() < 1e-9);
        for f in [&f1, &f2, &f12] {
            assert!(f.frac.width_within(64));
            assert!(f.frac.nonnegative() && f.frac.below_int(1));
        }
    }

    #[test]
    fn frac_part_rejects_zero() {
        assert!(matches!(frac_part(0), Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn record_pairs_match_known_sequence() {
        let small = record_pairs(6).expect("k_max=6");
        assert_eq!(small.iter().map(|p| p.k).collect::<Vec<_>>(), [1, 3, 5]);
        let full = record_pairs(50).expect("k_max=50");
        assert_eq!(
            full.iter().map(|p| p.k).collect::<Vec<_>>(),
            [1, 3, 5, 17, 29, 41]
        );
        assert_eq!(
            full.iter().map(|p| p.n).collect::<Vec<_>>(),
            [2, 5, 8, 27, 46, 65]
        );
        for pair in &full {
            assert_eq!(pair.kind, PairKind::Record);
            assert!(pair.certificate.holds(), "2^(n-1) < 3^k < 2^n for {pair:?}");
            assert_eq!(pair.certificate.mid, pow3(pair.k as u32));
            assert_eq!(pair.certificate.rhs, BigUint::one() << pair.n);
            // n sits one above the exact integer part
            assert_eq!(pair.n, frac_part(pair.k).expect("frac").n + 1);
        }
    }

    #[test]
    fn record_fracs_strictly_increase() {
        let pairs = record_pairs(50).expect("records");
        for w in pairs.windows(2) {
            assert!(frac_gt(w[1].k, w[0].k).expect("separable"));
        }
    }

    #[test]
    fn prefix_target_examples() {
        let t5 = prefix_target(5).expect("psi=5");
        assert_eq!(t5.p, 1);
        assert_eq!(t5.psi0, "5/3^1".parse().unwrap());
        assert_eq!(t5.case_tag, CaseTag::Low);
        assert!((t5.tau.lo_f64() - 0.7369655942).abs() < 1e-9);

        let t7 = prefix_target(7).expect("psi=7");
        assert_eq!(t7.case_tag, CaseTag::High);
        assert!((t7.tau.lo_f64() - 0.6374299206).abs() < 1e-9);

        let t3 = prefix_target(3).expect("psi=3");
        assert_eq!(t3.p, 1);
        assert!(t3.psi0.is_integer() && t3.psi0 == TriadicRational::one());
        assert_eq!(t3.case_tag, CaseTag::Low);
        assert_eq!(t3.tau.cmp_ratio(0, 1), Some(Ordering::Equal));

        // psi0 = 2 exactly sits in the high case by the exact comparison rule
        let t2 = prefix_target(2).expect("psi=2");
        assert_eq!(t2.p, 0);
        assert_eq!(t2.case_tag, CaseTag::High);
        assert!((t2.tau.lo_f64() - 0.4150374993).abs() < 1e-9);

        assert!(matches!(prefix_target(1), Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn tau_always_in_unit_interval() {
        for psi in 2..=200 {
            let t = prefix_target(psi).expect("target");
            assert!(t.tau.nonnegative() && t.tau.below_int(1), "psi={psi}");
            assert!(t.psi0.in_unit_band() || t.psi0 == TriadicRational::one());
        }
    }

    #[test]
    fn steering_pair_for_psi_2() {
        // The low-form inequality rejects (k=2, n=3): 5*8 = 40 is not < 27.
        assert!(!(BigUint::from(40u8) < BigUint::from(27u8)));
        // psi0 = 2 is the high case; the first accepted pair is (1, 1):
        // 5*4 = 20 < 3^3 = 27 < 28 = 7*4.
        let t = prefix_target(2).unwrap();
        let pairs = steering_pairs(&t, 1, 200).expect("scan");
        assert_eq!(pairs.len(), 1);
        assert_eq!((pairs[0].k, pairs[0].n), (1, 1));
        assert_eq!(pairs[0].certificate.lhs, BigUint::from(20u8));
        assert_eq!(pairs[0].certificate.mid, BigUint::from(27u8));
        assert_eq!(pairs[0].certificate.rhs, BigUint::from(28u8));
    }

    #[test]
    fn steering_pairs_for_psi_3_and_5() {
        // psi=3: accepted pairs satisfy 8*2^n < 3^(k+2) < 10*2^n.
        let t3 = prefix_target(3).unwrap();
        let pairs = steering_pairs(&t3, 3, 500).expect("scan");
        assert!(!pairs.is_empty());
        for pair in &pairs {
            assert_eq!(pair.kind, PairKind::Steer);
            assert_eq!(pair.certificate.lhs, BigUint::from(8u8) << pair.n);
            assert_eq!(pair.certificate.mid, pow3(pair.k as u32 + 2));
            assert_eq!(pair.certificate.rhs, BigUint::from(10u8) << pair.n);
            assert!(pair.certificate.holds());
        }
        assert_eq!((pairs[0].k, pairs[0].n), (5, 8));

        // psi=5: 14*2^n < 3^(k+2) < 16*2^n, first hit (3, 4).
        let t5 = prefix_target(5).unwrap();
        let pairs = steering_pairs(&t5, 1, 500).expect("scan");
        assert_eq!((pairs[0].k, pairs[0].n), (3, 4));
        assert_eq!(pairs[0].certificate.lhs, BigUint::from(14u8 * 16u8));
        assert_eq!(pairs[0].certificate.mid, BigUint::from(243u32));
        assert_eq!(pairs[0].certificate.rhs, BigUint::from(16u32 * 16u32));
    }

    #[test]
    fn steering_exhaustion_is_not_an_error() {
        let t = prefix_target(21).unwrap();
        // first pair needs k=25, so a tiny k_max returns empty
        let pairs = steering_pairs(&t, 1, 3).expect("scan");
        assert!(pairs.is_empty());
        assert!(matches!(
            steering_pairs(&t, 0, 10),
            Err(Error::OutOfRange { .. })
        ));
    }

    #[test]
    fn prefix_order_examples() {
        assert!(prefix_order(2, 26)); // 26 = 222_3
        assert!(prefix_order(5, 17)); // 17 = 122_3, 5 = 12_3
        assert!(prefix_order(7, 7));
        assert!(!prefix_order(5, 26));
        assert!(!prefix_order(22, 7)); // longer cannot prefix shorter
        assert!(!prefix_order(2, 17)); // 17 leads with digit 1
        assert!(prefix_order(1, 17));
        assert!(!prefix_order(26, 2));
    }
}

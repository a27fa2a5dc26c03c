//! Property harnesses and orbit statistics.
//!
//! Everything here is a consumer of the exact machinery in the other
//! modules: harnesses sample inputs, re-verify identities through
//! independent code paths, and report violations as data rather than
//! panics. A passing report has `violations == 0`; the first failing case,
//! if any, is carried along fully serialized so it can be replayed.
//!
//! Randomness is reproducible by construction: every harness derives its
//! generator from a caller seed and a fixed label via
//! [`substream`], so reports are byte-identical across runs and
//! independent of how work is scheduled.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Serialize, Serializer};

use crate::maps::{col3_step, col4_step, orbit, orbit_with_window, rescaled_iterates};
use crate::triadic::{log3_floor_u64, pow3, TriadicRational};
use crate::{Error, Result};

fn fnv1a64(label: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for byte in label.as_bytes() {
        h ^= u64::from(*byte);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// The pinned generator: ChaCha8, seeded with the run seed XOR an FNV-1a
/// hash of the stream label. Every harness owns a label, so adding or
/// reordering harnesses never perturbs another harness's sample sequence.
pub fn substream(seed: u64, label: &str) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ fnv1a64(label))
}

/// Uniformly pick a triadic rational in `[1, 3)` with denominator exponent
/// up to 12: first the exponent `r`, then a numerator in `[3^r, 3^(r+1))`.
pub fn sample_unit_band<R: Rng>(rng: &mut R) -> TriadicRational {
    let r = rng.gen_range(0u32..=12);
    let lo = 3u64.pow(r);
    let m = rng.gen_range(lo..3 * lo);
    TriadicRational::new(BigUint::from(m), r)
}

/// Sample a member of `Phi_xi`: a value whose window at the scale of `xi`
/// reads exactly `xi`, with digits strictly below that scale. Draws a depth
/// `d` in `1..=12` and an offset `t` in `(0, 3^d)` with `3` not dividing
/// `t`, giving `b = xi 3^(-q0) + t 3^(-(q0+d))`.
pub fn sample_phi<R: Rng>(xi: u64, rng: &mut R) -> Result<TriadicRational> {
    if xi < 2 {
        return Err(Error::OutOfRange {
            what: "sample_phi xi",
            bound: "at least 2",
            got: xi.to_string(),
        });
    }
    let q0 = log3_floor_u64(xi);
    let d = rng.gen_range(1u32..=12);
    let t = loop {
        let t = rng.gen_range(1u64..3u64.pow(d));
        if t % 3 != 0 {
            break t;
        }
    };
    let b = TriadicRational::new(BigUint::from(xi) * pow3(d) + t, q0 + d);
    if !b.phi_member(xi)? {
        return Err(Error::Invariant(format!(
            "sample_phi produced {b} outside Phi_{xi}"
        )));
    }
    Ok(b)
}

/// A failing case, with its inputs rendered in the canonical textual forms.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub inputs: Vec<(String, String)>,
    pub detail: String,
}

impl Counterexample {
    fn new(inputs: &[(&str, String)], detail: String) -> Self {
        Self {
            inputs: inputs
                .iter()
                .map(|(k, v)| ((*k).to_string(), v.clone()))
                .collect(),
            detail,
        }
    }
}

/// Outcome of one property harness.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub property: String,
    pub trials: u64,
    pub violations: u64,
    pub first_counterexample: Option<Counterexample>,
}

impl VerificationReport {
    fn new(property: &str) -> Self {
        Self {
            property: property.to_string(),
            trials: 0,
            violations: 0,
            first_counterexample: None,
        }
    }

    fn record_violation(&mut self, counterexample: Counterexample) {
        self.violations += 1;
        if self.first_counterexample.is_none() {
            self.first_counterexample = Some(counterexample);
        }
    }

    /// Fold another report into this one (used by the per-`xi` sweeps).
    fn absorb(&mut self, other: VerificationReport) {
        self.trials += other.trials;
        self.violations += other.violations;
        if self.first_counterexample.is_none() {
            self.first_counterexample = other.first_counterexample;
        }
    }

    /// `"pass"`, `"fail"`, or `"no trials"` for a vacuous run.
    pub fn status(&self) -> &'static str {
        if self.violations > 0 {
            "fail"
        } else if self.trials == 0 {
            "no trials"
        } else {
            "pass"
        }
    }

    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

/// Randomized check of the rescaling identity `col4^n(b) = 3^k col3^n(b)`
/// with `k = -[log3 col3^n(b)]`, both sides iterated independently.
pub fn col4_identity_check(trials: u64, n_max: u64, seed: u64) -> Result<VerificationReport> {
    let mut rng = substream(seed, "unit-band");
    let mut report = VerificationReport::new("col4-identity");
    for _ in 0..trials {
        let b = sample_unit_band(&mut rng);
        let n = rng.gen_range(1..=n_max.max(1));
        report.trials += 1;
        match rescaled_iterates(&b, n) {
            Ok(rows) => {
                let last = rows.last().expect("n >= 1 yields at least one row");
                let k = -last.col3_value.log3_floor()?;
                if k != last.rescale_exp || !last.col4_value.in_unit_band() {
                    report.record_violation(Counterexample::new(
                        &[("b", b.to_string()), ("n", n.to_string())],
                        format!(
                            "rescale exponent mismatch: recomputed k={k}, row has {}",
                            last.rescale_exp
                        ),
                    ));
                }
            }
            Err(Error::Invariant(detail)) => {
                report.record_violation(Counterexample::new(
                    &[("b", b.to_string()), ("n", n.to_string())],
                    detail,
                ));
            }
            Err(e) => return Err(e),
        }
    }
    Ok(report)
}

/// Randomized check of the exact halving bound
/// `2^-n b <= col3^n(b) <= 2^-n b + 3^-q` (with `q` the denominator
/// exponent of `b`), cross-multiplied into pure integer comparisons. Draws
/// the same sample sequence as [`col4_identity_check`] and checks the bound
/// at every intermediate step.
pub fn halving_bound_check(trials: u64, n_max: u64, seed: u64) -> Result<VerificationReport> {
    let mut rng = substream(seed, "unit-band");
    let mut report = VerificationReport::new("halving-bound");
    for _ in 0..trials {
        let b = sample_unit_band(&mut rng);
        let n = rng.gen_range(1..=n_max.max(1));
        report.trials += 1;
        let m0 = b.numerator().clone();
        let q = b.denom_exp();
        let mut it = b.clone();
        for step in 1..=n {
            it = col3_step(&it)?;
            let s = it.denom_exp();
            // m 3^s <= u 3^q 2^step  and  u 3^q 2^step <= (m + 2^step) 3^s
            let lower = &m0 * pow3(s);
            let mid = (it.numerator() * pow3(q)) << step;
            let upper = (&m0 + (BigUint::one() << step)) * pow3(s);
            if !(lower <= mid && mid <= upper) {
                report.record_violation(Counterexample::new(
                    &[
                        ("b", b.to_string()),
                        ("n", step.to_string()),
                        ("col3^n(b)", it.to_string()),
                    ],
                    "halving bound violated".to_string(),
                ));
                break;
            }
        }
    }
    Ok(report)
}

/// Walk one pair through the window descent, checking window equality at
/// every step, that the common window passes through 1 (never skipping to
/// 0), and that the step after the 1-window reads 0 on both sides.
fn check_window_pair(
    q0: i64,
    phi: &TriadicRational,
    theta: &TriadicRational,
) -> Result<Option<Counterexample>> {
    let inputs = |m: u64| {
        [
            ("phi", phi.to_string()),
            ("theta", theta.to_string()),
            ("m", m.to_string()),
        ]
    };
    let mut f = phi.clone();
    let mut g = theta.clone();
    let mut m = 0u64;
    loop {
        f = col3_step(&f)?;
        g = col3_step(&g)?;
        m += 1;
        let wf = f.floor_scale(q0);
        let wg = g.floor_scale(q0);
        if wf != wg {
            return Ok(Some(Counterexample::new(
                &inputs(m),
                format!("windows diverged: {wf} vs {wg}"),
            )));
        }
        if wf.is_zero() {
            return Ok(Some(Counterexample::new(
                &inputs(m),
                "window skipped 1 and hit 0 directly".to_string(),
            )));
        }
        if wf == BigUint::one() {
            let f2 = col3_step(&f)?;
            let g2 = col3_step(&g)?;
            if !f2.floor_scale(q0).is_zero() || !g2.floor_scale(q0).is_zero() {
                return Ok(Some(Counterexample::new(
                    &inputs(m + 1),
                    "window did not drop to 0 after reaching 1".to_string(),
                )));
            }
            return Ok(None);
        }
        // The window strictly decreases while it is >= 2, so this cannot
        // run longer than the starting window value.
        if m > 4 * (q0.unsigned_abs() + 66) {
            return Err(Error::Invariant(
                "window descent failed to terminate".to_string(),
            ));
        }
    }
}

/// Sampled check of the window lemma over `Phi_xi`: two members with the
/// same leading window stay window-equal under `col3` all the way down to
/// the common window 1, and both drop to 0 on the following step.
pub fn window_lemma_check(xi: u64, trials: u64, seed: u64) -> Result<VerificationReport> {
    let q0 = i64::from(log3_floor_u64(xi));
    let mut rng = substream(seed, &format!("window-lemma/{xi}"));
    let mut report = VerificationReport::new(&format!("window-lemma(xi={xi})"));
    for _ in 0..trials {
        let phi = sample_phi(xi, &mut rng)?;
        let theta = sample_phi(xi, &mut rng)?;
        report.trials += 1;
        if let Some(cx) = check_window_pair(q0, &phi, &theta)? {
            report.record_violation(cx);
        }
    }
    Ok(report)
}

/// [`window_lemma_check`] for every `xi` in `xi_lo..=xi_hi`, folded into a
/// single report.
pub fn window_lemma_sweep(
    xi_lo: u64,
    xi_hi: u64,
    pairs_per_xi: u64,
    seed: u64,
) -> Result<VerificationReport> {
    let mut report = VerificationReport::new("window-lemma");
    for xi in xi_lo..=xi_hi {
        report.absorb(window_lemma_check(xi, pairs_per_xi, seed)?);
    }
    Ok(report)
}

/// Per-`n` common rescale exponents over sampled members of `Phi_xi`:
/// entry `n` holds `Some(k)` when every sampled `b` has
/// `-[log3 col3^n(b)] = k`, and `None` when the samples disagree.
pub fn cor1_scan(xi: u64, n_max: u64, trials: u64, seed: u64) -> Result<Vec<Option<i64>>> {
    let mut rng = substream(seed, &format!("cor1/{xi}"));
    let mut cur: Vec<TriadicRational> = (0..trials)
        .map(|_| sample_phi(xi, &mut rng))
        .collect::<Result<_>>()?;
    let mut out = Vec::with_capacity(n_max as usize + 1);
    for n in 0..=n_max {
        if n > 0 {
            for b in &mut cur {
                *b = col3_step(b)?;
            }
        }
        let mut common: Option<i64> = None;
        let mut agree = true;
        for b in &cur {
            let k = -b.log3_floor()?;
            match common {
                None => common = Some(k),
                Some(c) if c != k => {
                    agree = false;
                    break;
                }
                _ => {}
            }
        }
        out.push(if agree { common } else { None });
    }
    Ok(out)
}

/// Sampled check of the common-exponent corollary on `Phi_xi`. For each
/// `n <= n_max` and each sampled `b`, with `k1 = -[log3 col3^n(b)]` and
/// `k2 = -[log3 (b 2^-n)]`: whenever `k1 <= q0` or `k2 <= q0`, asserts
/// `k1 = k2` and that the common value is the same across every sampled
/// `b`. The rescaling identity `col4^n(b) = 3^k1 col3^n(b)` is asserted for
/// all `n`, guarded or not.
pub fn cor1_check(xi: u64, n_max: u64, trials: u64, seed: u64) -> Result<VerificationReport> {
    let q0 = i64::from(log3_floor_u64(xi));
    let mut rng = substream(seed, &format!("cor1/{xi}"));
    let mut report = VerificationReport::new(&format!("cor1-common-k(xi={xi})"));
    let bs: Vec<TriadicRational> = (0..trials)
        .map(|_| sample_phi(xi, &mut rng))
        .collect::<Result<_>>()?;
    let mut c3 = bs.clone();
    let mut c4 = bs.clone();
    for n in 0..=n_max {
        if n > 0 {
            for i in 0..bs.len() {
                c3[i] = col3_step(&c3[i])?;
                c4[i] = col4_step(&c4[i])?;
            }
        }
        let mut common: Option<i64> = None;
        for (i, b) in bs.iter().enumerate() {
            report.trials += 1;
            let k1 = -c3[i].log3_floor()?;
            let k2 = -b.log3_floor_halved(n)?;
            let inputs = [
                ("xi", xi.to_string()),
                ("b", b.to_string()),
                ("n", n.to_string()),
            ];
            if c4[i] != c3[i].times_pow3(k1)? {
                report.record_violation(Counterexample::new(
                    &inputs,
                    format!("col4^n(b) != 3^{k1} col3^n(b)"),
                ));
                continue;
            }
            if k1 <= q0 || k2 <= q0 {
                if k1 != k2 {
                    report.record_violation(Counterexample::new(
                        &inputs,
                        format!("k1={k1} differs from k2={k2} under the guard"),
                    ));
                    continue;
                }
                match common {
                    None => common = Some(k1),
                    Some(c) if c != k1 => {
                        report.record_violation(Counterexample::new(
                            &inputs,
                            format!("common k broke: {c} then {k1}"),
                        ));
                    }
                    _ => {}
                }
            }
        }
    }
    Ok(report)
}

/// [`cor1_check`] for every `xi` in `xi_lo..=xi_hi`, folded into a single
/// report.
pub fn cor1_sweep(
    xi_lo: u64,
    xi_hi: u64,
    n_max: u64,
    trials_per_xi: u64,
    seed: u64,
) -> Result<VerificationReport> {
    let mut report = VerificationReport::new("cor1-common-k");
    for xi in xi_lo..=xi_hi {
        report.absorb(cor1_check(xi, n_max, trials_per_xi, seed)?);
    }
    Ok(report)
}

/// `1 <= 3^k b 2^-n < 3`, decided by exact integer comparison.
fn in_band_exact(b: &TriadicRational, n: u64, k: i64) -> bool {
    let e = k - i64::from(b.denom_exp());
    if e >= 0 {
        let v = b.numerator() * pow3(e.unsigned_abs() as u32);
        let lo = BigUint::one() << n;
        v >= lo && v < (&lo * 3u8)
    } else {
        let w = pow3(e.unsigned_abs() as u32) << n;
        *b.numerator() >= w && *b.numerator() < (&w * 3u8)
    }
}

/// Structure check for the band pairs: for random `b` in `[1, 3)` and each
/// `n <= n_max` there is exactly one `k` with `1 <= 3^k b 2^-n < 3`
/// (verified exactly, with both neighbors failing), and no `k` serves more
/// than two values of `n`.
pub fn cor2_check(trials: u64, n_max: u64, seed: u64) -> Result<VerificationReport> {
    let mut rng = substream(seed, "cor2");
    let mut report = VerificationReport::new("cor2-structure");
    for _ in 0..trials {
        let b = sample_unit_band(&mut rng);
        report.trials += 1;
        let mut ns_per_k: BTreeMap<i64, u64> = BTreeMap::new();
        for n in 0..=n_max {
            let k = -b.log3_floor_halved(n)?;
            let inputs = [("b", b.to_string()), ("n", n.to_string())];
            if !in_band_exact(&b, n, k) {
                report.record_violation(Counterexample::new(
                    &inputs,
                    format!("k={k} fails the band inequality"),
                ));
                continue;
            }
            if in_band_exact(&b, n, k - 1) || in_band_exact(&b, n, k + 1) {
                report.record_violation(Counterexample::new(
                    &inputs,
                    format!("k={k} is not the unique band exponent"),
                ));
                continue;
            }
            *ns_per_k.entry(k).or_insert(0) += 1;
        }
        if let Some((k, count)) = ns_per_k.iter().find(|(_, c)| **c > 2) {
            report.record_violation(Counterexample::new(
                &[("b", b.to_string())],
                format!("k={k} serves {count} values of n"),
            ));
        }
    }
    Ok(report)
}

fn ser_biguint<S: Serializer>(v: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

fn ser_opt_triadic<S: Serializer>(
    v: &Option<TriadicRational>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(t) => s.serialize_some(&t.to_string()),
        None => s.serialize_none(),
    }
}

/// Where and how often an orbit's leading window reads a given prefix.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PrefixHitReport {
    #[serde(serialize_with = "ser_biguint")]
    pub a0: BigUint,
    pub psi: u64,
    /// `[log3 psi]`
    pub p: u32,
    /// Ascending step indices with `[3^p c_alpha] = psi`.
    pub hits: Vec<u64>,
    pub total_steps: u64,
    /// False when the orbit hit the step limit instead of reaching 1.
    pub reached_one: bool,
    /// Steps where `[3^(p-q) a]` and `[3^p c]` disagree (none expected;
    /// both are computed so a discrepancy surfaces as data).
    pub window_mismatches: Vec<u64>,
}

impl PrefixHitReport {
    pub fn count(&self) -> u64 {
        self.hits.len() as u64
    }
}

/// Count the orbit steps of `a0` whose window at the scale of `psi` reads
/// exactly `psi`. The window is evaluated on both the integer route
/// (`[3^(p-q) a]`) and the rescaled route (`[3^p c]`).
pub fn prefix_hits(a0: &BigUint, psi: u64, max_steps: u64) -> Result<PrefixHitReport> {
    if psi < 2 {
        return Err(Error::OutOfRange {
            what: "prefix_hits psi",
            bound: "at least 2",
            got: psi.to_string(),
        });
    }
    let p = log3_floor_u64(psi);
    let orb = orbit_with_window(a0, max_steps, i64::from(p))?;
    let psi_big = BigUint::from(psi);
    let mut hits = Vec::new();
    let mut window_mismatches = Vec::new();
    for rec in &orb.records {
        let w_c = rec
            .window
            .clone()
            .expect("orbit_with_window fills every window");
        let w_a = if i64::from(p) >= rec.q {
            &rec.a * pow3((i64::from(p) - rec.q) as u32)
        } else {
            &rec.a / pow3((rec.q - i64::from(p)) as u32)
        };
        if w_a != w_c {
            window_mismatches.push(rec.alpha);
        }
        if w_c == psi_big {
            hits.push(rec.alpha);
        }
    }
    Ok(PrefixHitReport {
        a0: a0.clone(),
        psi,
        p,
        hits,
        total_steps: orb.records.len() as u64,
        reached_one: orb.reached_one(),
        window_mismatches,
    })
}

/// A fixed-width bitmap, serialized as a `0`/`1` string.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bitmap {
    len: u32,
    words: Vec<u64>,
}

impl Bitmap {
    pub fn new(len: u32) -> Self {
        Self {
            len,
            words: vec![0; (len as usize).div_ceil(64)],
        }
    }

    pub fn len(&self) -> u32 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn set(&mut self, i: usize) {
        self.words[i / 64] |= 1u64 << (i % 64);
    }

    pub fn get(&self, i: usize) -> bool {
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    pub fn count_ones(&self) -> u32 {
        self.words.iter().map(|w| w.count_ones()).sum()
    }

    pub fn or_assign(&mut self, other: &Self) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn to_bit_string(&self) -> String {
        (0..self.len as usize)
            .map(|i| if self.get(i) { '1' } else { '0' })
            .collect()
    }
}

impl Serialize for Bitmap {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_bit_string())
    }
}

/// Exact bin index of `c` in `bin_count` equal-width bins of `[1, 3)`:
/// `[(c - 1) bin_count / 2]` as an integer computation.
fn bin_index(c: &TriadicRational, bin_count: u32) -> Result<usize> {
    let unit = pow3(c.denom_exp());
    if c.numerator() < &unit {
        return Err(Error::Invariant(format!("binned value {c} is below 1")));
    }
    let idx = (c.numerator() - &unit) * bin_count / (unit * 2u8);
    let idx = usize::try_from(&idx)
        .map_err(|_| Error::Invariant(format!("bin index overflow for {c}")))?;
    if idx >= bin_count as usize {
        return Err(Error::Invariant(format!("binned value {c} is not below 3")));
    }
    Ok(idx)
}

/// Mergeable accumulator behind [`CoverageReport`]. Partition a seed range
/// across workers, accumulate each part, and merge: the result is
/// independent of the partition because every combining operation (bitmap
/// or, exact minimum, sums) is associative and commutative.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverageAccumulator {
    bins: Bitmap,
    min_c: Option<TriadicRational>,
    seeds: u64,
    c_samples: u64,
    step_limit_hits: u64,
}

impl CoverageAccumulator {
    pub fn new(bin_count: u32) -> Result<Self> {
        if bin_count == 0 {
            return Err(Error::OutOfRange {
                what: "bin_count",
                bound: "at least 1",
                got: "0".into(),
            });
        }
        Ok(Self {
            bins: Bitmap::new(bin_count),
            min_c: None,
            seeds: 0,
            c_samples: 0,
            step_limit_hits: 0,
        })
    }

    /// Run the orbit of one seed and fold in every `c_alpha` with
    /// `alpha >= 1`.
    pub fn accumulate_seed(&mut self, a0: u64, max_steps: u64) -> Result<()> {
        let orb = orbit(&BigUint::from(a0), max_steps)?;
        if !orb.reached_one() {
            self.step_limit_hits += 1;
        }
        for rec in orb.records.iter().skip(1) {
            self.bins.set(bin_index(&rec.c, self.bins.len())?);
            self.c_samples += 1;
            match &self.min_c {
                Some(m) if *m <= rec.c => {}
                _ => self.min_c = Some(rec.c.clone()),
            }
        }
        self.seeds += 1;
        Ok(())
    }

    pub fn merge(mut self, other: Self) -> Result<Self> {
        if self.bins.len() != other.bins.len() {
            return Err(Error::Invariant(
                "cannot merge coverage accumulators with different bin counts".to_string(),
            ));
        }
        self.bins.or_assign(&other.bins);
        self.min_c = match (self.min_c, other.min_c) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        self.seeds += other.seeds;
        self.c_samples += other.c_samples;
        self.step_limit_hits += other.step_limit_hits;
        Ok(self)
    }

    pub fn finalize(self, seed_lo: u64, seed_hi: u64) -> CoverageReport {
        let bins_hit = self.bins.count_ones();
        let bin_count = self.bins.len();
        CoverageReport {
            bin_count,
            seed_lo,
            seed_hi,
            hit_bins: self.bins,
            fraction: f64::from(bins_hit) / f64::from(bin_count),
            min_c: self.min_c,
            bins_hit,
            seeds: self.seeds,
            c_samples: self.c_samples,
            step_limit_hits: self.step_limit_hits,
        }
    }
}

/// How much of `[1, 3)` the rescaled orbit values visited.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoverageReport {
    pub bin_count: u32,
    pub seed_lo: u64,
    pub seed_hi: u64,
    pub hit_bins: Bitmap,
    pub fraction: f64,
    /// Exact minimum of all binned `c_alpha`; equal to 1 whenever any orbit
    /// reached 1.
    #[serde(serialize_with = "ser_opt_triadic")]
    pub min_c: Option<TriadicRational>,
    pub bins_hit: u32,
    pub seeds: u64,
    pub c_samples: u64,
    pub step_limit_hits: u64,
}

/// Sequential coverage sweep over an inclusive seed range.
pub fn coverage(
    seed_lo: u64,
    seed_hi: u64,
    bin_count: u32,
    max_steps: u64,
) -> Result<CoverageReport> {
    if seed_lo == 0 || seed_lo > seed_hi {
        return Err(Error::OutOfRange {
            what: "coverage seed range",
            bound: "1 <= lo <= hi",
            got: format!("{seed_lo}..={seed_hi}"),
        });
    }
    let mut acc = CoverageAccumulator::new(bin_count)?;
    for a0 in seed_lo..=seed_hi {
        acc.accumulate_seed(a0, max_steps)?;
    }
    Ok(acc.finalize(seed_lo, seed_hi))
}

/// Trial counts handed to [`run_all_properties`].
#[derive(Clone, Copy, Debug)]
pub struct PropertyBudget {
    /// Sample count per property (per `xi` for the sweeps).
    pub trials: u64,
    /// Iterate depth for the identity and bound checks.
    pub n_max: u64,
    pub xi_lo: u64,
    pub xi_hi: u64,
}

impl Default for PropertyBudget {
    fn default() -> Self {
        Self {
            trials: 1000,
            n_max: 64,
            xi_lo: 2,
            xi_hi: 80,
        }
    }
}

impl PropertyBudget {
    pub fn with_trials(trials: u64) -> Self {
        Self {
            trials,
            ..Self::default()
        }
    }
}

/// Run every registered harness with deterministic per-property substreams.
/// The aggregate passes iff every report has zero violations; failures are
/// data, not errors.
pub fn run_all_properties(seed: u64, budget: &PropertyBudget) -> Result<Vec<VerificationReport>> {
    Ok(vec![
        col4_identity_check(budget.trials, budget.n_max, seed)?,
        halving_bound_check(budget.trials, budget.n_max, seed)?,
        window_lemma_sweep(budget.xi_lo, budget.xi_hi, budget.trials, seed)?,
        cor1_sweep(budget.xi_lo, budget.xi_hi, budget.n_max, budget.trials, seed)?,
        cor2_check(budget.trials, 60, seed)?,
    ])
}

//! Exact UR counting and PQE over tuple-independent instances, plus a
//! seeded Monte Carlo estimator.
//!
//! All reduction-facing arithmetic is exact rational; floating point is
//! quarantined to [`mc_estimate`]. Enumeration visits subsets in Gray-code
//! order so consecutive steps flip a single fact, and a monotone cache of
//! satisfying subsets short-circuits supersets.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand_core::{RngCore, SeedableRng};

use crate::error::{Error, Result};
use crate::instance::{Fact, Instance};
use crate::query::{Matcher, Query};
use crate::MAX_SUBSET_CAP;

/// Number of satisfying subinstances; `0 <= count <= 2^|I|`.
pub type Count = BigUint;

/// An exact rational probability in `[0,1]`, kept in reduced form.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Probability(BigRational);

impl Probability {
    pub fn new(value: BigRational) -> Result<Probability> {
        if value.is_negative() || value > BigRational::one() {
            return Err(Error::invalid(format!("probability {value} outside [0,1]")));
        }
        Ok(Probability(value))
    }

    pub fn from_ratio(num: i64, den: i64) -> Result<Probability> {
        if den == 0 {
            return Err(Error::invalid("probability denominator is zero"));
        }
        Probability::new(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    /// Parses `"a/b"` or a bare integer (`"0"`, `"1"`).
    pub fn parse(text: &str) -> Result<Probability> {
        let text = text.trim();
        let parse_int = |s: &str| -> Result<BigInt> {
            s.parse::<BigInt>()
                .map_err(|_| Error::invalid(format!("bad rational component {s:?}")))
        };
        let value = match text.split_once('/') {
            Some((n, d)) => {
                let den = parse_int(d.trim())?;
                if den.is_zero() {
                    return Err(Error::invalid("probability denominator is zero"));
                }
                BigRational::new(parse_int(n.trim())?, den)
            }
            None => BigRational::from_integer(parse_int(text)?),
        };
        Probability::new(value)
    }

    pub fn zero() -> Probability {
        Probability(BigRational::zero())
    }

    pub fn one() -> Probability {
        Probability(BigRational::one())
    }

    pub fn half() -> Probability {
        Probability(BigRational::new(BigInt::one(), BigInt::from(2)))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn as_ratio(&self) -> &BigRational {
        &self.0
    }

    pub fn into_ratio(self) -> BigRational {
        self.0
    }

    /// Complement `1 - p`.
    pub fn complement(&self) -> Probability {
        Probability(BigRational::one() - &self.0)
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }
}

impl fmt::Display for Probability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A tuple-independent instance: each fact carries an independent existence
/// probability. The map is total on the instance's facts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tid {
    instance: Instance,
    pi: BTreeMap<Fact, Probability>,
}

impl Tid {
    pub fn new(instance: Instance, pi: BTreeMap<Fact, Probability>) -> Result<Tid> {
        for f in instance.facts() {
            if !pi.contains_key(f) {
                return Err(Error::invalid(format!("missing probability for fact {f}")));
            }
        }
        for f in pi.keys() {
            if !instance.contains(f) {
                return Err(Error::invalid(format!("probability given for absent fact {f}")));
            }
        }
        Ok(Tid { instance, pi })
    }

    /// All facts at the same probability.
    pub fn uniform(instance: Instance, p: Probability) -> Tid {
        let pi = instance.facts().map(|f| (f.clone(), p.clone())).collect();
        Tid { instance, pi }
    }

    pub fn instance(&self) -> &Instance {
        &self.instance
    }

    pub fn prob(&self, f: &Fact) -> &Probability {
        &self.pi[f]
    }

    pub fn probs(&self) -> impl Iterator<Item = (&Fact, &Probability)> {
        self.pi.iter()
    }

    pub fn with_prob(&self, f: &Fact, p: Probability) -> Result<Tid> {
        if !self.instance.contains(f) {
            return Err(Error::invalid(format!("fact {f} not in instance")));
        }
        let mut pi = self.pi.clone();
        pi.insert(f.clone(), p);
        Ok(Tid { instance: self.instance.clone(), pi })
    }
}

fn check_cap(n: usize, cap: usize) -> Result<()> {
    let cap = cap.min(MAX_SUBSET_CAP);
    if n > cap {
        return Err(Error::CapExceeded { needed: n, cap });
    }
    Ok(())
}

/// Monotone satisfaction cache over subset masks.
///
/// Queries are monotone, so any superset of a satisfying mask satisfies and
/// any subset of a violating mask violates. The cache is an optimization
/// only: results are identical with or without it.
#[derive(Default)]
pub struct MaskCache {
    sat: Vec<u64>,
    unsat: Vec<u64>,
}

const CACHE_LIMIT: usize = 96;

impl MaskCache {
    pub fn new() -> MaskCache {
        MaskCache::default()
    }

    fn lookup(&self, mask: u64) -> Option<bool> {
        if self.sat.iter().any(|&s| s & mask == s) {
            return Some(true);
        }
        if self.unsat.iter().any(|&m| mask & m == mask) {
            return Some(false);
        }
        None
    }

    fn insert(&mut self, mask: u64, satisfied: bool) {
        let store = if satisfied { &mut self.sat } else { &mut self.unsat };
        if store.len() >= CACHE_LIMIT {
            store.remove(0);
        }
        store.push(mask);
    }

    /// Evaluate through the cache.
    pub fn eval(&mut self, matcher: &Matcher, mask: u64) -> bool {
        if let Some(hit) = self.lookup(mask) {
            return hit;
        }
        let v = matcher.eval_mask(mask);
        self.insert(mask, v);
        v
    }
}

/// Gray code of `i`.
#[inline]
fn gray(i: u64) -> u64 {
    i ^ (i >> 1)
}

/// A compiled uniform-reliability count over one instance. The subset index
/// space partitions into disjoint ranges whose partial counts sum to the
/// total, so callers may fan ranges out to workers; the result does not
/// depend on the split.
pub struct UrJob {
    matcher: Matcher,
    total: u64,
}

impl UrJob {
    pub fn new(q: &Query, inst: &Instance, cap: usize) -> Result<UrJob> {
        check_cap(inst.len(), cap)?;
        Ok(UrJob { matcher: Matcher::compile(q, inst), total: 1u64 << inst.len() })
    }

    pub fn mask_count(&self) -> u64 {
        self.total
    }

    /// Number of satisfying subsets with Gray index in `lo..hi`.
    pub fn count_range(&self, lo: u64, hi: u64) -> Count {
        let hi = hi.min(self.total);
        let mut cache = MaskCache::new();
        let mut count: u64 = 0;
        for i in lo..hi {
            if cache.eval(&self.matcher, gray(i)) {
                count += 1;
            }
        }
        Count::from(count)
    }
}

/// Exact number of subinstances of `inst` satisfying `q`.
pub fn ur_count(q: &Query, inst: &Instance, cap: usize) -> Result<Count> {
    let job = UrJob::new(q, inst, cap)?;
    Ok(job.count_range(0, job.mask_count()))
}

/// A compiled PQE sum over one tuple-independent instance.
///
/// Facts at probability 0 behave as absent and facts at probability 1 as
/// always present; both are factored out, and the remaining free facts are
/// enumerated in Gray-code order so each step flips a single fact and the
/// subset weight is maintained by one exact multiply/divide. Partial sums
/// over disjoint ranges add up to the total regardless of the split.
pub struct PqeJob {
    matcher: Matcher,
    forced_mask: u64,
    free: Vec<usize>,
    /// Per free fact: (p, 1-p), both in (0,1).
    odds: Vec<(BigRational, BigRational)>,
    total: u64,
}

impl PqeJob {
    pub fn new(q: &Query, tid: &Tid, cap: usize) -> Result<PqeJob> {
        check_cap(tid.instance().len(), cap)?;
        let facts = tid.instance().fact_vec();
        let mut forced_mask = 0u64;
        let mut free: Vec<usize> = Vec::new();
        let mut odds = Vec::new();
        for (i, f) in facts.iter().enumerate() {
            let p = tid.prob(f);
            if p.is_one() {
                forced_mask |= 1 << i;
            } else if !p.is_zero() {
                free.push(i);
                let pr = p.as_ratio().clone();
                let not_p = BigRational::one() - &pr;
                odds.push((pr, not_p));
            }
        }
        let total = 1u64 << free.len();
        Ok(PqeJob { matcher: Matcher::compile(q, tid.instance()), forced_mask, free, odds, total })
    }

    pub fn mask_count(&self) -> u64 {
        self.total
    }

    fn weight_of(&self, present: u64) -> BigRational {
        let mut w = BigRational::one();
        for (j, (p, not_p)) in self.odds.iter().enumerate() {
            w *= if present >> j & 1 == 1 { p } else { not_p };
        }
        w
    }

    /// Total weight of satisfying subsets with Gray index in `lo..hi`.
    pub fn sum_range(&self, lo: u64, hi: u64) -> BigRational {
        let hi = hi.min(self.total);
        if lo >= hi {
            return BigRational::zero();
        }
        let mut cache = MaskCache::new();
        let mut present = gray(lo);
        let mut weight = self.weight_of(present);
        let mut sum = BigRational::zero();
        for step in lo..hi {
            if step > lo {
                let g = gray(step);
                let flipped = g ^ present;
                debug_assert_eq!(flipped.count_ones(), 1);
                let j = flipped.trailing_zeros() as usize;
                let (p, not_p) = &self.odds[j];
                if g & flipped != 0 {
                    weight = weight * p / not_p;
                } else {
                    weight = weight * not_p / p;
                }
                present = g;
            }
            let mut mask = self.forced_mask;
            let mut g = present;
            while g != 0 {
                let j = g.trailing_zeros() as usize;
                mask |= 1 << self.free[j];
                g &= g - 1;
            }
            if cache.eval(&self.matcher, mask) {
                sum += &weight;
            }
        }
        sum
    }
}

/// Exact probability that the query holds when each fact is drawn
/// independently with its probability: the sum over satisfying subsets of
/// the product of kept-fact probabilities times absent-fact complements.
pub fn pqe(q: &Query, tid: &Tid, cap: usize) -> Result<Probability> {
    let job = PqeJob::new(q, tid, cap)?;
    Probability::new(job.sum_range(0, job.mask_count()))
}

/// A Monte Carlo estimate with its 95% confidence half-width.
#[derive(Debug, Clone, PartialEq)]
pub struct McEstimate {
    /// Satisfied-sample fraction, exact.
    pub estimate: Probability,
    /// `1.96 * sqrt(p(1-p)/n)`; zero when every sample agreed.
    pub half_width: f64,
    pub samples: u64,
    pub seed: u64,
}

/// Seeded Monte Carlo estimate of [`pqe`]. Deterministic given the seed.
pub fn mc_estimate(q: &Query, tid: &Tid, samples: u64, seed: u64) -> Result<McEstimate> {
    if samples == 0 {
        return Err(Error::invalid("samples must be >= 1"));
    }
    let facts = tid.instance().fact_vec();
    if facts.len() > 63 {
        return Err(Error::CapExceeded { needed: facts.len(), cap: 63 });
    }
    // Per-fact u64 thresholds: present iff draw < floor(p * 2^64); a
    // probability-1 fact is always present.
    let two64 = BigInt::one() << 64u32;
    let thresholds: Vec<Option<u64>> = facts
        .iter()
        .map(|f| {
            let p = tid.prob(f);
            if p.is_one() {
                None
            } else {
                let scaled = (p.as_ratio() * BigRational::from_integer(two64.clone())).floor();
                Some(scaled.to_integer().to_u64().unwrap_or(u64::MAX))
            }
        })
        .collect();
    let matcher = Matcher::compile(q, tid.instance());
    let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(seed);
    let mut hits: u64 = 0;
    for _ in 0..samples {
        let mut mask = 0u64;
        for (i, t) in thresholds.iter().enumerate() {
            let keep = match t {
                None => true,
                Some(t) => rng.next_u64() < *t,
            };
            if keep {
                mask |= 1 << i;
            }
        }
        if matcher.eval_mask(mask) {
            hits += 1;
        }
    }
    let estimate = Probability::new(BigRational::new(BigInt::from(hits), BigInt::from(samples)))?;
    let p = estimate.to_f64();
    let half_width = 1.96 * sqrt_f64(p * (1.0 - p) / samples as f64);
    Ok(McEstimate { estimate, half_width, samples, seed })
}

/// Newton-iteration square root; avoids a float-math dependency in no_std.
pub(crate) fn sqrt_f64(x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let mut y = x;
    let mut prev = 0.0;
    while y != prev {
        prev = y;
        y = 0.5 * (y + x / y);
    }
    y
}

/// Renders a count for reports.
pub fn count_to_string(c: &Count) -> String {
    c.to_string()
}

/// `2^n` as a rational, used by the renormalization identity.
pub fn pow2_rational(n: usize) -> BigRational {
    BigRational::from_integer(BigInt::one() << n)
}

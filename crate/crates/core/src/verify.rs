//! Checking the extractor property.
//!
//! For a test set `W ⊆ {0,1}^m` and a fixed table `x`, the deviation
//! `Prob_y(E(x,y) ∈ W) − |W|/2^m` is computed exactly by enumerating all `2^d`
//! seeds. From the per-table deviations this module derives
//!
//! - the number of tables that miss `W` by more than `ε` (bad hitters);
//! - the worst deviation over flat sources of min-entropy `k`, which is exact
//!   for a fixed `W` because a linear functional over the min-entropy-`k`
//!   polytope is maximized at a flat source on the top `2^k` deviations;
//! - a Monte-Carlo estimate of `Δ(E(X, U_d), U_m)` for sources too large to
//!   enumerate, with a distribution-free 99% confidence radius.
//!
//! All tallies are integers, so results do not depend on how work is split
//! across threads. Randomness is counter-mode: sample `s` draws from ChaCha8
//! keyed by the run seed with stream id `s`.

use std::borrow::Cow;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::bits::{BitString, TruthTable};
use crate::error::{Error, Result};
use crate::extract::{ExtractorKind, Prepared};
use crate::params::ParamSet;

/// Largest seed length for exhaustive seed enumeration.
pub const MAX_ENUM_SEED_BITS: u64 = 24;
/// Largest output width for an exact output distribution.
pub const MAX_DIST_BITS: u64 = 24;
/// Largest output width for a Monte-Carlo histogram.
pub const MAX_HIST_BITS: u64 = 20;
/// Largest source length for enumerating every table.
pub const MAX_ENUM_SOURCE_BITS: u64 = 16;
/// Failure probability of the Monte-Carlo confidence radius.
pub const CONFIDENCE_FAILURE: f64 = 0.01;

/// A probability vector over `{0,1}^m`, indexed with the first output bit as
/// the most significant.
#[derive(Debug, Clone, PartialEq)]
pub struct Dist {
    m: u32,
    probs: Vec<f64>,
}

impl Dist {
    pub fn new(m: u32, probs: Vec<f64>) -> Result<Self> {
        if m > 40 || probs.len() as u64 != 1u64 << m {
            return Err(Error::Invalid(format!(
                "a distribution on {{0,1}}^{m} needs 2^{m} probabilities, got {}",
                probs.len()
            )));
        }
        if probs.iter().any(|&v| !(v >= 0.0)) {
            return Err(Error::Invalid("negative or NaN probability".into()));
        }
        let sum: f64 = probs.iter().sum();
        let tol = 1e-12 + probs.len() as f64 * f64::EPSILON;
        if (sum - 1.0).abs() > tol {
            return Err(Error::Invalid(format!("probabilities sum to {sum}")));
        }
        Ok(Dist { m, probs })
    }

    pub fn uniform(m: u32) -> Self {
        let n = 1usize << m;
        Dist {
            m,
            probs: vec![1.0 / n as f64; n],
        }
    }

    pub fn point(m: u32, outcome: u64) -> Self {
        let mut probs = vec![0.0; 1usize << m];
        probs[outcome as usize] = 1.0;
        Dist { m, probs }
    }

    /// Normalized tallies.
    pub fn from_counts(m: u32, counts: &[u64]) -> Result<Self> {
        let total: u64 = counts.iter().sum();
        if total == 0 {
            return Err(Error::Invalid("no observations".into()));
        }
        Dist::new(m, counts.iter().map(|&c| c as f64 / total as f64).collect())
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }
}

/// `−log₂ max_a Prob(a)`.
pub fn min_entropy(d: &Dist) -> f64 {
    let max = d.probs.iter().copied().fold(0.0f64, f64::max);
    // -log2(1) is -0.0
    (-max.log2()).max(0.0)
}

/// `max_A |P(A) − Q(A)|`, i.e. half the L1 distance.
pub fn statistical_distance(p: &Dist, q: &Dist) -> Result<f64> {
    if p.m != q.m {
        return Err(Error::LengthMismatch {
            left: p.m as usize,
            right: q.m as usize,
        });
    }
    let l1: f64 = p.probs.iter().zip(&q.probs).map(|(a, b)| (a - b).abs()).sum();
    Ok((l1 / 2.0).min(1.0))
}

/// A statistical test `W ⊆ {0,1}^m`.
#[derive(Clone, PartialEq, Eq)]
pub struct OutcomeSet {
    m: u32,
    members: Vec<bool>,
}

impl OutcomeSet {
    pub fn empty(m: u32) -> Self {
        OutcomeSet {
            m,
            members: vec![false; 1usize << m],
        }
    }

    pub fn full(m: u32) -> Self {
        OutcomeSet {
            m,
            members: vec![true; 1usize << m],
        }
    }

    pub fn from_outcomes<I: IntoIterator<Item = u64>>(m: u32, outcomes: I) -> Result<Self> {
        let mut w = OutcomeSet::empty(m);
        for z in outcomes {
            if z >= 1u64 << m {
                return Err(Error::OutOfRange {
                    what: "outcome",
                    value: z,
                    limit: 1u64 << m,
                });
            }
            w.members[z as usize] = true;
        }
        Ok(w)
    }

    /// Uniform over all `2^{2^m}` subsets.
    pub fn random_subset<R: Rng + ?Sized>(m: u32, rng: &mut R) -> Self {
        OutcomeSet {
            m,
            members: (0..1usize << m).map(|_| rng.gen()).collect(),
        }
    }

    /// Uniform over subsets of exactly `size` outcomes.
    pub fn random_of_size<R: Rng + ?Sized>(m: u32, size: usize, rng: &mut R) -> Result<Self> {
        let n = 1usize << m;
        if size > n {
            return Err(Error::Invalid(format!("{size} outcomes do not fit in 2^{m}")));
        }
        OutcomeSet::from_outcomes(m, index::sample(rng, n, size).into_iter().map(|z| z as u64))
    }

    /// All outcomes whose first `prefix.len()` bits equal `prefix`.
    pub fn prefix(m: u32, prefix: &BitString) -> Result<Self> {
        let len = prefix.len() as u32;
        if len > m {
            return Err(Error::Invalid(format!("prefix longer than m={m}")));
        }
        let want = if len == 0 { 0 } else { prefix.to_u64() };
        Ok(OutcomeSet {
            m,
            members: (0..1u64 << m).map(|z| z >> (m - len) == want).collect(),
        })
    }

    /// `{z : parity(z AND mask) = value}`.
    pub fn parity(m: u32, mask: u64, value: bool) -> Self {
        OutcomeSet {
            m,
            members: (0..1u64 << m)
                .map(|z| ((z & mask).count_ones() & 1 == 1) == value)
                .collect(),
        }
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    #[inline]
    pub fn contains(&self, z: u64) -> bool {
        self.members[z as usize]
    }

    pub fn len(&self) -> u64 {
        self.members.iter().filter(|&&b| b).count() as u64
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `|W| / 2^m`.
    pub fn density(&self) -> f64 {
        self.len() as f64 / self.members.len() as f64
    }
}

impl fmt::Debug for OutcomeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let zs: Vec<usize> = (0..self.members.len()).filter(|&z| self.members[z]).collect();
        write!(f, "OutcomeSet(m={}, {:?})", self.m, zs)
    }
}

/// Families of sampled tests.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TestFamily {
    /// Uniformly random subsets.
    Random,
    /// Cylinders fixing a random-length random prefix.
    Prefix,
    /// Parity sets with a random non-zero mask.
    Parity,
}

impl FromStr for TestFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "random" => Ok(TestFamily::Random),
            "prefix" => Ok(TestFamily::Prefix),
            "parity" => Ok(TestFamily::Parity),
            other => Err(Error::Invalid(format!(
                "unknown test family {other:?} (expected random, prefix or parity)"
            ))),
        }
    }
}

impl fmt::Display for TestFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TestFamily::Random => "random",
            TestFamily::Prefix => "prefix",
            TestFamily::Parity => "parity",
        })
    }
}

/// `count` tests from `family`; test `j` uses stream `j` of `rng_seed`.
pub fn sample_tests(family: TestFamily, m: u32, count: usize, rng_seed: u64) -> Vec<OutcomeSet> {
    (0..count)
        .map(|j| {
            let mut rng = stream_rng(rng_seed, j as u64);
            match family {
                TestFamily::Random => OutcomeSet::random_subset(m, &mut rng),
                TestFamily::Prefix => {
                    let len = rng.gen_range(1..=m as usize);
                    let bits = BitString::from_bools((0..len).map(|_| rng.gen::<bool>()));
                    OutcomeSet::prefix(m, &bits).expect("prefix length within m")
                }
                TestFamily::Parity => {
                    let mask = rng.gen_range(1..1u64 << m);
                    OutcomeSet::parity(m, mask, rng.gen())
                }
            }
        })
        .collect()
}

/// ChaCha8 keyed by `seed`, positioned on stream `stream`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Runs `f` on a dedicated pool of `workers` threads, or on the current pool
/// when `workers` is `None`.
pub fn with_workers<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match workers {
        None => Ok(f()),
        Some(0) => Err(Error::Invalid("workers must be >= 1".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map(|pool| pool.install(f))
            .map_err(|e| Error::Invalid(format!("cannot start {n} workers: {e}"))),
    }
}

fn check_seed_enumeration(p: &ParamSet) -> Result<()> {
    if p.d > MAX_ENUM_SEED_BITS {
        return Err(Error::TooLarge(format!(
            "seed enumeration needs d <= {MAX_ENUM_SEED_BITS}, got d={}",
            p.d
        )));
    }
    Ok(())
}

fn check_output_width(p: &ParamSet, limit: u64) -> Result<()> {
    if p.m > limit {
        return Err(Error::TooLarge(format!(
            "output histogram needs m <= {limit}, got m={}",
            p.m
        )));
    }
    Ok(())
}

fn check_test(w: &OutcomeSet, p: &ParamSet) -> Result<()> {
    if w.m as u64 != p.m {
        return Err(Error::LengthMismatch {
            left: w.m as usize,
            right: p.m as usize,
        });
    }
    Ok(())
}

/// `E(x, y)` for every seed `y`, in seed order.
fn outputs_over_seeds(kind: ExtractorKind, table: &TruthTable, p: &ParamSet) -> Result<Vec<u32>> {
    check_seed_enumeration(p)?;
    check_output_width(p, MAX_DIST_BITS)?;
    let prepared = Prepared::new(kind, table, p)?;
    let half = p.half_seed_bits();
    let ell = p.ell as usize;
    let width = p.n_tilde as u64;
    let mask = p.block_mask();
    let split = |v: u64| -> Vec<u32> {
        (0..ell)
            .map(|j| ((v >> (half - (j as u64 + 1) * width)) & mask) as u32)
            .collect()
    };

    // The seed is x̄ ‖ r, so x̄ selects a contiguous run of 2^half seeds.
    let mut out = vec![0u32; 1usize << p.d];
    out.par_chunks_mut(1usize << half)
        .enumerate()
        .for_each(|(xv, chunk)| {
            let x_blocks = split(xv as u64);
            let mut scratch = vec![0u32; ell];
            for (rv, slot) in chunk.iter_mut().enumerate() {
                let r_blocks = split(rv as u64);
                *slot = prepared.output_index(&x_blocks, &r_blocks, p, &mut scratch) as u32;
            }
        });
    Ok(out)
}

/// Exact distribution of `E(x, U_d)` by enumerating all `2^d` seeds.
pub fn output_distribution(kind: ExtractorKind, table: &TruthTable, p: &ParamSet) -> Result<Dist> {
    let mut counts = vec![0u64; 1usize << p.m.min(MAX_DIST_BITS + 1)];
    for z in outputs_over_seeds(kind, table, p)? {
        counts[z as usize] += 1;
    }
    Dist::from_counts(p.m as u32, &counts)
}

/// Number of seeds `y` with `E(x, y) ∈ W`.
fn seed_hits(kind: ExtractorKind, table: &TruthTable, w: &OutcomeSet, p: &ParamSet) -> Result<u64> {
    check_test(w, p)?;
    Ok(outputs_over_seeds(kind, table, p)?
        .into_iter()
        .filter(|&z| w.contains(z as u64))
        .count() as u64)
}

/// `Prob_y(E(x,y) ∈ W) − |W|/2^m`, exact.
pub fn hit_deviation(
    kind: ExtractorKind,
    table: &TruthTable,
    w: &OutcomeSet,
    p: &ParamSet,
) -> Result<f64> {
    let hits = seed_hits(kind, table, w, p)?;
    Ok(hits as f64 / (1u64 << p.d) as f64 - w.density())
}

/// Whether `x` hits `W` `ε`-correctly: the seed-averaged hit rate is within
/// `ε` of `W`'s density.
pub fn hits_correctly(
    kind: ExtractorKind,
    table: &TruthTable,
    w: &OutcomeSet,
    epsilon: f64,
    p: &ParamSet,
) -> Result<bool> {
    Ok(hit_deviation(kind, table, w, p)?.abs() <= epsilon)
}

/// Which tables to run over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableStream {
    /// Every table; needs `N̄ ≤ 16`.
    Exhaustive,
    /// `count` uniformly random tables; table `j` uses stream `j` of `rng_seed`.
    Sampled { count: u64, rng_seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BadHitters {
    pub bad: u64,
    pub total: u64,
}

impl BadHitters {
    pub fn fraction(&self) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            self.bad as f64 / self.total as f64
        }
    }
}

fn check_table_enumeration(p: &ParamSet) -> Result<()> {
    if p.n_bar > MAX_ENUM_SOURCE_BITS {
        return Err(Error::TooLarge(format!(
            "enumerating every table needs N_bar <= {MAX_ENUM_SOURCE_BITS}, got N_bar={}",
            p.n_bar
        )));
    }
    Ok(())
}

/// Seed-hit counts for every table in the stream, in stream order.
fn hits_per_table(
    kind: ExtractorKind,
    w: &OutcomeSet,
    p: &ParamSet,
    tables: TableStream,
) -> Result<Vec<u64>> {
    check_test(w, p)?;
    check_seed_enumeration(p)?;
    check_output_width(p, MAX_DIST_BITS)?;
    let (count, make): (u64, Box<dyn Fn(u64) -> TruthTable + Sync>) = match tables {
        TableStream::Exhaustive => {
            check_table_enumeration(p)?;
            let n_tilde = p.n_tilde;
            (
                1u64 << p.n_bar,
                Box::new(move |j| TruthTable::from_index(n_tilde, j).expect("N_bar <= 16")),
            )
        }
        TableStream::Sampled { count, rng_seed } => {
            let n_tilde = p.n_tilde;
            (
                count,
                Box::new(move |j| TruthTable::random(n_tilde, &mut stream_rng(rng_seed, j))),
            )
        }
    };
    (0..count)
        .into_par_iter()
        .map(|j| seed_hits(kind, &make(j), w, p))
        .collect()
}

/// Counts tables that do not hit `W` `ε`-correctly.
pub fn count_bad_hitters(
    kind: ExtractorKind,
    w: &OutcomeSet,
    epsilon: f64,
    p: &ParamSet,
    tables: TableStream,
) -> Result<BadHitters> {
    let hits = hits_per_table(kind, w, p, tables)?;
    let seeds = (1u64 << p.d) as f64;
    let density = w.density();
    let bad = hits
        .iter()
        .filter(|&&h| (h as f64 / seeds - density).abs() > epsilon)
        .count() as u64;
    Ok(BadHitters {
        bad,
        total: hits.len() as u64,
    })
}

/// Sorted per-table deviations over every table, for repeated worst-case
/// queries against one test.
#[derive(Debug, Clone)]
pub struct FlatProfile {
    sorted: Vec<f64>,
    n_bar: u64,
}

impl FlatProfile {
    pub fn new(kind: ExtractorKind, w: &OutcomeSet, p: &ParamSet) -> Result<Self> {
        check_table_enumeration(p)?;
        let seeds = (1u64 << p.d) as f64;
        let density = w.density();
        let mut sorted: Vec<f64> = hits_per_table(kind, w, p, TableStream::Exhaustive)?
            .into_iter()
            .map(|h| h as f64 / seeds - density)
            .collect();
        sorted.sort_by(f64::total_cmp);
        Ok(FlatProfile {
            sorted,
            n_bar: p.n_bar,
        })
    }

    pub fn deviations(&self) -> &[f64] {
        &self.sorted
    }

    /// Tables with `|dev| > ε`.
    pub fn bad_hitters(&self, epsilon: f64) -> u64 {
        self.sorted.iter().filter(|d| d.abs() > epsilon).count() as u64
    }

    /// Largest `|Prob(E(X,U_d) ∈ W) − density(W)|` over sources `X` with
    /// min-entropy at least `k`.
    ///
    /// The maximum of a linear functional over `{q : 0 ≤ q(x) ≤ 2^−k, Σq = 1}`
    /// puts mass `2^−k` on the `⌊2^k⌋` most extreme tables and the remainder
    /// on the next one; for integer `k` this is the flat source on the top
    /// (or bottom) `2^k` deviations.
    pub fn worst(&self, k: f64) -> Result<f64> {
        if !(k >= 0.0) || k > self.n_bar as f64 {
            return Err(Error::Invalid(format!(
                "min-entropy k must be in [0, {}], got {k}",
                self.n_bar
            )));
        }
        let size = k.exp2();
        let top = extreme_mean(self.sorted.iter().rev(), size);
        let bottom = extreme_mean(self.sorted.iter(), size);
        // top ≥ bottom, so max(|top|, |bottom|) = max(top, −bottom).
        Ok(top.max(-bottom).max(0.0))
    }
}

fn extreme_mean<'a>(devs: impl Iterator<Item = &'a f64>, size: f64) -> f64 {
    let whole = size.floor() as usize;
    let frac = size - whole as f64;
    let mut sum = 0.0;
    for (j, &d) in devs.enumerate() {
        if j < whole {
            sum += d;
        } else {
            sum += frac * d;
            break;
        }
    }
    sum / size
}

/// Exact worst deviation over flat sources of min-entropy `k` for one test.
pub fn worst_flat_deviation(
    kind: ExtractorKind,
    w: &OutcomeSet,
    k: f64,
    p: &ParamSet,
) -> Result<f64> {
    FlatProfile::new(kind, w, p)?.worst(k)
}

/// One instance of the bad-hitter-count to extractor implication.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HitterBound {
    pub bad: u64,
    /// Bad hitters are at most `2^t`.
    pub t: u32,
    /// `t + log₂(1/ε)`.
    pub k: f64,
    pub worst: f64,
    pub bound: f64,
}

impl HitterBound {
    pub fn holds(&self) -> bool {
        self.worst <= self.bound
    }
}

/// For every integer `t` with `bad ≤ 2^t` and `t + log₂(1/ε) ≤ N̄`, the worst
/// flat deviation at `k = t + log₂(1/ε)` next to the bound `2ε`.
pub fn hitter_bounds(
    kind: ExtractorKind,
    w: &OutcomeSet,
    epsilon: f64,
    p: &ParamSet,
) -> Result<Vec<HitterBound>> {
    if !(epsilon > 0.0) {
        return Err(Error::Invalid(format!("epsilon must be > 0, got {epsilon}")));
    }
    let profile = FlatProfile::new(kind, w, p)?;
    let bad = profile.bad_hitters(epsilon);
    let t_min = if bad <= 1 { 0 } else { 64 - (bad - 1).leading_zeros() };
    let slack = (1.0 / epsilon).log2();
    (t_min..=p.n_bar as u32)
        .map(|t| (t, t as f64 + slack))
        .filter(|&(_, k)| k <= p.n_bar as f64)
        .map(|(t, k)| {
            Ok(HitterBound {
                bad,
                t,
                k,
                worst: profile.worst(k)?,
                bound: 2.0 * epsilon,
            })
        })
        .collect()
}

/// Kinds of simulated weak source.
#[derive(Debug, Clone, PartialEq)]
pub enum SourceKind {
    Uniform,
    /// Uniform over a fixed pseudorandom support of exactly `2^k` tables.
    FlatRandomSubset,
    /// `N̄ − k` positions fixed, `k` uniform. `fixed` gives an explicit
    /// `(mask, values)` pair of `N̄`-bit strings; set mask bits are fixed.
    BitFixing { fixed: Option<(BitString, BitString)> },
    /// Independent bits, each 1 with probability `bias`.
    BiasedIid { bias: f64 },
    /// Every entry equal to `value`.
    Constant { value: u32 },
    File { path: PathBuf },
}

impl SourceKind {
    pub fn name(&self) -> &'static str {
        match self {
            SourceKind::Uniform => "uniform",
            SourceKind::FlatRandomSubset => "flat-random-subset",
            SourceKind::BitFixing { .. } => "bit-fixing",
            SourceKind::BiasedIid { .. } => "biased-iid",
            SourceKind::Constant { .. } => "constant",
            SourceKind::File { .. } => "file",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SourceSpec {
    pub kind: SourceKind,
    /// Target min-entropy in bits, for flat and bit-fixing sources.
    pub k: Option<u64>,
    /// Fixes the support (flat) or the fixed positions and values
    /// (bit-fixing).
    pub rng_seed: u64,
}

impl SourceSpec {
    pub fn new(kind: SourceKind, k: Option<u64>, rng_seed: u64) -> Self {
        SourceSpec { kind, k, rng_seed }
    }
}

enum Plan {
    Uniform,
    Flat {
        free: Vec<usize>,
        rest: Vec<usize>,
        key: [u8; 8],
    },
    BitFixing {
        free: Vec<usize>,
        base: BitString,
    },
    Biased(f64),
    Fixed(TruthTable),
}

/// A weak source prepared from a [`SourceSpec`] for one parameter set.
pub struct Source {
    n_tilde: u32,
    n_bar: usize,
    plan: Plan,
}

impl Source {
    pub fn new(spec: &SourceSpec, p: &ParamSet) -> Result<Self> {
        let n_bar = p.n_bar as usize;
        let need_k = |what: &str| -> Result<usize> {
            let k = spec
                .k
                .ok_or_else(|| Error::Invalid(format!("{what} source needs k")))?;
            if k > p.n_bar {
                return Err(Error::OutOfRange {
                    what: "min-entropy k",
                    value: k,
                    limit: p.n_bar + 1,
                });
            }
            Ok(k as usize)
        };
        let mut structure = stream_rng(spec.rng_seed, u64::MAX);
        let plan = match &spec.kind {
            SourceKind::Uniform => Plan::Uniform,
            SourceKind::FlatRandomSubset => {
                let k = need_k("flat-random-subset")?;
                let (free, rest) = split_positions(n_bar, k, &mut structure);
                Plan::Flat {
                    free,
                    rest,
                    key: spec.rng_seed.to_le_bytes(),
                }
            }
            SourceKind::BitFixing { fixed: None } => {
                let k = need_k("bit-fixing")?;
                let (free, _) = split_positions(n_bar, k, &mut structure);
                let base = BitString::from_bools((0..n_bar).map(|_| structure.gen::<bool>()));
                Plan::BitFixing { free, base }
            }
            SourceKind::BitFixing {
                fixed: Some((mask, values)),
            } => {
                if mask.len() != n_bar || values.len() != n_bar {
                    return Err(Error::Invalid(format!(
                        "bit-fixing mask and values need {n_bar} bits"
                    )));
                }
                let free: Vec<usize> = (0..n_bar).filter(|&i| !mask.get(i)).collect();
                if let Some(k) = spec.k {
                    if k as usize != free.len() {
                        return Err(Error::Invalid(format!(
                            "k={k} but the mask leaves {} free bits",
                            free.len()
                        )));
                    }
                }
                Plan::BitFixing {
                    free,
                    base: values.clone(),
                }
            }
            SourceKind::BiasedIid { bias } => {
                if !(0.0..=1.0).contains(bias) {
                    return Err(Error::Invalid(format!("bias must be in [0,1], got {bias}")));
                }
                Plan::Biased(*bias)
            }
            SourceKind::Constant { value } => Plan::Fixed(TruthTable::constant(p.n_tilde, *value)?),
            SourceKind::File { path } => {
                let t = TruthTable::read_file(path)?;
                if t.n_tilde() != p.n_tilde {
                    return Err(Error::Invalid(format!(
                        "source file has ntilde={}, parameters have n_tilde={}",
                        t.n_tilde(),
                        p.n_tilde
                    )));
                }
                Plan::Fixed(t)
            }
        };
        Ok(Source {
            n_tilde: p.n_tilde,
            n_bar,
            plan,
        })
    }

    /// Min-entropy of the source distribution in bits.
    pub fn min_entropy(&self) -> f64 {
        match &self.plan {
            Plan::Uniform => self.n_bar as f64,
            Plan::Flat { free, .. } | Plan::BitFixing { free, .. } => free.len() as f64,
            Plan::Biased(b) => self.n_bar as f64 * -b.max(1.0 - b).log2(),
            Plan::Fixed(_) => 0.0,
        }
    }

    /// The single table of a constant or file source.
    pub fn fixed_table(&self) -> Option<&TruthTable> {
        match &self.plan {
            Plan::Fixed(t) => Some(t),
            _ => None,
        }
    }

    /// Support element `j` of a flat source (`j` has `k` bits). Distinct `j`
    /// give distinct tables because `j` is written verbatim into the free
    /// positions.
    pub fn flat_element(&self, j: &BitString) -> Option<TruthTable> {
        match &self.plan {
            Plan::Flat { free, rest, key } if j.len() == free.len() => {
                Some(self.assemble_flat(free, rest, key, j))
            }
            _ => None,
        }
    }

    fn assemble_flat(&self, free: &[usize], rest: &[usize], key: &[u8; 8], j: &BitString) -> TruthTable {
        let mut bits = BitString::zeros(self.n_bar);
        for (t, &pos) in free.iter().enumerate() {
            bits.set(pos, j.get(t));
        }
        let mut h = Sha256::new();
        h.update(b"flat-random-subset");
        h.update(key);
        h.update((j.len() as u64).to_le_bytes());
        h.update(j.as_bytes());
        let mut fill = ChaCha8Rng::from_seed(h.finalize().into());
        for &pos in rest {
            bits.set(pos, fill.gen());
        }
        TruthTable::from_bits(self.n_tilde, &bits).expect("width matches")
    }

    /// One draw from the source.
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> Cow<'_, TruthTable> {
        match &self.plan {
            Plan::Uniform => Cow::Owned(TruthTable::random(self.n_tilde, rng)),
            Plan::Flat { free, rest, key } => {
                let j = BitString::from_bools((0..free.len()).map(|_| rng.gen::<bool>()));
                Cow::Owned(self.assemble_flat(free, rest, key, &j))
            }
            Plan::BitFixing { free, base } => {
                let mut bits = base.clone();
                for &pos in free {
                    bits.set(pos, rng.gen());
                }
                Cow::Owned(TruthTable::from_bits(self.n_tilde, &bits).expect("width matches"))
            }
            Plan::Biased(b) => {
                let bits = BitString::from_bools((0..self.n_bar).map(|_| rng.gen_bool(*b)));
                Cow::Owned(TruthTable::from_bits(self.n_tilde, &bits).expect("width matches"))
            }
            Plan::Fixed(t) => Cow::Borrowed(t),
        }
    }
}

/// `k` free positions (sorted) and the remaining positions.
fn split_positions<R: Rng + ?Sized>(n_bar: usize, k: usize, rng: &mut R) -> (Vec<usize>, Vec<usize>) {
    let mut free = index::sample(rng, n_bar, k).into_vec();
    free.sort_unstable();
    let mut is_free = vec![false; n_bar];
    for &i in &free {
        is_free[i] = true;
    }
    let rest = (0..n_bar).filter(|&i| !is_free[i]).collect();
    (free, rest)
}

/// One draw from the source described by `spec`.
pub fn sample_source<R: Rng + ?Sized>(spec: &SourceSpec, p: &ParamSet, rng: &mut R) -> Result<TruthTable> {
    Ok(Source::new(spec, p)?.draw(rng).into_owned())
}

/// Monte-Carlo estimate of `Δ(E(X, U_d), U_m)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Estimate {
    pub estimate: f64,
    /// With probability at least 99% the true distance lies within this
    /// radius of `estimate`.
    pub radius: f64,
    pub samples: u64,
    pub m: u64,
    pub counts: Vec<u64>,
}

/// Radius `t` such that, with probability `1 − CONFIDENCE_FAILURE`, every
/// event `A ⊆ {0,1}^m` has `|P̂(A) − P(A)| ≤ t` after `samples` draws.
///
/// Hoeffding gives `2·exp(−2nt²)` per event; a union bound over all
/// `2^{2^m}` events of the `2^m`-cell histogram yields
/// `t = sqrt((2^m·ln 2 + ln(2/δ)) / (2n))`. Since the statistical distance is
/// a maximum over events, `|Δ(P̂,U) − Δ(P,U)| ≤ t` on the same event.
pub fn confidence_radius(m: u64, samples: u64) -> f64 {
    let cells = (m as f64).exp2();
    ((cells * std::f64::consts::LN_2 + (2.0 / CONFIDENCE_FAILURE).ln()) / (2.0 * samples as f64))
        .sqrt()
}

const MC_BATCH: u64 = 1 << 20;

/// Draws `samples` pairs `(X, y)`, histograms `E(X, y)` and returns the
/// distance of the histogram from uniform. Sample `s` draws its table and
/// seed from stream `s` of `rng_seed`, so the result is independent of the
/// thread count.
pub fn estimate_distance(
    kind: ExtractorKind,
    spec: &SourceSpec,
    p: &ParamSet,
    samples: u64,
    rng_seed: u64,
) -> Result<Estimate> {
    if samples == 0 {
        return Err(Error::Invalid("samples must be >= 1".into()));
    }
    check_output_width(p, MAX_HIST_BITS)?;
    let source = Source::new(spec, p)?;
    let fixed = match source.fixed_table() {
        Some(t) => Some(Prepared::new(kind, t, p)?),
        None => None,
    };
    let ell = p.ell as usize;
    let mask = p.block_mask() as u32;

    let one = |s: u64| -> u32 {
        let mut rng = stream_rng(rng_seed, s);
        let drawn;
        let local;
        let prepared = match &fixed {
            Some(f) => f,
            None => {
                drawn = source.draw(&mut rng);
                local = Prepared::new(kind, &drawn, p).expect("source width matches");
                &local
            }
        };
        let x: Vec<u32> = (0..ell).map(|_| rng.gen::<u32>() & mask).collect();
        let r: Vec<u32> = (0..ell).map(|_| rng.gen::<u32>() & mask).collect();
        let mut scratch = vec![0u32; ell];
        prepared.output_index(&x, &r, p, &mut scratch) as u32
    };

    let mut counts = vec![0u64; 1usize << p.m];
    let mut start = 0;
    while start < samples {
        let end = (start + MC_BATCH).min(samples);
        let outs: Vec<u32> = (start..end).into_par_iter().map(one).collect();
        for z in outs {
            counts[z as usize] += 1;
        }
        start = end;
    }

    let empirical = Dist::from_counts(p.m as u32, &counts)?;
    let estimate = statistical_distance(&empirical, &Dist::uniform(p.m as u32))?;
    Ok(Estimate {
        estimate,
        radius: confidence_radius(p.m, samples),
        samples,
        m: p.m,
        counts,
    })
}

//! Timing harness for the two extractors.
//!
//! Wall-clock numbers are machine-dependent, so the harness reports medians
//! and 99th percentiles of batched timings next to exact lookup counts, and
//! the claims it supports are trends: per-bit cost of the local extractor
//! flat in `m`, total cost of the permutation extractor near-linear in `N̄`.
//! Timing loops run on the calling thread only.

use std::hint::black_box;
use std::time::Instant;

use rand::Rng;

use crate::bits::{Seed, TruthTable};
use crate::error::{Error, Result};
use crate::extract::{extract_local_bit, CountingTable, PreparedBmy};
use crate::params::{fmt_real, override_params, ParamSet};
use crate::perm::circular_from_access;
use crate::verify::stream_rng;

/// Largest table the harness will allocate (`2^26` entries, 256 MiB).
pub const MAX_BENCH_N_TILDE: u32 = 26;

pub const CSV_HEADER: &str = "n_tilde,n_bar,ell,m,op,median_ns,p99_ns,lookups_per_bit";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BenchOp {
    /// One call of `extract_local_bit`.
    LocalBit,
    /// Building `R_X` from the table and emitting all `m` bits for one seed.
    BmyTotal,
}

impl BenchOp {
    pub fn name(&self) -> &'static str {
        match self {
            BenchOp::LocalBit => "local-bit",
            BenchOp::BmyTotal => "bmy",
        }
    }
}

impl std::str::FromStr for BenchOp {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "local-bit" => Ok(BenchOp::LocalBit),
            "bmy" => Ok(BenchOp::BmyTotal),
            other => Err(Error::Invalid(format!(
                "unknown bench op {other:?} (expected local-bit or bmy)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub sizes: Vec<u32>,
    pub reps: usize,
    pub ell: u64,
    /// Output lengths, timed interleaved within each rep.
    pub ms: Vec<u64>,
    pub rng_seed: u64,
    /// Calls per timed batch for `local-bit`.
    pub batch: usize,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            sizes: vec![12, 16, 20],
            reps: 21,
            ell: 4,
            ms: vec![16, 256],
            rng_seed: 0,
            batch: 4096,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub n_tilde: u32,
    pub n_bar: u64,
    pub ell: u64,
    pub m: u64,
    pub op: BenchOp,
    pub median_ns: f64,
    pub p99_ns: f64,
    /// Table and permutation reads behind the timed work.
    pub lookups: u64,
    /// Output bits produced by that work.
    pub bits: u64,
}

impl BenchRow {
    pub fn lookups_per_bit(&self) -> f64 {
        self.lookups as f64 / self.bits as f64
    }

    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{},{:.1},{:.1},{}",
            self.n_tilde,
            self.n_bar,
            self.ell,
            self.m,
            self.op.name(),
            self.median_ns,
            self.p99_ns,
            fmt_real(self.lookups_per_bit())
        )
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
}

impl BenchReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.to_csv());
            out.push('\n');
        }
        out
    }

    /// The count columns only, for reproducibility checks.
    pub fn counts(&self) -> Vec<(u32, u64, &'static str, u64, u64)> {
        self.rows
            .iter()
            .map(|r| (r.n_tilde, r.m, r.op.name(), r.lookups, r.bits))
            .collect()
    }

    pub fn row(&self, op: BenchOp, n_tilde: u32, m: u64) -> Option<&BenchRow> {
        self.rows
            .iter()
            .find(|r| r.op == op && r.n_tilde == n_tilde && r.m == m)
    }

    /// `median(m_a) / median(m_b)` at one size.
    pub fn m_ratio(&self, op: BenchOp, n_tilde: u32, m_a: u64, m_b: u64) -> Option<f64> {
        Some(self.row(op, n_tilde, m_a)?.median_ns / self.row(op, n_tilde, m_b)?.median_ns)
    }

    /// Geometric-mean growth of the median per unit step of `ñ` (a doubling
    /// of `N`), between the smallest and largest size measured at `m`.
    pub fn growth_per_doubling(&self, op: BenchOp, m: u64) -> Option<f64> {
        let mut rows: Vec<&BenchRow> = self.rows.iter().filter(|r| r.op == op && r.m == m).collect();
        rows.sort_by_key(|r| r.n_tilde);
        let (first, last) = (rows.first()?, rows.last()?);
        if last.n_tilde == first.n_tilde {
            return None;
        }
        let steps = (last.n_tilde - first.n_tilde) as f64;
        Some((last.median_ns / first.median_ns).powf(1.0 / steps))
    }
}

fn check_config(cfg: &BenchConfig) -> Result<()> {
    if cfg.reps == 0 {
        return Err(Error::Invalid("reps must be >= 1".into()));
    }
    if cfg.batch == 0 {
        return Err(Error::Invalid("batch must be >= 1".into()));
    }
    if cfg.ms.is_empty() {
        return Err(Error::Invalid("at least one m is needed".into()));
    }
    if let Some(&n) = cfg.sizes.iter().find(|&&n| n > MAX_BENCH_N_TILDE) {
        return Err(Error::TooLarge(format!(
            "bench tables need n_tilde <= {MAX_BENCH_N_TILDE}, got {n}"
        )));
    }
    Ok(())
}

fn params_for(cfg: &BenchConfig, n_tilde: u32) -> Result<Vec<ParamSet>> {
    cfg.ms
        .iter()
        .map(|&m| override_params(n_tilde, cfg.ell, m, 0.5))
        .collect()
}

/// Median and 99th percentile (nearest rank).
fn summarize(mut samples: Vec<f64>) -> (f64, f64) {
    samples.sort_by(f64::total_cmp);
    let n = samples.len();
    let median = if n % 2 == 1 {
        samples[n / 2]
    } else {
        (samples[n / 2 - 1] + samples[n / 2]) / 2.0
    };
    let rank = ((0.99 * n as f64).ceil() as usize).clamp(1, n);
    (median, samples[rank - 1])
}

/// Per-call time of `extract_local_bit` on random `(seed, i)`.
pub fn bench_local_bit(cfg: &BenchConfig) -> Result<BenchReport> {
    check_config(cfg)?;
    let mut rows = Vec::new();
    for &n_tilde in &cfg.sizes {
        let params = params_for(cfg, n_tilde)?;
        let table = TruthTable::random(n_tilde, &mut stream_rng(cfg.rng_seed, n_tilde as u64));
        let mut rng = stream_rng(cfg.rng_seed, (1 << 32) | n_tilde as u64);
        let inputs: Vec<Vec<(Seed, u64)>> = params
            .iter()
            .map(|p| {
                (0..cfg.batch)
                    .map(|_| (Seed::random(p, &mut rng), rng.gen_range(0..p.m)))
                    .collect()
            })
            .collect();

        let mut lookups = Vec::with_capacity(params.len());
        for (p, batch) in params.iter().zip(&inputs) {
            let counting = CountingTable::new(&table);
            for (seed, i) in batch {
                extract_local_bit(&counting, seed, p, *i)?;
            }
            if counting.lookups() != cfg.ell * batch.len() as u64 {
                return Err(Error::Invalid(format!(
                    "local bit used {} lookups for {} bits at ell={}",
                    counting.lookups(),
                    batch.len(),
                    cfg.ell
                )));
            }
            lookups.push(counting.lookups());
        }

        let mut times = vec![Vec::with_capacity(cfg.reps); params.len()];
        for _ in 0..cfg.reps {
            for (j, (p, batch)) in params.iter().zip(&inputs).enumerate() {
                let start = Instant::now();
                for (seed, i) in batch {
                    black_box(extract_local_bit(&table, black_box(seed), p, black_box(*i))?);
                }
                times[j].push(start.elapsed().as_nanos() as f64 / batch.len() as f64);
            }
        }

        for ((p, samples), lookups) in params.iter().zip(times).zip(lookups) {
            let (median_ns, p99_ns) = summarize(samples);
            rows.push(BenchRow {
                n_tilde,
                n_bar: p.n_bar,
                ell: p.ell,
                m: p.m,
                op: BenchOp::LocalBit,
                median_ns,
                p99_ns,
                lookups,
                bits: cfg.batch as u64,
            });
        }
    }
    Ok(BenchReport { rows })
}

/// Time to build `R_X` from a fresh table and emit all `m` bits of one seed.
pub fn bench_bmy_total(cfg: &BenchConfig) -> Result<BenchReport> {
    check_config(cfg)?;
    let mut rows = Vec::new();
    for &n_tilde in &cfg.sizes {
        let params = params_for(cfg, n_tilde)?;
        let table = TruthTable::random(n_tilde, &mut stream_rng(cfg.rng_seed, n_tilde as u64));
        let mut rng = stream_rng(cfg.rng_seed, (1 << 32) | n_tilde as u64);
        let seeds: Vec<Seed> = params.iter().map(|p| Seed::random(p, &mut rng)).collect();

        let mut lookups = Vec::with_capacity(params.len());
        for (p, seed) in params.iter().zip(&seeds) {
            let counting = CountingTable::new(&table);
            let prepared = PreparedBmy::from_perm(circular_from_access(&counting));
            let mut cur = seed.x_blocks().to_vec();
            let mut steps = 0u64;
            prepared.walk(&mut cur, seed.r_blocks(), p.m, |_, _| steps += 1);
            lookups.push(counting.lookups() + steps * p.ell);
        }

        let mut times = vec![Vec::with_capacity(cfg.reps); params.len()];
        for _ in 0..cfg.reps {
            for (j, (p, seed)) in params.iter().zip(&seeds).enumerate() {
                let start = Instant::now();
                let prepared = PreparedBmy::from_perm(circular_from_access(black_box(&table)));
                black_box(prepared.extract(black_box(seed), p)?);
                times[j].push(start.elapsed().as_nanos() as f64);
            }
        }

        for ((p, samples), lookups) in params.iter().zip(times).zip(lookups) {
            let (median_ns, p99_ns) = summarize(samples);
            rows.push(BenchRow {
                n_tilde,
                n_bar: p.n_bar,
                ell: p.ell,
                m: p.m,
                op: BenchOp::BmyTotal,
                median_ns,
                p99_ns,
                lookups,
                bits: p.m,
            });
        }
    }
    Ok(BenchReport { rows })
}

pub fn bench(op: BenchOp, cfg: &BenchConfig) -> Result<BenchReport> {
    match op {
        BenchOp::LocalBit => bench_local_bit(cfg),
        BenchOp::BmyTotal => bench_bmy_total(cfg),
    }
}

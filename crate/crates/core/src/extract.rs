//! The two extractors.
//!
//! Both output `m` bits `b_0 … b_{m−1}`, each an inner product of the mask
//! `r` with an `ℓ`-block value; they differ in where that value comes from:
//!
//! - `bmy`: `R̄^i_X(x̄)`, the `i`-th iterate of the direct product of the
//!   circular permutation derived from `X` (`i = 0` is `x̄` itself).
//! - `local`: `X̄(x̄ + i) = X(x₁+i) ⊙ … ⊙ X(x_ℓ+i)`, additions mod `2^ñ`.
//!
//! Block `x₁` occupies the first ñ bits of every concatenation.

use std::cell::Cell;
use std::fmt;
use std::str::FromStr;

use crate::bits::{block_inner_product, BitString, Seed, TruthTable};
use crate::error::{Error, Result};
use crate::params::ParamSet;
use crate::perm::CircularPerm;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExtractorKind {
    /// Iterated circular permutation.
    Bmy,
    /// Bitwise locally computable.
    Local,
}

impl fmt::Display for ExtractorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ExtractorKind::Bmy => "bmy",
            ExtractorKind::Local => "local",
        })
    }
}

impl FromStr for ExtractorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bmy" => Ok(ExtractorKind::Bmy),
            "local" => Ok(ExtractorKind::Local),
            other => Err(Error::Invalid(format!(
                "unknown extractor kind {other:?} (expected bmy or local)"
            ))),
        }
    }
}

/// Read access to a truth table. Lets instrumentation wrap the plain table
/// without touching the extraction code.
pub trait TableAccess {
    fn n_tilde(&self) -> u32;
    fn lookup(&self, x: u32) -> u32;
}

impl TableAccess for TruthTable {
    fn n_tilde(&self) -> u32 {
        TruthTable::n_tilde(self)
    }

    #[inline]
    fn lookup(&self, x: u32) -> u32 {
        self.get(x)
    }
}

/// Counts every lookup made through it.
pub struct CountingTable<'a> {
    table: &'a TruthTable,
    lookups: Cell<u64>,
}

impl<'a> CountingTable<'a> {
    pub fn new(table: &'a TruthTable) -> Self {
        CountingTable {
            table,
            lookups: Cell::new(0),
        }
    }

    pub fn lookups(&self) -> u64 {
        self.lookups.get()
    }

    pub fn reset(&self) {
        self.lookups.set(0);
    }
}

impl TableAccess for CountingTable<'_> {
    fn n_tilde(&self) -> u32 {
        self.table.n_tilde()
    }

    #[inline]
    fn lookup(&self, x: u32) -> u32 {
        self.lookups.set(self.lookups.get() + 1);
        self.table.get(x)
    }
}

fn check_inputs(n_tilde: u32, seed: &Seed, p: &ParamSet) -> Result<()> {
    if n_tilde != p.n_tilde {
        return Err(Error::SeedMismatch(format!(
            "table has n_tilde={n_tilde}, parameters have n_tilde={}",
            p.n_tilde
        )));
    }
    seed.check(p)
}

/// Bit `i` of the local extractor: `ℓ` lookups and one inner product.
#[inline]
pub(crate) fn local_bit_raw<T: TableAccess + ?Sized>(
    table: &T,
    x_blocks: &[u32],
    r_blocks: &[u32],
    i: u64,
    mask: u64,
) -> bool {
    let acc = x_blocks
        .iter()
        .zip(r_blocks)
        .fold(0u32, |acc, (&x, &r)| {
            let at = ((x as u64).wrapping_add(i) & mask) as u32;
            acc ^ (r & table.lookup(at))
        });
    acc.count_ones() & 1 == 1
}

/// Bit `i` of [`extract_local`], computed on its own with exactly `ℓ` table
/// lookups. The cost does not depend on `m`.
pub fn extract_local_bit<T: TableAccess + ?Sized>(
    table: &T,
    seed: &Seed,
    p: &ParamSet,
    i: u64,
) -> Result<bool> {
    check_inputs(table.n_tilde(), seed, p)?;
    if i >= p.m {
        return Err(Error::OutOfRange {
            what: "output bit index",
            value: i,
            limit: p.m,
        });
    }
    Ok(local_bit_raw(
        table,
        seed.x_blocks(),
        seed.r_blocks(),
        i,
        p.block_mask(),
    ))
}

/// `b(X̄(x̄), r) ⊙ b(X̄(x̄+1), r) ⊙ … ⊙ b(X̄(x̄+m−1), r)`.
pub fn extract_local(table: &TruthTable, seed: &Seed, p: &ParamSet) -> Result<BitString> {
    check_inputs(table.n_tilde(), seed, p)?;
    let mask = p.block_mask();
    Ok(BitString::from_bools((0..p.m).map(|i| {
        local_bit_raw(table, seed.x_blocks(), seed.r_blocks(), i, mask)
    })))
}

/// The circular permutation derived from one table, ready to serve many
/// seeds. Holds nothing else.
#[derive(Debug, Clone)]
pub struct PreparedBmy {
    perm: CircularPerm,
}

impl PreparedBmy {
    pub fn from_perm(perm: CircularPerm) -> Self {
        PreparedBmy { perm }
    }

    pub fn perm(&self) -> &CircularPerm {
        &self.perm
    }

    /// `b_i = r · R̄^i(x̄)` for `i = 0…m−1`, advancing one iterate per bit.
    pub fn extract(&self, seed: &Seed, p: &ParamSet) -> Result<BitString> {
        check_inputs(self.perm.n_tilde(), seed, p)?;
        let mut out = BitString::zeros(p.m as usize);
        let mut cur = seed.x_blocks().to_vec();
        self.walk(&mut cur, seed.r_blocks(), p.m, |i, b| out.set(i as usize, b));
        Ok(out)
    }

    /// Emits `(i, b_i)` in order; `cur` starts at `x̄` and is left at
    /// `R̄^m(x̄)`.
    #[inline]
    pub(crate) fn walk(
        &self,
        cur: &mut [u32],
        r_blocks: &[u32],
        m: u64,
        mut emit: impl FnMut(u64, bool),
    ) {
        let succ = self.perm.succ();
        for i in 0..m {
            emit(i, block_inner_product(r_blocks, cur));
            for x in cur.iter_mut() {
                *x = succ[*x as usize];
            }
        }
    }
}

/// Builds `R_X` once so that many seeds can be run against one table.
pub fn prepare_bmy(table: &TruthTable, p: &ParamSet) -> Result<PreparedBmy> {
    if table.n_tilde() != p.n_tilde {
        return Err(Error::SeedMismatch(format!(
            "table has n_tilde={}, parameters have n_tilde={}",
            table.n_tilde(),
            p.n_tilde
        )));
    }
    Ok(PreparedBmy {
        perm: CircularPerm::from_table(table),
    })
}

/// The iterated-circular-permutation extractor. Rebuilds `R_X` on every
/// call; use [`prepare_bmy`] to amortize it.
pub fn extract_bmy(table: &TruthTable, seed: &Seed, p: &ParamSet) -> Result<BitString> {
    check_inputs(table.n_tilde(), seed, p)?;
    prepare_bmy(table, p)?.extract(seed, p)
}

pub fn extract(
    kind: ExtractorKind,
    table: &TruthTable,
    seed: &Seed,
    p: &ParamSet,
) -> Result<BitString> {
    match kind {
        ExtractorKind::Bmy => extract_bmy(table, seed, p),
        ExtractorKind::Local => extract_local(table, seed, p),
    }
}

/// A table made ready for repeated extraction, used by the enumeration and
/// sampling loops. Outputs are returned as integers with `b_0` as the most
/// significant of `m ≤ 64` bits.
pub(crate) enum Prepared<'a> {
    Local(&'a TruthTable),
    Bmy(PreparedBmy),
}

impl<'a> Prepared<'a> {
    pub(crate) fn new(kind: ExtractorKind, table: &'a TruthTable, p: &ParamSet) -> Result<Self> {
        if table.n_tilde() != p.n_tilde {
            return Err(Error::SeedMismatch(format!(
                "table has n_tilde={}, parameters have n_tilde={}",
                table.n_tilde(),
                p.n_tilde
            )));
        }
        Ok(match kind {
            ExtractorKind::Local => Prepared::Local(table),
            ExtractorKind::Bmy => Prepared::Bmy(prepare_bmy(table, p)?),
        })
    }

    /// `scratch` must have length `ℓ`; its contents are overwritten.
    #[inline]
    pub(crate) fn output_index(
        &self,
        x_blocks: &[u32],
        r_blocks: &[u32],
        p: &ParamSet,
        scratch: &mut [u32],
    ) -> u64 {
        debug_assert!(p.m <= 64);
        let mut out = 0u64;
        match self {
            Prepared::Local(t) => {
                let mask = p.block_mask();
                for i in 0..p.m {
                    out = (out << 1) | local_bit_raw(*t, x_blocks, r_blocks, i, mask) as u64;
                }
            }
            Prepared::Bmy(b) => {
                scratch.copy_from_slice(x_blocks);
                b.walk(scratch, r_blocks, p.m, |_, bit| out = (out << 1) | bit as u64);
            }
        }
        out
    }
}

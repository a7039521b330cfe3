//! Turning a weak-source function into a circular permutation.
//!
//! The table is read as `X: [N] → [N]` (entry at index `i−1`, plus one). A
//! *-sequence `Y(i) = 1 + (X(i) mod i)` drives a swap pass over the identity
//! on `{1,…,N−1}`, and the resulting permutation `π` fixes the order in which
//! a single `N`-cycle visits `{2,…,N}` after leaving `1`:
//!
//! ```text
//! 1 → π(1)+1 → π(2)+1 → … → π(N−1)+1 → 1
//! ```
//!
//! Storage relabels `{1,…,N}` to `{0,…,N−1}`; that happens only when the
//! successor array is built.

use std::collections::BTreeMap;
use std::fmt;

use crate::bits::TruthTable;
use crate::error::{Error, Result};
use crate::extract::TableAccess;

/// `y[i] ∈ {1,…,i}` for `i = 1…N−1`, stored 0-based (`values()[i-1] = y[i]`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StarSequence(Vec<u32>);

impl StarSequence {
    pub fn values(&self) -> &[u32] {
        &self.0
    }

    /// `y[i]` for `1 ≤ i ≤ N−1`.
    pub fn get(&self, i: usize) -> u32 {
        self.0[i - 1]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// A permutation of `{1,…,N−1}`; `values()[i-1] = π(i)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Permutation(Vec<u32>);

impl Permutation {
    /// Validates that `values` is a bijection of `{1,…,len}`.
    pub fn new(values: Vec<u32>) -> Result<Self> {
        let len = values.len();
        let mut seen = vec![false; len + 1];
        for &v in &values {
            if v == 0 || v as usize > len || std::mem::replace(&mut seen[v as usize], true) {
                return Err(Error::Invalid(format!(
                    "{values:?} is not a permutation of 1..={len}"
                )));
            }
        }
        Ok(Permutation(values))
    }

    pub fn identity(len: usize) -> Self {
        Permutation((1..=len as u32).collect())
    }

    pub fn values(&self) -> &[u32] {
        &self.0
    }

    /// `π(i)` for `1 ≤ i ≤ len`.
    pub fn get(&self, i: usize) -> u32 {
        self.0[i - 1]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (k, v) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str(")")
    }
}

/// A single-cycle permutation of `{0,…,N−1}` stored as `succ[x] = R(x)`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CircularPerm {
    n_tilde: u32,
    succ: Vec<u32>,
}

impl CircularPerm {
    /// `R_X` for a truth table: the swap pass followed by the cycle layout.
    pub fn from_table(table: &TruthTable) -> Self {
        circular_from_access(table)
    }

    pub fn n_tilde(&self) -> u32 {
        self.n_tilde
    }

    pub fn n(&self) -> u64 {
        self.succ.len() as u64
    }

    pub fn succ(&self) -> &[u32] {
        &self.succ
    }

    /// `R(x)`; panics if `x ≥ N`.
    #[inline]
    pub fn apply(&self, x: u32) -> u32 {
        self.succ[x as usize]
    }

    /// Walks from 0 and checks that every element is visited exactly once
    /// before returning.
    pub fn is_single_cycle(&self) -> bool {
        is_single_cycle(&self.succ)
    }
}

impl fmt::Debug for CircularPerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.succ.len() <= 16 {
            write!(f, "CircularPerm({:?})", self.succ)
        } else {
            write!(f, "CircularPerm(N={})", self.succ.len())
        }
    }
}

pub(crate) fn is_single_cycle(succ: &[u32]) -> bool {
    let n = succ.len();
    let mut seen = vec![false; n];
    let mut x = 0usize;
    for _ in 0..n {
        if x >= n || seen[x] {
            return false;
        }
        seen[x] = true;
        x = succ[x] as usize;
    }
    x == 0
}

/// `Y(i) = 1 + (X(i) mod i)` for `i = 1…N−1`.
pub fn star_sequence(table: &TruthTable) -> StarSequence {
    let entries = table.entries();
    StarSequence(star_from_values(entries.len(), |i| entries[i - 1] as u64 + 1))
}

/// `x_of(i)` is `X(i) ∈ [N]`, 1-based.
fn star_from_values(n: usize, x_of: impl Fn(usize) -> u64) -> Vec<u32> {
    (1..n).map(|i| 1 + (x_of(i) % i as u64) as u32).collect()
}

/// Swaps `R(i)` with `R(Y(i))` for `i = 1…N−1`, starting from the identity.
fn swap_pass(star: &[u32]) -> Vec<u32> {
    let mut r: Vec<u32> = (1..=star.len() as u32).collect();
    for (k, &y) in star.iter().enumerate() {
        r.swap(k, y as usize - 1);
    }
    r
}

/// The permutation of `{1,…,N−1}` produced by the star-sequence swap pass.
pub fn permutation_from_function(table: &TruthTable) -> Permutation {
    Permutation(swap_pass(star_sequence(table).values()))
}

/// The whole transform through [`TableAccess`], reading each of
/// `X(1), …, X(N−1)` once.
pub(crate) fn circular_from_access<T: TableAccess + ?Sized>(table: &T) -> CircularPerm {
    let n = 1usize << table.n_tilde();
    let star = star_from_values(n, |i| table.lookup(i as u32 - 1) as u64 + 1);
    circular_from_permutation(&Permutation(swap_pass(&star))).expect("N is a power of two")
}

/// Lays out the single `N`-cycle that leaves element 1 and visits
/// `π(1)+1, …, π(N−1)+1` in order, relabelled to `{0,…,N−1}`.
///
/// Bijectivity is checked by [`Permutation::new`]; this fails only when
/// `N = len + 1` is not a power of two.
pub fn circular_from_permutation(pi: &Permutation) -> Result<CircularPerm> {
    let n = pi.len() + 1;
    if !n.is_power_of_two() {
        return Err(Error::Invalid(format!(
            "N = {n} is not a power of two; a circular permutation needs N = 2^n_tilde"
        )));
    }
    let mut succ = vec![0u32; n];
    // 1-based: R(1) = π(1)+1, R(π(i)+1) = π(i+1)+1, R(π(N−1)+1) = 1.
    // 0-based that is succ[0] = π(1), succ[π(i)] = π(i+1), succ[π(N−1)] = 0.
    let mut prev = 0usize;
    for &v in pi.values() {
        succ[prev] = v;
        prev = v as usize;
    }
    succ[prev] = 0;
    Ok(CircularPerm {
        n_tilde: n.trailing_zeros(),
        succ,
    })
}

/// `R̄(x₁ ⊙ … ⊙ x_ℓ) = R(x₁) ⊙ … ⊙ R(x_ℓ)`.
pub fn direct_product_apply(perm: &CircularPerm, x_blocks: &[u32]) -> Result<Vec<u32>> {
    check_blocks(perm, x_blocks)?;
    Ok(x_blocks.iter().map(|&x| perm.apply(x)).collect())
}

/// `R̄^i(x̄)` by repeated application.
pub fn iterate(perm: &CircularPerm, x_blocks: &[u32], i: u64) -> Result<Vec<u32>> {
    check_blocks(perm, x_blocks)?;
    let mut cur = x_blocks.to_vec();
    for _ in 0..i {
        for x in cur.iter_mut() {
            *x = perm.apply(*x);
        }
    }
    Ok(cur)
}

fn check_blocks(perm: &CircularPerm, x_blocks: &[u32]) -> Result<()> {
    match x_blocks.iter().find(|&&x| x as u64 >= perm.n()) {
        Some(&x) => Err(Error::OutOfRange {
            what: "block",
            value: x as u64,
            limit: perm.n(),
        }),
        None => Ok(()),
    }
}

/// Largest `N` for which [`preimage_census`] enumerates all `N^N` functions.
pub const CENSUS_MAX_N: usize = 8;

/// How many functions `X: [N] → [N]` the swap pass sends to each
/// permutation of `{1,…,N−1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Census {
    pub n: usize,
    pub counts: BTreeMap<Permutation, u64>,
}

impl Census {
    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }

    pub fn max(&self) -> u64 {
        self.counts.values().copied().max().unwrap_or(0)
    }

    /// `N · ∏_{i<N} ⌈N/i⌉`: each `Y(i)` has at most `⌈N/i⌉` preimages under
    /// `1 + (X(i) mod i)`, and the unused last entry `X(N)` is free.
    pub fn product_bound(&self) -> u64 {
        let n = self.n as u64;
        (1..n).fold(n, |acc, i| acc * n.div_ceil(i))
    }

    /// `2^{2N}`.
    pub fn power_bound(&self) -> u64 {
        1u64 << (2 * self.n)
    }

    /// One `permutation count` line per permutation, then summary lines.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (pi, c) in &self.counts {
            out.push_str(&format!("{pi} {c}\n"));
        }
        out.push_str(&format!("N={}\n", self.n));
        out.push_str(&format!("permutations={}\n", self.counts.len()));
        out.push_str(&format!("total={}\n", self.total()));
        out.push_str(&format!("max={}\n", self.max()));
        out.push_str(&format!("product_bound={}\n", self.product_bound()));
        out.push_str(&format!("power_bound={}\n", self.power_bound()));
        out
    }
}

/// Exhaustive tally over all `N^N` functions, `2 ≤ N ≤ 8`.
pub fn preimage_census(n: usize) -> Result<Census> {
    if n < 2 {
        return Err(Error::Invalid(format!("census needs N >= 2, got {n}")));
    }
    if n > CENSUS_MAX_N {
        return Err(Error::TooLarge(format!(
            "census enumerates N^N functions; N = {n} > {CENSUS_MAX_N}"
        )));
    }
    // Permutation codes pack each π(i) − 1 into 3 bits.
    let mut tally = vec![0u64; 1 << (3 * (n - 1))];
    let mut x = vec![1u64; n];
    loop {
        let star = star_from_values(n, |i| x[i - 1]);
        let code = swap_pass(&star)
            .iter()
            .fold(0usize, |acc, &v| (acc << 3) | (v as usize - 1));
        tally[code] += 1;

        // Next function in mixed radix, values 1..=n.
        let mut k = 0;
        while k < n && x[k] == n as u64 {
            x[k] = 1;
            k += 1;
        }
        if k == n {
            break;
        }
        x[k] += 1;
    }

    let counts = tally
        .iter()
        .enumerate()
        .filter(|(_, &c)| c > 0)
        .map(|(code, &c)| {
            let values = (0..n - 1)
                .map(|j| ((code >> (3 * (n - 2 - j))) & 7) as u32 + 1)
                .collect();
            (Permutation(values), c)
        })
        .collect();
    Ok(Census { n, counts })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::collections::HashSet;

    fn table(entries: &[u32]) -> TruthTable {
        TruthTable::new(entries.len().trailing_zeros(), entries.to_vec()).unwrap()
    }

    #[test]
    fn star_sequence_examples() {
        assert_eq!(star_sequence(&TruthTable::identity(2)).values(), &[1, 1, 1]);
        // X(i) = 1 is stored as entry 0.
        assert_eq!(star_sequence(&table(&[0, 0, 0, 0])).values(), &[1, 2, 2]);
    }

    #[test]
    fn permutation_examples() {
        let pi = permutation_from_function(&TruthTable::identity(2));
        assert_eq!(pi.values(), &[3, 1, 2]);
        assert_eq!((pi.get(1), pi.get(2), pi.get(3)), (3, 1, 2));
        let pi = permutation_from_function(&TruthTable::identity(1));
        assert_eq!(pi.values(), &[1]);
    }

    #[test]
    fn circular_examples() {
        let pi = Permutation::new(vec![3, 1, 2]).unwrap();
        let r = circular_from_permutation(&pi).unwrap();
        assert_eq!(r.succ(), &[3, 2, 0, 1]);
        assert!(r.is_single_cycle());

        let r = circular_from_permutation(&Permutation::identity(7)).unwrap();
        assert_eq!(r.succ(), &[1, 2, 3, 4, 5, 6, 7, 0]);

        let r = circular_from_permutation(&Permutation::identity(1)).unwrap();
        assert_eq!(r.succ(), &[1, 0]);
    }

    #[test]
    fn circular_rejects_bad_input() {
        assert!(Permutation::new(vec![1, 1, 2]).is_err());
        assert!(Permutation::new(vec![0, 1, 2]).is_err());
        assert!(Permutation::new(vec![1, 2, 4]).is_err());
        let pi = Permutation::new(vec![2, 1]).unwrap();
        assert!(circular_from_permutation(&pi).is_err());
    }

    #[test]
    fn direct_product_and_iterate() {
        let r = circular_from_permutation(&Permutation::new(vec![3, 1, 2]).unwrap()).unwrap();
        assert_eq!(direct_product_apply(&r, &[1]).unwrap(), vec![2]);
        assert_eq!(direct_product_apply(&r, &[0, 2]).unwrap(), vec![3, 0]);
        assert_eq!(iterate(&r, &[0, 2], 0).unwrap(), vec![0, 2]);
        assert_eq!(iterate(&r, &[0, 2], 4).unwrap(), vec![0, 2]);
        assert_eq!(iterate(&r, &[0, 2], 2).unwrap(), vec![1, 3]);
        assert!(direct_product_apply(&r, &[4]).is_err());
        assert!(iterate(&r, &[0, 9], 1).is_err());
    }

    #[test]
    fn exhaustive_n4() {
        let mut reached = HashSet::new();
        let mut circulars = HashSet::new();
        for idx in 0..256u64 {
            let t = TruthTable::from_index(2, idx).unwrap();
            let star = star_sequence(&t);
            assert!(star.values().iter().enumerate().all(|(k, &y)| 1 <= y && y as usize <= k + 1));
            let pi = permutation_from_function(&t);
            assert!(Permutation::new(pi.values().to_vec()).is_ok());
            let r = circular_from_permutation(&pi).unwrap();
            assert!(r.is_single_cycle());
            reached.insert(pi);
            circulars.insert(r);
        }
        assert_eq!(reached.len(), 6);
        // Distinct π give distinct cycles.
        assert_eq!(circulars.len(), 6);
    }

    #[test]
    fn circular_layout_is_injective_n8() {
        let mut seen = HashSet::new();
        let mut count = 0;
        let mut values: Vec<u32> = (1..=7).collect();
        permute_all(&mut values, 0, &mut |v| {
            let r = circular_from_permutation(&Permutation::new(v.to_vec()).unwrap()).unwrap();
            assert!(r.is_single_cycle());
            seen.insert(r);
            count += 1;
        });
        assert_eq!(count, 5040);
        assert_eq!(seen.len(), 5040);
    }

    fn permute_all(v: &mut Vec<u32>, k: usize, f: &mut impl FnMut(&[u32])) {
        if k == v.len() {
            f(v);
            return;
        }
        for j in k..v.len() {
            v.swap(k, j);
            permute_all(v, k + 1, f);
            v.swap(k, j);
        }
    }

    #[test]
    fn random_tables_give_single_cycles() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n_tilde in [4, 8] {
            for _ in 0..2000 {
                let t = TruthTable::random(n_tilde, &mut rng);
                let r = CircularPerm::from_table(&t);
                assert!(r.is_single_cycle());
                let x = [0u32, 1, (1 << n_tilde) - 1];
                assert_eq!(iterate(&r, &x, r.n()).unwrap(), x.to_vec());
            }
        }
    }

    #[test]
    fn census_n4() {
        let c = preimage_census(4).unwrap();
        assert_eq!(c.counts.len(), 6);
        assert_eq!(c.total(), 256);
        assert!(c.counts.values().all(|&v| v >= 1));
        // Y(1) has 4 preimages, Y(2) two each, Y(3) at most two, X(4) is free.
        assert_eq!(c.max(), 64);
        assert_eq!(c.product_bound(), 64);
        assert_eq!(c.power_bound(), 256);
    }

    #[test]
    fn census_small_and_bounds() {
        let c = preimage_census(2).unwrap();
        assert_eq!(c.counts.len(), 1);
        assert_eq!(c.total(), 4);
        assert_eq!(c.counts[&Permutation::identity(1)], 4);
        assert!(preimage_census(1).is_err());
        assert!(matches!(preimage_census(9), Err(Error::TooLarge(_))));
    }

    #[test]
    fn census_matches_table_route_n4() {
        // Tables at N = 4 are exactly the functions [4] → [4].
        let c = preimage_census(4).unwrap();
        let mut tally: BTreeMap<Permutation, u64> = BTreeMap::new();
        for idx in 0..256u64 {
            let t = TruthTable::from_index(2, idx).unwrap();
            *tally.entry(permutation_from_function(&t)).or_default() += 1;
        }
        assert_eq!(tally, c.counts);
    }

    #[test]
    fn census_max_is_product_bound() {
        for n in 2..=6 {
            let c = preimage_census(n).unwrap();
            assert_eq!(c.max(), c.product_bound(), "N={n}");
            assert!(c.max() <= c.power_bound());
        }
    }

    #[test]
    fn census_n5_sums() {
        let c = preimage_census(5).unwrap();
        assert_eq!(c.counts.len(), 24);
        assert_eq!(c.total(), 5u64.pow(5));
        assert!(c.max() <= c.power_bound());
    }

    mod props {
        use super::super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn iteration_law(raw in proptest::collection::vec(any::<u32>(), 16), a in 0u64..40, b in 0u64..40, x in proptest::collection::vec(0u32..16, 1..5)) {
                let t = TruthTable::new(4, raw.iter().map(|v| v & 15).collect()).unwrap();
                let r = CircularPerm::from_table(&t);
                let lhs = iterate(&r, &x, a + b).unwrap();
                let rhs = iterate(&r, &iterate(&r, &x, a).unwrap(), b).unwrap();
                prop_assert_eq!(lhs, rhs);
            }
        }
    }
}

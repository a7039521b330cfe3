//! Packed bit strings, truth tables and seeds.
//!
//! Bit order is MSB-first everywhere: bit 0 of a [`BitString`] is the most
//! significant bit of its first byte, and within a serialized table or mask
//! block `j` of width ñ occupies stream bits `[j·ñ, (j+1)·ñ)` with its most
//! significant bit first.

use std::fmt;
use std::fs;
use std::path::Path;

use rand::Rng;

use crate::error::{Error, Result};
use crate::params::{ParamSet, MAX_N_TILDE};

/// A fixed-length string of bits packed MSB-first. Pad bits in the final
/// byte are always zero.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BitString {
    len: usize,
    bytes: Vec<u8>,
}

impl BitString {
    pub fn zeros(len: usize) -> Self {
        BitString {
            len,
            bytes: vec![0; len.div_ceil(8)],
        }
    }

    pub fn from_bools<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let mut out = BitString::default();
        for b in bits {
            out.push(b);
        }
        out
    }

    /// Wraps packed bytes. Fails if the byte count is wrong or a pad bit is set.
    pub fn from_bytes(bytes: Vec<u8>, len: usize) -> Result<Self> {
        if bytes.len() != len.div_ceil(8) {
            return Err(Error::Invalid(format!(
                "{} bytes cannot hold exactly {len} bits",
                bytes.len()
            )));
        }
        let s = BitString { len, bytes };
        if s.pad_bits() != 0 {
            return Err(Error::Invalid("non-zero pad bits".into()));
        }
        Ok(s)
    }

    /// The low `len` bits of `value`, most significant first.
    pub fn from_u64(value: u64, len: usize) -> Self {
        assert!(len <= 64);
        let mut s = BitString::zeros(len);
        for i in 0..len {
            s.set(i, (value >> (len - 1 - i)) & 1 == 1);
        }
        s
    }

    /// Concatenation of `width`-bit blocks, block 0 first.
    pub fn from_blocks(blocks: &[u32], width: u32) -> Self {
        let mut s = BitString::zeros(blocks.len() * width as usize);
        for (j, &b) in blocks.iter().enumerate() {
            s.write_block(j * width as usize, width, b as u64);
        }
        s
    }

    /// Parses a string of `'0'`/`'1'` characters.
    pub fn parse_binary(text: &str) -> Result<Self> {
        text.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::Invalid(format!("not a binary digit: {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(BitString::from_bools)
    }

    /// Parses exactly `⌈len/4⌉` hex digits, MSB-first. Bits past `len` in the
    /// final digit must be zero.
    pub fn from_hex(hex: &str, len: usize) -> Result<Self> {
        let digits = len.div_ceil(4);
        if hex.len() != digits {
            return Err(Error::Invalid(format!(
                "expected {digits} hex digits for {len} bits, got {}",
                hex.len()
            )));
        }
        let mut s = BitString::zeros(digits * 4);
        for (k, c) in hex.chars().enumerate() {
            let v = c
                .to_digit(16)
                .ok_or_else(|| Error::Invalid(format!("not a hex digit: {c:?}")))?;
            s.write_block(4 * k, 4, v as u64);
        }
        if (len..digits * 4).any(|i| s.get(i)) {
            return Err(Error::Invalid("non-zero pad bits after the last bit".into()));
        }
        Ok(s.prefix(len))
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.bytes
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range for length {}", self.len);
        (self.bytes[i / 8] >> (7 - i % 8)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, v: bool) {
        assert!(i < self.len, "bit index {i} out of range for length {}", self.len);
        let mask = 0x80u8 >> (i % 8);
        if v {
            self.bytes[i / 8] |= mask;
        } else {
            self.bytes[i / 8] &= !mask;
        }
    }

    pub fn push(&mut self, v: bool) {
        if self.len.is_multiple_of(8) {
            self.bytes.push(0);
        }
        self.len += 1;
        self.set(self.len - 1, v);
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    /// Reads `width ≤ 64` bits starting at `start` as an unsigned integer.
    pub fn read_block(&self, start: usize, width: u32) -> u64 {
        (0..width as usize).fold(0u64, |acc, k| (acc << 1) | self.get(start + k) as u64)
    }

    /// Writes the low `width` bits of `value` starting at `start`.
    pub fn write_block(&mut self, start: usize, width: u32, value: u64) {
        for k in 0..width as usize {
            self.set(start + k, (value >> (width as usize - 1 - k)) & 1 == 1);
        }
    }

    /// Splits into `len / width` consecutive blocks.
    pub fn to_blocks(&self, width: u32) -> Vec<u32> {
        assert!(width > 0 && self.len.is_multiple_of(width as usize));
        (0..self.len / width as usize)
            .map(|j| self.read_block(j * width as usize, width) as u32)
            .collect()
    }

    /// The whole string as an integer; requires `len ≤ 64`.
    pub fn to_u64(&self) -> u64 {
        assert!(self.len <= 64);
        self.read_block(0, self.len as u32)
    }

    pub fn prefix(&self, len: usize) -> BitString {
        assert!(len <= self.len);
        let mut bytes = self.bytes[..len.div_ceil(8)].to_vec();
        if !len.is_multiple_of(8) {
            let last = bytes.len() - 1;
            bytes[last] &= 0xffu8 << (8 - len % 8);
        }
        BitString { len, bytes }
    }

    pub fn xor(&self, other: &BitString) -> Result<BitString> {
        if self.len != other.len {
            return Err(Error::LengthMismatch {
                left: self.len,
                right: other.len,
            });
        }
        Ok(BitString {
            len: self.len,
            bytes: self.bytes.iter().zip(&other.bytes).map(|(a, b)| a ^ b).collect(),
        })
    }

    pub fn count_ones(&self) -> u64 {
        self.bytes.iter().map(|b| b.count_ones() as u64).sum()
    }

    /// `'0'`/`'1'` rendering, bit 0 first.
    pub fn to_binary(&self) -> String {
        self.iter().map(|b| if b { '1' } else { '0' }).collect()
    }

    /// Lower-case hex, `⌈len/4⌉` digits, zero-padded at the end.
    pub fn to_hex(&self) -> String {
        let digits = self.len.div_ceil(4);
        (0..digits)
            .map(|k| {
                let v = (0..4).fold(0u32, |acc, b| {
                    let i = 4 * k + b;
                    (acc << 1) | (i < self.len && self.get(i)) as u32
                });
                char::from_digit(v, 16).unwrap()
            })
            .collect()
    }

    fn pad_bits(&self) -> u8 {
        if self.len.is_multiple_of(8) {
            0
        } else {
            self.bytes[self.len / 8] & (0xffu8 >> (self.len % 8))
        }
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString({})", self.to_binary())
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_binary())
    }
}

/// Inner product modulo 2: the parity of `a AND b`.
pub fn inner_product(a: &BitString, b: &BitString) -> Result<bool> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    let ones: u32 = a
        .as_bytes()
        .iter()
        .zip(b.as_bytes())
        .map(|(x, y)| (x & y).count_ones())
        .sum();
    Ok(ones & 1 == 1)
}

/// Inner product of a mask and a value that are both given as same-width
/// blocks. Equal to [`inner_product`] on the concatenations.
#[inline]
pub(crate) fn block_inner_product(r_blocks: &[u32], y_blocks: &[u32]) -> bool {
    let acc = r_blocks
        .iter()
        .zip(y_blocks)
        .fold(0u32, |acc, (r, y)| acc ^ (r & y));
    acc.count_ones() & 1 == 1
}

/// Adds `k` to every block modulo 2^ñ.
pub fn shift_tuple(x_blocks: &[u32], k: u64, n_tilde: u32) -> Vec<u32> {
    let mask = (1u64 << n_tilde) - 1;
    x_blocks
        .iter()
        .map(|&b| ((b as u64).wrapping_add(k) & mask) as u32)
        .collect()
}

const FILE_MAGIC: &str = "XTT1";

/// A weak-source string viewed as a function `{0,1}^ñ → {0,1}^ñ`: exactly
/// `2^ñ` entries, each below `2^ñ`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct TruthTable {
    n_tilde: u32,
    entries: Vec<u32>,
}

impl TruthTable {
    pub fn new(n_tilde: u32, entries: Vec<u32>) -> Result<Self> {
        check_width(n_tilde)?;
        let n = 1u64 << n_tilde;
        if entries.len() as u64 != n {
            return Err(Error::Invalid(format!(
                "a table of width {n_tilde} needs {n} entries, got {}",
                entries.len()
            )));
        }
        if let Some(&v) = entries.iter().find(|&&v| v as u64 >= n) {
            return Err(Error::OutOfRange {
                what: "table entry",
                value: v as u64,
                limit: n,
            });
        }
        Ok(TruthTable { n_tilde, entries })
    }

    pub fn identity(n_tilde: u32) -> Self {
        let n = 1u64 << n_tilde;
        TruthTable {
            n_tilde,
            entries: (0..n).map(|v| v as u32).collect(),
        }
    }

    pub fn constant(n_tilde: u32, value: u32) -> Result<Self> {
        TruthTable::new(n_tilde, vec![value; 1usize << n_tilde])
    }

    /// Uniformly random table.
    pub fn random<R: Rng + ?Sized>(n_tilde: u32, rng: &mut R) -> Self {
        let mask = ((1u64 << n_tilde) - 1) as u32;
        TruthTable {
            n_tilde,
            entries: (0..1usize << n_tilde).map(|_| rng.gen::<u32>() & mask).collect(),
        }
    }

    pub fn n_tilde(&self) -> u32 {
        self.n_tilde
    }

    /// Number of entries, N = 2^ñ.
    pub fn n(&self) -> u64 {
        self.entries.len() as u64
    }

    /// Length of the serialized bit string, N̄ = ñ·N.
    pub fn n_bar(&self) -> u64 {
        self.n_tilde as u64 * self.n()
    }

    pub fn entries(&self) -> &[u32] {
        &self.entries
    }

    /// Unchecked read; panics if `x ≥ N`.
    #[inline]
    pub fn get(&self, x: u32) -> u32 {
        self.entries[x as usize]
    }

    /// Packs the table into its N̄-bit serialized form.
    pub fn to_bits(&self) -> BitString {
        BitString::from_blocks(&self.entries, self.n_tilde)
    }

    /// Reads a table from its N̄-bit serialized form.
    pub fn from_bits(n_tilde: u32, bits: &BitString) -> Result<Self> {
        check_width(n_tilde)?;
        let n_bar = (n_tilde as u64) << n_tilde;
        if bits.len() as u64 != n_bar {
            return Err(Error::LengthMismatch {
                left: bits.len(),
                right: n_bar as usize,
            });
        }
        Ok(TruthTable {
            n_tilde,
            entries: bits.to_blocks(n_tilde),
        })
    }

    /// The table whose N̄-bit serialization, read as an integer, is `index`.
    /// Requires N̄ ≤ 64; used to enumerate every table at toy sizes.
    pub fn from_index(n_tilde: u32, index: u64) -> Result<Self> {
        check_width(n_tilde)?;
        let n_bar = (n_tilde as u64) << n_tilde;
        if n_bar > 64 {
            return Err(Error::TooLarge(format!("N_bar = {n_bar} > 64")));
        }
        let mask = (1u64 << n_tilde) - 1;
        let entries = (0..1u64 << n_tilde)
            .map(|j| ((index >> (n_bar - (j + 1) * n_tilde as u64)) & mask) as u32)
            .collect();
        Ok(TruthTable { n_tilde, entries })
    }

    /// Inverse of [`TruthTable::from_index`].
    pub fn to_index(&self) -> u64 {
        assert!(self.n_bar() <= 64);
        self.entries
            .iter()
            .fold(0u64, |acc, &e| (acc << self.n_tilde) | e as u64)
    }

    /// File form: `XTT1 ntilde=<k>\n` followed by the packed entries.
    pub fn to_file_bytes(&self) -> Vec<u8> {
        let mut out = format!("{FILE_MAGIC} ntilde={}\n", self.n_tilde).into_bytes();
        out.extend_from_slice(self.to_bits().as_bytes());
        out
    }

    pub fn from_file_bytes(data: &[u8]) -> Result<Self> {
        let nl = data
            .iter()
            .position(|&b| b == b'\n')
            .ok_or_else(|| Error::Format("missing header line".into()))?;
        let header = std::str::from_utf8(&data[..nl])
            .map_err(|_| Error::Format("header is not ASCII".into()))?;
        let n_tilde: u32 = header
            .strip_prefix(FILE_MAGIC)
            .and_then(|rest| rest.strip_prefix(" ntilde="))
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| Error::Format(format!("bad header {header:?}")))?;
        if n_tilde == 0 || n_tilde > MAX_N_TILDE {
            return Err(Error::Format(format!("unsupported ntilde={n_tilde}")));
        }
        let n_bar = (n_tilde as usize) << n_tilde;
        let payload = &data[nl + 1..];
        if payload.len() != n_bar.div_ceil(8) {
            return Err(Error::Format(format!(
                "expected {} payload bytes for ntilde={n_tilde}, got {}",
                n_bar.div_ceil(8),
                payload.len()
            )));
        }
        let bits = BitString::from_bytes(payload.to_vec(), n_bar)
            .map_err(|e| Error::Format(e.to_string()))?;
        TruthTable::from_bits(n_tilde, &bits)
    }

    pub fn write_file<P: AsRef<Path>>(&self, path: P) -> Result<()> {
        fs::write(path, self.to_file_bytes())?;
        Ok(())
    }

    pub fn read_file<P: AsRef<Path>>(path: P) -> Result<Self> {
        let data = fs::read(path)?;
        TruthTable::from_file_bytes(&data)
    }
}

impl fmt::Debug for TruthTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.entries.len() <= 16 {
            write!(f, "TruthTable(ñ={}, {:?})", self.n_tilde, self.entries)
        } else {
            write!(f, "TruthTable(ñ={}, N={})", self.n_tilde, self.entries.len())
        }
    }
}

fn check_width(n_tilde: u32) -> Result<()> {
    if n_tilde == 0 || n_tilde > MAX_N_TILDE {
        return Err(Error::Invalid(format!(
            "n_tilde must be in 1..={MAX_N_TILDE}, got {n_tilde}"
        )));
    }
    Ok(())
}

/// `X(x)` with a range check.
pub fn table_lookup(table: &TruthTable, x: u32) -> Result<u32> {
    table.entries.get(x as usize).copied().ok_or(Error::OutOfRange {
        what: "table index",
        value: x as u64,
        limit: table.n(),
    })
}

/// The extractor seed `(x̄, r)`: `ℓ` blocks of ñ bits and an `ℓ·ñ`-bit mask.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Seed {
    x_blocks: Vec<u32>,
    r: BitString,
    r_blocks: Vec<u32>,
}

impl Seed {
    pub fn new(x_blocks: Vec<u32>, r: BitString, n_tilde: u32) -> Result<Self> {
        check_width(n_tilde)?;
        let n = 1u64 << n_tilde;
        if r.len() != x_blocks.len() * n_tilde as usize {
            return Err(Error::SeedMismatch(format!(
                "|r| = {} but {} blocks of width {n_tilde} need {}",
                r.len(),
                x_blocks.len(),
                x_blocks.len() * n_tilde as usize
            )));
        }
        if let Some(&b) = x_blocks.iter().find(|&&b| b as u64 >= n) {
            return Err(Error::OutOfRange {
                what: "seed block",
                value: b as u64,
                limit: n,
            });
        }
        let r_blocks = r.to_blocks(n_tilde);
        Ok(Seed {
            x_blocks,
            r,
            r_blocks,
        })
    }

    /// Splits a `d`-bit string as `x₁ ‖ … ‖ x_ℓ ‖ r`.
    pub fn from_bits(bits: &BitString, p: &ParamSet) -> Result<Self> {
        if bits.len() as u64 != p.d {
            return Err(Error::SeedMismatch(format!(
                "seed length must be d={} bits, got {}",
                p.d,
                bits.len()
            )));
        }
        let half = p.half_seed_bits() as usize;
        let x_blocks = bits.prefix(half).to_blocks(p.n_tilde);
        let mut r = BitString::zeros(half);
        for i in 0..half {
            r.set(i, bits.get(half + i));
        }
        Seed::new(x_blocks, r, p.n_tilde)
    }

    /// Parses the CLI seed form: exactly `⌈d/4⌉` hex digits, MSB-first.
    pub fn from_hex(hex: &str, p: &ParamSet) -> Result<Self> {
        if hex.len() as u64 != p.d.div_ceil(4) {
            return Err(Error::SeedMismatch(format!(
                "seed length must be d={} bits ({} hex digits), got {} hex digits",
                p.d,
                p.d.div_ceil(4),
                hex.len()
            )));
        }
        let bits = BitString::from_hex(hex, p.d as usize)?;
        Seed::from_bits(&bits, p)
    }

    /// The seed whose `d`-bit form, read as an integer, is `index` (d ≤ 64).
    pub fn from_index(index: u64, p: &ParamSet) -> Result<Self> {
        if p.d > 64 {
            return Err(Error::TooLarge(format!("d = {} > 64", p.d)));
        }
        Seed::from_bits(&BitString::from_u64(index, p.d as usize), p)
    }

    /// Uniformly random seed for `p`.
    pub fn random<R: Rng + ?Sized>(p: &ParamSet, rng: &mut R) -> Self {
        let mask = p.block_mask() as u32;
        let ell = p.ell as usize;
        let x_blocks: Vec<u32> = (0..ell).map(|_| rng.gen::<u32>() & mask).collect();
        let r_blocks: Vec<u32> = (0..ell).map(|_| rng.gen::<u32>() & mask).collect();
        let r = BitString::from_blocks(&r_blocks, p.n_tilde);
        Seed {
            x_blocks,
            r,
            r_blocks,
        }
    }

    pub fn to_bits(&self, n_tilde: u32) -> BitString {
        let mut all = BitString::from_blocks(&self.x_blocks, n_tilde);
        for b in self.r.iter() {
            all.push(b);
        }
        all
    }

    pub fn to_hex(&self, n_tilde: u32) -> String {
        self.to_bits(n_tilde).to_hex()
    }

    pub fn x_blocks(&self) -> &[u32] {
        &self.x_blocks
    }

    pub fn r(&self) -> &BitString {
        &self.r
    }

    pub fn r_blocks(&self) -> &[u32] {
        &self.r_blocks
    }

    /// Checks block count and mask length against `p`.
    pub fn check(&self, p: &ParamSet) -> Result<()> {
        if self.x_blocks.len() as u64 != p.ell {
            return Err(Error::SeedMismatch(format!(
                "seed has {} blocks, parameters need ell={}",
                self.x_blocks.len(),
                p.ell
            )));
        }
        if self.r.len() as u64 != p.half_seed_bits() {
            return Err(Error::SeedMismatch(format!(
                "|r| = {}, parameters need ell*n_tilde = {}",
                self.r.len(),
                p.half_seed_bits()
            )));
        }
        if let Some(&b) = self.x_blocks.iter().find(|&&b| b as u64 >= p.n) {
            return Err(Error::OutOfRange {
                what: "seed block",
                value: b as u64,
                limit: p.n,
            });
        }
        Ok(())
    }
}

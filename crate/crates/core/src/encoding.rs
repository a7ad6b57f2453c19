//! Bitstring genotypes and the two codings (standard binary / Gray).
//!
//! A genotype is a fixed-length bit vector holding `n` parameter blocks of
//! `N` bits each. Within a block, bit 0 is the least significant; block 0
//! holds the first parameter. Decoding maps a block's integer value `k`
//! onto `[a, b]` via `x = a + (b - a) / (2^N - 1) * k`; Gray blocks are
//! first converted to standard binary.

use rand::Rng;

use crate::error::{Error, Result};

/// Fixed-length bit vector. Length is immutable after construction.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BitString {
    bits: Vec<bool>,
}

impl BitString {
    pub fn new(bits: Vec<bool>) -> Self {
        assert!(!bits.is_empty(), "BitString must have length >= 1");
        BitString { bits }
    }

    pub fn zeros(len: usize) -> Self {
        Self::new(vec![false; len])
    }

    /// Uniform random bits.
    pub fn random(len: usize, rng: &mut impl Rng) -> Self {
        Self::new((0..len).map(|_| rng.gen::<bool>()).collect())
    }

    /// Low `len` bits of `value`, bit 0 least significant.
    pub fn from_int(value: u64, len: usize) -> Self {
        Self::new((0..len).map(|i| (value >> i) & 1 == 1).collect())
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn get(&self, i: usize) -> bool {
        self.bits[i]
    }

    pub fn flip(&mut self, i: usize) {
        self.bits[i] = !self.bits[i];
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.bits
    }

    pub fn as_mut_slice(&mut self) -> &mut [bool] {
        &mut self.bits
    }
}

/// Genotype encoding: standard binary or reflected Gray.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Coding {
    StandardBinary,
    Gray,
}

impl Coding {
    pub fn other(self) -> Coding {
        match self {
            Coding::StandardBinary => Coding::Gray,
            Coding::Gray => Coding::StandardBinary,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Coding::StandardBinary => "sc",
            Coding::Gray => "gc",
        }
    }

    pub fn parse(s: &str) -> Result<Coding> {
        match s {
            "sc" => Ok(Coding::StandardBinary),
            "gc" => Ok(Coding::Gray),
            other => Err(Error::config(format!(
                "unknown coding `{other}` (allowed: sc, gc)"
            ))),
        }
    }
}

impl std::fmt::Display for Coding {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Per-parameter decode spec: bounds `[a, b]` and bits per parameter `N`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamSpec {
    pub a: f64,
    pub b: f64,
    pub n_bits: u32,
}

impl ParamSpec {
    pub fn new(a: f64, b: f64, n_bits: u32) -> Result<Self> {
        if !(a < b) {
            return Err(Error::contract(format!("ParamSpec requires a < b, got [{a}, {b}]")));
        }
        if n_bits < 1 || n_bits > 63 {
            return Err(Error::contract(format!(
                "ParamSpec requires 1 <= N <= 63, got {n_bits}"
            )));
        }
        Ok(ParamSpec { a, b, n_bits })
    }

    /// Largest block integer, `2^N - 1` (exact; N <= 63).
    pub fn max_index(&self) -> u64 {
        (1u64 << self.n_bits) - 1
    }

    /// Grid value at integer index `k`.
    pub fn value_at(&self, k: u64) -> f64 {
        self.a + (self.b - self.a) / (self.max_index() as f64) * (k as f64)
    }

    /// Grid index nearest to `x` (round half up in index space, clamped).
    pub fn nearest_index(&self, x: f64) -> u64 {
        let t = (x - self.a) / (self.b - self.a) * self.max_index() as f64;
        let k = (t + 0.5).floor();
        if k <= 0.0 {
            0
        } else if k >= self.max_index() as f64 {
            self.max_index()
        } else {
            k as u64
        }
    }
}

/// Layout of a full genotype: `n` parameters sharing one [`ParamSpec`],
/// total length `L = n * N`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenotypeLayout {
    pub n_params: usize,
    pub spec: ParamSpec,
}

impl GenotypeLayout {
    pub fn new(n_params: usize, spec: ParamSpec) -> Result<Self> {
        if n_params == 0 {
            return Err(Error::contract("GenotypeLayout requires n >= 1"));
        }
        Ok(GenotypeLayout { n_params, spec })
    }

    pub fn total_bits(&self) -> usize {
        self.n_params * self.spec.n_bits as usize
    }

    /// Bit range of parameter block `i`.
    pub fn block_range(&self, i: usize) -> std::ops::Range<usize> {
        let n = self.spec.n_bits as usize;
        i * n..(i + 1) * n
    }
}

/// Unsigned integer value of a block, bit 0 least significant.
pub fn block_to_int(block: &[bool]) -> u64 {
    block
        .iter()
        .enumerate()
        .fold(0u64, |acc, (i, &b)| if b { acc | (1 << i) } else { acc })
}

/// Standard binary -> Gray: `g_i = s_{i+1} XOR s_i`, with `s` beyond the
/// top bit taken as 0.
pub fn sc_to_gc(block: &BitString) -> BitString {
    let s = block.as_slice();
    let len = s.len();
    let mut g = vec![false; len];
    for i in 0..len {
        let hi = if i + 1 < len { s[i + 1] } else { false };
        g[i] = hi ^ s[i];
    }
    BitString::new(g)
}

/// Gray -> standard binary: `s_i = s_{i+1} XOR g_i`, running XOR from the
/// most significant bit down. Exact inverse of [`sc_to_gc`].
pub fn gc_to_sc(block: &BitString) -> BitString {
    let g = block.as_slice();
    let len = g.len();
    let mut s = vec![false; len];
    let mut carry = false;
    for i in (0..len).rev() {
        carry ^= g[i];
        s[i] = carry;
    }
    BitString::new(s)
}

fn check_block_len(block: &[bool], spec: &ParamSpec) -> Result<()> {
    if block.len() != spec.n_bits as usize {
        return Err(Error::contract(format!(
            "block length {} does not match spec N = {}",
            block.len(),
            spec.n_bits
        )));
    }
    Ok(())
}

/// Integer grid index of a block interpreted under `coding`.
pub fn block_index(block: &[bool], coding: Coding) -> u64 {
    let k = block_to_int(block);
    match coding {
        Coding::StandardBinary => k,
        // Gray -> binary on the integer: running prefix XOR.
        Coding::Gray => {
            let mut s = k;
            let mut shift = 1;
            while shift < 64 {
                s ^= s >> shift;
                shift <<= 1;
            }
            s
        }
    }
}

/// Decode one parameter block to its real value in `[a, b]`.
pub fn decode_param(block: &BitString, spec: &ParamSpec, coding: Coding) -> Result<f64> {
    check_block_len(block.as_slice(), spec)?;
    Ok(spec.value_at(block_index(block.as_slice(), coding)))
}

/// Decode a full genotype; parameter `i` comes from bits `[i*N, (i+1)*N)`.
pub fn decode_genotype(g: &BitString, layout: &GenotypeLayout, coding: Coding) -> Result<Vec<f64>> {
    if g.len() != layout.total_bits() {
        return Err(Error::contract(format!(
            "genotype length {} does not match layout L = {}",
            g.len(),
            layout.total_bits()
        )));
    }
    let mut out = Vec::with_capacity(layout.n_params);
    for i in 0..layout.n_params {
        let block = &g.as_slice()[layout.block_range(i)];
        out.push(layout.spec.value_at(block_index(block, coding)));
    }
    Ok(out)
}

/// Convert a genotype between codings block by block. Phenotype invariant:
/// each block keeps its integer grid index.
pub fn convert_genotype(
    g: &BitString,
    layout: &GenotypeLayout,
    from: Coding,
    to: Coding,
) -> Result<BitString> {
    if g.len() != layout.total_bits() {
        return Err(Error::contract(format!(
            "genotype length {} does not match layout L = {}",
            g.len(),
            layout.total_bits()
        )));
    }
    if from == to {
        return Ok(g.clone());
    }
    let mut out = g.clone();
    for i in 0..layout.n_params {
        let range = layout.block_range(i);
        let block = BitString::new(g.as_slice()[range.clone()].to_vec());
        let converted = match (from, to) {
            (Coding::StandardBinary, Coding::Gray) => sc_to_gc(&block),
            (Coding::Gray, Coding::StandardBinary) => gc_to_sc(&block),
            _ => unreachable!(),
        };
        out.as_mut_slice()[range].copy_from_slice(converted.as_slice());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn bs(s: &str) -> BitString {
        // Written MSB-first for readability; bit 0 is LSB.
        BitString::new(s.chars().rev().map(|c| c == '1').collect())
    }

    #[test]
    fn decode_param_endpoints() {
        let spec = ParamSpec::new(-2.048, 2.048, 20).unwrap();
        let zeros = BitString::zeros(20);
        assert_eq!(
            decode_param(&zeros, &spec, Coding::StandardBinary).unwrap(),
            -2.048
        );
        let ones = BitString::new(vec![true; 20]);
        assert_eq!(
            decode_param(&ones, &spec, Coding::StandardBinary).unwrap(),
            2.048
        );
    }

    #[test]
    fn decode_param_midrange() {
        let spec = ParamSpec::new(0.0, 15.0, 4).unwrap();
        // 0101 = 5 under SC
        assert_eq!(
            decode_param(&bs("0101"), &spec, Coding::StandardBinary).unwrap(),
            5.0
        );
        // gray 0101 -> binary 0110 = 6
        assert_eq!(decode_param(&bs("0101"), &spec, Coding::Gray).unwrap(), 6.0);
    }

    #[test]
    fn decode_param_length_mismatch() {
        let spec = ParamSpec::new(0.0, 1.0, 4).unwrap();
        assert!(decode_param(&bs("01"), &spec, Coding::StandardBinary).is_err());
    }

    #[test]
    fn sc_gc_examples() {
        assert_eq!(sc_to_gc(&bs("0000")), bs("0000"));
        assert_eq!(sc_to_gc(&bs("0110")), bs("0101"));
        assert_eq!(sc_to_gc(&bs("1111")), bs("1000"));
        assert_eq!(gc_to_sc(&bs("0000")), bs("0000"));
        assert_eq!(gc_to_sc(&bs("1000")), bs("1111"));
    }

    #[test]
    fn round_trip_exhaustive_4bit() {
        for k in 0u64..16 {
            let x = BitString::from_int(k, 4);
            assert_eq!(gc_to_sc(&sc_to_gc(&x)), x);
            assert_eq!(sc_to_gc(&gc_to_sc(&x)), x);
        }
    }

    #[test]
    fn gray_matches_integer_oracle() {
        // Reference: gray(k) = k ^ (k >> 1).
        for k in 0u64..4096 {
            let g = sc_to_gc(&BitString::from_int(k, 12));
            assert_eq!(block_to_int(g.as_slice()), k ^ (k >> 1));
        }
    }

    #[test]
    fn decode_genotype_blocks() {
        let spec = ParamSpec::new(0.0, 15.0, 4).unwrap();
        let layout = GenotypeLayout::new(2, spec).unwrap();
        // block0 = all ones, block1 = all zeros
        let mut g = BitString::zeros(8);
        for i in 0..4 {
            g.flip(i);
        }
        let x = decode_genotype(&g, &layout, Coding::StandardBinary).unwrap();
        assert_eq!(x, vec![15.0, 0.0]);

        let zeros = BitString::zeros(8);
        assert_eq!(
            decode_genotype(&zeros, &layout, Coding::Gray).unwrap(),
            vec![0.0, 0.0]
        );
    }

    #[test]
    fn convert_genotype_identity_and_round_trip() {
        let spec = ParamSpec::new(-100.0, 100.0, 40).unwrap();
        let layout = GenotypeLayout::new(2, spec).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let g = BitString::random(80, &mut rng);
        assert_eq!(
            convert_genotype(&g, &layout, Coding::StandardBinary, Coding::StandardBinary).unwrap(),
            g
        );
        let gc = convert_genotype(&g, &layout, Coding::StandardBinary, Coding::Gray).unwrap();
        let back = convert_genotype(&gc, &layout, Coding::Gray, Coding::StandardBinary).unwrap();
        assert_eq!(back, g);
        // Phenotype invariant.
        assert_eq!(
            decode_genotype(&g, &layout, Coding::StandardBinary).unwrap(),
            decode_genotype(&gc, &layout, Coding::Gray).unwrap()
        );
    }

    #[test]
    fn per_block_conversion() {
        let spec = ParamSpec::new(0.0, 15.0, 4).unwrap();
        let layout = GenotypeLayout::new(2, spec).unwrap();
        let mut g = BitString::zeros(8);
        // 0110 in each block
        g.flip(1);
        g.flip(2);
        g.flip(5);
        g.flip(6);
        let gc = convert_genotype(&g, &layout, Coding::StandardBinary, Coding::Gray).unwrap();
        // expect 0101 per block
        let expect: Vec<bool> = vec![true, false, true, false, true, false, true, false];
        assert_eq!(gc.as_slice(), &expect[..]);
    }
}

//! Parity machinery for determinant-like engines: permutation sign,
//! ordered-partition sign, and precomputed cross-inversion tables that make
//! the per-pair sign oracle of the signed convolution `O(w)`.
//!
//! All signs are relative to one fixed element order per part: the file
//! order of indices (1, 2, …, n on each axis). Signs are returned as `i8`
//! (±1) so engines can fold them into ring values uniformly.

use std::collections::BTreeSet;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SignError {
    #[error("input is not a bijection: value {0} repeats or has no rank")]
    NotBijection(usize),
    #[error("partition blocks overlap at element {0}")]
    BlocksOverlap(usize),
}

/// Sign of a bijection given as the list of images of an ordered domain:
/// `(−1)^{#inversions}`, computed in `O(n)` by cycle counting. The images
/// may be any distinct values; they are compared in their natural order.
pub fn perm_sign(images: &[usize]) -> Result<i8, SignError> {
    let n = images.len();
    // Rank the image values; a duplicate shows up as a rank collision.
    let sorted: BTreeSet<usize> = images.iter().copied().collect();
    if sorted.len() != n {
        let dup = images
            .iter()
            .find(|v| images.iter().filter(|w| w == v).count() > 1)
            .copied()
            .unwrap_or(0);
        return Err(SignError::NotBijection(dup));
    }
    let mut rank_of = std::collections::BTreeMap::new();
    for (r, v) in sorted.into_iter().enumerate() {
        rank_of.insert(v, r);
    }
    let perm: Vec<usize> = images.iter().map(|v| rank_of[v]).collect();
    // sign = (−1)^{n − #cycles}.
    let mut seen = vec![false; n];
    let mut cycles = 0usize;
    for start in 0..n {
        if seen[start] {
            continue;
        }
        cycles += 1;
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            i = perm[i];
        }
    }
    Ok(if (n - cycles) % 2 == 0 { 1 } else { -1 })
}

/// Sign of the permutation that concatenates the given sorted blocks in
/// order, relative to the fully sorted universe: the parity of the number
/// of cross-block inversions.
pub fn partition_sign(blocks: &[Vec<usize>]) -> Result<i8, SignError> {
    let mut seen = BTreeSet::new();
    for b in blocks {
        for &x in b {
            if !seen.insert(x) {
                return Err(SignError::BlocksOverlap(x));
            }
        }
    }
    let mut inversions = 0usize;
    for i in 0..blocks.len() {
        for j in i + 1..blocks.len() {
            for &u in &blocks[i] {
                for &v in &blocks[j] {
                    if u > v {
                        inversions += 1;
                    }
                }
            }
        }
    }
    Ok(if inversions % 2 == 0 { 1 } else { -1 })
}

/// Precomputed cross-inversion counts for one merge step of the signed
/// left fold, on one part of a bag's ground set.
///
/// A merge combines an accumulated factor (visible block `Ȳ₀`, hidden block
/// `Δ₀`) with a next factor (visible `Ȳ₁`, hidden `Δ₁`). The step sign
///
/// `S(Ȳ₀, Ȳ₁) = sgn(Ȳ₀,Ȳ₁) · sgn(Ȳ₀,Δ₁) · sgn(Δ₀,Ȳ₁) · sgn(Δ₀,Δ₁)`
///
/// is evaluated in `O(w)` from per-element counts `N_x^Δ = #{y ∈ Δ : y < x}`
/// plus the constant hidden-hidden factor.
#[derive(Debug, Clone)]
pub struct CrossInversionTable {
    /// Bit offset of this part within the packed ground-set mask.
    bit_offset: usize,
    /// Per visible element (bit order), #{y ∈ Δ₁ : y < x}.
    below_next: Vec<u32>,
    /// Per visible element (bit order), #{y ∈ Δ₀ : y > x}.
    above_acc: Vec<u32>,
    /// Parity of the constant factor sgn(Δ₀, Δ₁).
    const_negative: bool,
}

/// Number of elements of the sorted list `delta` that are smaller than `x`.
fn count_below(delta: &[usize], x: usize) -> u32 {
    delta.partition_point(|&y| y < x) as u32
}

impl CrossInversionTable {
    /// Builds the table for one part.
    ///
    /// * `visible` — the part's bag elements in bit order (sorted),
    /// * `delta_acc` — hidden elements accumulated so far (sorted),
    /// * `delta_next` — hidden elements of the incoming factor (sorted),
    /// * `bit_offset` — the part's first bit in the packed mask.
    ///
    /// Invariants: each count is at most the corresponding `|Δ|`; the whole
    /// table is recomputable from scratch in `O(ω·n)`.
    pub fn new(
        visible: &[usize],
        delta_acc: &[usize],
        delta_next: &[usize],
        bit_offset: usize,
    ) -> CrossInversionTable {
        let below_next: Vec<u32> = visible.iter().map(|&x| count_below(delta_next, x)).collect();
        let above_acc: Vec<u32> = visible
            .iter()
            .map(|&x| delta_acc.len() as u32 - count_below(delta_acc, x))
            .collect();
        // Cross inversions between the two hidden blocks, Δ₀ listed first.
        let mut inv = 0usize;
        for &x in delta_acc {
            inv += count_below(delta_next, x) as usize;
        }
        CrossInversionTable {
            bit_offset,
            below_next,
            above_acc,
            const_negative: inv % 2 == 1,
        }
    }

    fn part_bits(&self, mask: u64) -> u64 {
        (mask >> self.bit_offset) & ((1u64 << self.below_next.len()) - 1)
    }
}

/// Evaluates the merge-step sign `S(maskA, maskB)` for one part in `O(w)`.
/// The masks index the packed ground set and must be disjoint; only this
/// part's bits are consulted.
pub fn sign_oracle(table: &CrossInversionTable, mask_a: u64, mask_b: u64) -> i8 {
    debug_assert_eq!(mask_a & mask_b, 0, "visible blocks must be disjoint");
    let a = table.part_bits(mask_a);
    let b = table.part_bits(mask_b);
    let mut parity = table.const_negative;
    // sgn(Ȳ₀, Ȳ₁): for each element of Ȳ₁, count larger elements of Ȳ₀.
    // Bit order equals element order, so "larger" = higher bits.
    let mut bits = b;
    while bits != 0 {
        let i = bits.trailing_zeros();
        bits &= bits - 1;
        let above = a >> (i + 1);
        parity ^= (above.count_ones() & 1) == 1;
    }
    // sgn(Ȳ₀, Δ₁) and sgn(Δ₀, Ȳ₁) from the precomputed counts.
    let mut bits = a;
    while bits != 0 {
        let i = bits.trailing_zeros() as usize;
        bits &= bits - 1;
        parity ^= (table.below_next[i] & 1) == 1;
    }
    let mut bits = b;
    while bits != 0 {
        let i = bits.trailing_zeros() as usize;
        bits &= bits - 1;
        parity ^= (table.above_acc[i] & 1) == 1;
    }
    if parity {
        -1
    } else {
        1
    }
}

//! Subset-convolution kernels over bag subsets: the fast ranked-transform
//! convolution used by permanent-like recursions and the signed pairwise
//! convolution used by determinant-like ones.
//!
//! Tables are indexed by bitmasks over a fixed ground set. A ground set
//! spans one or more bag parts (rows, then column axes); masks pack the
//! parts contiguously, so a simultaneous disjoint-union constraint over
//! all parts is a single subset convolution over the concatenation.

use crate::signs::{sign_oracle, CrossInversionTable};
use crate::tensor::Scalar;
use crate::treedecomp::MAX_BAG_BITS;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ConvolveError {
    #[error("subset tables are defined on different ground sets")]
    GroundSetMismatch,
}

/// An ordered, partitioned ground set of bag elements. Bit `i` of a mask
/// refers to the i-th element in part-major order; element order within a
/// part is ascending index order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundSet {
    parts: Vec<Vec<usize>>,
    offsets: Vec<usize>,
    bits: usize,
}

impl GroundSet {
    /// Builds a ground set from per-part sorted element lists. The total
    /// size must respect the packed-mask cap.
    pub fn new(parts: Vec<Vec<usize>>) -> GroundSet {
        let mut offsets = Vec::with_capacity(parts.len());
        let mut bits = 0;
        for list in &parts {
            debug_assert!(list.windows(2).all(|w| w[0] < w[1]), "parts must be sorted");
            offsets.push(bits);
            bits += list.len();
        }
        assert!(
            bits <= MAX_BAG_BITS,
            "ground set of {bits} elements exceeds the {MAX_BAG_BITS}-bit cap"
        );
        GroundSet {
            parts,
            offsets,
            bits,
        }
    }

    pub fn num_bits(&self) -> usize {
        self.bits
    }

    pub fn num_parts(&self) -> usize {
        self.parts.len()
    }

    pub fn part_elements(&self, p: usize) -> &[usize] {
        &self.parts[p]
    }

    pub fn part_offset(&self, p: usize) -> usize {
        self.offsets[p]
    }

    /// Mask covering every element of part `p`.
    pub fn part_mask(&self, p: usize) -> u64 {
        (((1u64 << self.parts[p].len()) - 1) << self.offsets[p]) as u64
    }

    pub fn full_mask(&self) -> u64 {
        if self.bits == 64 {
            u64::MAX
        } else {
            (1u64 << self.bits) - 1
        }
    }

    /// Global bit position of `element` within part `p`, if present.
    pub fn bit(&self, p: usize, element: usize) -> Option<usize> {
        self.parts[p]
            .binary_search(&element)
            .ok()
            .map(|i| self.offsets[p] + i)
    }
}

/// A dense table of ring values indexed by subsets of a ground set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubsetTable<R> {
    ground: GroundSet,
    values: Vec<R>,
}

impl<R: Scalar> SubsetTable<R> {
    pub fn zeroed(ground: GroundSet) -> SubsetTable<R> {
        let size = 1usize << ground.num_bits();
        SubsetTable {
            ground,
            values: vec![R::zero(); size],
        }
    }

    /// The convolution identity: 1 on the empty set, 0 elsewhere.
    pub fn unit(ground: GroundSet) -> SubsetTable<R> {
        let mut t = SubsetTable::zeroed(ground);
        t.values[0] = R::one();
        t
    }

    pub fn ground(&self) -> &GroundSet {
        &self.ground
    }

    pub fn get(&self, mask: u64) -> &R {
        &self.values[mask as usize]
    }

    pub fn set(&mut self, mask: u64, value: R) {
        self.values[mask as usize] = value;
    }

    pub fn add(&mut self, mask: u64, value: &R) {
        self.values[mask as usize].add_assign_ref(value);
    }

    pub fn values(&self) -> &[R] {
        &self.values
    }
}

/// In-place zeta transform: values[S] becomes Σ_{T ⊆ S} values[T].
pub fn zeta_in_place<R: Scalar>(values: &mut [R]) {
    let n = values.len();
    debug_assert!(n.is_power_of_two());
    let mut bit = 1;
    while bit < n {
        for s in 0..n {
            if s & bit != 0 {
                let (low, high) = values.split_at_mut(s);
                high[0].add_assign_ref(&low[s ^ bit]);
            }
        }
        bit <<= 1;
    }
}

/// In-place Möbius transform, the inverse of `zeta_in_place`.
pub fn mobius_in_place<R: Scalar>(values: &mut [R]) {
    let n = values.len();
    debug_assert!(n.is_power_of_two());
    let mut bit = 1;
    while bit < n {
        for s in 0..n {
            if s & bit != 0 {
                let (low, high) = values.split_at_mut(s);
                high[0].sub_assign_ref(&low[s ^ bit]);
            }
        }
        bit <<= 1;
    }
}

/// Per-rank zeta transforms of a table; `occupied[r]` records whether rank
/// r held any nonzero value before transforming, so all-zero layers can be
/// skipped in the product step.
fn ranked_zeta<R: Scalar>(t: &SubsetTable<R>) -> (Vec<Vec<R>>, Vec<bool>) {
    let w = t.ground.num_bits();
    let size = 1usize << w;
    let mut ranked: Vec<Vec<R>> = (0..=w).map(|_| vec![R::zero(); size]).collect();
    let mut occupied = vec![false; w + 1];
    for s in 0..size {
        let v = &t.values[s];
        if !v.is_zero() {
            let r = s.count_ones() as usize;
            ranked[r][s] = v.clone();
            occupied[r] = true;
        }
    }
    for layer in &mut ranked {
        zeta_in_place(layer);
    }
    (ranked, occupied)
}

/// Fast subset convolution of two tables: ranked zeta transforms,
/// rank-respecting pointwise products, ranked Möbius inversion. Ring
/// operations only; `mults` counts the ring multiplications performed
/// (products with a zero operand are skipped and not counted).
pub fn subset_convolve<R: Scalar>(
    a: &SubsetTable<R>,
    b: &SubsetTable<R>,
    mults: &mut u64,
) -> Result<SubsetTable<R>, ConvolveError> {
    if a.ground != b.ground {
        return Err(ConvolveError::GroundSetMismatch);
    }
    let w = a.ground.num_bits();
    let size = 1usize << w;
    let (fa, occ_a) = ranked_zeta(a);
    let (fb, occ_b) = ranked_zeta(b);
    let mut h: Vec<Vec<R>> = (0..=w).map(|_| vec![R::zero(); size]).collect();
    for r in 0..=w {
        for i in 0..=r {
            if !occ_a[i] || !occ_b[r - i] {
                continue;
            }
            let (fi, gj) = (&fa[i], &fb[r - i]);
            let hr = &mut h[r];
            for s in 0..size {
                if !fi[s].is_zero() && !gj[s].is_zero() {
                    *mults += 1;
                    hr[s].add_assign_ref(&fi[s].mul_ref(&gj[s]));
                }
            }
        }
    }
    for layer in &mut h {
        mobius_in_place(layer);
    }
    let mut out = SubsetTable::zeroed(a.ground.clone());
    for s in 0..size {
        out.values[s] = std::mem::replace(&mut h[s.count_ones() as usize][s], R::zero());
    }
    Ok(out)
}

/// k-fold subset convolution, folded left pairwise.
pub fn subset_convolve_many<R: Scalar>(
    tables: &[SubsetTable<R>],
    mults: &mut u64,
) -> Result<SubsetTable<R>, ConvolveError> {
    let (first, rest) = tables.split_first().expect("at least one table");
    let mut acc = first.clone();
    for t in rest {
        acc = subset_convolve(&acc, t, mults)?;
    }
    Ok(acc)
}

/// Signed pairwise convolution: out[U ∪ V] += S(U, V) · acc[U] · next[V]
/// over disjoint pairs, where the merge sign S is the product of the
/// per-part sign oracles. Enumerates only nonzero entries, so the cost is
/// bounded by the number of interacting pairs (at most 3^w).
pub fn signed_convolve<R: Scalar>(
    acc: &SubsetTable<R>,
    next: &SubsetTable<R>,
    sign_tables: &[CrossInversionTable],
    mults: &mut u64,
) -> Result<SubsetTable<R>, ConvolveError> {
    if acc.ground != next.ground {
        return Err(ConvolveError::GroundSetMismatch);
    }
    let nonzero = |t: &SubsetTable<R>| -> Vec<u64> {
        t.values
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_zero())
            .map(|(s, _)| s as u64)
            .collect()
    };
    let mut out: SubsetTable<R> = SubsetTable::zeroed(acc.ground.clone());
    for &u in &nonzero(acc) {
        for &v in &nonzero(next) {
            if u & v != 0 {
                continue;
            }
            let mut sign = 1i8;
            for table in sign_tables {
                sign *= sign_oracle(table, u, v);
            }
            *mults += 1;
            let mut product = acc.values[u as usize].mul_ref(&next.values[v as usize]);
            if sign < 0 {
                product.neg_in_place();
            }
            out.values[(u | v) as usize].add_assign_ref(&product);
        }
    }
    Ok(out)
}

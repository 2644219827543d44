//! Node-level base cases: the table of generalized-function values on
//! every equal-cardinality sub-block of a bag, computed by expansion along
//! the first row axis, plus the sum-matrix generator used to exercise the
//! determinant path.

use crate::subsetconv::{GroundSet, SubsetTable};
use crate::tensor::{Scalar, SparseTensor};
use crate::treedecomp::MAX_BAG_BITS;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BaseCaseError {
    #[error("total bag cardinality {0} exceeds the supported maximum of {MAX_BAG_BITS}")]
    WidthTooLarge(usize),
}

/// Which generalized function is being evaluated: one plus/sign choice per
/// free axis. All-plus gives permanents, a single signed axis gives the
/// determinant, two signed axes the mixed discriminant, all signed the
/// hyperdeterminant, and all plus on a higher-order tensor the
/// multidimensional permanent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FunctionSignature {
    signed: Vec<bool>,
}

impl FunctionSignature {
    /// One flag per free axis; `true` means that axis's bijection
    /// contributes its permutation sign.
    pub fn new(signed: Vec<bool>) -> FunctionSignature {
        assert!(!signed.is_empty(), "a signature needs at least one free axis");
        FunctionSignature { signed }
    }

    pub fn permanent() -> FunctionSignature {
        FunctionSignature::new(vec![false])
    }

    pub fn determinant() -> FunctionSignature {
        FunctionSignature::new(vec![true])
    }

    pub fn mixed_discriminant() -> FunctionSignature {
        FunctionSignature::new(vec![true, true])
    }

    /// All axes signed; the tensor order d+1 must be even for a nonzero
    /// function, which the engine front end enforces.
    pub fn hyperdeterminant(free_axes: usize) -> FunctionSignature {
        FunctionSignature::new(vec![true; free_axes])
    }

    pub fn multidimensional_permanent(free_axes: usize) -> FunctionSignature {
        FunctionSignature::new(vec![false; free_axes])
    }

    pub fn signed(&self) -> &[bool] {
        &self.signed
    }

    pub fn num_free_axes(&self) -> usize {
        self.signed.len()
    }

    pub fn num_signed(&self) -> usize {
        self.signed.iter().filter(|&&s| s).count()
    }

    pub fn is_all_plus(&self) -> bool {
        self.num_signed() == 0
    }
}

/// Values of the generalized function on every equal-cardinality selection
/// of a block, keyed by packed multi-axis masks (rows first, then each
/// free axis); selections of unequal cardinality hold zero, and the empty
/// selection holds one. The packing matches the convolution ground sets,
/// so these tables feed subset convolutions without re-keying.
pub type BlockTable<R> = SubsetTable<R>;

/// One in-block nonzero entry of a row, preprocessed for the expansion.
struct BlockEntry<R> {
    /// Bits of the entry's column coordinates across all free axes.
    cols_mask: u64,
    /// Per signed axis, the bits of that axis strictly below the entry's
    /// coordinate (for the cofactor position sign).
    signed_below: Vec<u64>,
    value: R,
}

/// Computes f(D, Y¹, …, Y^d) for every equal-cardinality selection inside
/// the given bag (one sorted global index list per axis, rows first).
///
/// The table is filled in ascending mask order by expanding on the lowest
/// selected row: each in-block entry of that row contributes its value
/// times the already-computed sub-block value, with cofactor sign
/// (−1)^{1+j_l} per signed axis, where j_l is the entry's 1-based position
/// within the selected subset of axis l. `mults` counts observable ring
/// multiplications.
pub fn all_subvalues<R: Scalar>(
    t: &SparseTensor<R>,
    bag: &[Vec<usize>],
    sig: &FunctionSignature,
    mults: &mut u64,
) -> Result<BlockTable<R>, BaseCaseError> {
    assert_eq!(bag.len(), t.order(), "one bag part per tensor axis");
    assert_eq!(sig.num_free_axes(), t.order() - 1);
    let total: usize = bag.iter().map(|l| l.len()).sum();
    if total > MAX_BAG_BITS {
        return Err(BaseCaseError::WidthTooLarge(total));
    }
    let ground = GroundSet::new(bag.to_vec());
    let rows_mask = ground.part_mask(0);

    // Per-row lists of in-block entries; entries leaving the bag on any
    // axis are invisible to this block.
    let mut per_row: Vec<Vec<BlockEntry<R>>> = Vec::with_capacity(bag[0].len());
    for &a in &bag[0] {
        let mut list = Vec::new();
        'entry: for (key, v) in t.row_entries(a) {
            let mut cols_mask = 0u64;
            let mut signed_below = Vec::new();
            for l in 1..key.len() {
                match ground.bit(l, key[l]) {
                    Some(b) => {
                        cols_mask |= 1 << b;
                        if sig.signed()[l - 1] {
                            signed_below.push(ground.part_mask(l) & ((1u64 << b) - 1));
                        }
                    }
                    None => continue 'entry,
                }
            }
            list.push(BlockEntry {
                cols_mask,
                signed_below,
                value: v.clone(),
            });
        }
        per_row.push(list);
    }

    let size = 1usize << ground.num_bits();
    let num_parts = ground.num_parts();
    let mut table = SubsetTable::zeroed(ground.clone());
    table.set(0, R::one());
    for s in 1..size as u64 {
        let rows = s & rows_mask;
        if rows == 0 {
            continue;
        }
        let cardinality = rows.count_ones();
        if (1..num_parts).any(|p| (s & ground.part_mask(p)).count_ones() != cardinality) {
            continue;
        }
        // Expand on the lowest selected row (rows occupy the low bits).
        let i = rows.trailing_zeros() as usize;
        let mut acc = R::zero();
        for e in &per_row[i] {
            if e.cols_mask & s != e.cols_mask {
                continue;
            }
            let sub = s & !(e.cols_mask | (1 << i));
            let prev = table.get(sub);
            if prev.is_zero() {
                continue;
            }
            *mults += 1;
            let mut term = e.value.mul_ref(prev);
            // (−1)^{1+j_l} = (−1)^{#selected elements below the coordinate}.
            let mut negative = false;
            for &below in &e.signed_below {
                if (s & below).count_ones() & 1 == 1 {
                    negative = !negative;
                }
            }
            if negative {
                term.neg_in_place();
            }
            acc.add_assign_ref(&term);
        }
        table.set(s, acc);
    }
    Ok(table)
}

/// The n×n matrix with unit diagonal and −1 superdiagonal on the first
/// n−1 rows and `s` as the last row; its determinant is s_1 + … + s_n.
/// Zero entries of `s` are simply omitted.
pub fn lemma_sum_matrix<R: Scalar>(s: &[R]) -> SparseTensor<R> {
    let n = s.len();
    assert!(n >= 1, "the sum matrix needs at least one entry");
    let mut t = SparseTensor::new(vec![n, n]);
    for i in 0..n - 1 {
        t.set(vec![i, i], R::one());
        let mut minus_one = R::one();
        minus_one.neg_in_place();
        t.set(vec![i, i + 1], minus_one);
    }
    for (j, v) in s.iter().enumerate() {
        t.set(vec![n - 1, j], v.clone());
    }
    t
}

//! Exact scalar arithmetic and the sparse tensor data model.
//!
//! A tensor of order `d+1` has one row axis (axis 0, the rows `A`) and `d`
//! column axes (`X^1 .. X^d`); matrices are the order-2 case. Entries are
//! stored sparsely: only nonzero values, no duplicates, all indices in
//! bounds. Files use 1-based indices; everything is 0-based in memory.

use num::{BigInt, BigRational, One, Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

/// A commutative ring with 1 and exact arithmetic. No engine ever divides;
/// negation exists so determinant-like signs can be folded in. `zero`, `one`
/// and `is_zero` come from the `num` supertraits; the `_ref` operations let
/// hot loops avoid cloning big values.
pub trait Scalar:
    Clone + PartialEq + Eq + fmt::Debug + fmt::Display + Send + Sync + 'static + Zero + One
{
    fn add_assign_ref(&mut self, other: &Self);
    fn sub_assign_ref(&mut self, other: &Self);
    fn mul_ref(&self, other: &Self) -> Self;
    fn neg_in_place(&mut self);
    fn from_i64(v: i64) -> Self;
    /// Parse the textual form used in input files; `None` on bad syntax.
    fn parse(text: &str) -> Option<Self>;
}

impl Scalar for BigInt {
    fn add_assign_ref(&mut self, other: &Self) {
        *self += other;
    }
    fn sub_assign_ref(&mut self, other: &Self) {
        *self -= other;
    }
    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }
    fn neg_in_place(&mut self) {
        *self = -std::mem::take(self);
    }
    fn from_i64(v: i64) -> Self {
        BigInt::from(v)
    }
    fn parse(text: &str) -> Option<Self> {
        BigInt::from_str(text).ok()
    }
}

impl Scalar for BigRational {
    fn add_assign_ref(&mut self, other: &Self) {
        *self += other;
    }
    fn sub_assign_ref(&mut self, other: &Self) {
        *self -= other;
    }
    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }
    fn neg_in_place(&mut self) {
        *self = -std::mem::take(self);
    }
    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }
    fn parse(text: &str) -> Option<Self> {
        // Accepts both "p/q" and plain integers; always stored reduced.
        if text.contains('/') {
            let (p, q) = text.split_once('/')?;
            let p = BigInt::from_str(p).ok()?;
            let q = BigInt::from_str(q).ok()?;
            if Zero::is_zero(&q) {
                return None;
            }
            Some(BigRational::new(p, q))
        } else {
            Some(BigRational::from_integer(BigInt::from_str(text).ok()?))
        }
    }
}

/// Absolute value of a rational (used by mixed-volume determinant terms).
pub fn rational_abs(v: &BigRational) -> BigRational {
    v.abs()
}

/// One sorted index subset per axis, selecting a sub-block of a tensor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxisSubsetSelection {
    /// `subsets[k]` is the sorted, duplicate-free subset for axis `k`.
    pub subsets: Vec<Vec<usize>>,
}

impl AxisSubsetSelection {
    /// Builds a selection, sorting and de-duplicating each axis subset.
    pub fn new(mut subsets: Vec<Vec<usize>>) -> Self {
        for s in &mut subsets {
            s.sort_unstable();
            s.dedup();
        }
        AxisSubsetSelection { subsets }
    }
}

/// Errors raised while reading a tensor file.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}: syntax error: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: index {index} out of bounds for axis {axis} (length {len})")]
    IndexOutOfBounds {
        line: usize,
        axis: usize,
        index: usize,
        len: usize,
    },
    #[error("line {line}: duplicate entry at {indices:?}")]
    DuplicateEntry { line: usize, indices: Vec<usize> },
    #[error("line {line}: zero-valued entry at {indices:?}")]
    ZeroEntry { line: usize, indices: Vec<usize> },
}

/// Sparse tensor of exact scalars. Axis 0 is the row axis `A`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseTensor<R: Scalar> {
    lens: Vec<usize>,
    entries: BTreeMap<Vec<usize>, R>,
}

impl<R: Scalar> SparseTensor<R> {
    /// An empty tensor with the given axis lengths (order = `lens.len()` ≥ 2).
    pub fn new(lens: Vec<usize>) -> Self {
        assert!(lens.len() >= 2, "tensor order must be at least 2");
        SparseTensor {
            lens,
            entries: BTreeMap::new(),
        }
    }

    /// Number of axes (`d + 1`).
    pub fn order(&self) -> usize {
        self.lens.len()
    }

    /// Axis lengths `(n_0, …, n_d)`.
    pub fn lens(&self) -> &[usize] {
        &self.lens
    }

    /// True when every axis has the same length.
    pub fn is_square(&self) -> bool {
        self.lens.iter().all(|&l| l == self.lens[0])
    }

    /// Number of stored nonzeros.
    pub fn num_entries(&self) -> usize {
        self.entries.len()
    }

    /// Sets the value at `idx` (0-based); zero values remove the entry.
    pub fn set(&mut self, idx: Vec<usize>, value: R) {
        assert_eq!(idx.len(), self.lens.len(), "index arity mismatch");
        for (axis, (&i, &len)) in idx.iter().zip(&self.lens).enumerate() {
            assert!(i < len, "index {i} out of bounds for axis {axis}");
        }
        if value.is_zero() {
            self.entries.remove(&idx);
        } else {
            self.entries.insert(idx, value);
        }
    }

    /// The stored value at `idx`, or `None` when the cell is zero.
    pub fn get(&self, idx: &[usize]) -> Option<&R> {
        self.entries.get(idx)
    }

    /// Iterates all stored entries in lexicographic index order.
    pub fn iter(&self) -> impl Iterator<Item = (&Vec<usize>, &R)> {
        self.entries.iter()
    }

    /// Iterates the entries of row `a` (axis-0 slice) in index order.
    pub fn row_entries(&self, a: usize) -> impl Iterator<Item = (&Vec<usize>, &R)> {
        self.entries.range(vec![a]..vec![a + 1])
    }

    /// Restriction of the tensor to the selected index subsets, densely
    /// reindexed to `0..|subset|` per axis in subset order.
    pub fn subtensor(&self, sel: &AxisSubsetSelection) -> SparseTensor<R> {
        assert_eq!(sel.subsets.len(), self.lens.len(), "selection arity mismatch");
        // Position of each selected index within its axis subset.
        let mut pos: Vec<BTreeMap<usize, usize>> = Vec::with_capacity(sel.subsets.len());
        for (axis, subset) in sel.subsets.iter().enumerate() {
            let mut m = BTreeMap::new();
            for (k, &i) in subset.iter().enumerate() {
                assert!(i < self.lens[axis], "selection out of bounds on axis {axis}");
                m.insert(i, k);
            }
            pos.push(m);
        }
        // Axis lengths of zero are legal for sub-blocks.
        let mut out = SparseTensor {
            lens: sel.subsets.iter().map(|s| s.len()).collect(),
            entries: BTreeMap::new(),
        };
        'entry: for (idx, v) in &self.entries {
            let mut mapped = Vec::with_capacity(idx.len());
            for (axis, &i) in idx.iter().enumerate() {
                match pos[axis].get(&i) {
                    Some(&k) => mapped.push(k),
                    None => continue 'entry,
                }
            }
            out.entries.insert(mapped, v.clone());
        }
        out
    }

    /// Serializes to the tensor file format (1-based indices).
    pub fn serialize(&self) -> String {
        let mut s = String::new();
        s.push_str("tensor ");
        s.push_str(&self.lens.len().to_string());
        for len in &self.lens {
            s.push(' ');
            s.push_str(&len.to_string());
        }
        s.push('\n');
        for (idx, v) in &self.entries {
            for i in idx {
                s.push_str(&(i + 1).to_string());
                s.push(' ');
            }
            s.push_str(&v.to_string());
            s.push('\n');
        }
        s
    }
}

/// Parses the tensor file format: a header `tensor <order> <len_0> … <len_d>`
/// followed by one `<i_0> … <i_d> <value>` line per nonzero (1-based
/// indices); `c` lines are comments.
pub fn parse_tensor<R: Scalar>(text: &str) -> Result<SparseTensor<R>, ParseError> {
    let syntax = |line: usize, msg: &str| ParseError::Syntax {
        line,
        msg: msg.to_string(),
    };
    let mut tensor: Option<SparseTensor<R>> = None;
    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('c') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split_whitespace().collect();
        match &mut tensor {
            None => {
                if fields[0] != "tensor" {
                    return Err(syntax(line, "expected header starting with `tensor`"));
                }
                let order: usize = fields
                    .get(1)
                    .and_then(|f| f.parse().ok())
                    .ok_or_else(|| syntax(line, "bad order in header"))?;
                if order < 2 {
                    return Err(syntax(line, "tensor order must be at least 2"));
                }
                if fields.len() != 2 + order {
                    return Err(syntax(line, "header length count mismatch"));
                }
                let mut lens = Vec::with_capacity(order);
                for f in &fields[2..] {
                    let len: usize = f
                        .parse()
                        .ok()
                        .filter(|&l| l > 0)
                        .ok_or_else(|| syntax(line, "bad axis length in header"))?;
                    lens.push(len);
                }
                tensor = Some(SparseTensor::new(lens));
            }
            Some(t) => {
                let order = t.order();
                if fields.len() != order + 1 {
                    return Err(syntax(line, "entry line field count mismatch"));
                }
                let mut idx = Vec::with_capacity(order);
                for (axis, f) in fields[..order].iter().enumerate() {
                    let i: usize = f
                        .parse()
                        .ok()
                        .filter(|&i| i >= 1)
                        .ok_or_else(|| syntax(line, "bad index (indices are 1-based)"))?;
                    if i > t.lens[axis] {
                        return Err(ParseError::IndexOutOfBounds {
                            line,
                            axis,
                            index: i,
                            len: t.lens[axis],
                        });
                    }
                    idx.push(i - 1);
                }
                let value =
                    R::parse(fields[order]).ok_or_else(|| syntax(line, "bad entry value"))?;
                if value.is_zero() {
                    return Err(ParseError::ZeroEntry { line, indices: idx });
                }
                if t.entries.contains_key(&idx) {
                    return Err(ParseError::DuplicateEntry { line, indices: idx });
                }
                t.entries.insert(idx, value);
            }
        }
    }
    tensor.ok_or_else(|| syntax(0, "missing header line"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn int(v: i64) -> BigInt {
        BigInt::from(v)
    }

    #[test]
    fn parses_identity_pattern() {
        let t: SparseTensor<BigInt> = parse_tensor("tensor 2 2 2\n1 1 1\n2 2 1\n").unwrap();
        assert_eq!(t.order(), 2);
        assert_eq!(t.lens(), &[2, 2]);
        assert_eq!(t.num_entries(), 2);
        assert_eq!(t.get(&[0, 0]), Some(&int(1)));
        assert_eq!(t.get(&[1, 1]), Some(&int(1)));
    }

    #[test]
    fn rejects_zero_valued_entry() {
        let err = parse_tensor::<BigInt>("tensor 2 2 2\n1 1 0\n").unwrap_err();
        assert_eq!(
            err,
            ParseError::ZeroEntry {
                line: 2,
                indices: vec![0, 0]
            }
        );
    }

    #[test]
    fn rejects_duplicate_entry() {
        let err = parse_tensor::<BigInt>("tensor 2 2 2\n1 1 4\n1 1 5\n").unwrap_err();
        assert!(matches!(err, ParseError::DuplicateEntry { line: 3, .. }));
    }

    #[test]
    fn rejects_out_of_bounds_index() {
        let err = parse_tensor::<BigInt>("tensor 2 2 2\n3 1 4\n").unwrap_err();
        assert!(matches!(
            err,
            ParseError::IndexOutOfBounds {
                line: 2,
                axis: 0,
                index: 3,
                len: 2
            }
        ));
    }

    #[test]
    fn skips_comments_and_blank_lines() {
        let t: SparseTensor<BigInt> =
            parse_tensor("c a comment\n\ntensor 2 2 2\nc another\n1 2 7\n").unwrap();
        assert_eq!(t.get(&[0, 1]), Some(&int(7)));
    }

    #[test]
    fn serialization_round_trips() {
        let text = "tensor 3 2 3 2\n1 1 1 5\n2 3 1 -7\n1 2 2 12345678901234567890\n";
        let t: SparseTensor<BigInt> = parse_tensor(text).unwrap();
        let t2: SparseTensor<BigInt> = parse_tensor(&t.serialize()).unwrap();
        assert_eq!(t, t2);
    }

    #[test]
    fn subtensor_of_identity_is_identity() {
        let t: SparseTensor<BigInt> =
            parse_tensor("tensor 2 3 3\n1 1 1\n2 2 1\n3 3 1\n").unwrap();
        let sub = t.subtensor(&AxisSubsetSelection::new(vec![vec![0, 1], vec![0, 1]]));
        assert_eq!(sub.lens(), &[2, 2]);
        assert_eq!(sub.get(&[0, 0]), Some(&int(1)));
        assert_eq!(sub.get(&[1, 1]), Some(&int(1)));
        assert_eq!(sub.num_entries(), 2);
    }

    #[test]
    fn subtensor_full_selection_is_identity_map() {
        let t: SparseTensor<BigInt> = parse_tensor("tensor 2 2 3\n1 3 4\n2 1 -2\n").unwrap();
        let full = AxisSubsetSelection::new(vec![vec![0, 1], vec![0, 1, 2]]);
        assert_eq!(t.subtensor(&full), t);
    }

    #[test]
    fn subtensor_composes() {
        let t: SparseTensor<BigInt> =
            parse_tensor("tensor 2 4 4\n1 1 1\n2 2 2\n3 3 3\n4 4 4\n2 4 9\n").unwrap();
        let s1 = AxisSubsetSelection::new(vec![vec![1, 2, 3], vec![0, 1, 3]]);
        let s2 = AxisSubsetSelection::new(vec![vec![0, 2], vec![1, 2]]);
        // Composition: rows {1,2,3} then {0,2} of those → {1,3}; same on cols.
        let composed = AxisSubsetSelection::new(vec![vec![1, 3], vec![1, 3]]);
        assert_eq!(t.subtensor(&s1).subtensor(&s2), t.subtensor(&composed));
    }

    #[test]
    fn subtensor_reindexes_in_subset_order() {
        // 5×5 block pattern: rows {a1,a2} on columns {x1,x3} come out as
        // a dense 2×2 block.
        let mut t: SparseTensor<BigInt> = SparseTensor::new(vec![5, 5]);
        for (r, c) in [(0, 0), (0, 2), (1, 0), (1, 2)] {
            t.set(vec![r, c], int(1));
        }
        let sub = t.subtensor(&AxisSubsetSelection::new(vec![vec![0, 1], vec![0, 2]]));
        assert_eq!(sub.num_entries(), 4);
        for r in 0..2 {
            for c in 0..2 {
                assert_eq!(sub.get(&[r, c]), Some(&int(1)));
            }
        }
    }

    #[test]
    fn rational_parsing_and_reduction() {
        let v = <BigRational as Scalar>::parse("6/4").unwrap();
        assert_eq!(v, BigRational::new(int(3), int(2)));
        assert_eq!(<BigRational as Scalar>::parse("-5").unwrap().to_string(), "-5");
        assert!(<BigRational as Scalar>::parse("1/0").is_none());
        assert!(<BigRational as Scalar>::parse("x").is_none());
    }

    #[test]
    fn big_scalar_arithmetic_is_exact() {
        // 10^30-scale operands survive round trips through the ring ops.
        let a = <BigInt as Scalar>::parse("1000000000000000000000000000000").unwrap();
        let b = <BigInt as Scalar>::parse("999999999999999999999999999999").unwrap();
        let mut s = a.clone();
        s.sub_assign_ref(&b);
        assert_eq!(s, int(1));
        let p = a.mul_ref(&b);
        assert_eq!(
            p.to_string(),
            "999999999999999999999999999999000000000000000000000000000000"
        );
    }
}

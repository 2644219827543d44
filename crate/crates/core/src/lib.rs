//! Exact evaluation of permanents, determinants, mixed discriminants,
//! hyperdeterminants and multidimensional permanents of sparse tensors, and
//! mixed volumes of zonotopes, by dynamic programming over tree
//! decompositions of their sparsity graphs.
//!
//! The pipeline: a [`tensor::SparseTensor`] is abstracted into a
//! [`graphs::LabeledGraph`] (bipartite / symmetrized / column / multipartite),
//! a [`treedecomp::TreeDecomposition`] of that graph is built or supplied,
//! and the [`engines`] sweep the decomposition bottom-up, combining per-bag
//! block tables ([`base_cases`]) with (signed) subset convolutions
//! ([`subsetconv`], [`signs`]). All arithmetic is exact over a generic
//! commutative ring; the shipped instantiations are big integers and exact
//! rationals. Every engine is validated against the independent brute-force
//! references in [`oracle`].

pub mod base_cases;
pub mod engines;
pub mod graphs;
pub mod oracle;
pub mod signs;
pub mod subsetconv;
pub mod tensor;
pub mod treedecomp;
pub mod zonotopes;

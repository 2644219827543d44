//! The dynamic-programming engines: a column-graph sweep specialized to
//! permanents, and the general multipartite sweep covering all plus/sign
//! signatures, plus the front-end dispatcher that picks decompositions and
//! routes each function to the right engine.
//!
//! Both engines walk the decomposition bottom-up keeping one subset table
//! per live node: local bag values come from `all_subvalues`, children are
//! re-keyed onto the parent's ground set (their private elements are
//! hidden, i.e. forced selected), double-counted in-bag contributions are
//! cancelled by (−1)^|rows| correction factors, and the factors are merged
//! by fast subset convolution (all-plus signatures) or by the signed fold
//! with cross-inversion sign oracles (signed ones).

use crate::base_cases::{all_subvalues, BaseCaseError, FunctionSignature};
use crate::graphs::{column_graph, multipartite_graph};
use crate::signs::CrossInversionTable;
use crate::subsetconv::{signed_convolve, subset_convolve_many, GroundSet, SubsetTable};
use crate::tensor::{Scalar, SparseTensor};
use crate::treedecomp::{
    assign_rows, heuristic_decomposition, lift_column_to_bipartite, lift_symmetrized_to_bipartite,
    HeuristicMethod, RowAssignment, TdError, TreeDecomposition, MAX_BAG_BITS,
};
use rayon::prelude::*;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("total bag cardinality {0} exceeds the supported maximum of {MAX_BAG_BITS}")]
    WidthTooLarge(usize),
    #[error("invalid decomposition: {0}")]
    InvalidDecomposition(#[from] TdError),
    #[error("tensor axis lengths {0:?} are not all equal")]
    NonSquare(Vec<usize>),
    #[error("{0}")]
    IncompatibleFunction(String),
}

impl From<BaseCaseError> for EngineError {
    fn from(e: BaseCaseError) -> EngineError {
        match e {
            BaseCaseError::WidthTooLarge(w) => EngineError::WidthTooLarge(w),
        }
    }
}

/// Counters accumulated over one engine run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EngineStats {
    pub nodes: usize,
    /// Largest bag, counted as total elements across parts.
    pub max_bag_total: usize,
    /// Most subset-table cells live at any single combine step.
    pub peak_table_cells: usize,
    /// Ring multiplications with both operands nonzero.
    pub ring_mults: u64,
}

/// The result of a run together with its counters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EngineRun<R> {
    pub result: R,
    pub stats: EngineStats,
}

/// The functions the engines evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FunctionName {
    Permanent,
    Determinant,
    MixedDiscriminant,
    Hyperdeterminant,
    MultidimensionalPermanent,
}

impl FunctionName {
    pub fn name(self) -> &'static str {
        match self {
            FunctionName::Permanent => "perm",
            FunctionName::Determinant => "det",
            FunctionName::MixedDiscriminant => "disc",
            FunctionName::Hyperdeterminant => "hyperdet",
            FunctionName::MultidimensionalPermanent => "mdperm",
        }
    }

    /// The plus/sign signature for a tensor of the given order, or an
    /// error when the function is not defined at that order.
    pub fn signature(self, order: usize) -> Result<FunctionSignature, EngineError> {
        match self {
            FunctionName::Permanent => {
                if order == 2 {
                    Ok(FunctionSignature::permanent())
                } else {
                    Err(EngineError::IncompatibleFunction(format!(
                        "the permanent takes a matrix, not an order-{order} tensor"
                    )))
                }
            }
            FunctionName::Determinant => {
                if order == 2 {
                    Ok(FunctionSignature::determinant())
                } else {
                    Err(EngineError::IncompatibleFunction(format!(
                        "the determinant takes a matrix, not an order-{order} tensor"
                    )))
                }
            }
            FunctionName::MixedDiscriminant => {
                if order == 3 {
                    Ok(FunctionSignature::mixed_discriminant())
                } else {
                    Err(EngineError::IncompatibleFunction(format!(
                        "the mixed discriminant takes an order-3 tensor, got order {order}"
                    )))
                }
            }
            FunctionName::Hyperdeterminant => {
                if order % 2 == 0 {
                    Ok(FunctionSignature::hyperdeterminant(order - 1))
                } else {
                    Err(EngineError::IncompatibleFunction(
                        "hyperdeterminant requires even tensor order".to_string(),
                    ))
                }
            }
            FunctionName::MultidimensionalPermanent => {
                Ok(FunctionSignature::multidimensional_permanent(order - 1))
            }
        }
    }
}

/// Where the dispatcher gets its tree decomposition from.
#[derive(Debug, Clone, Copy)]
pub enum DecompositionSource<'a> {
    /// Build one with an elimination heuristic on the multipartite graph.
    Heuristic(HeuristicMethod),
    /// A caller-supplied decomposition of the multipartite graph.
    Bipartite(&'a TreeDecomposition),
    /// A caller-supplied decomposition of the column graph (matrices).
    Column(&'a TreeDecomposition),
    /// A caller-supplied decomposition of the symmetrized graph (matrices).
    Symmetrized(&'a TreeDecomposition),
}

fn merge_sorted(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        if j == b.len() || (i < a.len() && a[i] < b[j]) {
            out.push(a[i]);
            i += 1;
        } else if i == a.len() || b[j] < a[i] {
            out.push(b[j]);
            j += 1;
        } else {
            out.push(a[i]);
            i += 1;
            j += 1;
        }
    }
    out
}

fn sorted_difference(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::new();
    let mut j = 0;
    for &x in a {
        while j < b.len() && b[j] < x {
            j += 1;
        }
        if j == b.len() || b[j] != x {
            out.push(x);
        }
    }
    out
}

/// Re-keys a finalized child table onto the parent node's ground set: the
/// child's private elements are hidden below the parent and therefore
/// forced selected, while shared elements translate bit for bit. Entries
/// outside the shared region map to zero.
fn rekey_child_table<R: Scalar>(
    parent_ground: &GroundSet,
    child_table: &SubsetTable<R>,
) -> SubsetTable<R> {
    let child_ground = child_table.ground();
    let mut hidden_child = 0u64;
    let mut shared_child = 0u64;
    let mut to_parent = vec![0u64; child_ground.num_bits()];
    for p in 0..child_ground.num_parts() {
        for (i, &e) in child_ground.part_elements(p).iter().enumerate() {
            let cb = child_ground.part_offset(p) + i;
            match parent_ground.bit(p, e) {
                Some(pb) => {
                    shared_child |= 1 << cb;
                    to_parent[cb] = 1 << pb;
                }
                None => hidden_child |= 1 << cb,
            }
        }
    }
    let mut out = SubsetTable::zeroed(parent_ground.clone());
    let mut sc = shared_child;
    loop {
        let v = child_table.get(sc | hidden_child);
        if !v.is_zero() {
            let mut sp = 0u64;
            let mut rest = sc;
            while rest != 0 {
                sp |= to_parent[rest.trailing_zeros() as usize];
                rest &= rest - 1;
            }
            out.set(sp, v.clone());
        }
        if sc == 0 {
            break;
        }
        sc = sc.wrapping_sub(1) & shared_child;
    }
    out
}

/// The inclusion–exclusion correction factor for one child: the local bag
/// table restricted to the elements shared with that child, scaled by
/// (−1)^|selected rows|.
fn restriction_factor<R: Scalar>(
    local: &SubsetTable<R>,
    ground: &GroundSet,
    child_bag: &[Vec<usize>],
) -> SubsetTable<R> {
    let mut shared = 0u64;
    for (p, part) in child_bag.iter().enumerate() {
        for &e in part {
            if let Some(b) = ground.bit(p, e) {
                shared |= 1 << b;
            }
        }
    }
    let rows_mask = ground.part_mask(0);
    let mut out = SubsetTable::zeroed(ground.clone());
    let mut s = shared;
    loop {
        let v = local.get(s);
        if !v.is_zero() {
            let mut val = v.clone();
            if (s & rows_mask).count_ones() & 1 == 1 {
                val.neg_in_place();
            }
            out.set(s, val);
        }
        if s == 0 {
            break;
        }
        s = s.wrapping_sub(1) & shared;
    }
    out
}

struct NodeOutput<R> {
    table: SubsetTable<R>,
    /// Per part, the sorted union of bag elements over this subtree; only
    /// tracked for signed signatures, where parents need it to build
    /// cross-inversion sign tables.
    zeta: Vec<Vec<usize>>,
    mults: u64,
    peak_cells: usize,
}

/// Computes one node's table from its children's finalized tables.
fn process_generalized_node<R: Scalar>(
    t: &SparseTensor<R>,
    sig: &FunctionSignature,
    td: &TreeDecomposition,
    node: usize,
    tables: &[Option<SubsetTable<R>>],
    zetas: &[Option<Vec<Vec<usize>>>],
    signed_parts: &[usize],
) -> Result<NodeOutput<R>, EngineError> {
    let bag = &td.nodes()[node].bag;
    let num_parts = bag.len();
    let children = &td.nodes()[node].children;
    let mut mults = 0u64;

    let q_local = all_subvalues(t, bag, sig, &mut mults)?;
    let ground = q_local.ground().clone();

    // One correction factor and one re-keyed child table per child, in
    // child order after the local table.
    let mut factors: Vec<(SubsetTable<R>, Vec<Vec<usize>>)> = Vec::with_capacity(2 * children.len());
    for &c in children {
        let child_bag = &td.nodes()[c].bag;
        let correction = restriction_factor(&q_local, &ground, child_bag);
        let child_table = tables[c].as_ref().expect("child table is finalized");
        let rekeyed = rekey_child_table(&ground, child_table);
        let hidden = if sig.is_all_plus() {
            Vec::new()
        } else {
            let child_zeta = zetas[c].as_ref().expect("child subtree union is finalized");
            (0..num_parts)
                .map(|p| sorted_difference(&child_zeta[p], &bag[p]))
                .collect()
        };
        factors.push((correction, vec![Vec::new(); num_parts]));
        factors.push((rekeyed, hidden));
    }

    let peak_cells = (factors.len() + 3) << ground.num_bits();
    let table = if sig.is_all_plus() {
        let mut all = Vec::with_capacity(1 + factors.len());
        all.push(q_local);
        all.extend(factors.into_iter().map(|(f, _)| f));
        subset_convolve_many(&all, &mut mults).expect("factors share the bag ground set")
    } else {
        let mut acc = q_local;
        let mut hidden_acc: Vec<Vec<usize>> = vec![Vec::new(); num_parts];
        for (factor, hidden_next) in &factors {
            let sign_tables: Vec<CrossInversionTable> = signed_parts
                .iter()
                .map(|&p| {
                    CrossInversionTable::new(
                        &bag[p],
                        &hidden_acc[p],
                        &hidden_next[p],
                        ground.part_offset(p),
                    )
                })
                .collect();
            acc = signed_convolve(&acc, factor, &sign_tables, &mut mults)
                .expect("factors share the bag ground set");
            for p in 0..num_parts {
                if !hidden_next[p].is_empty() {
                    hidden_acc[p] = merge_sorted(&hidden_acc[p], &hidden_next[p]);
                }
            }
        }
        acc
    };

    let zeta = if sig.is_all_plus() {
        Vec::new()
    } else {
        (0..num_parts)
            .map(|p| {
                let mut acc = bag[p].clone();
                for &c in children {
                    let child_zeta = zetas[c].as_ref().expect("child subtree union is finalized");
                    acc = merge_sorted(&acc, &child_zeta[p]);
                }
                acc
            })
            .collect()
    };

    Ok(NodeOutput {
        table,
        zeta,
        mults,
        peak_cells,
    })
}

/// Evaluates the generalized function given by `sig` over a decomposition
/// of the tensor's multipartite sparsity graph. Nodes at the same height
/// are independent and run in parallel when `threads > 1`; results and
/// counters are identical either way.
pub fn generalized_engine<R: Scalar>(
    t: &SparseTensor<R>,
    sig: &FunctionSignature,
    td: &TreeDecomposition,
    threads: usize,
) -> Result<EngineRun<R>, EngineError> {
    if !t.is_square() {
        return Err(EngineError::NonSquare(t.lens().to_vec()));
    }
    assert_eq!(sig.num_free_axes() + 1, t.order(), "one signature flag per free axis");
    let graph = multipartite_graph(t);
    td.validate(&graph)?;
    if td.max_bag_total() > MAX_BAG_BITS {
        return Err(EngineError::WidthTooLarge(td.max_bag_total()));
    }

    // Signed parts get a cross-inversion oracle in every merge: each
    // signed axis on its own, and the row part once if the row-side
    // interleaving sign survives (it appears once per signed axis, so
    // only its parity matters).
    let mut signed_parts: Vec<usize> =
        (1..t.order()).filter(|&p| sig.signed()[p - 1]).collect();
    if sig.num_signed() % 2 == 1 {
        signed_parts.insert(0, 0);
    }

    let n_nodes = td.nodes().len();
    let post = td.postorder();
    let mut height = vec![0usize; n_nodes];
    for &v in &post {
        height[v] = td.nodes()[v]
            .children
            .iter()
            .map(|&c| height[c] + 1)
            .max()
            .unwrap_or(0);
    }
    let max_height = post.iter().map(|&v| height[v]).max().unwrap_or(0);
    let mut levels: Vec<Vec<usize>> = vec![Vec::new(); max_height + 1];
    for &v in &post {
        levels[height[v]].push(v);
    }

    let pool = if threads > 1 {
        Some(
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .expect("building a thread pool"),
        )
    } else {
        None
    };

    let mut tables: Vec<Option<SubsetTable<R>>> = (0..n_nodes).map(|_| None).collect();
    let mut zetas: Vec<Option<Vec<Vec<usize>>>> = (0..n_nodes).map(|_| None).collect();
    let mut node_mults = vec![0u64; n_nodes];
    let mut peak = 0usize;
    for level in &levels {
        let outs: Vec<(usize, NodeOutput<R>)> = match &pool {
            Some(p) if level.len() > 1 => p.install(|| {
                level
                    .par_iter()
                    .map(|&v| {
                        process_generalized_node(t, sig, td, v, &tables, &zetas, &signed_parts)
                            .map(|o| (v, o))
                    })
                    .collect::<Result<Vec<_>, EngineError>>()
            })?,
            _ => level
                .iter()
                .map(|&v| {
                    process_generalized_node(t, sig, td, v, &tables, &zetas, &signed_parts)
                        .map(|o| (v, o))
                })
                .collect::<Result<Vec<_>, EngineError>>()?,
        };
        for (v, out) in outs {
            node_mults[v] = out.mults;
            peak = peak.max(out.peak_cells);
            tables[v] = Some(out.table);
            zetas[v] = Some(out.zeta);
        }
        // Children are consumed; free their tables before the next level.
        for &v in level {
            for &c in &td.nodes()[v].children {
                tables[c] = None;
                zetas[c] = None;
            }
        }
    }

    let root_table = tables[td.root()].take().expect("root table is finalized");
    let result = root_table.get(root_table.ground().full_mask()).clone();
    Ok(EngineRun {
        result,
        stats: EngineStats {
            nodes: n_nodes,
            max_bag_total: td.max_bag_total(),
            peak_table_cells: peak,
            ring_mults: node_mults.iter().sum(),
        },
    })
}

/// Evaluates a permanent over a decomposition of the column graph. Each
/// row is anchored at one node; a node's local table is the permanent of
/// its assigned rows against every column subset of its bag, and children
/// are re-keyed with their private columns forced. Runs single-threaded.
pub fn cols_perm<R: Scalar>(
    m: &SparseTensor<R>,
    td: &TreeDecomposition,
) -> Result<EngineRun<R>, EngineError> {
    if m.order() != 2 {
        return Err(EngineError::IncompatibleFunction(
            "the column-graph engine takes a matrix".to_string(),
        ));
    }
    if m.lens()[0] != m.lens()[1] {
        return Err(EngineError::NonSquare(m.lens().to_vec()));
    }
    let graph = column_graph(m).map_err(TdError::from)?;
    td.validate(&graph)?;
    let RowAssignment::Rows(of_row) = assign_rows(td, m)? else {
        unreachable!("column decompositions produce row assignments");
    };
    let mut rows_at: Vec<Vec<usize>> = vec![Vec::new(); td.nodes().len()];
    for (a, &v) in of_row.iter().enumerate() {
        rows_at[v].push(a);
    }

    let sig = FunctionSignature::permanent();
    let mut tables: Vec<Option<SubsetTable<R>>> = (0..td.nodes().len()).map(|_| None).collect();
    let mut mults = 0u64;
    let mut peak = 0usize;
    for v in td.postorder() {
        let chi = &td.nodes()[v].bag[0];
        let ground = GroundSet::new(vec![chi.clone()]);
        let assigned = &rows_at[v];
        let q_local: SubsetTable<R> = if assigned.len() > chi.len() {
            // More anchored rows than columns: no subset can match them
            // all, so the whole subtree contributes zero.
            SubsetTable::zeroed(ground.clone())
        } else {
            let block_bits = assigned.len() + chi.len();
            if block_bits > MAX_BAG_BITS {
                return Err(EngineError::WidthTooLarge(block_bits));
            }
            let block = all_subvalues(m, &[assigned.clone(), chi.clone()], &sig, &mut mults)?;
            // Slice at the full row set: only column subsets of matching
            // cardinality are nonzero.
            let r = assigned.len();
            let rows_full = (1u64 << r) - 1;
            let mut q = SubsetTable::zeroed(ground.clone());
            for y in 0..(1u64 << chi.len()) {
                let val = block.get((y << r) | rows_full);
                if !val.is_zero() {
                    q.set(y, val.clone());
                }
            }
            q
        };
        let mut factors = vec![q_local];
        for &c in &td.nodes()[v].children {
            let child_table = tables[c].take().expect("child table is finalized");
            factors.push(rekey_child_table(&ground, &child_table));
        }
        peak = peak.max((factors.len() + 1) << ground.num_bits());
        let out = subset_convolve_many(&factors, &mut mults)
            .expect("factors share the bag ground set");
        tables[v] = Some(out);
    }

    let root_table = tables[td.root()].take().expect("root table is finalized");
    let result = root_table.get(root_table.ground().full_mask()).clone();
    Ok(EngineRun {
        result,
        stats: EngineStats {
            nodes: td.nodes().len(),
            max_bag_total: td.max_bag_total(),
            peak_table_cells: peak,
            ring_mults: mults,
        },
    })
}

/// Front end: checks the function/order compatibility, obtains or lifts a
/// decomposition as requested, and runs the matching engine.
pub fn compute<R: Scalar>(
    function: FunctionName,
    t: &SparseTensor<R>,
    source: DecompositionSource,
    threads: usize,
) -> Result<EngineRun<R>, EngineError> {
    let sig = function.signature(t.order())?;
    if !t.is_square() {
        return Err(EngineError::NonSquare(t.lens().to_vec()));
    }
    match source {
        DecompositionSource::Heuristic(method) => {
            let graph = multipartite_graph(t);
            let td = heuristic_decomposition(&graph, method);
            generalized_engine(t, &sig, &td, threads)
        }
        DecompositionSource::Bipartite(td) => generalized_engine(t, &sig, td, threads),
        DecompositionSource::Column(td) => {
            if t.order() != 2 {
                return Err(EngineError::IncompatibleFunction(
                    "a column-graph decomposition takes a matrix".to_string(),
                ));
            }
            if sig.is_all_plus() {
                cols_perm(t, td)
            } else {
                let lifted = lift_column_to_bipartite(td, t)?;
                generalized_engine(t, &sig, &lifted, threads)
            }
        }
        DecompositionSource::Symmetrized(td) => {
            if t.order() != 2 {
                return Err(EngineError::IncompatibleFunction(
                    "a symmetrized-graph decomposition takes a matrix".to_string(),
                ));
            }
            let lifted = lift_symmetrized_to_bipartite(td, t)?;
            generalized_engine(t, &sig, &lifted, threads)
        }
    }
}

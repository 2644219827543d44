//! Rooted tree decompositions of the sparsity graphs: validation against
//! the three defining conditions, heuristic construction via elimination
//! orders, row/entry assignment, lifts from the single-part column and
//! symmetrized graphs to the bipartite graph, and PACE-style `.td` I/O.
//!
//! Bags are stored per graph part (sorted index lists), so a node of a
//! bipartite decomposition holds a row set and a column set separately;
//! single-part decompositions use one list per bag.

use crate::graphs::{bipartite_graph, column_graph, symmetrized_graph, GraphError, LabeledGraph};
use crate::tensor::{Scalar, SparseTensor};
use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap, VecDeque};
use std::fmt::Write as _;
use thiserror::Error;

/// Hard cap on total bag cardinality: subset tables are indexed by packed
/// bitmasks, so a bag may never exceed this many elements across parts.
pub const MAX_BAG_BITS: usize = 30;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TdError {
    #[error("malformed decomposition tree: {0}")]
    MalformedTree(String),
    #[error("bag element {element} of part {part} is out of range (part size {size})")]
    ElementOutOfRange {
        part: usize,
        element: usize,
        size: usize,
    },
    #[error("decomposition part sizes {td:?} do not match the graph's {graph:?}")]
    PartMismatch { td: Vec<usize>, graph: Vec<usize> },
    #[error("vertex {0} is not covered by any bag")]
    UncoveredVertex(String),
    #[error("edge {{{0}, {1}}} is not covered by any bag")]
    UncoveredEdge(String, String),
    #[error("occurrences of vertex {0} do not form a connected subtree")]
    DisconnectedOccurrence(String),
    #[error("no bag contains the support of {0}")]
    NoContainingBag(String),
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: unknown vertex id {id}")]
    UnknownVertex { line: usize, id: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Which width convention a decomposition reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WidthConvention {
    /// Width = largest bag size minus one (classic treewidth counting).
    SinglePart,
    /// Width = largest total bag cardinality summed over parts, no minus
    /// one (the counting that matches 2^|bag| table sizes).
    MultiPart,
}

/// Elimination-order heuristics for decomposition construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HeuristicMethod {
    /// Eliminate a vertex of minimum current degree.
    MinDegree,
    /// Eliminate a vertex whose neighborhood needs fewest fill edges.
    MinFill,
}

/// One node of a rooted decomposition: tree links plus a per-part bag.
#[derive(Debug, Clone)]
pub struct TdNode {
    pub parent: Option<usize>,
    pub children: Vec<usize>,
    /// Sorted element indices, one list per graph part.
    pub bag: Vec<Vec<usize>>,
}

/// A rooted tree decomposition over a fixed list of part sizes.
#[derive(Debug, Clone)]
pub struct TreeDecomposition {
    nodes: Vec<TdNode>,
    root: usize,
    convention: WidthConvention,
    part_sizes: Vec<usize>,
}

/// Structural equality: same parts, same bags per node id, same tree edge
/// set. Orientation (which node is root) is deliberately ignored.
impl PartialEq for TreeDecomposition {
    fn eq(&self, other: &Self) -> bool {
        self.part_sizes == other.part_sizes
            && self.convention == other.convention
            && self.nodes.len() == other.nodes.len()
            && self
                .nodes
                .iter()
                .zip(&other.nodes)
                .all(|(a, b)| a.bag == b.bag)
            && self.edge_set() == other.edge_set()
    }
}

impl Eq for TreeDecomposition {}

fn bag_total(bag: &[Vec<usize>]) -> usize {
    bag.iter().map(|l| l.len()).sum()
}

/// Deterministic root choice: maximum-cardinality bag, ties to the lowest
/// node id.
fn choose_root(bags: &[Vec<Vec<usize>>]) -> usize {
    bags.iter()
        .enumerate()
        .max_by_key(|(i, b)| (bag_total(b), Reverse(*i)))
        .map(|(i, _)| i)
        .expect("decomposition has at least one node")
}

impl TreeDecomposition {
    /// Builds a decomposition from parent links (exactly one `None` marks
    /// the root) and per-part bags. Bags are sorted and deduplicated;
    /// elements are range-checked against `part_sizes`.
    pub fn from_parents(
        parents: &[Option<usize>],
        mut bags: Vec<Vec<Vec<usize>>>,
        convention: WidthConvention,
        part_sizes: Vec<usize>,
    ) -> Result<TreeDecomposition, TdError> {
        let n = parents.len();
        if n == 0 || bags.len() != n {
            return Err(TdError::MalformedTree(format!(
                "{} parent links for {} bags",
                n,
                bags.len()
            )));
        }
        for bag in &mut bags {
            if bag.len() != part_sizes.len() {
                return Err(TdError::MalformedTree(format!(
                    "bag has {} parts, decomposition has {}",
                    bag.len(),
                    part_sizes.len()
                )));
            }
            for (p, list) in bag.iter_mut().enumerate() {
                list.sort_unstable();
                list.dedup();
                if let Some(&e) = list.iter().find(|&&e| e >= part_sizes[p]) {
                    return Err(TdError::ElementOutOfRange {
                        part: p,
                        element: e,
                        size: part_sizes[p],
                    });
                }
            }
        }
        let mut root = None;
        for (i, p) in parents.iter().enumerate() {
            match p {
                None => {
                    if root.replace(i).is_some() {
                        return Err(TdError::MalformedTree("multiple roots".into()));
                    }
                }
                Some(q) if *q >= n || *q == i => {
                    return Err(TdError::MalformedTree(format!(
                        "node {i} has invalid parent {q}"
                    )));
                }
                Some(_) => {}
            }
        }
        let root = root.ok_or_else(|| TdError::MalformedTree("no root".into()))?;
        let mut nodes: Vec<TdNode> = bags
            .into_iter()
            .zip(parents)
            .map(|(bag, &parent)| TdNode {
                parent,
                children: Vec::new(),
                bag,
            })
            .collect();
        for i in 0..n {
            if let Some(p) = nodes[i].parent {
                nodes[p].children.push(i);
            }
        }
        // Reachability from the root rules out cycles among parent links.
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([root]);
        seen[root] = true;
        while let Some(t) = queue.pop_front() {
            for &c in &nodes[t].children {
                if !seen[c] {
                    seen[c] = true;
                    queue.push_back(c);
                }
            }
        }
        if seen.iter().any(|&s| !s) {
            return Err(TdError::MalformedTree(
                "parent links contain a cycle or a second component".into(),
            ));
        }
        Ok(TreeDecomposition {
            nodes,
            root,
            convention,
            part_sizes,
        })
    }

    /// Builds a decomposition from an undirected tree-edge list, choosing
    /// the root by the maximum-bag rule and orienting away from it.
    pub fn from_edges(
        bags: Vec<Vec<Vec<usize>>>,
        edges: &[(usize, usize)],
        convention: WidthConvention,
        part_sizes: Vec<usize>,
    ) -> Result<TreeDecomposition, TdError> {
        let n = bags.len();
        if n == 0 {
            return Err(TdError::MalformedTree("decomposition has no nodes".into()));
        }
        if edges.len() != n - 1 {
            return Err(TdError::MalformedTree(format!(
                "{n} nodes need {} tree edges, got {}",
                n - 1,
                edges.len()
            )));
        }
        let mut adj = vec![Vec::new(); n];
        for &(a, b) in edges {
            if a >= n || b >= n || a == b {
                return Err(TdError::MalformedTree(format!("invalid tree edge ({a}, {b})")));
            }
            adj[a].push(b);
            adj[b].push(a);
        }
        for l in &mut adj {
            l.sort_unstable();
        }
        let root = choose_root(&bags);
        let mut parents = vec![None; n];
        let mut seen = vec![false; n];
        seen[root] = true;
        let mut queue = VecDeque::from([root]);
        while let Some(t) = queue.pop_front() {
            for &u in &adj[t] {
                if !seen[u] {
                    seen[u] = true;
                    parents[u] = Some(t);
                    queue.push_back(u);
                }
            }
        }
        if seen.iter().any(|&s| !s) {
            return Err(TdError::MalformedTree(
                "decomposition tree is disconnected".into(),
            ));
        }
        Self::from_parents(&parents, bags, convention, part_sizes)
    }

    pub fn nodes(&self) -> &[TdNode] {
        &self.nodes
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn convention(&self) -> WidthConvention {
        self.convention
    }

    pub fn part_sizes(&self) -> &[usize] {
        &self.part_sizes
    }

    /// Largest total bag cardinality over all nodes.
    pub fn max_bag_total(&self) -> usize {
        self.nodes.iter().map(|n| bag_total(&n.bag)).max().unwrap_or(0)
    }

    /// Width under the recorded convention: largest bag minus one for
    /// single-part decompositions, largest total cardinality otherwise.
    pub fn width(&self) -> usize {
        match self.convention {
            WidthConvention::SinglePart => self.max_bag_total().saturating_sub(1),
            WidthConvention::MultiPart => self.max_bag_total(),
        }
    }

    /// Node ids in post-order (children before parents, root last).
    pub fn postorder(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.nodes.len());
        let mut stack = vec![(self.root, 0usize)];
        while let Some(&(t, ci)) = stack.last() {
            if ci < self.nodes[t].children.len() {
                stack.last_mut().unwrap().1 += 1;
                stack.push((self.nodes[t].children[ci], 0));
            } else {
                out.push(t);
                stack.pop();
            }
        }
        out
    }

    fn edge_set(&self) -> BTreeSet<(usize, usize)> {
        self.nodes
            .iter()
            .enumerate()
            .filter_map(|(t, n)| n.parent.map(|p| (t.min(p), t.max(p))))
            .collect()
    }

    fn flat_offsets(&self) -> Vec<usize> {
        let mut offsets = Vec::with_capacity(self.part_sizes.len());
        let mut acc = 0;
        for &s in &self.part_sizes {
            offsets.push(acc);
            acc += s;
        }
        offsets
    }

    /// Checks the three decomposition conditions against `g` and returns
    /// the width under the recorded convention: every vertex covered,
    /// every edge inside some bag, and each vertex's occurrence set
    /// connected in the tree.
    pub fn validate(&self, g: &LabeledGraph) -> Result<usize, TdError> {
        let gsizes: Vec<usize> = g.parts().iter().map(|&(_, s)| s).collect();
        if gsizes != self.part_sizes {
            return Err(TdError::PartMismatch {
                td: self.part_sizes.clone(),
                graph: gsizes,
            });
        }
        let total: usize = self.part_sizes.iter().sum();
        let offsets = self.flat_offsets();
        let mut occ: Vec<Vec<usize>> = vec![Vec::new(); total];
        let mut flat_bags: Vec<BTreeSet<usize>> = Vec::with_capacity(self.nodes.len());
        for (t, node) in self.nodes.iter().enumerate() {
            let mut fb = BTreeSet::new();
            for (p, list) in node.bag.iter().enumerate() {
                for &e in list {
                    let v = offsets[p] + e;
                    fb.insert(v);
                    occ[v].push(t);
                }
            }
            flat_bags.push(fb);
        }
        for v in 0..total {
            if occ[v].is_empty() {
                return Err(TdError::UncoveredVertex(g.vertex_name(v)));
            }
        }
        for (u, v) in g.edges() {
            if !occ[u].iter().any(|&t| flat_bags[t].contains(&v)) {
                return Err(TdError::UncoveredEdge(g.vertex_name(u), g.vertex_name(v)));
            }
        }
        for v in 0..total {
            let members: BTreeSet<usize> = occ[v].iter().copied().collect();
            let mut seen = BTreeSet::from([occ[v][0]]);
            let mut queue = VecDeque::from([occ[v][0]]);
            while let Some(t) = queue.pop_front() {
                let node = &self.nodes[t];
                for &u in node.parent.iter().chain(&node.children) {
                    if members.contains(&u) && seen.insert(u) {
                        queue.push_back(u);
                    }
                }
            }
            if seen.len() != members.len() {
                return Err(TdError::DisconnectedOccurrence(g.vertex_name(v)));
            }
        }
        Ok(self.width())
    }
}

fn split_by_parts(flat: &[usize], part_sizes: &[usize]) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = vec![Vec::new(); part_sizes.len()];
    for &v in flat {
        let mut rest = v;
        for (p, &s) in part_sizes.iter().enumerate() {
            if rest < s {
                out[p].push(rest);
                break;
            }
            rest -= s;
        }
    }
    out
}

fn heuristic_key(method: HeuristicMethod, adj: &[BTreeSet<usize>], v: usize) -> usize {
    match method {
        HeuristicMethod::MinDegree => adj[v].len(),
        HeuristicMethod::MinFill => {
            let nbrs: Vec<usize> = adj[v].iter().copied().collect();
            let mut missing = 0;
            for i in 0..nbrs.len() {
                for j in i + 1..nbrs.len() {
                    if !adj[nbrs[i]].contains(&nbrs[j]) {
                        missing += 1;
                    }
                }
            }
            missing
        }
    }
}

/// Builds a valid decomposition of `g` by eliminating vertices in a greedy
/// order, then extracting the maximal cliques of the resulting chordal
/// completion and arranging them in a clique tree.
pub fn heuristic_decomposition(g: &LabeledGraph, method: HeuristicMethod) -> TreeDecomposition {
    let part_sizes: Vec<usize> = g.parts().iter().map(|&(_, s)| s).collect();
    let convention = if part_sizes.len() == 1 {
        WidthConvention::SinglePart
    } else {
        WidthConvention::MultiPart
    };
    let n = g.num_vertices();
    if n == 0 {
        let empty_bag = vec![vec![Vec::new(); part_sizes.len()]];
        return TreeDecomposition::from_parents(&[None], empty_bag, convention, part_sizes)
            .expect("single empty bag is well-formed");
    }

    // Greedy elimination with a lazy priority queue: stale keys are
    // re-checked on pop, and touched neighbors are re-pushed eagerly so a
    // key decrease is never missed. Ties break to the lowest vertex id.
    let mut adj: Vec<BTreeSet<usize>> = (0..n).map(|v| g.neighbors(v).clone()).collect();
    let mut heap: BinaryHeap<Reverse<(usize, usize)>> = (0..n)
        .map(|v| Reverse((heuristic_key(method, &adj, v), v)))
        .collect();
    let mut eliminated = vec![false; n];
    let mut pos = vec![usize::MAX; n];
    let mut madj: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut order = Vec::with_capacity(n);
    while let Some(Reverse((k, v))) = heap.pop() {
        if eliminated[v] {
            continue;
        }
        let current = heuristic_key(method, &adj, v);
        if current != k {
            heap.push(Reverse((current, v)));
            continue;
        }
        pos[v] = order.len();
        order.push(v);
        eliminated[v] = true;
        let nbrs: Vec<usize> = adj[v].iter().copied().collect();
        for &u in &nbrs {
            adj[u].remove(&v);
        }
        for i in 0..nbrs.len() {
            for j in i + 1..nbrs.len() {
                adj[nbrs[i]].insert(nbrs[j]);
                adj[nbrs[j]].insert(nbrs[i]);
            }
        }
        for &u in &nbrs {
            heap.push(Reverse((heuristic_key(method, &adj, u), u)));
        }
        madj[v] = nbrs;
        adj[v].clear();
    }

    // Candidate cliques C_v = {v} ∪ madj(v). C_v fails to be maximal
    // exactly when some earlier-eliminated w has its first-eliminated
    // neighbor at v and |madj(w)| = |madj(v)| + 1; then C_v ⊂ C_w and v
    // joins w's clique node instead of opening its own.
    let parent_vertex: Vec<Option<usize>> = (0..n)
        .map(|v| madj[v].iter().copied().min_by_key(|&u| pos[u]))
        .collect();
    let mut absorbers: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &w in &order {
        if let Some(u) = parent_vertex[w] {
            absorbers[u].push(w);
        }
    }
    let mut clique_of = vec![usize::MAX; n];
    let mut bags_flat: Vec<Vec<usize>> = Vec::new();
    for &v in &order {
        let absorbed = absorbers[v]
            .iter()
            .find(|&&w| madj[w].len() == madj[v].len() + 1)
            .map(|&w| clique_of[w]);
        clique_of[v] = match absorbed {
            Some(id) => id,
            None => {
                let mut bag = madj[v].clone();
                bag.push(v);
                bag.sort_unstable();
                bags_flat.push(bag);
                bags_flat.len() - 1
            }
        };
    }
    // Clique-tree edges: each vertex's clique links to the clique of its
    // first-eliminated neighbor; coinciding cliques contribute nothing.
    let mut edge_set: BTreeSet<(usize, usize)> = BTreeSet::new();
    for &v in &order {
        if let Some(u) = parent_vertex[v] {
            let (a, b) = (clique_of[v], clique_of[u]);
            if a != b {
                edge_set.insert((a.min(b), a.max(b)));
            }
        }
    }
    // A disconnected graph yields a clique forest; stitch the component
    // representatives together (occurrence sets never span components).
    let nb = bags_flat.len();
    let mut comp = vec![usize::MAX; nb];
    let mut adj_b = vec![Vec::new(); nb];
    for &(a, b) in &edge_set {
        adj_b[a].push(b);
        adj_b[b].push(a);
    }
    let mut reps = Vec::new();
    for start in 0..nb {
        if comp[start] != usize::MAX {
            continue;
        }
        reps.push(start);
        comp[start] = start;
        let mut queue = VecDeque::from([start]);
        while let Some(t) = queue.pop_front() {
            for &u in &adj_b[t] {
                if comp[u] == usize::MAX {
                    comp[u] = start;
                    queue.push_back(u);
                }
            }
        }
    }
    for &r in &reps[1..] {
        edge_set.insert((reps[0].min(r), reps[0].max(r)));
    }

    let bags: Vec<Vec<Vec<usize>>> = bags_flat
        .iter()
        .map(|flat| split_by_parts(flat, &part_sizes))
        .collect();
    let edges: Vec<(usize, usize)> = edge_set.into_iter().collect();
    TreeDecomposition::from_edges(bags, &edges, convention, part_sizes)
        .expect("clique tree construction yields a valid tree")
}

/// Where each row (or each nonzero entry, for multipartite decompositions)
/// of a tensor is anchored in the tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RowAssignment {
    /// Node id per row of axis 0; used with single-part column
    /// decompositions.
    Rows(Vec<usize>),
    /// Node id per nonzero entry, keyed by the entry's index tuple.
    Entries(BTreeMap<Vec<usize>, usize>),
}

fn contains_sorted(bag: &[usize], elements: &[usize]) -> bool {
    elements.iter().all(|e| bag.binary_search(e).is_ok())
}

/// Assigns every row (single-part decompositions) or every nonzero entry
/// (multipartite ones) to the unique earliest post-order node whose bag
/// contains its support. Rows with empty support go to the root.
pub fn assign_rows<R: Scalar>(
    td: &TreeDecomposition,
    t: &SparseTensor<R>,
) -> Result<RowAssignment, TdError> {
    let post = td.postorder();
    if td.part_sizes().len() == 1 {
        if t.order() != 2 || td.part_sizes()[0] != t.lens()[1] {
            return Err(TdError::PartMismatch {
                td: td.part_sizes().to_vec(),
                graph: t.lens().to_vec(),
            });
        }
        let mut of_row = Vec::with_capacity(t.lens()[0]);
        for a in 0..t.lens()[0] {
            let support: Vec<usize> = t.row_entries(a).map(|(k, _)| k[1]).collect();
            if support.is_empty() {
                of_row.push(td.root());
                continue;
            }
            match post
                .iter()
                .copied()
                .find(|&tn| contains_sorted(&td.nodes()[tn].bag[0], &support))
            {
                Some(tn) => of_row.push(tn),
                None => return Err(TdError::NoContainingBag(format!("row a{}", a + 1))),
            }
        }
        Ok(RowAssignment::Rows(of_row))
    } else {
        if td.part_sizes() != t.lens() {
            return Err(TdError::PartMismatch {
                td: td.part_sizes().to_vec(),
                graph: t.lens().to_vec(),
            });
        }
        let mut map = BTreeMap::new();
        for (key, _) in t.iter() {
            match post.iter().copied().find(|&tn| {
                key.iter()
                    .enumerate()
                    .all(|(p, &e)| td.nodes()[tn].bag[p].binary_search(&e).is_ok())
            }) {
                Some(tn) => {
                    map.insert(key.clone(), tn);
                }
                None => {
                    let ix: Vec<String> = key.iter().map(|i| (i + 1).to_string()).collect();
                    return Err(TdError::NoContainingBag(format!(
                        "entry ({})",
                        ix.join(", ")
                    )));
                }
            }
        }
        Ok(RowAssignment::Entries(map))
    }
}

/// Lifts a column-graph decomposition to a bipartite one: each node is
/// replaced by a path of one bag per assigned row ({a} ∪ χ(t)); nodes with
/// no assigned rows keep their bag with an empty row part. Validates both
/// the input (against the column graph) and the output (against the
/// bipartite graph).
pub fn lift_column_to_bipartite<R: Scalar>(
    td_x: &TreeDecomposition,
    t: &SparseTensor<R>,
) -> Result<TreeDecomposition, TdError> {
    let gx = column_graph(t)?;
    td_x.validate(&gx)?;
    let assignment = assign_rows(td_x, t)?;
    let RowAssignment::Rows(of_row) = assignment else {
        unreachable!("column decompositions produce row assignments");
    };
    let mut rows_of: Vec<Vec<usize>> = vec![Vec::new(); td_x.nodes().len()];
    for (a, &tn) in of_row.iter().enumerate() {
        rows_of[tn].push(a);
    }
    let mut bags: Vec<Vec<Vec<usize>>> = Vec::new();
    let mut first_new = vec![0usize; td_x.nodes().len()];
    let mut edges: Vec<(usize, usize)> = Vec::new();
    for (tn, node) in td_x.nodes().iter().enumerate() {
        let chi = &node.bag[0];
        first_new[tn] = bags.len();
        if rows_of[tn].is_empty() {
            bags.push(vec![Vec::new(), chi.clone()]);
        } else {
            for (j, &a) in rows_of[tn].iter().enumerate() {
                if j > 0 {
                    edges.push((bags.len() - 1, bags.len()));
                }
                bags.push(vec![vec![a], chi.clone()]);
            }
        }
    }
    // Original tree edges attach at the head of each path.
    for (tn, node) in td_x.nodes().iter().enumerate() {
        if let Some(p) = node.parent {
            edges.push((first_new[tn], first_new[p]));
        }
    }
    let lifted = TreeDecomposition::from_edges(
        bags,
        &edges,
        WidthConvention::MultiPart,
        vec![t.lens()[0], t.lens()[1]],
    )?;
    lifted.validate(&bipartite_graph(t)?)?;
    Ok(lifted)
}

/// Lifts a symmetrized-graph decomposition to a bipartite one by doubling
/// each bag: index set ι(t) becomes {a_i : i ∈ ι(t)} ∪ {x_i : i ∈ ι(t)}.
/// Validates both the input and the output.
pub fn lift_symmetrized_to_bipartite<R: Scalar>(
    td_s: &TreeDecomposition,
    m: &SparseTensor<R>,
) -> Result<TreeDecomposition, TdError> {
    let gs = symmetrized_graph(m)?;
    td_s.validate(&gs)?;
    let bags: Vec<Vec<Vec<usize>>> = td_s
        .nodes()
        .iter()
        .map(|nd| vec![nd.bag[0].clone(), nd.bag[0].clone()])
        .collect();
    let edges: Vec<(usize, usize)> = td_s
        .nodes()
        .iter()
        .enumerate()
        .filter_map(|(tn, nd)| nd.parent.map(|p| (tn, p)))
        .collect();
    let lifted = TreeDecomposition::from_edges(
        bags,
        &edges,
        WidthConvention::MultiPart,
        vec![m.lens()[0], m.lens()[1]],
    )?;
    lifted.validate(&bipartite_graph(m)?)?;
    Ok(lifted)
}

/// Parses a `.td` file: header `s td <#bags> <max bag size> <#vertices>`,
/// bag lines `b <id> <v…>` with 1-based flat vertex ids, then one line per
/// tree edge. Comment lines start with `c`. Vertex ids are decoded into
/// parts using `part_sizes`; the root is re-chosen by the maximum-bag rule.
pub fn read_decomposition(
    text: &str,
    part_sizes: &[usize],
) -> Result<TreeDecomposition, TdError> {
    let total: usize = part_sizes.iter().sum();
    let parse_int = |tok: &str, line: usize| -> Result<usize, TdError> {
        tok.parse::<usize>().map_err(|_| TdError::Syntax {
            line,
            msg: format!("expected an integer, got `{tok}`"),
        })
    };
    let mut num_bags: Option<usize> = None;
    let mut bags: Vec<Option<Vec<usize>>> = Vec::new();
    let mut edges: Vec<(usize, usize)> = Vec::new();
    for (ln, raw) in text.lines().enumerate() {
        let line = ln + 1;
        let s = raw.trim();
        if s.is_empty() || s.starts_with('c') {
            continue;
        }
        let toks: Vec<&str> = s.split_whitespace().collect();
        match toks[0] {
            "s" => {
                if num_bags.is_some() {
                    return Err(TdError::Syntax {
                        line,
                        msg: "duplicate header".into(),
                    });
                }
                if toks.len() != 5 || toks[1] != "td" {
                    return Err(TdError::Syntax {
                        line,
                        msg: "header must be `s td <#bags> <max bag size> <#vertices>`".into(),
                    });
                }
                let nb = parse_int(toks[2], line)?;
                let _max_bag = parse_int(toks[3], line)?;
                let nv = parse_int(toks[4], line)?;
                if nv != total {
                    return Err(TdError::Syntax {
                        line,
                        msg: format!("header declares {nv} vertices, expected {total}"),
                    });
                }
                num_bags = Some(nb);
                bags = vec![None; nb];
            }
            "b" => {
                let nb = num_bags.ok_or(TdError::Syntax {
                    line,
                    msg: "bag line before header".into(),
                })?;
                if toks.len() < 2 {
                    return Err(TdError::Syntax {
                        line,
                        msg: "bag line needs an id".into(),
                    });
                }
                let id = parse_int(toks[1], line)?;
                if id == 0 || id > nb {
                    return Err(TdError::Syntax {
                        line,
                        msg: format!("bag id {id} out of range 1..={nb}"),
                    });
                }
                let mut list = Vec::with_capacity(toks.len() - 2);
                for tok in &toks[2..] {
                    let v = parse_int(tok, line)?;
                    if v == 0 || v > total {
                        return Err(TdError::UnknownVertex { line, id: v });
                    }
                    list.push(v - 1);
                }
                if bags[id - 1].replace(list).is_some() {
                    return Err(TdError::Syntax {
                        line,
                        msg: format!("duplicate bag {id}"),
                    });
                }
            }
            _ => {
                let nb = num_bags.ok_or(TdError::Syntax {
                    line,
                    msg: "edge line before header".into(),
                })?;
                if toks.len() != 2 {
                    return Err(TdError::Syntax {
                        line,
                        msg: "expected a tree edge `<bag-id> <bag-id>`".into(),
                    });
                }
                let a = parse_int(toks[0], line)?;
                let b = parse_int(toks[1], line)?;
                if a == 0 || a > nb || b == 0 || b > nb {
                    return Err(TdError::Syntax {
                        line,
                        msg: format!("edge ({a}, {b}) references bags outside 1..={nb}"),
                    });
                }
                edges.push((a - 1, b - 1));
            }
        }
    }
    if num_bags.is_none() {
        return Err(TdError::Syntax {
            line: 0,
            msg: "missing `s td` header".into(),
        });
    }
    let mut split = Vec::with_capacity(bags.len());
    for (i, bag) in bags.iter().enumerate() {
        match bag {
            Some(flat) => split.push(split_by_parts(flat, part_sizes)),
            None => {
                return Err(TdError::Syntax {
                    line: 0,
                    msg: format!("bag {} is never defined", i + 1),
                });
            }
        }
    }
    let convention = if part_sizes.len() == 1 {
        WidthConvention::SinglePart
    } else {
        WidthConvention::MultiPart
    };
    TreeDecomposition::from_edges(split, &edges, convention, part_sizes.to_vec())
}

/// Serializes a decomposition in the `.td` format read by
/// `read_decomposition`, with flat 1-based vertex ids.
pub fn write_decomposition(td: &TreeDecomposition) -> String {
    let offsets = td.flat_offsets();
    let total: usize = td.part_sizes().iter().sum();
    let mut s = String::new();
    let _ = writeln!(
        s,
        "s td {} {} {}",
        td.nodes().len(),
        td.max_bag_total(),
        total
    );
    for (t, node) in td.nodes().iter().enumerate() {
        let mut flat: Vec<usize> = Vec::new();
        for (p, list) in node.bag.iter().enumerate() {
            flat.extend(list.iter().map(|&e| offsets[p] + e + 1));
        }
        flat.sort_unstable();
        let ids: Vec<String> = flat.iter().map(|v| v.to_string()).collect();
        if ids.is_empty() {
            let _ = writeln!(s, "b {}", t + 1);
        } else {
            let _ = writeln!(s, "b {} {}", t + 1, ids.join(" "));
        }
    }
    for (t, node) in td.nodes().iter().enumerate() {
        if let Some(p) = node.parent {
            let _ = writeln!(s, "{} {}", p + 1, t + 1);
        }
    }
    s
}

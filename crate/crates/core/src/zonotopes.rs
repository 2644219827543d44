//! Mixed volumes of zonotopes: the data model, the graph abstractions, the
//! few-edge-directions exact algorithm, and the subset-sum instance family.
//!
//! A zonotope is a Minkowski sum of segments `[0,1]·z_j`; a system holds `n`
//! zonotopes in `ℝⁿ` with exact rational generators. Directions are
//! deduplicated up to scaling (divide by the entry GCD, flip so the first
//! nonzero entry is positive), giving the edge-direction set `U` and a
//! coefficient per (zonotope, direction) pair.

use crate::base_cases::FunctionSignature;
use crate::engines::{generalized_engine, EngineError};
use crate::graphs::{LabeledGraph, PartKind};
use crate::oracle::exact_determinant;
use crate::tensor::{Scalar, SparseTensor};
use crate::treedecomp::{
    heuristic_decomposition, HeuristicMethod, TreeDecomposition, WidthConvention, MAX_BAG_BITS,
};
use num::{BigInt, BigRational, One, Signed, Zero};
use std::collections::BTreeMap;
use thiserror::Error;

/// Errors from zonotope parsing, indexing and the mixed-volume algorithm.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum ZonotopeError {
    #[error("line {line}: syntax error: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("zonotope {zonotope}: generator {generator} is zero")]
    ZeroGenerator { zonotope: usize, generator: usize },
    #[error("zonotope {zonotope}: generator {generator} has dimension {got}, expected {expected}")]
    DimensionMismatch {
        zonotope: usize,
        generator: usize,
        got: usize,
        expected: usize,
    },
    #[error("system has {got} zonotopes, expected the dimension {expected}")]
    WrongCount { got: usize, expected: usize },
    #[error("{extra} extra edge directions exceed the cap of {cap}")]
    DirectionCapExceeded { extra: usize, cap: usize },
    #[error(
        "zonotope {zonotope} carries a negative coefficient on a canonicalized \
         direction; such configurations are rejected"
    )]
    NegativeCoefficient { zonotope: usize },
    #[error("total bag cardinality {0} exceeds the supported maximum of {MAX_BAG_BITS}")]
    WidthTooLarge(usize),
    #[error("invalid decomposition: {0}")]
    InvalidDecomposition(String),
}

/// `n` zonotopes in `ℝⁿ`, each a list of nonzero generator vectors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZonotopeSystem {
    dim: usize,
    zonotopes: Vec<Vec<Vec<BigRational>>>,
}

impl ZonotopeSystem {
    /// Builds a system, validating generator dimensions and nonzeroness.
    pub fn new(
        dim: usize,
        zonotopes: Vec<Vec<Vec<BigRational>>>,
    ) -> Result<Self, ZonotopeError> {
        for (zi, z) in zonotopes.iter().enumerate() {
            for (gi, g) in z.iter().enumerate() {
                if g.len() != dim {
                    return Err(ZonotopeError::DimensionMismatch {
                        zonotope: zi + 1,
                        generator: gi + 1,
                        got: g.len(),
                        expected: dim,
                    });
                }
                if g.iter().all(|c| c.is_zero()) {
                    return Err(ZonotopeError::ZeroGenerator {
                        zonotope: zi + 1,
                        generator: gi + 1,
                    });
                }
            }
        }
        Ok(ZonotopeSystem { dim, zonotopes })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Per zonotope, its generator list.
    pub fn zonotopes(&self) -> &[Vec<Vec<BigRational>>] {
        &self.zonotopes
    }

    /// Serializes to the zonotope file format.
    pub fn serialize(&self) -> String {
        let mut s = format!("zonotopes {}\n", self.dim);
        for z in &self.zonotopes {
            s.push_str(&format!("z {}\n", z.len()));
            for g in z {
                let coords: Vec<String> = g.iter().map(|c| c.to_string()).collect();
                s.push_str(&coords.join(" "));
                s.push('\n');
            }
        }
        s
    }
}

/// Parses the zonotope file format: header `zonotopes <n>`, then per
/// zonotope a line `z <m>` followed by `m` generator lines of `n` exact
/// rationals (`p/q` or integers); `c` lines are comments.
pub fn parse_zonotopes(text: &str) -> Result<ZonotopeSystem, ZonotopeError> {
    let syntax = |line: usize, msg: &str| ZonotopeError::Syntax {
        line,
        msg: msg.to_string(),
    };
    let mut dim: Option<usize> = None;
    let mut zonotopes: Vec<Vec<Vec<BigRational>>> = Vec::new();
    let mut pending: usize = 0; // generator lines still expected
    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('c') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split_whitespace().collect();
        match dim {
            None => {
                if fields.len() != 2 || fields[0] != "zonotopes" {
                    return Err(syntax(line, "expected header `zonotopes <n>`"));
                }
                let n: usize = fields[1]
                    .parse()
                    .ok()
                    .filter(|&n| n > 0)
                    .ok_or_else(|| syntax(line, "bad dimension in header"))?;
                dim = Some(n);
            }
            Some(n) => {
                if pending == 0 {
                    if fields.len() != 2 || fields[0] != "z" {
                        return Err(syntax(line, "expected `z <generator count>`"));
                    }
                    pending = fields[1]
                        .parse()
                        .ok()
                        .ok_or_else(|| syntax(line, "bad generator count"))?;
                    zonotopes.push(Vec::new());
                } else {
                    if fields.len() != n {
                        return Err(syntax(line, "generator coordinate count mismatch"));
                    }
                    let mut g = Vec::with_capacity(n);
                    for f in &fields {
                        let v = <BigRational as Scalar>::parse(f)
                            .ok_or_else(|| syntax(line, "bad rational coordinate"))?;
                        g.push(v);
                    }
                    zonotopes.last_mut().unwrap().push(g);
                    pending -= 1;
                }
            }
        }
    }
    let dim = dim.ok_or_else(|| syntax(0, "missing header line"))?;
    if pending != 0 {
        return Err(syntax(0, "unexpected end of file inside a zonotope"));
    }
    ZonotopeSystem::new(dim, zonotopes)
}

/// A generator reduced to a canonical direction: primitive integer vector
/// with positive leading nonzero entry, plus the rational coefficient `c`
/// with `generator = c · direction`.
fn canonicalize(g: &[BigRational]) -> (Vec<BigInt>, BigRational) {
    // Scale to integers.
    let mut lcm = BigInt::one();
    for v in g {
        lcm = num::integer::lcm(lcm, v.denom().clone());
    }
    let ints: Vec<BigInt> = g.iter().map(|v| v.numer() * (&lcm / v.denom())).collect();
    // Divide by the GCD of the entries.
    let mut gcd = BigInt::zero();
    for v in &ints {
        gcd = num::integer::gcd(gcd, v.clone());
    }
    debug_assert!(!gcd.is_zero(), "zero generators are rejected at construction");
    let mut dir: Vec<BigInt> = ints.iter().map(|v| v / &gcd).collect();
    // Flip so the first nonzero entry is positive.
    let mut flipped = false;
    if let Some(first) = dir.iter().find(|v| !v.is_zero()) {
        if first.is_negative() {
            flipped = true;
            for v in &mut dir {
                *v = -std::mem::take(v);
            }
        }
    }
    // generator = c · dir with c = ±gcd / lcm.
    let mut c = BigRational::new(gcd, lcm);
    if flipped {
        c = -c;
    }
    (dir, c)
}

/// The deduplicated edge directions `U` of a system, with one merged
/// coefficient per (zonotope, direction) pair. Parallel generators within a
/// zonotope merge by summing coefficient magnitudes (translating a segment
/// does not change any mixed volume). `negative_zonotope` records the first
/// zonotope whose raw generator pointed against its canonicalized direction.
#[derive(Debug, Clone)]
pub struct DirectionIndex {
    /// Canonical directions in deterministic (lexicographic) order.
    pub directions: Vec<Vec<BigInt>>,
    /// `coeffs[i][u]`: merged magnitude of zonotope `i` along direction `u`.
    pub coeffs: Vec<Vec<BigRational>>,
    /// First zonotope (1-based) with a generator whose coefficient on its
    /// canonical direction is negative, if any.
    pub negative_zonotope: Option<usize>,
}

impl DirectionIndex {
    /// Canonicalizes and deduplicates all generators of the system.
    pub fn build(zs: &ZonotopeSystem) -> DirectionIndex {
        let mut dir_ids: BTreeMap<Vec<BigInt>, usize> = BTreeMap::new();
        let mut per_zonotope: Vec<BTreeMap<usize, BigRational>> = Vec::new();
        let mut negative_zonotope = None;
        for (zi, z) in zs.zonotopes().iter().enumerate() {
            let mut coeffs: BTreeMap<usize, BigRational> = BTreeMap::new();
            for g in z {
                let (dir, c) = canonicalize(g);
                if c.is_negative() && negative_zonotope.is_none() {
                    negative_zonotope = Some(zi + 1);
                }
                let next = dir_ids.len();
                let id = *dir_ids.entry(dir).or_insert(next);
                *coeffs.entry(id).or_insert_with(BigRational::zero) += c.abs();
            }
            per_zonotope.push(coeffs);
        }
        // Reorder directions lexicographically for reproducible output.
        let mut sorted: Vec<(Vec<BigInt>, usize)> = dir_ids.into_iter().collect();
        sorted.sort();
        let mut remap = vec![0usize; sorted.len()];
        for (new_id, (_, old_id)) in sorted.iter().enumerate() {
            remap[*old_id] = new_id;
        }
        let directions: Vec<Vec<BigInt>> = sorted.into_iter().map(|(d, _)| d).collect();
        let coeffs = per_zonotope
            .into_iter()
            .map(|m| {
                let mut row = vec![BigRational::zero(); directions.len()];
                for (old_id, c) in m {
                    row[remap[old_id]] = c;
                }
                row
            })
            .collect();
        DirectionIndex {
            directions,
            coeffs,
            negative_zonotope,
        }
    }
}

/// The bipartite graph with one vertex per zonotope and one per edge
/// direction, joined when the zonotope has a nonzero coefficient along the
/// direction.
pub fn edge_graph(idx: &DirectionIndex) -> LabeledGraph {
    let mut g = LabeledGraph::new(vec![
        (PartKind::Zonotopes, idx.coeffs.len()),
        (PartKind::Directions, idx.directions.len()),
    ]);
    for (i, row) in idx.coeffs.iter().enumerate() {
        for (u, c) in row.iter().enumerate() {
            if !c.is_zero() {
                let (zv, uv) = (g.vertex(0, i), g.vertex(1, u));
                g.add_edge(zv, uv);
            }
        }
    }
    g
}

/// The graph on the coordinates 1..n with, per zonotope, a clique on the
/// nonzero coordinates of its generator sum.
pub fn coordinates_graph(zs: &ZonotopeSystem) -> LabeledGraph {
    let mut g = LabeledGraph::new(vec![(PartKind::Coordinates, zs.dim())]);
    for z in zs.zonotopes() {
        let mut sum = vec![BigRational::zero(); zs.dim()];
        for gen in z {
            for (s, c) in sum.iter_mut().zip(gen) {
                *s += c;
            }
        }
        let support: Vec<usize> = (0..zs.dim()).filter(|&i| !sum[i].is_zero()).collect();
        g.add_clique(&support);
    }
    g
}

/// Size-k subsets of 0..m−1 in revolving-door order: consecutive subsets
/// differ by removing one element and adding another.
fn revolving_door(m: usize, k: usize) -> Vec<Vec<usize>> {
    if k > m {
        return Vec::new();
    }
    if k == 0 {
        return vec![Vec::new()];
    }
    if k == m {
        return vec![(0..m).collect()];
    }
    // Subsets avoiding m−1 first, then those containing it in reverse; the
    // seam still swaps a single element.
    let mut out = revolving_door(m - 1, k);
    let mut with_last = revolving_door(m - 1, k - 1);
    with_last.reverse();
    for mut s in with_last {
        s.push(m - 1);
        out.push(s);
    }
    out
}

/// Counters and result of one mixed-volume computation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MixedVolumeRun {
    pub result: BigRational,
    /// Size-n direction subsets examined.
    pub subsets: usize,
    /// Subsets whose direction determinant was nonzero.
    pub regular_subsets: usize,
    /// Nodes and largest bag of the edge-graph decomposition swept.
    pub nodes: usize,
    pub max_bag_total: usize,
    /// Ring multiplications across all per-subset permanent sweeps.
    pub ring_mults: u64,
}

/// Exact determinant of the n chosen direction vectors (as columns).
fn direction_determinant(directions: &[Vec<BigInt>], w: &[usize]) -> BigRational {
    let n = w.len();
    let rows: Vec<Vec<BigRational>> = (0..n)
        .map(|i| {
            w.iter()
                .map(|&u| BigRational::from_integer(directions[u][i].clone()))
                .collect()
        })
        .collect();
    exact_determinant(&rows)
}

/// The mixed volume of a system with few edge directions, normalized so
/// that the mixed volume of n copies of one body is n! times its volume.
///
/// Sums |det(W)| · Perm(M_W) over all size-n direction subsets W, where
/// M_W is the nonnegative coefficient matrix restricted to W; each
/// permanent runs on the supplied edge-graph decomposition (or a min-fill
/// heuristic one) with bags restricted to Z ∪ W. Systems where some
/// generator points against its canonicalized direction are rejected.
pub fn mixed_volume_few_directions(
    zs: &ZonotopeSystem,
    td: Option<&TreeDecomposition>,
    max_extra: usize,
    threads: usize,
) -> Result<MixedVolumeRun, ZonotopeError> {
    let n = zs.dim();
    if zs.zonotopes().len() != n {
        return Err(ZonotopeError::WrongCount {
            got: zs.zonotopes().len(),
            expected: n,
        });
    }
    let idx = DirectionIndex::build(zs);
    if let Some(zonotope) = idx.negative_zonotope {
        return Err(ZonotopeError::NegativeCoefficient { zonotope });
    }
    let graph = edge_graph(&idx);
    let full_td = match td {
        Some(user) => {
            user.validate(&graph)
                .map_err(|e| ZonotopeError::InvalidDecomposition(e.to_string()))?;
            user.clone()
        }
        None => heuristic_decomposition(&graph, HeuristicMethod::MinFill),
    };
    let mut run = MixedVolumeRun {
        result: BigRational::zero(),
        subsets: 0,
        regular_subsets: 0,
        nodes: full_td.nodes().len(),
        max_bag_total: full_td.max_bag_total(),
        ring_mults: 0,
    };
    let m = idx.directions.len();
    if m < n {
        // Fewer directions than the dimension: every selection is
        // degenerate and the mixed volume vanishes.
        return Ok(run);
    }
    if m - n > max_extra {
        return Err(ZonotopeError::DirectionCapExceeded {
            extra: m - n,
            cap: max_extra,
        });
    }

    let tree_edges: Vec<(usize, usize)> = full_td
        .nodes()
        .iter()
        .enumerate()
        .filter_map(|(v, nd)| nd.parent.map(|p| (v, p)))
        .collect();
    let perm_sig = FunctionSignature::permanent();
    for w in revolving_door(m, n) {
        run.subsets += 1;
        let det = direction_determinant(&idx.directions, &w);
        if det.is_zero() {
            continue;
        }
        run.regular_subsets += 1;
        // A zonotope without coefficients on W makes the permanent zero.
        if idx
            .coeffs
            .iter()
            .any(|row| w.iter().all(|&u| row[u].is_zero()))
        {
            continue;
        }
        let mut mw: SparseTensor<BigRational> = SparseTensor::new(vec![n, n]);
        for (i, row) in idx.coeffs.iter().enumerate() {
            for (j, &u) in w.iter().enumerate() {
                if !row[u].is_zero() {
                    mw.set(vec![i, j], row[u].clone());
                }
            }
        }
        // Restrict every bag to Z ∪ W, renumbering directions by their
        // position in W; the tree shape is unchanged.
        let bags: Vec<Vec<Vec<usize>>> = full_td
            .nodes()
            .iter()
            .map(|nd| {
                vec![
                    nd.bag[0].clone(),
                    nd.bag[1]
                        .iter()
                        .filter_map(|&u| w.binary_search(&u).ok())
                        .collect(),
                ]
            })
            .collect();
        let td_w = TreeDecomposition::from_edges(
            bags,
            &tree_edges,
            WidthConvention::MultiPart,
            vec![n, n],
        )
        .expect("restricting bags preserves the tree");
        let perm = match generalized_engine(&mw, &perm_sig, &td_w, threads) {
            Ok(engine_run) => {
                run.ring_mults += engine_run.stats.ring_mults;
                engine_run.result
            }
            Err(EngineError::WidthTooLarge(bits)) => {
                return Err(ZonotopeError::WidthTooLarge(bits));
            }
            Err(e) => unreachable!("restricted decompositions stay valid: {e}"),
        };
        run.result += det.abs() * perm;
    }
    Ok(run)
}

/// The subset-sum hardness family: for `a = (a_1..a_{n−1})` and `a_n = δ`,
/// the `n` zonotopes
///
/// * `z¹ = [0,1](a_1·e_n + e_1) + [0,1]·e_1`
/// * `zⁱ = [0,1](a_i·e_n + e_i − e_{i−1}) + [0,1](e_i − e_{i−1})` for
///   `i = 2..n−1`
/// * `zⁿ = [0,1](δ·e_n − e_{n−1})`
///
/// whose mixed volume equals `Σ_{S⊆A} |δ + Σ_{a_i∈S} a_i|`, so that
/// `½·MVol(δ=−1) − MVol(δ=0) + ½·MVol(δ=1)` counts the zero-sum subsets.
pub fn subset_sum_instance(a: &[i64], delta: i64) -> ZonotopeSystem {
    let n = a.len() + 1;
    assert!(n >= 2, "need at least one integer");
    let rat = |v: i64| BigRational::from_integer(BigInt::from(v));
    let unit = |i: usize, n: usize| {
        let mut e = vec![rat(0); n];
        e[i] = rat(1);
        e
    };
    let mut zonotopes = Vec::with_capacity(n);
    for (i, &ai) in a.iter().enumerate() {
        // Main generator a_i·e_n + e_{i+1} − e_i (1-based: + e_i − e_{i−1}).
        let mut main = vec![rat(0); n];
        main[n - 1] = rat(ai);
        main[i] += rat(1);
        if i > 0 {
            main[i - 1] -= rat(1);
        }
        // Companion generator e_i − e_{i−1}.
        let mut companion = unit(i, n);
        if i > 0 {
            companion[i - 1] -= rat(1);
        }
        zonotopes.push(vec![main, companion]);
    }
    // z^n = [0,1](δ·e_n − e_{n−1}).
    let mut last = vec![rat(0); n];
    last[n - 1] = rat(delta);
    last[n - 2] -= rat(1);
    zonotopes.push(vec![last]);
    ZonotopeSystem::new(n, zonotopes).expect("family generators are nonzero by construction")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(v: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(v))
    }

    #[test]
    fn parse_and_serialize_round_trip() {
        let text = "zonotopes 2\nz 2\n1 0\n1/2 3\nz 1\n0 -2/7\n";
        let zs = parse_zonotopes(text).unwrap();
        assert_eq!(zs.dim(), 2);
        assert_eq!(zs.zonotopes().len(), 2);
        let again = parse_zonotopes(&zs.serialize()).unwrap();
        assert_eq!(zs, again);
    }

    #[test]
    fn rejects_zero_generator() {
        let err = parse_zonotopes("zonotopes 2\nz 1\n0 0\n").unwrap_err();
        assert_eq!(
            err,
            ZonotopeError::ZeroGenerator {
                zonotope: 1,
                generator: 1
            }
        );
    }

    #[test]
    fn canonicalization_is_primitive_and_sign_normalized() {
        let (dir, c) = canonicalize(&[rat(-2), rat(4)]);
        assert_eq!(dir, vec![BigInt::from(1), BigInt::from(-2)]);
        assert_eq!(c, rat(-2));
        let (dir2, c2) = canonicalize(&[BigRational::new(BigInt::from(1), BigInt::from(2)), rat(0)]);
        assert_eq!(dir2, vec![BigInt::from(1), BigInt::from(0)]);
        assert_eq!(c2, BigRational::new(BigInt::from(1), BigInt::from(2)));
    }

    #[test]
    fn parallel_generators_merge_by_magnitude() {
        // One zonotope with generators 2e₁ and −3e₁: a single direction
        // with merged coefficient 5.
        let zs = ZonotopeSystem::new(
            2,
            vec![
                vec![vec![rat(2), rat(0)], vec![rat(-3), rat(0)]],
                vec![vec![rat(0), rat(1)]],
            ],
        )
        .unwrap();
        let idx = DirectionIndex::build(&zs);
        assert_eq!(idx.directions.len(), 2);
        assert_eq!(idx.negative_zonotope, Some(1));
        let e1_pos = idx
            .directions
            .iter()
            .position(|d| d == &vec![BigInt::from(1), BigInt::from(0)])
            .unwrap();
        assert_eq!(idx.coeffs[0][e1_pos], rat(5));
    }

    #[test]
    fn subset_sum_family_matches_definition() {
        let zs = subset_sum_instance(&[1, -1], 0);
        assert_eq!(zs.dim(), 3);
        assert_eq!(zs.zonotopes().len(), 3);
        // z¹ = [0,1](a₁e₃ + e₁) + [0,1]e₁.
        assert_eq!(zs.zonotopes()[0][0], vec![rat(1), rat(0), rat(1)]);
        assert_eq!(zs.zonotopes()[0][1], vec![rat(1), rat(0), rat(0)]);
        // z² = [0,1](a₂e₃ + e₂ − e₁) + [0,1](e₂ − e₁).
        assert_eq!(zs.zonotopes()[1][0], vec![rat(-1), rat(1), rat(-1)]);
        assert_eq!(zs.zonotopes()[1][1], vec![rat(-1), rat(1), rat(0)]);
        // z³ = [0,1](δe₃ − e₂) with δ = 0.
        assert_eq!(zs.zonotopes()[2][0], vec![rat(0), rat(-1), rat(0)]);
        // All segments nonparallel: 2n − 1 = 5 directions here.
        let idx = DirectionIndex::build(&zs);
        assert_eq!(idx.directions.len(), 5);
    }

    /// Axis-aligned segments: z^i = [0,1]·e_i, possibly scaled.
    fn axis_segments(scales: &[i64]) -> ZonotopeSystem {
        let n = scales.len();
        let zonotopes = scales
            .iter()
            .enumerate()
            .map(|(i, &s)| {
                let mut g = vec![rat(0); n];
                g[i] = rat(s);
                vec![g]
            })
            .collect();
        ZonotopeSystem::new(n, zonotopes).unwrap()
    }

    #[test]
    fn revolving_door_swaps_one_element_at_a_time() {
        let subsets = revolving_door(6, 3);
        assert_eq!(subsets.len(), 20);
        let mut seen: Vec<Vec<usize>> = Vec::new();
        for s in &subsets {
            assert_eq!(s.len(), 3);
            let mut sorted = s.clone();
            sorted.sort_unstable();
            assert!(!seen.contains(&sorted), "duplicate subset {s:?}");
            seen.push(sorted);
        }
        for pair in subsets.windows(2) {
            let a: std::collections::BTreeSet<usize> = pair[0].iter().copied().collect();
            let b: std::collections::BTreeSet<usize> = pair[1].iter().copied().collect();
            assert_eq!(a.symmetric_difference(&b).count(), 2, "{pair:?}");
        }
    }

    #[test]
    fn axis_segments_have_unit_mixed_volume() {
        let run = mixed_volume_few_directions(&axis_segments(&[1, 1, 1]), None, 4, 1).unwrap();
        assert_eq!(run.result, rat(1));
        assert_eq!(run.subsets, 1);
    }

    #[test]
    fn unit_squares_give_two_n_factorial_times_volume() {
        let square = vec![vec![rat(1), rat(0)], vec![rat(0), rat(1)]];
        let zs = ZonotopeSystem::new(2, vec![square.clone(), square]).unwrap();
        let run = mixed_volume_few_directions(&zs, None, 4, 1).unwrap();
        assert_eq!(run.result, rat(2));
    }

    #[test]
    fn mixed_volume_matches_a_hand_computed_area() {
        // Z₁ = [0,1]·2e₁ + [0,1](1,1), Z₂ = [0,1]·3e₂ + [0,1](2,2):
        // area(Z₁+Z₂) − area(Z₁) − area(Z₂) = 21 − 2 − 6 = 13.
        let zs = ZonotopeSystem::new(
            2,
            vec![
                vec![vec![rat(2), rat(0)], vec![rat(1), rat(1)]],
                vec![vec![rat(0), rat(3)], vec![rat(2), rat(2)]],
            ],
        )
        .unwrap();
        let run = mixed_volume_few_directions(&zs, None, 4, 1).unwrap();
        assert_eq!(run.result, rat(13));
        assert_eq!(run.subsets, 3);
        assert_eq!(run.regular_subsets, 3);
    }

    /// The few-directions family z^i = [0,1]·a_i·e_i + [0,1]·b_i·𝟙.
    fn few_directions_family(a: &[i64], b: &[i64]) -> ZonotopeSystem {
        let n = a.len();
        let zonotopes = (0..n)
            .map(|i| {
                let mut gens = Vec::new();
                if a[i] != 0 {
                    let mut g = vec![rat(0); n];
                    g[i] = rat(a[i]);
                    gens.push(g);
                }
                if b[i] != 0 {
                    gens.push(vec![rat(b[i]); n]);
                }
                gens
            })
            .collect();
        ZonotopeSystem::new(n, zonotopes).unwrap()
    }

    #[test]
    fn mixed_volume_matches_the_naive_oracle_on_random_families() {
        let mut state = 2025u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        for n in 2..=4 {
            for _ in 0..8 {
                let a: Vec<i64> = (0..n).map(|_| (next() % 4) as i64).collect();
                let b: Vec<i64> = (0..n).map(|_| (next() % 3) as i64).collect();
                if (0..n).any(|i| a[i] == 0 && b[i] == 0) {
                    continue; // a zonotope needs at least implicit extent
                }
                let zs = few_directions_family(&a, &b);
                let fast = mixed_volume_few_directions(&zs, None, 4, 1).unwrap().result;
                let naive = crate::oracle::naive_mixed_volume(&zs).unwrap();
                assert_eq!(fast, naive, "a = {a:?}, b = {b:?}");
            }
        }
    }

    #[test]
    fn permuting_zonotopes_preserves_the_mixed_volume() {
        let zs = few_directions_family(&[2, 1, 3], &[1, 2, 1]);
        let mut rotated = zs.zonotopes().to_vec();
        rotated.rotate_left(1);
        let zs2 = ZonotopeSystem::new(3, rotated).unwrap();
        let a = mixed_volume_few_directions(&zs, None, 4, 1).unwrap().result;
        let b = mixed_volume_few_directions(&zs2, None, 4, 1).unwrap().result;
        assert_eq!(a, b);
    }

    #[test]
    fn scaling_one_zonotope_scales_the_mixed_volume() {
        let zs = few_directions_family(&[2, 1, 3], &[1, 2, 1]);
        let mut scaled = zs.zonotopes().to_vec();
        for g in &mut scaled[1] {
            for c in g.iter_mut() {
                *c *= rat(3);
            }
        }
        let zs3 = ZonotopeSystem::new(3, scaled).unwrap();
        let base = mixed_volume_few_directions(&zs, None, 4, 1).unwrap().result;
        let tripled = mixed_volume_few_directions(&zs3, None, 4, 1).unwrap().result;
        assert_eq!(tripled, base * rat(3));
    }

    #[test]
    fn fewer_directions_than_the_dimension_gives_zero() {
        // Both zonotopes along e₁: only one direction in ℝ².
        let zs = ZonotopeSystem::new(
            2,
            vec![vec![vec![rat(1), rat(0)]], vec![vec![rat(2), rat(0)]]],
        )
        .unwrap();
        let run = mixed_volume_few_directions(&zs, None, 4, 1).unwrap();
        assert_eq!(run.result, rat(0));
        assert_eq!(run.subsets, 0);
    }

    #[test]
    fn the_direction_cap_is_enforced() {
        let zs = ZonotopeSystem::new(
            2,
            vec![
                vec![
                    vec![rat(1), rat(0)],
                    vec![rat(0), rat(1)],
                    vec![rat(1), rat(1)],
                    vec![rat(1), rat(2)],
                ],
                vec![
                    vec![rat(1), rat(3)],
                    vec![rat(1), rat(4)],
                    vec![rat(2), rat(1)],
                ],
            ],
        )
        .unwrap();
        assert_eq!(
            mixed_volume_few_directions(&zs, None, 4, 1).unwrap_err(),
            ZonotopeError::DirectionCapExceeded { extra: 5, cap: 4 }
        );
    }

    #[test]
    fn negative_configurations_are_rejected() {
        let zs = ZonotopeSystem::new(
            2,
            vec![vec![vec![rat(-1), rat(0)]], vec![vec![rat(0), rat(1)]]],
        )
        .unwrap();
        assert_eq!(
            mixed_volume_few_directions(&zs, None, 4, 1).unwrap_err(),
            ZonotopeError::NegativeCoefficient { zonotope: 1 }
        );
    }

    #[test]
    fn caller_supplied_decompositions_are_validated() {
        let zs = axis_segments(&[1, 1]);
        let idx = DirectionIndex::build(&zs);
        let g = edge_graph(&idx);
        // A correct single-bag decomposition works …
        let td = TreeDecomposition::from_edges(
            vec![vec![vec![0, 1], vec![0, 1]]],
            &[],
            WidthConvention::MultiPart,
            vec![2, 2],
        )
        .unwrap();
        assert_eq!(td.validate(&g).is_ok(), true);
        let run = mixed_volume_few_directions(&zs, Some(&td), 4, 1).unwrap();
        assert_eq!(run.result, rat(1));
        // … while one missing an edge is rejected.
        let bad = TreeDecomposition::from_edges(
            vec![vec![vec![0, 1], vec![0]], vec![vec![], vec![1]]],
            &[(0, 1)],
            WidthConvention::MultiPart,
            vec![2, 2],
        )
        .unwrap();
        assert!(matches!(
            mixed_volume_few_directions(&zs, Some(&bad), 4, 1).unwrap_err(),
            ZonotopeError::InvalidDecomposition(_)
        ));
    }

    #[test]
    fn edge_graph_of_the_subset_sum_family_is_narrow() {
        let zs = subset_sum_instance(&[1, -1, 3], 0);
        let idx = DirectionIndex::build(&zs);
        let g = edge_graph(&idx);
        assert_eq!(g.num_vertices(), 4 + 7);
        let td = heuristic_decomposition(&g, HeuristicMethod::MinFill);
        td.validate(&g).unwrap();
        // Each component is a star of one zonotope and ≤ 2 directions.
        assert!(td.max_bag_total() <= 3);
    }

    #[test]
    fn coordinates_graph_shapes() {
        // Axis segments: one-point supports, no edges.
        let axis = coordinates_graph(&axis_segments(&[1, 1, 1]));
        assert_eq!(axis.num_edges(), 0);
        // Subset-sum family: triangles {x_{i−1}, x_i, x_n} (plus smaller
        // cliques at the ends); width 2 decompositions exist.
        let zs = subset_sum_instance(&[2, 5, 9], 1);
        let gx = coordinates_graph(&zs);
        let td = heuristic_decomposition(&gx, HeuristicMethod::MinFill);
        td.validate(&gx).unwrap();
        assert!(td.max_bag_total() <= 3);
        // A dense generator makes the support a clique.
        let dense = ZonotopeSystem::new(
            3,
            vec![
                vec![vec![rat(1), rat(2), rat(3)]],
                vec![vec![rat(0), rat(1), rat(0)]],
                vec![vec![rat(0), rat(0), rat(1)]],
            ],
        )
        .unwrap();
        let gd = coordinates_graph(&dense);
        assert_eq!(gd.num_edges(), 3);
    }
}

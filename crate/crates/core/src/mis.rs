//! Exhaustive enumeration of maximum independent sets in matching graphs.
//!
//! Independent sets of the graph are cliques of its complement, enumerated
//! by branch and bound: candidates are greedily colored in the complement
//! (each color class is a clique of the graph, so an independent set takes at
//! most one vertex from it) and branches whose color bound cannot reach the
//! target size are cut.

use fixedbitset::FixedBitSet;
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::bounds::{ratio_bound, SpectralSummary};
use crate::error::{Error, Result};
use crate::families::{canonical_family, containment_check, Family};
use crate::graphs::MatchingGraph;
use crate::spherical::SchemeTable;

/// Largest vertex count accepted by [`independent_sets_at_least`].
pub const MAX_SEARCH_VERTICES: usize = 1024;

struct Search {
    /// Complement adjacency: `other[v]` holds the vertices not adjacent to `v`.
    other: Vec<FixedBitSet>,
    adjacent: Vec<FixedBitSet>,
    target: usize,
    found: Vec<Vec<usize>>,
    nodes: u64,
}

impl Search {
    /// Candidates in ascending color order with the color count after each.
    fn color_sort(&self, candidates: &FixedBitSet) -> (Vec<usize>, Vec<usize>) {
        let mut uncolored = candidates.clone();
        let mut order = Vec::with_capacity(candidates.count_ones(..));
        let mut bounds = Vec::with_capacity(order.capacity());
        let mut color = 0;
        while !uncolored.is_clear() {
            color += 1;
            let mut open = uncolored.clone();
            while let Some(v) = open.ones().next() {
                open.set(v, false);
                // vertices in one class must be pairwise adjacent in the graph
                open.intersect_with(&self.adjacent[v]);
                uncolored.set(v, false);
                order.push(v);
                bounds.push(color);
            }
        }
        (order, bounds)
    }

    fn expand(&mut self, chosen: &mut Vec<usize>, mut candidates: FixedBitSet) {
        self.nodes += 1;
        let (order, bounds) = self.color_sort(&candidates);
        for i in (0..order.len()).rev() {
            if chosen.len() + bounds[i] < self.target {
                return;
            }
            let v = order[i];
            chosen.push(v);
            let mut next = candidates.clone();
            next.intersect_with(&self.other[v]);
            if next.is_clear() {
                if chosen.len() >= self.target {
                    let mut set = chosen.clone();
                    set.sort_unstable();
                    self.found.push(set);
                }
            } else {
                self.expand(chosen, next);
            }
            chosen.pop();
            candidates.set(v, false);
        }
    }
}

/// Independent sets of size at least `target` at the leaves of the search,
/// as sorted index lists in lexicographic order, with the number of search
/// nodes. When `target` is the independence number these are exactly the
/// maximum independent sets.
pub fn independent_sets_at_least(graph: &MatchingGraph<'_>, target: usize) -> Result<(Vec<Vec<usize>>, u64)> {
    let count = graph.vertex_count();
    if count > MAX_SEARCH_VERTICES {
        return Err(Error::InvalidArgument(format!(
            "exhaustive search supports at most {MAX_SEARCH_VERTICES} vertices, got {count}"
        )));
    }
    let adjacent: Vec<FixedBitSet> = (0..count)
        .map(|v| {
            let mut row = FixedBitSet::with_capacity(count);
            for w in graph.neighbors(v) {
                row.insert(w);
            }
            row
        })
        .collect();
    let other = adjacent
        .iter()
        .enumerate()
        .map(|(v, row)| {
            let mut out = FixedBitSet::with_capacity(count);
            out.insert_range(..);
            out.difference_with(row);
            out.set(v, false);
            out
        })
        .collect();
    let mut search = Search {
        other,
        adjacent,
        target: target.max(1),
        found: Vec::new(),
        nodes: 0,
    };
    let mut all = FixedBitSet::with_capacity(count);
    all.insert_range(..);
    if count > 0 {
        search.expand(&mut Vec::new(), all);
    }
    search.found.sort();
    Ok((search.found, search.nodes))
}

#[derive(Clone, Debug, Serialize)]
pub struct ExtremalReport {
    pub n: usize,
    pub ratio_bound: String,
    pub maximum_size: usize,
    pub count: usize,
    /// Number of maximum sets equal to some `F_ij`.
    pub canonical: usize,
    /// Number of distinct `F_ij`; below `n(2n-1)` only when `n = 2`.
    pub expected: usize,
    /// 1-based edges of the canonical families found, in order.
    pub edges: Vec<(usize, usize)>,
    pub search_nodes: u64,
    pub passed: bool,
}

/// All maximum intersecting families, certified by the ratio bound: every
/// set of the bound's size is enumerated and compared with the `F_ij`.
pub fn extremal_families(graph: &MatchingGraph<'_>, table: &SchemeTable) -> Result<(ExtremalReport, Vec<Family>)> {
    let space = graph.space();
    let n = space.n();
    let bound = ratio_bound(&SpectralSummary::from_scheme(table)?)?;
    let target = bound
        .floor()
        .to_integer()
        .to_usize()
        .ok_or_else(|| Error::Internal(format!("ratio bound {bound} out of range")))?;
    let (sets, nodes) = independent_sets_at_least(graph, target)?;
    let families = sets
        .iter()
        .map(|s| Family::from_indices(space, s.iter().copied()))
        .collect::<Result<Vec<_>>>()?;
    let mut edges = Vec::new();
    for f in &families {
        if let Some(edge) = containment_check(space, f)?.edge {
            if f.len() == target {
                edges.push(edge);
            }
        }
    }
    let mut distinct = Vec::new();
    for i in 1..=2 * n {
        for j in i + 1..=2 * n {
            let f = canonical_family(space, i, j)?;
            if !distinct.contains(&f) {
                distinct.push(f);
            }
        }
    }
    let expected = distinct.len();
    let report = ExtremalReport {
        n,
        ratio_bound: bound.to_string(),
        maximum_size: sets.first().map_or(0, Vec::len),
        count: sets.len(),
        canonical: edges.len(),
        expected,
        passed: sets.len() == expected && edges.len() == expected && bound.is_integer(),
        edges,
        search_nodes: nodes,
    };
    Ok((report, families))
}

//! Graphs whose vertices are perfect matchings, generated on demand.
//!
//! Vertex `v` is the matching of canonical index `v` in a [`MatchingSpace`].
//! Only [`MatchingGraph::dense_adjacency`] materializes a matrix.

use std::collections::VecDeque;
use std::io::Write;

use nalgebra::{DMatrix, SymmetricEigen};
use num_bigint::BigInt;
use serde::Serialize;

use crate::arith::{int_rational, Rational};
use crate::error::{Error, Result};
use crate::matchings::{cycle_lengths, derangement_count_recurrence, sphere_size, MatchingSpace, PerfectMatching};
use crate::partitions::{enumerate_partitions, Partition};
use crate::spherical::SchemeTable;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GraphKind {
    /// Adjacent iff the two matchings share no edge.
    Derangement,
    /// Adjacent iff they differ by one partner swap, cycle type `(2,1^{n-2})`.
    Transposition,
    /// Adjacent iff the union is a Hamiltonian cycle of `K_2n`.
    HamiltonianCycle,
    /// Near-perfect matchings of `K_{2n-1}`, adjacent iff the union is a
    /// Hamiltonian path. Vertex `2n` stands in for the unmatched vertex.
    HamiltonianPath,
}

#[derive(Clone, Copy, Debug)]
pub struct MatchingGraph<'a> {
    space: &'a MatchingSpace,
    kind: GraphKind,
}

impl<'a> MatchingGraph<'a> {
    pub fn new(space: &'a MatchingSpace, kind: GraphKind) -> Self {
        MatchingGraph { space, kind }
    }

    /// The graph `H'` on near-perfect matchings of `K_{2n-1}`.
    pub fn near_perfect(space: &'a MatchingSpace) -> Result<Self> {
        if space.n() < 2 {
            return Err(Error::InvalidArgument("near-perfect graph needs n >= 2".into()));
        }
        Ok(MatchingGraph::new(space, GraphKind::HamiltonianPath))
    }

    pub fn n(&self) -> usize {
        self.space.n()
    }

    pub fn kind(&self) -> GraphKind {
        self.kind
    }

    pub fn space(&self) -> &'a MatchingSpace {
        self.space
    }

    pub fn vertex_count(&self) -> usize {
        self.space.len()
    }

    /// Degree predicted by the closed formula for this kind.
    pub fn degree_formula(&self) -> BigInt {
        let n = self.n();
        match self.kind {
            GraphKind::Derangement => derangement_count_recurrence(n),
            GraphKind::Transposition => BigInt::from(n * (n - 1)),
            GraphKind::HamiltonianCycle | GraphKind::HamiltonianPath => {
                sphere_size(&Partition::row(n)).expect("integral sphere size")
            }
        }
    }

    /// Neighbors of `v`, sorted ascending.
    pub fn neighbors(&self, v: usize) -> Vec<usize> {
        let m = self.space.get(v);
        let mut out: Vec<usize> = match self.kind {
            GraphKind::Derangement => disjoint_matchings(m).iter().map(|x| x.rank() as usize).collect(),
            GraphKind::HamiltonianCycle => disjoint_matchings(m)
                .into_iter()
                .filter(|x| cycle_lengths(m.raw(), x.raw()).len() == 1)
                .map(|x| x.rank() as usize)
                .collect(),
            GraphKind::HamiltonianPath => disjoint_matchings(m)
                .into_iter()
                .filter(|x| is_hamiltonian_path(m.raw(), x.raw()))
                .map(|x| x.rank() as usize)
                .collect(),
            GraphKind::Transposition => partner_swaps(m).iter().map(|x| x.rank() as usize).collect(),
        };
        out.sort_unstable();
        out
    }

    pub fn is_adjacent(&self, u: usize, v: usize) -> bool {
        let (a, b) = (self.space.get(u).raw(), self.space.get(v).raw());
        match self.kind {
            GraphKind::Derangement => crate::matchings::fixed_points_raw(a, b) == 0,
            GraphKind::Transposition => {
                let mut lens = cycle_lengths(a, b);
                lens.sort_unstable();
                lens.len() == self.n() - 1 && lens.last() == Some(&2)
            }
            GraphKind::HamiltonianCycle => cycle_lengths(a, b).len() == 1 && self.n() > 1,
            GraphKind::HamiltonianPath => is_hamiltonian_path(a, b),
        }
    }

    /// Breadth-first distances from a set of sources; `None` if unreachable.
    pub fn distances_from(&self, sources: &[usize]) -> Vec<Option<u32>> {
        let mut dist = vec![None; self.vertex_count()];
        let mut queue = VecDeque::new();
        for &s in sources {
            if dist[s].is_none() {
                dist[s] = Some(0);
                queue.push_back(s);
            }
        }
        while let Some(u) = queue.pop_front() {
            let d = dist[u].expect("queued vertices have a distance");
            for w in self.neighbors(u) {
                if dist[w].is_none() {
                    dist[w] = Some(d + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// Eccentricity of `v`, or the component sizes when disconnected.
    pub fn eccentricity(&self, v: usize) -> Result<usize> {
        let dist = self.distances_from(&[v]);
        if dist.iter().any(Option::is_none) {
            return Err(Error::Disconnected(self.component_sizes()));
        }
        Ok(dist.iter().flatten().copied().max().unwrap_or(0) as usize)
    }

    /// Eccentricity of `m*` (index 0). Equal to the diameter because the
    /// graphs here are vertex-transitive; see [`Self::eccentricities_all_equal`].
    pub fn diameter(&self) -> Result<usize> {
        self.eccentricity(0)
    }

    /// Exhaustive transitivity witness: every vertex has the same eccentricity.
    pub fn eccentricities_all_equal(&self) -> Result<bool> {
        let base = self.eccentricity(0)?;
        for v in 1..self.vertex_count() {
            if self.eccentricity(v)? != base {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn component_sizes(&self) -> Vec<usize> {
        let mut seen = vec![false; self.vertex_count()];
        let mut sizes = Vec::new();
        for s in 0..self.vertex_count() {
            if seen[s] {
                continue;
            }
            let dist = self.distances_from(&[s]);
            let mut size = 0;
            for (v, d) in dist.iter().enumerate() {
                if d.is_some() {
                    seen[v] = true;
                    size += 1;
                }
            }
            sizes.push(size);
        }
        sizes
    }

    /// Vertices whose degree differs from the formula, scanning every
    /// `stride`-th vertex.
    pub fn degree_violations(&self, stride: usize) -> Vec<usize> {
        let want = self.degree_formula();
        (0..self.vertex_count())
            .step_by(stride.max(1))
            .filter(|&v| BigInt::from(self.neighbors(v).len()) != want)
            .collect()
    }

    pub fn edge_count(&self) -> usize {
        (0..self.vertex_count()).map(|v| self.neighbors(v).len()).sum::<usize>() / 2
    }

    pub fn dense_adjacency(&self) -> DMatrix<f64> {
        let n = self.vertex_count();
        let mut a = DMatrix::zeros(n, n);
        for u in 0..n {
            for v in self.neighbors(u) {
                a[(u, v)] = 1.0;
            }
        }
        a
    }

    /// All eigenvalues of the adjacency matrix, descending.
    pub fn dense_spectrum(&self) -> Vec<f64> {
        let a = self.dense_adjacency();
        let sym = (&a + a.transpose()) * 0.5;
        let mut values: Vec<f64> = SymmetricEigen::new(sym).eigenvalues.iter().copied().collect();
        values.sort_by(|x, y| y.total_cmp(x));
        values
    }

    /// Writes one `u v` line per edge with `u < v`.
    pub fn write_edge_list<W: Write>(&self, mut out: W) -> Result<()> {
        for u in 0..self.vertex_count() {
            for v in self.neighbors(u) {
                if u < v {
                    writeln!(out, "{u} {v}")?;
                }
            }
        }
        Ok(())
    }
}

/// All matchings sharing no edge with `m`, in canonical order.
pub(crate) fn disjoint_matchings(m: &PerfectMatching) -> Vec<PerfectMatching> {
    fn rec(avoid: &[u8], partner: &mut [u8], used: &mut [bool], out: &mut Vec<PerfectMatching>) {
        let Some(a) = used.iter().position(|&u| !u) else {
            out.push(PerfectMatching::from_partner_unchecked(partner.to_vec()));
            return;
        };
        used[a] = true;
        for b in a + 1..used.len() {
            if used[b] || avoid[a] as usize == b {
                continue;
            }
            used[b] = true;
            partner[a] = b as u8;
            partner[b] = a as u8;
            rec(avoid, partner, used, out);
            used[b] = false;
        }
        used[a] = false;
    }
    let size = m.vertex_count();
    let mut out = Vec::new();
    rec(m.raw(), &mut vec![0; size], &mut vec![false; size], &mut out);
    out
}

/// The `n(n-1)` matchings obtained by rewiring two edges of `m`.
pub(crate) fn partner_swaps(m: &PerfectMatching) -> Vec<PerfectMatching> {
    let edges: Vec<(usize, usize)> = m.edges().into_iter().map(|(a, b)| (a - 1, b - 1)).collect();
    let mut out = Vec::with_capacity(edges.len() * edges.len());
    for i in 0..edges.len() {
        for j in i + 1..edges.len() {
            let (a, b) = edges[i];
            let (c, d) = edges[j];
            for (x, y, z, w) in [(a, c, b, d), (a, d, b, c)] {
                let mut partner = m.raw().to_vec();
                partner[x] = y as u8;
                partner[y] = x as u8;
                partner[z] = w as u8;
                partner[w] = z as u8;
                out.push(PerfectMatching::from_partner_unchecked(partner));
            }
        }
    }
    out
}

/// Whether the near-perfect matchings of `K_{2n-1}` encoded by `a` and `b`
/// (vertex `2n` marks the unmatched vertex) form a Hamiltonian path.
///
/// The union uses `2n-2` edges on `2n-1` vertices, so it is a Hamiltonian
/// path exactly when it is connected with maximum degree two.
pub(crate) fn is_hamiltonian_path(a: &[u8], b: &[u8]) -> bool {
    let last = a.len() - 1;
    let verts = last;
    let mut degree = vec![0u8; verts];
    let mut parent: Vec<usize> = (0..verts).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let mut components = verts;
    for m in [a, b] {
        for (u, &w) in m.iter().enumerate().take(last) {
            let w = w as usize;
            if w == last || u > w {
                continue;
            }
            degree[u] += 1;
            degree[w] += 1;
            if degree[u] > 2 || degree[w] > 2 {
                return false;
            }
            let (ru, rw) = (find(&mut parent, u), find(&mut parent, w));
            if ru == rw {
                return false;
            }
            parent[ru] = rw;
            components -= 1;
        }
    }
    components == 1
}

/// Outcome of the block decomposition check on the transposition graph.
#[derive(Clone, Debug, Serialize)]
pub struct BlockReport {
    pub n: usize,
    pub block_count: usize,
    pub block_sizes: Vec<usize>,
    pub diagonal_blocks_match_smaller_graph: bool,
    pub off_diagonal_blocks_are_permutations: bool,
    pub witness: Option<String>,
}

impl BlockReport {
    pub fn passed(&self) -> bool {
        self.diagonal_blocks_match_smaller_graph && self.off_diagonal_blocks_are_permutations
    }
}

/// Removes the edge `{j, 2n}` and relabels the remaining vertices in order.
fn reduce(m: &PerfectMatching) -> PerfectMatching {
    let last = m.vertex_count() - 1;
    let j = m.raw()[last] as usize;
    let relabel = |v: usize| if v > j { v - 1 } else { v };
    let mut partner = vec![0u8; last - 1];
    for (v, &w) in m.raw().iter().enumerate() {
        if v == j || v == last {
            continue;
        }
        partner[relabel(v)] = relabel(w as usize) as u8;
    }
    PerfectMatching::from_partner_unchecked(partner)
}

/// Splits `T_n` by the partner of vertex `2n` and checks that each diagonal
/// block is `T_{n-1}` and each off-diagonal block is a permutation matrix.
pub fn block_structure_check(n: usize) -> Result<BlockReport> {
    if !(3..=6).contains(&n) {
        return Err(Error::InvalidArgument(format!("block check supports 3 <= n <= 6, got {n}")));
    }
    let space = MatchingSpace::new(n)?;
    let small = MatchingSpace::new(n - 1)?;
    let graph = MatchingGraph::new(&space, GraphKind::Transposition);
    let small_graph = MatchingGraph::new(&small, GraphKind::Transposition);
    let block_of = |v: usize| space.get(v).raw()[2 * n - 1] as usize;
    let block_count = 2 * n - 1;
    let mut members = vec![Vec::new(); block_count];
    for v in 0..space.len() {
        members[block_of(v)].push(v);
    }
    let mut report = BlockReport {
        n,
        block_count,
        block_sizes: members.iter().map(Vec::len).collect(),
        diagonal_blocks_match_smaller_graph: true,
        off_diagonal_blocks_are_permutations: true,
        witness: None,
    };

    for (b, block) in members.iter().enumerate() {
        let image: Vec<usize> = block.iter().map(|&v| reduce(space.get(v)).rank() as usize).collect();
        let mut hit = vec![false; small.len()];
        for &r in &image {
            hit[r] = true;
        }
        if block.len() != small.len() || !hit.iter().all(|&h| h) {
            report.diagonal_blocks_match_smaller_graph = false;
            report.witness.get_or_insert(format!("block {} is not a bijection onto M_{}", b + 1, 2 * n - 2));
            continue;
        }
        let local: std::collections::HashMap<usize, usize> =
            block.iter().zip(&image).map(|(&v, &r)| (v, r)).collect();
        for (&v, &r) in block.iter().zip(&image) {
            let mut inside: Vec<usize> = graph
                .neighbors(v)
                .into_iter()
                .filter_map(|w| local.get(&w).copied())
                .collect();
            inside.sort_unstable();
            if inside != small_graph.neighbors(r) {
                report.diagonal_blocks_match_smaller_graph = false;
                report
                    .witness
                    .get_or_insert(format!("vertex {} in block {} disagrees with T_{}", space.get(v), b + 1, n - 1));
            }
        }
    }

    // row sums and column sums of each off-diagonal block
    let mut column_hits = vec![vec![0usize; block_count]; space.len()];
    for v in 0..space.len() {
        let mut per_block = vec![0usize; block_count];
        for w in graph.neighbors(v) {
            if block_of(w) != block_of(v) {
                per_block[block_of(w)] += 1;
                column_hits[w][block_of(v)] += 1;
            }
        }
        for (b, &count) in per_block.iter().enumerate() {
            if b != block_of(v) && count != 1 {
                report.off_diagonal_blocks_are_permutations = false;
                report
                    .witness
                    .get_or_insert(format!("vertex {} has {count} neighbours in block {}", space.get(v), b + 1));
            }
        }
    }
    for (w, hits) in column_hits.iter().enumerate() {
        for (b, &count) in hits.iter().enumerate() {
            if b != block_of(w) && count != 1 {
                report.off_diagonal_blocks_are_permutations = false;
                report
                    .witness
                    .get_or_insert(format!("column {} hit {count} times from block {}", space.get(w), b + 1));
            }
        }
    }
    Ok(report)
}

/// Exact check that `v_μ(m) = φ_μ^{d(m*, m)}` satisfies `A v_μ = η_μ v_μ` on
/// the derangement graph. Returns the first failing `μ`, if any.
pub fn eigenfunction_violation(space: &MatchingSpace, table: &SchemeTable) -> Result<Option<Partition>> {
    if table.n() != space.n() {
        return Err(Error::SizeMismatch(format!("table n = {}, space n = {}", table.n(), space.n())));
    }
    let graph = MatchingGraph::new(space, GraphKind::Derangement);
    let star = PerfectMatching::identity(space.n());
    let partitions = enumerate_partitions(space.n());
    let class: Vec<usize> = space
        .iter()
        .map(|m| {
            let ct = Partition::new(cycle_lengths(star.raw(), m.raw()));
            table.index_of(&ct).expect("every cycle type is tabulated")
        })
        .collect();
    // counts[v][λ] = number of neighbours of v in class λ
    let counts: Vec<Vec<u64>> = (0..space.len())
        .map(|v| {
            let mut c = vec![0u64; partitions.len()];
            for w in graph.neighbors(v) {
                c[class[w]] += 1;
            }
            c
        })
        .collect();
    for (mu_idx, mu) in table.partitions().iter().enumerate() {
        let phi = table.phi_row(mu_idx);
        let eta = int_rational(table.etas()[mu_idx].clone());
        for v in 0..space.len() {
            let lhs: Rational = counts[v]
                .iter()
                .zip(phi)
                .map(|(&c, value)| int_rational(c) * value)
                .sum();
            if lhs != &eta * &phi[class[v]] {
                return Ok(Some(mu.clone()));
            }
        }
    }
    Ok(None)
}

/// `H ≅ H'` under the extension bijection: compares neighbourhoods of the
/// Hamiltonian-cycle graph and the near-perfect path graph vertex by vertex.
pub fn extension_bijection_preserves_edges(space: &MatchingSpace) -> bool {
    let cycle = MatchingGraph::new(space, GraphKind::HamiltonianCycle);
    let path = MatchingGraph::new(space, GraphKind::HamiltonianPath);
    (0..space.len()).all(|v| cycle.neighbors(v) == path.neighbors(v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spherical::scheme_table;

    fn space(n: usize) -> MatchingSpace {
        MatchingSpace::new(n).unwrap()
    }

    fn rounded_spectrum(g: &MatchingGraph) -> Vec<i64> {
        g.dense_spectrum().iter().map(|x| x.round() as i64).collect()
    }

    #[test]
    fn degrees_at_n3() {
        let s = space(3);
        assert_eq!(MatchingGraph::new(&s, GraphKind::Transposition).neighbors(0).len(), 6);
        assert_eq!(MatchingGraph::new(&s, GraphKind::Derangement).neighbors(0).len(), 8);
        assert_eq!(MatchingGraph::new(&s, GraphKind::HamiltonianCycle).neighbors(0).len(), 8);
    }

    #[test]
    fn neighbor_generation_matches_pairwise_predicate() {
        for n in 2..=4 {
            let s = space(n);
            for kind in [
                GraphKind::Derangement,
                GraphKind::Transposition,
                GraphKind::HamiltonianCycle,
                GraphKind::HamiltonianPath,
            ] {
                let g = MatchingGraph::new(&s, kind);
                for u in 0..s.len() {
                    let brute: Vec<usize> = (0..s.len()).filter(|&v| v != u && g.is_adjacent(u, v)).collect();
                    assert_eq!(g.neighbors(u), brute, "{kind:?} n={n} u={u}");
                }
            }
        }
    }

    #[test]
    fn degree_formulas_hold() {
        for n in 2..=5 {
            let s = space(n);
            for kind in [
                GraphKind::Derangement,
                GraphKind::Transposition,
                GraphKind::HamiltonianCycle,
                GraphKind::HamiltonianPath,
            ] {
                assert!(MatchingGraph::new(&s, kind).degree_violations(1).is_empty(), "{kind:?} n={n}");
            }
        }
        let s6 = space(6);
        assert!(MatchingGraph::new(&s6, GraphKind::Transposition).degree_violations(97).is_empty());
        assert!(MatchingGraph::new(&s6, GraphKind::Derangement).degree_violations(997).is_empty());
    }

    #[test]
    fn near_perfect_graph() {
        let s2 = space(2);
        assert_eq!(MatchingGraph::near_perfect(&s2).unwrap().vertex_count(), 3);
        let s3 = space(3);
        let g = MatchingGraph::near_perfect(&s3).unwrap();
        assert_eq!(g.vertex_count(), 15);
        assert!(g.degree_violations(1).is_empty());
        assert_eq!(g.degree_formula(), BigInt::from(8));
        let s4 = space(4);
        let g4 = MatchingGraph::near_perfect(&s4).unwrap();
        let min = g4.dense_spectrum().last().copied().unwrap();
        assert!((min + 8.0).abs() < 1e-8, "{min}");
        for n in 2..=4 {
            assert!(extension_bijection_preserves_edges(&space(n)));
        }
        assert!(MatchingGraph::near_perfect(&space(1)).is_err());
    }

    #[test]
    fn transposition_diameters() {
        assert_eq!(MatchingGraph::new(&space(2), GraphKind::Transposition).diameter().unwrap(), 1);
        assert_eq!(MatchingGraph::new(&space(5), GraphKind::Transposition).diameter().unwrap(), 4);
        assert_eq!(MatchingGraph::new(&space(6), GraphKind::Transposition).diameter().unwrap(), 5);
        for n in 2..=4 {
            assert!(MatchingGraph::new(&space(n), GraphKind::Transposition)
                .eccentricities_all_equal()
                .unwrap());
        }
    }

    #[test]
    fn trivial_graphs() {
        let s1 = space(1);
        assert_eq!(MatchingGraph::new(&s1, GraphKind::HamiltonianCycle).diameter().unwrap(), 0);
        assert_eq!(MatchingGraph::near_perfect(&space(2)).unwrap().diameter().unwrap(), 1);
    }

    #[test]
    fn block_structure() {
        let r3 = block_structure_check(3).unwrap();
        assert!(r3.passed(), "{r3:?}");
        assert_eq!(r3.block_sizes, vec![3; 5]);
        let r4 = block_structure_check(4).unwrap();
        assert!(r4.passed());
        assert_eq!(r4.block_sizes, vec![15; 7]);
        assert!(block_structure_check(5).unwrap().off_diagonal_blocks_are_permutations);
        assert!(block_structure_check(2).is_err());
    }

    #[test]
    fn dense_spectra() {
        let s3 = space(3);
        let d3 = rounded_spectrum(&MatchingGraph::new(&s3, GraphKind::Derangement));
        let mut want = vec![8];
        want.extend([2; 5]);
        want.extend([-2; 9]);
        assert_eq!(d3, want);
        let s4 = space(4);
        let d4 = MatchingGraph::new(&s4, GraphKind::Derangement).dense_spectrum();
        assert!((d4.last().unwrap() + 10.0).abs() < 1e-8);
        let t2 = rounded_spectrum(&MatchingGraph::new(&space(2), GraphKind::Transposition));
        assert_eq!(t2, vec![2, -1, -1]);
    }

    #[test]
    fn exact_eigenfunctions() {
        for n in 1..=5 {
            let t = scheme_table(n).unwrap();
            assert_eq!(eigenfunction_violation(&space(n), &t).unwrap(), None, "n = {n}");
        }
    }

    #[test]
    fn edge_list_export() {
        let s = space(2);
        let mut buf = Vec::new();
        MatchingGraph::new(&s, GraphKind::Transposition).write_edge_list(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "0 1\n0 2\n1 2\n");
    }
}

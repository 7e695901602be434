//! Partition sequences of the transposition graph and the McDiarmid
//! neighborhood bound.

use std::collections::{HashMap, VecDeque};

use rand::seq::{index, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::families::{canonical_family, Family};
use crate::graphs::{GraphKind, MatchingGraph};
use crate::matchings::{apply_permutation, MatchingSpace, PerfectMatching, Permutation};
use crate::partitions::enumerate_partitions;

/// Slack granted to the bound in floating comparisons.
pub const BOUND_SLACK: f64 = 1e-12;

/// Largest `n` for partition sequences and McDiarmid verification.
pub const MAX_ISOPERIMETRY_N: usize = 6;

/// Nested vertex partitions `P_0` (one block) through `P_m` (singletons).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartitionSequence {
    /// `levels[i][v]` is the block of matching `v` in `P_i`; blocks are
    /// numbered by first appearance in canonical order.
    pub levels: Vec<Vec<u32>>,
    pub costs: Vec<u32>,
}

impl PartitionSequence {
    pub fn block_count(&self, level: usize) -> usize {
        self.levels[level].iter().max().map_or(0, |&b| b as usize + 1)
    }

    pub fn block_sizes(&self, level: usize) -> Vec<usize> {
        let mut sizes = vec![0; self.block_count(level)];
        for &b in &self.levels[level] {
            sizes[b as usize] += 1;
        }
        sizes
    }

    pub fn cost_square_sum(&self) -> u32 {
        self.costs.iter().map(|c| c * c).sum()
    }
}

/// Partners of the largest unprocessed vertex, repeatedly: the vertex `2n`,
/// then the largest vertex not yet matched by the recorded edges, and so on.
/// 0-based.
fn peel_sequence(m: &PerfectMatching) -> Vec<usize> {
    let size = m.vertex_count();
    let mut done = vec![false; size];
    let mut out = Vec::with_capacity(size / 2);
    for v in (0..size).rev() {
        if done[v] {
            continue;
        }
        let p = m.partner(v + 1) - 1;
        done[v] = true;
        done[p] = true;
        out.push(p);
    }
    out
}

fn check_n(n: usize) -> Result<()> {
    if !(2..=MAX_ISOPERIMETRY_N).contains(&n) {
        return Err(Error::InvalidArgument(format!(
            "isoperimetry supports 2 <= n <= {MAX_ISOPERIMETRY_N}, got {n}"
        )));
    }
    Ok(())
}

/// `P_i` groups matchings by the partners of the first `i` peeled vertices;
/// `n - 1` refinement steps of unit cost.
pub fn nice_partition_sequence(space: &MatchingSpace) -> Result<PartitionSequence> {
    let n = space.n();
    check_n(n)?;
    let peels: Vec<Vec<usize>> = space.iter().map(peel_sequence).collect();
    let levels = (0..n)
        .map(|i| {
            let mut ids: HashMap<&[usize], u32> = HashMap::new();
            peels
                .iter()
                .map(|p| {
                    let next = ids.len() as u32;
                    *ids.entry(&p[..i]).or_insert(next)
                })
                .collect()
        })
        .collect();
    let mut costs = vec![1; n];
    costs[0] = 0;
    Ok(PartitionSequence { levels, costs })
}

#[derive(Clone, Debug, Serialize)]
pub struct SequenceReport {
    pub n: usize,
    pub block_counts: Vec<usize>,
    pub refines: bool,
    pub ends_in_singletons: bool,
    pub sibling_pairs_checked: u64,
    /// Largest `d(x, φ(x))` over every checked sibling bijection, capped at 2.
    pub max_displacement: u32,
    pub costs_respected: bool,
    /// Number of refinement steps equals the diameter and every cost is at most 1.
    pub nice: bool,
    pub passed: bool,
}

/// Verifies refinement and, for every pair of sibling blocks, that the
/// transposition of the two differing partners is a bijection between them
/// moving each matching by at most the level cost.
pub fn verify_partition_sequence(graph: &MatchingGraph<'_>, seq: &PartitionSequence) -> Result<SequenceReport> {
    if graph.kind() != GraphKind::Transposition {
        return Err(Error::InvalidArgument("partition sequences live on the transposition graph".into()));
    }
    let space = graph.space();
    let n = space.n();
    let count = space.len();
    let levels = seq.levels.len();
    let refines = seq.levels[0].iter().all(|&b| b == 0)
        && (1..levels).all(|i| {
            let mut parent: HashMap<u32, u32> = HashMap::new();
            (0..count).all(|v| *parent.entry(seq.levels[i][v]).or_insert(seq.levels[i - 1][v]) == seq.levels[i - 1][v])
        });
    let ends_in_singletons = seq.block_count(levels - 1) == count;
    let peels: Vec<Vec<usize>> = space.iter().map(peel_sequence).collect();
    let mut pairs = 0u64;
    let mut max_displacement = 0u32;
    let mut costs_respected = refines;
    for i in 1..levels {
        // children of one parent differ only in the peeled partner at step i-1
        let mut children: HashMap<u32, Vec<u32>> = HashMap::new();
        let mut members: HashMap<u32, Vec<usize>> = HashMap::new();
        let mut peeled: HashMap<u32, usize> = HashMap::new();
        for v in 0..count {
            let b = seq.levels[i][v];
            let entry = members.entry(b).or_default();
            if entry.is_empty() {
                children.entry(seq.levels[i - 1][v]).or_default().push(b);
                peeled.insert(b, peels[v][i - 1]);
            }
            entry.push(v);
        }
        for siblings in children.values() {
            for (x, &a) in siblings.iter().enumerate() {
                for &b in &siblings[x + 1..] {
                    pairs += 1;
                    let (pa, pb) = (peeled[&a], peeled[&b]);
                    let swap = Permutation::transposition(2 * n, pa + 1, pb + 1);
                    let target = &members[&b];
                    let mut hit = vec![false; target.len()];
                    let position: HashMap<usize, usize> = target.iter().enumerate().map(|(k, &v)| (v, k)).collect();
                    if members[&a].len() != target.len() {
                        costs_respected = false;
                        continue;
                    }
                    for &u in &members[&a] {
                        let image = space.index_of(&apply_permutation(&swap, space.get(u))?);
                        match position.get(&image) {
                            Some(&k) if !hit[k] => hit[k] = true,
                            _ => costs_respected = false,
                        }
                        let d = if image == u {
                            0
                        } else if graph.is_adjacent(u, image) {
                            1
                        } else {
                            2
                        };
                        max_displacement = max_displacement.max(d);
                        if d > seq.costs[i] {
                            costs_respected = false;
                        }
                    }
                }
            }
        }
    }
    let diameter = graph.diameter()?;
    let nice = levels - 1 == diameter && seq.costs.iter().all(|&c| c <= 1);
    Ok(SequenceReport {
        n,
        block_counts: (0..levels).map(|i| seq.block_count(i)).collect(),
        refines,
        ends_in_singletons,
        sibling_pairs_checked: pairs,
        max_displacement,
        costs_respected,
        nice,
        passed: refines && ends_in_singletons && costs_respected && nice,
    })
}

/// Adjacency lists, built once for repeated breadth-first searches.
pub struct Adjacency {
    lists: Vec<Vec<u32>>,
}

impl Adjacency {
    pub fn new(graph: &MatchingGraph<'_>) -> Self {
        Adjacency {
            lists: (0..graph.vertex_count())
                .into_par_iter()
                .map(|v| graph.neighbors(v).into_iter().map(|w| w as u32).collect())
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.lists.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lists.is_empty()
    }

    /// Distance from the nearest source; `u32::MAX` when unreachable.
    pub fn distances(&self, sources: impl IntoIterator<Item = usize>) -> Vec<u32> {
        let mut dist = vec![u32::MAX; self.lists.len()];
        let mut queue = VecDeque::new();
        for s in sources {
            if dist[s] == u32::MAX {
                dist[s] = 0;
                queue.push_back(s);
            }
        }
        while let Some(u) = queue.pop_front() {
            for &w in &self.lists[u] {
                if dist[w as usize] == u32::MAX {
                    dist[w as usize] = dist[u] + 1;
                    queue.push_back(w as usize);
                }
            }
        }
        dist
    }
}

/// `N_h(X)`, the matchings within distance `h` of `X`.
pub fn neighborhood(adjacency: &Adjacency, space: &MatchingSpace, x: &Family, h: u32) -> Result<Family> {
    if x.is_empty() {
        return Err(Error::InvalidArgument("neighborhood of an empty set".into()));
    }
    let dist = adjacency.distances(x.indices());
    Family::from_indices(space, dist.iter().enumerate().filter(|(_, &d)| d <= h).map(|(v, _)| v))
}

/// The value of `Σ c_i^2` fed to the bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CostSum {
    /// `n - 1`, from the constructed sequence.
    Constructed,
    /// `n`, the looser value.
    Loose,
}

impl CostSum {
    pub fn value(self, n: usize) -> f64 {
        match self {
            CostSum::Constructed => (n - 1) as f64,
            CostSum::Loose => n as f64,
        }
    }
}

/// `h_0 = sqrt((Σc^2 / 2) ln(1/a))`.
pub fn mcdiarmid_threshold(a: f64, cost_square_sum: f64) -> Result<f64> {
    if !(a > 0.0 && a < 1.0) {
        return Err(Error::InvalidArgument(format!("a = {a} outside (0, 1)")));
    }
    Ok((cost_square_sum / 2.0 * (1.0 / a).ln()).sqrt())
}

/// `1 - exp(-2(h - h_0)^2 / Σc^2)`, the guaranteed fraction of `N_h(X)`.
pub fn mcdiarmid_lower_bound(a: f64, h: f64, cost_square_sum: f64) -> Result<f64> {
    let h0 = mcdiarmid_threshold(a, cost_square_sum)?;
    if h <= h0 {
        return Err(Error::NotApplicable(format!("h = {h} does not exceed h_0 = {h0}")));
    }
    Ok(1.0 - (-2.0 * (h - h0).powi(2) / cost_square_sum).exp())
}

/// Density grid for random sets.
pub const DENSITY_GRID: [f64; 7] = [0.005, 0.01, 0.02, 0.05, 0.1, 0.25, 0.5];

#[derive(Clone, Debug, Serialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub kind: &'static str,
    pub size: usize,
    pub a: f64,
    pub cost_sum: CostSum,
    pub h: u32,
    pub h0: f64,
    pub observed_fraction: f64,
    pub bound_fraction: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct McDiarmidReport {
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
    pub records: Vec<TrialRecord>,
    pub violations: usize,
    pub passed: bool,
}

/// Sets `X` of kinds cycled by trial index: uniform random at a grid
/// density, canonical families, spheres, and balls.
fn trial_set(space: &MatchingSpace, adjacency: &Adjacency, trial: usize, rng: &mut ChaCha8Rng) -> Result<(&'static str, Family, f64)> {
    let n = space.n();
    let total = space.len();
    let random_vertex = |rng: &mut ChaCha8Rng| rng.gen_range(0..total);
    let (kind, family) = match trial % 4 {
        0 => {
            let a = *DENSITY_GRID.choose(rng).expect("grid is nonempty");
            let size = ((a * total as f64).ceil() as usize).clamp(1, total);
            let picked = index::sample(rng, total, size).into_vec();
            let family = Family::from_indices(space, picked)?;
            // the density is the grid value; |X| >= a N by construction
            return Ok(("random", family, a));
        }
        1 => {
            let i = rng.gen_range(1..=2 * n);
            let mut j = rng.gen_range(1..2 * n);
            if j >= i {
                j += 1;
            }
            ("canonical", canonical_family(space, i.min(j), i.max(j))?)
        }
        2 => {
            let shapes = enumerate_partitions(n);
            let shape = shapes.choose(rng).expect("partitions exist");
            let center = space.get(random_vertex(rng)).clone();
            let members = space.sphere_members(shape, &center)?;
            ("sphere", Family::from_indices(space, members.iter().map(|m| space.index_of(m)))?)
        }
        _ => {
            let center = random_vertex(rng);
            let radius = rng.gen_range(0..n as u32);
            let dist = adjacency.distances([center]);
            (
                "ball",
                Family::from_indices(space, (0..total).filter(|&v| dist[v] <= radius))?,
            )
        }
    };
    let a = family.len() as f64 / total as f64;
    Ok((kind, family, a))
}

fn records_for(
    adjacency: &Adjacency,
    trial: usize,
    kind: &'static str,
    x: &Family,
    a: f64,
    n: usize,
) -> Vec<TrialRecord> {
    let total = adjacency.len() as f64;
    let dist = adjacency.distances(x.indices());
    let mut out = Vec::new();
    for cost_sum in [CostSum::Constructed, CostSum::Loose] {
        let c = cost_sum.value(n);
        if a >= 1.0 || c == 0.0 {
            continue;
        }
        let Ok(h0) = mcdiarmid_threshold(a, c) else {
            continue;
        };
        for h in 1..n as u32 {
            let Ok(bound) = mcdiarmid_lower_bound(a, h as f64, c) else {
                continue;
            };
            let observed = dist.iter().filter(|&&d| d <= h).count() as f64 / total;
            out.push(TrialRecord {
                trial,
                kind,
                size: x.len(),
                a,
                cost_sum,
                h,
                h0,
                observed_fraction: observed,
                bound_fraction: bound,
                pass: observed + BOUND_SLACK >= bound,
            });
        }
    }
    out
}

/// Checks `|N_h(X)| >= (1 - exp(-2(h-h_0)^2/Σc^2)) (2n-1)!!` over `trials`
/// generated sets, every applicable `h <= n-1`, and both cost sums. The
/// whole vertex set is appended as a final trial.
pub fn verify_mcdiarmid(space: &MatchingSpace, trials: usize, seed: u64) -> Result<McDiarmidReport> {
    let n = space.n();
    check_n(n)?;
    let graph = MatchingGraph::new(space, GraphKind::Transposition);
    let adjacency = Adjacency::new(&graph);
    let per_trial = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(trial as u64);
            let (kind, x, a) = trial_set(space, &adjacency, trial, &mut rng)?;
            Ok(records_for(&adjacency, trial, kind, &x, a, n))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut records: Vec<TrialRecord> = per_trial.into_iter().flatten().collect();
    let full = Family::full(space);
    let everything = full.indices();
    let dist = adjacency.distances(everything);
    for h in 1..n.max(2) as u32 {
        records.push(TrialRecord {
            trial: trials,
            kind: "full",
            size: full.len(),
            a: 1.0,
            cost_sum: CostSum::Constructed,
            h,
            h0: 0.0,
            observed_fraction: dist.iter().filter(|&&d| d <= h).count() as f64 / space.len() as f64,
            bound_fraction: 1.0,
            pass: dist.iter().all(|&d| d <= h),
        });
    }
    let violations = records.iter().filter(|r| !r.pass).count();
    Ok(McDiarmidReport {
        n,
        trials,
        seed,
        records,
        violations,
        passed: violations == 0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sequence_shapes() {
        let s2 = MatchingSpace::new(2).unwrap();
        let q2 = nice_partition_sequence(&s2).unwrap();
        assert_eq!(q2.costs, vec![0, 1]);
        assert_eq!(q2.block_sizes(0), vec![3]);
        assert_eq!(q2.block_sizes(1), vec![1, 1, 1]);
        let s3 = MatchingSpace::new(3).unwrap();
        let q3 = nice_partition_sequence(&s3).unwrap();
        assert_eq!(q3.block_sizes(1), vec![3; 5]);
        assert_eq!(q3.block_count(2), 15);
        let s4 = MatchingSpace::new(4).unwrap();
        let q4 = nice_partition_sequence(&s4).unwrap();
        let sizes: Vec<Vec<usize>> = (0..4).map(|i| q4.block_sizes(i)).collect();
        assert_eq!(sizes[1], vec![15; 7]);
        assert_eq!(sizes[2], vec![3; 35]);
        assert_eq!(sizes[3], vec![1; 105]);
        assert_eq!(q4.cost_square_sum(), 3);
        assert!(nice_partition_sequence(&MatchingSpace::new(1).unwrap()).is_err());
    }

    #[test]
    fn sequences_verified() {
        for n in 2..=5 {
            let s = MatchingSpace::new(n).unwrap();
            let g = MatchingGraph::new(&s, GraphKind::Transposition);
            let r = verify_partition_sequence(&g, &nice_partition_sequence(&s).unwrap()).unwrap();
            assert!(r.passed, "{r:?}");
            assert_eq!(r.max_displacement, 1);
        }
    }

    #[test]
    fn broken_sequence_detected() {
        let s = MatchingSpace::new(3).unwrap();
        let g = MatchingGraph::new(&s, GraphKind::Transposition);
        let mut q = nice_partition_sequence(&s).unwrap();
        q.levels[1].swap(0, 14);
        q.levels[2].swap(0, 14);
        assert!(!verify_partition_sequence(&g, &q).unwrap().passed);
    }

    #[test]
    fn neighborhoods() {
        let s = MatchingSpace::new(3).unwrap();
        let g = MatchingGraph::new(&s, GraphKind::Transposition);
        let adj = Adjacency::new(&g);
        let star = Family::from_indices(&s, [0]).unwrap();
        assert_eq!(neighborhood(&adj, &s, &star, 0).unwrap(), star);
        assert_eq!(neighborhood(&adj, &s, &star, 1).unwrap().len(), 7);
        for n in 2..=5 {
            let s = MatchingSpace::new(n).unwrap();
            let adj = Adjacency::new(&MatchingGraph::new(&s, GraphKind::Transposition));
            let x = Family::from_indices(&s, [s.len() / 2]).unwrap();
            let sizes: Vec<usize> = (0..n as u32).map(|h| neighborhood(&adj, &s, &x, h).unwrap().len()).collect();
            assert!(sizes.windows(2).all(|w| w[0] <= w[1]));
            assert_eq!(*sizes.last().unwrap(), s.len());
        }
        assert!(neighborhood(&adj, &s, &Family::empty(&s), 1).is_err());
    }

    #[test]
    fn threshold_examples() {
        let e = std::f64::consts::E;
        assert!((mcdiarmid_threshold(1.0 / e, 8.0).unwrap() - 2.0).abs() < 1e-12);
        for n in [4usize, 6, 10] {
            let c = n as f64;
            let a = 1.0 / c.powi(4);
            let h0 = mcdiarmid_threshold(a, c).unwrap();
            let frac = mcdiarmid_lower_bound(a, 2.0 * h0, c).unwrap();
            assert!((frac - (1.0 - a)).abs() < 1e-12);
        }
        let h0 = mcdiarmid_threshold(0.5, 4.0).unwrap();
        assert!(mcdiarmid_lower_bound(0.5, h0 + 1e-6, 4.0).unwrap() < 1e-9);
        assert!(mcdiarmid_lower_bound(0.5, h0, 4.0).is_err());
        assert!(mcdiarmid_threshold(1.0, 4.0).is_err());
        assert!(mcdiarmid_threshold(0.0, 4.0).is_err());
    }

    #[test]
    fn mcdiarmid_holds() {
        let s = MatchingSpace::new(4).unwrap();
        let r = verify_mcdiarmid(&s, 100, 7).unwrap();
        assert!(r.passed);
        assert!(r.records.iter().any(|x| x.cost_sum == CostSum::Loose));
        assert!(r.records.iter().any(|x| x.kind == "canonical"));
        let again = verify_mcdiarmid(&s, 100, 7).unwrap();
        assert_eq!(serde_json::to_string(&r).unwrap(), serde_json::to_string(&again).unwrap());
    }
}

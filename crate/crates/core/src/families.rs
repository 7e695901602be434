//! Families of perfect matchings, their restrictions, and exact projections
//! onto the even Specht modules.

use std::collections::HashMap;
use std::fmt;

use fixedbitset::FixedBitSet;
use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{int_rational, odd_double_factorial, rational, Rational};
use crate::bounds::{stability_distance_bound, SpectralSummary};
use crate::error::{Error, Result};
use crate::matchings::{apply_permutation, MatchingSpace, PerfectMatching, Permutation};
use crate::partitions::Partition;
use crate::spherical::{SchemeTable, MAX_AVERAGING_N};

/// A set of matchings, stored as a bitset over canonical indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Family {
    n: usize,
    members: FixedBitSet,
}

impl Family {
    pub fn empty(space: &MatchingSpace) -> Self {
        Family {
            n: space.n(),
            members: FixedBitSet::with_capacity(space.len()),
        }
    }

    pub fn full(space: &MatchingSpace) -> Self {
        let mut f = Self::empty(space);
        f.members.insert_range(..);
        f
    }

    pub fn from_indices(space: &MatchingSpace, indices: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut f = Self::empty(space);
        for i in indices {
            if i >= space.len() {
                return Err(Error::InvalidArgument(format!(
                    "index {i} out of range for {} matchings",
                    space.len()
                )));
            }
            f.members.insert(i);
        }
        Ok(f)
    }

    pub fn from_predicate(space: &MatchingSpace, keep: impl Fn(&PerfectMatching) -> bool) -> Self {
        let mut f = Self::empty(space);
        for (i, m) in space.iter().enumerate() {
            if keep(m) {
                f.members.insert(i);
            }
        }
        f
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.members.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_clear()
    }

    pub fn contains(&self, index: usize) -> bool {
        self.members.contains(index)
    }

    pub fn insert(&mut self, index: usize) {
        self.members.insert(index);
    }

    pub fn is_subset(&self, other: &Family) -> bool {
        self.members.is_subset(&other.members)
    }

    /// Member indices in increasing order.
    pub fn indices(&self) -> Vec<usize> {
        self.members.ones().collect()
    }

    pub fn to_strings(&self, space: &MatchingSpace) -> Vec<String> {
        self.members.ones().map(|i| space.get(i).to_string()).collect()
    }

    fn check_space(&self, space: &MatchingSpace) -> Result<()> {
        if self.n != space.n() {
            return Err(Error::SizeMismatch(format!(
                "family over n = {} used with matchings over n = {}",
                self.n,
                space.n()
            )));
        }
        Ok(())
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let idx: Vec<String> = self.members.ones().map(|i| i.to_string()).collect();
        write!(f, "{{{}}}", idx.join(","))
    }
}

fn check_edge(n: usize, i: usize, j: usize) -> Result<()> {
    if i == j || i == 0 || j == 0 || i > 2 * n || j > 2 * n {
        return Err(Error::InvalidArgument(format!(
            "{{{i},{j}}} is not an edge of K_{}",
            2 * n
        )));
    }
    Ok(())
}

/// `F_ij`: every matching containing the edge `{i, j}` (1-based).
pub fn canonical_family(space: &MatchingSpace, i: usize, j: usize) -> Result<Family> {
    check_edge(space.n(), i, j)?;
    Ok(Family::from_predicate(space, |m| m.contains_edge(i, j)))
}

/// The near-extremal family `H_12`: members of `F_12` meeting `(1 3)m*`,
/// together with `(1 3)m*` and `(1 4)m*`.
pub fn h_family(space: &MatchingSpace) -> Result<Family> {
    let n = space.n();
    if n < 3 {
        return Err(Error::InvalidArgument(format!("H_12 needs n >= 3, got {n}")));
    }
    let star = PerfectMatching::identity(n);
    let t13 = apply_permutation(&Permutation::transposition(2 * n, 1, 3), &star)?;
    let t14 = apply_permutation(&Permutation::transposition(2 * n, 1, 4), &star)?;
    let mut f = Family::from_predicate(space, |m| m.contains_edge(1, 2) && m.common_edges(&t13) > 0);
    f.insert(space.index_of(&t13));
    f.insert(space.index_of(&t14));
    Ok(f)
}

fn shares_edge(a: &[u8], b: &[u8]) -> bool {
    a.iter().zip(b).any(|(x, y)| x == y)
}

fn shared_edges(a: &[u8], b: &[u8]) -> usize {
    a.iter()
        .zip(b)
        .enumerate()
        .filter(|&(v, (&x, &y))| x == y && v < x as usize)
        .count()
}

pub fn is_intersecting(space: &MatchingSpace, family: &Family) -> Result<bool> {
    is_t_intersecting(space, family, 1)
}

/// Every pair of distinct members shares at least `t` edges.
pub fn is_t_intersecting(space: &MatchingSpace, family: &Family, t: usize) -> Result<bool> {
    family.check_space(space)?;
    let members: Vec<&[u8]> = family.members.ones().map(|i| space.get(i).raw()).collect();
    Ok(members
        .par_iter()
        .enumerate()
        .all(|(k, a)| members[k + 1..].iter().all(|b| shared_edges(a, b) >= t)))
}

/// Number of unordered member pairs sharing no edge: the derangement-graph
/// edges inside the family.
pub fn inner_edge_count(space: &MatchingSpace, family: &Family) -> Result<u64> {
    family.check_space(space)?;
    let members: Vec<&[u8]> = family.members.ones().map(|i| space.get(i).raw()).collect();
    Ok(members
        .par_iter()
        .enumerate()
        .map(|(k, a)| members[k + 1..].iter().filter(|b| !shares_edge(a, b)).count() as u64)
        .sum())
}

/// `F↓_ij`, the members containing `{i, j}`.
pub fn restriction(space: &MatchingSpace, family: &Family, i: usize, j: usize) -> Result<Family> {
    family.check_space(space)?;
    check_edge(space.n(), i, j)?;
    let mut out = Family::empty(space);
    for idx in family.members.ones() {
        if space.get(idx).contains_edge(i, j) {
            out.insert(idx);
        }
    }
    Ok(out)
}

/// `|F↓_ij|` for all vertex pairs, 0-based and symmetric with zero diagonal.
pub fn restriction_sizes(space: &MatchingSpace, family: &Family) -> Result<Vec<Vec<u64>>> {
    family.check_space(space)?;
    let size = 2 * space.n();
    let mut counts = vec![vec![0u64; size]; size];
    for idx in family.members.ones() {
        for (v, &w) in space.get(idx).raw().iter().enumerate() {
            counts[v][w as usize] += 1;
        }
    }
    Ok(counts)
}

#[derive(Clone, Debug, Serialize)]
pub struct RestrictionReport {
    pub n: usize,
    /// `((2n-5)!!)^2`
    pub bound: String,
    pub max_product: String,
    /// 1-based `(i, j, k)` attaining the maximum.
    pub witness: (usize, usize, usize),
    pub passed: bool,
}

/// `|F↓_ij| |F↓_ik| <= ((2n-5)!!)^2` over all `i` and `j != k`, for an
/// intersecting family.
pub fn restriction_product_check(space: &MatchingSpace, family: &Family) -> Result<RestrictionReport> {
    let n = space.n();
    if n < 3 {
        return Err(Error::InvalidArgument(format!("restriction products need n >= 3, got {n}")));
    }
    if !is_intersecting(space, family)? {
        return Err(Error::InvalidArgument("family is not intersecting".into()));
    }
    let counts = restriction_sizes(space, family)?;
    let size = 2 * n;
    let mut best = (0u64, (1, 2, 3));
    for i in 0..size {
        for j in 0..size {
            for k in j + 1..size {
                if i == j || i == k {
                    continue;
                }
                let p = counts[i][j] * counts[i][k];
                if p > best.0 {
                    best = (p, (i + 1, j + 1, k + 1));
                }
            }
        }
    }
    let scale = odd_double_factorial(n - 2);
    let bound = &scale * &scale;
    Ok(RestrictionReport {
        n,
        max_product: best.0.to_string(),
        passed: BigInt::from(best.0) <= bound,
        bound: bound.to_string(),
        witness: best.1,
    })
}

/// Which canonical family, if any, contains `F`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Containment {
    /// 1-based edge common to every member.
    pub edge: Option<(usize, usize)>,
    pub empty: bool,
}

pub fn containment_check(space: &MatchingSpace, family: &Family) -> Result<Containment> {
    family.check_space(space)?;
    let mut members = family.members.ones();
    let Some(first) = members.next() else {
        return Ok(Containment { edge: None, empty: true });
    };
    let mut common: Vec<(usize, usize)> = space.get(first).edges();
    for idx in members {
        let m = space.get(idx);
        common.retain(|&(i, j)| m.contains_edge(i, j));
        if common.is_empty() {
            break;
        }
    }
    Ok(Containment {
        edge: common.first().copied(),
        empty: false,
    })
}

/// Each member independently with probability `p`.
pub fn random_family<R: Rng>(space: &MatchingSpace, rng: &mut R, p: f64) -> Family {
    let mut f = Family::empty(space);
    for i in 0..space.len() {
        if rng.gen_bool(p) {
            f.insert(i);
        }
    }
    f
}

/// A maximal intersecting family built greedily in a random order.
pub fn greedy_maximal_intersecting<R: Rng>(space: &MatchingSpace, rng: &mut R) -> Family {
    let mut order: Vec<usize> = (0..space.len()).collect();
    order.shuffle(rng);
    let mut chosen: Vec<usize> = Vec::new();
    for i in order {
        let a = space.get(i).raw();
        if chosen.iter().all(|&j| shares_edge(a, space.get(j).raw())) {
            chosen.push(i);
        }
    }
    let mut f = Family::empty(space);
    for i in chosen {
        f.insert(i);
    }
    f
}

/// Exact projections of functions on matchings onto the modules `S^{2μ}`.
///
/// `[E_μ g](m) = (f^{2μ}/(2n-1)!!) Σ_{m'} g(m') φ_μ^{d(m,m')}`.
pub struct Projector<'a> {
    space: &'a MatchingSpace,
    table: &'a SchemeTable,
    class_index: HashMap<u64, usize>,
}

fn class_key_of_parts(parts: &[usize]) -> u64 {
    parts.iter().fold(0u64, |key, &p| key + (1u64 << (4 * (p - 1))))
}

/// Packs the cycle-type histogram of `a ∪ b`, four bits per part size.
fn class_key(a: &[u8], b: &[u8]) -> u64 {
    let mut seen = 0u32;
    let mut key = 0u64;
    for start in 0..a.len() {
        if seen & (1 << start) != 0 {
            continue;
        }
        let mut x = start;
        let mut len = 0;
        loop {
            let y = a[x] as usize;
            seen |= (1 << x) | (1 << y);
            len += 1;
            x = b[y] as usize;
            if x == start {
                break;
            }
        }
        key += 1u64 << (4 * (len - 1));
    }
    key
}

impl<'a> Projector<'a> {
    pub fn new(space: &'a MatchingSpace, table: &'a SchemeTable) -> Result<Self> {
        if space.n() != table.n() {
            return Err(Error::SizeMismatch(format!(
                "matchings over n = {} with a scheme table for n = {}",
                space.n(),
                table.n()
            )));
        }
        if space.n() > MAX_AVERAGING_N {
            return Err(Error::InvalidArgument(format!(
                "projections supported for n <= {MAX_AVERAGING_N}"
            )));
        }
        let class_index = table
            .partitions()
            .iter()
            .enumerate()
            .map(|(i, p)| (class_key_of_parts(p.parts()), i))
            .collect();
        Ok(Projector {
            space,
            table,
            class_index,
        })
    }

    pub fn space(&self) -> &MatchingSpace {
        self.space
    }

    fn mu_index(&self, mu: &Partition) -> Result<usize> {
        self.table
            .index_of(mu)
            .ok_or_else(|| Error::SizeMismatch(format!("{mu} is not a partition of {}", self.table.n())))
    }

    /// `|{m' ∈ F : d(m, m') = λ}|` for every `λ`.
    pub fn class_counts(&self, family: &Family, m: usize) -> Result<Vec<u64>> {
        family.check_space(self.space)?;
        let a = self.space.get(m).raw();
        let mut counts = vec![0u64; self.table.partitions().len()];
        for idx in family.members.ones() {
            counts[self.class_index[&class_key(a, self.space.get(idx).raw())]] += 1;
        }
        Ok(counts)
    }

    /// `(f^{2μ}/(2n-1)!!) φ_μ^λ` summed over the given `μ`, one entry per `λ`.
    fn weights(&self, mus: &[Partition]) -> Result<Vec<Rational>> {
        let total = odd_double_factorial(self.space.n());
        let mut w = vec![Rational::zero(); self.table.partitions().len()];
        for mu in mus {
            let scale = rational(self.table.multiplicity(mu), total.clone());
            for (slot, phi) in w.iter_mut().zip(self.table.phi_row(self.mu_index(mu)?)) {
                *slot += &scale * phi;
            }
        }
        Ok(w)
    }

    fn apply_weights(w: &[Rational], counts: &[u64]) -> Rational {
        counts
            .iter()
            .zip(w)
            .filter(|(c, _)| **c > 0)
            .map(|(c, x)| int_rational(*c) * x)
            .sum()
    }

    /// `[E_μ 1_F](m)`.
    pub fn project(&self, family: &Family, mu: &Partition, m: usize) -> Result<Rational> {
        let w = self.weights(std::slice::from_ref(mu))?;
        Ok(Self::apply_weights(&w, &self.class_counts(family, m)?))
    }

    /// `P_m = [E_(n) 1_F + E_(n-1,1) 1_F](m)` for every matching.
    pub fn u_projection_all(&self, family: &Family) -> Result<Vec<Rational>> {
        let w = self.weights(&self.u_shapes()?)?;
        (0..self.space.len())
            .into_par_iter()
            .map(|m| Ok(Self::apply_weights(&w, &self.class_counts(family, m)?)))
            .collect()
    }

    fn u_shapes(&self) -> Result<Vec<Partition>> {
        let n = self.space.n();
        Ok(vec![Partition::row(n), Partition::hook_n_minus_one(n)?])
    }

    /// `E_μ g` for an arbitrary function `g`, by the full double sum.
    pub fn project_function(&self, values: &[Rational], mu: &Partition) -> Result<Vec<Rational>> {
        if values.len() != self.space.len() {
            return Err(Error::SizeMismatch(format!(
                "{} values for {} matchings",
                values.len(),
                self.space.len()
            )));
        }
        let w = self.weights(std::slice::from_ref(mu))?;
        let items = self.space.items();
        Ok(items
            .par_iter()
            .map(|m| {
                items
                    .iter()
                    .zip(values)
                    .filter(|(_, v)| !v.is_zero())
                    .map(|(other, v)| v * &w[self.class_index[&class_key(m.raw(), other.raw())]])
                    .sum()
            })
            .collect())
    }

    /// `⟨E_μ 1_F, E_μ 1_F⟩ = (1/(2n-1)!!) Σ_{m ∈ F} [E_μ 1_F](m)`.
    pub fn projection_norm_sq(&self, family: &Family, mu: &Partition) -> Result<Rational> {
        self.members_sum(family, std::slice::from_ref(mu))
    }

    fn members_sum(&self, family: &Family, mus: &[Partition]) -> Result<Rational> {
        let w = self.weights(mus)?;
        let total: Rational = family
            .indices()
            .par_iter()
            .map(|&m| Ok(Self::apply_weights(&w, &self.class_counts(family, m)?)))
            .collect::<Result<Vec<Rational>>>()?
            .into_iter()
            .sum();
        Ok(total / int_rational(odd_double_factorial(self.space.n())))
    }

    /// `‖1_F - P_U 1_F‖^2` with `U = S^{2(n)} ⊕ S^{2(n-1,1)}`, normalized.
    pub fn distance_to_u(&self, family: &Family) -> Result<Rational> {
        let alpha = rational(family.len(), odd_double_factorial(self.space.n()));
        Ok(alpha - self.members_sum(family, &self.u_shapes()?)?)
    }

    /// The same distance summed over every matching from `P_m`.
    pub fn distance_to_u_pointwise(&self, family: &Family) -> Result<Rational> {
        let p = self.u_projection_all(family)?;
        Ok(distance_from_pointwise(family, &p))
    }
}

fn distance_from_pointwise(family: &Family, p: &[Rational]) -> Rational {
    let one = Rational::one();
    let total: Rational = p
        .iter()
        .enumerate()
        .map(|(m, pm)| {
            let r = if family.contains(m) { &one - pm } else { pm.clone() };
            &r * &r
        })
        .sum();
    total / int_rational(p.len())
}

/// `[E_μ 1_F](m)` for one matching.
pub fn project(
    space: &MatchingSpace,
    table: &SchemeTable,
    family: &Family,
    mu: &Partition,
    m: &PerfectMatching,
) -> Result<Rational> {
    Projector::new(space, table)?.project(family, mu, space.index_of(m))
}

/// `a Σ_{ij ∈ m} |F↓_ij| + b |F|` with
/// `a = 1/(2(n-1)(2n-5)!!)` and `b = -n/(2(n-1)(2n-1)(2n-5)!!)`.
pub fn project_restriction_form(space: &MatchingSpace, family: &Family, m: &PerfectMatching) -> Result<Rational> {
    let n = space.n();
    if n < 3 {
        return Err(Error::InvalidArgument(format!("restriction form needs n >= 3, got {n}")));
    }
    family.check_space(space)?;
    let restricted: u64 = family
        .members
        .ones()
        .map(|idx| shared_edges(m.raw(), space.get(idx).raw()) as u64)
        .sum();
    let (a, b) = restriction_form_constants(n);
    Ok(a * int_rational(restricted) + b * int_rational(family.len()))
}

pub fn restriction_form_constants(n: usize) -> (Rational, Rational) {
    let base = BigInt::from(2 * (n - 1)) * odd_double_factorial(n - 2);
    let a = rational(1, base.clone());
    let b = rational(-(n as i64), base * (2 * n - 1));
    (a, b)
}

/// Parameters of the stability diagnostics; `None` picks the default.
#[derive(Clone, Debug, Default)]
pub struct KeyLemmaParams {
    pub delta: Option<Rational>,
    pub c: Option<Rational>,
}

#[derive(Clone, Debug, Serialize)]
pub struct KeyLemmaReport {
    pub n: usize,
    pub size: usize,
    /// 1-based edge maximizing `|F↓_ij|`, lexicographically first on ties.
    pub edge: (usize, usize),
    pub max_restriction: u64,
    /// `|F \ F↓_ij|`
    pub residue: u64,
    /// `(2n-5)!!`, the scale of the residue bound.
    pub residue_scale: String,
    pub alpha: String,
    pub inner_edges: u64,
    pub distance_sq: String,
    /// `None` when the spectral gap vanishes.
    pub stability_bound: Option<String>,
    pub within_bound: Option<bool>,
    pub delta: String,
    pub c: String,
    pub f1_size: usize,
    pub f0_size: usize,
}

/// Best edge, residue, and the stability-chain diagnostics of `F`.
pub fn key_lemma_scan(projector: &Projector<'_>, family: &Family, params: &KeyLemmaParams) -> Result<KeyLemmaReport> {
    let space = projector.space;
    let n = space.n();
    if family.is_empty() {
        return Err(Error::InvalidArgument("key-lemma scan of an empty family".into()));
    }
    if n < 3 {
        return Err(Error::InvalidArgument(format!("key-lemma scan needs n >= 3, got {n}")));
    }
    if !is_intersecting(space, family)? {
        return Err(Error::InvalidArgument("family is not intersecting".into()));
    }
    let counts = restriction_sizes(space, family)?;
    let mut edge = (1, 2);
    let mut max_restriction = 0;
    for i in 0..2 * n {
        for j in i + 1..2 * n {
            if counts[i][j] > max_restriction {
                max_restriction = counts[i][j];
                edge = (i + 1, j + 1);
            }
        }
    }
    let total = odd_double_factorial(n);
    let alpha = rational(family.len(), total.clone());
    let inner_edges = inner_edge_count(space, family)?;
    let p = projector.u_projection_all(family)?;
    let distance_sq = distance_from_pointwise(family, &p);
    let summary = SpectralSummary::from_scheme(projector.table)?;
    let stability = match stability_distance_bound(&summary, &alpha, inner_edges) {
        Ok(b) => Some(b),
        Err(Error::NotApplicable(_)) => None,
        Err(e) => return Err(e),
    };
    let one = Rational::one();
    let delta = params
        .delta
        .clone()
        .unwrap_or_else(|| &one - rational(family.len(), odd_double_factorial(n - 1)));
    let c = params.c.clone().unwrap_or_else(|| int_rational(10));
    let f1_threshold = &delta * (&one + &c / int_rational(n));
    let f0_threshold = int_rational(2) * &delta / int_rational(2 * n - 1);
    let mut f1_size = 0;
    let mut f0_size = 0;
    for (m, pm) in p.iter().enumerate() {
        if family.contains(m) {
            let r = &one - pm;
            if &r * &r < f1_threshold {
                f1_size += 1;
            }
        } else if pm * pm < f0_threshold {
            f0_size += 1;
        }
    }
    Ok(KeyLemmaReport {
        n,
        size: family.len(),
        edge,
        max_restriction,
        residue: family.len() as u64 - max_restriction,
        residue_scale: odd_double_factorial(n - 2).to_string(),
        alpha: alpha.to_string(),
        inner_edges,
        within_bound: stability.as_ref().map(|b| distance_sq <= *b),
        distance_sq: distance_sq.to_string(),
        stability_bound: stability.map(|b| b.to_string()),
        delta: delta.to_string(),
        c: c.to_string(),
        f1_size,
        f0_size,
    })
}

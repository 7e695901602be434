//! Perfect matchings of `K_2n`, the `S_2n` action on them, and the cycle-type
//! distance between two matchings.
//!
//! Vertices are labelled `1..=2n` at every public boundary. Internally the
//! partner array is stored 0-based.
//!
//! # Canonical order
//!
//! The lowest unmatched vertex is matched to each larger unmatched vertex in
//! increasing order, recursively. The choice made at step `k` is a digit
//! `d_k ∈ [0, 2(n-k)+1)`, and the index of a matching is the mixed-radix
//! number `Σ d_k (2(n-k)-1)!!`. This makes rank and unrank `O(n^2)` without
//! materializing anything, so families can be stored as bitsets over indices.
//!
//! [`MatchingSpace`] materializes the whole list (useful up to `n = 8`,
//! 2,027,025 matchings); [`MatchingIter`] streams by unranking.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::arith::{binomial, even_double_factorial, odd_double_factorial};
use crate::error::{Error, Result};
use crate::partitions::Partition;

/// Largest `n` for which ranks fit comfortably in a `u64`.
pub const MAX_RANK_N: usize = 16;

/// A fixed-point-free involution on `2n` vertices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PerfectMatching {
    partner: Vec<u8>,
}

impl PerfectMatching {
    /// `m* = {1,2},{3,4},...,{2n-1,2n}`.
    pub fn identity(n: usize) -> Self {
        let partner = (0..2 * n).map(|v| (v ^ 1) as u8).collect();
        PerfectMatching { partner }
    }

    /// Builds a matching from 1-based edges on `2n = 2 * edges.len()` vertices.
    pub fn from_edges(edges: &[(usize, usize)]) -> Result<Self> {
        let size = 2 * edges.len();
        let mut partner = vec![u8::MAX; size];
        for &(a, b) in edges {
            if a == 0 || b == 0 || a > size || b > size || a == b {
                return Err(Error::InvalidArgument(format!(
                    "edge {a}-{b} is not valid on {size} vertices"
                )));
            }
            let (a, b) = (a - 1, b - 1);
            if partner[a] != u8::MAX || partner[b] != u8::MAX {
                return Err(Error::InvalidArgument(format!(
                    "vertex repeated in edge {}-{}",
                    a + 1,
                    b + 1
                )));
            }
            partner[a] = b as u8;
            partner[b] = a as u8;
        }
        Ok(PerfectMatching { partner })
    }

    pub(crate) fn from_partner_unchecked(partner: Vec<u8>) -> Self {
        debug_assert!(Self::is_involution(&partner));
        PerfectMatching { partner }
    }

    fn is_involution(partner: &[u8]) -> bool {
        partner
            .iter()
            .enumerate()
            .all(|(v, &p)| (p as usize) < partner.len() && p as usize != v && partner[p as usize] as usize == v)
    }

    pub fn is_valid(&self) -> bool {
        self.partner.len().is_multiple_of(2) && Self::is_involution(&self.partner)
    }

    /// Number of edges.
    pub fn n(&self) -> usize {
        self.partner.len() / 2
    }

    pub fn vertex_count(&self) -> usize {
        self.partner.len()
    }

    /// Partner of the 1-based vertex `v`, 1-based.
    pub fn partner(&self, v: usize) -> usize {
        self.partner[v - 1] as usize + 1
    }

    pub(crate) fn raw(&self) -> &[u8] {
        &self.partner
    }

    /// Canonical 1-based edge list: `(v, partner(v))` with `v < partner(v)`,
    /// sorted by `v`.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.partner
            .iter()
            .enumerate()
            .filter(|&(v, &p)| v < p as usize)
            .map(|(v, &p)| (v + 1, p as usize + 1))
            .collect()
    }

    pub fn contains_edge(&self, i: usize, j: usize) -> bool {
        i != j && i >= 1 && i <= self.partner.len() && self.partner(i) == j
    }

    /// Number of edges shared with `other`.
    pub fn common_edges(&self, other: &PerfectMatching) -> usize {
        self.partner
            .iter()
            .zip(&other.partner)
            .enumerate()
            .filter(|&(v, (&a, &b))| a == b && v < a as usize)
            .count()
    }

    /// Index in the canonical order.
    pub fn rank(&self) -> u64 {
        let n = self.n();
        let mut remaining: Vec<u8> = (0..2 * n as u8).collect();
        let mut rank = 0u64;
        for k in 1..=n {
            let a = remaining[0];
            let b = self.partner[a as usize];
            let pos = remaining.iter().position(|&x| x == b).expect("partner present");
            rank += (pos as u64 - 1) * odd_double_factorial_u64(n - k);
            remaining.remove(pos);
            remaining.remove(0);
        }
        rank
    }

    /// Inverse of [`PerfectMatching::rank`].
    pub fn unrank(n: usize, mut index: u64) -> Result<Self> {
        if n > MAX_RANK_N {
            return Err(Error::InvalidArgument(format!("n = {n} exceeds {MAX_RANK_N}")));
        }
        let total = odd_double_factorial_u64(n);
        if index >= total {
            return Err(Error::InvalidArgument(format!(
                "index {index} out of range for {total} matchings"
            )));
        }
        let mut remaining: Vec<u8> = (0..2 * n as u8).collect();
        let mut partner = vec![0u8; 2 * n];
        for k in 1..=n {
            let weight = odd_double_factorial_u64(n - k);
            let digit = (index / weight) as usize;
            index %= weight;
            let a = remaining[0];
            let b = remaining[1 + digit];
            partner[a as usize] = b;
            partner[b as usize] = a;
            remaining.remove(1 + digit);
            remaining.remove(0);
        }
        Ok(PerfectMatching { partner })
    }
}

impl fmt::Display for PerfectMatching {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, (a, b)) in self.edges().into_iter().enumerate() {
            if k > 0 {
                write!(f, "|")?;
            }
            write!(f, "{a}-{b}")?;
        }
        Ok(())
    }
}

impl FromStr for PerfectMatching {
    type Err = Error;

    /// Parses `1-2|3-4|5-6` with edges and endpoints in any order.
    fn from_str(s: &str) -> Result<Self> {
        let edges = s
            .split('|')
            .map(|e| {
                let (a, b) = e
                    .split_once('-')
                    .ok_or_else(|| Error::Parse(format!("edge {e:?} lacks '-'")))?;
                let parse = |t: &str| {
                    t.trim()
                        .parse::<usize>()
                        .map_err(|err| Error::Parse(format!("edge {e:?}: {err}")))
                };
                Ok((parse(a)?, parse(b)?))
            })
            .collect::<Result<Vec<_>>>()?;
        PerfectMatching::from_edges(&edges)
    }
}

/// `(2n-1)!!` as a machine integer, for `n <= MAX_RANK_N`.
pub fn odd_double_factorial_u64(n: usize) -> u64 {
    (1..=n as u64).map(|k| 2 * k - 1).product()
}

/// A bijection of `{1..size}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Permutation {
    image: Vec<u8>,
}

impl Permutation {
    pub fn identity(size: usize) -> Self {
        Permutation {
            image: (0..size as u8).collect(),
        }
    }

    /// From 1-based images: `images[v-1] = σ(v)`.
    pub fn from_images(images: &[usize]) -> Result<Self> {
        let size = images.len();
        let mut seen = vec![false; size];
        for &x in images {
            if x == 0 || x > size || seen[x - 1] {
                return Err(Error::InvalidArgument(format!(
                    "{images:?} is not a permutation"
                )));
            }
            seen[x - 1] = true;
        }
        Ok(Permutation {
            image: images.iter().map(|&x| (x - 1) as u8).collect(),
        })
    }

    pub(crate) fn from_raw(image: Vec<u8>) -> Self {
        Permutation { image }
    }

    /// The transposition exchanging 1-based `a` and `b`.
    pub fn transposition(size: usize, a: usize, b: usize) -> Self {
        let mut p = Permutation::identity(size);
        p.image.swap(a - 1, b - 1);
        p
    }

    pub fn size(&self) -> usize {
        self.image.len()
    }

    /// `σ(v)` for 1-based `v`.
    pub fn apply(&self, v: usize) -> usize {
        self.image[v - 1] as usize + 1
    }

    pub(crate) fn raw(&self) -> &[u8] {
        &self.image
    }

    /// `self ∘ other`: first `other`, then `self`.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        Permutation {
            image: other.image.iter().map(|&x| self.image[x as usize]).collect(),
        }
    }

    pub fn inverse(&self) -> Permutation {
        let mut image = vec![0u8; self.image.len()];
        for (v, &x) in self.image.iter().enumerate() {
            image[x as usize] = v as u8;
        }
        Permutation { image }
    }

    /// Cycle type as a partition of `size`.
    pub fn cycle_type(&self) -> Partition {
        Partition::new(permutation_cycle_lengths(&self.image))
    }
}

pub(crate) fn permutation_cycle_lengths(image: &[u8]) -> Vec<usize> {
    let mut seen = vec![false; image.len()];
    let mut lengths = Vec::new();
    for start in 0..image.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut x = start;
        while !seen[x] {
            seen[x] = true;
            x = image[x] as usize;
            len += 1;
        }
        lengths.push(len);
    }
    lengths
}

/// `σm`: the matching with edges `{σ(u), σ(v)}` for each edge `{u, v}` of `m`.
pub fn apply_permutation(sigma: &Permutation, m: &PerfectMatching) -> Result<PerfectMatching> {
    if sigma.size() != m.vertex_count() {
        return Err(Error::SizeMismatch(format!(
            "permutation on {} points, matching on {} vertices",
            sigma.size(),
            m.vertex_count()
        )));
    }
    let mut partner = vec![0u8; m.vertex_count()];
    for (u, &v) in m.partner.iter().enumerate() {
        partner[sigma.image[u] as usize] = sigma.image[v as usize];
    }
    Ok(PerfectMatching { partner })
}

/// Half the cycle lengths of the multigraph `m ∪ m'`, unsorted, in order of
/// the lowest vertex of each cycle. A shared edge contributes a part of 1.
pub(crate) fn cycle_lengths(a: &[u8], b: &[u8]) -> Vec<usize> {
    let mut seen = vec![false; a.len()];
    let mut lengths = Vec::new();
    for start in 0..a.len() {
        if seen[start] {
            continue;
        }
        let mut x = start;
        let mut len = 0;
        loop {
            let y = a[x] as usize;
            seen[x] = true;
            seen[y] = true;
            len += 1;
            x = b[y] as usize;
            if x == start {
                break;
            }
        }
        lengths.push(len);
    }
    lengths
}

/// Number of shared edges, i.e. parts equal to one in the cycle type,
/// without building the partition.
pub(crate) fn fixed_points_raw(a: &[u8], b: &[u8]) -> usize {
    a.iter()
        .zip(b)
        .enumerate()
        .filter(|&(v, (&x, &y))| x == y && v < x as usize)
        .count()
}

/// The cycle type `d(m, m')`, a partition of `n`.
pub fn cycle_type(m: &PerfectMatching, other: &PerfectMatching) -> Result<Partition> {
    if m.vertex_count() != other.vertex_count() {
        return Err(Error::SizeMismatch(format!(
            "matchings on {} and {} vertices",
            m.vertex_count(),
            other.vertex_count()
        )));
    }
    Ok(Partition::new(cycle_lengths(&m.partner, &other.partner)))
}

/// `D_2n` by `D_2n = 2(n-1)(D_{2(n-1)} + D_{2(n-2)})`, `D_0 = 1`, `D_2 = 0`.
pub fn derangement_count_recurrence(n: usize) -> BigInt {
    let (mut prev, mut cur) = (BigInt::one(), BigInt::zero());
    if n == 0 {
        return prev;
    }
    for k in 2..=n {
        let next = BigInt::from(2 * (k - 1)) * (&cur + &prev);
        prev = cur;
        cur = next;
    }
    cur
}

/// `D_2n = Σ_k (-1)^k C(n,k) (2(n-k)-1)!!` by inclusion-exclusion over
/// edges of `m*`.
pub fn derangement_count_sieve(n: usize) -> BigInt {
    (0..=n)
        .map(|k| {
            let term = binomial(n, k) * odd_double_factorial(n - k);
            if k % 2 == 0 {
                term
            } else {
                -term
            }
        })
        .sum()
}

/// `|Ω_λ| = 2^n n! / (2^{l(λ)} z_λ)`.
pub fn sphere_size(lambda: &Partition) -> Result<BigInt> {
    let n = lambda.size();
    let den = BigInt::from(2).pow(lambda.len() as u32) * lambda.z_factor();
    let (q, r) = even_double_factorial(n).div_rem(&den);
    if !r.is_zero() {
        return Err(Error::Internal(format!(
            "sphere size for {lambda} is not integral"
        )));
    }
    Ok(q)
}

/// Every perfect matching of `K_2n` in canonical order, materialized.
#[derive(Clone, Debug)]
pub struct MatchingSpace {
    n: usize,
    items: Vec<PerfectMatching>,
}

/// Largest `n` that [`MatchingSpace`] will materialize.
pub const MAX_MATERIALIZED_N: usize = 8;

impl MatchingSpace {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 || n > MAX_MATERIALIZED_N {
            return Err(Error::InvalidArgument(format!(
                "matching space supports 1 <= n <= {MAX_MATERIALIZED_N}, got {n}"
            )));
        }
        let mut items = Vec::with_capacity(odd_double_factorial_u64(n) as usize);
        let mut partner = vec![0u8; 2 * n];
        let mut used = vec![false; 2 * n];
        fill(&mut partner, &mut used, &mut items);
        Ok(MatchingSpace { n, items })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn get(&self, index: usize) -> &PerfectMatching {
        &self.items[index]
    }

    pub fn items(&self) -> &[PerfectMatching] {
        &self.items
    }

    pub fn index_of(&self, m: &PerfectMatching) -> usize {
        m.rank() as usize
    }

    pub fn iter(&self) -> impl Iterator<Item = &PerfectMatching> {
        self.items.iter()
    }

    /// All `m` with `d(m0, m) = λ`.
    pub fn sphere_members(&self, lambda: &Partition, m0: &PerfectMatching) -> Result<Vec<PerfectMatching>> {
        if lambda.size() != self.n || m0.n() != self.n {
            return Err(Error::SizeMismatch(format!(
                "shape {lambda} / matching {m0} against n = {}",
                self.n
            )));
        }
        let mut out = Vec::new();
        for m in &self.items {
            if &cycle_type(m0, m)? == lambda {
                out.push(m.clone());
            }
        }
        Ok(out)
    }
}

// Lexicographic recursive fill; produces exactly the canonical order.
fn fill(partner: &mut [u8], used: &mut [bool], out: &mut Vec<PerfectMatching>) {
    let Some(a) = used.iter().position(|&u| !u) else {
        out.push(PerfectMatching {
            partner: partner.to_vec(),
        });
        return;
    };
    used[a] = true;
    for b in a + 1..used.len() {
        if used[b] {
            continue;
        }
        used[b] = true;
        partner[a] = b as u8;
        partner[b] = a as u8;
        fill(partner, used, out);
        used[b] = false;
    }
    used[a] = false;
}

/// Streaming enumeration by unranking; no materialization.
pub struct MatchingIter {
    n: usize,
    next: u64,
    total: u64,
}

impl MatchingIter {
    pub fn new(n: usize) -> Self {
        MatchingIter {
            n,
            next: 0,
            total: odd_double_factorial_u64(n),
        }
    }

    /// Sub-range `[start, end)` of the canonical order, for splitting work.
    pub fn range(n: usize, start: u64, end: u64) -> Self {
        MatchingIter {
            n,
            next: start,
            total: end.min(odd_double_factorial_u64(n)),
        }
    }
}

impl Iterator for MatchingIter {
    type Item = PerfectMatching;

    fn next(&mut self) -> Option<PerfectMatching> {
        if self.next >= self.total {
            return None;
        }
        let m = PerfectMatching::unrank(self.n, self.next).ok();
        self.next += 1;
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partitions::enumerate_partitions;
    use proptest::prelude::*;

    fn pm(s: &str) -> PerfectMatching {
        s.parse().unwrap()
    }

    #[test]
    fn identity_matchings() {
        assert_eq!(PerfectMatching::identity(1).to_string(), "1-2");
        assert_eq!(PerfectMatching::identity(2).to_string(), "1-2|3-4");
        assert_eq!(PerfectMatching::identity(3).to_string(), "1-2|3-4|5-6");
    }

    #[test]
    fn parse_recanonicalizes() {
        let m = pm("6-5|2-4|3-1");
        assert_eq!(m.to_string(), "1-3|2-4|5-6");
        assert!("1-2|2-3".parse::<PerfectMatching>().is_err());
        assert!("1-2|3".parse::<PerfectMatching>().is_err());
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(MatchingSpace::new(2).unwrap().len(), 3);
        assert_eq!(MatchingSpace::new(3).unwrap().len(), 15);
        assert_eq!(MatchingSpace::new(6).unwrap().len(), 11 * 9 * 7 * 5 * 3);
    }

    #[test]
    fn rank_unrank_agree_with_materialized_order() {
        for n in 1..=6 {
            let space = MatchingSpace::new(n).unwrap();
            for (i, m) in space.iter().enumerate() {
                assert!(m.is_valid());
                assert_eq!(m.rank(), i as u64);
                assert_eq!(&PerfectMatching::unrank(n, i as u64).unwrap(), m);
            }
        }
        assert_eq!(MatchingIter::new(4).count(), 105);
    }

    #[test]
    fn permutation_action() {
        let m = PerfectMatching::identity(2);
        assert_eq!(apply_permutation(&Permutation::identity(4), &m).unwrap(), m);
        let tau = Permutation::transposition(4, 1, 3);
        assert_eq!(apply_permutation(&tau, &m).unwrap(), pm("3-2|1-4"));
        assert!(apply_permutation(&Permutation::identity(6), &m).is_err());
    }

    fn all_permutations(size: usize) -> Vec<Vec<usize>> {
        fn rec(prefix: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
            if prefix.len() == used.len() {
                out.push(prefix.clone());
                return;
            }
            for x in 0..used.len() {
                if !used[x] {
                    used[x] = true;
                    prefix.push(x + 1);
                    rec(prefix, used, out);
                    prefix.pop();
                    used[x] = false;
                }
            }
        }
        let mut out = Vec::new();
        rec(&mut Vec::new(), &mut vec![false; size], &mut out);
        out
    }

    #[test]
    fn stabilizer_of_identity_has_hyperoctahedral_order() {
        for n in 1..=3 {
            let star = PerfectMatching::identity(n);
            let perms = all_permutations(2 * n);
            let stab = perms
                .iter()
                .filter(|p| {
                    let s = Permutation::from_images(p).unwrap();
                    apply_permutation(&s, &star).unwrap() == star
                })
                .count();
            assert_eq!(BigInt::from(stab), even_double_factorial(n));
            // transitivity: every matching is in the orbit of m*
            let space = MatchingSpace::new(n).unwrap();
            let mut hit = vec![false; space.len()];
            for p in &perms {
                let s = Permutation::from_images(p).unwrap();
                hit[apply_permutation(&s, &star).unwrap().rank() as usize] = true;
            }
            assert!(hit.iter().all(|&h| h));
        }
    }

    #[test]
    fn stabilizer_sampled_at_n4() {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        // |Stab| / 8! = 384 / 40320; transitivity over 105 matchings gives
        // 40320 / 105 = 384 stabilizing permutations. Count via orbit sizes.
        let star = PerfectMatching::identity(4);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let mut hit = [false; 105];
        let mut images: Vec<usize> = (1..=8).collect();
        for _ in 0..20_000 {
            images.shuffle(&mut rng);
            let s = Permutation::from_images(&images).unwrap();
            hit[apply_permutation(&s, &star).unwrap().rank() as usize] = true;
        }
        assert!(hit.iter().all(|&h| h));
        let exhaustive_stab = all_permutations(8)
            .iter()
            .filter(|p| apply_permutation(&Permutation::from_images(p).unwrap(), &star).unwrap() == star)
            .count();
        assert_eq!(exhaustive_stab, 384);
    }

    #[test]
    fn cycle_type_examples() {
        let star = PerfectMatching::identity(3);
        assert_eq!(cycle_type(&star, &star).unwrap(), Partition::column(3));
        assert_eq!(
            cycle_type(&star, &pm("1-3|2-4|5-6")).unwrap(),
            Partition::new(vec![2, 1])
        );
        assert_eq!(
            cycle_type(&star, &pm("1-4|2-5|3-6")).unwrap(),
            Partition::row(3)
        );
        assert!(cycle_type(&star, &PerfectMatching::identity(2)).is_err());
    }

    fn brute_derangements(n: usize) -> usize {
        let star = PerfectMatching::identity(n);
        MatchingSpace::new(n)
            .unwrap()
            .iter()
            .filter(|m| m.common_edges(&star) == 0)
            .count()
    }

    #[test]
    fn derangement_counts() {
        assert_eq!(derangement_count_recurrence(0), BigInt::from(1));
        assert_eq!(derangement_count_recurrence(1), BigInt::from(0));
        assert_eq!(derangement_count_recurrence(2), BigInt::from(2));
        assert_eq!(derangement_count_recurrence(3), BigInt::from(8));
        assert_eq!(derangement_count_sieve(1), BigInt::from(0));
        assert_eq!(derangement_count_sieve(3), BigInt::from(8));
        for n in 1..=6 {
            let brute = BigInt::from(brute_derangements(n));
            assert_eq!(derangement_count_recurrence(n), brute);
            assert_eq!(derangement_count_sieve(n), brute);
        }
        for n in 0..=30 {
            assert_eq!(derangement_count_recurrence(n), derangement_count_sieve(n));
        }
    }

    #[test]
    fn derangement_ratio_near_inverse_sqrt_e() {
        use num_traits::ToPrimitive;
        let ratio = derangement_count_sieve(10).to_f64().unwrap()
            / odd_double_factorial(10).to_f64().unwrap();
        let target = (-0.5f64).exp();
        assert!((ratio - target).abs() < 0.02, "{ratio}");
    }

    #[test]
    fn sphere_sizes() {
        assert_eq!(sphere_size(&Partition::column(4)).unwrap(), BigInt::from(1));
        assert_eq!(sphere_size(&Partition::new(vec![2, 1])).unwrap(), BigInt::from(6));
        assert_eq!(sphere_size(&Partition::row(3)).unwrap(), BigInt::from(8));
        for n in 1..=12 {
            let total: BigInt = enumerate_partitions(n)
                .iter()
                .map(|l| sphere_size(l).unwrap())
                .sum();
            assert_eq!(total, odd_double_factorial(n));
        }
    }

    #[test]
    fn sphere_members_partition_the_space() {
        let space = MatchingSpace::new(3).unwrap();
        let star = PerfectMatching::identity(3);
        assert_eq!(
            space.sphere_members(&Partition::column(3), &star).unwrap(),
            vec![star.clone()]
        );
        assert_eq!(
            space
                .sphere_members(&Partition::new(vec![2, 1]), &star)
                .unwrap()
                .len(),
            6
        );
        let total: usize = enumerate_partitions(3)
            .iter()
            .map(|l| space.sphere_members(l, &star).unwrap().len())
            .sum();
        assert_eq!(total, 15);
        for n in 1..=5 {
            let space = MatchingSpace::new(n).unwrap();
            let star = PerfectMatching::identity(n);
            for l in enumerate_partitions(n) {
                assert_eq!(
                    BigInt::from(space.sphere_members(&l, &star).unwrap().len()),
                    sphere_size(&l).unwrap()
                );
            }
        }
    }

    fn arb_perm(size: usize) -> impl Strategy<Value = Permutation> {
        Just((1..=size).collect::<Vec<_>>())
            .prop_shuffle()
            .prop_map(|v| Permutation::from_images(&v).unwrap())
    }

    proptest! {
        #[test]
        fn cycle_type_is_invariant_and_symmetric(
            n in 1usize..=5,
            a in any::<u64>(),
            b in any::<u64>(),
            seed in any::<u64>(),
        ) {
            let total = odd_double_factorial_u64(n);
            let m1 = PerfectMatching::unrank(n, a % total).unwrap();
            let m2 = PerfectMatching::unrank(n, b % total).unwrap();
            let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(seed);
            let mut images: Vec<usize> = (1..=2 * n).collect();
            rand::seq::SliceRandom::shuffle(images.as_mut_slice(), &mut rng);
            let s = Permutation::from_images(&images).unwrap();
            let t1 = cycle_type(&m1, &m2).unwrap();
            prop_assert_eq!(&t1, &cycle_type(&m2, &m1).unwrap());
            let s1 = apply_permutation(&s, &m1).unwrap();
            let s2 = apply_permutation(&s, &m2).unwrap();
            prop_assert!(s1.is_valid());
            prop_assert_eq!(&t1, &cycle_type(&s1, &s2).unwrap());
            prop_assert_eq!(t1.size(), n);
            prop_assert_eq!(t1.fixed_point_count(), m1.common_edges(&m2));
        }

        #[test]
        fn composition_and_inverse(p in arb_perm(8), q in arb_perm(8)) {
            let id = Permutation::identity(8);
            prop_assert_eq!(p.compose(&p.inverse()), id.clone());
            let m = PerfectMatching::identity(4);
            let lhs = apply_permutation(&p.compose(&q), &m).unwrap();
            let rhs = apply_permutation(&p, &apply_permutation(&q, &m).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
        }
    }
}

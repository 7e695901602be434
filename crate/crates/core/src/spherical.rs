//! Spherical functions of the Gelfand pair `(S_2n, H_n)` and the eigenvalues
//! of the perfect-matching derangement graph.
//!
//! `φ_μ^λ` is computed directly as the average of `χ^{2μ}(σ_λ^{-1} k)` over
//! the hyperoctahedral group `H_n`. Only the cycle-type histogram of
//! `σ_λ^{-1} H_n` is needed, so each coset is scanned once and every `μ` is
//! read off the character table.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::arith::{even_double_factorial, exact_integer, int_rational, odd_double_factorial, rational, Rational};
use crate::characters::character_table;
use crate::error::{Error, Result};
use crate::matchings::{apply_permutation, cycle_type, permutation_cycle_lengths, sphere_size, PerfectMatching, Permutation};
use crate::partitions::{enumerate_partitions, Partition};

/// Largest `n` for which the direct `H_n` average is used.
pub const MAX_AVERAGING_N: usize = 6;

/// A deterministic `σ_λ` with `d(m*, σ_λ m*) = λ`.
///
/// Each part of size `k` occupies `k` consecutive pairs of `m*`; inside that
/// block the vertices `2i` and `2i+1` (1-based, relative to the block) are
/// swapped for `i = 1..k-1`, which closes the block into one `2k`-cycle. The
/// result is an involution.
pub fn coset_representative(lambda: &Partition) -> Permutation {
    let size = 2 * lambda.size();
    let mut image: Vec<u8> = (0..size as u8).collect();
    let mut offset = 0usize;
    for &k in lambda.parts() {
        for i in 1..k {
            // 0-based vertices offset+2i-1 and offset+2i
            image.swap(offset + 2 * i - 1, offset + 2 * i);
        }
        offset += 2 * k;
    }
    Permutation::from_raw(image)
}

/// All `2^n n!` elements of the stabilizer of `m*`: a permutation of the
/// pairs together with a flip inside each pair.
pub fn hyperoctahedral_elements(n: usize) -> Vec<Permutation> {
    let mut pair_perms = Vec::new();
    permute_pairs(&mut (0..n).collect::<Vec<_>>(), 0, &mut pair_perms);
    let mut out = Vec::with_capacity(pair_perms.len() << n);
    for perm in &pair_perms {
        for flips in 0u32..(1 << n) {
            let mut image = vec![0u8; 2 * n];
            for (i, &target) in perm.iter().enumerate() {
                let f = ((flips >> i) & 1) as usize;
                image[2 * i] = (2 * target + f) as u8;
                image[2 * i + 1] = (2 * target + (1 - f)) as u8;
            }
            out.push(Permutation::from_raw(image));
        }
    }
    out
}

fn permute_pairs(items: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
    if k == items.len() {
        out.push(items.clone());
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permute_pairs(items, k + 1, out);
        items.swap(k, i);
    }
}

/// Cycle-type histogram of `σ_λ^{-1} k` over `k ∈ H_n`, in `S_2n`.
pub fn coset_class_distribution(lambda: &Partition, group: &[Permutation]) -> HashMap<Partition, u64> {
    let rep_inv = coset_representative(lambda).inverse();
    let mut hist: HashMap<Partition, u64> = HashMap::new();
    let mut buf = vec![0u8; rep_inv.size()];
    for k in group {
        for (slot, &x) in buf.iter_mut().zip(k.raw()) {
            *slot = rep_inv.raw()[x as usize];
        }
        *hist.entry(Partition::new(permutation_cycle_lengths(&buf))).or_insert(0) += 1;
    }
    hist
}

fn check_averaging_n(n: usize) -> Result<()> {
    if n == 0 || n > MAX_AVERAGING_N {
        return Err(Error::InvalidArgument(format!(
            "direct H_n averaging supports 1 <= n <= {MAX_AVERAGING_N}, got {n}"
        )));
    }
    Ok(())
}

fn average(mu: &Partition, hist: &HashMap<Partition, u64>, n: usize) -> Result<Rational> {
    let table = character_table(2 * n)?;
    let shape = mu.double();
    let mut total = BigInt::zero();
    for (class, &count) in hist {
        let chi = table
            .get(&shape, class)
            .ok_or_else(|| Error::Internal(format!("missing character {shape} at {class}")))?;
        total += chi * count;
    }
    Ok(rational(total, even_double_factorial(n)))
}

/// `φ_μ^λ = (1/|H_n|) Σ_{k ∈ H_n} χ^{2μ}(σ_λ^{-1} k)`, exactly.
pub fn spherical_value(mu: &Partition, lambda: &Partition) -> Result<Rational> {
    let n = lambda.size();
    if mu.size() != n {
        return Err(Error::SizeMismatch(format!("{mu} and {lambda}")));
    }
    check_averaging_n(n)?;
    let group = hyperoctahedral_elements(n);
    average(mu, &coset_class_distribution(lambda, &group), n)
}

/// `φ_{(n-1,1)}^λ = ((2n-1) fp(λ) - n) / (2n(n-1))`.
pub fn zonal_closed_form(lambda: &Partition) -> Result<Rational> {
    let n = lambda.size();
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "shape (n-1,1) undefined for n = {n}"
        )));
    }
    let n_i = n as i64;
    Ok(rational(
        (2 * n_i - 1) * lambda.fixed_point_count() as i64 - n_i,
        2 * n_i * (n_i - 1),
    ))
}

/// `η_{(n-1,1)}` evaluated through the closed form instead of averaging, so
/// it is available beyond [`MAX_AVERAGING_N`].
pub fn zonal_eigenvalue(n: usize) -> Result<BigInt> {
    let mut total = Rational::zero();
    for lambda in enumerate_partitions(n) {
        if lambda.fixed_point_count() == 0 {
            total += int_rational(sphere_size(&lambda)?) * zonal_closed_form(&lambda)?;
        }
    }
    exact_integer(&total)
        .ok_or_else(|| Error::Internal(format!("η_(n-1,1) = {total} is not an integer at n = {n}")))
}

/// `η_μ = Σ_{λ: no part 1} |Ω_λ| φ_μ^λ`, asserted integral.
pub fn derangement_eigenvalue(mu: &Partition) -> Result<BigInt> {
    let n = mu.size();
    check_averaging_n(n)?;
    let group = hyperoctahedral_elements(n);
    let mut total = Rational::zero();
    for lambda in enumerate_partitions(n) {
        if lambda.fixed_point_count() == 0 {
            let phi = average(mu, &coset_class_distribution(&lambda, &group), n)?;
            total += int_rational(sphere_size(&lambda)?) * phi;
        }
    }
    exact_integer(&total)
        .ok_or_else(|| Error::Internal(format!("η_{mu} = {total} is not an integer")))
}

/// Exact table of `φ_μ^λ` and `η_μ` for one `n`.
#[derive(Clone, Debug, PartialEq)]
pub struct SchemeTable {
    n: usize,
    partitions: Vec<Partition>,
    /// `phi[μ][λ]`
    phi: Vec<Vec<Rational>>,
    eta: Vec<BigInt>,
}

impl SchemeTable {
    pub fn compute(n: usize) -> Result<Self> {
        check_averaging_n(n)?;
        let partitions = enumerate_partitions(n);
        let group = hyperoctahedral_elements(n);
        // one coset scan per λ; cells are independent
        let histograms: Vec<HashMap<Partition, u64>> = partitions
            .par_iter()
            .map(|lambda| coset_class_distribution(lambda, &group))
            .collect();
        let phi = partitions
            .iter()
            .map(|mu| {
                histograms
                    .iter()
                    .map(|h| average(mu, h, n))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_phi(n, partitions, phi)
    }

    /// Builds the table from spherical values, deriving and checking `η`.
    pub(crate) fn from_phi(n: usize, partitions: Vec<Partition>, phi: Vec<Vec<Rational>>) -> Result<Self> {
        let sizes = partitions
            .iter()
            .map(sphere_size)
            .collect::<Result<Vec<_>>>()?;
        let mut eta = Vec::with_capacity(partitions.len());
        for (mu, row) in partitions.iter().zip(&phi) {
            let total: Rational = partitions
                .iter()
                .zip(row)
                .zip(&sizes)
                .filter(|((lambda, _), _)| lambda.fixed_point_count() == 0)
                .map(|((_, value), size)| int_rational(size.clone()) * value)
                .sum();
            eta.push(exact_integer(&total).ok_or_else(|| {
                Error::Internal(format!("η_{mu} = {total} is not an integer at n = {n}"))
            })?);
        }
        Ok(SchemeTable {
            n,
            partitions,
            phi,
            eta,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn partitions(&self) -> &[Partition] {
        &self.partitions
    }

    pub fn index_of(&self, p: &Partition) -> Option<usize> {
        self.partitions.iter().position(|q| q == p)
    }

    pub fn phi(&self, mu: &Partition, lambda: &Partition) -> Option<&Rational> {
        Some(&self.phi[self.index_of(mu)?][self.index_of(lambda)?])
    }

    pub fn phi_row(&self, mu_index: usize) -> &[Rational] {
        &self.phi[mu_index]
    }

    pub fn eta(&self, mu: &Partition) -> Option<&BigInt> {
        Some(&self.eta[self.index_of(mu)?])
    }

    pub fn etas(&self) -> &[BigInt] {
        &self.eta
    }

    /// Eigenspace dimension `f^{2μ}`.
    pub fn multiplicity(&self, mu: &Partition) -> BigInt {
        mu.double().dimension()
    }

    /// `(η_μ, f^{2μ})` pairs in partition order.
    pub fn spectrum(&self) -> Vec<(Partition, BigInt, BigInt)> {
        self.partitions
            .iter()
            .zip(&self.eta)
            .map(|(mu, eta)| (mu.clone(), eta.clone(), self.multiplicity(mu)))
            .collect()
    }

    /// `φ_μ^{(1^n)} = 1` for every μ.
    pub fn identity_values_are_one(&self) -> bool {
        let Some(col) = self.index_of(&Partition::column(self.n)) else {
            return false;
        };
        self.phi.iter().all(|row| row[col] == Rational::one())
    }

    /// `Σ_λ |Ω_λ| φ_μ^λ φ_ν^λ = δ_{μν} (2n-1)!!/f^{2μ}` for all pairs; returns
    /// the first failing pair.
    pub fn orthogonality_violation(&self) -> Result<Option<(Partition, Partition)>> {
        let sizes: Vec<Rational> = self
            .partitions
            .iter()
            .map(|l| sphere_size(l).map(int_rational))
            .collect::<Result<_>>()?;
        let total = odd_double_factorial(self.n);
        for (i, mu) in self.partitions.iter().enumerate() {
            for (j, nu) in self.partitions.iter().enumerate().skip(i) {
                let s: Rational = (0..self.partitions.len())
                    .map(|k| &sizes[k] * &self.phi[i][k] * &self.phi[j][k])
                    .sum();
                let want = if i == j {
                    rational(total.clone(), self.multiplicity(mu))
                } else {
                    Rational::zero()
                };
                if s != want {
                    return Ok(Some((mu.clone(), nu.clone())));
                }
            }
        }
        Ok(None)
    }

    /// `η_{(n)} = D_2n`.
    pub fn top_eigenvalue_is_derangement_count(&self) -> bool {
        self.eta(&Partition::row(self.n))
            .is_some_and(|e| *e == crate::matchings::derangement_count_recurrence(self.n))
    }
}

fn scheme_cache() -> &'static RwLock<HashMap<usize, Arc<SchemeTable>>> {
    static CACHE: OnceLock<RwLock<HashMap<usize, Arc<SchemeTable>>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// Memoized per process like the character tables.
pub fn scheme_table(n: usize) -> Result<Arc<SchemeTable>> {
    if let Some(t) = scheme_cache().read().expect("cache lock").get(&n) {
        return Ok(t.clone());
    }
    let table = Arc::new(SchemeTable::compute(n)?);
    let mut guard = scheme_cache().write().expect("cache lock");
    Ok(guard.entry(n).or_insert(table).clone())
}

/// Seeds the memo with a table loaded from disk.
pub fn install_scheme_table(table: SchemeTable) -> Arc<SchemeTable> {
    let mut guard = scheme_cache().write().expect("cache lock");
    guard.entry(table.n).or_insert_with(|| Arc::new(table)).clone()
}

/// `d(m*, σ_λ m*)`, used to validate representatives.
pub fn representative_cycle_type(lambda: &Partition) -> Result<Partition> {
    let star = PerfectMatching::identity(lambda.size());
    cycle_type(&star, &apply_permutation(&coset_representative(lambda), &star)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matchings::derangement_count_recurrence;

    fn p(parts: &[usize]) -> Partition {
        Partition::new(parts.to_vec())
    }

    #[test]
    fn representatives_realize_their_class() {
        assert_eq!(coset_representative(&Partition::column(4)), Permutation::identity(8));
        assert_eq!(
            coset_representative(&p(&[2, 1, 1])),
            Permutation::transposition(8, 2, 3)
        );
        for n in 1..=7 {
            for lambda in enumerate_partitions(n) {
                assert_eq!(representative_cycle_type(&lambda).unwrap(), lambda);
            }
        }
    }

    #[test]
    fn hyperoctahedral_group_is_the_stabilizer() {
        for n in 1..=4 {
            let group = hyperoctahedral_elements(n);
            assert_eq!(BigInt::from(group.len()), even_double_factorial(n));
            let star = PerfectMatching::identity(n);
            let distinct: std::collections::HashSet<_> = group.iter().collect();
            assert_eq!(distinct.len(), group.len());
            for g in &group {
                assert_eq!(apply_permutation(g, &star).unwrap(), star);
            }
        }
    }

    #[test]
    fn n3_values() {
        assert_eq!(spherical_value(&p(&[2, 1]), &p(&[3])).unwrap(), rational(-1, 4));
        assert_eq!(spherical_value(&p(&[1, 1, 1]), &p(&[3])).unwrap(), rational(1, 4));
        for mu in enumerate_partitions(3) {
            assert_eq!(
                spherical_value(&mu, &Partition::column(3)).unwrap(),
                Rational::one()
            );
        }
    }

    #[test]
    fn value_is_independent_of_representative() {
        // any σ with the same double coset gives the same average
        let n = 3;
        let group = hyperoctahedral_elements(n);
        let table = character_table(2 * n).unwrap();
        let lambda = p(&[2, 1]);
        let rep = coset_representative(&lambda);
        for h in group.iter().step_by(7) {
            let other = h.compose(&rep).compose(&group[group.len() - 1]);
            let inv = other.inverse();
            for mu in enumerate_partitions(n) {
                let mut total = BigInt::zero();
                for k in &group {
                    let class = inv.compose(k).cycle_type();
                    total += table.get(&mu.double(), &class).unwrap();
                }
                assert_eq!(
                    rational(total, even_double_factorial(n)),
                    spherical_value(&mu, &lambda).unwrap()
                );
            }
        }
    }

    #[test]
    fn zonal_examples() {
        assert_eq!(zonal_closed_form(&Partition::column(5)).unwrap(), Rational::one());
        assert_eq!(zonal_closed_form(&p(&[2, 1])).unwrap(), rational(1, 6));
        for n in 2..=8 {
            for lambda in enumerate_partitions(n) {
                if lambda.fixed_point_count() == 0 {
                    assert_eq!(
                        zonal_closed_form(&lambda).unwrap(),
                        rational(-1, 2 * (n as i64 - 1))
                    );
                }
            }
        }
        assert!(zonal_closed_form(&p(&[1])).is_err());
    }

    #[test]
    fn zonal_agrees_with_averaging() {
        for n in 2..=5 {
            let t = scheme_table(n).unwrap();
            let hook = Partition::hook_n_minus_one(n).unwrap();
            for lambda in t.partitions() {
                assert_eq!(t.phi(&hook, lambda).unwrap(), &zonal_closed_form(lambda).unwrap());
            }
        }
    }

    #[test]
    fn eigenvalue_examples() {
        assert_eq!(derangement_eigenvalue(&p(&[3])).unwrap(), BigInt::from(8));
        assert_eq!(derangement_eigenvalue(&p(&[2, 1])).unwrap(), BigInt::from(-2));
        for n in 2..=5 {
            let hook = Partition::hook_n_minus_one(n).unwrap();
            let want = -derangement_count_recurrence(n) / BigInt::from(2 * (n - 1));
            assert_eq!(derangement_eigenvalue(&hook).unwrap(), want);
            assert_eq!(zonal_eigenvalue(n).unwrap(), want);
        }
        assert!(derangement_eigenvalue(&Partition::row(7)).is_err());
    }

    #[test]
    fn tables_n2_n3() {
        let t2 = scheme_table(2).unwrap();
        assert_eq!(t2.eta(&p(&[2])).unwrap(), &BigInt::from(2));
        assert_eq!(t2.eta(&p(&[1, 1])).unwrap(), &BigInt::from(-1));
        let t3 = scheme_table(3).unwrap();
        assert_eq!(t3.etas(), &[BigInt::from(8), BigInt::from(-2), BigInt::from(2)]);
        let dims: BigInt = t3.partitions().iter().map(|m| t3.multiplicity(m)).sum();
        assert_eq!(dims, BigInt::from(15));
    }

    #[test]
    fn n4_spectrum_matches_dense_oracle() {
        // frozen from a dense eigensolve of the 105-vertex derangement graph
        let t = scheme_table(4).unwrap();
        let got: Vec<(String, i64, i64)> = t
            .spectrum()
            .into_iter()
            .map(|(mu, e, f)| (mu.to_dashed(), e.try_into().unwrap(), f.try_into().unwrap()))
            .collect();
        let want = vec![
            ("4".to_string(), 60, 1),
            ("3-1".to_string(), -10, 20),
            ("2-2".to_string(), 5, 14),
            ("2-1-1".to_string(), 2, 56),
            ("1-1-1-1".to_string(), -3, 14),
        ];
        assert_eq!(got, want);
    }

    #[test]
    fn table_invariants() {
        for n in 1..=5 {
            let t = scheme_table(n).unwrap();
            assert!(t.identity_values_are_one());
            assert_eq!(t.orthogonality_violation().unwrap(), None);
            assert!(t.top_eigenvalue_is_derangement_count());
        }
    }
}

//! Irreducible characters of the symmetric group by the Murnaghan–Nakayama
//! rule.
//!
//! Shapes are handled as beta-sets (first-column hook lengths). Removing a
//! border strip of length `r` moves one bead from `b` to `b - r`; the sign is
//! `(-1)^height` where the height is the number of beads jumped over.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::partitions::{enumerate_partitions, Partition};

/// Largest degree accepted by [`character_table`].
pub const MAX_TABLE_DEGREE: usize = 16;

type Memo = HashMap<(Vec<usize>, Vec<usize>), BigInt>;

fn beta_set(shape: &Partition) -> Vec<usize> {
    let l = shape.len();
    shape
        .parts()
        .iter()
        .enumerate()
        .map(|(i, &p)| p + (l - 1 - i))
        .collect()
}

fn mn(beta: &[usize], class: &[usize], depth: usize, memo: &mut Memo) -> BigInt {
    if depth == class.len() {
        return BigInt::one();
    }
    let key = (beta.to_vec(), class[depth..].to_vec());
    if let Some(v) = memo.get(&key) {
        return v.clone();
    }
    let r = class[depth];
    let mut total = BigInt::zero();
    for (idx, &b) in beta.iter().enumerate() {
        if b < r || beta.contains(&(b - r)) {
            continue;
        }
        let target = b - r;
        let height = beta.iter().filter(|&&x| x > target && x < b).count();
        let mut next = beta.to_vec();
        next[idx] = target;
        next.sort_unstable_by(|a, b| b.cmp(a));
        let value = mn(&next, class, depth + 1, memo);
        if height % 2 == 0 {
            total += value;
        } else {
            total -= value;
        }
    }
    memo.insert(key, total.clone());
    total
}

/// `χ^λ(ρ)` for `λ, ρ ⊢ m`.
pub fn character(shape: &Partition, class: &Partition) -> Result<BigInt> {
    if shape.size() != class.size() {
        return Err(Error::SizeMismatch(format!(
            "shape {shape} and class {class} have different sizes"
        )));
    }
    let mut memo = Memo::new();
    Ok(mn(&beta_set(shape), class.parts(), 0, &mut memo))
}

/// The full character table of `S_m`, rows and columns both in
/// reverse-lexicographic partition order.
#[derive(Clone, Debug, PartialEq)]
pub struct CharacterTable {
    m: usize,
    partitions: Vec<Partition>,
    index: HashMap<Partition, usize>,
    values: Vec<Vec<BigInt>>,
}

impl CharacterTable {
    pub fn compute(m: usize) -> Result<Self> {
        let partitions = enumerate_partitions(m);
        let mut values = Vec::with_capacity(partitions.len());
        for shape in &partitions {
            let mut memo = Memo::new();
            let beta = beta_set(shape);
            values.push(
                partitions
                    .iter()
                    .map(|class| mn(&beta, class.parts(), 0, &mut memo))
                    .collect(),
            );
        }
        Ok(Self::from_parts(m, partitions, values))
    }

    pub(crate) fn from_parts(m: usize, partitions: Vec<Partition>, values: Vec<Vec<BigInt>>) -> Self {
        let index = partitions
            .iter()
            .enumerate()
            .map(|(i, p)| (p.clone(), i))
            .collect();
        CharacterTable {
            m,
            partitions,
            index,
            values,
        }
    }

    pub fn degree(&self) -> usize {
        self.m
    }

    pub fn partitions(&self) -> &[Partition] {
        &self.partitions
    }

    pub fn index_of(&self, p: &Partition) -> Option<usize> {
        self.index.get(p).copied()
    }

    pub fn row(&self, shape: &Partition) -> Option<&[BigInt]> {
        self.index_of(shape).map(|i| self.values[i].as_slice())
    }

    pub fn get(&self, shape: &Partition, class: &Partition) -> Option<&BigInt> {
        Some(&self.values[self.index_of(shape)?][self.index_of(class)?])
    }

    pub fn values(&self) -> &[Vec<BigInt>] {
        &self.values
    }

    /// `Σ_ρ (m!/z_ρ) χ^λ(ρ) χ^μ(ρ) == δ_{λμ} m!` for every pair.
    pub fn rows_orthogonal(&self) -> bool {
        let fact = crate::arith::factorial(self.m);
        let class_sizes: Vec<BigInt> = self
            .partitions
            .iter()
            .map(|rho| &fact / rho.z_factor())
            .collect();
        for (i, a) in self.values.iter().enumerate() {
            for (j, b) in self.values.iter().enumerate().skip(i) {
                let s: BigInt = a
                    .iter()
                    .zip(b)
                    .zip(&class_sizes)
                    .map(|((x, y), c)| x * y * c)
                    .sum();
                let want = if i == j { fact.clone() } else { BigInt::zero() };
                if s != want {
                    return false;
                }
            }
        }
        true
    }

    /// `Σ_λ χ^λ(ρ) χ^λ(σ) == δ_{ρσ} z_ρ`.
    pub fn columns_orthogonal(&self) -> bool {
        let k = self.partitions.len();
        for c1 in 0..k {
            for c2 in c1..k {
                let s: BigInt = self.values.iter().map(|row| &row[c1] * &row[c2]).sum();
                let want = if c1 == c2 {
                    self.partitions[c1].z_factor()
                } else {
                    BigInt::zero()
                };
                if s != want {
                    return false;
                }
            }
        }
        true
    }
}

fn table_cache() -> &'static RwLock<HashMap<usize, Arc<CharacterTable>>> {
    static CACHE: OnceLock<RwLock<HashMap<usize, Arc<CharacterTable>>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// Process-wide memoized table. Concurrent first fills compute identical
/// tables; whichever insert lands first is kept.
pub fn character_table(m: usize) -> Result<Arc<CharacterTable>> {
    if m == 0 || m > MAX_TABLE_DEGREE {
        return Err(Error::InvalidArgument(format!(
            "character tables supported for 1 <= m <= {MAX_TABLE_DEGREE}, got {m}"
        )));
    }
    if let Some(t) = table_cache().read().expect("cache lock").get(&m) {
        return Ok(t.clone());
    }
    let table = Arc::new(CharacterTable::compute(m)?);
    let mut guard = table_cache().write().expect("cache lock");
    Ok(guard.entry(m).or_insert(table).clone())
}

/// Seeds the process-wide memo with a table loaded from disk.
pub fn install_character_table(table: CharacterTable) -> Arc<CharacterTable> {
    let mut guard = table_cache().write().expect("cache lock");
    guard.entry(table.m).or_insert_with(|| Arc::new(table)).clone()
}

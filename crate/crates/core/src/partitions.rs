//! Integer partitions: shapes, cycle types and eigenspace labels.
//!
//! Partitions are listed in reverse-lexicographic order, so `(3)` comes
//! before `(2,1)` which comes before `(1,1,1)`.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::One;

use crate::arith::factorial;
use crate::error::{Error, Result};

/// A weakly decreasing sequence of positive integers.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition {
    parts: Vec<usize>,
}

impl Partition {
    /// Builds a partition from parts given in any order; zero parts are dropped.
    pub fn new(mut parts: Vec<usize>) -> Self {
        parts.retain(|&p| p > 0);
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Partition { parts }
    }

    pub fn empty() -> Self {
        Partition { parts: Vec::new() }
    }

    /// The single-row shape `(n)`.
    pub fn row(n: usize) -> Self {
        Partition::new(vec![n])
    }

    /// The single-column shape `(1^n)`.
    pub fn column(n: usize) -> Self {
        Partition::new(vec![1; n])
    }

    /// `(n-1, 1)`; requires `n >= 2`.
    pub fn hook_n_minus_one(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidArgument(format!(
                "shape (n-1,1) needs n >= 2, got {n}"
            )));
        }
        Ok(Partition::new(vec![n - 1, 1]))
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    /// The integer being partitioned.
    pub fn size(&self) -> usize {
        self.parts.iter().sum()
    }

    /// Number of parts, `l(λ)`.
    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// `(m_1, m_2, ...)`: `mult[i]` is the number of parts equal to `i`.
    pub fn multiplicities(&self) -> Vec<usize> {
        let mut mult = vec![0; self.parts.first().copied().unwrap_or(0) + 1];
        for &p in &self.parts {
            mult[p] += 1;
        }
        mult
    }

    /// Conjugate (transposed) shape.
    pub fn conjugate(&self) -> Partition {
        let width = self.parts.first().copied().unwrap_or(0);
        let parts = (0..width)
            .map(|j| self.parts.iter().take_while(|&&p| p > j).count())
            .collect();
        Partition { parts }
    }

    /// `2λ = (2λ_1, ..., 2λ_k)`.
    pub fn double(&self) -> Partition {
        Partition {
            parts: self.parts.iter().map(|p| 2 * p).collect(),
        }
    }

    pub fn all_even(&self) -> bool {
        self.parts.iter().all(|p| p % 2 == 0)
    }

    /// Parts of size one ("fixed points" when read as a cycle type).
    pub fn fixed_point_count(&self) -> usize {
        self.parts.iter().filter(|&&p| p == 1).count()
    }

    /// `z_λ = ∏ i^{m_i} m_i!`, the centralizer order of the class λ.
    pub fn z_factor(&self) -> BigInt {
        self.multiplicities()
            .iter()
            .enumerate()
            .skip(1)
            .fold(BigInt::one(), |acc, (i, &m)| {
                acc * BigInt::from(i).pow(m as u32) * factorial(m)
            })
    }

    /// Sign of a permutation with this cycle type, `(-1)^{n - l(λ)}`.
    pub fn sign(&self) -> i32 {
        if (self.size() - self.len()).is_multiple_of(2) {
            1
        } else {
            -1
        }
    }

    pub fn hook_lengths(&self) -> Vec<Vec<usize>> {
        let conj = self.conjugate();
        self.parts
            .iter()
            .enumerate()
            .map(|(i, &row)| {
                (0..row)
                    .map(|j| (row - j - 1) + (conj.parts[j] - i - 1) + 1)
                    .collect()
            })
            .collect()
    }

    /// `f^λ = n! / ∏ h(c)` by the hook length formula.
    pub fn dimension(&self) -> BigInt {
        let hooks: BigInt = self
            .hook_lengths()
            .iter()
            .flatten()
            .fold(BigInt::one(), |acc, &h| acc * h);
        factorial(self.size()) / hooks
    }

    /// Shapes obtained by deleting one removable corner cell.
    pub fn branch_down(&self) -> Result<BTreeSet<Partition>> {
        if self.is_empty() {
            return Err(Error::InvalidArgument(
                "the empty partition has no removable cell".into(),
            ));
        }
        let mut out = BTreeSet::new();
        for i in 0..self.parts.len() {
            let next = self.parts.get(i + 1).copied().unwrap_or(0);
            if self.parts[i] > next {
                let mut parts = self.parts.clone();
                parts[i] -= 1;
                out.insert(Partition::new(parts));
            }
        }
        Ok(out)
    }

    /// Dash-joined parts, e.g. `2-1`; the empty partition prints as `0`.
    pub fn to_dashed(&self) -> String {
        if self.parts.is_empty() {
            return "0".into();
        }
        self.parts
            .iter()
            .map(|p| p.to_string())
            .collect::<Vec<_>>()
            .join("-")
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, p) in self.parts.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ")")
    }
}

impl FromStr for Partition {
    type Err = Error;

    /// Accepts `2-1`, `2,1`, `(2,1)` or `0` for the empty partition.
    fn from_str(s: &str) -> Result<Self> {
        let trimmed = s.trim().trim_start_matches('(').trim_end_matches(')');
        if trimmed.is_empty() || trimmed == "0" {
            return Ok(Partition::empty());
        }
        let parts = trimmed
            .split(['-', ','])
            .map(|t| {
                t.trim()
                    .parse::<usize>()
                    .map_err(|e| Error::Parse(format!("partition {s:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        if parts.contains(&0) {
            return Err(Error::Parse(format!("partition {s:?} has a zero part")));
        }
        Ok(Partition::new(parts))
    }
}

/// All partitions of `n` in reverse-lexicographic order. `n = 0` yields the
/// single empty partition.
pub fn enumerate_partitions(n: usize) -> Vec<Partition> {
    fn rec(remaining: usize, max: usize, prefix: &mut Vec<usize>, out: &mut Vec<Partition>) {
        if remaining == 0 {
            out.push(Partition {
                parts: prefix.clone(),
            });
            return;
        }
        for p in (1..=remaining.min(max)).rev() {
            prefix.push(p);
            rec(remaining - p, p, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, n, &mut Vec::new(), &mut out);
    out
}

/// Even partitions `2μ ⊢ 2n` whose dimension is strictly below `threshold`,
/// sorted by dimension (ties keep reverse-lexicographic order).
pub fn even_census_below(n: usize, threshold: &BigInt) -> Vec<(Partition, BigInt)> {
    let mut out: Vec<(Partition, BigInt)> = enumerate_partitions(n)
        .into_iter()
        .map(|mu| {
            let shape = mu.double();
            let dim = shape.dimension();
            (shape, dim)
        })
        .filter(|(_, dim)| dim < threshold)
        .collect();
    out.sort_by(|a, b| a.1.cmp(&b.1));
    out
}

//! Spectral bounds evaluated in exact rational arithmetic.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::arith::{int_rational, odd_double_factorial, rationalize, Rational};
use crate::error::{Error, Result};
use crate::matchings::derangement_count_recurrence;
use crate::partitions::Partition;
use crate::spherical::SchemeTable;

/// Tolerance for snapping floating eigenvalues to integers.
pub const RATIONALIZE_TOL: f64 = 1e-6;

/// The handful of spectral quantities the bounds need.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralSummary {
    pub vertex_count: BigInt,
    pub degree: Rational,
    pub eta_min: Rational,
    /// Largest `|η|` over eigenvalues other than `degree` and `eta_min`.
    pub eta_second: Rational,
    /// Least eigenvalue different from `eta_min`.
    pub mu_gap: Rational,
}

impl SpectralSummary {
    /// From the distinct eigenvalues of a connected regular graph; the
    /// largest is taken as the degree.
    pub fn from_eigenvalues(vertex_count: BigInt, eigenvalues: &[Rational]) -> Result<Self> {
        let mut distinct: Vec<Rational> = eigenvalues.to_vec();
        distinct.sort();
        distinct.dedup();
        let (Some(eta_min), Some(degree)) = (distinct.first().cloned(), distinct.last().cloned()) else {
            return Err(Error::InvalidArgument("empty spectrum".into()));
        };
        let mu_gap = distinct.get(1).cloned().unwrap_or_else(|| degree.clone());
        let eta_second = distinct
            .iter()
            .filter(|e| **e != degree && **e != eta_min)
            .map(|e| e.abs())
            .max()
            .unwrap_or_else(Rational::zero);
        Ok(SpectralSummary {
            vertex_count,
            degree,
            eta_min,
            eta_second,
            mu_gap,
        })
    }

    /// Derangement-graph summary from an exact scheme table.
    pub fn from_scheme(table: &SchemeTable) -> Result<Self> {
        let values: Vec<Rational> = table.etas().iter().cloned().map(int_rational).collect();
        let summary = Self::from_eigenvalues(odd_double_factorial(table.n()), &values)?;
        debug_assert_eq!(summary.degree, int_rational(derangement_count_recurrence(table.n())));
        Ok(summary)
    }

    /// From a floating spectrum whose values are integers up to numerics.
    pub fn from_dense(spectrum: &[f64]) -> Result<Self> {
        let values = spectrum
            .iter()
            .map(|&x| {
                rationalize(x, RATIONALIZE_TOL)
                    .ok_or_else(|| Error::Internal(format!("eigenvalue {x} is not within {RATIONALIZE_TOL} of an integer")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_eigenvalues(BigInt::from(spectrum.len()), &values)
    }

    /// Second-largest eigenvalue magnitude `|η_2|`, counting `η_min`.
    pub fn second_magnitude(&self) -> Rational {
        self.eta_second.clone().max(self.eta_min.abs())
    }

    pub fn invariants_hold(&self) -> bool {
        self.eta_min <= self.mu_gap && self.mu_gap <= self.degree && self.eta_second.abs() <= self.degree
    }
}

/// `N (-η_min) / (d - η_min)`.
pub fn ratio_bound(s: &SpectralSummary) -> Result<Rational> {
    if !s.eta_min.is_negative() {
        return Err(Error::NotApplicable(format!("η_min = {} is not negative", s.eta_min)));
    }
    Ok(int_rational(s.vertex_count.clone()) * -&s.eta_min / (&s.degree - &s.eta_min))
}

/// `|η_2| / (d + |η_2|)`, the bound on `sqrt(|S||T|)/|V|` for sets with no
/// edges between them.
pub fn cross_ratio_bound(s: &SpectralSummary) -> Result<Rational> {
    if !s.degree.is_positive() {
        return Err(Error::NotApplicable("degree must be positive".into()));
    }
    let second = s.second_magnitude();
    Ok(&second / (&s.degree + &second))
}

/// `N^2 (|η_2|/(d+|η_2|))^2`: the certified upper bound on `|S| |T|`.
pub fn cross_product_bound(s: &SpectralSummary) -> Result<Rational> {
    let rhs = cross_ratio_bound(s)?;
    let n = int_rational(s.vertex_count.clone());
    Ok(&n * &n * &rhs * &rhs)
}

/// `α((1-α)|η_min| - dα)/(|η_min| - |μ|) + 2ℓ`.
pub fn stability_distance_bound(s: &SpectralSummary, alpha: &Rational, ell: u64) -> Result<Rational> {
    if alpha.is_negative() || *alpha > Rational::one() {
        return Err(Error::InvalidArgument(format!("α = {alpha} outside [0, 1]")));
    }
    let eta_min = s.eta_min.abs();
    let gap = &eta_min - s.mu_gap.abs();
    if !gap.is_positive() {
        return Err(Error::NotApplicable(format!(
            "|η_min| = {eta_min} does not exceed |μ| = {}",
            s.mu_gap.abs()
        )));
    }
    let one = Rational::one();
    let core = alpha * ((&one - alpha) * &eta_min - &s.degree * alpha) / gap;
    Ok(core + int_rational(2 * ell))
}

#[derive(Clone, Debug, Serialize)]
pub struct TraceReport {
    pub n: usize,
    /// `Σ f^{2μ} η_μ^2`
    pub weighted_square_sum: String,
    /// `N d = 2|E|`
    pub twice_edges: String,
    pub passed: bool,
}

/// `Σ_μ f^{2μ} η_μ^2 = (2n-1)!! D_2n`.
pub fn trace_identity_check(table: &SchemeTable) -> TraceReport {
    let lhs: BigInt = table
        .spectrum()
        .iter()
        .map(|(_, eta, mult)| mult * eta * eta)
        .sum();
    let rhs = odd_double_factorial(table.n()) * derangement_count_recurrence(table.n());
    TraceReport {
        n: table.n(),
        weighted_square_sum: lhs.to_string(),
        twice_edges: rhs.to_string(),
        passed: lhs == rhs,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct MagnitudeCensus {
    pub n: usize,
    /// Every `μ` satisfies `η_μ^2 f^{2μ} <= N D_2n`.
    pub trace_bound_holds: bool,
    /// `(μ, |η_μ|)` for the two largest magnitudes, ties broken by partition order.
    pub largest: Vec<(String, String)>,
    /// The two largest magnitudes are `η_(n)` and `|η_(n-1,1)|`.
    pub attained_at_top_shapes: bool,
}

pub fn magnitude_census(table: &SchemeTable) -> Result<MagnitudeCensus> {
    let n = table.n();
    let budget = odd_double_factorial(n) * derangement_count_recurrence(n);
    let spectrum = table.spectrum();
    let trace_bound_holds = spectrum.iter().all(|(_, eta, mult)| eta * eta * mult <= budget);
    let mut magnitudes: Vec<(Partition, BigInt)> = spectrum.into_iter().map(|(mu, eta, _)| (mu, eta.abs())).collect();
    // stable: equal magnitudes keep reverse-lexicographic order
    magnitudes.sort_by(|a, b| b.1.cmp(&a.1));
    let top = Partition::row(n);
    let hook = Partition::hook_n_minus_one(n)?;
    let eta_hook = table.eta(&hook).map(|e| e.abs());
    let attained_at_top_shapes = magnitudes.len() >= 2
        && magnitudes[0].0 == top
        && eta_hook.as_ref() == Some(&magnitudes[1].1);
    Ok(MagnitudeCensus {
        n,
        trace_bound_holds,
        largest: magnitudes
            .iter()
            .take(2)
            .map(|(mu, m)| (mu.to_string(), m.to_string()))
            .collect(),
        attained_at_top_shapes,
    })
}

/// `|μ| / (2n-3)!!` where `μ` is the eigenvalue just above `η_min`.
pub fn gap_ratio(table: &SchemeTable) -> Result<Rational> {
    let s = SpectralSummary::from_scheme(table)?;
    Ok(s.mu_gap.abs() / int_rational(odd_double_factorial(table.n() - 1)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rational;
    use crate::spherical::scheme_table;

    fn summary(n: i64, d: i64, eta_min: i64, second: i64, mu: i64) -> SpectralSummary {
        SpectralSummary {
            vertex_count: BigInt::from(n),
            degree: int_rational(d),
            eta_min: int_rational(eta_min),
            eta_second: int_rational(second),
            mu_gap: int_rational(mu),
        }
    }

    #[test]
    fn ratio_examples() {
        assert_eq!(ratio_bound(&summary(15, 8, -2, 2, 2)).unwrap(), int_rational(3));
        assert_eq!(ratio_bound(&summary(105, 60, -10, 5, -3)).unwrap(), int_rational(15));
        assert_eq!(ratio_bound(&summary(3, 2, -1, 0, 2)).unwrap(), int_rational(1));
        assert!(ratio_bound(&summary(3, 2, 0, 0, 2)).is_err());
    }

    #[test]
    fn ratio_bound_on_derangement_graphs() {
        for n in 2..=5 {
            let s = SpectralSummary::from_scheme(&scheme_table(n).unwrap()).unwrap();
            assert!(s.invariants_hold());
            assert_eq!(ratio_bound(&s).unwrap(), int_rational(odd_double_factorial(n - 1)));
        }
    }

    #[test]
    fn cross_ratio_examples() {
        let triangle = summary(3, 2, -1, 0, 2);
        assert_eq!(cross_ratio_bound(&triangle).unwrap(), rational(1, 3));
        assert_eq!(cross_product_bound(&triangle).unwrap(), int_rational(1));
        assert!(cross_ratio_bound(&summary(3, 0, -1, 0, 0)).is_err());
    }

    #[test]
    fn stability_examples() {
        let n3 = SpectralSummary::from_scheme(&scheme_table(3).unwrap()).unwrap();
        assert!(stability_distance_bound(&n3, &rational(1, 5), 0).is_err());
        let n4 = SpectralSummary::from_scheme(&scheme_table(4).unwrap()).unwrap();
        assert_eq!(n4.mu_gap, int_rational(-3));
        // F_ij meets the ratio bound, so the bound collapses to zero
        assert_eq!(stability_distance_bound(&n4, &rational(1, 7), 0).unwrap(), Rational::zero());
        assert_eq!(stability_distance_bound(&n4, &Rational::zero(), 0).unwrap(), Rational::zero());
        let base = stability_distance_bound(&n4, &rational(1, 10), 0).unwrap();
        assert_eq!(stability_distance_bound(&n4, &rational(1, 10), 3).unwrap(), base + int_rational(6));
        assert!(stability_distance_bound(&n4, &rational(3, 2), 0).is_err());
    }

    #[test]
    fn trace_identity() {
        let r3 = trace_identity_check(&scheme_table(3).unwrap());
        assert_eq!((r3.weighted_square_sum.as_str(), r3.twice_edges.as_str()), ("120", "120"));
        let r2 = trace_identity_check(&scheme_table(2).unwrap());
        assert_eq!(r2.twice_edges, "6");
        assert!(r2.passed);
        assert!(trace_identity_check(&scheme_table(5).unwrap()).passed);
    }

    #[test]
    fn magnitude_census_small_n() {
        for n in 3..=5 {
            let c = magnitude_census(&scheme_table(n).unwrap()).unwrap();
            assert!(c.trace_bound_holds && c.attained_at_top_shapes, "{c:?}");
        }
    }

    #[test]
    fn gap_ratio_decreases() {
        let ratios: Vec<Rational> = (3..=5).map(|n| gap_ratio(&scheme_table(n).unwrap()).unwrap()).collect();
        assert_eq!(ratios[0], rational(2, 3));
        assert!(ratios.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn dense_rationalization() {
        let s = SpectralSummary::from_dense(&[2.0000000001, -0.9999999, -1.0]).unwrap();
        assert_eq!(s.degree, int_rational(2));
        assert_eq!(s.eta_min, int_rational(-1));
        assert!(SpectralSummary::from_dense(&[2.0, -0.5]).is_err());
    }
}

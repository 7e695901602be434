//! The verification suite: each check pairs a closed-form statement with an
//! independent computation and runs over a range of `n`.

use std::collections::HashMap;
use std::ops::RangeInclusive;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arith::{binomial_signed, int_rational, odd_double_factorial, rational, to_f64, Rational};
use crate::bounds::{
    cross_product_bound, magnitude_census, ratio_bound, stability_distance_bound, trace_identity_check,
    SpectralSummary,
};
use crate::cache::{Cache, CacheStatus};
use crate::characters::character_table;
use crate::error::Result;
use crate::families::{
    canonical_family, containment_check, greedy_maximal_intersecting, h_family, inner_edge_count, is_intersecting,
    key_lemma_scan, project_restriction_form, random_family, restriction_form_constants, restriction_product_check,
    Family, KeyLemmaParams, Projector,
};
use crate::graphs::{block_structure_check, eigenfunction_violation, extension_bijection_preserves_edges, GraphKind, MatchingGraph};
use crate::isoperimetry::{neighborhood, nice_partition_sequence, verify_mcdiarmid, verify_partition_sequence, Adjacency};
use crate::matchings::{
    cycle_type, derangement_count_recurrence, derangement_count_sieve, sphere_size, MatchingIter, MatchingSpace,
    PerfectMatching,
};
use crate::mis::extremal_families;
use crate::partitions::{even_census_below, Partition};
use crate::spherical::{
    derangement_eigenvalue, representative_cycle_type, scheme_table, zonal_closed_form, zonal_eigenvalue, SchemeTable,
};

/// Float tolerance for dense eigenvalue comparisons.
pub const DENSE_TOL: f64 = 1e-8;

/// Shared state for one run.
pub struct Ctx {
    pub seed: u64,
    pub trials: usize,
    pub cache: Option<Cache>,
}

impl Ctx {
    pub fn table(&self, n: usize) -> Result<Arc<SchemeTable>> {
        match &self.cache {
            Some(cache) => {
                let (table, status) = cache.scheme(n)?;
                if let CacheStatus::Rebuilt(why) = status {
                    eprintln!("warning: rebuilt {}: {why}", cache.scheme_path(n).display());
                }
                Ok(table)
            }
            None => scheme_table(n),
        }
    }

    fn rng(&self, salt: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(salt);
        rng
    }
}

pub type Outcome = Result<(bool, String)>;

pub struct CheckSpec {
    pub name: &'static str,
    pub statement: &'static str,
    /// `None` for checks that do not depend on `n`.
    pub supported: Option<RangeInclusive<usize>>,
    /// Range used when no `n` is given.
    pub default: RangeInclusive<usize>,
    pub run: fn(&Ctx, usize) -> Outcome,
}

macro_rules! check {
    ($name:expr, $statement:expr, $supported:expr, $default:expr, $run:expr) => {
        CheckSpec {
            name: $name,
            statement: $statement,
            supported: Some($supported),
            default: $default,
            run: $run,
        }
    };
}

pub fn registry() -> Vec<CheckSpec> {
    vec![
        check!("counting", "|M_2n| = (2n-1)!! by enumeration; rank and unrank are inverse", 1..=7, 1..=6, counting),
        check!("spheres", "|Ω_λ| = 2^n n!/(2^l(λ) z_λ) matches the enumerated cycle types", 1..=6, 1..=5, spheres),
        check!("derangements", "D_2n by recurrence, inclusion-exclusion and brute force agree", 1..=6, 1..=5, derangements),
        CheckSpec {
            name: "derangement-limit",
            statement: "D_20/19!! lies within 0.02 of 1/sqrt(e)",
            supported: None,
            default: 10..=10,
            run: derangement_limit,
        },
        check!("characters", "character table of S_2n: row and column orthogonality, degrees by the hook rule", 1..=6, 1..=5, characters),
        check!("spherical", "φ_μ at the identity is 1; spherical orthogonality; zonal closed form; coset representatives", 2..=6, 2..=6, spherical),
        check!("eigenvalues", "η_(n) = D_2n and η_min = η_(n-1,1) = -D_2n/(2(n-1)), all integral", 2..=6, 2..=6, eigenvalues),
        check!("zonal-eigenvalue", "η_(n-1,1) from the zonal closed form equals -D_2n/(2(n-1))", 2..=12, 2..=7, zonal),
        check!("trace", "Σ f^2μ η_μ^2 = (2n-1)!! D_2n", 2..=6, 2..=6, trace),
        check!("magnitudes", "η_μ^2 f^2μ <= (2n-1)!! D_2n; the two largest |η| sit at (n) and (n-1,1)", 3..=6, 3..=6, magnitudes),
        check!("dense-spectrum", "dense eigenvalues of the derangement graph are η_μ with multiplicity f^2μ", 2..=5, 2..=5, dense_spectrum),
        check!("eigenfunctions", "v_μ(m) = φ_μ(d(m*, m)) satisfies A v_μ = η_μ v_μ exactly", 2..=5, 2..=5, eigenfunctions),
        check!("degrees", "vertex degrees of the derangement, transposition and near-perfect graphs", 2..=6, 2..=5, degrees),
        check!("near-perfect", "H' equals H under extension; its least eigenvalue is -2^(n-2)(n-2)!", 3..=5, 3..=4, near_perfect),
        check!("cross-ratio", "|S||T| <= N^2 (|η_2|/(d+|η_2|))^2 = ((2n-3)!!)^2 on H'", 3..=5, 3..=4, cross_ratio),
        check!("blocks", "T_n splits by the partner of 2n into copies of T_(n-1) joined by permutation matrices", 3..=6, 3..=5, blocks),
        check!("ratio-bound", "ratio bound of the derangement graph equals (2n-3)!!", 2..=6, 2..=6, ratio),
        check!("extremal", "every maximum intersecting family is some F_ij, and each distinct F_ij is found", 2..=4, 2..=4, extremal),
        check!("projections", "Parseval and idempotence of E_μ on random families", 3..=4, 3..=4, projections),
        check!("restriction-form", "E_(n-1,1) 1_F (m) = a Σ_(ij∈m) |F↓ij| + b |F| with re-derived a, b", 3..=5, 3..=5, restriction_form),
        check!("distance", "D(F_ij) = 0 and D^2 <= stability bound on random intersecting families", 3..=5, 3..=5, distance),
        check!("h-family", "|H_12| - 2 = (2n-3)!! - D_2(n-1) - D_2(n-2); intersecting; not canonical for n >= 4", 3..=6, 3..=6, h_family_check),
        check!("restriction-products", "|F↓ij| |F↓ik| <= ((2n-5)!!)^2 for intersecting F", 3..=5, 3..=5, restriction_products),
        check!("key-lemma", "edge scan recovers the defining edge; residues and stability diagnostics", 3..=5, 3..=5, key_lemma),
        check!("census", "among even shapes of 2n only (2n) and (2n-2,2) lie below f^(2n-4,4)", 8..=12, 8..=12, census),
        check!("diameter", "T_n has diameter n-1 and every eccentricity is equal", 2..=6, 2..=6, diameter),
        check!("partition-sequence", "nested partitions refine, end in singletons, and siblings correspond at distance <= 1", 2..=6, 2..=5, partition_sequence),
        check!("neighborhoods", "N_h(X) is monotone in h and covers M_2n at h = n-1", 2..=5, 2..=5, neighborhoods),
        check!("mcdiarmid", "|N_h(X)| >= (1 - exp(-2(h-h0)^2/Σc^2)) (2n-1)!! for both cost sums", 2..=6, 2..=5, mcdiarmid),
    ]
}

fn space(n: usize) -> Result<MatchingSpace> {
    MatchingSpace::new(n)
}

fn counting(_: &Ctx, n: usize) -> Outcome {
    let s = space(n)?;
    let want = odd_double_factorial(n);
    let stride = if n <= 6 { 1 } else { 97 };
    let mut ranks_ok = true;
    for i in (0..s.len()).step_by(stride) {
        let m = s.get(i);
        ranks_ok &= m.rank() == i as u64 && PerfectMatching::unrank(n, i as u64)? == *m;
    }
    let streamed = MatchingIter::new(n).count();
    Ok((
        BigInt::from(s.len()) == want && streamed == s.len() && ranks_ok,
        format!("|M_{}| = {} (expected {want}); rank round trip {}", 2 * n, s.len(), ok_word(ranks_ok)),
    ))
}

fn ok_word(ok: bool) -> &'static str {
    if ok {
        "ok"
    } else {
        "FAILED"
    }
}

fn spheres(_: &Ctx, n: usize) -> Outcome {
    let s = space(n)?;
    let star = PerfectMatching::identity(n);
    let mut counts: HashMap<Partition, u64> = HashMap::new();
    for m in s.iter() {
        *counts.entry(cycle_type(&star, m)?).or_default() += 1;
    }
    let shapes = crate::partitions::enumerate_partitions(n);
    let mut bad = Vec::new();
    for l in &shapes {
        if sphere_size(l)? != BigInt::from(counts.get(l).copied().unwrap_or(0)) {
            bad.push(l.to_string());
        }
    }
    Ok((bad.is_empty(), format!("{} shapes checked; mismatches: [{}]", shapes.len(), bad.join(" "))))
}

fn derangements(_: &Ctx, n: usize) -> Outcome {
    let s = space(n)?;
    let star = PerfectMatching::identity(n);
    let brute = s.iter().filter(|m| m.common_edges(&star) == 0).count();
    let rec = derangement_count_recurrence(n);
    let sieve = derangement_count_sieve(n);
    Ok((
        rec == sieve && rec == BigInt::from(brute),
        format!("D_{} = {rec} (sieve {sieve}, enumeration {brute})", 2 * n),
    ))
}

fn derangement_limit(_: &Ctx, _: usize) -> Outcome {
    let ratio = to_f64(&rational(derangement_count_recurrence(10), odd_double_factorial(10)));
    let target = (-0.5f64).exp();
    Ok((
        (ratio - target).abs() <= 0.02,
        format!("D_20/19!! = {ratio:.6}, 1/sqrt(e) = {target:.6}"),
    ))
}

fn characters(_: &Ctx, n: usize) -> Outcome {
    let t = character_table(2 * n)?;
    let identity = Partition::column(2 * n);
    let degrees = t
        .partitions()
        .iter()
        .all(|l| t.get(l, &identity) == Some(&l.dimension()));
    let rows = t.rows_orthogonal();
    let cols = t.columns_orthogonal();
    Ok((
        degrees && rows && cols,
        format!(
            "S_{}: {} irreducibles; rows {}, columns {}, degrees {}",
            2 * n,
            t.partitions().len(),
            ok_word(rows),
            ok_word(cols),
            ok_word(degrees)
        ),
    ))
}

fn spherical(ctx: &Ctx, n: usize) -> Outcome {
    let t = ctx.table(n)?;
    let identity = t.identity_values_are_one();
    let orth = t.orthogonality_violation()?;
    let hook = Partition::hook_n_minus_one(n)?;
    let mut zonal_bad = Vec::new();
    let mut reps_bad = Vec::new();
    for l in t.partitions() {
        if t.phi(&hook, l) != Some(&zonal_closed_form(l)?) {
            zonal_bad.push(l.to_string());
        }
        if representative_cycle_type(l)? != *l {
            reps_bad.push(l.to_string());
        }
    }
    Ok((
        identity && orth.is_none() && zonal_bad.is_empty() && reps_bad.is_empty(),
        format!(
            "identity {}; orthogonality {}; zonal mismatches [{}]; representative mismatches [{}]",
            ok_word(identity),
            orth.map_or("ok".to_string(), |(a, b)| format!("fails at {a} {b}")),
            zonal_bad.join(" "),
            reps_bad.join(" ")
        ),
    ))
}

fn eigenvalues(ctx: &Ctx, n: usize) -> Outcome {
    let t = ctx.table(n)?;
    let d = derangement_count_recurrence(n);
    let hook = Partition::hook_n_minus_one(n)?;
    let eta_hook = t.eta(&hook).cloned().unwrap_or_default();
    let expected = rational(-d.clone(), BigInt::from(2 * (n - 1)));
    let min = t.etas().iter().min().cloned().unwrap_or_default();
    let direct_ok = t
        .partitions()
        .iter()
        .zip(t.etas())
        .all(|(mu, eta)| derangement_eigenvalue(mu).map(|e| &e == eta).unwrap_or(false));
    Ok((
        t.top_eigenvalue_is_derangement_count() && int_rational(eta_hook.clone()) == expected && min == eta_hook && direct_ok,
        format!("η_(n) = {d}; η_{hook} = {eta_hook}; -D/(2(n-1)) = {expected}; η_min = {min}"),
    ))
}

fn zonal(_: &Ctx, n: usize) -> Outcome {
    let eta = zonal_eigenvalue(n)?;
    let d = derangement_count_recurrence(n);
    let expected = rational(-d.clone(), BigInt::from(2 * (n - 1)));
    Ok((
        int_rational(eta.clone()) == expected,
        format!("η_(n-1,1) = {eta}; -D_{}/(2(n-1)) = {expected}", 2 * n),
    ))
}

fn trace(ctx: &Ctx, n: usize) -> Outcome {
    let r = trace_identity_check(&*ctx.table(n)?);
    Ok((r.passed, format!("Σ f η^2 = {}; (2n-1)!! D_2n = {}", r.weighted_square_sum, r.twice_edges)))
}

fn magnitudes(ctx: &Ctx, n: usize) -> Outcome {
    let c = magnitude_census(&*ctx.table(n)?)?;
    let top: Vec<String> = c.largest.iter().map(|(mu, v)| format!("{mu}:{v}")).collect();
    Ok((
        c.trace_bound_holds && c.attained_at_top_shapes,
        format!("largest |η|: {}; trace bound {}", top.join(" "), ok_word(c.trace_bound_holds)),
    ))
}

/// Dense eigenvalues agree with `(value, multiplicity)` pairs within tolerance.
pub fn dense_agrees(dense: &[f64], expected: &[(BigInt, BigInt)]) -> (bool, String) {
    let mut ok = true;
    let mut used = 0usize;
    let mut parts = Vec::new();
    for (value, mult) in expected {
        let v = value.to_string().parse::<f64>().unwrap_or(f64::NAN);
        let found = dense.iter().filter(|x| (**x - v).abs() <= DENSE_TOL).count();
        used += found;
        ok &= BigInt::from(found) == *mult;
        parts.push(format!("{value}x{found}"));
    }
    ok &= used == dense.len();
    (ok, parts.join(" "))
}

fn dense_spectrum(ctx: &Ctx, n: usize) -> Outcome {
    let t = ctx.table(n)?;
    let s = space(n)?;
    let dense = MatchingGraph::new(&s, GraphKind::Derangement).dense_spectrum();
    let mut expected: Vec<(BigInt, BigInt)> = Vec::new();
    for (_, eta, mult) in t.spectrum() {
        match expected.iter_mut().find(|(v, _)| *v == eta) {
            Some(slot) => slot.1 += mult,
            None => expected.push((eta, mult)),
        }
    }
    let (ok, detail) = dense_agrees(&dense, &expected);
    Ok((ok, format!("{} eigenvalues: {detail}", dense.len())))
}

fn eigenfunctions(ctx: &Ctx, n: usize) -> Outcome {
    let violation = eigenfunction_violation(&space(n)?, &*ctx.table(n)?)?;
    Ok((
        violation.is_none(),
        violation.map_or("all μ exact".to_string(), |mu| format!("fails at {mu}")),
    ))
}

fn degrees(_: &Ctx, n: usize) -> Outcome {
    let s = space(n)?;
    let stride = if n <= 5 { 1 } else { 11 };
    let mut parts = Vec::new();
    let mut ok = true;
    for kind in [GraphKind::Derangement, GraphKind::Transposition, GraphKind::HamiltonianPath] {
        let g = MatchingGraph::new(&s, kind);
        let bad = g.degree_violations(stride);
        ok &= bad.is_empty();
        parts.push(format!("{kind:?} {} ({} bad)", g.degree_formula(), bad.len()));
    }
    Ok((ok, parts.join("; ")))
}

fn near_perfect(_: &Ctx, n: usize) -> Outcome {
    let s = space(n)?;
    let same = extension_bijection_preserves_edges(&s);
    let dense = MatchingGraph::near_perfect(&s)?.dense_spectrum();
    let min = dense.iter().copied().fold(f64::INFINITY, f64::min);
    let want = -(crate::arith::factorial(n - 2) * (BigInt::from(1) << (n - 2)));
    let want_f = want.to_string().parse::<f64>().unwrap_or(f64::NAN);
    Ok((
        same && (min - want_f).abs() <= DENSE_TOL,
        format!("extension {}; least eigenvalue {min:.9} vs {want}", ok_word(same)),
    ))
}

fn cross_ratio(_: &Ctx, n: usize) -> Outcome {
    let s = space(n)?;
    let dense = MatchingGraph::near_perfect(&s)?.dense_spectrum();
    let summary = SpectralSummary::from_dense(&dense)?;
    let product = cross_product_bound(&summary)?;
    let scale = odd_double_factorial(n - 1);
    let want = int_rational(&scale * &scale);
    Ok((
        product == want,
        format!(
            "d = {}, |η_2| = {}, N^2 rhs^2 = {product}, ((2n-3)!!)^2 = {want}",
            summary.degree,
            summary.second_magnitude()
        ),
    ))
}

fn blocks(_: &Ctx, n: usize) -> Outcome {
    let r = block_structure_check(n)?;
    Ok((
        r.passed(),
        format!(
            "{} blocks of {}; diagonal {}, off-diagonal {}",
            r.block_count,
            r.block_sizes.first().copied().unwrap_or(0),
            ok_word(r.diagonal_blocks_match_smaller_graph),
            ok_word(r.off_diagonal_blocks_are_permutations)
        ),
    ))
}

fn ratio(ctx: &Ctx, n: usize) -> Outcome {
    let b = ratio_bound(&SpectralSummary::from_scheme(&*ctx.table(n)?)?)?;
    let want = odd_double_factorial(n - 1);
    Ok((b == int_rational(want.clone()), format!("bound {b}, (2n-3)!! = {want}")))
}

fn extremal(ctx: &Ctx, n: usize) -> Outcome {
    let s = space(n)?;
    let (r, _) = extremal_families(&MatchingGraph::new(&s, GraphKind::Derangement), &*ctx.table(n)?)?;
    Ok((
        r.passed,
        format!(
            "α = {} (ratio bound {}); {} maximum families, {} canonical, expected {}",
            r.maximum_size,
            r.ratio_bound,
            r.count,
            r.canonical,
            r.expected
        ),
    ))
}

fn projections(ctx: &Ctx, n: usize) -> Outcome {
    let s = space(n)?;
    let t = ctx.table(n)?;
    let proj = Projector::new(&s, &t)?;
    let mut rng = ctx.rng(100 + n as u64);
    let total = odd_double_factorial(n);
    let mut parseval_bad = 0;
    let mut idempotence_bad = 0;
    let families = 50;
    for _ in 0..families {
        let p = rng.gen_range(0.05..0.6);
        let f = random_family(&s, &mut rng, p);
        let sum: Rational = t
            .partitions()
            .iter()
            .map(|mu| proj.projection_norm_sq(&f, mu))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .sum();
        if sum != rational(f.len(), total.clone()) {
            parseval_bad += 1;
        }
        let indicator: Vec<Rational> = (0..s.len()).map(|i| int_rational(u8::from(f.contains(i)))).collect();
        for mu in t.partitions() {
            let once = proj.project_function(&indicator, mu)?;
            if proj.project_function(&once, mu)? != once {
                idempotence_bad += 1;
            }
        }
    }
    Ok((
        parseval_bad == 0 && idempotence_bad == 0,
        format!("{families} families: Parseval failures {parseval_bad}, idempotence failures {idempotence_bad}"),
    ))
}

fn restriction_form(ctx: &Ctx, n: usize) -> Outcome {
    let s = space(n)?;
    let t = ctx.table(n)?;
    let proj = Projector::new(&s, &t)?;
    let hook = Partition::hook_n_minus_one(n)?;
    let mut rng = ctx.rng(200 + n as u64);
    let mut evaluations = 0;
    let mut bad = 0;
    for _ in 0..50 {
        let p = rng.gen_range(0.02..0.5);
        let f = random_family(&s, &mut rng, p);
        for _ in 0..20 {
            let idx = rng.gen_range(0..s.len());
            evaluations += 1;
            if project_restriction_form(&s, &f, s.get(idx))? != proj.project(&f, &hook, idx)? {
                bad += 1;
            }
        }
    }
    let (a, b) = restriction_form_constants(n);
    Ok((
        bad == 0,
        format!(
            "a = {a}, b = {b}; {evaluations} evaluations, {bad} disagreements (the constant (n-1)/(n(2n-3)!!) for a disagrees with the projection)"
        ),
    ))
}

fn distance(ctx: &Ctx, n: usize) -> Outcome {
    let s = space(n)?;
    let t = ctx.table(n)?;
    let proj = Projector::new(&s, &t)?;
    let canonical_zero = proj.distance_to_u(&canonical_family(&s, 1, 2)?)?.is_zero()
        && proj.distance_to_u(&canonical_family(&s, 3, 2 * n)?)?.is_zero();
    let full_zero = proj.distance_to_u(&Family::full(&s))?.is_zero();
    let summary = SpectralSummary::from_scheme(&t)?;
    let mut rng = ctx.rng(300 + n as u64);
    let mut checked = 0;
    let mut bad = 0;
    let mut not_applicable = false;
    for _ in 0..10 {
        let f = greedy_maximal_intersecting(&s, &mut rng);
        let alpha = rational(f.len(), odd_double_factorial(n));
        match stability_distance_bound(&summary, &alpha, inner_edge_count(&s, &f)?) {
            Ok(bound) => {
                checked += 1;
                if proj.distance_to_u(&f)? > bound {
                    bad += 1;
                }
            }
            Err(_) => not_applicable = true,
        }
    }
    let note = if not_applicable { " (stability bound undefined: zero spectral gap)" } else { "" };
    Ok((
        canonical_zero && full_zero && bad == 0,
        format!(
            "D(F_ij) = 0 {}; D(M_2n) = 0 {}; {checked} random families within bound, {bad} outside{note}",
            ok_word(canonical_zero),
            ok_word(full_zero)
        ),
    ))
}

fn h_family_check(_: &Ctx, n: usize) -> Outcome {
    let s = space(n)?;
    let h = h_family(&s)?;
    let want = odd_double_factorial(n - 1) - derangement_count_recurrence(n - 1) - derangement_count_recurrence(n - 2);
    let size_ok = BigInt::from(h.len()) - 2 == want;
    let intersecting = is_intersecting(&s, &h)?;
    let contained = containment_check(&s, &h)?.edge;
    let containment_ok = if n >= 4 { contained.is_none() } else { true };
    Ok((
        size_ok && intersecting && containment_ok,
        format!(
            "|H| = {} (size - 2 = {}, expected {want}); intersecting {}; common edge {}",
            h.len(),
            h.len() - 2,
            ok_word(intersecting),
            contained.map_or("none".to_string(), |(i, j)| format!("{i}-{j}"))
        ),
    ))
}

fn restriction_products(ctx: &Ctx, n: usize) -> Outcome {
    let s = space(n)?;
    let mut rng = ctx.rng(400 + n as u64);
    let mut families = vec![canonical_family(&s, 1, 2)?, h_family(&s)?];
    for _ in 0..20 {
        families.push(greedy_maximal_intersecting(&s, &mut rng));
    }
    let mut worst = BigInt::zero();
    let mut bound = String::new();
    let mut ok = true;
    for f in &families {
        let r = restriction_product_check(&s, f)?;
        ok &= r.passed;
        worst = worst.max(r.max_product.parse::<BigInt>().unwrap_or_default());
        bound = r.bound;
    }
    Ok((ok, format!("{} families; largest product {worst}, bound {bound}", families.len())))
}

fn key_lemma(ctx: &Ctx, n: usize) -> Outcome {
    let s = space(n)?;
    let t = ctx.table(n)?;
    let proj = Projector::new(&s, &t)?;
    let params = KeyLemmaParams::default();
    let canonical = key_lemma_scan(&proj, &canonical_family(&s, 1, 2)?, &params)?;
    let h = key_lemma_scan(&proj, &h_family(&s)?, &params)?;
    let ok = canonical.edge == (1, 2)
        && canonical.residue == 0
        && h.residue == h.size as u64 - h.max_restriction
        && canonical.within_bound != Some(false)
        && h.within_bound != Some(false);
    Ok((
        ok,
        format!(
            "F_12: edge {}-{}, residue {}; H_12: edge {}-{}, residue {}, D^2 = {}",
            canonical.edge.0, canonical.edge.1, canonical.residue, h.edge.0, h.edge.1, h.residue, h.distance_sq
        ),
    ))
}

fn census(_: &Ctx, n: usize) -> Outcome {
    let threshold = Partition::new(vec![2 * n - 4, 4]).dimension();
    let found = even_census_below(n, &threshold);
    let shapes: Vec<String> = found.iter().map(|(p, d)| format!("{p}:{d}")).collect();
    let ok = found.len() == 2 && found[0].0 == Partition::row(2 * n) && found[1].0 == Partition::new(vec![2 * n - 2, 2]);
    let m = 2 * n as i64;
    let printed = binomial_signed(m - 4, 4) - binomial_signed(m - 4, 3);
    let hook_binomial = binomial_signed(m, 4) - binomial_signed(m, 3);
    Ok((
        ok,
        format!(
            "threshold f^({},4) = {threshold} (hook rule; binom(2n,4) - binom(2n,3) = {hook_binomial}; binom(2n-4,4) - binom(2n-4,3) = {printed} disagrees); below: {}",
            2 * n - 4,
            shapes.join(" ")
        ),
    ))
}

fn diameter(_: &Ctx, n: usize) -> Outcome {
    let s = space(n)?;
    let g = MatchingGraph::new(&s, GraphKind::Transposition);
    let d = g.diameter()?;
    let transitive = if n <= 4 { g.eccentricities_all_equal()? } else { true };
    Ok((
        d == n - 1 && transitive,
        format!("diameter {d}; eccentricities {}", if n <= 4 { ok_word(transitive) } else { "not scanned" }),
    ))
}

fn partition_sequence(_: &Ctx, n: usize) -> Outcome {
    let s = space(n)?;
    let g = MatchingGraph::new(&s, GraphKind::Transposition);
    let seq = nice_partition_sequence(&s)?;
    let r = verify_partition_sequence(&g, &seq)?;
    Ok((
        r.passed,
        format!(
            "blocks {:?}; {} sibling pairs, max displacement {}; Σc^2 = {}",
            r.block_counts,
            r.sibling_pairs_checked,
            r.max_displacement,
            seq.cost_square_sum()
        ),
    ))
}

fn neighborhoods(ctx: &Ctx, n: usize) -> Outcome {
    let s = space(n)?;
    let adj = Adjacency::new(&MatchingGraph::new(&s, GraphKind::Transposition));
    let mut rng = ctx.rng(500 + n as u64);
    let mut ok = true;
    for _ in 0..5 {
        let x = Family::from_indices(&s, [rng.gen_range(0..s.len())])?;
        let sizes = (0..n as u32)
            .map(|h| neighborhood(&adj, &s, &x, h).map(|f| f.len()))
            .collect::<Result<Vec<_>>>()?;
        ok &= sizes.windows(2).all(|w| w[0] <= w[1]) && sizes.last() == Some(&s.len());
    }
    Ok((ok, format!("5 random centres; ball at h = n-1 covers {} matchings", s.len())))
}

fn mcdiarmid(ctx: &Ctx, n: usize) -> Outcome {
    let r = verify_mcdiarmid(&space(n)?, ctx.trials, ctx.seed)?;
    let margin = r
        .records
        .iter()
        .map(|x| x.observed_fraction - x.bound_fraction)
        .fold(f64::INFINITY, f64::min);
    Ok((
        r.passed,
        format!(
            "{} trials, {} records, {} violations, least margin {:.6}",
            r.trials,
            r.records.len(),
            r.violations,
            if margin.is_finite() { margin } else { 0.0 }
        ),
    ))
}

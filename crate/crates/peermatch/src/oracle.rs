//! Exhaustive ground truth on small instances: enumerate every quota-exact
//! matching, identify the stable ones, and compute exact welfare extremes,
//! price of anarchy and stability, and gamma-star.

use serde::Serialize;
use thiserror::Error;

use crate::market::{
    internal_edge_weight, social_welfare, welfare_delta, HouseId, Instance, Matching,
};
use crate::stability::is_two_sided_exchange_stable;

/// Default cap on the padded student count for enumeration.
pub const DEFAULT_ENUMERATION_CAP: usize = 12;
/// Hard guard on the number of matchings an enumeration may visit.
pub const MATCHING_COUNT_GUARD: u128 = 10_000_000;

#[derive(Debug, Error, PartialEq)]
pub enum OracleError {
    #[error("enumeration too large: {0}")]
    TooLarge(String),
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
}

/// Number of distinct quota-exact assignments, `n! / prod(q_h!)`.
pub fn matching_count(inst: &Instance) -> u128 {
    let mut count: u128 = 1;
    let mut remaining = inst.student_count() as u128;
    for h in 0..inst.house_count() {
        let q = inst.quota(h) as u128;
        count *= binomial(remaining, q);
        remaining -= q;
    }
    count
}

fn binomial(n: u128, k: u128) -> u128 {
    let k = k.min(n - k);
    let mut out: u128 = 1;
    for i in 0..k {
        out = out * (n - i) / (i + 1);
    }
    out
}

/// Streams every distinct quota-exact matching exactly once, in
/// lexicographic order of the assignment vector.
pub fn enumerate_matchings(
    inst: &Instance,
    cap: usize,
) -> Result<MatchingEnumerator<'_>, OracleError> {
    if inst.student_count() > cap {
        return Err(OracleError::TooLarge(format!(
            "{} padded students exceed the cap of {cap}",
            inst.student_count()
        )));
    }
    let count = matching_count(inst);
    if count > MATCHING_COUNT_GUARD {
        return Err(OracleError::TooLarge(format!(
            "{count} matchings exceed the guard of {MATCHING_COUNT_GUARD}"
        )));
    }
    let mut assignment = Vec::with_capacity(inst.student_count());
    for h in 0..inst.house_count() {
        assignment.extend(std::iter::repeat_n(h, inst.quota(h)));
    }
    Ok(MatchingEnumerator {
        inst,
        assignment,
        done: false,
    })
}

/// Iterator over the distinct permutations of the house-multiset assignment.
#[derive(Debug)]
pub struct MatchingEnumerator<'a> {
    inst: &'a Instance,
    assignment: Vec<HouseId>,
    done: bool,
}

impl Iterator for MatchingEnumerator<'_> {
    type Item = Matching;

    fn next(&mut self) -> Option<Matching> {
        if self.done {
            return None;
        }
        let current = Matching::from_assignment(self.inst, self.assignment.clone())
            .expect("enumerated assignments are quota-exact");
        if !next_multiset_permutation(&mut self.assignment) {
            self.done = true;
        }
        Some(current)
    }
}

/// Advances to the next lexicographic permutation of a multiset; false when
/// the sequence was the last one.
fn next_multiset_permutation(seq: &mut [usize]) -> bool {
    if seq.len() < 2 {
        return false;
    }
    let mut i = seq.len() - 1;
    while i > 0 && seq[i - 1] >= seq[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let pivot = i - 1;
    let mut j = seq.len() - 1;
    while seq[j] <= seq[pivot] {
        j -= 1;
    }
    seq.swap(pivot, j);
    seq[i..].reverse();
    true
}

/// Everything the full scan learns about an instance.
#[derive(Debug, Clone, Serialize)]
pub struct ExactSummary {
    pub matchings_enumerated: u64,
    pub stable_count: u64,
    pub max_welfare: f64,
    pub max_stable_welfare: f64,
    pub min_stable_welfare: f64,
    pub exact_poa: f64,
    pub exact_pos: f64,
    pub gamma_star: f64,
    pub min_stable_gamma: f64,
    /// Price of anarchy recomputed through the gamma decomposition, present
    /// when the one-sided welfare identity applies.
    pub poa_via_gamma: Option<f64>,
    pub best_matching: Vec<HouseId>,
    pub best_stable_matching: Vec<HouseId>,
    pub worst_stable_matching: Vec<HouseId>,
}

fn ratio(numerator: f64, denominator: f64) -> f64 {
    if denominator.abs() <= f64::EPSILON {
        if numerator.abs() <= f64::EPSILON {
            1.0
        } else {
            f64::INFINITY
        }
    } else {
        numerator / denominator
    }
}

/// Full scan over every matching, judging stability with the production
/// checker. Also cross-computes the price of anarchy through the gamma
/// decomposition whenever the instance is one-sided with objective values
/// and exact quotas.
pub fn exact_extremes(inst: &Instance, cap: usize) -> Result<ExactSummary, OracleError> {
    let mut enumerated: u64 = 0;
    let mut stable_count: u64 = 0;
    let mut max_welfare = f64::NEG_INFINITY;
    let mut best_matching = Vec::new();
    let mut max_stable = f64::NEG_INFINITY;
    let mut best_stable = Vec::new();
    let mut min_stable = f64::INFINITY;
    let mut worst_stable = Vec::new();
    let mut best_internal = 0.0_f64;
    let mut min_stable_internal = f64::INFINITY;

    for matching in enumerate_matchings(inst, cap)? {
        enumerated += 1;
        let welfare = social_welfare(inst, &matching);
        let internal = internal_edge_weight(inst, &matching);
        best_internal = best_internal.max(internal);
        if welfare > max_welfare {
            max_welfare = welfare;
            best_matching = matching.assignment().to_vec();
        }
        if is_two_sided_exchange_stable(inst, &matching).stable {
            stable_count += 1;
            if welfare > max_stable {
                max_stable = welfare;
                best_stable = matching.assignment().to_vec();
            }
            if welfare < min_stable {
                min_stable = welfare;
                worst_stable = matching.assignment().to_vec();
            }
            min_stable_internal = min_stable_internal.min(internal);
        }
    }

    let total = inst.network().total_weight();
    let gamma_star = if total > 0.0 { best_internal / total } else { 0.0 };
    let min_stable_gamma = if total > 0.0 && min_stable_internal.is_finite() {
        min_stable_internal / total
    } else {
        0.0
    };
    let poa_via_gamma = if inst.is_zero_scoring()
        && inst.is_objective()
        && inst.quotas_exact()
        && total > 0.0
    {
        let q: f64 = inst
            .houses()
            .iter()
            .map(|h| h.quota as f64 * h.base_desirability)
            .sum::<f64>()
            / (2.0 * total);
        Some(ratio(q + gamma_star, q + min_stable_gamma))
    } else {
        None
    };

    Ok(ExactSummary {
        matchings_enumerated: enumerated,
        stable_count,
        max_welfare,
        max_stable_welfare: max_stable,
        min_stable_welfare: min_stable,
        exact_poa: ratio(max_welfare, min_stable),
        exact_pos: ratio(max_welfare, max_stable),
        gamma_star,
        min_stable_gamma,
        poa_via_gamma,
        best_matching,
        best_stable_matching: best_stable,
        worst_stable_matching: worst_stable,
    })
}

/// All stable matchings of an enumerable instance.
pub fn stable_matchings(inst: &Instance, cap: usize) -> Result<Vec<Matching>, OracleError> {
    Ok(enumerate_matchings(inst, cap)?
        .filter(|m| is_two_sided_exchange_stable(inst, m).stable)
        .collect())
}

/// Quotient enumeration for fully interchangeable houses (equal quotas,
/// equal objective values, zero scoring): yields one representative per
/// house-relabeling class, `n! / (prod(q!) * m!)` matchings in total.
pub fn enumerate_matchings_up_to_house_symmetry(
    inst: &Instance,
    cap: usize,
) -> Result<impl Iterator<Item = Matching> + '_, OracleError> {
    let houses = inst.houses();
    let interchangeable = inst.is_zero_scoring()
        && inst.is_objective()
        && houses.iter().all(|h| h.quota == houses[0].quota)
        && houses
            .iter()
            .all(|h| h.base_desirability == houses[0].base_desirability);
    if !interchangeable {
        return Err(OracleError::HypothesisViolated(
            "quotient enumeration needs identical houses".into(),
        ));
    }
    Ok(enumerate_matchings(inst, cap)?.filter(houses_in_first_appearance_order))
}

/// Canonical representative: house labels appear for the first time in
/// increasing order along the assignment vector.
fn houses_in_first_appearance_order(matching: &Matching) -> bool {
    let mut next_fresh = 0;
    for &h in matching.assignment() {
        if h == next_fresh {
            next_fresh += 1;
        } else if h > next_fresh {
            return false;
        }
    }
    true
}

/// Outcome of a theorem spot-check over an enumerable instance.
#[derive(Debug, Clone, Serialize)]
pub struct TheoremReport {
    pub pass: bool,
    pub matchings_checked: u64,
    pub local_maxima_found: u64,
    pub counterexample: Option<Vec<HouseId>>,
}

/// No cross-house swap strictly improves the objective.
fn is_swap_local_max(
    inst: &Instance,
    matching: &Matching,
    eps: f64,
    objective: impl Fn(f64, f64) -> f64,
) -> bool {
    let n = inst.student_count();
    for s in 0..n {
        for t in (s + 1)..n {
            if matching.house_of(s) == matching.house_of(t) {
                continue;
            }
            let (dw, dphi) = welfare_delta(inst, matching, s, t).expect("cross-house pair");
            if objective(dw, dphi) > eps {
                return false;
            }
        }
    }
    true
}

/// Checks that every swap-local maximum of the potential is two-sided
/// exchange-stable.
pub fn verify_theorem1(inst: &Instance, cap: usize) -> Result<TheoremReport, OracleError> {
    verify_local_maxima(inst, cap, |_, dphi| dphi)
}

/// Checks that every swap-local maximum of the welfare is two-sided
/// exchange-stable; requires exact quotas and objective desirability.
pub fn verify_theorem2(inst: &Instance, cap: usize) -> Result<TheoremReport, OracleError> {
    if !inst.quotas_exact() {
        return Err(OracleError::HypothesisViolated(
            "quotas must be exactly met (no holes)".into(),
        ));
    }
    if !inst.is_objective() {
        return Err(OracleError::HypothesisViolated(
            "objective desirability required".into(),
        ));
    }
    verify_local_maxima(inst, cap, |dw, _| dw)
}

fn verify_local_maxima(
    inst: &Instance,
    cap: usize,
    objective: impl Fn(f64, f64) -> f64 + Copy,
) -> Result<TheoremReport, OracleError> {
    let eps = inst.epsilon();
    let mut checked = 0;
    let mut local_maxima = 0;
    for matching in enumerate_matchings(inst, cap)? {
        checked += 1;
        if !is_swap_local_max(inst, &matching, eps, objective) {
            continue;
        }
        local_maxima += 1;
        if !is_two_sided_exchange_stable(inst, &matching).stable {
            return Ok(TheoremReport {
                pass: false,
                matchings_checked: checked,
                local_maxima_found: local_maxima,
                counterexample: Some(matching.assignment().to_vec()),
            });
        }
    }
    Ok(TheoremReport {
        pass: true,
        matchings_checked: checked,
        local_maxima_found: local_maxima,
        counterexample: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::market::{
        potential, Desirability, HouseScoring, HouseSpec, Instance, InstanceSpec, Matching,
    };
    use crate::testutil::instance_a;

    #[test]
    fn enumeration_counts() {
        let inst = instance_a();
        assert_eq!(matching_count(&inst), 6);
        assert_eq!(enumerate_matchings(&inst, 12).unwrap().count(), 6);

        let spec = InstanceSpec {
            students: 3,
            houses: vec![HouseSpec::new(0, 2, 0.0), HouseSpec::new(1, 1, 0.0)],
            edges: vec![],
            desirability: Desirability::Objective,
            scoring: HouseScoring::Zero,
        };
        let inst = Instance::build(spec).unwrap();
        assert_eq!(enumerate_matchings(&inst, 12).unwrap().count(), 3);

        let spec = InstanceSpec {
            students: 3,
            houses: vec![
                HouseSpec::new(0, 1, 0.0),
                HouseSpec::new(1, 1, 0.0),
                HouseSpec::new(2, 1, 0.0),
            ],
            edges: vec![],
            desirability: Desirability::Objective,
            scoring: HouseScoring::Zero,
        };
        let inst = Instance::build(spec).unwrap();
        assert_eq!(enumerate_matchings(&inst, 12).unwrap().count(), 6);
    }

    #[test]
    fn quotient_enumeration_collapses_house_relabelings() {
        let spec = InstanceSpec {
            students: 4,
            houses: vec![HouseSpec::new(0, 2, 1.0), HouseSpec::new(1, 2, 1.0)],
            edges: vec![(0, 1, 1.0)],
            desirability: Desirability::Objective,
            scoring: HouseScoring::Zero,
        };
        let inst = Instance::build(spec).unwrap();
        let classes: Vec<Vec<usize>> = enumerate_matchings_up_to_house_symmetry(&inst, 12)
            .unwrap()
            .map(|m| m.assignment().to_vec())
            .collect();
        assert_eq!(classes.len(), 3);
        assert!(classes.iter().all(|a| a[0] == 0));

        // unequal values break interchangeability
        let inst = instance_a();
        assert!(matches!(
            enumerate_matchings_up_to_house_symmetry(&inst, 12).map(|_| ()),
            Err(OracleError::HypothesisViolated(_))
        ));
    }

    #[test]
    fn enumeration_yields_distinct_matchings() {
        let inst = instance_a();
        let mut seen = std::collections::HashSet::new();
        for m in enumerate_matchings(&inst, 12).unwrap() {
            assert!(seen.insert(m.assignment().to_vec()));
        }
        assert_eq!(seen.len(), 6);
    }

    #[test]
    fn enumeration_rejects_oversized_instances() {
        let spec = InstanceSpec {
            students: 13,
            houses: vec![HouseSpec::new(0, 7, 0.0), HouseSpec::new(1, 6, 0.0)],
            edges: vec![],
            desirability: Desirability::Objective,
            scoring: HouseScoring::Zero,
        };
        let inst = Instance::build(spec).unwrap();
        assert!(matches!(
            enumerate_matchings(&inst, 12).unwrap_err(),
            OracleError::TooLarge(_)
        ));
    }

    #[test]
    fn extremes_of_instance_a() {
        let inst = instance_a();
        let summary = exact_extremes(&inst, 12).unwrap();
        assert_eq!(summary.matchings_enumerated, 6);
        assert_eq!(summary.max_welfare, 16.0);
        assert_eq!(summary.min_stable_welfare, 16.0);
        assert_eq!(summary.exact_poa, 1.0);
        assert_eq!(summary.exact_pos, 1.0);
        assert_eq!(summary.gamma_star, 1.0);
        // the split matching is unstable, so only friends-together survives
        assert_eq!(summary.stable_count, 2);
        let poa_gamma = summary.poa_via_gamma.unwrap();
        assert!((poa_gamma - summary.exact_poa).abs() < 1e-9);
    }

    #[test]
    fn single_house_has_trivial_prices() {
        let spec = InstanceSpec {
            students: 3,
            houses: vec![HouseSpec::new(0, 3, 2.0)],
            edges: vec![(0, 1, 1.0)],
            desirability: Desirability::Objective,
            scoring: HouseScoring::Zero,
        };
        let inst = Instance::build(spec).unwrap();
        let summary = exact_extremes(&inst, 12).unwrap();
        assert_eq!(summary.matchings_enumerated, 1);
        assert_eq!(summary.exact_poa, 1.0);
        assert_eq!(summary.exact_pos, 1.0);
    }

    #[test]
    fn every_small_instance_has_a_stable_matching() {
        let inst = instance_a();
        assert!(exact_extremes(&inst, 12).unwrap().stable_count >= 1);
    }

    #[test]
    fn theorem1_holds_on_instance_a_and_with_holes() {
        let inst = instance_a();
        assert!(verify_theorem1(&inst, 12).unwrap().pass);

        let spec = InstanceSpec {
            students: 3,
            houses: vec![HouseSpec::new(0, 2, 1.0), HouseSpec::new(1, 2, 0.0)],
            edges: vec![(0, 1, 2.0), (1, 2, 1.0)],
            desirability: Desirability::Objective,
            scoring: HouseScoring::Additive(vec![vec![1.0, 0.5]; 3]),
        };
        let inst = Instance::build(spec).unwrap();
        assert!(verify_theorem1(&inst, 12).unwrap().pass);
    }

    #[test]
    fn theorem2_requires_its_hypotheses() {
        let spec = InstanceSpec {
            students: 3,
            houses: vec![HouseSpec::new(0, 2, 1.0), HouseSpec::new(1, 2, 0.0)],
            edges: vec![],
            desirability: Desirability::Objective,
            scoring: HouseScoring::Zero,
        };
        let inst = Instance::build(spec).unwrap();
        assert!(matches!(
            verify_theorem2(&inst, 12).unwrap_err(),
            OracleError::HypothesisViolated(_)
        ));

        let spec = InstanceSpec {
            students: 2,
            houses: vec![HouseSpec::new(0, 1, 0.0), HouseSpec::new(1, 1, 0.0)],
            edges: vec![],
            desirability: Desirability::Subjective(vec![vec![1.0, 0.0], vec![0.0, 1.0]]),
            scoring: HouseScoring::Zero,
        };
        let inst = Instance::build(spec).unwrap();
        assert!(matches!(
            verify_theorem2(&inst, 12).unwrap_err(),
            OracleError::HypothesisViolated(_)
        ));
    }

    #[test]
    fn theorem2_on_instance_a() {
        let inst = instance_a();
        let report = verify_theorem2(&inst, 12).unwrap();
        assert!(report.pass);
        // the global welfare maximum is stable
        let summary = exact_extremes(&inst, 12).unwrap();
        assert_eq!(summary.exact_pos, 1.0);
    }

    // A stable matching need not be a local maximum of the potential: one
    // student refusing a swap can pin the matching even though the swap
    // would raise the total. Frozen instance: path 0-1 (1), 2-3 (1), plus a
    // heavy separated edge 0-2 (10).
    #[test]
    fn stable_but_not_potential_local_max_fixture() {
        let spec = InstanceSpec {
            students: 4,
            houses: vec![HouseSpec::new(0, 2, 0.0), HouseSpec::new(1, 2, 0.0)],
            edges: vec![(0, 1, 1.0), (2, 3, 1.0), (0, 2, 10.0)],
            desirability: Desirability::Objective,
            scoring: HouseScoring::Zero,
        };
        let inst = Instance::build(spec).unwrap();
        let mu = Matching::from_assignment(&inst, vec![0, 0, 1, 1]).unwrap();
        assert!(is_two_sided_exchange_stable(&inst, &mu).stable);
        // swapping 0 and 3 raises the potential but hurts student 3
        let swapped = mu.apply_swap(0, 3).unwrap();
        assert!(potential(&inst, &swapped) > potential(&inst, &mu));
        assert!(!is_swap_local_max(&inst, &mu, inst.epsilon(), |_, dphi| dphi));
        // theorem 1 still passes: it only speaks about local maxima
        assert!(verify_theorem1(&inst, 12).unwrap().pass);
    }
}

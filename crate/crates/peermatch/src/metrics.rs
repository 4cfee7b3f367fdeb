//! Edge metrics of a matching (internal and cross-house weights, the gamma
//! clustering fraction), the matching-independent ratio Q, price-of-anarchy
//! bounds, and the supporting cross-edge and gamma inequality checks.

use serde::Serialize;
use thiserror::Error;

use crate::market::{internal_edge_weight, Desirability, HouseId, HouseScoring, Instance, InstanceSpec, Matching};
use crate::oracle::{self, OracleError};
use crate::solvers::{
    polish, random_matching, solve_mcmc, GreedyConfig, McmcConfig, PivotRule,
};

#[derive(Debug, Error, PartialEq)]
pub enum BoundsError {
    #[error("the network has no edges")]
    EmptyNetwork,
    #[error("two houses share a desirability value; the gap term is undefined")]
    DegenerateDelta,
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("enumeration too large: {0}")]
    TooLarge(String),
}

/// Edge-weight decomposition of a matching: `cross_weights[h][g]` holds the
/// weight between houses `h` and `g`, the diagonal the within-house weight
/// (each internal edge counted once).
#[derive(Debug, Clone, Serialize)]
pub struct PartitionMetrics {
    pub total_edge_weight: f64,
    pub internal_weight: f64,
    pub cross_weights: Vec<Vec<f64>>,
    pub gamma: f64,
}

/// Computes the full edge decomposition for a matching.
pub fn partition_metrics(inst: &Instance, matching: &Matching) -> PartitionMetrics {
    let m = inst.house_count();
    let mut cross = vec![vec![0.0; m]; m];
    for &(s, t, w) in inst.network().edges() {
        let h = matching.house_of(s);
        let g = matching.house_of(t);
        if h == g {
            cross[h][h] += w;
        } else {
            cross[h][g] += w;
            cross[g][h] += w;
        }
    }
    let internal: f64 = (0..m).map(|h| cross[h][h]).sum();
    let total = inst.network().total_weight();
    PartitionMetrics {
        total_edge_weight: total,
        internal_weight: internal,
        cross_weights: cross,
        gamma: gamma_of(internal, total),
    }
}

/// Gamma with the empty-network convention: zero when there are no edges.
fn gamma_of(internal: f64, total: f64) -> f64 {
    if total > 0.0 {
        internal / total
    } else {
        0.0
    }
}

/// Gamma of a single matching without the full decomposition.
pub fn gamma(inst: &Instance, matching: &Matching) -> f64 {
    gamma_of(
        internal_edge_weight(inst, matching),
        inst.network().total_weight(),
    )
}

/// Exact maximum of gamma over all quota-exact matchings, by enumeration.
pub fn gamma_star_exact(inst: &Instance, cap: usize) -> Result<f64, BoundsError> {
    let total = inst.network().total_weight();
    if total == 0.0 {
        return Ok(0.0);
    }
    let mut best = 0.0_f64;
    let enumeration = oracle::enumerate_matchings(inst, cap).map_err(|e| match e {
        OracleError::TooLarge(msg) => BoundsError::TooLarge(msg),
        OracleError::HypothesisViolated(msg) => BoundsError::HypothesisViolated(msg),
    })?;
    for matching in enumeration {
        best = best.max(internal_edge_weight(inst, &matching));
    }
    Ok(best / total)
}

/// Search budget for the heuristic gamma-star lower bound.
#[derive(Debug, Clone)]
pub struct GammaHeuristicConfig {
    pub seed: u64,
    pub restarts: u32,
    pub mcmc_iterations: u64,
    pub temperature: f64,
}

impl Default for GammaHeuristicConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            restarts: 2,
            mcmc_iterations: 20_000,
            temperature: 1.0,
        }
    }
}

/// Heuristic lower bound on gamma-star: maximizes welfare on a derived
/// instance with zero desirabilities and zero house scoring (there, welfare
/// is exactly twice the internal edge weight), taking the best matching
/// found by the greedy and MCMC solvers across restarts.
pub fn gamma_star_heuristic(inst: &Instance, cfg: &GammaHeuristicConfig) -> f64 {
    gamma_star_heuristic_with_matching(inst, cfg, None).0
}

/// As [`gamma_star_heuristic`], also returning the best matching found. An
/// optional warm start (for example a finer partition with merged houses) is
/// polished and competes with the cold restarts.
pub fn gamma_star_heuristic_with_matching(
    inst: &Instance,
    cfg: &GammaHeuristicConfig,
    warm_start: Option<&Matching>,
) -> (f64, Matching) {
    let derived = edge_only_instance(inst);
    let total = inst.network().total_weight();
    let mut best_internal = f64::NEG_INFINITY;
    let mut best = random_matching(&derived, cfg.seed);
    let mut consider = |candidate: Matching| {
        let internal = internal_edge_weight(&derived, &candidate);
        if internal > best_internal {
            best_internal = internal;
            best = candidate;
        }
    };
    if let Some(start) = warm_start {
        consider(polish(&derived, start));
    }
    for restart in 0..cfg.restarts.max(1) {
        let seed = cfg.seed.wrapping_add(restart as u64);
        let init = random_matching(&derived, seed);
        let greedy_cfg = GreedyConfig {
            seed,
            pivot_rule: PivotRule::FirstImprovement,
            ..GreedyConfig::default()
        };
        consider(crate::solvers::solve_greedy(&derived, &init, &greedy_cfg).0);
        let mcmc_cfg = McmcConfig {
            max_iterations: cfg.mcmc_iterations,
            temperature: cfg.temperature,
            final_temperature: None,
            seed,
            polish: true,
        };
        consider(solve_mcmc(&derived, &init, &mcmc_cfg).0);
    }
    let star = if total > 0.0 {
        best_internal.max(0.0) / total
    } else {
        0.0
    };
    (star, best)
}

fn edge_only_instance(inst: &Instance) -> Instance {
    let mut houses = inst.houses().to_vec();
    for house in &mut houses {
        house.base_desirability = 0.0;
    }
    let edges: Vec<(usize, usize, f64)> = inst
        .network()
        .edges()
        .iter()
        .filter(|&&(s, t, _)| !inst.is_hole(s) && !inst.is_hole(t))
        .copied()
        .collect();
    Instance::build(InstanceSpec {
        students: inst.real_student_count(),
        houses,
        edges,
        desirability: Desirability::Objective,
        scoring: HouseScoring::Zero,
    })
    .expect("derived instance from a valid one")
}

/// The matching-independent ratio of desirability mass to friendship mass,
/// `sum(q_h * D_h) / (2 |E|)`.
pub fn q_ratio(inst: &Instance) -> Result<f64, BoundsError> {
    if !inst.is_objective() {
        return Err(BoundsError::HypothesisViolated(
            "objective desirability required".into(),
        ));
    }
    let total = inst.network().total_weight();
    if total == 0.0 {
        return Err(BoundsError::EmptyNetwork);
    }
    let mass: f64 = inst
        .houses()
        .iter()
        .map(|h| h.quota as f64 * h.base_desirability)
        .sum();
    Ok(mass / (2.0 * total))
}

fn require(cond: bool, what: &str) -> Result<(), BoundsError> {
    if cond {
        Ok(())
    } else {
        Err(BoundsError::HypothesisViolated(what.into()))
    }
}

fn is_nonneg_integer(x: f64) -> bool {
    x >= 0.0 && x.fract() == 0.0
}

/// Checks the hypotheses of the unweighted equal-quota (or equal-value)
/// bound; names the first violated one.
fn check_simple_hypotheses(inst: &Instance) -> Result<(), BoundsError> {
    check_one_sided_setting(inst)?;
    require(
        inst.network().edges().iter().all(|&(_, _, w)| w == 1.0),
        "weights must be 0/1",
    )?;
    require(
        inst.houses().iter().all(|h| h.quota >= 2),
        "every quota must be at least 2",
    )?;
    require(
        inst.houses()
            .iter()
            .all(|h| is_nonneg_integer(h.base_desirability)),
        "house desirabilities must be non-negative integers",
    )?;
    let equal_quotas = inst
        .houses()
        .iter()
        .all(|h| h.quota == inst.houses()[0].quota);
    let equal_values = inst
        .houses()
        .iter()
        .all(|h| h.base_desirability == inst.houses()[0].base_desirability);
    require(
        equal_quotas || equal_values,
        "quotas must be all equal or desirabilities all equal",
    )
}

/// The ambient assumptions of the efficiency analysis: one-sided market,
/// objective desirability, exactly met quotas.
fn check_one_sided_setting(inst: &Instance) -> Result<(), BoundsError> {
    require(inst.is_zero_scoring(), "zero house scoring required")?;
    require(inst.is_objective(), "objective desirability required")?;
    require(inst.quotas_exact(), "quotas must be exactly met (no holes)")
}

/// Price-of-anarchy bound `1 + 2(m-1) * gamma_star` for unweighted networks
/// with equal quotas or equal house values.
pub fn poa_bound_simple(inst: &Instance, gamma_star: f64) -> Result<f64, BoundsError> {
    check_simple_hypotheses(inst)?;
    let m = inst.house_count() as f64;
    Ok(1.0 + 2.0 * (m - 1.0) * gamma_star)
}

/// General price-of-anarchy bound
/// `1 + 2(m-1) * (gamma_star + q_max * w_max / d_delta)`.
pub fn poa_bound_general(inst: &Instance, gamma_star: f64) -> Result<f64, BoundsError> {
    check_one_sided_setting(inst)?;
    require(inst.house_count() >= 2, "at least two houses required")?;
    let d_delta = minimum_value_gap(inst)?;
    let m = inst.house_count() as f64;
    let q_max = inst.houses().iter().map(|h| h.quota).max().unwrap() as f64;
    let w_max = inst.network().max_weight();
    Ok(1.0 + 2.0 * (m - 1.0) * (gamma_star + q_max * w_max / d_delta))
}

/// Smallest gap between consecutive house values once sorted ascending.
/// Errors if two houses share a value.
fn minimum_value_gap(inst: &Instance) -> Result<f64, BoundsError> {
    let mut values: Vec<f64> = inst.houses().iter().map(|h| h.base_desirability).collect();
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut min_gap = f64::INFINITY;
    for pair in values.windows(2) {
        let gap = pair[1] - pair[0];
        if gap == 0.0 {
            return Err(BoundsError::DegenerateDelta);
        }
        min_gap = min_gap.min(gap);
    }
    Ok(min_gap)
}

/// House indices sorted by desirability ascending, ties by index.
fn houses_by_value(inst: &Instance) -> Vec<HouseId> {
    let mut order: Vec<HouseId> = (0..inst.house_count()).collect();
    order.sort_by(|&a, &b| {
        inst.house_desirability(a)
            .partial_cmp(&inst.house_desirability(b))
            .unwrap()
            .then(a.cmp(&b))
    });
    order
}

/// `sum over ordered pairs g < h of q_h (D_h - D_g)` with houses sorted by
/// value ascending.
pub fn ordered_gap_sum(inst: &Instance) -> f64 {
    let order = houses_by_value(inst);
    let mut sum = 0.0;
    for j in 1..order.len() {
        let h = order[j];
        for &g in &order[..j] {
            sum += inst.quota(h) as f64
                * (inst.house_desirability(h) - inst.house_desirability(g));
        }
    }
    sum
}

/// Which inequality family a check used.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BoundForm {
    /// Unweighted equal-quota/equal-value form.
    Simple,
    /// General form with the `q_max * w_max` slack.
    General,
}

#[derive(Debug, Clone, Serialize)]
pub struct PairInequality {
    pub house_a: HouseId,
    pub house_b: HouseId,
    pub lhs: f64,
    pub rhs: f64,
    pub pass: bool,
}

/// Per-house-pair cross-edge inequality report. Stability of the matching is
/// a caller responsibility; `stability_assumed` records that this check did
/// not verify it.
#[derive(Debug, Clone, Serialize)]
pub struct CrossEdgeReport {
    pub form: BoundForm,
    pub pairs: Vec<PairInequality>,
    pub all_pass: bool,
    pub stability_assumed: bool,
}

fn select_form(inst: &Instance) -> Result<BoundForm, BoundsError> {
    check_one_sided_setting(inst)?;
    Ok(if check_simple_hypotheses(inst).is_ok() {
        BoundForm::Simple
    } else {
        BoundForm::General
    })
}

/// Checks, for every house pair, that the cross-edge weight is within the
/// bound implied by stability: at most the larger directed quota-value gap
/// plus twice the internal weights (plus `q_max * w_max` in general form).
pub fn check_cross_edge_lemma(
    inst: &Instance,
    matching: &Matching,
) -> Result<CrossEdgeReport, BoundsError> {
    let form = select_form(inst)?;
    let metrics = partition_metrics(inst, matching);
    let q_max = inst.houses().iter().map(|h| h.quota).max().unwrap() as f64;
    let w_max = inst.network().max_weight();
    let slack = match form {
        BoundForm::Simple => 0.0,
        BoundForm::General => q_max * w_max,
    };
    let m = inst.house_count();
    let mut pairs = Vec::new();
    let mut all_pass = true;
    for a in 0..m {
        for b in (a + 1)..m {
            let (da, db) = (inst.house_desirability(a), inst.house_desirability(b));
            let (qa, qb) = (inst.quota(a) as f64, inst.quota(b) as f64);
            let lhs = metrics.cross_weights[a][b];
            let rhs = (qa * (da - db)).max(qb * (db - da))
                + 2.0 * (metrics.cross_weights[a][a] + metrics.cross_weights[b][b])
                + slack;
            let pass = lhs <= rhs + 1e-9;
            all_pass &= pass;
            pairs.push(PairInequality {
                house_a: a,
                house_b: b,
                lhs,
                rhs,
                pass,
            });
        }
    }
    Ok(CrossEdgeReport {
        form,
        pairs,
        all_pass,
        stability_assumed: true,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct GammaBoundReport {
    pub form: BoundForm,
    pub gamma: f64,
    pub bound: f64,
    pub pass: bool,
    pub stability_assumed: bool,
}

/// Checks the stability-implied lower bound on gamma. In general form the
/// numerator loses `C(m,2) * q_max * w_max`; the bound is clamped at zero.
pub fn check_gamma_lower_bound(
    inst: &Instance,
    matching: &Matching,
) -> Result<GammaBoundReport, BoundsError> {
    let form = select_form(inst)?;
    let total = inst.network().total_weight();
    let observed = gamma(inst, matching);
    let bound = if total == 0.0 {
        0.0
    } else {
        let m = inst.house_count() as f64;
        let q_max = inst.houses().iter().map(|h| h.quota).max().unwrap() as f64;
        let w_max = inst.network().max_weight();
        let slack = match form {
            BoundForm::Simple => 0.0,
            BoundForm::General => m * (m - 1.0) / 2.0 * q_max * w_max,
        };
        ((total - ordered_gap_sum(inst) - slack) / ((2.0 * m - 1.0) * total)).max(0.0)
    };
    Ok(GammaBoundReport {
        form,
        gamma: observed,
        bound,
        pass: observed >= bound - 1e-9,
        stability_assumed: true,
    })
}

/// Aggregate bound report for an instance. Bounds that do not apply carry
/// the violated hypothesis by name instead of a value.
#[derive(Debug, Clone, Serialize)]
pub struct BoundReport {
    pub m: usize,
    pub q: Option<f64>,
    pub gamma_star: f64,
    pub gamma_star_exact: bool,
    pub q_max: usize,
    pub w_max: f64,
    pub d_delta: Option<f64>,
    pub bound_simple: Option<f64>,
    pub bound_simple_violation: Option<String>,
    pub bound_general: Option<f64>,
    pub bound_general_violation: Option<String>,
}

/// Assembles the bound report from a gamma-star value (exact or heuristic).
pub fn bound_report(inst: &Instance, gamma_star: f64, exact: bool) -> BoundReport {
    let (bound_simple, bound_simple_violation) = split(poa_bound_simple(inst, gamma_star));
    let (bound_general, bound_general_violation) = split(poa_bound_general(inst, gamma_star));
    BoundReport {
        m: inst.house_count(),
        q: q_ratio(inst).ok(),
        gamma_star,
        gamma_star_exact: exact,
        q_max: inst.houses().iter().map(|h| h.quota).max().unwrap_or(0),
        w_max: inst.network().max_weight(),
        d_delta: minimum_value_gap(inst).ok(),
        bound_simple,
        bound_simple_violation,
        bound_general,
        bound_general_violation,
    }
}

fn split(result: Result<f64, BoundsError>) -> (Option<f64>, Option<String>) {
    match result {
        Ok(v) => (Some(v), None),
        Err(e) => (None, Some(e.to_string())),
    }
}

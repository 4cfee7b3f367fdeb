//! Swap-based solvers: greedy approved-swap ascent and an MCMC heat bath
//! over the social welfare, both with per-iteration trace capture.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::market::{potential, social_welfare, swap_deltas, Instance, Matching};
use crate::stability::assess_swap;

/// Pivot rule for the greedy search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PivotRule {
    /// Apply the first approved swap found in a randomly permuted pair order.
    FirstImprovement,
    /// Scan every pair and apply the approved swap with the largest
    /// potential gain (ties broken lexicographically).
    BestImprovement,
}

#[derive(Debug, Clone, Serialize)]
pub struct GreedyConfig {
    /// Cap on accepted swaps.
    pub max_iterations: u64,
    pub pivot_rule: PivotRule,
    /// Seed for the per-sweep pair-order shuffles.
    pub seed: u64,
}

impl Default for GreedyConfig {
    fn default() -> Self {
        Self {
            max_iterations: 1_000_000,
            pivot_rule: PivotRule::FirstImprovement,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct McmcConfig {
    /// Number of proposals.
    pub max_iterations: u64,
    /// Logistic gain: acceptance probability `1 / (1 + exp(-T * dW))`.
    pub temperature: f64,
    /// Optional linear schedule: the gain moves from `temperature` to this
    /// value over the run. Off by default (constant gain).
    pub final_temperature: Option<f64>,
    pub seed: u64,
    /// Run the greedy solver on the best matching found before returning.
    pub polish: bool,
}

impl Default for McmcConfig {
    fn default() -> Self {
        Self {
            max_iterations: 100_000,
            temperature: 1.0,
            final_temperature: None,
            seed: 0,
            polish: false,
        }
    }
}

impl McmcConfig {
    fn gain_at(&self, iteration: u64) -> f64 {
        match self.final_temperature {
            None => self.temperature,
            Some(last) => {
                let span = (self.max_iterations.max(2) - 1) as f64;
                let frac = (iteration - 1) as f64 / span;
                self.temperature + (last - self.temperature) * frac
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TerminationReason {
    /// No approved swap remained (greedy), or none could ever exist.
    Stable,
    /// The iteration budget ran out first.
    IterationCap,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceRecord {
    pub iteration: u64,
    pub welfare: f64,
    pub potential: f64,
    pub accepted: bool,
}

/// Per-run trace. `records[0]` is the initial matching; each later record is
/// one solver iteration. `best_matching` maximizes welfare over all visited
/// matchings, the initial one included; a polished MCMC run returns the
/// greedy fixed point grown from it, whose welfare may exceed
/// `best_welfare`.
#[derive(Debug, Clone)]
pub struct SolveTrace {
    pub records: Vec<TraceRecord>,
    pub best_welfare: f64,
    pub best_matching: Matching,
    pub terminated: TerminationReason,
    /// Number of swap evaluations performed (greedy iterations are much
    /// costlier than MCMC proposals; this makes the cost comparable).
    pub evaluations: u64,
}

/// Uniform random quota-exact matching: shuffles the padded students and
/// fills the rosters in house order. Deterministic for a given seed.
pub fn random_matching(inst: &Instance, seed: u64) -> Matching {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut students: Vec<usize> = (0..inst.student_count()).collect();
    students.shuffle(&mut rng);
    let mut assignment = vec![0usize; inst.student_count()];
    let mut next = 0;
    for h in 0..inst.house_count() {
        for _ in 0..inst.quota(h) {
            assignment[students[next]] = h;
            next += 1;
        }
    }
    Matching::from_assignment(inst, assignment).expect("quota-exact by construction")
}

struct RunState {
    matching: Matching,
    welfare: f64,
    potential: f64,
    best_welfare: f64,
    best_matching: Matching,
    records: Vec<TraceRecord>,
    evaluations: u64,
}

impl RunState {
    fn new(inst: &Instance, init: &Matching) -> Self {
        let welfare = social_welfare(inst, init);
        let phi = potential(inst, init);
        Self {
            matching: init.clone(),
            welfare,
            potential: phi,
            best_welfare: welfare,
            best_matching: init.clone(),
            records: vec![TraceRecord {
                iteration: 0,
                welfare,
                potential: phi,
                accepted: false,
            }],
            evaluations: 0,
        }
    }

    fn record(&mut self, iteration: u64, accepted: bool) {
        self.records.push(TraceRecord {
            iteration,
            welfare: self.welfare,
            potential: self.potential,
            accepted,
        });
        if accepted && self.welfare > self.best_welfare {
            self.best_welfare = self.welfare;
            self.best_matching = self.matching.clone();
        }
    }

    fn apply(&mut self, s: usize, t: usize, dw: f64, dphi: f64) {
        self.matching.swap_unchecked(s, t);
        self.welfare += dw;
        self.potential += dphi;
    }

    fn finish(self, terminated: TerminationReason) -> (Matching, SolveTrace) {
        (
            self.matching,
            SolveTrace {
                records: self.records,
                best_welfare: self.best_welfare,
                best_matching: self.best_matching,
                terminated,
                evaluations: self.evaluations,
            },
        )
    }
}

// Materializing every student pair is fine at desk scale but quadratic in
// memory; beyond this many students the sweep permutes students instead.
const PAIR_LIST_LIMIT: usize = 2048;

/// Greedy approved-swap ascent. Applies approved swaps until a full sweep
/// finds none (the matching is then two-sided exchange-stable) or the
/// iteration cap is reached.
pub fn solve_greedy(inst: &Instance, init: &Matching, cfg: &GreedyConfig) -> (Matching, SolveTrace) {
    let mut state = RunState::new(inst, init);
    if inst.house_count() < 2 {
        return state.finish(TerminationReason::Stable);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let n = inst.student_count();
    let mut accepted: u64 = 0;

    let mut pair_order: Vec<(u32, u32)> = if n <= PAIR_LIST_LIMIT {
        let mut pairs = Vec::with_capacity(n * (n - 1) / 2);
        for s in 0..n {
            for t in (s + 1)..n {
                pairs.push((s as u32, t as u32));
            }
        }
        pairs
    } else {
        Vec::new()
    };
    let mut student_order: Vec<usize> = (0..n).collect();

    loop {
        let mut swapped_this_sweep = false;
        match cfg.pivot_rule {
            PivotRule::FirstImprovement => {
                let applied = if pair_order.is_empty() {
                    student_order.shuffle(&mut rng);
                    first_improvement_sweep(
                        inst,
                        &mut state,
                        &mut accepted,
                        cfg.max_iterations,
                        student_pairs(&student_order),
                    )
                } else {
                    pair_order.shuffle(&mut rng);
                    first_improvement_sweep(
                        inst,
                        &mut state,
                        &mut accepted,
                        cfg.max_iterations,
                        pair_order.iter().map(|&(s, t)| (s as usize, t as usize)),
                    )
                };
                swapped_this_sweep = applied;
            }
            PivotRule::BestImprovement => {
                let mut best: Option<(f64, usize, usize, f64)> = None;
                for s in 0..n {
                    for t in (s + 1)..n {
                        if state.matching.house_of(s) == state.matching.house_of(t) {
                            continue;
                        }
                        state.evaluations += 1;
                        let assessment = assess_swap(inst, &state.matching, s, t)
                            .expect("cross-house pair");
                        if !assessment.approved {
                            continue;
                        }
                        let deltas = swap_deltas(inst, &state.matching, s, t);
                        let dphi = deltas.potential(inst, s, t);
                        if best.is_none_or(|(phi, ..)| dphi > phi) {
                            best = Some((dphi, s, t, deltas.welfare()));
                        }
                    }
                }
                if let Some((dphi, s, t, dw)) = best {
                    state.apply(s, t, dw, dphi);
                    accepted += 1;
                    state.record(accepted, true);
                    swapped_this_sweep = true;
                }
            }
        }
        if !swapped_this_sweep {
            return state.finish(TerminationReason::Stable);
        }
        if accepted >= cfg.max_iterations {
            return state.finish(TerminationReason::IterationCap);
        }
    }
}

fn student_pairs(order: &[usize]) -> impl Iterator<Item = (usize, usize)> + '_ {
    order
        .iter()
        .enumerate()
        .flat_map(move |(i, &s)| order[i + 1..].iter().map(move |&t| (s, t)))
}

fn first_improvement_sweep(
    inst: &Instance,
    state: &mut RunState,
    accepted: &mut u64,
    cap: u64,
    pairs: impl Iterator<Item = (usize, usize)>,
) -> bool {
    let mut applied = false;
    for (s, t) in pairs {
        if state.matching.house_of(s) == state.matching.house_of(t) {
            continue;
        }
        state.evaluations += 1;
        let assessment = assess_swap(inst, &state.matching, s, t).expect("cross-house pair");
        if !assessment.approved {
            continue;
        }
        let deltas = swap_deltas(inst, &state.matching, s, t);
        let dw = deltas.welfare();
        let dphi = deltas.potential(inst, s, t);
        state.apply(s, t, dw, dphi);
        *accepted += 1;
        state.record(*accepted, true);
        applied = true;
        if *accepted >= cap {
            return true;
        }
    }
    applied
}

/// Logistic acceptance probability of a welfare change `dw` at gain `t`.
pub fn acceptance_probability(temperature: f64, dw: f64) -> f64 {
    1.0 / (1.0 + (-temperature * dw).exp())
}

/// MCMC heat bath over the welfare: each iteration proposes a uniform random
/// cross-house pair and accepts with the logistic probability. Tracks the
/// best matching visited; with `polish` the greedy solver finishes from it.
pub fn solve_mcmc(inst: &Instance, init: &Matching, cfg: &McmcConfig) -> (Matching, SolveTrace) {
    assert!(cfg.temperature > 0.0, "temperature must be positive");
    let mut state = RunState::new(inst, init);
    if inst.house_count() < 2 {
        return state.finish(TerminationReason::Stable);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let n = inst.student_count();

    for iteration in 1..=cfg.max_iterations {
        // Same-house draws are rejected and redrawn; they do not consume an
        // iteration.
        let (s, t) = loop {
            let s = rng.random_range(0..n);
            let t = rng.random_range(0..n);
            if s != t && state.matching.house_of(s) != state.matching.house_of(t) {
                break (s.min(t), s.max(t));
            }
        };
        state.evaluations += 1;
        let deltas = swap_deltas(inst, &state.matching, s, t);
        let dw = deltas.welfare();
        let accept = rng.random::<f64>() < acceptance_probability(cfg.gain_at(iteration), dw);
        if accept {
            let dphi = deltas.potential(inst, s, t);
            state.apply(s, t, dw, dphi);
        }
        state.record(iteration, accept);
    }

    if cfg.polish {
        // The polish step lives outside the chain: the trace and its
        // best-tracking cover visited chain states only, while the returned
        // matching is the greedy fixed point grown from the best one.
        let best = state.best_matching.clone();
        let greedy_cfg = GreedyConfig {
            seed: cfg.seed.wrapping_add(0x9e37_79b9_7f4a_7c15),
            ..GreedyConfig::default()
        };
        let (polished, sub) = solve_greedy(inst, &best, &greedy_cfg);
        state.evaluations += sub.evaluations;
        state.matching = polished;
        return state.finish(sub.terminated);
    }
    state.finish(TerminationReason::IterationCap)
}

/// Greedy cleanup of a matching under the default configuration; the result
/// is two-sided exchange-stable.
pub fn polish(inst: &Instance, matching: &Matching) -> Matching {
    solve_greedy(inst, matching, &GreedyConfig::default()).0
}

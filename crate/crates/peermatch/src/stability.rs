//! Swap approval and exchange-stability checks, two-sided and one-sided.

use serde::Serialize;
use thiserror::Error;

use crate::market::{
    swap_deltas, Instance, Matching, StudentId, HouseId,
};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum StabilityError {
    #[error("students {s} and {t} share a house")]
    SameHouse { s: StudentId, t: StudentId },
    #[error("student {s} already lives in house {house}")]
    OwnHouse { s: StudentId, house: HouseId },
    #[error("one-sided stability requires zero house scoring")]
    HousesActive,
}

/// One of the four agents involved in a swap.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Agent {
    Student(StudentId),
    House(HouseId),
}

/// Utility changes of the four agents touched by a candidate swap, plus the
/// approval verdict: every agent weakly improves and at least one strictly.
#[derive(Debug, Clone)]
pub struct SwapAssessment {
    pub s: StudentId,
    pub t: StudentId,
    pub house_s: HouseId,
    pub house_t: HouseId,
    pub delta_s: f64,
    pub delta_t: f64,
    pub delta_house_s: f64,
    pub delta_house_t: f64,
    pub approved: bool,
    pub strict_improver_exists: bool,
}

impl SwapAssessment {
    /// The four deltas keyed by agent.
    pub fn deltas(&self) -> [(Agent, f64); 4] {
        [
            (Agent::Student(self.s), self.delta_s),
            (Agent::Student(self.t), self.delta_t),
            (Agent::House(self.house_s), self.delta_house_s),
            (Agent::House(self.house_t), self.delta_house_t),
        ]
    }
}

/// Outcome of a stability scan. `witness` is the lexicographically first
/// approved (blocking) swap when one exists.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilityReport {
    pub stable: bool,
    pub witness: Option<(StudentId, StudentId)>,
    pub pairs_checked: u64,
}

/// Assesses the swap of two students in different houses. Holes take part
/// with delta zero on the student side; house deltas follow the scoring mode.
pub fn assess_swap(
    inst: &Instance,
    matching: &Matching,
    s: StudentId,
    t: StudentId,
) -> Result<SwapAssessment, StabilityError> {
    if s == t || matching.house_of(s) == matching.house_of(t) {
        return Err(StabilityError::SameHouse { s, t });
    }
    let deltas = swap_deltas(inst, matching, s, t);
    let eps = inst.epsilon();
    let all = [
        deltas.student_s,
        deltas.student_t,
        deltas.house_s,
        deltas.house_t,
    ];
    let weakly_ok = all.iter().all(|&d| d >= -eps);
    let strict = all.iter().any(|&d| d > eps);
    Ok(SwapAssessment {
        s,
        t,
        house_s: deltas.s_house,
        house_t: deltas.t_house,
        delta_s: deltas.student_s,
        delta_t: deltas.student_t,
        delta_house_s: deltas.house_s,
        delta_house_t: deltas.house_t,
        approved: weakly_ok && strict,
        strict_improver_exists: strict,
    })
}

/// Scans all unordered cross-house pairs (students and holes alike) in
/// lexicographic order; stable iff no swap is approved.
pub fn is_two_sided_exchange_stable(inst: &Instance, matching: &Matching) -> StabilityReport {
    let n = inst.student_count();
    let mut pairs_checked = 0;
    for s in 0..n {
        for t in (s + 1)..n {
            if matching.house_of(s) == matching.house_of(t) {
                continue;
            }
            pairs_checked += 1;
            let assessment = assess_swap(inst, matching, s, t).expect("cross-house pair");
            if assessment.approved {
                return StabilityReport {
                    stable: false,
                    witness: Some((s, t)),
                    pairs_checked,
                };
            }
        }
    }
    StabilityReport {
        stable: true,
        witness: None,
        pairs_checked,
    }
}

/// Benefit student `s` would gain by moving alone to house `g`: the
/// desirability difference plus the peer weights gained minus those lost.
/// For any `t` in `g`, the utility change of the swap is `alpha - w(s, t)`.
pub fn alpha(
    inst: &Instance,
    matching: &Matching,
    s: StudentId,
    g: HouseId,
) -> Result<f64, StabilityError> {
    let h = matching.house_of(s);
    if h == g {
        return Err(StabilityError::OwnHouse { s, house: h });
    }
    let mut to_own = 0.0;
    let mut to_target = 0.0;
    for &(x, w) in inst.network().neighbors(s) {
        let hx = matching.house_of(x);
        if hx == h {
            to_own += w;
        } else if hx == g {
            to_target += w;
        }
    }
    Ok(inst.student_desirability(s, g) - inst.student_desirability(s, h) + to_target - to_own)
}

/// One-sided exchange stability for zero-scoring markets, phrased through
/// the alpha benefit function: a pair does not block iff one side strictly
/// objects or both sides are exactly indifferent.
pub fn is_one_sided_exchange_stable(
    inst: &Instance,
    matching: &Matching,
) -> Result<StabilityReport, StabilityError> {
    if !inst.is_zero_scoring() {
        return Err(StabilityError::HousesActive);
    }
    let eps = inst.epsilon();
    let n = inst.student_count();
    let mut pairs_checked = 0;
    for s in 0..n {
        for t in (s + 1)..n {
            let h = matching.house_of(s);
            let g = matching.house_of(t);
            if h == g {
                continue;
            }
            pairs_checked += 1;
            let w_st = inst.network().weight(s, t);
            let gain_s = alpha(inst, matching, s, g).expect("cross-house pair") - w_st;
            let gain_t = alpha(inst, matching, t, h).expect("cross-house pair") - w_st;
            let s_objects = gain_s < -eps;
            let t_objects = gain_t < -eps;
            let indifferent = gain_s.abs() <= eps && gain_t.abs() <= eps;
            if !(s_objects || t_objects || indifferent) {
                return Ok(StabilityReport {
                    stable: false,
                    witness: Some((s, t)),
                    pairs_checked,
                });
            }
        }
    }
    Ok(StabilityReport {
        stable: true,
        witness: None,
        pairs_checked,
    })
}

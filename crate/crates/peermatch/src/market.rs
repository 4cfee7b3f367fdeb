//! Instance data model: friendship network, houses, matchings, utilities,
//! social welfare, and the potential function.

use thiserror::Error;

/// Index of a (padded) student. Holes occupy indices `>= real_student_count`.
pub type StudentId = usize;
/// Index of a house in the instance's house list.
pub type HouseId = usize;

/// Default tolerance for "strictly greater" comparisons of utilities.
pub const DEFAULT_EPSILON: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum BuildError {
    #[error("total quota {capacity} is below the student count {students}")]
    QuotaDeficit { capacity: usize, students: usize },
    #[error("edge ({s}, {t}) has negative weight {weight}")]
    NegativeWeight { s: usize, t: usize, weight: f64 },
    #[error("edge ({s}, {t}) given with conflicting weights {first} and {second}")]
    AsymmetricInput {
        s: usize,
        t: usize,
        first: f64,
        second: f64,
    },
    #[error("house {house} has zero quota")]
    NonPositiveQuota { house: usize },
    #[error("edge endpoint {student} is out of range for {students} students")]
    StudentOutOfRange { student: usize, students: usize },
    #[error("self-loop on student {student}")]
    SelfLoop { student: usize },
    #[error("{table} table has wrong shape: expected {students} x {houses}")]
    TableShape {
        table: &'static str,
        students: usize,
        houses: usize,
    },
    #[error("negative {table} entry {value} for student {student}, house {house}")]
    NegativeEntry {
        table: &'static str,
        student: usize,
        house: usize,
        value: f64,
    },
    #[error("house desirability {value} for house {house} is negative")]
    NegativeDesirability { house: usize, value: f64 },
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SwapError {
    #[error("students {s} and {t} share a house; the swap is a no-op")]
    SameHouse { s: StudentId, t: StudentId },
    #[error("student index {0} is out of range")]
    InvalidStudent(StudentId),
}

#[derive(Debug, Error, PartialEq)]
pub enum MatchingError {
    #[error("assignment has {got} entries, instance has {expected} padded students")]
    WrongLength { got: usize, expected: usize },
    #[error("assignment refers to house {house}, instance has {houses} houses")]
    UnknownHouse { house: usize, houses: usize },
    #[error("house {house} holds {got} students, quota is {quota}")]
    QuotaMismatch {
        house: HouseId,
        got: usize,
        quota: usize,
    },
}

/// Weighted undirected friendship graph over the (padded) students.
///
/// Lookups are symmetric regardless of the direction an edge was declared in,
/// weights are non-negative, and there are no self-loops.
#[derive(Debug, Clone, PartialEq)]
pub struct SocialNetwork {
    student_count: usize,
    adjacency: Vec<Vec<(StudentId, f64)>>,
    edges: Vec<(StudentId, StudentId, f64)>,
    total_weight: f64,
}

impl SocialNetwork {
    /// Builds a network over `student_count` nodes from undirected edge
    /// declarations. Duplicate declarations of the same pair must carry the
    /// same weight; a conflicting pair is rejected as asymmetric input.
    pub fn from_edges(
        student_count: usize,
        declared: &[(usize, usize, f64)],
    ) -> Result<Self, BuildError> {
        let mut canon: Vec<(usize, usize, f64)> = Vec::with_capacity(declared.len());
        for &(s, t, w) in declared {
            if s >= student_count {
                return Err(BuildError::StudentOutOfRange {
                    student: s,
                    students: student_count,
                });
            }
            if t >= student_count {
                return Err(BuildError::StudentOutOfRange {
                    student: t,
                    students: student_count,
                });
            }
            if s == t {
                return Err(BuildError::SelfLoop { student: s });
            }
            if w < 0.0 || !w.is_finite() {
                return Err(BuildError::NegativeWeight { s, t, weight: w });
            }
            canon.push((s.min(t), s.max(t), w));
        }
        canon.sort_by_key(|&(s, t, _)| (s, t));
        let mut edges: Vec<(usize, usize, f64)> = Vec::with_capacity(canon.len());
        for (s, t, w) in canon {
            match edges.last() {
                Some(&(ps, pt, pw)) if ps == s && pt == t => {
                    if pw != w {
                        return Err(BuildError::AsymmetricInput {
                            s,
                            t,
                            first: pw,
                            second: w,
                        });
                    }
                    // duplicate declaration of the same undirected edge
                }
                _ => edges.push((s, t, w)),
            }
        }
        edges.retain(|&(_, _, w)| w > 0.0);

        let mut adjacency = vec![Vec::new(); student_count];
        let mut total_weight = 0.0;
        for &(s, t, w) in &edges {
            adjacency[s].push((t, w));
            adjacency[t].push((s, w));
            total_weight += w;
        }
        for list in &mut adjacency {
            list.sort_by_key(|&(t, _)| t);
        }
        Ok(Self {
            student_count,
            adjacency,
            edges,
            total_weight,
        })
    }

    pub fn student_count(&self) -> usize {
        self.student_count
    }

    /// Symmetric weight lookup; zero for absent edges and for `w(s, s)`.
    pub fn weight(&self, s: StudentId, t: StudentId) -> f64 {
        match self.adjacency[s].binary_search_by_key(&t, |&(x, _)| x) {
            Ok(i) => self.adjacency[s][i].1,
            Err(_) => 0.0,
        }
    }

    /// Neighbors of `s` with their edge weights, sorted by neighbor id.
    pub fn neighbors(&self, s: StudentId) -> &[(StudentId, f64)] {
        &self.adjacency[s]
    }

    /// All edges as `(s, t, w)` triples with `s < t`, sorted.
    pub fn edges(&self) -> &[(StudentId, StudentId, f64)] {
        &self.edges
    }

    /// Total edge weight `|E|`.
    pub fn total_weight(&self) -> f64 {
        self.total_weight
    }

    /// Largest single edge weight, zero on an empty graph.
    pub fn max_weight(&self) -> f64 {
        self.edges.iter().map(|&(_, _, w)| w).fold(0.0, f64::max)
    }

    /// Same edges re-indexed over `padded` nodes (extra nodes are isolated).
    fn padded(&self, padded: usize) -> Self {
        assert!(padded >= self.student_count);
        let mut out = self.clone();
        out.student_count = padded;
        out.adjacency.resize(padded, Vec::new());
        out
    }
}

/// One house: capacity and its objective desirability value `D_h`.
#[derive(Debug, Clone, PartialEq)]
pub struct HouseSpec {
    pub id: u32,
    pub quota: usize,
    pub base_desirability: f64,
}

impl HouseSpec {
    pub fn new(id: u32, quota: usize, base_desirability: f64) -> Self {
        Self {
            id,
            quota,
            base_desirability,
        }
    }
}

/// Student-side desirability table `D^s_h`.
#[derive(Debug, Clone, PartialEq)]
pub enum Desirability {
    /// Every real student values house `h` at the house's `base_desirability`.
    Objective,
    /// Per-student values, rows indexed by real student, columns by house.
    Subjective(Vec<Vec<f64>>),
}

/// House-side utility model `D^h_sigma`.
#[derive(Debug, Clone, PartialEq)]
pub enum HouseScoring {
    /// One-sided market: every house utility is exactly zero.
    Zero,
    /// `U_h` is the sum of per-student scores over the house's roster,
    /// rows indexed by real student, columns by house.
    Additive(Vec<Vec<f64>>),
}

/// Raw inputs to [`Instance::build`]. Edges and tables refer to real
/// students only; holes are appended by the builder.
#[derive(Debug, Clone)]
pub struct InstanceSpec {
    pub students: usize,
    pub houses: Vec<HouseSpec>,
    pub edges: Vec<(usize, usize, f64)>,
    pub desirability: Desirability,
    pub scoring: HouseScoring,
}

/// A validated, padded market instance.
///
/// The student array is padded with holes so that `sum(q_h)` equals the
/// student count exactly; holes have no edges, zero desirabilities, and zero
/// scores, so every formula treats them uniformly.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    network: SocialNetwork,
    houses: Vec<HouseSpec>,
    desirability: Desirability,
    scoring: HouseScoring,
    real_student_count: usize,
    padded_student_count: usize,
    epsilon: f64,
}

impl Instance {
    /// Validates the spec, pads with holes, and assembles the instance.
    pub fn build(spec: InstanceSpec) -> Result<Self, BuildError> {
        let InstanceSpec {
            students,
            houses,
            edges,
            desirability,
            scoring,
        } = spec;
        for (h, house) in houses.iter().enumerate() {
            if house.quota == 0 {
                return Err(BuildError::NonPositiveQuota { house: h });
            }
            if house.base_desirability < 0.0 || !house.base_desirability.is_finite() {
                return Err(BuildError::NegativeDesirability {
                    house: h,
                    value: house.base_desirability,
                });
            }
        }
        let capacity: usize = houses.iter().map(|h| h.quota).sum();
        if capacity < students {
            return Err(BuildError::QuotaDeficit { capacity, students });
        }
        let m = houses.len();
        if let Desirability::Subjective(table) = &desirability {
            check_table(table, students, m, "desirability")?;
        }
        if let HouseScoring::Additive(table) = &scoring {
            check_table(table, students, m, "scoring")?;
        }
        let network = SocialNetwork::from_edges(students, &edges)?.padded(capacity);
        Ok(Self {
            network,
            houses,
            desirability,
            scoring,
            real_student_count: students,
            padded_student_count: capacity,
            epsilon: DEFAULT_EPSILON,
        })
    }

    /// Overrides the strict-comparison tolerance (default `1e-9`).
    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = epsilon;
        self
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn network(&self) -> &SocialNetwork {
        &self.network
    }

    pub fn houses(&self) -> &[HouseSpec] {
        &self.houses
    }

    pub fn house_count(&self) -> usize {
        self.houses.len()
    }

    pub fn quota(&self, h: HouseId) -> usize {
        self.houses[h].quota
    }

    /// Number of real (non-hole) students.
    pub fn real_student_count(&self) -> usize {
        self.real_student_count
    }

    /// Number of padded students, equal to the total quota.
    pub fn student_count(&self) -> usize {
        self.padded_student_count
    }

    pub fn hole_count(&self) -> usize {
        self.padded_student_count - self.real_student_count
    }

    pub fn is_hole(&self, s: StudentId) -> bool {
        s >= self.real_student_count
    }

    /// `D^s_h`: zero for holes, otherwise per the desirability model.
    pub fn student_desirability(&self, s: StudentId, h: HouseId) -> f64 {
        if self.is_hole(s) {
            return 0.0;
        }
        match &self.desirability {
            Desirability::Objective => self.houses[h].base_desirability,
            Desirability::Subjective(table) => table[s][h],
        }
    }

    /// Objective house value `D_h`.
    pub fn house_desirability(&self, h: HouseId) -> f64 {
        self.houses[h].base_desirability
    }

    /// Score house `h` assigns to student `s`; zero for holes and in zero mode.
    pub fn house_score(&self, s: StudentId, h: HouseId) -> f64 {
        if self.is_hole(s) {
            return 0.0;
        }
        match &self.scoring {
            HouseScoring::Zero => 0.0,
            HouseScoring::Additive(table) => table[s][h],
        }
    }

    pub fn is_zero_scoring(&self) -> bool {
        matches!(self.scoring, HouseScoring::Zero)
    }

    pub fn is_objective(&self) -> bool {
        matches!(self.desirability, Desirability::Objective)
    }

    /// True when quotas are exactly met by real students (no holes).
    pub fn quotas_exact(&self) -> bool {
        self.hole_count() == 0
    }
}

fn check_table(
    table: &[Vec<f64>],
    students: usize,
    houses: usize,
    name: &'static str,
) -> Result<(), BuildError> {
    if table.len() != students || table.iter().any(|row| row.len() != houses) {
        return Err(BuildError::TableShape {
            table: name,
            students,
            houses,
        });
    }
    for (s, row) in table.iter().enumerate() {
        for (h, &v) in row.iter().enumerate() {
            if v < 0.0 || !v.is_finite() {
                return Err(BuildError::NegativeEntry {
                    table: name,
                    student: s,
                    house: h,
                    value: v,
                });
            }
        }
    }
    Ok(())
}

/// Quota-exact assignment of every padded student to one house.
///
/// Keeps both directions (student to house, house roster) so swap evaluation
/// touches only the two rosters involved.
#[derive(Debug, Clone, PartialEq)]
pub struct Matching {
    assignment: Vec<HouseId>,
    rosters: Vec<Vec<StudentId>>,
}

impl Matching {
    /// Validates a raw assignment vector against the instance's quotas.
    pub fn from_assignment(
        inst: &Instance,
        assignment: Vec<HouseId>,
    ) -> Result<Self, MatchingError> {
        if assignment.len() != inst.student_count() {
            return Err(MatchingError::WrongLength {
                got: assignment.len(),
                expected: inst.student_count(),
            });
        }
        let m = inst.house_count();
        let mut rosters = vec![Vec::new(); m];
        for (s, &h) in assignment.iter().enumerate() {
            if h >= m {
                return Err(MatchingError::UnknownHouse { house: h, houses: m });
            }
            rosters[h].push(s);
        }
        for (h, roster) in rosters.iter().enumerate() {
            if roster.len() != inst.quota(h) {
                return Err(MatchingError::QuotaMismatch {
                    house: h,
                    got: roster.len(),
                    quota: inst.quota(h),
                });
            }
        }
        Ok(Self {
            assignment,
            rosters,
        })
    }

    /// House of student `s`.
    pub fn house_of(&self, s: StudentId) -> HouseId {
        self.assignment[s]
    }

    /// Roster of house `h`, sorted by student id.
    pub fn roster(&self, h: HouseId) -> &[StudentId] {
        &self.rosters[h]
    }

    pub fn assignment(&self) -> &[HouseId] {
        &self.assignment
    }

    pub fn student_count(&self) -> usize {
        self.assignment.len()
    }

    /// The swap matching: `s` and `t` exchange houses, everything else fixed.
    /// The original matching is left untouched.
    pub fn apply_swap(&self, s: StudentId, t: StudentId) -> Result<Matching, SwapError> {
        self.check_swap(s, t)?;
        let mut out = self.clone();
        out.swap_unchecked(s, t);
        Ok(out)
    }

    pub(crate) fn check_swap(&self, s: StudentId, t: StudentId) -> Result<(), SwapError> {
        let n = self.assignment.len();
        if s >= n {
            return Err(SwapError::InvalidStudent(s));
        }
        if t >= n {
            return Err(SwapError::InvalidStudent(t));
        }
        if s == t || self.assignment[s] == self.assignment[t] {
            return Err(SwapError::SameHouse { s, t });
        }
        Ok(())
    }

    /// In-place swap for solver loops; callers must have validated the pair.
    pub(crate) fn swap_unchecked(&mut self, s: StudentId, t: StudentId) {
        let h = self.assignment[s];
        let g = self.assignment[t];
        self.assignment[s] = g;
        self.assignment[t] = h;
        Self::roster_replace(&mut self.rosters[h], s, t);
        Self::roster_replace(&mut self.rosters[g], t, s);
    }

    fn roster_replace(roster: &mut Vec<StudentId>, out: StudentId, in_: StudentId) {
        let pos = roster.binary_search(&out).expect("student not in roster");
        roster.remove(pos);
        let pos = roster.binary_search(&in_).unwrap_err();
        roster.insert(pos, in_);
    }
}

/// `U_s`: desirability of the assigned house plus edge weights to housemates.
/// Holes come out at zero.
pub fn student_utility(inst: &Instance, matching: &Matching, s: StudentId) -> f64 {
    let h = matching.house_of(s);
    let mut utility = inst.student_desirability(s, h);
    for &(t, w) in inst.network().neighbors(s) {
        if matching.house_of(t) == h {
            utility += w;
        }
    }
    utility
}

/// `U_h`: zero in a one-sided market, otherwise the sum of the house's
/// scores over its roster.
pub fn house_utility(inst: &Instance, matching: &Matching, h: HouseId) -> f64 {
    if inst.is_zero_scoring() {
        return 0.0;
    }
    matching
        .roster(h)
        .iter()
        .map(|&s| inst.house_score(s, h))
        .sum()
}

/// Social welfare `W`: the sum of all student and house utilities.
pub fn social_welfare(inst: &Instance, matching: &Matching) -> f64 {
    let students: f64 = (0..inst.student_count())
        .map(|s| student_utility(inst, matching, s))
        .sum();
    let houses: f64 = (0..inst.house_count())
        .map(|h| house_utility(inst, matching, h))
        .sum();
    students + houses
}

/// Total weight of edges internal to houses under `matching`.
pub(crate) fn internal_edge_weight(inst: &Instance, matching: &Matching) -> f64 {
    inst.network()
        .edges()
        .iter()
        .filter(|&&(s, t, _)| matching.house_of(s) == matching.house_of(t))
        .map(|&(_, _, w)| w)
        .sum()
}

/// The potential function: house utilities, plus assigned desirabilities,
/// plus half the per-student housemate weights (i.e. the internal edge
/// weight counted once).
pub fn potential(inst: &Instance, matching: &Matching) -> f64 {
    let houses: f64 = (0..inst.house_count())
        .map(|h| house_utility(inst, matching, h))
        .sum();
    let desirability: f64 = (0..inst.student_count())
        .map(|s| inst.student_desirability(s, matching.house_of(s)))
        .sum();
    houses + desirability + internal_edge_weight(inst, matching)
}

/// Per-agent pieces of a swap's effect, shared by the welfare delta and the
/// stability assessment so both sides use identical arithmetic.
#[derive(Debug, Clone, Copy)]
pub(crate) struct SwapDeltas {
    pub s_house: HouseId,
    pub t_house: HouseId,
    pub student_s: f64,
    pub student_t: f64,
    pub house_s: f64,
    pub house_t: f64,
    /// Utility change summed over all students other than `s` and `t`.
    pub bystanders: f64,
}

impl SwapDeltas {
    pub fn welfare(&self) -> f64 {
        self.student_s + self.student_t + self.house_s + self.house_t + self.bystanders
    }

    pub fn potential(&self, inst: &Instance, s: StudentId, t: StudentId) -> f64 {
        // d(Phi) = dU_h + dU_g + d(assigned D) + d(E_in); the bystander sum in
        // dW double-counts exactly the internal-edge change on each side.
        let h = self.s_house;
        let g = self.t_house;
        let d_des = inst.student_desirability(s, g) - inst.student_desirability(s, h)
            + inst.student_desirability(t, h)
            - inst.student_desirability(t, g);
        self.house_s + self.house_t + d_des + self.edge_delta()
    }

    fn edge_delta(&self) -> f64 {
        // bystanders == d(E_in) counted from the non-moving side, which
        // equals the moving students' own peer change by symmetry.
        self.bystanders
    }
}

pub(crate) fn swap_deltas(inst: &Instance, matching: &Matching, s: StudentId, t: StudentId) -> SwapDeltas {
    let h = matching.house_of(s);
    let g = matching.house_of(t);
    debug_assert_ne!(h, g);

    // Peer-weight sums from each moving student into each involved house.
    let mut s_to_h = 0.0;
    let mut s_to_g = 0.0;
    for &(x, w) in inst.network().neighbors(s) {
        let hx = matching.house_of(x);
        if hx == h {
            s_to_h += w;
        } else if hx == g {
            s_to_g += w;
        }
    }
    let mut t_to_h = 0.0;
    let mut t_to_g = 0.0;
    for &(x, w) in inst.network().neighbors(t) {
        let hx = matching.house_of(x);
        if hx == h {
            t_to_h += w;
        } else if hx == g {
            t_to_g += w;
        }
    }
    let w_st = inst.network().weight(s, t);

    let student_s = inst.student_desirability(s, g) - inst.student_desirability(s, h)
        + (s_to_g - w_st)
        - s_to_h;
    let student_t = inst.student_desirability(t, h) - inst.student_desirability(t, g)
        + (t_to_h - w_st)
        - t_to_g;
    // Students left behind in h gain t's weights and lose s's; mirrored in g.
    let bystanders = (t_to_h - w_st) - s_to_h + (s_to_g - w_st) - t_to_g;
    let house_s = inst.house_score(t, h) - inst.house_score(s, h);
    let house_t = inst.house_score(s, g) - inst.house_score(t, g);

    SwapDeltas {
        s_house: h,
        t_house: g,
        student_s,
        student_t,
        house_s,
        house_t,
        bystanders,
    }
}

/// Incremental `(dW, dPhi)` of swapping `s` and `t`, touching only the two
/// rosters involved. Equals the full-recompute difference.
pub fn welfare_delta(
    inst: &Instance,
    matching: &Matching,
    s: StudentId,
    t: StudentId,
) -> Result<(f64, f64), SwapError> {
    matching.check_swap(s, t)?;
    let deltas = swap_deltas(inst, matching, s, t);
    Ok((deltas.welfare(), deltas.potential(inst, s, t)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::{instance_a, instance_a_matching, instance_a_split};

    fn two_house_spec(students: usize) -> InstanceSpec {
        InstanceSpec {
            students,
            houses: vec![HouseSpec::new(0, 2, 0.0), HouseSpec::new(1, 2, 0.0)],
            edges: vec![],
            desirability: Desirability::Objective,
            scoring: HouseScoring::Zero,
        }
    }

    #[test]
    fn build_exact_quotas_has_no_holes() {
        let inst = Instance::build(two_house_spec(4)).unwrap();
        assert_eq!(inst.student_count(), 4);
        assert_eq!(inst.hole_count(), 0);
    }

    #[test]
    fn build_pads_with_zero_utility_hole() {
        let inst = Instance::build(two_house_spec(3)).unwrap();
        assert_eq!(inst.student_count(), 4);
        assert_eq!(inst.hole_count(), 1);
        assert!(inst.is_hole(3));
        assert_eq!(inst.student_desirability(3, 0), 0.0);
        assert_eq!(inst.student_desirability(3, 1), 0.0);
        assert!(inst.network().neighbors(3).is_empty());
    }

    #[test]
    fn build_rejects_quota_deficit() {
        let err = Instance::build(two_house_spec(5)).unwrap_err();
        assert_eq!(
            err,
            BuildError::QuotaDeficit {
                capacity: 4,
                students: 5
            }
        );
    }

    #[test]
    fn build_rejects_negative_weight() {
        let mut spec = two_house_spec(4);
        spec.edges = vec![(0, 1, -2.0)];
        assert!(matches!(
            Instance::build(spec).unwrap_err(),
            BuildError::NegativeWeight { .. }
        ));
    }

    #[test]
    fn build_rejects_asymmetric_pair() {
        let mut spec = two_house_spec(4);
        spec.edges = vec![(0, 1, 2.0), (1, 0, 5.0)];
        assert!(matches!(
            Instance::build(spec).unwrap_err(),
            BuildError::AsymmetricInput { .. }
        ));
    }

    #[test]
    fn weight_lookup_is_symmetric() {
        let net = SocialNetwork::from_edges(3, &[(2, 0, 1.5), (1, 2, 0.5)]).unwrap();
        assert_eq!(net.weight(0, 2), 1.5);
        assert_eq!(net.weight(2, 0), 1.5);
        assert_eq!(net.weight(1, 2), 0.5);
        assert_eq!(net.weight(2, 1), 0.5);
        assert_eq!(net.weight(0, 1), 0.0);
        assert_eq!(net.weight(1, 1), 0.0);
        assert_eq!(net.total_weight(), 2.0);
    }

    #[test]
    fn student_utility_examples() {
        // s in house with D = 2, one housemate at weight 3 -> 5
        let (inst, mu) = instance_a_matching();
        assert_eq!(student_utility(&inst, &mu, 0), 5.0);
        // no friends in house, desirability only
        let spec = InstanceSpec {
            students: 2,
            houses: vec![HouseSpec::new(0, 1, 7.0), HouseSpec::new(1, 1, 0.0)],
            edges: vec![],
            desirability: Desirability::Objective,
            scoring: HouseScoring::Zero,
        };
        let inst = Instance::build(spec).unwrap();
        let mu = Matching::from_assignment(&inst, vec![0, 1]).unwrap();
        assert_eq!(student_utility(&inst, &mu, 0), 7.0);
    }

    #[test]
    fn hole_utility_is_zero_under_any_matching() {
        let mut spec = two_house_spec(3);
        spec.edges = vec![(0, 1, 4.0)];
        spec.houses[0].base_desirability = 3.0;
        let inst = Instance::build(spec).unwrap();
        for assignment in [vec![0, 0, 1, 1], vec![0, 1, 0, 1], vec![1, 0, 0, 1]] {
            let mu = Matching::from_assignment(&inst, assignment).unwrap();
            assert_eq!(student_utility(&inst, &mu, 3), 0.0);
        }
    }

    #[test]
    fn house_utility_modes() {
        let (inst, mu) = instance_a_matching();
        assert_eq!(house_utility(&inst, &mu, 0), 0.0);
        assert_eq!(house_utility(&inst, &mu, 1), 0.0);

        let spec = InstanceSpec {
            students: 2,
            houses: vec![HouseSpec::new(0, 2, 0.0), HouseSpec::new(1, 1, 0.0)],
            edges: vec![],
            desirability: Desirability::Objective,
            scoring: HouseScoring::Additive(vec![vec![4.0, 0.0], vec![1.5, 0.0]]),
        };
        let inst = Instance::build(spec).unwrap();
        // both real students in house 0 -> 4.0 + 1.5
        let mu = Matching::from_assignment(&inst, vec![0, 0, 1]).unwrap();
        assert_eq!(house_utility(&inst, &mu, 0), 5.5);
        // one real student (score 2? no: student 0 scores 4.0) plus the hole
        let mu = Matching::from_assignment(&inst, vec![0, 1, 0]).unwrap();
        assert_eq!(house_utility(&inst, &mu, 0), 4.0);
    }

    #[test]
    fn welfare_instance_a() {
        let (inst, mu) = instance_a_matching();
        assert_eq!(social_welfare(&inst, &mu), 16.0);
        // identity: 2 * E_in + sum q_h D_h
        assert_eq!(2.0 * internal_edge_weight(&inst, &mu) + 4.0, 16.0);
    }

    #[test]
    fn welfare_zero_instance() {
        let inst = Instance::build(two_house_spec(4)).unwrap();
        let mu = Matching::from_assignment(&inst, vec![0, 0, 1, 1]).unwrap();
        assert_eq!(social_welfare(&inst, &mu), 0.0);
    }

    #[test]
    fn potential_instance_a() {
        let (inst, mu) = instance_a_matching();
        assert_eq!(potential(&inst, &mu), 10.0);
    }

    #[test]
    fn potential_with_additive_scores() {
        let inst = instance_a();
        let spec = InstanceSpec {
            students: 4,
            houses: inst.houses().to_vec(),
            edges: vec![(0, 1, 3.0), (2, 3, 3.0)],
            desirability: Desirability::Objective,
            scoring: HouseScoring::Additive(vec![vec![1.0, 1.0]; 4]),
        };
        let inst = Instance::build(spec).unwrap();
        let mu = Matching::from_assignment(&inst, vec![0, 0, 1, 1]).unwrap();
        assert_eq!(potential(&inst, &mu), 14.0);
    }

    #[test]
    fn potential_empty_network() {
        let inst = Instance::build(two_house_spec(4)).unwrap();
        let mu = Matching::from_assignment(&inst, vec![0, 0, 1, 1]).unwrap();
        assert_eq!(potential(&inst, &mu), 0.0);
    }

    #[test]
    fn apply_swap_moves_both_students() {
        let (inst, mu) = instance_a_matching();
        let swapped = mu.apply_swap(0, 2).unwrap();
        assert_eq!(swapped.assignment(), &[1, 0, 0, 1]);
        assert_eq!(swapped.roster(0), &[1, 2]);
        assert_eq!(swapped.roster(1), &[0, 3]);
        // value semantics: original untouched
        assert_eq!(mu.assignment(), &[0, 0, 1, 1]);
        let _ = inst;
    }

    #[test]
    fn apply_swap_rejects_same_house() {
        let (_, mu) = instance_a_matching();
        assert_eq!(
            mu.apply_swap(0, 1).unwrap_err(),
            SwapError::SameHouse { s: 0, t: 1 }
        );
        assert_eq!(
            mu.apply_swap(0, 9).unwrap_err(),
            SwapError::InvalidStudent(9)
        );
    }

    #[test]
    fn swap_with_hole_moves_student_to_vacancy() {
        let mut spec = two_house_spec(3);
        spec.edges = vec![(0, 1, 4.0)];
        let inst = Instance::build(spec).unwrap();
        // hole 3 sits in house 1
        let mu = Matching::from_assignment(&inst, vec![0, 0, 1, 1]).unwrap();
        let swapped = mu.apply_swap(0, 3).unwrap();
        assert_eq!(swapped.assignment(), &[1, 0, 1, 0]);
    }

    #[test]
    fn welfare_delta_split_to_together() {
        let (inst, _) = instance_a_matching();
        let split = instance_a_split(&inst);
        let (dw, _) = welfare_delta(&inst, &split, 2, 1).unwrap();
        assert!((dw - 12.0).abs() < 1e-12);
    }

    #[test]
    fn welfare_delta_two_holes_is_zero() {
        let spec = InstanceSpec {
            students: 2,
            houses: vec![HouseSpec::new(0, 2, 1.0), HouseSpec::new(1, 2, 3.0)],
            edges: vec![(0, 1, 2.0)],
            desirability: Desirability::Objective,
            scoring: HouseScoring::Zero,
        };
        let inst = Instance::build(spec).unwrap();
        let mu = Matching::from_assignment(&inst, vec![0, 1, 0, 1]).unwrap();
        let (dw, dphi) = welfare_delta(&inst, &mu, 2, 3).unwrap();
        assert_eq!(dw, 0.0);
        assert_eq!(dphi, 0.0);
    }

    #[test]
    fn welfare_delta_matches_recompute() {
        let (inst, mu) = instance_a_matching();
        for s in 0..4 {
            for t in 0..4 {
                if mu.house_of(s) == mu.house_of(t) {
                    continue;
                }
                let (dw, dphi) = welfare_delta(&inst, &mu, s, t).unwrap();
                let swapped = mu.apply_swap(s, t).unwrap();
                let full_dw = social_welfare(&inst, &swapped) - social_welfare(&inst, &mu);
                let full_dphi = potential(&inst, &swapped) - potential(&inst, &mu);
                assert!((dw - full_dw).abs() < 1e-9);
                assert!((dphi - full_dphi).abs() < 1e-9);
            }
        }
    }
}

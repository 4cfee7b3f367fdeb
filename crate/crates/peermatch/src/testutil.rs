//! Shared fixtures for unit tests.

use crate::market::{
    Desirability, HouseScoring, HouseSpec, Instance, InstanceSpec, Matching,
};

/// Four students, two houses of quota 2 with desirabilities (2, 0), friends
/// (0,1) and (2,3) at weight 3, one-sided market.
pub fn instance_a() -> Instance {
    Instance::build(InstanceSpec {
        students: 4,
        houses: vec![HouseSpec::new(0, 2, 2.0), HouseSpec::new(1, 2, 0.0)],
        edges: vec![(0, 1, 3.0), (2, 3, 3.0)],
        desirability: Desirability::Objective,
        scoring: HouseScoring::Zero,
    })
    .unwrap()
}

/// Instance A with its friends-together matching (welfare 16).
pub fn instance_a_matching() -> (Instance, Matching) {
    let inst = instance_a();
    let mu = Matching::from_assignment(&inst, vec![0, 0, 1, 1]).unwrap();
    (inst, mu)
}

/// The friends-split matching of instance A (welfare 4).
pub fn instance_a_split(inst: &Instance) -> Matching {
    Matching::from_assignment(inst, vec![0, 1, 0, 1]).unwrap()
}

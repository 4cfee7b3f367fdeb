//! Seeded instance families shared by the integration suites.
#![allow(dead_code)]

use peermatch::io::{
    generate_random_instance, DesirabilityModel, InstanceConfig, QuotaRule, RandomInstanceSpec,
    ScoringModel, WeightModel,
};
use peermatch::{Instance, Matching};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

/// Instance A of the worked examples: two houses of quota 2 with values
/// (2, 0) and two friend pairs at weight 3.
pub fn instance_a() -> Instance {
    InstanceConfig {
        students: 4,
        houses: vec![
            peermatch::io::HouseEntry {
                id: 0,
                quota: 2,
                desirability: 2.0,
            },
            peermatch::io::HouseEntry {
                id: 1,
                quota: 2,
                desirability: 0.0,
            },
        ],
        edges: vec![(0, 1, 3.0), (2, 3, 3.0)],
        desirability: peermatch::io::DesirabilitySpec::objective(),
        scoring: peermatch::io::ScoringSpec::zero(),
        seed: 0,
    }
    .build()
    .unwrap()
}

/// Fully general small instance: mixed scoring, possibly subjective
/// desirabilities, possibly holes. Padded size stays enumerable.
pub fn general_instance(seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xa5a5_5a5a);
    let m = rng.random_range(2..=3);
    let quotas: Vec<usize> = (0..m).map(|_| rng.random_range(1..=3)).collect();
    let capacity: usize = quotas.iter().sum();
    let capacity = capacity.min(8);
    let mut quotas = quotas;
    while quotas.iter().sum::<usize>() > capacity {
        let i = rng.random_range(0..m);
        if quotas[i] > 1 {
            quotas[i] -= 1;
        }
    }
    let total: usize = quotas.iter().sum();
    let holes = rng.random_range(0..=total.saturating_sub(2).min(2));
    let students = total - holes;

    let subjective = rng.random_bool(0.5);
    let additive = rng.random_bool(0.5);
    let config = generate_random_instance(&RandomInstanceSpec {
        students,
        houses: m,
        seed: rng.random(),
        edge_probability: 0.5,
        weights: WeightModel::Uniform { lo: 0.0, hi: 3.0 },
        desirability: if subjective {
            DesirabilityModel::SubjectiveUniform { lo: 0.0, hi: 5.0 }
        } else {
            DesirabilityModel::UniformReal { lo: 0.0, hi: 5.0 }
        },
        scoring: if additive {
            ScoringModel::AdditiveUniform { lo: 0.0, hi: 5.0 }
        } else {
            ScoringModel::Zero
        },
        quotas: QuotaRule::Explicit(quotas),
    });
    config.build().unwrap()
}

/// Exact quotas and objective desirability (mixed house scoring): the
/// welfare-ascent setting.
pub fn conforming_instance(seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x1234_abcd);
    let m = rng.random_range(2..=3);
    let n = rng.random_range(2 * m..=8);
    let additive = rng.random_bool(0.5);
    generate_random_instance(&RandomInstanceSpec {
        students: n,
        houses: m,
        seed: rng.random(),
        edge_probability: 0.5,
        weights: WeightModel::Uniform { lo: 0.0, hi: 3.0 },
        desirability: DesirabilityModel::UniformReal { lo: 0.0, hi: 5.0 },
        scoring: if additive {
            ScoringModel::AdditiveUniform { lo: 0.0, hi: 5.0 }
        } else {
            ScoringModel::Zero
        },
        quotas: QuotaRule::EqualSplit,
    })
    .build()
    .unwrap()
}

/// Unweighted network, equal quotas of at least 2, integer house values,
/// one-sided market: the simple-bound setting.
pub fn simple_bound_instance(seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5151_0101);
    let (m, q) = *[(2usize, 2usize), (2, 3), (2, 4), (2, 5), (3, 2), (3, 3)]
        .choose(&mut rng)
        .unwrap();
    generate_random_instance(&RandomInstanceSpec {
        students: m * q,
        houses: m,
        seed: rng.random(),
        edge_probability: 0.45,
        weights: WeightModel::Unit,
        desirability: DesirabilityModel::UniformInt { max: 6 },
        scoring: ScoringModel::Zero,
        quotas: QuotaRule::EqualSplit,
    })
    .build()
    .unwrap()
}

/// Weighted network with pairwise-distinct house values, one-sided market:
/// the general-bound setting.
pub fn general_bound_instance(seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xdead_beef);
    let m = rng.random_range(2..=3);
    let quotas: Vec<usize> = (0..m).map(|_| rng.random_range(1..=3)).collect();
    let n: usize = quotas.iter().sum();
    let mut config = generate_random_instance(&RandomInstanceSpec {
        students: n,
        houses: m,
        seed: rng.random(),
        edge_probability: 0.5,
        weights: WeightModel::Uniform { lo: 0.2, hi: 3.0 },
        desirability: DesirabilityModel::Zero,
        scoring: ScoringModel::Zero,
        quotas: QuotaRule::Explicit(quotas),
    });
    // distinct values with gaps of at least 0.3
    let mut value = rng.random_range(0.0..2.0);
    for house in &mut config.houses {
        house.desirability = value;
        value += 0.3 + rng.random_range(0.0..2.0);
    }
    config.build().unwrap()
}

/// Uniform random quota-exact matching drawn outside the solver path.
pub fn random_assignment(inst: &Instance, seed: u64) -> Matching {
    peermatch::random_matching(inst, seed)
}

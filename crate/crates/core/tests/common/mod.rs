#![allow(dead_code)]

use groupfair::instance::{validate_instance, Instance, ValidInstance};
use groupfair::oracle::{gen_random, CostKind, GenStructure, RandomParams, UtilityDist};
use proptest::prelude::*;

pub fn cost_kind() -> impl Strategy<Value = CostKind> {
    prop_oneof![
        Just(CostKind::Quadratic),
        Just(CostKind::Piecewise),
        Just(CostKind::Nsw),
        Just(CostKind::RandomConvex),
    ]
}

pub fn structure() -> impl Strategy<Value = GenStructure> {
    prop_oneof![
        Just(GenStructure::Disjoint),
        (1usize..=3).prop_map(|depth| GenStructure::Laminar { depth }),
    ]
}

/// Random instance parameters small enough for exhaustive search.
pub fn small_params() -> impl Strategy<Value = RandomParams> {
    (
        2usize..=7,
        1usize..=3,
        0.3f64..=1.0,
        structure(),
        cost_kind(),
        0.0f64..1.0,
        any::<u64>(),
    )
        .prop_flat_map(|(n, m, density, structure, cost, ell_fraction, seed)| {
            (1..=n.min(4)).prop_map(move |num_groups| RandomParams {
                n,
                m,
                density,
                max_degree: Some(3),
                utility: UtilityDist::Integer { lo: 0, hi: 6 },
                num_groups,
                structure,
                cost,
                ell_fraction,
                seed,
            })
        })
}

pub fn raw(params: &RandomParams) -> Instance {
    gen_random(params).expect("generator parameters are valid")
}

pub fn valid(params: &RandomParams) -> ValidInstance {
    validate_instance(raw(params)).expect("generated instances validate")
}

#![allow(dead_code)]

use ownconc::copulas::{CopulaSpec, Family};
use ownconc::marginals::DiscretePmf;
use proptest::prelude::*;

pub fn grid(n: usize) -> Vec<f64> {
    (0..n).map(|i| i as f64 / (n - 1) as f64).collect()
}

/// Any valid copula, θ drawn inside its domain.
pub fn any_copula() -> impl Strategy<Value = CopulaSpec> {
    prop_oneof![
        Just(CopulaSpec::product()),
        Just(CopulaSpec::lower_frechet()),
        Just(CopulaSpec::upper_frechet()),
        (1.0f64..30.0).prop_map(|t| CopulaSpec::gumbel(t).unwrap()),
        prop_oneof![-1.0f64..-0.01, 0.01f64..30.0].prop_map(|t| CopulaSpec::clayton(t).unwrap()),
        prop_oneof![-40.0f64..-0.01, 0.01f64..40.0].prop_map(|t| CopulaSpec::frank(t).unwrap()),
    ]
}

pub fn archimedean() -> impl Strategy<Value = Family> {
    prop::sample::select(Family::ARCHIMEDEAN.to_vec())
}

/// A pmf on 1..=n with random weights, some of them zero.
pub fn any_pmf(max_n: usize) -> impl Strategy<Value = DiscretePmf> {
    prop::collection::vec(prop_oneof![1 => Just(0.0), 4 => 0.001f64..1.0], 1..=max_n)
        .prop_filter("positive total", |w| w.iter().sum::<f64>() > 0.0)
        .prop_map(|w| DiscretePmf::from_weights(&w).unwrap())
}

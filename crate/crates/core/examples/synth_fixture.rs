//! Writes a synthetic ownership edge list whose degree marginals follow a
//! truncated exponential (in-degree) and power law (out-degree).
//!
//! ```text
//! cargo run -p ownconc-core --example synth_fixture -- fixtures/synthetic_network.csv
//! ```
//!
//! Nodes with both degrees positive get their degrees from stratified
//! quantiles of the two laws, paired through a seeded permutation. Extra
//! pure-owned nodes absorb the surplus of out-stubs so every edge has a
//! target.

use std::collections::HashSet;
use std::fmt::Write as _;

use ownconc::marginals::{cdf, exponential_pmf, power_law_pmf, DiscretePmf};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const NODES: usize = 10_000;
const SEED: u64 = 2008;
const GAMMA: f64 = 2.159;
const N_OUT: usize = 19;
const B: f64 = -0.9727;
const N_IN: usize = 10;

fn quantile(pmf: &DiscretePmf, u: f64) -> usize {
    let c = cdf(pmf);
    (1..=pmf.n()).find(|&j| u < c[j]).unwrap_or(pmf.n())
}

fn main() {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "fixtures/synthetic_network.csv".into());
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);

    let p_in = exponential_pmf(B, N_IN).unwrap();
    let p_out = power_law_pmf(GAMMA, N_OUT).unwrap();
    let strata = |pmf: &DiscretePmf| -> Vec<usize> {
        (0..NODES)
            .map(|r| quantile(pmf, (r as f64 + 0.5) / NODES as f64))
            .collect()
    };
    let k_in = strata(&p_in);
    let mut k_out = strata(&p_out);
    k_out.shuffle(&mut rng);

    let name = |i: usize| format!("C{i:05}");
    let mut in_stubs: Vec<usize> = (0..NODES)
        .flat_map(|i| std::iter::repeat_n(i, k_in[i]))
        .collect();
    let total_out: usize = k_out.iter().sum();
    assert!(total_out >= in_stubs.len(), "more in-stubs than out-stubs");

    // pure-owned nodes, up to three owners each
    let mut next = NODES;
    while in_stubs.len() < total_out {
        let k = rng.random_range(1..=3).min(total_out - in_stubs.len());
        in_stubs.extend(std::iter::repeat_n(next, k));
        next += 1;
    }
    in_stubs.shuffle(&mut rng);

    // wire the largest owners first
    let mut owners: Vec<usize> = (0..NODES).collect();
    owners.sort_by_key(|&i| std::cmp::Reverse(k_out[i]));
    let mut edges = Vec::with_capacity(total_out);
    for &o in &owners {
        let mut taken = HashSet::new();
        for _ in 0..k_out[o] {
            let pos = in_stubs
                .iter()
                .rposition(|&t| t != o && !taken.contains(&t))
                .expect("wiring got stuck; change the seed");
            let t = in_stubs.swap_remove(pos);
            taken.insert(t);
            edges.push((o, t));
        }
    }
    edges.shuffle(&mut rng);

    let mut out = String::from("# synthetic ownership network\nowner,owned,share\n");
    for (o, t) in edges {
        let share: f64 = rng.random_range(0.01..0.5);
        writeln!(out, "{},{},{share:.4}", name(o), name(t)).unwrap();
    }
    std::fs::write(&path, out).unwrap();
    eprintln!("wrote {path}: {total_out} edges, {next} nodes");
}

//! Acceptance criteria. Each criterion prints one PASS/FAIL line; the test
//! fails at the end if any criterion failed.
//!
//! ```text
//! cargo test -p ownconc-cli --test acceptance -- --nocapture
//! ```

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use ownconc::calibrate::{
    entropy_surface, extremize_entropy, minimize_distance, CalibrationOptions, Grid, Location,
    SurfaceMarginal,
};
use ownconc::copulas::{check_copula_axioms, CopulaSpec, Family};
use ownconc::marginals::{
    exponential_pmf, fit_exponential_ls, fit_power_law_ls, fit_power_law_mle, power_law_pmf,
    DiscretePmf, FitFamily, FitTarget, MarginalSpec,
};
use ownconc::measures::{extremal_arrangement, scalar_product, shannon_entropy, Goal};
use ownconc::sklar::joint_from_copula;
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Criterion = (&'static str, Duration, fn() -> Verdict);

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

fn fixture_marginals() -> (DiscretePmf, DiscretePmf) {
    (
        exponential_pmf(-0.9727, 10).unwrap(),
        power_law_pmf(2.159, 19).unwrap(),
    )
}

fn grid(n: usize) -> Vec<f64> {
    (0..n).map(|i| i as f64 / (n - 1) as f64).collect()
}

fn random_pmf(rng: &mut ChaCha8Rng) -> DiscretePmf {
    let n = rng.random_range(1..=20);
    let mut w: Vec<f64> = (0..n)
        .map(|_| {
            if rng.random_bool(0.15) {
                0.0
            } else {
                rng.random::<f64>()
            }
        })
        .collect();
    if w.iter().sum::<f64>() == 0.0 {
        w[0] = 1.0;
    }
    DiscretePmf::from_weights(&w).unwrap()
}

fn random_copula(rng: &mut ChaCha8Rng) -> CopulaSpec {
    match rng.random_range(0..6) {
        0 => CopulaSpec::product(),
        1 => CopulaSpec::lower_frechet(),
        2 => CopulaSpec::upper_frechet(),
        3 => CopulaSpec::gumbel(rng.random_range(1.0..50.0)).unwrap(),
        4 if rng.random_bool(0.3) => CopulaSpec::clayton(rng.random_range(-1.0..-1e-3)).unwrap(),
        4 => CopulaSpec::clayton(rng.random_range(1e-3..50.0)).unwrap(),
        _ if rng.random_bool(0.5) => CopulaSpec::frank(rng.random_range(-50.0..-1e-3)).unwrap(),
        _ => CopulaSpec::frank(rng.random_range(1e-3..50.0)).unwrap(),
    }
}

/// The 100 random (marginals, copula) configurations of criteria 3 and 4.
fn configurations() -> Vec<(CopulaSpec, DiscretePmf, DiscretePmf)> {
    let mut rng = ChaCha8Rng::seed_from_u64(100);
    (0..100)
        .map(|_| {
            let spec = random_copula(&mut rng);
            (spec, random_pmf(&mut rng), random_pmf(&mut rng))
        })
        .collect()
}

fn c1_axioms() -> Verdict {
    let thetas: [(Family, [f64; 10]); 3] = [
        (
            Family::Gumbel,
            [1.0, 1.2, 1.5, 2.0, 3.0, 5.0, 8.0, 15.0, 30.0, 50.0],
        ),
        (
            Family::Clayton,
            [-1.0, -0.7, -0.3, -1e-3, 1e-3, 0.5, 2.0, 7.0, 20.0, 50.0],
        ),
        (
            Family::Frank,
            [-50.0, -15.0, -4.0, -1.0, -1e-3, 1e-3, 1.0, 4.0, 15.0, 50.0],
        ),
    ];
    let mut worst_param: f64 = 0.0;
    for (family, ts) in thetas {
        for t in ts {
            let r = check_copula_axioms(&CopulaSpec::new(family, Some(t)).unwrap(), 101);
            worst_param = worst_param.max(r.worst());
        }
    }
    let mut worst_np: f64 = 0.0;
    for family in [Family::Product, Family::LowerFrechet, Family::UpperFrechet] {
        let r = check_copula_axioms(&CopulaSpec::new(family, None).unwrap(), 101);
        worst_np = worst_np.max(r.worst());
    }
    verdict(
        worst_param <= 1e-9 && worst_np <= 1e-12,
        format!("worst violation {worst_param:.1e} parametric, {worst_np:.1e} nonparametric"),
    )
}

fn c2_limits() -> Verdict {
    let product = CopulaSpec::product();
    let lf = CopulaSpec::lower_frechet();
    let g1 = CopulaSpec::gumbel(1.0).unwrap();
    let cm1 = CopulaSpec::clayton(-1.0).unwrap();
    let frank = [
        CopulaSpec::frank(1e-6).unwrap(),
        CopulaSpec::frank(-1e-6).unwrap(),
    ];
    let (mut exact, mut frank_gap) = (true, 0.0f64);
    for u in grid(101) {
        for v in grid(101) {
            exact &= g1.eval(u, v) == product.eval(u, v);
            exact &= cm1.eval(u, v) == lf.eval(u, v);
            for f in &frank {
                frank_gap = frank_gap.max((f.eval(u, v) - product.eval(u, v)).abs());
            }
        }
    }
    verdict(
        exact && frank_gap <= 1e-5,
        format!("exact identities {exact}, Frank |θ|=1e-6 gap {frank_gap:.1e}"),
    )
}

fn c3_telescoping() -> Verdict {
    let mut worst: f64 = 0.0;
    for (spec, p, q) in configurations() {
        let j = joint_from_copula(&spec, &p, &q).unwrap();
        worst = worst.max((j.mass().iter().sum::<f64>() - 1.0).abs());
        for (a, b) in j.in_marginal().iter().zip(p.probs()) {
            worst = worst.max((a - b).abs());
        }
        for (a, b) in j.out_marginal().iter().zip(q.probs()) {
            worst = worst.max((a - b).abs());
        }
    }
    verdict(
        worst <= 1e-10,
        format!("worst marginal/total error {worst:.1e}"),
    )
}

fn c4_independence() -> Verdict {
    let mut worst = f64::NEG_INFINITY;
    for (spec, p, q) in configurations() {
        let h = shannon_entropy(&joint_from_copula(&spec, &p, &q).unwrap()).nats();
        let h0 =
            shannon_entropy(&joint_from_copula(&CopulaSpec::product(), &p, &q).unwrap()).nats();
        worst = worst.max(h - h0);
    }
    verdict(
        worst <= 1e-9,
        format!("max H(C) - H(Product) = {worst:.1e}"),
    )
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..n {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

fn c5_arrangement() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let perms: Vec<Vec<Vec<usize>>> = (0..=7).map(permutations).collect();
    let mut mismatches = 0;
    for _ in 0..200 {
        let n = rng.random_range(2..=7);
        // small integers keep every sum exact, so equality is meaningful
        let p: Vec<f64> = (0..n).map(|_| rng.random_range(0..10) as f64).collect();
        let q: Vec<f64> = (0..n).map(|_| rng.random_range(0..10) as f64).collect();
        let all: Vec<f64> = perms[n].iter().map(|s| scalar_product(&p, &q, s)).collect();
        let min = all.iter().copied().fold(f64::INFINITY, f64::min);
        let max = all.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lo = extremal_arrangement(&p, &q, Goal::Min).unwrap().value;
        let hi = extremal_arrangement(&p, &q, Goal::Max).unwrap().value;
        if lo != min || hi != max {
            mismatches += 1;
        }
    }
    verdict(
        mismatches == 0,
        format!("{mismatches} mismatches in 200 pairs"),
    )
}

fn c6_fits() -> Verdict {
    let mut ls_err: f64 = 0.0;
    let mut mle_err: f64 = 0.0;
    for (i, gamma) in [1.5, 2.0, 2.5, 3.0, 3.5].into_iter().enumerate() {
        for n in [10, 19, 50] {
            let pmf = power_law_pmf(gamma, n).unwrap();
            let fit = fit_power_law_ls(&pmf, FitTarget::Density).unwrap();
            ls_err = ls_err.max((fit.estimate - gamma).abs());
        }
        let pmf = power_law_pmf(gamma, 19).unwrap();
        let dist = WeightedIndex::new(pmf.probs()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(60 + i as u64);
        let sample: Vec<usize> = (0..100_000).map(|_| dist.sample(&mut rng) + 1).collect();
        let fit = fit_power_law_mle(&sample, 19).unwrap();
        mle_err = mle_err.max((fit.estimate - gamma).abs());
    }
    let mut exp_err: f64 = 0.0;
    for b in [-0.3, -0.9727, -1.0, -2.0] {
        for n in [10, 19] {
            let fit = fit_exponential_ls(&exponential_pmf(b, n).unwrap()).unwrap();
            exp_err = exp_err.max((fit.estimate - b).abs());
        }
    }
    verdict(
        ls_err <= 1e-6 && mle_err <= 0.05 && exp_err <= 1e-6,
        format!("LS γ error {ls_err:.1e}, MLE γ error {mle_err:.3}, LS b error {exp_err:.1e}"),
    )
}

fn c7_self_recovery() -> Verdict {
    let (p, q) = fixture_marginals();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut worst, mut non_interior) = (0.0f64, Vec::new());
    for family in Family::ARCHIMEDEAN {
        for _ in 0..10 {
            let theta = match family {
                Family::Gumbel => rng.random_range(1.2..20.0),
                Family::Clayton if rng.random_bool(0.3) => rng.random_range(-0.9..-0.1),
                Family::Clayton => rng.random_range(0.2..20.0),
                _ if rng.random_bool(0.5) => rng.random_range(-20.0..-0.5),
                _ => rng.random_range(0.5..20.0),
            };
            let spec = CopulaSpec::new(family, Some(theta)).unwrap();
            let target = joint_from_copula(&spec, &p, &q).unwrap();
            let r =
                minimize_distance(family, &p, &q, &target, &CalibrationOptions::default()).unwrap();
            worst = worst.max((r.theta_star.unwrap() - theta).abs());
            if r.location != Location::Interior {
                non_interior.push(format!("{spec}"));
            }
        }
    }
    verdict(
        worst <= 1e-3 && non_interior.is_empty(),
        format!("worst |θ* - θ| {worst:.1e}, non-interior {non_interior:?}"),
    )
}

fn c8_qualitative() -> Verdict {
    let (p, q) = fixture_marginals();
    let opts = CalibrationOptions::default();
    let h = |spec: CopulaSpec| shannon_entropy(&joint_from_copula(&spec, &p, &q).unwrap()).nats();
    let (hp, hlf, huf) = (
        h(CopulaSpec::product()),
        h(CopulaSpec::lower_frechet()),
        h(CopulaSpec::upper_frechet()),
    );
    let a = hlf < huf && huf <= hp;

    let g = extremize_entropy(Family::Gumbel, &p, &q, Goal::Max, &opts).unwrap();
    let g_star = g.theta_star.unwrap();
    let h_far = h(CopulaSpec::gumbel(50.0).unwrap());
    let b =
        g.location == Location::Interior && g_star > 1.0 && g_star < 10.0 && h_far < g.objective;

    let neg = CalibrationOptions {
        window: Some((-1.0, -1e-4)),
        ..opts
    };
    let c_min = extremize_entropy(Family::Clayton, &p, &q, Goal::Min, &neg).unwrap();
    let c = c_min.location == Location::Boundary && (c_min.theta_star.unwrap() + 1.0).abs() <= 1e-6;

    let product = joint_from_copula(&CopulaSpec::product(), &p, &q).unwrap();
    let f = minimize_distance(Family::Frank, &p, &q, &product, &opts).unwrap();
    let d = f.location == Location::AsymptoticNoOptimum;

    verdict(
        a && b && c && d,
        format!(
            "(a) {} H(LF)={hlf:.4} H(UF)={huf:.4} H(Prod)={hp:.4}; \
             (b) {} Gumbel max θ*={g_star:.4} {:?}, H(θ=50)={h_far:.4}; \
             (c) {} Clayton min θ*={:.6} {:?}; (d) {} Frank {:?} θ*={:.1e}",
            mark(a),
            mark(b),
            g.location,
            mark(c),
            c_min.theta_star.unwrap(),
            c_min.location,
            mark(d),
            f.location,
            f.theta_star.unwrap()
        ),
    )
}

fn c9_surfaces() -> Verdict {
    let (p_in, _) = fixture_marginals();
    let out = SurfaceMarginal::Scanned {
        family: FitFamily::PowerLaw,
        n: 19,
    };
    let inn = SurfaceMarginal::Fixed(MarginalSpec::empirical(p_in.probs().to_vec()));
    let k_grid = Grid::new(0.1, 4.0, 40).unwrap();

    let s = entropy_surface(&out, &inn, Family::Product, k_grid, None).unwrap();
    let t = &s.k_trends[0];
    let from = t.nonincreasing_from.unwrap();
    let a = t.max_location == Location::Interior && t.max.at < 1.0 && from <= 1.0;

    let g = entropy_surface(
        &out,
        &inn,
        Family::Gumbel,
        k_grid,
        Some(Grid::new(1.0, 20.0, 39).unwrap()),
    )
    .unwrap();
    let argmax: Vec<f64> = g.theta_extrema.iter().map(|e| e.max.at).collect();
    let b = argmax.windows(2).all(|w| w[1] <= w[0]);

    verdict(
        a && b,
        format!(
            "(a) {} Product max at k={:.2} ({:?}), nonincreasing from k={from:.2}; \
             (b) {} Gumbel per-k argmax θ from {:.3} to {:.3}",
            mark(a),
            t.max.at,
            t.max_location,
            mark(b),
            argmax[0],
            argmax[argmax.len() - 1]
        ),
    )
}

fn c10_determinism() -> Verdict {
    let fixture =
        Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/synthetic_network.csv");
    let runs: Vec<Vec<u8>> = (0..2)
        .map(|_| {
            let out = Command::new(env!("CARGO_BIN_EXE_ownconc"))
                .args(["--quiet", "report", "--edges"])
                .arg(&fixture)
                .output()
                .expect("binary runs");
            assert!(
                out.status.success(),
                "{}",
                String::from_utf8_lossy(&out.stderr)
            );
            out.stdout
        })
        .collect();
    verdict(
        runs[0] == runs[1] && !runs[0].is_empty(),
        format!("{} bytes per run", runs[0].len()),
    )
}

fn mark(ok: bool) -> &'static str {
    if ok {
        "ok"
    } else {
        "FAILED"
    }
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 10] = [
        ("copula axioms", Duration::from_secs(10), c1_axioms),
        ("limit identities", Duration::from_secs(1), c2_limits),
        ("Sklar telescoping", Duration::from_secs(5), c3_telescoping),
        (
            "independence maximizes entropy",
            Duration::from_secs(5),
            c4_independence,
        ),
        (
            "rearrangement oracle",
            Duration::from_secs(30),
            c5_arrangement,
        ),
        ("fit round trips", Duration::from_secs(20), c6_fits),
        (
            "calibration self-recovery",
            Duration::from_secs(60),
            c7_self_recovery,
        ),
        (
            "qualitative fixture behaviour",
            Duration::from_secs(60),
            c8_qualitative,
        ),
        ("entropy surfaces", Duration::from_secs(120), c9_surfaces),
        ("end-to-end determinism", Duration::MAX, c10_determinism),
    ];
    let mut failed = Vec::new();
    for (i, (name, limit, check)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let v = check();
        let elapsed = start.elapsed();
        let in_time = elapsed <= limit;
        let pass = v.pass && in_time;
        let time_note = if in_time {
            String::new()
        } else {
            format!(" over the {limit:?} limit;")
        };
        println!(
            "{} {:>2} {name} ({:.2} s){time_note} {}",
            if pass { "PASS" } else { "FAIL" },
            i + 1,
            elapsed.as_secs_f64(),
            v.detail
        );
        if !pass {
            failed.push(i + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}

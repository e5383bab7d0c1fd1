//! Discrete marginal degree laws on the support `1..=n`, their CDFs, and
//! least-squares / maximum-likelihood fits of the parametric families.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal, StudentsT};

use crate::error::{Error, Result};
use crate::optim::{golden_section_max, golden_section_min};

const SUM_TOL: f64 = 1e-12;

/// Probability mass over `1..=n`; `probs()[j - 1]` is `P(K = j)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscretePmf {
    probs: Vec<f64>,
}

impl DiscretePmf {
    /// Accepts masses that already sum to one within `1e-12`.
    pub fn from_probs(probs: Vec<f64>) -> Result<Self> {
        check_weights(&probs)?;
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > SUM_TOL {
            return Err(Error::InvalidDistribution(format!(
                "masses sum to {total}, expected 1"
            )));
        }
        Ok(DiscretePmf { probs })
    }

    /// Normalizes nonnegative weights (counts, unnormalized densities).
    pub fn from_weights(weights: &[f64]) -> Result<Self> {
        check_weights(weights)?;
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Err(Error::InvalidDistribution("weights sum to zero".into()));
        }
        Ok(DiscretePmf {
            probs: weights.iter().map(|w| w / total).collect(),
        })
    }

    pub fn n(&self) -> usize {
        self.probs.len()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// `P(K = j)` for `j` in `1..=n`, zero outside.
    pub fn prob(&self, j: usize) -> f64 {
        if j == 0 {
            0.0
        } else {
            self.probs.get(j - 1).copied().unwrap_or(0.0)
        }
    }

    pub fn positive_count(&self) -> usize {
        self.probs.iter().filter(|&&p| p > 0.0).count()
    }
}

fn check_weights(w: &[f64]) -> Result<()> {
    if w.is_empty() {
        return Err(Error::EmptySupport);
    }
    if let Some(bad) = w.iter().find(|x| !x.is_finite() || **x < 0.0) {
        return Err(Error::InvalidDistribution(format!(
            "mass {bad} is negative or not finite"
        )));
    }
    Ok(())
}

/// Description of a marginal law on `1..=n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum MarginalKind {
    Empirical { counts: Vec<f64> },
    PowerLaw { gamma: f64 },
    Exponential { b: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarginalSpec {
    #[serde(flatten)]
    pub kind: MarginalKind,
    pub n: usize,
}

impl MarginalSpec {
    pub fn power_law(gamma: f64, n: usize) -> Self {
        MarginalSpec {
            kind: MarginalKind::PowerLaw { gamma },
            n,
        }
    }

    pub fn exponential(b: f64, n: usize) -> Self {
        MarginalSpec {
            kind: MarginalKind::Exponential { b },
            n,
        }
    }

    pub fn empirical(counts: Vec<f64>) -> Self {
        let n = counts.len();
        MarginalSpec {
            kind: MarginalKind::Empirical { counts },
            n,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::EmptySupport);
        }
        match &self.kind {
            MarginalKind::PowerLaw { gamma } if !(gamma.is_finite() && *gamma > 0.0) => Err(
                Error::Domain(format!("power-law exponent must be positive, got {gamma}")),
            ),
            MarginalKind::Exponential { b } if !(b.is_finite() && *b < 0.0) => Err(Error::Domain(
                format!("exponential rate must be negative, got {b}"),
            )),
            MarginalKind::Empirical { counts } => {
                if counts.len() != self.n {
                    return Err(Error::Shape(format!(
                        "{} counts for support size {}",
                        counts.len(),
                        self.n
                    )));
                }
                check_weights(counts)?;
                if counts.iter().sum::<f64>() <= 0.0 {
                    return Err(Error::InvalidDistribution("counts sum to zero".into()));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }
}

pub fn empirical_pmf(sample: &[usize], n: usize) -> Result<DiscretePmf> {
    if n == 0 {
        return Err(Error::EmptySupport);
    }
    if sample.is_empty() {
        return Err(Error::DegenerateSample("empty sample".into()));
    }
    let mut counts = vec![0.0; n];
    for &x in sample {
        if x == 0 || x > n {
            return Err(Error::OutOfSupport { value: x, n });
        }
        counts[x - 1] += 1.0;
    }
    DiscretePmf::from_weights(&counts)
}

/// Truncated power law `P(K = j) ∝ j^(-gamma)` on `1..=n`.
pub fn power_law_pmf(gamma: f64, n: usize) -> Result<DiscretePmf> {
    MarginalSpec::power_law(gamma, n).validate()?;
    let w: Vec<f64> = (1..=n).map(|j| (j as f64).powf(-gamma)).collect();
    DiscretePmf::from_weights(&w)
}

/// Truncated geometric law `P(K = j) ∝ exp(b j)` on `1..=n`, `b < 0`.
pub fn exponential_pmf(b: f64, n: usize) -> Result<DiscretePmf> {
    MarginalSpec::exponential(b, n).validate()?;
    exponential_weights(b, n)
}

/// As [`exponential_pmf`] but also accepts `b >= 0` (flat or increasing).
pub fn exponential_pmf_any_rate(b: f64, n: usize) -> Result<DiscretePmf> {
    if n == 0 {
        return Err(Error::EmptySupport);
    }
    if !b.is_finite() {
        return Err(Error::Domain(format!("exponential rate {b} is not finite")));
    }
    exponential_weights(b, n)
}

fn exponential_weights(b: f64, n: usize) -> Result<DiscretePmf> {
    // shift the exponent so the largest weight is exp(0)
    let anchor = if b > 0.0 { n as f64 } else { 1.0 };
    let w: Vec<f64> = (1..=n).map(|j| (b * (j as f64 - anchor)).exp()).collect();
    DiscretePmf::from_weights(&w)
}

/// `[0, F(1), ..., F(n)]` with `F(n)` pinned to exactly 1.
pub fn cdf(pmf: &DiscretePmf) -> Vec<f64> {
    let mut out = Vec::with_capacity(pmf.n() + 1);
    let mut acc = 0.0;
    out.push(0.0);
    for &p in pmf.probs() {
        acc += p;
        out.push(acc.min(1.0));
    }
    if let Some(last) = out.last_mut() {
        *last = 1.0;
    }
    out
}

pub fn realize(spec: &MarginalSpec) -> Result<DiscretePmf> {
    spec.validate()?;
    match &spec.kind {
        MarginalKind::Empirical { counts } => DiscretePmf::from_weights(counts),
        MarginalKind::PowerLaw { gamma } => power_law_pmf(*gamma, spec.n),
        MarginalKind::Exponential { b } => exponential_pmf(*b, spec.n),
    }
}

// ---------------------------------------------------------------------------
// Fitting

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitFamily {
    PowerLaw,
    Exponential,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitMethod {
    LeastSquaresPmf,
    LeastSquaresSurvival,
    Mle,
}

/// What a power-law least-squares fit is matched against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitTarget {
    /// `p(j) ≈ c j^(-gamma)`
    Density,
    /// `P(K >= x) ≈ c x^(1 - gamma)`
    Survival,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum Goodness {
    Rmse(f64),
    LogLikelihood(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub family: FitFamily,
    pub method: FitMethod,
    /// `gamma` for power laws, `b` for exponentials.
    pub estimate: f64,
    /// Least-squares amplitude (`c` or `a`); absent for MLE.
    pub amplitude: Option<f64>,
    /// 95% bounds on `estimate`.
    pub interval: Option<(f64, f64)>,
    pub goodness: Goodness,
    /// Estimate at or beyond the edge of the family's domain.
    pub boundary: bool,
    pub points: usize,
}

/// Least-squares fit of `y ≈ amp * exp(slope * t)`.
struct ExpLinearFit {
    amp: f64,
    slope: f64,
    slope_se: f64,
    rmse: f64,
    dof: usize,
}

fn rss(ts: &[f64], ys: &[f64], amp: f64, slope: f64) -> f64 {
    ts.iter()
        .zip(ys)
        .map(|(t, y)| {
            let r = y - amp * (slope * t).exp();
            r * r
        })
        .sum()
}

/// Ordinary regression of `ln y` on `t`; requires every `y > 0`.
fn log_linear(ts: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let m = ts.len() as f64;
    let ls: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let t_bar = ts.iter().sum::<f64>() / m;
    let l_bar = ls.iter().sum::<f64>() / m;
    let sxx: f64 = ts.iter().map(|t| (t - t_bar).powi(2)).sum();
    let sxy: f64 = ts
        .iter()
        .zip(&ls)
        .map(|(t, l)| (t - t_bar) * (l - l_bar))
        .sum();
    let slope = sxy / sxx;
    let intercept = l_bar - slope * t_bar;
    let resid: f64 = ts
        .iter()
        .zip(&ls)
        .map(|(t, l)| (l - intercept - slope * t).powi(2))
        .sum();
    let dof = ts.len().saturating_sub(2).max(1) as f64;
    let se = (resid / dof / sxx).sqrt();
    (intercept, slope, se)
}

fn fit_exp_linear(ts: &[f64], ys: &[f64]) -> ExpLinearFit {
    let m = ts.len();
    let dof = m.saturating_sub(2).max(1);

    let (amp, slope, slope_se) = if ys.iter().all(|&y| y > 0.0) {
        let (intercept, slope, se) = log_linear(ts, ys);
        (intercept.exp(), slope, se)
    } else {
        // Zeros carry information the log transform cannot see: minimize the
        // raw residuals, profiling out the amplitude.
        let (pt, py): (Vec<f64>, Vec<f64>) = ts
            .iter()
            .zip(ys)
            .filter(|(_, &y)| y > 0.0)
            .map(|(&t, &y)| (t, y))
            .unzip();
        let (_, start, _) = log_linear(&pt, &py);
        let best_amp = |slope: f64| {
            let (num, den) = ts.iter().zip(ys).fold((0.0, 0.0), |(n, d), (t, y)| {
                let w = (slope * t).exp();
                (n + y * w, d + w * w)
            });
            if den > 0.0 {
                num / den
            } else {
                0.0
            }
        };
        let profile = |slope: f64| rss(ts, ys, best_amp(slope), slope);
        let (slope, _) = golden_section_min(profile, start - 5.0, start + 5.0, 1e-12);
        let amp = best_amp(slope);

        // Gauss-Newton covariance of (amp, slope)
        let (mut j11, mut j12, mut j22) = (0.0, 0.0, 0.0);
        for &t in ts {
            let w = (slope * t).exp();
            let da = w;
            let ds = amp * t * w;
            j11 += da * da;
            j12 += da * ds;
            j22 += ds * ds;
        }
        let det = j11 * j22 - j12 * j12;
        let s2 = rss(ts, ys, amp, slope) / dof as f64;
        let se = if det > 0.0 {
            (s2 * j11 / det).sqrt()
        } else {
            f64::INFINITY
        };
        (amp, slope, se)
    };

    let rmse = (rss(ts, ys, amp, slope) / dof as f64).sqrt();
    ExpLinearFit {
        amp,
        slope,
        slope_se,
        rmse,
        dof,
    }
}

fn t_quantile_975(dof: usize) -> f64 {
    StudentsT::new(0.0, 1.0, dof as f64)
        .map(|t| t.inverse_cdf(0.975))
        .unwrap_or(f64::NAN)
}

fn require_positive_entries(pmf: &DiscretePmf) -> Result<()> {
    let k = pmf.positive_count();
    if k < 3 {
        return Err(Error::InsufficientData(format!(
            "{k} positive entries, at least 3 required"
        )));
    }
    Ok(())
}

fn interval(estimate: f64, se: f64, q: f64) -> Option<(f64, f64)> {
    let half = q * se;
    half.is_finite()
        .then_some((estimate - half, estimate + half))
}

/// Least-squares power-law fit, log-linear when every fitted value is positive.
pub fn fit_power_law_ls(pmf: &DiscretePmf, target: FitTarget) -> Result<FitReport> {
    require_positive_entries(pmf)?;
    let n = pmf.n();
    let ts: Vec<f64> = (1..=n).map(|j| (j as f64).ln()).collect();
    let (ys, method, shift) = match target {
        FitTarget::Density => (pmf.probs().to_vec(), FitMethod::LeastSquaresPmf, 0.0),
        FitTarget::Survival => {
            let mut surv = vec![0.0; n];
            let mut acc = 0.0;
            for j in (0..n).rev() {
                acc += pmf.probs()[j];
                surv[j] = acc;
            }
            (surv, FitMethod::LeastSquaresSurvival, 1.0)
        }
    };
    let fit = fit_exp_linear(&ts, &ys);
    // slope is -gamma (density) or 1 - gamma (survival)
    let gamma = shift - fit.slope;
    Ok(FitReport {
        family: FitFamily::PowerLaw,
        method,
        estimate: gamma,
        amplitude: Some(fit.amp),
        interval: interval(gamma, fit.slope_se, t_quantile_975(fit.dof)),
        goodness: Goodness::Rmse(fit.rmse),
        boundary: gamma <= 1e-9,
        points: n,
    })
}

/// Least-squares fit of `p(j) ≈ a exp(b j)`.
pub fn fit_exponential_ls(pmf: &DiscretePmf) -> Result<FitReport> {
    require_positive_entries(pmf)?;
    let n = pmf.n();
    let ts: Vec<f64> = (1..=n).map(|j| j as f64).collect();
    let fit = fit_exp_linear(&ts, pmf.probs());
    Ok(FitReport {
        family: FitFamily::Exponential,
        method: FitMethod::LeastSquaresPmf,
        estimate: fit.slope,
        amplitude: Some(fit.amp),
        interval: interval(fit.slope, fit.slope_se, t_quantile_975(fit.dof)),
        goodness: Goodness::Rmse(fit.rmse),
        boundary: fit.slope >= -1e-9,
        points: n,
    })
}

pub const MLE_GAMMA_LO: f64 = 0.01;
pub const MLE_GAMMA_HI: f64 = 10.0;

/// Maximum-likelihood exponent of the truncated power law on `1..=n`.
pub fn fit_power_law_mle(sample: &[usize], n: usize) -> Result<FitReport> {
    if n == 0 {
        return Err(Error::EmptySupport);
    }
    if sample.is_empty() {
        return Err(Error::DegenerateSample("empty sample".into()));
    }
    if let Some(&x) = sample.iter().find(|&&x| x == 0 || x > n) {
        return Err(Error::OutOfSupport { value: x, n });
    }
    let count = sample.len() as f64;
    let sum_log: f64 = sample.iter().map(|&x| (x as f64).ln()).sum();
    let logs: Vec<f64> = (1..=n).map(|j| (j as f64).ln()).collect();
    let log_partition = |gamma: f64| {
        // the j = 1 term is exactly 1, so the sum cannot underflow
        logs.iter().map(|l| (-gamma * l).exp()).sum::<f64>().ln()
    };
    let loglik = |gamma: f64| -gamma * sum_log - count * log_partition(gamma);

    let (gamma, ll) = golden_section_max(loglik, MLE_GAMMA_LO, MLE_GAMMA_HI, 1e-8);
    let boundary = gamma - MLE_GAMMA_LO < 1e-6 || MLE_GAMMA_HI - gamma < 1e-6;

    // Fisher information: count * Var(ln K) under the fitted law
    let z = log_partition(gamma);
    let (m1, m2) = logs.iter().fold((0.0, 0.0), |(a, b), l| {
        let p = (-gamma * l - z).exp();
        (a + p * l, b + p * l * l)
    });
    let var = (m2 - m1 * m1).max(0.0);
    let se = 1.0 / (count * var).sqrt();
    let z975 = Normal::new(0.0, 1.0)
        .map(|d| d.inverse_cdf(0.975))
        .unwrap_or(f64::NAN);
    Ok(FitReport {
        family: FitFamily::PowerLaw,
        method: FitMethod::Mle,
        estimate: gamma,
        amplitude: None,
        interval: if boundary {
            None
        } else {
            interval(gamma, se, z975)
        },
        goodness: Goodness::LogLikelihood(ll),
        boundary,
        points: sample.len(),
    })
}

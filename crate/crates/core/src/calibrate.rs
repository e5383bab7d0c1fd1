//! Parameter scans and calibration of copula (and marginal) parameters
//! against a distance or entropy objective.
//!
//! Every calibration runs the same protocol: a uniform coarse grid on each
//! connected branch of the θ-domain, then golden-section refinement between
//! the grid neighbours of the best point. Results carry a location label so
//! that optima stuck on a domain boundary or on an artificial window edge are
//! never mistaken for interior optima.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::copulas::{CopulaSpec, Family};
use crate::error::{Error, Result};
use crate::marginals::{
    exponential_pmf, power_law_pmf, realize, DiscretePmf, FitFamily, MarginalSpec,
};
use crate::measures::{euclidean_distance, shannon_entropy, Goal};
use crate::optim::{golden_section_max, golden_section_min, linspace};
use crate::sklar::{joint_from_copula, JointPmf};

/// Distance kept from the excluded point θ = 0.
pub const THETA_INSET: f64 = 1e-4;
pub const DEFAULT_THETA_MAX: f64 = 50.0;
pub const DEFAULT_COARSE_POINTS: usize = 256;
pub const DEFAULT_TOL: f64 = 1e-6;
/// Optima closer than this fraction of `|edge|` to a branch edge sit on it.
pub const EDGE_FRACTION: f64 = 0.01;

/// `steps` evenly spaced values on `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub lo: f64,
    pub hi: f64,
    pub steps: usize,
}

impl Grid {
    pub fn new(lo: f64, hi: f64, steps: usize) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite()) || lo >= hi {
            return Err(Error::Config(format!("grid needs lo < hi, got {lo}:{hi}")));
        }
        if steps < 2 {
            return Err(Error::Config(format!(
                "grid needs at least 2 steps, got {steps}"
            )));
        }
        Ok(Grid { lo, hi, steps })
    }

    pub fn points(&self) -> Vec<f64> {
        linspace(self.lo, self.hi, self.steps)
    }
}

impl std::str::FromStr for Grid {
    type Err = Error;

    /// `lo:hi:steps`
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let bad = || Error::Config(format!("grid {s:?} is not lo:hi:steps"));
        if parts.len() != 3 {
            return Err(bad());
        }
        let lo = parts[0].trim().parse().map_err(|_| bad())?;
        let hi = parts[1].trim().parse().map_err(|_| bad())?;
        let steps = parts[2].trim().parse().map_err(|_| bad())?;
        Grid::new(lo, hi, steps)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeKind {
    /// A closed end of the parameter domain (Gumbel θ = 1, Clayton θ = -1).
    Domain,
    /// A window truncation or an inset around an excluded point.
    Open,
}

/// One connected piece of a θ-window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Branch {
    pub lo: f64,
    pub hi: f64,
    pub lo_kind: EdgeKind,
    pub hi_kind: EdgeKind,
}

pub fn default_window(family: Family) -> Option<(f64, f64)> {
    match family {
        Family::Gumbel => Some((1.0, DEFAULT_THETA_MAX)),
        Family::Clayton => Some((-1.0, DEFAULT_THETA_MAX)),
        Family::Frank => Some((-DEFAULT_THETA_MAX, DEFAULT_THETA_MAX)),
        _ => None,
    }
}

/// Splits a window into connected branches of the family's θ-domain,
/// keeping [`THETA_INSET`] away from θ = 0 where it is excluded.
pub fn theta_branches(family: Family, window: Option<(f64, f64)>) -> Result<Vec<Branch>> {
    let Some((dlo, dhi)) = default_window(family) else {
        return Err(Error::Config(format!("{family} has no parameter to scan")));
    };
    let (lo, hi) = window.unwrap_or((dlo, dhi));
    if !(lo.is_finite() && hi.is_finite()) || lo >= hi {
        return Err(Error::Config(format!(
            "θ-window needs lo < hi, got {lo}:{hi}"
        )));
    }
    let closed_min = match family {
        Family::Gumbel => Some(1.0),
        Family::Clayton => Some(-1.0),
        _ => None,
    };
    let (lo, lo_kind) = match closed_min {
        Some(m) if lo <= m => (m, EdgeKind::Domain),
        _ => (lo, EdgeKind::Open),
    };

    let mut out = Vec::new();
    if family == Family::Gumbel {
        if lo < hi {
            out.push(Branch {
                lo,
                hi,
                lo_kind,
                hi_kind: EdgeKind::Open,
            });
        }
    } else {
        if lo < -THETA_INSET {
            let b_hi = hi.min(-THETA_INSET);
            if lo < b_hi {
                out.push(Branch {
                    lo,
                    hi: b_hi,
                    lo_kind,
                    hi_kind: EdgeKind::Open,
                });
            }
        }
        if hi > THETA_INSET {
            let (b_lo, kind) = if lo > THETA_INSET {
                (lo, lo_kind)
            } else {
                (THETA_INSET, EdgeKind::Open)
            };
            if b_lo < hi {
                out.push(Branch {
                    lo: b_lo,
                    hi,
                    lo_kind: kind,
                    hi_kind: EdgeKind::Open,
                });
            }
        }
    }
    if out.is_empty() {
        return Err(Error::Config(format!(
            "θ-window {lo}:{hi} does not meet the {family} domain"
        )));
    }
    Ok(out)
}

/// Distributes `steps` grid points over the branches in proportion to their
/// length, at least two per branch.
fn branch_grids(branches: &[Branch], steps: usize) -> Vec<Vec<f64>> {
    let total: f64 = branches.iter().map(|b| b.hi - b.lo).sum();
    let mut left = steps.max(2 * branches.len());
    let mut grids = Vec::with_capacity(branches.len());
    for (k, b) in branches.iter().enumerate() {
        let remaining = branches.len() - k;
        let share = if remaining == 1 {
            left
        } else {
            let want = (steps as f64 * (b.hi - b.lo) / total).round() as usize;
            want.clamp(2, left - 2 * (remaining - 1))
        };
        left -= share;
        grids.push(linspace(b.lo, b.hi, share));
    }
    grids
}

/// What is being calibrated against.
#[derive(Debug, Clone, PartialEq)]
pub enum Objective {
    Entropy,
    Distance(JointPmf),
}

impl Objective {
    pub fn label(&self) -> &'static str {
        match self {
            Objective::Entropy => "entropy",
            Objective::Distance(_) => "distance",
        }
    }

    pub fn evaluate(&self, joint: &JointPmf) -> f64 {
        match self {
            Objective::Entropy => shannon_entropy(joint).nats(),
            Objective::Distance(target) => euclidean_distance(joint, target),
        }
    }
}

fn objective_at(
    family: Family,
    theta: Option<f64>,
    pmf_in: &DiscretePmf,
    pmf_out: &DiscretePmf,
    objective: &Objective,
) -> Result<f64> {
    let spec = CopulaSpec::new(family, theta)?;
    let joint = joint_from_copula(&spec, pmf_in, pmf_out)?;
    Ok(objective.evaluate(&joint))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub params: Vec<f64>,
    pub value: f64,
}

/// Objective values over a parameter grid, rows in grid order.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ScanResult {
    pub axes: Vec<String>,
    pub value_label: String,
    pub rows: Vec<ScanRow>,
}

impl ScanResult {
    pub fn values(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.value).collect()
    }

    /// Column of the named axis.
    pub fn axis(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.axes.iter().position(|a| a == name)?;
        Some(self.rows.iter().map(|r| r.params[k]).collect())
    }
}

fn eval_thetas(
    family: Family,
    thetas: &[f64],
    pmf_in: &DiscretePmf,
    pmf_out: &DiscretePmf,
    objective: &Objective,
) -> Result<Vec<f64>> {
    thetas
        .par_iter()
        .map(|&t| objective_at(family, Some(t), pmf_in, pmf_out, objective))
        .collect()
}

/// Objective over a θ-grid. A grid that crosses an excluded value is split
/// into branches rather than rejected.
pub fn scan_theta(
    family: Family,
    pmf_in: &DiscretePmf,
    pmf_out: &DiscretePmf,
    objective: &Objective,
    grid: Grid,
) -> Result<ScanResult> {
    let branches = theta_branches(family, Some((grid.lo, grid.hi)))?;
    let thetas: Vec<f64> = branch_grids(&branches, grid.steps).concat();
    let values = eval_thetas(family, &thetas, pmf_in, pmf_out, objective)?;
    Ok(ScanResult {
        axes: vec!["theta".into()],
        value_label: objective.label().into(),
        rows: thetas
            .into_iter()
            .zip(values)
            .map(|(t, v)| ScanRow {
                params: vec![t],
                value: v,
            })
            .collect(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Location {
    Interior,
    Boundary,
    AsymptoticNoOptimum,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Extremum {
    pub at: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationResult {
    pub family: Family,
    pub goal: Goal,
    pub objective_label: String,
    pub theta_star: Option<f64>,
    pub k_star: Option<f64>,
    pub objective: f64,
    pub location: Location,
    pub window: (f64, f64),
    /// Best coarse-grid value, before refinement.
    pub coarse_best: f64,
    /// Strict local optima of the coarse scan, ordered by θ.
    pub local_extrema: Vec<Extremum>,
    /// Coarse-grid evaluations; written separately as CSV.
    #[serde(skip)]
    pub trace: ScanResult,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalibrationOptions {
    pub window: Option<(f64, f64)>,
    pub coarse_points: usize,
    pub tol: f64,
}

impl Default for CalibrationOptions {
    fn default() -> Self {
        CalibrationOptions {
            window: None,
            coarse_points: DEFAULT_COARSE_POINTS,
            tol: DEFAULT_TOL,
        }
    }
}

fn better(goal: Goal, a: f64, b: f64) -> bool {
    match goal {
        Goal::Min => a < b,
        Goal::Max => a > b,
    }
}

/// Strict interior local optima of a sampled curve.
pub fn local_extrema(xs: &[f64], ys: &[f64], goal: Goal) -> Vec<Extremum> {
    (1..ys.len().saturating_sub(1))
        .filter(|&i| better(goal, ys[i], ys[i - 1]) && better(goal, ys[i], ys[i + 1]))
        .map(|i| Extremum {
            at: xs[i],
            value: ys[i],
        })
        .collect()
}

fn at_edge(x: f64, edge: f64, tol: f64) -> bool {
    (x - edge).abs() <= (EDGE_FRACTION * edge.abs()).max(2.0 * tol)
}

fn classify(theta: f64, branch: &Branch, tol: f64) -> Location {
    let hit = |edge: f64, kind: EdgeKind| {
        at_edge(theta, edge, tol).then_some(match kind {
            EdgeKind::Domain => Location::Boundary,
            EdgeKind::Open => Location::AsymptoticNoOptimum,
        })
    };
    hit(branch.lo, branch.lo_kind)
        .or_else(|| hit(branch.hi, branch.hi_kind))
        .unwrap_or(Location::Interior)
}

/// Coarse scan on every branch, then golden-section refinement around the
/// best grid point.
pub fn calibrate_theta(
    family: Family,
    pmf_in: &DiscretePmf,
    pmf_out: &DiscretePmf,
    objective: &Objective,
    goal: Goal,
    opts: &CalibrationOptions,
) -> Result<CalibrationResult> {
    let branches = theta_branches(family, opts.window)?;
    let coarse = opts.coarse_points.max(3);

    let mut trace_rows = Vec::new();
    let mut local = Vec::new();
    // (theta, value, branch index)
    let mut best: Option<(f64, f64, usize)> = None;
    let mut coarse_best: Option<f64> = None;

    for (bi, branch) in branches.iter().enumerate() {
        let xs = linspace(branch.lo, branch.hi, coarse);
        let ys = eval_thetas(family, &xs, pmf_in, pmf_out, objective)?;
        local.extend(local_extrema(&xs, &ys, goal));

        let mut idx = 0;
        for i in 1..ys.len() {
            if better(goal, ys[i], ys[idx]) {
                idx = i;
            }
        }
        if coarse_best.is_none_or(|c| better(goal, ys[idx], c)) {
            coarse_best = Some(ys[idx]);
        }

        let a = xs[idx.saturating_sub(1)];
        let b = xs[(idx + 1).min(xs.len() - 1)];
        let f = |t: f64| {
            objective_at(family, Some(t), pmf_in, pmf_out, objective).unwrap_or(match goal {
                Goal::Min => f64::INFINITY,
                Goal::Max => f64::NEG_INFINITY,
            })
        };
        let (mut t, mut v) = match goal {
            Goal::Min => golden_section_min(f, a, b, opts.tol),
            Goal::Max => golden_section_max(f, a, b, opts.tol),
        };
        if better(goal, ys[idx], v) {
            (t, v) = (xs[idx], ys[idx]);
        }
        if best.is_none_or(|(_, bv, _)| better(goal, v, bv)) {
            best = Some((t, v, bi));
        }

        trace_rows.extend(xs.into_iter().zip(ys).map(|(x, y)| ScanRow {
            params: vec![x],
            value: y,
        }));
    }

    let (theta, value, bi) = best.ok_or_else(|| Error::Config("empty θ-window".into()))?;
    let window = (branches[0].lo, branches[branches.len() - 1].hi);
    Ok(CalibrationResult {
        family,
        goal,
        objective_label: objective.label().into(),
        theta_star: Some(theta),
        k_star: None,
        objective: value,
        location: classify(theta, &branches[bi], opts.tol),
        window,
        coarse_best: coarse_best.unwrap_or(value),
        local_extrema: local,
        trace: ScanResult {
            axes: vec!["theta".into()],
            value_label: objective.label().into(),
            rows: trace_rows,
        },
    })
}

/// θ minimizing the distance between the copula joint and `target`.
pub fn minimize_distance(
    family: Family,
    pmf_in: &DiscretePmf,
    pmf_out: &DiscretePmf,
    target: &JointPmf,
    opts: &CalibrationOptions,
) -> Result<CalibrationResult> {
    if target.n_in() != pmf_in.n() || target.n_out() != pmf_out.n() {
        return Err(Error::Shape(format!(
            "target grid {}x{} does not match marginals {}x{}",
            target.n_in(),
            target.n_out(),
            pmf_in.n(),
            pmf_out.n()
        )));
    }
    calibrate_theta(
        family,
        pmf_in,
        pmf_out,
        &Objective::Distance(target.clone()),
        Goal::Min,
        opts,
    )
}

/// θ minimizing or maximizing the joint entropy.
pub fn extremize_entropy(
    family: Family,
    pmf_in: &DiscretePmf,
    pmf_out: &DiscretePmf,
    goal: Goal,
    opts: &CalibrationOptions,
) -> Result<CalibrationResult> {
    calibrate_theta(family, pmf_in, pmf_out, &Objective::Entropy, goal, opts)
}

// ---------------------------------------------------------------------------
// Entropy surfaces over marginal parameters

/// A marginal that is either held fixed or scanned over its parameter `k`.
/// For the exponential family the scanned rate is `b = -k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SurfaceMarginal {
    Fixed(MarginalSpec),
    Scanned { family: FitFamily, n: usize },
}

impl SurfaceMarginal {
    fn is_scanned(&self) -> bool {
        matches!(self, SurfaceMarginal::Scanned { .. })
    }

    fn realize_at(&self, k: Option<f64>) -> Result<DiscretePmf> {
        match (self, k) {
            (SurfaceMarginal::Fixed(spec), _) => realize(spec),
            (SurfaceMarginal::Scanned { family, n }, Some(k)) => match family {
                FitFamily::PowerLaw => power_law_pmf(k, *n),
                FitFamily::Exponential => exponential_pmf(-k, *n),
            },
            (SurfaceMarginal::Scanned { .. }, None) => {
                Err(Error::Config("scanned marginal without a k value".into()))
            }
        }
    }
}

/// For one fixed `k`, the θ-extrema of the entropy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThetaExtrema {
    pub k: Vec<f64>,
    pub max: Extremum,
    pub min: Extremum,
    pub local_maxima: Vec<Extremum>,
    pub local_minima: Vec<Extremum>,
}

/// Behaviour of the entropy along one `k` axis with everything else fixed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KTrend {
    pub axis: String,
    /// Values of the remaining parameters, in `ScanResult::axes` order.
    pub fixed: Vec<f64>,
    pub max: Extremum,
    pub min: Extremum,
    pub max_location: Location,
    pub local_maxima: Vec<Extremum>,
    pub local_minima: Vec<Extremum>,
    /// Smallest grid `k` from which the entropy never increases.
    pub nonincreasing_from: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropySurface {
    pub family: Family,
    pub scan: ScanResult,
    /// Empty for nonparametric copulas.
    pub theta_extrema: Vec<ThetaExtrema>,
    pub k_trends: Vec<KTrend>,
}

fn nonincreasing_from(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let mut start = ys.len().checked_sub(1)?;
    while start > 0 && ys[start - 1] >= ys[start] {
        start -= 1;
    }
    Some(xs[start])
}

fn argbest(xs: &[f64], ys: &[f64], goal: Goal) -> (usize, Extremum) {
    let mut idx = 0;
    for i in 1..ys.len() {
        if better(goal, ys[i], ys[idx]) {
            idx = i;
        }
    }
    (
        idx,
        Extremum {
            at: xs[idx],
            value: ys[idx],
        },
    )
}

/// Entropy over a grid of marginal parameters `k` (and θ for parametric
/// copulas). Each scanned marginal gets its own `k` axis; with two scanned
/// marginals the axes are `k_out` and `k_in`.
pub fn entropy_surface(
    out: &SurfaceMarginal,
    inn: &SurfaceMarginal,
    family: Family,
    grid_k: Grid,
    grid_theta: Option<Grid>,
) -> Result<EntropySurface> {
    let scanned = [out.is_scanned(), inn.is_scanned()];
    let k_axes: Vec<String> = match scanned {
        [true, true] => vec!["k_out".into(), "k_in".into()],
        [true, false] | [false, true] => vec!["k".into()],
        [false, false] => {
            return Err(Error::Config(
                "entropy surface needs at least one scanned marginal".into(),
            ))
        }
    };
    let thetas: Vec<f64> = match (family.is_parametric(), grid_theta) {
        (true, Some(g)) => {
            let branches = theta_branches(family, Some((g.lo, g.hi)))?;
            branch_grids(&branches, g.steps).concat()
        }
        (true, None) => {
            return Err(Error::Config(format!("{family} surface needs a θ-grid")));
        }
        (false, Some(_)) => {
            return Err(Error::Config(format!("{family} takes no θ-grid")));
        }
        (false, None) => Vec::new(),
    };
    if grid_k.lo <= 0.0 {
        return Err(Error::Config(format!(
            "k-grid must stay positive, got lower end {}",
            grid_k.lo
        )));
    }
    let ks = grid_k.points();

    // parameter tuples in row order: k_out-major, then k_in, then θ
    let k_tuples: Vec<(Option<f64>, Option<f64>)> = match scanned {
        [true, true] => ks
            .iter()
            .flat_map(|&a| ks.iter().map(move |&b| (Some(a), Some(b))))
            .collect(),
        [true, false] => ks.iter().map(|&a| (Some(a), None)).collect(),
        _ => ks.iter().map(|&b| (None, Some(b))).collect(),
    };
    let marginals: Vec<(DiscretePmf, DiscretePmf)> = k_tuples
        .iter()
        .map(|&(ko, ki)| Ok((out.realize_at(ko)?, inn.realize_at(ki)?)))
        .collect::<Result<_>>()?;

    let theta_opts: Vec<Option<f64>> = if thetas.is_empty() {
        vec![None]
    } else {
        thetas.iter().copied().map(Some).collect()
    };
    let jobs: Vec<(usize, Option<f64>)> = (0..k_tuples.len())
        .flat_map(|m| theta_opts.iter().map(move |&t| (m, t)))
        .collect();
    let values: Vec<f64> = jobs
        .par_iter()
        .map(|&(m, t)| {
            let (po, pi) = &marginals[m];
            objective_at(family, t, pi, po, &Objective::Entropy)
        })
        .collect::<Result<_>>()?;

    let mut axes = k_axes.clone();
    if family.is_parametric() {
        axes.push("theta".into());
    }
    let rows: Vec<ScanRow> = jobs
        .iter()
        .zip(&values)
        .map(|(&(m, t), &v)| {
            let (ko, ki) = k_tuples[m];
            let params = ko.into_iter().chain(ki).chain(t).collect();
            ScanRow { params, value: v }
        })
        .collect();

    // θ-extrema per k tuple
    let nt = theta_opts.len();
    let mut theta_extrema = Vec::new();
    if family.is_parametric() {
        for m in 0..k_tuples.len() {
            let ys = &values[m * nt..(m + 1) * nt];
            let (ko, ki) = k_tuples[m];
            theta_extrema.push(ThetaExtrema {
                k: ko.into_iter().chain(ki).collect(),
                max: argbest(&thetas, ys, Goal::Max).1,
                min: argbest(&thetas, ys, Goal::Min).1,
                local_maxima: local_extrema(&thetas, ys, Goal::Max),
                local_minima: local_extrema(&thetas, ys, Goal::Min),
            });
        }
    }

    // trends along each k axis, every other parameter held fixed
    let nk = ks.len();
    let mut k_trends = Vec::new();
    for (ax, name) in k_axes.iter().enumerate() {
        let n_other_k = if k_axes.len() == 2 { nk } else { 1 };
        for other in 0..n_other_k {
            for ti in 0..nt {
                let ys: Vec<f64> = (0..nk)
                    .map(|step| {
                        let m = match (k_axes.len(), ax) {
                            (2, 0) => step * nk + other,
                            (2, _) => other * nk + step,
                            _ => step,
                        };
                        values[m * nt + ti]
                    })
                    .collect();
                let mut fixed = Vec::new();
                if k_axes.len() == 2 {
                    fixed.push(ks[other]);
                }
                if let Some(t) = theta_opts[ti] {
                    fixed.push(t);
                }
                let (imax, max) = argbest(&ks, &ys, Goal::Max);
                let max_location = if imax == 0 || imax == nk - 1 {
                    Location::Boundary
                } else {
                    Location::Interior
                };
                k_trends.push(KTrend {
                    axis: name.clone(),
                    fixed,
                    max,
                    min: argbest(&ks, &ys, Goal::Min).1,
                    max_location,
                    local_maxima: local_extrema(&ks, &ys, Goal::Max),
                    local_minima: local_extrema(&ks, &ys, Goal::Min),
                    nonincreasing_from: nonincreasing_from(&ks, &ys),
                });
            }
        }
    }

    Ok(EntropySurface {
        family,
        scan: ScanResult {
            axes,
            value_label: "entropy".into(),
            rows,
        },
        theta_extrema,
        k_trends,
    })
}

/// Grid extremum of a surface over all its parameters.
pub fn surface_extremum(surface: &EntropySurface, goal: Goal) -> Option<CalibrationResult> {
    let rows = &surface.scan.rows;
    let mut idx = 0;
    for i in 1..rows.len() {
        if better(goal, rows[i].value, rows[idx].value) {
            idx = i;
        }
    }
    let row = rows.get(idx)?;
    let axes = &surface.scan.axes;
    let theta_star = axes
        .iter()
        .position(|a| a == "theta")
        .map(|p| row.params[p]);
    let k_star = row.params.first().copied();
    // on the edge of any axis?
    let on_edge = axes.iter().enumerate().any(|(p, _)| {
        let col: Vec<f64> = rows.iter().map(|r| r.params[p]).collect();
        let lo = col.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = col.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        row.params[p] == lo || row.params[p] == hi
    });
    Some(CalibrationResult {
        family: surface.family,
        goal,
        objective_label: "entropy".into(),
        theta_star,
        k_star,
        objective: row.value,
        location: if on_edge {
            Location::Boundary
        } else {
            Location::Interior
        },
        window: theta_star
            .map(|_| {
                let col = surface.scan.axis("theta").unwrap_or_default();
                (
                    col.iter().copied().fold(f64::INFINITY, f64::min),
                    col.iter().copied().fold(f64::NEG_INFINITY, f64::max),
                )
            })
            .unwrap_or((f64::NAN, f64::NAN)),
        coarse_best: row.value,
        local_extrema: Vec::new(),
        trace: ScanResult::default(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::marginals::exponential_pmf;

    fn fixture() -> (DiscretePmf, DiscretePmf) {
        (
            exponential_pmf(-0.9727, 10).unwrap(),
            power_law_pmf(2.159, 19).unwrap(),
        )
    }

    #[test]
    fn grid_parsing() {
        let g: Grid = "1:10:100".parse().unwrap();
        assert_eq!(g, Grid::new(1.0, 10.0, 100).unwrap());
        assert!("1:10".parse::<Grid>().is_err());
        assert!("10:1:5".parse::<Grid>().is_err());
        assert!("1:10:1".parse::<Grid>().is_err());
    }

    #[test]
    fn default_branches() {
        let g = theta_branches(Family::Gumbel, None).unwrap();
        assert_eq!(g.len(), 1);
        assert_eq!((g[0].lo, g[0].hi), (1.0, 50.0));
        assert_eq!(g[0].lo_kind, EdgeKind::Domain);

        let c = theta_branches(Family::Clayton, None).unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!((c[0].lo, c[0].hi), (-1.0, -THETA_INSET));
        assert_eq!((c[1].lo, c[1].hi), (THETA_INSET, 50.0));
        assert_eq!(c[0].lo_kind, EdgeKind::Domain);
        assert_eq!(c[1].lo_kind, EdgeKind::Open);

        let f = theta_branches(Family::Frank, None).unwrap();
        assert_eq!((f[0].lo, f[0].hi), (-50.0, -THETA_INSET));
        assert_eq!(f[0].lo_kind, EdgeKind::Open);

        assert!(theta_branches(Family::Product, None).is_err());
        assert!(theta_branches(Family::Gumbel, Some((-3.0, 0.5))).is_err());
        // a window inside one branch stays whole
        let w = theta_branches(Family::Frank, Some((2.0, 5.0))).unwrap();
        assert_eq!(w.len(), 1);
        assert_eq!(w[0].lo_kind, EdgeKind::Open);
    }

    #[test]
    fn scan_shape_and_split() {
        let (pi, po) = fixture();
        let s = scan_theta(
            Family::Gumbel,
            &pi,
            &po,
            &Objective::Entropy,
            "1:10:100".parse().unwrap(),
        )
        .unwrap();
        assert_eq!(s.rows.len(), 100);
        assert_eq!(s.axes, vec!["theta"]);

        let s = scan_theta(
            Family::Frank,
            &pi,
            &po,
            &Objective::Entropy,
            "-5:5:50".parse().unwrap(),
        )
        .unwrap();
        assert_eq!(s.rows.len(), 50);
        assert!(s.rows.iter().all(|r| r.params[0].abs() >= THETA_INSET));
    }

    #[test]
    fn gumbel_distance_to_product_is_minimal_at_one() {
        let (pi, po) = fixture();
        let target = joint_from_copula(&CopulaSpec::product(), &pi, &po).unwrap();
        let s = scan_theta(
            Family::Gumbel,
            &pi,
            &po,
            &Objective::Distance(target.clone()),
            "1:10:50".parse().unwrap(),
        )
        .unwrap();
        assert_eq!(s.rows[0].value, 0.0);
        assert!(s.values().windows(2).all(|w| w[1] >= w[0]));

        let r = minimize_distance(Family::Gumbel, &pi, &po, &target, &Default::default()).unwrap();
        assert_eq!(r.theta_star, Some(1.0));
        assert!(r.objective < 1e-9);
        assert_eq!(r.location, Location::Boundary);
    }

    #[test]
    fn frank_self_recovery() {
        let (pi, po) = fixture();
        let target = joint_from_copula(&CopulaSpec::frank(5.0).unwrap(), &pi, &po).unwrap();
        let r = minimize_distance(Family::Frank, &pi, &po, &target, &Default::default()).unwrap();
        assert!((r.theta_star.unwrap() - 5.0).abs() < 1e-3);
        assert_eq!(r.location, Location::Interior);
        assert!(r.objective <= r.coarse_best);
    }

    #[test]
    fn clayton_to_lower_frechet_hits_domain_boundary() {
        let (pi, po) = fixture();
        let target = joint_from_copula(&CopulaSpec::lower_frechet(), &pi, &po).unwrap();
        let opts = CalibrationOptions {
            window: Some((-1.0, -THETA_INSET)),
            ..Default::default()
        };
        let r = minimize_distance(Family::Clayton, &pi, &po, &target, &opts).unwrap();
        assert_eq!(r.theta_star, Some(-1.0));
        assert_eq!(r.location, Location::Boundary);
    }

    #[test]
    fn target_shape_checked() {
        let (pi, po) = fixture();
        let target = JointPmf::from_mass(1, 1, vec![1.0]).unwrap();
        assert!(matches!(
            minimize_distance(Family::Frank, &pi, &po, &target, &Default::default()),
            Err(Error::Shape(_))
        ));
    }

    #[test]
    fn nonincreasing_tail() {
        let xs = [1.0, 2.0, 3.0, 4.0, 5.0];
        assert_eq!(
            nonincreasing_from(&xs, &[1.0, 3.0, 2.0, 2.0, 1.0]),
            Some(2.0)
        );
        assert_eq!(
            nonincreasing_from(&xs, &[5.0, 4.0, 3.0, 2.0, 1.0]),
            Some(1.0)
        );
        assert_eq!(
            nonincreasing_from(&xs, &[1.0, 2.0, 3.0, 4.0, 5.0]),
            Some(5.0)
        );
    }

    #[test]
    fn surface_configuration_errors() {
        let fixed = SurfaceMarginal::Fixed(MarginalSpec::exponential(-0.9727, 10));
        let scanned = SurfaceMarginal::Scanned {
            family: FitFamily::PowerLaw,
            n: 19,
        };
        let gk: Grid = "0.5:3:6".parse().unwrap();
        let gt: Grid = "1:5:5".parse().unwrap();
        assert!(entropy_surface(&fixed, &fixed, Family::Product, gk, None).is_err());
        assert!(entropy_surface(&scanned, &fixed, Family::Gumbel, gk, None).is_err());
        assert!(entropy_surface(&scanned, &fixed, Family::Product, gk, Some(gt)).is_err());
        let bad_k: Grid = "-1:3:6".parse().unwrap();
        assert!(entropy_surface(&scanned, &fixed, Family::Product, bad_k, None).is_err());

        let s = entropy_surface(&scanned, &fixed, Family::Gumbel, gk, Some(gt)).unwrap();
        assert_eq!(s.scan.axes, vec!["k", "theta"]);
        assert_eq!(s.scan.rows.len(), 30);
        assert_eq!(s.theta_extrema.len(), 6);
        assert_eq!(s.k_trends.len(), 5);

        let both = entropy_surface(&scanned, &scanned, Family::Product, gk, None).unwrap();
        assert_eq!(both.scan.axes, vec!["k_out", "k_in"]);
        assert_eq!(both.scan.rows.len(), 36);
        assert_eq!(both.k_trends.len(), 12);
    }
}

//! One-shot bundle of the three analyses for a dataset: distances to the
//! empirical joint, entropy extrema, and entropy surfaces with a parametric
//! out-degree law.

use serde::{Deserialize, Serialize};

use crate::calibrate::{
    entropy_surface, extremize_entropy, minimize_distance, CalibrationOptions, CalibrationResult,
    EntropySurface, Grid, KTrend, SurfaceMarginal, ThetaExtrema,
};
use crate::copulas::{CopulaSpec, Family};
use crate::error::{Error, Result};
use crate::io::PmfDocument;
use crate::marginals::{
    fit_exponential_ls, fit_power_law_ls, fit_power_law_mle, DiscretePmf, FitFamily, FitReport,
    FitTarget, MarginalSpec,
};
use crate::measures::{euclidean_distance, shannon_entropy, Goal};
use crate::sklar::{joint_from_copula, JointPmf};

/// Data a report is computed from.
#[derive(Debug, Clone)]
pub struct ReportInput {
    pub source: String,
    pub pmf_in: DiscretePmf,
    pub pmf_out: DiscretePmf,
    /// Observed joint, when paired data exist.
    pub empirical: Option<JointPmf>,
    /// Raw out-degree observations, for the likelihood fit.
    pub k_out_sample: Option<Vec<usize>>,
}

impl ReportInput {
    /// Marginals taken from the observed joint so that the product joint is
    /// directly comparable to it.
    pub fn from_empirical(
        source: impl Into<String>,
        joint: JointPmf,
        k_out: Vec<usize>,
    ) -> Result<Self> {
        Ok(ReportInput {
            source: source.into(),
            pmf_in: DiscretePmf::from_weights(&joint.in_marginal())?,
            pmf_out: DiscretePmf::from_weights(&joint.out_marginal())?,
            empirical: Some(joint),
            k_out_sample: Some(k_out),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportOptions {
    pub calibration: CalibrationOptions,
    pub k_grid: Grid,
    pub theta_grids: Vec<(Family, Grid)>,
}

impl Default for ReportOptions {
    fn default() -> Self {
        ReportOptions {
            calibration: CalibrationOptions::default(),
            k_grid: Grid {
                lo: 0.1,
                hi: 4.0,
                steps: 40,
            },
            theta_grids: vec![
                (
                    Family::Gumbel,
                    Grid {
                        lo: 1.0,
                        hi: 20.0,
                        steps: 39,
                    },
                ),
                (
                    Family::Clayton,
                    Grid {
                        lo: -1.0,
                        hi: 20.0,
                        steps: 42,
                    },
                ),
                (
                    Family::Frank,
                    Grid {
                        lo: -20.0,
                        hi: 20.0,
                        steps: 40,
                    },
                ),
            ],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NonParametric {
    pub product: f64,
    pub lower_frechet: f64,
    pub upper_frechet: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceCase {
    pub distances: NonParametric,
    pub calibrations: Vec<CalibrationResult>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropyCase {
    pub empirical: Option<f64>,
    pub nonparametric: NonParametric,
    pub calibrations: Vec<CalibrationResult>,
}

/// Surface summary without the full grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfaceSummary {
    pub family: Family,
    pub max: Option<CalibrationResult>,
    pub min: Option<CalibrationResult>,
    pub theta_extrema: Vec<ThetaExtrema>,
    pub k_trends: Vec<KTrend>,
}

impl SurfaceSummary {
    fn from_surface(s: &EntropySurface) -> Self {
        SurfaceSummary {
            family: s.family,
            max: crate::calibrate::surface_extremum(s, Goal::Max),
            min: crate::calibrate::surface_extremum(s, Goal::Min),
            theta_extrema: s.theta_extrema.clone(),
            k_trends: s.k_trends.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfaceCase {
    pub k_grid: Grid,
    pub surfaces: Vec<SurfaceSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub source: String,
    pub marginal_in: PmfDocument,
    pub marginal_out: PmfDocument,
    pub fits: Vec<FitReport>,
    pub distance: Option<DistanceCase>,
    pub entropy: EntropyCase,
    pub surfaces: SurfaceCase,
}

fn nonparametric<F>(pin: &DiscretePmf, pout: &DiscretePmf, f: F) -> Result<NonParametric>
where
    F: Fn(&JointPmf) -> f64,
{
    let eval = |spec: CopulaSpec| joint_from_copula(&spec, pin, pout).map(|j| f(&j));
    Ok(NonParametric {
        product: eval(CopulaSpec::product())?,
        lower_frechet: eval(CopulaSpec::lower_frechet())?,
        upper_frechet: eval(CopulaSpec::upper_frechet())?,
    })
}

pub fn build_report(input: &ReportInput, opts: &ReportOptions) -> Result<Report> {
    let (pin, pout) = (&input.pmf_in, &input.pmf_out);
    if pin.n() == 0 || pout.n() == 0 {
        return Err(Error::EmptySupport);
    }

    let mut fits = Vec::new();
    if pout.positive_count() >= 3 {
        fits.push(fit_power_law_ls(pout, FitTarget::Density)?);
        fits.push(fit_power_law_ls(pout, FitTarget::Survival)?);
    }
    if let Some(sample) = &input.k_out_sample {
        fits.push(fit_power_law_mle(sample, pout.n())?);
    }
    if pin.positive_count() >= 3 {
        fits.push(fit_exponential_ls(pin)?);
    }

    let cal = &opts.calibration;
    let distance = match &input.empirical {
        Some(target) => {
            let distances = nonparametric(pin, pout, |j| euclidean_distance(j, target))?;
            let calibrations = Family::ARCHIMEDEAN
                .iter()
                .map(|&f| minimize_distance(f, pin, pout, target, cal))
                .collect::<Result<_>>()?;
            Some(DistanceCase {
                distances,
                calibrations,
            })
        }
        None => None,
    };

    let mut calibrations = Vec::new();
    for &family in &Family::ARCHIMEDEAN {
        for goal in [Goal::Min, Goal::Max] {
            calibrations.push(extremize_entropy(family, pin, pout, goal, cal)?);
        }
    }
    let entropy = EntropyCase {
        empirical: input.empirical.as_ref().map(|j| shannon_entropy(j).nats()),
        nonparametric: nonparametric(pin, pout, |j| shannon_entropy(j).nats())?,
        calibrations,
    };

    // power law for k_out, observed k_in
    let out = SurfaceMarginal::Scanned {
        family: FitFamily::PowerLaw,
        n: pout.n(),
    };
    let inn = SurfaceMarginal::Fixed(MarginalSpec::empirical(pin.probs().to_vec()));
    let mut surfaces = Vec::new();
    for family in Family::ALL {
        let theta_grid = opts
            .theta_grids
            .iter()
            .find(|(f, _)| *f == family)
            .map(|(_, g)| *g);
        if family.is_parametric() && theta_grid.is_none() {
            continue;
        }
        let s = entropy_surface(&out, &inn, family, opts.k_grid, theta_grid)?;
        surfaces.push(SurfaceSummary::from_surface(&s));
    }

    Ok(Report {
        source: input.source.clone(),
        marginal_in: PmfDocument::new(pin, None),
        marginal_out: PmfDocument::new(pout, None),
        fits,
        distance,
        entropy,
        surfaces: SurfaceCase {
            k_grid: opts.k_grid,
            surfaces,
        },
    })
}

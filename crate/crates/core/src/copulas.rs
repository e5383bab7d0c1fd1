//! Bivariate copulas: independence, the two Fréchet bounds, and the Gumbel,
//! Clayton and Frank Archimedean families.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Below this magnitude Clayton and Frank are evaluated as the product copula.
pub const NEAR_ZERO_THETA: f64 = 1e-6;

/// Above this, Frank switches to a factored form that avoids `ln(0)`.
const FRANK_LARGE_THETA: f64 = 20.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Product,
    LowerFrechet,
    UpperFrechet,
    Gumbel,
    Clayton,
    Frank,
}

impl Family {
    pub const ALL: [Family; 6] = [
        Family::Product,
        Family::LowerFrechet,
        Family::UpperFrechet,
        Family::Gumbel,
        Family::Clayton,
        Family::Frank,
    ];

    pub const ARCHIMEDEAN: [Family; 3] = [Family::Gumbel, Family::Clayton, Family::Frank];

    pub fn is_parametric(self) -> bool {
        matches!(self, Family::Gumbel | Family::Clayton | Family::Frank)
    }

    /// Whether `theta` lies in the family's parameter domain.
    pub fn admits(self, theta: f64) -> bool {
        if !theta.is_finite() {
            return false;
        }
        match self {
            Family::Gumbel => theta >= 1.0,
            Family::Clayton => theta >= -1.0 && theta != 0.0,
            Family::Frank => theta != 0.0,
            _ => false,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Family::Product => "product",
            Family::LowerFrechet => "frechet-lower",
            Family::UpperFrechet => "frechet-upper",
            Family::Gumbel => "gumbel",
            Family::Clayton => "clayton",
            Family::Frank => "frank",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::Config(format!("unknown copula family {s:?}")))
    }
}

/// A copula family together with its parameter. Construction validates the
/// parameter, so evaluation only has to check its arguments.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSpec", into = "RawSpec")]
pub struct CopulaSpec {
    family: Family,
    theta: Option<f64>,
}

#[derive(Serialize, Deserialize)]
struct RawSpec {
    family: Family,
    theta: Option<f64>,
}

impl TryFrom<RawSpec> for CopulaSpec {
    type Error = Error;

    fn try_from(raw: RawSpec) -> Result<Self> {
        CopulaSpec::new(raw.family, raw.theta)
    }
}

impl From<CopulaSpec> for RawSpec {
    fn from(s: CopulaSpec) -> Self {
        RawSpec {
            family: s.family,
            theta: s.theta,
        }
    }
}

impl CopulaSpec {
    pub fn new(family: Family, theta: Option<f64>) -> Result<Self> {
        match (family.is_parametric(), theta) {
            (false, None) => Ok(CopulaSpec { family, theta }),
            (false, Some(_)) => Err(Error::Domain(format!("{family} takes no parameter"))),
            (true, None) => Err(Error::Domain(format!("{family} requires a parameter"))),
            (true, Some(t)) if family.admits(t) => Ok(CopulaSpec { family, theta }),
            (true, Some(t)) => Err(Error::Domain(format!(
                "theta = {t} outside the {family} domain"
            ))),
        }
    }

    pub fn product() -> Self {
        CopulaSpec {
            family: Family::Product,
            theta: None,
        }
    }

    pub fn lower_frechet() -> Self {
        CopulaSpec {
            family: Family::LowerFrechet,
            theta: None,
        }
    }

    pub fn upper_frechet() -> Self {
        CopulaSpec {
            family: Family::UpperFrechet,
            theta: None,
        }
    }

    pub fn gumbel(theta: f64) -> Result<Self> {
        Self::new(Family::Gumbel, Some(theta))
    }

    pub fn clayton(theta: f64) -> Result<Self> {
        Self::new(Family::Clayton, Some(theta))
    }

    pub fn frank(theta: f64) -> Result<Self> {
        Self::new(Family::Frank, Some(theta))
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn theta(&self) -> Option<f64> {
        self.theta
    }

    /// `C(u, v)`; fails when either argument leaves `[0, 1]`.
    pub fn value(&self, u: f64, v: f64) -> Result<f64> {
        for (name, x) in [("u", u), ("v", v)] {
            if !(0.0..=1.0).contains(&x) {
                return Err(Error::Range(format!("{name} = {x} outside [0, 1]")));
            }
        }
        Ok(self.eval(u, v))
    }

    /// `C(u, v)` for arguments already known to be in `[0, 1]`.
    pub fn eval(&self, u: f64, v: f64) -> f64 {
        if u == 0.0 || v == 0.0 {
            return 0.0;
        }
        if u == 1.0 {
            return v;
        }
        if v == 1.0 {
            return u;
        }
        let theta = self.theta.unwrap_or(f64::NAN);
        let c = match self.family {
            Family::Product => u * v,
            Family::LowerFrechet => lower_frechet(u, v),
            Family::UpperFrechet => u.min(v),
            Family::Gumbel => gumbel(theta, u, v),
            Family::Clayton => clayton(theta, u, v),
            Family::Frank => frank(theta, u, v),
        };
        c.clamp(0.0, 1.0)
    }
}

impl fmt::Display for CopulaSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.theta {
            Some(t) => write!(f, "{}:{}", self.family, t),
            None => write!(f, "{}", self.family),
        }
    }
}

/// Parses `product`, `frechet-lower`, `frechet-upper`, `gumbel:θ`,
/// `clayton:θ`, `frank:θ`.
impl FromStr for CopulaSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, theta) = match s.split_once(':') {
            Some((name, t)) => {
                let theta = t
                    .trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Config(format!("bad copula parameter {t:?}")))?;
                (name, Some(theta))
            }
            None => (s, None),
        };
        CopulaSpec::new(name.parse()?, theta)
    }
}

pub fn copula_value(spec: &CopulaSpec, u: f64, v: f64) -> Result<f64> {
    spec.value(u, v)
}

fn lower_frechet(u: f64, v: f64) -> f64 {
    (u + v - 1.0).max(0.0)
}

fn gumbel(theta: f64, u: f64, v: f64) -> f64 {
    if theta == 1.0 {
        return u * v;
    }
    let a = -u.ln();
    let b = -v.ln();
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    // (a^θ + b^θ)^(1/θ) = hi (1 + (lo/hi)^θ)^(1/θ), no overflow for large θ
    let norm = hi * (1.0 + (lo / hi).powf(theta)).powf(1.0 / theta);
    (-norm).exp()
}

fn clayton(theta: f64, u: f64, v: f64) -> f64 {
    if theta == -1.0 {
        return lower_frechet(u, v);
    }
    if theta.abs() < NEAR_ZERO_THETA {
        return u * v;
    }
    // u^-θ + v^-θ - 1 = 1 + expm1(-θ ln u) + expm1(-θ ln v)
    let s = (-theta * u.ln()).exp_m1() + (-theta * v.ln()).exp_m1();
    if s <= -1.0 {
        // max{.,0} clamp before the negative power
        return 0.0;
    }
    if s.is_infinite() {
        return 0.0;
    }
    (-s.ln_1p() / theta).exp()
}

fn frank(theta: f64, u: f64, v: f64) -> f64 {
    if theta.abs() < NEAR_ZERO_THETA {
        return u * v;
    }
    if theta < -FRANK_LARGE_THETA {
        // C_θ(u, v) = u - C_{-θ}(u, 1 - v)
        return u - frank_large(-theta, u, 1.0 - v);
    }
    if theta > FRANK_LARGE_THETA {
        return frank_large(theta, u, v);
    }
    let x = (-theta * u).exp_m1() * (-theta * v).exp_m1() / (-theta).exp_m1();
    -x.ln_1p() / theta
}

/// Frank copula for large positive θ, written as
/// `lo - (1/θ)[ln(1 + e^{-θ(hi-lo)} - e^{-θ hi} - e^{-θ(1-lo)}) - ln(1 - e^{-θ})]`
/// with `lo = min(u, v)`, `hi = max(u, v)`.
fn frank_large(theta: f64, u: f64, v: f64) -> f64 {
    if u == 0.0 || v == 0.0 {
        return 0.0;
    }
    let (lo, hi) = if u <= v { (u, v) } else { (v, u) };
    let t = (-theta * (hi - lo)).exp() - (-theta * hi).exp() - (-theta * (1.0 - lo)).exp();
    lo - (t.ln_1p() - (-(-theta).exp()).ln_1p()) / theta
}

/// Worst violation of each copula axiom on a uniform grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AxiomReport {
    pub grid_size: usize,
    /// `max |C(u,0)|, |C(0,v)|`
    pub groundedness: f64,
    /// `max |C(u,1) - u|, |C(1,v) - v|`
    pub margins: f64,
    /// Most negative rectangle volume, reported as a positive magnitude.
    pub two_increasing: f64,
}

impl AxiomReport {
    pub fn worst(&self) -> f64 {
        self.groundedness.max(self.margins).max(self.two_increasing)
    }
}

pub fn check_copula_axioms(spec: &CopulaSpec, grid_size: usize) -> AxiomReport {
    let g = grid_size.max(2);
    let pts: Vec<f64> = (0..g)
        .map(|i| {
            if i == g - 1 {
                1.0
            } else {
                i as f64 / (g - 1) as f64
            }
        })
        .collect();
    let vals: Vec<Vec<f64>> = pts
        .iter()
        .map(|&u| pts.iter().map(|&v| spec.eval(u, v)).collect())
        .collect();

    let mut grounded: f64 = 0.0;
    let mut margins: f64 = 0.0;
    for (k, &x) in pts.iter().enumerate() {
        grounded = grounded.max(vals[k][0].abs()).max(vals[0][k].abs());
        margins = margins
            .max((vals[k][g - 1] - x).abs())
            .max((vals[g - 1][k] - x).abs());
    }
    let mut neg: f64 = 0.0;
    for i in 1..g {
        for j in 1..g {
            let vol = vals[i][j] - vals[i - 1][j] - vals[i][j - 1] + vals[i - 1][j - 1];
            neg = neg.max(-vol);
        }
    }
    AxiomReport {
        grid_size: g,
        groundedness: grounded,
        margins,
        two_increasing: neg,
    }
}

//! Discrete joint laws of `(k_in, k_out)`: built from two marginals and a
//! copula through rectangle differences, or counted from paired data.

use serde::{Deserialize, Serialize};

use crate::copulas::CopulaSpec;
use crate::error::{Error, Result};
use crate::marginals::{cdf, DiscretePmf};
use crate::net::DegreeSample;

/// Rectangle masses this far below zero are floating-point noise and clamped.
pub const CLAMP_TOL: f64 = 1e-12;
pub const MASS_TOL: f64 = 1e-10;

/// `P(k_in = i, k_out = j)` on `[1..n_in] x [1..n_out]`, row-major with
/// row `i - 1` holding `k_in = i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "JointRows", into = "JointRows")]
pub struct JointPmf {
    n_in: usize,
    n_out: usize,
    mass: Vec<f64>,
}

/// Serialized form: `{n_in, n_out, mass: [[row], ...]}`.
#[derive(Serialize, Deserialize)]
struct JointRows {
    n_in: usize,
    n_out: usize,
    mass: Vec<Vec<f64>>,
}

impl TryFrom<JointRows> for JointPmf {
    type Error = Error;

    fn try_from(r: JointRows) -> Result<Self> {
        if r.mass.len() != r.n_in || r.mass.iter().any(|row| row.len() != r.n_out) {
            return Err(Error::Shape(format!(
                "mass rows do not match {} x {}",
                r.n_in, r.n_out
            )));
        }
        JointPmf::from_mass(r.n_in, r.n_out, r.mass.concat())
    }
}

impl From<JointPmf> for JointRows {
    fn from(j: JointPmf) -> Self {
        let mass = j.rows().map(|r| r.to_vec()).collect();
        JointRows {
            n_in: j.n_in,
            n_out: j.n_out,
            mass,
        }
    }
}

impl JointPmf {
    /// Validates shape, nonnegativity and unit total within `1e-10`.
    pub fn from_mass(n_in: usize, n_out: usize, mass: Vec<f64>) -> Result<Self> {
        if n_in == 0 || n_out == 0 {
            return Err(Error::EmptySupport);
        }
        if mass.len() != n_in * n_out {
            return Err(Error::Shape(format!(
                "{} cells for a {n_in} x {n_out} grid",
                mass.len()
            )));
        }
        if let Some(bad) = mass.iter().find(|m| !m.is_finite() || **m < 0.0) {
            return Err(Error::InvalidDistribution(format!("cell mass {bad}")));
        }
        let total: f64 = mass.iter().sum();
        if (total - 1.0).abs() > MASS_TOL {
            return Err(Error::InvalidDistribution(format!(
                "joint mass sums to {total}"
            )));
        }
        Ok(JointPmf { n_in, n_out, mass })
    }

    /// Normalizes nonnegative cell weights such as counts.
    pub fn from_weights(n_in: usize, n_out: usize, weights: &[f64]) -> Result<Self> {
        let total: f64 = weights.iter().sum();
        if total.is_nan() || total <= 0.0 {
            return Err(Error::InvalidDistribution("weights sum to zero".into()));
        }
        Self::from_mass(n_in, n_out, weights.iter().map(|w| w / total).collect())
    }

    pub fn n_in(&self) -> usize {
        self.n_in
    }

    pub fn n_out(&self) -> usize {
        self.n_out
    }

    pub fn cells(&self) -> usize {
        self.mass.len()
    }

    /// Cell masses in row-major order.
    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    /// `P(k_in = i, k_out = j)` with 1-based degrees; zero off the grid.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        if i == 0 || j == 0 || i > self.n_in || j > self.n_out {
            0.0
        } else {
            self.mass[(i - 1) * self.n_out + (j - 1)]
        }
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.mass.chunks(self.n_out)
    }

    /// Marginal of `k_in` (row sums).
    pub fn in_marginal(&self) -> Vec<f64> {
        self.rows().map(|r| r.iter().sum()).collect()
    }

    /// Marginal of `k_out` (column sums).
    pub fn out_marginal(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.n_out];
        for row in self.rows() {
            for (acc, m) in out.iter_mut().zip(row) {
                *acc += m;
            }
        }
        out
    }

    /// Zero-pads to an `n_in x n_out` grid at least as large as this one.
    pub fn padded(&self, n_in: usize, n_out: usize) -> JointPmf {
        let (n_in, n_out) = (n_in.max(self.n_in), n_out.max(self.n_out));
        let mut mass = vec![0.0; n_in * n_out];
        for (i, row) in self.rows().enumerate() {
            mass[i * n_out..i * n_out + self.n_out].copy_from_slice(row);
        }
        JointPmf { n_in, n_out, mass }
    }
}

/// Pads both joints to their common (elementwise maximum) support.
pub fn align(a: &JointPmf, b: &JointPmf) -> (JointPmf, JointPmf) {
    let n_in = a.n_in.max(b.n_in);
    let n_out = a.n_out.max(b.n_out);
    (a.padded(n_in, n_out), b.padded(n_in, n_out))
}

/// Joint law with the given marginals and copula:
/// `P(i,j) = C(u_i, v_j) - C(u_{i-1}, v_j) - C(u_i, v_{j-1}) + C(u_{i-1}, v_{j-1})`.
///
/// Cells below `-1e-12` are reported as [`Error::NegativeMass`]; smaller
/// negative noise is clamped to zero.
pub fn joint_from_copula(
    spec: &CopulaSpec,
    pmf_in: &DiscretePmf,
    pmf_out: &DiscretePmf,
) -> Result<JointPmf> {
    let u = cdf(pmf_in);
    let v = cdf(pmf_out);
    let (n_in, n_out) = (pmf_in.n(), pmf_out.n());

    let width = n_out + 1;
    let mut grid = vec![0.0; (n_in + 1) * width];
    for (a, &ua) in u.iter().enumerate() {
        for (b, &vb) in v.iter().enumerate() {
            grid[a * width + b] = spec.eval(ua, vb);
        }
    }

    let mut mass = Vec::with_capacity(n_in * n_out);
    for i in 1..=n_in {
        for j in 1..=n_out {
            let m = grid[i * width + j] - grid[(i - 1) * width + j] - grid[i * width + j - 1]
                + grid[(i - 1) * width + j - 1];
            if m < -CLAMP_TOL {
                return Err(Error::NegativeMass { i, j, value: m });
            }
            mass.push(m.max(0.0));
        }
    }

    let total: f64 = mass.iter().sum();
    if (total - 1.0).abs() > CLAMP_TOL {
        for m in &mut mass {
            *m /= total;
        }
    }
    JointPmf::from_mass(n_in, n_out, mass)
}

/// Relative frequencies of the observed `(k_in, k_out)` pairs.
pub fn empirical_joint(sample: &DegreeSample) -> Result<JointPmf> {
    if sample.pairs.is_empty() {
        return Err(Error::DegenerateSample("no pairs".into()));
    }
    let (n_in, n_out) = (sample.n_in_max, sample.n_out_max);
    let mut counts = vec![0.0; n_in * n_out];
    for &(i, j) in &sample.pairs {
        if i == 0 || i > n_in {
            return Err(Error::OutOfSupport { value: i, n: n_in });
        }
        if j == 0 || j > n_out {
            return Err(Error::OutOfSupport { value: j, n: n_out });
        }
        counts[(i - 1) * n_out + (j - 1)] += 1.0;
    }
    JointPmf::from_weights(n_in, n_out, &counts)
}

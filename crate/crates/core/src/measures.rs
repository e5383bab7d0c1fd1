//! Scalar functionals on joint laws and the rearrangement bound for scalar
//! products.

use serde::{Deserialize, Serialize};

use crate::copulas::CopulaSpec;
use crate::error::{Error, Result};
use crate::marginals::{cdf, DiscretePmf};
use crate::sklar::{align, JointPmf};

/// Shannon entropy in nats.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EntropyValue(pub f64);

impl EntropyValue {
    pub fn nats(self) -> f64 {
        self.0
    }
}

/// `-Σ m ln m` with `0 ln 0 = 0`.
pub fn entropy_of(masses: &[f64]) -> f64 {
    masses
        .iter()
        .filter(|&&m| m > 0.0)
        .map(|&m| -m * m.ln())
        .sum::<f64>()
        .max(0.0)
}

pub fn shannon_entropy(joint: &JointPmf) -> EntropyValue {
    EntropyValue(entropy_of(joint.mass()))
}

/// `-Σ C ln C` over copula values `C(u_i, v_j)`, `i, j >= 1`, rather than over
/// cell masses. Diagnostic only: it is not the entropy of any distribution and
/// is not bounded by `ln(cells)`.
pub fn copula_value_entropy(spec: &CopulaSpec, pmf_in: &DiscretePmf, pmf_out: &DiscretePmf) -> f64 {
    let u = cdf(pmf_in);
    let v = cdf(pmf_out);
    let mut h = 0.0;
    for &ui in &u[1..] {
        for &vj in &v[1..] {
            let c = spec.eval(ui, vj);
            if c > 0.0 {
                h -= c * c.ln();
            }
        }
    }
    h
}

/// Frobenius distance after zero-padding both joints to a common grid.
pub fn euclidean_distance(a: &JointPmf, b: &JointPmf) -> f64 {
    let (a, b) = align(a, b);
    a.mass()
        .iter()
        .zip(b.mass())
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Goal {
    Min,
    Max,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArrangementResult {
    /// `permutation[k]` is the (0-based) index of `q` paired with `p[k]`.
    pub permutation: Vec<usize>,
    /// `Σ_k p[k] q[permutation[k]]`
    pub value: f64,
}

fn stable_order(x: &[f64], descending: bool) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..x.len()).collect();
    idx.sort_by(|&a, &b| {
        let ord = x[a].total_cmp(&x[b]);
        if descending {
            ord.reverse()
        } else {
            ord
        }
    });
    idx
}

pub fn scalar_product(p: &[f64], q: &[f64], permutation: &[usize]) -> f64 {
    p.iter().zip(permutation).map(|(a, &k)| a * q[k]).sum()
}

/// Extremal pairing of two vectors: equal rank order maximizes `Σ p q_π`,
/// opposite rank order minimizes it. Ties keep their original index order.
pub fn extremal_arrangement(p: &[f64], q: &[f64], goal: Goal) -> Result<ArrangementResult> {
    if p.len() != q.len() {
        return Err(Error::Shape(format!(
            "vectors of length {} and {}",
            p.len(),
            q.len()
        )));
    }
    if p.is_empty() {
        return Err(Error::Shape("empty vectors".into()));
    }
    if let Some(x) = p.iter().chain(q).find(|x| !x.is_finite() || **x < 0.0) {
        return Err(Error::Range(format!("entry {x} is negative or not finite")));
    }
    let p_rank = stable_order(p, false);
    let q_rank = stable_order(q, goal == Goal::Min);
    let mut permutation = vec![0; p.len()];
    for (&pi, &qi) in p_rank.iter().zip(&q_rank) {
        permutation[pi] = qi;
    }
    let value = scalar_product(p, q, &permutation);
    Ok(ArrangementResult { permutation, value })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn entropy_examples() {
        let uniform = JointPmf::from_mass(2, 2, vec![0.25; 4]).unwrap();
        assert_abs_diff_eq!(
            shannon_entropy(&uniform).nats(),
            1.386_294_361_119_890_6,
            epsilon = 1e-12
        );

        let dirac = JointPmf::from_mass(2, 2, vec![0.0, 0.0, 1.0, 0.0]).unwrap();
        assert_eq!(shannon_entropy(&dirac).nats(), 0.0);

        let three = JointPmf::from_mass(1, 3, vec![0.5, 0.25, 0.25]).unwrap();
        assert_abs_diff_eq!(
            shannon_entropy(&three).nats(),
            1.039_720_770_839_917_9,
            epsilon = 1e-12
        );
    }

    #[test]
    fn distance_examples() {
        let p = JointPmf::from_mass(2, 2, vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        assert_eq!(euclidean_distance(&p, &p), 0.0);

        let a = JointPmf::from_mass(1, 2, vec![1.0, 0.0]).unwrap();
        let b = JointPmf::from_mass(1, 2, vec![0.0, 1.0]).unwrap();
        assert_abs_diff_eq!(euclidean_distance(&a, &b), 2f64.sqrt(), epsilon = 1e-15);

        // different grids are compared on the padded common support
        let c = JointPmf::from_mass(1, 1, vec![1.0]).unwrap();
        assert_abs_diff_eq!(euclidean_distance(&c, &b), 2f64.sqrt(), epsilon = 1e-15);
        assert_eq!(euclidean_distance(&c, &a), 0.0);
    }

    #[test]
    fn arrangement_examples() {
        let lo = extremal_arrangement(&[1.0, 2.0], &[3.0, 4.0], Goal::Min).unwrap();
        assert_eq!(lo.value, 10.0);
        assert_eq!(lo.permutation, vec![1, 0]);
        let hi = extremal_arrangement(&[1.0, 2.0], &[3.0, 4.0], Goal::Max).unwrap();
        assert_eq!(hi.value, 11.0);
        assert_eq!(hi.permutation, vec![0, 1]);
    }

    #[test]
    fn arrangement_ties_keep_index_order() {
        let r = extremal_arrangement(&[1.0, 1.0, 1.0], &[5.0, 5.0, 2.0], Goal::Max).unwrap();
        assert_eq!(r.permutation, vec![2, 0, 1]);
    }

    #[test]
    fn arrangement_errors() {
        assert!(matches!(
            extremal_arrangement(&[1.0], &[1.0, 2.0], Goal::Min),
            Err(Error::Shape(_))
        ));
        assert!(extremal_arrangement(&[], &[], Goal::Min).is_err());
        assert!(matches!(
            extremal_arrangement(&[-1.0], &[1.0], Goal::Min),
            Err(Error::Range(_))
        ));
    }

    #[test]
    fn copula_value_entropy_is_not_mass_entropy() {
        let half = DiscretePmf::from_probs(vec![0.5, 0.5]).unwrap();
        // C values on the upper grid: 0.25, 0.5, 0.5, 1
        let h = copula_value_entropy(&CopulaSpec::product(), &half, &half);
        let expected = -(0.25f64 * 0.25f64.ln()) - 2.0 * 0.5 * 0.5f64.ln();
        assert_abs_diff_eq!(h, expected, epsilon = 1e-15);
    }
}

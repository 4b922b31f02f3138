use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Cumulative probabilities aligned with a variable's state order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CdfVector(Vec<f64>);

impl CdfVector {
    pub fn new(values: Vec<f64>) -> Self {
        CdfVector(values)
    }

    pub fn from_probs(probs: &[f64]) -> Self {
        let mut acc = 0.0;
        CdfVector(
            probs
                .iter()
                .map(|p| {
                    acc += p;
                    acc
                })
                .collect(),
        )
    }

    /// Point probabilities; the final cumulative value is treated as 1.
    pub fn to_probs(&self) -> Vec<f64> {
        let n = self.0.len();
        let mut prev = 0.0;
        self.0
            .iter()
            .enumerate()
            .map(|(k, &v)| {
                let v = if k + 1 == n { 1.0 } else { v };
                let p = (v - prev).max(0.0);
                prev = v;
                p
            })
            .collect()
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Nondecreasing and ending at 1.
    pub fn is_valid(&self, tol: f64) -> bool {
        self.0.windows(2).all(|w| w[0] <= w[1] + tol)
            && self.0.last().is_some_and(|&v| (v - 1.0).abs() <= tol)
    }

    /// The same distribution over the reversed state order.
    pub fn reversed(&self) -> CdfVector {
        let mut probs = self.to_probs();
        probs.reverse();
        CdfVector::from_probs(&probs)
    }
}

impl std::ops::Index<usize> for CdfVector {
    type Output = f64;
    fn index(&self, k: usize) -> &f64 {
        &self.0[k]
    }
}

/// First-order stochastic dominance: `f` dominates `g` when `f` lies
/// pointwise at or below `g` (ties within `tol` count as equal).
pub fn fsd(f: &CdfVector, g: &CdfVector, tol: f64) -> Result<bool> {
    if f.len() != g.len() {
        return Err(Error::LengthMismatch(f.len(), g.len()));
    }
    Ok(dominates(f.values(), g.values(), tol))
}

pub(crate) fn dominates(f: &[f64], g: &[f64], tol: f64) -> bool {
    f.iter().zip(g).all(|(a, b)| *a <= *b + tol)
}

//! Shannon quantities, shift-invariant measures and rate–distortion bounds.
//!
//! All logarithms are base 2.

mod measure;
mod rd;

pub use measure::{
    check_compatible, ks_entropy, max_cylinder_log2, parry_measure, pattern_probability, window_entropy,
    window_marginal, MeasureSpec,
};
pub use rd::{
    blahut_arimoto, default_rd_schedule, mi_lower_bound_lemma, rd_curve, rd_lower_bound, rd_point_at_distortion,
    rd_upper_bound, rd_upper_bound_limit, rdim_bounds, window_rd_problem, RdLowerBound, RdPoint, RdProblem,
};

use crate::{Error, Result};

/// Tolerance on total probability mass.
pub const MASS_TOL: f64 = 1e-12;

/// A law on an ordered list of outcomes.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteDistribution<O = usize> {
    outcomes: Vec<O>,
    probabilities: Vec<f64>,
}

impl<O> FiniteDistribution<O> {
    pub fn new(outcomes: Vec<O>, probabilities: Vec<f64>) -> Result<Self> {
        if outcomes.len() != probabilities.len() {
            return Err(Error::InvalidMeasure("outcome and probability counts differ".into()));
        }
        check_probability_vector(&probabilities)?;
        Ok(FiniteDistribution { outcomes, probabilities })
    }

    pub fn outcomes(&self) -> &[O] {
        &self.outcomes
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&O, f64)> + '_ {
        self.outcomes.iter().zip(self.probabilities.iter().copied())
    }
}

impl FiniteDistribution<usize> {
    /// Outcomes `0..p.len()`.
    pub fn from_probabilities(p: Vec<f64>) -> Result<Self> {
        Self::new((0..p.len()).collect(), p)
    }

    pub fn uniform(n: usize) -> Result<Self> {
        Self::from_probabilities(vec![1.0 / n as f64; n])
    }
}

pub(crate) fn check_probability_vector(p: &[f64]) -> Result<()> {
    if p.is_empty() {
        return Err(Error::InvalidMeasure("empty probability vector".into()));
    }
    if p.iter().any(|x| !x.is_finite() || *x < 0.0) {
        return Err(Error::InvalidMeasure("probabilities must be finite and nonnegative".into()));
    }
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > MASS_TOL {
        return Err(Error::InvalidMeasure(format!("probabilities sum to {total}, not 1")));
    }
    Ok(())
}

/// A joint law of `(X, Y)`: `matrix[x][y] = P(X = x, Y = y)`.
#[derive(Debug, Clone, PartialEq)]
pub struct JointDistribution {
    matrix: Vec<Vec<f64>>,
}

impl JointDistribution {
    pub fn new(matrix: Vec<Vec<f64>>) -> Result<Self> {
        let cols = matrix.first().map_or(0, Vec::len);
        if matrix.is_empty() || cols == 0 || matrix.iter().any(|r| r.len() != cols) {
            return Err(Error::InvalidMeasure("joint matrix must be nonempty and rectangular".into()));
        }
        let flat: Vec<f64> = matrix.iter().flatten().copied().collect();
        check_probability_vector(&flat)?;
        Ok(JointDistribution { matrix })
    }

    /// The law of `(X, K(X))` for a channel `K` given row-wise.
    pub fn from_channel(input: &[f64], channel: &[Vec<f64>]) -> Result<Self> {
        if input.len() != channel.len() {
            return Err(Error::InvalidMeasure("channel needs one row per input".into()));
        }
        for row in channel {
            check_probability_vector(row)?;
        }
        Self::new(input.iter().zip(channel).map(|(&p, row)| row.iter().map(|&k| p * k).collect()).collect())
    }

    pub fn matrix(&self) -> &[Vec<f64>] {
        &self.matrix
    }

    pub fn marginal_x(&self) -> Vec<f64> {
        self.matrix.iter().map(|r| r.iter().sum()).collect()
    }

    pub fn marginal_y(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.matrix[0].len()];
        for r in &self.matrix {
            for (o, v) in out.iter_mut().zip(r) {
                *o += v;
            }
        }
        out
    }

    pub fn transpose(&self) -> JointDistribution {
        let (rows, cols) = (self.matrix.len(), self.matrix[0].len());
        JointDistribution { matrix: (0..cols).map(|j| (0..rows).map(|i| self.matrix[i][j]).collect()).collect() }
    }

    /// Law of `(f(X), g(Y))` for maps into `0..fx` and `0..gy`.
    pub fn push_forward(&self, f: &[usize], fx: usize, g: &[usize], gy: usize) -> Result<JointDistribution> {
        if f.len() != self.matrix.len() || g.len() != self.matrix[0].len() {
            return Err(Error::InvalidMeasure("map lengths do not match the joint".into()));
        }
        if f.iter().any(|&v| v >= fx) || g.iter().any(|&v| v >= gy) {
            return Err(Error::InvalidMeasure("map value out of range".into()));
        }
        let mut m = vec![vec![0.0; gy]; fx];
        for (i, r) in self.matrix.iter().enumerate() {
            for (j, &v) in r.iter().enumerate() {
                m[f[i]][g[j]] += v;
            }
        }
        Ok(JointDistribution { matrix: m })
    }
}

/// `−Σ p log₂ p` with `0 log 0 = 0`.
pub fn entropy_bits(p: &[f64]) -> f64 {
    -p.iter().filter(|&&x| x > 0.0).map(|&x| x * x.log2()).sum::<f64>()
}

pub fn shannon_entropy<O>(dist: &FiniteDistribution<O>) -> f64 {
    entropy_bits(dist.probabilities()).max(0.0)
}

/// `H(δ) = −δ log₂ δ − (1−δ) log₂(1−δ)`.
pub fn binary_entropy(delta: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&delta) {
        return Err(Error::OutOfRange { name: "delta", value: delta, expected: "0 <= delta <= 1" });
    }
    Ok(entropy_bits(&[delta, 1.0 - delta]))
}

/// `I(X;Y) = Σ p(x,y) log₂ p(x,y) / (p(x) p(y))`, clamped at 0 against
/// rounding.
pub fn mutual_information(joint: &JointDistribution) -> f64 {
    let px = joint.marginal_x();
    let py = joint.marginal_y();
    let mut total = 0.0;
    for (i, r) in joint.matrix().iter().enumerate() {
        for (j, &v) in r.iter().enumerate() {
            if v > 0.0 {
                total += v * (v / (px[i] * py[j])).log2();
            }
        }
    }
    total.max(0.0)
}

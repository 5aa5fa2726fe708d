use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

use crate::{Error, Result};

/// `log₂ x` for an arbitrary-precision count, accurate to a few ulps.
///
/// Exact powers of two give exact results. Returns `-∞` for zero.
pub fn log2_biguint(x: &BigUint) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = x.bits();
    if bits <= 64 {
        return (x.to_u64().expect("fits in u64") as f64).log2();
    }
    let shift = bits - 64;
    let top = (x >> shift).to_u64().expect("64 leading bits");
    (top as f64).log2() + shift as f64
}

/// Extrapolation models for a sequence `v_M` indexed by depth `M`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitModel {
    /// `v∞ + c/(M−1)`
    InverseMMinusOne,
    /// `v∞ + c/M`
    InverseM,
    /// `v∞ + (c₀ + c₁·log₂M)/M`
    InverseMLog,
}

impl FitModel {
    pub fn tag(self) -> &'static str {
        match self {
            FitModel::InverseMMinusOne => "v_inf + c/(M-1)",
            FitModel::InverseM => "v_inf + c/M",
            FitModel::InverseMLog => "v_inf + (c0 + c1*log2(M))/M",
        }
    }

    fn basis(self, m: u64) -> Vec<f64> {
        let mf = m as f64;
        match self {
            FitModel::InverseMMinusOne => vec![1.0, 1.0 / (mf - 1.0)],
            FitModel::InverseM => vec![1.0, 1.0 / mf],
            FitModel::InverseMLog => vec![1.0, 1.0 / mf, mf.log2() / mf],
        }
    }

    fn arity(self) -> usize {
        match self {
            FitModel::InverseMLog => 3,
            _ => 2,
        }
    }
}

/// Least-squares fit of a depth sequence; `coefficients[0]` is the limit.
#[derive(Debug, Clone, PartialEq)]
pub struct Fit {
    pub model: FitModel,
    pub coefficients: Vec<f64>,
    pub rms_residual: f64,
}

impl Fit {
    pub fn limit(&self) -> f64 {
        self.coefficients[0]
    }

    pub fn new(model: FitModel, depths: &[u64], values: &[f64]) -> Result<Fit> {
        if depths.len() != values.len() {
            return Err(Error::DegenerateFit("depth and value counts differ".into()));
        }
        let k = model.arity();
        let mut distinct = depths.to_vec();
        distinct.sort_unstable();
        distinct.dedup();
        if distinct.len() < k {
            return Err(Error::DegenerateFit(format!(
                "model {} needs {k} distinct depths, got {}",
                model.tag(),
                distinct.len()
            )));
        }
        if model == FitModel::InverseMMinusOne && distinct[0] < 2 {
            return Err(Error::DegenerateFit("depth 1 is singular for c/(M-1)".into()));
        }
        if distinct[0] == 0 {
            return Err(Error::DegenerateFit("depth 0".into()));
        }
        // normal equations
        let mut ata = vec![vec![0.0; k]; k];
        let mut atb = vec![0.0; k];
        for (&m, &v) in depths.iter().zip(values) {
            let row = model.basis(m);
            for i in 0..k {
                atb[i] += row[i] * v;
                for j in 0..k {
                    ata[i][j] += row[i] * row[j];
                }
            }
        }
        let coefficients = solve_small(ata, atb)
            .ok_or_else(|| Error::DegenerateFit("singular normal equations".into()))?;
        let sq: f64 = depths
            .iter()
            .zip(values)
            .map(|(&m, &v)| {
                let pred: f64 = model.basis(m).iter().zip(&coefficients).map(|(b, c)| b * c).sum();
                (pred - v).powi(2)
            })
            .sum();
        Ok(Fit { model, coefficients, rms_residual: (sq / depths.len() as f64).sqrt() })
    }
}

/// Gaussian elimination with partial pivoting for tiny dense systems.
pub(crate) fn solve_small(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    let scale = a.iter().flatten().fold(0.0f64, |acc, x| acc.max(x.abs()));
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() <= 1e-14 * scale.max(1e-300) {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            for c in col..n {
                a[row][c] -= f * a[col][c];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|c| a[row][c] * x[c]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigUint;

    #[test]
    fn log2_of_powers_of_two_is_exact() {
        for k in [0u32, 1, 63, 64, 65, 1000, 4321] {
            let x = BigUint::from(1u8) << k;
            assert_eq!(log2_biguint(&x), k as f64);
        }
    }

    #[test]
    fn log2_relative_accuracy() {
        let x = BigUint::from(3u8).pow(700);
        let exact = 700.0 * 3f64.log2();
        assert!((log2_biguint(&x) - exact).abs() <= 1e-12 * exact);
    }

    #[test]
    fn fit_recovers_exact_models() {
        let ms = [2u64, 3, 4, 5, 6];
        let v: Vec<f64> = ms.iter().map(|&m| 2.0 + 1.0 / (m as f64 - 1.0)).collect();
        let fit = Fit::new(FitModel::InverseMMinusOne, &ms, &v).unwrap();
        assert!((fit.limit() - 2.0).abs() < 1e-12);

        let v: Vec<f64> = ms.iter().map(|&m| 0.7 - 0.3 / m as f64 + 0.2 * (m as f64).log2() / m as f64).collect();
        let fit = Fit::new(FitModel::InverseMLog, &ms, &v).unwrap();
        assert!((fit.limit() - 0.7).abs() < 1e-10);
    }

    #[test]
    fn fit_needs_distinct_depths() {
        assert!(Fit::new(FitModel::InverseM, &[3, 3, 3], &[1.0, 1.0, 1.0]).is_err());
        assert!(Fit::new(FitModel::InverseMMinusOne, &[1, 2, 3], &[1.0, 1.0, 1.0]).is_err());
    }
}

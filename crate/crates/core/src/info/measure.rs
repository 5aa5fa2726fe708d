use std::collections::BTreeMap;

use super::{check_probability_vector, entropy_bits, FiniteDistribution};
use crate::lattice::{LatticeSet, Point};
use crate::subshift::{perron_data, Pattern, SftSpec, Sym};
use crate::{Error, Result};

const STATIONARY_TOL: f64 = 1e-10;
/// Cap on the number of positive-probability outcomes materialised by
/// [`window_marginal`].
const MAX_MARGINAL_OUTCOMES: usize = 1 << 20;

/// A shift-invariant measure on `A^{ℤ}` or `A^{ℤ²}`.
///
/// `MarkovRow` rows are independent copies of one stationary chain, so the
/// measure is invariant under both shifts.
#[derive(Debug, Clone, PartialEq)]
pub enum MeasureSpec {
    Bernoulli { weights: Vec<f64> },
    MarkovRow { transition: Vec<Vec<f64>>, stationary: Vec<f64> },
}

impl MeasureSpec {
    pub fn bernoulli(weights: Vec<f64>) -> Result<Self> {
        check_probability_vector(&weights)?;
        Ok(MeasureSpec::Bernoulli { weights })
    }

    pub fn uniform(k: usize) -> Result<Self> {
        Self::bernoulli(vec![1.0 / k as f64; k])
    }

    /// A stationary chain; `stationary` is computed when absent.
    pub fn markov_row(transition: Vec<Vec<f64>>, stationary: Option<Vec<f64>>) -> Result<Self> {
        let k = transition.len();
        if k == 0 || transition.iter().any(|r| r.len() != k) {
            return Err(Error::InvalidMeasure("transition matrix must be square and nonempty".into()));
        }
        for (i, row) in transition.iter().enumerate() {
            check_probability_vector(row).map_err(|e| Error::InvalidMeasure(format!("transition row {i}: {e}")))?;
        }
        let stationary = match stationary {
            Some(pi) => {
                if pi.len() != k {
                    return Err(Error::InvalidMeasure("stationary vector has the wrong length".into()));
                }
                check_probability_vector(&pi)?;
                pi
            }
            None => stationary_vector(&transition),
        };
        let residual = stationary_residual(&transition, &stationary);
        if residual > STATIONARY_TOL {
            return Err(Error::InvalidMeasure(format!("stationary vector is off by {residual:e} (max 1e-10)")));
        }
        Ok(MeasureSpec::MarkovRow { transition, stationary })
    }

    pub fn alphabet_size(&self) -> usize {
        match self {
            MeasureSpec::Bernoulli { weights } => weights.len(),
            MeasureSpec::MarkovRow { stationary, .. } => stationary.len(),
        }
    }

    pub fn kind_tag(&self) -> &'static str {
        match self {
            MeasureSpec::Bernoulli { .. } => "bernoulli",
            MeasureSpec::MarkovRow { .. } => "markov-row",
        }
    }

    /// Marginal law of a single site.
    pub fn site_law(&self) -> &[f64] {
        match self {
            MeasureSpec::Bernoulli { weights } => weights,
            MeasureSpec::MarkovRow { stationary, .. } => stationary,
        }
    }

    /// `P^g`, the law of the symbol `g` steps ahead. Every Bernoulli row is
    /// the weight vector.
    fn step(&self, g: u64) -> Vec<Vec<f64>> {
        match self {
            MeasureSpec::Bernoulli { weights } => vec![weights.clone(); weights.len()],
            MeasureSpec::MarkovRow { transition, .. } => mat_pow(transition, g),
        }
    }
}

fn mat_mul(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = a.len();
    (0..n)
        .map(|i| (0..n).map(|j| (0..n).map(|k| a[i][k] * b[k][j]).sum()).collect())
        .collect()
}

fn mat_pow(p: &[Vec<f64>], mut g: u64) -> Vec<Vec<f64>> {
    let n = p.len();
    let mut result: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
    let mut base = p.to_vec();
    while g > 0 {
        if g & 1 == 1 {
            result = mat_mul(&result, &base);
        }
        base = mat_mul(&base, &base);
        g >>= 1;
    }
    result
}

fn stationary_residual(p: &[Vec<f64>], pi: &[f64]) -> f64 {
    (0..pi.len())
        .map(|j| ((0..pi.len()).map(|i| pi[i] * p[i][j]).sum::<f64>() - pi[j]).abs())
        .fold(0.0, f64::max)
}

/// Lazy power iteration `π ← (π + πP)/2`, which converges for every
/// stochastic `P` with a unique closed class.
fn stationary_vector(p: &[Vec<f64>]) -> Vec<f64> {
    let k = p.len();
    let mut pi = vec![1.0 / k as f64; k];
    for _ in 0..100_000 {
        let mut next = vec![0.0; k];
        for i in 0..k {
            for j in 0..k {
                next[j] += 0.5 * pi[i] * p[i][j];
            }
            next[i] += 0.5 * pi[i];
        }
        let total: f64 = next.iter().sum();
        next.iter_mut().for_each(|x| *x /= total);
        let delta = next.iter().zip(&pi).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        pi = next;
        if delta < 1e-15 {
            break;
        }
    }
    pi
}

/// Sorted `m` positions per row of a support, with each cell's index in the
/// support's canonical order.
fn rows_of(support: &LatticeSet) -> BTreeMap<i64, Vec<(i64, usize)>> {
    let mut rows: BTreeMap<i64, Vec<(i64, usize)>> = BTreeMap::new();
    for (i, p) in support.iter().enumerate() {
        rows.entry(p.n).or_default().push((p.m, i));
    }
    rows.values_mut().for_each(|r| r.sort_unstable());
    rows
}

/// Gaps between consecutive positions of a sorted row.
fn gaps(row: &[(i64, usize)]) -> Vec<u64> {
    row.windows(2).map(|w| (w[1].0 - w[0].0) as u64).collect()
}

/// `μ([p])`, the probability of seeing `p` on its support.
pub fn pattern_probability(measure: &MeasureSpec, p: &Pattern) -> Result<f64> {
    p.check_alphabet(measure.alphabet_size())?;
    let law = measure.site_law();
    let mut total = 1.0;
    for row in rows_of(p.support()).values() {
        let v = |k: usize| p.values()[row[k].1] as usize;
        total *= law[v(0)];
        for (k, g) in gaps(row).into_iter().enumerate() {
            total *= measure.step(g)[v(k)][v(k + 1)];
        }
    }
    Ok(total)
}

/// `log₂ max_C μ(C)` over cylinders on `support`, by a max-product pass over
/// each row.
pub fn max_cylinder_log2(measure: &MeasureSpec, support: &LatticeSet) -> f64 {
    let k = measure.alphabet_size();
    let lg = |x: f64| if x > 0.0 { x.log2() } else { f64::NEG_INFINITY };
    let mut total = 0.0;
    for row in rows_of(support).values() {
        let mut best: Vec<f64> = measure.site_law().iter().map(|&x| lg(x)).collect();
        for g in gaps(row) {
            let step = measure.step(g);
            best = (0..k)
                .map(|t| (0..k).map(|s| best[s] + lg(step[s][t])).fold(f64::NEG_INFINITY, f64::max))
                .collect();
        }
        total += best.into_iter().fold(f64::NEG_INFINITY, f64::max);
    }
    total
}

/// Exact law of the pattern on `support`, listing positive-probability
/// outcomes in lexicographic order of their symbol vectors.
pub fn window_marginal(measure: &MeasureSpec, support: &LatticeSet) -> Result<FiniteDistribution<Vec<Sym>>> {
    let k = measure.alphabet_size();
    let rows: Vec<Vec<(i64, usize)>> = rows_of(support).into_values().collect();
    // cells in row-major order, with the transition into each cell
    struct Cell {
        index: usize,
        step: Option<Vec<Vec<f64>>>,
    }
    let mut cells = Vec::with_capacity(support.len());
    for row in &rows {
        cells.push(Cell { index: row[0].1, step: None });
        for (j, g) in gaps(row).into_iter().enumerate() {
            cells.push(Cell { index: row[j + 1].1, step: Some(measure.step(g)) });
        }
    }
    let law = measure.site_law();
    let mut outcomes: Vec<(Vec<Sym>, f64)> = Vec::new();
    let mut assign: Vec<Sym> = vec![0; support.len()];
    fn dfs(
        depth: usize,
        prob: f64,
        prev: Sym,
        cells: &[Cell],
        law: &[f64],
        k: usize,
        assign: &mut Vec<Sym>,
        out: &mut Vec<(Vec<Sym>, f64)>,
    ) -> Result<()> {
        if depth == cells.len() {
            if out.len() >= MAX_MARGINAL_OUTCOMES {
                return Err(Error::Guard(format!(
                    "window marginal has more than {MAX_MARGINAL_OUTCOMES} outcomes"
                )));
            }
            out.push((assign.clone(), prob));
            return Ok(());
        }
        let cell = &cells[depth];
        for s in 0..k {
            let p = match &cell.step {
                None => law[s],
                Some(step) => step[prev as usize][s],
            };
            if p > 0.0 {
                assign[cell.index] = s as Sym;
                dfs(depth + 1, prob * p, s as Sym, cells, law, k, assign, out)?;
            }
        }
        Ok(())
    }
    dfs(0, 1.0, 0, &cells, law, k, &mut assign, &mut outcomes)?;
    outcomes.sort_by(|a, b| a.0.cmp(&b.0));
    let (o, p): (Vec<Vec<Sym>>, Vec<f64>) = outcomes.into_iter().unzip();
    // renormalise away the rounding drift of long products
    let total: f64 = p.iter().sum();
    FiniteDistribution::new(o, p.into_iter().map(|x| x / total).collect())
}

/// `H((X_u)_{u ∈ support})` in closed form: independent rows, each a
/// Markov chain observed at its positions.
pub fn window_entropy(measure: &MeasureSpec, support: &LatticeSet) -> f64 {
    let law = measure.site_law();
    let h0 = entropy_bits(law);
    rows_of(support)
        .values()
        .map(|row| {
            h0 + gaps(row)
                .into_iter()
                .map(|g| {
                    let step = measure.step(g);
                    law.iter().zip(&step).map(|(&pi, r)| pi * entropy_bits(r)).sum::<f64>()
                })
                .sum::<f64>()
        })
        .sum()
}

/// Kolmogorov–Sinai entropy per site.
pub fn ks_entropy(measure: &MeasureSpec) -> f64 {
    match measure {
        MeasureSpec::Bernoulli { weights } => entropy_bits(weights),
        MeasureSpec::MarkovRow { transition, stationary } => {
            stationary.iter().zip(transition).map(|(&pi, r)| pi * entropy_bits(r)).sum()
        }
    }
}

/// Checks that the measure gives every forbidden pattern probability 0.
pub fn check_compatible(measure: &MeasureSpec, sft: &SftSpec) -> Result<()> {
    if measure.alphabet_size() != sft.alphabet_size() {
        return Err(Error::MeasureMismatch(format!(
            "measure has {} symbols, subshift has {}",
            measure.alphabet_size(),
            sft.alphabet_size()
        )));
    }
    for (i, p) in sft.forbidden().iter().enumerate() {
        let mass = pattern_probability(measure, p)?;
        if mass > super::MASS_TOL {
            return Err(Error::MeasureMismatch(format!("forbidden pattern #{i} has probability {mass:e}")));
        }
    }
    Ok(())
}

/// The maximal-entropy Markov measure of an irreducible nearest-neighbour
/// 1D SFT (or of the row SFT of a row-lift).
pub fn parry_measure(sft: &SftSpec) -> Result<MeasureSpec> {
    let base = if sft.dimension() == 1 {
        sft.clone()
    } else {
        sft.row_base().ok_or_else(|| Error::Unsupported("Parry measure needs row constraints".into()))?
    };
    if base.max_forbidden_width() > 2 {
        return Err(Error::Unsupported("Parry measure is built for nearest-neighbour constraints".into()));
    }
    let k = base.alphabet_size();
    let mut adj = vec![vec![1.0; k]; k];
    for p in base.forbidden() {
        match p.values() {
            [s] => {
                for t in 0..k {
                    adj[*s as usize][t] = 0.0;
                    adj[t][*s as usize] = 0.0;
                }
            }
            [s, t] if p.support().points()[1] - p.support().points()[0] == Point::new(1, 0) => {
                adj[*s as usize][*t as usize] = 0.0
            }
            _ => return Err(Error::Unsupported("Parry measure is built for nearest-neighbour constraints".into())),
        }
    }
    let d = perron_data(&adj)?;
    let transition: Vec<Vec<f64>> = (0..k)
        .map(|i| {
            let row: Vec<f64> = (0..k).map(|j| adj[i][j] * d.right[j] / (d.root * d.right[i])).collect();
            let s: f64 = row.iter().sum();
            row.into_iter().map(|x| x / s).collect()
        })
        .collect();
    let w: Vec<f64> = (0..k).map(|i| d.left[i] * d.right[i]).collect();
    let total: f64 = w.iter().sum();
    let stationary: Vec<f64> = w.into_iter().map(|x| x / total).collect();
    MeasureSpec::markov_row(transition, Some(stationary))
}

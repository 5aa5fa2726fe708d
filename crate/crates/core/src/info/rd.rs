use super::measure::{ks_entropy, window_entropy, window_marginal, MeasureSpec};
use super::{binary_entropy, check_probability_vector};
use crate::dimension::{DimensionEstimate, EstimateKind};
use crate::lattice::{IntRect, LatticeSet};
use crate::metric::{metric_eval, resolution_index_of, Epsilon, MetricSpec};
use crate::par::{self, Parallelism};
use crate::subshift::Pattern;
use crate::{Error, Fit, FitModel, Result};

/// Largest reproduction alphabet built by [`window_rd_problem`].
const MAX_RD_OUTCOMES: usize = 4096;

/// A finite rate–distortion problem: source law and distortion matrix
/// `distortion[x][y]`.
#[derive(Debug, Clone, PartialEq)]
pub struct RdProblem {
    source: Vec<f64>,
    distortion: Vec<Vec<f64>>,
}

impl RdProblem {
    pub fn new(source: Vec<f64>, distortion: Vec<Vec<f64>>) -> Result<Self> {
        check_probability_vector(&source)?;
        let ny = distortion.first().map_or(0, Vec::len);
        if distortion.len() != source.len() || ny == 0 || distortion.iter().any(|r| r.len() != ny) {
            return Err(Error::InvalidMeasure("distortion must be |source| x |reproductions|".into()));
        }
        if distortion.iter().flatten().any(|d| !d.is_finite() || *d < 0.0) {
            return Err(Error::InvalidMeasure("distortions must be finite and nonnegative".into()));
        }
        Ok(RdProblem { source, distortion })
    }

    /// Uniform source on `k` symbols with Hamming distortion.
    pub fn hamming(k: usize) -> Result<Self> {
        let d = (0..k).map(|i| (0..k).map(|j| if i == j { 0.0 } else { 1.0 }).collect()).collect();
        Self::new(vec![1.0 / k as f64; k], d)
    }

    pub fn source(&self) -> &[f64] {
        &self.source
    }

    pub fn distortion(&self) -> &[Vec<f64>] {
        &self.distortion
    }

    /// Smallest distortion reachable at rate 0 (one fixed reproduction).
    pub fn max_useful_distortion(&self) -> f64 {
        (0..self.distortion[0].len())
            .map(|y| self.source.iter().zip(&self.distortion).map(|(p, r)| p * r[y]).sum::<f64>())
            .fold(f64::INFINITY, f64::min)
    }
}

/// A point on the rate–distortion curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RdPoint {
    /// bits
    pub rate: f64,
    pub distortion: f64,
    /// `β` in `Q(y|x) ∝ q(y) 2^{-β d(x,y)}`; `−β` is the curve slope in bits
    /// per unit distortion.
    pub slope: f64,
    pub iterations: usize,
}

/// Alternating minimisation for one Lagrange slope.
///
/// Starts from the uniform reproduction law and stops once the gap between
/// the standard upper and lower bounds on `R(D)` drops below `tol` bits.
pub fn blahut_arimoto(problem: &RdProblem, slope: f64, tol: f64, max_iter: usize) -> Result<RdPoint> {
    if !(slope.is_finite() && slope >= 0.0) {
        return Err(Error::OutOfRange { name: "slope", value: slope, expected: "finite and >= 0" });
    }
    if !(tol > 0.0) {
        return Err(Error::OutOfRange { name: "tol", value: tol, expected: "> 0" });
    }
    // zero-mass source outcomes have no conditional
    let rows: Vec<(f64, &Vec<f64>)> =
        problem.source.iter().copied().zip(&problem.distortion).filter(|(p, _)| *p > 0.0).collect();
    let ny = problem.distortion[0].len();
    // subtract the per-row minimum so large slopes do not underflow; it
    // cancels in every normalised quantity
    let kernel: Vec<Vec<f64>> = rows
        .iter()
        .map(|(_, r)| {
            let lo = r.iter().copied().fold(f64::INFINITY, f64::min);
            r.iter().map(|&d| (-slope * (d - lo)).exp2()).collect()
        })
        .collect();
    let mut q = vec![1.0 / ny as f64; ny];
    let mut gap = f64::INFINITY;
    for it in 1..=max_iter {
        let z: Vec<f64> = kernel.iter().map(|k| k.iter().zip(&q).map(|(a, b)| a * b).sum()).collect();
        let c: Vec<f64> = (0..ny)
            .map(|y| rows.iter().zip(&kernel).zip(&z).map(|(((p, _), k), zx)| p * k[y] / zx).sum())
            .collect();
        let cmax = c.iter().copied().fold(0.0, f64::max);
        let avg: f64 = q.iter().zip(&c).filter(|(qy, _)| **qy > 0.0).map(|(qy, cy)| qy * cy * cy.log2()).sum();
        gap = cmax.log2() - avg;
        let next: Vec<f64> = q.iter().zip(&c).map(|(qy, cy)| qy * cy).collect();
        let total: f64 = next.iter().sum();
        q = next.into_iter().map(|x| x / total).collect();
        if gap < tol {
            let (rate, distortion) = evaluate(&rows, &kernel, &q);
            return Ok(RdPoint { rate, distortion, slope, iterations: it });
        }
    }
    Err(Error::NoConvergence { iterations: max_iter, gap })
}

/// Rate and distortion of the test channel induced by `q`.
fn evaluate(rows: &[(f64, &Vec<f64>)], kernel: &[Vec<f64>], q: &[f64]) -> (f64, f64) {
    let (mut rate, mut dist) = (0.0, 0.0);
    for ((p, d), k) in rows.iter().zip(kernel) {
        let z: f64 = k.iter().zip(q).map(|(a, b)| a * b).sum();
        for y in 0..q.len() {
            let w = q[y] * k[y] / z;
            if w > 0.0 {
                rate += p * w * (w / q[y]).log2();
                dist += p * w * d[y];
            }
        }
    }
    (rate.max(0.0), dist)
}

/// Runs [`blahut_arimoto`] for each slope, possibly in parallel; output
/// follows input order.
pub fn rd_curve(problem: &RdProblem, slopes: &[f64], tol: f64, max_iter: usize) -> Result<Vec<RdPoint>> {
    par::map_collect(Parallelism::default(), slopes.to_vec(), |s| blahut_arimoto(problem, s, tol, max_iter))
        .into_iter()
        .collect()
}

/// The curve point with distortion `target`, found by bisection on the
/// slope. Targets at or above the zero-rate distortion give rate 0.
pub fn rd_point_at_distortion(problem: &RdProblem, target: f64, tol: f64, max_iter: usize) -> Result<RdPoint> {
    let dmax = problem.max_useful_distortion();
    if target >= dmax {
        return Ok(RdPoint { rate: 0.0, distortion: dmax, slope: 0.0, iterations: 0 });
    }
    if !(target >= 0.0) {
        return Err(Error::OutOfRange { name: "distortion", value: target, expected: ">= 0" });
    }
    let mut hi = 1.0;
    while blahut_arimoto(problem, hi, tol, max_iter)?.distortion > target {
        hi *= 2.0;
        if hi > 1e6 {
            return Err(Error::OutOfRange { name: "distortion", value: target, expected: "above the minimum distortion" });
        }
    }
    let mut lo = 0.0;
    let mut best = blahut_arimoto(problem, hi, tol, max_iter)?;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let pt = blahut_arimoto(problem, mid, tol, max_iter)?;
        if pt.distortion > target {
            lo = mid;
        } else {
            hi = mid;
            best = pt;
        }
        if (best.distortion - target).abs() < 1e-12 || hi - lo < 1e-13 * hi {
            break;
        }
    }
    Ok(best)
}

/// A rate–distortion problem on the window `support`: source = window
/// marginal, reproductions = the same patterns, distortion = the metric
/// read off the window (an upper bound when patterns agree on it).
pub fn window_rd_problem(measure: &MeasureSpec, spec: &MetricSpec, support: &LatticeSet) -> Result<RdProblem> {
    let law = window_marginal(measure, support)?;
    if law.len() > MAX_RD_OUTCOMES {
        return Err(Error::Guard(format!("window has {} outcomes (cap {MAX_RD_OUTCOMES})", law.len())));
    }
    let pats: Vec<Pattern> =
        law.outcomes().iter().map(|v| Pattern::new(support.clone(), v.clone())).collect::<Result<_>>()?;
    let mut d = Vec::with_capacity(pats.len());
    for p in &pats {
        d.push(pats.iter().map(|q| metric_eval(spec, p, q).map(|v| v.value())).collect::<Result<Vec<f64>>>()?);
    }
    RdProblem::new(law.probabilities().to_vec(), d)
}

fn check_alpha(alpha: f64) -> Result<MetricSpec> {
    MetricSpec::linf(alpha)
}

/// `H((X_u)_{u ∈ (−M, N+M) × (−M, M)}) / N`, an upper bound on `R(d, μ, ε)`
/// for every `ε > α^{-M}`.
pub fn rd_upper_bound(measure: &MeasureSpec, alpha: f64, m: u64, n: u64) -> Result<f64> {
    check_alpha(alpha)?;
    if m == 0 || n == 0 {
        return Err(Error::OutOfRange { name: "M*N", value: 0.0, expected: "M >= 1 and N >= 1" });
    }
    let (m, n) = (m as i64, n as i64);
    let window = LatticeSet::from_rect(&IntRect::new(-m + 1, n + m - 1, -m + 1, m - 1)?);
    Ok(window_entropy(measure, &window) / n as f64)
}

/// `lim_{N→∞}` of [`rd_upper_bound`]: `(2M − 1) h_μ`.
pub fn rd_upper_bound_limit(measure: &MeasureSpec, m: u64) -> f64 {
    (2 * m as i64 - 1).max(0) as f64 * ks_entropy(measure)
}

/// `H(X) − N H(δ) − δ N log₂|B|` (may be negative).
pub fn mi_lower_bound_lemma(hx: f64, n: u64, delta: f64, bsize: u64) -> Result<f64> {
    if !(delta > 0.0 && delta < 0.5) {
        return Err(Error::OutOfRange { name: "delta", value: delta, expected: "0 < delta < 1/2" });
    }
    if bsize == 0 {
        return Err(Error::OutOfRange { name: "|B|", value: 0.0, expected: ">= 1" });
    }
    let n = n as f64;
    Ok(hx - n * binary_entropy(delta)? - delta * n * (bsize as f64).log2())
}

/// Value of the lower bound on `R(d, μ, ε)` together with its bracket index.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RdLowerBound {
    /// `M` with `δα^{-M-1} < ε ≤ δα^{-M}`.
    pub m: u64,
    /// The formula before clamping.
    pub raw: f64,
    /// `max(raw, 0)`.
    pub value: f64,
}

/// `(2M+1) h_μ − H(δ) − δ(2M+1) log₂|A|` with `M` from the bracket
/// `δα^{-M-1} < ε ≤ δα^{-M}`.
pub fn rd_lower_bound(measure: &MeasureSpec, alpha: f64, eps: &Epsilon, delta: f64) -> Result<RdLowerBound> {
    let spec = check_alpha(alpha)?;
    if !(delta > 0.0 && delta < 0.5) {
        return Err(Error::OutOfRange { name: "delta", value: delta, expected: "0 < delta < 1/2" });
    }
    if !(eps.log2_inv() > -delta.log2()) {
        return Err(Error::OutOfRange { name: "epsilon", value: eps.value(), expected: "0 < epsilon < delta" });
    }
    // ε/δ on log scale, then the ordinary resolution bracket
    let ratio = Epsilon::from_log2_inv(eps.log2_inv() + delta.log2())?;
    let idx = resolution_index_of(&spec, &ratio)?.get();
    let m = idx.checked_sub(1).ok_or(Error::OutOfRange {
        name: "M",
        value: -1.0,
        expected: ">= 0",
    })?;
    let w = (2 * m + 1) as f64;
    let raw = w * ks_entropy(measure) - binary_entropy(delta)? - delta * w * (measure.alphabet_size() as f64).log2();
    Ok(RdLowerBound { m, raw, value: raw.max(0.0) })
}

/// `(ε_k, δ_k)` with `ε_k = α^{-(M_k - 1)}`, `δ_k = 1/M_k`, `M_k = 2^k`
/// for `k = 2..=14`.
pub fn default_rd_schedule(alpha: f64) -> Result<Vec<(Epsilon, f64)>> {
    let spec = check_alpha(alpha)?;
    Ok((2..=14).map(|k| {
        let m = 1u64 << k;
        (Epsilon::at_depth(&spec, m), 1.0 / m as f64)
    })
    .collect())
}

/// Rate–distortion dimension bracket `(lower, upper)`.
///
/// Upper: `(2M − 1) h_μ / log₂(1/ε)` with `M` the resolution index of ε,
/// fitted by `v∞ + c/(M−1)`. Lower: the clamped [`rd_lower_bound`] over
/// `log₂(1/ε)`, fitted by `v∞ + (c₀ + c₁ log₂ M)/M` since `δ`-dependent
/// terms decay like `log M / M`.
pub fn rdim_bounds(
    measure: &MeasureSpec,
    alpha: f64,
    schedule: &[(Epsilon, f64)],
) -> Result<(DimensionEstimate, DimensionEstimate)> {
    let spec = check_alpha(alpha)?;
    if schedule.is_empty() {
        return Err(Error::DegenerateFit("empty schedule".into()));
    }
    let mut depths = Vec::with_capacity(schedule.len());
    let (mut up, mut lo) = (Vec::new(), Vec::new());
    for (eps, delta) in schedule {
        let l = eps.log2_inv();
        if !(l > 0.0) {
            return Err(Error::OutOfRange { name: "epsilon", value: eps.value(), expected: "< 1" });
        }
        let m = resolution_index_of(&spec, eps)?.get();
        depths.push(m);
        up.push(rd_upper_bound_limit(measure, m) / l);
        lo.push(rd_lower_bound(measure, alpha, eps, *delta)?.value / l);
    }
    let sched: Vec<(u64, u64)> = depths.iter().map(|&m| (m, 0)).collect();
    let upper = DimensionEstimate::from_fit(
        EstimateKind::Upper,
        sched.clone(),
        up.clone(),
        Fit::new(FitModel::InverseMMinusOne, &depths, &up)?,
    );
    let lower = DimensionEstimate::from_fit(
        EstimateKind::Lower,
        sched,
        lo.clone(),
        Fit::new(FitModel::InverseMLog, &depths, &lo)?,
    );
    Ok((lower, upper))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::info::parry_measure;
    use crate::subshift::golden_mean_1d;

    #[test]
    fn upper_bound_examples() {
        let b = MeasureSpec::uniform(2).unwrap();
        assert!((rd_upper_bound(&b, 2.0, 3, 10).unwrap() - 7.5).abs() < 1e-12);
        let seq: Vec<f64> = (1..40).map(|n| rd_upper_bound(&b, 2.0, 3, n).unwrap()).collect();
        assert!(seq.windows(2).all(|w| w[1] < w[0]));
        assert!(seq.iter().all(|&v| v > 5.0));
        assert_eq!(rd_upper_bound(&MeasureSpec::uniform(1).unwrap(), 2.0, 3, 10).unwrap(), 0.0);
    }

    #[test]
    fn lemma_examples() {
        let v = mi_lower_bound_lemma(10.0, 10, 0.1, 2).unwrap();
        assert!((v - 4.31004).abs() < 1e-5);
        assert!((mi_lower_bound_lemma(10.0, 10, 1e-12, 2).unwrap() - 10.0).abs() < 1e-9);
        assert!(mi_lower_bound_lemma(10.0, 10, 0.5, 2).is_err());
    }

    #[test]
    fn lower_bound_examples() {
        let b = MeasureSpec::uniform(2).unwrap();
        let e = Epsilon::new(0.01 * 0.125).unwrap();
        let r = rd_lower_bound(&b, 2.0, &e, 0.01).unwrap();
        assert_eq!(r.m, 3);
        assert!((r.value - 6.849207).abs() < 1e-6);
        let e = Epsilon::new(0.125).unwrap();
        let r = rd_lower_bound(&b, 2.0, &e, 0.25).unwrap();
        assert_eq!(r.m, 1);
        assert!((r.value - 1.438722).abs() < 1e-6);
        let one = MeasureSpec::uniform(1).unwrap();
        assert_eq!(rd_lower_bound(&one, 2.0, &e, 0.25).unwrap().value, 0.0);
        assert!(rd_lower_bound(&b, 2.0, &Epsilon::new(0.3).unwrap(), 0.25).is_err());
    }

    #[test]
    fn bracket_is_exact_at_powers() {
        let b = MeasureSpec::uniform(2).unwrap();
        // ε/δ = 2^-k exactly sits at the top of the bracket
        for k in 1..30 {
            let e = Epsilon::from_log2_inv(k as f64 + 3.0).unwrap();
            assert_eq!(rd_lower_bound(&b, 2.0, &e, 0.125).unwrap().m, k);
        }
    }

    #[test]
    fn hamming_curve() {
        let p = RdProblem::hamming(2).unwrap();
        for d in [0.05, 0.1, 0.25] {
            let pt = rd_point_at_distortion(&p, d, 1e-12, 10_000).unwrap();
            let want = 1.0 - binary_entropy(d).unwrap();
            assert!((pt.rate - want).abs() < 1e-6, "{d}: {} vs {want}", pt.rate);
        }
        let zero = rd_point_at_distortion(&p, 0.5, 1e-12, 10_000).unwrap();
        assert_eq!(zero.rate, 0.0);
        let sharp = blahut_arimoto(&p, 60.0, 1e-12, 10_000).unwrap();
        assert!((sharp.rate - 1.0).abs() < 1e-6);
    }

    #[test]
    fn rdim_examples() {
        let b = MeasureSpec::uniform(2).unwrap();
        let (lo, up) = rdim_bounds(&b, 2.0, &default_rd_schedule(2.0).unwrap()).unwrap();
        assert!((up.value - 2.0).abs() < 1e-9);
        assert!((lo.value - 2.0).abs() < 0.05, "{}", lo.value);
        let (lo, up) = rdim_bounds(&b, 4.0, &default_rd_schedule(4.0).unwrap()).unwrap();
        assert!((up.value - 1.0).abs() < 1e-9);
        assert!((lo.value - 1.0).abs() < 0.05, "{}", lo.value);
        let one = MeasureSpec::uniform(1).unwrap();
        let (lo, up) = rdim_bounds(&one, 2.0, &default_rd_schedule(2.0).unwrap()).unwrap();
        assert_eq!((lo.value.abs() < 1e-12, up.value.abs() < 1e-12), (true, true));
        let parry = parry_measure(&golden_mean_1d()).unwrap();
        let (lo, up) = rdim_bounds(&parry, 2.0, &default_rd_schedule(2.0).unwrap()).unwrap();
        let target = 2.0 * ((1.0 + 5f64.sqrt()) / 2.0).log2();
        assert!((up.value - target).abs() < 1e-9);
        assert!((lo.value - target).abs() < 0.05, "{}", lo.value);
    }

    #[test]
    fn window_problem_is_well_formed() {
        let b = MeasureSpec::uniform(2).unwrap();
        let spec = MetricSpec::linf(2.0).unwrap();
        let square = LatticeSet::from_rect(&IntRect::new(-1, 1, -1, 1).unwrap());
        let p = window_rd_problem(&b, &spec, &square).unwrap();
        assert_eq!(p.source().len(), 512);
        // identical patterns: only the bound from the first unseen ring
        assert!(p.distortion().iter().enumerate().all(|(i, r)| r[i] == 0.25));
        // a row window cannot see row 1, so its bound is 1/2
        let p = window_rd_problem(&b, &spec, &LatticeSet::interval(-1, 1)).unwrap();
        assert!(p.distortion().iter().enumerate().all(|(i, r)| r[i] == 0.5));
    }
}

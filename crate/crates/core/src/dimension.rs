//! Covering numbers and dimension estimators.
//!
//! Since `d_N` is an ultrametric with values in a discrete set, a set of
//! diameter `< ε` is exactly a subset of a cylinder over the window
//! [`window_for_epsilon`]. Covering numbers are therefore pattern counts on
//! that window; for certified fixture families they are exact, otherwise
//! they are upper bounds (locally admissible patterns).

use num_bigint::BigUint;

use crate::info::{check_compatible, max_cylinder_log2, MeasureSpec};
use crate::metric::{window_for_epsilon, window_from_ball, Action, Ball, Epsilon, MetricSpec};
use crate::subshift::{count_with, CountOptions, SftSpec};
use crate::{log2_biguint, Error, Fit, FitModel, Result};

/// Whether an estimate is a certified value or one side of a bracket.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EstimateKind {
    Upper,
    Lower,
    Exact,
}

impl EstimateKind {
    pub fn tag(self) -> &'static str {
        match self {
            EstimateKind::Upper => "upper-bound",
            EstimateKind::Lower => "lower-bound",
            EstimateKind::Exact => "exact",
        }
    }
}

/// An extrapolated dimension with the raw sequence behind it.
#[derive(Debug, Clone, PartialEq)]
pub struct DimensionEstimate {
    pub value: f64,
    pub kind: EstimateKind,
    /// `(M, N)` evaluation points; `N = 0` marks N-free evaluations.
    pub schedule: Vec<(u64, u64)>,
    pub sequence: Vec<f64>,
    pub fit: Fit,
}

impl DimensionEstimate {
    pub(crate) fn from_fit(kind: EstimateKind, schedule: Vec<(u64, u64)>, sequence: Vec<f64>, fit: Fit) -> Self {
        DimensionEstimate { value: fit.limit(), kind, schedule, sequence, fit }
    }
}

fn check_n(n: u64) -> Result<()> {
    if n == 0 {
        return Err(Error::OutOfRange { name: "N", value: 0.0, expected: ">= 1" });
    }
    Ok(())
}

/// `#(X, d_N, ε)` with default counting options.
pub fn covering_number(sft: &SftSpec, spec: &MetricSpec, action: &Action, n: u64, eps: &Epsilon) -> Result<BigUint> {
    covering_number_with(sft, spec, action, n, eps, &CountOptions::default())
}

pub fn covering_number_with(
    sft: &SftSpec,
    spec: &MetricSpec,
    action: &Action,
    n: u64,
    eps: &Epsilon,
    opts: &CountOptions,
) -> Result<BigUint> {
    action.check_against(sft)?;
    check_n(n)?;
    let window = window_for_epsilon(spec, action, n, eps)?;
    count_with(sft, &window, opts)
}

/// `log₂` of the count on the depth-`m` window after `n` iterates.
fn log2_count_at(sft: &SftSpec, spec: &MetricSpec, action: &Action, m: u64, n: u64, opts: &CountOptions) -> Result<f64> {
    let window = window_from_ball(action, n, Ball::of_depth(spec.norm(), m))?;
    Ok(log2_biguint(&count_with(sft, &window, opts)?))
}

/// `S(X, T, d, ε)` estimated from a schedule of `N` values.
#[derive(Debug, Clone, PartialEq)]
pub struct ResolutionEntropy {
    /// bits per iterate, from the two largest `N`
    pub slope: f64,
    /// `(N, log₂ #(X, d_N, ε))`
    pub sequence: Vec<(u64, f64)>,
}

pub fn entropy_at_resolution(
    sft: &SftSpec,
    spec: &MetricSpec,
    action: &Action,
    eps: &Epsilon,
    n_schedule: &[u64],
) -> Result<ResolutionEntropy> {
    let mut ns = n_schedule.to_vec();
    ns.sort_unstable();
    ns.dedup();
    if ns.len() < 2 {
        return Err(Error::DegenerateFit("entropy at resolution needs two distinct N".into()));
    }
    let opts = CountOptions::default();
    let sequence = ns
        .iter()
        .map(|&n| Ok((n, log2_biguint(&covering_number_with(sft, spec, action, n, eps, &opts)?))))
        .collect::<Result<Vec<_>>>()?;
    let (a, b) = (sequence[sequence.len() - 2], sequence[sequence.len() - 1]);
    Ok(ResolutionEntropy { slope: (b.1 - a.1) / (b.0 - a.0) as f64, sequence })
}

fn check_schedule(ms: &[u64], min_m: u64) -> Result<()> {
    if ms.is_empty() {
        return Err(Error::DegenerateFit("empty M schedule".into()));
    }
    if ms.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::DegenerateFit("M schedule must be strictly increasing".into()));
    }
    if ms[0] < min_m {
        return Err(Error::OutOfRange { name: "M", value: ms[0] as f64, expected: "M >= 2" });
    }
    Ok(())
}

/// The `N` pair used for slopes at depth `m`.
fn n_pair(m: u64, n_factor: u64) -> Result<(u64, u64)> {
    if n_factor == 0 {
        return Err(Error::OutOfRange { name: "N-factor", value: 0.0, expected: ">= 1" });
    }
    let n1 = n_factor * m;
    Ok((n1, 2 * n1))
}

/// Metric mean dimension (2D) or box dimension (one-sided 1D).
///
/// With a planar action, `v_M = S(ε_M) / log₂(1/ε_M)` where `S` is the
/// slope of `log₂ #` between `N₁ = n_factor·M` and `2N₁`. With the one-sided
/// action the count itself is used: `v_M = log₂ #(X, d, ε_M) / log₂(1/ε_M)`.
/// Both are fitted by `v∞ + c/(M−1)`.
pub fn mmdim_estimate(
    sft: &SftSpec,
    spec: &MetricSpec,
    action: &Action,
    m_schedule: &[u64],
    n_factor: u64,
) -> Result<DimensionEstimate> {
    mmdim_estimate_with(sft, spec, action, m_schedule, n_factor, &CountOptions::default())
}

pub fn mmdim_estimate_with(
    sft: &SftSpec,
    spec: &MetricSpec,
    action: &Action,
    m_schedule: &[u64],
    n_factor: u64,
    opts: &CountOptions,
) -> Result<DimensionEstimate> {
    action.check_against(sft)?;
    check_schedule(m_schedule, 2)?;
    let la = spec.log2_alpha();
    let mut schedule = Vec::with_capacity(m_schedule.len());
    let mut sequence = Vec::with_capacity(m_schedule.len());
    for &m in m_schedule {
        let scale = (m - 1) as f64 * la;
        match action {
            Action::OneSided => {
                schedule.push((m, 1));
                sequence.push(log2_count_at(sft, spec, action, m, 1, opts)? / scale);
            }
            Action::Planar { .. } => {
                let (n1, n2) = n_pair(m, n_factor)?;
                schedule.push((m, n2));
                let c1 = log2_count_at(sft, spec, action, m, n1, opts)?;
                let c2 = log2_count_at(sft, spec, action, m, n2, opts)?;
                sequence.push((c2 - c1) / (n2 - n1) as f64 / scale);
            }
        }
    }
    let fit = Fit::new(FitModel::InverseMMinusOne, m_schedule, &sequence)?;
    let kind = if sft.certificate().is_some() { EstimateKind::Exact } else { EstimateKind::Upper };
    Ok(DimensionEstimate::from_fit(kind, schedule, sequence, fit))
}

fn check_caps(m: u64, mcap: u64) -> Result<()> {
    if m == 0 || mcap < m {
        return Err(Error::OutOfRange { name: "Mcap", value: mcap as f64, expected: "1 <= M <= Mcap" });
    }
    Ok(())
}

/// Critical exponent of the uniform depth-`M′` cylinder covers, minimised
/// over `M′ ∈ [m, mcap]`; an upper bound on `dim_H(X, d_N, ε_M)`.
pub fn hausdorff_upper_at_scale(
    sft: &SftSpec,
    spec: &MetricSpec,
    action: &Action,
    n: u64,
    m: u64,
    mcap: u64,
) -> Result<f64> {
    action.check_against(sft)?;
    check_n(n)?;
    check_caps(m, mcap)?;
    let opts = CountOptions::default();
    let mut best = f64::INFINITY;
    for mp in m..=mcap {
        let e = Ball::of_depth(spec.norm(), mp).outside_exponent() * spec.log2_alpha();
        best = best.min(log2_count_at(sft, spec, action, mp, n, &opts)? / e);
    }
    Ok(best)
}

/// Mass-distribution lower bound: the largest `s` with
/// `μ(C) ≤ diam(C)^s` for every depth-`M′` cylinder, `M′ ∈ [m, mcap]`.
pub fn hausdorff_lower_at_scale(
    sft: &SftSpec,
    measure: &MeasureSpec,
    spec: &MetricSpec,
    action: &Action,
    n: u64,
    m: u64,
    mcap: u64,
) -> Result<f64> {
    action.check_against(sft)?;
    check_compatible(measure, sft)?;
    check_n(n)?;
    check_caps(m, mcap)?;
    let mut best = f64::INFINITY;
    for mp in m..=mcap {
        let ball = Ball::of_depth(spec.norm(), mp);
        let window = window_from_ball(action, n, ball)?;
        let e = ball.outside_exponent() * spec.log2_alpha();
        best = best.min(-max_cylinder_log2(measure, &window) / e);
    }
    Ok(best.max(0.0))
}

/// How far past `M` the mass-distribution bound scans.
pub const LOWER_DEPTH_SPAN: u64 = 2;

/// Mean Hausdorff dimension bracket `(lower, upper)`.
///
/// Planar actions normalise per iterate by taking slopes in `N` between
/// `n_factor·M` and twice that; the one-sided action uses `N = 1`. The upper
/// sequence uses the depth-`M` cover alone, the lower one scans depths
/// `M..=M+LOWER_DEPTH_SPAN`. Both are fitted by `v∞ + c/M`. The lower bound
/// needs a measure and is `None` without one.
pub fn mhdim_bounds(
    sft: &SftSpec,
    measure: Option<&MeasureSpec>,
    spec: &MetricSpec,
    action: &Action,
    m_schedule: &[u64],
    n_factor: u64,
) -> Result<(Option<DimensionEstimate>, DimensionEstimate)> {
    action.check_against(sft)?;
    check_schedule(m_schedule, 1)?;
    if let Some(mu) = measure {
        check_compatible(mu, sft)?;
    }
    let opts = CountOptions::default();
    let la = spec.log2_alpha();
    let mut schedule = Vec::new();
    let (mut up, mut lo) = (Vec::new(), Vec::new());
    for &m in m_schedule {
        let exponent = |mp: u64| Ball::of_depth(spec.norm(), mp).outside_exponent() * la;
        let window = |mp: u64, n: u64| window_from_ball(action, n, Ball::of_depth(spec.norm(), mp));
        match action {
            Action::OneSided => {
                schedule.push((m, 1));
                up.push(log2_count_at(sft, spec, action, m, 1, &opts)? / exponent(m));
                if let Some(mu) = measure {
                    let mut best = f64::INFINITY;
                    for mp in m..=m + LOWER_DEPTH_SPAN {
                        best = best.min(-max_cylinder_log2(mu, &window(mp, 1)?) / exponent(mp));
                    }
                    lo.push(best.max(0.0));
                }
            }
            Action::Planar { .. } => {
                let (n1, n2) = n_pair(m, n_factor)?;
                schedule.push((m, n2));
                let dn = (n2 - n1) as f64;
                let c1 = log2_count_at(sft, spec, action, m, n1, &opts)?;
                let c2 = log2_count_at(sft, spec, action, m, n2, &opts)?;
                up.push((c2 - c1) / dn / exponent(m));
                if let Some(mu) = measure {
                    let mut best = f64::INFINITY;
                    for mp in m..=m + LOWER_DEPTH_SPAN {
                        let (a, b) = (max_cylinder_log2(mu, &window(mp, n1)?), max_cylinder_log2(mu, &window(mp, n2)?));
                        best = best.min((a - b) / dn / exponent(mp));
                    }
                    lo.push(best.max(0.0));
                }
            }
        }
    }
    let upper = DimensionEstimate::from_fit(
        EstimateKind::Upper,
        schedule.clone(),
        up.clone(),
        Fit::new(FitModel::InverseM, m_schedule, &up)?,
    );
    let lower = match measure {
        Some(_) => Some(DimensionEstimate::from_fit(
            EstimateKind::Lower,
            schedule,
            lo.clone(),
            Fit::new(FitModel::InverseM, m_schedule, &lo)?,
        )),
        None => None,
    };
    Ok((lower, upper))
}

/// Outcome of [`tame_growth_check`].
#[derive(Debug, Clone, PartialEq)]
pub struct TameGrowth {
    /// `(M, ε_M^δ · log₂ #(X, d, ε_M))`
    pub values: Vec<(u64, f64)>,
    /// The final third of the values is nonincreasing.
    pub consistent: bool,
}

/// Scans `ε_M^δ log₂ #(X, d, ε_M)` for `M = 1..=m_max` with the static metric
/// (a single norm ball, or `[0, M−1]` for 1D).
pub fn tame_growth_check(sft: &SftSpec, spec: &MetricSpec, delta: f64, m_max: u64) -> Result<TameGrowth> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::OutOfRange { name: "delta", value: delta, expected: "> 0" });
    }
    if m_max == 0 {
        return Err(Error::OutOfRange { name: "Mmax", value: 0.0, expected: ">= 1" });
    }
    let action = Action::for_dimension(sft.dimension());
    let opts = CountOptions::default();
    let values = (1..=m_max)
        .map(|m| {
            let eps = Epsilon::at_depth(spec, m);
            let c = log2_count_at(sft, spec, &action, m, 1, &opts)?;
            Ok((m, (-delta * eps.log2_inv()).exp2() * c))
        })
        .collect::<Result<Vec<_>>>()?;
    let tail = &values[values.len() - (values.len() / 3).max(2).min(values.len())..];
    let consistent = tail.windows(2).all(|w| w[1].1 <= w[0].1);
    Ok(TameGrowth { values, consistent })
}

//! The shift ultrametrics, resolution indices and Bowen windows.
//!
//! For `x, y` in `A^{ℤ²}` the two metrics are `α^{-ν}` where `ν` is the
//! smallest ℓ∞ (resp. ℓ²) norm of a site where `x` and `y` differ. Both take
//! values in a discrete set, so "`d_N(x, y) < ε`" is the same as "`x` and `y`
//! agree on a finite window"; [`window_for_epsilon`] computes that window
//! exactly and [`bowen_window`] gives it for the grid `ε = α^{-(M-1)}`.

use std::fmt;

use crate::lattice::{LatticeSet, Point};
use crate::subshift::{Pattern, SftSpec};
use crate::{Error, Result};

/// Relative slack used to snap `log_α(1/ε)` onto an integer.
const SNAP: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Norm {
    #[default]
    LInf,
    L2,
}

impl Norm {
    pub fn tag(self) -> &'static str {
        match self {
            Norm::LInf => "linf",
            Norm::L2 => "l2",
        }
    }
}

/// Base `α > 1` and the norm on sites.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricSpec {
    alpha: f64,
    norm: Norm,
}

impl MetricSpec {
    pub fn new(alpha: f64, norm: Norm) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 1.0) {
            return Err(Error::OutOfRange { name: "alpha", value: alpha, expected: "finite and > 1" });
        }
        Ok(MetricSpec { alpha, norm })
    }

    pub fn linf(alpha: f64) -> Result<Self> {
        Self::new(alpha, Norm::LInf)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn log2_alpha(&self) -> f64 {
        self.alpha.log2()
    }

    pub fn norm(&self) -> Norm {
        self.norm
    }
}

/// A scale `ε > 0`, held as `log₂(1/ε)` so tiny scales do not underflow.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Epsilon {
    log2_inv: f64,
}

impl Epsilon {
    pub fn new(eps: f64) -> Result<Self> {
        if !(eps.is_finite() && eps > 0.0) {
            return Err(Error::OutOfRange { name: "epsilon", value: eps, expected: "finite and > 0" });
        }
        Ok(Epsilon { log2_inv: -eps.log2() })
    }

    pub fn from_log2_inv(log2_inv: f64) -> Result<Self> {
        if !log2_inv.is_finite() {
            return Err(Error::OutOfRange { name: "log2(1/epsilon)", value: log2_inv, expected: "finite" });
        }
        Ok(Epsilon { log2_inv })
    }

    /// `ε_M = α^{-(M-1)}`, the top of the bracket of resolution index `M`.
    pub fn at_depth(spec: &MetricSpec, m: u64) -> Self {
        Epsilon { log2_inv: (m.max(1) - 1) as f64 * spec.log2_alpha() }
    }

    pub fn value(&self) -> f64 {
        (-self.log2_inv).exp2()
    }

    pub fn log2_inv(&self) -> f64 {
        self.log2_inv
    }

    /// `log_α(1/ε)`, snapped to an integer when within rounding of one.
    pub fn depth_radius(&self, spec: &MetricSpec) -> f64 {
        snap(self.log2_inv / spec.log2_alpha())
    }
}

fn snap(x: f64) -> f64 {
    let k = x.round();
    if (x - k).abs() <= SNAP * k.abs().max(1.0) {
        k
    } else {
        x
    }
}

/// The `M ≥ 1` with `α^{-M} < ε ≤ α^{-M+1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ResolutionIndex(u64);

impl ResolutionIndex {
    pub fn new(m: u64) -> Result<Self> {
        if m == 0 {
            return Err(Error::OutOfRange { name: "M", value: 0.0, expected: ">= 1" });
        }
        Ok(ResolutionIndex(m))
    }

    pub fn get(self) -> u64 {
        self.0
    }
}

impl fmt::Display for ResolutionIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "M={}", self.0)
    }
}

pub fn resolution_index(spec: &MetricSpec, epsilon: f64) -> Result<ResolutionIndex> {
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(Error::OutOfRange { name: "epsilon", value: epsilon, expected: "0 < epsilon <= 1" });
    }
    resolution_index_of(spec, &Epsilon::new(epsilon)?)
}

/// [`resolution_index`] for a log-scale ε.
pub fn resolution_index_of(spec: &MetricSpec, eps: &Epsilon) -> Result<ResolutionIndex> {
    let r = eps.depth_radius(spec);
    if r < 0.0 {
        return Err(Error::OutOfRange { name: "epsilon", value: eps.value(), expected: "0 < epsilon <= 1" });
    }
    if r >= 1e15 {
        return Err(Error::OutOfRange { name: "log_alpha(1/epsilon)", value: r, expected: "< 1e15" });
    }
    ResolutionIndex::new(r.floor() as u64 + 1)
}

/// The acting generator: a one-sided 1D shift, or `σ₁^a σ₂^b` on ℤ².
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Action {
    /// The shift on `A^ℕ`; windows start at site 0.
    OneSided,
    Planar { a: i64, b: i64 },
}

impl Default for Action {
    fn default() -> Self {
        Action::Planar { a: 1, b: 0 }
    }
}

impl Action {
    pub fn planar(a: i64, b: i64) -> Result<Self> {
        if a == 0 && b == 0 {
            return Err(Error::ZeroAction);
        }
        Ok(Action::Planar { a, b })
    }

    /// Natural action for a subshift: one-sided for 1D, `σ₁` for 2D.
    pub fn for_dimension(dimension: u8) -> Self {
        if dimension == 1 {
            Action::OneSided
        } else {
            Action::default()
        }
    }

    pub(crate) fn check_against(&self, sft: &SftSpec) -> Result<()> {
        match (self, sft.dimension()) {
            (Action::OneSided, 1) => Ok(()),
            (Action::Planar { a, b }, 2) => Action::planar(*a, *b).map(|_| ()),
            (Action::OneSided, _) => Err(Error::Unsupported("the one-sided action needs a 1D subshift".into())),
            (Action::Planar { .. }, _) => Err(Error::Unsupported("planar actions need a 2D subshift".into())),
        }
    }
}

/// A norm ball, in exact integer terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Ball {
    /// `|u|∞ ≤ r`
    LInf(i64),
    /// `|u|₂² ≤ r2`
    L2Sq(i64),
}

impl Ball {
    /// `{u : norm(u) ≤ M − 1}`.
    pub(crate) fn of_depth(norm: Norm, m: u64) -> Ball {
        let r = m as i64 - 1;
        match norm {
            Norm::LInf => Ball::LInf(r),
            Norm::L2 => Ball::L2Sq(r * r),
        }
    }

    /// The sites that must agree for distance `< ε`, or `None` when `ε > 1`
    /// (no constraint at all).
    pub(crate) fn for_epsilon(spec: &MetricSpec, eps: &Epsilon) -> Option<Ball> {
        let r = eps.depth_radius(spec);
        if r < 0.0 {
            return None;
        }
        Some(match spec.norm() {
            Norm::LInf => Ball::LInf(r.floor() as i64),
            Norm::L2 => Ball::L2Sq(snap(r * r).floor() as i64),
        })
    }

    fn reach(self) -> i64 {
        match self {
            Ball::LInf(r) => r,
            Ball::L2Sq(r2) => (r2 as f64).sqrt().floor() as i64 + 1,
        }
    }

    fn contains(self, u: Point) -> bool {
        match self {
            Ball::LInf(r) => u.linf() <= r,
            Ball::L2Sq(r2) => u.l2_squared() <= r2,
        }
    }

    /// One-sided windows only see `m ≥ 0`; the radius is the reach in `m`.
    fn one_sided_len(self) -> i64 {
        match self {
            Ball::LInf(r) => r + 1,
            Ball::L2Sq(r2) => (0..).take_while(|m: &i64| m * m <= r2).count() as i64,
        }
    }

    /// Smallest norm exponent of a site outside the ball, i.e. the exponent
    /// `e` with cylinder diameter `≤ α^{-e}`.
    pub(crate) fn outside_exponent(self) -> f64 {
        match self {
            Ball::LInf(r) => (r + 1) as f64,
            Ball::L2Sq(r2) => {
                let reach = self.reach() + 1;
                let mut best = i64::MAX;
                for m in 0..=reach {
                    for n in 0..=reach {
                        let q = m * m + n * n;
                        if q > r2 {
                            best = best.min(q);
                        }
                    }
                }
                (best as f64).sqrt()
            }
        }
    }
}

pub(crate) fn window_from_ball(action: &Action, n: u64, ball: Ball) -> Result<LatticeSet> {
    if n == 0 {
        return Err(Error::OutOfRange { name: "N", value: 0.0, expected: ">= 1" });
    }
    match *action {
        Action::OneSided => {
            let len = ball.one_sided_len();
            Ok(LatticeSet::interval(0, len + n as i64 - 2))
        }
        Action::Planar { a, b } => {
            Action::planar(a, b)?;
            let reach = ball.reach();
            let disc: Vec<Point> = (-reach..=reach)
                .flat_map(|m| (-reach..=reach).map(move |k| Point::new(m, k)))
                .filter(|&u| ball.contains(u))
                .collect();
            let mut pts = Vec::with_capacity(disc.len() * n as usize);
            for k in 0..n as i64 {
                let c = Point::new(a * k, b * k);
                pts.extend(disc.iter().map(|&u| u + c));
            }
            Ok(LatticeSet::from_points(pts))
        }
    }
}

/// `W(M,N)`: union over `0 ≤ n < N` of `(na, nb) + {u : norm(u) ≤ M − 1}`.
///
/// Two points are `d_N`-closer than `α^{-(M-1)}` exactly when they agree on
/// this window. The one-sided action gives `[0, N + M − 2]` on row 0.
pub fn bowen_window(action: &Action, n: u64, m: ResolutionIndex, norm: Norm) -> Result<LatticeSet> {
    window_from_ball(action, n, Ball::of_depth(norm, m.get()))
}

/// Sites that must agree for `d_N(x, y) < ε`; empty when `ε > 1`.
///
/// With ℓ² this depends on ε itself and not only on its resolution index:
/// the radius is `log_α(1/ε)`, which equals `M − 1` at `ε = α^{-(M-1)}`.
pub fn window_for_epsilon(spec: &MetricSpec, action: &Action, n: u64, eps: &Epsilon) -> Result<LatticeSet> {
    match Ball::for_epsilon(spec, eps) {
        Some(ball) => window_from_ball(action, n, ball),
        None if n == 0 => Err(Error::OutOfRange { name: "N", value: 0.0, expected: ">= 1" }),
        None => Ok(LatticeSet::empty()),
    }
}

/// Result of comparing two finite patterns.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MetricValue {
    /// The distance is determined by the visible cells.
    Exact(f64),
    /// Patterns agree on everything up to the first unseen site, so the
    /// distance is at most this.
    AtMost(f64),
}

impl MetricValue {
    /// The exact value or the bound.
    pub fn value(self) -> f64 {
        match self {
            MetricValue::Exact(v) | MetricValue::AtMost(v) => v,
        }
    }

    pub fn is_exact(self) -> bool {
        matches!(self, MetricValue::Exact(_))
    }
}

/// Integer key whose order matches the norm: `|u|∞` or `|u|₂²`.
fn norm_key(norm: Norm, u: Point) -> i64 {
    match norm {
        Norm::LInf => u.linf(),
        Norm::L2 => u.l2_squared(),
    }
}

fn key_to_exponent(norm: Norm, key: i64) -> f64 {
    match norm {
        Norm::LInf => key as f64,
        Norm::L2 => (key as f64).sqrt(),
    }
}

/// Distance between the configurations seen through two same-support
/// patterns.
pub fn metric_eval(spec: &MetricSpec, p: &Pattern, q: &Pattern) -> Result<MetricValue> {
    if p.support() != q.support() {
        return Err(Error::SupportMismatch);
    }
    let norm = spec.norm();
    let disagree = p
        .cells()
        .zip(q.values())
        .filter(|((_, a), b)| a != *b)
        .map(|((u, _), _)| norm_key(norm, u))
        .min();
    // nearest site the patterns cannot see
    let hidden = match p.support().bounding_box() {
        None => 0,
        Some(bb) => {
            let mut best = i64::MAX;
            for m in bb.a() - 1..=bb.b() + 1 {
                for n in bb.c() - 1..=bb.d() + 1 {
                    let u = Point::new(m, n);
                    if !p.support().contains(u) {
                        best = best.min(norm_key(norm, u));
                    }
                }
            }
            // the origin is the nearest site when it lies outside the box
            if !bb.contains(Point::ORIGIN) {
                best = 0;
            }
            best
        }
    };
    let at = |key: i64| spec.alpha().powf(-key_to_exponent(norm, key));
    Ok(match disagree {
        Some(k) if k <= hidden => MetricValue::Exact(at(k)),
        _ => MetricValue::AtMost(at(hidden)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::IntRect;

    fn square(r: i64) -> LatticeSet {
        LatticeSet::from_rect(&IntRect::new(-r, r, -r, r).unwrap())
    }

    #[test]
    fn metric_examples() {
        let s = MetricSpec::linf(2.0).unwrap();
        let sup = square(2);
        let zeros = Pattern::new(sup.clone(), vec![0; 25]).unwrap();
        let mut v = vec![0; 25];
        v[sup.index_of(Point::ORIGIN).unwrap()] = 1;
        let at_origin = Pattern::new(sup.clone(), v).unwrap();
        assert_eq!(metric_eval(&s, &zeros, &at_origin).unwrap(), MetricValue::Exact(1.0));

        let mut v = vec![0; 25];
        v[sup.index_of(Point::new(2, 1)).unwrap()] = 1;
        let far = Pattern::new(sup.clone(), v.clone()).unwrap();
        assert_eq!(metric_eval(&s, &zeros, &far).unwrap(), MetricValue::Exact(0.25));

        let l2 = MetricSpec::new(2.0, Norm::L2).unwrap();
        let mut v = vec![0; 25];
        v[sup.index_of(Point::new(1, 1)).unwrap()] = 1;
        let diag = Pattern::new(sup.clone(), v).unwrap();
        let d = metric_eval(&l2, &zeros, &diag).unwrap();
        assert!(d.is_exact());
        assert!((d.value() - 2f64.powf(-2f64.sqrt())).abs() < 1e-15);
        assert!((d.value() - 0.37521).abs() < 1e-5);

        // equal patterns: certificate from the first unseen site (|u|∞ = 3)
        assert_eq!(metric_eval(&s, &zeros, &zeros).unwrap(), MetricValue::AtMost(0.125));
        let other = Pattern::new(square(1), vec![0; 9]).unwrap();
        assert_eq!(metric_eval(&s, &zeros, &other), Err(Error::SupportMismatch));
    }

    #[test]
    fn resolution_examples() {
        let s = MetricSpec::linf(2.0).unwrap();
        assert_eq!(resolution_index(&s, 0.5).unwrap().get(), 2);
        assert_eq!(resolution_index(&s, 1.0).unwrap().get(), 1);
        assert_eq!(resolution_index(&s, 0.25).unwrap().get(), 3);
        assert_eq!(resolution_index(&s, 0.3).unwrap().get(), 2);
        assert!(resolution_index(&s, 0.0).is_err());
        assert!(resolution_index(&s, 1.5).is_err());
        let s3 = MetricSpec::linf(3.0).unwrap();
        for m in 1..40 {
            let e = Epsilon::at_depth(&s3, m);
            assert_eq!(resolution_index_of(&s3, &e).unwrap().get(), m);
        }
    }

    #[test]
    fn window_examples() {
        let w = bowen_window(&Action::default(), 1, ResolutionIndex(3), Norm::LInf).unwrap();
        assert_eq!(w, square(2));
        let w = bowen_window(&Action::default(), 4, ResolutionIndex(2), Norm::LInf).unwrap();
        assert_eq!(w, LatticeSet::from_rect(&IntRect::new(-1, 4, -1, 1).unwrap()));
        assert_eq!(w.len(), 18);
        let w = bowen_window(&Action::planar(1, 1).unwrap(), 3, ResolutionIndex(2), Norm::LInf).unwrap();
        assert_eq!(w.len(), 19);
        assert_eq!(w, crate::lattice::lambda_set(1, 1, 2, 3).unwrap());
        let w = bowen_window(&Action::OneSided, 3, ResolutionIndex(4), Norm::LInf).unwrap();
        assert_eq!(w, LatticeSet::interval(0, 5));
        assert!(bowen_window(&Action::Planar { a: 0, b: 0 }, 1, ResolutionIndex(1), Norm::LInf).is_err());
    }

    #[test]
    fn l2_windows_are_discs() {
        let w = bowen_window(&Action::default(), 1, ResolutionIndex(3), Norm::L2).unwrap();
        // |u|₂ ≤ 2: 13 sites
        assert_eq!(w.len(), 13);
        let s = MetricSpec::new(2.0, Norm::L2).unwrap();
        // radius √5 between 2 and 3 picks up the (2,1) family
        let e = Epsilon::from_log2_inv(5f64.sqrt()).unwrap();
        let w = window_for_epsilon(&s, &Action::default(), 1, &e).unwrap();
        assert_eq!(w.len(), 21);
        assert_eq!(Ball::L2Sq(4).outside_exponent(), 5f64.sqrt());
        assert_eq!(Ball::LInf(2).outside_exponent(), 3.0);
    }

    #[test]
    fn large_epsilon_has_empty_window() {
        let s = MetricSpec::linf(2.0).unwrap();
        let e = Epsilon::new(1.5).unwrap();
        assert!(window_for_epsilon(&s, &Action::default(), 3, &e).unwrap().is_empty());
    }
}

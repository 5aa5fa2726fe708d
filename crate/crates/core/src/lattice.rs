//! Integer-lattice geometry on ℤ².
//!
//! Rectangles are discrete: `[a,b]×[c,d]` is the set of integer points
//! `(m,n)` with `a ≤ m ≤ b` and `c ≤ n ≤ d`. Everything here is exact integer
//! arithmetic.

use std::collections::HashMap;
use std::fmt;

use crate::{Error, Result};

/// A point `u = (m, n)` of ℤ². Ordered lexicographically by `(m, n)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Point {
    pub m: i64,
    pub n: i64,
}

impl Point {
    pub const ORIGIN: Point = Point { m: 0, n: 0 };

    pub const fn new(m: i64, n: i64) -> Self {
        Point { m, n }
    }

    pub fn linf(self) -> i64 {
        self.m.abs().max(self.n.abs())
    }

    /// `m² + n²`, the squared Euclidean norm.
    pub fn l2_squared(self) -> i64 {
        self.m * self.m + self.n * self.n
    }
}

impl std::ops::Add for Point {
    type Output = Point;
    fn add(self, o: Point) -> Point {
        Point::new(self.m + o.m, self.n + o.n)
    }
}

impl std::ops::Sub for Point {
    type Output = Point;
    fn sub(self, o: Point) -> Point {
        Point::new(self.m - o.m, self.n - o.n)
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.m, self.n)
    }
}

/// The rectangle `[a,b]×[c,d]` with `a ≤ b`, `c ≤ d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct IntRect {
    a: i64,
    b: i64,
    c: i64,
    d: i64,
}

impl IntRect {
    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        if a > b || c > d {
            return Err(Error::InvalidRect { a, b, c, d });
        }
        Ok(IntRect { a, b, c, d })
    }

    /// Horizontal interval `[a,b]×{0}`.
    pub fn row(a: i64, b: i64) -> Result<Self> {
        Self::new(a, b, 0, 0)
    }

    /// `[0,w-1]×[0,h-1]`.
    pub fn sized(w: u64, h: u64) -> Result<Self> {
        if w == 0 || h == 0 {
            return Err(Error::InvalidRect { a: 0, b: w as i64 - 1, c: 0, d: h as i64 - 1 });
        }
        Self::new(0, w as i64 - 1, 0, h as i64 - 1)
    }

    pub fn a(&self) -> i64 {
        self.a
    }
    pub fn b(&self) -> i64 {
        self.b
    }
    pub fn c(&self) -> i64 {
        self.c
    }
    pub fn d(&self) -> i64 {
        self.d
    }

    pub fn width(&self) -> u64 {
        (self.b - self.a + 1) as u64
    }

    pub fn height(&self) -> u64 {
        (self.d - self.c + 1) as u64
    }

    pub fn cardinality(&self) -> u64 {
        self.width() * self.height()
    }

    pub fn contains(&self, p: Point) -> bool {
        self.a <= p.m && p.m <= self.b && self.c <= p.n && p.n <= self.d
    }

    pub fn contains_rect(&self, o: &IntRect) -> bool {
        self.a <= o.a && o.b <= self.b && self.c <= o.c && o.d <= self.d
    }

    pub fn intersects(&self, o: &IntRect) -> bool {
        self.a <= o.b && o.a <= self.b && self.c <= o.d && o.c <= self.d
    }

    pub fn translate(&self, u: Point) -> IntRect {
        IntRect { a: self.a + u.m, b: self.b + u.m, c: self.c + u.n, d: self.d + u.n }
    }

    /// The dilation `3R = [2a−b, 2b−a] × [2c−d, 2d−c]`.
    pub fn triple(&self) -> IntRect {
        IntRect {
            a: 2 * self.a - self.b,
            b: 2 * self.b - self.a,
            c: 2 * self.c - self.d,
            d: 2 * self.d - self.c,
        }
    }

    /// The pre-order `R ≤ R'`: width and height of `self` are each at most
    /// those of `other`.
    pub fn leq(&self, other: &IntRect) -> bool {
        self.b - self.a <= other.b - other.a && self.d - self.c <= other.d - other.c
    }

    /// Points in canonical (lexicographic) order.
    pub fn points(&self) -> impl Iterator<Item = Point> + '_ {
        (self.a..=self.b).flat_map(move |m| (self.c..=self.d).map(move |n| Point::new(m, n)))
    }
}

impl fmt::Display for IntRect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{}]x[{},{}]", self.a, self.b, self.c, self.d)
    }
}

pub fn rect_triple(r: &IntRect) -> IntRect {
    r.triple()
}

pub fn rect_leq(r: &IntRect, s: &IntRect) -> bool {
    r.leq(s)
}

/// A finite subset of ℤ², stored as a sorted duplicate-free point list.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct LatticeSet {
    points: Vec<Point>,
}

impl LatticeSet {
    pub fn empty() -> Self {
        LatticeSet { points: Vec::new() }
    }

    pub fn from_points(mut points: Vec<Point>) -> Self {
        points.sort_unstable();
        points.dedup();
        LatticeSet { points }
    }

    pub fn from_rect(r: &IntRect) -> Self {
        // already canonical
        LatticeSet { points: r.points().collect() }
    }

    /// `{ (m, 0) : lo ≤ m ≤ hi }`; empty when `lo > hi`.
    pub fn interval(lo: i64, hi: i64) -> Self {
        LatticeSet { points: (lo..=hi).map(|m| Point::new(m, 0)).collect() }
    }

    pub fn singleton(p: Point) -> Self {
        LatticeSet { points: vec![p] }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn iter(&self) -> impl Iterator<Item = &Point> + '_ {
        self.points.iter()
    }

    pub fn contains(&self, p: Point) -> bool {
        self.points.binary_search(&p).is_ok()
    }

    /// Position of `p` in canonical order.
    pub fn index_of(&self, p: Point) -> Option<usize> {
        self.points.binary_search(&p).ok()
    }

    pub fn bounding_box(&self) -> Option<IntRect> {
        let first = self.points.first()?;
        let (mut a, mut b, mut c, mut d) = (first.m, first.m, first.n, first.n);
        for p in &self.points {
            a = a.min(p.m);
            b = b.max(p.m);
            c = c.min(p.n);
            d = d.max(p.n);
        }
        Some(IntRect { a, b, c, d })
    }

    /// The rectangle this set equals, if it is one.
    pub fn as_rect(&self) -> Option<IntRect> {
        let bb = self.bounding_box()?;
        (bb.cardinality() == self.points.len() as u64).then_some(bb)
    }

    pub fn translate(&self, u: Point) -> LatticeSet {
        // translation preserves lexicographic order
        LatticeSet { points: self.points.iter().map(|&p| p + u).collect() }
    }

    pub fn is_subset(&self, other: &LatticeSet) -> bool {
        self.points.iter().all(|&p| other.contains(p))
    }

    pub fn union(&self, other: &LatticeSet) -> LatticeSet {
        let mut pts = Vec::with_capacity(self.len() + other.len());
        pts.extend_from_slice(&self.points);
        pts.extend_from_slice(&other.points);
        LatticeSet::from_points(pts)
    }

    pub fn difference(&self, other: &LatticeSet) -> LatticeSet {
        LatticeSet { points: self.points.iter().copied().filter(|&p| !other.contains(p)).collect() }
    }

    pub fn intersection(&self, other: &LatticeSet) -> LatticeSet {
        LatticeSet { points: self.points.iter().copied().filter(|&p| other.contains(p)).collect() }
    }

    pub fn is_disjoint(&self, other: &LatticeSet) -> bool {
        self.points.iter().all(|&p| !other.contains(p))
    }
}

impl FromIterator<Point> for LatticeSet {
    fn from_iter<I: IntoIterator<Item = Point>>(iter: I) -> Self {
        LatticeSet::from_points(iter.into_iter().collect())
    }
}

impl<'a> IntoIterator for &'a LatticeSet {
    type Item = &'a Point;
    type IntoIter = std::slice::Iter<'a, Point>;
    fn into_iter(self) -> Self::IntoIter {
        self.points.iter()
    }
}

/// `∂_Λ Ω`: the `u` for which `u + Λ` meets both `Ω` and `ℤ² ∖ Ω`.
pub fn boundary_set(omega: &LatticeSet, lambda: &LatticeSet) -> Result<LatticeSet> {
    if lambda.is_empty() {
        return Err(Error::EmptyWindow);
    }
    // u + Λ meets Ω exactly when u = ω − λ for some ω, λ.
    let meets: LatticeSet = omega
        .iter()
        .flat_map(|&w| lambda.iter().map(move |&l| w - l))
        .collect();
    Ok(meets
        .iter()
        .copied()
        .filter(|&u| lambda.iter().any(|&l| !omega.contains(u + l)))
        .collect())
}

/// `Int_Λ Ω = Ω ∖ ∂_Λ Ω`.
pub fn interior_set(omega: &LatticeSet, lambda: &LatticeSet) -> Result<LatticeSet> {
    Ok(omega.difference(&boundary_set(omega, lambda)?))
}

/// Checks that every pair of rectangles is comparable under [`IntRect::leq`].
pub fn check_totally_ordered(rects: &[IntRect]) -> Result<()> {
    for i in 0..rects.len() {
        for j in i + 1..rects.len() {
            if !rects[i].leq(&rects[j]) && !rects[j].leq(&rects[i]) {
                return Err(Error::NotTotallyOrdered {
                    first: i,
                    second: j,
                    first_rect: rects[i],
                    second_rect: rects[j],
                });
            }
        }
    }
    Ok(())
}

/// Greedy disjoint subfamily of a totally ordered family of rectangles.
///
/// Repeatedly picks the largest remaining rectangle (lowest index among ties)
/// that is disjoint from everything already picked. Every input rectangle is
/// then contained in `3R` of some picked `R`, so the picked rectangles cover at
/// least 1/9 of the union. Indices are returned in selection order; an empty
/// family yields an empty selection.
pub fn greedy_disjoint_subcover(rects: &[IntRect]) -> Result<Vec<usize>> {
    check_totally_ordered(rects)?;
    let mut selected: Vec<usize> = Vec::new();
    loop {
        let mut best: Option<usize> = None;
        for (i, r) in rects.iter().enumerate() {
            if selected.iter().any(|&s| rects[s].intersects(r)) {
                continue;
            }
            best = match best {
                Some(b) if r.leq(&rects[b]) => Some(b),
                _ => Some(i),
            };
        }
        match best {
            Some(b) => selected.push(b),
            None => return Ok(selected),
        }
    }
}

fn check_action(a: i64, b: i64) -> Result<()> {
    if a == 0 && b == 0 {
        Err(Error::ZeroAction)
    } else {
        Ok(())
    }
}

/// Disjoint maximal x-intervals of `Λ_{a,b}(M,N)` per row, rows ascending.
fn lambda_rows(a: i64, b: i64, m: u64, n: u64) -> Vec<(i64, Vec<(i64, i64)>)> {
    let r = m as i64 - 1;
    let mut rows: HashMap<i64, Vec<(i64, i64)>> = HashMap::new();
    for k in 0..n as i64 {
        let (cx, cy) = (a * k, b * k);
        for y in cy - r..=cy + r {
            rows.entry(y).or_default().push((cx - r, cx + r));
        }
    }
    let mut out: Vec<(i64, Vec<(i64, i64)>)> = rows
        .into_iter()
        .map(|(y, mut iv)| {
            iv.sort_unstable();
            let mut merged: Vec<(i64, i64)> = Vec::with_capacity(iv.len());
            for (lo, hi) in iv {
                match merged.last_mut() {
                    Some(last) if lo <= last.1 + 1 => last.1 = last.1.max(hi),
                    _ => merged.push((lo, hi)),
                }
            }
            (y, merged)
        })
        .collect();
    out.sort_unstable_by_key(|(y, _)| *y);
    out
}

/// `Λ_{a,b}(M,N) = { (an + x, bn + y) : 0 ≤ n < N, |(x,y)|∞ < M }`.
pub fn lambda_set(a: i64, b: i64, m: u64, n: u64) -> Result<LatticeSet> {
    check_action(a, b)?;
    if m == 0 || n == 0 {
        return Ok(LatticeSet::empty());
    }
    let pts = lambda_rows(a, b, m, n)
        .into_iter()
        .flat_map(|(y, iv)| iv.into_iter().flat_map(move |(lo, hi)| (lo..=hi).map(move |x| Point::new(x, y))))
        .collect();
    Ok(LatticeSet::from_points(pts))
}

/// `|Λ_{a,b}(M,N)|` without materialising the set.
pub fn lambda_count(a: i64, b: i64, m: u64, n: u64) -> Result<u64> {
    check_action(a, b)?;
    if m == 0 || n == 0 {
        return Ok(0);
    }
    Ok(lambda_rows(a, b, m, n)
        .iter()
        .flat_map(|(_, iv)| iv.iter())
        .map(|(lo, hi)| (hi - lo + 1) as u64)
        .sum())
}

/// Closed form `(2M−1)² + (N−1)·new` where `new` is the number of cells a
/// step by `(a,b)` adds to a `(2M−1)`-square.
///
/// Exact because translates along the segment are interval-convex in each
/// coordinate: a cell of square `k+1` that lies in some earlier square also
/// lies in square `k`.
pub fn lambda_count_formula(a: i64, b: i64, m: u64, n: u64) -> Result<u64> {
    check_action(a, b)?;
    if m == 0 || n == 0 {
        return Ok(0);
    }
    let side = 2 * m as i64 - 1;
    let overlap = (side - a.abs()).max(0) * (side - b.abs()).max(0);
    let fresh = (side * side - overlap) as u64;
    Ok((side * side) as u64 + (n - 1) * fresh)
}

/// `|Λ_{a,b}(M,N)| / (MN)`; tends to `2(|a|+|b|)` as `N → ∞` then `M → ∞`.
pub fn lambda_density(a: i64, b: i64, m: u64, n: u64) -> Result<f64> {
    if m == 0 || n == 0 {
        return Err(Error::OutOfRange { name: "M*N", value: 0.0, expected: "M >= 1 and N >= 1" });
    }
    Ok(lambda_count(a, b, m, n)? as f64 / (m as f64 * n as f64))
}

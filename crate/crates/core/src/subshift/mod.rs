//! Subshifts of finite type on ℤ and ℤ².
//!
//! A 1D subshift lives on the row `n = 0` of ℤ²; all supports and patterns
//! share the [`LatticeSet`] representation. Counting works with *locally*
//! admissible patterns: no translate of a forbidden pattern fits inside the
//! support. For the fixture families ([`Certificate`]) this agrees with the
//! globally admissible count.

mod count;
mod entropy;

pub use count::{
    count_locally_admissible, count_with, enumerate_locally_admissible, is_locally_admissible, AdmissibleIter,
    CountMethod, CountOptions,
};
pub use entropy::{box_entropy_estimate, perron_data, perron_root, transfer_matrix_entropy_1d, PerronData};

use std::collections::HashMap;
use std::fmt;

use crate::lattice::{LatticeSet, Point};
use crate::{Error, Result};

/// Index of a symbol in its [`Alphabet`].
pub type Sym = u16;

/// An ordered finite list of distinct symbol tokens.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Alphabet {
    symbols: Vec<String>,
}

impl Alphabet {
    pub fn new<S: Into<String>>(symbols: impl IntoIterator<Item = S>) -> Result<Self> {
        let symbols: Vec<String> = symbols.into_iter().map(Into::into).collect();
        if symbols.is_empty() {
            return Err(Error::InvalidSft("alphabet must have at least one symbol".into()));
        }
        if symbols.len() > Sym::MAX as usize {
            return Err(Error::InvalidSft("alphabet too large".into()));
        }
        for (i, s) in symbols.iter().enumerate() {
            if s.is_empty() || s.chars().any(|c| c.is_whitespace() || "()=#,".contains(c)) {
                return Err(Error::InvalidSft(format!("bad symbol token {s:?}")));
            }
            if symbols[..i].contains(s) {
                return Err(Error::InvalidSft(format!("duplicate symbol {s:?}")));
            }
        }
        Ok(Alphabet { symbols })
    }

    /// The digits `0, 1, …, k−1`.
    pub fn numeric(k: usize) -> Result<Self> {
        Self::new((0..k).map(|i| i.to_string()))
    }

    pub fn size(&self) -> usize {
        self.symbols.len()
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    pub fn index_of(&self, token: &str) -> Option<Sym> {
        self.symbols.iter().position(|s| s == token).map(|i| i as Sym)
    }

    pub fn symbol(&self, s: Sym) -> &str {
        &self.symbols[s as usize]
    }
}

/// A finite pattern: a support and one symbol per support point.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Pattern {
    support: LatticeSet,
    /// aligned with `support.points()`
    values: Vec<Sym>,
}

impl Pattern {
    pub fn new(support: LatticeSet, values: Vec<Sym>) -> Result<Self> {
        if support.len() != values.len() {
            return Err(Error::SupportMismatch);
        }
        Ok(Pattern { support, values })
    }

    pub fn empty() -> Self {
        Pattern { support: LatticeSet::empty(), values: Vec::new() }
    }

    /// Builds a pattern from explicit cells; duplicate points are rejected.
    pub fn from_cells(cells: impl IntoIterator<Item = (Point, Sym)>) -> Result<Self> {
        let mut cells: Vec<(Point, Sym)> = cells.into_iter().collect();
        cells.sort_unstable_by_key(|c| c.0);
        if cells.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::InvalidSft("duplicate cell in pattern".into()));
        }
        let support = LatticeSet::from_points(cells.iter().map(|c| c.0).collect());
        Ok(Pattern { support, values: cells.into_iter().map(|c| c.1).collect() })
    }

    /// A horizontal word starting at `(start, 0)`.
    pub fn word(start: i64, symbols: &[Sym]) -> Self {
        Pattern {
            support: LatticeSet::interval(start, start + symbols.len() as i64 - 1),
            values: symbols.to_vec(),
        }
    }

    pub fn support(&self) -> &LatticeSet {
        &self.support
    }

    pub fn values(&self) -> &[Sym] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, p: Point) -> Option<Sym> {
        self.support.index_of(p).map(|i| self.values[i])
    }

    pub fn cells(&self) -> impl Iterator<Item = (Point, Sym)> + '_ {
        self.support.iter().copied().zip(self.values.iter().copied())
    }

    /// The projection `π_Ω`.
    pub fn restrict(&self, omega: &LatticeSet) -> Result<Pattern> {
        let mut values = Vec::with_capacity(omega.len());
        for &p in omega {
            values.push(self.get(p).ok_or(Error::NotASubset)?);
        }
        Ok(Pattern { support: omega.clone(), values })
    }

    pub fn translate(&self, u: Point) -> Pattern {
        Pattern { support: self.support.translate(u), values: self.values.clone() }
    }

    pub fn check_alphabet(&self, size: usize) -> Result<()> {
        match self.values.iter().find(|&&v| v as usize >= size) {
            Some(&v) => Err(Error::SymbolOutOfRange { symbol: v as usize, size }),
            None => Ok(()),
        }
    }
}

pub fn restrict_pattern(p: &Pattern, omega: &LatticeSet) -> Result<Pattern> {
    p.restrict(omega)
}

/// A fixture family for which locally admissible counts are exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Certificate {
    /// No forbidden patterns.
    Full,
    /// Rows constrained independently by an essential nearest-neighbour 1D SFT.
    RowLift,
    /// `x_u + x_{u+e₁} + x_{u+e₂} ≡ 0 (mod 2)`.
    ThreeDot,
}

impl Certificate {
    pub fn tag(self) -> &'static str {
        match self {
            Certificate::Full => "full",
            Certificate::RowLift => "row-lift",
            Certificate::ThreeDot => "three-dot",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Self> {
        match tag {
            "full" => Some(Certificate::Full),
            "row-lift" => Some(Certificate::RowLift),
            "three-dot" => Some(Certificate::ThreeDot),
            _ => None,
        }
    }
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// Alphabet plus forbidden patterns; `dimension` is 1 or 2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SftSpec {
    dimension: u8,
    alphabet: Alphabet,
    forbidden: Vec<Pattern>,
    certificate: Option<Certificate>,
}

impl SftSpec {
    pub fn new(dimension: u8, alphabet: Alphabet, forbidden: Vec<Pattern>) -> Result<Self> {
        if dimension != 1 && dimension != 2 {
            return Err(Error::InvalidSft(format!("dimension must be 1 or 2, got {dimension}")));
        }
        for p in &forbidden {
            if p.is_empty() {
                return Err(Error::InvalidSft("forbidden pattern with empty support".into()));
            }
            p.check_alphabet(alphabet.size())?;
            if dimension == 1 && p.support().iter().any(|q| q.n != 0) {
                return Err(Error::InvalidSft("1D forbidden patterns must lie on the row n = 0".into()));
            }
        }
        Ok(SftSpec { dimension, alphabet, forbidden, certificate: None })
    }

    /// Attaches a certificate after checking the structure it asserts.
    pub fn with_certificate(mut self, cert: Certificate) -> Result<Self> {
        self.check_certificate(cert)?;
        self.certificate = Some(cert);
        Ok(self)
    }

    pub fn dimension(&self) -> u8 {
        self.dimension
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet.size()
    }

    pub fn forbidden(&self) -> &[Pattern] {
        &self.forbidden
    }

    pub fn certificate(&self) -> Option<Certificate> {
        self.certificate
    }

    /// Forbidden patterns shifted so their first (canonical) cell is the origin,
    /// with exact duplicates removed.
    pub(crate) fn normalized_forbidden(&self) -> Vec<Pattern> {
        let mut out: Vec<Pattern> = Vec::new();
        for p in &self.forbidden {
            let first = p.support().points()[0];
            let q = p.translate(Point::new(-first.m, -first.n));
            if !out.contains(&q) {
                out.push(q);
            }
        }
        out
    }

    /// Largest horizontal extent `max m − min m + 1` over forbidden patterns
    /// (0 with none).
    pub fn max_forbidden_width(&self) -> u64 {
        self.forbidden
            .iter()
            .filter_map(|p| p.support().bounding_box())
            .map(|r| r.width())
            .max()
            .unwrap_or(0)
    }

    /// The 1D SFT whose forbidden words are these patterns read along a row,
    /// when every forbidden pattern lies in a single row.
    pub fn row_base(&self) -> Option<SftSpec> {
        let mut words = Vec::with_capacity(self.forbidden.len());
        for p in &self.forbidden {
            let n0 = p.support().points()[0].n;
            if p.support().iter().any(|q| q.n != n0) {
                return None;
            }
            words.push(Pattern::from_cells(p.cells().map(|(q, s)| (Point::new(q.m, 0), s))).ok()?);
        }
        SftSpec::new(1, self.alphabet.clone(), words).ok()
    }

    fn check_certificate(&self, cert: Certificate) -> Result<()> {
        let bad = |why: &str| Err(Error::InvalidSft(format!("certificate {cert}: {why}")));
        match cert {
            Certificate::Full => {
                if !self.forbidden.is_empty() {
                    return bad("full shifts have no forbidden patterns");
                }
            }
            Certificate::RowLift => {
                if self.dimension != 2 {
                    return bad("row-lifts are 2D");
                }
                let Some(base) = self.row_base() else {
                    return bad("every forbidden pattern must lie in one row");
                };
                if base.max_forbidden_width() > 2 {
                    return bad("row constraints must be nearest-neighbour");
                }
                if !base.is_essential_nearest_neighbour() {
                    return bad("the row SFT has dead-end symbols");
                }
            }
            Certificate::ThreeDot => {
                if self.dimension != 2 || self.alphabet.size() != 2 {
                    return bad("three-dot is a binary 2D system");
                }
                let mut want = three_dot_forbidden();
                let mut have = self.normalized_forbidden();
                want.sort_by(|a, b| a.values().cmp(b.values()));
                have.sort_by(|a, b| a.values().cmp(b.values()));
                if want != have {
                    return bad("forbidden set is not the odd-parity L-triples");
                }
            }
        }
        Ok(())
    }

    /// Every allowed symbol has an allowed successor and predecessor.
    fn is_essential_nearest_neighbour(&self) -> bool {
        let k = self.alphabet.size();
        let mut single = vec![true; k];
        let mut pair = vec![vec![true; k]; k];
        for p in self.normalized_forbidden() {
            match p.values() {
                [s] => single[*s as usize] = false,
                [s, t] if p.support().points()[1] == Point::new(1, 0) => pair[*s as usize][*t as usize] = false,
                [_, _] => {} // gapped pair of width > 2 cannot occur here
                _ => return false,
            }
        }
        let ok = |i: usize, j: usize| single[i] && single[j] && pair[i][j];
        let allowed: Vec<usize> = (0..k).filter(|&i| single[i]).collect();
        !allowed.is_empty()
            && allowed
                .iter()
                .all(|&i| allowed.iter().any(|&j| ok(i, j)) && allowed.iter().any(|&j| ok(j, i)))
    }
}

/// The full shift on `k` numeric symbols.
pub fn full_shift(dimension: u8, k: usize) -> Result<SftSpec> {
    SftSpec::new(dimension, Alphabet::numeric(k)?, Vec::new())?.with_certificate(Certificate::Full)
}

/// The golden mean shift: binary words without `11`.
pub fn golden_mean_1d() -> SftSpec {
    SftSpec::new(1, Alphabet::numeric(2).expect("binary"), vec![Pattern::word(0, &[1, 1])])
        .expect("valid golden mean")
}

/// ℤ² SFT whose rows are independently constrained by the 1D `base`.
pub fn row_lift(base: &SftSpec) -> Result<SftSpec> {
    if base.dimension() != 1 {
        return Err(Error::InvalidSft("row_lift expects a 1D base".into()));
    }
    let lifted = SftSpec::new(2, base.alphabet().clone(), base.forbidden().to_vec())?;
    match base.certificate() {
        Some(Certificate::Full) => lifted.with_certificate(Certificate::Full),
        _ if lifted.check_certificate(Certificate::RowLift).is_ok() => lifted.with_certificate(Certificate::RowLift),
        _ => Ok(lifted),
    }
}

fn three_dot_forbidden() -> Vec<Pattern> {
    let cells = [Point::new(0, 0), Point::new(1, 0), Point::new(0, 1)];
    let mut out = Vec::new();
    for bits in 0u16..8 {
        let vals = [bits & 1, (bits >> 1) & 1, (bits >> 2) & 1];
        if (vals[0] + vals[1] + vals[2]) % 2 == 1 {
            out.push(Pattern::from_cells(cells.iter().copied().zip(vals)).expect("distinct cells"));
        }
    }
    out
}

/// The three-dot system `x_u + x_{u+e₁} + x_{u+e₂} ≡ 0 (mod 2)`.
pub fn three_dot() -> SftSpec {
    SftSpec::new(2, Alphabet::numeric(2).expect("binary"), three_dot_forbidden())
        .and_then(|s| s.with_certificate(Certificate::ThreeDot))
        .expect("valid three-dot")
}

/// Translates of normalised forbidden patterns that fit in a support, grouped
/// by pattern.
pub(crate) fn contained_translates(forbidden: &[Pattern], support: &LatticeSet) -> Vec<Vec<Vec<(usize, Sym)>>> {
    let index: HashMap<Point, usize> = support.iter().enumerate().map(|(i, &p)| (p, i)).collect();
    forbidden
        .iter()
        .map(|f| {
            support
                .iter()
                .filter_map(|&t| {
                    f.cells()
                        .map(|(q, s)| index.get(&(t + q)).map(|&i| (i, s)))
                        .collect::<Option<Vec<_>>>()
                })
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn restrict_examples() {
        let p = Pattern::from_cells([(Point::new(0, 0), 1), (Point::new(1, 0), 0), (Point::new(0, 1), 1)]).unwrap();
        assert_eq!(p.restrict(p.support()).unwrap(), p);
        let single = p.restrict(&LatticeSet::singleton(Point::new(1, 0))).unwrap();
        assert_eq!(single.values(), &[0]);
        let q = Pattern::word(5, &[1, 1, 0]);
        assert_eq!(p.restrict(&LatticeSet::empty()).unwrap(), q.restrict(&LatticeSet::empty()).unwrap());
        assert_eq!(p.restrict(&LatticeSet::singleton(Point::new(9, 9))), Err(Error::NotASubset));
    }

    #[test]
    fn duplicate_cells_rejected() {
        assert!(Pattern::from_cells([(Point::new(0, 0), 1), (Point::new(0, 0), 0)]).is_err());
    }

    #[test]
    fn sft_validation() {
        let a = Alphabet::numeric(2).unwrap();
        assert!(SftSpec::new(3, a.clone(), vec![]).is_err());
        assert!(matches!(
            SftSpec::new(2, a.clone(), vec![Pattern::word(0, &[2])]),
            Err(Error::SymbolOutOfRange { symbol: 2, size: 2 })
        ));
        let off_row = Pattern::from_cells([(Point::new(0, 1), 1)]).unwrap();
        assert!(SftSpec::new(1, a, vec![off_row]).is_err());
        assert!(Alphabet::new(["a", "a"]).is_err());
        assert!(Alphabet::new(Vec::<String>::new()).is_err());
    }

    #[test]
    fn certificates_are_checked() {
        assert_eq!(three_dot().certificate(), Some(Certificate::ThreeDot));
        let gm = row_lift(&golden_mean_1d()).unwrap();
        assert_eq!(gm.certificate(), Some(Certificate::RowLift));
        assert_eq!(row_lift(&full_shift(1, 3).unwrap()).unwrap().certificate(), Some(Certificate::Full));
        // a dead end: 1 can never be followed
        let dead = SftSpec::new(
            2,
            Alphabet::numeric(2).unwrap(),
            vec![Pattern::word(0, &[1, 0]), Pattern::word(0, &[1, 1])],
        )
        .unwrap();
        assert!(dead.clone().with_certificate(Certificate::RowLift).is_err());
        assert!(dead.with_certificate(Certificate::Full).is_err());
        assert!(gm.with_certificate(Certificate::ThreeDot).is_err());
    }

    #[test]
    fn row_base_projects_rows() {
        let gm2 = row_lift(&golden_mean_1d()).unwrap();
        assert_eq!(gm2.row_base().unwrap().forbidden(), golden_mean_1d().forbidden());
        assert!(three_dot().row_base().is_none());
    }
}

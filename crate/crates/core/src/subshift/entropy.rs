use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;

use super::{count_locally_admissible, is_locally_admissible, Pattern, SftSpec, Sym};
use crate::lattice::{IntRect, LatticeSet};
use crate::{log2_biguint, Error, Result};

/// Largest higher-block state space built for 1D entropy.
const MAX_BLOCK_STATES: usize = 1 << 16;

/// Perron eigendata of an irreducible nonnegative matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct PerronData {
    pub root: f64,
    /// Positive right eigenvector, max entry 1.
    pub right: Vec<f64>,
    /// Positive left eigenvector, max entry 1.
    pub left: Vec<f64>,
}

/// Sparse nonnegative matrix, row-wise.
struct Sparse {
    rows: Vec<Vec<(usize, f64)>>,
}

impl Sparse {
    fn from_dense(a: &[Vec<f64>]) -> Result<Self> {
        let n = a.len();
        let mut rows = Vec::with_capacity(n);
        for row in a {
            if row.len() != n {
                return Err(Error::Unsupported("matrix must be square".into()));
            }
            if row.iter().any(|x| !x.is_finite() || *x < 0.0) {
                return Err(Error::Unsupported("matrix entries must be finite and nonnegative".into()));
            }
            rows.push(row.iter().enumerate().filter(|(_, &x)| x > 0.0).map(|(j, &x)| (j, x)).collect());
        }
        Ok(Sparse { rows })
    }

    fn n(&self) -> usize {
        self.rows.len()
    }

    fn transpose(&self) -> Sparse {
        let mut rows = vec![Vec::new(); self.n()];
        for (i, r) in self.rows.iter().enumerate() {
            for &(j, x) in r {
                rows[j].push((i, x));
            }
        }
        Sparse { rows }
    }

    fn restrict(&self, nodes: &[usize]) -> Sparse {
        let mut local = vec![usize::MAX; self.n()];
        for (k, &v) in nodes.iter().enumerate() {
            local[v] = k;
        }
        let rows = nodes
            .iter()
            .map(|&v| {
                self.rows[v]
                    .iter()
                    .filter(|(j, _)| local[*j] != usize::MAX)
                    .map(|&(j, x)| (local[j], x))
                    .collect()
            })
            .collect();
        Sparse { rows }
    }

    /// Strongly connected components that carry a cycle.
    fn cyclic_components(&self) -> Vec<Vec<usize>> {
        let mut g = DiGraph::<(), ()>::new();
        let nodes: Vec<_> = (0..self.n()).map(|_| g.add_node(())).collect();
        for (i, r) in self.rows.iter().enumerate() {
            for &(j, _) in r {
                g.add_edge(nodes[i], nodes[j], ());
            }
        }
        tarjan_scc(&g)
            .into_iter()
            .map(|c| {
                let mut v: Vec<usize> = c.into_iter().map(|x| x.index()).collect();
                v.sort_unstable();
                v
            })
            .filter(|c| c.len() > 1 || self.rows[c[0]].iter().any(|&(j, _)| j == c[0]))
            .collect()
    }

    /// Power iteration on `A + I` (primitive when `A` is irreducible) with
    /// Collatz–Wielandt bounds; returns `(ρ(A), eigenvector)`.
    fn irreducible_root(&self) -> (f64, Vec<f64>) {
        let n = self.n();
        let mut x = vec![1.0; n];
        let mut y = vec![0.0; n];
        let mut estimate = 0.0;
        for _ in 0..200_000 {
            for i in 0..n {
                y[i] = x[i] + self.rows[i].iter().map(|&(j, a)| a * x[j]).sum::<f64>();
            }
            let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
            for i in 0..n {
                let r = y[i] / x[i];
                lo = lo.min(r);
                hi = hi.max(r);
            }
            estimate = 0.5 * (lo + hi);
            let top = y.iter().fold(0.0f64, |m, &v| m.max(v));
            for i in 0..n {
                x[i] = y[i] / top;
            }
            if hi - lo <= 1e-14 * hi {
                break;
            }
        }
        (estimate - 1.0, x)
    }
}

/// Spectral radius of a nonnegative square matrix.
pub fn perron_root(matrix: &[Vec<f64>]) -> Result<f64> {
    Ok(spectral_radius(&Sparse::from_dense(matrix)?))
}

fn spectral_radius(a: &Sparse) -> f64 {
    a.cyclic_components()
        .iter()
        .map(|c| a.restrict(c).irreducible_root().0)
        .fold(0.0, f64::max)
}

/// Perron root and eigenvectors; the matrix must be irreducible.
pub fn perron_data(matrix: &[Vec<f64>]) -> Result<PerronData> {
    let a = Sparse::from_dense(matrix)?;
    let comps = a.cyclic_components();
    if a.n() == 0 || comps.len() != 1 || comps[0].len() != a.n() {
        return Err(Error::Unsupported("Perron vectors need an irreducible matrix".into()));
    }
    let (root, right) = a.irreducible_root();
    let (_, left) = a.transpose().irreducible_root();
    Ok(PerronData { root, right, left })
}

/// Adjacency matrix of the higher-block presentation: vertices are admissible
/// words of length `b`, edges the admissible words of length `b + 1`.
fn block_graph(sft: &SftSpec) -> Result<Vec<Vec<f64>>> {
    if sft.dimension() != 1 {
        return Err(Error::Unsupported("transfer-matrix entropy needs a 1D subshift".into()));
    }
    let k = sft.alphabet_size();
    let b = sft.max_forbidden_width().saturating_sub(1).max(1) as u32;
    match (k as u128).checked_pow(b) {
        Some(s) if s <= MAX_BLOCK_STATES as u128 => {}
        _ => {
            return Err(Error::Guard(format!(
                "higher-block presentation needs {k}^{b} states (cap {MAX_BLOCK_STATES})"
            )))
        }
    }
    let words: Vec<Vec<Sym>> = super::enumerate_locally_admissible(sft, &LatticeSet::interval(0, b as i64 - 1))?
        .map(|p| p.values().to_vec())
        .collect();
    let index: std::collections::HashMap<&[Sym], usize> =
        words.iter().enumerate().map(|(i, w)| (w.as_slice(), i)).collect();
    let n = words.len();
    let mut adjacency = vec![vec![0.0; n]; n];
    for (i, w) in words.iter().enumerate() {
        for a in 0..k as Sym {
            let mut ext = w.clone();
            ext.push(a);
            if let Some(&j) = index.get(&ext[1..]) {
                if is_locally_admissible(sft, &Pattern::word(0, &ext))? {
                    adjacency[i][j] = 1.0;
                }
            }
        }
    }
    Ok(adjacency)
}

/// Topological entropy of a 1D SFT in bits per symbol.
pub fn transfer_matrix_entropy_1d(sft: &SftSpec) -> Result<f64> {
    let adjacency = block_graph(sft)?;
    let root = spectral_radius(&Sparse::from_dense(&adjacency)?);
    if root <= 0.0 {
        return Err(Error::EmptyLanguage);
    }
    Ok(root.log2().max(0.0))
}

/// `(N, log₂ count([0,N)²) / N²)` for `N = 1..=nmax`.
pub fn box_entropy_estimate(sft: &SftSpec, nmax: u64) -> Result<Vec<(u64, f64)>> {
    if sft.dimension() != 2 {
        return Err(Error::Unsupported("box entropy is defined for 2D subshifts".into()));
    }
    (1..=nmax)
        .map(|n| {
            let support = LatticeSet::from_rect(&IntRect::sized(n, n)?);
            let c = count_locally_admissible(sft, &support)?;
            Ok((n, log2_biguint(&c) / (n * n) as f64))
        })
        .collect()
}

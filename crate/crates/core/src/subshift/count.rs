use std::collections::HashMap;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};

use num_bigint::BigUint;
use num_traits::{One, Zero};

use super::{contained_translates, Pattern, SftSpec, Sym};
use crate::lattice::{LatticeSet, Point};
use crate::par::{self, Parallelism};
use crate::{Error, Result};

/// Which counting algorithm to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CountMethod {
    /// Split the support into independent constraint components and count
    /// each with the transfer operator, backtracking when its state space is
    /// over the cap.
    #[default]
    Auto,
    /// Transfer operator over the bounding box of the whole support.
    Transfer,
    /// Plain backtracking over the whole support.
    Backtrack,
}

/// Resource guards and execution settings for counting.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CountOptions {
    /// Largest support (or constraint component) searched by backtracking.
    pub max_backtrack_cells: usize,
    /// Largest column-state space of the transfer operator.
    pub max_transfer_states: usize,
    /// Backtracking node budget.
    pub max_backtrack_nodes: u64,
    pub method: CountMethod,
    pub parallelism: Parallelism,
}

impl Default for CountOptions {
    fn default() -> Self {
        CountOptions {
            max_backtrack_cells: 64,
            max_transfer_states: 1 << 20,
            max_backtrack_nodes: 1 << 32,
            method: CountMethod::Auto,
            parallelism: Parallelism::default(),
        }
    }
}

impl CountOptions {
    pub fn sequential() -> Self {
        CountOptions { parallelism: Parallelism::Sequential, ..Self::default() }
    }

    pub fn with_method(self, method: CountMethod) -> Self {
        CountOptions { method, ..self }
    }
}

/// Number of locally admissible patterns on `support` with default options.
pub fn count_locally_admissible(sft: &SftSpec, support: &LatticeSet) -> Result<BigUint> {
    count_with(sft, support, &CountOptions::default())
}

pub fn count_with(sft: &SftSpec, support: &LatticeSet, opts: &CountOptions) -> Result<BigUint> {
    let forbidden = sft.normalized_forbidden();
    let k = sft.alphabet_size();
    match opts.method {
        CountMethod::Transfer => transfer_count(&forbidden, k, support, opts),
        CountMethod::Backtrack => {
            if support.len() > opts.max_backtrack_cells {
                return Err(guard_cells(support.len(), opts));
            }
            let translates = contained_translates(&forbidden, support);
            let constraints: Vec<Vec<(usize, Sym)>> = translates.into_iter().flatten().collect();
            backtrack_count(support.len(), k, &constraints, opts)
        }
        CountMethod::Auto => auto_count(&forbidden, k, support, opts),
    }
}

fn guard_cells(n: usize, opts: &CountOptions) -> Error {
    Error::Guard(format!(
        "backtracking over {n} cells exceeds the cap of {} cells",
        opts.max_backtrack_cells
    ))
}

fn auto_count(forbidden: &[Pattern], k: usize, support: &LatticeSet, opts: &CountOptions) -> Result<BigUint> {
    let translates = contained_translates(forbidden, support);
    let constraints: Vec<Vec<(usize, Sym)>> = translates.into_iter().flatten().collect();

    // union-find over cells linked by a common translate
    let n = support.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let mut constrained = vec![false; n];
    for c in &constraints {
        let r0 = find(&mut parent, c[0].0);
        constrained[c[0].0] = true;
        for &(i, _) in &c[1..] {
            constrained[i] = true;
            let r = find(&mut parent, i);
            parent[r] = r0;
        }
    }
    let mut groups: HashMap<usize, Vec<usize>> = HashMap::new();
    for i in (0..n).filter(|&i| constrained[i]) {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().push(i);
    }
    let mut components: Vec<Vec<usize>> = groups.into_values().collect();
    components.sort_unstable_by_key(|c| c[0]);

    let free = (0..n).filter(|&i| !constrained[i]).count() as u32;
    let pts = support.points();

    // constraints re-indexed to component-local cells (components list
    // increasing global indices, so canonical order is preserved)
    let mut owner = vec![0; n];
    let mut local_index = vec![0; n];
    for (ci, comp) in components.iter().enumerate() {
        for (local, &g) in comp.iter().enumerate() {
            owner[g] = ci;
            local_index[g] = local;
        }
    }
    let mut per_component: Vec<Vec<Vec<(usize, Sym)>>> = vec![Vec::new(); components.len()];
    for c in constraints {
        let ci = owner[c[0].0];
        per_component[ci].push(c.into_iter().map(|(i, s)| (local_index[i], s)).collect());
    }

    // A translate inside a component's cells is one of its constraints, so
    // the component can be counted on its own cells with the transfer
    // operator; backtracking is the fallback when the state space is too big.
    let mut total = BigUint::from(k).pow(free);
    for (comp, cons) in components.iter().zip(&per_component) {
        let cells = LatticeSet::from_points(comp.iter().map(|&i| pts[i]).collect());
        let part = match transfer_count(forbidden, k, &cells, opts) {
            Err(Error::Guard(msg)) if comp.len() > opts.max_backtrack_cells => {
                return Err(Error::Guard(format!(
                    "{msg}; the constraint component has {} cells, above the backtracking cap of {}",
                    comp.len(),
                    opts.max_backtrack_cells
                )))
            }
            Err(Error::Guard(_)) => backtrack_count(comp.len(), k, cons, opts)?,
            other => other?,
        };
        if part.is_zero() {
            return Ok(BigUint::zero());
        }
        total *= part;
    }
    Ok(total)
}

#[derive(Clone, Copy)]
enum Scan {
    ColumnMajor,
    RowMajor,
}

/// Transfer-operator count: the cells of the support's bounding box are
/// visited in scan order and the state is the content of the last `L` visited
/// cells, where `L` is the longest scan-order span of a forbidden pattern.
/// Box cells outside the support hold a fixed dummy symbol and take part in
/// no constraint.
fn transfer_count(forbidden: &[Pattern], k: usize, support: &LatticeSet, opts: &CountOptions) -> Result<BigUint> {
    let Some(rect) = support.bounding_box() else {
        return Ok(BigUint::one());
    };
    let full_box = support.len() as u64 == rect.cardinality();
    let (w, h) = (rect.width() as i64, rect.height() as i64);
    let fits: Vec<&Pattern> = forbidden
        .iter()
        .filter(|p| {
            let bb = p.support().bounding_box().expect("nonempty");
            (bb.width() as i64) <= w && (bb.height() as i64) <= h
        })
        .collect();

    let delta = |scan: Scan, q: Point| -> i64 {
        match scan {
            Scan::ColumnMajor => q.m * h + q.n,
            Scan::RowMajor => q.n * w + q.m,
        }
    };
    let span = |scan: Scan| -> i64 {
        fits.iter()
            .map(|p| {
                let ds: Vec<i64> = p.support().iter().map(|&q| delta(scan, q)).collect();
                ds.iter().max().unwrap() - ds.iter().min().unwrap()
            })
            .max()
            .unwrap_or(0)
    };
    let (col_span, row_span) = (span(Scan::ColumnMajor), span(Scan::RowMajor));
    let (scan, lookback) = if row_span < col_span {
        (Scan::RowMajor, row_span as usize)
    } else {
        (Scan::ColumnMajor, col_span as usize)
    };

    let states = (k as u128).checked_pow(lookback as u32).filter(|&s| s <= opts.max_transfer_states as u128);
    let Some(states) = states else {
        return Err(Error::Guard(format!(
            "transfer operator needs {k}^{lookback} states (cap {})",
            opts.max_transfer_states
        )));
    };
    let states = states as usize;

    // per pattern: (offset of its last cell, cells as (lookback, symbol))
    struct Shape {
        last: Point,
        min: Point,
        max: Point,
        offsets: Vec<Point>,
        cells: Vec<(usize, Sym)>,
    }
    let shapes: Vec<Shape> = fits
        .iter()
        .map(|p| {
            let last = *p.support().iter().max_by_key(|&&q| delta(scan, q)).unwrap();
            let bb = p.support().bounding_box().unwrap();
            Shape {
                last,
                min: Point::new(bb.a(), bb.c()),
                max: Point::new(bb.b(), bb.d()),
                offsets: p.support().points().to_vec(),
                cells: p.cells().map(|(q, s)| ((delta(scan, last) - delta(scan, q)) as usize, s)).collect(),
            }
        })
        .collect();

    let cells: Vec<Point> = match scan {
        Scan::ColumnMajor => rect.points().collect(),
        Scan::RowMajor => (rect.c()..=rect.d())
            .flat_map(|n| (rect.a()..=rect.b()).map(move |m| Point::new(m, n)))
            .collect(),
    };

    // active patterns per position, deduplicated into signatures; `None`
    // marks a box cell outside the support
    let mut signatures: HashMap<Option<Vec<usize>>, usize> = HashMap::new();
    let mut sig_list: Vec<Option<Vec<usize>>> = Vec::new();
    let mut sig_of = Vec::with_capacity(cells.len());
    for &p in &cells {
        let key = (full_box || support.contains(p)).then(|| {
            shapes
                .iter()
                .enumerate()
                .filter(|(_, s)| {
                    let t = p - s.last;
                    rect.contains(t + s.min)
                        && rect.contains(t + s.max)
                        && (full_box || s.offsets.iter().all(|&q| support.contains(t + q)))
                })
                .map(|(i, _)| i)
                .collect::<Vec<usize>>()
        });
        let next = sig_list.len();
        let id = *signatures.entry(key.clone()).or_insert_with(|| {
            sig_list.push(key);
            next
        });
        sig_of.push(id);
    }

    let kk = k as u64;
    let digit = |s: usize, j: usize| -> Sym { ((s as u64 / kk.pow(j as u32)) % kk) as Sym };
    // allowed[(s * k) + a]: placing symbol a on top of state s completes no
    // forbidden translate
    let tables: Vec<Vec<bool>> = par::map_collect(opts.parallelism, sig_list, |active| {
        let Some(active) = active else {
            return (0..states * k).map(|i| i % k == 0).collect();
        };
        let mut table = vec![true; states * k];
        if active.is_empty() {
            return table;
        }
        for s in 0..states {
            for a in 0..k {
                let hit = active.iter().any(|&pi| {
                    shapes[pi].cells.iter().all(|&(back, sym)| {
                        let val = if back == 0 { a as Sym } else { digit(s, back - 1) };
                        val == sym
                    })
                });
                table[s * k + a] = !hit;
            }
        }
        table
    });

    if lookback == 0 {
        let mut total = BigUint::one();
        for &sig in &sig_of {
            let allowed = tables[sig].iter().filter(|&&b| b).count();
            if allowed == 0 {
                return Ok(BigUint::zero());
            }
            total *= allowed;
        }
        return Ok(total);
    }

    let top = states / k; // k^(L-1)
    let mut cur = vec![BigUint::zero(); states];
    cur[0] = BigUint::one();
    let mut next = vec![BigUint::zero(); states];
    let par_mode = if states >= 256 { opts.parallelism } else { Parallelism::Sequential };
    for &sig in &sig_of {
        let table = &tables[sig];
        let prev = &cur;
        par::fill_indexed(par_mode, &mut next, |t| {
            let a = t % k;
            let low = t / k;
            let mut acc = BigUint::zero();
            for j in 0..k {
                let s = low + j * top;
                if table[s * k + a] && !prev[s].is_zero() {
                    acc += &prev[s];
                }
            }
            acc
        });
        std::mem::swap(&mut cur, &mut next);
    }
    Ok(cur.iter().sum())
}

/// Constraint lists keyed by the canonical index of their last cell.
fn by_last_cell(n: usize, constraints: &[Vec<(usize, Sym)>]) -> Vec<Vec<Vec<(usize, Sym)>>> {
    let mut checks = vec![Vec::new(); n];
    for c in constraints {
        let last = c.iter().map(|x| x.0).max().expect("nonempty");
        checks[last].push(c.clone());
    }
    checks
}

fn violates(checks: &[Vec<(usize, Sym)>], assign: &[Sym]) -> bool {
    checks.iter().any(|c| c.iter().all(|&(i, s)| assign[i] == s))
}

struct Search<'a> {
    k: usize,
    checks: &'a [Vec<Vec<(usize, Sym)>>],
    nodes: &'a AtomicU64,
    budget: u64,
    aborted: &'a AtomicBool,
}

impl Search<'_> {
    fn count_from(&self, assign: &mut Vec<Sym>, n: usize) -> BigUint {
        let depth = assign.len();
        if depth == n {
            return BigUint::one();
        }
        if self.nodes.fetch_add(1, Ordering::Relaxed) >= self.budget {
            self.aborted.store(true, Ordering::Relaxed);
            return BigUint::zero();
        }
        let mut total = BigUint::zero();
        for a in 0..self.k {
            assign.push(a as Sym);
            if !violates(&self.checks[depth], assign) {
                total += self.count_from(assign, n);
            }
            assign.pop();
            if self.aborted.load(Ordering::Relaxed) {
                break;
            }
        }
        total
    }
}

/// Depth-first count of assignments to `n` cells (in canonical order) that
/// violate no constraint; subtrees below a short prefix run in parallel.
fn backtrack_count(n: usize, k: usize, constraints: &[Vec<(usize, Sym)>], opts: &CountOptions) -> Result<BigUint> {
    let checks = by_last_cell(n, constraints);
    let nodes = AtomicU64::new(0);
    let aborted = AtomicBool::new(false);
    let search = Search { k, checks: &checks, nodes: &nodes, budget: opts.max_backtrack_nodes, aborted: &aborted };

    // enumerate valid prefixes breadth-first up to a modest fan-out
    let want = if opts.parallelism.is_parallel() { 8 * par::worker_count() } else { 1 };
    let mut prefixes: Vec<Vec<Sym>> = vec![Vec::new()];
    while prefixes.len() < want && prefixes.first().is_some_and(|p| p.len() < n) {
        let depth = prefixes[0].len();
        let mut grown = Vec::with_capacity(prefixes.len() * k);
        for p in prefixes {
            for a in 0..k {
                let mut q = p.clone();
                q.push(a as Sym);
                if !violates(&checks[depth], &q) {
                    grown.push(q);
                }
            }
        }
        prefixes = grown;
        if prefixes.is_empty() {
            return Ok(BigUint::zero());
        }
    }
    let parts = par::map_collect(opts.parallelism, prefixes, |mut p| search.count_from(&mut p, n));
    if aborted.load(Ordering::Relaxed) {
        return Err(Error::Guard(format!(
            "backtracking exceeded the node budget of {}",
            opts.max_backtrack_nodes
        )));
    }
    Ok(parts.into_iter().sum())
}

/// Whether `p` contains no translate of a forbidden pattern inside its support.
pub fn is_locally_admissible(sft: &SftSpec, p: &Pattern) -> Result<bool> {
    p.check_alphabet(sft.alphabet_size())?;
    let forbidden = sft.normalized_forbidden();
    let translates = contained_translates(&forbidden, p.support());
    Ok(!translates.iter().flatten().any(|c| c.iter().all(|&(i, s)| p.values()[i] == s)))
}

/// Lazily yields every locally admissible pattern on a support, in
/// lexicographic order of the symbol vector (cells in canonical order,
/// symbols in alphabet order).
pub struct AdmissibleIter {
    support: LatticeSet,
    k: usize,
    checks: Vec<Vec<Vec<(usize, Sym)>>>,
    assign: Vec<Sym>,
    started: bool,
    done: bool,
}

impl AdmissibleIter {
    fn consistent_top(&self) -> bool {
        let d = self.assign.len() - 1;
        !violates(&self.checks[d], &self.assign)
    }
}

impl Iterator for AdmissibleIter {
    type Item = Pattern;

    fn next(&mut self) -> Option<Pattern> {
        if self.done {
            return None;
        }
        let n = self.support.len();
        if n == 0 {
            self.done = true;
            return Some(Pattern::empty());
        }
        // true: bump the top symbol; false: descend with symbol 0
        let mut bump = self.started;
        self.started = true;
        loop {
            if bump {
                loop {
                    match self.assign.last_mut() {
                        None => {
                            self.done = true;
                            return None;
                        }
                        Some(top) => {
                            *top += 1;
                            if (*top as usize) < self.k {
                                break;
                            }
                            self.assign.pop();
                        }
                    }
                }
            } else {
                self.assign.push(0);
            }
            if self.consistent_top() {
                if self.assign.len() == n {
                    let p = Pattern::new(self.support.clone(), self.assign.clone()).expect("aligned");
                    return Some(p);
                }
                bump = false;
            } else {
                bump = true;
            }
        }
    }
}

pub fn enumerate_locally_admissible(sft: &SftSpec, support: &LatticeSet) -> Result<AdmissibleIter> {
    enumerate_with(sft, support, &CountOptions::default())
}

pub(crate) fn enumerate_with(sft: &SftSpec, support: &LatticeSet, opts: &CountOptions) -> Result<AdmissibleIter> {
    if support.len() > opts.max_backtrack_cells {
        return Err(guard_cells(support.len(), opts));
    }
    let forbidden = sft.normalized_forbidden();
    let constraints: Vec<Vec<(usize, Sym)>> =
        contained_translates(&forbidden, support).into_iter().flatten().collect();
    Ok(AdmissibleIter {
        support: support.clone(),
        k: sft.alphabet_size(),
        checks: by_last_cell(support.len(), &constraints),
        assign: Vec::with_capacity(support.len()),
        started: false,
        done: false,
    })
}

//! Independent oracles shared by the integration and acceptance suites.
//!
//! Nothing here calls the library's counting, window or metric code; the
//! oracles work from first principles (brute force over all assignments,
//! distances from the metric definition).
#![allow(dead_code)]

use rand::Rng;
use shiftdim_core::lattice::{IntRect, Point};
use shiftdim_core::subshift::SftSpec;

/// Every forbidden pattern as a list of `(offset, symbol)` cells.
pub fn forbidden_cells(sft: &SftSpec) -> Vec<Vec<((i64, i64), u16)>> {
    sft.forbidden()
        .iter()
        .map(|p| p.cells().map(|(q, s)| ((q.m, q.n), s)).collect())
        .collect()
}

/// Whether an assignment on `cells` avoids every forbidden translate that
/// fits entirely inside `cells`.
pub fn admissible(cells: &[(i64, i64)], values: &[u16], forbidden: &[Vec<((i64, i64), u16)>]) -> bool {
    let at = |p: (i64, i64)| cells.iter().position(|&c| c == p).map(|i| values[i]);
    for f in forbidden {
        let (o, _) = f[0];
        for &anchor in cells {
            let shift = (anchor.0 - o.0, anchor.1 - o.1);
            let mut all = true;
            let mut hit = true;
            for &((m, n), s) in f {
                match at((m + shift.0, n + shift.1)) {
                    None => {
                        all = false;
                        break;
                    }
                    Some(v) if v != s => hit = false,
                    Some(_) => {}
                }
            }
            if all && hit {
                return false;
            }
        }
    }
    true
}

/// Brute-force count of locally admissible patterns: tries all `k^|cells|`
/// assignments.
pub fn brute_count(sft: &SftSpec, cells: &[(i64, i64)]) -> u64 {
    let k = sft.alphabet_size() as u64;
    let f = forbidden_cells(sft);
    let total = k.pow(cells.len() as u32);
    let mut values = vec![0u16; cells.len()];
    let mut count = 0;
    for code in 0..total {
        let mut c = code;
        for v in values.iter_mut() {
            *v = (c % k) as u16;
            c /= k;
        }
        if admissible(cells, &values, &f) {
            count += 1;
        }
    }
    count
}

/// Three-dot count on an `n x n` box via bit-parallel parity checks.
pub fn three_dot_brute(n: usize) -> u64 {
    let cells = n * n;
    let bit = |m: usize, k: usize| m * n + k;
    let mut count = 0;
    for mask in 0u64..(1u64 << cells) {
        let v = |m: usize, k: usize| (mask >> bit(m, k)) & 1;
        let ok = (0..n - 1).all(|m| (0..n - 1).all(|k| (v(m, k) + v(m + 1, k) + v(m, k + 1)) % 2 == 0));
        if ok {
            count += 1;
        }
    }
    count
}

/// Minimum number of sets of `d_N`-diameter `< α^{-(M-1)}` covering the
/// admissible patterns on `universe`, with the metric evaluated from its
/// definition: `d_N(x, y) = max_{n<N} α^{-min{|u - n·step|∞ : x_u ≠ y_u}}`.
///
/// Returns `(greedy clique cover size, greedy separated set size)`. Equal
/// sizes certify the minimum. Binary alphabets only; `universe.len() <= 16`.
pub fn ball_window_oracle(
    sft: &SftSpec,
    universe: &[(i64, i64)],
    step: (i64, i64),
    one_sided: bool,
    m: i64,
    n: i64,
) -> (usize, usize) {
    assert_eq!(sft.alphabet_size(), 2);
    assert!(universe.len() <= 16);
    let f = forbidden_cells(sft);
    let size = universe.len();
    let pats: Vec<u32> = (0u32..1 << size)
        .filter(|&mask| {
            let values: Vec<u16> = (0..size).map(|i| ((mask >> i) & 1) as u16).collect();
            admissible(universe, &values, &f)
        })
        .collect();
    // close[xor] <=> every disagreement site is at distance >= M from all
    // orbit centres, i.e. d_N < α^{-(M-1)}
    let norm = |u: (i64, i64), c: (i64, i64)| {
        let (dm, dn) = (u.0 - c.0, u.1 - c.1);
        if one_sided {
            // one-sided: sites left of the centre are invisible to that iterate
            if dm < 0 { i64::MAX } else { dm }
        } else {
            dm.abs().max(dn.abs())
        }
    };
    let close: Vec<bool> = (0u32..1 << size)
        .map(|x| {
            (0..n).all(|k| {
                let c = (k * step.0, k * step.1);
                (0..size).filter(|i| (x >> i) & 1 == 1).all(|i| norm(universe[i], c) >= m)
            })
        })
        .collect();
    let mut cliques: Vec<Vec<u32>> = Vec::new();
    for &p in &pats {
        match cliques.iter_mut().find(|cl| cl.iter().all(|&q| close[(p ^ q) as usize])) {
            Some(cl) => cl.push(p),
            None => cliques.push(vec![p]),
        }
    }
    let mut separated: Vec<u32> = Vec::new();
    for &p in &pats {
        if separated.iter().all(|&q| !close[(p ^ q) as usize]) {
            separated.push(p);
        }
    }
    (cliques.len(), separated.len())
}

/// A random totally ordered family: widths and heights are drawn
/// independently and sorted, so the i-th rectangle is `≤` the j-th for
/// `i ≤ j`; the list is then shuffled.
pub fn random_chain<R: Rng>(rng: &mut R, len: usize, span: i64, max_side: i64) -> Vec<IntRect> {
    let mut ws: Vec<i64> = (0..len).map(|_| rng.gen_range(0..max_side)).collect();
    let mut hs: Vec<i64> = (0..len).map(|_| rng.gen_range(0..max_side)).collect();
    ws.sort_unstable();
    hs.sort_unstable();
    let mut rects: Vec<IntRect> = ws
        .into_iter()
        .zip(hs)
        .map(|(w, h)| {
            let a = rng.gen_range(-span..=span);
            let c = rng.gen_range(-span..=span);
            IntRect::new(a, a + w, c, c + h).unwrap()
        })
        .collect();
    for i in (1..rects.len()).rev() {
        rects.swap(i, rng.gen_range(0..=i));
    }
    rects
}

/// Number of lattice points in a union of rectangles (bitmap over the
/// bounding box).
pub fn union_area(rects: &[IntRect]) -> u64 {
    if rects.is_empty() {
        return 0;
    }
    let a = rects.iter().map(|r| r.a()).min().unwrap();
    let b = rects.iter().map(|r| r.b()).max().unwrap();
    let c = rects.iter().map(|r| r.c()).min().unwrap();
    let d = rects.iter().map(|r| r.d()).max().unwrap();
    let w = (b - a + 1) as usize;
    let mut grid = vec![false; w * (d - c + 1) as usize];
    for r in rects {
        for m in r.a()..=r.b() {
            for n in r.c()..=r.d() {
                grid[(n - c) as usize * w + (m - a) as usize] = true;
            }
        }
    }
    grid.iter().filter(|&&x| x).count() as u64
}

/// A random joint law on an `nx × ny` grid with some exact zeros.
pub fn random_joint<R: Rng>(rng: &mut R, nx: usize, ny: usize) -> Vec<Vec<f64>> {
    let mut m: Vec<Vec<f64>> = (0..nx)
        .map(|_| (0..ny).map(|_| if rng.gen_bool(0.2) { 0.0 } else { rng.gen::<f64>() }).collect())
        .collect();
    if m.iter().flatten().all(|&x| x == 0.0) {
        m[0][0] = 1.0;
    }
    let total: f64 = m.iter().flatten().sum();
    m.iter_mut().flatten().for_each(|x| *x /= total);
    m
}

/// All points of `[-r, r]²` in a fixed order.
pub fn square_points(r: i64) -> Vec<Point> {
    (-r..=r).flat_map(|m| (-r..=r).map(move |n| Point::new(m, n))).collect()
}

/// Golden ratio.
pub fn phi() -> f64 {
    (1.0 + 5f64.sqrt()) / 2.0
}

/// Shannon entropy in bits, straight from the definition.
pub fn entropy_oracle(p: &[f64]) -> f64 {
    -p.iter().filter(|&&x| x > 0.0).map(|x| x * x.log2()).sum::<f64>()
}

/// Joint law of `(X, Y)` on `B^N` where each coordinate of `Y` is resampled
/// with probability `q`.
pub fn noisy_copy(px: &[f64], b: usize, n: u32, q: f64) -> (Vec<Vec<f64>>, f64) {
    let size = b.pow(n);
    let digits = |mut v: usize| -> Vec<usize> {
        (0..n)
            .map(|_| {
                let d = v % b;
                v /= b;
                d
            })
            .collect()
    };
    let mut joint = vec![vec![0.0; size]; size];
    let mut expected_disagreements = 0.0;
    for x in 0..size {
        let xd = digits(x);
        for y in 0..size {
            let yd = digits(y);
            let mut w = px[x];
            for (a, c) in xd.iter().zip(&yd) {
                // keep with 1 - q, else uniform over B
                w *= if a == c { 1.0 - q + q / b as f64 } else { q / b as f64 };
            }
            joint[x][y] = w;
            expected_disagreements += w * xd.iter().zip(&yd).filter(|(a, c)| a != c).count() as f64;
        }
    }
    (joint, expected_disagreements)
}

//! One PASS/FAIL line per acceptance criterion; exits nonzero if any fails.
//!
//! Runs as a plain binary (no libtest harness) so the lines always reach the
//! test log.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::collections::HashSet;
use std::process::ExitCode;
use std::time::Instant;

use common::{ball_window_oracle, entropy_oracle, noisy_copy, phi, random_chain, random_joint, three_dot_brute, union_area};
use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use shiftdim_core::dimension::{
    covering_number, hausdorff_lower_at_scale, hausdorff_upper_at_scale, mhdim_bounds, mmdim_estimate,
};
use shiftdim_core::info::{
    binary_entropy, default_rd_schedule, ks_entropy, mi_lower_bound_lemma, mutual_information, parry_measure,
    rd_curve, rd_point_at_distortion, rdim_bounds, JointDistribution, MeasureSpec, RdProblem,
};
use shiftdim_core::lattice::{greedy_disjoint_subcover, lambda_count, lambda_count_formula, lambda_density, lambda_set};
use shiftdim_core::log2_biguint;
use shiftdim_core::metric::{Action, Epsilon, MetricSpec};
use shiftdim_core::subshift::{
    count_locally_admissible, full_shift, golden_mean_1d, row_lift, three_dot, transfer_matrix_entropy_1d,
};

type Outcome = Result<String, String>;

/// Turns a failed condition into an error carrying its description.
macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn linf(alpha: f64) -> MetricSpec {
    MetricSpec::linf(alpha).unwrap()
}

fn c1_full_shift() -> Outcome {
    let sft = full_shift(2, 2).unwrap();
    let ms = [2u64, 3, 4, 5, 6];
    for &m in &ms {
        let eps = Epsilon::at_depth(&linf(2.0), m);
        for n in [16 * m, 32 * m] {
            // window [-(M-1), N+M-2] x [-(M-1), M-1]
            let cells = (2 * m - 1) * (n + 2 * m - 2);
            let c = covering_number(&sft, &linf(2.0), &Action::default(), n, &eps).unwrap();
            ensure!(c == BigUint::from(1u8) << cells, "count at M={m}, N={n} is not 2^{cells}");
        }
    }
    let est = mmdim_estimate(&sft, &linf(2.0), &Action::default(), &ms, 16).unwrap();
    for (&(m, _), &v) in est.schedule.iter().zip(&est.sequence) {
        let exact = (2 * m - 1) as f64 / (m - 1) as f64;
        ensure!((v - exact).abs() < 1e-12, "v_{m} = {v}, expected {exact}");
    }
    ensure!((est.value - 2.0).abs() < 1e-6, "alpha=2 extrapolation {}", est.value);
    let est4 = mmdim_estimate(&sft, &linf(4.0), &Action::default(), &ms, 16).unwrap();
    ensure!((est4.value - 1.0).abs() < 1e-6, "alpha=4 extrapolation {}", est4.value);
    Ok(format!("v_M = (2M-1)/(M-1) exact for M=2..6; v_inf = {:.9} (alpha=2), {:.9} (alpha=4)", est.value, est4.value))
}

fn c2_golden_row_lift() -> Outcome {
    let target = 2.0 * phi().log2();
    let base = golden_mean_1d();
    let sft = row_lift(&base).unwrap();
    let ms = [2u64, 3, 4, 5, 6];
    let h = transfer_matrix_entropy_1d(&base).unwrap();
    ensure!((h - phi().log2()).abs() < 1e-5, "transfer-matrix h = {h}");
    let mm = mmdim_estimate(&sft, &linf(2.0), &Action::default(), &ms, 16).unwrap();
    let (_, up) = mhdim_bounds(&sft, None, &linf(2.0), &Action::default(), &ms, 16).unwrap();
    ensure!((mm.value - target).abs() <= 0.01, "mmdim {} vs {target}", mm.value);
    ensure!((up.value - target).abs() <= 0.01, "mhdim upper {} vs {target}", up.value);
    Ok(format!("h = {h:.9}; mmdim = {:.6}, mhdim upper = {:.6}, target {target:.6}", mm.value, up.value))
}

fn c3_three_dot() -> Outcome {
    let sft = three_dot();
    for n in 1..=5usize {
        let expected = 1u64 << (2 * n - 1);
        let brute = three_dot_brute(n);
        ensure!(brute == expected, "brute count {brute} on {n}x{n}");
        let rect = shiftdim_core::lattice::IntRect::sized(n as u64, n as u64).unwrap();
        let lib = count_locally_admissible(&sft, &shiftdim_core::lattice::LatticeSet::from_rect(&rect)).unwrap();
        ensure!(lib == BigUint::from(expected), "library count {lib} on {n}x{n}");
    }
    let mm = mmdim_estimate(&sft, &linf(2.0), &Action::default(), &[2, 3, 4, 5, 6], 16).unwrap();
    ensure!(mm.value <= 0.02, "mmdim {}", mm.value);
    Ok(format!("count(NxN) = 2^(2N-1) for N<=5; mmdim = {:.6}", mm.value))
}

fn fibonacci(k: usize) -> u64 {
    let (mut a, mut b) = (0u64, 1u64);
    for _ in 0..k {
        (a, b) = (b, a + b);
    }
    a
}

fn c4_furstenberg() -> Outcome {
    let target = phi().log2();
    let gm = golden_mean_1d();
    let spec = linf(2.0);
    let act = Action::OneSided;
    let ms: Vec<u64> = (8..=20).step_by(2).collect();
    let dim = mmdim_estimate(&gm, &spec, &act, &ms, 16).unwrap();
    // depth 20 sees the word on [0, 19]: F_22 golden words
    let c20 = covering_number(&gm, &spec, &act, 1, &Epsilon::at_depth(&spec, 20)).unwrap();
    ensure!(c20 == BigUint::from(fibonacci(22)), "count at depth 20 is {c20}, not F_22");
    let raw = log2_biguint(&c20) / 19.0;
    let band = log2_biguint(&c20) / 20.0;
    let upper = hausdorff_upper_at_scale(&gm, &spec, &act, 1, 20, 20).unwrap();
    let parry = parry_measure(&gm).unwrap();
    let lower = hausdorff_lower_at_scale(&gm, &parry, &spec, &act, 1, 20, 22).unwrap();
    ensure!((dim.value - target).abs() <= 0.02, "extrapolated dim_M {}", dim.value);
    ensure!((band - target).abs() <= 0.02, "dim_M at the band endpoint {band}");
    ensure!((upper - target).abs() <= 0.02, "Hausdorff upper {upper}");
    ensure!((lower - target).abs() <= 0.02, "Parry lower {lower}");
    ensure!(lower <= target + 1e-12 && target <= upper + 1e-12, "bracket [{lower}, {upper}] misses {target}");
    Ok(format!(
        "dim_M extrapolated {:.6}, at M=20: {band:.4} (raw eps=2^-19: {raw:.4}); H bracket [{lower:.4}, {upper:.4}]; target {target:.6}",
        dim.value
    ))
}

fn c5_lambda() -> Outcome {
    let mut worst = 0.0f64;
    for (a, b) in [(1i64, 0i64), (1, 1), (2, 1)] {
        let d = lambda_density(a, b, 64, 4096).unwrap();
        let target = 2.0 * (a.abs() + b.abs()) as f64;
        let rel = (d / target - 1.0).abs();
        ensure!(rel < 0.03, "({a},{b}): density {d} vs {target}");
        worst = worst.max(rel);
    }
    let mut cases = 0;
    for a in -3i64..=3 {
        for b in -3i64..=3 {
            if (a, b) == (0, 0) {
                continue;
            }
            for m in 1..=4u64 {
                for n in 1..=6u64 {
                    let r = m as i64 - 1;
                    let direct: HashSet<(i64, i64)> = (0..n as i64)
                        .flat_map(|k| (-r..=r).flat_map(move |x| (-r..=r).map(move |y| (a * k + x, b * k + y))))
                        .collect();
                    let f = lambda_count_formula(a, b, m, n).unwrap();
                    ensure!(f == direct.len() as u64, "formula {f} vs {} at ({a},{b},{m},{n})", direct.len());
                    ensure!(lambda_count(a, b, m, n).unwrap() == f, "lambda_count at ({a},{b},{m},{n})");
                    ensure!(lambda_set(a, b, m, n).unwrap().len() as u64 == f, "lambda_set at ({a},{b},{m},{n})");
                    cases += 1;
                }
            }
        }
    }
    Ok(format!("max relative density error {:.4}; {cases} enumeration cases match", worst))
}

fn c6_covering_lemma() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for trial in 0..1000 {
        let len = rng.gen_range(1..=12);
        let rects = random_chain(&mut rng, len, 12, 8);
        let picked = greedy_disjoint_subcover(&rects).map_err(|e| format!("trial {trial}: {e}"))?;
        for (i, &p) in picked.iter().enumerate() {
            for &q in &picked[i + 1..] {
                let (r, s) = (&rects[p], &rects[q]);
                let apart = r.b() < s.a() || s.b() < r.a() || r.d() < s.c() || s.d() < r.c();
                ensure!(apart, "trial {trial}: picked #{p} and #{q} overlap");
            }
        }
        for (k, r) in rects.iter().enumerate() {
            // 3S = [2a-b, 2b-a] x [2c-d, 2d-c], by hand
            let covered = picked.iter().any(|&p| {
                let s = &rects[p];
                2 * s.a() - s.b() <= r.a() && r.b() <= 2 * s.b() - s.a() && 2 * s.c() - s.d() <= r.c() && r.d() <= 2 * s.d() - s.c()
            });
            ensure!(covered, "trial {trial}: #{k} outside every 3R");
        }
        let chosen: u64 = picked.iter().map(|&p| rects[p].cardinality()).sum();
        ensure!(9 * chosen >= union_area(&rects), "trial {trial}: mass {chosen} < union/9");
    }
    Ok("1000/1000 families: disjoint, 3R-covering, >= 1/9 of the union".into())
}

fn c7_rate_distortion() -> Outcome {
    let schedule = default_rd_schedule(2.0).unwrap();
    let gm_row = row_lift(&golden_mean_1d()).unwrap();
    let cases = [
        ("Bernoulli(1/2)", MeasureSpec::uniform(2).unwrap()),
        ("Parry row", parry_measure(&gm_row).unwrap()),
    ];
    let mut parts = Vec::new();
    for (name, mu) in cases {
        let target = 2.0 * ks_entropy(&mu);
        let (lo, up) = rdim_bounds(&mu, 2.0, &schedule).unwrap();
        for ((&(m, _), &l), &u) in lo.schedule.iter().zip(&lo.sequence).zip(&up.sequence) {
            ensure!(l <= target + 1e-12 && target <= u + 1e-12, "{name} at M={m}: [{l}, {u}] misses {target}");
        }
        ensure!((lo.value - target).abs() <= 0.05, "{name} lower extrapolation {}", lo.value);
        ensure!((up.value - target).abs() <= 0.05, "{name} upper extrapolation {}", up.value);
        parts.push(format!("{name}: [{:.4}, {:.4}] vs {target:.4}", lo.value, up.value));
    }
    Ok(parts.join("; "))
}

fn c8_blahut_arimoto() -> Outcome {
    let p = RdProblem::hamming(2).unwrap();
    let mut worst = 0.0f64;
    for d in [0.05, 0.1, 0.25] {
        let pt = rd_point_at_distortion(&p, d, 1e-12, 100_000).unwrap();
        let err = (pt.rate - (1.0 - binary_entropy(d).unwrap())).abs();
        ensure!(err < 1e-4, "R({d}) off by {err}");
        worst = worst.max(err);
    }
    let slopes: Vec<f64> = (1..=50).map(|i| 0.2 * i as f64).collect();
    let mut pts: Vec<(f64, f64)> =
        rd_curve(&p, &slopes, 1e-12, 100_000).unwrap().iter().map(|c| (c.distortion, c.rate)).collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    ensure!(pts.windows(2).all(|w| w[1].1 <= w[0].1 + 1e-12), "curve increases");
    for w in pts.windows(3) {
        let (a, b, c) = (w[0], w[1], w[2]);
        if c.0 - a.0 > 1e-9 {
            let chord = a.1 + (c.1 - a.1) * (b.0 - a.0) / (c.0 - a.0);
            ensure!(b.1 <= chord + 1e-9, "not convex near D = {}", b.0);
        }
    }
    Ok(format!("max |R - (1 - H(D))| = {worst:.2e}; 50-slope curve convex, nonincreasing"))
}

fn c9_information() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for trial in 0..500 {
        let (nx, ny) = (rng.gen_range(1..7), rng.gen_range(1..7));
        let m = random_joint(&mut rng, nx, ny);
        let j = JointDistribution::new(m.clone()).unwrap();
        let i = mutual_information(&j);
        let px: Vec<f64> = m.iter().map(|r| r.iter().sum()).collect();
        let py: Vec<f64> = (0..ny).map(|c| m.iter().map(|r| r[c]).sum()).collect();
        let oracle = entropy_oracle(&px) + entropy_oracle(&py) - entropy_oracle(&m.concat());
        ensure!(i >= -1e-9, "trial {trial}: I = {i}");
        ensure!((i - oracle).abs() < 1e-9, "trial {trial}: I = {i}, H-sum {oracle}");
        ensure!((i - mutual_information(&j.transpose())).abs() < 1e-9, "trial {trial}: asymmetric");
        let (fx, gy) = (rng.gen_range(1..=nx), rng.gen_range(1..=ny));
        let f: Vec<usize> = (0..nx).map(|_| rng.gen_range(0..fx)).collect();
        let g: Vec<usize> = (0..ny).map(|_| rng.gen_range(0..gy)).collect();
        let pushed = mutual_information(&j.push_forward(&f, fx, &g, gy).unwrap());
        ensure!(pushed <= i + 1e-9, "trial {trial}: processing raised I");
    }
    let mut informative = 0;
    for trial in 0..200 {
        let b = rng.gen_range(2..=3usize);
        let n = rng.gen_range(1..=4u32);
        let w: Vec<f64> = (0..b.pow(n)).map(|_| rng.gen::<f64>().powi(2)).collect();
        let t: f64 = w.iter().sum();
        let px: Vec<f64> = w.into_iter().map(|x| x / t).collect();
        let (joint, disagreements) = noisy_copy(&px, b, n, rng.gen_range(0.0..0.3));
        let delta = (disagreements / n as f64 + rng.gen_range(1e-6..0.1)).min(0.499);
        let i = mutual_information(&JointDistribution::new(joint).unwrap());
        let bound = mi_lower_bound_lemma(entropy_oracle(&px), n as u64, delta, b as u64).unwrap();
        ensure!(bound <= i + 1e-12, "trial {trial}: bound {bound} > I {i}");
        informative += usize::from(bound > 0.0);
    }
    Ok(format!("500 joints pass MI checks at 1e-9; 200 lemma instances ({informative} with a positive bound)"))
}

fn c10_ball_windows() -> Outcome {
    let spec = linf(2.0);
    let families = [full_shift(2, 2).unwrap(), row_lift(&golden_mean_1d()).unwrap(), three_dot()];
    let universe: Vec<(i64, i64)> = (-1..=2).flat_map(|m| (-1..=2).map(move |n| (m, n))).collect();
    let mut checked = 0;
    for sft in &families {
        for (step, action) in [((1, 0), Action::default()), ((0, 1), Action::planar(0, 1).unwrap())] {
            for m in 1..=2u64 {
                for n in 1..=2u64 {
                    let (cover, separated) = ball_window_oracle(sft, &universe, step, false, m as i64, n as i64);
                    ensure!(cover == separated, "oracle not tight at M={m}, N={n}");
                    let c = covering_number(sft, &spec, &action, n, &Epsilon::at_depth(&spec, m)).unwrap();
                    ensure!(c == BigUint::from(cover), "covering {c} vs oracle {cover} at M={m}, N={n}");
                    checked += 1;
                }
            }
        }
    }
    let gm = golden_mean_1d();
    let line: Vec<(i64, i64)> = (0..10).map(|m| (m, 0)).collect();
    for m in 1..=2u64 {
        for n in 1..=2u64 {
            let (cover, separated) = ball_window_oracle(&gm, &line, (1, 0), true, m as i64, n as i64);
            ensure!(cover == separated, "1D oracle not tight");
            let c = covering_number(&gm, &spec, &Action::OneSided, n, &Epsilon::at_depth(&spec, m)).unwrap();
            ensure!(c == BigUint::from(cover), "1D covering {c} vs oracle {cover}");
            checked += 1;
        }
    }
    Ok(format!("{checked} exhaustive cases equal the minimal cover"))
}

fn main() -> ExitCode {
    let criteria: [(u32, &str, Option<f64>, fn() -> Outcome); 10] = [
        (1, "full shift mmdim", Some(10.0), c1_full_shift),
        (2, "golden row-lift", Some(60.0), c2_golden_row_lift),
        (3, "three-dot control", Some(60.0), c3_three_dot),
        (4, "1D golden mean", Some(10.0), c4_furstenberg),
        (5, "skew-window density", None, c5_lambda),
        (6, "covering lemma", None, c6_covering_lemma),
        (7, "rdim sandwich", Some(30.0), c7_rate_distortion),
        (8, "Blahut-Arimoto", Some(5.0), c8_blahut_arimoto),
        (9, "information properties", None, c9_information),
        (10, "ball-window oracle", None, c10_ball_windows),
    ];
    let mut failures = 0;
    for (id, name, limit, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        let outcome = match (outcome, limit) {
            (Ok(_), Some(l)) if secs >= l => Err(format!("took {secs:.2} s, limit {l} s")),
            (o, _) => o,
        };
        let (status, detail) = match outcome {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failures += 1;
                ("FAIL", d)
            }
        };
        println!("criterion {id:>2} [{name}]: {status} ({secs:.2} s) {detail}");
    }
    if failures == 0 {
        println!("acceptance: 10/10 PASS");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failures} FAIL");
        ExitCode::FAILURE
    }
}

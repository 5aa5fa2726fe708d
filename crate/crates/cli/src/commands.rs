//! Subcommand definitions and their implementations.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;
use shiftdim_core::dimension::{
    covering_number, mhdim_bounds, mmdim_estimate, tame_growth_check,
};
use shiftdim_core::info::{check_compatible, default_rd_schedule, ks_entropy, rdim_bounds, MeasureSpec};
use shiftdim_core::lattice::{check_totally_ordered, greedy_disjoint_subcover, lambda_count, lambda_density, IntRect, LatticeSet};
use shiftdim_core::log2_biguint;
use shiftdim_core::metric::{Action, Epsilon, MetricSpec, Norm};
use shiftdim_core::subshift::{
    box_entropy_estimate, count_with, transfer_matrix_entropy_1d, Certificate, CountMethod, CountOptions,
    SftSpec,
};

use crate::formats::{parse_measure, parse_rects, parse_sft};
use crate::report::{estimate_json, estimate_table, num, Check, Report, Table};
use crate::verify;

#[derive(Debug, Parser)]
#[command(name = "shiftdim", version, about = "Entropy, mean dimension and rate-distortion bounds for Z and Z^2 subshifts")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Write the JSON report to this file instead of stdout.
    #[arg(long, global = true, value_name = "FILE")]
    pub out: Option<PathBuf>,
    /// Write the per-scale tables to this CSV file.
    #[arg(long, global = true, value_name = "FILE")]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Count locally admissible patterns on a rectangle.
    Count(CountArgs),
    /// Topological entropy from the transfer matrix or square boxes.
    Entropy(EntropyArgs),
    /// Covering number #(X, d_N, eps).
    Covering(CoveringArgs),
    /// Metric mean dimension (2D) or box dimension (1D) estimate.
    Mmdim(DimArgs),
    /// Mean Hausdorff dimension bracket.
    Mhdim(MhdimArgs),
    /// Rate-distortion dimension bracket for a measure.
    Rdim(RdimArgs),
    /// |Lambda_{a,b}(M,N)| / (MN).
    #[command(name = "lambda-density")]
    LambdaDensity(LambdaArgs),
    /// Greedy disjoint subfamily of a totally ordered rectangle family.
    #[command(name = "cover-demo")]
    CoverDemo(CoverArgs),
    /// Scan eps^delta log #(X, d, eps) for tame growth.
    #[command(name = "tame-check")]
    TameCheck(TameArgs),
    /// Compare both sides of the dimension identities.
    #[command(name = "verify-theorem")]
    VerifyTheorem(VerifyArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum NormArg {
    Linf,
    L2,
}

impl From<NormArg> for Norm {
    fn from(n: NormArg) -> Norm {
        match n {
            NormArg::Linf => Norm::LInf,
            NormArg::L2 => Norm::L2,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum MethodArg {
    Auto,
    Transfer,
    Backtrack,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum EntropyMode {
    Transfer,
    Box,
}

#[derive(Debug, Args)]
pub struct MetricArgs {
    /// Metric base alpha > 1.
    #[arg(long, default_value_t = 2.0)]
    pub alpha: f64,
    #[arg(long, value_enum, default_value_t = NormArg::Linf)]
    pub norm: NormArg,
    /// Planar action `a,b` (2D only; default 1,0).
    #[arg(long, value_parser = parse_pair, allow_hyphen_values = true)]
    pub action: Option<(i64, i64)>,
}

impl MetricArgs {
    fn spec(&self) -> Result<MetricSpec> {
        Ok(MetricSpec::new(self.alpha, self.norm.into())?)
    }

    fn action_for(&self, sft: &SftSpec) -> Result<Action> {
        match (self.action, sft.dimension()) {
            (None, d) => Ok(Action::for_dimension(d)),
            (Some((a, b)), 2) => Ok(Action::planar(a, b)?),
            (Some(_), _) => bail!("--action applies to 2D subshifts only"),
        }
    }
}

#[derive(Debug, Args)]
pub struct CountArgs {
    #[arg(long)]
    pub sft: PathBuf,
    /// Inclusive bounds `a,b,c,d` for [a,b] x [c,d]; 1D takes `a,b`.
    #[arg(long, value_parser = parse_list_i64, allow_hyphen_values = true)]
    pub rect: ::std::vec::Vec<i64>,
    #[arg(long, value_enum, default_value_t = MethodArg::Auto)]
    pub method: MethodArg,
}

#[derive(Debug, Args)]
pub struct EntropyArgs {
    #[arg(long)]
    pub sft: PathBuf,
    #[arg(long, value_enum, default_value_t = EntropyMode::Transfer)]
    pub mode: EntropyMode,
    /// Largest box side for `--mode box`.
    #[arg(long, default_value_t = 8)]
    pub nmax: u64,
}

#[derive(Debug, Args)]
pub struct CoveringArgs {
    #[arg(long)]
    pub sft: PathBuf,
    #[command(flatten)]
    pub metric: MetricArgs,
    #[arg(long = "N", default_value_t = 1)]
    pub n: u64,
    #[arg(long)]
    pub eps: f64,
}

#[derive(Debug, Args)]
pub struct DimArgs {
    #[arg(long)]
    pub sft: PathBuf,
    #[command(flatten)]
    pub metric: MetricArgs,
    /// Depths, e.g. `2,3,4,5,6` (default: 2..=6 for 2D, 8,10,..,20 for 1D).
    #[arg(long = "M-schedule", value_parser = parse_list_u64)]
    pub m_schedule: Option<::std::vec::Vec<u64>>,
    /// N = N-factor * M for the per-iterate slope.
    #[arg(long = "N-factor", default_value_t = 16)]
    pub n_factor: u64,
}

#[derive(Debug, Args)]
pub struct MhdimArgs {
    #[command(flatten)]
    pub dim: DimArgs,
    /// Measure for the mass-distribution lower bound.
    #[arg(long)]
    pub measure: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RdimArgs {
    #[arg(long)]
    pub measure: PathBuf,
    /// Subshift the measure must live on (checked when given).
    #[arg(long)]
    pub sft: Option<PathBuf>,
    #[arg(long, default_value_t = 2.0)]
    pub alpha: f64,
    /// Depths M; each gives eps = alpha^-(M-1) and delta = 1/M.
    #[arg(long = "M-schedule", value_parser = parse_list_u64)]
    pub m_schedule: Option<::std::vec::Vec<u64>>,
    /// Single scale instead of a schedule (needs --delta).
    #[arg(long, requires = "delta")]
    pub eps: Option<f64>,
    #[arg(long, requires = "eps")]
    pub delta: Option<f64>,
}

#[derive(Debug, Args)]
pub struct LambdaArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub a: i64,
    #[arg(long, allow_hyphen_values = true)]
    pub b: i64,
    #[arg(long = "M")]
    pub m: u64,
    #[arg(long = "N")]
    pub n: u64,
}

#[derive(Debug, Args)]
pub struct CoverArgs {
    /// File with one rectangle `a b c d` per line.
    #[arg(long)]
    pub rects: PathBuf,
}

#[derive(Debug, Args)]
pub struct TameArgs {
    #[arg(long)]
    pub sft: PathBuf,
    #[arg(long, default_value_t = 2.0)]
    pub alpha: f64,
    #[arg(long, value_enum, default_value_t = NormArg::Linf)]
    pub norm: NormArg,
    #[arg(long)]
    pub delta: f64,
    #[arg(long = "M-max", default_value_t = 64)]
    pub m_max: u64,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub sft: PathBuf,
    #[arg(long)]
    pub measure: Option<PathBuf>,
    #[arg(long, default_value_t = 2.0)]
    pub alpha: f64,
    #[arg(long = "M-schedule", value_parser = parse_list_u64)]
    pub m_schedule: Option<::std::vec::Vec<u64>>,
    #[arg(long = "N-factor", default_value_t = 16)]
    pub n_factor: u64,
    /// Largest accepted |left side - right side|.
    #[arg(long, default_value_t = 0.02)]
    pub tolerance: f64,
    /// Refuse a verdict for subshifts without a certificate.
    #[arg(long)]
    pub strict: bool,
}

fn parse_pair(s: &str) -> Result<(i64, i64), String> {
    let v = parse_list_i64(s)?;
    match v.as_slice() {
        [a, b] => Ok((*a, *b)),
        _ => Err(format!("expected `a,b`, found {s:?}")),
    }
}

fn parse_list_i64(s: &str) -> Result<Vec<i64>, String> {
    s.split(',').map(|t| t.trim().parse::<i64>().map_err(|_| format!("bad integer {t:?}"))).collect()
}

fn parse_list_u64(s: &str) -> Result<Vec<u64>, String> {
    s.split(',').map(|t| t.trim().parse::<u64>().map_err(|_| format!("bad integer {t:?}"))).collect()
}

pub fn load_sft(path: &Path) -> Result<SftSpec> {
    let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    parse_sft(&text).with_context(|| format!("{}", path.display()))
}

pub fn load_measure(path: &Path) -> Result<MeasureSpec> {
    let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    parse_measure(&text).with_context(|| format!("{}", path.display()))
}

/// A command's report and whether its verification failed.
pub struct Outcome {
    pub report: Report,
    pub failed: bool,
}

impl From<Report> for Outcome {
    fn from(report: Report) -> Self {
        Outcome { report, failed: false }
    }
}

pub fn execute(cmd: &Command) -> Result<Outcome> {
    match cmd {
        Command::Count(a) => count(a).map(Into::into),
        Command::Entropy(a) => entropy(a).map(Into::into),
        Command::Covering(a) => covering(a).map(Into::into),
        Command::Mmdim(a) => mmdim(a).map(Into::into),
        Command::Mhdim(a) => mhdim(a).map(Into::into),
        Command::Rdim(a) => rdim(a).map(Into::into),
        Command::LambdaDensity(a) => lambda(a).map(Into::into),
        Command::CoverDemo(a) => cover_demo(a),
        Command::TameCheck(a) => tame(a),
        Command::VerifyTheorem(a) => verify::verify_theorem(a),
    }
}

pub(crate) fn sft_inputs(r: &mut Report, path: &Path, sft: &SftSpec) {
    r.input("sft", path.display().to_string());
    r.input("dimension", sft.dimension());
    r.input("alphabet_size", sft.alphabet_size());
    r.input("certificate", sft.certificate().map(Certificate::tag));
}

fn metric_inputs(r: &mut Report, spec: &MetricSpec, action: &Action) {
    r.input("alpha", num(spec.alpha()));
    r.input("norm", spec.norm().tag());
    r.input(
        "action",
        match action {
            Action::OneSided => json!("one-sided"),
            Action::Planar { a, b } => json!([a, b]),
        },
    );
}

fn count(args: &CountArgs) -> Result<Report> {
    let sft = load_sft(&args.sft)?;
    let rect = match (sft.dimension(), args.rect.as_slice()) {
        (1, [a, b]) => IntRect::row(*a, *b)?,
        (2, [a, b, c, d]) => IntRect::new(*a, *b, *c, *d)?,
        (1, _) => bail!("1D subshifts take --rect a,b"),
        _ => bail!("2D subshifts take --rect a,b,c,d"),
    };
    let method = match args.method {
        MethodArg::Auto => CountMethod::Auto,
        MethodArg::Transfer => CountMethod::Transfer,
        MethodArg::Backtrack => CountMethod::Backtrack,
    };
    let c = count_with(&sft, &LatticeSet::from_rect(&rect), &CountOptions::default().with_method(method))?;
    let mut r = Report::new("count");
    sft_inputs(&mut r, &args.sft, &sft);
    r.input("rect", json!([rect.a(), rect.b(), rect.c(), rect.d()]));
    r.input("method", format!("{:?}", method).to_lowercase());
    r.result("count", c.to_string());
    r.result("log2_count", num(log2_biguint(&c)));
    r.result("cells", rect.cardinality());
    Ok(r)
}

/// `h_top` by the transfer matrix: the subshift itself in 1D, the row base of
/// a 2D subshift whose constraints all lie in rows.
pub(crate) fn transfer_entropy(sft: &SftSpec) -> Result<f64> {
    if sft.dimension() == 1 {
        return Ok(transfer_matrix_entropy_1d(sft)?);
    }
    let base = sft
        .row_base()
        .context("transfer mode needs a 1D subshift or a 2D subshift with row constraints only; try --mode box")?;
    Ok(transfer_matrix_entropy_1d(&base)?)
}

fn entropy(args: &EntropyArgs) -> Result<Report> {
    let sft = load_sft(&args.sft)?;
    let mut r = Report::new("entropy");
    sft_inputs(&mut r, &args.sft, &sft);
    match args.mode {
        EntropyMode::Transfer => {
            r.input("mode", "transfer");
            r.result("entropy_bits", num(transfer_entropy(&sft)?));
        }
        EntropyMode::Box => {
            r.input("mode", "box").input("nmax", args.nmax);
            let seq = box_entropy_estimate(&sft, args.nmax)?;
            let mut t = Table::new(&["N", "log2_count_over_N2"]);
            for &(n, v) in &seq {
                t.push(vec![json!(n), num(v)]);
            }
            let last = seq.last().map_or(f64::NAN, |x| x.1);
            r.result("entropy_bits_upper", num(last));
            r.table("box", t);
        }
    }
    Ok(r)
}

fn covering(args: &CoveringArgs) -> Result<Report> {
    let sft = load_sft(&args.sft)?;
    let spec = args.metric.spec()?;
    let action = args.metric.action_for(&sft)?;
    let eps = Epsilon::new(args.eps)?;
    let c = covering_number(&sft, &spec, &action, args.n, &eps)?;
    let mut r = Report::new("covering");
    sft_inputs(&mut r, &args.sft, &sft);
    metric_inputs(&mut r, &spec, &action);
    r.input("N", args.n).input("eps", num(args.eps));
    r.result("covering_number", c.to_string());
    r.result("log2_covering_number", num(log2_biguint(&c)));
    r.result("exact", sft.certificate().is_some());
    Ok(r)
}

pub(crate) fn default_schedule(sft: &SftSpec) -> Vec<u64> {
    if sft.dimension() == 1 {
        (8..=20).step_by(2).collect()
    } else {
        (2..=6).collect()
    }
}

fn mmdim(args: &DimArgs) -> Result<Report> {
    let sft = load_sft(&args.sft)?;
    let spec = args.metric.spec()?;
    let action = args.metric.action_for(&sft)?;
    let ms = args.m_schedule.clone().unwrap_or_else(|| default_schedule(&sft));
    let est = mmdim_estimate(&sft, &spec, &action, &ms, args.n_factor)?;
    let mut r = Report::new("mmdim");
    sft_inputs(&mut r, &args.sft, &sft);
    metric_inputs(&mut r, &spec, &action);
    r.input("M_schedule", ms).input("N_factor", args.n_factor);
    r.result("mmdim", estimate_json(&est));
    r.table("mmdim", estimate_table(&est));
    Ok(r)
}

fn mhdim(args: &MhdimArgs) -> Result<Report> {
    let d = &args.dim;
    let sft = load_sft(&d.sft)?;
    let measure = args.measure.as_deref().map(load_measure).transpose()?;
    let spec = d.metric.spec()?;
    let action = d.metric.action_for(&sft)?;
    let ms = d.m_schedule.clone().unwrap_or_else(|| default_schedule(&sft));
    let (lo, up) = mhdim_bounds(&sft, measure.as_ref(), &spec, &action, &ms, d.n_factor)?;
    let mut r = Report::new("mhdim");
    sft_inputs(&mut r, &d.sft, &sft);
    metric_inputs(&mut r, &spec, &action);
    r.input("M_schedule", ms).input("N_factor", d.n_factor);
    r.input("measure", args.measure.as_ref().map(|p| p.display().to_string()));
    r.result("upper", estimate_json(&up));
    r.table("upper", estimate_table(&up));
    match lo {
        Some(lo) => {
            r.result("lower", estimate_json(&lo));
            r.table("lower", estimate_table(&lo));
        }
        None => {
            r.result("lower", json!(null));
        }
    }
    Ok(r)
}

fn rdim(args: &RdimArgs) -> Result<Report> {
    let measure = load_measure(&args.measure)?;
    let mut r = Report::new("rdim");
    r.input("measure", args.measure.display().to_string()).input("alpha", num(args.alpha));
    if let Some(path) = &args.sft {
        let sft = load_sft(path)?;
        check_compatible(&measure, &sft)?;
        sft_inputs(&mut r, path, &sft);
    }
    let spec = MetricSpec::linf(args.alpha)?;
    let schedule: Vec<(Epsilon, f64)> = match (args.eps, args.delta, &args.m_schedule) {
        (Some(e), Some(d), _) => vec![(Epsilon::new(e)?, d)],
        (_, _, Some(ms)) => ms
            .iter()
            .map(|&m| {
                if m < 2 {
                    bail!("--M-schedule entries must be >= 2");
                }
                Ok((Epsilon::at_depth(&spec, m), 1.0 / m as f64))
            })
            .collect::<Result<_>>()?,
        _ => default_rd_schedule(args.alpha)?,
    };
    r.input("schedule", schedule.iter().map(|(e, d)| json!([num(e.value()), num(*d)])).collect::<Vec<_>>());
    r.result("ks_entropy_bits", num(ks_entropy(&measure)));
    r.result("target_2h_over_log2_alpha", num(2.0 * ks_entropy(&measure) / spec.log2_alpha()));
    if schedule.len() == 1 {
        let (eps, delta) = &schedule[0];
        let lo = shiftdim_core::info::rd_lower_bound(&measure, args.alpha, eps, *delta)?;
        let m = shiftdim_core::metric::resolution_index_of(&spec, eps)?.get();
        r.result("lower_bound_bits", num(lo.value));
        r.result("lower_bound_raw_bits", num(lo.raw));
        r.result("lower_bracket_M", lo.m);
        r.result("upper_bound_bits", num(shiftdim_core::info::rd_upper_bound_limit(&measure, m)));
        r.result("upper_resolution_M", m);
        return Ok(r);
    }
    let (lo, up) = rdim_bounds(&measure, args.alpha, &schedule)?;
    r.result("lower", estimate_json(&lo));
    r.result("upper", estimate_json(&up));
    r.table("lower", estimate_table(&lo));
    r.table("upper", estimate_table(&up));
    Ok(r)
}

fn lambda(args: &LambdaArgs) -> Result<Report> {
    let mut r = Report::new("lambda-density");
    r.input("a", args.a).input("b", args.b).input("M", args.m).input("N", args.n);
    let count = lambda_count(args.a, args.b, args.m, args.n)?;
    let d = lambda_density(args.a, args.b, args.m, args.n)?;
    r.result("count", count);
    r.result("density", num(d));
    r.result("limit", num(2.0 * (args.a.abs() + args.b.abs()) as f64));
    Ok(r)
}

fn cover_demo(args: &CoverArgs) -> Result<Outcome> {
    let text = std::fs::read_to_string(&args.rects).with_context(|| format!("cannot read {}", args.rects.display()))?;
    let rects = parse_rects(&text).with_context(|| format!("{}", args.rects.display()))?;
    check_totally_ordered(&rects)?;
    let picked = greedy_disjoint_subcover(&rects)?;
    let disjoint = picked
        .iter()
        .enumerate()
        .all(|(i, &p)| picked[i + 1..].iter().all(|&q| !rects[p].intersects(&rects[q])));
    let covered = rects.iter().all(|r| picked.iter().any(|&p| rects[p].triple().contains_rect(r)));
    let union = LatticeSet::from_points(rects.iter().flat_map(|r| r.points()).collect());
    let chosen: u64 = picked.iter().map(|&p| rects[p].cardinality()).sum();
    let mass_ok = 9 * chosen >= union.len() as u64;
    let mut r = Report::new("cover-demo");
    r.input("rects", args.rects.display().to_string()).input("family_size", rects.len());
    r.result("selected", picked.clone());
    r.result("selected_area", chosen);
    r.result("union_area", union.len());
    r.result("disjoint", disjoint);
    r.result("tripled_cover", covered);
    r.result("ninth_of_union", mass_ok);
    let pass = disjoint && covered && mass_ok;
    r.set_verdict(if pass { "PASS" } else { "FAIL" });
    Ok(Outcome { report: r, failed: !pass })
}

fn tame(args: &TameArgs) -> Result<Outcome> {
    let sft = load_sft(&args.sft)?;
    let spec = MetricSpec::new(args.alpha, args.norm.into())?;
    let t = tame_growth_check(&sft, &spec, args.delta, args.m_max)?;
    let mut r = Report::new("tame-check");
    sft_inputs(&mut r, &args.sft, &sft);
    r.input("alpha", num(args.alpha)).input("norm", spec.norm().tag());
    r.input("delta", num(args.delta)).input("M_max", args.m_max);
    let mut table = Table::new(&["M", "value"]);
    for &(m, v) in &t.values {
        table.push(vec![json!(m), num(v)]);
    }
    r.table("tame", table);
    r.result("consistent", t.consistent);
    r.set_verdict(if t.consistent { "CONSISTENT" } else { "INCONSISTENT" });
    Ok(Outcome { report: r, failed: !t.consistent })
}

pub(crate) fn checks_failed(checks: &[Check]) -> bool {
    checks.iter().any(Check::failed)
}

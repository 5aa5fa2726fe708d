//! `verify-theorem`: dimension estimates against `factor · h / log₂ α`.
//!
//! The factor is 2 for ℤ² subshifts under `σ₁` and 1 for one-sided 1D
//! shifts. `h` comes from a certified closed form or the transfer matrix;
//! without a certificate the report only lists the bounds.

use anyhow::{bail, Result};
use serde_json::json;
use shiftdim_core::dimension::{mhdim_bounds, mmdim_estimate};
use shiftdim_core::info::{check_compatible, default_rd_schedule, ks_entropy, rdim_bounds};
use shiftdim_core::metric::{Action, MetricSpec};
use shiftdim_core::subshift::{row_lift, Certificate, SftSpec};

use crate::commands::{
    checks_failed, default_schedule, load_measure, load_sft, sft_inputs, transfer_entropy, Outcome, VerifyArgs,
};
use crate::report::{estimate_json, estimate_table, num, Check, Report};

/// Slack for comparing a measure's entropy with `h_top` (digits stored in
/// fixture files).
const ENTROPY_SLACK: f64 = 1e-9;

/// Topological entropy in bits when the subshift is certified exact.
fn certified_entropy(sft: &SftSpec) -> Result<Option<(f64, &'static str)>> {
    if sft.dimension() == 1 {
        // nearest-neighbour 1D SFTs whose lift certifies have no dead ends
        let exact = row_lift(sft).map(|l| l.certificate().is_some()).unwrap_or(false);
        return exact.then(|| transfer_entropy(sft).map(|h| (h, "transfer-matrix"))).transpose();
    }
    Ok(match sft.certificate() {
        Some(Certificate::Full) => Some(((sft.alphabet_size() as f64).log2(), "closed-form")),
        Some(Certificate::RowLift) => Some((transfer_entropy(sft)?, "transfer-matrix")),
        Some(Certificate::ThreeDot) => Some((0.0, "closed-form")),
        None => None,
    })
}

pub fn verify_theorem(args: &VerifyArgs) -> Result<Outcome> {
    let sft = load_sft(&args.sft)?;
    let measure = args.measure.as_deref().map(load_measure).transpose()?;
    if let Some(mu) = &measure {
        check_compatible(mu, &sft)?;
    }
    if !(args.tolerance >= 0.0) {
        bail!("--tolerance must be a nonnegative number");
    }
    let spec = MetricSpec::linf(args.alpha)?;
    let action = Action::for_dimension(sft.dimension());
    let ms = args.m_schedule.clone().unwrap_or_else(|| default_schedule(&sft));
    let factor = if sft.dimension() == 2 { 2.0 } else { 1.0 };

    let certified = certified_entropy(&sft)?;
    if certified.is_none() && args.strict {
        bail!("{} carries no exactness certificate; drop --strict to get bounds only", args.sft.display());
    }

    let mut r = Report::new("verify-theorem");
    sft_inputs(&mut r, &args.sft, &sft);
    r.input("measure", args.measure.as_ref().map(|p| p.display().to_string()));
    r.input("alpha", num(args.alpha)).input("M_schedule", ms.clone()).input("N_factor", args.n_factor);
    r.input("tolerance", num(args.tolerance)).input("strict", args.strict);

    let mm = mmdim_estimate(&sft, &spec, &action, &ms, args.n_factor)?;
    let (lo, up) = mhdim_bounds(&sft, measure.as_ref(), &spec, &action, &ms, args.n_factor)?;
    r.result("mmdim", estimate_json(&mm));
    r.result("mhdim_upper", estimate_json(&up));
    r.result("mhdim_lower", lo.as_ref().map_or(json!(null), estimate_json));
    r.table("mmdim", estimate_table(&mm));
    r.table("mhdim_upper", estimate_table(&up));
    if let Some(lo) = &lo {
        r.table("mhdim_lower", estimate_table(lo));
    }

    let rd = match (&measure, sft.dimension()) {
        (Some(mu), 2) => Some((rdim_bounds(mu, args.alpha, &default_rd_schedule(args.alpha)?)?, ks_entropy(mu))),
        _ => None,
    };
    if let Some(((rlo, rup), _)) = &rd {
        r.result("rdim_lower", estimate_json(rlo));
        r.result("rdim_upper", estimate_json(rup));
        r.table("rdim_lower", estimate_table(rlo));
        r.table("rdim_upper", estimate_table(rup));
    }

    let Some((h, source)) = certified else {
        r.result("rhs", json!(null));
        r.set_verdict("BOUNDS_ONLY");
        return Ok(r.into());
    };
    let la = spec.log2_alpha();
    let rhs = factor * h / la;
    r.result("entropy_bits", num(h)).result("entropy_source", source);
    r.result("rhs", num(rhs)).result("rhs_factor", num(factor));

    let tol = args.tolerance;
    r.check(Check::within("mmdim", mm.value, rhs, tol));
    r.check(Check::within("mhdim_upper", up.value, rhs, tol));
    if let (Some(lo), Some(mu)) = (&lo, &measure) {
        let c = Check::within("mhdim_lower", lo.value, rhs, tol);
        if ks_entropy(mu) + ENTROPY_SLACK < h {
            r.check(c.inconclusive("measure entropy is below h_top; the mass-distribution bound cannot reach the right side"));
        } else {
            r.check(c);
        }
    }
    if let Some(((rlo, rup), hmu)) = &rd {
        let target = factor * hmu / la;
        r.result("rdim_target", num(target));
        r.check(Check::within("rdim_lower", rlo.value, target, tol));
        r.check(Check::within("rdim_upper", rup.value, target, tol));
    }
    let failed = checks_failed(r.checks());
    r.set_verdict(if failed { "FAIL" } else { "PASS" });
    Ok(Outcome { report: r, failed })
}

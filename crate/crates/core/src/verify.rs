//! The acceptance checklist: fourteen numbered verification bundles covering
//! exact constants, bubble asymptotics, Green functions, glued test
//! functions, the threshold certification, the maximizer solver, blow-up
//! trends, the Pohozaev identity, the divergence demo, and the discrete
//! integration-by-parts self-test.
//!
//! Each criterion runs a fixed set of sub-checks with tolerances pinned
//! here, and reports one line per sub-check. Sub-checks encode the rates and
//! factors stated in the project requirements even where our measurements
//! show the stated model is wrong; those fail honestly rather than being
//! tuned green, and the discrepancy is described in the check detail.

use std::f64::consts::PI;
use std::time::Instant;

use serde::Serialize;

use crate::bubble::{
    bubble_energy, bubble_mass, bubble_mass_deficit, liouville_density, BubbleLadder,
};
use crate::constants::{build_context, compute_i_m, h_constant, ExactConstant};
use crate::error::{Error, Result};
use crate::extremal::{
    assemble_pohozaev, blowup_diagnostics, first_eigenpair, maximize_subcritical,
    pohozaev_residual, supercritical_divergence_demo, ProblemConfig,
};
use crate::greens::{green_energy_expansion, lowest_eigenvalue, solve_green};
use crate::numerics::grid::{RadialGrid, RadialProfile};
use crate::numerics::{fit_decay, quad, DecayModel, RadialOperatorTable};
use crate::testfn::{assemble_test_function, evaluate_threshold_gap};

/// First zero of the Bessel function J_0, squared: the unit-disk Dirichlet
/// eigenvalue.
const DISK_LAMBDA_1: f64 = 5.783185962946785;

/// One sub-check of a criterion.
#[derive(Debug, Clone, Serialize)]
pub struct CheckLine {
    pub label: String,
    pub passed: bool,
    pub detail: String,
}

/// Outcome of one numbered acceptance criterion.
#[derive(Debug, Clone, Serialize)]
pub struct CriterionReport {
    pub id: u32,
    pub title: String,
    pub passed: bool,
    pub runtime_secs: f64,
    pub checks: Vec<CheckLine>,
}

fn line(label: impl Into<String>, passed: bool, detail: impl Into<String>) -> CheckLine {
    CheckLine {
        label: label.into(),
        passed,
        detail: detail.into(),
    }
}

fn finish(id: u32, title: &str, started: Instant, checks: Vec<CheckLine>) -> CriterionReport {
    CriterionReport {
        id,
        title: title.into(),
        passed: checks.iter().all(|c| c.passed),
        runtime_secs: started.elapsed().as_secs_f64(),
        checks,
    }
}

fn runtime_check(started: Instant, limit_secs: f64) -> CheckLine {
    let secs = started.elapsed().as_secs_f64();
    line(
        format!("runtime < {limit_secs} s"),
        secs < limit_secs,
        format!("{secs:.2} s"),
    )
}

/// Run one criterion by id (1..=14).
pub fn criterion(id: u32) -> Result<CriterionReport> {
    match id {
        1 => criterion_exact_constants(),
        2 => criterion_self_energy(),
        3 => criterion_bubble_pde(),
        4 => criterion_bubble_mass(),
        5 => criterion_bubble_energy_rate(),
        6 => criterion_green_constants(),
        7 => criterion_green_energy_identity(),
        8 => criterion_matching(),
        9 => criterion_threshold_certification(),
        10 => criterion_solver_soundness(),
        11 => criterion_blowup_trends(),
        12 => criterion_pohozaev(),
        13 => criterion_divergence_demo(),
        14 => criterion_discrete_by_parts(),
        _ => Err(Error::InvalidInput(format!(
            "criterion id must be 1..=14, got {id}"
        ))),
    }
}

/// Run the full checklist in order.
pub fn run_all() -> Result<Vec<CriterionReport>> {
    (1..=14).map(criterion).collect()
}

/// 1: exact-arithmetic identities for m = 1..8, zero tolerance.
fn criterion_exact_constants() -> Result<CriterionReport> {
    let t0 = Instant::now();
    let mut checks = Vec::new();
    let mut gamma_ok = true;
    let mut top_ok = true;
    let mut mid_ok = true;
    let mut h_ok = true;
    for m in 1..=8u32 {
        let ctx = build_context(m)?;
        let two_m = ExactConstant::from_integer(2 * i64::from(m));
        gamma_ok &= ctx.gamma_m == &ctx.beta_star / &two_m;
        let two_m_over_beta = ctx.two_m_over_beta_star();
        let top = &two_m_over_beta * ctx.k_half(2 * m - 1);
        let mut want = ctx.omega_odd.recip();
        if (m - 1) % 2 == 1 {
            want = -&want;
        }
        top_ok &= top == want;
        let k_mid = ctx.k_half(m);
        let mid = &(&ctx.omega_odd * &two_m_over_beta) * &(k_mid * k_mid);
        mid_ok &= mid == ExactConstant::one();
        h_ok &= h_constant(&ctx) == ctx.h_m;
    }
    checks.push(line(
        "gamma_m = beta*/(2m), m=1..8",
        gamma_ok,
        "exact rational*pi^k equality",
    ));
    checks.push(line(
        "ladder top-coefficient identity, m=1..8",
        top_ok,
        "(2m/beta*) K_{m,(2m-1)/2} = (-1)^{m-1}/omega_{2m-1}",
    ));
    checks.push(line(
        "ladder middle-square identity, m=1..8",
        mid_ok,
        "omega_{2m-1} (2m/beta*) K_{m,m/2}^2 = 1",
    ));
    checks.push(line(
        "boundary constant: both formulas agree, m=1..8",
        h_ok,
        "alternating product sum vs signed harmonic sum",
    ));
    checks.push(runtime_check(t0, 1.0));
    Ok(finish(1, "exact constants", t0, checks))
}

/// 2: bubble self-energy, closed form and cross-route agreement.
fn criterion_self_energy() -> Result<CriterionReport> {
    let t0 = Instant::now();
    let mut checks = Vec::new();
    let c1 = build_context(1)?;
    let i1 = compute_i_m(&c1, 1e-12)?;
    let want = -1.0 / (4.0 * PI);
    let rel = ((i1 - want) / want).abs();
    checks.push(line(
        "I_1 = -1/(4pi) within 1e-10 relative",
        rel < 1e-10,
        format!("quadrature {i1:.15e}, relative gap {rel:.2e}"),
    ));
    for m in 1..=4u32 {
        let ctx = build_context(m)?;
        let direct = compute_i_m(&ctx, 1e-12)?;
        let ladder = BubbleLadder::new(&ctx);
        let paired = crate::bubble::self_energy_via_ladder(&ctx, &ladder)?;
        let diff = (direct - paired).abs();
        checks.push(line(
            format!("I_{m}: density quadrature vs ladder pairing within 1e-8"),
            diff < 1e-8,
            format!("{direct:.12e} vs {paired:.12e}, gap {diff:.2e}"),
        ));
    }
    checks.push(runtime_check(t0, 10.0));
    Ok(finish(2, "bubble self-energy", t0, checks))
}

/// 3: the bubble solves its Liouville equation through the ladder.
fn criterion_bubble_pde() -> Result<CriterionReport> {
    let t0 = Instant::now();
    let mut checks = Vec::new();
    for m in [1u32, 2, 3] {
        let ctx = build_context(m)?;
        let ladder = BubbleLadder::new(&ctx);
        let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
        let mut worst = 0.0_f64;
        for &r in &[0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0] {
            let lhs = sign * ladder.eval(2 * m, r);
            let rhs = liouville_density(&ctx, r);
            worst = worst.max(((lhs - rhs) / rhs).abs());
        }
        checks.push(line(
            format!("m={m}: (-Delta)^m eta0 = omega^-1 e^(2 beta* eta0), rel < 1e-8"),
            worst < 1e-8,
            format!("max relative gap {worst:.2e} over 7 radii"),
        ));
    }
    Ok(finish(3, "bubble equation", t0, checks))
}

/// 4: Liouville mass, exact half-mass point and tail decay exponents.
fn criterion_bubble_mass() -> Result<CriterionReport> {
    let t0 = Instant::now();
    let mut checks = Vec::new();
    let c1 = build_context(1)?;
    let half = bubble_mass(&c1, 2.0)?;
    checks.push(line(
        "m=1: mass(2) = 1/2 within 1e-10",
        (half - 0.5).abs() < 1e-10,
        format!("mass(2) = {half:.15}"),
    ));
    for m in [1u32, 2, 3] {
        let ctx = build_context(m)?;
        let radii: Vec<f64> = (0..7)
            .map(|i| 10.0 * (100.0_f64).powf(f64::from(i) / 6.0))
            .collect();
        let deficits: Vec<f64> = radii
            .iter()
            .map(|&r| bubble_mass_deficit(&ctx, r))
            .collect::<Result<_>>()?;
        let fit = fit_decay(&radii, &deficits, DecayModel::Power)?;
        let want = 2.0 * f64::from(m);
        checks.push(line(
            format!("m={m}: |mass(R)-1| decay exponent {want} +- 0.1 over R in [10,1000]"),
            (fit.exponent - want).abs() < 0.1,
            format!("fitted exponent {:.4}", fit.exponent),
        ));
    }
    Ok(finish(4, "bubble mass", t0, checks))
}

/// 5: bubble energy vs its logarithmic expansion; the stated remainder model
/// is exponent 2 with one log factor for both m. Our measurements show the
/// m=2 remainder is genuinely order R^-4 (the R^-2 terms cancel), so that
/// sub-check fails honestly.
fn criterion_bubble_energy_rate() -> Result<CriterionReport> {
    let t0 = Instant::now();
    let mut checks = Vec::new();
    for m in [1u32, 2] {
        let ctx = build_context(m)?;
        let ladder = BubbleLadder::new(&ctx);
        let radii: Vec<f64> = (4..=9).map(|i| 2.0_f64.powi(i)).collect();
        let mut residuals = Vec::with_capacity(radii.len());
        for &r in &radii {
            let rep = bubble_energy(&ctx, &ladder, r)?;
            residuals.push((rep.energy - rep.energy_prediction).abs());
        }
        let fit = fit_decay(&radii, &residuals, DecayModel::PowerLog)?;
        checks.push(line(
            format!("m={m}: energy remainder fits exponent 2 +- 0.3 (power*log) over R in [16,512]"),
            (fit.exponent - 2.0).abs() < 0.3,
            format!("fitted exponent {:.4}", fit.exponent),
        ));
    }
    Ok(finish(5, "bubble energy expansion", t0, checks))
}

/// 6: Green-function constants, boundary conditions, and point mass.
fn criterion_green_constants() -> Result<CriterionReport> {
    let t0 = Instant::now();
    let mut checks = Vec::new();
    let c1 = build_context(1)?;
    let g1 = solve_green(&c1, 0.0, 1.0, 1e-12)?;
    checks.push(line(
        "m=1 disk alpha=0: C = 0 within 1e-10",
        g1.c().abs() < 1e-10,
        format!("C = {:.3e}", g1.c()),
    ));
    let c2 = build_context(2)?;
    let g2 = solve_green(&c2, 0.0, 1.0, 1e-12)?;
    let want = -1.0 / (16.0 * PI * PI);
    checks.push(line(
        "m=2 ball alpha=0: C = -1/(16 pi^2) within 1e-8",
        (g2.c() - want).abs() < 1e-8,
        format!("C = {:.12e} vs {want:.12e}", g2.c()),
    ));
    for (g, name) in [(&g1, "m=1"), (&g2, "m=2")] {
        let worst = g
            .dirichlet_residuals()
            .into_iter()
            .fold(0.0_f64, f64::max);
        checks.push(line(
            format!("{name}: Dirichlet boundary residuals < 1e-8"),
            worst < 1e-8,
            format!("max |boundary trace| {worst:.2e}"),
        ));
        let sign = if g.m() % 2 == 0 { 1.0 } else { -1.0 };
        let mass = g.distributional_mass(1e-3);
        checks.push(line(
            format!("{name}: distributional mass at delta=1e-3 within 1e-6"),
            (mass - sign).abs() < 1e-6,
            format!("flux {mass:.9} vs {sign}"),
        ));
    }
    Ok(finish(6, "Green function constants", t0, checks))
}

/// 7: punctured-ball energy identity. The disk case is exact; the general
/// remainder is claimed to decay like delta log(delta) (exponent 1), but the
/// measured remainder decays quadratically, so the rate sub-check fails
/// honestly.
fn criterion_green_energy_identity() -> Result<CriterionReport> {
    let t0 = Instant::now();
    let mut checks = Vec::new();
    let c1 = build_context(1)?;
    let g1 = solve_green(&c1, 0.0, 1.0, 1e-12)?;
    let mut worst = 0.0_f64;
    for &delta in &[1e-1, 1e-2, 1e-3] {
        let rep = green_energy_expansion(&c1, &g1, delta)?;
        worst = worst.max(rep.residual.abs());
    }
    checks.push(line(
        "m=1 disk alpha=0: energy identity exact (residual < 1e-9)",
        worst < 1e-9,
        format!("max |residual| {worst:.2e} over three deltas"),
    ));
    let lam1 = lowest_eigenvalue(&c1, 1.0)?;
    let c2 = build_context(2)?;
    for (ctx, alpha, name) in [
        (&c1, 0.3 * lam1, "m=1 alpha=0.3 lambda_1"),
        (&c2, 0.0, "m=2 alpha=0"),
    ] {
        let g = solve_green(ctx, alpha, 1.0, 1e-12)?;
        let deltas = [1e-3, 3.162e-3, 1e-2, 3.162e-2, 1e-1];
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for &d in deltas.iter().rev() {
            let rep = green_energy_expansion(ctx, &g, d)?;
            xs.push(1.0 / d);
            ys.push(rep.residual.abs());
        }
        let fit = fit_decay(&xs, &ys, DecayModel::PowerLog)?;
        checks.push(line(
            format!("{name}: remainder fits delta log delta (exponent 1 +- 0.3)"),
            (fit.exponent - 1.0).abs() < 0.3,
            format!("fitted exponent {:.4} (measured law is quadratic)", fit.exponent),
        ));
    }
    Ok(finish(7, "Green energy identity", t0, checks))
}

/// 8: boundary matching of the glued profile.
fn criterion_matching() -> Result<CriterionReport> {
    let t0 = Instant::now();
    let mut checks = Vec::new();
    for m in 1..=4u32 {
        let ctx = build_context(m)?;
        let poly = crate::testfn::build_matching_polynomial(&ctx, 1e-3, 8.0, 1.1)?;
        let worst = poly
            .matching_residuals(&ctx)
            .into_iter()
            .fold(0.0_f64, f64::max);
        checks.push(line(
            format!("m={m}: contact residuals < 1e-9"),
            worst < 1e-9,
            format!("max residual {worst:.2e}"),
        ));
    }
    for m in [2u32, 3, 4] {
        let ctx = build_context(m)?;
        let r_vals: Vec<f64> = (0..6).map(|i| 8.0 * 2.0_f64.powi(i)).collect();
        let mut worst_exponent = 2.0_f64;
        for j in 0..m as usize {
            let mut mags = Vec::with_capacity(r_vals.len());
            for &r in &r_vals {
                mags.push(crate::testfn::build_matching_polynomial(&ctx, 1e-4, r, 0.0)?.d_coeffs[j].abs());
            }
            let fit = fit_decay(&r_vals, &mags, DecayModel::Power)?;
            if (fit.exponent - 2.0).abs() > (worst_exponent - 2.0).abs() {
                worst_exponent = fit.exponent;
            }
        }
        checks.push(line(
            format!("m={m}: every |d_j(R)| decays with exponent 2 +- 0.3"),
            (worst_exponent - 2.0).abs() < 0.3,
            format!("worst fitted exponent {worst_exponent:.4}"),
        ));
    }
    Ok(finish(8, "boundary matching", t0, checks))
}

/// 9: threshold certification. The gap between the glued trial's functional
/// value and the concentration threshold is required to track
/// (beta*/mu^2) |G|_L2^2 within a factor of two; the measured gap carries an
/// additional inner-region term of the same order (the second moment of the
/// peak expansion), which pushes the ratio to ~3.6 for m=1 and ~2.05 for
/// m=2, so those sub-checks fail honestly.
fn criterion_threshold_certification() -> Result<CriterionReport> {
    let t0 = Instant::now();
    let mut checks = Vec::new();
    for m in [1u32, 2] {
        let ctx = build_context(m)?;
        let green = solve_green(&ctx, 0.0, 1.0, 1e-12)?;
        let l2 = green.l2_norm_sq();
        let c_val = green.c();
        let i_m = ctx.i_m_or_compute();
        let k = ctx.two_m_over_beta_star().to_f64();
        let beta_star = ctx.beta_star.to_f64();

        let tf = assemble_test_function(&ctx, &green, 1e-4)?;
        let gap = evaluate_threshold_gap(&ctx, &tf)?;
        if m == 1 {
            let carleson_chang = PI * (1.0 + std::f64::consts::E);
            checks.push(line(
                "m=1 eps=1e-4: F exceeds pi(1+e)",
                gap.f_value > carleson_chang,
                format!("F = {:.9} vs {carleson_chang:.9}", gap.f_value),
            ));
        } else {
            checks.push(line(
                "m=2 eps=1e-4: F exceeds the derived threshold",
                gap.gap > 0.0,
                format!("F = {:.9}, threshold {:.9}", gap.f_value, gap.threshold),
            ));
        }
        let tracked = beta_star / tf.mu_sq() * l2;
        let ratio = gap.gap / tracked;
        checks.push(line(
            format!("m={m}: gap tracks (beta*/mu^2)|G|^2 within factor 2"),
            (0.5..=2.0).contains(&ratio),
            format!(
                "gap {:.6e}, tracked {tracked:.6e}, ratio {ratio:.3} (inner moment term omitted by the model)",
                gap.gap
            ),
        ));

        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for &eps in &[1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7] {
            let tfe = assemble_test_function(&ctx, &green, eps)?;
            let predicted = -k * (2.0 * eps).ln() + c_val + i_m;
            xs.push(tfe.r_eps());
            ys.push((tfe.mu_sq() - predicted).abs());
        }
        let fit = fit_decay(&xs, &ys, DecayModel::PowerLog)?;
        checks.push(line(
            format!("m={m}: mu^2 remainder fits R^-2 log R (exponent 2 +- 0.5)"),
            (fit.exponent - 2.0).abs() < 0.5,
            format!("fitted exponent {:.4}", fit.exponent),
        ));
    }
    checks.push(runtime_check(t0, 60.0));
    Ok(finish(9, "threshold certification", t0, checks))
}

/// 10: maximizer solver soundness on the disk.
fn criterion_solver_soundness() -> Result<CriterionReport> {
    let t0 = Instant::now();
    let mut checks = Vec::new();
    let ctx = build_context(1)?;
    let beta_star = ctx.beta_star.to_f64();
    let mut previous_s = 0.0;
    for frac in [0.5, 0.7, 0.9] {
        let cfg = ProblemConfig::new(&ctx, 1.0, 0.0, frac * beta_star);
        let sol = maximize_subcritical(&ctx, &cfg)?;
        checks.push(line(
            format!("beta = {frac} beta*: EL residual < 1e-8"),
            sol.el_residual() < 1e-8,
            format!("residual {:.2e} after {} iterations", sol.el_residual(), sol.iterations()),
        ));
        checks.push(line(
            format!("beta = {frac} beta*: S non-decreasing"),
            sol.f_value() >= previous_s - 1e-9,
            format!("S = {:.9}", sol.f_value()),
        ));
        let oracle = truncated_bubble_oracle(frac * beta_star)?;
        checks.push(line(
            format!("beta = {frac} beta*: S >= family oracle - 1e-6"),
            sol.f_value() >= oracle - 1e-6,
            format!("S = {:.9} vs oracle {oracle:.9}", sol.f_value()),
        ));
        previous_s = sol.f_value();
    }
    let (l1, _) = first_eigenpair(&ctx, 1.0, RadialGrid::graded(1.0, 768))?;
    checks.push(line(
        "lambda_1 = j_{0,1}^2 within 1e-4",
        (l1 - DISK_LAMBDA_1).abs() < 1e-4,
        format!("solver {l1:.10} vs Bessel oracle {DISK_LAMBDA_1:.10}"),
    ));
    Ok(finish(10, "maximizer solver soundness", t0, checks))
}

/// Best functional value over the two-parameter truncated-log family,
/// H^1-normalized, by direct quadrature.
fn truncated_bubble_oracle(beta: f64) -> Result<f64> {
    let mut best = 0.0_f64;
    for is in 0..12 {
        let s = 1e-3 * (0.5_f64 / 1e-3).powf(f64::from(is) / 11.0);
        for ir in 0..6 {
            let rho = 0.4 + 0.6 * f64::from(ir) / 5.0;
            let v = move |r: f64| ((1.0 + (rho / s).powi(2)) / (1.0 + (r / s).powi(2))).ln();
            let dv_sq = move |r: f64| {
                let d = -2.0 * r / (s * s) / (1.0 + (r / s).powi(2));
                d * d * r
            };
            let h1 = 2.0 * PI * quad::integrate(&dv_sq, 0.0, rho, 1e-11)?;
            let a = 1.0 / h1.sqrt();
            let f_in = 2.0
                * PI
                * quad::integrate(
                    &move |r: f64| {
                        let t = a * v(r);
                        (beta * t * t).exp() * r
                    },
                    0.0,
                    rho,
                    1e-11,
                )?;
            best = best.max(f_in + PI * (1.0 - rho * rho));
        }
    }
    Ok(best)
}

/// 11: blow-up trends along the continuation. The peak prediction
/// |Omega| + 1/(lambda mu^2) is required to land within 15% of F at
/// 0.99 beta*; on the disk the maximizer branch does not concentrate (the
/// critical extremal exists), the prediction converges to the concentration
/// threshold rather than to F, and the measured offset is ~24%, so that
/// sub-check fails honestly.
fn criterion_blowup_trends() -> Result<CriterionReport> {
    let t0 = Instant::now();
    let mut checks = Vec::new();
    let ctx = build_context(1)?;
    let beta_star = ctx.beta_star.to_f64();
    let mut sols = Vec::new();
    for frac in [0.9, 0.95, 0.99] {
        let cfg = ProblemConfig::new(&ctx, 1.0, 0.0, frac * beta_star);
        sols.push(maximize_subcritical(&ctx, &cfg)?);
    }
    let trail = sols[2].continuation_trail();
    let trail_monotone = trail.windows(2).all(|w| w[1].1 > w[0].1);
    checks.push(line(
        "mu increases monotonically along continuation to 0.99 beta*",
        trail_monotone,
        format!(
            "stage peaks {:?}",
            trail.iter().map(|&(_, mu)| (mu * 1e4).round() / 1e4).collect::<Vec<_>>()
        ),
    ));
    let mut sup_errors = Vec::new();
    for sol in &sols {
        sup_errors.push(blowup_diagnostics(&ctx, sol)?.profile_sup_error);
    }
    let decreasing = sup_errors.windows(2).all(|w| w[1] < w[0]);
    let error_list = sup_errors
        .iter()
        .map(|e| format!("{e:.2e}"))
        .collect::<Vec<_>>()
        .join(", ");
    checks.push(line(
        "profile_sup_error decreases across {0.9, 0.95, 0.99} beta*",
        decreasing,
        format!("sup errors [{error_list}]"),
    ));
    let d99 = blowup_diagnostics(&ctx, &sols[2])?;
    let f99 = sols[2].f_value();
    let rel = (d99.predicted_s - f99) / f99;
    checks.push(line(
        "|Omega| + 1/(lambda mu^2) within 15% of F at 0.99 beta*",
        rel.abs() < 0.15,
        format!(
            "predicted {:.6} vs F {f99:.6} ({:+.1}%; branch does not concentrate)",
            d99.predicted_s,
            100.0 * rel
        ),
    ));
    Ok(finish(11, "blow-up trends", t0, checks))
}

/// 12: Pohozaev identity on converged solutions and manufactured pairs.
fn criterion_pohozaev() -> Result<CriterionReport> {
    let t0 = Instant::now();
    let mut checks = Vec::new();
    for (m, alpha_frac, beta_frac) in [(1u32, 0.3, 0.7), (2, 0.0, 0.5)] {
        let ctx = build_context(m)?;
        let lam1 = lowest_eigenvalue(&ctx, 1.0)?;
        let cfg = ProblemConfig::new(&ctx, 1.0, alpha_frac * lam1, beta_frac * ctx.beta_star.to_f64());
        let sol = maximize_subcritical(&ctx, &cfg)?;
        let rep = pohozaev_residual(&ctx, &sol)?;
        checks.push(line(
            format!("m={m}: converged-solution residual < 1e-6"),
            rep.residual < 1e-6,
            format!("residual {:.2e}", rep.residual),
        ));
    }
    for m in [1u32, 2] {
        let converged = manufactured_pohozaev_residual(m, 2048)?;
        checks.push(line(
            format!("m={m}: manufactured-pair residual < 1e-6"),
            converged < 1e-6,
            format!("residual {converged:.2e} on 2048 nodes"),
        ));
        let coarse = manufactured_pohozaev_residual(m, 32)?;
        let fine = manufactured_pohozaev_residual(m, 64)?;
        checks.push(line(
            format!("m={m}: >= 4x reduction under grid doubling"),
            coarse >= 4.0 * fine,
            format!("32 nodes {coarse:.2e} vs 64 nodes {fine:.2e}"),
        ));
    }
    Ok(finish(12, "Pohozaev identity", t0, checks))
}

/// Identity residual for the oscillatory manufactured profile
/// (1-r^2)^m cos(5r) with all boundary data and the volume term produced by
/// the sampled-grid operator table.
fn manufactured_pohozaev_residual(m: u32, n_nodes: usize) -> Result<f64> {
    use std::collections::BTreeMap;
    let ctx = build_context(m)?;
    let grid = RadialGrid::graded(1.0, n_nodes);
    let u = RadialProfile::from_fn(grid.clone(), |r| {
        (1.0 - r * r).powi(m as i32) * (5.0 * r).cos()
    })?;
    let table = RadialOperatorTable::new(grid.clone(), m, 2 * m)?;
    let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
    let h_vals: Vec<f64> = table
        .apply_polyharmonic(&u, 2 * m)?
        .iter()
        .map(|&v| sign * v)
        .collect();
    let du_vals = table.apply_polyharmonic(&u, 1)?;
    let hdu = RadialProfile::new(
        grid.clone(),
        h_vals.iter().zip(&du_vals).map(|(&h, &d)| -h * d).collect(),
    )?;
    let cum = hdu.cumulative_weighted(0)?;
    let total = *cum.last().unwrap();
    let h_profile = RadialProfile::new(grid.clone(), cum.iter().map(|&c| total - c).collect())?;
    let mut ladder = Vec::with_capacity(2 * m as usize);
    for j in 0..2 * m {
        ladder.push(table.apply_polyharmonic(&u, j)?[grid.n() - 1]);
    }
    let zder = table.z_derivatives(u.values(), m as usize)?;
    let big_r = grid.r_max();
    let mut du = Vec::with_capacity(m as usize + 1);
    for i in 0..=m as usize {
        let mut terms: BTreeMap<(i32, usize), f64> = BTreeMap::new();
        terms.insert((0, 0), 1.0);
        for _ in 0..i {
            let mut next: BTreeMap<(i32, usize), f64> = BTreeMap::new();
            for (&(p, b), &c) in &terms {
                if p != 0 {
                    *next.entry((p - 1, b)).or_insert(0.0) += c * f64::from(p);
                }
                *next.entry((p + 1, b + 1)).or_insert(0.0) += 2.0 * c;
            }
            terms = next;
        }
        let val = terms
            .iter()
            .map(|(&(p, b), &c)| c * big_r.powi(p) * zder[b][grid.n() - 1])
            .sum();
        du.push(val);
    }
    Ok(assemble_pohozaev(&ctx, 1.0, &ladder, &du, &h_profile, 0.0)?.residual)
}

/// 13: divergence past the first eigenvalue.
fn criterion_divergence_demo() -> Result<CriterionReport> {
    let t0 = Instant::now();
    let mut checks = Vec::new();
    let ctx = build_context(1)?;
    let beta_star = ctx.beta_star.to_f64();
    let lam1 = lowest_eigenvalue(&ctx, 1.0)?;
    let ts = [0.0, 0.5, 1.0, 1.5, 2.0];
    // The demo itself enforces |t phi|_alpha^2 <= 1e-9 for every t and
    // errors out otherwise.
    let out = supercritical_divergence_demo(&ctx, 1.0, 1.1 * lam1, beta_star, &ts)?;
    checks.push(line(
        "alpha = 1.1 lambda_1: all scanned multiples stay in the constraint set",
        true,
        format!("membership verified for {} scan points", out.len()),
    ));
    let best = out.iter().fold(0.0_f64, |a, &(_, f)| a.max(f));
    checks.push(line(
        "F exceeds 10 |Omega| at some scanned t",
        best > 10.0 * PI,
        format!("max F = {best:.3} vs 10|Omega| = {:.3}", 10.0 * PI),
    ));
    Ok(finish(13, "supercritical divergence", t0, checks))
}

/// 14 (library half): discrete integration-by-parts self-test on radial
/// polynomial pairs. The command-line determinism half of this criterion
/// lives with the command-line crate's own acceptance checks.
fn criterion_discrete_by_parts() -> Result<CriterionReport> {
    let t0 = Instant::now();
    let mut checks = Vec::new();
    for m in [1u32, 2, 3] {
        let ctx = build_context(m)?;
        // Truncation is identically zero on polynomial data, so the node
        // count only needs to keep order-2m differencing roundoff below the
        // tolerance; finer grids amplify it.
        let grid = RadialGrid::graded(1.0, 128);
        let table = RadialOperatorTable::new(grid.clone(), m, 2 * m)?;
        let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
        let mut worst = 0.0_f64;
        for (a, b) in [(0i32, 0i32), (0, 2), (2, 1)] {
            let u = RadialProfile::from_fn(grid.clone(), |r| {
                (1.0 - r * r).powi(m as i32) * r.powi(2 * a)
            })?;
            let v = RadialProfile::from_fn(grid.clone(), |r| {
                (1.0 - r * r).powi(m as i32) * r.powi(2 * b)
            })?;
            let hu = table.apply_polyharmonic(&u, m)?;
            let hv = table.apply_polyharmonic(&v, m)?;
            let pair_half = RadialProfile::new(
                grid.clone(),
                hu.iter().zip(&hv).map(|(&x, &y)| x * y).collect(),
            )?
            .integrate_weighted(ctx.dim - 1)?;
            let pv = table.apply_polyharmonic(&v, 2 * m)?;
            let pair_full = RadialProfile::new(
                grid.clone(),
                u.values().iter().zip(&pv).map(|(&x, &y)| x * sign * y).collect(),
            )?
            .integrate_weighted(ctx.dim - 1)?;
            worst = worst.max(((pair_half - pair_full) / pair_full).abs());
        }
        checks.push(line(
            format!("m={m}: <Delta^(m/2)u, Delta^(m/2)v> = <u, (-Delta)^m v> within 1e-8"),
            worst < 1e-8,
            format!("max relative gap {worst:.2e} over 3 polynomial pairs"),
        ));
    }
    Ok(finish(14, "discrete integration by parts", t0, checks))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn criterion_ids_are_validated() {
        assert!(criterion(0).is_err());
        assert!(criterion(15).is_err());
    }

    #[test]
    fn fast_criteria_pass() {
        for id in [1u32, 3, 14] {
            let rep = criterion(id).unwrap();
            assert!(rep.passed, "criterion {id}: {:#?}", rep.checks);
        }
    }

    #[test]
    fn reports_serialize() {
        let rep = criterion(1).unwrap();
        let json = serde_json::to_value(&rep).unwrap();
        assert_eq!(json["id"], 1);
        assert!(json["checks"].as_array().unwrap().len() >= 4);
    }
}


//! Glued radial test functions that certify the strict threshold crossing:
//! a rescaled bubble matched to the Green function across an interface at
//! `ε |log ε|` by a radially symmetric polynomial, normalized to unit
//! α-energy, and fed to the exponential functional.
//!
//! The matching polynomial depends only on the interface geometry, not on
//! the normalization, so assembly is a single pass: solve the small matching
//! system, compute the energy split by quadrature, divide.

use serde::Serialize;

use crate::bubble::{eta0, BubbleLadder};
use crate::constants::DimensionContext;
use crate::error::{Error, Result};
use crate::greens::{GreenFunction, LogPoly};
use crate::numerics::quad;

/// Exact `i`-th radial derivative of the standard profile
/// `η_0(r) = -(m/β*) log(1 + r²/4)`, for `i >= 1`.
///
/// `η_0' = -(2m/β*) r/(4+r²)`; differentiating rational forms
/// `r^a Q(z)/(4+z)^t` in `z = r²` stays in that family via
/// `d/dr -> r^{a-1}[ aQ(4+z) + 2z(4+z)Q' - 2tzQ ]/(4+z)^{t+1}`.
pub fn eta0_radial_derivative(ctx: &DimensionContext, order: u32, r: f64) -> f64 {
    assert!(order >= 1, "use eta0 for the zeroth derivative");
    let k = ctx.two_m_over_beta_star().to_f64();
    // State: r^a * Q(z) / (4+z)^t with Q in ascending powers of z.
    let mut a: i32 = 1;
    let mut t: i32 = 1;
    let mut q: Vec<f64> = vec![-k];
    for _ in 1..order {
        let deg = q.len() - 1;
        let mut next = vec![0.0; deg + 2];
        for (s, &c) in q.iter().enumerate() {
            let sf = s as f64;
            // a Q (4+z)
            next[s] += f64::from(a) * 4.0 * c;
            next[s + 1] += f64::from(a) * c;
            // 2 z (4+z) Q' : term c s z^{s-1} -> 2 c s (4 z^s + z^{s+1})
            if s >= 1 {
                next[s] += 8.0 * sf * c;
                next[s + 1] += 2.0 * sf * c;
            }
            // -2 t z Q
            next[s + 1] += -2.0 * f64::from(t) * c;
        }
        a -= 1;
        t += 1;
        q = next;
    }
    let z = r * r;
    let mut poly = 0.0;
    for &c in q.iter().rev() {
        poly = poly * z + c;
    }
    r.powi(a) * poly / (4.0 + z).powi(t)
}

/// The radially symmetric polynomial `p(r) = -μ² + Σ_{j<m} c_j r^{2j}` that
/// matches the rescaled bubble to the outer log profile across `r = ε R`
/// with `C^{m-1}` contact.
#[derive(Debug, Clone, Serialize)]
pub struct MatchingPolynomial {
    pub m: u32,
    pub eps: f64,
    /// Interface multiplier: the contact radius is `eps * r_mult`.
    pub r_mult: f64,
    /// Normalization offset carried by the constant term of `p`.
    pub mu: f64,
    /// Interface-scale coefficients `d_j(R)`, `j = 0..m-1`; all `O(R^{-2})`.
    pub d_coeffs: Vec<f64>,
    /// Physical coefficients `c_j(ε, R)` of `r^{2j}`.
    pub c_coeffs: Vec<f64>,
}

impl MatchingPolynomial {
    /// `p(r)`.
    pub fn eval(&self, r: f64) -> f64 {
        let z = r * r;
        let mut acc = 0.0;
        for &c in self.c_coeffs.iter().rev() {
            acc = acc * z + c;
        }
        acc - self.mu * self.mu
    }

    /// Scaled contact residuals at the interface: for each derivative order
    /// `i = 0..m-1`, the defect of
    /// `η_0(r/ε) + (2m/β*) log r + Σ_j c_j r^{2j}` relative to the largest
    /// competing term.
    pub fn matching_residuals(&self, ctx: &DimensionContext) -> Vec<f64> {
        assert_eq!(ctx.m, self.m);
        let k = ctx.two_m_over_beta_star().to_f64();
        let r0 = self.eps * self.r_mult;
        let mut out = Vec::with_capacity(self.m as usize);
        for i in 0..self.m {
            let mut terms: Vec<f64> = Vec::new();
            if i == 0 {
                terms.push(eta0(ctx, self.r_mult));
                terms.push(k * r0.ln());
                let mut acc = 0.0;
                for (j, &c) in self.c_coeffs.iter().enumerate() {
                    acc += c * r0.powi(2 * j as i32);
                }
                terms.push(acc);
            } else {
                terms.push(
                    eta0_radial_derivative(ctx, i, self.r_mult) / self.eps.powi(i as i32),
                );
                let sign = if i % 2 == 1 { 1.0 } else { -1.0 };
                let mut fact = 1.0;
                for t in 1..i {
                    fact *= f64::from(t);
                }
                terms.push(k * sign * fact / r0.powi(i as i32));
                let mut acc = 0.0;
                for (j, &c) in self.c_coeffs.iter().enumerate() {
                    let p = 2 * j as i32;
                    if p >= i as i32 {
                        let mut fall = 1.0;
                        for t in 0..i as i32 {
                            fall *= f64::from(p - t);
                        }
                        acc += c * fall * r0.powi(p - i as i32);
                    }
                }
                terms.push(acc);
            }
            let scale = terms.iter().fold(0.0_f64, |m, &t| m.max(t.abs())).max(1e-300);
            let defect: f64 = terms.iter().sum();
            out.push(defect.abs() / scale);
        }
        out
    }
}

/// Solve the `C^{m-1}` contact conditions for the matching coefficients.
///
/// The interface-scale unknowns `d_j = c_j (εR)^{2j}` (j >= 1) satisfy, for
/// each derivative order `i = 1..m-1`,
/// `Σ_j [(2j)!/(2j-i)!] d_j = (2m/β*)(-1)^i (i-1)! - R^i η_0^{(i)}(R)`,
/// and the value condition fixes
/// `d_0 = -η_0(R) - (2m/β*) log(R/2) - Σ_{j>=1} d_j`.
pub fn build_matching_polynomial(
    ctx: &DimensionContext,
    eps: f64,
    r_mult: f64,
    mu: f64,
) -> Result<MatchingPolynomial> {
    let m = ctx.m;
    if !(eps.is_finite() && eps > 0.0) {
        return Err(Error::InvalidInput(format!("eps must be positive, got {eps}")));
    }
    if !(r_mult.is_finite() && r_mult >= 4.0) {
        return Err(Error::InvalidInput(format!(
            "interface multiplier must be at least 4, got {r_mult}"
        )));
    }
    let k = ctx.two_m_over_beta_star().to_f64();
    let nsys = (m - 1) as usize;
    let mut d = vec![0.0; m as usize];
    if nsys > 0 {
        let mut mat = vec![vec![0.0; nsys]; nsys];
        let mut rhs = vec![0.0; nsys];
        for i in 1..m {
            for j in 1..m {
                let p = 2 * j as i32;
                if p >= i as i32 {
                    let mut fall = 1.0;
                    for t in 0..i as i32 {
                        fall *= f64::from(p - t);
                    }
                    mat[(i - 1) as usize][(j - 1) as usize] = fall;
                }
            }
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            let mut fact = 1.0;
            for t in 1..i {
                fact *= f64::from(t);
            }
            rhs[(i - 1) as usize] = k * sign * fact
                - r_mult.powi(i as i32) * eta0_radial_derivative(ctx, i, r_mult);
        }
        let sol = crate::numerics::linalg::solve_dense(&mat, &rhs)?;
        d[1..].copy_from_slice(&sol);
    }
    d[0] = -eta0(ctx, r_mult) - k * (r_mult / 2.0).ln() - d[1..].iter().sum::<f64>();

    let r0 = eps * r_mult;
    let mut c = Vec::with_capacity(m as usize);
    c.push(-k * (2.0 * eps).ln() + d[0]);
    for j in 1..m as usize {
        c.push(d[j] / r0.powi(2 * j as i32));
    }
    Ok(MatchingPolynomial {
        m,
        eps,
        r_mult,
        mu,
        d_coeffs: d,
        c_coeffs: c,
    })
}

/// A glued, normalized test function: rescaled bubble + matching polynomial
/// + Green corrector inside the interface, the Green function outside,
/// divided by its own α-norm `μ`.
#[derive(Debug, Clone)]
pub struct TestFunction {
    m: u32,
    alpha: f64,
    eps: f64,
    /// `|log ε|`.
    r_eps: f64,
    /// `ε R_ε`, the gluing radius.
    interface_radius: f64,
    ball_radius: f64,
    /// `μ_ε² = ‖ũ_ε‖²_α`.
    mu_sq: f64,
    /// `m/β*` (profile scale) and `2m/β*` (log coefficient).
    eta_scale: f64,
    omega_odd: f64,
    /// Energy split pieces (of the unnormalized function).
    inner_energy: f64,
    outer_energy: f64,
    inner_l2: f64,
    outer_l2: f64,
    green: GreenFunction,
    matching: MatchingPolynomial,
    /// `C + ψ + Σ c_j r^{2j}` (the smooth inner part besides the bubble).
    inner_smooth: LogPoly,
}

/// Output of the threshold comparison.
#[derive(Debug, Clone, Serialize)]
pub struct ThresholdGap {
    #[serde(rename = "F_value")]
    pub f_value: f64,
    pub threshold: f64,
    pub gap: f64,
}

/// Serializable summary of an assembled test function.
#[derive(Debug, Clone, Serialize)]
pub struct TestFnReport {
    pub m: u32,
    pub alpha: f64,
    pub eps: f64,
    #[serde(rename = "R_eps")]
    pub r_eps: f64,
    pub mu_eps_sq: f64,
    #[serde(rename = "F_value")]
    pub f_value: f64,
    pub threshold: f64,
    pub gap: f64,
}

impl TestFunction {
    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn r_eps(&self) -> f64 {
        self.r_eps
    }

    pub fn interface_radius(&self) -> f64 {
        self.interface_radius
    }

    pub fn mu_sq(&self) -> f64 {
        self.mu_sq
    }

    pub fn inner_energy(&self) -> f64 {
        self.inner_energy
    }

    pub fn outer_energy(&self) -> f64 {
        self.outer_energy
    }

    pub fn inner_l2(&self) -> f64 {
        self.inner_l2
    }

    pub fn outer_l2(&self) -> f64 {
        self.outer_l2
    }

    pub fn matching(&self) -> &MatchingPolynomial {
        &self.matching
    }

    pub fn green(&self) -> &GreenFunction {
        &self.green
    }

    fn eta0_at(&self, y: f64) -> f64 {
        -self.eta_scale * (y * y / 4.0).ln_1p()
    }

    /// Unnormalized value `ũ_ε(r)`.
    fn raw_value(&self, r: f64) -> f64 {
        if r <= self.interface_radius {
            self.eta0_at(r / self.eps) + self.inner_smooth.eval(r)
        } else {
            self.green.value(r)
        }
    }

    /// Normalized value `u_ε(r) = ũ_ε(r)/μ_ε`.
    pub fn value(&self, r: f64) -> f64 {
        self.raw_value(r) / self.mu_sq.sqrt()
    }

    /// Contact defects of the unnormalized function at the interface:
    /// `|∂_r^i (inner - outer)|` relative to the larger side, `i = 0..m-1`.
    pub fn continuity_residuals(&self, ctx: &DimensionContext) -> Vec<f64> {
        assert_eq!(ctx.m, self.m);
        let r0 = self.interface_radius;
        let mut out = Vec::with_capacity(self.m as usize);
        let mut smooth = self.inner_smooth.clone();
        let mut outer = self.green.as_log_poly();
        for i in 0..self.m {
            let inner_val = if i == 0 {
                self.eta0_at(self.r_eps) + smooth.eval(r0)
            } else {
                eta0_radial_derivative(ctx, i, self.r_eps) / self.eps.powi(i as i32)
                    + smooth.eval(r0)
            };
            let outer_val = outer.eval(r0);
            let scale = inner_val.abs().max(outer_val.abs()).max(1e-300);
            out.push((inner_val - outer_val).abs() / scale);
            smooth = smooth.derivative();
            outer = outer.derivative();
        }
        out
    }

    /// `F_β(u_ε) = ∫_Ω e^{β u_ε²} dx`, evaluated with the peak factored out
    /// in log space so extreme normalizations cannot overflow.
    pub fn functional(&self, beta: f64) -> Result<f64> {
        if !(beta.is_finite() && beta >= 0.0) {
            return Err(Error::InvalidInput(format!(
                "exponent coefficient must be non-negative, got {beta}"
            )));
        }
        let mu = self.mu_sq.sqrt();
        let dim = 2 * self.m as i32;
        // Peak exponent; subtracted per node and restored once.
        let u0 = self.raw_value(0.0) / mu;
        let peak = beta * u0 * u0;

        let inner = |y: f64| {
            let u = (self.eta0_at(y) + self.inner_smooth.eval(self.eps * y)) / mu;
            (beta * u * u - peak).exp() * y.powi(dim - 1)
        };
        let mut pts = vec![0.0, 1.0];
        while *pts.last().unwrap() < self.r_eps {
            let next = (pts.last().unwrap() * 2.0).min(self.r_eps);
            pts.push(next);
        }
        let inner_int = quad::integrate_over_partition(&inner, &pts, 1e-11)?;
        // log of ω ε^{2m} e^{peak} ∫ ...
        let log_inner = self.omega_odd.ln()
            + f64::from(dim) * self.eps.ln()
            + peak
            + inner_int.ln();
        let inner_piece = log_inner.exp();

        let outer = |r: f64| {
            let u = self.green.value(r) / mu;
            (beta * u * u).exp() * r.powi(dim - 1)
        };
        let mut opts = Vec::new();
        let steps = 24;
        for i in 0..=steps {
            opts.push(
                self.interface_radius
                    * (self.ball_radius / self.interface_radius)
                        .powf(f64::from(i) / f64::from(steps)),
            );
        }
        let outer_piece = self.omega_odd * quad::integrate_over_partition(&outer, &opts, 1e-11)?;
        Ok(inner_piece + outer_piece)
    }

    /// Sampled `(r, u_ε(r))` rows.
    pub fn profile_rows(&self, n: usize) -> Vec<(f64, f64)> {
        let n = n.max(2);
        (0..=n)
            .map(|i| {
                let r = self.ball_radius * i as f64 / n as f64;
                (r, self.value(r))
            })
            .collect()
    }
}

/// Assemble the glued test function at concentration scale `eps` from a
/// solved Green function, normalizing by the α-norm computed from the
/// inner/outer energy split. The construction is normalization-independent,
/// so no iteration is involved.
pub fn assemble_test_function(
    ctx: &DimensionContext,
    green: &GreenFunction,
    eps: f64,
) -> Result<TestFunction> {
    assert_eq!(ctx.m, green.m(), "context dimension mismatch");
    let m = ctx.m;
    let dim = 2 * m as i32;
    if !(eps.is_finite() && eps > 0.0 && eps <= 0.1) {
        return Err(Error::InvalidInput(format!(
            "concentration scale must lie in (0, 0.1], got {eps}"
        )));
    }
    let r_eps = -eps.ln();
    let r0 = eps * r_eps;
    if r0 >= green.ball_radius() / 2.0 {
        return Err(Error::InvalidInput(format!(
            "interface radius {r0} reaches past half the ball radius"
        )));
    }
    let matching = build_matching_polynomial(ctx, eps, r_eps, 0.0)?;

    let mut inner_smooth = green.corrector().clone();
    for (j, &c) in matching.c_coeffs.iter().enumerate() {
        inner_smooth.add_scaled(&LogPoly::monomial(2 * m, 2 * j as i32, 1.0), c);
    }
    let mut inner_smooth_ladder = inner_smooth.clone();
    for _ in 0..m / 2 {
        inner_smooth_ladder = inner_smooth_ladder.laplacian();
    }
    if m % 2 == 1 {
        inner_smooth_ladder = inner_smooth_ladder.derivative();
    }

    let ladder = BubbleLadder::new(ctx);
    let omega_odd = ctx.omega_odd.to_f64();
    let eta_scale = 0.5 * ctx.two_m_over_beta_star().to_f64();

    // Inner pieces in the rescaled variable y = r/ε. The top ladder level of
    // the rescaled bubble is ε^{-m} B(y), so the energy integrand is O(1).
    let eps_m = eps.powi(m as i32);
    let energy_integrand = |y: f64| {
        let v = ladder.eval(m, y) + eps_m * inner_smooth_ladder.eval(eps * y);
        v * v * y.powi(dim - 1)
    };
    let mut pts = vec![0.0, 1.0];
    while *pts.last().unwrap() < r_eps {
        let next = (pts.last().unwrap() * 2.0).min(r_eps);
        pts.push(next);
    }
    let inner_energy = omega_odd * quad::integrate_over_partition(&energy_integrand, &pts, 1e-12)?;
    let l2_integrand = |y: f64| {
        let v = -eta_scale * (y * y / 4.0).ln_1p() + inner_smooth.eval(eps * y);
        v * v * y.powi(dim - 1)
    };
    let inner_l2 =
        omega_odd * eps.powi(dim) * quad::integrate_over_partition(&l2_integrand, &pts, 1e-12)?;

    // Outer pieces on [r0, ball_radius].
    let outer_ladder = green.half_ladder(m);
    let outer_energy_integrand = |r: f64| {
        let v = outer_ladder.eval(r);
        v * v * r.powi(dim - 1)
    };
    let mut opts = Vec::new();
    let steps = 24;
    for i in 0..=steps {
        opts.push(r0 * (green.ball_radius() / r0).powf(f64::from(i) / f64::from(steps)));
    }
    let outer_energy =
        omega_odd * quad::integrate_over_partition(&outer_energy_integrand, &opts, 1e-12)?;
    let outer_l2_integrand = |r: f64| {
        let v = green.value(r);
        v * v * r.powi(dim - 1)
    };
    let outer_l2 = omega_odd * quad::integrate_over_partition(&outer_l2_integrand, &opts, 1e-12)?;

    let alpha = green.alpha();
    let mu_sq = inner_energy + outer_energy - alpha * (inner_l2 + outer_l2);
    if !(mu_sq.is_finite() && mu_sq > 0.0) {
        return Err(Error::InvalidInput(format!(
            "assembled function has non-positive squared norm {mu_sq}"
        )));
    }

    Ok(TestFunction {
        m,
        alpha,
        eps,
        r_eps,
        interface_radius: r0,
        ball_radius: green.ball_radius(),
        mu_sq,
        eta_scale,
        omega_odd,
        inner_energy,
        outer_energy,
        inner_l2,
        outer_l2,
        green: green.clone(),
        matching,
        inner_smooth,
    })
}

/// Compare `F_{β*}(u_ε)` against the compactness threshold
/// `|Ω| + (ω_{2m}/2^{2m}) e^{β*(C - I_m)}`.
pub fn evaluate_threshold_gap(ctx: &DimensionContext, tf: &TestFunction) -> Result<ThresholdGap> {
    assert_eq!(ctx.m, tf.m);
    let beta_star = ctx.beta_star.to_f64();
    let f_value = tf.functional(beta_star)?;
    let volume = ctx.omega_odd.to_f64() * tf.ball_radius.powi(2 * tf.m as i32)
        / f64::from(2 * tf.m);
    let threshold = volume
        + ctx.omega_even.to_f64() / 4.0_f64.powi(tf.m as i32)
            * (beta_star * (tf.green.c() - ctx.i_m_or_compute())).exp();
    Ok(ThresholdGap {
        f_value,
        threshold,
        gap: f_value - threshold,
    })
}

/// Full serializable summary (assembly + threshold comparison).
pub fn test_function_report(ctx: &DimensionContext, tf: &TestFunction) -> Result<TestFnReport> {
    let gap = evaluate_threshold_gap(ctx, tf)?;
    Ok(TestFnReport {
        m: tf.m,
        alpha: tf.alpha,
        eps: tf.eps,
        r_eps: tf.r_eps,
        mu_eps_sq: tf.mu_sq,
        f_value: gap.f_value,
        threshold: gap.threshold,
        gap: gap.gap,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::build_context;
    use crate::greens::{green_energy_expansion, lowest_eigenvalue, solve_green};
    use crate::numerics::{fit_decay, DecayModel};
    use std::f64::consts::PI;

    /// Independent closed form for the η_0 derivatives: with
    /// w = r/(4+r²) = Re (r-2i)^{-1}, the s-th derivative is
    /// (-1)^s s! ρ^{-(s+1)} cos((s+1)φ) with ρ = |r-2i|, φ = arg(r-2i),
    /// and η_0^{(i)} = -(2m/β*) w^{(i-1)}. Returns (value, magnitude scale);
    /// the cosine can vanish, so errors are judged against the modulus.
    fn eta0_derivative_oracle(k: f64, order: u32, r: f64) -> (f64, f64) {
        let s = order - 1;
        let rho = r.hypot(2.0);
        let phi = (-2.0_f64).atan2(r);
        let mut fact = 1.0;
        for t in 1..=s {
            fact *= f64::from(t);
        }
        let sign = if s % 2 == 0 { 1.0 } else { -1.0 };
        let scale = k * fact * rho.powi(-(s as i32) - 1);
        (
            -sign * scale * ((s as f64 + 1.0) * phi).cos(),
            scale,
        )
    }

    #[test]
    fn profile_derivatives_match_complex_closed_form() {
        for m in [1u32, 2, 3] {
            let ctx = build_context(m).unwrap();
            let k = ctx.two_m_over_beta_star().to_f64();
            for order in 1..=5 {
                for &r in &[0.5, 2.0, 10.0] {
                    let got = eta0_radial_derivative(&ctx, order, r);
                    let (want, scale) = eta0_derivative_oracle(k, order, r);
                    assert!(
                        (got - want).abs() <= 1e-12 * scale,
                        "m={m} order={order} r={r}: {got} vs {want}"
                    );
                }
            }
            // First derivative agrees with the half-ladder gradient level.
            let ladder = BubbleLadder::new(&ctx);
            for &r in &[0.3, 1.0, 4.0] {
                let got = eta0_radial_derivative(&ctx, 1, r);
                let want = ladder.eval(1, r);
                assert!((got - want).abs() < 1e-15 * want.abs().max(1e-3));
            }
        }
    }

    #[test]
    fn disk_matching_constant_closed_form() {
        // m = 1: d_0(R) = -η_0(R) - (2/β*) log(R/2) = (1/4π) log(1 + 4/R²).
        let ctx = build_context(1).unwrap();
        for &r_mult in &[4.0, 10.0, 100.0] {
            let p = build_matching_polynomial(&ctx, 1e-3, r_mult, 0.0).unwrap();
            let expected = (1.0 + 4.0 / (r_mult * r_mult)).ln() / (4.0 * PI);
            assert!(
                (p.d_coeffs[0] - expected).abs() < 1e-15,
                "R={r_mult}: {} vs {expected}",
                p.d_coeffs[0]
            );
        }
    }

    #[test]
    fn matching_contact_is_exact() {
        for m in 1..=4 {
            let ctx = build_context(m).unwrap();
            for &r_mult in &[8.0, 64.0] {
                for &eps in &[1e-3, 1e-5] {
                    let p = build_matching_polynomial(&ctx, eps, r_mult, 0.7).unwrap();
                    for (i, res) in p.matching_residuals(&ctx).iter().enumerate() {
                        assert!(
                            *res < 1e-9,
                            "m={m} R={r_mult} eps={eps}: order {i} residual {res:e}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn matching_coefficients_decay_quadratically() {
        for m in [2u32, 3, 4] {
            let ctx = build_context(m).unwrap();
            let r_vals: Vec<f64> = (0..6).map(|i| 8.0 * 2.0_f64.powi(i)).collect();
            for j in 0..m as usize {
                let mags: Vec<f64> = r_vals
                    .iter()
                    .map(|&r| {
                        build_matching_polynomial(&ctx, 1e-4, r, 0.0).unwrap().d_coeffs[j].abs()
                    })
                    .collect();
                let fit = fit_decay(&r_vals, &mags, DecayModel::Power).unwrap();
                assert!(
                    (fit.exponent - 2.0).abs() < 0.3,
                    "m={m} j={j}: exponent {}",
                    fit.exponent
                );
            }
        }
    }

    #[test]
    fn interface_bounds_are_stable() {
        // sup_{B_{εR}} |p + μ² + (2m/β*) log(2ε)| ≤ K R^{-2} and
        // sup |Δ^{m/2} p| ≤ K' ε^{-m} R^{-m-2}, with both prefactors stable
        // across R (within a factor 4).
        for m in [2u32, 3] {
            let ctx = build_context(m).unwrap();
            let eps = 1e-4;
            let mut k1 = Vec::new();
            let mut k2 = Vec::new();
            for i in 0..6 {
                let r_mult = 8.0 * 2.0_f64.powi(i);
                let p = build_matching_polynomial(&ctx, eps, r_mult, 0.0).unwrap();
                let r0 = eps * r_mult;
                let k = ctx.two_m_over_beta_star().to_f64();
                // p + μ² + k log(2ε) = d_0 + Σ_{j>=1} c_j r^{2j}.
                let mut sup1 = 0.0_f64;
                let mut sup2 = 0.0_f64;
                for t in 0..=32 {
                    let r = r0 * f64::from(t) / 32.0;
                    let v = p.eval(r) + k * (2.0 * eps).ln();
                    sup1 = sup1.max(v.abs());
                    // Scalar m/2-th ladder level of the polynomial part.
                    let mut poly = LogPoly::zero(2 * m);
                    for (j, &c) in p.c_coeffs.iter().enumerate() {
                        poly.add_scaled(&LogPoly::monomial(2 * m, 2 * j as i32, 1.0), c);
                    }
                    let mut lad = poly;
                    for _ in 0..m / 2 {
                        lad = lad.laplacian();
                    }
                    if m % 2 == 1 {
                        lad = lad.derivative();
                    }
                    sup2 = sup2.max(lad.eval(r).abs());
                }
                k1.push(sup1 * r_mult * r_mult);
                k2.push(sup2 * eps.powi(m as i32) * r_mult.powi(m as i32 + 2));
            }
            for ks in [&k1, &k2] {
                let max = ks.iter().fold(0.0_f64, |a, &b| a.max(b));
                let min = ks.iter().fold(f64::INFINITY, |a, &b| a.min(b));
                assert!(
                    max / min < 4.0,
                    "m={m}: prefactors not stable: {ks:?}"
                );
            }
        }
    }

    #[test]
    fn assembled_function_is_smooth_across_interface() {
        for (m, alpha_frac) in [(1u32, 0.0), (1, 0.3), (2, 0.0), (2, 0.3), (3, 0.0)] {
            let ctx = build_context(m).unwrap();
            let alpha = if alpha_frac > 0.0 {
                alpha_frac * lowest_eigenvalue(&ctx, 1.0).unwrap()
            } else {
                0.0
            };
            let g = solve_green(&ctx, alpha, 1.0, 1e-11).unwrap();
            let tf = assemble_test_function(&ctx, &g, 1e-4).unwrap();
            for (i, res) in tf.continuity_residuals(&ctx).iter().enumerate() {
                assert!(
                    *res < 1e-9,
                    "m={m} alpha={alpha}: order {i} jump {res:e}"
                );
            }
            assert!(tf.mu_sq() > 0.0);
        }
    }

    #[test]
    fn normalization_expansion_rate() {
        // μ_ε² = -(2m/β*) log(2ε) + C + I_m + O(R_ε^{-2} log R_ε).
        for (m, alpha_frac) in [(1u32, 0.0), (1, 0.3), (2, 0.0)] {
            let ctx = build_context(m).unwrap();
            let alpha = if alpha_frac > 0.0 {
                alpha_frac * lowest_eigenvalue(&ctx, 1.0).unwrap()
            } else {
                0.0
            };
            let g = solve_green(&ctx, alpha, 1.0, 1e-11).unwrap();
            let k = ctx.two_m_over_beta_star().to_f64();
            let mut xs = Vec::new();
            let mut gaps = Vec::new();
            for i in 2..=9 {
                let eps = 10.0_f64.powi(-i);
                let tf = assemble_test_function(&ctx, &g, eps).unwrap();
                let predicted = -k * (2.0 * eps).ln() + g.c() + ctx.i_m_or_compute();
                xs.push(tf.r_eps());
                gaps.push((tf.mu_sq() - predicted).abs());
            }
            let fit = fit_decay(&xs, &gaps, DecayModel::PowerLog).unwrap();
            assert!(
                (fit.exponent - 2.0).abs() < 0.5,
                "m={m} alpha={alpha}: exponent {}",
                fit.exponent
            );
        }
        // Spot value on the disk: μ² ≈ (1/2π)|log 2ε| - 1/(4π) at ε = 1e-4.
        let ctx = build_context(1).unwrap();
        let g = solve_green(&ctx, 0.0, 1.0, 1e-11).unwrap();
        let tf = assemble_test_function(&ctx, &g, 1e-4).unwrap();
        let predicted = -(2.0e-4_f64).ln() / (2.0 * PI) - 1.0 / (4.0 * PI);
        assert!(
            (tf.mu_sq() - predicted).abs() < 0.02,
            "{} vs {predicted}",
            tf.mu_sq()
        );
    }

    #[test]
    fn energy_split_matches_predictions() {
        // Inner energy tends to the finite-ball bubble energy law in R_ε;
        // outer energy matches the Green expansion prediction at δ = εR_ε.
        for (m, alpha_frac) in [(1u32, 0.0), (1, 0.3), (2, 0.0)] {
            let ctx = build_context(m).unwrap();
            let alpha = if alpha_frac > 0.0 {
                alpha_frac * lowest_eigenvalue(&ctx, 1.0).unwrap()
            } else {
                0.0
            };
            let g = solve_green(&ctx, alpha, 1.0, 1e-11).unwrap();
            let k = ctx.two_m_over_beta_star().to_f64();
            let mut xs = Vec::new();
            let mut devs = Vec::new();
            for i in 2..=9 {
                let eps = 10.0_f64.powi(-i);
                let tf = assemble_test_function(&ctx, &g, eps).unwrap();
                let bubble_law = k * (tf.r_eps() / 2.0).ln() + ctx.i_m_or_compute()
                    - ctx.h_m.to_f64();
                xs.push(tf.r_eps());
                devs.push((tf.inner_energy() - bubble_law).abs());
            }
            let fit = fit_decay(&xs, &devs, DecayModel::PowerLog).unwrap();
            assert!(
                (fit.exponent - 2.0).abs() < 0.6,
                "m={m} alpha={alpha}: inner energy exponent {}",
                fit.exponent
            );

            let tf = assemble_test_function(&ctx, &g, 1e-4).unwrap();
            let rep = green_energy_expansion(&ctx, &g, tf.interface_radius()).unwrap();
            // Same integral, independently partitioned quadratures.
            assert!(
                (tf.outer_energy() - rep.lhs).abs() < 1e-9 * rep.lhs.abs(),
                "m={m} alpha={alpha}: outer {} vs lhs {}",
                tf.outer_energy(),
                rep.lhs
            );
            // The closed-form prediction differs by the genuine expansion
            // residual, O(δ² log δ) at δ = εR_ε ≈ 9.2e-4.
            assert!(
                (tf.outer_energy() - rep.rhs_prediction).abs() < 1e-5,
                "m={m} alpha={alpha}: outer {} vs prediction {}",
                tf.outer_energy(),
                rep.rhs_prediction
            );
        }
    }

    #[test]
    fn disk_threshold_is_carleson_chang() {
        // m=1, α=0: threshold = π(1 + e).
        let ctx = build_context(1).unwrap();
        let g = solve_green(&ctx, 0.0, 1.0, 1e-11).unwrap();
        let tf = assemble_test_function(&ctx, &g, 1e-4).unwrap();
        let out = evaluate_threshold_gap(&ctx, &tf).unwrap();
        let expected = PI * (1.0 + std::f64::consts::E);
        assert!(
            (out.threshold - expected).abs() < 1e-9,
            "threshold {} vs {expected}",
            out.threshold
        );
        assert!(out.gap > 0.0, "gap {}", out.gap);

        // β = 0 turns the functional into the plain volume.
        let f0 = tf.functional(0.0).unwrap();
        assert!(((f0 - PI) / PI).abs() < 1e-10, "F_0 = {f0}");
    }

    #[test]
    fn four_ball_threshold_closed_form() {
        // m=2, α=0: C - I_2 = -1/(96π²), β* = 32π², so the threshold is
        // π²/2 + (π²/6) e^{-1/3}.
        let ctx = build_context(2).unwrap();
        let g = solve_green(&ctx, 0.0, 1.0, 1e-11).unwrap();
        let tf = assemble_test_function(&ctx, &g, 1e-4).unwrap();
        let out = evaluate_threshold_gap(&ctx, &tf).unwrap();
        let expected = PI * PI / 2.0 + PI * PI / 6.0 * (-1.0_f64 / 3.0).exp();
        assert!(
            (out.threshold - expected).abs() < 1e-9,
            "threshold {} vs {expected}",
            out.threshold
        );
        assert!(out.gap > 0.0, "gap {}", out.gap);
    }

    #[test]
    fn gap_tracks_inverse_normalization() {
        // The leading excess over the threshold is (β*/μ²) L with
        // L = ‖G‖²_{L²} + T_in · ⟨(η_0 - I_m)²⟩, where T_in is the inner
        // threshold contribution and the moment average is taken against the
        // limit profile measure (1 + y²/4)^{-2m} y^{2m-1} dy. The outer part
        // comes from linearizing e^{βG²/μ²} - 1; the inner part from the
        // second-order term of the peak expansion. The next correction is
        // positive and O(μ^{-4}), so gap·μ²/L decreases toward 1 from above.
        for (m, alpha_frac) in [(1u32, 0.0), (1, 0.3), (2, 0.0), (2, 0.3)] {
            let ctx = build_context(m).unwrap();
            let alpha = if alpha_frac > 0.0 {
                alpha_frac * lowest_eigenvalue(&ctx, 1.0).unwrap()
            } else {
                0.0
            };
            let g = solve_green(&ctx, alpha, 1.0, 1e-11).unwrap();
            let beta_star = ctx.beta_star.to_f64();
            let i_m = ctx.i_m_or_compute();
            let scale = f64::from(m) / beta_star;
            let weight =
                |y: f64| (1.0 + y * y / 4.0).powi(-2 * m as i32) * y.powi(2 * m as i32 - 1);
            let num = |y: f64| {
                let d = -scale * (y * y / 4.0).ln_1p() - i_m;
                d * d * weight(y)
            };
            let hint = 2.0 * f64::from(m) + 0.75;
            let w_m = quad::improper_integrate(&num, 0.0, 1e-12, hint).unwrap()
                / quad::improper_integrate(&weight, 0.0, 1e-12, hint).unwrap();
            let t_in = ctx.omega_even.to_f64() / 4.0_f64.powi(m as i32)
                * (beta_star * (g.c() - i_m)).exp();
            let l_limit = beta_star * (g.l2_norm_sq() + t_in * w_m);

            let mut prev_gap = f64::INFINITY;
            let mut prev_ratio = f64::INFINITY;
            for &eps in &[1e-4, 1e-5, 1e-6] {
                let tf = assemble_test_function(&ctx, &g, eps).unwrap();
                let out = evaluate_threshold_gap(&ctx, &tf).unwrap();
                assert!(out.gap > 0.0, "m={m} alpha={alpha} eps={eps}: gap {}", out.gap);
                assert!(
                    out.gap < prev_gap,
                    "m={m} alpha={alpha} eps={eps}: gap not decreasing"
                );
                let ratio = out.gap * tf.mu_sq() / l_limit;
                assert!(
                    ratio > 1.0 && ratio < 1.75,
                    "m={m} alpha={alpha} eps={eps}: gap·μ²/L = {ratio}"
                );
                assert!(
                    ratio < prev_ratio,
                    "m={m} alpha={alpha} eps={eps}: ratio {ratio} not approaching 1"
                );
                prev_gap = out.gap;
                prev_ratio = ratio;
            }
        }
    }

    #[test]
    fn report_serialization_shape() {
        let ctx = build_context(1).unwrap();
        let g = solve_green(&ctx, 0.0, 1.0, 1e-11).unwrap();
        let tf = assemble_test_function(&ctx, &g, 1e-3).unwrap();
        let rep = test_function_report(&ctx, &tf).unwrap();
        let json = serde_json::to_value(&rep).unwrap();
        assert_eq!(json["m"], 1);
        assert!(json["R_eps"].as_f64().unwrap() > 6.0);
        assert!(json["F_value"].as_f64().unwrap() > json["threshold"].as_f64().unwrap());
        let rows = tf.profile_rows(16);
        assert_eq!(rows.len(), 17);
        assert!(rows[0].1 > rows[16].1, "profile should peak at the center");
    }

    #[test]
    fn input_validation() {
        let ctx = build_context(1).unwrap();
        let g = solve_green(&ctx, 0.0, 1.0, 1e-11).unwrap();
        assert!(assemble_test_function(&ctx, &g, 0.0).is_err());
        assert!(assemble_test_function(&ctx, &g, 0.5).is_err());
        assert!(build_matching_polynomial(&ctx, 1e-3, 2.0, 0.0).is_err());
        assert!(build_matching_polynomial(&ctx, -1.0, 8.0, 0.0).is_err());
        let tf = assemble_test_function(&ctx, &g, 1e-3).unwrap();
        assert!(tf.functional(-1.0).is_err());
    }
}

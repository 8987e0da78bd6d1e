//! Radial Green function of `(-Δ)^m - α` on centered balls in `R^{2m}` with
//! Dirichlet conditions, its regular part, and the quadrature verification of
//! its boundary-energy expansion.
//!
//! The Green function splits as `G(r) = -(2m/β*) log r + h(r)` where the
//! corrector `h` is smooth. Every iterate of the solver lives in the ring of
//! finite sums `Σ r^p (a_p log r + b_p)`, which the polyharmonic operator and
//! its inverse map into itself term by term, so the solve is exact up to
//! floating-point rounding: no grids, no collocation. The α-coupling is
//! resolved by a damped fixed point (the Neumann series of `α (-Δ)^{-m}`),
//! which contracts precisely when `α` lies below the first Dirichlet
//! eigenvalue.

use std::collections::BTreeMap;

use num_traits::ToPrimitive;
use serde::Serialize;

use crate::constants::DimensionContext;
use crate::error::{Error, Result};
use crate::numerics::quad;

/// Finite sum `Σ_p r^p (a_p log r + b_p)` with integer powers `p`, closed
/// under the radial Laplacian of a fixed even ambient dimension, under `∂_r`,
/// and (for non-negative powers) under the inverse Laplacian that is smooth
/// at the origin.
#[derive(Debug, Clone)]
pub struct LogPoly {
    /// Ambient dimension `n = 2m`.
    dim: i32,
    /// Map power `p` -> `(a_p, b_p)`, the log and plain coefficients.
    terms: BTreeMap<i32, (f64, f64)>,
}

impl LogPoly {
    pub fn zero(dim: u32) -> Self {
        LogPoly {
            dim: dim as i32,
            terms: BTreeMap::new(),
        }
    }

    /// The term `coeff * r^p`.
    pub fn monomial(dim: u32, p: i32, coeff: f64) -> Self {
        let mut s = Self::zero(dim);
        s.add_term(p, 0.0, coeff);
        s
    }

    /// The term `coeff * log r`.
    pub fn log_term(dim: u32, coeff: f64) -> Self {
        let mut s = Self::zero(dim);
        s.add_term(0, coeff, 0.0);
        s
    }

    /// The term `coeff * r^p log r`.
    pub fn log_monomial(dim: u32, p: i32, coeff: f64) -> Self {
        let mut s = Self::zero(dim);
        s.add_term(p, coeff, 0.0);
        s
    }

    pub fn dim(&self) -> u32 {
        self.dim as u32
    }

    fn add_term(&mut self, p: i32, a: f64, b: f64) {
        let e = self.terms.entry(p).or_insert((0.0, 0.0));
        e.0 += a;
        e.1 += b;
        if e.0 == 0.0 && e.1 == 0.0 {
            self.terms.remove(&p);
        }
    }

    pub fn add_scaled(&mut self, other: &LogPoly, s: f64) {
        assert_eq!(self.dim, other.dim, "dimension mismatch in LogPoly sum");
        for (&p, &(a, b)) in &other.terms {
            self.add_term(p, s * a, s * b);
        }
    }

    pub fn scale(&mut self, s: f64) {
        for v in self.terms.values_mut() {
            v.0 *= s;
            v.1 *= s;
        }
    }

    /// Drop terms whose coefficients have underflowed to numerical dust so
    /// long fixed-point runs do not accumulate dead entries.
    fn prune(&mut self) {
        self.terms
            .retain(|_, &mut (a, b)| a.abs() > 1e-280 || b.abs() > 1e-280);
    }

    /// Largest power present (the polynomial degree when log-free).
    pub fn degree(&self) -> i32 {
        self.terms.keys().next_back().copied().unwrap_or(0)
    }

    /// True when no `log r` coefficient is present.
    pub fn is_log_free(&self) -> bool {
        self.terms.values().all(|&(a, _)| a == 0.0)
    }

    /// Value at radius `r >= 0`. At `r = 0` the sum must be a polynomial in
    /// non-negative powers (log terms there would be infinite).
    pub fn eval(&self, r: f64) -> f64 {
        if r == 0.0 {
            let mut v = 0.0;
            for (&p, &(a, b)) in &self.terms {
                assert!(
                    p >= 0 && (p > 0 || a == 0.0),
                    "evaluating a singular term at r = 0"
                );
                if p == 0 {
                    v += b;
                }
            }
            return v;
        }
        let lr = r.ln();
        let mut v = 0.0;
        for (&p, &(a, b)) in &self.terms {
            v += r.powi(p) * (a * lr + b);
        }
        v
    }

    /// Radial Laplacian in the ambient dimension:
    /// `Δ[r^p (a log r + b)] = r^{p-2}[ p(p+n-2) a log r + (2p+n-2) a + p(p+n-2) b ]`.
    pub fn laplacian(&self) -> LogPoly {
        let n = self.dim;
        let mut out = Self::zero(self.dim as u32);
        for (&p, &(a, b)) in &self.terms {
            let c = f64::from(p * (p + n - 2));
            let d = f64::from(2 * p + n - 2);
            out.add_term(p - 2, c * a, d * a + c * b);
        }
        out
    }

    /// Radial derivative: `∂_r[r^p (a log r + b)] = r^{p-1}[ p a log r + a + p b ]`.
    pub fn derivative(&self) -> LogPoly {
        let mut out = Self::zero(self.dim as u32);
        for (&p, &(a, b)) in &self.terms {
            let pf = f64::from(p);
            out.add_term(p - 1, pf * a, a + pf * b);
        }
        out
    }

    /// The particular solution of `Δ u = self` that is smooth at the origin
    /// and contains no added homogeneous part. Requires all powers to be
    /// non-negative, which keeps the target power `p + 2` away from the
    /// resonant kernel exponents `0` and `2 - n`.
    pub fn inverse_laplacian(&self) -> Result<LogPoly> {
        let n = self.dim;
        let mut out = Self::zero(self.dim as u32);
        for (&q, &(c, d)) in &self.terms {
            if q < 0 {
                return Err(Error::InvalidInput(format!(
                    "inverse Laplacian needs non-negative powers, found r^{q}"
                )));
            }
            let p = q + 2;
            let den = f64::from(p * (p + n - 2));
            let a = c / den;
            let b = (d - f64::from(2 * p + n - 2) * a) / den;
            out.add_term(p, a, b);
        }
        Ok(out)
    }

    /// Exact weighted inner product `∫_0^R f g r^{n-1} dr` for log-free
    /// sums (all integrals reduce to single powers of `R`).
    fn polynomial_inner(&self, other: &LogPoly, radius: f64) -> f64 {
        assert!(self.is_log_free() && other.is_log_free());
        let n = self.dim;
        let mut acc = 0.0;
        for (&p, &(_, b)) in &self.terms {
            for (&q, &(_, d)) in &other.terms {
                let s = p + q + n;
                acc += b * d * radius.powi(s) / f64::from(s);
            }
        }
        acc
    }
}

/// Converged radial Green function `G = -(2m/β*) log r + h` of
/// `(-Δ)^m - α` on the centered ball, with Dirichlet conditions
/// `∂_r^i G(ball_radius) = 0`, `i = 0..m-1`.
#[derive(Debug, Clone)]
pub struct GreenFunction {
    m: u32,
    alpha: f64,
    ball_radius: f64,
    /// `2m/β*`, the coefficient of `-log r`.
    log_coeff: f64,
    /// Smooth corrector `h`; the regular-part constant is `h(0)`.
    corrector: LogPoly,
    c: f64,
    l2_norm_sq: f64,
    iterations: usize,
    fixed_point_residual: f64,
}

/// Serializable summary of a solved Green function.
#[derive(Debug, Clone, Serialize)]
pub struct GreenReport {
    pub m: u32,
    pub alpha: f64,
    pub ball_radius: f64,
    #[serde(rename = "C")]
    pub c: f64,
    pub l2_norm_sq: f64,
    pub dirichlet_residuals: Vec<f64>,
    pub iterations: usize,
    pub fixed_point_residual: f64,
}

/// One evaluation of the boundary-energy expansion: the punctured-ball
/// energy against its predicted logarithmic form.
#[derive(Debug, Clone, Serialize)]
pub struct GreenEnergyReport {
    pub m: u32,
    pub alpha: f64,
    pub delta: f64,
    /// `∫_{Ω \ B_δ} |Δ^{m/2} G|² dx`.
    pub lhs: f64,
    /// `α ‖G‖² - (2m/β*) log δ + C + H_m`.
    pub rhs_prediction: f64,
    pub residual: f64,
}

impl GreenFunction {
    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn ball_radius(&self) -> f64 {
        self.ball_radius
    }

    /// Regular-part value at the center.
    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn l2_norm_sq(&self) -> f64 {
        self.l2_norm_sq
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    pub fn fixed_point_residual(&self) -> f64 {
        self.fixed_point_residual
    }

    /// `G(r)` for `0 < r <= ball_radius`.
    pub fn value(&self, r: f64) -> f64 {
        assert!(r > 0.0, "G is singular at the origin");
        -self.log_coeff * r.ln() + self.corrector.eval(r)
    }

    /// The remainder `ψ(r) = h(r) - C`, smooth with `ψ(0) = 0`.
    pub fn psi(&self, r: f64) -> f64 {
        self.corrector.eval(r) - self.c
    }

    /// `G` as a log-polynomial (for symbolic post-processing).
    pub(crate) fn as_log_poly(&self) -> LogPoly {
        let mut g = LogPoly::log_term(2 * self.m, -self.log_coeff);
        g.add_scaled(&self.corrector, 1.0);
        g
    }

    /// The smooth corrector `h = C + ψ` as a log-polynomial.
    pub(crate) fn corrector(&self) -> &LogPoly {
        &self.corrector
    }

    /// Scalar radial component of `Δ^{j/2} G`: for even `j` the iterated
    /// Laplacian, for odd `j` the radial derivative of the preceding level.
    pub fn half_ladder(&self, j: u32) -> LogPoly {
        assert!(j <= 2 * self.m, "ladder step out of range");
        let mut cur = self.as_log_poly();
        for _ in 0..j / 2 {
            cur = cur.laplacian();
        }
        if j % 2 == 1 {
            cur = cur.derivative();
        }
        cur
    }

    /// `|∂_r^i G(ball_radius)|` for `i = 0..m-1`; all should vanish.
    pub fn dirichlet_residuals(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.m as usize);
        let mut cur = self.as_log_poly();
        for _ in 0..self.m {
            out.push(cur.eval(self.ball_radius).abs());
            cur = cur.derivative();
        }
        out
    }

    /// Flux `∫_{∂B_δ} ν · Δ^{(2m-1)/2} G dσ`, which recovers the point-mass
    /// normalization `(-1)^m` as `δ -> 0`.
    pub fn distributional_mass(&self, delta: f64) -> f64 {
        assert!(delta > 0.0 && delta < self.ball_radius);
        let flux_density = self.half_ladder(2 * self.m - 1).eval(delta);
        let area = crate::constants::sphere_measure(2 * self.m - 1).to_f64()
            * delta.powi(2 * self.m as i32 - 1);
        area * flux_density
    }

    /// Summary for serialization.
    pub fn report(&self) -> GreenReport {
        GreenReport {
            m: self.m,
            alpha: self.alpha,
            ball_radius: self.ball_radius,
            c: self.c,
            l2_norm_sq: self.l2_norm_sq,
            dirichlet_residuals: self.dirichlet_residuals(),
            iterations: self.iterations,
            fixed_point_residual: self.fixed_point_residual,
        }
    }

    /// Sampled `(r, G(r), ψ(r))` rows, uniformly spaced with the origin
    /// excluded for `G`.
    pub fn profile_rows(&self, n: usize) -> Vec<(f64, f64, f64)> {
        let n = n.max(2);
        (1..=n)
            .map(|i| {
                let r = self.ball_radius * i as f64 / n as f64;
                (r, self.value(r), self.psi(r))
            })
            .collect()
    }
}

/// Damping factor of the α-coupling fixed point.
const DAMPING: f64 = 0.5;
/// Iteration cap of the α-coupling fixed point.
const MAX_ITERS: usize = 200;

/// Solve the centered Dirichlet problem for `(-Δ)^m - α` on `B_{ball_radius}`.
///
/// The corrector `h` in `G = -(2m/β*) log r + h` satisfies
/// `(-Δ)^m h = α G` with boundary data cancelling the log part's traces. For
/// `α = 0` this is a single exact polynomial solve; for `α > 0` the damped
/// iteration `h <- (1-θ) h + θ T(h)` is run until the sup-change over the
/// ball drops below `tol`, where `T` solves the linear problem at frozen
/// right-hand side.
pub fn solve_green(
    ctx: &DimensionContext,
    alpha: f64,
    ball_radius: f64,
    tol: f64,
) -> Result<GreenFunction> {
    let m = ctx.m;
    if !(ball_radius.is_finite() && ball_radius > 0.0) {
        return Err(Error::InvalidInput(format!(
            "ball radius must be positive, got {ball_radius}"
        )));
    }
    if !(alpha.is_finite() && alpha >= 0.0) {
        return Err(Error::InvalidInput(format!(
            "spectral shift must be non-negative, got {alpha}"
        )));
    }
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::InvalidInput(format!("tolerance must be positive, got {tol}")));
    }
    if alpha > 0.0 {
        let lambda1 = lowest_eigenvalue(ctx, ball_radius)?;
        if alpha >= lambda1 * (1.0 - 1e-12) {
            return Err(Error::InvalidInput(format!(
                "spectral shift {alpha} is not below the first Dirichlet eigenvalue {lambda1}"
            )));
        }
    }

    let k = ctx.two_m_over_beta_star().to_f64();
    let solver = DirichletSolver::new(m, ball_radius)?;

    // Boundary data: ∂_r^i h(R) must equal k ∂_r^i log r |_R so the traces of
    // G vanish. ∂_r^i log r = (-1)^{i-1} (i-1)! r^{-i} for i >= 1.
    let mut data = vec![k * ball_radius.ln()];
    let mut fact = 1.0;
    for i in 1..m {
        if i > 1 {
            fact *= f64::from(i - 1);
        }
        let sign = if i % 2 == 1 { 1.0 } else { -1.0 };
        data.push(k * sign * fact / ball_radius.powi(i as i32));
    }

    let sample_radii: Vec<f64> = (0..=32).map(|i| ball_radius * f64::from(i) / 32.0).collect();
    let mut h = solver.solve(&LogPoly::zero(2 * m), &data)?;
    let mut iterations = 0;
    let mut residual = 0.0;
    if alpha > 0.0 {
        let mut prev_change = f64::INFINITY;
        let mut growth_streak = 0usize;
        let mut converged = false;
        for iter in 1..=MAX_ITERS {
            // Right-hand side α G = α(-k log r + h).
            let mut rhs = LogPoly::log_term(2 * m, -alpha * k);
            rhs.add_scaled(&h, alpha);
            let target = solver.solve(&rhs, &data)?;
            let mut next = h.clone();
            next.scale(1.0 - DAMPING);
            next.add_scaled(&target, DAMPING);
            next.prune();
            let change = sample_radii
                .iter()
                .map(|&r| (next.eval(r) - h.eval(r)).abs())
                .fold(0.0_f64, f64::max);
            h = next;
            iterations = iter;
            residual = change;
            if change <= tol {
                converged = true;
                break;
            }
            if change > prev_change * 1.000001 {
                growth_streak += 1;
                if growth_streak >= 3 && change > 10.0 * tol {
                    return Err(Error::NonConvergence {
                        what: "green corrector fixed point (diverging)".into(),
                        iterations: iter,
                        residual: change,
                    });
                }
            } else {
                growth_streak = 0;
            }
            prev_change = change;
        }
        if !converged {
            return Err(Error::NonConvergence {
                what: "green corrector fixed point".into(),
                iterations,
                residual,
            });
        }
    }

    let c = h.eval(0.0);
    let mut g = GreenFunction {
        m,
        alpha,
        ball_radius,
        log_coeff: k,
        corrector: h,
        c,
        l2_norm_sq: 0.0,
        iterations,
        fixed_point_residual: residual,
    };
    g.l2_norm_sq = l2_norm_sq(&g)?;
    Ok(g)
}

/// Nested exact solver for `(-Δ)^m w = f` on the centered ball: the
/// particular solution is built by `m` term-wise inverse Laplacians (each a
/// second-order radial solve), and the `m` free even homogeneous solutions
/// `r^{2j}` are fixed by a small dense solve against the boundary data
/// `∂_r^i w(R) = data[i]`.
struct DirichletSolver {
    m: u32,
    radius: f64,
    /// Dense boundary matrix `M[i][j] = ∂_r^i r^{2j} |_R`.
    boundary_matrix: Vec<Vec<f64>>,
}

impl DirichletSolver {
    fn new(m: u32, radius: f64) -> Result<Self> {
        let mut boundary_matrix = Vec::with_capacity(m as usize);
        for i in 0..m as i32 {
            let mut row = Vec::with_capacity(m as usize);
            for j in 0..m as i32 {
                let p = 2 * j;
                if i > p {
                    row.push(0.0);
                } else {
                    let mut fall = 1.0;
                    for t in 0..i {
                        fall *= f64::from(p - t);
                    }
                    row.push(fall * radius.powi(p - i));
                }
            }
            boundary_matrix.push(row);
        }
        Ok(DirichletSolver {
            m,
            radius,
            boundary_matrix,
        })
    }

    fn solve(&self, f: &LogPoly, data: &[f64]) -> Result<LogPoly> {
        assert_eq!(data.len(), self.m as usize);
        // Particular solution of (-Δ)^m w = f, smooth at 0.
        let mut part = f.clone();
        for _ in 0..self.m {
            part = part.inverse_laplacian()?;
        }
        if self.m % 2 == 1 {
            part.scale(-1.0);
        }
        // Fit the homogeneous part to the boundary data.
        let mut rhs = Vec::with_capacity(self.m as usize);
        let mut cur = part.clone();
        for i in 0..self.m as usize {
            rhs.push(data[i] - cur.eval(self.radius));
            cur = cur.derivative();
        }
        let kappa = crate::numerics::linalg::solve_dense(&self.boundary_matrix, &rhs)?;
        for (j, &k_j) in kappa.iter().enumerate() {
            part.add_scaled(&LogPoly::monomial(2 * self.m, 2 * j as i32, 1.0), k_j);
        }
        Ok(part)
    }
}

/// First Dirichlet eigenvalue of `(-Δ)^m` on the centered ball, by power
/// iteration on the inverse with exact polynomial arithmetic: iterates stay
/// log-free, inner products reduce to closed-form power integrals, and the
/// Rayleigh quotient converges geometrically in the squared spectral gap.
pub fn lowest_eigenvalue(ctx: &DimensionContext, ball_radius: f64) -> Result<f64> {
    let m = ctx.m;
    if !(ball_radius.is_finite() && ball_radius > 0.0) {
        return Err(Error::InvalidInput(format!(
            "ball radius must be positive, got {ball_radius}"
        )));
    }
    let solver = DirichletSolver::new(m, ball_radius)?;
    let zero_data = vec![0.0; m as usize];

    // Start from (1 - (r/R)^2)^m, which satisfies the Dirichlet conditions.
    let mut u = LogPoly::zero(2 * m);
    for i in 0..=m {
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        let coeff = sign * crate::constants::binomial(m, i).to_f64().expect("small binomial");
        u.add_scaled(
            &LogPoly::monomial(2 * m, 2 * i as i32, 1.0),
            coeff / ball_radius.powi(2 * i as i32),
        );
    }

    let mut nu_prev = 0.0;
    for iter in 1..=120 {
        let w = solver.solve(&u, &zero_data)?;
        let nu = w.polynomial_inner(&u, ball_radius) / u.polynomial_inner(&u, ball_radius);
        if !(nu.is_finite() && nu > 0.0) {
            return Err(Error::NonConvergence {
                what: "eigenvalue power iteration".into(),
                iterations: iter,
                residual: nu,
            });
        }
        if (nu - nu_prev).abs() <= 1e-14 * nu {
            return Ok(1.0 / nu);
        }
        nu_prev = nu;
        u = w;
        u.scale(1.0 / nu);
        u.prune();
    }
    Ok(1.0 / nu_prev)
}

/// `‖G‖²_{L²}` with the `log²` singularity handled analytically on an inner
/// collar `[0, δ_0]` (where `ψ` is negligible) and adaptive quadrature on a
/// log-graded partition outside it.
fn l2_norm_sq(g: &GreenFunction) -> Result<f64> {
    let n = 2 * g.m as i32;
    let nf = f64::from(n);
    let k = g.log_coeff;
    let delta0 = 1e-6_f64.min(g.ball_radius / 4.0);
    // ∫_0^δ r^{n-1} log^j r dr for j = 0, 1, 2.
    let dn = delta0.powi(n);
    let ld = delta0.ln();
    let i0 = dn / nf;
    let i1 = dn * (ld / nf - 1.0 / (nf * nf));
    let i2 = dn * (ld * ld / nf - 2.0 * ld / (nf * nf) + 2.0 / (nf * nf * nf));
    let inner = k * k * i2 - 2.0 * k * g.c * i1 + g.c * g.c * i0;

    let mut points = Vec::new();
    let steps = 24;
    for i in 0..=steps {
        points.push(delta0 * (g.ball_radius / delta0).powf(f64::from(i) / f64::from(steps)));
    }
    let integrand = |r: f64| {
        let v = g.value(r);
        v * v * r.powi(n - 1)
    };
    let outer = quad::integrate_over_partition(&integrand, &points, 1e-11)?;
    Ok(crate::constants::sphere_measure(2 * g.m - 1).to_f64() * (inner + outer))
}

/// Evaluate the boundary-energy expansion of a solved Green function on the
/// punctured ball `Ω \ B_δ`: the energy of the top scalar ladder level
/// against `α‖G‖² - (2m/β*) log δ + C + H_m`.
pub fn green_energy_expansion(
    ctx: &DimensionContext,
    g: &GreenFunction,
    delta: f64,
) -> Result<GreenEnergyReport> {
    assert_eq!(ctx.m, g.m, "context dimension mismatch");
    if !(delta > 0.0 && delta < g.ball_radius / 2.0) {
        return Err(Error::InvalidInput(format!(
            "delta must lie in (0, ball_radius/2), got {delta}"
        )));
    }
    let n = 2 * g.m as i32;
    let ladder = g.half_ladder(g.m);
    let integrand = |r: f64| {
        let v = ladder.eval(r);
        v * v * r.powi(n - 1)
    };
    let mut points = Vec::new();
    let steps = 24;
    for i in 0..=steps {
        points.push(delta * (g.ball_radius / delta).powf(f64::from(i) / f64::from(steps)));
    }
    let lhs = crate::constants::sphere_measure(2 * g.m - 1).to_f64()
        * quad::integrate_over_partition(&integrand, &points, 1e-11)?;
    let rhs_prediction = g.alpha * g.l2_norm_sq - g.log_coeff * delta.ln() + g.c
        + ctx.h_m.to_f64();
    Ok(GreenEnergyReport {
        m: g.m,
        alpha: g.alpha,
        delta,
        lhs,
        rhs_prediction,
        residual: lhs - rhs_prediction,
    })
}

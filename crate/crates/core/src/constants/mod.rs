//! Dimensional constants for the conformally invariant maximization problem
//! in even dimension `2m`.
//!
//! All closed-form constants (sphere measures, the critical exponent, the
//! fundamental-solution tables) are built in exact rational-times-pi-power
//! arithmetic and cross-checked against independent identities at
//! construction time. Only the bubble self-energy `i_m`, which has no closed
//! form, is obtained by quadrature.

mod exact;

pub use exact::{binomial, double_factorial, factorial, ExactConstant};

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::One;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::quad;

/// Largest supported `m`. The exact tables stay cheap well beyond this, but
/// the quadrature-backed quantities have only been validated up to here.
pub const MAX_M: u32 = 12;

/// Total surface measure of the unit sphere `S^l` in `R^{l+1}`.
///
/// Odd `l = 2k-1`: `2 pi^k / (k-1)!`. Even `l = 2k`: `2^{k+1} pi^k / (2k-1)!!`.
pub fn sphere_measure(l: u32) -> ExactConstant {
    assert!(l >= 1, "sphere dimension must be at least 1");
    if l % 2 == 1 {
        let k = (l + 1) / 2;
        ExactConstant::from_big_ratio(BigInt::from(2), factorial(k - 1), k as i32)
    } else {
        let k = l / 2;
        ExactConstant::from_big_ratio(
            BigInt::one() << (k + 1),
            double_factorial(2 * i64::from(k) - 1),
            k as i32,
        )
    }
}

/// Exact constants tied to a fixed even dimension `2m`, plus the lazily
/// computed bubble self-energy.
#[derive(Debug, Serialize)]
pub struct DimensionContext {
    /// Half the dimension; the operator order.
    pub m: u32,
    /// Ambient dimension `2m`.
    pub dim: u32,
    /// Measure of `S^{2m-1}` (the sphere bounding the unit ball in `R^{2m}`).
    pub omega_odd: ExactConstant,
    /// Measure of `S^{2m}`.
    pub omega_even: ExactConstant,
    /// Critical exponent `beta* = m (2m-1)! omega_even`.
    pub beta_star: ExactConstant,
    /// `gamma_m = omega_odd 2^{2m-2} ((m-1)!)^2`; equals `beta*/(2m)`.
    pub gamma_m: ExactConstant,
    /// `k_tilde[l-1]` holds the coefficient of `|x|^{-2l}` in the `l`-fold
    /// Laplacian of `log|x|`, for `l = 1..m-1` (empty when `m = 1`).
    pub k_tilde_table: Vec<ExactConstant>,
    /// `k_table[j-1]` holds the half-integer ladder coefficient for the
    /// `j/2`-fold Laplacian of `log|x|`, for `j = 1..2m-1`.
    pub k_table: Vec<ExactConstant>,
    /// Boundary cross-term constant of the punctured-ball energy expansion.
    pub h_m: ExactConstant,
    /// Bubble self-energy; `None` until [`compute_i_m`] has run.
    #[serde(skip)]
    i_m: OnceLock<f64>,
}

impl DimensionContext {
    /// `2m / beta*` as an exact constant (the fundamental-solution coefficient).
    pub fn two_m_over_beta_star(&self) -> ExactConstant {
        &ExactConstant::from_integer(2 * i64::from(self.m)) / &self.beta_star
    }

    /// `K_{m, j/2}` for `1 <= j <= 2m-1`.
    pub fn k_half(&self, j: u32) -> &ExactConstant {
        assert!(
            (1..=2 * self.m - 1).contains(&j),
            "half-ladder index j={} out of range for m={}",
            j,
            self.m
        );
        &self.k_table[(j - 1) as usize]
    }

    /// `K~_{m,l}` for `1 <= l <= m-1`.
    pub fn k_tilde(&self, l: u32) -> &ExactConstant {
        assert!(
            (1..self.m).contains(&l),
            "ladder index l={} out of range for m={}",
            l,
            self.m
        );
        &self.k_tilde_table[(l - 1) as usize]
    }

    /// Bubble self-energy if it has been computed.
    pub fn i_m(&self) -> Option<f64> {
        self.i_m.get().copied()
    }

    /// Bubble self-energy, computing it at the default tolerance on first use.
    pub fn i_m_or_compute(&self) -> f64 {
        match self.i_m() {
            Some(v) => v,
            None => compute_i_m(self, 1e-12).expect("bubble self-energy quadrature"),
        }
    }
}

fn k_tilde_value(m: u32, l: u32) -> ExactConstant {
    // (-1)^{l+1} 2^{2l-1} (l-1)! (m-1)! / (m-l-1)!
    let mut num = factorial(l - 1) * factorial(m - 1) * (BigInt::one() << (2 * l - 1));
    if (l + 1) % 2 == 1 {
        num = -num;
    }
    ExactConstant::from_big_ratio(num, factorial(m - l - 1), 0)
}

fn k_half_value(j: u32, k_tilde: &[ExactConstant]) -> ExactConstant {
    if j == 1 {
        ExactConstant::one()
    } else if j % 2 == 0 {
        k_tilde[(j / 2 - 1) as usize].clone()
    } else {
        let l = (j - 1) / 2;
        &ExactConstant::from_integer(-(i64::from(j) - 1)) * &k_tilde[(l - 1) as usize]
    }
}

/// Build the full exact-constant context for half-dimension `m`.
///
/// Construction verifies, with zero tolerance, the two closure identities of
/// the half-ladder table (the normalization of the top coefficient against
/// the sphere measure, and the square identity at the middle index) and the
/// agreement of the two independent formulas for the boundary constant `h_m`.
pub fn build_context(m: u32) -> Result<DimensionContext> {
    if m == 0 || m > MAX_M {
        return Err(Error::InvalidInput(format!(
            "m must be in 1..={MAX_M}, got {m}"
        )));
    }
    let dim = 2 * m;
    let omega_odd = sphere_measure(dim - 1);
    let omega_even = sphere_measure(dim);

    let beta_star = {
        let lead = ExactConstant::from_big_ratio(
            BigInt::from(m) * factorial(2 * m - 1),
            BigInt::one(),
            0,
        );
        &lead * &omega_even
    };

    let gamma_m = {
        let fac = factorial(m - 1);
        let sq = ExactConstant::from_big_ratio(&fac * &fac * (BigInt::one() << (2 * m - 2)), BigInt::one(), 0);
        &omega_odd * &sq
    };
    assert_eq!(
        gamma_m,
        &beta_star / &ExactConstant::from_integer(2 * i64::from(m)),
        "gamma_m must equal beta*/(2m)"
    );

    let k_tilde_table: Vec<ExactConstant> = (1..m).map(|l| k_tilde_value(m, l)).collect();
    let k_table: Vec<ExactConstant> = (1..dim)
        .map(|j| k_half_value(j, &k_tilde_table))
        .collect();

    let two_m_over_beta = &ExactConstant::from_integer(2 * i64::from(m)) / &beta_star;

    // Top-coefficient normalization: (2m/beta*) K_{m,(2m-1)/2} = (-1)^{m-1} / omega_odd.
    {
        let lhs = &two_m_over_beta * &k_table[(dim - 2) as usize];
        let mut rhs = omega_odd.recip();
        if (m - 1) % 2 == 1 {
            rhs = -&rhs;
        }
        assert_eq!(lhs, rhs, "half-ladder top coefficient normalization failed");
    }

    // Middle-index square identity: omega_odd (2m/beta*) K_{m,m/2}^2 = 1.
    {
        let k_mid = &k_table[(m - 1) as usize];
        let lhs = &(&omega_odd * &two_m_over_beta) * &(k_mid * k_mid);
        assert_eq!(lhs, ExactConstant::one(), "half-ladder square identity failed");
    }

    let h_m = h_from_boundary_sum(m, &beta_star, &omega_odd, &k_table);
    let h_alt = h_from_reciprocal_sum(m, &beta_star);
    assert_eq!(h_m, h_alt, "boundary constant formulas disagree");

    Ok(DimensionContext {
        m,
        dim,
        omega_odd,
        omega_even,
        beta_star,
        gamma_m,
        k_tilde_table,
        k_table,
        h_m,
        i_m: OnceLock::new(),
    })
}

/// `h_m` from the alternating sum of products of half-ladder coefficients.
fn h_from_boundary_sum(
    m: u32,
    beta_star: &ExactConstant,
    omega_odd: &ExactConstant,
    k_table: &[ExactConstant],
) -> ExactConstant {
    if m == 1 {
        return ExactConstant::zero();
    }
    let two_m_over_beta = &ExactConstant::from_integer(2 * i64::from(m)) / beta_star;
    let prefactor = &(&two_m_over_beta * &two_m_over_beta) * omega_odd;
    let mut sum = ExactConstant::zero();
    for j in 1..m {
        let term = &k_table[(j - 1) as usize] * &k_table[(2 * m - j - 2) as usize];
        let signed = if (j + m) % 2 == 1 { -&term } else { term };
        sum = &sum + &signed;
    }
    &prefactor * &sum
}

/// `h_m` from the signed harmonic sum `(m/beta*) sum_j (-1)^{floor(2j/m)} / j`.
fn h_from_reciprocal_sum(m: u32, beta_star: &ExactConstant) -> ExactConstant {
    if m == 1 {
        return ExactConstant::zero();
    }
    let mut sum = ExactConstant::zero();
    for j in 1..m {
        let sign = if (2 * j / m) % 2 == 1 { -1 } else { 1 };
        sum = &sum + &ExactConstant::from_ratio(sign, i64::from(j));
    }
    &(&ExactConstant::from_integer(i64::from(m)) / beta_star) * &sum
}

/// `h_constant` returns the boundary constant after re-deriving it both ways.
pub fn h_constant(ctx: &DimensionContext) -> ExactConstant {
    let a = h_from_boundary_sum(ctx.m, &ctx.beta_star, &ctx.omega_odd, &ctx.k_table);
    let b = h_from_reciprocal_sum(ctx.m, &ctx.beta_star);
    assert_eq!(a, b, "boundary constant formulas disagree");
    a
}

/// Bubble self-energy
/// `i_m = -(m 4^{2m} / (beta* omega_even)) * integral over R^{2m} of
/// log(1+|y|^2/4) / (4+|y|^2)^{2m}`.
///
/// The radial reduction is integrated with the improper-integral routine;
/// the result is cached on the context and always negative.
pub fn compute_i_m(ctx: &DimensionContext, rel_tol: f64) -> Result<f64> {
    if let Some(v) = ctx.i_m() {
        return Ok(v);
    }
    let m = ctx.m;
    let four_pow = ExactConstant::from_big_ratio(BigInt::one() << (4 * m), BigInt::one(), 0);
    let prefactor = &(&ExactConstant::from_integer(i64::from(m)) * &four_pow)
        / &(&ctx.beta_star * &ctx.omega_even);
    let scale = -(&prefactor * &ctx.omega_odd).to_f64();

    let exponent = 2 * m as i32;
    let integrand = move |r: f64| {
        let q = 4.0 + r * r;
        (1.0 + r * r / 4.0).ln() / q.powi(exponent) * r.powi(exponent - 1)
    };
    // The integrand decays like log(r) r^{-(2m+1)}; the hint feeds the tail bound.
    let tail = quad::improper_integrate(&integrand, 0.0, rel_tol, 2.0 * f64::from(m) + 1.0)?;
    let value = scale * tail;
    let _ = ctx.i_m.set(value);
    Ok(value)
}

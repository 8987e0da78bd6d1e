//! High-order radial differential operators through the squared-radius
//! coordinate.
//!
//! A smooth radial function of `r` in `R^{2m}` is an analytic function of
//! `z = r^2`, and the Laplacian acts there as `4 z d^2/dz^2 + 4 m d/dz`.
//! Working in `z` halves every derivative order (the `m`-fold Laplacian
//! needs `2m` z-derivatives instead of `4m` r-derivatives) and removes the
//! coordinate singularity at the origin. Each node gets one local
//! least-squares polynomial fit from which all derivative orders are read;
//! operators are never chained discretely, which is what keeps high powers
//! from amplifying roundoff.
//!
//! Odd half-steps are radial derivatives: step `2l+1` of the ladder is
//! `d/dr` applied to the `l`-fold Laplacian, i.e. the signed modulus of its
//! gradient.

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::numerics::grid::{RadialGrid, RadialProfile};
use crate::numerics::linalg::{solve_dense, QrFactor};

/// Extra polynomial degrees beyond the highest requested z-derivative.
const DEGREE_MARGIN: usize = 6;
/// Extra window nodes beyond the fit degree (least-squares smoothing rows).
const WINDOW_MARGIN: usize = 8;
/// Highest half-step count the sampled-grid tables support; beyond this the
/// local Vandermonde systems become too ill-conditioned to be trustworthy.
const MAX_TABLE_HALF_STEPS: u32 = 16;

/// Coefficients `c_{l,k}` of `Delta^l = sum_{k=l}^{2l} c_{l,k} z^{k-l} d^k/dz^k`
/// in dimension `2m`, exact integers returned as `f64`.
///
/// Recurrence (apply `4 z d^2 + 4 m d` once more):
/// `c_{l+1,k} = 4(k-l)(k-l-1+m) c_{l,k} + (8(k-1-l)+4m) c_{l,k-1} + 4 c_{l,k-2}`.
pub fn laplacian_power_coeffs(m: u32, l: u32) -> Vec<f64> {
    let mut c: Vec<BigInt> = vec![BigInt::one()]; // l = 0: identity
    for step in 0..l {
        let lcur = i64::from(step); // current table is for Delta^lcur
        // Delta^{l+1} spans derivative orders l+1 ..= 2l+2: one entry more.
        let mut next: Vec<BigInt> = vec![BigInt::zero(); c.len() + 1];
        for (idx, coeff) in c.iter().enumerate() {
            let k = lcur + idx as i64; // derivative order of this term
            // Contributions land at orders k, k+1, k+2 of Delta^{lcur+1},
            // whose table starts at order lcur+1.
            let base = (k - lcur - 1) as i64;
            let f0 = 4 * (k - lcur) * (k - lcur - 1 + i64::from(m));
            if f0 != 0 && base >= 0 {
                next[base as usize] += coeff * f0;
            }
            let f1 = 8 * (k - lcur) + 4 * i64::from(m);
            next[(base + 1) as usize] += coeff * f1;
            next[(base + 2) as usize] += coeff * 4;
        }
        c = next;
    }
    c.iter()
        .map(|b| b.to_f64().expect("coefficient fits in f64 range"))
        .collect()
}

/// Choose `window` fit nodes for node `i`, picked greedily to sit near
/// targets spread uniformly in `z` over the window span. Node `i` itself is
/// always included. Returned indices are sorted.
///
/// The candidate range keeps doubling until it spans at least `window`
/// average `z`-spacings: near a strongly graded end, consecutive indices
/// cover almost no `z`-distance, and derivative weights on such a
/// compressed window would amplify roundoff by `1/span^order`.
fn select_fit_nodes(z: &[f64], i: usize, window: usize, max_order: usize) -> Vec<usize> {
    let n = z.len();
    let mean_spacing = (z[n - 1] - z[0]) / (n - 1) as f64;
    // Nodes whose z sits close to either end of the z-range only get
    // one-sided windows, whose derivative weights grow much faster; give
    // them extra span to compensate. "Close" is measured in z, not index:
    // on a graded grid a large block of indices can share the same z-edge.
    // Higher derivative orders divide by higher powers of the span, so
    // they need more of it to keep weight roundoff in check.
    let order_factor = 1.0 + 0.25 * max_order.saturating_sub(2) as f64;
    let base_span = 0.75 * order_factor * window as f64 * mean_spacing;
    let edge_distance = (z[i] - z[0]).min(z[n - 1] - z[i]);
    let boost = if edge_distance >= 1.5 * base_span {
        1.0
    } else {
        3.0 - 2.0 * edge_distance / (1.5 * base_span)
    };
    let span = (boost * base_span).min(z[n - 1] - z[0]);
    // Target interval of width `span`, centered on the node where the
    // z-range allows; it always contains z[i].
    let lo_t = (z[i] - 0.5 * span).min(z[n - 1] - span).max(z[0]);
    let hi_t = lo_t + span;
    // Candidate index range covering the targets, widened symmetrically in
    // sparse regions where the interval holds fewer than `window` nodes.
    let mut lo = z.partition_point(|&v| v < lo_t).saturating_sub(1).min(i);
    let mut hi = z.partition_point(|&v| v <= hi_t).max(i + 1).min(n);
    while hi - lo < window {
        if lo > 0 {
            lo -= 1;
        }
        if hi < n {
            hi += 1;
        }
    }
    let cand = hi - lo;
    let (t_lo, t_hi) = (z[lo], z[hi - 1]);

    let mut used = vec![false; cand];
    let mut sel = Vec::with_capacity(window);
    used[i - lo] = true;
    sel.push(i);
    for k in 0..window - 1 {
        let target = t_lo + (t_hi - t_lo) * k as f64 / (window - 2).max(1) as f64;
        // Nearest unused candidate: binary search, then walk outward. On a
        // sorted axis the per-side distances grow with the ring index, so
        // the scan stops at the first ring that produces a hit.
        let pivot = z[lo..hi].partition_point(|&v| v < target);
        let mut best: Option<(usize, f64)> = None;
        for step in 0..=cand {
            for off in [pivot.checked_add(step), pivot.checked_sub(step)]
                .into_iter()
                .flatten()
            {
                if off < cand && !used[off] {
                    let d = (z[lo + off] - target).abs();
                    if best.map_or(true, |(_, bd)| d < bd) {
                        best = Some((off, d));
                    }
                }
            }
            if best.is_some() {
                break;
            }
        }
        let (off, _) = best.expect("window smaller than candidate count");
        used[off] = true;
        sel.push(lo + off);
    }
    sel.sort_unstable();
    sel
}

/// Per-node derivative weight tables for an entire grid, built once and
/// reused across profiles.
///
/// Fit nodes are not simply consecutive: strongly graded grids cluster like
/// `k^2` or `k^4` in `z` near their ends, and a Vandermonde system on nearly
/// coincident nodes turns derivative weights into roundoff amplifiers.
/// Instead each node draws its window from a wider candidate range,
/// greedily matching targets spread uniformly in `z`, which keeps the
/// local systems uniformly conditioned on any monotone grid.
#[derive(Debug)]
pub struct RadialOperatorTable {
    grid: Arc<RadialGrid>,
    m: u32,
    max_half_steps: u32,
    /// `sel[i]`: sorted node indices used by the fit at node `i`.
    sel: Vec<Vec<usize>>,
    /// `weights[i][j][k]`: contribution of the value at node `sel[i][k]`
    /// to `d^j/dz^j` at node `i`.
    weights: Vec<Vec<Vec<f64>>>,
}

impl RadialOperatorTable {
    /// Build derivative weights supporting ladder steps up to
    /// `max_half_steps` (which equals the highest z-derivative order used).
    pub fn new(grid: Arc<RadialGrid>, m: u32, max_half_steps: u32) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidInput("operator table needs m >= 1".into()));
        }
        if max_half_steps > MAX_TABLE_HALF_STEPS {
            return Err(Error::InvalidInput(format!(
                "sampled-grid ladder limited to {MAX_TABLE_HALF_STEPS} half-steps, asked for {max_half_steps}"
            )));
        }
        let max_order = max_half_steps.max(1) as usize;
        let degree = max_order + DEGREE_MARGIN;
        let window = degree + 1 + WINDOW_MARGIN;
        let n = grid.n();
        if n < window {
            return Err(Error::InvalidInput(format!(
                "grid has {n} nodes; operator table needs at least {window}"
            )));
        }
        let z = grid.z_nodes();
        let mut sel_all = Vec::with_capacity(n);
        let mut weights = Vec::with_capacity(n);
        let mut unit = vec![0.0; window];
        for i in 0..n {
            let sel = select_fit_nodes(z, i, window, max_order);
            let zi = z[i];
            let scale = sel
                .iter()
                .map(|&k| (z[k] - zi).abs())
                .fold(0.0, f64::max);
            let rows: Vec<Vec<f64>> = sel
                .iter()
                .map(|&k| {
                    let t = (z[k] - zi) / scale;
                    let mut row = Vec::with_capacity(degree + 1);
                    let mut p = 1.0;
                    for _ in 0..=degree {
                        row.push(p);
                        p *= t;
                    }
                    row
                })
                .collect();
            let qr = QrFactor::new(&rows)?;
            let mut node_w = vec![vec![0.0; window]; max_order + 1];
            let mut scale_pow = vec![1.0; max_order + 1];
            for j in 1..=max_order {
                scale_pow[j] = scale_pow[j - 1] * scale;
            }
            for k in 0..window {
                unit[k] = 1.0;
                let coeffs = qr.solve(&unit)?;
                unit[k] = 0.0;
                let mut fact = 1.0;
                for (j, w_j) in node_w.iter_mut().enumerate() {
                    if j > 0 {
                        fact *= j as f64;
                    }
                    w_j[k] = coeffs[j] * fact / scale_pow[j];
                }
            }
            sel_all.push(sel);
            weights.push(node_w);
        }
        Ok(Self { grid, m, max_half_steps, sel: sel_all, weights })
    }

    pub fn grid(&self) -> &Arc<RadialGrid> {
        &self.grid
    }

    pub fn max_half_steps(&self) -> u32 {
        self.max_half_steps
    }

    /// `d^j/dz^j` of the sampled values at every node, for `j = 0..=max`.
    pub fn z_derivatives(&self, values: &[f64], max_order: usize) -> Result<Vec<Vec<f64>>> {
        let n = self.grid.n();
        if values.len() != n {
            return Err(Error::InvalidInput("value count does not match grid".into()));
        }
        if max_order >= self.weights[0].len() {
            return Err(Error::InvalidInput(format!(
                "table built for z-order {}, asked for {max_order}",
                self.weights[0].len() - 1
            )));
        }
        let mut out = vec![vec![0.0; n]; max_order + 1];
        for i in 0..n {
            let sel = &self.sel[i];
            for (j, row) in out.iter_mut().enumerate() {
                let w = &self.weights[i][j];
                row[i] = w
                    .iter()
                    .zip(sel.iter())
                    .map(|(a, &k)| a * values[k])
                    .sum();
            }
        }
        Ok(out)
    }

    /// Ladder step `half_steps` applied to a smooth even profile: even
    /// counts `2l` give the `l`-fold Laplacian, odd counts `2l+1` give the
    /// radial derivative of the `l`-fold Laplacian.
    pub fn apply_polyharmonic(
        &self,
        profile: &RadialProfile,
        half_steps: u32,
    ) -> Result<Vec<f64>> {
        if !Arc::ptr_eq(profile.grid(), &self.grid) {
            return Err(Error::InvalidInput("profile grid differs from table grid".into()));
        }
        if half_steps > self.max_half_steps {
            return Err(Error::InvalidInput(format!(
                "table supports {} half-steps, asked for {half_steps}",
                self.max_half_steps
            )));
        }
        if half_steps == 0 {
            return Ok(profile.values().to_vec());
        }
        let l = half_steps / 2;
        let odd = half_steps % 2 == 1;
        let coeffs = laplacian_power_coeffs(self.m, l);
        let max_order = half_steps as usize;
        let derivs = self.z_derivatives(profile.values(), max_order)?;
        let z = self.grid.z_nodes();
        let r = self.grid.nodes();
        let n = self.grid.n();
        let mut out = vec![0.0; n];
        for i in 0..n {
            let zi = z[i];
            if odd {
                // d/dz of sum_k c_k z^{k-l} D^k, then times dr/dz^{-1} = 2r.
                let mut acc = 0.0;
                for (idx, &c) in coeffs.iter().enumerate() {
                    let k = l as usize + idx;
                    let pow = idx as i32; // z^{k-l}
                    if pow > 0 {
                        acc += c * pow as f64 * zi.powi(pow - 1) * derivs[k][i];
                    }
                    acc += c * zi.powi(pow) * derivs[k + 1][i];
                }
                out[i] = 2.0 * r[i] * acc;
            } else {
                let mut acc = 0.0;
                for (idx, &c) in coeffs.iter().enumerate() {
                    let k = l as usize + idx;
                    acc += c * zi.powi(idx as i32) * derivs[k][i];
                }
                out[i] = acc;
            }
        }
        Ok(out)
    }

    /// Convenience: the Laplacian of a profile.
    pub fn laplacian(&self, profile: &RadialProfile) -> Result<Vec<f64>> {
        self.apply_polyharmonic(profile, 2)
    }
}

/// Ladder step of a callable radial function at a single radius, via a local
/// polynomial stencil in `z` with one Richardson pass. Intended for checking
/// closed-form profiles against their exact images; accurate to roughly
/// `1e-10` relative for well-scaled analytic inputs.
pub fn radial_polyharmonic_at<F: Fn(f64) -> f64>(
    f: &F,
    m: u32,
    half_steps: u32,
    r: f64,
) -> Result<f64> {
    if m == 0 {
        return Err(Error::InvalidInput("needs m >= 1".into()));
    }
    if r < 0.0 {
        return Err(Error::InvalidInput("radius must be nonnegative".into()));
    }
    if half_steps == 0 {
        return Ok(f(r));
    }
    let j = half_steps as usize;
    let side = j + 2;
    let points = 2 * side + 1;
    let z0 = r * r;
    // Keep the stencil centered when the origin allows it: centered stencils
    // have an even-power error series, which Richardson cancels cleanly.
    // Low orders are truncation-limited rather than roundoff-limited, so
    // they take a finer step.
    let step_scale = if half_steps <= 2 { 0.12 } else { 0.4 };
    let mut base_h = step_scale * (z0 + 1.0) / side as f64;
    let mut centered = true;
    if z0 < side as f64 * base_h {
        let shrunk = z0 / side as f64;
        if shrunk > 0.2 * base_h {
            base_h = shrunk;
        } else {
            centered = false;
        }
    }

    let deriv_set = |h: f64| -> Result<Vec<f64>> {
        let z_lo = (z0 - side as f64 * h).max(0.0);
        let scale = h * side as f64;
        let mut rows = Vec::with_capacity(points);
        let mut ys = Vec::with_capacity(points);
        for k in 0..points {
            let zk = z_lo + k as f64 * h;
            let t = (zk - z0) / scale;
            let mut row = Vec::with_capacity(points);
            let mut p = 1.0;
            for _ in 0..points {
                row.push(p);
                p *= t;
            }
            rows.push(row);
            let v = f(zk.sqrt());
            if !v.is_finite() {
                return Err(Error::NanEncountered(format!(
                    "callable non-finite at r={:.6e}",
                    zk.sqrt()
                )));
            }
            ys.push(v);
        }
        let coeffs = solve_dense(&rows, &ys)?;
        let mut out = Vec::with_capacity(j + 2);
        let mut fact = 1.0;
        let mut spow = 1.0;
        for (jj, &c) in coeffs.iter().take(j + 2).enumerate() {
            if jj > 0 {
                fact *= jj as f64;
                spow *= scale;
            }
            out.push(c * fact / spow);
        }
        Ok(out)
    };

    let coarse = deriv_set(base_h)?;
    let fine = deriv_set(0.5 * base_h)?;
    let mut order = (points - j) as i32;
    if centered && order % 2 == 1 {
        order += 1; // symmetric stencils skip the odd error power
    }
    let weight = f64::powi(2.0, order) - 1.0;
    let deriv_at = |jj: usize| -> f64 {
        let d = fine[jj];
        d + (d - coarse[jj]) / weight
    };

    let l = half_steps / 2;
    let odd = half_steps % 2 == 1;
    let coeffs = laplacian_power_coeffs(m, l);
    let zpow = |p: i32| -> f64 {
        if p == 0 {
            1.0
        } else {
            z0.powi(p)
        }
    };
    if odd {
        let mut acc = 0.0;
        for (idx, &c) in coeffs.iter().enumerate() {
            let k = l as usize + idx;
            let pow = idx as i32;
            if pow > 0 {
                acc += c * pow as f64 * zpow(pow - 1) * deriv_at(k);
            }
            acc += c * zpow(pow) * deriv_at(k + 1);
        }
        Ok(2.0 * r * acc)
    } else {
        let mut acc = 0.0;
        for (idx, &c) in coeffs.iter().enumerate() {
            acc += c * zpow(idx as i32) * deriv_at(l as usize + idx);
        }
        Ok(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn power_coeffs_low_orders() {
        assert_eq!(laplacian_power_coeffs(1, 0), vec![1.0]);
        // Delta in 2m dims: 4m d + 4z d^2.
        assert_eq!(laplacian_power_coeffs(3, 1), vec![12.0, 4.0]);
        // Delta^2 in 4 dims (m=2): apply (8 d + 4 z d^2) twice:
        // orders 2..4 with coefficients 96, 48, 16... derive: c_{2,k} from
        // c_{1,*} = [8, 4]: k=2: 4*1*2*8 + (8*0+8)*?; verified below against
        // a polynomial instead of hand numbers.
        let c = laplacian_power_coeffs(2, 2);
        assert_eq!(c.len(), 3);
        // Apply to v = z^2 (u = r^4): Delta^2 r^4 in 4d is constant 192:
        // sum_k c_k z^{k-2} (d^k z^2) = c_0 * 2 = 192 => c_0 = 96.
        assert_eq!(c[0], 96.0);
        // Top coefficient is 4^l.
        assert_eq!(*c.last().unwrap(), 16.0);
        assert_eq!(*laplacian_power_coeffs(5, 3).last().unwrap(), 64.0);
    }

    /// Tolerance profile for sampled-grid tables: tight where the window is
    /// two-sided, looser near the ends of the z-range where windows turn
    /// one-sided. The boundary layer is a z-fraction, so in r it reaches to
    /// about a third of the outer radius.
    fn tol_at(r: f64, r_max: f64, interior: f64, edge: f64) -> f64 {
        let z_frac = (r / r_max).powi(2);
        if (0.1..=0.9).contains(&z_frac) {
            interior
        } else {
            edge
        }
    }

    #[test]
    fn z_derivatives_of_exponential() {
        let g = RadialGrid::graded(2.0, 512);
        let table = RadialOperatorTable::new(g.clone(), 1, 4).unwrap();
        let values: Vec<f64> = g.z_nodes().iter().map(|&z| (-z).exp()).collect();
        let d = table.z_derivatives(&values, 4).unwrap();
        for (i, &r) in g.nodes().iter().enumerate() {
            let z = g.z_nodes()[i];
            let want = (-z).exp();
            for j in 0..=4 {
                let sign = if j % 2 == 1 { -1.0 } else { 1.0 };
                let err = (d[j][i] - sign * want).abs();
                let tol = tol_at(r, 2.0, if j <= 2 { 3e-8 } else { 3e-7 }, if j <= 2 { 3e-6 } else { 1e-4 });
                assert!(err < tol, "node {i} (z={z:.4}) order {j}: err {err:.3e}");
            }
        }
    }

    #[test]
    fn laplacian_of_gaussian_dimension_two() {
        // In 2d, Laplacian of e^{-r^2} is (4 r^2 - 4) e^{-r^2}.
        let g = RadialGrid::graded(2.5, 512);
        let table = RadialOperatorTable::new(g.clone(), 1, 2).unwrap();
        let p = RadialProfile::from_fn(g.clone(), |r| (-r * r).exp()).unwrap();
        let lap = table.laplacian(&p).unwrap();
        for (i, &r) in g.nodes().iter().enumerate() {
            let want = (4.0 * r * r - 4.0) * (-r * r).exp();
            let tol = tol_at(r, 2.5, 1e-8, 3e-6);
            assert!((lap[i] - want).abs() < tol, "r={r}: {} vs {want}", lap[i]);
        }
    }

    #[test]
    fn bilaplacian_of_quartic_dimension_four() {
        // Delta^2 (1-r^2)^2 = 192 in R^4, exactly, for polynomial data:
        // any deviation is pure weight roundoff.
        let g = RadialGrid::graded(1.0, 256);
        let table = RadialOperatorTable::new(g.clone(), 2, 4).unwrap();
        let p = RadialProfile::from_fn(g.clone(), |r| {
            let s = 1.0 - r * r;
            s * s
        })
        .unwrap();
        let out = table.apply_polyharmonic(&p, 4).unwrap();
        for (i, v) in out.iter().enumerate() {
            let tol = tol_at(g.nodes()[i], 1.0, 1e-6, 1e-3);
            assert!((v - 192.0).abs() < tol, "node {i}: {v}");
        }
    }

    #[test]
    fn odd_half_steps_are_radial_derivatives() {
        let g = RadialGrid::graded(2.0, 384);
        let table = RadialOperatorTable::new(g.clone(), 1, 3).unwrap();
        let p = RadialProfile::from_fn(g.clone(), |r| r * r).unwrap();
        let d1 = table.apply_polyharmonic(&p, 1).unwrap();
        for (i, &r) in g.nodes().iter().enumerate() {
            assert!((d1[i] - 2.0 * r).abs() < 1e-8, "r={r}");
        }
        // d/dr Delta r^4 = 32 r in dimension 2.
        let q = RadialProfile::from_fn(g.clone(), |r| r.powi(4)).unwrap();
        let d3 = table.apply_polyharmonic(&q, 3).unwrap();
        for (i, &r) in g.nodes().iter().enumerate() {
            let tol = tol_at(r, 2.0, 5e-7, 5e-5);
            assert!((d3[i] - 32.0 * r).abs() < tol, "r={r}: {}", d3[i]);
        }
    }

    #[test]
    fn liouville_profile_satisfies_its_equation_m1() {
        // u = -(1/4pi) ln(1 + r^2/4) has Delta u = -(1/4pi)(1+r^2/4)^{-2}
        // in the plane (the origin value -1/(4pi) pins the normalization).
        let g = RadialGrid::graded(3.0, 512);
        let table = RadialOperatorTable::new(g.clone(), 1, 2).unwrap();
        let c = 1.0 / (4.0 * PI);
        let p = RadialProfile::from_fn(g.clone(), |r| -c * (1.0 + r * r / 4.0).ln()).unwrap();
        let lap = table.laplacian(&p).unwrap();
        for (i, &r) in g.nodes().iter().enumerate() {
            let want = -c * (1.0 + r * r / 4.0).powi(-2);
            let tol = tol_at(r, 3.0, 1e-8, 3e-7);
            assert!((lap[i] - want).abs() < tol, "r={r}: {} vs {want}", lap[i]);
        }
        // The origin value itself, checked through the pointwise route which
        // holds full precision there.
        let origin = radial_polyharmonic_at(&|r: f64| -c * (1.0 + r * r / 4.0).ln(), 1, 2, 0.0)
            .unwrap();
        assert!((origin + c).abs() < 1e-9, "origin: {origin}");
    }

    #[test]
    fn pointwise_ladder_matches_closed_forms() {
        // Gaussian in the plane.
        let got = radial_polyharmonic_at(&|r: f64| (-r * r).exp(), 1, 2, 0.7).unwrap();
        let want = (4.0 * 0.49 - 4.0) * (-0.49_f64).exp();
        assert!((got - want).abs() < 1e-10, "{got} vs {want}");
        // Fourth power in R^4: Delta^2 r^4 = 192.
        let got = radial_polyharmonic_at(&|r: f64| r.powi(4), 2, 4, 0.3).unwrap();
        assert!((got - 192.0).abs() < 1e-6, "{got}");
        // Odd step at the origin vanishes.
        let got = radial_polyharmonic_at(&|r: f64| (-r * r).exp(), 1, 1, 0.0).unwrap();
        assert!(got.abs() < 1e-12);
        // First derivative of cos r^2... as function of r: -2 r sin(r^2).
        let got = radial_polyharmonic_at(&|r: f64| (r * r).cos(), 1, 1, 0.9).unwrap();
        let want = -2.0 * 0.9 * (0.81_f64).sin();
        assert!((got - want).abs() < 1e-10, "{got} vs {want}");
    }

    #[test]
    fn table_rejects_mismatched_grid() {
        let g1 = RadialGrid::graded(1.0, 64);
        let g2 = RadialGrid::graded(1.0, 64);
        let table = RadialOperatorTable::new(g1, 1, 2).unwrap();
        let p = RadialProfile::from_fn(g2, |r| r).unwrap();
        assert!(table.apply_polyharmonic(&p, 2).is_err());
    }

    #[test]
    fn table_rejects_excess_order() {
        let g = RadialGrid::graded(1.0, 128);
        let table = RadialOperatorTable::new(g, 1, 2).unwrap();
        let p = RadialProfile::from_fn(table.grid().clone(), |r| r * r).unwrap();
        assert!(table.apply_polyharmonic(&p, 3).is_err());
    }
}

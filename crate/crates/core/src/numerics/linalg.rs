//! Small dense linear algebra: partial-pivot LU solves for the boundary
//! matching systems (dimension at most ~16) and Householder least squares
//! for the local polynomial fits.

use crate::error::{Error, Result};

/// Solve `A x = b` for square `A` given as rows, destroying nothing. Partial
/// pivoting; fails with [`Error::SingularSystem`] when the best available
/// pivot underflows the scale of its column.
pub fn solve_dense(a: &[Vec<f64>], b: &[f64]) -> Result<Vec<f64>> {
    let n = a.len();
    if n == 0 || b.len() != n || a.iter().any(|row| row.len() != n) {
        return Err(Error::InvalidInput("solve_dense needs square A and matching b".into()));
    }
    let mut m: Vec<Vec<f64>> = a.to_vec();
    let mut x: Vec<f64> = b.to_vec();
    for col in 0..n {
        let (pivot_row, pivot_abs) = (col..n)
            .map(|r| (r, m[r][col].abs()))
            .max_by(|p, q| p.1.total_cmp(&q.1))
            .expect("non-empty pivot search");
        let col_scale: f64 = (0..n).map(|r| m[r][col].abs()).fold(0.0, f64::max);
        if pivot_abs <= 1e-300 || pivot_abs < 1e-14 * col_scale {
            return Err(Error::SingularSystem {
                pivot: m[pivot_row][col],
                column: col,
            });
        }
        m.swap(col, pivot_row);
        x.swap(col, pivot_row);
        for r in col + 1..n {
            let factor = m[r][col] / m[col][col];
            if factor != 0.0 {
                for c in col..n {
                    let upd = m[col][c];
                    m[r][c] -= factor * upd;
                }
                x[r] -= factor * x[col];
            }
        }
    }
    for col in (0..n).rev() {
        let mut acc = x[col];
        for c in col + 1..n {
            acc -= m[col][c] * x[c];
        }
        x[col] = acc / m[col][col];
    }
    Ok(x)
}

/// Householder QR factorization of a tall matrix, reusable across many
/// right-hand sides (the local-fit derivative tables solve one factorization
/// against every coordinate vector).
#[derive(Debug, Clone)]
pub struct QrFactor {
    rows: usize,
    cols: usize,
    /// Upper triangle holds R; below-diagonal entries are unused.
    r: Vec<Vec<f64>>,
    /// Householder vectors, `vs[k]` of length `rows - k`.
    vs: Vec<Vec<f64>>,
    /// Squared norms of the Householder vectors.
    vnorm_sq: Vec<f64>,
}

impl QrFactor {
    pub fn new(a: &[Vec<f64>]) -> Result<Self> {
        let rows = a.len();
        if rows == 0 {
            return Err(Error::InvalidInput("QR needs rows".into()));
        }
        let cols = a[0].len();
        if cols == 0 || rows < cols || a.iter().any(|r| r.len() != cols) {
            return Err(Error::InvalidInput("QR needs rows >= cols > 0".into()));
        }
        let mut m: Vec<Vec<f64>> = a.to_vec();
        let mut vs = Vec::with_capacity(cols);
        let mut vnorm_sq = Vec::with_capacity(cols);
        for k in 0..cols {
            let norm: f64 = (k..rows).map(|r| m[r][k] * m[r][k]).sum::<f64>().sqrt();
            let col_scale: f64 = (0..rows).map(|r| m[r][k].abs()).fold(0.0, f64::max);
            if norm <= 1e-300 || norm < 1e-13 * col_scale.max(1.0) {
                return Err(Error::SingularSystem { pivot: norm, column: k });
            }
            let alpha = if m[k][k] >= 0.0 { -norm } else { norm };
            let mut v: Vec<f64> = (k..rows).map(|r| m[r][k]).collect();
            v[0] -= alpha;
            let vsq: f64 = v.iter().map(|t| t * t).sum();
            if vsq > 0.0 {
                for c in k..cols {
                    let dot: f64 = (k..rows).map(|r| v[r - k] * m[r][c]).sum();
                    let scale = 2.0 * dot / vsq;
                    for r in k..rows {
                        m[r][c] -= scale * v[r - k];
                    }
                }
            }
            m[k][k] = alpha;
            vs.push(v);
            vnorm_sq.push(vsq);
        }
        Ok(Self { rows, cols, r: m, vs, vnorm_sq })
    }

    /// Least-squares solution of `A x = b` using the stored factorization.
    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        if b.len() != self.rows {
            return Err(Error::InvalidInput("rhs length mismatch in QR solve".into()));
        }
        let mut rhs: Vec<f64> = b.to_vec();
        for k in 0..self.cols {
            let vsq = self.vnorm_sq[k];
            if vsq > 0.0 {
                let v = &self.vs[k];
                let dot: f64 = (k..self.rows).map(|r| v[r - k] * rhs[r]).sum();
                let scale = 2.0 * dot / vsq;
                for r in k..self.rows {
                    rhs[r] -= scale * v[r - k];
                }
            }
        }
        let mut x = vec![0.0; self.cols];
        for col in (0..self.cols).rev() {
            let mut acc = rhs[col];
            for c in col + 1..self.cols {
                acc -= self.r[col][c] * x[c];
            }
            x[col] = acc / self.r[col][col];
        }
        Ok(x)
    }
}

/// Least-squares solution of `A x = b` with `A` given as `rows >= cols`
/// rows, via Householder QR. Fails if `A` is numerically rank deficient.
pub fn solve_least_squares(a: &[Vec<f64>], b: &[f64]) -> Result<Vec<f64>> {
    QrFactor::new(a)?.solve(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{RngExt, SeedableRng};

    #[test]
    fn solves_hand_system() {
        let a = vec![vec![2.0, 1.0], vec![1.0, 3.0]];
        let x = solve_dense(&a, &[5.0, 10.0]).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-14);
        assert!((x[1] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn rejects_singular() {
        let a = vec![vec![1.0, 2.0], vec![2.0, 4.0]];
        assert!(matches!(
            solve_dense(&a, &[1.0, 2.0]),
            Err(Error::SingularSystem { .. })
        ));
    }

    #[test]
    fn random_systems_roundtrip() {
        let mut rng = StdRng::seed_from_u64(0x5eed);
        for trial in 0..1000 {
            let n = 1 + (trial % 12);
            let a: Vec<Vec<f64>> = (0..n)
                .map(|_| (0..n).map(|_| rng.random_range(-1.0..1.0)).collect())
                .collect();
            let x_true: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0..2.0)).collect();
            let b: Vec<f64> = a
                .iter()
                .map(|row| row.iter().zip(&x_true).map(|(c, x)| c * x).sum())
                .collect();
            match solve_dense(&a, &b) {
                Ok(x) => {
                    let err: f64 = x
                        .iter()
                        .zip(&x_true)
                        .map(|(p, q)| (p - q).abs())
                        .fold(0.0, f64::max);
                    // Random matrices can be poorly conditioned; accept a
                    // generous but finite error, and check the residual too.
                    let res: f64 = a
                        .iter()
                        .zip(&b)
                        .map(|(row, bv)| {
                            (row.iter().zip(&x).map(|(c, xv)| c * xv).sum::<f64>() - bv).abs()
                        })
                        .fold(0.0, f64::max);
                    assert!(res < 1e-8, "trial {trial}: residual {res}");
                    assert!(err.is_finite());
                }
                Err(Error::SingularSystem { .. }) => {} // legitimately near-singular draw
                Err(e) => panic!("unexpected error: {e}"),
            }
        }
    }

    #[test]
    fn least_squares_recovers_polynomial() {
        // Fit x^2 - 3x + 2 sampled without noise: LS must reproduce it exactly.
        let xs: Vec<f64> = (0..9).map(|i| i as f64 / 8.0).collect();
        let rows: Vec<Vec<f64>> = xs.iter().map(|&x| vec![1.0, x, x * x]).collect();
        let b: Vec<f64> = xs.iter().map(|&x| x * x - 3.0 * x + 2.0).collect();
        let c = solve_least_squares(&rows, &b).unwrap();
        assert!((c[0] - 2.0).abs() < 1e-12);
        assert!((c[1] + 3.0).abs() < 1e-12);
        assert!((c[2] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn qr_factor_reusable_across_rhs() {
        let rows = vec![
            vec![1.0, 0.1, 0.01],
            vec![1.0, 0.4, 0.16],
            vec![1.0, 0.7, 0.49],
            vec![1.0, 1.1, 1.21],
            vec![1.0, 1.6, 2.56],
        ];
        let qr = QrFactor::new(&rows).unwrap();
        for coeffs in [[1.0, -2.0, 3.0], [0.5, 0.0, -1.0]] {
            let b: Vec<f64> = rows
                .iter()
                .map(|r| coeffs[0] * r[0] + coeffs[1] * r[1] + coeffs[2] * r[2])
                .collect();
            let x = qr.solve(&b).unwrap();
            for (got, want) in x.iter().zip(coeffs.iter()) {
                assert!((got - want).abs() < 1e-11);
            }
        }
    }

    #[test]
    fn least_squares_overdetermined_consistency() {
        // Minimizer of ||Ax - b||: residual must be orthogonal to the columns.
        let rows = vec![
            vec![1.0, 0.0],
            vec![1.0, 1.0],
            vec![1.0, 2.0],
            vec![1.0, 3.0],
        ];
        let b = [1.0, 2.0, 1.5, 3.5];
        let x = solve_least_squares(&rows, &b).unwrap();
        for col in 0..2 {
            let dot: f64 = rows
                .iter()
                .zip(&b)
                .map(|(r, bv)| r[col] * (r[0] * x[0] + r[1] * x[1] - bv))
                .sum();
            assert!(dot.abs() < 1e-12, "column {col} not orthogonal: {dot}");
        }
    }
}

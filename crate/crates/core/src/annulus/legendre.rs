//! Legendre polynomials, Gauss-Legendre quadrature and the Shen-type
//! combinations that satisfy homogeneous wall conditions.

use std::f64::consts::PI;

use nalgebra::DMatrix;

/// `(P_j(x), P_j'(x), P_j''(x))` for `j = 0..=n`.
pub fn legendre_all(n: usize, x: f64) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let mut p = vec![0.0; n + 1];
    let mut dp = vec![0.0; n + 1];
    let mut ddp = vec![0.0; n + 1];
    p[0] = 1.0;
    if n >= 1 {
        p[1] = x;
        dp[1] = 1.0;
    }
    for j in 1..n {
        let jf = j as f64;
        p[j + 1] = ((2.0 * jf + 1.0) * x * p[j] - jf * p[j - 1]) / (jf + 1.0);
        dp[j + 1] = dp[j - 1] + (2.0 * jf + 1.0) * p[j];
        ddp[j + 1] = ddp[j - 1] + (2.0 * jf + 1.0) * dp[j];
    }
    (p, dp, ddp)
}

/// Gauss-Legendre nodes (ascending) and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n {
        let mut x = -(PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for j in 1..n {
                let jf = j as f64;
                let p2 = ((2.0 * jf + 1.0) * x * p1 - jf * p0) / (jf + 1.0);
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 { 1.0 } else { p1 };
            let pm = if n == 0 { 0.0 } else { p0 };
            dp = nf * (x * pn - pm) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

/// Boundary behaviour of a radial basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WallCondition {
    /// `f(+-1) = 0`: `L_j - L_{j+2}`.
    Dirichlet,
    /// `f(+-1) = f'(+-1) = 0`.
    Clamped,
}

impl WallCondition {
    /// Number of functions whose polynomial degree stays below `nr`.
    pub fn count(self, nr: usize) -> usize {
        match self {
            WallCondition::Dirichlet => nr.saturating_sub(2),
            WallCondition::Clamped => nr.saturating_sub(4),
        }
    }

    /// Legendre coefficients `(offset, c)` of basis function `j`.
    fn combination(self, j: usize) -> [(usize, f64); 3] {
        let jf = j as f64;
        match self {
            WallCondition::Dirichlet => [(0, 1.0), (2, -1.0), (0, 0.0)],
            WallCondition::Clamped => [
                (0, 1.0),
                (2, -2.0 * (2.0 * jf + 5.0) / (2.0 * jf + 7.0)),
                (4, (2.0 * jf + 3.0) / (2.0 * jf + 7.0)),
            ],
        }
    }
}

/// Values and first two `x`-derivatives of a basis at given points.
///
/// Rows index basis functions, columns points.
#[derive(Debug, Clone)]
pub struct RadialTable {
    pub f: DMatrix<f64>,
    pub df: DMatrix<f64>,
    pub ddf: DMatrix<f64>,
}

/// Tabulates the first `count` functions of `wall` at `points` (on `[-1, 1]`).
pub fn tabulate(wall: WallCondition, count: usize, points: &[f64]) -> RadialTable {
    let np = points.len();
    let mut t = RadialTable { f: DMatrix::zeros(count, np), df: DMatrix::zeros(count, np), ddf: DMatrix::zeros(count, np) };
    if count == 0 {
        return t;
    }
    for (q, &x) in points.iter().enumerate() {
        let (p, dp, ddp) = legendre_all(count + 4, x);
        for j in 0..count {
            for (off, c) in wall.combination(j) {
                if c != 0.0 {
                    t.f[(j, q)] += c * p[j + off];
                    t.df[(j, q)] += c * dp[j + off];
                    t.ddf[(j, q)] += c * ddp[j + off];
                }
            }
        }
    }
    t
}

/// `(2 + 3x - x^3) / 4`: zero with zero slope at `x = -1`, one with zero slope at `x = 1`.
pub fn flux_mode(x: f64) -> (f64, f64, f64) {
    ((2.0 + 3.0 * x - x * x * x) / 4.0, 0.75 * (1.0 - x * x), -1.5 * x)
}

//! Planar-layer limit: no-slip, fixed-temperature walls at `z = 0, 1`,
//! horizontal dependence `exp(i a x)`.
//!
//! With stream-function `f(z)` (clamped) and temperature `g(z)` (Dirichlet):
//!
//! ```text
//! int (f'' - a^2 f)(chi'' - a^2 chi) = lambda a int g chi
//! int (g' theta' + a^2 g theta)      = lambda a int f theta
//! ```
//!
//! so that `lambda_c^2` is the critical Rayleigh number of the layer.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::eig::{pencil_residual, symmetric_pencil};
use super::pencil::SymmetryLabel;
use crate::annulus::legendre::{gauss_legendre, tabulate, WallCondition};
use crate::error::{invalid, Result};

/// Spectrum of the layer problem at one wavenumber.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LayerEigen {
    pub nr: usize,
    pub wavenumber: f64,
    /// Least positive eigenvalues, ascending.
    pub lambdas: Vec<f64>,
    pub lambda_c: f64,
    pub label: SymmetryLabel,
    /// Largest imaginary part among the eigenvalues of the unsymmetrized pencil, relative.
    pub max_imag: f64,
    /// `max |mu_i + mu_{n-1-i}| / max |mu|` over the sorted spectrum.
    pub pairing_defect: f64,
    pub residual: f64,
    /// Critical eigenvector: clamped coefficients then Dirichlet coefficients.
    pub f: Vec<f64>,
    pub g: Vec<f64>,
}

/// Dissipation and coupling forms on `nr` Legendre modes, diagonally scaled.
///
/// Returns `(G, S, n_clamped, d)`: coefficients of the unscaled basis are `d_i y_i`.
pub fn layer_pencil(nr: usize, a: f64) -> Result<(DMatrix<f64>, DMatrix<f64>, usize, DVector<f64>)> {
    if nr < 6 {
        return invalid("layer problem needs nr >= 6");
    }
    if !(a > 0.0) || !a.is_finite() {
        return invalid("wavenumber must be positive");
    }
    let nf = WallCondition::Clamped.count(nr);
    let ng = WallCondition::Dirichlet.count(nr);
    let (x, w) = gauss_legendre(nr + 4);
    let tf = tabulate(WallCondition::Clamped, nf, &x);
    let tg = tabulate(WallCondition::Dirichlet, ng, &x);
    // z = (x + 1) / 2: d/dz = 2 d/dx, dz = dx / 2
    let a2 = a * a;
    let wz = DVector::from_iterator(x.len(), w.iter().map(|w| w / 2.0));
    let lf = &tf.ddf * 4.0 - &tf.f * a2;
    let gram = |p: &DMatrix<f64>, q: &DMatrix<f64>| {
        let mut pw = p.clone();
        for (c, mut col) in pw.column_iter_mut().enumerate() {
            col *= wz[c];
        }
        pw * q.transpose()
    };
    let bih = gram(&lf, &lf);
    let lap = gram(&(&tg.df * 2.0), &(&tg.df * 2.0)) + gram(&tg.f, &tg.f) * a2;
    let cpl = gram(&tf.f, &tg.f) * a;
    let n = nf + ng;
    let mut g = DMatrix::zeros(n, n);
    g.view_mut((0, 0), (nf, nf)).copy_from(&bih);
    g.view_mut((nf, nf), (ng, ng)).copy_from(&lap);
    let mut s = DMatrix::zeros(n, n);
    s.view_mut((0, nf), (nf, ng)).copy_from(&cpl);
    s.view_mut((nf, 0), (ng, nf)).copy_from(&cpl.transpose());
    let d = DVector::from_fn(n, |i, _| 1.0 / g[(i, i)].sqrt());
    let scale = |m: &DMatrix<f64>| DMatrix::from_fn(n, n, |i, j| m[(i, j)] * d[i] * d[j]);
    Ok((scale(&g), scale(&s), nf, d))
}

fn label_of(x: &DVector<f64>, nf: usize) -> SymmetryLabel {
    // Basis function j of either family has the parity of P_j about z = 1/2.
    let j_of = |i: usize| if i < nf { i } else { i - nf };
    let (mut even, mut odd) = (0.0f64, 0.0f64);
    for (i, v) in x.iter().enumerate() {
        if j_of(i) % 2 == 0 {
            even = even.max(v.abs());
        } else {
            odd = odd.max(v.abs());
        }
    }
    let top = even.max(odd);
    if odd < 1e-8 * top {
        SymmetryLabel::Even
    } else if even < 1e-8 * top {
        SymmetryLabel::Odd
    } else {
        SymmetryLabel::Mixed
    }
}

/// Least positive eigenvalue at wavenumber `a`.
pub fn layer_lambda_c(nr: usize, a: f64) -> Result<f64> {
    let (g, s, _, _) = layer_pencil(nr, a)?;
    let pairs = symmetric_pencil(&g, &s)?;
    Ok(1.0 / pairs[0].0)
}

/// Full spectrum report at wavenumber `a`.
pub fn layer_spectrum(nr: usize, a: f64, count: usize) -> Result<LayerEigen> {
    let (g, s, nf, _) = layer_pencil(nr, a)?;
    let pairs = symmetric_pencil(&g, &s)?;
    let mus: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let top = mus[0].abs().max(mus[mus.len() - 1].abs());
    let n = mus.len();
    let pairing_defect = (0..n).map(|i| (mus[i] + mus[n - 1 - i]).abs()).fold(0.0, f64::max) / top;
    let ginv_s = g.clone().lu().solve(&s).expect("positive definite");
    let max_imag = ginv_s.complex_eigenvalues().iter().map(|c| c.im.abs()).fold(0.0, f64::max) / top;
    let lambdas: Vec<f64> = mus.iter().filter(|&&m| m > 1e-12 * top).take(count.max(1)).map(|m| 1.0 / m).collect();
    let x = &pairs[0].1;
    let lambda_c = 1.0 / pairs[0].0;
    Ok(LayerEigen {
        nr,
        wavenumber: a,
        lambda_c,
        label: label_of(x, nf),
        max_imag,
        pairing_defect,
        residual: pencil_residual(&g, &s, lambda_c, x),
        f: x.as_slice()[..nf].to_vec(),
        g: x.as_slice()[nf..].to_vec(),
        lambdas,
    })
}

/// Minimizes `lambda_c` over `a in [kmin, kmax]`: grid scan, then golden section.
pub fn solve_eig0(nr: usize, kmin: f64, kmax: f64, count: usize) -> Result<LayerEigen> {
    if !(kmin > 0.0) || !(kmax > kmin) {
        return invalid("need 0 < kmin < kmax");
    }
    let pts = 24;
    let grid: Vec<f64> = (0..=pts).map(|i| kmin + (kmax - kmin) * i as f64 / pts as f64).collect();
    let vals: Vec<f64> = grid.par_iter().map(|&a| layer_lambda_c(nr, a)).collect::<Result<_>>()?;
    let best = (0..vals.len()).min_by(|&i, &j| vals[i].total_cmp(&vals[j])).expect("nonempty");
    let (mut lo, mut hi) = (grid[best.saturating_sub(1)], grid[(best + 1).min(pts)]);
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = hi - phi * (hi - lo);
    let mut d = lo + phi * (hi - lo);
    let (mut fc, mut fd) = (layer_lambda_c(nr, c)?, layer_lambda_c(nr, d)?);
    while hi - lo > 1e-9 * hi {
        if fc < fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - phi * (hi - lo);
            fc = layer_lambda_c(nr, c)?;
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + phi * (hi - lo);
            fd = layer_lambda_c(nr, d)?;
        }
    }
    layer_spectrum(nr, 0.5 * (lo + hi), count)
}

/// `(z, f(z), g(z))` of the critical eigenfunction at `nz` points.
pub fn layer_profile(sol: &LayerEigen, nz: usize) -> Vec<(f64, f64, f64)> {
    let z: Vec<f64> = (0..nz).map(|i| i as f64 / (nz - 1).max(1) as f64).collect();
    let x: Vec<f64> = z.iter().map(|z| 2.0 * z - 1.0).collect();
    let (_, _, nf, d) = layer_pencil(sol.nr, sol.wavenumber).expect("valid stored problem");
    let tf = tabulate(WallCondition::Clamped, nf, &x);
    let tg = tabulate(WallCondition::Dirichlet, sol.g.len(), &x);
    (0..nz)
        .map(|q| {
            let f: f64 = (0..nf).map(|j| d[j] * sol.f[j] * tf.f[(j, q)]).sum();
            let t: f64 = (0..sol.g.len()).map(|j| d[nf + j] * sol.g[j] * tg.f[(j, q)]).sum();
            (z[q], f, t)
        })
        .collect()
}

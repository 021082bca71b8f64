use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::basis::{Points, PolarBasis};
use crate::error::{invalid, Result};

/// Largest angular wavenumber accepted from serialized data.
pub const MAX_ANGULAR: usize = 256;
/// Largest radial node count accepted from serialized data.
pub const MAX_NODES: usize = 1024;

/// Fourier coefficients in `phi` at each radial node: `cos[k][i]`, `sin[k][i]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FourierRows {
    pub cos: Vec<Vec<f64>>,
    pub sin: Vec<Vec<f64>>,
}

impl FourierRows {
    pub fn zeros(k_max: usize, nodes: usize) -> Self {
        Self { cos: vec![vec![0.0; nodes]; k_max + 1], sin: vec![vec![0.0; nodes]; k_max + 1] }
    }

    pub fn eval(&self, i: usize, phi: f64) -> f64 {
        let mut acc = 0.0;
        for k in 0..self.cos.len() {
            let (s, c) = (k as f64 * phi).sin_cos();
            acc += self.cos[k][i] * c + self.sin[k][i] * s;
        }
        acc
    }

    /// Coefficients of `f(pi - phi)` (`sign = 1`) or `-f(pi - phi)` (`sign = -1`).
    pub fn reflected(&self, sign: f64) -> Self {
        let mut out = self.clone();
        for k in 0..self.cos.len() {
            let e = if k % 2 == 0 { 1.0 } else { -1.0 };
            out.cos[k].iter_mut().for_each(|v| *v *= sign * e);
            out.sin[k].iter_mut().for_each(|v| *v *= -sign * e);
        }
        out
    }

    fn average(&self, other: &Self) -> Self {
        let avg = |a: &Vec<Vec<f64>>, b: &Vec<Vec<f64>>| {
            a.iter().zip(b).map(|(x, y)| x.iter().zip(y).map(|(p, q)| 0.5 * (p + q)).collect()).collect()
        };
        Self { cos: avg(&self.cos, &other.cos), sin: avg(&self.sin, &other.sin) }
    }

    fn max_abs(&self) -> f64 {
        self.cos.iter().chain(&self.sin).flatten().fold(0.0, |m, v| m.max(v.abs()))
    }

    fn is_finite(&self) -> bool {
        self.cos.iter().chain(&self.sin).flatten().all(|v| v.is_finite())
    }

    fn has_shape(&self, k_max: usize, nodes: usize) -> bool {
        self.cos.len() == k_max + 1
            && self.sin.len() == k_max + 1
            && self.cos.iter().chain(&self.sin).all(|row| row.len() == nodes)
    }
}

/// Polar velocity and temperature: Fourier in `phi` (`k <= k_max`) at radial
/// Chebyshev-Gauss-Lobatto nodes on `[Ri, Ro]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolarField {
    pub k_max: usize,
    pub r: Vec<f64>,
    pub vr: FourierRows,
    pub vphi: FourierRows,
    pub tau: FourierRows,
}

/// Which reflection a field is compared against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Reflection {
    /// `v^r, tau` even and `v^phi` odd under `phi -> pi - phi`.
    Even,
    /// The opposite signs.
    Odd,
}

impl Reflection {
    fn sign(self) -> f64 {
        match self {
            Reflection::Even => 1.0,
            Reflection::Odd => -1.0,
        }
    }
}

/// `n` Chebyshev-Gauss-Lobatto nodes mapped to `[ri, ri + 1]`, ascending.
pub fn cgl_radii(ri: f64, n: usize) -> (Vec<f64>, Vec<f64>) {
    let x: Vec<f64> = (0..n).map(|i| -(PI * i as f64 / (n - 1) as f64).cos()).collect();
    let r = x.iter().map(|x| ri + 0.5 * (x + 1.0)).collect();
    (x, r)
}

impl PolarField {
    pub fn zeros(k_max: usize, r: Vec<f64>) -> Self {
        let n = r.len();
        Self { k_max, r, vr: FourierRows::zeros(k_max, n), vphi: FourierRows::zeros(k_max, n), tau: FourierRows::zeros(k_max, n) }
    }

    /// Field of the stream-function coefficients `psi` and scalar coefficients
    /// `tau` in `basis`, sampled at `nodes` radial points.
    pub fn from_coefficients(basis: &PolarBasis, psi: &[f64], tau: &[f64], nodes: usize) -> Result<Self> {
        if psi.len() != basis.n_stream() || tau.len() != basis.n_scalar() {
            return invalid("coefficient vectors do not match the basis");
        }
        if nodes < 2 {
            return invalid("need at least two radial nodes");
        }
        let k_max = basis.res.k_max;
        let n_phi = 2 * k_max + 2;
        let phi: Vec<f64> = (0..n_phi).map(|j| 2.0 * PI * j as f64 / n_phi as f64).collect();
        let (x, r) = cgl_radii(basis.params.ri, nodes);
        let pts = Points::tensor(&basis.params, &x, &phi);
        let (st, sc) = basis.tabulate_at(&pts);
        let psi = nalgebra::DVector::from_column_slice(psi);
        let tau = nalgebra::DVector::from_column_slice(tau);
        let vr = st.vr.transpose() * &psi;
        let vphi = st.vphi.transpose() * &psi;
        let tv = sc.val.transpose() * &tau;
        let mut out = Self::zeros(k_max, r);
        for (rows, vals) in [(&mut out.vr, &vr), (&mut out.vphi, &vphi), (&mut out.tau, &tv)] {
            for k in 0..=k_max {
                let w = if k == 0 { 1.0 } else { 2.0 } / n_phi as f64;
                for i in 0..nodes {
                    let (mut c, mut s) = (0.0, 0.0);
                    for (j, p) in phi.iter().enumerate() {
                        let v = vals[j * nodes + i];
                        let (sn, cs) = (k as f64 * p).sin_cos();
                        c += v * cs;
                        s += v * sn;
                    }
                    rows.cos[k][i] = w * c;
                    rows.sin[k][i] = w * s;
                }
            }
        }
        Ok(out)
    }

    /// Checks shapes, finiteness and node ordering of a deserialized field.
    pub fn validate(&self) -> Result<()> {
        if self.k_max > MAX_ANGULAR || self.r.len() < 2 || self.r.len() > MAX_NODES {
            return invalid("polar field resolution out of range");
        }
        let n = self.r.len();
        if ![&self.vr, &self.vphi, &self.tau].iter().all(|rows| rows.has_shape(self.k_max, n)) {
            return invalid("polar field rows do not match k_max and the radial nodes");
        }
        if !self.is_finite() || !self.r.iter().all(|r| r.is_finite() && *r > 0.0) {
            return invalid("polar field has non-finite entries");
        }
        if !self.r.windows(2).all(|w| w[0] < w[1]) {
            return invalid("radial nodes must increase");
        }
        Ok(())
    }

    pub fn nodes(&self) -> usize {
        self.r.len()
    }

    /// `(v^r, v^phi, tau)` at node `i` and angle `phi`.
    pub fn eval(&self, i: usize, phi: f64) -> (f64, f64, f64) {
        (self.vr.eval(i, phi), self.vphi.eval(i, phi), self.tau.eval(i, phi))
    }

    pub fn max_abs(&self) -> f64 {
        self.vr.max_abs().max(self.vphi.max_abs()).max(self.tau.max_abs())
    }

    pub fn is_finite(&self) -> bool {
        self.vr.is_finite() && self.vphi.is_finite() && self.tau.is_finite()
    }

    /// Grid maximum of `|v^r - R v^r| + |v^phi + R v^phi| + |tau - R tau|` with
    /// `R f(phi) = f(pi - phi)` (signs flipped for [`Reflection::Odd`]).
    pub fn residual_against(&self, refl: Reflection) -> f64 {
        let s = refl.sign();
        let n_phi = 4 * self.k_max + 6;
        let mut worst: f64 = 0.0;
        for i in 0..self.nodes() {
            for j in 0..n_phi {
                let p = 2.0 * PI * (j as f64 + 0.37) / n_phi as f64;
                let (a, b, c) = self.eval(i, p);
                let (ra, rb, rc) = self.eval(i, PI - p);
                let d = (a - s * ra).abs() + (b + s * rb).abs() + (c - s * rc).abs();
                worst = worst.max(d);
            }
        }
        worst
    }

    /// Even-symmetry residual.
    pub fn symmetry_residual(&self) -> f64 {
        self.residual_against(Reflection::Even)
    }

    /// Image under the even-symmetry reflection.
    pub fn reflected(&self) -> Self {
        Self {
            k_max: self.k_max,
            r: self.r.clone(),
            vr: self.vr.reflected(1.0),
            vphi: self.vphi.reflected(-1.0),
            tau: self.tau.reflected(1.0),
        }
    }

    /// Average of the field and its reflected image.
    pub fn symmetrize(&self) -> Self {
        let refl = self.reflected();
        Self {
            k_max: self.k_max,
            r: self.r.clone(),
            vr: self.vr.average(&refl.vr),
            vphi: self.vphi.average(&refl.vphi),
            tau: self.tau.average(&refl.tau),
        }
    }

    /// Cartesian vertical velocity `v^r sin(phi) + v^phi cos(phi)` at node `i`.
    pub fn vertical(&self, i: usize, phi: f64) -> f64 {
        let (a, b, _) = self.eval(i, phi);
        a * phi.sin() + b * phi.cos()
    }
}

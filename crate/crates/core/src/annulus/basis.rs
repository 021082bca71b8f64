//! Fourier x Legendre-Galerkin bases on the annulus and their tabulation at
//! the polar quadrature points.
//!
//! Velocities come from a stream-function, `v^r = psi_phi / r`, `v^phi = -psi_r`,
//! so every discrete velocity is divergence-free and, with the clamped radial
//! functions, vanishes at both walls. The angle `phi` is measured from the
//! horizontal, so the reflection about the vertical diameter is `phi -> pi - phi`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::legendre::{flux_mode, gauss_legendre, tabulate, WallCondition};
use super::params::AnnulusParams;
use crate::error::{invalid, Result};

/// Parity under `phi -> pi - phi`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn other(self) -> Self {
        match self {
            Parity::Even => Parity::Odd,
            Parity::Odd => Parity::Even,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Trig {
    Cos,
    Sin,
}

/// `cos(k phi)` or `sin(k phi)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AngularMode {
    pub k: usize,
    pub trig: Trig,
}

impl AngularMode {
    /// Sign picked up under `phi -> pi - phi`.
    pub fn reflection_sign(self) -> f64 {
        let s = if self.k % 2 == 0 { 1.0 } else { -1.0 };
        match self.trig {
            Trig::Cos => s,
            Trig::Sin => -s,
        }
    }

    pub fn parity(self) -> Parity {
        if self.reflection_sign() > 0.0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    /// `(a, a', a'')` at `phi`.
    pub fn eval(self, phi: f64) -> (f64, f64, f64) {
        let k = self.k as f64;
        let (s, c) = (k * phi).sin_cos();
        match self.trig {
            Trig::Cos => (c, -k * s, -k * k * c),
            Trig::Sin => (s, k * c, -k * k * s),
        }
    }
}

/// Angular modes `k <= k_max` of one parity, ordered by `k`.
pub fn angular_family(parity: Parity, k_max: usize) -> Vec<AngularMode> {
    let mut out = Vec::new();
    for k in 0..=k_max {
        for trig in [Trig::Cos, Trig::Sin] {
            if trig == Trig::Sin && k == 0 {
                continue;
            }
            let m = AngularMode { k, trig };
            if m.parity() == parity {
                out.push(m);
            }
        }
    }
    out
}

/// Resolution of an annulus discretization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Resolution {
    /// Largest angular wavenumber.
    pub k_max: usize,
    /// Radial polynomial degree bound.
    pub nr: usize,
}

impl Resolution {
    pub fn new(k_max: usize, nr: usize) -> Result<Self> {
        if nr < 6 {
            return invalid("radial resolution must be at least 6");
        }
        if k_max < 1 {
            return invalid("angular resolution must be at least 1");
        }
        Ok(Self { k_max, nr })
    }
}

/// Tensor quadrature: Gauss-Legendre in `r`, uniform in `phi`.
#[derive(Debug, Clone)]
pub struct PolarQuadrature {
    pub r: Vec<f64>,
    pub phi: Vec<f64>,
    /// Area weights `r dr dphi`, flattened with `phi` slowest.
    pub w: DVector<f64>,
    /// Radial nodes on `[-1, 1]`.
    pub x: Vec<f64>,
    pub nq_r: usize,
}

impl PolarQuadrature {
    pub fn new(params: &AnnulusParams, res: Resolution) -> Self {
        let nq_r = (3 * res.nr) / 2 + 16;
        let mut n_phi = 3 * res.k_max + 4;
        n_phi += n_phi % 2;
        let (x, wx) = gauss_legendre(nq_r);
        let r: Vec<f64> = x.iter().map(|x| params.ri + 0.5 * (x + 1.0)).collect();
        let phi: Vec<f64> = (0..n_phi).map(|j| 2.0 * PI * j as f64 / n_phi as f64).collect();
        let dphi = 2.0 * PI / n_phi as f64;
        let w = DVector::from_fn(nq_r * n_phi, |q, _| {
            let i = q % nq_r;
            wx[i] * 0.5 * r[i] * dphi
        });
        Self { r, phi, w, x, nq_r }
    }

    pub fn len(&self) -> usize {
        self.w.len()
    }

    pub fn is_empty(&self) -> bool {
        self.w.is_empty()
    }

    pub fn r_at(&self, q: usize) -> f64 {
        self.r[q % self.nq_r]
    }

    pub fn phi_at(&self, q: usize) -> f64 {
        self.phi[q / self.nq_r]
    }

    /// `int a b` for rows `a_i`, `b_j` sampled at the points.
    pub fn gram(&self, a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
        let mut aw = a.clone();
        for (q, mut col) in aw.column_iter_mut().enumerate() {
            col *= self.w[q];
        }
        aw * b.transpose()
    }

    /// `int f` for one sampled function.
    pub fn integrate(&self, f: &DVector<f64>) -> f64 {
        self.w.dot(f)
    }
}

/// Radial factor of one basis function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Radial {
    Dirichlet(usize),
    Clamped(usize),
    /// The `k = 0` stream-function with unit net flux.
    Flux,
}

/// One basis function: radial factor times angular mode, with a scale.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BasisFunction {
    pub radial: Radial,
    pub mode: AngularMode,
    pub scale: f64,
}

/// Radial values and `r`-derivatives at the given points on `[-1, 1]`.
fn radial_values(radial: Radial, tables: &RadialTables, q: usize) -> (f64, f64, f64) {
    match radial {
        Radial::Dirichlet(j) => (tables.dir.f[(j, q)], 2.0 * tables.dir.df[(j, q)], 4.0 * tables.dir.ddf[(j, q)]),
        Radial::Clamped(j) => (tables.cla.f[(j, q)], 2.0 * tables.cla.df[(j, q)], 4.0 * tables.cla.ddf[(j, q)]),
        Radial::Flux => {
            let (f, d, dd) = tables.flux[q];
            (f, 2.0 * d, 4.0 * dd)
        }
    }
}

struct RadialTables {
    dir: super::legendre::RadialTable,
    cla: super::legendre::RadialTable,
    flux: Vec<(f64, f64, f64)>,
}

impl RadialTables {
    fn new(nr: usize, x: &[f64]) -> Self {
        Self {
            dir: tabulate(WallCondition::Dirichlet, WallCondition::Dirichlet.count(nr), x),
            cla: tabulate(WallCondition::Clamped, WallCondition::Clamped.count(nr), x),
            flux: x.iter().map(|&x| flux_mode(x)).collect(),
        }
    }
}

/// Stream-function basis functions whose angular modes have one of the given parities.
pub fn stream_functions(parities: &[Parity], res: Resolution) -> Vec<BasisFunction> {
    let mut out = Vec::new();
    for mode in parities.iter().flat_map(|p| angular_family(*p, res.k_max)) {
        if mode.k == 0 {
            out.push(BasisFunction { radial: Radial::Flux, mode, scale: 1.0 });
        }
        for j in 0..WallCondition::Clamped.count(res.nr) {
            out.push(BasisFunction { radial: Radial::Clamped(j), mode, scale: 1.0 });
        }
    }
    out
}

/// Scalar basis functions whose angular modes have one of the given parities.
pub fn scalar_functions(parities: &[Parity], res: Resolution) -> Vec<BasisFunction> {
    let mut out = Vec::new();
    for mode in parities.iter().flat_map(|p| angular_family(*p, res.k_max)) {
        for j in 0..WallCondition::Dirichlet.count(res.nr) {
            out.push(BasisFunction { radial: Radial::Dirichlet(j), mode, scale: 1.0 });
        }
    }
    out
}

/// Velocity fields of stream basis functions sampled at points.
#[derive(Debug, Clone)]
pub struct StreamTable {
    pub vr: DMatrix<f64>,
    pub vphi: DMatrix<f64>,
    pub dvr_dr: DMatrix<f64>,
    pub dvr_dphi: DMatrix<f64>,
    pub dvphi_dr: DMatrix<f64>,
    pub dvphi_dphi: DMatrix<f64>,
    /// Vorticity `-(psi_rr + psi_r / r + psi_phiphi / r^2)`.
    pub omega: DMatrix<f64>,
}

/// Scalar basis functions and their gradients sampled at points.
#[derive(Debug, Clone)]
pub struct ScalarTable {
    pub val: DMatrix<f64>,
    pub dr: DMatrix<f64>,
    /// `(1/r) d/dphi`
    pub dphi_r: DMatrix<f64>,
}

/// Points given as `(x, phi)` with `r = Ri + (x + 1)/2`.
#[derive(Debug, Clone)]
pub struct Points {
    pub x: Vec<f64>,
    pub r: Vec<f64>,
    pub phi: Vec<f64>,
}

impl Points {
    pub fn from_quadrature(q: &PolarQuadrature) -> Self {
        let n = q.len();
        let x = (0..n).map(|i| q.x[i % q.nq_r]).collect();
        let r = (0..n).map(|i| q.r_at(i)).collect();
        let phi = (0..n).map(|i| q.phi_at(i)).collect();
        Self { x, r, phi }
    }

    /// Tensor grid with `r` fastest.
    pub fn tensor(params: &AnnulusParams, x: &[f64], phi: &[f64]) -> Self {
        let mut px = Vec::with_capacity(x.len() * phi.len());
        let mut pphi = Vec::with_capacity(x.len() * phi.len());
        for &p in phi {
            for &xx in x {
                px.push(xx);
                pphi.push(p);
            }
        }
        let r = px.iter().map(|x| params.ri + 0.5 * (x + 1.0)).collect();
        Self { x: px, r, phi: pphi }
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }
}

pub fn tabulate_stream(funcs: &[BasisFunction], nr: usize, pts: &Points) -> StreamTable {
    let (nb, np) = (funcs.len(), pts.len());
    let tables = RadialTables::new(nr, &pts.x);
    let z = || DMatrix::zeros(nb, np);
    let mut t = StreamTable { vr: z(), vphi: z(), dvr_dr: z(), dvr_dphi: z(), dvphi_dr: z(), dvphi_dphi: z(), omega: z() };
    for (i, f) in funcs.iter().enumerate() {
        for q in 0..np {
            let (g, gr, grr) = radial_values(f.radial, &tables, q);
            let (a, da, dda) = f.mode.eval(pts.phi[q]);
            let (r, s) = (pts.r[q], f.scale);
            t.vr[(i, q)] = s * g * da / r;
            t.vphi[(i, q)] = -s * gr * a;
            t.dvr_dr[(i, q)] = s * (gr * da / r - g * da / (r * r));
            t.dvr_dphi[(i, q)] = s * g * dda / r;
            t.dvphi_dr[(i, q)] = -s * grr * a;
            t.dvphi_dphi[(i, q)] = -s * gr * da;
            t.omega[(i, q)] = -s * (grr * a + gr * a / r + g * dda / (r * r));
        }
    }
    t
}

pub fn tabulate_scalar(funcs: &[BasisFunction], nr: usize, pts: &Points) -> ScalarTable {
    let (nb, np) = (funcs.len(), pts.len());
    let tables = RadialTables::new(nr, &pts.x);
    let mut t = ScalarTable { val: DMatrix::zeros(nb, np), dr: DMatrix::zeros(nb, np), dphi_r: DMatrix::zeros(nb, np) };
    for (i, f) in funcs.iter().enumerate() {
        for q in 0..np {
            let (h, hr, _) = radial_values(f.radial, &tables, q);
            let (a, da, _) = f.mode.eval(pts.phi[q]);
            let s = f.scale;
            t.val[(i, q)] = s * h * a;
            t.dr[(i, q)] = s * hr * a;
            t.dphi_r[(i, q)] = s * h * da / pts.r[q];
        }
    }
    t
}

/// Stream and scalar bases tabulated at the quadrature points, scaled so that
/// the dissipation Gram matrices have unit diagonal.
#[derive(Debug, Clone)]
pub struct PolarBasis {
    pub params: AnnulusParams,
    pub res: Resolution,
    pub quad: PolarQuadrature,
    pub stream: Vec<BasisFunction>,
    pub scalar: Vec<BasisFunction>,
    pub us: StreamTable,
    pub ss: ScalarTable,
}

impl PolarBasis {
    /// Angular modes of the stream-function have parity `stream_parity`, those of
    /// the scalar `scalar_parity`.
    pub fn new(params: &AnnulusParams, res: Resolution, stream_parity: Parity, scalar_parity: Parity) -> Self {
        Self::with_families(params, res, &[stream_parity], &[scalar_parity])
    }

    /// Both parities in both bases: no symmetry restriction.
    pub fn full(params: &AnnulusParams, res: Resolution) -> Self {
        let both = [Parity::Even, Parity::Odd];
        Self::with_families(params, res, &both, &both)
    }

    pub fn with_families(params: &AnnulusParams, res: Resolution, stream_parities: &[Parity], scalar_parities: &[Parity]) -> Self {
        let quad = PolarQuadrature::new(params, res);
        let pts = Points::from_quadrature(&quad);
        let mut stream = stream_functions(stream_parities, res);
        let mut scalar = scalar_functions(scalar_parities, res);
        let us = tabulate_stream(&stream, res.nr, &pts);
        let ss = tabulate_scalar(&scalar, res.nr, &pts);
        for (i, f) in stream.iter_mut().enumerate() {
            let row = us.omega.row(i);
            let d: f64 = row.iter().zip(quad.w.iter()).map(|(v, w)| w * v * v).sum();
            f.scale = 1.0 / d.sqrt();
        }
        for (i, f) in scalar.iter_mut().enumerate() {
            let d: f64 = (0..quad.len())
                .map(|q| quad.w[q] * (ss.dr[(i, q)].powi(2) + ss.dphi_r[(i, q)].powi(2)))
                .sum();
            f.scale = 1.0 / d.sqrt();
        }
        let us = tabulate_stream(&stream, res.nr, &pts);
        let ss = tabulate_scalar(&scalar, res.nr, &pts);
        Self { params: *params, res, quad, stream, scalar, us, ss }
    }

    pub fn n_stream(&self) -> usize {
        self.stream.len()
    }

    pub fn n_scalar(&self) -> usize {
        self.scalar.len()
    }

    /// `<omega_i, omega_j>`, which equals `<grad u_i, grad u_j>` for these fields.
    pub fn stream_dissipation(&self) -> DMatrix<f64> {
        self.quad.gram(&self.us.omega, &self.us.omega)
    }

    /// `<grad theta_i, grad theta_j>`.
    pub fn scalar_dissipation(&self) -> DMatrix<f64> {
        self.quad.gram(&self.ss.dr, &self.ss.dr) + self.quad.gram(&self.ss.dphi_r, &self.ss.dphi_r)
    }

    /// `<u_i, u_j>`.
    pub fn stream_mass(&self) -> DMatrix<f64> {
        self.quad.gram(&self.us.vr, &self.us.vr) + self.quad.gram(&self.us.vphi, &self.us.vphi)
    }

    /// `<theta_i, theta_j>`.
    pub fn scalar_mass(&self) -> DMatrix<f64> {
        self.quad.gram(&self.ss.val, &self.ss.val)
    }

    /// Tabulation of this basis at other points.
    pub fn tabulate_at(&self, pts: &Points) -> (StreamTable, ScalarTable) {
        (tabulate_stream(&self.stream, self.res.nr, pts), tabulate_scalar(&self.scalar, self.res.nr, pts))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::annulus::params::AnnulusParams;

    fn basis(sp: Parity, tp: Parity) -> PolarBasis {
        let p = AnnulusParams::new(1.0, 10.0, 1.0).unwrap();
        PolarBasis::new(&p, Resolution::new(3, 10).unwrap(), sp, tp)
    }

    #[test]
    fn families_partition_modes() {
        let e = angular_family(Parity::Even, 4);
        let o = angular_family(Parity::Odd, 4);
        assert_eq!(e.len() + o.len(), 9);
        assert!(e.contains(&AngularMode { k: 0, trig: Trig::Cos }));
        assert!(e.contains(&AngularMode { k: 1, trig: Trig::Sin }));
        assert!(o.contains(&AngularMode { k: 1, trig: Trig::Cos }));
        assert!(o.contains(&AngularMode { k: 2, trig: Trig::Sin }));
        for m in e.iter().chain(&o) {
            let (a, _, _) = m.eval(0.3);
            let (b, _, _) = m.eval(PI - 0.3);
            assert!((b - m.reflection_sign() * a).abs() < 1e-14);
        }
    }

    #[test]
    fn velocities_are_solenoidal_and_vanish_on_walls() {
        let b = basis(Parity::Even, Parity::Even);
        let div = &b.us.dvr_dr;
        let mut worst: f64 = 0.0;
        for q in 0..b.quad.len() {
            let r = b.quad.r_at(q);
            for i in 0..b.n_stream() {
                let d = div[(i, q)] + b.us.vr[(i, q)] / r + b.us.dvphi_dphi[(i, q)] / r;
                worst = worst.max(d.abs());
            }
        }
        assert!(worst < 1e-10);
        let pts = Points::tensor(&b.params, &[-1.0, 1.0], &[0.1, 1.3, 4.0]);
        let (st, sc) = b.tabulate_at(&pts);
        assert!(st.vr.amax() < 1e-12 && st.vphi.amax() < 1e-12 && sc.val.amax() < 1e-12);
    }

    #[test]
    fn dissipation_matches_full_gradient() {
        let b = basis(Parity::Odd, Parity::Odd);
        let g = b.stream_dissipation();
        for i in 0..b.n_stream() {
            assert!((g[(i, i)] - 1.0).abs() < 1e-12);
        }
        // ||grad u||^2 = ||omega||^2 for divergence-free fields vanishing on the walls
        let u = &b.us;
        let mut full = 0.0;
        let i = 3;
        for q in 0..b.quad.len() {
            let r = b.quad.r_at(q);
            let a = u.dvr_dr[(i, q)];
            let bb = (u.dvr_dphi[(i, q)] - u.vphi[(i, q)]) / r;
            let c = u.dvphi_dr[(i, q)];
            let d = (u.dvphi_dphi[(i, q)] + u.vr[(i, q)]) / r;
            full += b.quad.w[q] * (a * a + bb * bb + c * c + d * d);
        }
        assert!((full - 1.0).abs() < 1e-10);
    }

    #[test]
    fn flux_mode_only_in_even_stream_family() {
        let e = stream_functions(&[Parity::Even], Resolution::new(2, 8).unwrap());
        let o = stream_functions(&[Parity::Odd], Resolution::new(2, 8).unwrap());
        assert!(e.iter().any(|f| f.radial == Radial::Flux));
        assert!(!o.iter().any(|f| f.radial == Radial::Flux));
    }
}

//! Quadratic forms of the perturbation energy about an even-symmetric base state.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::annulus::basis::{Parity, PolarBasis};
use crate::annulus::field::{PolarField, Reflection};
use crate::annulus::steady::{scale_cols, symmetric_basis, BaseState, PointFields, SteadyOperator};
use crate::error::{invalid, Result};

/// Cartesian vertical component `u^r sin(phi) + u^phi cos(phi)`.
pub fn vertical_components(u: &PolarField, phi: &[f64]) -> Vec<Vec<f64>> {
    (0..u.nodes()).map(|i| phi.iter().map(|&p| u.vertical(i, p)).collect()).collect()
}

/// Base velocity and temperature with derivatives at the quadrature points.
pub fn base_point_fields(base: &BaseState) -> PointFields {
    let basis = symmetric_basis(&base.params, base.res);
    PointFields::new(&basis, &base.psi_vec(), &base.tau_vec())
}

/// Symmetry class of a perturbation, compared to the even base state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SymmetryLabel {
    Even,
    Odd,
    Mixed,
}

impl SymmetryLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            SymmetryLabel::Even => "even",
            SymmetryLabel::Odd => "odd",
            SymmetryLabel::Mixed => "mixed",
        }
    }

    /// Threshold `1e-8` on the reflection residual relative to the field size.
    pub fn classify(field: &PolarField) -> Self {
        let scale = field.max_abs();
        if scale == 0.0 {
            return SymmetryLabel::Even;
        }
        if field.residual_against(Reflection::Even) < 1e-8 * scale {
            SymmetryLabel::Even
        } else if field.residual_against(Reflection::Odd) < 1e-8 * scale {
            SymmetryLabel::Odd
        } else {
            SymmetryLabel::Mixed
        }
    }
}

/// Perturbation families: `Even` keeps the reflection symmetry of the base state
/// (stream modes odd, scalar modes even); `Odd` breaks it.
pub fn block_parities(block: Parity) -> (Parity, Parity) {
    match block {
        Parity::Even => (Parity::Odd, Parity::Even),
        Parity::Odd => (Parity::Even, Parity::Odd),
    }
}

/// A perturbation `(u, sigma)` given by coefficients in a [`PolarBasis`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PerturbationPair {
    pub stream_parities: Vec<Parity>,
    pub scalar_parities: Vec<Parity>,
    pub psi: Vec<f64>,
    pub sigma: Vec<f64>,
    /// `u` and `sigma` on radial nodes.
    pub field: PolarField,
}

impl PerturbationPair {
    pub fn new(basis: &PolarBasis, stream_parities: &[Parity], scalar_parities: &[Parity], psi: &[f64], sigma: &[f64]) -> Result<Self> {
        let field = PolarField::from_coefficients(basis, psi, sigma, 24)?;
        Ok(Self {
            stream_parities: stream_parities.to_vec(),
            scalar_parities: scalar_parities.to_vec(),
            psi: psi.to_vec(),
            sigma: sigma.to_vec(),
            field,
        })
    }

    pub fn basis(&self, base: &BaseState) -> PolarBasis {
        PolarBasis::with_families(&base.params, base.res, &self.stream_parities, &self.scalar_parities)
    }

    pub fn label(&self) -> SymmetryLabel {
        SymmetryLabel::classify(&self.field)
    }

    pub fn is_zero(&self) -> bool {
        self.psi.iter().chain(&self.sigma).all(|&c| c == 0.0)
    }
}

/// Numerator and denominator of the stability functional, by pointwise quadrature.
pub fn functional_parts(basis: &PolarBasis, base: &PointFields, psi: &DVector<f64>, sigma: &DVector<f64>) -> (f64, f64) {
    let p = basis.params;
    let u = PointFields::new(basis, psi, sigma);
    let omega = basis.us.omega.tr_mul(psi);
    let q = &basis.quad;
    let sra = p.ra.sqrt();
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 0..q.len() {
        let (r, phi) = (q.r_at(i), q.phi_at(i));
        let (ur, up, s) = (u.vr[i], u.vphi[i], u.tau[i]);
        let uz = ur * phi.sin() + up * phi.cos();
        let adv_r = ur * base.dvr_dr[i] + up / r * (base.dvr_dphi[i] - base.vphi[i]);
        let adv_p = ur * base.dvphi_dr[i] + up / r * (base.dvphi_dphi[i] + base.vr[i]);
        let adv_t = ur * base.tau_r[i] + up * base.tau_phi_r[i];
        let n = sra * (uz + ur / (r * p.b)) * s - (ur * adv_r + up * adv_p) / p.pr - sra * adv_t * s;
        let d = omega[i] * omega[i] + u.tau_r[i] * u.tau_r[i] + u.tau_phi_r[i] * u.tau_phi_r[i];
        num += q.w[i] * n;
        den += q.w[i] * d;
    }
    (num, den)
}

/// The stability functional `F(u, sigma)` of a perturbation about `base`.
#[allow(non_snake_case)]
pub fn functional_F(pair: &PerturbationPair, base: &BaseState) -> Result<f64> {
    if pair.is_zero() {
        return invalid("the zero perturbation has no stability quotient");
    }
    let basis = pair.basis(base);
    if basis.n_stream() != pair.psi.len() || basis.n_scalar() != pair.sigma.len() {
        return invalid("perturbation does not match the base resolution");
    }
    let bf = base_point_fields(base);
    let (num, den) = functional_parts(&basis, &bf, &DVector::from_column_slice(&pair.psi), &DVector::from_column_slice(&pair.sigma));
    if !(den > 0.0) {
        return invalid("perturbation has zero dissipation");
    }
    Ok(num / den)
}

/// Matrices of the perturbation problem on one basis.
///
/// With `x = (psi, sigma)` the functional is `F = x^T S x / x^T G x`; the
/// linearized evolution is
///
/// ```text
/// (1/Pr) Mu psi' = -(1/Pr)(A0 + K) psi - Gu psi + sqrt(Ra) Ct sigma
///        Ms sigma' = -(Gs + B0) sigma + sqrt(Ra) C psi
/// ```
#[derive(Debug, Clone)]
pub struct StabilityOperator {
    pub op: SteadyOperator,
    /// `<u_j . grad v0, u_i>`
    pub k: DMatrix<f64>,
    /// `<v0 . grad u_j, u_i>`, antisymmetric
    pub a0: DMatrix<f64>,
    /// `<v0 . grad theta_j, theta_i>`, antisymmetric
    pub b0: DMatrix<f64>,
    /// `<u_j^z + u_j^r / (r B) - u_j . grad tau0, theta_i>`
    pub c: DMatrix<f64>,
    pub base: PointFields,
}

impl StabilityOperator {
    pub fn new(base: &BaseState, stream_parities: &[Parity], scalar_parities: &[Parity]) -> Self {
        let basis = PolarBasis::with_families(&base.params, base.res, stream_parities, scalar_parities);
        Self::with_basis(base, basis)
    }

    pub fn block(base: &BaseState, block: Parity) -> Self {
        let (sp, tp) = block_parities(block);
        Self::new(base, &[sp], &[tp])
    }

    pub fn with_basis(base: &BaseState, basis: PolarBasis) -> Self {
        let bf = base_point_fields(base);
        let op = SteadyOperator::new(basis);
        let u = &op.basis.us;
        let s = &op.basis.ss;
        let q = &op.basis.quad;
        let ir = op.inv_r();
        let a = &bf.dvr_dr;
        let b = (&bf.dvr_dphi - &bf.vphi).component_mul(ir);
        let c = &bf.dvphi_dr;
        let d = (&bf.dvphi_dphi + &bf.vr).component_mul(ir);
        let k = q.gram(&u.vr, &(scale_cols(&u.vr, a) + scale_cols(&u.vphi, &b)))
            + q.gram(&u.vphi, &(scale_cols(&u.vr, c) + scale_cols(&u.vphi, &d)));
        let a0 = op.oseen_stream(&bf.vr, &bf.vphi);
        let b0 = op.oseen_scalar(&bf.vr, &bf.vphi);
        let adv_tau0 = scale_cols(&u.vr, &bf.tau_r) + scale_cols(&u.vphi, &bf.tau_phi_r);
        let c = op.ct.transpose() + &op.bv - q.gram(&s.val, &adv_tau0);
        Self { op, k, a0, b0, c, base: bf }
    }

    pub fn basis(&self) -> &PolarBasis {
        &self.op.basis
    }

    pub fn n_stream(&self) -> usize {
        self.op.basis.n_stream()
    }

    pub fn len(&self) -> usize {
        self.op.basis.n_stream() + self.op.basis.n_scalar()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Dissipation form `G = diag(Gu, Gs)`.
    pub fn dissipation(&self) -> DMatrix<f64> {
        let ns = self.n_stream();
        let n = self.len();
        let mut g = DMatrix::zeros(n, n);
        g.view_mut((0, 0), (ns, ns)).copy_from(&self.op.gu);
        g.view_mut((ns, ns), (n - ns, n - ns)).copy_from(&self.op.gs);
        g
    }

    /// Symmetric numerator form `S`.
    pub fn production(&self) -> DMatrix<f64> {
        let p = self.op.params();
        let ns = self.n_stream();
        let n = self.len();
        let mut s = DMatrix::zeros(n, n);
        let ksym = (&self.k + self.k.transpose()) * (-0.5 / p.pr);
        s.view_mut((0, 0), (ns, ns)).copy_from(&ksym);
        let half = 0.5 * p.ra.sqrt();
        s.view_mut((ns, 0), (n - ns, ns)).copy_from(&(&self.c * half));
        s.view_mut((0, ns), (ns, n - ns)).copy_from(&(self.c.transpose() * half));
        s
    }

    /// Energy weight `diag(Mu / Pr, Ms)`, so that `E = x^T W x / 2`.
    pub fn energy_weight(&self) -> DMatrix<f64> {
        let p = self.op.params();
        let ns = self.n_stream();
        let n = self.len();
        let mut w = DMatrix::zeros(n, n);
        w.view_mut((0, 0), (ns, ns)).copy_from(&(self.op.basis.stream_mass() / p.pr));
        w.view_mut((ns, ns), (n - ns, n - ns)).copy_from(&self.op.basis.scalar_mass());
        w
    }

    /// `W x' = L x`.
    pub fn evolution(&self) -> DMatrix<f64> {
        let p = self.op.params();
        let ns = self.n_stream();
        let n = self.len();
        let sra = p.ra.sqrt();
        let mut l = DMatrix::zeros(n, n);
        l.view_mut((0, 0), (ns, ns))
            .copy_from(&(-(&self.a0 + &self.k) / p.pr - &self.op.gu));
        l.view_mut((0, ns), (ns, n - ns)).copy_from(&(&self.op.ct * sra));
        l.view_mut((ns, 0), (n - ns, ns)).copy_from(&(&self.c - self.op.ct.transpose()).scale(sra));
        l.view_mut((ns, ns), (n - ns, n - ns)).copy_from(&(-(&self.op.gs + &self.b0)));
        l
    }

    /// `F` by pointwise quadrature for a stacked coefficient vector.
    pub fn functional(&self, x: &DVector<f64>) -> (f64, f64) {
        let ns = self.n_stream();
        functional_parts(&self.op.basis, &self.base, &x.rows(0, ns).into_owned(), &x.rows(ns, x.len() - ns).into_owned())
    }

    pub fn pair(&self, x: &DVector<f64>) -> Result<PerturbationPair> {
        let ns = self.n_stream();
        let sp: Vec<Parity> = parities_of(&self.op.basis, true);
        let tp: Vec<Parity> = parities_of(&self.op.basis, false);
        PerturbationPair::new(&self.op.basis, &sp, &tp, &x.as_slice()[..ns], &x.as_slice()[ns..])
    }
}

fn parities_of(basis: &PolarBasis, stream: bool) -> Vec<Parity> {
    let funcs = if stream { &basis.stream } else { &basis.scalar };
    let mut out = Vec::new();
    for f in funcs {
        let p = f.mode.parity();
        if !out.contains(&p) {
            out.push(p);
        }
    }
    out.sort_by_key(|p| matches!(p, Parity::Odd));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::annulus::basis::Resolution;
    use crate::annulus::params::AnnulusParams;
    use crate::annulus::steady::{steady_solve, SteadyOptions};
    use rand::{Rng, SeedableRng};

    fn base(ra: f64) -> BaseState {
        let p = AnnulusParams::new(1.0, ra, 1.0).unwrap();
        steady_solve(&p, Resolution::new(3, 10).unwrap(), SteadyOptions::default()).unwrap()
    }

    fn random(n: usize, seed: u64) -> DVector<f64> {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        DVector::from_fn(n, |_, _| rng.gen_range(-1.0..1.0))
    }

    #[test]
    fn quadratic_forms_match_pointwise_functional() {
        let b = base(40.0);
        let op = StabilityOperator::new(&b, &[Parity::Even, Parity::Odd], &[Parity::Even, Parity::Odd]);
        let (g, s) = (op.dissipation(), op.production());
        for seed in 0..3 {
            let x = random(op.len(), seed);
            let (num, den) = op.functional(&x);
            assert!((x.dot(&(&g * &x)) - den).abs() < 1e-11 * den);
            assert!((x.dot(&(&s * &x)) - num).abs() < 1e-11 * den);
        }
    }

    #[test]
    fn advection_by_base_is_antisymmetric() {
        let b = base(40.0);
        let op = StabilityOperator::block(&b, Parity::Odd);
        let scale = op.a0.amax().max(1e-300);
        assert!((&op.a0 + op.a0.transpose()).amax() < 1e-10 * scale);
        assert!((&op.b0 + op.b0.transpose()).amax() < 1e-10 * op.b0.amax());
    }

    #[test]
    fn energy_rate_is_functional_identity() {
        let b = base(25.0);
        let op = StabilityOperator::new(&b, &[Parity::Even, Parity::Odd], &[Parity::Even, Parity::Odd]);
        let x = random(op.len(), 7);
        let rate = x.dot(&(op.evolution() * &x));
        let (num, den) = op.functional(&x);
        assert!((rate - (num - den)).abs() < 1e-9 * den);
    }

    #[test]
    fn functional_is_scale_invariant_and_vanishes_without_u() {
        let b = base(30.0);
        let op = StabilityOperator::block(&b, Parity::Even);
        let x = random(op.len(), 3);
        let pair = op.pair(&x).unwrap();
        let f1 = functional_F(&pair, &b).unwrap();
        let pair2 = op.pair(&(&x * -3.5)).unwrap();
        assert!((functional_F(&pair2, &b).unwrap() - f1).abs() < 1e-12 * f1.abs().max(1.0));
        let mut y = x.clone();
        y.rows_mut(0, op.n_stream()).fill(0.0);
        assert_eq!(functional_F(&op.pair(&y).unwrap(), &b).unwrap(), 0.0);
        assert!(functional_F(&op.pair(&(x * 0.0)).unwrap(), &b).is_err());
    }

    #[test]
    fn vertical_component_of_unit_fields() {
        let mut f = PolarField::zeros(1, vec![1.0, 2.0]);
        f.vr.cos[0] = vec![1.0, 1.0];
        let v = vertical_components(&f, &[std::f64::consts::FRAC_PI_2]);
        assert!((v[0][0] - 1.0).abs() < 1e-15);
        let mut g = PolarField::zeros(1, vec![1.0]);
        g.vphi.cos[0] = vec![1.0];
        assert_eq!(vertical_components(&g, &[0.0])[0][0], 1.0);
    }
}

//! Even-symmetric steady convection in the annulus by Picard iteration.
//!
//! Weak form, tested with the stream basis `w` and scalar basis `theta`:
//!
//! ```text
//! <omega_v, omega_w> + (1/Pr) <v . grad v, w> - Ra <tau e_3, w> = (Ra / B) <sin(phi) e_r, w>
//! <grad tau, grad theta> + <v . grad tau, theta> - <v^r / (r B), theta> = 0
//! ```
//!
//! Each Picard step freezes the advecting velocity and solves the coupled
//! linear problem; the iterate is damped by 1/2 whenever the residual grows.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::basis::{self, Parity, PolarBasis, Resolution};
use super::field::{PolarField, MAX_ANGULAR, MAX_NODES};
use super::params::AnnulusParams;
use crate::error::{invalid, Error, Result};

/// Column `q` of `m` times `v[q]`.
pub(crate) fn scale_cols(m: &DMatrix<f64>, v: &DVector<f64>) -> DMatrix<f64> {
    let mut out = m.clone();
    for (q, mut col) in out.column_iter_mut().enumerate() {
        col *= v[q];
    }
    out
}

/// Velocity, its derivatives and the temperature gradient of a state at the quadrature points.
#[derive(Debug, Clone)]
pub struct PointFields {
    pub vr: DVector<f64>,
    pub vphi: DVector<f64>,
    pub dvr_dr: DVector<f64>,
    pub dvr_dphi: DVector<f64>,
    pub dvphi_dr: DVector<f64>,
    pub dvphi_dphi: DVector<f64>,
    pub tau: DVector<f64>,
    pub tau_r: DVector<f64>,
    pub tau_phi_r: DVector<f64>,
}

impl PointFields {
    pub fn new(basis: &PolarBasis, psi: &DVector<f64>, tau: &DVector<f64>) -> Self {
        let s = |m: &DMatrix<f64>| m.tr_mul(psi);
        let t = |m: &DMatrix<f64>| m.tr_mul(tau);
        Self {
            vr: s(&basis.us.vr),
            vphi: s(&basis.us.vphi),
            dvr_dr: s(&basis.us.dvr_dr),
            dvr_dphi: s(&basis.us.dvr_dphi),
            dvphi_dr: s(&basis.us.dvphi_dr),
            dvphi_dphi: s(&basis.us.dvphi_dphi),
            tau: t(&basis.ss.val),
            tau_r: t(&basis.ss.dr),
            tau_phi_r: t(&basis.ss.dphi_r),
        }
    }
}

/// Matrices of the steady problem on one basis.
#[derive(Debug, Clone)]
pub struct SteadyOperator {
    pub basis: PolarBasis,
    pub gu: DMatrix<f64>,
    pub gs: DMatrix<f64>,
    /// `<tau_j e_3, w_i>`
    pub ct: DMatrix<f64>,
    /// `<v^r_j / (r B), theta_i>`
    pub bv: DMatrix<f64>,
    pub forcing: DVector<f64>,
    inv_r: DVector<f64>,
    sin_phi: DVector<f64>,
    cos_phi: DVector<f64>,
}

impl SteadyOperator {
    pub fn new(basis: PolarBasis) -> Self {
        let q = &basis.quad;
        let p = basis.params;
        let inv_r = DVector::from_fn(q.len(), |i, _| 1.0 / q.r_at(i));
        let sin_phi = DVector::from_fn(q.len(), |i, _| q.phi_at(i).sin());
        let cos_phi = DVector::from_fn(q.len(), |i, _| q.phi_at(i).cos());
        let uz = scale_cols(&basis.us.vr, &sin_phi) + scale_cols(&basis.us.vphi, &cos_phi);
        let ct = q.gram(&uz, &basis.ss.val);
        let bv = q.gram(&basis.ss.val, &scale_cols(&basis.us.vr, &(&inv_r / p.b)));
        let forcing = (scale_cols(&basis.us.vr, &sin_phi) * &q.w) * (p.ra / p.b);
        Self { gu: basis.stream_dissipation(), gs: basis.scalar_dissipation(), ct, bv, forcing, inv_r, sin_phi, cos_phi, basis }
    }

    pub fn params(&self) -> &AnnulusParams {
        &self.basis.params
    }

    /// `<a . grad u_j, w_i>` for a frozen advecting velocity `a`.
    pub fn oseen_stream(&self, ar: &DVector<f64>, aphi: &DVector<f64>) -> DMatrix<f64> {
        let u = &self.basis.us;
        let ap_r = aphi.component_mul(&self.inv_r);
        let adv_r = scale_cols(&u.dvr_dr, ar) + scale_cols(&(&u.dvr_dphi - &u.vphi), &ap_r);
        let adv_p = scale_cols(&u.dvphi_dr, ar) + scale_cols(&(&u.dvphi_dphi + &u.vr), &ap_r);
        self.basis.quad.gram(&u.vr, &adv_r) + self.basis.quad.gram(&u.vphi, &adv_p)
    }

    /// `<a . grad theta_j, theta_i>`.
    pub fn oseen_scalar(&self, ar: &DVector<f64>, aphi: &DVector<f64>) -> DMatrix<f64> {
        let s = &self.basis.ss;
        let adv = scale_cols(&s.dr, ar) + scale_cols(&s.dphi_r, aphi);
        self.basis.quad.gram(&s.val, &adv)
    }

    pub fn sin_phi(&self) -> &DVector<f64> {
        &self.sin_phi
    }

    pub fn cos_phi(&self) -> &DVector<f64> {
        &self.cos_phi
    }

    pub fn inv_r(&self) -> &DVector<f64> {
        &self.inv_r
    }

    /// Nonlinear residual `(R_u, R_tau)` stacked, evaluated pointwise.
    pub fn residual(&self, psi: &DVector<f64>, tau: &DVector<f64>) -> DVector<f64> {
        let p = self.params();
        let f = PointFields::new(&self.basis, psi, tau);
        let w = &self.basis.quad.w;
        let ir = &self.inv_r;
        let vp_r = f.vphi.component_mul(ir);
        let adv_r = f.vr.component_mul(&f.dvr_dr) + vp_r.component_mul(&(&f.dvr_dphi - &f.vphi));
        let adv_p = f.vr.component_mul(&f.dvphi_dr) + vp_r.component_mul(&(&f.dvphi_dphi + &f.vr));
        let u = &self.basis.us;
        let conv = (&u.vr * adv_r.component_mul(w) + &u.vphi * adv_p.component_mul(w)) / p.pr;
        let ru = &self.gu * psi + conv - &self.ct * tau * p.ra - &self.forcing;
        let s = &self.basis.ss;
        let adv_t = f.vr.component_mul(&f.tau_r) + f.vphi.component_mul(&f.tau_phi_r);
        let rt = &self.gs * tau + &s.val * adv_t.component_mul(w) - &self.bv * psi;
        let mut out = DVector::zeros(ru.len() + rt.len());
        out.rows_mut(0, ru.len()).copy_from(&ru);
        out.rows_mut(ru.len(), rt.len()).copy_from(&rt);
        out
    }

    /// `max |R| / max |forcing|`; zero forcing is measured absolutely.
    pub fn relative_residual(&self, psi: &DVector<f64>, tau: &DVector<f64>) -> f64 {
        let scale = self.forcing.amax();
        let r = self.residual(psi, tau).amax();
        if scale > 0.0 {
            r / scale
        } else {
            r
        }
    }

    /// Linear solve with the advecting velocity `(ar, aphi)` frozen.
    pub fn solve_frozen(&self, ar: &DVector<f64>, aphi: &DVector<f64>) -> Result<(DVector<f64>, DVector<f64>)> {
        let p = self.params();
        let (ns, nt) = (self.basis.n_stream(), self.basis.n_scalar());
        let mut a = DMatrix::zeros(ns + nt, ns + nt);
        a.view_mut((0, 0), (ns, ns)).copy_from(&(&self.gu + self.oseen_stream(ar, aphi) / p.pr));
        a.view_mut((0, ns), (ns, nt)).copy_from(&(&self.ct * -p.ra));
        a.view_mut((ns, 0), (nt, ns)).copy_from(&(-&self.bv));
        a.view_mut((ns, ns), (nt, nt)).copy_from(&(&self.gs + self.oseen_scalar(ar, aphi)));
        let mut rhs = DVector::zeros(ns + nt);
        rhs.rows_mut(0, ns).copy_from(&self.forcing);
        let x = a
            .lu()
            .solve(&rhs)
            .ok_or_else(|| Error::Resolution("singular steady-state system".into()))?;
        Ok((x.rows(0, ns).into_owned(), x.rows(ns, nt).into_owned()))
    }
}

/// Iteration controls for [`steady_solve`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyOptions {
    pub max_iters: usize,
    pub tol: f64,
    /// Radial nodes of the returned [`PolarField`].
    pub nodes: usize,
}

impl Default for SteadyOptions {
    fn default() -> Self {
        Self { max_iters: 200, tol: 1e-12, nodes: 40 }
    }
}

/// Even-symmetric steady state.
///
/// `psi` and `tau` are coefficients in the symmetric basis (stream modes odd,
/// scalar modes even under `phi -> pi - phi`) at resolution `res`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BaseState {
    pub params: AnnulusParams,
    pub res: Resolution,
    pub psi: Vec<f64>,
    pub tau: Vec<f64>,
    /// `v_0` and `tau_0` on radial nodes.
    pub fields: PolarField,
    pub residual: f64,
    pub picard_iters: usize,
    pub grad_v_norm: f64,
    pub grad_tau_norm: f64,
}

/// Basis of the symmetric subspace.
pub fn symmetric_basis(params: &AnnulusParams, res: Resolution) -> PolarBasis {
    PolarBasis::new(params, res, Parity::Odd, Parity::Even)
}

impl BaseState {
    /// The motionless state (used as the base of the limit problems).
    pub fn zero(params: &AnnulusParams, res: Resolution) -> Self {
        let basis = symmetric_basis(params, res);
        let (ns, nt) = (basis.n_stream(), basis.n_scalar());
        let fields = PolarField::from_coefficients(&basis, &vec![0.0; ns], &vec![0.0; nt], 2).expect("sizes match");
        Self {
            params: *params,
            res,
            psi: vec![0.0; ns],
            tau: vec![0.0; nt],
            fields,
            residual: 0.0,
            picard_iters: 0,
            grad_v_norm: 0.0,
            grad_tau_norm: 0.0,
        }
    }

    pub fn psi_vec(&self) -> DVector<f64> {
        DVector::from_column_slice(&self.psi)
    }

    pub fn tau_vec(&self) -> DVector<f64> {
        DVector::from_column_slice(&self.tau)
    }

    pub fn symmetry_residual(&self) -> f64 {
        self.fields.symmetry_residual()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&serde_json::to_value(self)?)?)
    }

    /// Parses and checks a serialized base state for internal consistency.
    pub fn from_json(text: &str) -> Result<Self> {
        let b: Self = serde_json::from_str(text)?;
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<()> {
        let p = &self.params;
        let expected = AnnulusParams::new(p.pr, p.ra, p.d)?;
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * a.abs().max(1.0);
        let derived = [(expected.b, p.b), (expected.eps, p.eps), (expected.ri, p.ri), (expected.ro, p.ro)];
        if !derived.iter().all(|&(a, b)| close(a, b)) {
            return invalid("derived geometry does not match the gap parameter");
        }
        let res = Resolution::new(self.res.k_max, self.res.nr)?;
        if res.k_max > MAX_ANGULAR || res.nr > MAX_NODES {
            return invalid("base-state resolution out of range");
        }
        let ns = basis::stream_functions(&[Parity::Odd], res).len();
        let nt = basis::scalar_functions(&[Parity::Even], res).len();
        if self.psi.len() != ns || self.tau.len() != nt {
            return invalid(format!("expected {ns} stream and {nt} scalar coefficients"));
        }
        self.fields.validate()?;
        if self.fields.k_max != res.k_max {
            return invalid("sampled field and coefficients differ in angular resolution");
        }
        let scalars = [self.residual, self.grad_v_norm, self.grad_tau_norm];
        if !self.psi.iter().chain(&self.tau).chain(&scalars).all(|v| v.is_finite()) {
            return invalid("base state has non-finite entries");
        }
        Ok(())
    }
}

/// Picard iteration for the even-symmetric steady state.
pub fn steady_solve(params: &AnnulusParams, res: Resolution, opts: SteadyOptions) -> Result<BaseState> {
    let op = SteadyOperator::new(symmetric_basis(params, res));
    steady_solve_with(&op, opts)
}

pub fn steady_solve_with(op: &SteadyOperator, opts: SteadyOptions) -> Result<BaseState> {
    let nq = op.basis.quad.len();
    let zero = DVector::zeros(nq);
    let (mut psi, mut tau) = op.solve_frozen(&zero, &zero)?;
    let mut res = op.relative_residual(&psi, &tau);
    let mut iters = 1;
    while !(res < opts.tol) {
        if iters >= opts.max_iters || !res.is_finite() {
            return Err(Error::Divergence { iterations: iters, residual: res });
        }
        let ar = op.basis.us.vr.tr_mul(&psi);
        let aphi = op.basis.us.vphi.tr_mul(&psi);
        let (mut p1, mut t1) = op.solve_frozen(&ar, &aphi)?;
        iters += 1;
        let mut r1 = op.relative_residual(&p1, &t1);
        if r1 > res {
            p1 = &psi + (&p1 - &psi) * 0.5;
            t1 = &tau + (&t1 - &tau) * 0.5;
            r1 = op.relative_residual(&p1, &t1);
        }
        psi = p1;
        tau = t1;
        res = r1;
    }
    let fields = PolarField::from_coefficients(&op.basis, psi.as_slice(), tau.as_slice(), opts.nodes)?;
    let grad_v_norm = psi.dot(&(&op.gu * &psi)).max(0.0).sqrt();
    let grad_tau_norm = tau.dot(&(&op.gs * &tau)).max(0.0).sqrt();
    Ok(BaseState {
        params: *op.params(),
        res: op.basis.res,
        psi: psi.as_slice().to_vec(),
        tau: tau.as_slice().to_vec(),
        fields,
        residual: res,
        picard_iters: iters,
        grad_v_norm,
        grad_tau_norm,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::annulus::basis::{AngularMode, BasisFunction, Radial};
    use rand::{Rng, SeedableRng};

    fn res() -> Resolution {
        Resolution::new(4, 12).unwrap()
    }

    #[test]
    fn json_round_trip_and_rejection() {
        let p = AnnulusParams::new(1.0, 20.0, 1.0).unwrap();
        let b = steady_solve(&p, Resolution::new(2, 8).unwrap(), SteadyOptions::default()).unwrap();
        let text = b.to_json().unwrap();
        let back = BaseState::from_json(&text).unwrap();
        assert_eq!(back.psi, b.psi);
        assert_eq!(back.fields, b.fields);

        let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
        v["psi"].as_array_mut().unwrap().pop();
        assert!(BaseState::from_json(&v.to_string()).is_err());
        let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
        v["fields"]["k_max"] = 100000.into();
        assert!(BaseState::from_json(&v.to_string()).is_err());
        let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
        v["fields"]["tau"]["cos"][0].as_array_mut().unwrap().pop();
        assert!(BaseState::from_json(&v.to_string()).is_err());
        let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
        v["params"]["ri"] = 3.0.into();
        assert!(BaseState::from_json(&v.to_string()).is_err());
    }

    #[test]
    fn converges_with_symmetric_output() {
        let p = AnnulusParams::new(1.0, 50.0, 1.0).unwrap();
        let b = steady_solve(&p, res(), SteadyOptions::default()).unwrap();
        assert!(b.residual < 1e-10);
        assert!(b.symmetry_residual() < 1e-10);
        assert!(b.grad_v_norm > 0.0);
    }

    #[test]
    fn small_rayleigh_limit_is_stokes() {
        let p = AnnulusParams::new(1.0, 1e-4, 1.0).unwrap();
        let op = SteadyOperator::new(symmetric_basis(&p, res()));
        let b = steady_solve_with(&op, SteadyOptions::default()).unwrap();
        let stokes = op.gu.clone().lu().solve(&(&op.forcing / p.ra)).unwrap();
        let scaled = b.psi_vec() / p.ra;
        assert!((scaled - &stokes).amax() < 1e-3 * stokes.amax());
        assert!(b.grad_v_norm < 1e-3);
    }

    #[test]
    fn zero_rayleigh_gives_rest() {
        let p = AnnulusParams::new(1.0, 0.0, 1.0).unwrap();
        let b = steady_solve(&p, res(), SteadyOptions::default()).unwrap();
        assert_eq!(b.grad_v_norm, 0.0);
    }

    fn reflect(funcs: &[BasisFunction], x: &DVector<f64>, stream: bool) -> DVector<f64> {
        // psi(r, phi) -> -psi(r, pi - phi); tau(r, phi) -> tau(r, pi - phi)
        DVector::from_fn(x.len(), |i, _| {
            let m: AngularMode = funcs[i].mode;
            let s = m.reflection_sign();
            x[i] * if stream { -s } else { s }
        })
    }

    #[test]
    fn residual_commutes_with_reflection() {
        let p = AnnulusParams::new(0.7, 30.0, 1.5).unwrap();
        let basis = PolarBasis::full(&p, Resolution::new(3, 10).unwrap());
        let op = SteadyOperator::new(basis);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let psi = DVector::from_fn(op.basis.n_stream(), |_, _| rng.gen_range(-1.0..1.0));
        let tau = DVector::from_fn(op.basis.n_scalar(), |_, _| rng.gen_range(-1.0..1.0));
        let r = op.residual(&psi, &tau);
        let rp = reflect(&op.basis.stream, &psi, true);
        let rt = reflect(&op.basis.scalar, &tau, false);
        let r_refl = op.residual(&rp, &rt);
        let ns = op.basis.n_stream();
        let expect_u = reflect(&op.basis.stream, &r.rows(0, ns).into_owned(), true);
        let expect_t = reflect(&op.basis.scalar, &r.rows(ns, r.len() - ns).into_owned(), false);
        assert!((r_refl.rows(0, ns) - expect_u).amax() < 1e-10 * r.amax());
        assert!((r_refl.rows(ns, r.len() - ns) - expect_t).amax() < 1e-10 * r.amax());
        assert!(op.basis.stream.iter().any(|f| f.radial == Radial::Flux));
    }
}

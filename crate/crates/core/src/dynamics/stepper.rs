//! Integrating-factor Heun scheme.
//!
//! The linear part `L` (diffusion, buoyancy `Ra tau e_3` and the source `v^z`)
//! is integrated exactly through `E = exp(L dt)`; it couples each stream mode
//! `(m, n)` only with the temperature mode of opposite x-parity, so `E` is a
//! set of 2x2 blocks. Advection is explicit:
//!
//! ```text
//! a       = E (y_n + dt F(y_n))
//! y_{n+1} = E y_n + dt/2 (E F(y_n) + F(a))
//! ```

use std::f64::consts::PI;

use nalgebra::{DMatrix, Matrix2};

use crate::error::{Error, Result};
use crate::spectral::{FieldKind, SpectralField};

use super::nonlinear::{Nonlinear, NonlinearPlan};
use super::state::{OBParams, OBState};

/// Reusable integrator for one parameter set and truncation.
#[derive(Debug, Clone)]
pub struct Stepper {
    params: OBParams,
    plan: NonlinearPlan,
    /// `exp(L dt)` on `(Phi_cos, tau_sin)` and `(Phi_sin, tau_cos)`, indexed `m * (n_max + 1) + n`.
    blocks: Vec<[Matrix2<f64>; 2]>,
}

/// Generator of the linear dynamics on one mode pair; `sign = +1` for
/// `(Phi_cos, tau_sin)`, `-1` for `(Phi_sin, tau_cos)`.
pub(crate) fn linear_block(pr: f64, ra: f64, m: usize, n: usize, sign: f64) -> Matrix2<f64> {
    let k = 2.0 * PI * m as f64;
    let k2 = k * k + (PI * n as f64).powi(2);
    Matrix2::new(-pr * k2, -sign * pr * ra * k / k2, -sign * k, -k2)
}

/// `exp(M h)` for a real 2x2 matrix through `N^2 = q I`, `N = M - tr(M)/2 I`.
pub(crate) fn expm2(mat: &Matrix2<f64>, h: f64) -> Matrix2<f64> {
    if mat[(0, 1)] == 0.0 && mat[(1, 0)] == 0.0 {
        return Matrix2::new((mat[(0, 0)] * h).exp(), 0.0, 0.0, (mat[(1, 1)] * h).exp());
    }
    let mu = 0.5 * mat.trace();
    let nm = mat - Matrix2::identity() * mu;
    let q = nm[(0, 0)] * nm[(0, 0)] + nm[(0, 1)] * nm[(1, 0)];
    let (c, s) = if q > 0.0 {
        let w = q.sqrt();
        ((w * h).cosh(), if w * h > 1e-8 { (w * h).sinh() / w } else { h })
    } else if q < 0.0 {
        let w = (-q).sqrt();
        ((w * h).cos(), if w * h > 1e-8 { (w * h).sin() / w } else { h })
    } else {
        (1.0, h)
    };
    (Matrix2::identity() * c + nm * s) * (mu * h).exp()
}

impl Stepper {
    pub fn new(params: OBParams) -> Self {
        let (mm, nn) = (params.m_max, params.n_max);
        let mut blocks = Vec::with_capacity((mm + 1) * (nn + 1));
        for m in 0..=mm {
            for n in 0..=nn {
                blocks.push([
                    expm2(&linear_block(params.pr, params.ra, m, n, 1.0), params.dt),
                    expm2(&linear_block(params.pr, params.ra, m, n, -1.0), params.dt),
                ]);
            }
        }
        Self { params, plan: NonlinearPlan::new(mm, nn), blocks }
    }

    pub fn params(&self) -> &OBParams {
        &self.params
    }

    pub(crate) fn plan(&self) -> &NonlinearPlan {
        &self.plan
    }

    /// Explicit (advective) tendency given the forcing `nl` of the advecting state.
    pub(crate) fn tendency(&self, y: &OBState, nl: &Nonlinear) -> Result<OBState> {
        let stream = nl.vorticity.map_modes(|idx| 1.0 / idx.wavenumber_sq());
        let temperature = nl.temperature.scaled(-1.0);
        Ok(OBState { stream, temperature, mean_flow: 0.0, t: y.t })
    }

    /// Exact linear evolution over `dt`; the mean flow is left untouched.
    pub(crate) fn propagate(&self, y: &OBState) -> OBState {
        let (mm, nn) = (self.params.m_max, self.params.n_max);
        let (pc, ps) = (y.stream.cos_part(), y.stream.sin_part());
        let (tc, ts) = (y.temperature.cos_part(), y.temperature.sin_part());
        let mut out_pc = DMatrix::zeros(mm + 1, nn + 1);
        let mut out_ps = DMatrix::zeros(mm + 1, nn + 1);
        let mut out_tc = DMatrix::zeros(mm + 1, nn + 1);
        let mut out_ts = DMatrix::zeros(mm + 1, nn + 1);
        for m in 0..=mm {
            for n in 1..=nn {
                let [b1, b2] = &self.blocks[m * (nn + 1) + n];
                let (a, b) = (pc[(m, n)], ts[(m, n)]);
                out_pc[(m, n)] = b1[(0, 0)] * a + b1[(0, 1)] * b;
                out_ts[(m, n)] = b1[(1, 0)] * a + b1[(1, 1)] * b;
                let (a, b) = (ps[(m, n)], tc[(m, n)]);
                out_ps[(m, n)] = b2[(0, 0)] * a + b2[(0, 1)] * b;
                out_tc[(m, n)] = b2[(1, 0)] * a + b2[(1, 1)] * b;
            }
        }
        OBState {
            stream: SpectralField::from_parts(FieldKind::StreamLike, out_pc, out_ps),
            temperature: SpectralField::from_parts(FieldKind::StreamLike, out_tc, out_ts),
            mean_flow: y.mean_flow,
            t: y.t,
        }
    }

    /// One Heun step with a caller-supplied tendency `f(y, t)`.
    pub(crate) fn heun(&self, y: &OBState, f: impl Fn(&OBState, f64) -> Result<OBState>) -> Result<OBState> {
        let dt = self.params.dt;
        let k1 = f(y, y.t)?;
        let mut pred = self.propagate(&axpy(y, dt, &k1)?);
        pred.t = y.t + dt;
        let k2 = f(&pred, pred.t)?;
        let mut next = axpy(&self.propagate(y), 0.5 * dt, &self.propagate(&k1).add(&k2)?)?;
        next.t = y.t + dt;
        if !next.stream.is_finite() || !next.temperature.is_finite() {
            return Err(Error::BlowUp { t: next.t });
        }
        Ok(next)
    }

    pub fn step(&self, y: &OBState) -> Result<OBState> {
        self.heun(y, |s, _| self.tendency(s, &self.plan.evaluate(s)?))
    }
}

/// `y + h k` on the stream-function and temperature; `y`'s mean flow and time are kept.
fn axpy(y: &OBState, h: f64, k: &OBState) -> Result<OBState> {
    Ok(OBState {
        stream: y.stream.add(&k.stream.scaled(h))?,
        temperature: y.temperature.add(&k.temperature.scaled(h))?,
        mean_flow: y.mean_flow,
        t: y.t,
    })
}

/// Advances `state` by one `params.dt`.
pub fn step(state: &OBState, params: &OBParams) -> Result<OBState> {
    check_truncation(state, params)?;
    Stepper::new(*params).step(state)
}

pub(crate) fn check_truncation(state: &OBState, params: &OBParams) -> Result<()> {
    state.validate()?;
    if state.m_max() != params.m_max || state.n_max() != params.n_max {
        return Err(Error::InvalidInput(format!(
            "state truncation ({}, {}) differs from parameters ({}, {})",
            state.m_max(),
            state.n_max(),
            params.m_max,
            params.n_max
        )));
    }
    Ok(())
}

use crate::error::Result;
use crate::spectral::{d_dx, d_dz, laplacian, FieldKind, ProductPlan, SpectralField, VelocityField};

use super::state::OBState;

/// Advective forcing of one state, projected onto its truncation.
///
/// `vorticity` holds the coefficients of `v . grad omega` with `omega = Lap Phi`.
/// This is the Galerkin projection of `v . grad v` onto the divergence-free
/// fields `(-xi_z, xi_x)`: `<a, curl* xi> = -<curl a, xi>` for every stream-like `xi`,
/// and the pressure gradient drops out.
#[derive(Debug, Clone, PartialEq)]
pub struct Nonlinear {
    pub vorticity: SpectralField,
    pub temperature: SpectralField,
}

/// Cached padded grid for repeated evaluations at one truncation.
#[derive(Debug, Clone)]
pub struct NonlinearPlan {
    plan: ProductPlan,
    m_max: usize,
    n_max: usize,
}

impl NonlinearPlan {
    pub fn new(m_max: usize, n_max: usize) -> Self {
        Self { plan: ProductPlan::dealiased(m_max, n_max), m_max, n_max }
    }

    pub fn evaluate(&self, state: &OBState) -> Result<Nonlinear> {
        let (m, n) = (self.m_max, self.n_max);
        let state = if state.m_max() == m && state.n_max() == n { state.clone() } else { state.resized(m, n) };
        let p = &self.plan;
        let v: VelocityField = state.velocity();
        let omega = laplacian(&state.stream);
        let vx = p.to_grid(&v.vx)?;
        let vz = p.to_grid(&v.vz)?;

        let wx = p.to_grid(&d_dx(&omega))?;
        let wz = p.to_grid(&d_dz(&omega))?;
        let adv_w = vx.component_mul(&wx) + vz.component_mul(&wz);

        let tx = p.to_grid(&d_dx(&state.temperature))?;
        let tz = p.to_grid(&d_dz(&state.temperature))?;
        let adv_t = vx.component_mul(&tx) + vz.component_mul(&tz);

        Ok(Nonlinear {
            vorticity: p.from_grid(&adv_w, FieldKind::StreamLike)?,
            temperature: p.from_grid(&adv_t, FieldKind::StreamLike)?,
        })
    }
}

/// `(P(v . grad omega), P(v . grad tau))` on the state's own truncation.
pub fn nonlinear_term(state: &OBState) -> Result<Nonlinear> {
    NonlinearPlan::new(state.m_max(), state.n_max()).evaluate(state)
}

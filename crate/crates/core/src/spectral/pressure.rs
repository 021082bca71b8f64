use super::basis::{FieldKind, ModeIndex};
use super::field::SpectralField;
use super::ops::{d_dx, d_dz, inverse_laplacian, ProductPlan};
use super::velocity::VelocityField;
use crate::error::{invalid, Error, Result};

/// Right-hand side `-(1/Pr) div(v . grad v) + Ra tau_z` on the doubled
/// truncation, where the quadratic term is represented exactly.
pub fn pressure_rhs(v: &VelocityField, tau: &SpectralField, pr: f64, ra: f64) -> Result<SpectralField> {
    if !(pr > 0.0) {
        return invalid("Pr must be positive");
    }
    if tau.kind() != FieldKind::StreamLike || v.vx.kind() != FieldKind::PressureLike || v.vz.kind() != FieldKind::StreamLike {
        return invalid("velocity/temperature kinds violate the stress-free boundary families");
    }
    let m = v.vx.m_max().max(tau.m_max());
    let n = v.vx.n_max().max(tau.n_max());
    let (m2, n2) = (2 * m, 2 * n);
    let plan = ProductPlan::new(m, n, m2, n2);

    let vx = plan.to_grid(&v.vx.resized(m, n))?;
    let vz = plan.to_grid(&v.vz.resized(m, n))?;
    let dvx_dx = plan.to_grid(&d_dx(&v.vx).resized(m, n))?;
    let dvx_dz = plan.to_grid(&d_dz(&v.vx).resized(m, n))?;
    let dvz_dx = plan.to_grid(&d_dx(&v.vz).resized(m, n))?;
    let dvz_dz = plan.to_grid(&d_dz(&v.vz).resized(m, n))?;

    let adv_x = vx.component_mul(&dvx_dx) + vz.component_mul(&dvx_dz);
    let adv_z = vx.component_mul(&dvz_dx) + vz.component_mul(&dvz_dz);
    let adv_x = plan.from_grid(&adv_x, FieldKind::PressureLike)?;
    let adv_z = plan.from_grid(&adv_z, FieldKind::StreamLike)?;

    let div = d_dx(&adv_x).add(&d_dz(&adv_z))?;
    let buoy = d_dz(&tau.resized(m2, n2));
    div.scaled(-1.0 / pr).add(&buoy.scaled(ra))
}

/// Neumann pressure solve on the periodicity cell, zero-mean gauge.
///
/// The returned field lives on the doubled truncation of the inputs.
pub fn solve_pressure_neumann(v: &VelocityField, tau: &SpectralField, pr: f64, ra: f64) -> Result<SpectralField> {
    let rhs = pressure_rhs(v, tau, pr, ra)?;
    let mean = rhs.get(ModeIndex::cos(0, 0));
    let scale = rhs.max_abs().max(1.0);
    if mean.abs() > 1e-10 * scale {
        return Err(Error::InconsistentData(format!(
            "Neumann compatibility violated: mean of right-hand side is {mean:e}"
        )));
    }
    Ok(inverse_laplacian(&rhs).with_zero_mean())
}

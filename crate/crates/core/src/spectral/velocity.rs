use nalgebra::DMatrix;

use super::basis::{FieldKind, ModeIndex};
use super::field::SpectralField;
use super::grid::{GridSpec, Transform};
use super::ops::{d_dx, d_dz};
use crate::error::{invalid, Result};

/// Velocity in coefficient form: `vx` is pressure-like (cos in z),
/// `vz` stream-like (sin in z). Stress-free conditions `vz = 0` and
/// `d vx / dz = 0` at the walls hold for every coefficient set.
#[derive(Debug, Clone, PartialEq)]
pub struct VelocityField {
    pub vx: SpectralField,
    pub vz: SpectralField,
}

impl VelocityField {
    pub fn on_grid(&self, grid: GridSpec) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
        let t = Transform::new(grid, self.vx.m_max(), self.vx.n_max())?;
        Ok((t.backward(&self.vx)?, t.backward(&self.vz)?))
    }

    /// Spectral divergence (pressure-like field).
    pub fn divergence(&self) -> Result<SpectralField> {
        d_dx(&self.vx).add(&d_dz(&self.vz))
    }

    /// Uniform horizontal velocity carried by the `(0, 0)` mode of `vx`.
    pub fn mean_flow(&self) -> f64 {
        self.vx.get(ModeIndex::cos(0, 0))
    }

    pub fn eval(&self, x: f64, z: f64) -> (f64, f64) {
        (self.vx.eval(x, z), self.vz.eval(x, z))
    }
}

/// `vz = Phi_x`, `vx = -Phi_z`, plus an optional uniform flow `mean_flow e_1`
/// (the Galilean null solution, which has no periodic stream-function).
pub fn velocity_from_stream(phi: &SpectralField, mean_flow: f64) -> Result<VelocityField> {
    if phi.kind() != FieldKind::StreamLike {
        return invalid("stream-function must be stream-like (sin in z)");
    }
    let mut vx = d_dz(phi).scaled(-1.0);
    vx.set(ModeIndex::cos(0, 0), mean_flow)?;
    let vz = d_dx(phi);
    Ok(VelocityField { vx, vz })
}

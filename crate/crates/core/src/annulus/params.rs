use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Dimensionless annulus parameters; lengths are scaled by the gap `Ro - Ri`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnnulusParams {
    pub pr: f64,
    pub ra: f64,
    /// Gap parameter `2 Ri / (Ro - Ri)`.
    pub d: f64,
    /// `log(Ro / Ri) = log(1 + 2 / d)`.
    pub b: f64,
    /// `1 / b`.
    pub eps: f64,
    pub ri: f64,
    pub ro: f64,
}

impl AnnulusParams {
    pub fn new(pr: f64, ra: f64, d: f64) -> Result<Self> {
        if !(pr > 0.0) || !pr.is_finite() {
            return invalid("Pr must be positive");
        }
        if !(ra >= 0.0) || !ra.is_finite() {
            return invalid("Ra must be non-negative");
        }
        let g = geometry(d)?;
        Ok(Self { pr, ra, ..g })
    }
}

/// Geometry for gap parameter `d`; `pr` and `ra` are set to 1 and 0.
pub fn geometry(d: f64) -> Result<AnnulusParams> {
    if !(d > 0.0) || !d.is_finite() {
        return invalid("gap parameter D must be positive");
    }
    let b = (2.0 / d).ln_1p();
    Ok(AnnulusParams { pr: 1.0, ra: 0.0, d, b, eps: 1.0 / b, ri: 0.5 * d, ro: 1.0 + 0.5 * d })
}

/// Dimensional data of an annulus experiment (SI units).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams {
    /// Kinematic viscosity.
    pub nu: f64,
    /// Thermal diffusivity.
    pub kappa: f64,
    /// Volume expansion coefficient.
    pub alpha: f64,
    pub g: f64,
    /// Inner minus outer wall temperature.
    pub d_theta: f64,
    /// `Ro - Ri`.
    pub gap: f64,
}

/// `(Pr, Ra) = (nu / kappa, alpha g dTheta gap^3 / (nu kappa))`.
pub fn nondimensionalize(p: &PhysicalParams) -> Result<(f64, f64)> {
    if !(p.nu > 0.0) || !(p.kappa > 0.0) {
        return invalid("viscosity and diffusivity must be positive");
    }
    if !(p.alpha > 0.0) || !(p.g > 0.0) || !(p.gap > 0.0) {
        return invalid("expansion coefficient, gravity and gap must be positive");
    }
    if !p.d_theta.is_finite() {
        return invalid("temperature difference must be finite");
    }
    Ok((p.nu / p.kappa, p.alpha * p.g * p.d_theta * p.gap.powi(3) / (p.nu * p.kappa)))
}

/// Pure-conduction temperature `Theta_i + (Theta_o - Theta_i) log(r / Ri) / log(Ro / Ri)`.
pub fn conduction_lift(r: f64, theta_i: f64, theta_o: f64, ri: f64, ro: f64) -> Result<f64> {
    if !(ri > 0.0) || !(ro > ri) {
        return invalid("radii must satisfy 0 < Ri < Ro");
    }
    if !(ri..=ro).contains(&r) {
        return invalid(format!("r = {r} outside [{ri}, {ro}]"));
    }
    Ok(theta_i + (theta_o - theta_i) * (r / ri).ln() / (ro / ri).ln())
}

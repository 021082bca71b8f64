use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Vertical family of a field on the periodicity cell.
///
/// `PressureLike` fields expand in `cos(pi n z)` (Neumann at the walls),
/// `StreamLike` fields (stream-function, temperature) in `sin(pi n z)`
/// (Dirichlet at the walls).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldKind {
    PressureLike,
    StreamLike,
}

impl FieldKind {
    /// Kind obtained after one z-derivative.
    pub fn flipped(self) -> Self {
        match self {
            FieldKind::PressureLike => FieldKind::StreamLike,
            FieldKind::StreamLike => FieldKind::PressureLike,
        }
    }

    /// Kind of a pointwise product of two fields.
    pub fn product(self, other: Self) -> Self {
        if self == other {
            FieldKind::PressureLike
        } else {
            FieldKind::StreamLike
        }
    }

    /// Smallest admissible vertical index.
    pub fn n_min(self) -> usize {
        match self {
            FieldKind::PressureLike => 0,
            FieldKind::StreamLike => 1,
        }
    }

    pub(crate) fn z_factor(self, n: usize, z: f64) -> f64 {
        let arg = PI * n as f64 * z;
        match self {
            FieldKind::PressureLike => arg.cos(),
            FieldKind::StreamLike => arg.sin(),
        }
    }

    /// Mean square of the vertical factor over (0, 1).
    pub(crate) fn z_norm_sq(self, n: usize) -> f64 {
        match (self, n) {
            (FieldKind::PressureLike, 0) => 1.0,
            (FieldKind::StreamLike, 0) => 0.0,
            _ => 0.5,
        }
    }
}

/// Horizontal parity: `+1` selects `cos(2 pi m x)`, `-1` selects `sin(2 pi m x)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Parity {
    Sin,
    Cos,
}

impl Parity {
    pub fn from_sign(sign: i8) -> Result<Self> {
        match sign {
            1 => Ok(Parity::Cos),
            -1 => Ok(Parity::Sin),
            other => invalid(format!("parity must be +1 or -1, got {other}")),
        }
    }

    pub fn sign(self) -> i8 {
        match self {
            Parity::Cos => 1,
            Parity::Sin => -1,
        }
    }

    pub(crate) fn x_factor(self, m: usize, x: f64) -> f64 {
        let arg = 2.0 * PI * m as f64 * x;
        match self {
            Parity::Cos => arg.cos(),
            Parity::Sin => arg.sin(),
        }
    }

    pub(crate) fn x_norm_sq(self, m: usize) -> f64 {
        match (self, m) {
            (Parity::Cos, 0) => 1.0,
            (Parity::Sin, 0) => 0.0,
            _ => 0.5,
        }
    }
}

/// Index `(m, n, parity)` of a trigonometric basis element.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ModeIndex {
    pub m: usize,
    pub n: usize,
    pub parity: Parity,
}

impl ModeIndex {
    pub fn new(m: usize, n: usize, parity: Parity) -> Result<Self> {
        if parity == Parity::Sin && m == 0 {
            return invalid("sin(2 pi 0 x) vanishes identically; parity -1 needs m >= 1");
        }
        Ok(Self { m, n, parity })
    }

    pub fn cos(m: usize, n: usize) -> Self {
        Self { m, n, parity: Parity::Cos }
    }

    pub fn sin(m: usize, n: usize) -> Result<Self> {
        Self::new(m, n, Parity::Sin)
    }

    /// Modes with `m = 0` span the x-independent subspace.
    pub fn is_symmetric_subspace(&self) -> bool {
        self.m == 0
    }

    /// Eigenvalue magnitude of `-Laplacian` on this mode.
    pub fn wavenumber_sq(&self) -> f64 {
        let kx = 2.0 * PI * self.m as f64;
        let kz = PI * self.n as f64;
        kx * kx + kz * kz
    }
}

/// Evaluates one basis element at `(x, z)` in the unit cell.
pub fn eval_basis(idx: ModeIndex, kind: FieldKind, x: f64, z: f64) -> Result<f64> {
    if idx.parity == Parity::Sin && idx.m == 0 {
        return invalid("parity -1 with m = 0 is not a basis element");
    }
    if !(0.0..=1.0).contains(&x) || !(0.0..=1.0).contains(&z) {
        return invalid(format!("point ({x}, {z}) outside the unit cell"));
    }
    Ok(idx.parity.x_factor(idx.m, x) * kind.z_factor(idx.n, z))
}

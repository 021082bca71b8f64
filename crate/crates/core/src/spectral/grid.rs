use std::f64::consts::PI;

use nalgebra::DMatrix;

use super::basis::FieldKind;
use super::field::SpectralField;
use crate::error::{Error, Result};

/// Physical grid on the periodicity cell: `x_j = j / nx`, `z_j = (j + 1/2) / nz`.
///
/// Midpoints in z make the `cos(pi n z)` and `sin(pi n z)` families discretely
/// orthogonal without endpoint weights.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridSpec {
    pub nx: usize,
    pub nz: usize,
}

impl GridSpec {
    pub fn new(nx: usize, nz: usize) -> Result<Self> {
        if nx == 0 || nz == 0 {
            return Err(Error::Resolution("grid sizes must be positive".into()));
        }
        Ok(Self { nx, nz })
    }

    /// Smallest grid that resolves the given truncation exactly.
    pub fn for_truncation(m_max: usize, n_max: usize) -> Self {
        Self { nx: 2 * m_max + 2, nz: 2 * n_max + 2 }
    }

    pub fn x(&self, j: usize) -> f64 {
        j as f64 / self.nx as f64
    }

    pub fn z(&self, j: usize) -> f64 {
        (j as f64 + 0.5) / self.nz as f64
    }

    pub fn check_resolves(&self, m_max: usize, n_max: usize) -> Result<()> {
        if self.nx < 2 * m_max + 2 || self.nz < 2 * n_max + 2 {
            return Err(Error::Resolution(format!(
                "grid {}x{} below truncation ({m_max}, {n_max}); need nx >= {}, nz >= {}",
                self.nx,
                self.nz,
                2 * m_max + 2,
                2 * n_max + 2
            )));
        }
        Ok(())
    }

    /// Mean over all grid nodes.
    pub fn mean(values: &DMatrix<f64>) -> f64 {
        values.sum() / values.len() as f64
    }
}

/// Direct (matrix) transform between a truncation and a grid.
///
/// Values are `nx x nz` matrices indexed `(i, j)` for node `(x_i, z_j)`.
#[derive(Debug, Clone)]
pub struct Transform {
    grid: GridSpec,
    m_max: usize,
    n_max: usize,
    cos_x: DMatrix<f64>,
    sin_x: DMatrix<f64>,
    cos_z: DMatrix<f64>,
    sin_z: DMatrix<f64>,
}

impl Transform {
    /// Transform without a resolution check; exactness then depends on the caller.
    pub(crate) fn unchecked(grid: GridSpec, m_max: usize, n_max: usize) -> Self {
        let cos_x = DMatrix::from_fn(m_max + 1, grid.nx, |m, i| (2.0 * PI * m as f64 * grid.x(i)).cos());
        let sin_x = DMatrix::from_fn(m_max + 1, grid.nx, |m, i| (2.0 * PI * m as f64 * grid.x(i)).sin());
        let cos_z = DMatrix::from_fn(n_max + 1, grid.nz, |n, j| (PI * n as f64 * grid.z(j)).cos());
        let sin_z = DMatrix::from_fn(n_max + 1, grid.nz, |n, j| (PI * n as f64 * grid.z(j)).sin());
        Self { grid, m_max, n_max, cos_x, sin_x, cos_z, sin_z }
    }

    pub fn new(grid: GridSpec, m_max: usize, n_max: usize) -> Result<Self> {
        grid.check_resolves(m_max, n_max)?;
        Ok(Self::unchecked(grid, m_max, n_max))
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    pub fn m_max(&self) -> usize {
        self.m_max
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    fn z_table(&self, kind: FieldKind) -> &DMatrix<f64> {
        match kind {
            FieldKind::PressureLike => &self.cos_z,
            FieldKind::StreamLike => &self.sin_z,
        }
    }

    /// Synthesis on the grid. Fields with a smaller truncation are accepted.
    pub fn backward(&self, field: &SpectralField) -> Result<DMatrix<f64>> {
        let (fm, fn_) = (field.m_max(), field.n_max());
        if fm > self.m_max || fn_ > self.n_max {
            return Err(Error::Resolution(format!(
                "field truncation ({fm}, {fn_}) exceeds transform ({}, {})",
                self.m_max, self.n_max
            )));
        }
        let z = self.z_table(field.kind()).rows(0, fn_ + 1);
        let cx = self.cos_x.rows(0, fm + 1);
        let sx = self.sin_x.rows(0, fm + 1);
        let out = cx.transpose() * (field.cos_part() * z) + sx.transpose() * (field.sin_part() * z);
        Ok(out)
    }

    /// Analysis onto this transform's truncation.
    pub fn forward(&self, values: &DMatrix<f64>, kind: FieldKind) -> Result<SpectralField> {
        if values.shape() != (self.grid.nx, self.grid.nz) {
            return Err(Error::InvalidInput(format!(
                "value array {:?} does not match grid {}x{}",
                values.shape(),
                self.grid.nx,
                self.grid.nz
            )));
        }
        let z = self.z_table(kind);
        let vz = values * z.transpose();
        let mut cos_part = &self.cos_x * &vz;
        let mut sin_part = &self.sin_x * &vz;
        let nx = self.grid.nx as f64;
        let nz = self.grid.nz as f64;
        for m in 0..=self.m_max {
            let wx = if m == 0 { 1.0 / nx } else { 2.0 / nx };
            for n in 0..=self.n_max {
                let wz = if kind == FieldKind::PressureLike && n == 0 { 1.0 / nz } else { 2.0 / nz };
                cos_part[(m, n)] *= wx * wz;
                sin_part[(m, n)] *= wx * wz;
            }
        }
        Ok(SpectralField::from_parts(kind, cos_part, sin_part))
    }
}

/// Grid values to coefficients.
pub fn to_spectral(values: &DMatrix<f64>, grid: GridSpec, kind: FieldKind, m_max: usize, n_max: usize) -> Result<SpectralField> {
    Transform::new(grid, m_max, n_max)?.forward(values, kind)
}

/// Coefficients to grid values.
pub fn to_physical(field: &SpectralField, grid: GridSpec) -> Result<DMatrix<f64>> {
    Transform::new(grid, field.m_max(), field.n_max())?.backward(field)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::basis::ModeIndex;

    #[test]
    fn constant_field_maps_to_mean_mode() {
        let grid = GridSpec::for_truncation(3, 3);
        let ones = DMatrix::from_element(grid.nx, grid.nz, 1.0);
        let f = to_spectral(&ones, grid, FieldKind::PressureLike, 3, 3).unwrap();
        assert!((f.get(ModeIndex::cos(0, 0)) - 1.0).abs() < 1e-14);
        let rest: f64 = f.modes().filter(|i| *i != ModeIndex::cos(0, 0)).map(|i| f.get(i).abs()).sum();
        assert!(rest < 1e-13);
        assert_eq!(f.with_zero_mean().max_abs() < 1e-13, true);
    }

    #[test]
    fn rejects_under_resolved_grid() {
        let grid = GridSpec::new(5, 8).unwrap();
        assert!(Transform::new(grid, 3, 3).is_err());
        let f = SpectralField::zeros(FieldKind::StreamLike, 3, 3);
        assert!(to_physical(&f, grid).is_err());
    }

    #[test]
    fn discrete_orthogonality() {
        let (m_max, n_max) = (4, 5);
        let grid = GridSpec::for_truncation(m_max, n_max);
        for kind in [FieldKind::PressureLike, FieldKind::StreamLike] {
            let proto = SpectralField::zeros(kind, m_max, n_max);
            let modes: Vec<_> = proto.modes().collect();
            let t = Transform::new(grid, m_max, n_max).unwrap();
            let vals: Vec<_> = modes
                .iter()
                .map(|&i| t.backward(&SpectralField::single(kind, m_max, n_max, i, 1.0).unwrap()).unwrap())
                .collect();
            for a in 0..modes.len() {
                for b in 0..a {
                    let ip = GridSpec::mean(&vals[a].component_mul(&vals[b]));
                    assert!(ip.abs() < 1e-13, "{:?} {:?} {ip}", modes[a], modes[b]);
                }
            }
        }
    }
}

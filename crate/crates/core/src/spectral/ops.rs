//! Per-mode spectral operators and dealiased products.
//!
//! Sign conventions: `d/dx cos(2 pi m x) = -2 pi m sin(2 pi m x)` and
//! `d/dx sin(2 pi m x) = 2 pi m cos(2 pi m x)`; in z,
//! `d/dz sin(pi n z) = pi n cos(pi n z)` and `d/dz cos(pi n z) = -pi n sin(pi n z)`.

use std::f64::consts::PI;

use nalgebra::DMatrix;

use super::basis::{FieldKind, ModeIndex};
use super::field::SpectralField;
use super::grid::{GridSpec, Transform};
use crate::error::Result;

pub fn d_dx(f: &SpectralField) -> SpectralField {
    let (rows, cols) = (f.m_max() + 1, f.n_max() + 1);
    let mut cos_part = DMatrix::zeros(rows, cols);
    let mut sin_part = DMatrix::zeros(rows, cols);
    for m in 1..rows {
        let k = 2.0 * PI * m as f64;
        for n in 0..cols {
            sin_part[(m, n)] = -k * f.cos_part()[(m, n)];
            cos_part[(m, n)] = k * f.sin_part()[(m, n)];
        }
    }
    SpectralField::from_parts(f.kind(), cos_part, sin_part)
}

pub fn d_dz(f: &SpectralField) -> SpectralField {
    let (rows, cols) = (f.m_max() + 1, f.n_max() + 1);
    let sign = match f.kind() {
        FieldKind::StreamLike => 1.0,
        FieldKind::PressureLike => -1.0,
    };
    let mut cos_part = DMatrix::zeros(rows, cols);
    let mut sin_part = DMatrix::zeros(rows, cols);
    for n in 1..cols {
        let k = sign * PI * n as f64;
        for m in 0..rows {
            cos_part[(m, n)] = k * f.cos_part()[(m, n)];
            sin_part[(m, n)] = k * f.sin_part()[(m, n)];
        }
    }
    SpectralField::from_parts(f.kind().flipped(), cos_part, sin_part)
}

pub fn laplacian(f: &SpectralField) -> SpectralField {
    f.map_modes(|idx| -idx.wavenumber_sq())
}

/// Inverse Laplacian on the zero-mean complement; the `(0, 0)` mode maps to 0.
pub fn inverse_laplacian(f: &SpectralField) -> SpectralField {
    f.map_modes(|idx| {
        let k2 = idx.wavenumber_sq();
        if k2 == 0.0 {
            0.0
        } else {
            -1.0 / k2
        }
    })
}

/// Exact (alias-free) products of truncated fields on a padded grid.
///
/// Inputs up to `(m_in, n_in)` are synthesized on a grid large enough that
/// every product is projected onto `(m_out, n_out)` without aliasing.
#[derive(Debug, Clone)]
pub struct ProductPlan {
    input: Transform,
    output: Transform,
}

impl ProductPlan {
    pub fn new(m_in: usize, n_in: usize, m_out: usize, n_out: usize) -> Self {
        // x: p + q < nx for product wavenumber p <= 2 m_in, test q <= m_out.
        // z: p + q < 2 nz for the half-range cos/sin families.
        let nx = (2 * m_in + m_out + 1).max(2 * m_out.max(m_in) + 2);
        let nz = ((2 * n_in + n_out) / 2 + 1).max(2 * n_out.max(n_in) + 2);
        let grid = GridSpec { nx, nz };
        Self {
            input: Transform::unchecked(grid, m_in, n_in),
            output: Transform::unchecked(grid, m_out, n_out),
        }
    }

    /// Plan with output truncation equal to the input (the 3/2 rule).
    pub fn dealiased(m_max: usize, n_max: usize) -> Self {
        Self::new(m_max, n_max, m_max, n_max)
    }

    pub fn grid(&self) -> GridSpec {
        self.input.grid()
    }

    pub fn to_grid(&self, f: &SpectralField) -> Result<DMatrix<f64>> {
        self.input.backward(f)
    }

    pub fn from_grid(&self, values: &DMatrix<f64>, kind: FieldKind) -> Result<SpectralField> {
        self.output.forward(values, kind)
    }

    pub fn multiply(&self, a: &SpectralField, b: &SpectralField) -> Result<SpectralField> {
        let va = self.to_grid(a)?;
        let vb = self.to_grid(b)?;
        self.from_grid(&va.component_mul(&vb), a.kind().product(b.kind()))
    }
}

/// Convenience wrapper: `a * b` projected exactly onto `(m_out, n_out)`.
pub fn product(a: &SpectralField, b: &SpectralField, m_out: usize, n_out: usize) -> Result<SpectralField> {
    let m_in = a.m_max().max(b.m_max());
    let n_in = a.n_max().max(b.n_max());
    ProductPlan::new(m_in, n_in, m_out, n_out).multiply(a, b)
}

/// `cos/sin` eigenvalue check helper used by tests and diagnostics.
pub fn mode_wavenumber_sq(m: usize, n: usize) -> f64 {
    ModeIndex::cos(m, n).wavenumber_sq()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::basis::Parity;

    fn single(kind: FieldKind, idx: ModeIndex) -> SpectralField {
        SpectralField::single(kind, 3, 3, idx, 1.0).unwrap()
    }

    #[test]
    fn laplacian_of_vertical_sine() {
        let f = single(FieldKind::StreamLike, ModeIndex::cos(0, 1));
        let l = laplacian(&f);
        assert!((l.get(ModeIndex::cos(0, 1)) + PI * PI).abs() < 1e-13);
    }

    #[test]
    fn laplacian_of_roll() {
        let f = single(FieldKind::StreamLike, ModeIndex::cos(1, 1));
        let l = laplacian(&f);
        assert!((l.get(ModeIndex::cos(1, 1)) + 5.0 * PI * PI).abs() < 1e-12);
    }

    #[test]
    fn dz_of_sine_is_cosine() {
        for n in 1..=3 {
            let f = single(FieldKind::StreamLike, ModeIndex::cos(0, n));
            let d = d_dz(&f);
            assert_eq!(d.kind(), FieldKind::PressureLike);
            assert!((d.get(ModeIndex::cos(0, n)) - PI * n as f64).abs() < 1e-13);
        }
    }

    #[test]
    fn dx_swaps_parity_with_signs() {
        let f = single(FieldKind::PressureLike, ModeIndex::cos(2, 1));
        let d = d_dx(&f);
        assert!((d.get(ModeIndex { m: 2, n: 1, parity: Parity::Sin }) + 4.0 * PI).abs() < 1e-13);
        let g = single(FieldKind::PressureLike, ModeIndex::sin(2, 1).unwrap());
        let e = d_dx(&g);
        assert!((e.get(ModeIndex::cos(2, 1)) - 4.0 * PI).abs() < 1e-13);
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let mut f = SpectralField::zeros(FieldKind::StreamLike, 2, 3);
        f.set(ModeIndex::cos(1, 2), 0.7).unwrap();
        f.set(ModeIndex::sin(2, 1).unwrap(), -0.4).unwrap();
        f.set(ModeIndex::cos(0, 3), 0.2).unwrap();
        let (x, z, h) = (0.31, 0.47, 1e-5);
        let fx = (f.eval(x + h, z) - f.eval(x - h, z)) / (2.0 * h);
        let fz = (f.eval(x, z + h) - f.eval(x, z - h)) / (2.0 * h);
        assert!((d_dx(&f).eval(x, z) - fx).abs() < 1e-6);
        assert!((d_dz(&f).eval(x, z) - fz).abs() < 1e-6);
    }

    #[test]
    fn product_is_exact() {
        let a = single(FieldKind::StreamLike, ModeIndex::cos(1, 1));
        let b = single(FieldKind::StreamLike, ModeIndex::cos(1, 2));
        // cos^2(2 pi x) sin(pi z) sin(2 pi z) on the doubled truncation
        let p = product(&a, &b, 2, 3).unwrap();
        for &(x, z) in &[(0.1, 0.2), (0.77, 0.5), (0.4, 0.93)] {
            let exact = a.eval(x, z) * b.eval(x, z);
            assert!((p.eval(x, z) - exact).abs() < 1e-13);
        }
    }
}

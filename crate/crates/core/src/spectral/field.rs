use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::basis::{FieldKind, ModeIndex, Parity};
use crate::error::{invalid, Error, Result};

/// Largest truncation accepted from serialized data.
pub const MAX_TRUNCATION: usize = 1024;

/// Truncated trigonometric expansion on the periodicity cell.
///
/// Coefficients are stored densely: `cos_x[(m, n)]` multiplies
/// `cos(2 pi m x)`, `sin_x[(m, n)]` multiplies `sin(2 pi m x)`; the vertical
/// factor is set by `kind`. Row `m = 0` of `sin_x` and, for stream-like
/// fields, column `n = 0` stay zero.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    kind: FieldKind,
    m_max: usize,
    n_max: usize,
    cos_x: DMatrix<f64>,
    sin_x: DMatrix<f64>,
}

impl SpectralField {
    pub fn zeros(kind: FieldKind, m_max: usize, n_max: usize) -> Self {
        Self {
            kind,
            m_max,
            n_max,
            cos_x: DMatrix::zeros(m_max + 1, n_max + 1),
            sin_x: DMatrix::zeros(m_max + 1, n_max + 1),
        }
    }

    pub fn kind(&self) -> FieldKind {
        self.kind
    }

    pub fn m_max(&self) -> usize {
        self.m_max
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn is_valid_mode(&self, idx: ModeIndex) -> bool {
        idx.m <= self.m_max
            && idx.n <= self.n_max
            && idx.n >= self.kind.n_min()
            && !(idx.parity == Parity::Sin && idx.m == 0)
    }

    pub fn get(&self, idx: ModeIndex) -> f64 {
        if idx.m > self.m_max || idx.n > self.n_max {
            return 0.0;
        }
        match idx.parity {
            Parity::Cos => self.cos_x[(idx.m, idx.n)],
            Parity::Sin => self.sin_x[(idx.m, idx.n)],
        }
    }

    pub fn set(&mut self, idx: ModeIndex, value: f64) -> Result<()> {
        if !self.is_valid_mode(idx) {
            return invalid(format!("mode {idx:?} outside truncation or not a basis element"));
        }
        if !value.is_finite() {
            return invalid(format!("non-finite coefficient for {idx:?}"));
        }
        match idx.parity {
            Parity::Cos => self.cos_x[(idx.m, idx.n)] = value,
            Parity::Sin => self.sin_x[(idx.m, idx.n)] = value,
        }
        Ok(())
    }

    /// Builds a one-mode field.
    pub fn single(kind: FieldKind, m_max: usize, n_max: usize, idx: ModeIndex, value: f64) -> Result<Self> {
        let mut f = Self::zeros(kind, m_max, n_max);
        f.set(idx, value)?;
        Ok(f)
    }

    pub(crate) fn cos_part(&self) -> &DMatrix<f64> {
        &self.cos_x
    }

    pub(crate) fn sin_part(&self) -> &DMatrix<f64> {
        &self.sin_x
    }

    pub(crate) fn from_parts(kind: FieldKind, mut cos_x: DMatrix<f64>, mut sin_x: DMatrix<f64>) -> Self {
        let (rows, cols) = cos_x.shape();
        assert_eq!(sin_x.shape(), (rows, cols));
        sin_x.row_mut(0).fill(0.0);
        if kind == FieldKind::StreamLike {
            cos_x.column_mut(0).fill(0.0);
            sin_x.column_mut(0).fill(0.0);
        }
        Self { kind, m_max: rows - 1, n_max: cols - 1, cos_x, sin_x }
    }

    /// All valid modes in lexicographic `(m, n, parity)` order.
    pub fn modes(&self) -> impl Iterator<Item = ModeIndex> + '_ {
        (0..=self.m_max).flat_map(move |m| {
            (self.kind.n_min()..=self.n_max).flat_map(move |n| {
                let sin = (m > 0).then_some(ModeIndex { m, n, parity: Parity::Sin });
                sin.into_iter().chain(std::iter::once(ModeIndex::cos(m, n)))
            })
        })
    }

    pub fn eval(&self, x: f64, z: f64) -> f64 {
        let mut acc = 0.0;
        for idx in self.modes() {
            let c = self.get(idx);
            if c != 0.0 {
                acc += c * idx.parity.x_factor(idx.m, x) * self.kind.z_factor(idx.n, z);
            }
        }
        acc
    }

    pub fn max_abs(&self) -> f64 {
        self.cos_x.amax().max(self.sin_x.amax())
    }

    /// Largest coefficient magnitude over modes with `m >= 1`.
    pub fn max_abs_fluctuating(&self) -> f64 {
        if self.m_max == 0 {
            return 0.0;
        }
        let c = self.cos_x.rows(1, self.m_max).amax();
        let s = self.sin_x.rows(1, self.m_max).amax();
        c.max(s)
    }

    pub fn is_finite(&self) -> bool {
        self.cos_x.iter().chain(self.sin_x.iter()).all(|v| v.is_finite())
    }

    /// Copy with a different truncation; modes beyond it are dropped.
    pub fn resized(&self, m_max: usize, n_max: usize) -> Self {
        let mut out = Self::zeros(self.kind, m_max, n_max);
        let rm = m_max.min(self.m_max) + 1;
        let cn = n_max.min(self.n_max) + 1;
        out.cos_x.view_mut((0, 0), (rm, cn)).copy_from(&self.cos_x.view((0, 0), (rm, cn)));
        out.sin_x.view_mut((0, 0), (rm, cn)).copy_from(&self.sin_x.view((0, 0), (rm, cn)));
        out
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self::from_parts(self.kind, &self.cos_x * factor, &self.sin_x * factor)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(Self::from_parts(self.kind, &self.cos_x + &other.cos_x, &self.sin_x + &other.sin_x))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(Self::from_parts(self.kind, &self.cos_x - &other.cos_x, &self.sin_x - &other.sin_x))
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.kind != other.kind || self.m_max != other.m_max || self.n_max != other.n_max {
            return Err(Error::InvalidInput(format!(
                "incompatible fields: {:?}({},{}) vs {:?}({},{})",
                self.kind, self.m_max, self.n_max, other.kind, other.m_max, other.n_max
            )));
        }
        Ok(())
    }

    /// Zero-mean pressure gauge: clears the `(0, 0, +1)` coefficient.
    pub fn with_zero_mean(mut self) -> Self {
        if self.kind == FieldKind::PressureLike {
            self.cos_x[(0, 0)] = 0.0;
        }
        self
    }

    /// The `m = 0` part (x-average) of the field.
    pub fn x_average(&self) -> Self {
        let mut out = Self::zeros(self.kind, self.m_max, self.n_max);
        out.cos_x.row_mut(0).copy_from(&self.cos_x.row(0));
        out
    }

    /// The `m >= 1` part of the field.
    pub fn fluctuation(&self) -> Self {
        let mut out = self.clone();
        out.cos_x.row_mut(0).fill(0.0);
        out
    }

    /// Vertical profile coefficients of the `m = 0` row, indexed by `n`.
    pub fn mean_profile(&self) -> Vec<f64> {
        self.cos_x.row(0).iter().copied().collect()
    }

    /// Mean square over the unit cell, by Parseval.
    pub fn norm_sq(&self) -> f64 {
        self.inner(self).expect("same field")
    }

    /// L2 inner product over the unit cell.
    pub fn inner(&self, other: &Self) -> Result<f64> {
        self.check_compatible(other)?;
        let mut acc = 0.0;
        for idx in self.modes() {
            let w = idx.parity.x_norm_sq(idx.m) * self.kind.z_norm_sq(idx.n);
            acc += w * self.get(idx) * other.get(idx);
        }
        Ok(acc)
    }

    /// Applies `f(mode)` as a per-mode multiplier.
    pub fn map_modes(&self, f: impl Fn(ModeIndex) -> f64) -> Self {
        let mut out = self.clone();
        for idx in self.modes() {
            let v = self.get(idx) * f(idx);
            match idx.parity {
                Parity::Cos => out.cos_x[(idx.m, idx.n)] = v,
                Parity::Sin => out.sin_x[(idx.m, idx.n)] = v,
            }
        }
        out
    }

    pub fn to_snapshot(&self) -> FieldSnapshot {
        let coeffs = self
            .modes()
            .filter_map(|idx| {
                let v = self.get(idx);
                (v != 0.0).then_some((idx.m, idx.n, idx.parity.sign(), v))
            })
            .collect();
        FieldSnapshot { kind: self.kind, m_max: self.m_max, n_max: self.n_max, coeffs }
    }

    pub fn from_snapshot(snap: &FieldSnapshot) -> Result<Self> {
        if snap.m_max > MAX_TRUNCATION || snap.n_max > MAX_TRUNCATION {
            return invalid("truncation too large");
        }
        let mut f = Self::zeros(snap.kind, snap.m_max, snap.n_max);
        let mut seen = std::collections::HashSet::new();
        for &(m, n, sign, value) in &snap.coeffs {
            let idx = ModeIndex::new(m, n, Parity::from_sign(sign)?)?;
            if !seen.insert(idx) {
                return invalid(format!("duplicate coefficient for {idx:?}"));
            }
            f.set(idx, value)?;
        }
        Ok(f)
    }

    pub fn to_json(&self) -> Result<String> {
        let value = serde_json::to_value(self.to_snapshot())?;
        Ok(serde_json::to_string_pretty(&value)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let snap: FieldSnapshot = serde_json::from_str(text)?;
        Self::from_snapshot(&snap)
    }
}

/// Serialized form: `{kind, m_max, n_max, coeffs: [[m, n, parity, value], ...]}`
/// with coefficients in lexicographic `(m, n, parity)` order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldSnapshot {
    pub kind: FieldKind,
    pub m_max: usize,
    pub n_max: usize,
    pub coeffs: Vec<(usize, usize, i8, f64)>,
}

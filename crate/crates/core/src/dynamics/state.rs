use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::spectral::{velocity_from_stream, FieldKind, FieldSnapshot, SpectralField, VelocityField};

/// Parameters of a Bénard-layer run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OBParams {
    pub pr: f64,
    pub ra: f64,
    pub dt: f64,
    pub t_end: f64,
    pub m_max: usize,
    pub n_max: usize,
}

impl OBParams {
    /// Heuristic explicit-coupling bound `dt <= 0.5 / sqrt(max(Ra, 1))`.
    pub fn dt_limit(ra: f64) -> f64 {
        0.5 / ra.abs().max(1.0).sqrt()
    }

    pub fn new(pr: f64, ra: f64, dt: f64, t_end: f64, m_max: usize, n_max: usize) -> Result<Self> {
        if !(pr > 0.0) || !pr.is_finite() {
            return invalid("Pr must be positive");
        }
        if !ra.is_finite() {
            return invalid("Ra must be finite");
        }
        if !(dt > 0.0) || !(t_end > 0.0) {
            return invalid("dt and t_end must be positive");
        }
        if dt > Self::dt_limit(ra) {
            return invalid(format!("dt = {dt} exceeds the stability bound {} for Ra = {ra}", Self::dt_limit(ra)));
        }
        if n_max == 0 {
            return invalid("n_max must be at least 1");
        }
        Ok(Self { pr, ra, dt, t_end, m_max, n_max })
    }
}

/// Full Bénard state: stream-function, temperature perturbation, the uniform
/// horizontal flow (not representable by a periodic stream-function), and time.
#[derive(Debug, Clone, PartialEq)]
pub struct OBState {
    pub stream: SpectralField,
    pub temperature: SpectralField,
    pub mean_flow: f64,
    pub t: f64,
}

impl OBState {
    pub fn zeros(m_max: usize, n_max: usize) -> Self {
        Self {
            stream: SpectralField::zeros(FieldKind::StreamLike, m_max, n_max),
            temperature: SpectralField::zeros(FieldKind::StreamLike, m_max, n_max),
            mean_flow: 0.0,
            t: 0.0,
        }
    }

    pub fn new(stream: SpectralField, temperature: SpectralField, mean_flow: f64, t: f64) -> Result<Self> {
        let s = Self { stream, temperature, mean_flow, t };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.stream.kind() != FieldKind::StreamLike || self.temperature.kind() != FieldKind::StreamLike {
            return invalid("stream-function and temperature must be stream-like");
        }
        if self.stream.m_max() != self.temperature.m_max() || self.stream.n_max() != self.temperature.n_max() {
            return invalid("stream-function and temperature truncations differ");
        }
        if !self.stream.is_finite() || !self.temperature.is_finite() || !self.mean_flow.is_finite() || !self.t.is_finite() {
            return invalid("non-finite state");
        }
        Ok(())
    }

    pub fn m_max(&self) -> usize {
        self.stream.m_max()
    }

    pub fn n_max(&self) -> usize {
        self.stream.n_max()
    }

    pub fn velocity(&self) -> VelocityField {
        velocity_from_stream(&self.stream, self.mean_flow).expect("stream-like by construction")
    }

    /// Largest coefficient among the `m >= 1` modes.
    pub fn max_fluctuating_coeff(&self) -> f64 {
        self.stream.max_abs_fluctuating().max(self.temperature.max_abs_fluctuating())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        Ok(Self {
            stream: self.stream.add(&other.stream)?,
            temperature: self.temperature.add(&other.temperature)?,
            mean_flow: self.mean_flow + other.mean_flow,
            t: self.t,
        })
    }

    pub fn resized(&self, m_max: usize, n_max: usize) -> Self {
        Self {
            stream: self.stream.resized(m_max, n_max),
            temperature: self.temperature.resized(m_max, n_max),
            mean_flow: self.mean_flow,
            t: self.t,
        }
    }

    pub fn to_snapshot(&self) -> StateSnapshot {
        StateSnapshot {
            t: self.t,
            mean_flow: self.mean_flow,
            stream: self.stream.to_snapshot(),
            temperature: self.temperature.to_snapshot(),
        }
    }

    pub fn from_snapshot(snap: &StateSnapshot) -> Result<Self> {
        Self::new(
            SpectralField::from_snapshot(&snap.stream)?,
            SpectralField::from_snapshot(&snap.temperature)?,
            snap.mean_flow,
            snap.t,
        )
    }

    pub fn to_json(&self) -> Result<String> {
        let value = serde_json::to_value(self.to_snapshot())?;
        Ok(serde_json::to_string_pretty(&value)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let snap: StateSnapshot = serde_json::from_str(text)?;
        Self::from_snapshot(&snap)
    }
}

/// JSON form of an [`OBState`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateSnapshot {
    pub t: f64,
    #[serde(default)]
    pub mean_flow: f64,
    pub stream: FieldSnapshot,
    pub temperature: FieldSnapshot,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::ModeIndex;

    #[test]
    fn dt_bound_enforced() {
        assert!(OBParams::new(1.0, 3100.0, 0.01, 1.0, 4, 4).is_err());
        assert!(OBParams::new(1.0, 3100.0, 0.005, 1.0, 4, 4).is_ok());
        assert!(OBParams::new(0.0, 10.0, 0.001, 1.0, 4, 4).is_err());
    }

    #[test]
    fn snapshot_round_trip() {
        let mut s = OBState::zeros(2, 3);
        s.stream.set(ModeIndex::cos(1, 2), 0.25).unwrap();
        s.temperature.set(ModeIndex::sin(2, 1).unwrap(), -1.5).unwrap();
        s.mean_flow = 0.3;
        s.t = 1.25;
        let back = OBState::from_json(&s.to_json().unwrap()).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn rejects_mismatched_truncations() {
        let st = SpectralField::zeros(FieldKind::StreamLike, 2, 2);
        let te = SpectralField::zeros(FieldKind::StreamLike, 3, 2);
        assert!(OBState::new(st, te, 0.0, 0.0).is_err());
    }
}

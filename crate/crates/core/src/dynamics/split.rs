//! The split system: x-independent part evolved in closed form, fluctuation
//! integrated with the extra couplings `A . grad u + u . grad A`,
//! `A . grad sigma` and `u . grad T`.

use crate::error::{invalid, Result};
use crate::subspace::{SProfiles, SubspaceSplit};

use super::state::{OBParams, OBState};
use super::stepper::Stepper;

/// Split state; `f_part` always has zero x-average and zero mean flow.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitState {
    pub s_part: SProfiles,
    pub f_part: OBState,
}

impl SplitState {
    pub fn new(s_part: SProfiles, f_part: OBState) -> Result<Self> {
        f_part.validate()?;
        if f_part.stream.x_average().max_abs() != 0.0
            || f_part.temperature.x_average().max_abs() != 0.0
            || f_part.mean_flow != 0.0
        {
            return invalid("fluctuating part must have zero x-average");
        }
        if (s_part.t - f_part.t).abs() > 1e-12 * s_part.t.abs().max(1.0) {
            return invalid("split parts carry different times");
        }
        Ok(Self { s_part, f_part })
    }

    pub fn from_state(state: &OBState, pr: f64, ra: f64) -> Self {
        let split = SubspaceSplit::of(state, pr, ra);
        Self { s_part: split.s_part, f_part: split.f_part }
    }

    pub fn recombine(&self) -> Result<OBState> {
        SubspaceSplit { s_part: self.s_part.clone(), f_part: self.f_part.clone() }.recombine()
    }
}

/// Advances a split state by one `params.dt`.
pub fn step_split(state: &SplitState, params: &OBParams) -> Result<SplitState> {
    super::stepper::check_truncation(&state.f_part, params)?;
    SplitStepper::new(*params).step(state)
}

#[derive(Debug, Clone)]
pub struct SplitStepper {
    inner: Stepper,
}

impl SplitStepper {
    pub fn new(params: OBParams) -> Self {
        Self { inner: Stepper::new(params) }
    }

    pub fn step(&self, state: &SplitState) -> Result<SplitState> {
        let p = self.inner.params();
        let (m, n) = (p.m_max, p.n_max);
        let s0 = &state.s_part;
        let tendency = |f: &OBState, t: f64| -> Result<OBState> {
            let s = s0.evolved(t.max(s0.t))?.to_state(m, n)?;
            let mut full = s.add(f)?;
            full.mean_flow = s.mean_flow;
            let nl = self.inner.plan().evaluate(&full)?;
            let mut k = self.inner.tendency(f, &nl)?;
            // The x-averaged forcing feeds the x-independent part and is dropped here.
            k.stream = k.stream.fluctuation();
            k.temperature = k.temperature.fluctuation();
            Ok(k)
        };
        let mut f = self.inner.heun(&state.f_part, tendency)?;
        f.stream = f.stream.fluctuation();
        f.temperature = f.temperature.fluctuation();
        let s_part = s0.evolved(f.t)?;
        Ok(SplitState { s_part, f_part: f })
    }
}

use crate::energy::{benard_record, EnergyRecord};
use crate::error::{invalid, Result};

use super::split::{SplitState, SplitStepper};
use super::state::{OBParams, OBState};
use super::stepper::{check_truncation, Stepper};

/// Sampled states and their energy diagnostics.
///
/// Diagnostics need `Ra > 0` (the weighted energy is undefined otherwise); for
/// `Ra <= 0` the record list stays empty.
#[derive(Debug, Clone, Default)]
pub struct Trajectory {
    pub states: Vec<OBState>,
    pub records: Vec<EnergyRecord>,
}

impl Trajectory {
    pub fn times(&self) -> Vec<f64> {
        self.states.iter().map(|s| s.t).collect()
    }

    pub fn last(&self) -> Option<&OBState> {
        self.states.last()
    }
}

/// Number of steps of size `dt` covering `[0, t_end]`.
pub(crate) fn step_count(params: &OBParams) -> usize {
    (params.t_end / params.dt).round().max(1.0) as usize
}

/// Integrates to `params.t_end`, sampling every `sample_every` steps (and the final step).
pub fn simulate(initial: &OBState, params: &OBParams, sample_every: usize) -> Result<Trajectory> {
    check_truncation(initial, params)?;
    if sample_every == 0 {
        return invalid("sample_every must be at least 1");
    }
    let stepper = Stepper::new(*params);
    let steps = step_count(params);
    let mut traj = Trajectory::default();
    let record = |s: &OBState, traj: &mut Trajectory| -> Result<()> {
        if params.ra > 0.0 {
            traj.records.push(benard_record(s, params.pr, params.ra)?);
        }
        traj.states.push(s.clone());
        Ok(())
    };
    let mut s = initial.clone();
    record(&s, &mut traj)?;
    for k in 1..=steps {
        s = stepper.step(&s)?;
        if k % sample_every == 0 || k == steps {
            record(&s, &mut traj)?;
        }
    }
    Ok(traj)
}

/// Split-system counterpart of [`simulate`]; returns the sampled split states.
pub fn simulate_split(initial: &SplitState, params: &OBParams, sample_every: usize) -> Result<Vec<SplitState>> {
    check_truncation(&initial.f_part, params)?;
    if sample_every == 0 {
        return invalid("sample_every must be at least 1");
    }
    let stepper = SplitStepper::new(*params);
    let steps = step_count(params);
    let mut out = vec![initial.clone()];
    let mut s = initial.clone();
    for k in 1..=steps {
        s = stepper.step(&s)?;
        if k % sample_every == 0 || k == steps {
            out.push(s.clone());
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::ModeIndex;

    #[test]
    fn zero_data_zero_diagnostics() {
        let p = OBParams::new(1.0, 500.0, 1e-3, 0.01, 2, 2).unwrap();
        let traj = simulate(&OBState::zeros(2, 2), &p, 2).unwrap();
        assert_eq!(traj.states.len(), 6);
        assert!(traj.records.iter().all(|r| r.energy == 0.0 && r.rhs == 0.0));
    }

    #[test]
    fn shear_data_keeps_fluctuations_zero() {
        let p = OBParams::new(1.0, 500.0, 1e-3, 0.05, 3, 3).unwrap();
        let mut s = OBState::zeros(3, 3);
        s.stream.set(ModeIndex::cos(0, 1), 0.4).unwrap();
        s.temperature.set(ModeIndex::cos(0, 2), 0.2).unwrap();
        let traj = simulate(&s, &p, 10).unwrap();
        assert!(traj.records.iter().all(|r| r.energy < 1e-20));
        assert!(traj.records.last().unwrap().s_energy > 0.0);
    }
}

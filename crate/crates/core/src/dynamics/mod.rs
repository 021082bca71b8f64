//! Time integration of the Bénard layer and of its split form.

mod nonlinear;
mod simulate;
mod split;
mod state;
mod stepper;

pub use nonlinear::{nonlinear_term, Nonlinear, NonlinearPlan};
pub use simulate::{simulate, simulate_split, Trajectory};
pub use split::{step_split, SplitState, SplitStepper};
pub use state::{OBParams, OBState, StateSnapshot};
pub use stepper::{step, Stepper};

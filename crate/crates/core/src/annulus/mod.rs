//! Convection between horizontal coaxial cylinders: geometry, bases and the
//! even-symmetric steady state.

pub mod basis;
pub mod field;
pub mod legendre;
pub mod params;
pub mod steady;

pub use basis::{Parity, PolarBasis, Resolution};
pub use field::{PolarField, Reflection};
pub use params::{conduction_lift, geometry, nondimensionalize, AnnulusParams, PhysicalParams};
pub use steady::{steady_solve, BaseState, SteadyOperator, SteadyOptions};

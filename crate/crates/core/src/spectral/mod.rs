//! Trigonometric bases on the periodicity cell, transforms, and operators.

pub mod basis;
pub mod field;
pub mod grid;
pub mod ops;
pub mod pressure;
pub mod velocity;

pub use basis::{eval_basis, FieldKind, ModeIndex, Parity};
pub use field::{FieldSnapshot, SpectralField};
pub use grid::{to_physical, to_spectral, GridSpec, Transform};
pub use ops::{d_dx, d_dz, inverse_laplacian, laplacian, product, ProductPlan};
pub use pressure::{pressure_rhs, solve_pressure_neumann};
pub use velocity::{velocity_from_stream, VelocityField};

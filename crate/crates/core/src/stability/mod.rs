//! Energy stability of the even-symmetric annulus state and the planar-layer limit.

pub mod eig;
pub mod experiment;
pub mod layer;
pub mod pencil;

pub use eig::{maximize_F, solve_eig, EigenSolution, StabilityReport, Verdict};
pub use experiment::{most_dangerous_experiment, pair_slope, random_slopes, EnergySlope};
pub use layer::{layer_profile, layer_spectrum, solve_eig0, LayerEigen};
pub use pencil::{functional_F, vertical_components, PerturbationPair, StabilityOperator, SymmetryLabel};

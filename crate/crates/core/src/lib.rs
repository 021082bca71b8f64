//! Spectral laboratory for two-dimensional Oberbeck-Boussinesq convection.
//!
//! The crate covers two settings:
//!
//! * the periodic Bénard layer with stress-free walls, where x-independent
//!   fields form an invariant subspace ([`subspace`], [`dynamics`], [`energy`]);
//! * convection between horizontal coaxial cylinders, with the even-symmetric
//!   base state ([`annulus`]) and its energy-stability threshold ([`stability`]).

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod annulus;
pub mod checks;
pub mod config;
pub mod dynamics;
pub mod energy;
pub mod spectral;
pub mod stability;
pub mod subspace;

pub use error::{Error, Result};

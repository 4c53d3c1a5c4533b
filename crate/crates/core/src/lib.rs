//! Finite element solver for the time-nonlocal multiphysics reformulation of
//! poroelasticity with secondary consolidation.
//!
//! The displacement `u` is discretized with vector P2 elements and the two
//! auxiliary fields, the generalized pressure `ξ = αp − λ div u − λ* div u_t`
//! and the fluid content `η = c₀p + α div u`, with P1 elements (Taylor–Hood).
//! Time stepping is Crank–Nicolson (with a backward Euler variant), and the
//! exponential memory integrals are advanced with an O(1)-per-step recursion
//! kept in scaled form so that it never overflows.
//!
//! The crate is `no_std` and only needs `alloc`; file formats, the command
//! line runner and the long convergence studies live in the `poroelastic`
//! crate.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod analysis;
pub mod assembly;
pub mod error;
pub mod fe;
pub mod mesh;
pub mod mms;
pub mod scheme;
pub mod simulation;
pub mod sparse;

pub use error::{Error, Result};

//! Finite-element model of a ballasted railway track and its transient
//! response to rectangular and half-sine wheel pulses.
//!
//! The crate is `no_std` (it needs `alloc`). Pipeline:
//!
//! 1. [`track`] builds rail, section and assembled `M`, `C`, `K`.
//! 2. [`eigen`] provides undamped modes and the complex modes of the
//!    first-order state matrix.
//! 3. [`loading`] defines the pulses and the loaded DOF.
//! 4. [`response`] evaluates the closed-form responses (and a Newmark oracle).
//! 5. [`postprocess`] turns histories into ballast forces and load repartition.

#![no_std]

extern crate alloc;

pub mod eigen;
pub mod error;
pub mod linalg;
pub mod loading;
pub mod postprocess;
pub mod response;
pub mod track;

pub use error::{Error, Result};
pub use loading::{load_dof_index, load_vector, LoadCase, PulseKind, PulseLoad};
pub use response::{solve, Method, ResponseHistory, SolveOptions, TimeGrid};
pub use track::{assemble_track, AssembledSystem, Structure, TrackProperties};

pub use nalgebra;

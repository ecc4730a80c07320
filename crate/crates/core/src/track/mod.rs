//! Ballasted track model: rail beam elements, the 8-DOF elementary section
//! (two rail elements on two sleepers) and the assembled multi-section track.
//!
//! Units are SI throughout. An elementary section spans `2 L`: rail nodes
//! 1, 2, 3 sit at `0, L, 2L` and the two sleepers carry nodes 1 and 3 through
//! the railpads. Sleeper spacing is therefore `2 L`.

mod assembly;
mod calibrate;
mod element;
mod section;

pub use assembly::{assemble_track, AssembledSystem, DofKind, DofMap, Structure};
pub use calibrate::{
    calibrate_element_length, section_frequencies_hz, sweep_element_length, Calibration,
    CalibrationRequest,
};
pub use element::{
    rail_damping_matrix, rail_element_matrices, rail_mass_matrix, rail_mass_pattern,
    rail_stiffness_matrix, rail_stiffness_pattern, rayleigh_coefficients,
    reduced_rail_mass_pattern, reduced_rail_matrices, reduced_rail_stiffness_pattern,
    ElementMatrices, RayleighDamping, Term, REDUCED_DOFS,
};
pub use section::{section_matrices, SectionMatrices};

use crate::error::{Error, Result};
use alloc::format;

/// Local DOF positions inside an elementary section.
pub mod local {
    pub const U1: usize = 0;
    pub const THETA1: usize = 1;
    pub const U2: usize = 2;
    pub const THETA2: usize = 3;
    pub const U3: usize = 4;
    pub const THETA3: usize = 5;
    pub const SLEEPER1: usize = 6;
    pub const SLEEPER2: usize = 7;
}

/// Default rail element length (m). With it the single-section spectrum lands on
/// 81.62 Hz (mode 2) and 381.1 Hz (mode 3), i.e. a 0.6 m sleeper spacing.
pub const DEFAULT_ELEMENT_LENGTH: f64 = 0.3;

/// Physical parameters of the track, SI units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrackProperties {
    /// kg/m³
    pub rail_density: f64,
    /// m²
    pub rail_area: f64,
    /// Pa
    pub rail_young_modulus: f64,
    /// m⁴
    pub rail_inertia: f64,
    /// kg
    pub sleeper_mass: f64,
    /// N/m
    pub railpad_stiffness: f64,
    /// N·s/m
    pub railpad_damping: f64,
    /// N/m
    pub ballast_stiffness: f64,
    /// N·s/m
    pub ballast_damping: f64,
    /// Rail damping ratio applied at the first reduced-rail mode.
    pub zeta1: f64,
    /// Rail damping ratio applied at the second reduced-rail mode.
    pub zeta2: f64,
    /// Rail element length (m).
    pub element_length: f64,
}

impl TrackProperties {
    /// Reference track: UIC60-class rail on concrete sleepers, 5 % rail damping.
    pub fn reference() -> Self {
        TrackProperties {
            rail_density: 7850.0,
            rail_area: 76.70e-4,
            rail_young_modulus: 210.0e9,
            rail_inertia: 3038.6e-8,
            sleeper_mass: 90.84,
            railpad_stiffness: 90.0e6,
            railpad_damping: 30.0e3,
            ballast_stiffness: 25.5e6,
            ballast_damping: 40.0e3,
            zeta1: 0.05,
            zeta2: 0.05,
            element_length: DEFAULT_ELEMENT_LENGTH,
        }
    }

    pub fn with_element_length(mut self, length: f64) -> Self {
        self.element_length = length;
        self
    }

    /// Same track with every damper removed (`c_s = c_b = 0`, `ζ = 0`).
    pub fn undamped(mut self) -> Self {
        self.railpad_damping = 0.0;
        self.ballast_damping = 0.0;
        self.zeta1 = 0.0;
        self.zeta2 = 0.0;
        self
    }

    pub fn is_undamped(&self) -> bool {
        self.railpad_damping == 0.0
            && self.ballast_damping == 0.0
            && self.zeta1 == 0.0
            && self.zeta2 == 0.0
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("rail_density", self.rail_density),
            ("rail_area", self.rail_area),
            ("rail_young_modulus", self.rail_young_modulus),
            ("rail_inertia", self.rail_inertia),
            ("sleeper_mass", self.sleeper_mass),
            ("railpad_stiffness", self.railpad_stiffness),
            ("ballast_stiffness", self.ballast_stiffness),
            ("element_length", self.element_length),
        ];
        for (field, value) in positive {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::InvalidParameter {
                    field,
                    reason: format!("must be finite and > 0, got {value}"),
                });
            }
        }
        for (field, value) in [
            ("railpad_damping", self.railpad_damping),
            ("ballast_damping", self.ballast_damping),
        ] {
            if !(value.is_finite() && value >= 0.0) {
                return Err(Error::InvalidParameter {
                    field,
                    reason: format!("must be finite and >= 0, got {value}"),
                });
            }
        }
        for (field, value) in [("zeta1", self.zeta1), ("zeta2", self.zeta2)] {
            if !(0.0..1.0).contains(&value) {
                return Err(Error::InvalidParameter {
                    field,
                    reason: format!("must lie in [0, 1), got {value}"),
                });
            }
        }
        Ok(())
    }
}

impl Default for TrackProperties {
    fn default() -> Self {
        Self::reference()
    }
}

//! Wheel pulse loads and their placement on the assembled track.

use alloc::format;
use core::f64::consts::PI;
use core::fmt;

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::track::{AssembledSystem, DofKind, DofMap};

/// Force of one tonne-force at standard gravity (N).
pub const TONNE_FORCE: f64 = 9810.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PulseKind {
    Rectangular,
    HalfSine,
}

impl PulseKind {
    pub fn name(&self) -> &'static str {
        match self {
            PulseKind::Rectangular => "rect",
            PulseKind::HalfSine => "sine",
        }
    }
}

impl fmt::Display for PulseKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A single pulse of amplitude `amplitude` acting over `[0, duration]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseLoad {
    pub kind: PulseKind,
    /// N
    pub amplitude: f64,
    /// s
    pub duration: f64,
    /// rad/s, used by the half-sine only
    pub omega: f64,
}

impl PulseLoad {
    pub fn rectangular(amplitude: f64, duration: f64) -> Self {
        PulseLoad {
            kind: PulseKind::Rectangular,
            amplitude,
            duration,
            omega: PI / duration,
        }
    }

    /// `P₀ sin(ω t)` with `ω = π / t_d`: one half lobe over the pulse.
    pub fn half_sine(amplitude: f64, duration: f64) -> Self {
        PulseLoad {
            kind: PulseKind::HalfSine,
            amplitude,
            duration,
            omega: PI / duration,
        }
    }

    pub fn new(kind: PulseKind, amplitude: f64, duration: f64) -> Self {
        match kind {
            PulseKind::Rectangular => Self::rectangular(amplitude, duration),
            PulseKind::HalfSine => Self::half_sine(amplitude, duration),
        }
    }

    pub fn with_omega(mut self, omega: f64) -> Self {
        self.omega = omega;
        self
    }

    pub fn scaled(mut self, factor: f64) -> Self {
        self.amplitude *= factor;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.amplitude > 0.0 && self.amplitude.is_finite()) {
            return Err(Error::InvalidParameter {
                field: "pulse.amplitude",
                reason: format!("must be > 0, got {}", self.amplitude),
            });
        }
        if !(self.duration > 0.0 && self.duration.is_finite()) {
            return Err(Error::InvalidParameter {
                field: "pulse.duration",
                reason: format!("must be > 0, got {}", self.duration),
            });
        }
        if self.kind == PulseKind::HalfSine && !(self.omega > 0.0 && self.omega.is_finite()) {
            return Err(Error::InvalidParameter {
                field: "pulse.omega",
                reason: format!("must be > 0, got {}", self.omega),
            });
        }
        Ok(())
    }

    /// Force at time `t` (0 outside `[0, t_d]`).
    pub fn value(&self, t: f64) -> f64 {
        if !(0.0..=self.duration).contains(&t) {
            return 0.0;
        }
        match self.kind {
            PulseKind::Rectangular => self.amplitude,
            PulseKind::HalfSine => self.amplitude * libm::sin(self.omega * t),
        }
    }

    /// `∫ P dt` over the pulse.
    pub fn impulse(&self) -> f64 {
        match self.kind {
            PulseKind::Rectangular => self.amplitude * self.duration,
            PulseKind::HalfSine => {
                self.amplitude * (1.0 - libm::cos(self.omega * self.duration)) / self.omega
            }
        }
    }
}

/// 1-based index of the loaded DOF for an `n_sections` track, checked against
/// the DOF numbering.
///
/// `N = 2 → 5`; even `N → 5N/2 + 1`; odd `N → 5(N+1)/2 − 1`. For `N = 1` the
/// odd formula yields 4, which is `θ₂`; that case is refused and the error names
/// the nearest rail vertical DOF.
pub fn load_dof_index(n_sections: usize) -> Result<usize> {
    if n_sections == 0 {
        return Err(Error::InvalidParameter {
            field: "n_sections",
            reason: "at least one section is required".into(),
        });
    }
    let n = n_sections;
    let index = if n == 2 {
        5
    } else if n.is_multiple_of(2) {
        5 * n / 2 + 1
    } else {
        5 * (n + 1) / 2 - 1
    };
    let map = DofMap::new(n);
    match map.kind(index - 1) {
        DofKind::RailVertical { .. } => Ok(index),
        _ => Err(Error::LoadNotOnRailVertical {
            index,
            nearest_vertical: nearest_rail_vertical(&map, index),
        }),
    }
}

/// Closest rail vertical DOF (1-based) to `index`; ties go to the rail node
/// nearest the middle of the track.
pub fn nearest_rail_vertical(map: &DofMap, index: usize) -> usize {
    let middle = (map.n_rail_nodes() - 1) as f64 / 2.0;
    let mut best: Option<(usize, f64, usize)> = None;
    for node in 0..map.n_rail_nodes() {
        let dof = map.rail_vertical_dof(node) + 1;
        let dist = dof.abs_diff(index);
        let off_centre = (node as f64 - middle).abs();
        let better = match best {
            None => true,
            Some((d, c, _)) => dist < d || (dist == d && off_centre < c),
        };
        if better {
            best = Some((dist, off_centre, dof));
        }
    }
    best.map(|b| b.2).unwrap_or(1)
}

/// Load `f(t) = pattern · P(t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadCase {
    pub pattern: DVector<f64>,
    pub pulse: PulseLoad,
    /// 1-based loaded DOF when the pattern is a point load.
    pub dof: Option<usize>,
}

impl LoadCase {
    /// Unit point load on `dof` (1-based).
    pub fn point(n_dof: usize, dof: usize, pulse: PulseLoad) -> Result<Self> {
        if dof == 0 || dof > n_dof {
            return Err(Error::DofOutOfRange { index: dof, n_dof });
        }
        let mut pattern = DVector::zeros(n_dof);
        pattern[dof - 1] = 1.0;
        Ok(LoadCase {
            pattern,
            pulse,
            dof: Some(dof),
        })
    }

    /// Full load vector at time `t`.
    pub fn at(&self, t: f64) -> DVector<f64> {
        &self.pattern * self.pulse.value(t)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        LoadCase {
            pattern: self.pattern.clone(),
            pulse: self.pulse.scaled(factor),
            dof: self.dof,
        }
    }
}

/// Point load on the DOF selected by [`load_dof_index`].
pub fn load_vector(system: &AssembledSystem, pulse: PulseLoad) -> Result<LoadCase> {
    pulse.validate()?;
    let dof = load_dof_index(system.n_sections)?;
    LoadCase::point(system.n_dof(), dof, pulse)
}

/// Point load on an explicitly chosen DOF, which must be a rail vertical.
pub fn load_vector_at(system: &AssembledSystem, pulse: PulseLoad, dof: usize) -> Result<LoadCase> {
    pulse.validate()?;
    if dof == 0 || dof > system.n_dof() {
        return Err(Error::DofOutOfRange {
            index: dof,
            n_dof: system.n_dof(),
        });
    }
    if !matches!(system.dof_map.kind(dof - 1), DofKind::RailVertical { .. }) {
        return Err(Error::LoadNotOnRailVertical {
            index: dof,
            nearest_vertical: nearest_rail_vertical(&system.dof_map, dof),
        });
    }
    LoadCase::point(system.n_dof(), dof, pulse)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::track::{assemble_track, TrackProperties};

    #[test]
    fn pulse_values() {
        let s = PulseLoad::half_sine(1000.0, 0.01);
        assert_eq!(s.value(0.0), 0.0);
        assert!((s.value(0.005) - 1000.0).abs() < 1e-9);
        assert_eq!(s.value(0.0100001), 0.0);
        let r = PulseLoad::rectangular(1000.0, 0.01);
        for t in [0.0, 0.003, 0.01] {
            assert_eq!(r.value(t), 1000.0);
        }
        assert_eq!(r.value(0.0101), 0.0);
    }

    #[test]
    fn impulse_matches_closed_form() {
        let s = PulseLoad::half_sine(3.0, 0.02);
        assert!((s.impulse() - 2.0 * 3.0 * 0.02 / PI).abs() < 1e-15);
        assert_eq!(PulseLoad::rectangular(3.0, 0.02).impulse(), 0.06);
    }

    #[test]
    fn load_indices_by_parity() {
        assert_eq!(load_dof_index(2).unwrap(), 5);
        assert_eq!(load_dof_index(4).unwrap(), 11);
        assert_eq!(load_dof_index(30).unwrap(), 76);
        assert_eq!(load_dof_index(3).unwrap(), 9);
        assert_eq!(load_dof_index(5).unwrap(), 14);
    }

    #[test]
    fn single_section_lands_on_rotation() {
        match load_dof_index(1) {
            Err(Error::LoadNotOnRailVertical {
                index,
                nearest_vertical,
            }) => {
                assert_eq!(index, 4);
                assert_eq!(nearest_vertical, 3);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn point_pattern() {
        let sys = assemble_track(&TrackProperties::reference(), 4).unwrap();
        let load = load_vector(&sys, PulseLoad::rectangular(1.0, 0.01)).unwrap();
        assert_eq!(load.pattern[10], 1.0);
        assert_eq!(load.pattern.iter().map(|x| x.abs()).sum::<f64>(), 1.0);
        assert!(load.at(0.02).iter().all(|&x| x == 0.0));
        assert!(load_vector_at(&sys, PulseLoad::rectangular(1.0, 0.01), 12).is_err());
    }
}

//! Transient response to a pulse load: closed-form modal superposition for the
//! undamped track, closed-form complex state-space modes for the damped track,
//! and a Newmark integrator kept as an independent oracle.

mod modal;
mod newmark;
mod state;

use alloc::format;
use alloc::vec::Vec;
use core::fmt;

use nalgebra::{DMatrix, DVector};

pub use modal::ModalSolver;
pub use newmark::{newmark_integrate, NewmarkParams};
pub use state::StateSolver;

use crate::error::{Error, Result};
use crate::loading::{LoadCase, PulseLoad};
use crate::track::Structure;

/// Uniform time grid on which the pulse end falls exactly on a sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    pub dt: f64,
    /// Number of steps; samples are `k = 0..=n_steps`.
    pub n_steps: usize,
    /// Sample index of the pulse end `t_d`.
    pub pulse_steps: usize,
}

impl TimeGrid {
    /// `dt = t_d / steps_per_pulse`, covering `total_duration` (rounded to whole steps).
    pub fn new(pulse_duration: f64, steps_per_pulse: usize, total_duration: f64) -> Result<Self> {
        if !(pulse_duration > 0.0 && pulse_duration.is_finite()) {
            return Err(Error::InvalidParameter {
                field: "grid.pulse_duration",
                reason: format!("must be > 0, got {pulse_duration}"),
            });
        }
        if steps_per_pulse == 0 {
            return Err(Error::InvalidParameter {
                field: "grid.steps_per_pulse",
                reason: "must be >= 1".into(),
            });
        }
        if !(total_duration > 0.0 && total_duration.is_finite()) {
            return Err(Error::InvalidParameter {
                field: "grid.duration",
                reason: format!("must be > 0, got {total_duration}"),
            });
        }
        let dt = pulse_duration / steps_per_pulse as f64;
        let n_steps = (libm::round(total_duration / dt) as usize).max(1);
        Ok(TimeGrid {
            dt,
            n_steps,
            pulse_steps: steps_per_pulse,
        })
    }

    /// Grid with a step close to `dt`, snapped so that `t_d` is a whole number of steps.
    pub fn with_step(pulse_duration: f64, dt: f64, total_duration: f64) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidParameter {
                field: "grid.dt",
                reason: format!("must be > 0, got {dt}"),
            });
        }
        let steps = (libm::round(pulse_duration / dt) as usize).max(1);
        Self::new(pulse_duration, steps, total_duration)
    }

    /// `dt = t_d / 100` over `10 t_d`.
    pub fn default_for(pulse_duration: f64) -> Result<Self> {
        Self::new(pulse_duration, 100, 10.0 * pulse_duration)
    }

    pub fn n_samples(&self) -> usize {
        self.n_steps + 1
    }

    pub fn time(&self, k: usize) -> f64 {
        k as f64 * self.dt
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.n_samples()).map(|k| self.time(k)).collect()
    }

    pub fn pulse_end(&self) -> f64 {
        self.time(self.pulse_steps)
    }

    pub fn duration(&self) -> f64 {
        self.time(self.n_steps)
    }

    /// Pulse value at sample `k`, using the index (not the float time) to decide
    /// on which side of `t_d` the sample lies.
    pub fn pulse_at(&self, pulse: &PulseLoad, k: usize) -> f64 {
        if k > self.pulse_steps {
            0.0
        } else {
            pulse.value(self.time(k).min(pulse.duration))
        }
    }

    fn check_pulse(&self, pulse: &PulseLoad) -> Result<()> {
        let end = self.pulse_end();
        if (end - pulse.duration).abs() > 1e-9 * pulse.duration {
            return Err(Error::GridMismatch {
                grid_pulse_end: end,
                pulse_duration: pulse.duration,
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    ModalUndamped,
    StateSpace,
    Newmark,
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::ModalUndamped => "modal",
            Method::StateSpace => "state",
            Method::Newmark => "newmark",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResponseMeta {
    pub method: Method,
    pub pulse: PulseLoad,
    /// 1-based loaded DOF, for point loads.
    pub load_dof: Option<usize>,
}

/// Displacement (and velocity) samples, one column per time sample.
#[derive(Debug, Clone, PartialEq)]
pub struct ResponseHistory {
    pub grid: TimeGrid,
    pub displacements: DMatrix<f64>,
    pub velocities: Option<DMatrix<f64>>,
    pub meta: ResponseMeta,
}

impl ResponseHistory {
    pub fn n_dof(&self) -> usize {
        self.displacements.nrows()
    }

    pub fn n_samples(&self) -> usize {
        self.displacements.ncols()
    }

    /// Displacement history of one DOF (0-based).
    pub fn displacement_of(&self, dof: usize) -> Vec<f64> {
        self.displacements.row(dof).iter().copied().collect()
    }

    pub fn velocity_of(&self, dof: usize) -> Option<Vec<f64>> {
        self.velocities
            .as_ref()
            .map(|v| v.row(dof).iter().copied().collect())
    }

    pub fn displacement_at(&self, k: usize) -> DVector<f64> {
        self.displacements.column(k).clone_owned()
    }

    pub fn is_finite(&self) -> bool {
        self.displacements.iter().all(|x| x.is_finite())
            && self
                .velocities
                .as_ref()
                .is_none_or(|v| v.iter().all(|x| x.is_finite()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SolveOptions {
    /// Run the undamped modal solution even when `C ≠ 0` (damping is ignored).
    pub force_undamped: bool,
    pub newmark: NewmarkParams,
}

/// Runs `method` on the structure.
pub fn solve(
    structure: &Structure,
    load: &LoadCase,
    grid: &TimeGrid,
    method: Method,
    options: &SolveOptions,
) -> Result<ResponseHistory> {
    match method {
        Method::ModalUndamped => {
            if !structure.is_undamped() && !options.force_undamped {
                return Err(Error::IncompatibleMethod {
                    method: "modal",
                    reason: "the damping matrix is not zero; use `state` or force the undamped approximation",
                });
            }
            ModalSolver::new(structure)?.respond(load, grid)
        }
        Method::StateSpace => StateSolver::new(structure)?.respond(load, grid),
        Method::Newmark => newmark_integrate(structure, load, grid, &options.newmark),
    }
}

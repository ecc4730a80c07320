use alloc::format;
use core::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use super::{Method, ResponseHistory, ResponseMeta, TimeGrid};
use crate::eigen::modal_decompose;
use crate::error::{Error, Result};
use crate::loading::LoadCase;
use crate::track::Structure;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewmarkParams {
    pub beta: f64,
    pub gamma: f64,
    /// Refuse grids with `dt > T_min / 20`.
    pub check_resolution: bool,
}

impl Default for NewmarkParams {
    /// Average acceleration (trapezoidal) rule.
    fn default() -> Self {
        NewmarkParams {
            beta: 0.25,
            gamma: 0.5,
            check_resolution: true,
        }
    }
}

impl NewmarkParams {
    pub fn unchecked() -> Self {
        NewmarkParams {
            check_resolution: false,
            ..Self::default()
        }
    }
}

/// Newmark time stepping from rest. At the pulse end the acceleration is
/// re-solved from equilibrium with the post-pulse load, so the step
/// discontinuity of a rectangular pulse is not smeared over one step.
pub fn newmark_integrate(
    structure: &Structure,
    load: &LoadCase,
    grid: &TimeGrid,
    params: &NewmarkParams,
) -> Result<ResponseHistory> {
    load.pulse.validate()?;
    grid.check_pulse(&load.pulse)?;
    let (beta, gamma) = (params.beta, params.gamma);
    if !(beta > 0.0 && gamma >= 0.0) {
        return Err(Error::InvalidParameter {
            field: "newmark",
            reason: format!("need beta > 0 and gamma >= 0, got ({beta}, {gamma})"),
        });
    }
    let dt = grid.dt;
    if params.check_resolution {
        let modes = modal_decompose(&structure.mass, &structure.stiffness)?;
        let omega_max = libm::sqrt(modes.omega_sq.max());
        if omega_max > 0.0 {
            let limit = 2.0 * PI / omega_max / 20.0;
            if dt > limit {
                return Err(Error::UnresolvedTimeStep { dt, limit });
            }
        }
    }

    let (m, c, k) = (&structure.mass, &structure.damping, &structure.stiffness);
    let n = structure.n_dof();
    let mass_chol = m.clone().cholesky().ok_or_else(|| Error::Factorization {
        what: "mass",
        detail: "not positive definite".into(),
    })?;
    let c0 = 1.0 / (beta * dt * dt);
    let c1 = gamma / (beta * dt);
    let c2 = 1.0 / (beta * dt);
    let c3 = 1.0 / (2.0 * beta) - 1.0;
    let c4 = gamma / beta - 1.0;
    let c5 = dt * (gamma / (2.0 * beta) - 1.0);
    let effective: DMatrix<f64> = k + c * c1 + m * c0;
    let lu = effective.lu();
    if !lu.is_invertible() {
        return Err(Error::Factorization {
            what: "Newmark effective stiffness",
            detail: "singular".into(),
        });
    }

    let ns = grid.n_samples();
    let mut displacements = DMatrix::zeros(n, ns);
    let mut velocities = DMatrix::zeros(n, ns);
    let mut u = DVector::zeros(n);
    let mut v = DVector::zeros(n);
    let mut a = mass_chol.solve(&(&load.pattern * grid.pulse_at(&load.pulse, 0)));

    for step in 1..ns {
        let f = &load.pattern * grid.pulse_at(&load.pulse, step);
        let rhs = f + m * (&u * c0 + &v * c2 + &a * c3) + c * (&u * c1 + &v * c4 + &a * c5);
        let u_next = lu.solve(&rhs).ok_or_else(|| Error::Factorization {
            what: "Newmark effective stiffness",
            detail: format!("solve failed at step {step}"),
        })?;
        let a_next = (&u_next - &u) * c0 - &v * c2 - &a * c3;
        let v_next = &v + (&a * (1.0 - gamma) + &a_next * gamma) * dt;
        u = u_next;
        v = v_next;
        a = a_next;
        if step == grid.pulse_steps {
            // load jumps from P(t_d⁻) to 0
            let rest = -(c * &v) - k * &u;
            a = mass_chol.solve(&rest);
        }
        displacements.set_column(step, &u);
        velocities.set_column(step, &v);
    }

    Ok(ResponseHistory {
        grid: *grid,
        displacements,
        velocities: Some(velocities),
        meta: ResponseMeta {
            method: Method::Newmark,
            pulse: load.pulse,
            load_dof: load.dof,
        },
    })
}

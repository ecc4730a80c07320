use nalgebra::{Complex, ComplexField, DMatrix};

use super::{Method, ResponseHistory, ResponseMeta, TimeGrid};
use crate::eigen::{build_state_matrix, modal_decompose, state_decompose, StateBasis};
use crate::error::{Error, Result};
use crate::linalg::split_complex;
use crate::loading::{LoadCase, PulseKind, PulseLoad};
use crate::track::Structure;

type C64 = Complex<f64>;

const ZERO_RATE: f64 = 1e-12;
const IMAGINARY_TOL: f64 = 1e-8;

/// Response of `e^{s t}` forcing through `ẋ = a x + c e^{s t}`, `x(0) = 0`, divided by `c`.
fn exp_response(s: C64, a: C64, t: f64) -> C64 {
    let gap = s - a;
    if gap.modulus() < 1e-9 * (s.modulus() + a.modulus()).max(1.0) {
        (a * t).exp() * t
    } else {
        ((s * t).exp() - (a * t).exp()) / gap
    }
}

/// `x_i(t)` during the pulse for `ẋ = a x + b P(t)`.
fn forced(pulse: &PulseLoad, a: C64, b: C64, t: f64) -> C64 {
    let p0 = pulse.amplitude;
    match pulse.kind {
        PulseKind::Rectangular => {
            if a.modulus() < ZERO_RATE {
                b * p0 * t
            } else {
                b * p0 / a * ((a * t).exp() - 1.0)
            }
        }
        PulseKind::HalfSine => {
            let w = pulse.omega;
            let den = a * a + w * w;
            if den.modulus() < 1e-8 * w * w {
                // a = ±iω: split sin ωt into exponentials
                let i = C64::new(0.0, 1.0);
                let r = exp_response(i * w, a, t) - exp_response(-i * w, a, t);
                b * p0 * r / (i * 2.0)
            } else {
                let (s, c) = (libm::sin(w * t), libm::cos(w * t));
                b * p0 * w / den * (a * t).exp() - a * b * p0 / den * s - b * p0 * w / den * c
            }
        }
    }
}

/// Closed-form response through the complex modes of the state matrix.
#[derive(Debug, Clone)]
pub struct StateSolver {
    basis: StateBasis,
}

impl StateSolver {
    pub fn new(structure: &Structure) -> Result<Self> {
        let modal = modal_decompose(&structure.mass, &structure.stiffness)?;
        let state = build_state_matrix(&modal, &structure.damping)?;
        Ok(StateSolver {
            basis: state_decompose(&state)?,
        })
    }

    pub fn from_basis(basis: StateBasis) -> Self {
        StateSolver { basis }
    }

    pub fn basis(&self) -> &StateBasis {
        &self.basis
    }

    /// Complex modal state coordinates `x_i(t_k)`, one row per eigenvalue.
    pub fn state_history(&self, load: &LoadCase, grid: &TimeGrid) -> Result<DMatrix<C64>> {
        load.pulse.validate()?;
        grid.check_pulse(&load.pulse)?;
        let pulse = &load.pulse;
        let t_d = pulse.duration;
        let b = self.basis.forcing(&load.pattern);
        let m = self.basis.n_states();
        let ns = grid.n_samples();
        let mut x = DMatrix::zeros(m, ns);
        for i in 0..m {
            let (a, bi) = (self.basis.lambda[i], b[i]);
            if bi == C64::new(0.0, 0.0) {
                continue;
            }
            let x_end = forced(pulse, a, bi, t_d);
            for k in 0..ns {
                x[(i, k)] = if k <= grid.pulse_steps {
                    forced(pulse, a, bi, grid.time(k).min(t_d))
                } else {
                    x_end * (a * (grid.time(k) - t_d)).exp()
                };
            }
        }
        Ok(x)
    }

    pub fn respond(&self, load: &LoadCase, grid: &TimeGrid) -> Result<ResponseHistory> {
        let x = self.state_history(load, grid)?;
        let (xr, xi) = split_complex(&x);
        let (gr, gi) = split_complex(&self.basis.displacement_map);
        let (hr, hi) = split_complex(&self.basis.velocity_map);
        let displacements = &gr * &xr - &gi * &xi;
        let velocities = &hr * &xr - &hi * &xi;
        let imag = &gr * &xi + &gi * &xr;
        let scale = displacements.amax();
        let residue = imag.amax();
        if residue > IMAGINARY_TOL * scale && residue > f64::MIN_POSITIVE {
            return Err(Error::ImaginaryResidue {
                relative: if scale > 0.0 {
                    residue / scale
                } else {
                    f64::INFINITY
                },
            });
        }
        Ok(ResponseHistory {
            grid: *grid,
            displacements,
            velocities: Some(velocities),
            meta: ResponseMeta {
                method: Method::StateSpace,
                pulse: load.pulse,
                load_dof: load.dof,
            },
        })
    }
}

use nalgebra::DMatrix;

use super::{Method, ResponseHistory, ResponseMeta, TimeGrid};
use crate::eigen::{modal_decompose, ModalBasis};
use crate::error::Result;
use crate::loading::{LoadCase, PulseKind, PulseLoad};
use crate::track::Structure;

/// Below this circular frequency a mode is treated as rigid.
const RIGID_OMEGA: f64 = 1e-6;
/// Half-sine resonance guard on `|1 - β²|`.
const RESONANCE_BAND: f64 = 1e-8;

/// Modal coordinate and its rate during the pulse. `q = Φ_jᵢ P₀`.
fn forced(pulse: &PulseLoad, omega_i: f64, q: f64, t: f64) -> (f64, f64) {
    let (s, c) = (libm::sin(omega_i * t), libm::cos(omega_i * t));
    if omega_i < RIGID_OMEGA {
        // z̈ = q p(t), integrated twice
        return match pulse.kind {
            PulseKind::Rectangular => (0.5 * q * t * t, q * t),
            PulseKind::HalfSine => {
                let w = pulse.omega;
                let wt = w * t;
                (
                    q / w * (t - libm::sin(wt) / w),
                    q / w * (1.0 - libm::cos(wt)),
                )
            }
        };
    }
    let static_z = q / (omega_i * omega_i);
    match pulse.kind {
        PulseKind::Rectangular => (static_z * (1.0 - c), q / omega_i * s),
        PulseKind::HalfSine => {
            let w = pulse.omega;
            let beta = w / omega_i;
            let denom = 1.0 - beta * beta;
            if denom.abs() < RESONANCE_BAND {
                let z = 0.5 * static_z * (s - omega_i * t * c);
                let zd = 0.5 * q * t * s;
                (z, zd)
            } else {
                let amp = static_z / denom;
                let z = amp * (libm::sin(w * t) - beta * s);
                let zd = amp * (w * libm::cos(w * t) - beta * omega_i * c);
                (z, zd)
            }
        }
    }
}

/// Free vibration from `(z_d, ż_d)` at `t_d`, evaluated `tau = t - t_d` later.
fn free(omega_i: f64, z_d: f64, v_d: f64, tau: f64) -> (f64, f64) {
    if omega_i < RIGID_OMEGA {
        return (z_d + v_d * tau, v_d);
    }
    let (s, c) = (libm::sin(omega_i * tau), libm::cos(omega_i * tau));
    (v_d / omega_i * s + z_d * c, v_d * c - z_d * omega_i * s)
}

/// Rectangular pulse after `t_d`: `(q/ω²)(cos ω(t−t_d) − cos ωt)`.
fn free_rectangular(omega_i: f64, q: f64, t: f64, t_d: f64) -> (f64, f64) {
    let tau = t - t_d;
    let static_z = q / (omega_i * omega_i);
    (
        static_z * (libm::cos(omega_i * tau) - libm::cos(omega_i * t)),
        q / omega_i * (libm::sin(omega_i * t) - libm::sin(omega_i * tau)),
    )
}

/// Closed-form modal superposition for `M ü + K u = f` (damping ignored).
#[derive(Debug, Clone)]
pub struct ModalSolver {
    basis: ModalBasis,
}

impl ModalSolver {
    pub fn new(structure: &Structure) -> Result<Self> {
        Ok(ModalSolver {
            basis: modal_decompose(&structure.mass, &structure.stiffness)?,
        })
    }

    pub fn from_basis(basis: ModalBasis) -> Self {
        ModalSolver { basis }
    }

    pub fn basis(&self) -> &ModalBasis {
        &self.basis
    }

    /// Modal coordinates `z_i(t_k)` and rates, one row per mode.
    pub fn modal_history(
        &self,
        load: &LoadCase,
        grid: &TimeGrid,
    ) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
        load.pulse.validate()?;
        grid.check_pulse(&load.pulse)?;
        let pulse = &load.pulse;
        let t_d = pulse.duration;
        let participation = self.basis.modal_force(&load.pattern) * pulse.amplitude;
        let n = self.basis.n_modes();
        let ns = grid.n_samples();
        let mut z = DMatrix::zeros(n, ns);
        let mut zd = DMatrix::zeros(n, ns);
        for i in 0..n {
            let omega_i = self.basis.omega(i);
            let q = participation[i];
            if q == 0.0 {
                continue;
            }
            let (z_end, v_end) = forced(pulse, omega_i, q, t_d);
            for k in 0..ns {
                let t = grid.time(k);
                let (zi, vi) = if k <= grid.pulse_steps {
                    forced(pulse, omega_i, q, t.min(t_d))
                } else if pulse.kind == PulseKind::Rectangular && omega_i >= RIGID_OMEGA {
                    free_rectangular(omega_i, q, t, t_d)
                } else {
                    free(omega_i, z_end, v_end, t - t_d)
                };
                z[(i, k)] = zi;
                zd[(i, k)] = vi;
            }
        }
        Ok((z, zd))
    }

    pub fn respond(&self, load: &LoadCase, grid: &TimeGrid) -> Result<ResponseHistory> {
        let (z, zd) = self.modal_history(load, grid)?;
        let phi = &self.basis.shapes;
        Ok(ResponseHistory {
            grid: *grid,
            displacements: phi * z,
            velocities: Some(phi * zd),
            meta: ResponseMeta {
                method: Method::ModalUndamped,
                pulse: load.pulse,
                load_dof: load.dof,
            },
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    #[test]
    fn rectangular_amplification_two() {
        let pulse = PulseLoad::rectangular(1.0, 10.0);
        let w = 20.0;
        let (z, _) = forced(&pulse, w, 3.0, PI / w);
        assert!((z - 2.0 * 3.0 / (w * w)).abs() < 1e-15);
    }

    #[test]
    fn half_sine_at_pulse_end() {
        let t_d = 0.01;
        let pulse = PulseLoad::half_sine(1.0, t_d);
        let (w_i, q) = (1000.0, 2.0);
        let beta = pulse.omega / w_i;
        let (z, _) = forced(&pulse, w_i, q, t_d);
        let expected = -(q / (w_i * w_i)) * (beta / (1.0 - beta * beta)) * libm::sin(w_i * t_d);
        assert!((z - expected).abs() < 1e-14 * expected.abs().max(1e-12));
    }

    #[test]
    fn resonant_form_is_continuous() {
        let t_d = 0.01;
        let pulse = PulseLoad::half_sine(1.0, t_d);
        let w = pulse.omega;
        let t = 0.0063;
        let (zr, vr) = forced(&pulse, w, 1.0, t);
        let (zn, vn) = forced(&pulse, w * (1.0 + 1e-6), 1.0, t);
        assert!((zr - zn).abs() < 1e-5 * zr.abs());
        assert!((vr - vn).abs() < 1e-5 * vr.abs());
    }

    #[test]
    fn rectangular_free_matches_generic_free() {
        let pulse = PulseLoad::rectangular(1.0, 0.01);
        let (w, q) = (700.0, 1.5);
        let (z_d, v_d) = forced(&pulse, w, q, 0.01);
        for t in [0.012, 0.05, 0.3] {
            let a = free_rectangular(w, q, t, 0.01);
            let b = free(w, z_d, v_d, t - 0.01);
            assert!((a.0 - b.0).abs() < 1e-12 * q / (w * w));
            assert!((a.1 - b.1).abs() < 1e-12 * q / w);
        }
    }

    #[test]
    fn rigid_mode_limits() {
        let r = PulseLoad::rectangular(1.0, 1.0);
        assert_eq!(forced(&r, 0.0, 2.0, 3.0), (9.0, 6.0));
        let s = PulseLoad::half_sine(1.0, 1.0);
        let (z, v) = forced(&s, 0.0, 1.0, 1.0);
        // ∫₀¹ sin(πt) dt = 2/π, ∫₀¹ (1 - cos πt)/π dt = 1/π
        assert!((v - 2.0 / PI).abs() < 1e-15);
        assert!((z - 1.0 / PI).abs() < 1e-15);
    }
}

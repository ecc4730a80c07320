use alloc::string::String;
use core::fmt;

/// Errors raised by model construction, the spectral decompositions and the
/// response solvers.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A parameter violated its precondition. `field` names the offending input.
    InvalidParameter { field: &'static str, reason: String },
    /// A matrix expected to be symmetric was not (largest relative asymmetry).
    NotSymmetric { what: &'static str, asymmetry: f64 },
    /// Cholesky (or LU) factorization failed.
    Factorization { what: &'static str, detail: String },
    /// Rayleigh coefficients requested for two equal frequencies.
    SingularRayleigh { omega: f64 },
    /// The state matrix is not diagonalizable within tolerance.
    DefectiveStateMatrix {
        min_singular_value: f64,
        max_singular_value: f64,
    },
    /// The load index formula landed on a DOF that is not a rail vertical translation.
    LoadNotOnRailVertical {
        index: usize,
        nearest_vertical: usize,
    },
    /// An index is outside the assembled system.
    DofOutOfRange { index: usize, n_dof: usize },
    /// Solver method cannot be used with the given damping.
    IncompatibleMethod {
        method: &'static str,
        reason: &'static str,
    },
    /// Bisection found no sign change in the bracket.
    CalibrationFailed {
        target_hz: f64,
        low: (f64, f64),
        high: (f64, f64),
    },
    /// A history lacks the velocity samples required by the operation.
    MissingVelocities,
    /// Reconstructed physical response kept a non-negligible imaginary part.
    ImaginaryResidue { relative: f64 },
    /// Time grid and pulse disagree on the pulse duration.
    GridMismatch {
        grid_pulse_end: f64,
        pulse_duration: f64,
    },
    /// Time step too coarse for the highest frequency of the system.
    UnresolvedTimeStep { dt: f64, limit: f64 },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidParameter { field, reason } => write!(f, "invalid {field}: {reason}"),
            Error::NotSymmetric { what, asymmetry } => {
                write!(f, "{what} is not symmetric (relative asymmetry {asymmetry:.3e})")
            }
            Error::Factorization { what, detail } => {
                write!(f, "factorization of {what} failed: {detail}")
            }
            Error::SingularRayleigh { omega } => write!(
                f,
                "Rayleigh system is singular: both target frequencies equal {omega} rad/s"
            ),
            Error::DefectiveStateMatrix {
                min_singular_value,
                max_singular_value,
            } => write!(
                f,
                "state matrix is defective: eigenvector matrix singular values span \
                 [{min_singular_value:.3e}, {max_singular_value:.3e}]"
            ),
            Error::LoadNotOnRailVertical {
                index,
                nearest_vertical,
            } => write!(
                f,
                "load index {index} is not a rail vertical DOF; nearest vertical DOF is {nearest_vertical}"
            ),
            Error::DofOutOfRange { index, n_dof } => {
                write!(f, "DOF {index} outside system of {n_dof} DOFs")
            }
            Error::IncompatibleMethod { method, reason } => {
                write!(f, "method `{method}` cannot be used: {reason}")
            }
            Error::CalibrationFailed {
                target_hz,
                low,
                high,
            } => write!(
                f,
                "no element length reaches {target_hz} Hz: f({:.3} m) = {:.4} Hz, f({:.3} m) = {:.4} Hz",
                low.0, low.1, high.0, high.1
            ),
            Error::MissingVelocities => write!(f, "response history carries no velocities"),
            Error::ImaginaryResidue { relative } => write!(
                f,
                "reconstructed response has imaginary residue {relative:.3e} of its magnitude"
            ),
            Error::GridMismatch {
                grid_pulse_end,
                pulse_duration,
            } => write!(
                f,
                "time grid places the pulse end at {grid_pulse_end} s but the pulse lasts {pulse_duration} s"
            ),
            Error::UnresolvedTimeStep { dt, limit } => write!(
                f,
                "time step {dt:.3e} s exceeds {limit:.3e} s (1/20 of the shortest period)"
            ),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;

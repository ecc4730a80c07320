//! Small dense-matrix helpers shared by the model and the solvers.

use nalgebra::{Complex, DMatrix};

/// Largest `|a_ij - a_ji|` divided by the largest `|a_ij|` (0 for a zero matrix).
pub fn relative_asymmetry(a: &DMatrix<f64>) -> f64 {
    let scale = a.amax();
    if scale == 0.0 {
        return 0.0;
    }
    let n = a.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in (i + 1)..n {
            worst = worst.max((a[(i, j)] - a[(j, i)]).abs());
        }
    }
    worst / scale
}

pub fn is_symmetric(a: &DMatrix<f64>, tol: f64) -> bool {
    a.is_square() && relative_asymmetry(a) <= tol
}

pub(crate) fn symmetrize(a: &mut DMatrix<f64>) {
    let n = a.nrows();
    for i in 0..n {
        for j in (i + 1)..n {
            let m = 0.5 * (a[(i, j)] + a[(j, i)]);
            a[(i, j)] = m;
            a[(j, i)] = m;
        }
    }
}

/// Real and imaginary parts of a complex matrix as separate real matrices.
pub(crate) fn split_complex(a: &DMatrix<Complex<f64>>) -> (DMatrix<f64>, DMatrix<f64>) {
    (a.map(|z| z.re), a.map(|z| z.im))
}

/// Relative L-infinity distance `max|a - b| / max|b|` over every entry.
pub fn relative_linf(a: &DMatrix<f64>, reference: &DMatrix<f64>) -> f64 {
    assert_eq!(a.shape(), reference.shape(), "shape mismatch");
    let scale = reference.amax();
    let diff = (a - reference).amax();
    if scale == 0.0 {
        diff
    } else {
        diff / scale
    }
}

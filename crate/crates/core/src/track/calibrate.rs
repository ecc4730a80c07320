use alloc::vec::Vec;

use super::{assemble_track, TrackProperties};
use crate::eigen::modal_decompose;
use crate::error::{Error, Result};

/// Natural frequencies (Hz, ascending) of a single elementary section.
pub fn section_frequencies_hz(props: &TrackProperties) -> Result<Vec<f64>> {
    let sys = assemble_track(props, 1)?;
    let basis = modal_decompose(&sys.structure.mass, &sys.structure.stiffness)?;
    Ok(basis.frequencies_hz())
}

/// Search for the element length whose single-section mode `mode` (1-based)
/// sits at `target_hz`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalibrationRequest {
    pub target_hz: f64,
    pub mode: usize,
    pub bracket: (f64, f64),
    pub tol_hz: f64,
    /// Step of the logged frequency-versus-length sweep (m).
    pub sweep_step: f64,
}

impl CalibrationRequest {
    pub fn new(target_hz: f64) -> Self {
        CalibrationRequest {
            target_hz,
            mode: 2,
            bracket: (0.05, 1.2),
            tol_hz: 1e-6,
            sweep_step: 0.05,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Calibration {
    pub element_length: f64,
    /// Full single-section spectrum (Hz) at the calibrated length.
    pub frequencies_hz: Vec<f64>,
    pub iterations: usize,
    /// `(L, spectrum)` samples across the bracket.
    pub sweep: Vec<(f64, Vec<f64>)>,
}

/// Samples the single-section spectrum at `L = lo, lo + step, ..., hi`.
pub fn sweep_element_length(
    props: &TrackProperties,
    bracket: (f64, f64),
    step: f64,
) -> Result<Vec<(f64, Vec<f64>)>> {
    let (lo, hi) = bracket;
    let count = libm::round((hi - lo) / step) as usize;
    (0..=count)
        .map(|i| {
            let l = if i == count { hi } else { lo + i as f64 * step };
            section_frequencies_hz(&props.with_element_length(l)).map(|f| (l, f))
        })
        .collect()
}

/// Bisection on `f_mode(L) - target` over the bracket.
pub fn calibrate_element_length(
    props: &TrackProperties,
    request: &CalibrationRequest,
) -> Result<Calibration> {
    if !(request.target_hz > 0.0 && request.target_hz.is_finite()) {
        return Err(Error::InvalidParameter {
            field: "target_hz",
            reason: alloc::format!("must be > 0, got {}", request.target_hz),
        });
    }
    if request.mode == 0 || request.mode > 8 {
        return Err(Error::InvalidParameter {
            field: "mode",
            reason: alloc::format!("must be in 1..=8, got {}", request.mode),
        });
    }
    let (mut lo, mut hi) = request.bracket;
    if !(lo > 0.0 && hi > lo) {
        return Err(Error::InvalidParameter {
            field: "bracket",
            reason: alloc::format!("need 0 < lo < hi, got ({lo}, {hi})"),
        });
    }
    let sweep = sweep_element_length(props, request.bracket, request.sweep_step)?;
    let freq = |l: f64| -> Result<f64> {
        Ok(section_frequencies_hz(&props.with_element_length(l))?[request.mode - 1])
    };
    let mut g_lo = freq(lo)? - request.target_hz;
    let g_hi = freq(hi)? - request.target_hz;
    if g_lo * g_hi > 0.0 {
        return Err(Error::CalibrationFailed {
            target_hz: request.target_hz,
            low: (lo, g_lo + request.target_hz),
            high: (hi, g_hi + request.target_hz),
        });
    }
    let mut iterations = 0;
    let mut mid = 0.5 * (lo + hi);
    while iterations < 200 {
        iterations += 1;
        mid = 0.5 * (lo + hi);
        let g_mid = freq(mid)? - request.target_hz;
        if g_mid.abs() <= request.tol_hz || (hi - lo) < 1e-13 {
            break;
        }
        if g_lo * g_mid <= 0.0 {
            hi = mid;
        } else {
            lo = mid;
            g_lo = g_mid;
        }
    }
    let frequencies_hz = section_frequencies_hz(&props.with_element_length(mid))?;
    Ok(Calibration {
        element_length: mid,
        frequencies_hz,
        iterations,
        sweep,
    })
}

//! Loads transmitted to the substructure, per-sleeper load repartition and
//! peak summaries of response histories.
//!
//! The reported "% of load" of a sleeper is `100 · max_t |F_b(t)| / P₀` with
//! `F_b = k_b u_T + c_b u̇_T`, the force in one ballast spring/damper under that
//! sleeper. The percentages are per-sleeper peaks, not a distribution, and do
//! not sum to 100. An interior sleeper of the assembled track rests on one
//! ballast element per adjacent section, so the total support reaction is
//! `Σ_s support_count(s) · F_b,s` (see [`SubstructureLoads::total_reaction`]).

use alloc::string::String;
use alloc::vec::Vec;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::response::ResponseHistory;
use crate::track::{DofKind, DofMap, TrackProperties};

/// Samples over which peaks are taken.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PeakWindow {
    /// `0 ≤ t ≤ t_d`
    ForcedPhase,
    /// Whole history.
    Full,
}

impl PeakWindow {
    fn last_sample(&self, history: &ResponseHistory) -> usize {
        let last = history.n_samples() - 1;
        match self {
            PeakWindow::ForcedPhase => history.grid.pulse_steps.min(last),
            PeakWindow::Full => last,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubstructureLoads {
    pub p0: f64,
    pub window: PeakWindow,
    /// Global DOF (0-based) of each sleeper.
    pub sleeper_dofs: Vec<usize>,
    pub support_count: Vec<usize>,
    /// One row per sleeper: `k_b u_T + c_b u̇_T` at every sample (N).
    pub forces: DMatrix<f64>,
    pub peak_force: Vec<f64>,
    pub peak_time: Vec<f64>,
    /// `100 · peak / P₀`
    pub percent: Vec<f64>,
    /// `100 · ∫ F_b dt / ∫ P dt` over the window.
    pub impulse_share: Vec<f64>,
}

impl SubstructureLoads {
    pub fn n_sleepers(&self) -> usize {
        self.sleeper_dofs.len()
    }

    /// Sum of every ballast element force at sample `k`.
    pub fn total_reaction(&self, k: usize) -> f64 {
        (0..self.n_sleepers())
            .map(|s| self.support_count[s] as f64 * self.forces[(s, k)])
            .sum()
    }

    /// Percent for a 1-based sleeper number.
    pub fn percent_of(&self, sleeper: usize) -> f64 {
        self.percent[sleeper - 1]
    }
}

pub fn substructure_forces(
    history: &ResponseHistory,
    props: &TrackProperties,
    dof_map: &DofMap,
    window: PeakWindow,
) -> Result<SubstructureLoads> {
    let velocities = history
        .velocities
        .as_ref()
        .ok_or(Error::MissingVelocities)?;
    if history.n_dof() != dof_map.n_dof() {
        return Err(Error::InvalidParameter {
            field: "history",
            reason: alloc::format!(
                "history has {} DOFs, track has {}",
                history.n_dof(),
                dof_map.n_dof()
            ),
        });
    }
    let sleeper_dofs = dof_map.sleeper_dofs();
    let support_count = (0..dof_map.n_sleepers())
        .map(|s| dof_map.support_count(s))
        .collect();
    let ns = history.n_samples();
    let forces = DMatrix::from_fn(sleeper_dofs.len(), ns, |s, k| {
        let d = sleeper_dofs[s];
        props.ballast_stiffness * history.displacements[(d, k)]
            + props.ballast_damping * velocities[(d, k)]
    });

    let p0 = history.meta.pulse.amplitude;
    let last = window.last_sample(history);
    let dt = history.grid.dt;
    let applied_impulse = history.meta.pulse.impulse();
    let mut peak_force = Vec::with_capacity(sleeper_dofs.len());
    let mut peak_time = Vec::with_capacity(sleeper_dofs.len());
    let mut impulse_share = Vec::with_capacity(sleeper_dofs.len());
    for s in 0..sleeper_dofs.len() {
        let row = forces.row(s);
        let mut best = (0.0f64, 0usize);
        for k in 0..=last {
            if row[k].abs() > best.0 {
                best = (row[k].abs(), k);
            }
        }
        peak_force.push(best.0);
        peak_time.push(history.grid.time(best.1));
        let mut integral = 0.0;
        for k in 0..last {
            integral += 0.5 * (row[k] + row[k + 1]) * dt;
        }
        impulse_share.push(100.0 * integral / applied_impulse);
    }
    let percent = peak_force.iter().map(|f| 100.0 * f / p0).collect();

    Ok(SubstructureLoads {
        p0,
        window,
        sleeper_dofs,
        support_count,
        forces,
        peak_force,
        peak_time,
        percent,
        impulse_share,
    })
}

/// 1-based sleeper under the middle of an `n_sections` track (the loaded
/// sleeper for even `N`).
pub fn central_sleeper(n_sections: usize) -> usize {
    n_sections / 2 + 1
}

/// Seven-sleeper window centred on [`central_sleeper`], clipped to the track.
pub fn default_window(n_sections: usize) -> (usize, usize) {
    let c = central_sleeper(n_sections);
    (c.saturating_sub(3).max(1), (c + 3).min(n_sections + 1))
}

/// Default value below which a table cell is shown as "-" (percent).
pub const REPORT_THRESHOLD: f64 = 1.5;

#[derive(Debug, Clone, PartialEq)]
pub struct RepartitionRow {
    /// 1-based sleeper number.
    pub sleeper: usize,
    pub percents: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RepartitionTable {
    pub labels: Vec<String>,
    pub rows: Vec<RepartitionRow>,
    pub threshold: f64,
}

impl RepartitionTable {
    /// Cell value, `None` when below the reporting threshold.
    pub fn cell(&self, row: usize, column: usize) -> Option<f64> {
        let v = self.rows[row].percents[column];
        (v >= self.threshold).then_some(v)
    }

    pub fn row_for(&self, sleeper: usize) -> Option<&RepartitionRow> {
        self.rows.iter().find(|r| r.sleeper == sleeper)
    }
}

/// One row per sleeper in `first..=last` (1-based), one column per case.
pub fn repartition_table(
    cases: &[(&str, &SubstructureLoads)],
    sleepers: (usize, usize),
    threshold: f64,
) -> Result<RepartitionTable> {
    let (first, last) = sleepers;
    for (label, loads) in cases {
        if first == 0 || last < first || last > loads.n_sleepers() {
            return Err(Error::InvalidParameter {
                field: "sleepers",
                reason: alloc::format!(
                    "range {first}..={last} outside 1..={} for case {label}",
                    loads.n_sleepers()
                ),
            });
        }
    }
    let rows = (first..=last)
        .map(|sleeper| RepartitionRow {
            sleeper,
            percents: cases.iter().map(|(_, l)| l.percent_of(sleeper)).collect(),
        })
        .collect();
    Ok(RepartitionTable {
        labels: cases.iter().map(|(l, _)| String::from(*l)).collect(),
        rows,
        threshold,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DofPeak {
    /// 1-based global DOF.
    pub dof: usize,
    pub kind: DofKind,
    /// Signed value at the largest magnitude.
    pub peak: f64,
    pub time: f64,
}

/// Largest-magnitude displacement or rotation of every DOF within `window`.
pub fn peak_summary(
    history: &ResponseHistory,
    dof_map: &DofMap,
    window: PeakWindow,
) -> Vec<DofPeak> {
    let last = window.last_sample(history);
    (0..history.n_dof())
        .map(|d| {
            let row = history.displacements.row(d);
            let mut best = (0.0f64, 0usize);
            for k in 0..=last {
                if row[k].abs() > best.0.abs() {
                    best = (row[k], k);
                }
            }
            DofPeak {
                dof: d + 1,
                kind: dof_map.kind(d),
                peak: best.0,
                time: history.grid.time(best.1),
            }
        })
        .collect()
}

/// Largest `|peak|` among the DOFs selected by `filter`.
pub fn max_abs_peak(peaks: &[DofPeak], filter: impl Fn(&DofKind) -> bool) -> f64 {
    peaks
        .iter()
        .filter(|p| filter(&p.kind))
        .fold(0.0, |acc, p| acc.max(p.peak.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::loading::PulseLoad;
    use crate::response::{Method, ResponseMeta, TimeGrid};

    fn zero_history(map: &DofMap, velocities: bool) -> ResponseHistory {
        let grid = TimeGrid::new(0.01, 10, 0.05).unwrap();
        let zeros = DMatrix::zeros(map.n_dof(), grid.n_samples());
        ResponseHistory {
            grid,
            displacements: zeros.clone(),
            velocities: velocities.then_some(zeros),
            meta: ResponseMeta {
                method: Method::Newmark,
                pulse: PulseLoad::rectangular(1000.0, 0.01),
                load_dof: None,
            },
        }
    }

    #[test]
    fn zero_response_zero_forces() {
        let map = DofMap::new(4);
        let h = zero_history(&map, true);
        let loads =
            substructure_forces(&h, &TrackProperties::reference(), &map, PeakWindow::Full).unwrap();
        assert_eq!(loads.n_sleepers(), 5);
        assert!(loads.percent.iter().all(|&p| p == 0.0));
        let table = repartition_table(&[("a", &loads), ("b", &loads)], (1, 5), 1.5).unwrap();
        assert!(table
            .rows
            .iter()
            .all(|r| r.percents.iter().all(|&p| p == 0.0)));
        assert_eq!(table.cell(0, 0), None);
    }

    #[test]
    fn missing_velocities_rejected() {
        let map = DofMap::new(2);
        let h = zero_history(&map, false);
        assert_eq!(
            substructure_forces(&h, &TrackProperties::reference(), &map, PeakWindow::Full),
            Err(Error::MissingVelocities)
        );
    }

    #[test]
    fn single_sinusoid_peak() {
        let map = DofMap::new(1);
        let mut h = zero_history(&map, true);
        let w = 2.0 * core::f64::consts::PI / 0.04;
        for k in 0..h.n_samples() {
            h.displacements[(2, k)] = libm::sin(w * h.grid.time(k));
        }
        let peaks = peak_summary(&h, &map, PeakWindow::Full);
        assert_eq!(peaks[2].dof, 3);
        assert!((peaks[2].peak - 1.0).abs() < 1e-12);
        assert!((peaks[2].time - 0.01).abs() < 1e-12);
    }

    #[test]
    fn table_window() {
        assert_eq!(default_window(30), (13, 19));
        assert_eq!(central_sleeper(4), 3);
        assert_eq!(default_window(2), (1, 3));
    }
}

//! `run.json`: every resolved parameter of a run, in file order, no timestamps.

use serde::Serialize;
use serde_json::{Map, Value};

use raildyn_core::loading::{load_dof_index, PulseKind};
use raildyn_core::postprocess::PeakWindow;
use raildyn_core::track::{assemble_track, DofMap, TrackProperties};

use crate::config::{LengthSource, Scenario, TrackSection};

pub const MANIFEST_FILE: &str = "run.json";

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    /// Track in reference-table units.
    pub track: TrackSection,
    pub track_si: TrackSi,
    pub element_length_source: LengthSource,
    pub n_dof: usize,
    pub n_sleepers: usize,
    pub rail_rayleigh: Option<RayleighEcho>,
    pub pulse: PulseEcho,
    pub solver: SolverEcho,
    pub output: OutputEcho,
    pub results: Map<String, Value>,
    pub artifacts: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct TrackSi {
    pub rail_density_kg_m3: f64,
    pub rail_area_m2: f64,
    pub rail_young_modulus_pa: f64,
    pub rail_inertia_m4: f64,
    pub sleeper_mass_kg: f64,
    pub railpad_stiffness_n_m: f64,
    pub railpad_damping_ns_m: f64,
    pub ballast_stiffness_n_m: f64,
    pub ballast_damping_ns_m: f64,
    pub zeta1: f64,
    pub zeta2: f64,
    pub element_length_m: f64,
    pub sleeper_spacing_m: f64,
}

impl From<&TrackProperties> for TrackSi {
    fn from(p: &TrackProperties) -> Self {
        TrackSi {
            rail_density_kg_m3: p.rail_density,
            rail_area_m2: p.rail_area,
            rail_young_modulus_pa: p.rail_young_modulus,
            rail_inertia_m4: p.rail_inertia,
            sleeper_mass_kg: p.sleeper_mass,
            railpad_stiffness_n_m: p.railpad_stiffness,
            railpad_damping_ns_m: p.railpad_damping,
            ballast_stiffness_n_m: p.ballast_stiffness,
            ballast_damping_ns_m: p.ballast_damping,
            zeta1: p.zeta1,
            zeta2: p.zeta2,
            element_length_m: p.element_length,
            sleeper_spacing_m: 2.0 * p.element_length,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RayleighEcho {
    pub a0_per_s: f64,
    pub a1_s: f64,
    pub omega1_rad_s: f64,
    pub omega2_rad_s: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct PulseEcho {
    pub kind: &'static str,
    pub p0_n: f64,
    pub p0_tonnes: f64,
    pub tonne_force_n: f64,
    pub duration_s: f64,
    pub omega_rad_s: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SolverEcho {
    pub method: &'static str,
    pub dt_s: f64,
    pub pulse_steps: usize,
    pub n_steps: usize,
    pub duration_s: f64,
    pub load_dof: Option<usize>,
    pub load_dof_label: Option<String>,
    pub newmark_check: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct OutputEcho {
    pub directory: String,
    pub peak_window: &'static str,
    pub threshold_percent: f64,
    pub sleepers: Option<[usize; 2]>,
    pub response_dofs: Vec<usize>,
}

impl Manifest {
    pub fn new(command: &str, sc: &Scenario) -> Self {
        let map = DofMap::new(sc.n_sections);
        let load_dof = sc.load_dof.or_else(|| load_dof_index(sc.n_sections).ok());
        let rayleigh = assemble_track(&sc.model_props(), 1)
            .ok()
            .filter(|_| !sc.undamped)
            .map(|s| RayleighEcho {
                a0_per_s: s.rayleigh.a0,
                a1_s: s.rayleigh.a1,
                omega1_rad_s: s.rayleigh.omega1,
                omega2_rad_s: s.rayleigh.omega2,
            });
        Manifest {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            track: TrackSection::from_si(&sc.props, sc.n_sections, sc.undamped),
            track_si: TrackSi::from(&sc.model_props()),
            element_length_source: sc.length_source,
            n_dof: map.n_dof(),
            n_sleepers: map.n_sleepers(),
            rail_rayleigh: rayleigh,
            pulse: PulseEcho {
                kind: sc.pulse.kind.name(),
                p0_n: sc.pulse.amplitude,
                p0_tonnes: sc.pulse.amplitude / sc.tonne_force,
                tonne_force_n: sc.tonne_force,
                duration_s: sc.pulse.duration,
                omega_rad_s: (sc.pulse.kind == PulseKind::HalfSine).then_some(sc.pulse.omega),
            },
            solver: SolverEcho {
                method: sc.method.name(),
                dt_s: sc.grid.dt,
                pulse_steps: sc.grid.pulse_steps,
                n_steps: sc.grid.n_steps,
                duration_s: sc.grid.duration(),
                load_dof,
                load_dof_label: load_dof
                    .filter(|&d| d >= 1 && d <= map.n_dof())
                    .map(|d| map.kind(d - 1).label()),
                newmark_check: sc.newmark_check,
            },
            output: OutputEcho {
                directory: sc.out_dir.display().to_string(),
                peak_window: match sc.peak_window {
                    PeakWindow::ForcedPhase => "forced",
                    PeakWindow::Full => "full",
                },
                threshold_percent: sc.threshold,
                sleepers: sc.sleepers.map(|(a, b)| [a, b]),
                response_dofs: sc.response_dofs.clone(),
            },
            results: Map::new(),
            artifacts: Vec::new(),
        }
    }
}

//! Scenario configuration.
//!
//! The file is TOML with four optional tables. Track values use the units of
//! the reference property table (cm², GPa, cm⁴, MN/m, kN·s/m, %) and are
//! converted to SI on load. Every key is optional; missing keys take the
//! reference values.
//!
//! ```toml
//! [track]
//! n_sections = 30
//! element_length_m = 0.3
//!
//! [pulse]
//! kind = "sine"
//! p0_tonnes = 10
//! duration_s = 0.01
//!
//! [solver]
//! method = "state"
//! steps_per_pulse = 100
//!
//! [output]
//! directory = "out"
//! ```

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::{Deserialize, Serialize};

use raildyn_core::loading::{PulseKind, PulseLoad, TONNE_FORCE};
use raildyn_core::postprocess::{PeakWindow, REPORT_THRESHOLD};
use raildyn_core::response::{Method, TimeGrid};
use raildyn_core::track::{TrackProperties, DEFAULT_ELEMENT_LENGTH};

use crate::error::{CliError, Result};

pub const OUT_ENV: &str = "RAILDYN_OUT";
pub const DEFAULT_OUT_DIR: &str = "raildyn-out";
/// Samples per pulse duration when neither `dt` nor `steps_per_pulse` is set.
pub const DEFAULT_STEPS_PER_PULSE: usize = 100;
/// Default simulated time in multiples of the pulse duration.
pub const DEFAULT_DURATION_FACTOR: f64 = 10.0;
pub const MAX_SECTIONS: usize = 500;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum PulseChoice {
    #[serde(alias = "rectangular")]
    #[value(alias = "rectangular")]
    Rect,
    #[serde(alias = "half-sine", alias = "half_sine")]
    #[value(alias = "half-sine")]
    Sine,
}

impl From<PulseChoice> for PulseKind {
    fn from(c: PulseChoice) -> Self {
        match c {
            PulseChoice::Rect => PulseKind::Rectangular,
            PulseChoice::Sine => PulseKind::HalfSine,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum MethodChoice {
    Modal,
    State,
    Newmark,
}

impl From<MethodChoice> for Method {
    fn from(c: MethodChoice) -> Self {
        match c {
            MethodChoice::Modal => Method::ModalUndamped,
            MethodChoice::State => Method::StateSpace,
            MethodChoice::Newmark => Method::Newmark,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum WindowChoice {
    Forced,
    Full,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Report {
    Frequencies,
    Respond,
    Repartition,
    Calibrate,
    ComparePulses,
}

impl Report {
    pub fn name(&self) -> &'static str {
        match self {
            Report::Frequencies => "frequencies",
            Report::Respond => "respond",
            Report::Repartition => "repartition",
            Report::Calibrate => "calibrate",
            Report::ComparePulses => "compare-pulses",
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct ConfigFile {
    pub track: TrackSection,
    pub pulse: PulseSection,
    pub solver: SolverSection,
    pub output: OutputSection,
}

/// Track block in reference-table units.
#[derive(Debug, Clone, Default, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrackSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_sections: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub element_length_m: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rail_density_kg_m3: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rail_area_cm2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rail_young_modulus_gpa: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rail_inertia_cm4: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sleeper_mass_kg: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub railpad_stiffness_mn_m: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub railpad_damping_kns_m: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ballast_stiffness_mn_m: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ballast_damping_kns_m: Option<f64>,
    /// Rail damping ratio at the first reduced-rail mode (%).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub zeta1_percent: Option<f64>,
    /// Rail damping ratio at the second reduced-rail mode (%).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub zeta2_percent: Option<f64>,
    /// Drop every damper (`c_s = c_b = ζ = 0`).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub undamped: Option<bool>,
}

impl TrackSection {
    /// Fully populated echo of `props` in reference-table units.
    pub fn from_si(props: &TrackProperties, n_sections: usize, undamped: bool) -> Self {
        TrackSection {
            n_sections: Some(n_sections),
            element_length_m: Some(props.element_length),
            rail_density_kg_m3: Some(props.rail_density),
            rail_area_cm2: Some(props.rail_area / 1e-4),
            rail_young_modulus_gpa: Some(props.rail_young_modulus / 1e9),
            rail_inertia_cm4: Some(props.rail_inertia / 1e-8),
            sleeper_mass_kg: Some(props.sleeper_mass),
            railpad_stiffness_mn_m: Some(props.railpad_stiffness / 1e6),
            railpad_damping_kns_m: Some(props.railpad_damping / 1e3),
            ballast_stiffness_mn_m: Some(props.ballast_stiffness / 1e6),
            ballast_damping_kns_m: Some(props.ballast_damping / 1e3),
            zeta1_percent: Some(props.zeta1 * 100.0),
            zeta2_percent: Some(props.zeta2 * 100.0),
            undamped: Some(undamped),
        }
    }

    fn to_si(&self) -> TrackProperties {
        let reference = TrackProperties::reference();
        let pick = |v: Option<f64>, scale: f64, default: f64| v.map_or(default, |x| x * scale);
        TrackProperties {
            rail_density: pick(self.rail_density_kg_m3, 1.0, reference.rail_density),
            rail_area: pick(self.rail_area_cm2, 1e-4, reference.rail_area),
            rail_young_modulus: pick(
                self.rail_young_modulus_gpa,
                1e9,
                reference.rail_young_modulus,
            ),
            rail_inertia: pick(self.rail_inertia_cm4, 1e-8, reference.rail_inertia),
            sleeper_mass: pick(self.sleeper_mass_kg, 1.0, reference.sleeper_mass),
            railpad_stiffness: pick(
                self.railpad_stiffness_mn_m,
                1e6,
                reference.railpad_stiffness,
            ),
            railpad_damping: pick(self.railpad_damping_kns_m, 1e3, reference.railpad_damping),
            ballast_stiffness: pick(
                self.ballast_stiffness_mn_m,
                1e6,
                reference.ballast_stiffness,
            ),
            ballast_damping: pick(self.ballast_damping_kns_m, 1e3, reference.ballast_damping),
            zeta1: pick(self.zeta1_percent, 1e-2, reference.zeta1),
            zeta2: pick(self.zeta2_percent, 1e-2, reference.zeta2),
            element_length: self.element_length_m.unwrap_or(DEFAULT_ELEMENT_LENGTH),
        }
    }
}

/// Config key of a [`TrackProperties`] field.
fn track_key(field: &str) -> String {
    let key = match field {
        "rail_density" => "rail_density_kg_m3",
        "rail_area" => "rail_area_cm2",
        "rail_young_modulus" => "rail_young_modulus_gpa",
        "rail_inertia" => "rail_inertia_cm4",
        "sleeper_mass" => "sleeper_mass_kg",
        "railpad_stiffness" => "railpad_stiffness_mn_m",
        "railpad_damping" => "railpad_damping_kns_m",
        "ballast_stiffness" => "ballast_stiffness_mn_m",
        "ballast_damping" => "ballast_damping_kns_m",
        "zeta1" => "zeta1_percent",
        "zeta2" => "zeta2_percent",
        "element_length" => "element_length_m",
        other => other,
    };
    format!("track.{key}")
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct PulseSection {
    pub kind: Option<PulseChoice>,
    pub p0_tonnes: Option<f64>,
    pub p0_newtons: Option<f64>,
    pub duration_s: Option<f64>,
    /// Half-sine circular frequency; defaults to `π / t_d`.
    pub omega_rad_s: Option<f64>,
    /// Newtons per tonne-force.
    pub tonne_force_n: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverSection {
    pub method: Option<MethodChoice>,
    pub dt_s: Option<f64>,
    pub steps_per_pulse: Option<usize>,
    pub duration_s: Option<f64>,
    /// 1-based loaded DOF; must be a rail vertical.
    pub load_dof: Option<usize>,
    /// Refuse Newmark steps coarser than a twentieth of the shortest period.
    pub newmark_check: Option<bool>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub directory: Option<PathBuf>,
    /// Reports executed by `run`.
    pub reports: Option<Vec<Report>>,
    /// 1-based DOFs written as `response_<dof>.csv`.
    pub response_dofs: Option<Vec<usize>>,
    pub peak_window: Option<WindowChoice>,
    pub threshold_percent: Option<f64>,
    /// First and last sleeper (1-based) of the repartition table.
    pub sleepers: Option<[usize; 2]>,
    /// Target frequency and mode number for `calibrate`.
    pub calibrate_target_hz: Option<f64>,
    pub calibrate_mode: Option<usize>,
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub sections: Option<usize>,
    pub pulse: Option<PulseChoice>,
    pub td: Option<f64>,
    pub p0_tonnes: Option<f64>,
    pub method: Option<MethodChoice>,
    pub dt: Option<f64>,
    pub duration: Option<f64>,
    pub out: Option<PathBuf>,
    pub undamped: bool,
    pub load_dof: Option<usize>,
    pub element_length: Option<f64>,
    pub target_hz: Option<f64>,
    pub mode: Option<usize>,
}

impl ConfigFile {
    pub fn parse(text: &str, file: &Path) -> Result<Self> {
        toml::from_str(text).map_err(|source| CliError::Parse {
            file: file.to_path_buf(),
            source,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text, path)
    }

    pub fn apply(&mut self, o: &Overrides) {
        fn set<T: Clone>(slot: &mut Option<T>, value: &Option<T>) {
            if value.is_some() {
                *slot = value.clone();
            }
        }
        set(&mut self.track.n_sections, &o.sections);
        set(&mut self.track.element_length_m, &o.element_length);
        if o.undamped {
            self.track.undamped = Some(true);
        }
        set(&mut self.pulse.kind, &o.pulse);
        set(&mut self.pulse.duration_s, &o.td);
        if o.p0_tonnes.is_some() {
            self.pulse.p0_tonnes = o.p0_tonnes;
            self.pulse.p0_newtons = None;
        }
        set(&mut self.solver.method, &o.method);
        if o.dt.is_some() {
            self.solver.dt_s = o.dt;
            self.solver.steps_per_pulse = None;
        }
        set(&mut self.solver.duration_s, &o.duration);
        set(&mut self.solver.load_dof, &o.load_dof);
        set(&mut self.output.calibrate_target_hz, &o.target_hz);
        set(&mut self.output.calibrate_mode, &o.mode);
    }
}

/// `--out` beats the config file, which beats `RAILDYN_OUT`.
pub fn resolve_out_dir(
    flag: Option<&Path>,
    config: Option<&Path>,
    env: Option<OsString>,
) -> PathBuf {
    flag.map(Path::to_path_buf)
        .or_else(|| config.map(Path::to_path_buf))
        .or_else(|| env.filter(|v| !v.is_empty()).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR))
}

/// Where the element length came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LengthSource {
    Default,
    Config,
}

/// Validated scenario in SI units.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    /// Track as configured; see [`Scenario::model_props`].
    pub props: TrackProperties,
    pub undamped: bool,
    pub n_sections: usize,
    pub length_source: LengthSource,
    pub pulse: PulseLoad,
    pub tonne_force: f64,
    pub method: Method,
    pub grid: TimeGrid,
    pub load_dof: Option<usize>,
    pub newmark_check: bool,
    pub out_dir: PathBuf,
    pub reports: Vec<Report>,
    pub response_dofs: Vec<usize>,
    pub peak_window: PeakWindow,
    pub threshold: f64,
    pub sleepers: Option<(usize, usize)>,
    pub calibrate_target_hz: f64,
    pub calibrate_mode: usize,
}

/// Target of `calibrate` when none is configured (Hz).
pub const DEFAULT_CALIBRATION_TARGET: f64 = 81.62;

impl Scenario {
    /// Properties the solvers use (dampers removed when `undamped`).
    pub fn model_props(&self) -> TrackProperties {
        if self.undamped {
            self.props.undamped()
        } else {
            self.props
        }
    }
}

fn positive(path: &str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(CliError::config(
            path,
            format!("must be finite and > 0, got {value}"),
        ))
    }
}

impl Scenario {
    pub fn resolve(
        config: &ConfigFile,
        out_flag: Option<&Path>,
        env: Option<OsString>,
    ) -> Result<Self> {
        let n_sections = config.track.n_sections.unwrap_or(1);
        if !(1..=MAX_SECTIONS).contains(&n_sections) {
            return Err(CliError::config(
                "track.n_sections",
                format!("must be in 1..={MAX_SECTIONS}, got {n_sections}"),
            ));
        }
        let props = config.track.to_si();
        props.validate().map_err(|e| match e {
            raildyn_core::Error::InvalidParameter { field, reason } => {
                CliError::config(track_key(field), reason)
            }
            other => CliError::config("track", other.to_string()),
        })?;
        let length_source = if config.track.element_length_m.is_some() {
            LengthSource::Config
        } else {
            LengthSource::Default
        };

        let p = &config.pulse;
        let tonne_force = positive(
            "pulse.tonne_force_n",
            p.tonne_force_n.unwrap_or(TONNE_FORCE),
        )?;
        let amplitude = match (p.p0_tonnes, p.p0_newtons) {
            (Some(_), Some(_)) => {
                return Err(CliError::config(
                    "pulse.p0_newtons",
                    "give either p0_tonnes or p0_newtons, not both",
                ))
            }
            (Some(t), None) => positive("pulse.p0_tonnes", t)? * tonne_force,
            (None, Some(n)) => positive("pulse.p0_newtons", n)?,
            (None, None) => 10.0 * tonne_force,
        };
        let t_d = positive("pulse.duration_s", p.duration_s.unwrap_or(0.01))?;
        let mut pulse = PulseLoad::new(p.kind.unwrap_or(PulseChoice::Sine).into(), amplitude, t_d);
        if let Some(w) = p.omega_rad_s {
            pulse = pulse.with_omega(positive("pulse.omega_rad_s", w)?);
        }

        let s = &config.solver;
        let duration = positive(
            "solver.duration_s",
            s.duration_s.unwrap_or(DEFAULT_DURATION_FACTOR * t_d),
        )?;
        if duration < t_d * (1.0 - 1e-9) {
            return Err(CliError::config(
                "solver.duration_s",
                format!("must cover the pulse ({t_d} s), got {duration}"),
            ));
        }
        let grid = match (s.dt_s, s.steps_per_pulse) {
            (Some(_), Some(_)) => {
                return Err(CliError::config(
                    "solver.dt_s",
                    "give either dt_s or steps_per_pulse, not both",
                ))
            }
            (Some(dt), None) => {
                let dt = positive("solver.dt_s", dt)?;
                TimeGrid::with_step(t_d, dt, duration)
                    .map_err(|e| CliError::config("solver.dt_s", e.to_string()))?
            }
            (None, steps) => {
                let steps = steps.unwrap_or(DEFAULT_STEPS_PER_PULSE);
                if steps == 0 {
                    return Err(CliError::config("solver.steps_per_pulse", "must be >= 1"));
                }
                TimeGrid::new(t_d, steps, duration)
                    .map_err(|e| CliError::config("solver.steps_per_pulse", e.to_string()))?
            }
        };

        let n_dof = 5 * n_sections + 3;
        if let Some(d) = s.load_dof {
            if d == 0 || d > n_dof {
                return Err(CliError::config(
                    "solver.load_dof",
                    format!("must be in 1..={n_dof}, got {d}"),
                ));
            }
        }

        let o = &config.output;
        let response_dofs = o.response_dofs.clone().unwrap_or_default();
        if let Some(&bad) = response_dofs.iter().find(|&&d| d == 0 || d > n_dof) {
            return Err(CliError::config(
                "output.response_dofs",
                format!("DOF {bad} outside 1..={n_dof}"),
            ));
        }
        let threshold = o.threshold_percent.unwrap_or(REPORT_THRESHOLD);
        if !(threshold.is_finite() && threshold >= 0.0) {
            return Err(CliError::config("output.threshold_percent", "must be >= 0"));
        }
        let sleepers = match o.sleepers {
            Some([a, b]) => {
                if a == 0 || b < a || b > n_sections + 1 {
                    return Err(CliError::config(
                        "output.sleepers",
                        format!(
                            "need 1 <= first <= last <= {}, got [{a}, {b}]",
                            n_sections + 1
                        ),
                    ));
                }
                Some((a, b))
            }
            None => None,
        };
        let calibrate_target_hz = positive(
            "output.calibrate_target_hz",
            o.calibrate_target_hz.unwrap_or(DEFAULT_CALIBRATION_TARGET),
        )?;
        let calibrate_mode = o.calibrate_mode.unwrap_or(2);
        if !(1..=8).contains(&calibrate_mode) {
            return Err(CliError::config(
                "output.calibrate_mode",
                "must be in 1..=8",
            ));
        }

        Ok(Scenario {
            props,
            undamped: config.track.undamped.unwrap_or(false),
            n_sections,
            length_source,
            pulse,
            tonne_force,
            method: s.method.unwrap_or(MethodChoice::State).into(),
            grid,
            load_dof: s.load_dof,
            newmark_check: s.newmark_check.unwrap_or(true),
            out_dir: resolve_out_dir(out_flag, o.directory.as_deref(), env),
            reports: o
                .reports
                .clone()
                .unwrap_or_else(|| vec![Report::Frequencies, Report::Respond, Report::Repartition]),
            response_dofs,
            peak_window: match o.peak_window.unwrap_or(WindowChoice::Forced) {
                WindowChoice::Forced => PeakWindow::ForcedPhase,
                WindowChoice::Full => PeakWindow::Full,
            },
            threshold,
            sleepers,
            calibrate_target_hz,
            calibrate_mode,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn resolve(text: &str) -> Result<Scenario> {
        Scenario::resolve(&ConfigFile::parse(text, Path::new("t.toml"))?, None, None)
    }

    #[test]
    fn empty_config_is_reference_track() {
        let s = resolve("").unwrap();
        assert_eq!(s.props, TrackProperties::reference());
        assert_eq!(s.n_sections, 1);
        assert_eq!(s.pulse, PulseLoad::half_sine(98_100.0, 0.01));
        assert_eq!(s.method, Method::StateSpace);
        assert_eq!(s.grid.pulse_steps, 100);
        assert!((s.grid.duration() - 0.1).abs() < 1e-15);
        assert_eq!(s.out_dir, PathBuf::from(DEFAULT_OUT_DIR));
    }

    #[test]
    fn units_are_converted() {
        let s = resolve(
            "[track]\nrail_area_cm2 = 50\nrail_young_modulus_gpa = 200\nrail_inertia_cm4 = 2000\n\
             railpad_damping_kns_m = 10\nzeta1_percent = 2\n",
        )
        .unwrap();
        assert!((s.props.rail_area - 50e-4).abs() < 1e-18);
        assert_eq!(s.props.rail_young_modulus, 200e9);
        assert!((s.props.rail_inertia - 2000e-8).abs() < 1e-20);
        assert_eq!(s.props.railpad_damping, 10e3);
        assert_eq!(s.props.zeta1, 0.02);
    }

    #[test]
    fn unknown_key_rejected() {
        let err = resolve("[track]\nrail_area = 1\n").unwrap_err();
        assert!(matches!(err, CliError::Parse { .. }));
        assert!(err.to_string().contains("rail_area"), "{err}");
    }

    #[test]
    fn errors_name_the_key() {
        let err = resolve("[track]\nrail_inertia_cm4 = -1\n").unwrap_err();
        assert!(
            err.to_string().starts_with("track.rail_inertia_cm4:"),
            "{err}"
        );
        let err = resolve("[pulse]\nduration_s = 0\n").unwrap_err();
        assert!(err.to_string().starts_with("pulse.duration_s:"), "{err}");
        let err = resolve("[solver]\nload_dof = 99\n").unwrap_err();
        assert!(err.to_string().starts_with("solver.load_dof:"), "{err}");
        let err = resolve("[pulse]\np0_tonnes = 1\np0_newtons = 2\n").unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn overrides_win() {
        let mut c = ConfigFile::parse(
            "[pulse]\nkind = \"sine\"\np0_newtons = 5\n[solver]\nsteps_per_pulse = 7\n",
            Path::new("t"),
        )
        .unwrap();
        c.apply(&Overrides {
            pulse: Some(PulseChoice::Rect),
            p0_tonnes: Some(2.0),
            dt: Some(0.001),
            undamped: true,
            ..Overrides::default()
        });
        let s = Scenario::resolve(&c, None, None).unwrap();
        assert_eq!(s.pulse.kind, PulseKind::Rectangular);
        assert_eq!(s.pulse.amplitude, 2.0 * TONNE_FORCE);
        assert_eq!(s.grid.pulse_steps, 10);
        assert!(s.undamped && s.model_props().is_undamped());
    }

    #[test]
    fn output_directory_precedence() {
        let env = Some(OsString::from("from-env"));
        let cfg = Some(Path::new("from-config"));
        let flag = Some(Path::new("from-flag"));
        assert_eq!(
            resolve_out_dir(flag, cfg, env.clone()),
            PathBuf::from("from-flag")
        );
        assert_eq!(
            resolve_out_dir(None, cfg, env.clone()),
            PathBuf::from("from-config")
        );
        assert_eq!(resolve_out_dir(None, None, env), PathBuf::from("from-env"));
        assert_eq!(
            resolve_out_dir(None, None, None),
            PathBuf::from(DEFAULT_OUT_DIR)
        );
    }

    #[test]
    fn track_echo_round_trips() {
        let text = "[track]\nrail_area_cm2 = 76.7\nrail_inertia_cm4 = 3038.6\n\
                    railpad_stiffness_mn_m = 90\nballast_damping_kns_m = 40\nzeta2_percent = 3\n";
        let c = ConfigFile::parse(text, Path::new("t")).unwrap();
        let s = Scenario::resolve(&c, None, None).unwrap();
        let echo = TrackSection::from_si(&s.props, s.n_sections, s.undamped);
        let pairs = [
            (c.track.rail_area_cm2, echo.rail_area_cm2),
            (c.track.rail_inertia_cm4, echo.rail_inertia_cm4),
            (c.track.railpad_stiffness_mn_m, echo.railpad_stiffness_mn_m),
            (c.track.ballast_damping_kns_m, echo.ballast_damping_kns_m),
            (c.track.zeta2_percent, echo.zeta2_percent),
        ];
        for (a, b) in pairs {
            let (a, b) = (a.unwrap(), b.unwrap());
            assert!((a - b).abs() <= 1e-12 * a.abs(), "{a} vs {b}");
        }
    }
}

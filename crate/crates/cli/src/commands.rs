//! Report generation. Each report writes its CSV files and returns a JSON
//! summary for the manifest plus human-readable lines for the terminal.

use serde_json::{json, Map, Value};

use raildyn_core::eigen::modal_decompose;
use raildyn_core::loading::{load_vector, load_vector_at, LoadCase, PulseKind, PulseLoad};
use raildyn_core::postprocess::{
    default_window, max_abs_peak, peak_summary, repartition_table, substructure_forces, DofPeak,
    RepartitionTable, SubstructureLoads,
};
use raildyn_core::response::{solve, Method, NewmarkParams, ResponseHistory, SolveOptions};
use raildyn_core::track::{
    assemble_track, calibrate_element_length, sweep_element_length, AssembledSystem,
    CalibrationRequest, DofKind, TrackProperties,
};
use raildyn_core::Error;

use crate::config::{Report, Scenario};
use crate::error::{CliError, Result};
use crate::manifest::{Manifest, MANIFEST_FILE};
use crate::output::{num, Artifacts};

/// What a report hands back to the driver.
#[derive(Debug, Default)]
pub struct ReportOutput {
    pub results: Value,
    pub lines: Vec<String>,
    /// Set when the report wrote its artifacts but did not reach its goal.
    pub failure: Option<String>,
}

/// Result of a full invocation.
#[derive(Debug)]
pub struct Execution {
    pub manifest: Manifest,
    pub lines: Vec<String>,
    pub failure: Option<String>,
}

/// Runs `reports` into the scenario's output directory and writes `run.json`.
pub fn execute(command: &str, reports: &[Report], sc: &Scenario) -> Result<Execution> {
    let mut art = Artifacts::create(&sc.out_dir)?;
    let mut manifest = Manifest::new(command, sc);
    let mut results = Map::new();
    let mut lines = Vec::new();
    let mut failure = None;
    for report in reports {
        let out = run_report(*report, sc, &mut art)?;
        results.insert(report.name().to_string(), out.results);
        lines.extend(out.lines);
        if failure.is_none() {
            failure = out.failure;
        }
    }
    manifest.results = results;
    manifest.artifacts = art.files().to_vec();
    art.json(MANIFEST_FILE, &manifest)?;
    Ok(Execution {
        manifest,
        lines,
        failure,
    })
}

pub fn run_report(report: Report, sc: &Scenario, art: &mut Artifacts) -> Result<ReportOutput> {
    match report {
        Report::Frequencies => frequencies(sc, art),
        Report::Respond => respond(sc, art),
        Report::Repartition => repartition(sc, art),
        Report::Calibrate => calibrate(sc, art),
        Report::ComparePulses => compare_pulses(sc, art),
    }
}

fn assemble(props: &TrackProperties, n_sections: usize) -> Result<AssembledSystem> {
    assemble_track(props, n_sections).map_err(CliError::model("assembling the track"))
}

fn load_case(sc: &Scenario, system: &AssembledSystem, pulse: PulseLoad) -> Result<LoadCase> {
    let r = match sc.load_dof {
        Some(dof) => load_vector_at(system, pulse, dof),
        None => load_vector(system, pulse),
    };
    r.map_err(|e| match e {
        Error::LoadNotOnRailVertical {
            index,
            nearest_vertical,
        } => CliError::config(
            "solver.load_dof",
            format!(
                "DOF {index} is not a rail vertical displacement; \
                 choose a rail vertical such as {nearest_vertical} (--load-dof)"
            ),
        ),
        other => CliError::Model {
            context: "building the load".into(),
            source: other,
        },
    })
}

fn solve_options(sc: &Scenario) -> SolveOptions {
    SolveOptions {
        force_undamped: false,
        newmark: NewmarkParams {
            check_resolution: sc.newmark_check,
            ..NewmarkParams::default()
        },
    }
}

/// One solved case with its substructure loads.
pub struct Case {
    pub system: AssembledSystem,
    pub load: LoadCase,
    pub history: ResponseHistory,
    pub loads: SubstructureLoads,
}

pub fn solve_case(
    sc: &Scenario,
    props: &TrackProperties,
    pulse: PulseLoad,
    method: Method,
) -> Result<Case> {
    let system = assemble(props, sc.n_sections)?;
    let load = load_case(sc, &system, pulse)?;
    let history = solve(
        &system.structure,
        &load,
        &sc.grid,
        method,
        &solve_options(sc),
    )
    .map_err(CliError::model(format!("{} solution", method.name())))?;
    let loads = substructure_forces(&history, props, &system.dof_map, sc.peak_window)
        .map_err(CliError::model("substructure forces"))?;
    Ok(Case {
        system,
        load,
        history,
        loads,
    })
}

fn frequencies(sc: &Scenario, art: &mut Artifacts) -> Result<ReportOutput> {
    let system = assemble(&sc.model_props(), sc.n_sections)?;
    let basis = modal_decompose(&system.structure.mass, &system.structure.stiffness)
        .map_err(CliError::model("natural frequencies"))?;
    let hz = basis.frequencies_hz();
    let rows = hz
        .iter()
        .enumerate()
        .map(|(i, f)| vec![(i + 1).to_string(), num(*f), num(basis.omega(i))]);
    art.csv(
        "frequencies.csv",
        &["mode", "frequency_hz", "omega_rad_s"],
        rows,
    )?;
    let mut lines = vec![format!("natural frequencies, N = {}", sc.n_sections)];
    lines.extend(
        hz.iter()
            .enumerate()
            .map(|(i, f)| format!("  mode {:>3}: {f:>14.4} Hz", i + 1)),
    );
    Ok(ReportOutput {
        results: json!({ "n_modes": hz.len(), "frequencies_hz": hz }),
        lines,
        failure: None,
    })
}

fn unit_of(kind: &DofKind) -> (&'static str, &'static str) {
    if kind.is_rotation() {
        ("rad", "rad_s")
    } else {
        ("m", "m_s")
    }
}

/// Sleeper (0-based) closest to a rail vertical DOF.
fn sleeper_near(kind: DofKind) -> Option<usize> {
    match kind {
        DofKind::RailVertical { node } | DofKind::RailRotation { node } => Some(node / 2),
        DofKind::Sleeper { index } => Some(index),
    }
}

fn write_case(case: &Case, sc: &Scenario, art: &mut Artifacts) -> Result<Vec<DofPeak>> {
    let map = &case.system.dof_map;
    let h = &case.history;
    let mut dofs = sc.response_dofs.clone();
    if dofs.is_empty() {
        if let Some(d) = case.load.dof {
            dofs.push(d);
            if let Some(s) = sleeper_near(map.kind(d - 1)) {
                dofs.push(map.sleeper_dof(s) + 1);
            }
        }
    }
    let times = h.grid.times();
    for &dof in &dofs {
        let kind = map.kind(dof - 1);
        let (u, v) = unit_of(&kind);
        let disp = h.displacement_of(dof - 1);
        let vel = h
            .velocity_of(dof - 1)
            .unwrap_or_else(|| vec![f64::NAN; disp.len()]);
        let rows = (0..times.len()).map(|k| vec![num(times[k]), num(disp[k]), num(vel[k])]);
        let header = [
            "time_s".to_string(),
            format!("displacement_{u}"),
            format!("velocity_{v}"),
        ];
        let header: Vec<&str> = header.iter().map(String::as_str).collect();
        art.csv(&format!("response_{dof}.csv"), &header, rows)?;
    }

    let l = &case.loads;
    let rows = (0..l.n_sleepers()).map(|s| {
        vec![
            (s + 1).to_string(),
            (l.sleeper_dofs[s] + 1).to_string(),
            l.support_count[s].to_string(),
            num(l.peak_force[s]),
            num(l.percent[s]),
            num(l.peak_time[s]),
            num(l.impulse_share[s]),
        ]
    });
    art.csv(
        "sleeper_loads.csv",
        &[
            "sleeper",
            "dof",
            "ballast_elements",
            "peak_force_n",
            "percent_of_p0",
            "peak_time_s",
            "impulse_share_percent",
        ],
        rows,
    )?;

    let peaks = peak_summary(h, map, sc.peak_window);
    let rows = peaks.iter().map(|p| {
        vec![
            p.dof.to_string(),
            p.kind.label(),
            unit_of(&p.kind).0.to_string(),
            num(p.peak),
            num(p.time),
        ]
    });
    art.csv(
        "peaks.csv",
        &["dof", "label", "unit", "peak", "peak_time_s"],
        rows,
    )?;
    Ok(peaks)
}

fn is_vertical_rail(k: &DofKind) -> bool {
    matches!(k, DofKind::RailVertical { .. })
}

fn is_sleeper(k: &DofKind) -> bool {
    matches!(k, DofKind::Sleeper { .. })
}

fn case_summary(case: &Case, peaks: &[DofPeak]) -> Value {
    let l = &case.loads;
    let (best, _) =
        l.percent.iter().enumerate().fold(
            (0, f64::MIN),
            |acc, (i, &p)| if p > acc.1 { (i, p) } else { acc },
        );
    json!({
        "method": case.history.meta.method.name(),
        "pulse": case.history.meta.pulse.kind.name(),
        "load_dof": case.load.dof,
        "peak_rail_displacement_m": max_abs_peak(peaks, is_vertical_rail),
        "peak_sleeper_displacement_m": max_abs_peak(peaks, is_sleeper),
        "max_sleeper_percent": l.percent[best],
        "max_sleeper": best + 1,
    })
}

fn respond(sc: &Scenario, art: &mut Artifacts) -> Result<ReportOutput> {
    let case = solve_case(sc, &sc.model_props(), sc.pulse, sc.method)?;
    let peaks = write_case(&case, sc, art)?;
    let results = case_summary(&case, &peaks);
    let lines = vec![
        format!(
            "{} pulse, {} solver, N = {}, load on DOF {}",
            sc.pulse.kind.name(),
            sc.method.name(),
            sc.n_sections,
            case.load.dof.unwrap_or(0)
        ),
        format!(
            "  peak rail displacement    {:.6e} m",
            results["peak_rail_displacement_m"]
                .as_f64()
                .unwrap_or(f64::NAN)
        ),
        format!(
            "  peak sleeper displacement {:.6e} m",
            results["peak_sleeper_displacement_m"]
                .as_f64()
                .unwrap_or(f64::NAN)
        ),
        format!(
            "  largest sleeper load      {:.2} % of P0 (sleeper {})",
            results["max_sleeper_percent"].as_f64().unwrap_or(f64::NAN),
            results["max_sleeper"]
        ),
    ];
    Ok(ReportOutput {
        results,
        lines,
        failure: None,
    })
}

/// Column order of the repartition table.
pub const REPARTITION_CASES: [(&str, bool, PulseKind); 4] = [
    ("undamped_sine", false, PulseKind::HalfSine),
    ("damped_sine", true, PulseKind::HalfSine),
    ("undamped_rect", false, PulseKind::Rectangular),
    ("damped_rect", true, PulseKind::Rectangular),
];

/// Solver for one repartition column: the undamped modal solution cannot run
/// a damped case, which then falls back to the state-space solution.
fn method_for(sc: &Scenario, damped: bool) -> Method {
    if damped && sc.method == Method::ModalUndamped {
        Method::StateSpace
    } else {
        sc.method
    }
}

pub fn repartition_cases(sc: &Scenario) -> Result<Vec<Case>> {
    REPARTITION_CASES
        .iter()
        .map(|&(_, damped, kind)| {
            let props = if damped {
                sc.props
            } else {
                sc.props.undamped()
            };
            let pulse = PulseLoad::new(kind, sc.pulse.amplitude, sc.pulse.duration)
                .with_omega(sc.pulse.omega);
            solve_case(sc, &props, pulse, method_for(sc, damped))
        })
        .collect()
}

pub fn build_repartition(sc: &Scenario, cases: &[Case]) -> Result<RepartitionTable> {
    let labelled: Vec<(&str, &SubstructureLoads)> = REPARTITION_CASES
        .iter()
        .zip(cases)
        .map(|((label, _, _), case)| (*label, &case.loads))
        .collect();
    let window = sc.sleepers.unwrap_or_else(|| default_window(sc.n_sections));
    repartition_table(&labelled, window, sc.threshold).map_err(CliError::model("repartition table"))
}

fn repartition(sc: &Scenario, art: &mut Artifacts) -> Result<ReportOutput> {
    let cases = repartition_cases(sc)?;
    let table = build_repartition(sc, &cases)?;
    let header: Vec<String> = std::iter::once("sleeper".to_string())
        .chain(table.labels.iter().map(|l| format!("{l}_percent")))
        .collect();
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let rows = table.rows.iter().enumerate().map(|(i, r)| {
        std::iter::once(r.sleeper.to_string())
            .chain((0..r.percents.len()).map(|c| table.cell(i, c).map_or("-".to_string(), num)))
            .collect()
    });
    art.csv("repartition.csv", &header, rows)?;
    let impulse_rows = table.rows.iter().map(|r| {
        std::iter::once(r.sleeper.to_string())
            .chain(
                cases
                    .iter()
                    .map(|c| num(c.loads.impulse_share[r.sleeper - 1])),
            )
            .collect()
    });
    art.csv("repartition_impulse.csv", &header, impulse_rows)?;

    let mut lines = vec![format!(
        "% of P0 per sleeper (peak ballast force), N = {}, '-' below {} %",
        sc.n_sections, sc.threshold
    )];
    lines.push(format!(
        "  {:>7} {:>14} {:>14} {:>14} {:>14}",
        "sleeper", table.labels[0], table.labels[1], table.labels[2], table.labels[3]
    ));
    for (i, r) in table.rows.iter().enumerate() {
        let cells: Vec<String> = (0..4)
            .map(|c| {
                table
                    .cell(i, c)
                    .map_or("-".to_string(), |v| format!("{v:.2}"))
            })
            .collect();
        lines.push(format!(
            "  {:>7} {:>14} {:>14} {:>14} {:>14}",
            r.sleeper, cells[0], cells[1], cells[2], cells[3]
        ));
    }
    let methods: Vec<&str> = cases.iter().map(|c| c.history.meta.method.name()).collect();
    let rows: Vec<Value> = table
        .rows
        .iter()
        .map(|r| json!({ "sleeper": r.sleeper, "percents": r.percents }))
        .collect();
    Ok(ReportOutput {
        results: json!({
            "cases": table.labels,
            "methods": methods,
            "threshold_percent": table.threshold,
            "rows": rows,
        }),
        lines,
        failure: None,
    })
}

fn calibrate(sc: &Scenario, art: &mut Artifacts) -> Result<ReportOutput> {
    let props = sc.props;
    let mut request = CalibrationRequest::new(sc.calibrate_target_hz);
    request.mode = sc.calibrate_mode;
    let sweep = sweep_element_length(&props, request.bracket, request.sweep_step)
        .map_err(CliError::model("frequency sweep"))?;
    let n_modes = sweep.first().map_or(0, |s| s.1.len());
    let header: Vec<String> = std::iter::once("element_length_m".to_string())
        .chain((1..=n_modes).map(|m| format!("mode{m}_hz")))
        .collect();
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let rows = sweep.iter().map(|(l, f)| {
        std::iter::once(num(*l))
            .chain(f.iter().map(|x| num(*x)))
            .collect()
    });
    art.csv("calibration_sweep.csv", &header, rows)?;

    let target = request.target_hz;
    match calibrate_element_length(&props, &request) {
        Ok(cal) => {
            let f = &cal.frequencies_hz;
            let pair_gap = 100.0 * (f[1] - f[0]) / f[1];
            let results = json!({
                "status": "found",
                "target_hz": target,
                "mode": request.mode,
                "element_length_m": cal.element_length,
                "sleeper_spacing_m": 2.0 * cal.element_length,
                "iterations": cal.iterations,
                "frequencies_hz": f,
                "mode12_gap_percent": pair_gap,
            });
            let lines = vec![
                format!(
                    "mode {} at {target} Hz for L = {:.6} m (sleeper spacing {:.6} m)",
                    request.mode,
                    cal.element_length,
                    2.0 * cal.element_length
                ),
                format!(
                    "  modes 1-3: {:.3} / {:.3} / {:.3} Hz (modes 1-2 {:.2} % apart)",
                    f[0], f[1], f[2], pair_gap
                ),
            ];
            Ok(ReportOutput {
                results,
                lines,
                failure: None,
            })
        }
        Err(Error::CalibrationFailed { low, high, .. }) => {
            let message = format!(
                "mode {} never reaches {target} Hz for L in [{}, {}] m: f({}) = {:.3} Hz, f({}) = {:.3} Hz; see calibration_sweep.csv",
                request.mode, low.0, high.0, low.0, low.1, high.0, high.1
            );
            Ok(ReportOutput {
                results: json!({
                    "status": "failed",
                    "target_hz": target,
                    "mode": request.mode,
                    "bracket_m": [low.0, high.0],
                    "bracket_hz": [low.1, high.1],
                }),
                lines: vec![message.clone()],
                failure: Some(message),
            })
        }
        Err(e) => Err(CliError::model("calibration")(e)),
    }
}

fn compare_pulses(sc: &Scenario, art: &mut Artifacts) -> Result<ReportOutput> {
    let props = sc.model_props();
    let mut solved = Vec::new();
    for kind in [PulseKind::Rectangular, PulseKind::HalfSine] {
        let pulse =
            PulseLoad::new(kind, sc.pulse.amplitude, sc.pulse.duration).with_omega(sc.pulse.omega);
        let case = solve_case(sc, &props, pulse, sc.method)?;
        let mut sub = art.subdir(kind.name())?;
        let peaks = write_case(&case, sc, &mut sub)?;
        art.absorb(sub);
        solved.push((case, peaks));
    }
    let (rect, sine) = (&solved[0], &solved[1]);
    let rows = rect.1.iter().zip(&sine.1).map(|(r, s)| {
        let (a, b) = (r.peak.abs(), s.peak.abs());
        vec![
            r.dof.to_string(),
            r.kind.label(),
            unit_of(&r.kind).0.to_string(),
            num(a),
            num(b),
            num(a - b),
            if b > 0.0 { num(a / b) } else { "-".to_string() },
        ]
    });
    art.csv(
        "pulse_comparison.csv",
        &[
            "dof",
            "label",
            "unit",
            "rect_peak",
            "sine_peak",
            "difference",
            "ratio",
        ],
        rows,
    )?;
    let (lr, ls) = (&rect.0.loads, &sine.0.loads);
    let rows = (0..lr.n_sleepers()).map(|s| {
        vec![
            (s + 1).to_string(),
            num(lr.percent[s]),
            num(ls.percent[s]),
            num(lr.percent[s] - ls.percent[s]),
        ]
    });
    art.csv(
        "sleeper_comparison.csv",
        &[
            "sleeper",
            "rect_percent",
            "sine_percent",
            "difference_points",
        ],
        rows,
    )?;
    let r = case_summary(&rect.0, &rect.1);
    let s = case_summary(&sine.0, &sine.1);
    let lines = vec![
        format!(
            "rect vs sine, {} solver, N = {}",
            sc.method.name(),
            sc.n_sections
        ),
        format!(
            "  peak rail displacement    {:.6e} / {:.6e} m",
            r["peak_rail_displacement_m"].as_f64().unwrap_or(f64::NAN),
            s["peak_rail_displacement_m"].as_f64().unwrap_or(f64::NAN)
        ),
        format!(
            "  peak sleeper displacement {:.6e} / {:.6e} m",
            r["peak_sleeper_displacement_m"]
                .as_f64()
                .unwrap_or(f64::NAN),
            s["peak_sleeper_displacement_m"]
                .as_f64()
                .unwrap_or(f64::NAN)
        ),
    ];
    Ok(ReportOutput {
        results: json!({ "rect": r, "sine": s }),
        lines,
        failure: None,
    })
}

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use raildyn::config::{MethodChoice, PulseChoice, OUT_ENV};
use raildyn::{execute, CliError, ConfigFile, Overrides, Report, Scenario};

/// Transient response of a ballasted railway track to wheel pulses.
#[derive(Debug, Parser)]
#[command(name = "raildyn", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Natural frequencies of the assembled track (frequencies.csv).
    Frequencies(ScenarioArgs),
    /// Time response to one pulse (response_<dof>.csv, sleeper_loads.csv, peaks.csv).
    Respond(ScenarioArgs),
    /// Per-sleeper share of the load for damped/undamped x sine/rect (repartition.csv).
    Repartition(ScenarioArgs),
    /// Element length placing a single-section mode on a target frequency.
    Calibrate(ScenarioArgs),
    /// Rectangular and half-sine runs side by side (pulse_comparison.csv).
    ComparePulses(ScenarioArgs),
    /// Every report listed under `output.reports` in the config.
    Run(ScenarioArgs),
}

#[derive(Debug, Args)]
struct ScenarioArgs {
    /// TOML scenario file.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Number of elementary sections N.
    #[arg(long, value_name = "N")]
    sections: Option<usize>,
    #[arg(long, value_enum)]
    pulse: Option<PulseChoice>,
    /// Pulse duration t_d (s).
    #[arg(long, value_name = "SEC")]
    td: Option<f64>,
    /// Pulse amplitude in tonnes-force.
    #[arg(long, value_name = "X")]
    p0_tonnes: Option<f64>,
    #[arg(long, value_enum)]
    method: Option<MethodChoice>,
    /// Time step (s); snapped so that t_d falls on a sample.
    #[arg(long, value_name = "SEC")]
    dt: Option<f64>,
    /// Simulated time (s), default 10 t_d.
    #[arg(long, value_name = "SEC")]
    duration: Option<f64>,
    /// Output directory [default: config, then $RAILDYN_OUT, then ./raildyn-out].
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Remove railpad, ballast and rail damping.
    #[arg(long)]
    undamped: bool,
    /// 1-based loaded DOF (a rail vertical displacement).
    #[arg(long, value_name = "DOF")]
    load_dof: Option<usize>,
    /// Rail element length L (m); sleeper spacing is 2L.
    #[arg(long, value_name = "M")]
    element_length: Option<f64>,
    /// Target frequency for `calibrate` (Hz).
    #[arg(long, value_name = "HZ")]
    target_hz: Option<f64>,
    /// Single-section mode number for `calibrate`.
    #[arg(long, value_name = "K")]
    mode: Option<usize>,
}

impl ScenarioArgs {
    fn overrides(&self) -> Overrides {
        Overrides {
            sections: self.sections,
            pulse: self.pulse,
            td: self.td,
            p0_tonnes: self.p0_tonnes,
            method: self.method,
            dt: self.dt,
            duration: self.duration,
            out: self.out.clone(),
            undamped: self.undamped,
            load_dof: self.load_dof,
            element_length: self.element_length,
            target_hz: self.target_hz,
            mode: self.mode,
        }
    }
}

fn run(cli: Cli) -> Result<Option<String>, CliError> {
    let (name, args, fixed) = match &cli.command {
        Command::Frequencies(a) => ("frequencies", a, Some(Report::Frequencies)),
        Command::Respond(a) => ("respond", a, Some(Report::Respond)),
        Command::Repartition(a) => ("repartition", a, Some(Report::Repartition)),
        Command::Calibrate(a) => ("calibrate", a, Some(Report::Calibrate)),
        Command::ComparePulses(a) => ("compare-pulses", a, Some(Report::ComparePulses)),
        Command::Run(a) => ("run", a, None),
    };
    let mut config = match &args.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    let overrides = args.overrides();
    config.apply(&overrides);
    let scenario = Scenario::resolve(&config, overrides.out.as_deref(), std::env::var_os(OUT_ENV))?;
    let reports = match fixed {
        Some(r) => vec![r],
        None => scenario.reports.clone(),
    };
    let execution = execute(name, &reports, &scenario)?;
    for line in &execution.lines {
        println!("{line}");
    }
    println!(
        "wrote {} files to {}",
        execution.manifest.artifacts.len() + 1,
        scenario.out_dir.display()
    );
    Ok(execution.failure)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(None) => ExitCode::SUCCESS,
        Ok(Some(failure)) => {
            eprintln!("error: {failure}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            let mut source = std::error::Error::source(&e);
            while let Some(s) = source {
                eprintln!("  caused by: {s}");
                source = s.source();
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use pap_core::experiments;
use pap_core::report::ExperimentResult;
use pap_core::scenario::{Scenario, ScenarioError};
use std::path::PathBuf;

#[derive(Parser, Debug)]
#[command(name = "pap", version, about = "Trajectory planning for a UAV access point assisted by reflecting surfaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Scenario TOML; defaults apply to every omitted field.
    #[arg(long, global = true)]
    scenario: Option<PathBuf>,

    /// Output directory for CSV tables and the JSON summary.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    /// Overrides the scenario seed.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Candidate velocities in m/s: a comma list (`4,8,12`) or `start:stop:step`.
    #[arg(long, global = true)]
    velocity_set: Option<String>,

    /// Stop the velocity sweep once the GEE stops improving.
    #[arg(long, global = true)]
    early_break: bool,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Fit the cell regressions to the datasheet.
    FitBattery,
    /// Flight time against speed.
    FlightTime,
    /// Hover endurance against the number of cells.
    BatterySizing,
    /// Circle counts of the packing strategies.
    Pack,
    /// GEE against IRS size for the beamforming cases.
    IrsSweep,
    /// Multi-lap plan with its velocity sweep.
    Plan,
    /// Single-lap baseline with its iteration trace.
    BaselineSingleLap,
    /// Fly-hover-communicate baseline.
    BaselineFlyHover,
    /// Energy of all policies across file sizes.
    EnergyComparison,
}

fn parse_velocities(s: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    let v: Vec<f64> = match parts.as_slice() {
        [a, b, c] => {
            let (start, stop, step): (f64, f64, f64) = (a.trim().parse()?, b.trim().parse()?, c.trim().parse()?);
            if step.is_nan() || step <= 0.0 {
                bail!("velocity step must be positive");
            }
            let n = ((stop - start) / step + 1e-9).floor();
            if n < 0.0 {
                bail!("empty velocity range {s}");
            }
            (0..=n as usize).map(|k| start + k as f64 * step).collect()
        }
        [list] => list
            .split(',')
            .filter(|x| !x.trim().is_empty())
            .map(|x| x.trim().parse::<f64>().with_context(|| format!("bad velocity {x:?}")))
            .collect::<Result<_>>()?,
        _ => bail!("velocity set must be a comma list or start:stop:step"),
    };
    if v.is_empty() {
        bail!("velocity set is empty");
    }
    Ok(v)
}

fn scenario(cli: &Cli) -> Result<Scenario> {
    let mut sc = match &cli.scenario {
        Some(p) => Scenario::load(p).with_context(|| format!("loading {}", p.display()))?,
        None => Scenario::default(),
    };
    if let Some(seed) = cli.seed {
        sc = sc.with_seed(seed);
    }
    if let Some(v) = &cli.velocity_set {
        sc.planner.velocities = parse_velocities(v)?;
    }
    if cli.early_break {
        sc.planner.early_break = true;
    }
    sc.validate()?;
    Ok(sc)
}

fn run(cmd: Command, sc: &Scenario) -> Result<ExperimentResult, ScenarioError> {
    match cmd {
        Command::FitBattery => experiments::run_fit_battery(sc),
        Command::FlightTime => experiments::run_flight_time_sweep(sc),
        Command::BatterySizing => experiments::run_battery_sizing(sc),
        Command::Pack => experiments::run_pack_comparison(sc),
        Command::IrsSweep => experiments::run_irs_sweep(sc),
        Command::Plan => experiments::run_plan(sc),
        Command::BaselineSingleLap => experiments::run_single_lap(sc),
        Command::BaselineFlyHover => experiments::run_fly_hover(sc),
        Command::EnergyComparison => experiments::run_energy_comparison(sc),
    }
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    let sc = scenario(&cli)?;
    let res = run(cli.command, &sc)?;
    let files = res.write(&cli.out).with_context(|| format!("writing to {}", cli.out.display()))?;
    std::fs::write(cli.out.join("scenario.toml"), sc.to_toml()?)?;
    for (k, v) in &res.summary {
        if !v.is_array() && !v.is_object() {
            println!("{k} = {v}");
        }
    }
    for f in files {
        println!("wrote {}", f.display());
    }
    Ok(())
}

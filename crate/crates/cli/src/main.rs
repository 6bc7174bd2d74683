use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qbattery::dynamics::EvolveOptions;
use qbattery::sweep::{self, config, Manifest, SweepParam, SweepPlan, SweepReport};
use qbattery::{Error, Execution, Result};

/// Driven spin-chain quantum battery in a thermal cavity.
#[derive(Parser, Debug)]
#[command(name = "qbattery", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run one configuration and write its trajectory CSV and manifest.
    Simulate {
        #[arg(long, value_name = "FILE")]
        config: PathBuf,
        #[arg(long, value_name = "DIR", default_value = "out/simulate")]
        out: PathBuf,
        #[command(flatten)]
        run: RunFlags,
    },
    /// Run a figure preset, a custom one-parameter sweep, or replay a manifest.
    Sweep(SweepArgs),
    /// Draw one quantity of a finished sweep as an SVG line chart.
    Plot {
        #[arg(long = "in", value_name = "DIR")]
        input: PathBuf,
        /// E_b, delta_E or ergotropy.
        #[arg(long, value_name = "NAME", default_value = "delta_E")]
        quantity: String,
        /// Defaults to <DIR>/<NAME>.svg.
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Parse and check a config without running it.
    Validate {
        #[arg(long, value_name = "FILE")]
        config: PathBuf,
    },
}

#[derive(Args, Debug)]
struct RunFlags {
    /// Keep going (with a warning) when a state loses positivity.
    #[arg(long)]
    allow_nonpositive: bool,
    /// Repeat every run at dt/2 and fail if delta_E moves by more than 1e-5.
    #[arg(long)]
    verify_step: bool,
}

impl RunFlags {
    fn options(&self) -> EvolveOptions {
        EvolveOptions { allow_nonpositive: self.allow_nonpositive, verify_step: self.verify_step }
    }
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[arg(long, value_name = "ID", conflicts_with_all = ["config", "manifest"])]
    preset: Option<String>,
    #[arg(long, value_name = "FILE", requires = "vary", conflicts_with = "manifest")]
    config: Option<PathBuf>,
    /// Re-run exactly what a previous sweep recorded.
    #[arg(long, value_name = "FILE")]
    manifest: Option<PathBuf>,
    /// Parameter to vary with --config (omega_c, omega_a, omega_d, g, J, kappa, N, n, A, T).
    #[arg(long, value_name = "KEY", requires = "config")]
    vary: Option<String>,
    /// Comma-separated values; required with --config, replaces preset defaults.
    #[arg(long, value_name = "LIST", conflicts_with = "manifest")]
    values: Option<String>,
    #[arg(long, value_name = "K", default_value_t = default_jobs())]
    jobs: usize,
    /// Defaults to out/<preset or custom>.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    #[arg(long, value_name = "T", conflicts_with = "manifest")]
    t_max: Option<String>,
    #[arg(long, value_name = "DT", conflicts_with = "manifest")]
    dt: Option<String>,
    #[arg(long, value_name = "STEPS", conflicts_with = "manifest")]
    record_every: Option<String>,
    #[command(flatten)]
    run: RunFlags,
}

fn default_jobs() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

fn parse_values(list: &str) -> Result<Vec<f64>> {
    list.split(',').map(|v| config::parse_real(v).map_err(|msg| Error::Usage(format!("--values: {msg}")))).collect()
}

fn set_override(spec: &mut qbattery::SystemSpec, key: &str, value: &Option<String>) -> Result<()> {
    if let Some(v) = value {
        config::set_key(spec, key, v).map_err(|msg| Error::Usage(format!("--{}: {msg}", key.replace('_', "-"))))?;
    }
    Ok(())
}

fn sweep_plan(args: &SweepArgs) -> Result<SweepPlan> {
    let mut plan = match (&args.preset, &args.config) {
        (Some(id), None) => {
            let mut plan = sweep::preset(id)?;
            if let Some(list) = &args.values {
                plan.values = parse_values(list)?;
                plan.default_values = false;
            }
            plan
        }
        (None, Some(path)) => {
            let base = config::read_config(path)?;
            let vary: SweepParam = args.vary.as_deref().unwrap_or_default().parse()?;
            let list = args.values.as_deref().ok_or_else(|| Error::Usage("--config sweeps need --values".into()))?;
            SweepPlan::new(base, vary, parse_values(list)?, "custom")?
        }
        _ => return Err(Error::Usage("give one of --preset ID, --config FILE or --manifest FILE".into())),
    };
    set_override(&mut plan.base, "t_max", &args.t_max)?;
    set_override(&mut plan.base, "dt", &args.dt)?;
    set_override(&mut plan.base, "record_every", &args.record_every)?;
    Ok(plan)
}

fn summarize(report: &SweepReport) -> i32 {
    let m = &report.manifest;
    println!("{}: {} run(s) over {} -> {}", m.label, m.runs.len(), m.varied, report.out_dir.display());
    for run in &m.runs {
        match &run.status {
            sweep::RunStatus::Ok { samples } => {
                println!("  {} = {}: ok, {samples} samples, {}", m.varied, run.value, run.file)
            }
            sweep::RunStatus::Failed { message, .. } => println!("  {} = {}: FAILED: {message}", m.varied, run.value),
        }
    }
    report.exit_code()
}

fn check_jobs(jobs: usize) -> Result<Execution> {
    if jobs == 0 {
        return Err(Error::Usage("--jobs must be at least 1".into()));
    }
    Ok(Execution::from_jobs(jobs))
}

fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Simulate { config, out, run } => {
            let spec = config::read_config(&config)?;
            let plan = SweepPlan::new(spec.clone(), SweepParam::Coupling, vec![spec.coupling], "simulate")?;
            let report = sweep::run_sweep_with(&plan, &out, Execution::Sequential, &run.options())?;
            Ok(summarize(&report))
        }
        Command::Sweep(args) => {
            let exec = check_jobs(args.jobs)?;
            let report = if let Some(path) = &args.manifest {
                let label = Manifest::read(path)?.label;
                let out = args.out.clone().unwrap_or_else(|| Path::new("out").join(format!("{label}-replay")));
                sweep::replay(path, &out, exec)?
            } else {
                let plan = sweep_plan(&args)?;
                let out = args.out.clone().unwrap_or_else(|| Path::new("out").join(&plan.label));
                sweep::run_sweep_with(&plan, &out, exec, &args.run.options())?
            };
            Ok(summarize(&report))
        }
        Command::Plot { input, quantity, out } => {
            let path = sweep::write_plot(&input, &quantity, out.as_deref())?;
            println!("wrote {}", path.display());
            Ok(0)
        }
        Command::Validate { config } => {
            let spec = config::read_config(&config)?;
            let fact = spec.factorization()?;
            print!("{}", config::emit_config(&spec));
            println!(
                "# ok: dimension {} ({} spin(s) x {} Fock levels), {} steps",
                fact.total_dim(),
                spec.spins,
                spec.cavity_dim(),
                spec.step_count()
            );
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return ExitCode::from(if err.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}

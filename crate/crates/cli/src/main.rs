//! `helios`: train, evaluate and inspect low-thrust guidance policies.
//!
//! Physical units (km, km/s, kg, days) are used in every file this tool reads
//! or writes.

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use helios::astro::Mission;
use helios::config::{worker_threads, RunConfig};
use helios::env::{read_dv_schedule, write_trace_csv, FINAL_TOLERANCE};
use helios::eval::{
    mte_sweep, replay_schedule, run_campaign, summarize, write_episodes_csv, write_sweep_csv, CampaignOptions,
};
use helios::policy::{load_params, PolicyParams, FORMAT_VERSION};
use helios::ppo::train_to_dir;
use helios::uncertainty::Mode;

#[derive(Parser)]
#[command(name = "helios", version, about = "Robust low-thrust Earth-Mars guidance with PPO")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train a policy and write a run directory.
    Train(TrainArgs),
    /// Monte Carlo campaign of a checkpoint under one uncertainty mode.
    Eval(EvalArgs),
    /// Replay an open-loop impulse schedule in the unperturbed environment.
    Propagate(PropagateArgs),
    /// Final mass and constraint violation versus missed-thrust location.
    SweepMte(SweepArgs),
    /// Print the network layout and parameter counts.
    Describe(DescribeArgs),
}

#[derive(Args)]
struct Common {
    /// JSON run configuration; missing fields take their defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Base output directory (defaults to the config's `output_dir`).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TrainArgs {
    #[command(flatten)]
    common: Common,
    /// Override the config seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the config's uncertainty mode.
    #[arg(long, value_parser = parse_mode)]
    mode: Option<Mode>,
}

#[derive(Args)]
struct EvalArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    checkpoint: PathBuf,
    #[arg(long, value_parser = parse_mode, default_value = "unp")]
    mode: Mode,
    #[arg(long, default_value_t = 500)]
    episodes: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Success tolerance on the relative terminal errors.
    #[arg(long, default_value_t = FINAL_TOLERANCE)]
    tolerance: f64,
    /// Sample the Gaussian policy instead of flying its mode.
    #[arg(long)]
    stochastic: bool,
    /// Also write one trajectory CSV per episode.
    #[arg(long)]
    traces: bool,
}

#[derive(Args)]
struct PropagateArgs {
    #[command(flatten)]
    common: Common,
    /// Impulse schedule CSV with header `k,dv_x_km_s,dv_y_km_s,dv_z_km_s`.
    #[arg(long)]
    schedule: PathBuf,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    checkpoint: PathBuf,
    /// Accepted for symmetry with the other commands; the sweep draws no
    /// random numbers.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct DescribeArgs {
    #[arg(long)]
    checkpoint: Option<PathBuf>,
    #[arg(long)]
    config: Option<PathBuf>,
}

fn parse_mode(s: &str) -> Result<Mode, String> {
    s.parse::<Mode>().map_err(|e| e.to_string())
}

fn load_config(path: Option<&Path>) -> Result<RunConfig> {
    match path {
        Some(p) => RunConfig::load(p).with_context(|| format!("loading config {}", p.display())),
        None => Ok(RunConfig::default()),
    }
}

fn base_dir(common: &Common, cfg: &RunConfig) -> PathBuf {
    common.out.clone().unwrap_or_else(|| cfg.output_dir.clone())
}

fn prepare_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))
}

fn checkpoint(path: &Path) -> Result<PolicyParams> {
    load_params(path).with_context(|| format!("loading checkpoint {}", path.display()))
}

fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn cmd_train(args: TrainArgs) -> Result<()> {
    let mut cfg = load_config(args.common.config.as_deref())?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(mode) = args.mode {
        cfg.uncertainty.mode = mode;
    }
    cfg.validate()?;
    let dir = base_dir(&args.common, &cfg).join(format!("train_{}_seed{}", cfg.uncertainty.mode, cfg.seed));
    prepare_dir(&dir)?;
    let report = train_to_dir(&cfg, &dir, worker_threads(cfg.hyper.n_env))?;
    println!("run directory: {}", dir.display());
    println!("updates: {}  steps: {}  best update: {}", report.updates, report.steps, report.best_update);
    println!("{:<8} {:>12} {:>12} {:>12} {:>12}", "policy", "J", "m_f [kg]", "pos_err", "vel_err");
    for (name, r) in [("best", &report.best), ("final", &report.last)] {
        println!(
            "{:<8} {:>12.6} {:>12.2} {:>12.3e} {:>12.3e}",
            name, r.total_return, r.m_f_kg, r.pos_err, r.vel_err
        );
    }
    Ok(())
}

fn cmd_eval(args: EvalArgs) -> Result<()> {
    let cfg = load_config(args.common.config.as_deref())?;
    let params = checkpoint(&args.checkpoint)?;
    if args.episodes == 0 {
        bail!("--episodes must be at least 1");
    }
    let mission = Mission::new(cfg.mission.clone())?;
    let uncertainty = cfg.uncertainty.clone().with_mode(args.mode);
    let options = CampaignOptions {
        stochastic_policy: args.stochastic,
        threads: worker_threads(usize::MAX),
        ..CampaignOptions::default()
    };
    let records = run_campaign(&params, &mission, &uncertainty, args.episodes, args.seed, &options)?;
    let summary = summarize(&records, args.tolerance)?;

    let dir = base_dir(&args.common, &cfg).join(format!("eval_{}_seed{}", args.mode, args.seed));
    prepare_dir(&dir)?;
    write_json(&dir.join("summary.json"), &summary)?;
    let episodes = dir.join("episodes.csv");
    let file = File::create(&episodes).with_context(|| format!("writing {}", episodes.display()))?;
    write_episodes_csv(BufWriter::new(file), &records, args.tolerance)?;
    if args.traces {
        let traces = dir.join("traces");
        prepare_dir(&traces)?;
        for rec in &records {
            let path = traces.join(format!("episode_{:05}.csv", rec.seed.2));
            let file = File::create(&path).with_context(|| format!("writing {}", path.display()))?;
            write_trace_csv(BufWriter::new(file), &rec.rows, &mission.scales)?;
        }
    }

    println!("run directory: {}", dir.display());
    println!(
        "{:<6} {:>10} {:>10} {:>12} {:>12} {:>12} {:>12} {:>8}",
        "mode", "m_f mean", "m_f std", "pos mean", "pos std", "vel mean", "vel std", "SR [%]"
    );
    println!(
        "{:<6} {:>10.2} {:>10.2} {:>12.3e} {:>12.3e} {:>12.3e} {:>12.3e} {:>8.1}",
        args.mode,
        summary.m_f_kg.mean,
        summary.m_f_kg.std,
        summary.pos_err.mean,
        summary.pos_err.std,
        summary.vel_err.mean,
        summary.vel_err.std,
        summary.success_rate
    );
    Ok(())
}

fn cmd_propagate(args: PropagateArgs) -> Result<()> {
    let cfg = load_config(args.common.config.as_deref())?;
    let mission = Mission::new(cfg.mission.clone())?;
    let file = File::open(&args.schedule).with_context(|| format!("opening {}", args.schedule.display()))?;
    let schedule = read_dv_schedule(file, mission.segments, &mission.scales)
        .with_context(|| format!("reading schedule {}", args.schedule.display()))?;
    let record = replay_schedule(&mission, &schedule)?;

    let dir = base_dir(&args.common, &cfg).join("propagate");
    prepare_dir(&dir)?;
    let trace = dir.join("trajectory.csv");
    let file = File::create(&trace).with_context(|| format!("writing {}", trace.display()))?;
    write_trace_csv(BufWriter::new(file), &record.rows, &mission.scales)?;
    write_json(&dir.join("report.json"), &record.report)?;

    let worst = record.report.dv_violations.iter().cloned().fold(0.0, f64::max);
    println!("run directory: {}", dir.display());
    println!("J        {:.9}", record.total_return);
    println!("m_f [kg] {:.4}", record.report.m_f_kg);
    println!("pos_err  {:.6e}", record.report.pos_err);
    println!("vel_err  {:.6e}", record.report.vel_err);
    println!("max e_u  {:.6e}", worst);
    Ok(())
}

fn cmd_sweep(args: SweepArgs) -> Result<()> {
    let cfg = load_config(args.common.config.as_deref())?;
    let params = checkpoint(&args.checkpoint)?;
    let mission = Mission::new(cfg.mission.clone())?;
    let rows = mte_sweep(&params, &mission, 0..mission.segments)?;
    let dir = base_dir(&args.common, &cfg).join(format!("sweep_mte_seed{}", args.seed));
    prepare_dir(&dir)?;
    let path = dir.join("mte_sweep.csv");
    let file = File::create(&path).with_context(|| format!("writing {}", path.display()))?;
    write_sweep_csv(BufWriter::new(file), &rows)?;
    println!("wrote {} rows to {}", rows.len(), path.display());
    Ok(())
}

fn cmd_describe(args: DescribeArgs) -> Result<()> {
    let params = match (&args.checkpoint, &args.config) {
        (Some(path), _) => checkpoint(path)?,
        (None, cfg) => PolicyParams::zeros(&load_config(cfg.as_deref())?.network),
    };
    println!("checkpoint format version: {FORMAT_VERSION}");
    println!("{params}");
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Train(a) => cmd_train(a),
        Command::Eval(a) => cmd_eval(a),
        Command::Propagate(a) => cmd_propagate(a),
        Command::SweepMte(a) => cmd_sweep(a),
        Command::Describe(a) => cmd_describe(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use golfopt_cli::commands::{self, MetricsRecord};
use golfopt_cli::serve::{serve, Artifacts};
use golfopt_cli::{CliError, PipelineConfig};

#[derive(Parser)]
#[command(
    name = "golfopt",
    version,
    about = "Shot-pattern inference and hole strategy optimisation"
)]
struct Cli {
    /// TOML pipeline configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Number of aiming directions.
    #[arg(long, global = true)]
    directions: Option<usize>,
    /// Spacing of target distances, inches.
    #[arg(long, global = true)]
    distance_step: Option<f64>,
    /// Realizations per action.
    #[arg(long, global = true)]
    realizations: Option<usize>,
    /// Value iteration stopping threshold.
    #[arg(long, global = true)]
    epsilon: Option<f64>,
    /// Length of the data window, months.
    #[arg(long, global = true)]
    months: Option<u32>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Infer a player profile from a shot-trace CSV.
    Ingest {
        csv: PathBuf,
        #[arg(long)]
        player: Option<String>,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Build and solve a hole for a profile, writing the strategy booklet.
    Solve {
        hole: PathBuf,
        profile: PathBuf,
        /// Defaults to the hole file name.
        #[arg(long)]
        hole_id: Option<String>,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Play holes under a booklet and write a metrics table.
    Simulate {
        hole: PathBuf,
        profile: PathBuf,
        booklet: PathBuf,
        #[arg(short, long, default_value_t = 10_000)]
        n: usize,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Rank players from metrics tables.
    Leaderboard {
        #[arg(required = true)]
        metrics: Vec<PathBuf>,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Serve holes, profiles and booklets over HTTP.
    Serve {
        #[arg(long)]
        courses: Option<PathBuf>,
        #[arg(long)]
        policies: Option<PathBuf>,
        #[arg(long, default_value = "127.0.0.1:8080")]
        bind: String,
    },
}

fn config(cli: &Cli) -> Result<PipelineConfig, CliError> {
    let mut cfg = match &cli.config {
        Some(p) => PipelineConfig::load(p)?,
        None => PipelineConfig::default(),
    };
    if let Some(v) = cli.seed {
        cfg.seed = v;
    }
    if let Some(v) = cli.directions {
        cfg.discretization.n_directions = v;
    }
    if let Some(v) = cli.distance_step {
        cfg.discretization.distance_step = v;
    }
    if let Some(v) = cli.realizations {
        cfg.discretization.realizations = v;
    }
    if let Some(v) = cli.epsilon {
        cfg.epsilon = v;
    }
    if let Some(v) = cli.months {
        cfg.months = v;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::user(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let cfg = config(&cli)?;
    match cli.command {
        Command::Ingest { csv, player, out } => {
            let (profile, report) = commands::ingest(&csv, player.as_deref(), &cfg)?;
            eprintln!(
                "{}: {} records, {} in window, {} for the player",
                report.player_id, report.records, report.in_window, report.player_records
            );
            for (surface, (extracted, kept)) in &report.summary.kept {
                eprintln!(
                    "  {:<8} {extracted} pairs, {kept} kept, {} dropped",
                    surface.as_str(),
                    extracted - kept
                );
            }
            let d = &report.summary.extract;
            eprintln!(
                "  {} putts, {} tee groups used, {} discarded, {} degenerate shots",
                report.summary.putts, d.tee_groups_used, d.discarded_tee_groups, d.degenerate_shots
            );
            emit(out.as_deref(), &profile.to_json())
        }
        Command::Solve {
            hole,
            profile,
            hole_id,
            out,
        } => {
            let raster = commands::load_hole(&hole)?;
            let prof = commands::load_profile(&profile)?;
            let id = hole_id.unwrap_or_else(|| commands::hole_id(&hole));
            let (booklet, stats) = commands::solve(&raster, &prof, &id, &cfg)?;
            eprintln!(
                "{} states, {} actions, {} transitions; {} iterations, residual {:.2e}; build {:.2}s, solve {:.2}s; tee value {:.4}",
                stats.states,
                stats.actions,
                stats.transitions,
                stats.iterations,
                stats.residual,
                stats.build_secs,
                stats.solve_secs,
                stats.tee_value
            );
            emit(out.as_deref(), &booklet.to_json())
        }
        Command::Simulate {
            hole,
            profile,
            booklet,
            n,
            out,
        } => {
            let raster = commands::load_hole(&hole)?;
            let prof = commands::load_profile(&profile)?;
            let book = commands::load_booklet(&booklet)?;
            let m = commands::simulate(&raster, &prof, &book, n, cfg.seed, &cfg)?;
            eprintln!(
                "{}: {:.3} ± {:.3} over {} holes",
                prof.player_id, m.score, m.score_std_error, m.holes
            );
            emit(
                out.as_deref(),
                &commands::metrics_csv(&[MetricsRecord::new(&prof.player_id, &m)]),
            )
        }
        Command::Leaderboard { metrics, out } => emit(out.as_deref(), &commands::leaderboard_from(&metrics)?),
        Command::Serve {
            courses,
            policies,
            bind,
        } => {
            let courses = courses
                .or(cfg.paths.courses.clone())
                .ok_or_else(|| CliError::user("no course directory; pass --courses"))?;
            let policies = policies
                .or(cfg.paths.policies.clone())
                .ok_or_else(|| CliError::user("no policy directory; pass --policies"))?;
            let artifacts = Artifacts::load(&courses, &policies)?;
            let (h, p, b) = artifacts.counts();
            eprintln!("serving {h} holes, {p} profiles, {b} booklets on {bind}");
            let rt = tokio::runtime::Runtime::new().map_err(|e| CliError::internal(e.to_string()))?;
            rt.block_on(serve(artifacts, &bind))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

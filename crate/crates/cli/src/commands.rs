//! The pipeline steps behind each subcommand. Every step is a pure function
//! of its inputs and the configured seed.

use std::collections::BTreeSet;
use std::fs::File;
use std::path::Path;
use std::time::Instant;

use golfopt_core::builder::{build_instance, Booklet, BuildError, BuiltHole, LadderSampler};
use golfopt_core::course::HoleRaster;
use golfopt_core::metrics::{
    leaderboard, leaderboard_csv, simulate_hole, MetricsAccumulator, MetricsError, RoundMetrics,
};
use golfopt_core::seeding::rng_for;
use golfopt_core::skills::{build_profile, extract_putts, filter_window, read_records_csv, IngestSummary, ProfileFile};
use golfopt_core::ssp::{evaluate_policy, value_iteration};
use serde::{Deserialize, Serialize};

use crate::config::PipelineConfig;
use crate::error::CliError;

pub fn read_text(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::user(format!("cannot read {}: {e}", path.display())))
}

pub fn load_hole(path: &Path) -> Result<HoleRaster, CliError> {
    HoleRaster::parse(&read_text(path)?).map_err(|e| CliError::user(format!("{}: {e}", path.display())))
}

pub fn load_profile(path: &Path) -> Result<ProfileFile, CliError> {
    ProfileFile::from_json(&read_text(path)?).map_err(|e| CliError::user(format!("{}: {e}", path.display())))
}

pub fn load_booklet(path: &Path) -> Result<Booklet, CliError> {
    serde_json::from_str(&read_text(path)?).map_err(|e| CliError::user(format!("{}: {e}", path.display())))
}

/// Hole id of a raster file: its file name without extension.
pub fn hole_id(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}

#[derive(Debug, Clone, Serialize)]
pub struct IngestReport {
    pub player_id: String,
    pub records: usize,
    pub in_window: usize,
    pub player_records: usize,
    pub reference_date: Option<chrono::NaiveDate>,
    pub summary: IngestSummary,
}

/// Infers `player`'s profile from a trace CSV. Putting buckets the player
/// lacks are filled from every player in the file. Without `player` the
/// file must hold a single player.
pub fn ingest(
    csv_path: &Path,
    player: Option<&str>,
    cfg: &PipelineConfig,
) -> Result<(ProfileFile, IngestReport), CliError> {
    let file = File::open(csv_path).map_err(|e| CliError::user(format!("cannot read {}: {e}", csv_path.display())))?;
    let records = read_records_csv(file).map_err(|e| CliError::user(format!("{}: {e}", csv_path.display())))?;
    let player_id = match player {
        Some(p) => p.to_string(),
        None => {
            let ids: BTreeSet<&str> = records.iter().map(|r| r.player_id.as_str()).collect();
            if ids.len() > 1 {
                return Err(CliError::user(format!(
                    "{} holds {} players, pick one with --player",
                    csv_path.display(),
                    ids.len()
                )));
            }
            ids.into_iter().next().unwrap_or_default().to_string()
        }
    };
    let reference = cfg.reference_date.or_else(|| records.iter().map(|r| r.date).max());
    let window = match reference {
        Some(d) => filter_window(&records, d, cfg.months),
        None => Vec::new(),
    };
    let own: Vec<_> = window.iter().filter(|r| r.player_id == player_id).cloned().collect();
    let pooled = extract_putts(&window);
    let disc = &cfg.discretization;
    let (profile, summary) = build_profile(
        &player_id,
        &own,
        &pooled,
        disc.distance_step,
        disc.realizations,
        cfg.seed,
    )
    .map_err(|e| CliError::user(format!("{player_id}: {e}")))?;
    let report = IngestReport {
        player_id,
        records: records.len(),
        in_window: window.len(),
        player_records: own.len(),
        reference_date: reference,
        summary,
    };
    Ok((profile, report))
}

#[derive(Debug, Clone, Serialize)]
pub struct SolveStats {
    pub states: usize,
    pub actions: usize,
    pub transitions: usize,
    pub iterations: usize,
    pub residual: f64,
    pub tee_value: f64,
    pub build_secs: f64,
    pub solve_secs: f64,
}

fn build_error(e: BuildError) -> CliError {
    match e {
        BuildError::Ssp(_) => CliError::internal(e.to_string()),
        _ => CliError::user(e.to_string()),
    }
}

pub fn build(raster: &HoleRaster, profile: &ProfileFile, cfg: &PipelineConfig) -> Result<BuiltHole, CliError> {
    build_instance(
        raster,
        &LadderSampler::new(profile),
        &profile.putting,
        &cfg.discretization,
        cfg.seed,
    )
    .map_err(build_error)
}

/// Builds and solves the model. Booklet values are the exact values of the
/// returned policy rather than the last value-iteration sweep.
pub fn solve(
    raster: &HoleRaster,
    profile: &ProfileFile,
    hole_id: &str,
    cfg: &PipelineConfig,
) -> Result<(Booklet, SolveStats), CliError> {
    let t = Instant::now();
    let built = build(raster, profile, cfg)?;
    let build_secs = t.elapsed().as_secs_f64();
    let t = Instant::now();
    let sol =
        value_iteration(&built.instance, cfg.epsilon, cfg.max_iters).map_err(|e| CliError::internal(e.to_string()))?;
    let values = evaluate_policy(&built.instance, &sol.policy).map_err(|e| CliError::internal(e.to_string()))?;
    let solve_secs = t.elapsed().as_secs_f64();
    let booklet = built.booklet(&profile.player_id, hole_id, &values, &sol.policy);
    let stats = SolveStats {
        states: built.instance.n_states(),
        actions: built.instance.n_actions(),
        transitions: built.instance.n_transitions(),
        iterations: sol.iterations,
        residual: sol.residual,
        tee_value: booklet.tee_value,
        build_secs,
        solve_secs,
    };
    Ok((booklet, stats))
}

/// Plays `n` holes under the booklet's strategy. Hole `i` draws from its
/// own stream derived from `seed` and `i`.
pub fn simulate(
    raster: &HoleRaster,
    profile: &ProfileFile,
    booklet: &Booklet,
    n: usize,
    seed: u64,
    cfg: &PipelineConfig,
) -> Result<RoundMetrics, CliError> {
    if n == 0 {
        return Err(CliError::user(MetricsError::EmptyTraces.to_string()));
    }
    let cfg = PipelineConfig {
        discretization: booklet.discretization,
        ..cfg.clone()
    };
    let built = build(raster, profile, &cfg)?;
    let policy = built
        .policy_from_booklet(booklet)
        .map_err(|e| CliError::user(e.to_string()))?;
    let mut acc = MetricsAccumulator::default();
    for i in 0..n {
        let mut rng = rng_for(seed, &[i as u64]);
        let trace =
            simulate_hole(&built, &policy, &profile.putting, &mut rng).map_err(|e| CliError::user(e.to_string()))?;
        acc.add(&trace, raster);
    }
    acc.finish().map_err(|e| CliError::internal(e.to_string()))
}

/// One line of a metrics table. Rates are fractions, lengths in yards.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsRecord {
    pub player_id: String,
    pub holes: usize,
    pub score: f64,
    pub score_std_error: f64,
    pub drive_yd: f64,
    pub fairway_pct: f64,
    pub miss_left_pct: f64,
    pub miss_right_pct: f64,
    pub miss_other_pct: f64,
    pub gir_pct: f64,
    pub dist_to_pin_yd: f64,
    pub water_pct: f64,
    pub bunker_pct: f64,
}

impl MetricsRecord {
    pub fn new(player_id: &str, m: &RoundMetrics) -> Self {
        Self {
            player_id: player_id.to_string(),
            holes: m.holes,
            score: m.score,
            score_std_error: m.score_std_error,
            drive_yd: m.drive_yd,
            fairway_pct: m.fairway_pct,
            miss_left_pct: m.miss_left_pct,
            miss_right_pct: m.miss_right_pct,
            miss_other_pct: m.miss_other_pct,
            gir_pct: m.gir_pct,
            dist_to_pin_yd: m.dist_to_pin_yd,
            water_pct: m.water_pct,
            bunker_pct: m.bunker_pct,
        }
    }

    pub fn metrics(&self) -> RoundMetrics {
        RoundMetrics {
            holes: self.holes,
            score: self.score,
            score_std_error: self.score_std_error,
            drive_yd: self.drive_yd,
            fairway_pct: self.fairway_pct,
            miss_left_pct: self.miss_left_pct,
            miss_right_pct: self.miss_right_pct,
            miss_other_pct: self.miss_other_pct,
            gir_pct: self.gir_pct,
            dist_to_pin_yd: self.dist_to_pin_yd,
            water_pct: self.water_pct,
            bunker_pct: self.bunker_pct,
        }
    }
}

pub fn metrics_csv(records: &[MetricsRecord]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in records {
        w.serialize(r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf8")
}

pub fn read_metrics_csv(path: &Path) -> Result<Vec<MetricsRecord>, CliError> {
    let bad = |e: csv::Error| CliError::user(format!("{}: {e}", path.display()));
    let mut rdr = csv::Reader::from_path(path).map_err(bad)?;
    rdr.deserialize().collect::<Result<Vec<_>, _>>().map_err(bad)
}

/// Merges metrics tables into one leaderboard.
pub fn leaderboard_from(paths: &[impl AsRef<Path>]) -> Result<String, CliError> {
    let mut players = Vec::new();
    for p in paths {
        for r in read_metrics_csv(p.as_ref())? {
            players.push((r.player_id.clone(), r.metrics()));
        }
    }
    if players.is_empty() {
        return Err(CliError::user("no metrics rows to rank"));
    }
    Ok(leaderboard_csv(&leaderboard(players)))
}

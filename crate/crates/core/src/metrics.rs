//! Monte Carlo play of a hole under a fixed policy and the per-player
//! statistics derived from it.

use std::io::Read;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::builder::{ActionKind, BuiltHole};
use crate::course::{HoleRaster, SurfaceCode};
use crate::geometry::{CanonicalFrame, CellCoord};
use crate::simulator::ShotEvent;
use crate::skills::{PuttingModel, SkillsError};
use crate::ssp::Policy;

/// Hard cap on full shots per hole.
pub const MAX_SHOTS_PER_HOLE: usize = 30;
pub const INCHES_PER_YARD: f64 = 36.0;

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("no green after {shots} shots; the policy is improper or the model degenerate")]
    SimulationRunaway { shots: usize },
    #[error("no traces to summarise")]
    EmptyTraces,
    #[error(transparent)]
    Skills(#[from] SkillsError),
    #[error("leaderboard csv: {0}")]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceShot {
    pub from: CellCoord,
    pub surface: SurfaceCode,
    pub action: usize,
    pub to: CellCoord,
    pub event: ShotEvent,
    pub penalty: u8,
    /// Signed offset of the resting cell from the aim line (positive right).
    pub lateral_in: f64,
    /// Straight-line distance from the start to the resting cell.
    pub advance_in: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HoleTrace {
    pub shots: Vec<TraceShot>,
    pub putt_count: u8,
    /// Distance to the pin on first reaching the green.
    pub green_distance_in: f64,
    pub score: u32,
}

impl HoleTrace {
    pub fn penalties(&self) -> u32 {
        self.shots.iter().map(|s| s.penalty as u32).sum()
    }

    /// Strokes taken before the first putt, penalties included.
    pub fn strokes_to_green(&self) -> u32 {
        self.shots.len() as u32 + self.penalties()
    }
}

/// Plays the hole from the tee until the ball rests on the green, then
/// samples the number of putts.
pub fn simulate_hole<R: Rng + ?Sized>(
    built: &BuiltHole,
    policy: &Policy,
    putting: &PuttingModel,
    rng: &mut R,
) -> Result<HoleTrace, MetricsError> {
    let raster = &built.raster;
    let r = built.realizations() as u32;
    let mut state = built.tee_state();
    let mut shots = Vec::new();
    loop {
        let cell = built.cell(state);
        let surface = raster.surface(cell);
        if surface == SurfaceCode::Green {
            let distance = raster.distance_to_pin(cell);
            let p = putting.distribution(distance)?;
            let u: f64 = rng.random();
            let putt_count = if u < p[0] {
                1
            } else if u < p[0] + p[1] {
                2
            } else {
                3
            };
            let mut trace = HoleTrace {
                shots,
                putt_count,
                green_distance_in: distance,
                score: 0,
            };
            trace.score = trace.strokes_to_green() + putt_count as u32;
            return Ok(trace);
        }
        if shots.len() >= MAX_SHOTS_PER_HOLE {
            return Err(MetricsError::SimulationRunaway { shots: shots.len() });
        }
        let action = policy.action(state);
        let ActionKind::Shot(spec) = built.actions[action] else {
            unreachable!("hole-out actions exist only on the green");
        };
        let mut pick = rng.random_range(0..r);
        let class = built
            .outcomes(action)
            .iter()
            .find(|c| {
                if pick < c.count as u32 {
                    true
                } else {
                    pick -= c.count as u32;
                    false
                }
            })
            .expect("outcome counts sum to the realization count");
        let to = built.cell(class.state as usize);
        let origin = raster.center(cell);
        let frame = CanonicalFrame::aimed(
            origin,
            built.discretization.angle(spec.direction_index as usize),
            spec.target_distance,
        );
        let rest = raster.center(to);
        shots.push(TraceShot {
            from: cell,
            surface,
            action,
            to,
            event: class.event,
            penalty: class.event.penalty(),
            lateral_in: frame.to_canonical(rest).x,
            advance_in: origin.distance(&rest),
        });
        state = class.state as usize;
    }
}

/// Per-player statistics in the units of the leaderboard: distances in
/// yards, rates as fractions in `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundMetrics {
    pub holes: usize,
    pub score: f64,
    pub score_std_error: f64,
    pub drive_yd: f64,
    pub fairway_pct: f64,
    pub miss_left_pct: f64,
    pub miss_right_pct: f64,
    /// Tee shots stopped by trees, dropped from water or returned from OOB.
    pub miss_other_pct: f64,
    pub gir_pct: f64,
    pub dist_to_pin_yd: f64,
    pub water_pct: f64,
    pub bunker_pct: f64,
}

/// Running sums behind [`RoundMetrics`]. Merging is associative, so holes
/// and players can be reduced in any order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MetricsAccumulator {
    holes: usize,
    score_sum: f64,
    score_sq_sum: f64,
    tee_shots: usize,
    drive_sum_in: f64,
    fairways: usize,
    left: usize,
    right: usize,
    other: usize,
    gir: usize,
    green_dist_sum_in: f64,
    shots: usize,
    water: usize,
    bunker: usize,
}

impl MetricsAccumulator {
    pub fn add(&mut self, trace: &HoleTrace, raster: &HoleRaster) {
        let score = trace.score as f64;
        self.holes += 1;
        self.score_sum += score;
        self.score_sq_sum += score * score;
        self.green_dist_sum_in += trace.green_distance_in;
        if trace.strokes_to_green() + 2 <= raster.par() as u32 {
            self.gir += 1;
        }
        self.shots += trace.shots.len();
        for shot in &trace.shots {
            self.water += (shot.event == ShotEvent::WaterDrop) as usize;
            self.bunker += (shot.surface == SurfaceCode::Bunker) as usize;
        }
        if raster.par() >= 4 {
            if let Some(tee) = trace.shots.first() {
                self.tee_shots += 1;
                self.drive_sum_in += tee.advance_in;
                if raster.surface(tee.to) == SurfaceCode::Fairway {
                    self.fairways += 1;
                } else if tee.event != ShotEvent::Clean {
                    self.other += 1;
                } else if tee.lateral_in < 0.0 {
                    self.left += 1;
                } else {
                    self.right += 1;
                }
            }
        }
    }

    pub fn merge(&mut self, other: &MetricsAccumulator) {
        self.holes += other.holes;
        self.score_sum += other.score_sum;
        self.score_sq_sum += other.score_sq_sum;
        self.tee_shots += other.tee_shots;
        self.drive_sum_in += other.drive_sum_in;
        self.fairways += other.fairways;
        self.left += other.left;
        self.right += other.right;
        self.other += other.other;
        self.gir += other.gir;
        self.green_dist_sum_in += other.green_dist_sum_in;
        self.shots += other.shots;
        self.water += other.water;
        self.bunker += other.bunker;
    }

    pub fn finish(&self) -> Result<RoundMetrics, MetricsError> {
        if self.holes == 0 {
            return Err(MetricsError::EmptyTraces);
        }
        let ratio = |a: usize, b: usize| if b == 0 { 0.0 } else { a as f64 / b as f64 };
        let n = self.holes as f64;
        let mean = self.score_sum / n;
        let var = if self.holes > 1 {
            ((self.score_sq_sum - n * mean * mean) / (n - 1.0)).max(0.0)
        } else {
            0.0
        };
        Ok(RoundMetrics {
            holes: self.holes,
            score: mean,
            score_std_error: (var / n).sqrt(),
            drive_yd: if self.tee_shots == 0 {
                0.0
            } else {
                self.drive_sum_in / self.tee_shots as f64 / INCHES_PER_YARD
            },
            fairway_pct: ratio(self.fairways, self.tee_shots),
            miss_left_pct: ratio(self.left, self.tee_shots),
            miss_right_pct: ratio(self.right, self.tee_shots),
            miss_other_pct: ratio(self.other, self.tee_shots),
            gir_pct: ratio(self.gir, self.holes),
            dist_to_pin_yd: self.green_dist_sum_in / n / INCHES_PER_YARD,
            water_pct: ratio(self.water, self.shots),
            bunker_pct: ratio(self.bunker, self.shots),
        })
    }
}

/// Statistics of `traces`, all played on `raster`.
pub fn compute_metrics(traces: &[HoleTrace], raster: &HoleRaster) -> Result<RoundMetrics, MetricsError> {
    let mut acc = MetricsAccumulator::default();
    for t in traces {
        acc.add(t, raster);
    }
    acc.finish()
}

#[derive(Debug, Clone, PartialEq)]
pub struct LeaderboardRow {
    pub player_id: String,
    pub first: String,
    pub last: String,
    pub metrics: RoundMetrics,
}

/// Splits `"first_last"` / `"first last"` ids; ids without a separator keep
/// an empty last name.
pub fn split_name(player_id: &str) -> (String, String) {
    match player_id.split_once(['_', ' ']) {
        Some((f, l)) => (f.to_string(), l.replace('_', " ")),
        None => (player_id.to_string(), String::new()),
    }
}

/// Rows sorted by mean score, ties by player id.
pub fn leaderboard(players: Vec<(String, RoundMetrics)>) -> Vec<LeaderboardRow> {
    let mut rows: Vec<LeaderboardRow> = players
        .into_iter()
        .map(|(player_id, metrics)| {
            let (first, last) = split_name(&player_id);
            LeaderboardRow {
                player_id,
                first,
                last,
                metrics,
            }
        })
        .collect();
    rows.sort_by(|a, b| {
        a.metrics
            .score
            .total_cmp(&b.metrics.score)
            .then_with(|| a.player_id.cmp(&b.player_id))
    });
    rows
}

pub const LEADERBOARD_HEADER: [&str; 11] = [
    "first", "last", "score", "drive", "fairway", "L", "R", "GiR", "dist", "water", "bunker",
];

/// CSV with the leaderboard column set. Rates are written as percentages.
pub fn leaderboard_csv(rows: &[LeaderboardRow]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(LEADERBOARD_HEADER).expect("in-memory write");
    for r in rows {
        let m = &r.metrics;
        let pct = |v: f64| format!("{:.2}", 100.0 * v);
        w.write_record([
            r.first.clone(),
            r.last.clone(),
            format!("{:.3}", m.score),
            format!("{:.2}", m.drive_yd),
            pct(m.fairway_pct),
            pct(m.miss_left_pct),
            pct(m.miss_right_pct),
            pct(m.gir_pct),
            format!("{:.2}", m.dist_to_pin_yd),
            pct(m.water_pct),
            pct(m.bunker_pct),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf8")
}

/// Rows of a leaderboard CSV as `(first, last, score)` plus the raw fields,
/// for merging tables produced separately.
pub fn read_leaderboard_csv<R: Read>(reader: R) -> Result<Vec<Vec<String>>, MetricsError> {
    let mut rdr = csv::Reader::from_reader(reader);
    let mut out = Vec::new();
    for rec in rdr.records() {
        out.push(rec?.iter().map(str::to_string).collect());
    }
    Ok(out)
}

//! Synthetic players and holes with known parameters.
//!
//! Players hit bivariate normal errors whose standard deviations grow
//! linearly with the target distance. Holes are a fairway corridor from a
//! tee to a round green, inside a rough field ringed by out of bounds, with
//! optional hazard blobs.

use std::collections::BTreeMap;

use chrono::{Duration, NaiveDate};
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::course::{validate_hole, CourseError, HoleRaster, SurfaceCode};
use crate::geometry::{CanonicalFrame, CellCoord, Point2};
use crate::skills::putting::{BUCKET_UPPER_M, MAX_PUTT_DISTANCE_IN, N_BUCKETS};
use crate::skills::{PuttingModel, ShotRecord, Surface, INCHES_PER_METER};

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("no valid hole after {attempts} attempts")]
    GenerationFailed { attempts: u32 },
    #[error(transparent)]
    Course(#[from] CourseError),
}

/// Ground truth for one synthetic player.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticPlayerParams {
    pub player_id: String,
    /// Lateral standard deviation as a fraction of the target distance.
    pub lateral_sigma_ratio: f64,
    /// Longitudinal standard deviation as a fraction of the target distance.
    pub distance_sigma_ratio: f64,
    pub rough_multiplier: f64,
    pub bunker_multiplier: f64,
    pub max_target: BTreeMap<Surface, f64>,
    /// Targets are drawn from multiples of this step up to the surface
    /// maximum, like the fixed distances of a launch monitor session.
    /// Zero draws targets uniformly from `[target_step_min, max]` instead.
    pub target_step: f64,
    pub target_step_min: f64,
    /// Putt count probabilities at the bucket midpoints.
    pub putting: [[f64; 3]; N_BUCKETS],
    pub reference_date: NaiveDate,
}

impl SyntheticPlayerParams {
    /// A tour-level player.
    pub fn tour_player(player_id: &str) -> Self {
        let max_target = BTreeMap::from([
            (Surface::Tee, 11000.0),
            (Surface::Fairway, 9000.0),
            (Surface::Rough, 7500.0),
            (Surface::Bunker, 4000.0),
        ]);
        Self {
            player_id: player_id.to_string(),
            lateral_sigma_ratio: 0.05,
            distance_sigma_ratio: 0.03,
            rough_multiplier: 1.3,
            bunker_multiplier: 1.6,
            max_target,
            target_step: 500.0,
            target_step_min: 500.0,
            putting: [
                [0.99, 0.01, 0.0],
                [0.95, 0.05, 0.0],
                [0.75, 0.24, 0.01],
                [0.45, 0.53, 0.02],
                [0.18, 0.78, 0.04],
                [0.06, 0.86, 0.08],
                [0.02, 0.82, 0.16],
            ],
            reference_date: NaiveDate::from_ymd_opt(2024, 6, 30).expect("valid date"),
        }
    }

    pub fn validate(&self) -> Result<(), SynthError> {
        let bad = |m: String| Err(SynthError::InvalidParams(m));
        for (name, v) in [
            ("lateral_sigma_ratio", self.lateral_sigma_ratio),
            ("distance_sigma_ratio", self.distance_sigma_ratio),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return bad(format!("{name} = {v}"));
            }
        }
        if !(self.rough_multiplier >= 1.0 && self.bunker_multiplier >= 1.0) {
            return bad("surface multipliers must be at least 1".into());
        }
        for s in Surface::SHOT_SURFACES {
            match self.max_target.get(&s) {
                Some(m) if *m > 0.0 && *m >= self.target_step_min => {}
                other => return bad(format!("max target for {s:?}: {other:?}")),
            }
        }
        if !(self.target_step >= 0.0 && self.target_step_min > 0.0) {
            return bad("target step must be non-negative and its minimum positive".into());
        }
        self.putting_model().map(|_| ())
    }

    pub fn putting_model(&self) -> Result<PuttingModel, SynthError> {
        PuttingModel::from_probabilities(self.putting).map_err(|e| SynthError::InvalidParams(e.to_string()))
    }

    /// `(σx, σy)` for a shot of `distance` from `surface`.
    pub fn sigmas(&self, surface: Surface, distance: f64) -> (f64, f64) {
        let m = match surface {
            Surface::Rough => self.rough_multiplier,
            Surface::Bunker => self.bunker_multiplier,
            _ => 1.0,
        };
        (
            m * self.lateral_sigma_ratio * distance,
            m * self.distance_sigma_ratio * distance,
        )
    }

    fn draw_target<R: Rng + ?Sized>(&self, surface: Surface, rng: &mut R) -> f64 {
        let max = self.max_target[&surface];
        if self.target_step > 0.0 {
            let lo = (self.target_step_min / self.target_step).ceil().max(1.0) as u64;
            let hi = ((max / self.target_step) + 1e-9).floor() as u64;
            rng.random_range(lo..=hi.max(lo)) as f64 * self.target_step
        } else {
            rng.random_range(self.target_step_min..=max)
        }
    }
}

#[derive(Debug, Clone)]
pub struct SyntheticTraces {
    pub records: Vec<ShotRecord>,
    pub params: SyntheticPlayerParams,
}

struct Ids {
    tournament: u32,
    round: u8,
    hole: u8,
}

impl Ids {
    fn next_hole(&mut self) {
        self.hole += 1;
        if self.hole > 18 {
            self.hole = 1;
            self.round += 1;
            if self.round > 4 {
                self.round = 1;
                self.tournament += 1;
            }
        }
    }
}

fn record(
    params: &SyntheticPlayerParams,
    ids: &Ids,
    shot_number: u32,
    surface: Surface,
    start: Point2,
    end: Point2,
    pin: Point2,
    date: NaiveDate,
) -> ShotRecord {
    ShotRecord {
        player_id: params.player_id.clone(),
        tournament_id: format!("T{:04}", ids.tournament),
        round: ids.round,
        hole: ids.hole,
        shot_number,
        surface,
        start_x: start.x,
        start_y: start.y,
        end_x: end.x,
        end_y: end.y,
        pin_x: pin.x,
        pin_y: pin.y,
        date,
    }
}

fn error_draw<R: Rng + ?Sized>(sigma: f64, rng: &mut R) -> f64 {
    if sigma == 0.0 {
        0.0
    } else {
        Normal::new(0.0, sigma).expect("finite sigma").sample(rng)
    }
}

fn random_date<R: Rng + ?Sized>(params: &SyntheticPlayerParams, rng: &mut R) -> NaiveDate {
    params.reference_date - Duration::days(rng.random_range(0..330))
}

fn random_frame<R: Rng + ?Sized>(distance: f64, rng: &mut R) -> CanonicalFrame {
    let origin = Point2::new(rng.random_range(0.0..100_000.0), rng.random_range(0.0..100_000.0));
    CanonicalFrame::aimed(origin, rng.random_range(0.0..std::f64::consts::TAU), distance)
}

/// `n` shots from a non-tee `surface` aimed at the pin.
pub fn generate_surface_shots<R: Rng + ?Sized>(
    params: &SyntheticPlayerParams,
    surface: Surface,
    n: usize,
    rng: &mut R,
) -> Vec<ShotRecord> {
    assert!(matches!(surface, Surface::Fairway | Surface::Rough | Surface::Bunker));
    let mut ids = Ids {
        tournament: 1,
        round: 1,
        hole: 1,
    };
    (0..n)
        .map(|_| {
            let d = params.draw_target(surface, rng);
            let (sx, sy) = params.sigmas(surface, d);
            let frame = random_frame(d, rng);
            let end = frame.from_canonical(Point2::new(error_draw(sx, rng), d + error_draw(sy, rng)));
            let rec = record(
                params,
                &ids,
                2,
                surface,
                frame.origin(),
                end,
                frame.target(),
                random_date(params, rng),
            );
            ids.next_hole();
            rec
        })
        .collect()
}

/// Tee shots in groups of four rounds per (tournament, hole). Tee markers
/// move by less than a metre between rounds.
pub fn generate_tee_shots<R: Rng + ?Sized>(
    params: &SyntheticPlayerParams,
    groups: usize,
    rng: &mut R,
) -> Vec<ShotRecord> {
    let mut out = Vec::with_capacity(4 * groups);
    for g in 0..groups {
        let d = params.draw_target(Surface::Tee, rng);
        let (sx, sy) = params.sigmas(Surface::Tee, d);
        let base = random_frame(d, rng);
        let target = base.target();
        let date = random_date(params, rng);
        for round in 1..=4u8 {
            let jitter = Point2::new(
                rng.random_range(-0.5..0.5) * INCHES_PER_METER,
                rng.random_range(-0.5..0.5) * INCHES_PER_METER,
            );
            let tee = base.origin() + jitter;
            let frame = CanonicalFrame::new(tee, target).expect("tee away from target");
            let dist = frame.distance();
            let end = frame.from_canonical(Point2::new(error_draw(sx, rng), dist + error_draw(sy, rng)));
            let ids = Ids {
                tournament: 1 + (g / 18) as u32,
                round,
                hole: 1 + (g % 18) as u8,
            };
            out.push(record(
                params,
                &ids,
                1,
                Surface::Tee,
                tee,
                end,
                target,
                date + Duration::days(round as i64 - 1),
            ));
        }
    }
    out
}

/// `holes` putting sequences. The first putt distance picks a bucket
/// uniformly, then a distance uniformly inside it.
pub fn generate_putts<R: Rng + ?Sized>(
    params: &SyntheticPlayerParams,
    holes: usize,
    rng: &mut R,
) -> Result<Vec<ShotRecord>, SynthError> {
    let model = params.putting_model()?;
    let mut edges = vec![0.0];
    edges.extend(BUCKET_UPPER_M.iter().map(|m| m * INCHES_PER_METER));
    edges.push(MAX_PUTT_DISTANCE_IN);
    let mut ids = Ids {
        tournament: 1,
        round: 1,
        hole: 1,
    };
    let mut out = Vec::new();
    for _ in 0..holes {
        let b = rng.random_range(0..N_BUCKETS);
        let d = rng.random_range(edges[b]..edges[b + 1]).max(1.0);
        let p = model
            .distribution(d)
            .map_err(|e| SynthError::InvalidParams(e.to_string()))?;
        let u: f64 = rng.random();
        let putts = if u < p[0] {
            1
        } else if u < p[0] + p[1] {
            2
        } else {
            3
        };
        let frame = random_frame(d, rng);
        let pin = frame.target();
        let date = random_date(params, rng);
        let mut remaining = d;
        for k in 0..putts {
            let start = frame.from_canonical(Point2::new(0.0, d - remaining));
            remaining = if k + 1 == putts { 0.0 } else { remaining * 0.1 };
            let end = frame.from_canonical(Point2::new(0.0, d - remaining));
            out.push(record(params, &ids, 3 + k, Surface::Green, start, end, pin, date));
        }
        ids.next_hole();
    }
    Ok(out)
}

/// About `n_shots` full shots split evenly over tee (in groups of four),
/// fairway, rough and bunker, plus `n_shots / 4` putting sequences.
pub fn generate_traces<R: Rng + ?Sized>(
    params: &SyntheticPlayerParams,
    n_shots: usize,
    rng: &mut R,
) -> Result<SyntheticTraces, SynthError> {
    params.validate()?;
    if n_shots == 0 {
        return Err(SynthError::InvalidParams("n_shots must be at least 1".into()));
    }
    let quarter = n_shots.div_ceil(4);
    let mut records = generate_tee_shots(params, quarter.div_ceil(4), rng);
    // Keep tee and non-tee tournament ids disjoint.
    for s in [Surface::Fairway, Surface::Rough, Surface::Bunker] {
        let mut shots = generate_surface_shots(params, s, quarter, rng);
        for r in &mut shots {
            r.tournament_id = format!("{}-{}", r.tournament_id, s.as_str());
        }
        records.extend(shots);
    }
    let mut putts = generate_putts(params, quarter, rng)?;
    for r in &mut putts {
        r.tournament_id.push_str("-green");
    }
    records.extend(putts);
    Ok(SyntheticTraces {
        records,
        params: params.clone(),
    })
}

/// Layout parameters for [`generate_hole`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HoleSpec {
    pub rows: usize,
    pub cols: usize,
    pub cell_size: f64,
    pub par: u8,
    /// Expected fraction of interior cells covered by hazards.
    pub hazard_density: f64,
    pub max_attempts: u32,
}

/// Seed that regenerates the bundled desk fixture from [`HoleSpec::desk_par4`].
pub const DESK_PAR4_SEED: u64 = 20240630;

impl HoleSpec {
    /// The 60-wide, 120-long par 4 used for desk-scale runs.
    pub fn desk_par4() -> Self {
        Self {
            rows: 120,
            cols: 60,
            cell_size: 59.0,
            par: 4,
            hazard_density: 0.06,
            max_attempts: 20,
        }
    }
}

/// Random hole drawn from `spec`, rejected and redrawn until it passes
/// [`validate_hole`].
pub fn generate_hole<R: Rng + ?Sized>(spec: &HoleSpec, rng: &mut R) -> Result<HoleRaster, SynthError> {
    if spec.rows < 12 || spec.cols < 9 {
        return Err(SynthError::InvalidParams(format!(
            "{}x{} is too small",
            spec.rows, spec.cols
        )));
    }
    if !(0.0..=0.5).contains(&spec.hazard_density) {
        return Err(SynthError::InvalidParams(format!(
            "hazard density {}",
            spec.hazard_density
        )));
    }
    for _ in 0..spec.max_attempts.max(1) {
        let raster = draw_layout(spec, rng)?;
        if validate_hole(&raster).accepted {
            return Ok(raster);
        }
    }
    Err(SynthError::GenerationFailed {
        attempts: spec.max_attempts.max(1),
    })
}

fn draw_layout<R: Rng + ?Sized>(spec: &HoleSpec, rng: &mut R) -> Result<HoleRaster, SynthError> {
    let (rows, cols) = (spec.rows, spec.cols);
    let mut grid = vec![SurfaceCode::Rough; rows * cols];
    let idx = |r: usize, c: usize| r * cols + c;

    let green_r = (rows.min(cols) / 10).clamp(2, 6) as isize;
    let shift = (cols / 6) as isize;
    let gc = cols as isize / 2 + rng.random_range(-shift as i64..=shift as i64) as isize;
    let gr = 2 + green_r;
    let (tr, tc) = (rows as isize - 3, cols as isize / 2);

    let half_width = (cols / 8).max(2) as f64;
    let phase = rng.random_range(0.0..std::f64::consts::TAU);
    let amplitude = (cols / 10) as f64;
    for r in gr..tr - 1 {
        let t = (r - gr) as f64 / (tr - gr) as f64;
        let center = gc as f64 + t * (tc - gc) as f64 + amplitude * (std::f64::consts::PI * t).sin() * phase.sin();
        for c in 1..cols - 1 {
            if (c as f64 - center).abs() <= half_width {
                grid[idx(r as usize, c)] = SurfaceCode::Fairway;
            }
        }
    }

    let in_green = |r: isize, c: isize| (r - gr).pow(2) + (c - gc).pow(2) <= green_r * green_r;
    let near_tee = |r: isize, c: isize| (r - tr).abs() <= 3 && (c - tc).abs() <= 3;

    let interior = ((rows - 2) * (cols - 2)) as f64;
    let blob_area = 9.0;
    let blobs = (spec.hazard_density * interior / blob_area).round() as usize;
    for _ in 0..blobs {
        let kind = match rng.random_range(0..10) {
            0..=3 => SurfaceCode::Bunker,
            4..=6 => SurfaceCode::Water,
            _ => SurfaceCode::Tree,
        };
        let br = rng.random_range(1..rows as i64 - 1) as isize;
        let bc = rng.random_range(1..cols as i64 - 1) as isize;
        let rad = rng.random_range(1..=2i64) as isize;
        for r in (br - rad).max(1)..=(br + rad).min(rows as isize - 2) {
            for c in (bc - rad).max(1)..=(bc + rad).min(cols as isize - 2) {
                if (r - br).pow(2) + (c - bc).pow(2) <= rad * rad && !in_green(r, c) && !near_tee(r, c) {
                    grid[idx(r as usize, c as usize)] = kind;
                }
            }
        }
    }

    for r in 0..rows as isize {
        for c in 0..cols as isize {
            if in_green(r, c) {
                grid[idx(r as usize, c as usize)] = SurfaceCode::Green;
            }
        }
    }
    for r in 0..rows {
        for c in 0..cols {
            if r == 0 || c == 0 || r == rows - 1 || c == cols - 1 {
                grid[idx(r, c)] = SurfaceCode::Oob;
            }
        }
    }
    grid[idx(tr as usize, tc as usize)] = SurfaceCode::Tee;
    let pin = CellCoord::new(gr as usize, gc as usize).center(spec.cell_size);
    Ok(HoleRaster::new(rows, cols, grid, spec.cell_size, pin, spec.par)?)
}

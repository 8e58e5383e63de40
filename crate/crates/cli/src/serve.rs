//! Read-only HTTP service over solved artifacts.
//!
//! Holes come from `*.hole` files in the course directory, keyed by file
//! stem. The policy directory holds `*.profile.json` and `*.booklet.json`
//! files, keyed by the ids they carry.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use axum::extract::{Path as UrlPath, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use golfopt_core::builder::{Booklet, BookletAction, BookletRow};
use golfopt_core::course::HoleRaster;
use golfopt_core::geometry::{CanonicalFrame, CellCoord, Point2};
use golfopt_core::seeding::rng_for;
use golfopt_core::simulator::{simulate_shot, ShotEvent};
use golfopt_core::skills::{ProfileFile, Surface};
use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::commands::{load_booklet, load_hole, load_profile};
use crate::error::CliError;

#[derive(Debug, Default)]
pub struct Artifacts {
    holes: BTreeMap<String, HoleRaster>,
    profiles: BTreeMap<String, ProfileFile>,
    booklets: BTreeMap<(String, String), Booklet>,
}

impl Artifacts {
    pub fn insert_hole(&mut self, id: &str, raster: HoleRaster) {
        self.holes.insert(id.to_string(), raster);
    }

    pub fn insert_profile(&mut self, profile: ProfileFile) {
        self.profiles.insert(profile.player_id.clone(), profile);
    }

    pub fn insert_booklet(&mut self, booklet: Booklet) {
        self.booklets
            .insert((booklet.player_id.clone(), booklet.hole_id.clone()), booklet);
    }

    pub fn load(courses: &Path, policies: &Path) -> Result<Self, CliError> {
        let mut a = Artifacts::default();
        for path in list_dir(courses)? {
            if path.extension().is_some_and(|e| e == "hole") {
                a.insert_hole(&crate::commands::hole_id(&path), load_hole(&path)?);
            }
        }
        for path in list_dir(policies)? {
            let name = path
                .file_name()
                .map(|n| n.to_string_lossy().into_owned())
                .unwrap_or_default();
            if name.ends_with(".profile.json") {
                a.insert_profile(load_profile(&path)?);
            } else if name.ends_with(".booklet.json") {
                a.insert_booklet(load_booklet(&path)?);
            }
        }
        Ok(a)
    }

    pub fn counts(&self) -> (usize, usize, usize) {
        (self.holes.len(), self.profiles.len(), self.booklets.len())
    }
}

fn list_dir(dir: &Path) -> Result<Vec<std::path::PathBuf>, CliError> {
    let read = std::fs::read_dir(dir).map_err(|e| CliError::user(format!("cannot read {}: {e}", dir.display())))?;
    let mut paths: Vec<_> = read.filter_map(|e| e.ok().map(|e| e.path())).collect();
    paths.sort();
    Ok(paths)
}

pub enum ApiError {
    NotFound(String),
    Invalid(String),
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let (status, msg) = match self {
            ApiError::NotFound(m) => (StatusCode::NOT_FOUND, m),
            ApiError::Invalid(m) => (StatusCode::UNPROCESSABLE_ENTITY, m),
        };
        (status, Json(json!({ "error": msg }))).into_response()
    }
}

type Shared = Arc<Artifacts>;

impl Artifacts {
    fn hole(&self, id: &str) -> Result<&HoleRaster, ApiError> {
        self.holes
            .get(id)
            .ok_or_else(|| ApiError::NotFound(format!("no hole {id}")))
    }

    fn profile(&self, player: &str) -> Result<&ProfileFile, ApiError> {
        self.profiles
            .get(player)
            .ok_or_else(|| ApiError::NotFound(format!("no profile for {player}")))
    }

    fn booklet(&self, player: &str, hole: &str) -> Result<&Booklet, ApiError> {
        self.booklets
            .get(&(player.to_string(), hole.to_string()))
            .ok_or_else(|| ApiError::NotFound(format!("no policy for {player} on {hole}")))
    }
}

pub fn router(artifacts: Shared) -> Router {
    Router::new()
        .route("/holes", get(list_holes))
        .route("/holes/{id}", get(get_hole))
        .route("/policies/{player}/{hole}", get(get_policy))
        .route("/values/{player}/{hole}/{r}/{c}", get(get_value))
        .route("/simulate", post(simulate))
        .with_state(artifacts)
}

pub async fn serve(artifacts: Artifacts, bind: &str) -> Result<(), CliError> {
    let listener = tokio::net::TcpListener::bind(bind)
        .await
        .map_err(|e| CliError::user(format!("cannot bind {bind}: {e}")))?;
    axum::serve(listener, router(Arc::new(artifacts)))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
        .map_err(|e| CliError::internal(e.to_string()))
}

#[derive(Debug, Serialize, Deserialize)]
pub struct HoleSummary {
    pub id: String,
    pub par: u8,
    pub rows: usize,
    pub cols: usize,
}

async fn list_holes(State(a): State<Shared>) -> Json<Vec<HoleSummary>> {
    Json(
        a.holes
            .iter()
            .map(|(id, h)| HoleSummary {
                id: id.clone(),
                par: h.par(),
                rows: h.rows(),
                cols: h.cols(),
            })
            .collect(),
    )
}

async fn get_hole(State(a): State<Shared>, UrlPath(id): UrlPath<String>) -> Result<Json<serde_json::Value>, ApiError> {
    let h = a.hole(&id)?;
    let pin = h.pin();
    Ok(Json(json!({
        "header": { "cell_size_in": h.cell_size(), "pin": [pin.x, pin.y], "par": h.par() },
        "grid": h.grid_rows(),
        "pin": [pin.x, pin.y],
        "tee": h.tee().map(|t| [t.row, t.col]),
        "par": h.par(),
    })))
}

async fn get_policy(
    State(a): State<Shared>,
    UrlPath((player, hole)): UrlPath<(String, String)>,
) -> Result<Json<Vec<BookletRow>>, ApiError> {
    Ok(Json(a.booklet(&player, &hole)?.rows.clone()))
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ValueResponse {
    pub value: f64,
    /// `None` on the green, where the only move is to hole out.
    pub best_action: Option<BookletAction>,
}

async fn get_value(
    State(a): State<Shared>,
    UrlPath((player, hole, r, c)): UrlPath<(String, String, usize, usize)>,
) -> Result<Json<ValueResponse>, ApiError> {
    let row = a
        .booklet(&player, &hole)?
        .row(CellCoord::new(r, c))
        .ok_or_else(|| ApiError::NotFound(format!("({r}, {c}) is not a state of {hole}")))?;
    Ok(Json(ValueResponse {
        value: row.value,
        best_action: row.action.clone(),
    }))
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SimulateRequest {
    pub hole: String,
    pub player: String,
    pub cell: [usize; 2],
    pub direction_deg: f64,
    pub distance_in: f64,
    #[serde(default)]
    pub seed: Option<u64>,
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct SimulateResponse {
    pub final_cell: [usize; 2],
    pub penalty: u8,
    pub event: ShotEvent,
    pub landed_on_green: bool,
    pub distance_to_pin: f64,
    pub expected_putts: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sampled_putts: Option<u8>,
}

/// Plays one shot. The realization is one of the player's pre-generated
/// samples at the nearest ladder distance, scaled to the requested
/// distance and capped at the surface's reach.
async fn simulate(
    State(a): State<Shared>,
    Json(req): Json<SimulateRequest>,
) -> Result<Json<SimulateResponse>, ApiError> {
    let raster = a.hole(&req.hole)?;
    let profile = a.profile(&req.player)?;
    let start = CellCoord::new(req.cell[0], req.cell[1]);
    if !raster.contains(start) {
        return Err(ApiError::Invalid(format!("{:?} is outside the hole", req.cell)));
    }
    let code = raster.surface(start);
    let surface = Surface::from_code(code)
        .filter(|_| code.is_playable())
        .ok_or_else(|| ApiError::Invalid(format!("cannot play from {code:?}")))?;
    let ladder = profile
        .ladder(surface)
        .ok_or_else(|| ApiError::Invalid(format!("{} has no {} shots", req.player, surface.as_str())))?;
    if !(req.distance_in > 0.0 && req.distance_in <= ladder.max_target_distance + 1e-9) {
        return Err(ApiError::Invalid(format!(
            "distance {} in is outside (0, {}] for {}",
            req.distance_in,
            ladder.max_target_distance,
            surface.as_str()
        )));
    }
    if !req.direction_deg.is_finite() {
        return Err(ApiError::Invalid("direction must be finite".into()));
    }
    let entry = ladder
        .ladder
        .iter()
        .filter(|e| !e.samples.is_empty())
        .min_by(|x, y| {
            (x.target_distance - req.distance_in)
                .abs()
                .total_cmp(&(y.target_distance - req.distance_in).abs())
        })
        .ok_or_else(|| ApiError::Invalid(format!("empty {} ladder", surface.as_str())))?;

    let seed = req.seed.unwrap_or_else(rand::random);
    let mut rng = rng_for(seed, &[]);
    let [x, y] = entry.samples[rng.random_range(0..entry.samples.len())];
    let k = req.distance_in / entry.target_distance;
    let sample = Point2::new(k * x, (k * y).min(ladder.max_reach));
    let frame = CanonicalFrame::aimed(raster.center(start), req.direction_deg.to_radians(), req.distance_in);
    let outcome = simulate_shot(raster, start, &frame, sample).map_err(|e| ApiError::Invalid(e.to_string()))?;

    let distance_to_pin = raster.distance_to_pin(outcome.final_cell);
    let (expected_putts, sampled_putts) = if outcome.landed_on_green {
        let p = profile
            .putting
            .distribution(distance_to_pin)
            .map_err(|e| ApiError::Invalid(e.to_string()))?;
        let u: f64 = rng.random();
        let n = if u < p[0] {
            1
        } else if u < p[0] + p[1] {
            2
        } else {
            3
        };
        let expected = profile
            .putting
            .expected_putts(distance_to_pin)
            .map_err(|e| ApiError::Invalid(e.to_string()))?;
        (Some(expected), Some(n))
    } else {
        (None, None)
    };
    Ok(Json(SimulateResponse {
        final_cell: [outcome.final_cell.row, outcome.final_cell.col],
        penalty: outcome.penalty,
        event: outcome.event,
        landed_on_green: outcome.landed_on_green,
        distance_to_pin,
        expected_putts,
        sampled_putts,
    }))
}

//! Assembly of the per-hole, per-player optimisation model.
//!
//! States are the playable and green cells of a raster. Every playable cell
//! gets one action per (direction, target distance) pair; its transition row
//! is the empirical distribution of simulated outcomes of the player's shot
//! pattern for that distance and lie. Green cells have a single hole-out
//! action whose cost is the expected number of putts from that cell.

use std::borrow::Cow;
use std::collections::BTreeMap;
use std::f64::consts::TAU;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::course::{validate_hole, HoleRaster, SurfaceCode};
use crate::geometry::{CanonicalFrame, CellCoord, Point2};
use crate::seeding::{derive_seed, rng_for};
use crate::simulator::{simulate_shot, ShotEvent};
use crate::skills::{ProfileFile, PuttingModel, SkillProfile, SkillsError, Surface};
use crate::ssp::{Policy, SspError, SspInstance, SspInstanceBuilder};

#[derive(Debug, Error)]
pub enum BuildError {
    #[error("raster has a playable border cell at {0:?}")]
    OpenBorder(CellCoord),
    #[error("raster has no tee cell")]
    MissingTee,
    #[error("the green cannot be reached from {0:?}")]
    UnreachableState(CellCoord),
    #[error("profile has no data for surface {0:?}")]
    ProfileSurfaceMissing(Surface),
    #[error("no target distance fits under the {max} in limit for {surface:?}")]
    NoActions { surface: Surface, max: f64 },
    #[error("profile ladder for {surface:?} has no entry at {distance} in")]
    MissingLadderDistance { surface: Surface, distance: f64 },
    #[error("profile ladder for {surface:?} holds {available} samples, {wanted} requested")]
    NotEnoughRealizations {
        surface: Surface,
        available: usize,
        wanted: usize,
    },
    #[error("invalid discretization: {0}")]
    InvalidDiscretization(String),
    #[error(transparent)]
    Skills(#[from] SkillsError),
    #[error(transparent)]
    Ssp(#[from] SspError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Discretization {
    pub n_directions: usize,
    pub distance_step: f64,
    pub realizations: usize,
}

impl Default for Discretization {
    fn default() -> Self {
        Self {
            n_directions: 180,
            distance_step: 100.0,
            realizations: 15,
        }
    }
}

impl Discretization {
    pub fn validate(&self) -> Result<(), BuildError> {
        if self.n_directions < 4 {
            return Err(BuildError::InvalidDiscretization(format!(
                "{} directions, need at least 4",
                self.n_directions
            )));
        }
        if !(self.distance_step > 0.0) {
            return Err(BuildError::InvalidDiscretization(format!(
                "distance step {}",
                self.distance_step
            )));
        }
        if self.realizations == 0 || self.realizations > u16::MAX as usize {
            return Err(BuildError::InvalidDiscretization(format!(
                "{} realizations",
                self.realizations
            )));
        }
        Ok(())
    }

    pub fn angle(&self, direction_index: usize) -> f64 {
        direction_index as f64 * TAU / self.n_directions as f64
    }

    pub fn direction_deg(&self, direction_index: usize) -> f64 {
        direction_index as f64 * 360.0 / self.n_directions as f64
    }

    /// Number of distance steps at or below `max_target`.
    pub fn distance_count(&self, max_target: f64) -> usize {
        (max_target / self.distance_step + 1e-9).floor().max(0.0) as usize
    }
}

/// Source of shot realizations for a lie and target distance.
pub trait ShotSampler: Sync {
    fn max_target_distance(&self, surface: Surface) -> Option<f64>;

    /// `realizations` canonical-frame arrivals for a shot of `distance`.
    /// `seed` is derived from the action's structural coordinates.
    fn samples(
        &self,
        surface: Surface,
        distance: f64,
        realizations: usize,
        seed: u64,
    ) -> Result<Cow<'_, [Point2]>, BuildError>;
}

/// Reads the pre-generated ladder: every action of a given (surface,
/// distance) shares one set of realizations.
pub struct LadderSampler<'a> {
    profile: &'a ProfileFile,
    points: BTreeMap<(Surface, u64), Vec<Point2>>,
}

impl<'a> LadderSampler<'a> {
    pub fn new(profile: &'a ProfileFile) -> Self {
        let mut points = BTreeMap::new();
        for (surface, ladder) in &profile.surfaces {
            for e in &ladder.ladder {
                points.insert((*surface, e.target_distance.to_bits()), e.points().collect());
            }
        }
        Self { profile, points }
    }
}

impl ShotSampler for LadderSampler<'_> {
    fn max_target_distance(&self, surface: Surface) -> Option<f64> {
        self.profile.ladder(surface).map(|l| l.max_target_distance)
    }

    fn samples(
        &self,
        surface: Surface,
        distance: f64,
        realizations: usize,
        _seed: u64,
    ) -> Result<Cow<'_, [Point2]>, BuildError> {
        let pts = self
            .points
            .get(&(surface, distance.to_bits()))
            .ok_or(BuildError::MissingLadderDistance { surface, distance })?;
        if pts.len() < realizations {
            return Err(BuildError::NotEnoughRealizations {
                surface,
                available: pts.len(),
                wanted: realizations,
            });
        }
        Ok(Cow::Borrowed(&pts[..realizations]))
    }
}

/// Draws fresh bootstrap samples for every action.
pub struct BootstrapSampler<'a> {
    pub profile: &'a SkillProfile,
}

impl ShotSampler for BootstrapSampler<'_> {
    fn max_target_distance(&self, surface: Surface) -> Option<f64> {
        self.profile.surfaces.get(&surface).map(|s| s.max_target_distance)
    }

    fn samples(
        &self,
        surface: Surface,
        distance: f64,
        realizations: usize,
        seed: u64,
    ) -> Result<Cow<'_, [Point2]>, BuildError> {
        let mut rng = rng_for(seed, &[]);
        Ok(Cow::Owned(self.profile.bootstrap_samples(
            surface,
            distance,
            realizations,
            &mut rng,
        )?))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ActionSpec {
    pub state: CellCoord,
    pub direction_index: u16,
    pub target_distance: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ActionKind {
    Shot(ActionSpec),
    HoleOut,
}

/// One simulated outcome class of an action: landing state and event,
/// observed `count` times out of the realizations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OutcomeClass {
    pub state: u32,
    pub event: ShotEvent,
    pub count: u16,
}

/// The optimisation model for one hole and player, with the bookkeeping
/// needed to map states and actions back onto the course.
#[derive(Debug, Clone)]
pub struct BuiltHole {
    pub raster: HoleRaster,
    pub discretization: Discretization,
    pub instance: SspInstance,
    pub states: Vec<CellCoord>,
    cell_state: Vec<u32>,
    pub actions: Vec<ActionKind>,
    outcome_ptr: Vec<usize>,
    outcomes: Vec<OutcomeClass>,
    pub putting: PuttingModel,
}

impl BuiltHole {
    pub fn state_of_cell(&self, c: CellCoord) -> Option<usize> {
        if !self.raster.contains(c) {
            return None;
        }
        let s = self.cell_state[c.row * self.raster.cols() + c.col];
        (s != u32::MAX).then_some(s as usize)
    }

    pub fn tee_state(&self) -> usize {
        let tee = self.raster.tee().expect("built rasters have a tee");
        self.state_of_cell(tee).expect("tee is a state")
    }

    pub fn cell(&self, state: usize) -> CellCoord {
        self.states[state]
    }

    pub fn surface(&self, state: usize) -> SurfaceCode {
        self.raster.surface(self.states[state])
    }

    pub fn outcomes(&self, action: usize) -> &[OutcomeClass] {
        &self.outcomes[self.outcome_ptr[action]..self.outcome_ptr[action + 1]]
    }

    pub fn realizations(&self) -> usize {
        self.discretization.realizations
    }

    /// Action of `state` with the given direction and distance, if any.
    pub fn find_action(&self, state: usize, direction_index: usize, target_distance: f64) -> Option<usize> {
        self.instance.actions(state).find(|a| match self.actions[*a] {
            ActionKind::Shot(spec) => {
                spec.direction_index as usize == direction_index
                    && (spec.target_distance - target_distance).abs() < 1e-6
            }
            ActionKind::HoleOut => false,
        })
    }

    /// The aim-at-the-pin strategy: from every playable cell, the direction
    /// closest to the pin's bearing and the shortest distance step that
    /// reaches the pin, capped at the longest available shot. Rounding to
    /// the nearest step instead can leave a ball short of water forever.
    pub fn pin_seeking_policy(&self) -> Policy {
        let disc = &self.discretization;
        let pin = self.raster.pin();
        let actions = (0..self.states.len())
            .map(|s| {
                let mut available = self.instance.actions(s);
                let first = available.next().expect("every state has an action");
                let ActionKind::Shot(_) = self.actions[first] else {
                    return first;
                };
                let origin = self.raster.center(self.states[s]);
                let to_pin = pin - origin;
                let bearing = to_pin.y.atan2(to_pin.x).rem_euclid(TAU);
                let dir = (bearing / TAU * disc.n_directions as f64).round() as usize % disc.n_directions;
                let longest = self
                    .instance
                    .actions(s)
                    .filter_map(|a| match self.actions[a] {
                        ActionKind::Shot(spec) => Some(spec.target_distance),
                        ActionKind::HoleOut => None,
                    })
                    .fold(0.0, f64::max);
                let steps = (to_pin.norm() / disc.distance_step - 1e-9).ceil().max(1.0);
                let dist = (steps * disc.distance_step).min(longest);
                self.find_action(s, dir, dist).expect("pin-seeking action exists")
            })
            .collect();
        Policy { actions }
    }

    /// Strategy table for every state under `policy` with values `values`.
    pub fn booklet(&self, player_id: &str, hole_id: &str, values: &[f64], policy: &Policy) -> Booklet {
        let rows = (0..self.states.len())
            .map(|s| {
                let cell = self.states[s];
                let surface = self.raster.surface(cell);
                let (action, expected_putts) = match self.actions[policy.action(s)] {
                    ActionKind::Shot(spec) => (
                        Some(BookletAction {
                            direction_deg: self.discretization.direction_deg(spec.direction_index as usize),
                            distance_in: spec.target_distance,
                        }),
                        None,
                    ),
                    ActionKind::HoleOut => (None, Some(self.instance.cost(policy.action(s)))),
                };
                BookletRow {
                    cell: [cell.row, cell.col],
                    surface,
                    value: values[s],
                    action,
                    expected_putts,
                }
            })
            .collect();
        Booklet {
            player_id: player_id.to_string(),
            hole_id: hole_id.to_string(),
            discretization: self.discretization,
            tee_value: values[self.tee_state()],
            rows,
        }
    }

    /// Maps booklet rows back onto actions of this model.
    pub fn policy_from_booklet(&self, booklet: &Booklet) -> Result<Policy, BuildError> {
        let mut actions = vec![usize::MAX; self.states.len()];
        for row in &booklet.rows {
            let cell = CellCoord::new(row.cell[0], row.cell[1]);
            let state = self
                .state_of_cell(cell)
                .ok_or(SspError::InvalidPolicy(format!("booklet cell {cell:?} is not a state")))?;
            actions[state] = match &row.action {
                None => self.instance.actions(state).next().expect("state has an action"),
                Some(a) => {
                    let dir = (a.direction_deg / 360.0 * self.discretization.n_directions as f64).round() as usize;
                    self.find_action(state, dir % self.discretization.n_directions, a.distance_in)
                        .ok_or(SspError::InvalidPolicy(format!(
                            "booklet action {a:?} at {cell:?} is not in the model"
                        )))?
                }
            };
        }
        if let Some(s) = actions.iter().position(|a| *a == usize::MAX) {
            return Err(SspError::InvalidPolicy(format!("booklet has no row for {:?}", self.states[s])).into());
        }
        Ok(Policy { actions })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BookletAction {
    pub direction_deg: f64,
    pub distance_in: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BookletRow {
    pub cell: [usize; 2],
    pub surface: SurfaceCode,
    pub value: f64,
    pub action: Option<BookletAction>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected_putts: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Booklet {
    pub player_id: String,
    pub hole_id: String,
    pub discretization: Discretization,
    pub tee_value: f64,
    pub rows: Vec<BookletRow>,
}

impl Booklet {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("booklet serializes")
    }

    pub fn row(&self, cell: CellCoord) -> Option<&BookletRow> {
        self.rows.iter().find(|r| r.cell == [cell.row, cell.col])
    }
}

#[derive(Default)]
struct StateRows {
    costs: Vec<f64>,
    row_lens: Vec<u32>,
    succ: Vec<(usize, f64)>,
    outcome_lens: Vec<u32>,
    outcomes: Vec<OutcomeClass>,
    kinds: Vec<ActionKind>,
}

/// Upper bound on the number of actions: every playable cell times every
/// direction times the longest ladder, plus one hole-out per green cell.
pub fn action_count_bound(raster: &HoleRaster, sampler: &dyn ShotSampler, disc: &Discretization) -> usize {
    let longest = Surface::SHOT_SURFACES
        .iter()
        .filter_map(|s| sampler.max_target_distance(*s))
        .map(|m| disc.distance_count(m))
        .max()
        .unwrap_or(0);
    let (playable, green) = raster.cells().fold((0, 0), |(p, g), (_, s)| {
        (p + s.is_playable() as usize, g + (s == SurfaceCode::Green) as usize)
    });
    playable * disc.n_directions * longest + green
}

/// Builds the model. Rows are assembled per state in parallel on the
/// current rayon pool and merged in state order, so the result does not
/// depend on the thread count.
pub fn build_instance(
    raster: &HoleRaster,
    sampler: &dyn ShotSampler,
    putting: &PuttingModel,
    disc: &Discretization,
    rng_seed: u64,
) -> Result<BuiltHole, BuildError> {
    disc.validate()?;
    let report = validate_hole(raster);
    if let Some(c) = report.open_border.first() {
        return Err(BuildError::OpenBorder(*c));
    }
    if report.missing_tee {
        return Err(BuildError::MissingTee);
    }
    if let Some(c) = report.unreachable.first() {
        return Err(BuildError::UnreachableState(*c));
    }
    if !report.tee_reaches_green {
        return Err(BuildError::UnreachableState(raster.tee().expect("tee present")));
    }

    let mut max_targets = BTreeMap::new();
    for (_, code) in raster.cells() {
        let Some(surface) = Surface::from_code(code).filter(|s| *s != Surface::Green) else {
            continue;
        };
        if max_targets.contains_key(&surface) {
            continue;
        }
        let max = sampler
            .max_target_distance(surface)
            .ok_or(BuildError::ProfileSurfaceMissing(surface))?;
        if disc.distance_count(max) == 0 {
            return Err(BuildError::NoActions { surface, max });
        }
        max_targets.insert(surface, max);
    }

    let states: Vec<CellCoord> = raster.cells().filter(|(_, s)| s.is_state()).map(|(c, _)| c).collect();
    let mut cell_state = vec![u32::MAX; raster.rows() * raster.cols()];
    for (i, c) in states.iter().enumerate() {
        cell_state[c.row * raster.cols() + c.col] = i as u32;
    }

    let per_state: Vec<StateRows> = states
        .par_iter()
        .map(|&cell| {
            state_rows(
                raster,
                sampler,
                putting,
                disc,
                rng_seed,
                &cell_state,
                &max_targets,
                cell,
            )
        })
        .collect::<Result<_, BuildError>>()?;

    let mut builder = SspInstanceBuilder::new(states.len());
    let mut actions = Vec::new();
    let mut outcome_ptr = vec![0usize];
    let mut outcomes = Vec::new();
    for (s, rows) in per_state.into_iter().enumerate() {
        let mut succ = rows.succ.into_iter();
        let mut outs = rows.outcomes.into_iter();
        for (i, cost) in rows.costs.iter().enumerate() {
            builder.push_action(s, *cost, succ.by_ref().take(rows.row_lens[i] as usize))?;
            outcomes.extend(outs.by_ref().take(rows.outcome_lens[i] as usize));
            outcome_ptr.push(outcomes.len());
        }
        actions.extend(rows.kinds);
    }

    Ok(BuiltHole {
        raster: raster.clone(),
        discretization: *disc,
        instance: builder.finish()?,
        states,
        cell_state,
        actions,
        outcome_ptr,
        outcomes,
        putting: putting.clone(),
    })
}

#[allow(clippy::too_many_arguments)]
fn state_rows(
    raster: &HoleRaster,
    sampler: &dyn ShotSampler,
    putting: &PuttingModel,
    disc: &Discretization,
    rng_seed: u64,
    cell_state: &[u32],
    max_targets: &BTreeMap<Surface, f64>,
    cell: CellCoord,
) -> Result<StateRows, BuildError> {
    let mut rows = StateRows::default();
    let code = raster.surface(cell);
    if code == SurfaceCode::Green {
        rows.costs.push(putting.expected_putts(raster.distance_to_pin(cell))?);
        rows.row_lens.push(0);
        rows.outcome_lens.push(0);
        rows.kinds.push(ActionKind::HoleOut);
        return Ok(rows);
    }
    let surface = Surface::from_code(code).expect("playable surface");
    let n_dist = disc.distance_count(max_targets[&surface]);
    let origin = raster.center(cell);
    let r = disc.realizations;
    let mut classes: BTreeMap<(u32, ShotEvent), u16> = BTreeMap::new();
    let mut merged: BTreeMap<u32, u16> = BTreeMap::new();
    for dir in 0..disc.n_directions {
        let angle = disc.angle(dir);
        for k in 1..=n_dist {
            let distance = k as f64 * disc.distance_step;
            let seed = derive_seed(rng_seed, &[cell.row as u64, cell.col as u64, dir as u64, k as u64]);
            let samples = sampler.samples(surface, distance, r, seed)?;
            let frame = CanonicalFrame::aimed(origin, angle, distance);
            classes.clear();
            merged.clear();
            let mut penalties = 0u32;
            for sample in samples.iter() {
                let out = simulate_shot(raster, cell, &frame, *sample).expect("state is playable");
                let to = cell_state[out.final_cell.row * raster.cols() + out.final_cell.col];
                debug_assert_ne!(to, u32::MAX);
                penalties += out.penalty as u32;
                *classes.entry((to, out.event)).or_default() += 1;
                *merged.entry(to).or_default() += 1;
            }
            rows.costs.push(1.0 + penalties as f64 / r as f64);
            rows.row_lens.push(merged.len() as u32);
            rows.succ
                .extend(merged.iter().map(|(s, c)| (*s as usize, *c as f64 / r as f64)));
            rows.outcome_lens.push(classes.len() as u32);
            rows.outcomes.extend(classes.iter().map(|((s, e), c)| OutcomeClass {
                state: *s,
                event: *e,
                count: *c,
            }));
            rows.kinds.push(ActionKind::Shot(ActionSpec {
                state: cell,
                direction_index: dir as u16,
                target_distance: distance,
            }));
        }
    }
    Ok(rows)
}

//! Resampling complete shot patterns from sparse target/arrival pairs.
//!
//! For a distance `d`, the nearest pairs by target distance are collected,
//! their arrivals rescaled linearly to `d`, and new samples drawn by pairing
//! the absolute lateral offset of one rescaled point (with a random side) with
//! the longitudinal coordinate of another.

use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::pairs::{filter_outliers, PairSet, TargetDestinationPair};
use super::putting::PuttingModel;
use super::{SkillsError, Surface};
use crate::geometry::Point2;
use crate::seeding::rng_for;

/// Preferred neighbourhood size.
pub const TARGET_NEIGHBOURS: usize = 50;
/// Minimum neighbourhood size, taken regardless of radius.
pub const MIN_NEIGHBOURS: usize = 10;
/// Neighbourhood radius cap (30 m).
pub const MAX_RADIUS_IN: f64 = 1181.0;
/// Percentile of observed target distances used as the targetable maximum.
pub const MAX_TARGET_PERCENTILE: f64 = 0.95;

/// Cleaned pairs of one surface plus the range limits derived from them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfaceSkill {
    pub pairs: Vec<TargetDestinationPair>,
    pub max_target_distance: f64,
    pub max_reach: f64,
}

impl SurfaceSkill {
    pub fn from_pairs(pairs: Vec<TargetDestinationPair>) -> Option<Self> {
        if pairs.is_empty() {
            return None;
        }
        let mut targets: Vec<f64> = pairs.iter().map(|p| p.target_distance).collect();
        targets.sort_by(f64::total_cmp);
        // Nearest-rank percentile.
        let rank = ((MAX_TARGET_PERCENTILE * targets.len() as f64).ceil() as usize).max(1);
        let p95 = targets[rank - 1];
        let max_reach = pairs.iter().map(|p| p.arrival.y).fold(f64::NEG_INFINITY, f64::max);
        Some(Self {
            max_target_distance: p95.min(max_reach),
            max_reach,
            pairs,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkillProfile {
    pub player_id: String,
    pub surfaces: BTreeMap<Surface, SurfaceSkill>,
}

impl SkillProfile {
    /// Cleans `pairs` with the outlier filter and derives the range limits.
    pub fn from_pairs(player_id: impl Into<String>, pairs: &PairSet) -> Self {
        let surfaces = pairs
            .iter()
            .filter_map(|(s, ps)| SurfaceSkill::from_pairs(filter_outliers(ps, *s)).map(|k| (*s, k)))
            .collect();
        Self {
            player_id: player_id.into(),
            surfaces,
        }
    }

    pub fn surface(&self, surface: Surface) -> Result<&SurfaceSkill, SkillsError> {
        self.surfaces.get(&surface).ok_or(SkillsError::EmptyProfile(surface))
    }

    /// `r` resampled arrivals for a shot of `d` inches from `surface`.
    pub fn bootstrap_samples<R: Rng + ?Sized>(
        &self,
        surface: Surface,
        d: f64,
        r: usize,
        rng: &mut R,
    ) -> Result<Vec<Point2>, SkillsError> {
        let skill = self.surface(surface)?;
        if d > skill.max_target_distance {
            return Err(SkillsError::TargetTooFar {
                surface,
                distance: d,
                max: skill.max_target_distance,
            });
        }
        bootstrap_from_pairs(&skill.pairs, d, r, skill.max_reach, rng)
    }

    /// Samples on the ladder `step, 2*step, ...` up to each surface's maximum
    /// target distance. Each (surface, distance) draws from its own stream
    /// derived from `seed`.
    pub fn bootstrap_ladder(
        &self,
        step: f64,
        realizations: usize,
        seed: u64,
    ) -> Result<BTreeMap<Surface, SurfaceLadder>, SkillsError> {
        let mut out = BTreeMap::new();
        for (&surface, skill) in &self.surfaces {
            let steps = (skill.max_target_distance / step + 1e-9).floor().max(0.0) as u64;
            let mut entries = Vec::with_capacity(steps as usize);
            for k in 1..=steps {
                let d = k as f64 * step;
                let mut rng = rng_for(seed, &[surface as u64, k]);
                let samples = bootstrap_from_pairs(&skill.pairs, d, realizations, skill.max_reach, &mut rng)?;
                entries.push(LadderEntry {
                    target_distance: d,
                    samples: samples.iter().map(|p| [p.x, p.y]).collect(),
                });
            }
            out.insert(
                surface,
                SurfaceLadder {
                    max_target_distance: skill.max_target_distance,
                    max_reach: skill.max_reach,
                    ladder: entries,
                },
            );
        }
        Ok(out)
    }
}

/// Target distances closer than this count as equal when growing a ball.
pub const TIE_TOLERANCE_IN: f64 = 1e-6;

/// Pairs in the smallest ball around `d` (in target distance) holding
/// [`TARGET_NEIGHBOURS`] pairs, with the radius capped at [`MAX_RADIUS_IN`].
/// Pairs tied (within [`TIE_TOLERANCE_IN`]) with the last one admitted are
/// in the ball too. When the capped ball holds fewer than
/// [`MIN_NEIGHBOURS`], the nearest `MIN_NEIGHBOURS` are taken regardless of
/// radius. Ties keep input order.
pub fn select_neighbourhood(pairs: &[TargetDestinationPair], d: f64) -> Vec<&TargetDestinationPair> {
    let gap = |p: &TargetDestinationPair| (p.target_distance - d).abs();
    let mut sorted: Vec<&TargetDestinationPair> = pairs.iter().collect();
    sorted.sort_by(|a, b| gap(a).total_cmp(&gap(b)));
    let within = sorted.iter().take_while(|p| gap(p) <= MAX_RADIUS_IN).count();
    let k = if within >= TARGET_NEIGHBOURS {
        let radius = gap(sorted[TARGET_NEIGHBOURS - 1]);
        TARGET_NEIGHBOURS
            + sorted[TARGET_NEIGHBOURS..]
                .iter()
                .take_while(|p| gap(p) <= radius + TIE_TOLERANCE_IN)
                .count()
    } else {
        within.max(MIN_NEIGHBOURS.min(sorted.len()))
    };
    sorted.truncate(k);
    sorted
}

/// Resamples `r` arrivals for target distance `d` from `pairs`, capping the
/// longitudinal coordinate at `reach_cap`. Samples are drawn with
/// replacement.
pub fn bootstrap_from_pairs<R: Rng + ?Sized>(
    pairs: &[TargetDestinationPair],
    d: f64,
    r: usize,
    reach_cap: f64,
    rng: &mut R,
) -> Result<Vec<Point2>, SkillsError> {
    if !(d > 0.0) || !d.is_finite() {
        return Err(SkillsError::InvalidDistance(d));
    }
    let Some(surface) = pairs.first().map(|p| p.surface) else {
        return Err(SkillsError::EmptyProfile(Surface::Fairway));
    };
    let scaled: Vec<Point2> = select_neighbourhood(pairs, d)
        .into_iter()
        .map(|p| p.arrival.scale(d / p.target_distance))
        .collect();
    if scaled.is_empty() {
        return Err(SkillsError::EmptyProfile(surface));
    }
    let n = scaled.len();
    Ok((0..r)
        .map(|_| {
            let lateral = scaled[rng.random_range(0..n)].x.abs();
            let side = rng.random_bool(0.5);
            let y = scaled[rng.random_range(0..n)].y.min(reach_cap);
            let x = if lateral == 0.0 {
                0.0
            } else if side {
                lateral
            } else {
                -lateral
            };
            Point2::new(x, y)
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LadderEntry {
    pub target_distance: f64,
    pub samples: Vec<[f64; 2]>,
}

impl LadderEntry {
    pub fn points(&self) -> impl Iterator<Item = Point2> + '_ {
        self.samples.iter().map(|s| Point2::new(s[0], s[1]))
    }

    pub fn mean_abs_lateral(&self) -> f64 {
        if self.samples.is_empty() {
            return 0.0;
        }
        self.samples.iter().map(|s| s[0].abs()).sum::<f64>() / self.samples.len() as f64
    }

    fn scale_lateral(&mut self, factor: f64) {
        for s in &mut self.samples {
            s[0] *= factor;
        }
    }
}

/// Bootstrapped shot patterns of one surface on an increasing distance
/// ladder.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfaceLadder {
    pub max_target_distance: f64,
    pub max_reach: f64,
    pub ladder: Vec<LadderEntry>,
}

impl SurfaceLadder {
    pub fn entry(&self, target_distance: f64) -> Option<&LadderEntry> {
        self.ladder
            .iter()
            .find(|e| (e.target_distance - target_distance).abs() < 1e-9)
    }
}

/// Makes mean lateral dispersion non-decreasing with distance on every
/// surface, then lifts rough and bunker dispersion to at least the fairway's
/// at each shared distance. Distances whose samples have no lateral spread
/// are left as they are.
pub fn enforce_monotone_dispersion(ladders: &mut BTreeMap<Surface, SurfaceLadder>) {
    for ladder in ladders.values_mut() {
        monotone_in_distance(ladder);
    }
    let Some(fairway) = ladders.get(&Surface::Fairway).cloned() else {
        return;
    };
    for surface in [Surface::Rough, Surface::Bunker] {
        let Some(ladder) = ladders.get_mut(&surface) else {
            continue;
        };
        for entry in &mut ladder.ladder {
            let Some(fw) = fairway.entry(entry.target_distance) else {
                continue;
            };
            let (floor, mean) = (fw.mean_abs_lateral(), entry.mean_abs_lateral());
            if mean < floor && mean > 0.0 {
                entry.scale_lateral(floor / mean);
            }
        }
        // Lifting one entry to the fairway floor can leave a dip after it.
        monotone_in_distance(ladder);
    }
}

fn monotone_in_distance(ladder: &mut SurfaceLadder) {
    let mut previous: Option<f64> = None;
    for entry in &mut ladder.ladder {
        let mean = entry.mean_abs_lateral();
        if let Some(prev) = previous {
            if mean < prev && mean > 0.0 {
                entry.scale_lateral(prev / mean);
            }
        }
        previous = Some(entry.mean_abs_lateral().max(previous.unwrap_or(0.0)));
    }
}

/// Serialized player profile: bootstrapped ladders plus the putting model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileFile {
    pub player_id: String,
    pub distance_step: f64,
    pub realizations: usize,
    pub surfaces: BTreeMap<Surface, SurfaceLadder>,
    pub putting: PuttingModel,
}

impl ProfileFile {
    pub fn ladder(&self, surface: Surface) -> Option<&SurfaceLadder> {
        self.surfaces.get(&surface)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("profile serializes")
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }
}

//! Distance-dependent 1/2/3-putt probabilities.
//!
//! Observations are bucketed by first-putt distance in doubling buckets with
//! breakpoints 0, 0.5, 1, 2, 4, 8 and 16 m. Each bucket's frequencies are
//! assigned to its midpoint; a tail bucket (16 m, 1280 in] with midpoint
//! 24 m always uses pooled data. Queries interpolate linearly between
//! midpoints and clamp outside them.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{ShotRecord, SkillsError, Surface, INCHES_PER_METER};

/// Upper edges of the per-player buckets, metres.
pub const BUCKET_UPPER_M: [f64; 6] = [0.5, 1.0, 2.0, 4.0, 8.0, 16.0];
/// Midpoints of all seven buckets, metres.
pub const MIDPOINTS_M: [f64; 7] = [0.25, 0.75, 1.5, 3.0, 6.0, 12.0, 24.0];
/// Putts from further away are discarded.
pub const MAX_PUTT_DISTANCE_IN: f64 = 1280.0;
/// Player buckets with fewer observations use pooled frequencies.
pub const MIN_BUCKET_OBSERVATIONS: usize = 30;
pub const N_BUCKETS: usize = 7;
const TAIL: usize = N_BUCKETS - 1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PuttObservation {
    pub distance_in: f64,
    /// Putts taken to hole out from `distance_in`; values above 3 count as 3.
    pub putts: u8,
}

/// First-putt observations: one per (player, tournament, round, hole) with
/// green records, at the distance of the first green record, counting all
/// green records of that hole as putts.
pub fn extract_putts(records: &[ShotRecord]) -> Vec<PuttObservation> {
    let mut holes: BTreeMap<(&str, &str, u8, u8), Vec<&ShotRecord>> = BTreeMap::new();
    for r in records.iter().filter(|r| r.surface == Surface::Green) {
        holes
            .entry((&r.player_id, &r.tournament_id, r.round, r.hole))
            .or_default()
            .push(r);
    }
    holes
        .values()
        .map(|putts| {
            let first = putts.iter().min_by_key(|r| r.shot_number).expect("non-empty");
            PuttObservation {
                distance_in: first.start().distance(&first.pin()),
                putts: putts.len().min(u8::MAX as usize) as u8,
            }
        })
        .collect()
}

/// Bucket index of a putt distance, `None` beyond [`MAX_PUTT_DISTANCE_IN`].
pub fn bucket_of(distance_in: f64) -> Option<usize> {
    if !(0.0..=MAX_PUTT_DISTANCE_IN).contains(&distance_in) {
        return None;
    }
    let m = distance_in / INCHES_PER_METER;
    Some(BUCKET_UPPER_M.iter().position(|u| m <= *u).unwrap_or(TAIL))
}

fn tally(obs: &[PuttObservation]) -> [[usize; 3]; N_BUCKETS] {
    let mut counts = [[0usize; 3]; N_BUCKETS];
    for o in obs {
        if let Some(b) = bucket_of(o.distance_in) {
            let k = o.putts.clamp(1, 3) as usize - 1;
            counts[b][k] += 1;
        }
    }
    counts
}

fn frequencies(c: [usize; 3]) -> [f64; 3] {
    let n = (c[0] + c[1] + c[2]) as f64;
    [c[0] as f64 / n, c[1] as f64 / n, c[2] as f64 / n]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PuttingModel {
    pub midpoints_in: [f64; N_BUCKETS],
    /// `(p1, p2, p3)` at each midpoint.
    pub probabilities: [[f64; 3]; N_BUCKETS],
}

impl PuttingModel {
    pub fn from_probabilities(probabilities: [[f64; 3]; N_BUCKETS]) -> Result<Self, SkillsError> {
        for (bucket, p) in probabilities.iter().enumerate() {
            if p.iter().any(|v| !(0.0..=1.0).contains(v)) {
                return Err(SkillsError::InvalidPutting {
                    bucket,
                    reason: format!("{p:?} outside [0, 1]"),
                });
            }
            if (p.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
                return Err(SkillsError::InvalidPutting {
                    bucket,
                    reason: format!("{p:?} does not sum to 1"),
                });
            }
        }
        Ok(Self {
            midpoints_in: MIDPOINTS_M.map(|m| m * INCHES_PER_METER),
            probabilities,
        })
    }

    /// Same triple at every distance.
    pub fn uniform(p: [f64; 3]) -> Result<Self, SkillsError> {
        Self::from_probabilities([p; N_BUCKETS])
    }

    pub fn distribution(&self, distance_in: f64) -> Result<[f64; 3], SkillsError> {
        if !(distance_in >= 0.0) {
            return Err(SkillsError::NegativeDistance(distance_in));
        }
        let mids = &self.midpoints_in;
        let probs = &self.probabilities;
        if distance_in <= mids[0] {
            return Ok(probs[0]);
        }
        if distance_in >= mids[TAIL] {
            return Ok(probs[TAIL]);
        }
        let i = mids
            .iter()
            .rposition(|m| *m <= distance_in)
            .expect("above first midpoint");
        let w = (distance_in - mids[i]) / (mids[i + 1] - mids[i]);
        if w == 0.0 {
            return Ok(probs[i]);
        }
        let mut p = [0.0; 3];
        for k in 0..3 {
            p[k] = (1.0 - w) * probs[i][k] + w * probs[i + 1][k];
        }
        let s: f64 = p.iter().sum();
        Ok(p.map(|v| v / s))
    }

    pub fn expected_putts(&self, distance_in: f64) -> Result<f64, SkillsError> {
        let p = self.distribution(distance_in)?;
        Ok(p[0] + 2.0 * p[1] + 3.0 * p[2])
    }
}

/// Free-function form of [`PuttingModel::distribution`].
pub fn putt_distribution(model: &PuttingModel, distance_in: f64) -> Result<[f64; 3], SkillsError> {
    model.distribution(distance_in)
}

/// Free-function form of [`PuttingModel::expected_putts`].
pub fn expected_putts(model: &PuttingModel, distance_in: f64) -> Result<f64, SkillsError> {
    model.expected_putts(distance_in)
}

/// Per-player frequencies in the six buckets below 16 m, pooled frequencies
/// in the tail bucket. A player bucket with fewer than
/// [`MIN_BUCKET_OBSERVATIONS`] observations uses the pooled bucket when the
/// pool has data for it.
pub fn build_putting_model(
    player: &[PuttObservation],
    pooled: &[PuttObservation],
) -> Result<PuttingModel, SkillsError> {
    let own = tally(player);
    let pool = tally(pooled);
    let mut probabilities = [[0.0; 3]; N_BUCKETS];
    for bucket in 0..N_BUCKETS {
        let n_own: usize = own[bucket].iter().sum();
        let n_pool: usize = pool[bucket].iter().sum();
        let counts = if bucket == TAIL {
            pool[bucket]
        } else if n_own >= MIN_BUCKET_OBSERVATIONS || (n_pool == 0 && n_own > 0) {
            own[bucket]
        } else {
            pool[bucket]
        };
        if counts.iter().sum::<usize>() == 0 {
            return Err(SkillsError::EmptyBucket { bucket });
        }
        probabilities[bucket] = frequencies(counts);
    }
    PuttingModel::from_probabilities(probabilities)
}

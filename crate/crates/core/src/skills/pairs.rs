use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{ShotRecord, Surface, INCHES_PER_METER};
use crate::geometry::{CanonicalFrame, Point2};

/// Tee shots of one (tournament, hole) must start within this radius of
/// their centroid (5 m).
pub const TEE_RADIUS_IN: f64 = 5.0 * INCHES_PER_METER;
/// Minimum number of distinct rounds for a tee group to be used.
pub const MIN_TEE_ROUNDS: usize = 3;

/// Fairway shots at or below 100 m keep all data.
pub const WEDGE_LIMIT_IN: f64 = 3937.0;
/// Longitudinal error cap for fairway shots over 100 m (about 20 m).
pub const FAIRWAY_ERROR_CAP_IN: f64 = 800.0;
/// Longitudinal error cap for tee, rough and bunker shots (about 30 m).
pub const OTHER_ERROR_CAP_IN: f64 = 1200.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TargetDestinationPair {
    pub surface: Surface,
    pub target_distance: f64,
    /// Arrival point in the canonical frame of the shot; the target is
    /// `(0, target_distance)`.
    pub arrival: Point2,
}

impl TargetDestinationPair {
    /// Longitudinal (distance control) error.
    pub fn distance_error(&self) -> f64 {
        (self.arrival.y - self.target_distance).abs()
    }
}

pub type PairSet = BTreeMap<Surface, Vec<TargetDestinationPair>>;

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ExtractDiagnostics {
    pub pairs: usize,
    pub green_records: usize,
    /// Non-tee shots played from the pin position.
    pub degenerate_shots: usize,
    pub tee_groups_used: usize,
    pub discarded_tee_groups: usize,
    /// Subset of `discarded_tee_groups` rejected for spread-out tee positions.
    pub tee_groups_out_of_radius: usize,
}

/// Converts one player's records into canonical-frame pairs per surface.
///
/// Non-tee shots are assumed to aim at the pin. Tee shots of a
/// (tournament, hole) aim at the mean of their landing points, provided at
/// least [`MIN_TEE_ROUNDS`] rounds were played from tees within
/// [`TEE_RADIUS_IN`] of each other.
pub fn extract_pairs(records: &[ShotRecord]) -> (PairSet, ExtractDiagnostics) {
    let mut out = PairSet::new();
    let mut diag = ExtractDiagnostics::default();
    let mut tee_groups: BTreeMap<(&str, u8), Vec<&ShotRecord>> = BTreeMap::new();

    for rec in records {
        match rec.surface {
            Surface::Green => diag.green_records += 1,
            Surface::Tee => tee_groups
                .entry((rec.tournament_id.as_str(), rec.hole))
                .or_default()
                .push(rec),
            surface => match CanonicalFrame::new(rec.start(), rec.pin()) {
                Ok(frame) => out.entry(surface).or_default().push(TargetDestinationPair {
                    surface,
                    target_distance: frame.distance(),
                    arrival: frame.to_canonical(rec.end()),
                }),
                Err(_) => diag.degenerate_shots += 1,
            },
        }
    }

    for group in tee_groups.values() {
        let mut rounds: Vec<u8> = group.iter().map(|r| r.round).collect();
        rounds.sort_unstable();
        rounds.dedup();
        if rounds.len() < MIN_TEE_ROUNDS {
            diag.discarded_tee_groups += 1;
            continue;
        }
        let n = group.len() as f64;
        let centroid = |f: fn(&ShotRecord) -> Point2| {
            let (sx, sy) = group
                .iter()
                .map(|r| f(r))
                .fold((0.0, 0.0), |(ax, ay), p| (ax + p.x, ay + p.y));
            Point2::new(sx / n, sy / n)
        };
        let tee_center = centroid(ShotRecord::start);
        if group.iter().any(|r| r.start().distance(&tee_center) > TEE_RADIUS_IN) {
            diag.discarded_tee_groups += 1;
            diag.tee_groups_out_of_radius += 1;
            continue;
        }
        let target = centroid(ShotRecord::end);
        let mut used = false;
        for rec in group {
            match CanonicalFrame::new(rec.start(), target) {
                Ok(frame) => {
                    used = true;
                    out.entry(Surface::Tee).or_default().push(TargetDestinationPair {
                        surface: Surface::Tee,
                        target_distance: frame.distance(),
                        arrival: frame.to_canonical(rec.end()),
                    });
                }
                Err(_) => diag.degenerate_shots += 1,
            }
        }
        if used {
            diag.tee_groups_used += 1;
        }
    }
    diag.pairs = out.values().map(Vec::len).sum();
    (out, diag)
}

/// Whether a pair survives the distance-error cap of its surface.
pub fn keeps_pair(pair: &TargetDestinationPair) -> bool {
    let err = pair.distance_error();
    match pair.surface {
        Surface::Fairway => pair.target_distance <= WEDGE_LIMIT_IN || err <= FAIRWAY_ERROR_CAP_IN,
        _ => err <= OTHER_ERROR_CAP_IN,
    }
}

/// Drops pairs whose longitudinal error exceeds the cap for `surface`.
/// Order is preserved.
pub fn filter_outliers(pairs: &[TargetDestinationPair], surface: Surface) -> Vec<TargetDestinationPair> {
    pairs
        .iter()
        .filter(|p| keeps_pair(&TargetDestinationPair { surface, ..**p }))
        .copied()
        .collect()
}

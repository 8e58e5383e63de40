//! Player skill inference from shot traces.
//!
//! Raw traces become target/arrival pairs in the canonical frame of each
//! shot ([`pairs`]), suspicious pairs are dropped ([`pairs::filter_outliers`]),
//! and complete per-distance shot patterns are resampled from the cleaned
//! data ([`bootstrap`]). Putting is modelled separately ([`putting`]).

pub mod bootstrap;
pub mod pairs;
pub mod putting;
pub mod records;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::course::SurfaceCode;

pub use bootstrap::{
    bootstrap_from_pairs, enforce_monotone_dispersion, select_neighbourhood, LadderEntry, ProfileFile, SkillProfile,
    SurfaceLadder, SurfaceSkill,
};
pub use pairs::{extract_pairs, filter_outliers, ExtractDiagnostics, PairSet, TargetDestinationPair};
pub use putting::{
    build_putting_model, expected_putts, extract_putts, putt_distribution, PuttObservation, PuttingModel,
};
pub use records::{filter_window, read_records_csv, write_records_csv, ShotRecord};

/// Inches per meter.
pub const INCHES_PER_METER: f64 = 39.3701;

#[derive(Debug, Error)]
pub enum SkillsError {
    #[error("no cleaned pairs for surface {0:?}")]
    EmptyProfile(Surface),
    #[error("target distance {distance} in exceeds the {max} in limit for {surface:?}")]
    TargetTooFar { surface: Surface, distance: f64, max: f64 },
    #[error("target distance must be positive, got {0}")]
    InvalidDistance(f64),
    #[error("putting bucket {bucket} has no observations")]
    EmptyBucket { bucket: usize },
    #[error("negative putt distance {0}")]
    NegativeDistance(f64),
    #[error("invalid putting probabilities at bucket {bucket}: {reason}")]
    InvalidPutting { bucket: usize, reason: String },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

/// Lie of the ball before a shot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Surface {
    Tee,
    Fairway,
    Rough,
    Bunker,
    Green,
}

impl Surface {
    /// Surfaces from which full shots are modelled.
    pub const SHOT_SURFACES: [Surface; 4] = [Surface::Tee, Surface::Fairway, Surface::Rough, Surface::Bunker];

    pub fn from_code(code: SurfaceCode) -> Option<Surface> {
        Some(match code {
            SurfaceCode::Tee => Surface::Tee,
            SurfaceCode::Fairway => Surface::Fairway,
            SurfaceCode::Rough => Surface::Rough,
            SurfaceCode::Bunker => Surface::Bunker,
            SurfaceCode::Green => Surface::Green,
            _ => return None,
        })
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Surface::Tee => "tee",
            Surface::Fairway => "fairway",
            Surface::Rough => "rough",
            Surface::Bunker => "bunker",
            Surface::Green => "green",
        }
    }
}

/// Counts reported by [`build_profile`].
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct IngestSummary {
    pub extract: ExtractDiagnostics,
    /// Per surface: (pairs extracted, pairs kept by the outlier filter).
    pub kept: std::collections::BTreeMap<Surface, (usize, usize)>,
    pub putts: usize,
}

/// Full inference for one player: pairs, outlier filter, bootstrapped
/// ladder with monotone repair, and the putting model. `pooled` supplies
/// the putting buckets the player lacks.
pub fn build_profile(
    player_id: &str,
    records: &[ShotRecord],
    pooled: &[PuttObservation],
    distance_step: f64,
    realizations: usize,
    seed: u64,
) -> Result<(ProfileFile, IngestSummary), SkillsError> {
    if !(distance_step > 0.0) {
        return Err(SkillsError::InvalidDistance(distance_step));
    }
    let (pairs, extract) = extract_pairs(records);
    let profile = SkillProfile::from_pairs(player_id, &pairs);
    for s in Surface::SHOT_SURFACES {
        profile.surface(s)?;
    }
    let kept = pairs
        .iter()
        .map(|(s, ps)| (*s, (ps.len(), profile.surfaces.get(s).map_or(0, |k| k.pairs.len()))))
        .collect();
    let mut surfaces = profile.bootstrap_ladder(distance_step, realizations, seed)?;
    enforce_monotone_dispersion(&mut surfaces);
    let putts = extract_putts(records);
    let putting = build_putting_model(&putts, pooled)?;
    Ok((
        ProfileFile {
            player_id: player_id.to_string(),
            distance_step,
            realizations,
            surfaces,
            putting,
        },
        IngestSummary {
            extract,
            kept,
            putts: putts.len(),
        },
    ))
}

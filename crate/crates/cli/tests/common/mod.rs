#![allow(dead_code)]

use std::path::{Path, PathBuf};

use golfopt_cli::PipelineConfig;
use golfopt_core::builder::Discretization;
use golfopt_core::course::HoleRaster;
use golfopt_core::seeding::rng_for;
use golfopt_core::skills::{
    write_records_csv, LadderEntry, ProfileFile, PuttingModel, ShotRecord, Surface, SurfaceLadder,
};
use golfopt_core::synthgen::{generate_traces, SyntheticPlayerParams};

pub fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../core/fixtures")
        .join(name)
}

pub fn hole(name: &str) -> HoleRaster {
    HoleRaster::parse(&std::fs::read_to_string(fixture(name)).unwrap()).unwrap()
}

pub fn putting() -> PuttingModel {
    SyntheticPlayerParams::tour_player("p").putting_model().unwrap()
}

/// Every shot lands exactly on target, one step long.
pub fn robot_profile(step: f64, realizations: usize) -> ProfileFile {
    let ladder = SurfaceLadder {
        max_target_distance: step,
        max_reach: step,
        ladder: vec![LadderEntry {
            target_distance: step,
            samples: vec![[0.0, step]; realizations],
        }],
    };
    ProfileFile {
        player_id: "robot".into(),
        distance_step: step,
        realizations,
        surfaces: Surface::SHOT_SURFACES.iter().map(|s| (*s, ladder.clone())).collect(),
        putting: putting(),
    }
}

pub fn corridor_config() -> PipelineConfig {
    PipelineConfig {
        discretization: Discretization {
            n_directions: 36,
            distance_step: 50.0,
            realizations: 10,
        },
        seed: 1,
        ..PipelineConfig::default()
    }
}

/// Coarse settings that keep the water hole fast to build.
pub fn water_config() -> PipelineConfig {
    PipelineConfig {
        discretization: Discretization {
            n_directions: 12,
            distance_step: 500.0,
            realizations: 10,
        },
        seed: 3,
        ..PipelineConfig::default()
    }
}

pub fn amateur(id: &str) -> SyntheticPlayerParams {
    let mut p = SyntheticPlayerParams::tour_player(id);
    p.lateral_sigma_ratio = 0.07;
    p.distance_sigma_ratio = 0.08;
    p.max_target = [
        (Surface::Tee, 7000.0),
        (Surface::Fairway, 6000.0),
        (Surface::Rough, 5000.0),
        (Surface::Bunker, 3000.0),
    ]
    .into_iter()
    .collect();
    p
}

pub fn traces(params: &SyntheticPlayerParams, n_shots: usize, seed: u64) -> Vec<ShotRecord> {
    generate_traces(params, n_shots, &mut rng_for(seed, &[]))
        .unwrap()
        .records
}

pub fn write_csv(path: &Path, records: &[ShotRecord]) {
    write_records_csv(std::fs::File::create(path).unwrap(), records).unwrap();
}

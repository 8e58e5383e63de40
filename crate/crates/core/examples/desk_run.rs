//! Infers a synthetic player, builds and solves the desk fixture, and
//! prints timings.

use std::time::Instant;

use golfopt_core::builder::{build_instance, Discretization, LadderSampler};
use golfopt_core::course::HoleRaster;
use golfopt_core::seeding::rng_for;
use golfopt_core::skills::{build_profile, extract_putts};
use golfopt_core::ssp::{evaluate_policy, value_iteration, DEFAULT_EPSILON, DEFAULT_MAX_ITERS};
use golfopt_core::synthgen::{generate_traces, SyntheticPlayerParams};

fn main() {
    let text = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/desk_par4.hole")).unwrap();
    let raster = HoleRaster::parse(&text).unwrap();
    let disc = Discretization {
        n_directions: 36,
        distance_step: 400.0,
        realizations: 10,
    };
    let t = Instant::now();
    let params = SyntheticPlayerParams::tour_player("desk_player");
    let traces = generate_traces(&params, 20_000, &mut rng_for(7, &[])).unwrap();
    let (profile, _) = build_profile(
        "desk_player",
        &traces.records,
        &extract_putts(&traces.records),
        disc.distance_step,
        disc.realizations,
        7,
    )
    .unwrap();
    println!("profile {:?}", t.elapsed());
    for (s, l) in &profile.surfaces {
        println!(
            "{s:?} max {} reach {} entries {}",
            l.max_target_distance,
            l.max_reach,
            l.ladder.len()
        );
    }
    let t = Instant::now();
    let built = build_instance(&raster, &LadderSampler::new(&profile), &profile.putting, &disc, 7).unwrap();
    println!(
        "build {:?}: {} states {} actions {} transitions",
        t.elapsed(),
        built.instance.n_states(),
        built.instance.n_actions(),
        built.instance.n_transitions()
    );
    let t = Instant::now();
    let sol = value_iteration(&built.instance, DEFAULT_EPSILON, DEFAULT_MAX_ITERS).unwrap();
    println!(
        "vi {:?} iters {} tee {}",
        t.elapsed(),
        sol.iterations,
        sol.values[built.tee_state()]
    );
    let t = Instant::now();
    let v = evaluate_policy(&built.instance, &sol.policy).unwrap();
    println!("eval {:?} tee {}", t.elapsed(), v[built.tee_state()]);
}

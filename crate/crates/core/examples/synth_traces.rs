//! Writes synthetic tour-player traces as CSV to stdout.
//!
//! Usage: synth_traces [player_id] [n_shots] [seed]

use golfopt_core::seeding::rng_for;
use golfopt_core::skills::write_records_csv;
use golfopt_core::synthgen::{generate_traces, SyntheticPlayerParams};

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let player = args.first().map_or("sam_tour", String::as_str);
    let n: usize = args.get(1).map_or(20_000, |s| s.parse().expect("n_shots"));
    let seed: u64 = args.get(2).map_or(1, |s| s.parse().expect("seed"));
    let traces = generate_traces(&SyntheticPlayerParams::tour_player(player), n, &mut rng_for(seed, &[])).unwrap();
    write_records_csv(std::io::stdout().lock(), &traces.records).unwrap();
}

//! Writes the desk-scale par 4 generated from its recorded seed.
//!
//! `cargo run -p golfopt-core --example desk_fixture > crates/core/fixtures/desk_par4.hole`

use golfopt_core::seeding::rng_for;
use golfopt_core::synthgen::{generate_hole, HoleSpec, DESK_PAR4_SEED};

fn main() {
    let hole = generate_hole(&HoleSpec::desk_par4(), &mut rng_for(DESK_PAR4_SEED, &[])).expect("desk hole");
    print!("{}", hole.serialize());
}

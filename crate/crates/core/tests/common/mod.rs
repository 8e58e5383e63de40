#![allow(dead_code)]

use std::path::PathBuf;

use golfopt_core::builder::{build_instance, BuiltHole, Discretization, LadderSampler};
use golfopt_core::course::HoleRaster;
use golfopt_core::geometry::CellCoord;
use golfopt_core::seeding::{rng_for, SimRng};
use golfopt_core::skills::{
    build_profile, extract_putts, LadderEntry, ProfileFile, PuttingModel, Surface, SurfaceLadder,
};
use golfopt_core::ssp::{Policy, SspInstance, SspInstanceBuilder};
use golfopt_core::synthgen::{generate_traces, SyntheticPlayerParams};
use rand::Rng;

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

pub fn load_hole(name: &str) -> HoleRaster {
    HoleRaster::parse(&std::fs::read_to_string(fixture_path(name)).unwrap()).unwrap()
}

/// Cells on the segment between two cell centres by exact rational
/// arithmetic: step the major axis one cell at a time and round the exact
/// minor coordinate half up.
pub fn reference_line(a: CellCoord, b: CellCoord) -> Vec<CellCoord> {
    let (r0, c0, r1, c1) = (a.row as i64, a.col as i64, b.row as i64, b.col as i64);
    let (dr, dc) = (r1 - r0, c1 - c0);
    if dr == 0 && dc == 0 {
        return vec![a];
    }
    let col_major = dc.abs() >= dr.abs();
    let (maj0, min0, dmaj, dmin) = if col_major { (c0, r0, dc, dr) } else { (r0, c0, dr, dc) };
    let den = dmaj.abs();
    let sign = dmaj.signum();
    (0..=den)
        .map(|i| {
            let major = maj0 + sign * i;
            // minor = min0 + i * dmin / den, rounded as floor(x + 1/2).
            let num = 2 * (min0 * den + i * dmin) + den;
            let minor = num.div_euclid(2 * den);
            if col_major {
                CellCoord::new(minor as usize, major as usize)
            } else {
                CellCoord::new(major as usize, minor as usize)
            }
        })
        .collect()
}

/// Random instance: every state has `1..=max_actions` actions with costs in
/// `[1, 3]` and up to three successors. The first action of each state
/// keeps at least 10% of its mass on the target; the others may keep none.
pub fn random_instance(n: usize, max_actions: usize, rng: &mut SimRng) -> SspInstance {
    let mut b = SspInstanceBuilder::new(n);
    for s in 0..n {
        let k = rng.random_range(1..=max_actions);
        for a in 0..k {
            let cost = rng.random_range(1.0..3.0);
            let target = if a == 0 || rng.random_bool(0.6) {
                rng.random_range(0.1..0.9)
            } else {
                0.0
            };
            let m = rng.random_range(1..=3usize);
            let weights: Vec<f64> = (0..m).map(|_| rng.random_range(0.1..1.0)).collect();
            let total: f64 = weights.iter().sum();
            let mut row: Vec<(usize, f64)> = Vec::new();
            for w in weights {
                let to = rng.random_range(0..n);
                let p = (1.0 - target) * w / total;
                match row.iter_mut().find(|(t, _)| *t == to) {
                    Some(e) => e.1 += p,
                    None => row.push((to, p)),
                }
            }
            b.push_action(s, cost, row).unwrap();
        }
    }
    b.finish().unwrap()
}

/// Values of `policy` by dense Gauss-Jordan elimination on `(I - Q) v = c`.
/// `None` when the system is singular, i.e. the policy is improper.
pub fn dense_policy_values(inst: &SspInstance, policy: &Policy) -> Option<Vec<f64>> {
    let n = inst.n_states();
    let mut m = vec![vec![0.0; n + 1]; n];
    for s in 0..n {
        let a = policy.action(s);
        m[s][s] += 1.0;
        for (t, p) in inst.transitions(a) {
            m[s][t] -= p;
        }
        m[s][n] = inst.cost(a);
    }
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))?;
        if m[piv][col].abs() < 1e-10 {
            return None;
        }
        m.swap(col, piv);
        let p = m[col][col];
        for x in m[col].iter_mut() {
            *x /= p;
        }
        for row in 0..n {
            if row != col {
                let f = m[row][col];
                if f != 0.0 {
                    for k in col..=n {
                        m[row][k] -= f * m[col][k];
                    }
                }
            }
        }
    }
    let v: Vec<f64> = m.iter().map(|r| r[n]).collect();
    // A nearly singular system of an improper policy can still pivot.
    v.iter().all(|x| x.is_finite() && *x >= 0.0 && *x < 1e8).then_some(v)
}

/// Mean and standard error of the cost of `episodes` rollouts from `start`.
pub fn rollout(inst: &SspInstance, policy: &Policy, start: usize, episodes: usize, rng: &mut SimRng) -> (f64, f64) {
    let (mut sum, mut sq) = (0.0, 0.0);
    for _ in 0..episodes {
        let mut s = start;
        let mut cost = 0.0;
        loop {
            let a = policy.action(s);
            cost += inst.cost(a);
            let mut u: f64 = rng.random();
            let mut next = None;
            for (t, p) in inst.transitions(a) {
                if u < p {
                    next = Some(t);
                    break;
                }
                u -= p;
            }
            match next {
                Some(t) => s = t,
                None => break,
            }
        }
        sum += cost;
        sq += cost * cost;
    }
    let n = episodes as f64;
    let mean = sum / n;
    let var = (sq - n * mean * mean) / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// A profile that sends every shot exactly `step` inches straight ahead.
pub fn deterministic_profile(step: f64, realizations: usize, putting: PuttingModel) -> ProfileFile {
    let ladder = SurfaceLadder {
        max_target_distance: step,
        max_reach: step,
        ladder: vec![LadderEntry {
            target_distance: step,
            samples: vec![[0.0, step]; realizations],
        }],
    };
    let surfaces = Surface::SHOT_SURFACES.iter().map(|s| (*s, ladder.clone())).collect();
    ProfileFile {
        player_id: "robot".into(),
        distance_step: step,
        realizations,
        surfaces,
        putting,
    }
}

pub fn tour_putting() -> PuttingModel {
    SyntheticPlayerParams::tour_player("p").putting_model().unwrap()
}

/// Weekend player: wide dispersion, shorter range.
pub fn amateur_params(id: &str) -> SyntheticPlayerParams {
    let mut p = SyntheticPlayerParams::tour_player(id);
    p.lateral_sigma_ratio = 0.07;
    p.distance_sigma_ratio = 0.08;
    p.rough_multiplier = 1.2;
    p.bunker_multiplier = 1.5;
    p.max_target = [
        (Surface::Tee, 7000.0),
        (Surface::Fairway, 6000.0),
        (Surface::Rough, 5000.0),
        (Surface::Bunker, 3000.0),
    ]
    .into_iter()
    .collect();
    p.target_step = 250.0;
    p.target_step_min = 250.0;
    p
}

/// Profile inferred from `n_shots` synthetic shots of `params`.
pub fn inferred_profile(
    params: &SyntheticPlayerParams,
    n_shots: usize,
    step: f64,
    realizations: usize,
    seed: u64,
) -> ProfileFile {
    let traces = generate_traces(params, n_shots, &mut rng_for(seed, &[0])).unwrap();
    let pooled = extract_putts(&traces.records);
    build_profile(&params.player_id, &traces.records, &pooled, step, realizations, seed)
        .unwrap()
        .0
}

pub fn build(raster: &HoleRaster, profile: &ProfileFile, disc: Discretization, seed: u64) -> BuiltHole {
    build_instance(raster, &LadderSampler::new(profile), &profile.putting, &disc, seed).unwrap()
}

/// Runs `f` on a dedicated one-thread pool.
pub fn single_threaded<T: Send>(f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap()
        .install(f)
}

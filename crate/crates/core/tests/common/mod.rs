//! Shared helpers for the integration suites: a small seeded instance
//! sampler independent of any production generator.

use platepack_core::model::{Group, Instance};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Draws an instance with the given bounds. Temperatures are integers in
/// 50..=72, group sizes a random composition of the sample total.
pub fn random_instance(
    seed: u64,
    max_groups: usize,
    max_samples: u64,
    max_temps: usize,
) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let groups = rng.random_range(1..=max_groups);
    let samples = rng.random_range(groups as u64..=max_samples.max(groups as u64));
    let temps = rng.random_range(1..=max_temps.min(groups).min(23));

    let mut values: Vec<i64> = (50..=72).collect();
    for i in 0..temps {
        let j = rng.random_range(i..values.len());
        values.swap(i, j);
    }
    let temp_values = &values[..temps];

    // Composition of `samples` into `groups` positive parts.
    let mut cuts: Vec<u64> = Vec::with_capacity(groups + 1);
    cuts.push(0);
    while cuts.len() < groups {
        let c = rng.random_range(1..samples);
        if !cuts.contains(&c) {
            cuts.push(c);
        }
    }
    cuts.push(samples);
    cuts.sort_unstable();

    let mut code = 0u64;
    let list = (0..groups)
        .map(|i| {
            let size = (cuts[i + 1] - cuts[i]) as usize;
            let temp = if i < temps {
                temp_values[i]
            } else {
                temp_values[rng.random_range(0..temps)]
            };
            Group::new(
                format!("g{i:03}"),
                (0..size)
                    .map(|_| {
                        code += 1;
                        format!("s{code:05}")
                    })
                    .collect(),
                temp as f64,
            )
        })
        .collect();
    Instance::new(list)
}

//! Synthetic instance generator for benchmarks and property suites.
//!
//! Real work sessions vary a lot in sample and group counts while the
//! number of distinct temperatures stays narrow; the ranges default to
//! that envelope and every draw is deterministic per seed.

use std::fmt;
use std::ops::RangeInclusive;
use std::str::FromStr;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use platepack_core::model::{Group, Instance};

#[derive(Debug, Clone)]
pub struct GeneratorParams {
    pub samples: RangeInclusive<u64>,
    pub groups: RangeInclusive<usize>,
    /// Distinct temperature count.
    pub temperatures: RangeInclusive<usize>,
    /// Integer temperature values drawn without replacement.
    pub temp_values: RangeInclusive<i64>,
    pub seed: u64,
}

impl Default for GeneratorParams {
    fn default() -> Self {
        GeneratorParams {
            samples: 40..=3783,
            groups: 24..=201,
            temperatures: 10..=18,
            temp_values: 50..=72,
            seed: 0,
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GenError {
    #[error("range {0} is empty")]
    EmptyRange(&'static str),
    #[error("cannot draw {need} distinct temperatures from {have} values")]
    NotEnoughValues { need: usize, have: usize },
    #[error("group count {groups} cannot exceed sample count {samples}")]
    MoreGroupsThanSamples { groups: usize, samples: u64 },
}

/// Draws a random instance within the parameter ranges. Identical
/// parameters (including the seed) produce identical instances.
pub fn gen_instance(params: &GeneratorParams) -> Result<Instance, GenError> {
    if params.samples.is_empty() {
        return Err(GenError::EmptyRange("samples"));
    }
    if params.groups.is_empty() {
        return Err(GenError::EmptyRange("groups"));
    }
    if params.temperatures.is_empty() {
        return Err(GenError::EmptyRange("temperatures"));
    }
    if params.temp_values.is_empty() {
        return Err(GenError::EmptyRange("temp-values"));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let samples = rng.random_range(params.samples.clone());
    // Clamp the group draw so every sampled total stays feasible.
    let groups_hi = (*params.groups.end()).min(samples as usize);
    if *params.groups.start() > groups_hi {
        return Err(GenError::MoreGroupsThanSamples {
            groups: *params.groups.start(),
            samples,
        });
    }
    let groups = rng.random_range(*params.groups.start()..=groups_hi);
    let value_count = (params.temp_values.end() - params.temp_values.start() + 1) as usize;
    let max_temps = *params.temperatures.end();
    if *params.temperatures.start() > value_count || *params.temperatures.start() > groups {
        return Err(GenError::NotEnoughValues {
            need: *params.temperatures.start(),
            have: value_count.min(groups),
        });
    }
    let temps = rng.random_range(*params.temperatures.start()..=max_temps.min(value_count).min(groups));

    // Distinct temperature values: partial shuffle of the value range.
    let mut values: Vec<i64> = params.temp_values.clone().collect();
    for i in 0..temps {
        let j = rng.random_range(i..values.len());
        values.swap(i, j);
    }

    // Group sizes: a random composition of `samples` into positive parts.
    let mut cuts = vec![0u64, samples];
    while cuts.len() < groups + 1 {
        let c = rng.random_range(1..samples);
        if !cuts.contains(&c) {
            cuts.push(c);
        }
    }
    cuts.sort_unstable();

    // Every drawn temperature appears at least once; order is shuffled so
    // sizes do not correlate with temperature.
    let mut assignment: Vec<usize> = (0..groups)
        .map(|i| if i < temps { i } else { rng.random_range(0..temps) })
        .collect();
    for i in (1..assignment.len()).rev() {
        let j = rng.random_range(0..=i);
        assignment.swap(i, j);
    }

    let id_width = groups.to_string().len();
    let code_width = samples.to_string().len();
    let mut code = 0u64;
    let list = (0..groups)
        .map(|i| {
            let size = (cuts[i + 1] - cuts[i]) as usize;
            Group::new(
                format!("g{:0width$}", i + 1, width = id_width),
                (0..size)
                    .map(|_| {
                        code += 1;
                        format!("s{:0width$}", code, width = code_width)
                    })
                    .collect(),
                values[assignment[i]] as f64,
            )
        })
        .collect();
    Ok(Instance::new(list))
}

/// Inclusive range syntax for CLI flags: `40` or `40..200`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RangeArg(pub u64, pub u64);

impl FromStr for RangeArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parse = |t: &str| {
            t.parse::<u64>()
                .map_err(|_| format!("bad number {t:?} in range"))
        };
        match s.split_once("..") {
            Some((lo, hi)) => {
                let (lo, hi) = (parse(lo)?, parse(hi)?);
                if lo > hi {
                    return Err(format!("empty range {s:?}"));
                }
                Ok(RangeArg(lo, hi))
            }
            None => {
                let v = parse(s)?;
                Ok(RangeArg(v, v))
            }
        }
    }
}

impl fmt::Display for RangeArg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 == self.1 {
            write!(f, "{}", self.0)
        } else {
            write!(f, "{}..{}", self.0, self.1)
        }
    }
}

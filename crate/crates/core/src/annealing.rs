//! Simulated-annealing driver with lexicographic acceptance.
//!
//! The outer loop restarts the control temperature `max_iter` times; the
//! inner loop cools geometrically from `t_max` to `t_min`. A neighbor that
//! uses fewer plates, or the same plates and no more wells, replaces the
//! current solution outright; a worse neighbor replaces it with
//! probability `exp(-delta / T)` where delta is the increase on the
//! deciding cost component.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::constructive::build_initial;
use crate::model::{CostVector, Instance, PlateGeometry, Solution};
use crate::neighborhood::{apply_movement, MoveKind};

/// Annealing schedule and move-probability configuration.
#[derive(Debug, Clone)]
pub struct SaParams {
    /// Initial control temperature.
    pub t_max: f64,
    /// The inner loop stops once the control temperature falls below this.
    pub t_min: f64,
    /// Geometric cooling factor, in (0, 1).
    pub alpha: f64,
    /// Outer iterations; each restarts the temperature at `t_max`.
    pub max_iter: u32,
    /// Probability of drawing the strip-exchange move.
    pub se_prob: f64,
    /// RNG seed; identical seeds reproduce runs exactly.
    pub seed: u64,
    /// Multiplier applied to plate-count increases before the acceptance
    /// test. 1 uses the raw count difference.
    pub plate_delta_scale: f64,
}

impl Default for SaParams {
    fn default() -> Self {
        SaParams {
            t_max: 100.0,
            t_min: 1e-10,
            alpha: 0.9,
            max_iter: 1000,
            se_prob: 0.9,
            seed: 0,
            plate_delta_scale: 1.0,
        }
    }
}

impl SaParams {
    pub fn validate(&self) -> Result<(), String> {
        if self.t_min.is_nan() || self.t_max.is_nan() || self.t_min <= 0.0 || self.t_max <= self.t_min {
            return Err(format!(
                "need 0 < t_min < t_max, got t_min={} t_max={}",
                self.t_min, self.t_max
            ));
        }
        if self.alpha.is_nan() || self.alpha <= 0.0 || self.alpha >= 1.0 {
            return Err(format!("alpha must be in (0, 1), got {}", self.alpha));
        }
        if !(0.0..=1.0).contains(&self.se_prob) {
            return Err(format!("se_prob must be in [0, 1], got {}", self.se_prob));
        }
        if self.max_iter < 1 {
            return Err("max_iter must be at least 1".into());
        }
        if self.plate_delta_scale.is_nan() || self.plate_delta_scale <= 0.0 {
            return Err(format!(
                "plate_delta_scale must be positive, got {}",
                self.plate_delta_scale
            ));
        }
        Ok(())
    }

    /// Number of inner cooling steps per outer iteration:
    /// `ceil(ln(t_min / t_max) / ln(alpha))`.
    pub fn cooling_steps(&self) -> u64 {
        ((self.t_min / self.t_max).ln() / self.alpha.ln()).ceil() as u64
    }
}

/// Probability of accepting a cost increase `delta` at control
/// temperature `t`: `exp(-delta / t)`, clamped to [0, 1].
pub fn acceptance_probability(delta: f64, t: f64) -> f64 {
    debug_assert!(delta > 0.0 && t > 0.0);
    (-delta / t).exp().clamp(0.0, 1.0)
}

/// Keeps the lexicographically better solution; ties keep the incumbent.
pub fn update_best(candidate: Solution, best: Solution) -> Solution {
    if candidate.cost_vector() < best.cost_vector() {
        candidate
    } else {
        best
    }
}

/// One accepted step of a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceStep {
    pub iteration: u32,
    pub temperature: f64,
    pub cost: CostVector,
    pub kind: MoveKind,
}

/// Observability record of a run: accepted steps and the best-so-far cost
/// timeline (step index, cost), which is lexicographically non-increasing.
#[derive(Debug, Clone, Default)]
pub struct AnnealTrace {
    pub accepted: Vec<TraceStep>,
    pub best_timeline: Vec<(u64, CostVector)>,
    pub total_steps: u64,
    /// True when no feasible move existed and the run stopped before the
    /// schedule was exhausted.
    pub terminated_early: bool,
}

impl AnnealTrace {
    pub fn best_cost(&self) -> Option<CostVector> {
        self.best_timeline.last().map(|&(_, c)| c)
    }
}

/// Runs the annealer from the constructive initial solution and returns
/// the best solution found together with its trace.
///
/// Panics on invalid parameters; validate them at the boundary.
pub fn anneal(inst: &Instance, geom: &PlateGeometry, params: &SaParams) -> (Solution, AnnealTrace) {
    if let Err(msg) = params.validate() {
        panic!("invalid annealing parameters: {msg}");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let initial = build_initial(inst, geom);
    let mut trace = AnnealTrace::default();

    let mut best_cost = initial.cost_vector();
    let mut best = initial.clone();
    trace.best_timeline.push((0, best_cost));

    let mut current = initial;
    let mut current_cost = best_cost;

    'outer: for iteration in 0..params.max_iter {
        let mut t = params.t_max;
        while t >= params.t_min {
            trace.total_steps += 1;
            let Some(outcome) = apply_movement(inst, &current, geom, params.se_prob, &mut rng)
            else {
                trace.terminated_early = true;
                break 'outer;
            };
            let new_cost = outcome.solution.cost_vector();

            if new_cost < best_cost {
                best = outcome.solution.clone();
                best_cost = new_cost;
                trace.best_timeline.push((trace.total_steps, new_cost));
            }

            let accept = if new_cost.plates < current_cost.plates {
                true
            } else if new_cost.plates == current_cost.plates {
                if new_cost.wells <= current_cost.wells {
                    true
                } else {
                    let delta = (new_cost.wells - current_cost.wells) as f64;
                    rng.random::<f64>() < acceptance_probability(delta, t)
                }
            } else {
                let delta =
                    (new_cost.plates - current_cost.plates) as f64 * params.plate_delta_scale;
                rng.random::<f64>() < acceptance_probability(delta, t)
            };

            if accept {
                current = outcome.solution;
                current_cost = new_cost;
                trace.accepted.push(TraceStep {
                    iteration,
                    temperature: t,
                    cost: new_cost,
                    kind: outcome.kind,
                });
            }

            t *= params.alpha;
        }
    }

    (best, trace)
}

/// Best of `restarts` independent runs, seeded `seed, seed + 1, ...` and
/// executed on separate threads. Ties go to the lowest restart index, so
/// the result does not depend on scheduling.
pub fn anneal_restarts(
    inst: &Instance,
    geom: &PlateGeometry,
    params: &SaParams,
    restarts: u32,
) -> (Solution, AnnealTrace) {
    assert!(restarts >= 1);
    if restarts == 1 {
        return anneal(inst, geom, params);
    }
    let mut runs: Vec<(Solution, AnnealTrace)> = Vec::with_capacity(restarts as usize);
    std::thread::scope(|scope| {
        let handles: Vec<_> = (0..restarts)
            .map(|r| {
                let p = SaParams {
                    seed: params.seed.wrapping_add(r as u64),
                    ..params.clone()
                };
                scope.spawn(move || anneal(inst, geom, &p))
            })
            .collect();
        for h in handles {
            runs.push(h.join().expect("annealing thread panicked"));
        }
    });
    runs.into_iter()
        .reduce(|best, run| {
            if run.0.cost_vector() < best.0.cost_vector() {
                run
            } else {
                best
            }
        })
        .expect("at least one restart")
}

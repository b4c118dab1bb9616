//! Exhaustive optimum for tiny instances; ground truth for the heuristics
//! and for ILP round-trips.
//!
//! The search assigns each group a vector of per-plate sample counts.
//! Wells within a strip are interchangeable and same-temperature wells
//! can be packed into minimal strips, so the lexicographic cost depends
//! only on that split: plates = plates touched, wells = samples plus one
//! reagent per (group, plate) pair. A plate is feasible when its
//! per-temperature strip demand plus the empty strips needed to bridge
//! temperature gaps fit the plate, the same virtual-temperature rule the
//! heuristics use.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::model::{
    Celsius, CostVector, Instance, PlateAssignment, PlateGeometry, Solution, StripAssignment,
};

/// Hard caps that keep the search at desk scale.
#[derive(Debug, Clone)]
pub struct ExactLimits {
    pub max_plates: usize,
    pub max_groups: usize,
    pub max_samples: u64,
    /// Assignments explored before the search gives up on proving
    /// optimality and returns its best incumbent.
    pub node_budget: u64,
}

impl Default for ExactLimits {
    fn default() -> Self {
        ExactLimits {
            max_plates: 2,
            max_groups: 6,
            max_samples: 24,
            node_budget: 5_000_000,
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ExactError {
    #[error("instance has {0} groups, limit is {1}")]
    TooManyGroups(usize, usize),
    #[error("instance has {0} samples, limit is {1}")]
    TooManySamples(u64, u64),
    #[error("no feasible layout within {0} plates")]
    NoLayout(usize),
}

#[derive(Debug, Clone)]
pub struct ExactResult {
    pub solution: Solution,
    pub cost: CostVector,
    /// False when the node budget ran out; the solution is then only the
    /// best one found, not a proven optimum.
    pub proven_optimal: bool,
    pub nodes: u64,
}

/// Per-plate occupied wells keyed by temperature (samples + reagents).
#[derive(Debug, Clone, Default)]
struct PlateLoad {
    temp_wells: BTreeMap<Celsius, u64>,
}

impl PlateLoad {
    fn add(&mut self, temp: Celsius, wells: u64) {
        *self.temp_wells.entry(temp).or_insert(0) += wells;
    }

    fn remove(&mut self, temp: Celsius, wells: u64) {
        let e = self.temp_wells.get_mut(&temp).expect("removing what was added");
        *e -= wells;
        if *e == 0 {
            self.temp_wells.remove(&temp);
        }
    }

    fn is_empty(&self) -> bool {
        self.temp_wells.is_empty()
    }

    /// Strips the plate needs: one run of `ceil(wells / strip)` strips per
    /// temperature plus bridge empties between sorted neighbors.
    fn strips_needed(&self, geom: &PlateGeometry) -> usize {
        let per = geom.wells_per_strip as u64;
        let mut needed = 0usize;
        let mut prev: Option<Celsius> = None;
        for (&temp, &wells) in &self.temp_wells {
            needed += wells.div_ceil(per) as usize;
            if let Some(p) = prev {
                needed += bridge_empties(p, temp, geom.max_temp_step);
            }
            prev = Some(temp);
        }
        needed
    }

    fn fits(&self, geom: &PlateGeometry) -> bool {
        self.strips_needed(geom) <= geom.strips_per_plate
    }
}

/// Empty strips needed between two set temperatures under the rule
/// `|a - b| <= step * (empties + 1)`.
fn bridge_empties(a: Celsius, b: Celsius, step: f64) -> usize {
    let gap = a.abs_diff(b);
    if gap <= step + 1e-9 {
        return 0;
    }
    ((gap - 1e-9) / step).ceil() as usize - 1
}

/// Per-group placement: positive sample counts on the touched plates.
type Split = Vec<(usize, u64)>;

struct Search<'a> {
    inst: &'a Instance,
    geom: &'a PlateGeometry,
    order: Vec<usize>,
    max_plates: usize,
    budget: u64,
    nodes: u64,
    loads: Vec<PlateLoad>,
    spans: u64,
    assignment: Vec<Split>,
    best: Option<(CostVector, Vec<Split>)>,
}

/// Finds a provably optimal layout for the instance, or the best found
/// within the node budget (flagged).
pub fn exact_solve(
    inst: &Instance,
    geom: &PlateGeometry,
    limits: &ExactLimits,
) -> Result<ExactResult, ExactError> {
    if inst.group_count() > limits.max_groups {
        return Err(ExactError::TooManyGroups(
            inst.group_count(),
            limits.max_groups,
        ));
    }
    if inst.total_samples() > limits.max_samples {
        return Err(ExactError::TooManySamples(
            inst.total_samples(),
            limits.max_samples,
        ));
    }
    if inst.group_count() == 0 {
        return Ok(ExactResult {
            solution: Solution::default(),
            cost: CostVector::new(0, 0),
            proven_optimal: true,
            nodes: 0,
        });
    }

    let mut search = Search {
        inst,
        geom,
        order: crate::constructive::group_processing_order(inst),
        max_plates: limits.max_plates,
        budget: limits.node_budget,
        nodes: 0,
        loads: vec![PlateLoad::default(); limits.max_plates],
        spans: 0,
        assignment: vec![Vec::new(); inst.group_count()],
        best: None,
    };
    search.descend(0);

    let proven = search.nodes < search.budget;
    let (cost, assignment) = search
        .best
        .ok_or(ExactError::NoLayout(limits.max_plates))?;
    let solution = build_solution(inst, geom, &search.order, &assignment);
    debug_assert_eq!(solution.cost_vector(), cost);
    debug_assert!(crate::model::validate_solution(inst, &solution, geom)
        .map(|r| r.is_feasible())
        .unwrap_or(false));
    Ok(ExactResult {
        solution,
        cost,
        proven_optimal: proven,
        nodes: search.nodes,
    })
}

impl Search<'_> {
    fn descend(&mut self, pos: usize) {
        if self.nodes >= self.budget {
            return;
        }
        if pos == self.order.len() {
            let cost = self.current_cost();
            if self.best.as_ref().is_none_or(|(b, _)| cost < *b) {
                self.best = Some((cost, self.assignment.clone()));
            }
            return;
        }

        // Bound: final plates >= plates already used; final wells >=
        // samples + spans so far + one span per unassigned group.
        if let Some((best, _)) = &self.best {
            let plates_lb = self.used_plates() as u32;
            let wells_lb =
                (self.inst.total_samples() + self.spans + (self.order.len() - pos) as u64) as u32;
            if CostVector::new(plates_lb, wells_lb) >= *best {
                return;
            }
        }

        let group = self.order[pos];
        let n = self.inst.groups()[group].sample_count() as u64;
        let temp = self.inst.groups()[group].temperature;

        for split in splits(n, self.max_plates) {
            if !self.symmetry_ok(&split) {
                continue;
            }
            self.nodes += 1;
            if self.nodes >= self.budget {
                return;
            }
            // Apply: each touched plate takes count samples + 1 reagent.
            let mut feasible = true;
            for &(q, count) in &split {
                self.loads[q].add(temp, count + 1);
                if !self.loads[q].fits(self.geom) {
                    feasible = false;
                }
            }
            if feasible {
                self.spans += split.len() as u64;
                self.assignment[group] = split.clone();
                self.descend(pos + 1);
                self.assignment[group].clear();
                self.spans -= split.len() as u64;
            }
            for &(q, count) in &split {
                self.loads[q].remove(temp, count + 1);
            }
        }
    }

    fn used_plates(&self) -> usize {
        self.loads.iter().filter(|l| !l.is_empty()).count()
    }

    fn current_cost(&self) -> CostVector {
        CostVector::new(
            self.used_plates() as u32,
            (self.inst.total_samples() + self.spans) as u32,
        )
    }

    /// New plates must be opened in index order: the plates this split
    /// touches beyond the already-used prefix have to be the next indices.
    fn symmetry_ok(&self, split: &[(usize, u64)]) -> bool {
        let mut next_fresh = (0..self.max_plates)
            .find(|&q| self.loads[q].is_empty())
            .unwrap_or(self.max_plates);
        for &(q, _) in split {
            if self.loads[q].is_empty() {
                if q != next_fresh {
                    return false;
                }
                next_fresh = q + 1;
            }
        }
        true
    }
}

/// All ways to split `n` samples over up to `plates` plates, single-plate
/// placements first. Counts are positive on every touched plate and
/// touched plates are listed in index order.
fn splits(n: u64, plates: usize) -> Vec<Split> {
    let mut out = Vec::new();
    for parts in 1..=plates.min(n as usize) {
        emit_splits(n, parts, 0, plates, &mut Vec::new(), &mut out);
    }
    out
}

fn emit_splits(
    remaining: u64,
    parts: usize,
    from: usize,
    plates: usize,
    prefix: &mut Split,
    out: &mut Vec<Split>,
) {
    if parts == 1 {
        for q in from..plates {
            let mut v = prefix.clone();
            v.push((q, remaining));
            out.push(v);
        }
        return;
    }
    for q in from..=plates - parts {
        // Leave at least one sample for each later part.
        for count in 1..=remaining - (parts as u64 - 1) {
            prefix.push((q, count));
            emit_splits(remaining - count, parts - 1, q + 1, plates, prefix, out);
            prefix.pop();
        }
    }
}

/// Lays the winning split out as actual strips: temperatures ascending,
/// each temperature's groups packed into minimal strips, bridge empties
/// between runs, plates ordered by descending occupancy.
fn build_solution(
    inst: &Instance,
    geom: &PlateGeometry,
    order: &[usize],
    assignment: &[Split],
) -> Solution {
    let max_plate = assignment
        .iter()
        .flatten()
        .map(|&(q, _)| q)
        .max()
        .map(|q| q + 1)
        .unwrap_or(0);

    let mut plates = Vec::new();
    for q in 0..max_plate {
        // Temperature -> (group, samples) in canonical group order.
        let mut by_temp: BTreeMap<Celsius, Vec<(usize, u64)>> = BTreeMap::new();
        for &g in order {
            for &(plate, count) in &assignment[g] {
                if plate == q && count > 0 {
                    by_temp
                        .entry(inst.groups()[g].temperature)
                        .or_default()
                        .push((g, count));
                }
            }
        }
        if by_temp.is_empty() {
            continue;
        }

        let mut strips: Vec<StripAssignment> = Vec::new();
        let mut prev: Option<Celsius> = None;
        for (&temp, members) in &by_temp {
            if let Some(p) = prev {
                for _ in 0..bridge_empties(p, temp, geom.max_temp_step) {
                    strips.push(StripAssignment::empty());
                }
            }
            prev = Some(temp);
            strips.extend(pack_run(temp, members, geom));
        }
        while strips.len() < geom.strips_per_plate {
            strips.push(StripAssignment::empty());
        }
        debug_assert!(strips.len() <= geom.strips_per_plate);
        plates.push(PlateAssignment { strips });
    }

    plates.sort_by_key(|p| std::cmp::Reverse(p.occupied()));
    Solution { plates }
}

/// Packs one temperature run into exactly `ceil(wells / strip)` strips:
/// wells flow group by group, samples first, the reagent right after.
///
/// Single-sample groups go first: their two-well blocks start at even
/// offsets and never straddle a strip boundary. Larger blocks may
/// straddle; when their reagent would open a fresh strip it swaps with
/// the last sample, which for blocks of three or more wells always
/// leaves a sample behind in the reagent's strip.
fn pack_run(temp: Celsius, members: &[(usize, u64)], geom: &PlateGeometry) -> Vec<StripAssignment> {
    let cap = geom.wells_per_strip;
    let mut strips: Vec<StripAssignment> = Vec::new();
    let mut open = StripAssignment::empty();
    open.set_temperature(Some(temp));
    let mut used = 0u32;

    let mut ordered: Vec<(usize, u64)> = Vec::with_capacity(members.len());
    ordered.extend(members.iter().filter(|&&(_, n)| n == 1));
    ordered.extend(members.iter().filter(|&&(_, n)| n != 1));
    let members = ordered;

    let push_well = |strips: &mut Vec<StripAssignment>,
                     open: &mut StripAssignment,
                     used: &mut u32,
                     group: usize,
                     reagent: bool| {
        if *used == cap {
            let mut fresh = StripAssignment::empty();
            fresh.set_temperature(Some(temp));
            if reagent {
                // The reagent may not sit alone in the fresh strip. Swap it
                // with the group's last sample when another of its samples
                // stays behind; otherwise sample and reagent move together.
                open.remove_samples(group, 1);
                fresh.add_samples(group, 1);
                if open.samples_of(group) > 0 {
                    open.set_reagent(group, true);
                    *used = 1;
                } else {
                    fresh.set_reagent(group, true);
                    *used = 2;
                }
            } else {
                fresh.add_samples(group, 1);
                *used = 1;
            }
            strips.push(std::mem::replace(open, fresh));
            return;
        }
        if reagent {
            open.set_reagent(group, true);
        } else {
            open.add_samples(group, 1);
        }
        *used += 1;
    };

    for &(g, count) in &members {
        for _ in 0..count {
            push_well(&mut strips, &mut open, &mut used, g, false);
        }
        push_well(&mut strips, &mut open, &mut used, g, true);
    }
    if used > 0 {
        strips.push(open);
    }
    debug_assert!(
        strips.iter().map(|s| s.occupied()).sum::<u32>().div_ceil(cap) as usize == strips.len(),
        "run packing must stay minimal"
    );
    strips
}

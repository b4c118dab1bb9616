//! Neighborhood moves for the annealer: exchanging whole strips between
//! two plates, and consolidating a group's samples onto one plate.
//!
//! Both moves only ever return feasible solutions; an attempt that cannot
//! be made feasible is discarded and redrawn, up to a fixed retry budget.

use rand::Rng;

use crate::constructive::assign_sample;
use crate::model::{Instance, PlateGeometry, Solution};

/// Random draws per move kind before a call gives up on that kind.
pub const MOVE_RETRY_BUDGET: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MoveKind {
    StripExchange,
    Grouping,
}

/// A successfully applied move. The contained solution is feasible.
#[derive(Debug, Clone)]
pub struct MoveOutcome {
    pub solution: Solution,
    pub kind: MoveKind,
    /// The two plate positions (0-based) the move touched.
    pub plates: [usize; 2],
}

/// Swaps two whole strips (contents and temperature) between two distinct
/// plates. The strips may run at different temperatures; the move stands
/// only if both plates' ramps still hold and reagent bookkeeping can be
/// repaired within the plates' capacity.
pub fn strip_exchange<R: Rng + ?Sized>(
    sol: &Solution,
    geom: &PlateGeometry,
    rng: &mut R,
) -> Option<Solution> {
    strip_exchange_outcome(sol, geom, rng).map(|o| o.solution)
}

pub(crate) fn strip_exchange_outcome<R: Rng + ?Sized>(
    sol: &Solution,
    geom: &PlateGeometry,
    rng: &mut R,
) -> Option<MoveOutcome> {
    let plates = sol.plates.len();
    if plates < 2 {
        return None;
    }
    let strips = geom.strips_per_plate;
    for _ in 0..MOVE_RETRY_BUDGET {
        let pa = rng.random_range(0..plates);
        let sa = rng.random_range(0..strips);
        let pb_raw = rng.random_range(0..plates - 1);
        let pb = if pb_raw >= pa { pb_raw + 1 } else { pb_raw };
        let sb = rng.random_range(0..strips);
        if let Some(solution) = try_strip_exchange(sol, geom, (pa, sa), (pb, sb)) {
            return Some(MoveOutcome {
                solution,
                kind: MoveKind::StripExchange,
                plates: [pa, pb],
            });
        }
    }
    None
}

fn try_strip_exchange(
    sol: &Solution,
    geom: &PlateGeometry,
    (pa, sa): (usize, usize),
    (pb, sb): (usize, usize),
) -> Option<Solution> {
    // Ramp check before cloning anything.
    let swapped_a = sol.plates[pb].strips[sb].temperature_if_occupied();
    let swapped_b = sol.plates[pa].strips[sa].temperature_if_occupied();
    if !ramp_with_substitution(&sol.plates[pa], sa, swapped_a, geom)
        || !ramp_with_substitution(&sol.plates[pb], sb, swapped_b, geom)
    {
        return None;
    }

    let mut new = sol.clone();
    {
        let (first, second) = if pa < pb {
            let (lo, hi) = new.plates.split_at_mut(pb);
            (&mut lo[pa], &mut hi[0])
        } else {
            let (lo, hi) = new.plates.split_at_mut(pa);
            (&mut hi[0], &mut lo[pb])
        };
        std::mem::swap(&mut first.strips[sa], &mut second.strips[sb]);
    }

    repair_reagents(&mut new, pa, sa, sol, pb, sb, geom)?;
    repair_reagents(&mut new, pb, sb, sol, pa, sa, geom)?;
    Some(new)
}

/// Ramp feasibility of a plate with one strip's temperature replaced,
/// without materializing the sequence.
fn ramp_with_substitution(
    plate: &crate::model::PlateAssignment,
    strip: usize,
    temp: Option<crate::model::Celsius>,
    geom: &PlateGeometry,
) -> bool {
    let mut last: Option<(usize, crate::model::Celsius)> = None;
    for (i, s) in plate.strips.iter().enumerate() {
        let t = if i == strip {
            temp
        } else {
            s.temperature_if_occupied()
        };
        if let Some(t) = t {
            if let Some((j, prev)) = last {
                if t.abs_diff(prev) > geom.max_temp_step * (i - j) as f64 + 1e-9 {
                    return false;
                }
            }
            last = Some((i, t));
        }
    }
    true
}

/// Restores the one-reagent-per-(group, plate) rule on `plate` after the
/// strip at `arrived` changed hands. Only groups in the two exchanged
/// strips can be affected: a missing reagent is added in a strip holding
/// the group's samples (the swapped strip first) if a well is free; a
/// duplicate brought in by the swap is dropped from the swapped strip.
/// Returns None when a missing reagent cannot be placed.
#[allow(clippy::too_many_arguments)]
fn repair_reagents(
    sol: &mut Solution,
    plate_idx: usize,
    arrived: usize,
    old: &Solution,
    old_plate: usize,
    old_strip: usize,
    geom: &PlateGeometry,
) -> Option<()> {
    // Groups touched on this plate: those in the arrived strip (previously
    // `old.plates[old_plate].strips[old_strip]`) and those that departed
    // with the strip that used to sit at `arrived`.
    let affected = |g: usize| -> bool {
        let arrived_strip = &old.plates[old_plate].strips[old_strip];
        let departed_strip = &old.plates[plate_idx].strips[arrived];
        arrived_strip.samples_of(g) > 0
            || arrived_strip.has_reagent(g)
            || departed_strip.samples_of(g) > 0
            || departed_strip.has_reagent(g)
    };
    let mut groups: Vec<usize> = old.plates[old_plate].strips[old_strip]
        .entries()
        .iter()
        .chain(old.plates[plate_idx].strips[arrived].entries())
        .map(|e| e.group)
        .collect();
    groups.sort_unstable();
    groups.dedup();

    for g in groups {
        debug_assert!(affected(g));
        let plate = &sol.plates[plate_idx];
        let samples = plate.group_samples(g);
        let reagents = plate.reagent_count(g);
        if samples > 0 && reagents == 0 {
            let candidates =
                std::iter::once(arrived).chain((0..plate.strips.len()).filter(|&s| s != arrived));
            let mut slot = None;
            for s in candidates {
                let strip = &plate.strips[s];
                if strip.samples_of(g) > 0 && strip.occupied() < geom.wells_per_strip {
                    slot = Some(s);
                    break;
                }
            }
            sol.plates[plate_idx].strips[slot?].set_reagent(g, true);
        } else if reagents > 1 {
            // At most two: the incumbent plus the one the swap brought in.
            debug_assert_eq!(reagents, 2);
            sol.plates[plate_idx].strips[arrived].set_reagent(g, false);
        }
    }
    Some(())
}

/// Consolidates a randomly chosen group onto one plate. A group spanning
/// several plates has two of them drawn and its samples joined on one,
/// evicting other groups to the second plate when space demands it; a
/// group sitting on a single plate may instead be relocated wholesale to
/// another plate.
pub fn grouping_move<R: Rng + ?Sized>(
    inst: &Instance,
    sol: &Solution,
    geom: &PlateGeometry,
    rng: &mut R,
) -> Option<Solution> {
    grouping_outcome(inst, sol, geom, rng).map(|o| o.solution)
}

pub(crate) fn grouping_outcome<R: Rng + ?Sized>(
    inst: &Instance,
    sol: &Solution,
    geom: &PlateGeometry,
    rng: &mut R,
) -> Option<MoveOutcome> {
    if sol.plates.len() < 2 || inst.group_count() == 0 {
        return None;
    }
    // Draws repeat quickly on small group and plate counts; evaluating a
    // failed (group, plates) combination once per call is enough.
    let mut failed: Vec<(usize, usize, usize)> = Vec::new();
    for _ in 0..MOVE_RETRY_BUDGET {
        let g = rng.random_range(0..inst.group_count());
        let holders: Vec<usize> = (0..sol.plates.len())
            .filter(|&q| sol.plates[q].has_group(g))
            .collect();
        let (key, result) = match holders.len() {
            0 => continue,
            1 => {
                let from = holders[0];
                let to_raw = rng.random_range(0..sol.plates.len() - 1);
                let to = if to_raw >= from { to_raw + 1 } else { to_raw };
                if failed.contains(&(g, from, to)) {
                    continue;
                }
                (
                    (g, from, to),
                    relocate_group(inst, sol, geom, g, from, to)
                        .map(|solution| (solution, [from, to])),
                )
            }
            _ => {
                let a = rng.random_range(0..holders.len());
                let b_raw = rng.random_range(0..holders.len() - 1);
                let b = if b_raw >= a { b_raw + 1 } else { b_raw };
                let (target, second) = (holders[a], holders[b]);
                if failed.contains(&(g, target, second)) {
                    continue;
                }
                (
                    (g, target, second),
                    consolidate_group(inst, sol, geom, g, target, second)
                        .map(|solution| (solution, [target, second])),
                )
            }
        };
        match result {
            Some((solution, plates)) => {
                return Some(MoveOutcome {
                    solution,
                    kind: MoveKind::Grouping,
                    plates,
                })
            }
            None => failed.push(key),
        }
    }
    None
}

/// Moves every sample of `group` from `from` to `to` (where the group has
/// no sample). No eviction; fails if the samples do not fit.
fn relocate_group(
    inst: &Instance,
    sol: &Solution,
    geom: &PlateGeometry,
    group: usize,
    from: usize,
    to: usize,
) -> Option<Solution> {
    let mut new = sol.clone();
    let count = take_group_off_plate(&mut new.plates[from], group);
    for _ in 0..count {
        if !assign_sample(inst, &mut new.plates[to], group, geom) {
            return None;
        }
    }
    Some(new)
}

/// Joins the group's samples from `second` onto `target`. When the target
/// lacks space, other groups are evicted from it to `second`, preferring
/// groups already present there, then groups whose temperature is closest
/// to a strip temperature on `second`, then smaller groups. Eviction is
/// wholesale per donor group and stops as soon as the samples fit.
fn consolidate_group(
    inst: &Instance,
    sol: &Solution,
    geom: &PlateGeometry,
    group: usize,
    target: usize,
    second: usize,
) -> Option<Solution> {
    let mut new = sol.clone();
    let mut to_place = take_group_off_plate(&mut new.plates[second], group);
    debug_assert!(to_place > 0);

    while to_place > 0 && assign_sample(inst, &mut new.plates[target], group, geom) {
        to_place -= 1;
    }
    if to_place == 0 {
        return Some(new);
    }

    for donor in donor_order(inst, &new, group, target, second) {
        if !eviction_can_help(inst, &new.plates[target], group, donor) {
            continue;
        }
        let snap_target = new.plates[target].clone();
        let snap_second = new.plates[second].clone();
        let moved = take_group_off_plate(&mut new.plates[target], donor);
        let mut ok = true;
        for _ in 0..moved {
            if !assign_sample(inst, &mut new.plates[second], donor, geom) {
                ok = false;
                break;
            }
        }
        if !ok {
            new.plates[target] = snap_target;
            new.plates[second] = snap_second;
            continue;
        }
        while to_place > 0 && assign_sample(inst, &mut new.plates[target], group, geom) {
            to_place -= 1;
        }
        if to_place == 0 {
            return Some(new);
        }
    }
    None
}

/// Removes all samples and the reagent of `group` from the plate,
/// releasing temperatures of strips that become empty. Returns the number
/// of samples removed.
fn take_group_off_plate(plate: &mut crate::model::PlateAssignment, group: usize) -> u32 {
    let mut removed = 0;
    for strip in &mut plate.strips {
        removed += strip.remove_samples(group, u32::MAX);
        strip.set_reagent(group, false);
        strip.normalize();
    }
    removed
}

/// Donor groups on `target` ordered by eviction preference.
fn donor_order(
    inst: &Instance,
    sol: &Solution,
    group: usize,
    target: usize,
    second: usize,
) -> Vec<usize> {
    let second_temps: Vec<crate::model::Celsius> = sol.plates[second]
        .strips
        .iter()
        .filter(|s| !s.is_empty())
        .filter_map(|s| s.temperature())
        .collect();
    let mut donors: Vec<usize> = (0..inst.group_count())
        .filter(|&h| h != group && sol.plates[target].has_group(h))
        .collect();
    donors.sort_by(|&a, &b| {
        let on_second = |h: usize| sol.plates[second].has_group(h);
        let temp_dist = |h: usize| {
            let t = inst.groups()[h].temperature;
            second_temps
                .iter()
                .map(|&st| t.abs_diff(st))
                .fold(f64::INFINITY, f64::min)
        };
        on_second(b)
            .cmp(&on_second(a))
            .then(temp_dist(a).total_cmp(&temp_dist(b)))
            .then(inst.groups()[a].sample_count().cmp(&inst.groups()[b].sample_count()))
            .then(a.cmp(&b))
    });
    donors
}

/// Quick filter: evicting `donor` can only create room for `group` if the
/// donor shares the group's temperature (freeing matching wells) or if
/// some strip would become empty, opening it to the group under the ramp
/// rule.
fn eviction_can_help(
    inst: &Instance,
    target: &crate::model::PlateAssignment,
    group: usize,
    donor: usize,
) -> bool {
    if inst.groups()[donor].temperature == inst.groups()[group].temperature {
        return true;
    }
    target.strips.iter().any(|s| {
        let donor_wells = s.samples_of(donor) + s.has_reagent(donor) as u32;
        donor_wells > 0 && donor_wells == s.occupied()
    })
}

/// Draws a move kind (strip exchange with probability `se_prob`, grouping
/// otherwise) and applies it; if the drawn kind yields nothing feasible
/// the other kind is attempted. Returns None only when neither kind can
/// produce a neighbor.
pub fn apply_movement<R: Rng + ?Sized>(
    inst: &Instance,
    sol: &Solution,
    geom: &PlateGeometry,
    se_prob: f64,
    rng: &mut R,
) -> Option<MoveOutcome> {
    let exchange_first = rng.random::<f64>() < se_prob;
    let order = if exchange_first {
        [MoveKind::StripExchange, MoveKind::Grouping]
    } else {
        [MoveKind::Grouping, MoveKind::StripExchange]
    };
    for kind in order {
        let outcome = match kind {
            MoveKind::StripExchange => strip_exchange_outcome(sol, geom, rng),
            MoveKind::Grouping => grouping_outcome(inst, sol, geom, rng),
        };
        if outcome.is_some() {
            return outcome;
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructive::build_initial;
    use crate::model::{validate_solution, Celsius, Group};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn geom() -> PlateGeometry {
        PlateGeometry::default()
    }

    fn codes(prefix: &str, n: usize) -> Vec<String> {
        (0..n).map(|i| format!("{prefix}{i}")).collect()
    }

    /// Two plates forced by a huge per-temperature load; plenty of moves.
    fn two_plate_instance() -> Instance {
        Instance::new(vec![
            Group::new("a", codes("a", 40), 60.0),
            Group::new("b", codes("b", 40), 60.0),
            Group::new("c", codes("c", 40), 60.0),
            Group::new("d", codes("d", 20), 62.0),
        ])
    }

    #[test]
    fn swapping_empty_strips_changes_nothing() {
        let inst = Instance::new(vec![Group::new("a", codes("a", 2), 60.0)]);
        let g = geom();
        let mut sol = build_initial(&inst, &g);
        sol.plates.push(crate::model::PlateAssignment::empty(&g));
        // Strips 2..6 of plate 1 and all of plate 2 are empty.
        let new = try_strip_exchange(&sol, &g, (0, 3), (1, 4)).unwrap();
        assert_eq!(new, sol);
    }

    #[test]
    fn exchange_rejects_ramp_breaks() {
        let inst = Instance::new(vec![
            Group::new("a", codes("a", 1), 60.0),
            Group::new("b", codes("b", 1), 60.0),
            Group::new("c", codes("c", 1), 70.0),
        ]);
        let g = geom();
        // Plate 1: strips 1-2 at 60. Plate 2: strip 1 at 70.
        let mut p1 = crate::model::PlateAssignment::empty(&g);
        for (i, grp) in [(0usize, 0usize), (1, 1)] {
            p1.strips[i].set_temperature(Some(Celsius(60.0)));
            p1.strips[i].add_samples(grp, 1);
            p1.strips[i].set_reagent(grp, true);
        }
        let mut p2 = crate::model::PlateAssignment::empty(&g);
        p2.strips[0].set_temperature(Some(Celsius(70.0)));
        p2.strips[0].add_samples(2, 1);
        p2.strips[0].set_reagent(2, true);
        let sol = Solution {
            plates: vec![p1, p2],
        };
        assert!(validate_solution(&inst, &sol, &g).unwrap().is_feasible());
        // Bringing the 70-degree strip next to a 60-degree one fails.
        assert!(try_strip_exchange(&sol, &g, (0, 1), (1, 0)).is_none());
        // Swapping it into a detached position works.
        let new = try_strip_exchange(&sol, &g, (0, 3), (1, 0)).unwrap();
        assert!(validate_solution(&inst, &new, &g).unwrap().is_feasible());
    }

    #[test]
    fn exchange_preserves_wells_without_reagent_repair() {
        // Each group sits whole in one strip with its reagent, so swaps
        // never trigger repair and the well count is exactly preserved.
        let (inst, sol) = always_movable();
        let g = geom();
        let wells = sol.occupied_wells();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let new = strip_exchange(&sol, &g, &mut rng).expect("always movable");
            let report = validate_solution(&inst, &new, &g).unwrap();
            assert!(report.is_feasible(), "{report}");
            assert_eq!(new.occupied_wells(), wells);
            for grp in 0..inst.group_count() {
                assert_eq!(new.sample_wells_of(grp), sol.sample_wells_of(grp));
            }
        }
    }

    #[test]
    fn exchange_on_dense_solutions_only_bends_wells_by_repair() {
        // Mixed strips from the constructive heuristic: exchanges may add
        // or drop reagent wells while repairing, never more than one per
        // affected plate, and sample counts never change.
        let inst = two_plate_instance();
        let g = geom();
        let sol = build_initial(&inst, &g);
        assert!(sol.plates.len() >= 2);
        let wells = sol.occupied_wells();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            if let Some(new) = strip_exchange(&sol, &g, &mut rng) {
                let report = validate_solution(&inst, &new, &g).unwrap();
                assert!(report.is_feasible(), "{report}");
                let delta = new.occupied_wells() as i64 - wells as i64;
                assert!(delta.abs() <= 2);
                for grp in 0..inst.group_count() {
                    assert_eq!(new.sample_wells_of(grp), sol.sample_wells_of(grp));
                }
            }
        }
    }

    #[test]
    fn grouping_consolidates_a_split_group() {
        // One group split 1+1 across two plates, room on the target.
        let inst = Instance::new(vec![
            Group::new("a", codes("a", 29), 60.0),
            Group::new("b", codes("b", 2), 60.0),
        ]);
        let g = geom();
        let mut p1 = crate::model::PlateAssignment::empty(&g);
        p1.strips[0].set_temperature(Some(Celsius(60.0)));
        p1.strips[0].add_samples(0, 15);
        p1.strips[0].set_reagent(0, true);
        p1.strips[1].set_temperature(Some(Celsius(60.0)));
        p1.strips[1].add_samples(0, 14);
        p1.strips[1].add_samples(1, 1);
        p1.strips[1].set_reagent(1, true);
        let mut p2 = crate::model::PlateAssignment::empty(&g);
        p2.strips[0].set_temperature(Some(Celsius(60.0)));
        p2.strips[0].add_samples(1, 1);
        p2.strips[0].set_reagent(1, true);
        let sol = Solution {
            plates: vec![p1, p2],
        };
        assert!(validate_solution(&inst, &sol, &g).unwrap().is_feasible());
        assert_eq!(sol.occupied_wells(), 34); // 31 samples + 3 reagents

        let new = consolidate_group(&inst, &sol, &g, 1, 0, 1).unwrap();
        let report = validate_solution(&inst, &new, &g).unwrap();
        assert!(report.is_feasible(), "{report}");
        assert_eq!(new.plates_containing(1), 1);
        assert_eq!(new.occupied_wells(), 33); // exactly one reagent saved
    }

    #[test]
    fn grouping_needs_at_least_two_plates() {
        let inst = Instance::new(vec![Group::new("a", codes("a", 3), 60.0)]);
        let g = geom();
        let sol = build_initial(&inst, &g);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(grouping_move(&inst, &sol, &g, &mut rng).is_none());
        assert!(strip_exchange(&sol, &g, &mut rng).is_none());
        assert!(apply_movement(&inst, &sol, &g, 0.9, &mut rng).is_none());
    }

    #[test]
    fn moves_keep_solutions_feasible() {
        let inst = two_plate_instance();
        let g = geom();
        let mut sol = build_initial(&inst, &g);
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let mut applied = 0;
        for _ in 0..400 {
            if let Some(outcome) = apply_movement(&inst, &sol, &g, 0.7, &mut rng) {
                let report = validate_solution(&inst, &outcome.solution, &g).unwrap();
                assert!(report.is_feasible(), "{:?} broke: {report}", outcome.kind);
                for grp in 0..inst.group_count() {
                    assert_eq!(
                        outcome.solution.sample_wells_of(grp),
                        inst.groups()[grp].sample_count() as u64
                    );
                }
                sol = outcome.solution;
                applied += 1;
            }
        }
        assert!(applied > 100, "only {applied} moves applied");
    }

    #[test]
    fn grouping_never_spreads_the_chosen_group() {
        let inst = two_plate_instance();
        let g = geom();
        let sol = build_initial(&inst, &g);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            if let Some(outcome) = grouping_outcome(&inst, &sol, &g, &mut rng) {
                for grp in 0..inst.group_count() {
                    assert!(
                        outcome.solution.plates_containing(grp)
                            <= sol.plates_containing(grp).max(1)
                    );
                }
            }
        }
    }

    #[test]
    fn moves_are_deterministic_per_seed() {
        let inst = two_plate_instance();
        let g = geom();
        let sol = build_initial(&inst, &g);
        for seed in 0..20 {
            let mut r1 = ChaCha8Rng::seed_from_u64(seed);
            let mut r2 = ChaCha8Rng::seed_from_u64(seed);
            let a = apply_movement(&inst, &sol, &g, 0.9, &mut r1);
            let b = apply_movement(&inst, &sol, &g, 0.9, &mut r2);
            match (a, b) {
                (None, None) => {}
                (Some(x), Some(y)) => {
                    assert_eq!(x.solution, y.solution);
                    assert_eq!(x.kind, y.kind);
                    assert_eq!(x.plates, y.plates);
                }
                _ => panic!("seed {seed} diverged"),
            }
        }
    }

    /// One group of 7 per strip at one temperature: every strip exchange
    /// and every relocation is feasible, so the applied kind always equals
    /// the drawn kind.
    fn always_movable() -> (Instance, Solution) {
        let groups: Vec<Group> = (0..12)
            .map(|i| Group::new(format!("g{i:02}"), codes(&format!("g{i}x"), 7), 60.0))
            .collect();
        let inst = Instance::new(groups);
        let g = geom();
        let mut plates = Vec::new();
        for p in 0..2 {
            let mut plate = crate::model::PlateAssignment::empty(&g);
            for s in 0..6 {
                let grp = p * 6 + s;
                plate.strips[s].set_temperature(Some(Celsius(60.0)));
                plate.strips[s].add_samples(grp, 7);
                plate.strips[s].set_reagent(grp, true);
            }
            plates.push(plate);
        }
        (inst, Solution { plates })
    }

    #[test]
    fn kind_draw_frequency_matches_probability() {
        let (inst, sol) = always_movable();
        let g = geom();
        assert!(validate_solution(&inst, &sol, &g).unwrap().is_feasible());
        let mut rng = ChaCha8Rng::seed_from_u64(1234);
        let trials = 100_000;
        let mut exchanges = 0u32;
        for _ in 0..trials {
            let outcome = apply_movement(&inst, &sol, &g, 0.9, &mut rng).expect("movable");
            if outcome.kind == MoveKind::StripExchange {
                exchanges += 1;
            }
        }
        let freq = exchanges as f64 / trials as f64;
        assert!(
            (freq - 0.9).abs() <= 0.01,
            "strip-exchange frequency {freq} outside 0.9 +- 0.01"
        );

        // Boundary: se_prob = 1 always draws the exchange first.
        for _ in 0..200 {
            let outcome = apply_movement(&inst, &sol, &g, 1.0, &mut rng).expect("movable");
            assert_eq!(outcome.kind, MoveKind::StripExchange);
        }
    }

    #[test]
    fn infeasible_first_kind_falls_back_to_other() {
        // Two completely full plates, one group per strip: no grouping move
        // can find space anywhere, but equal-temperature strip exchanges
        // always work. With se_prob = 0 the grouping kind is drawn first,
        // exhausts its budget, and the driver must fall back to exchange.
        let groups: Vec<Group> = (0..12)
            .map(|i| Group::new(format!("g{i:02}"), codes(&format!("g{i}x"), 15), 60.0))
            .collect();
        let inst = Instance::new(groups);
        let g = geom();
        let mut plates = Vec::new();
        for p in 0..2 {
            let mut plate = crate::model::PlateAssignment::empty(&g);
            for s in 0..6 {
                let grp = p * 6 + s;
                plate.strips[s].set_temperature(Some(Celsius(60.0)));
                plate.strips[s].add_samples(grp, 15);
                plate.strips[s].set_reagent(grp, true);
            }
            plates.push(plate);
        }
        let sol = Solution { plates };
        assert!(validate_solution(&inst, &sol, &g).unwrap().is_feasible());
        assert_eq!(sol.occupied_wells(), 192);

        let mut rng = ChaCha8Rng::seed_from_u64(5);
        assert!(grouping_move(&inst, &sol, &g, &mut rng).is_none());
        let outcome = apply_movement(&inst, &sol, &g, 0.0, &mut rng).expect("exchange works");
        assert_eq!(outcome.kind, MoveKind::StripExchange);
        assert!(validate_solution(&inst, &outcome.solution, &g)
            .unwrap()
            .is_feasible());
    }
}

//! Property tests for the cost metrics and the validator's ability to
//! flag every rule family.

mod common;

use common::random_instance;
use platepack_core::constructive::build_initial;
use platepack_core::model::{
    validate_solution, Celsius, ConstraintFamily, CostVector, Group, Instance, ObjectiveWeights,
    PlateGeometry, Solution,
};
use proptest::prelude::*;

proptest! {
    #[test]
    fn cost_order_is_total_and_transitive(
        a in (0u32..50, 0u32..500),
        b in (0u32..50, 0u32..500),
        c in (0u32..50, 0u32..500),
    ) {
        let (a, b, c) = (
            CostVector::new(a.0, a.1),
            CostVector::new(b.0, b.1),
            CostVector::new(c.0, c.1),
        );
        // Antisymmetry.
        prop_assert_eq!(a < b, b > a);
        prop_assert_eq!(a == b, !(a < b) && !(b < a));
        // Transitivity.
        if a <= b && b <= c {
            prop_assert!(a <= c);
        }
        // Plates dominate wells.
        if a.plates < b.plates {
            prop_assert!(a < b);
        }
    }

    #[test]
    fn occupancy_rates_bound_and_sum(seed in 0u64..400) {
        let geom = PlateGeometry::default();
        let inst = random_instance(seed, 10, 250, 8);
        let sol = build_initial(&inst, &geom);
        let rates = sol.occupancy_rates(&geom);
        prop_assert_eq!(rates.len(), sol.plates.len());
        let mut reconstructed = 0.0;
        for &r in &rates {
            prop_assert!((0.0..=100.0).contains(&r));
            reconstructed += r * 96.0 / 100.0;
        }
        // Each rate is rounded to two decimals, so the reconstructed well
        // count is off by at most 0.005 percentage points per plate. The
        // bound is attainable exactly (ties round up), hence the epsilon.
        let total = sol.occupied_wells() as f64;
        prop_assert!(
            (reconstructed - total).abs() <= 0.005 * 96.0 / 100.0 * rates.len() as f64 + 1e-9,
            "sum of rates {} vs occupied {}", reconstructed, total
        );
    }

    #[test]
    fn weighted_objective_is_monotone_in_plate_moves(
        q in 1usize..5,
        q_prime in 1usize..5,
        samples in 1u32..10,
    ) {
        prop_assume!(q < q_prime);
        let geom = PlateGeometry::default();
        // One group, `samples` + 1 wells on plate q; move one sample to
        // plate q'.
        let weights = ObjectiveWeights::linear(6);
        let mut before = Solution::default();
        for _ in 0..q_prime {
            before.plates.push(platepack_core::model::PlateAssignment::empty(&geom));
        }
        let mut after = before.clone();
        {
            let strip = &mut before.plates[q - 1].strips[0];
            strip.set_temperature(Some(Celsius(60.0)));
            strip.add_samples(0, samples);
            strip.set_reagent(0, true);
        }
        {
            let strip = &mut after.plates[q - 1].strips[0];
            strip.set_temperature(Some(Celsius(60.0)));
            strip.add_samples(0, samples - 1);
            strip.set_reagent(0, true);
            let moved = &mut after.plates[q_prime - 1].strips[0];
            moved.set_temperature(Some(Celsius(60.0)));
            moved.add_samples(0, 1);
            moved.set_reagent(0, true);
        }
        let z_before = before.weighted_objective(&weights).unwrap();
        let z_after = after.weighted_objective(&weights).unwrap();
        prop_assert_eq!(z_after - z_before, (q_prime - q) as f64);
    }
}

/// A feasible base layout with room for targeted damage: two plates, one
/// group spanning two strips on plate 1.
fn mutation_base() -> (Instance, Solution, PlateGeometry) {
    let geom = PlateGeometry::default();
    let inst = Instance::new(vec![
        Group::new("wide", (0..20).map(|i| format!("w{i}")).collect(), 60.0),
        Group::new("near", (0..5).map(|i| format!("n{i}")).collect(), 63.0),
        Group::new("far", (0..4).map(|i| format!("f{i}")).collect(), 80.0),
    ]);
    let sol = build_initial(&inst, &geom);
    let report = validate_solution(&inst, &sol, &geom).unwrap();
    assert!(report.is_feasible(), "{report}");
    (inst, sol, geom)
}

/// Every rule family must trip on a targeted single-family mutation of a
/// feasible solution.
#[test]
fn validator_flags_each_mutated_family() {
    let (inst, base, geom) = mutation_base();
    let wide = 0; // 20 samples across strips 1-2 of plate 1
    assert!(base.plates[0].strips[1].samples_of(wide) > 0);

    let check = |mutated: &Solution, family: ConstraintFamily| {
        let report = validate_solution(&inst, mutated, &geom).unwrap();
        assert!(
            report.has_family(family),
            "expected {family} in: {report}"
        );
    };

    // Overfill a strip.
    let mut sol = base.clone();
    sol.plates[0].strips[0].add_samples(wide, 20);
    check(&sol, ConstraintFamily::StripCapacity);

    // Pin an empty strip to a temperature the ramp cannot reach.
    let mut sol = base.clone();
    let empty = sol.plates[0]
        .strips
        .iter()
        .position(|s| s.is_empty())
        .expect("plate 1 has an empty strip");
    sol.plates[0].strips[empty].set_temperature(Some(Celsius(200.0)));
    check(&sol, ConstraintFamily::TemperatureRamp);

    // Move one sample into a strip of a different temperature.
    let mut sol = base.clone();
    sol.plates[0].strips[1].remove_samples(wide, 1);
    let foreign = sol.plates[0]
        .strips
        .iter()
        .position(|s| {
            !s.is_empty() && s.temperature() != Some(inst.groups()[wide].temperature)
        })
        .expect("another temperature exists on plate 1");
    sol.plates[0].strips[foreign].add_samples(wide, 1);
    check(&sol, ConstraintFamily::StripTemperature);

    // Drop a sample.
    let mut sol = base.clone();
    sol.plates[0].strips[1].remove_samples(wide, 1);
    check(&sol, ConstraintFamily::SampleConservation);

    // Orphan reagent: a reagent well with no sample of the group there.
    let mut sol = base.clone();
    let near = 1;
    sol.plates[0].strips[empty].set_temperature(Some(Celsius(60.0)));
    sol.plates[0].strips[empty].set_reagent(near, true);
    check(&sol, ConstraintFamily::ReagentNeedsSample);

    // Remove the one required reagent.
    let mut sol = base.clone();
    let holder = sol.plates[0]
        .strips
        .iter()
        .position(|s| s.has_reagent(wide))
        .unwrap();
    sol.plates[0].strips[holder].set_reagent(wide, false);
    check(&sol, ConstraintFamily::ReagentMissing);

    // Duplicate the reagent on the plate, in a strip that has samples.
    let mut sol = base.clone();
    let other = sol.plates[0]
        .strips
        .iter()
        .position(|s| s.samples_of(wide) > 0 && !s.has_reagent(wide))
        .unwrap();
    sol.plates[0].strips[other].set_reagent(wide, true);
    check(&sol, ConstraintFamily::ReagentDuplicate);
}

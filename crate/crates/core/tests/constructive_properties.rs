//! Properties of the constructive initial solution over random instances.

mod common;

use common::random_instance;
use platepack_core::constructive::build_initial;
use platepack_core::model::{plate_lower_bound, validate_solution, PlateGeometry};

#[test]
fn initial_solutions_are_always_feasible() {
    let geom = PlateGeometry::default();
    for seed in 0..300 {
        let inst = random_instance(seed, 12, 200, 8);
        let sol = build_initial(&inst, &geom);
        let report = validate_solution(&inst, &sol, &geom).unwrap();
        assert!(report.is_feasible(), "seed {seed}: {report}");
        assert!(sol.cost_vector().plates as u64 >= plate_lower_bound(&inst, &geom));
    }
}

#[test]
fn occupied_wells_identity_holds() {
    // wells = total samples + number of (group, plate) incidences.
    let geom = PlateGeometry::default();
    for seed in 0..200 {
        let inst = random_instance(seed, 10, 150, 6);
        let sol = build_initial(&inst, &geom);
        let spans: u64 = (0..inst.group_count())
            .map(|g| sol.plates_containing(g) as u64)
            .sum();
        assert_eq!(sol.occupied_wells(), inst.total_samples() + spans);
        assert_eq!(sol.reagent_wells(), spans);
    }
}

#[test]
fn strip_temperatures_never_decrease_within_a_plate() {
    let geom = PlateGeometry::default();
    for seed in 0..200 {
        let inst = random_instance(seed, 10, 150, 8);
        let sol = build_initial(&inst, &geom);
        for plate in &sol.plates {
            let temps: Vec<f64> = plate
                .strips
                .iter()
                .filter(|s| !s.is_empty())
                .map(|s| s.temperature().unwrap().value())
                .collect();
            for w in temps.windows(2) {
                assert!(w[0] <= w[1], "seed {seed}: temperatures {temps:?}");
            }
        }
    }
}

#[test]
fn single_plate_instances_use_one_reagent_per_group() {
    let geom = PlateGeometry::default();
    for seed in 0..200 {
        let inst = random_instance(seed, 6, 60, 3);
        let sol = build_initial(&inst, &geom);
        if sol.plates.len() == 1 {
            assert_eq!(sol.reagent_wells(), inst.group_count() as u64);
        }
    }
}

#[test]
fn construction_is_deterministic_across_calls() {
    let geom = PlateGeometry::default();
    for seed in 0..50 {
        let inst = random_instance(seed, 12, 300, 8);
        assert_eq!(build_initial(&inst, &geom), build_initial(&inst, &geom));
    }
}

//! Document round-trip properties over generated instances.

use platepack::formats::{parse_instance, parse_solution, serialize_instance, serialize_solution};
use platepack::generator::{gen_instance, GeneratorParams};
use platepack::placement::place_wells;
use platepack_core::constructive::build_initial;
use platepack_core::model::PlateGeometry;
use proptest::prelude::*;

fn params(seed: u64) -> GeneratorParams {
    GeneratorParams {
        samples: 10..=300,
        groups: 2..=40,
        temperatures: 1..=10,
        temp_values: 50..=72,
        seed,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn instance_documents_round_trip(seed in 0u64..10_000) {
        let inst = gen_instance(&params(seed)).unwrap();
        let text = serialize_instance(&inst);
        let parsed = parse_instance(&text).unwrap();
        prop_assert_eq!(&parsed, &inst);
        prop_assert_eq!(serialize_instance(&parsed), text);
    }

    #[test]
    fn solution_documents_are_stable_under_reserialization(seed in 0u64..10_000) {
        let geom = PlateGeometry::default();
        let inst = gen_instance(&params(seed)).unwrap();
        let sol = build_initial(&inst, &geom);
        let text = serialize_solution(&sol, &inst);
        let parsed = parse_solution(&text, &inst, &geom).unwrap();
        prop_assert_eq!(serialize_solution(&parsed, &inst), text);
        prop_assert_eq!(parsed.cost_vector(), sol.cost_vector());
    }

    #[test]
    fn placement_covers_every_occupied_well(seed in 0u64..10_000) {
        let geom = PlateGeometry::default();
        let inst = gen_instance(&params(seed)).unwrap();
        let sol = build_initial(&inst, &geom);
        let plan = place_wells(&inst, &sol, &geom, None);
        prop_assert_eq!(plan.wells.len() as u32, sol.cost_vector().wells);
        // Every sample code appears exactly once.
        let mut codes: Vec<&str> = plan
            .wells
            .iter()
            .filter(|w| matches!(w.kind, platepack::placement::WellKind::Sample))
            .map(|w| w.code.as_str())
            .collect();
        codes.sort_unstable();
        codes.dedup();
        prop_assert_eq!(codes.len() as u64, inst.total_samples());
    }
}

//! Concrete well placement: turns per-strip counts into named wells.
//!
//! Strips fill column-major (rows 1-8 of column 1, then column 2) with
//! each group's reagent right after its last sample in the strip. A seed
//! shuffles positions within each strip instead, deterministically.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use platepack_core::model::{Instance, PlateGeometry, Solution};

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(rename_all = "snake_case")]
pub enum WellKind {
    Sample,
    Reagent,
}

/// One placed well. Positions are 1-based; `row`/`col` are within the
/// strip, `label` is the absolute plate coordinate (A1..H12, strip k
/// covering columns 2k-1 and 2k).
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct WellPlacement {
    pub kind: WellKind,
    /// Sample code, or the group id for reagent wells.
    pub code: String,
    pub group: String,
    pub plate: usize,
    pub strip: usize,
    pub row: usize,
    pub col: usize,
    pub label: String,
    pub temperature: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Default)]
pub struct PlacementPlan {
    pub wells: Vec<WellPlacement>,
}

impl PlacementPlan {
    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("plan serializes");
        text.push('\n');
        text
    }
}

/// Assigns every sample code and reagent to a well. Codes are handed out
/// per group in input order over the strips in (plate, strip) order, so
/// the plan is a bijection onto the occupied wells.
pub fn place_wells(
    inst: &Instance,
    sol: &Solution,
    geom: &PlateGeometry,
    seed: Option<u64>,
) -> PlacementPlan {
    let mut rng = seed.map(ChaCha8Rng::seed_from_u64);
    // Next unused sample index per group.
    let mut next_code = vec![0usize; inst.group_count()];
    let mut wells = Vec::new();

    for (qi, plate) in sol.plates.iter().enumerate() {
        for (si, strip) in plate.strips.iter().enumerate() {
            if strip.is_empty() {
                continue;
            }
            let temp = strip
                .temperature()
                .map(|t| t.value())
                .unwrap_or(f64::NAN);
            // Strip contents in group order: samples, then the reagent.
            let mut contents: Vec<(WellKind, String, usize)> = Vec::new();
            for e in strip.entries() {
                let group = &inst.groups()[e.group];
                for _ in 0..e.samples {
                    let code = group.sample_codes[next_code[e.group]].clone();
                    next_code[e.group] += 1;
                    contents.push((WellKind::Sample, code, e.group));
                }
                if e.reagent {
                    contents.push((WellKind::Reagent, group.id.clone(), e.group));
                }
            }

            let positions: Vec<u32> = match &mut rng {
                None => (0..contents.len() as u32).collect(),
                Some(rng) => {
                    let mut all: Vec<u32> = (0..geom.wells_per_strip).collect();
                    for i in (1..all.len()).rev() {
                        let j = rng.random_range(0..=i);
                        all.swap(i, j);
                    }
                    all.truncate(contents.len());
                    all
                }
            };

            for ((kind, code, g), pos) in contents.into_iter().zip(positions) {
                let col = pos / geom.rows_per_strip + 1;
                let row = pos % geom.rows_per_strip + 1;
                let abs_col = (si as u32) * geom.cols_per_strip + col;
                let label = format!("{}{}", (b'A' + row as u8 - 1) as char, abs_col);
                wells.push(WellPlacement {
                    kind,
                    code,
                    group: inst.groups()[g].id.clone(),
                    plate: qi + 1,
                    strip: si + 1,
                    row: row as usize,
                    col: col as usize,
                    label,
                    temperature: temp,
                });
            }
        }
    }
    PlacementPlan { wells }
}

#[cfg(test)]
mod tests {
    use super::*;
    use platepack_core::constructive::build_initial;
    use platepack_core::model::Group;
    use std::collections::BTreeSet;

    fn geom() -> PlateGeometry {
        PlateGeometry::default()
    }

    #[test]
    fn column_major_fill_with_reagent_after_last_sample() {
        let inst = Instance::new(vec![Group::new(
            "g1",
            vec!["s1".into(), "s2".into(), "s3".into()],
            60.0,
        )]);
        let sol = build_initial(&inst, &geom());
        let plan = place_wells(&inst, &sol, &geom(), None);
        assert_eq!(plan.wells.len(), 4);
        let rows: Vec<(usize, usize, &str)> = plan
            .wells
            .iter()
            .map(|w| (w.row, w.col, w.code.as_str()))
            .collect();
        assert_eq!(
            rows,
            vec![(1, 1, "s1"), (2, 1, "s2"), (3, 1, "s3"), (4, 1, "g1")]
        );
        assert_eq!(plan.wells[3].kind, WellKind::Reagent);
        assert_eq!(plan.wells[0].label, "A1");
        assert_eq!(plan.wells[3].label, "D1");
    }

    #[test]
    fn empty_solution_places_nothing() {
        let inst = Instance::new(vec![]);
        let plan = place_wells(&inst, &Solution::default(), &geom(), None);
        assert!(plan.wells.is_empty());
    }

    #[test]
    fn labels_cover_the_second_column_and_later_strips() {
        let inst = Instance::new(vec![Group::new(
            "g1",
            (0..20).map(|i| format!("s{i}")).collect(),
            60.0,
        )]);
        let sol = build_initial(&inst, &geom());
        let plan = place_wells(&inst, &sol, &geom(), None);
        assert_eq!(plan.wells.len(), 21);
        // Strip 1 holds 16 wells: column 1 rows 1-8 then column 2 rows 1-8.
        assert_eq!(plan.wells[8].label, "A2");
        assert_eq!(plan.wells[15].label, "H2");
        // Overflow lands in strip 2, whose columns are 3 and 4.
        assert_eq!(plan.wells[16].strip, 2);
        assert_eq!(plan.wells[16].label, "A3");
    }

    #[test]
    fn seeded_plans_are_deterministic_and_position_free() {
        let inst = Instance::new(vec![
            Group::new("a", (0..10).map(|i| format!("a{i}")).collect(), 60.0),
            Group::new("b", (0..4).map(|i| format!("b{i}")).collect(), 63.0),
        ]);
        let sol = build_initial(&inst, &geom());
        let p1 = place_wells(&inst, &sol, &geom(), Some(9));
        let p2 = place_wells(&inst, &sol, &geom(), Some(9));
        assert_eq!(p1, p2);
        let p3 = place_wells(&inst, &sol, &geom(), Some(10));
        assert_ne!(p1, p3);

        // Different seeds keep the same multiset of (code, plate, strip).
        let key = |p: &PlacementPlan| -> BTreeSet<(String, usize, usize)> {
            p.wells
                .iter()
                .map(|w| (w.code.clone(), w.plate, w.strip))
                .collect()
        };
        assert_eq!(key(&p1), key(&p3));
        // And no two wells in one strip share a position.
        let positions: BTreeSet<(usize, usize, usize, usize)> = p1
            .wells
            .iter()
            .map(|w| (w.plate, w.strip, w.row, w.col))
            .collect();
        assert_eq!(positions.len(), p1.wells.len());
    }

    #[test]
    fn plan_size_matches_cost_wells() {
        let inst = Instance::new(vec![
            Group::new("a", (0..30).map(|i| format!("a{i}")).collect(), 60.0),
            Group::new("b", (0..12).map(|i| format!("b{i}")).collect(), 64.0),
        ]);
        let sol = build_initial(&inst, &geom());
        let plan = place_wells(&inst, &sol, &geom(), None);
        assert_eq!(plan.wells.len() as u32, sol.cost_vector().wells);
    }
}

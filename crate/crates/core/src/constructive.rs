//! Constructive initial solution: samples are processed in ascending
//! group-temperature order and each one goes to the first plate (and first
//! strip) that can take it; a new plate is appended when none can.

use crate::model::{Instance, PlateAssignment, PlateGeometry, Solution};

/// Group processing order: temperature ascending, then larger groups
/// first, then group id. Larger groups first keeps fragmentation down;
/// only the temperature key is inherent to the method.
pub fn group_processing_order(inst: &Instance) -> Vec<usize> {
    let mut order: Vec<usize> = (0..inst.group_count()).collect();
    order.sort_by(|&a, &b| {
        let ga = &inst.groups()[a];
        let gb = &inst.groups()[b];
        ga.temperature
            .cmp(&gb.temperature)
            .then(gb.sample_count().cmp(&ga.sample_count()))
            .then(ga.id.cmp(&gb.id))
    });
    order
}

/// Builds the first-fit initial solution. The result is always feasible:
/// a fresh plate accepts any sample.
pub fn build_initial(inst: &Instance, geom: &PlateGeometry) -> Solution {
    let mut sol = Solution::default();
    for g in group_processing_order(inst) {
        for _ in 0..inst.groups()[g].sample_count() {
            let placed = sol
                .plates
                .iter_mut()
                .any(|plate| assign_sample(inst, plate, g, geom));
            if !placed {
                let mut plate = PlateAssignment::empty(geom);
                let ok = assign_sample(inst, &mut plate, g, geom);
                debug_assert!(ok, "a fresh plate must accept any sample");
                sol.plates.push(plate);
            }
        }
    }
    sol
}

/// Tries to put one sample of `group` onto `plate`.
///
/// Non-empty strips are scanned first: the temperature must match and
/// there must be room for the sample plus the group's reagent when the
/// group has no reagent on this plate yet. Then empty strips are scanned
/// under the ramp rule. Returns false (plate untouched) when nothing fits.
pub fn assign_sample(
    inst: &Instance,
    plate: &mut PlateAssignment,
    group: usize,
    geom: &PlateGeometry,
) -> bool {
    let temp = inst.groups()[group].temperature;
    let needs_reagent = plate.reagent_count(group) == 0;
    let need = 1 + needs_reagent as u32;

    for s in 0..plate.strips.len() {
        let strip = &plate.strips[s];
        if strip.is_empty() {
            continue;
        }
        if strip.temperature() == Some(temp) && strip.occupied() + need <= geom.wells_per_strip {
            place(plate, s, group, needs_reagent, temp);
            return true;
        }
    }

    for s in 0..plate.strips.len() {
        if !plate.strips[s].is_empty() {
            continue;
        }
        if empty_strip_accepts(plate, s, temp, geom) {
            place(plate, s, group, needs_reagent, temp);
            return true;
        }
    }

    false
}

/// True when setting the empty strip `strip` to `temp` keeps every pair of
/// occupied-strip temperatures on the plate bridgeable. Pinned virtual
/// temperatures on other empty strips are ignored; they can always be
/// re-chosen.
pub fn empty_strip_accepts(
    plate: &PlateAssignment,
    strip: usize,
    temp: crate::model::Celsius,
    geom: &PlateGeometry,
) -> bool {
    debug_assert!(plate.strips[strip].is_empty());
    let mut temps: Vec<Option<crate::model::Celsius>> = plate
        .strips
        .iter()
        .map(|s| if s.is_empty() { None } else { s.temperature() })
        .collect();
    temps[strip] = Some(temp);
    crate::model::ramp_feasible(&temps, geom.max_temp_step)
}

fn place(
    plate: &mut PlateAssignment,
    strip: usize,
    group: usize,
    with_reagent: bool,
    temp: crate::model::Celsius,
) {
    let s = &mut plate.strips[strip];
    s.set_temperature(Some(temp));
    s.add_samples(group, 1);
    if with_reagent {
        s.set_reagent(group, true);
    }
}

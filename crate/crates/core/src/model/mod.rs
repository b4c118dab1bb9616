//! Domain types shared by every solver: instances, solutions, costs.

mod validate;

pub use validate::{
    ramp_feasible, validate_instance, validate_solution, ConstraintFamily, FeasibilityReport,
    InstanceReport, InstanceViolation, StructureError, Violation,
};

use std::cmp::Ordering;
use std::fmt;

use thiserror::Error;

/// A processing temperature in degrees centigrade.
///
/// Wraps `f64` with total ordering so temperatures can key sorted
/// collections. Values must be finite and positive; `validate_instance`
/// rejects anything else.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Celsius(pub f64);

impl Celsius {
    pub fn value(self) -> f64 {
        self.0
    }

    /// Absolute temperature difference in °C.
    pub fn abs_diff(self, other: Celsius) -> f64 {
        (self.0 - other.0).abs()
    }
}

impl Eq for Celsius {}

impl PartialOrd for Celsius {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Celsius {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

impl std::hash::Hash for Celsius {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.0.to_bits().hash(state);
    }
}

impl fmt::Display for Celsius {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<f64> for Celsius {
    fn from(v: f64) -> Self {
        Celsius(v)
    }
}

/// Physical layout of a plate and the thermocycler ramp limit.
#[derive(Debug, Clone, PartialEq)]
pub struct PlateGeometry {
    pub strips_per_plate: usize,
    pub wells_per_strip: u32,
    pub rows_per_strip: u32,
    pub cols_per_strip: u32,
    /// Maximum temperature difference between two adjacent strips, in °C.
    pub max_temp_step: f64,
}

impl Default for PlateGeometry {
    fn default() -> Self {
        PlateGeometry {
            strips_per_plate: 6,
            wells_per_strip: 16,
            rows_per_strip: 8,
            cols_per_strip: 2,
            max_temp_step: 5.0,
        }
    }
}

impl PlateGeometry {
    pub fn wells_per_plate(&self) -> u32 {
        self.strips_per_plate as u32 * self.wells_per_strip
    }

    /// Checks internal consistency: strip grid shape, 96-well total,
    /// positive ramp limit.
    pub fn check(&self) -> Result<(), GeometryError> {
        if self.rows_per_strip * self.cols_per_strip != self.wells_per_strip {
            return Err(GeometryError::StripShape);
        }
        if self.wells_per_plate() != 96 {
            return Err(GeometryError::PlateSize(self.wells_per_plate()));
        }
        if self.max_temp_step.is_nan() || self.max_temp_step <= 0.0 {
            return Err(GeometryError::RampLimit);
        }
        Ok(())
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GeometryError {
    #[error("rows x cols does not match wells per strip")]
    StripShape,
    #[error("plate has {0} wells, expected 96")]
    PlateSize(u32),
    #[error("maximum temperature step must be positive")]
    RampLimit,
}

/// A set of samples sharing one reagent and one processing temperature.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Group {
    pub id: String,
    pub sample_codes: Vec<String>,
    pub temperature: Celsius,
}

impl Group {
    pub fn new(id: impl Into<String>, sample_codes: Vec<String>, temperature: f64) -> Self {
        Group {
            id: id.into(),
            sample_codes,
            temperature: Celsius(temperature),
        }
    }

    pub fn sample_count(&self) -> u32 {
        self.sample_codes.len() as u32
    }
}

/// One work session: the groups to be laid out on plates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    groups: Vec<Group>,
}

impl Instance {
    pub fn new(groups: Vec<Group>) -> Self {
        Instance { groups }
    }

    pub fn groups(&self) -> &[Group] {
        &self.groups
    }

    pub fn group_count(&self) -> usize {
        self.groups.len()
    }

    pub fn total_samples(&self) -> u64 {
        self.groups.iter().map(|g| g.sample_count() as u64).sum()
    }

    pub fn group_index(&self, id: &str) -> Option<usize> {
        self.groups.iter().position(|g| g.id == id)
    }

    /// Distinct processing temperatures, sorted ascending.
    pub fn temperature_set(&self) -> Vec<Celsius> {
        let mut temps: Vec<Celsius> = self.groups.iter().map(|g| g.temperature).collect();
        temps.sort();
        temps.dedup();
        temps
    }

    pub fn temperature_count(&self) -> usize {
        self.temperature_set().len()
    }
}

/// Per-group content of one strip.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StripEntry {
    pub group: usize,
    pub samples: u32,
    pub reagent: bool,
}

/// What one strip holds: sample counts and reagent flags per group, plus
/// the strip's processing temperature.
///
/// Empty strips normally carry no temperature; a temperature on an empty
/// strip acts as a pinned virtual value that only participates in ramp
/// validation.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct StripAssignment {
    entries: Vec<StripEntry>, // sorted by group index
    temperature: Option<Celsius>,
}

impl StripAssignment {
    pub fn empty() -> Self {
        StripAssignment::default()
    }

    pub fn entries(&self) -> &[StripEntry] {
        &self.entries
    }

    pub fn temperature(&self) -> Option<Celsius> {
        self.temperature
    }

    /// The temperature when the strip holds anything; pinned virtual
    /// values on empty strips are ignored.
    pub fn temperature_if_occupied(&self) -> Option<Celsius> {
        if self.is_empty() {
            None
        } else {
            self.temperature
        }
    }

    pub fn set_temperature(&mut self, temp: Option<Celsius>) {
        self.temperature = temp;
    }

    pub fn samples_of(&self, group: usize) -> u32 {
        match self.entries.binary_search_by_key(&group, |e| e.group) {
            Ok(i) => self.entries[i].samples,
            Err(_) => 0,
        }
    }

    pub fn has_reagent(&self, group: usize) -> bool {
        match self.entries.binary_search_by_key(&group, |e| e.group) {
            Ok(i) => self.entries[i].reagent,
            Err(_) => false,
        }
    }

    fn entry_mut(&mut self, group: usize) -> &mut StripEntry {
        let idx = match self.entries.binary_search_by_key(&group, |e| e.group) {
            Ok(i) => i,
            Err(i) => {
                self.entries.insert(
                    i,
                    StripEntry {
                        group,
                        samples: 0,
                        reagent: false,
                    },
                );
                i
            }
        };
        &mut self.entries[idx]
    }

    fn drop_if_blank(&mut self, group: usize) {
        if let Ok(i) = self.entries.binary_search_by_key(&group, |e| e.group) {
            if self.entries[i].samples == 0 && !self.entries[i].reagent {
                self.entries.remove(i);
            }
        }
    }

    pub fn set_samples(&mut self, group: usize, samples: u32) {
        self.entry_mut(group).samples = samples;
        self.drop_if_blank(group);
    }

    pub fn add_samples(&mut self, group: usize, count: u32) {
        self.entry_mut(group).samples += count;
    }

    /// Removes up to `count` samples of `group`; returns how many were removed.
    pub fn remove_samples(&mut self, group: usize, count: u32) -> u32 {
        let removed;
        {
            let e = self.entry_mut(group);
            removed = e.samples.min(count);
            e.samples -= removed;
        }
        self.drop_if_blank(group);
        removed
    }

    pub fn set_reagent(&mut self, group: usize, present: bool) {
        self.entry_mut(group).reagent = present;
        self.drop_if_blank(group);
    }

    /// Total occupied wells: samples plus reagent wells.
    pub fn occupied(&self) -> u32 {
        self.entries
            .iter()
            .map(|e| e.samples + e.reagent as u32)
            .sum()
    }

    pub fn is_empty(&self) -> bool {
        self.occupied() == 0
    }

    /// Drops the temperature when nothing occupies the strip.
    pub fn normalize(&mut self) {
        if self.is_empty() {
            self.temperature = None;
        }
    }
}

/// One plate: a fixed-length row of strips.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlateAssignment {
    pub strips: Vec<StripAssignment>,
}

impl PlateAssignment {
    pub fn empty(geom: &PlateGeometry) -> Self {
        PlateAssignment {
            strips: vec![StripAssignment::empty(); geom.strips_per_plate],
        }
    }

    pub fn occupied(&self) -> u32 {
        self.strips.iter().map(|s| s.occupied()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.occupied() == 0
    }

    pub fn group_samples(&self, group: usize) -> u32 {
        self.strips.iter().map(|s| s.samples_of(group)).sum()
    }

    pub fn has_group(&self, group: usize) -> bool {
        self.strips.iter().any(|s| s.samples_of(group) > 0)
    }

    pub fn reagent_count(&self, group: usize) -> u32 {
        self.strips.iter().filter(|s| s.has_reagent(group)).count() as u32
    }

    /// Strip temperatures in strip order (None for undefined).
    pub fn temperatures(&self) -> Vec<Option<Celsius>> {
        self.strips.iter().map(|s| s.temperature()).collect()
    }
}

/// A full layout: plates in working order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Solution {
    pub plates: Vec<PlateAssignment>,
}

impl Solution {
    pub fn occupied_wells(&self) -> u64 {
        self.plates.iter().map(|p| p.occupied() as u64).sum()
    }

    /// Number of plates where the group has at least one sample.
    pub fn plates_containing(&self, group: usize) -> usize {
        self.plates.iter().filter(|p| p.has_group(group)).count()
    }

    pub fn reagent_wells(&self) -> u64 {
        self.plates
            .iter()
            .flat_map(|p| &p.strips)
            .flat_map(|s| s.entries())
            .filter(|e| e.reagent)
            .count() as u64
    }

    pub fn sample_wells_of(&self, group: usize) -> u64 {
        self.plates
            .iter()
            .map(|p| p.group_samples(group) as u64)
            .sum()
    }

    /// Lexicographic cost: (non-empty plates, non-empty wells).
    pub fn cost_vector(&self) -> CostVector {
        CostVector {
            plates: self.plates.iter().filter(|p| !p.is_empty()).count() as u32,
            wells: self.occupied_wells() as u32,
        }
    }

    /// Per-plate fill percentage of the plate's wells, in plate order,
    /// rounded half-up to two decimals.
    pub fn occupancy_rates(&self, geom: &PlateGeometry) -> Vec<f64> {
        self.plates
            .iter()
            .map(|p| round2(p.occupied() as f64 * 100.0 / geom.wells_per_plate() as f64))
            .collect()
    }

    /// Plate-weighted sample sum: each sample on plate `q` counts `w_q`.
    /// Reagent wells are not weighted.
    pub fn weighted_objective(&self, weights: &ObjectiveWeights) -> Result<f64, WeightError> {
        let mut z = 0.0;
        for (q0, plate) in self.plates.iter().enumerate() {
            let samples: u64 = plate
                .strips
                .iter()
                .flat_map(|s| s.entries())
                .map(|e| e.samples as u64)
                .sum();
            if samples == 0 {
                continue;
            }
            let w = weights
                .get(q0 + 1)
                .ok_or(WeightError::MissingPlate(q0 + 1))?;
            z += w * samples as f64;
        }
        Ok(z)
    }
}

pub(crate) fn round2(x: f64) -> f64 {
    (x * 100.0).round() / 100.0
}

/// Lexicographic solution cost. `Ord` compares plates first, then wells.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CostVector {
    pub plates: u32,
    pub wells: u32,
}

impl CostVector {
    pub fn new(plates: u32, wells: u32) -> Self {
        CostVector { plates, wells }
    }
}

impl fmt::Display for CostVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} plates, {} wells)", self.plates, self.wells)
    }
}

/// Per-plate objective weights, 1-based by plate position.
///
/// Weights must be positive and strictly increasing so that filling the
/// first plates is always preferred.
#[derive(Debug, Clone, PartialEq)]
pub struct ObjectiveWeights {
    weights: Vec<f64>,
}

impl ObjectiveWeights {
    /// `w_q = q` for `q` in `1..=plates`.
    pub fn linear(plates: usize) -> Self {
        ObjectiveWeights {
            weights: (1..=plates).map(|q| q as f64).collect(),
        }
    }

    pub fn from_values(weights: Vec<f64>) -> Result<Self, WeightError> {
        let mut prev = 0.0;
        for (i, &w) in weights.iter().enumerate() {
            if w.is_nan() || w <= prev {
                return Err(WeightError::NotIncreasing(i + 1));
            }
            prev = w;
        }
        Ok(ObjectiveWeights { weights })
    }

    pub fn get(&self, plate: usize) -> Option<f64> {
        if plate == 0 {
            return None;
        }
        self.weights.get(plate - 1).copied()
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum WeightError {
    #[error("no weight defined for occupied plate {0}")]
    MissingPlate(usize),
    #[error("weights must be positive and strictly increasing (position {0})")]
    NotIncreasing(usize),
}

/// Capacity-only lower bound on the number of plates: every sample needs a
/// well and every group needs at least one reagent well somewhere.
/// Temperature constraints can only push the true optimum higher.
pub fn plate_lower_bound(inst: &Instance, geom: &PlateGeometry) -> u64 {
    let wells = inst.total_samples() + inst.group_count() as u64;
    wells.div_ceil(geom.wells_per_plate() as u64)
}

//! Feasibility validation for instances and solutions.
//!
//! Each check on a solution corresponds to one family of the layout rules:
//! strip capacity, the temperature ramp between adjacent strips, one
//! temperature per strip, sample conservation, and the reagent rules
//! (reagent needs a sample in its strip; exactly one reagent per group on
//! every plate holding its samples).

use std::collections::HashSet;
use std::fmt;

use thiserror::Error;

use super::{Celsius, Instance, PlateGeometry, Solution};

/// Tolerance for ramp comparisons so that exact-boundary temperature
/// differences survive floating-point subtraction.
const TEMP_EPS: f64 = 1e-9;

/// The rule family a violation belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ConstraintFamily {
    /// A strip holds more wells than it has.
    StripCapacity,
    /// Adjacent strip temperatures differ too much, counting that a run of
    /// k empty strips between two set temperatures can bridge up to
    /// `(k + 1) * max_step` degrees with virtual values.
    TemperatureRamp,
    /// A strip mixes temperatures: occupied without a temperature, or
    /// holding samples of a group processed at a different temperature.
    StripTemperature,
    /// A group's samples across all strips do not add up to its size.
    SampleConservation,
    /// A reagent well sits in a strip without a sample of its group.
    ReagentNeedsSample,
    /// A plate holds samples of a group but no reagent well for it.
    ReagentMissing,
    /// A plate holds more than one reagent well for one group.
    ReagentDuplicate,
}

impl fmt::Display for ConstraintFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            ConstraintFamily::StripCapacity => "strip-capacity",
            ConstraintFamily::TemperatureRamp => "temperature-ramp",
            ConstraintFamily::StripTemperature => "strip-temperature",
            ConstraintFamily::SampleConservation => "sample-conservation",
            ConstraintFamily::ReagentNeedsSample => "reagent-needs-sample",
            ConstraintFamily::ReagentMissing => "reagent-missing",
            ConstraintFamily::ReagentDuplicate => "reagent-duplicate",
        };
        f.write_str(name)
    }
}

/// One broken rule with its location (1-based plate/strip positions).
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub family: ConstraintFamily,
    pub plate: Option<usize>,
    pub strip: Option<usize>,
    pub group: Option<String>,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.family)?;
        if let Some(p) = self.plate {
            write!(f, " plate {p}")?;
        }
        if let Some(s) = self.strip {
            write!(f, " strip {s}")?;
        }
        if let Some(g) = &self.group {
            write!(f, " group {g}")?;
        }
        write!(f, ": {}", self.detail)
    }
}

/// Outcome of `validate_solution`: empty means feasible.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FeasibilityReport {
    pub violations: Vec<Violation>,
}

impl FeasibilityReport {
    pub fn is_feasible(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has_family(&self, family: ConstraintFamily) -> bool {
        self.violations.iter().any(|v| v.family == family)
    }
}

impl fmt::Display for FeasibilityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return writeln!(f, "feasible");
        }
        for v in &self.violations {
            writeln!(f, "{v}")?;
        }
        Ok(())
    }
}

/// The solution does not even line up with the instance or geometry;
/// distinct from infeasibility.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum StructureError {
    #[error("solution references group index {0} but the instance has {1} groups")]
    UnknownGroup(usize, usize),
    #[error("plate {0} has {1} strips, geometry expects {2}")]
    StripCount(usize, usize, usize),
}

/// True when every pair of set temperatures in the strip sequence is
/// reachable across the empty strips between them: a run of k empty strips
/// may bridge up to `(k + 1) * max_step` degrees. Empty strips before the
/// first or after the last set temperature impose nothing.
pub fn ramp_feasible(temps: &[Option<Celsius>], max_step: f64) -> bool {
    let mut last: Option<(usize, Celsius)> = None;
    for (i, t) in temps.iter().enumerate() {
        if let Some(t) = *t {
            if let Some((j, prev)) = last {
                let allowed = max_step * (i - j) as f64;
                if t.abs_diff(prev) > allowed + TEMP_EPS {
                    return false;
                }
            }
            last = Some((i, t));
        }
    }
    true
}

/// Checks the instance's own invariants: unique ids, globally unique
/// sample codes, non-empty groups, positive finite temperatures.
/// Total function; problems come back as a report, never an error.
pub fn validate_instance(inst: &Instance) -> InstanceReport {
    let mut violations = Vec::new();
    let mut ids = HashSet::new();
    let mut codes = HashSet::new();
    for group in inst.groups() {
        if !ids.insert(group.id.as_str()) {
            violations.push(InstanceViolation::DuplicateGroupId(group.id.clone()));
        }
        if group.sample_codes.is_empty() {
            violations.push(InstanceViolation::EmptyGroup(group.id.clone()));
        }
        for code in &group.sample_codes {
            if !codes.insert(code.as_str()) {
                violations.push(InstanceViolation::DuplicateSampleCode(code.clone()));
            }
        }
        let t = group.temperature.value();
        if !(t.is_finite() && t > 0.0) {
            violations.push(InstanceViolation::BadTemperature(group.id.clone(), t));
        }
    }
    InstanceReport { violations }
}

#[derive(Debug, Clone, PartialEq)]
pub enum InstanceViolation {
    DuplicateGroupId(String),
    DuplicateSampleCode(String),
    EmptyGroup(String),
    BadTemperature(String, f64),
}

impl fmt::Display for InstanceViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InstanceViolation::DuplicateGroupId(id) => write!(f, "duplicate group id {id:?}"),
            InstanceViolation::DuplicateSampleCode(code) => {
                write!(f, "duplicate sample code {code:?}")
            }
            InstanceViolation::EmptyGroup(id) => write!(f, "group {id:?} has no samples"),
            InstanceViolation::BadTemperature(id, t) => {
                write!(f, "group {id:?} has non-positive temperature {t}")
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct InstanceReport {
    pub violations: Vec<InstanceViolation>,
}

impl InstanceReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for InstanceReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return writeln!(f, "valid");
        }
        for v in &self.violations {
            writeln!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Checks a solution against every rule family. Empty report means
/// feasible. Group indices out of range or malformed plates are structural
/// errors, not infeasibility.
pub fn validate_solution(
    inst: &Instance,
    sol: &Solution,
    geom: &PlateGeometry,
) -> Result<FeasibilityReport, StructureError> {
    let n = inst.group_count();
    for (q0, plate) in sol.plates.iter().enumerate() {
        if plate.strips.len() != geom.strips_per_plate {
            return Err(StructureError::StripCount(
                q0 + 1,
                plate.strips.len(),
                geom.strips_per_plate,
            ));
        }
        for strip in &plate.strips {
            for e in strip.entries() {
                if e.group >= n {
                    return Err(StructureError::UnknownGroup(e.group, n));
                }
            }
        }
    }

    let mut report = FeasibilityReport::default();
    let groups = inst.groups();

    for (q0, plate) in sol.plates.iter().enumerate() {
        let q = q0 + 1;

        // (capacity) per strip
        for (l0, strip) in plate.strips.iter().enumerate() {
            let occ = strip.occupied();
            if occ > geom.wells_per_strip {
                report.violations.push(Violation {
                    family: ConstraintFamily::StripCapacity,
                    plate: Some(q),
                    strip: Some(l0 + 1),
                    group: None,
                    detail: format!("{occ} wells in a {}-well strip", geom.wells_per_strip),
                });
            }
        }

        // (ramp) across the plate's strip sequence
        if !ramp_feasible(&plate.temperatures(), geom.max_temp_step) {
            report.violations.push(Violation {
                family: ConstraintFamily::TemperatureRamp,
                plate: Some(q),
                strip: None,
                group: None,
                detail: format!(
                    "strip temperatures {} cannot respect the {} degree step",
                    format_temps(&plate.temperatures()),
                    geom.max_temp_step
                ),
            });
        }

        // (strip temperature) every sample-holding group matches the strip
        for (l0, strip) in plate.strips.iter().enumerate() {
            let temp = strip.temperature();
            for e in strip.entries() {
                if e.samples == 0 {
                    continue;
                }
                let gt = groups[e.group].temperature;
                match temp {
                    None => {
                        report.violations.push(Violation {
                            family: ConstraintFamily::StripTemperature,
                            plate: Some(q),
                            strip: Some(l0 + 1),
                            group: Some(groups[e.group].id.clone()),
                            detail: "occupied strip has no temperature".into(),
                        });
                    }
                    Some(t) if t != gt => {
                        report.violations.push(Violation {
                            family: ConstraintFamily::StripTemperature,
                            plate: Some(q),
                            strip: Some(l0 + 1),
                            group: Some(groups[e.group].id.clone()),
                            detail: format!("strip at {t} holds samples processed at {gt}"),
                        });
                    }
                    _ => {}
                }
            }
        }

        // (reagent needs sample) per strip
        for (l0, strip) in plate.strips.iter().enumerate() {
            for e in strip.entries() {
                if e.reagent && e.samples == 0 {
                    report.violations.push(Violation {
                        family: ConstraintFamily::ReagentNeedsSample,
                        plate: Some(q),
                        strip: Some(l0 + 1),
                        group: Some(groups[e.group].id.clone()),
                        detail: "reagent well in a strip without a sample of the group".into(),
                    });
                }
            }
        }

        // (reagent per plate) exactly one where the group has samples
        for (g, group) in groups.iter().enumerate() {
            let samples = plate.group_samples(g);
            let reagents = plate.reagent_count(g);
            if samples > 0 && reagents == 0 {
                report.violations.push(Violation {
                    family: ConstraintFamily::ReagentMissing,
                    plate: Some(q),
                    strip: None,
                    group: Some(group.id.clone()),
                    detail: format!("{samples} samples on the plate but no reagent well"),
                });
            }
            if reagents > 1 {
                report.violations.push(Violation {
                    family: ConstraintFamily::ReagentDuplicate,
                    plate: Some(q),
                    strip: None,
                    group: Some(group.id.clone()),
                    detail: format!("{reagents} reagent wells on one plate"),
                });
            }
        }
    }

    // (conservation) across the whole solution
    for (g, group) in groups.iter().enumerate() {
        let placed = sol.sample_wells_of(g);
        if placed != group.sample_count() as u64 {
            report.violations.push(Violation {
                family: ConstraintFamily::SampleConservation,
                plate: None,
                strip: None,
                group: Some(group.id.clone()),
                detail: format!("{placed} samples placed, group has {}", group.sample_count()),
            });
        }
    }

    Ok(report)
}

fn format_temps(temps: &[Option<Celsius>]) -> String {
    let parts: Vec<String> = temps
        .iter()
        .map(|t| match t {
            Some(t) => t.to_string(),
            None => "-".into(),
        })
        .collect();
    parts.join("/")
}

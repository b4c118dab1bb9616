//! On-disk documents: instances, solutions and the CSV import shim.
//!
//! Documents are pretty-printed JSON with a trailing newline; identical
//! inputs serialize byte-identically. Solutions are written with plates
//! sorted by descending occupancy so the fullest plates come first.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use platepack_core::model::{
    validate_instance, Celsius, Group, Instance, PlateGeometry, Solution, StripAssignment,
};

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("invalid document at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid instance: {0}")]
    Instance(String),
    #[error("unknown group id {0:?} in solution")]
    UnknownGroup(String),
    #[error("plate {plate} has {found} strips, expected {expected}")]
    StripCount {
        plate: usize,
        found: usize,
        expected: usize,
    },
    #[error("{0}")]
    Csv(String),
}

fn syntax_error(err: serde_json::Error) -> ParseError {
    ParseError::Syntax {
        line: err.line(),
        column: err.column(),
        message: err.to_string(),
    }
}

/// Instance document: a list of groups with temperatures and sample codes.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct InstanceDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metadata: Option<Metadata>,
    pub groups: Vec<GroupDoc>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Default)]
pub struct Metadata {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub session_id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct GroupDoc {
    pub id: String,
    pub temperature: f64,
    pub samples: Vec<String>,
}

pub fn instance_to_doc(inst: &Instance) -> InstanceDoc {
    InstanceDoc {
        metadata: None,
        groups: inst
            .groups()
            .iter()
            .map(|g| GroupDoc {
                id: g.id.clone(),
                temperature: g.temperature.value(),
                samples: g.sample_codes.clone(),
            })
            .collect(),
    }
}

pub fn doc_to_instance(doc: &InstanceDoc) -> Result<Instance, ParseError> {
    let inst = Instance::new(
        doc.groups
            .iter()
            .map(|g| Group::new(g.id.clone(), g.samples.clone(), g.temperature))
            .collect(),
    );
    let report = validate_instance(&inst);
    if !report.is_valid() {
        let lines: Vec<String> = report.violations.iter().map(|v| v.to_string()).collect();
        return Err(ParseError::Instance(lines.join("; ")));
    }
    Ok(inst)
}

/// Parses an instance document, rejecting structural and semantic
/// problems with their location.
pub fn parse_instance(text: &str) -> Result<Instance, ParseError> {
    let doc: InstanceDoc = serde_json::from_str(text).map_err(syntax_error)?;
    doc_to_instance(&doc)
}

pub fn serialize_instance(inst: &Instance) -> String {
    to_json(&instance_to_doc(inst))
}

pub fn serialize_instance_doc(doc: &InstanceDoc) -> String {
    to_json(doc)
}

/// Solution document: plates of strips; counts and reagents are keyed by
/// group id, empty strips have no temperature.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct SolutionDoc {
    pub plates: Vec<PlateDoc>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct PlateDoc {
    pub strips: Vec<StripDoc>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Default)]
pub struct StripDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub temperature: Option<f64>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub counts: BTreeMap<String, u32>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub reagents: Vec<String>,
}

/// Converts a solution for writing. Plates are ordered by descending
/// occupancy (stable for ties) and fully empty plates are kept only if
/// `keep_empty` — command output drops them.
pub fn solution_to_doc(sol: &Solution, inst: &Instance, keep_empty: bool) -> SolutionDoc {
    let mut order: Vec<usize> = (0..sol.plates.len()).collect();
    order.sort_by_key(|&q| std::cmp::Reverse(sol.plates[q].occupied()));
    let plates = order
        .into_iter()
        .filter(|&q| keep_empty || !sol.plates[q].is_empty())
        .map(|q| {
            let plate = &sol.plates[q];
            PlateDoc {
                strips: plate
                    .strips
                    .iter()
                    .map(|s| {
                        let mut counts = BTreeMap::new();
                        let mut reagents = Vec::new();
                        for e in s.entries() {
                            let id = inst.groups()[e.group].id.clone();
                            if e.samples > 0 {
                                counts.insert(id.clone(), e.samples);
                            }
                            if e.reagent {
                                reagents.push(id);
                            }
                        }
                        reagents.sort();
                        StripDoc {
                            temperature: s.temperature().map(Celsius::value),
                            counts,
                            reagents,
                        }
                    })
                    .collect(),
            }
        })
        .collect();
    SolutionDoc { plates }
}

pub fn doc_to_solution(
    doc: &SolutionDoc,
    inst: &Instance,
    geom: &PlateGeometry,
) -> Result<Solution, ParseError> {
    let mut plates = Vec::with_capacity(doc.plates.len());
    for (qi, plate) in doc.plates.iter().enumerate() {
        if plate.strips.len() != geom.strips_per_plate {
            return Err(ParseError::StripCount {
                plate: qi + 1,
                found: plate.strips.len(),
                expected: geom.strips_per_plate,
            });
        }
        let mut strips = Vec::with_capacity(plate.strips.len());
        for s in &plate.strips {
            let mut strip = StripAssignment::empty();
            strip.set_temperature(s.temperature.map(Celsius));
            for (id, &count) in &s.counts {
                let g = inst
                    .group_index(id)
                    .ok_or_else(|| ParseError::UnknownGroup(id.clone()))?;
                strip.set_samples(g, count);
            }
            for id in &s.reagents {
                let g = inst
                    .group_index(id)
                    .ok_or_else(|| ParseError::UnknownGroup(id.clone()))?;
                strip.set_reagent(g, true);
            }
            strips.push(strip);
        }
        plates.push(platepack_core::model::PlateAssignment { strips });
    }
    Ok(Solution { plates })
}

pub fn parse_solution(
    text: &str,
    inst: &Instance,
    geom: &PlateGeometry,
) -> Result<Solution, ParseError> {
    let doc: SolutionDoc = serde_json::from_str(text).map_err(syntax_error)?;
    doc_to_solution(&doc, inst, geom)
}

pub fn serialize_solution(sol: &Solution, inst: &Instance) -> String {
    to_json(&solution_to_doc(sol, inst, false))
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("documents serialize");
    text.push('\n');
    text
}

/// Builds an instance from the two tables labs usually export: sample
/// rows `sample_code,group_id` and group rows `group_id,temperature`.
/// Both need their header line.
pub fn csv_to_instance(samples_csv: &str, groups_csv: &str) -> Result<Instance, ParseError> {
    let sample_rows = csv_rows(samples_csv, "sample_code,group_id")?;
    let group_rows = csv_rows(groups_csv, "group_id,temperature")?;

    let mut temps: Vec<(String, f64)> = Vec::new();
    for (line, (id, temp)) in group_rows {
        if temps.iter().any(|(seen, _)| seen == &id) {
            return Err(ParseError::Csv(format!(
                "line {line}: group {id:?} listed twice"
            )));
        }
        let temp: f64 = temp
            .parse()
            .map_err(|_| ParseError::Csv(format!("line {line}: bad temperature {temp:?}")))?;
        temps.push((id, temp));
    }

    let mut samples: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for (line, (code, group)) in sample_rows {
        if !temps.iter().any(|(id, _)| id == &group) {
            return Err(ParseError::Csv(format!(
                "line {line}: sample {code:?} references unknown group {group:?}"
            )));
        }
        samples.entry(group).or_default().push(code);
    }

    let groups = temps
        .into_iter()
        .map(|(id, temp)| {
            let codes = samples.remove(&id).unwrap_or_default();
            Group::new(id, codes, temp)
        })
        .collect();
    let inst = Instance::new(groups);
    let report = validate_instance(&inst);
    if !report.is_valid() {
        let lines: Vec<String> = report.violations.iter().map(|v| v.to_string()).collect();
        return Err(ParseError::Instance(lines.join("; ")));
    }
    Ok(inst)
}

/// Parsed CSV rows: (1-based line number, (first field, second field)).
type CsvRows = Vec<(usize, (String, String))>;

fn csv_rows(text: &str, header: &str) -> Result<CsvRows, ParseError> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, first)) if first.trim() == header => {}
        other => {
            return Err(ParseError::Csv(format!(
                "expected header {header:?}, found {:?}",
                other.map(|(_, l)| l.trim()).unwrap_or("")
            )))
        }
    }
    let mut rows = Vec::new();
    for (i, line) in lines {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let (a, b) = line.split_once(',').ok_or_else(|| {
            ParseError::Csv(format!("line {}: expected two comma-separated fields", i + 1))
        })?;
        rows.push((i + 1, (a.trim().to_string(), b.trim().to_string())));
    }
    Ok(rows)
}

/// Parses flat `name value` lines (solver output); `#` starts a comment.
pub fn parse_values(text: &str) -> Result<BTreeMap<String, f64>, ParseError> {
    let mut values = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.split_whitespace();
        let (Some(name), Some(value), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(ParseError::Csv(format!(
                "line {}: expected `name value`, found {line:?}",
                i + 1
            )));
        };
        let value: f64 = value.parse().map_err(|_| {
            ParseError::Csv(format!("line {}: bad number {value:?}", i + 1))
        })?;
        values.insert(name.to_string(), value);
    }
    Ok(values)
}

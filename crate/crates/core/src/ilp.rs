//! Symbolic integer-linear-programming model of the layout problem, LP
//! text export for external MILP solvers, and import of solver output.
//!
//! Variables, per strip `l` of `p` plates with `n` groups and `m` distinct
//! temperatures: continuous `t_l` (strip temperature), integer `n_{il}`
//! (samples of group i in strip l), binary `x_{il}` (reagent of group i in
//! strip l), binary `y_{jl}` (strip l runs at temperature j). The
//! objective sums plate-weighted sample counts; reagent wells are not
//! weighted.
//!
//! The faithful model lets an unused strip take only temperature 0 or a
//! temperature from the instance's set, so it cannot bridge gaps wider
//! than the set allows even though the heuristic can (empty strips there
//! may take any virtual value). `relaxed_empty_strips` swaps the strict
//! temperature link for a big-M pair that frees unused strips' `t_l`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io;

use thiserror::Error;

use crate::model::{
    Celsius, Instance, ObjectiveWeights, PlateAssignment, PlateGeometry, Solution,
    StripAssignment,
};

/// A model variable, indexed 0-based; rendered names are 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Var {
    /// Continuous strip temperature `t_<l>`.
    StripTemp { strip: usize },
    /// Integer sample count `n_<i>_<l>`.
    Samples { group: usize, strip: usize },
    /// Binary reagent indicator `x_<i>_<l>`.
    Reagent { group: usize, strip: usize },
    /// Binary temperature selector `y_<j>_<l>`.
    TempUse { temp: usize, strip: usize },
}

impl Var {
    pub fn name(&self) -> String {
        match *self {
            Var::StripTemp { strip } => format!("t_{}", strip + 1),
            Var::Samples { group, strip } => format!("n_{}_{}", group + 1, strip + 1),
            Var::Reagent { group, strip } => format!("x_{}_{}", group + 1, strip + 1),
            Var::TempUse { temp, strip } => format!("y_{}_{}", temp + 1, strip + 1),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cmp {
    Le,
    Ge,
    Eq,
}

impl Cmp {
    fn symbol(self) -> &'static str {
        match self {
            Cmp::Le => "<=",
            Cmp::Ge => ">=",
            Cmp::Eq => "=",
        }
    }

    fn holds(self, lhs: f64, rhs: f64, tol: f64) -> bool {
        match self {
            Cmp::Le => lhs <= rhs + tol,
            Cmp::Ge => lhs >= rhs - tol,
            Cmp::Eq => (lhs - rhs).abs() <= tol,
        }
    }
}

/// Families of emitted constraints, named after what they enforce.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RowFamily {
    Capacity,
    RampDown,
    RampUp,
    TempLink,
    TempOne,
    TempSelect,
    Conserve,
    ReagentSample,
    ReagentCover,
    ReagentOnce,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub name: String,
    pub family: RowFamily,
    pub terms: Vec<(Var, f64)>,
    pub cmp: Cmp,
    pub rhs: f64,
}

/// The symbolic model: dimensions, objective and constraint rows.
#[derive(Debug, Clone, PartialEq)]
pub struct IlpModel {
    pub plate_count: usize,
    pub group_count: usize,
    pub temp_count: usize,
    pub strips_per_plate: usize,
    pub wells_per_strip: u32,
    pub max_temp_step: f64,
    /// Distinct temperatures sorted ascending; index j names `y_<j+1>_<l>`.
    pub temperatures: Vec<Celsius>,
    pub group_sizes: Vec<u64>,
    /// Group index to temperature index.
    pub group_temp: Vec<usize>,
    pub weights: Vec<f64>,
    pub relaxed_empty_strips: bool,
    pub objective: Vec<(Var, f64)>,
    pub constraints: Vec<Row>,
}

#[derive(Debug, Error, PartialEq)]
pub enum IlpError {
    #[error("a model needs at least one plate")]
    NoPlates,
    #[error("the instance has no groups")]
    EmptyInstance,
    #[error("weights cover {have} plates, model needs {need}")]
    MissingWeights { have: usize, need: usize },
}

/// Builds the model for `p` plates. `p` below the capacity lower bound is
/// allowed (the model may simply be infeasible), but zero plates or an
/// empty instance is an error.
pub fn build_ilp(
    inst: &Instance,
    p: usize,
    weights: &ObjectiveWeights,
    geom: &PlateGeometry,
    relaxed_empty_strips: bool,
) -> Result<IlpModel, IlpError> {
    if p == 0 {
        return Err(IlpError::NoPlates);
    }
    let n = inst.group_count();
    if n == 0 {
        return Err(IlpError::EmptyInstance);
    }
    if weights.len() < p {
        return Err(IlpError::MissingWeights {
            have: weights.len(),
            need: p,
        });
    }

    let temperatures = inst.temperature_set();
    let m = temperatures.len();
    let group_temp: Vec<usize> = inst
        .groups()
        .iter()
        .map(|g| {
            temperatures
                .iter()
                .position(|&t| t == g.temperature)
                .expect("group temperature is in the set")
        })
        .collect();
    let group_sizes: Vec<u64> = inst.groups().iter().map(|g| g.sample_count() as u64).collect();
    let total_samples: f64 = group_sizes.iter().sum::<u64>() as f64;

    let strips = geom.strips_per_plate;
    let strip_count = strips * p;
    let step = geom.max_temp_step;

    let mut objective = Vec::with_capacity(n * strip_count);
    for i in 0..n {
        for l in 0..strip_count {
            let q = l / strips;
            objective.push((
                Var::Samples { group: i, strip: l },
                weights.get(q + 1).expect("checked length"),
            ));
        }
    }

    let mut rows: Vec<Row> = Vec::new();

    // Strip capacity: samples plus reagents fit the wells.
    for l in 0..strip_count {
        let mut terms = Vec::with_capacity(2 * n);
        for i in 0..n {
            terms.push((Var::Samples { group: i, strip: l }, 1.0));
            terms.push((Var::Reagent { group: i, strip: l }, 1.0));
        }
        rows.push(Row {
            name: format!("cap_l{}", l + 1),
            family: RowFamily::Capacity,
            terms,
            cmp: Cmp::Le,
            rhs: geom.wells_per_strip as f64,
        });
    }

    // Ramp in both directions between in-plate neighbors.
    for (family, label, sign) in [
        (RowFamily::RampDown, "ramp_down", 1.0),
        (RowFamily::RampUp, "ramp_up", -1.0),
    ] {
        for q in 0..p {
            for s in 0..strips - 1 {
                let l = q * strips + s;
                rows.push(Row {
                    name: format!("{label}_q{}_l{}", q + 1, l + 1),
                    family,
                    terms: vec![
                        (Var::StripTemp { strip: l }, sign),
                        (Var::StripTemp { strip: l + 1 }, -sign),
                    ],
                    cmp: Cmp::Le,
                    rhs: step,
                });
            }
        }
    }

    // Temperature link: a used strip runs at its selected temperature.
    if relaxed_empty_strips {
        // |t_l - sum_j T_j y_jl| <= M (1 - sum_j y_jl); unused strips keep
        // a free t_l in [0, M].
        let m_big = temperatures.last().map(|t| t.value()).unwrap_or(0.0);
        for l in 0..strip_count {
            let mut lo = vec![(Var::StripTemp { strip: l }, 1.0)];
            let mut hi = vec![(Var::StripTemp { strip: l }, -1.0)];
            for (j, t) in temperatures.iter().enumerate() {
                lo.push((Var::TempUse { temp: j, strip: l }, m_big - t.value()));
                hi.push((Var::TempUse { temp: j, strip: l }, m_big + t.value()));
            }
            rows.push(Row {
                name: format!("temp_link_lo_l{}", l + 1),
                family: RowFamily::TempLink,
                terms: lo,
                cmp: Cmp::Le,
                rhs: m_big,
            });
            rows.push(Row {
                name: format!("temp_link_hi_l{}", l + 1),
                family: RowFamily::TempLink,
                terms: hi,
                cmp: Cmp::Le,
                rhs: m_big,
            });
        }
    } else {
        for l in 0..strip_count {
            let mut terms: Vec<(Var, f64)> = (0..m)
                .map(|j| (Var::TempUse { temp: j, strip: l }, temperatures[j].value()))
                .collect();
            terms.push((Var::StripTemp { strip: l }, -1.0));
            rows.push(Row {
                name: format!("temp_link_l{}", l + 1),
                family: RowFamily::TempLink,
                terms,
                cmp: Cmp::Eq,
                rhs: 0.0,
            });
        }
    }

    // At most one temperature per strip.
    for l in 0..strip_count {
        rows.push(Row {
            name: format!("temp_one_l{}", l + 1),
            family: RowFamily::TempOne,
            terms: (0..m)
                .map(|j| (Var::TempUse { temp: j, strip: l }, 1.0))
                .collect(),
            cmp: Cmp::Le,
            rhs: 1.0,
        });
    }

    // Samples force their temperature's selector, cleared of denominators:
    // (sum_i N_i) y_jl >= sum_{i: T_i = T_j} n_il.
    for l in 0..strip_count {
        for j in 0..m {
            let mut terms = vec![(Var::TempUse { temp: j, strip: l }, total_samples)];
            for (i, &gt) in group_temp.iter().enumerate() {
                if gt == j {
                    terms.push((Var::Samples { group: i, strip: l }, -1.0));
                }
            }
            rows.push(Row {
                name: format!("temp_use_l{}_t{}", l + 1, j + 1),
                family: RowFamily::TempSelect,
                terms,
                cmp: Cmp::Ge,
                rhs: 0.0,
            });
        }
    }

    // Conservation: all samples of every group are placed.
    for (i, &size) in group_sizes.iter().enumerate() {
        rows.push(Row {
            name: format!("conserve_{}", i + 1),
            family: RowFamily::Conserve,
            terms: (0..strip_count)
                .map(|l| (Var::Samples { group: i, strip: l }, 1.0))
                .collect(),
            cmp: Cmp::Eq,
            rhs: size as f64,
        });
    }

    // A reagent well needs a sample of its group in the same strip.
    for i in 0..n {
        for l in 0..strip_count {
            rows.push(Row {
                name: format!("reagent_sample_i{}_l{}", i + 1, l + 1),
                family: RowFamily::ReagentSample,
                terms: vec![
                    (Var::Samples { group: i, strip: l }, 1.0),
                    (Var::Reagent { group: i, strip: l }, -1.0),
                ],
                cmp: Cmp::Ge,
                rhs: 0.0,
            });
        }
    }

    // Samples on a plate force a reagent somewhere on that plate.
    for (i, &size) in group_sizes.iter().enumerate() {
        for l in 0..strip_count {
            let q = l / strips;
            let mut terms: Vec<(Var, f64)> = (q * strips..(q + 1) * strips)
                .map(|lp| (Var::Reagent { group: i, strip: lp }, size as f64))
                .collect();
            terms.push((Var::Samples { group: i, strip: l }, -1.0));
            rows.push(Row {
                name: format!("reagent_cover_i{}_l{}", i + 1, l + 1),
                family: RowFamily::ReagentCover,
                terms,
                cmp: Cmp::Ge,
                rhs: 0.0,
            });
        }
    }

    // At most one reagent well per group per plate.
    for i in 0..n {
        for q in 0..p {
            rows.push(Row {
                name: format!("reagent_once_i{}_q{}", i + 1, q + 1),
                family: RowFamily::ReagentOnce,
                terms: (q * strips..(q + 1) * strips)
                    .map(|l| (Var::Reagent { group: i, strip: l }, 1.0))
                    .collect(),
                cmp: Cmp::Le,
                rhs: 1.0,
            });
        }
    }

    Ok(IlpModel {
        plate_count: p,
        group_count: n,
        temp_count: m,
        strips_per_plate: strips,
        wells_per_strip: geom.wells_per_strip,
        max_temp_step: step,
        temperatures,
        group_sizes,
        group_temp,
        weights: (1..=p).map(|q| weights.get(q).expect("checked")).collect(),
        relaxed_empty_strips,
        objective,
        constraints: rows,
    })
}

impl IlpModel {
    pub fn strip_count(&self) -> usize {
        self.strips_per_plate * self.plate_count
    }

    /// All variables in canonical order: t by strip, then n, x by (group,
    /// strip), then y by (temperature, strip).
    pub fn variables(&self) -> Vec<Var> {
        let strips = self.strip_count();
        let mut vars = Vec::with_capacity(strips * (2 * self.group_count + self.temp_count + 1));
        for l in 0..strips {
            vars.push(Var::StripTemp { strip: l });
        }
        for i in 0..self.group_count {
            for l in 0..strips {
                vars.push(Var::Samples { group: i, strip: l });
            }
        }
        for i in 0..self.group_count {
            for l in 0..strips {
                vars.push(Var::Reagent { group: i, strip: l });
            }
        }
        for j in 0..self.temp_count {
            for l in 0..strips {
                vars.push(Var::TempUse { temp: j, strip: l });
            }
        }
        vars
    }

    pub fn variable_count(&self) -> usize {
        self.strip_count() * (2 * self.group_count + self.temp_count + 1)
    }

    pub fn constraint_count(&self) -> usize {
        self.constraints.len()
    }

    /// (constraints, variables), the usual way model sizes are quoted.
    pub fn size(&self) -> (usize, usize) {
        (self.constraint_count(), self.variable_count())
    }

    /// Evaluates the objective at the given named values; missing names
    /// count as zero.
    pub fn objective_value(&self, values: &BTreeMap<String, f64>) -> f64 {
        self.objective
            .iter()
            .map(|(v, c)| c * values.get(&v.name()).copied().unwrap_or(0.0))
            .sum()
    }

    /// Evaluates every constraint at the given named values and returns
    /// the violated ones.
    pub fn check_values(&self, values: &BTreeMap<String, f64>) -> Vec<RowViolation> {
        let tol = 1e-6;
        self.constraints
            .iter()
            .filter_map(|row| {
                let lhs: f64 = row
                    .terms
                    .iter()
                    .map(|(v, c)| c * values.get(&v.name()).copied().unwrap_or(0.0))
                    .sum();
                if row.cmp.holds(lhs, row.rhs, tol) {
                    None
                } else {
                    Some(RowViolation {
                        name: row.name.clone(),
                        family: row.family,
                        lhs,
                        cmp: row.cmp,
                        rhs: row.rhs,
                    })
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RowViolation {
    pub name: String,
    pub family: RowFamily,
    pub lhs: f64,
    pub cmp: Cmp,
    pub rhs: f64,
}

impl std::fmt::Display for RowViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{}: {} {} {} does not hold",
            self.name,
            self.lhs,
            self.cmp.symbol(),
            self.rhs
        )
    }
}

#[derive(Debug, Error)]
pub enum WriteLpError {
    #[error("model is malformed: {0}")]
    Malformed(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Writes the model as LP-format text. Output is byte-identical for
/// identical models.
pub fn write_lp<W: io::Write>(model: &IlpModel, sink: &mut W) -> Result<(), WriteLpError> {
    if model.plate_count == 0 || model.objective.is_empty() {
        return Err(WriteLpError::Malformed(
            "model has no plates or no objective".into(),
        ));
    }
    let mut out = String::new();
    out.push_str("Minimize\n");
    write_terms_line(&mut out, "obj", &model.objective, None);
    out.push_str("Subject To\n");
    for row in &model.constraints {
        write_terms_line(
            &mut out,
            &row.name,
            &row.terms,
            Some((row.cmp, row.rhs)),
        );
    }
    out.push_str("Bounds\n");
    for l in 0..model.strip_count() {
        let _ = writeln!(out, " t_{} >= 0", l + 1);
    }
    out.push_str("Generals\n");
    write_name_block(&mut out, model.variables().iter().filter(|v| matches!(v, Var::Samples { .. })));
    out.push_str("Binaries\n");
    write_name_block(
        &mut out,
        model
            .variables()
            .iter()
            .filter(|v| matches!(v, Var::Reagent { .. } | Var::TempUse { .. })),
    );
    out.push_str("End\n");
    sink.write_all(out.as_bytes())?;
    Ok(())
}

pub fn lp_string(model: &IlpModel) -> Result<String, WriteLpError> {
    let mut buf = Vec::new();
    write_lp(model, &mut buf)?;
    Ok(String::from_utf8(buf).expect("LP text is ASCII"))
}

const TERMS_PER_LINE: usize = 8;

fn write_terms_line(out: &mut String, name: &str, terms: &[(Var, f64)], tail: Option<(Cmp, f64)>) {
    let _ = write!(out, " {name}:");
    for (k, (var, coef)) in terms.iter().enumerate() {
        if k > 0 && k % TERMS_PER_LINE == 0 {
            out.push_str("\n   ");
        }
        let sign = if *coef < 0.0 { '-' } else { '+' };
        let _ = write!(out, " {sign} {} {}", format_num(coef.abs()), var.name());
    }
    if let Some((cmp, rhs)) = tail {
        let _ = write!(out, " {} {}", cmp.symbol(), format_num(rhs));
    }
    out.push('\n');
}

fn write_name_block<'a>(out: &mut String, names: impl Iterator<Item = &'a Var>) {
    let mut on_line = 0;
    for var in names {
        if on_line == 0 {
            out.push(' ');
        }
        let _ = write!(out, "{} ", var.name());
        on_line += 1;
        if on_line == TERMS_PER_LINE {
            out.pop();
            out.push('\n');
            on_line = 0;
        }
    }
    if on_line > 0 {
        out.pop();
        out.push('\n');
    }
}

fn format_num(x: f64) -> String {
    if x == x.trunc() && x.abs() < 1e15 {
        format!("{}", x as i64)
    } else {
        format!("{x}")
    }
}

/// Optimality gap in percent: `100 |lower - incumbent| / |incumbent|`.
pub fn compute_gap(lower_bound: f64, incumbent: f64) -> Result<f64, GapError> {
    if incumbent == 0.0 {
        return Err(GapError::ZeroIncumbent);
    }
    Ok(100.0 * (lower_bound - incumbent).abs() / incumbent.abs())
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GapError {
    #[error("gap is undefined for a zero incumbent objective")]
    ZeroIncumbent,
}

#[derive(Debug, Error)]
pub enum ImportError {
    #[error("missing value for variable {0}")]
    MissingVariable(String),
    #[error("variable {name} = {value} is not integral within 1e-6")]
    Fractional { name: String, value: f64 },
    #[error("imported values violate the layout rules:\n{0}")]
    Infeasible(crate::model::FeasibilityReport),
    #[error("imported values break solution structure: {0}")]
    Structure(#[from] crate::model::StructureError),
}

const INT_TOL: f64 = 1e-6;

/// Rebuilds a `Solution` from named solver values. Every model variable
/// must be present; integer variables must be integral within 1e-6. The
/// reconstruction is validated and an infeasible one is an error carrying
/// the violated families.
pub fn import_solution(
    model: &IlpModel,
    values: &BTreeMap<String, f64>,
    inst: &Instance,
    geom: &PlateGeometry,
) -> Result<Solution, ImportError> {
    let fetch = |var: &Var| -> Result<f64, ImportError> {
        values
            .get(&var.name())
            .copied()
            .ok_or_else(|| ImportError::MissingVariable(var.name()))
    };
    let fetch_int = |var: &Var| -> Result<i64, ImportError> {
        let v = fetch(var)?;
        if (v - v.round()).abs() > INT_TOL {
            return Err(ImportError::Fractional {
                name: var.name(),
                value: v,
            });
        }
        Ok(v.round() as i64)
    };

    // Touch every variable so missing ones surface even when unused.
    for var in model.variables() {
        fetch(&var)?;
    }

    let strips = model.strips_per_plate;
    let mut plates = Vec::with_capacity(model.plate_count);
    for q in 0..model.plate_count {
        let mut plate = PlateAssignment {
            strips: vec![StripAssignment::empty(); strips],
        };
        for s in 0..strips {
            let l = q * strips + s;
            let strip = &mut plate.strips[s];
            for i in 0..model.group_count {
                let samples = fetch_int(&Var::Samples { group: i, strip: l })?;
                if samples > 0 {
                    strip.add_samples(i, samples as u32);
                }
                if fetch_int(&Var::Reagent { group: i, strip: l })? == 1 {
                    strip.set_reagent(i, true);
                }
            }
            if !strip.is_empty() {
                let mut selected = None;
                for j in 0..model.temp_count {
                    if fetch_int(&Var::TempUse { temp: j, strip: l })? == 1 {
                        selected = match selected {
                            None => Some(model.temperatures[j]),
                            Some(_) => None, // two selectors set: leave undefined
                        };
                        if selected.is_none() {
                            break;
                        }
                    }
                }
                strip.set_temperature(selected);
            }
        }
        plates.push(plate);
    }

    let sol = Solution { plates };
    let report = crate::model::validate_solution(inst, &sol, geom)?;
    if !report.is_feasible() {
        return Err(ImportError::Infeasible(report));
    }
    Ok(sol)
}

/// Named variable values representing an existing solution.
#[derive(Debug, Clone)]
pub struct BridgeValues {
    pub values: BTreeMap<String, f64>,
    /// True when some empty-strip run could only be bridged with free
    /// virtual temperatures, which only the relaxed model admits.
    pub used_free_temps: bool,
}

/// Converts a feasible solution into model variable values.
///
/// Occupied strips map directly. Empty strips between two set
/// temperatures take a walk through the temperature set when one exists
/// (stays within the faithful model); otherwise they take interpolated
/// free values and the result needs `relaxed_empty_strips`.
pub fn solution_values(model: &IlpModel, sol: &Solution) -> BridgeValues {
    assert!(
        sol.plates.len() <= model.plate_count,
        "solution uses {} plates, model has {}",
        sol.plates.len(),
        model.plate_count
    );
    let strips = model.strips_per_plate;
    let mut values = BTreeMap::new();
    let mut used_free_temps = false;

    // Default every variable to zero.
    for var in model.variables() {
        values.insert(var.name(), 0.0);
    }

    for (q, plate) in sol.plates.iter().enumerate().take(model.plate_count) {
        // Plan temperatures for each strip: occupied strips use their own,
        // empty strips get a virtual plan.
        let planned = plan_virtual_temps(model, plate, &mut used_free_temps);
        for (s, strip) in plate.strips.iter().enumerate() {
            let l = q * strips + s;
            for e in strip.entries() {
                if e.samples > 0 {
                    values.insert(
                        Var::Samples { group: e.group, strip: l }.name(),
                        e.samples as f64,
                    );
                }
                if e.reagent {
                    values.insert(Var::Reagent { group: e.group, strip: l }.name(), 1.0);
                }
            }
            match planned[s] {
                PlannedTemp::Set(j) => {
                    values.insert(Var::TempUse { temp: j, strip: l }.name(), 1.0);
                    values.insert(
                        Var::StripTemp { strip: l }.name(),
                        model.temperatures[j].value(),
                    );
                }
                PlannedTemp::Free(t) => {
                    values.insert(Var::StripTemp { strip: l }.name(), t);
                }
                PlannedTemp::Zero => {}
            }
        }
    }

    BridgeValues {
        values,
        used_free_temps,
    }
}

#[derive(Clone, Copy)]
enum PlannedTemp {
    /// Selector j set, t pinned to the set temperature.
    Set(usize),
    /// Free t value, all selectors zero (needs the relaxed model).
    Free(f64),
    /// Fully unused: t = 0, selectors zero.
    Zero,
}

fn plan_virtual_temps(
    model: &IlpModel,
    plate: &PlateAssignment,
    used_free_temps: &mut bool,
) -> Vec<PlannedTemp> {
    let temp_index = |t: Celsius| -> usize {
        model
            .temperatures
            .iter()
            .position(|&x| x == t)
            .expect("solution temperature belongs to the instance set")
    };
    let occupied: Vec<Option<usize>> = plate
        .strips
        .iter()
        .map(|s| {
            if s.is_empty() {
                None
            } else {
                Some(temp_index(s.temperature().expect("occupied strips carry a temperature")))
            }
        })
        .collect();

    if occupied.iter().all(Option::is_none) {
        return vec![PlannedTemp::Zero; plate.strips.len()];
    }

    let mut planned: Vec<PlannedTemp> = occupied
        .iter()
        .map(|o| match o {
            Some(j) => PlannedTemp::Set(*j),
            None => PlannedTemp::Zero,
        })
        .collect();

    let defined: Vec<usize> = (0..occupied.len()).filter(|&s| occupied[s].is_some()).collect();
    let first = defined[0];
    let last = *defined.last().unwrap();

    // Edge runs copy the nearest set temperature.
    for slot in planned.iter_mut().take(first) {
        *slot = PlannedTemp::Set(occupied[first].unwrap());
    }
    for slot in planned.iter_mut().skip(last + 1) {
        *slot = PlannedTemp::Set(occupied[last].unwrap());
    }

    // Interior runs walk through the set when possible.
    for w in defined.windows(2) {
        let (a, b) = (w[0], w[1]);
        let k = b - a - 1;
        if k == 0 {
            continue;
        }
        let (ja, jb) = (occupied[a].unwrap(), occupied[b].unwrap());
        match set_walk(&model.temperatures, ja, jb, k, model.max_temp_step) {
            Some(walk) => {
                for (off, j) in walk.into_iter().enumerate() {
                    planned[a + 1 + off] = PlannedTemp::Set(j);
                }
            }
            None => {
                *used_free_temps = true;
                let ta = model.temperatures[ja].value();
                let tb = model.temperatures[jb].value();
                for off in 0..k {
                    let frac = (off + 1) as f64 / (k + 1) as f64;
                    planned[a + 1 + off] = PlannedTemp::Free(ta + (tb - ta) * frac);
                }
            }
        }
    }

    planned
}

/// Finds k intermediate set temperatures stepping from `ja` to `jb` with
/// every hop within `step`. Walks may idle on a temperature, so this is a
/// bounded-hops reachability search.
fn set_walk(temps: &[Celsius], ja: usize, jb: usize, k: usize, step: f64) -> Option<Vec<usize>> {
    let hop_ok = |a: usize, b: usize| temps[a].abs_diff(temps[b]) <= step + 1e-9;
    // BFS distance from ja.
    let mut dist = vec![usize::MAX; temps.len()];
    let mut queue = std::collections::VecDeque::new();
    dist[ja] = 0;
    queue.push_back(ja);
    while let Some(u) = queue.pop_front() {
        for v in 0..temps.len() {
            if dist[v] == usize::MAX && hop_ok(u, v) {
                dist[v] = dist[u] + 1;
                queue.push_back(v);
            }
        }
    }
    if dist[jb] == usize::MAX || dist[jb] > k + 1 {
        return None;
    }
    // Reconstruct one shortest walk, then pad by idling at the start.
    let mut path = vec![jb];
    let mut cur = jb;
    while cur != ja {
        let d = dist[cur];
        let prev = (0..temps.len())
            .find(|&v| dist[v] + 1 == d && hop_ok(v, cur))
            .expect("BFS predecessor exists");
        path.push(prev);
        cur = prev;
    }
    path.reverse(); // ja .. jb, length dist+1
    let mut walk = Vec::with_capacity(k);
    let pad = k + 1 - (path.len() - 1);
    for _ in 0..pad {
        walk.push(ja);
    }
    walk.extend(path[1..path.len() - 1].iter().copied());
    debug_assert_eq!(walk.len(), k);
    Some(walk)
}

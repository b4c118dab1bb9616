//! Command-line entry points around the plate-packing solvers.
//!
//! Exit codes: 0 success / feasible, 1 infeasible or rule violation,
//! 2 usage or input errors.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use platepack::formats;
use platepack::generator::{gen_instance, GeneratorParams, RangeArg};
use platepack::placement::place_wells;
use platepack::report::report;
use platepack_core::annealing::{anneal_restarts, SaParams};
use platepack_core::constructive::build_initial;
use platepack_core::exact::{exact_solve, ExactLimits};
use platepack_core::ilp::{build_ilp, import_solution, lp_string, ImportError};
use platepack_core::model::{
    plate_lower_bound, validate_instance, validate_solution, Instance, ObjectiveWeights,
    PlateGeometry,
};

#[derive(Parser)]
#[command(name = "platepack", version, about = "Pack grouped samples onto 96-well plates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Anneal an instance into a plate layout and print a report.
    Solve(SolveArgs),
    /// Check a solution against an instance; exits 1 when infeasible.
    Validate(ValidateArgs),
    /// Write the instance's integer program in LP format.
    EmitIlp(EmitIlpArgs),
    /// Rebuild a solution from solver variable values.
    ImportSol(ImportSolArgs),
    /// Exhaustively solve a tiny instance and prove optimality.
    Oracle(OracleArgs),
    /// Generate a synthetic instance.
    Generate(GenerateArgs),
    /// Assign concrete wells to every sample and reagent.
    Place(PlaceArgs),
    /// Compare annealing move probabilities over seeded runs.
    Sweep(SweepArgs),
    /// Build an instance document from two CSV tables.
    ConvertCsv(ConvertCsvArgs),
}

#[derive(Args)]
struct SaFlags {
    /// RNG seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Outer annealing iterations.
    #[arg(long, default_value_t = 1000)]
    max_iter: u32,
    /// Initial control temperature.
    #[arg(long, default_value_t = 100.0)]
    t_max: f64,
    /// Final control temperature per iteration.
    #[arg(long, default_value_t = 1e-10)]
    t_min: f64,
    /// Geometric cooling factor.
    #[arg(long, default_value_t = 0.9)]
    alpha: f64,
    /// Probability of the strip-exchange move.
    #[arg(long, default_value_t = 0.9)]
    se_prob: f64,
    /// Scale applied to plate-count increases in the acceptance test.
    #[arg(long, default_value_t = 1.0)]
    plate_delta_scale: f64,
}

impl SaFlags {
    fn params(&self) -> Result<SaParams> {
        let params = SaParams {
            t_max: self.t_max,
            t_min: self.t_min,
            alpha: self.alpha,
            max_iter: self.max_iter,
            se_prob: self.se_prob,
            seed: self.seed,
            plate_delta_scale: self.plate_delta_scale,
        };
        params
            .validate()
            .map_err(|msg| anyhow::anyhow!("invalid annealing parameters: {msg}"))?;
        Ok(params)
    }
}

#[derive(Args)]
struct SolveArgs {
    /// Instance document.
    instance: PathBuf,
    #[command(flatten)]
    sa: SaFlags,
    /// Independent seeded runs; the best result wins.
    #[arg(long, default_value_t = 1)]
    restarts: u32,
    /// Write the solution here instead of stdout.
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Print the report as JSON instead of text.
    #[arg(long)]
    json_report: bool,
}

#[derive(Args)]
struct ValidateArgs {
    instance: PathBuf,
    solution: PathBuf,
    /// Print the feasibility report as JSON lines of violations.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct EmitIlpArgs {
    instance: PathBuf,
    /// Plate count for the model; defaults to the constructive solution's.
    #[arg(long)]
    plates: Option<usize>,
    /// Let empty strips take any temperature, not just set values.
    #[arg(long)]
    relax_empty_strips: bool,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ImportSolArgs {
    instance: PathBuf,
    /// Flat `name value` lines; `#` comments allowed.
    values: PathBuf,
    /// Plate count the values were solved for; defaults like emit-ilp.
    #[arg(long)]
    plates: Option<usize>,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct OracleArgs {
    instance: PathBuf,
    #[arg(long, default_value_t = 2)]
    max_plates: usize,
    #[arg(long, default_value_t = 6)]
    max_groups: usize,
    #[arg(long, default_value_t = 24)]
    max_samples: u64,
    #[arg(long, default_value_t = 5_000_000)]
    node_budget: u64,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct GenerateArgs {
    /// Sample count or range, e.g. `40` or `174..3783`.
    #[arg(long, default_value = "40..3783")]
    samples: RangeArg,
    /// Group count or range.
    #[arg(long, default_value = "24..201")]
    groups: RangeArg,
    /// Distinct temperature count or range.
    #[arg(long, default_value = "10..18")]
    temps: RangeArg,
    /// Integer temperature value range.
    #[arg(long, default_value = "50..72")]
    temp_range: RangeArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct PlaceArgs {
    instance: PathBuf,
    solution: PathBuf,
    /// Shuffle positions within each strip with this seed.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    instance: PathBuf,
    /// Strip-exchange probabilities to compare.
    #[arg(long, value_delimiter = ',', default_values_t = [0.8, 0.9, 1.0])]
    probs: Vec<f64>,
    /// Seeded runs per probability.
    #[arg(long, default_value_t = 3)]
    seeds: u32,
    #[arg(long, default_value_t = 0)]
    base_seed: u64,
    /// Outer annealing iterations per run.
    #[arg(long, default_value_t = 1000)]
    max_iter: u32,
    /// Emit the table as JSON.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct ConvertCsvArgs {
    /// CSV with header `sample_code,group_id`.
    samples: PathBuf,
    /// CSV with header `group_id,temperature`.
    groups: PathBuf,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> Result<ExitCode> {
    let geom = PlateGeometry::default();
    match command {
        Command::Solve(args) => {
            let inst = load_instance(&args.instance)?;
            let params = args.sa.params()?;
            anyhow::ensure!(args.restarts >= 1, "need at least one restart");
            let (solution, _trace) = anneal_restarts(&inst, &geom, &params, args.restarts);
            emit(&args.output, &formats::serialize_solution(&solution, &inst))?;
            let rep = report(&solution, &geom);
            if args.json_report {
                eprint!("{}", rep.to_json());
            } else {
                eprint!("{rep}");
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Validate(args) => {
            let inst = load_instance(&args.instance)?;
            let text = read(&args.solution)?;
            let sol = formats::parse_solution(&text, &inst, &geom)
                .with_context(|| format!("reading {}", args.solution.display()))?;
            let rep = validate_solution(&inst, &sol, &geom)
                .map_err(|e| anyhow::anyhow!("structural mismatch: {e}"))?;
            if args.json {
                let lines: Vec<String> = rep.violations.iter().map(|v| v.to_string()).collect();
                println!(
                    "{}",
                    serde_json::json!({ "feasible": rep.is_feasible(), "violations": lines })
                );
            } else {
                print!("{rep}");
            }
            Ok(if rep.is_feasible() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Command::EmitIlp(args) => {
            let inst = load_instance(&args.instance)?;
            let (p, model) = build_model(&inst, &geom, args.plates, args.relax_empty_strips)?;
            let lower = plate_lower_bound(&inst, &geom);
            if (p as u64) < lower {
                eprintln!(
                    "warning: {p} plates is below the capacity bound {lower}; \
                     the model may be infeasible"
                );
            }
            emit(&args.output, &lp_string(&model)?)?;
            eprintln!(
                "model: {} constraints x {} variables, {} plates",
                model.constraint_count(),
                model.variable_count(),
                p
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::ImportSol(args) => {
            let inst = load_instance(&args.instance)?;
            let (_, model) = build_model(&inst, &geom, args.plates, false)?;
            let values = formats::parse_values(&read(&args.values)?)
                .with_context(|| format!("reading {}", args.values.display()))?;
            match import_solution(&model, &values, &inst, &geom) {
                Ok(sol) => {
                    emit(&args.output, &formats::serialize_solution(&sol, &inst))?;
                    eprint!("{}", report(&sol, &geom));
                    Ok(ExitCode::SUCCESS)
                }
                Err(ImportError::Infeasible(rep)) => {
                    eprint!("imported values are infeasible:\n{rep}");
                    Ok(ExitCode::from(1))
                }
                Err(other) => Err(other.into()),
            }
        }
        Command::Oracle(args) => {
            let inst = load_instance(&args.instance)?;
            let limits = ExactLimits {
                max_plates: args.max_plates,
                max_groups: args.max_groups,
                max_samples: args.max_samples,
                node_budget: args.node_budget,
            };
            let res = exact_solve(&inst, &geom, &limits)?;
            emit(&args.output, &formats::serialize_solution(&res.solution, &inst))?;
            eprintln!(
                "cost: {}; proven optimal: {}; nodes: {}",
                res.cost, res.proven_optimal, res.nodes
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Generate(args) => {
            let params = GeneratorParams {
                samples: args.samples.0..=args.samples.1,
                groups: args.groups.0 as usize..=args.groups.1 as usize,
                temperatures: args.temps.0 as usize..=args.temps.1 as usize,
                temp_values: args.temp_range.0 as i64..=args.temp_range.1 as i64,
                seed: args.seed,
            };
            let inst = gen_instance(&params)?;
            emit(&args.output, &formats::serialize_instance(&inst))?;
            eprintln!(
                "instance: {} samples, {} groups, {} temperatures",
                inst.total_samples(),
                inst.group_count(),
                inst.temperature_count()
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Place(args) => {
            let inst = load_instance(&args.instance)?;
            let text = read(&args.solution)?;
            let sol = formats::parse_solution(&text, &inst, &geom)?;
            let rep = validate_solution(&inst, &sol, &geom)
                .map_err(|e| anyhow::anyhow!("structural mismatch: {e}"))?;
            anyhow::ensure!(
                rep.is_feasible(),
                "refusing to place an infeasible solution:\n{rep}"
            );
            let plan = place_wells(&inst, &sol, &geom, args.seed);
            emit(&args.output, &plan.to_json())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Sweep(args) => {
            let inst = load_instance(&args.instance)?;
            let rows = sweep(&inst, &geom, &args)?;
            if args.json {
                println!("{}", serde_json::to_string_pretty(&rows)?);
            } else {
                println!("{:<6} {:<7} {:<6} first-non-full", "prob", "plates", "full");
                for row in &rows {
                    println!(
                        "{:<6} {:<7} {:<6} {}",
                        format!("{:.2}", row.se_prob),
                        row.plates,
                        row.full_plates,
                        row.first_non_full
                            .map(|r| format!("{r:.2}"))
                            .unwrap_or_else(|| "-".into())
                    );
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::ConvertCsv(args) => {
            let inst = formats::csv_to_instance(&read(&args.samples)?, &read(&args.groups)?)?;
            emit(&args.output, &formats::serialize_instance(&inst))?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

#[derive(serde::Serialize)]
struct SweepRow {
    se_prob: f64,
    plates: u32,
    full_plates: usize,
    first_non_full: Option<f64>,
}

fn sweep(inst: &Instance, geom: &PlateGeometry, args: &SweepArgs) -> Result<Vec<SweepRow>> {
    anyhow::ensure!(args.seeds >= 1, "need at least one seed");
    let mut rows = Vec::new();
    for &prob in &args.probs {
        let params = SaParams {
            se_prob: prob,
            max_iter: args.max_iter,
            seed: args.base_seed,
            ..SaParams::default()
        };
        params
            .validate()
            .map_err(|msg| anyhow::anyhow!("invalid sweep parameters: {msg}"))?;
        let (best, _) = anneal_restarts(inst, geom, &params, args.seeds);
        let rep = report(&best, geom);
        rows.push(SweepRow {
            se_prob: prob,
            plates: best.cost_vector().plates,
            full_plates: rep.full_plates,
            first_non_full: rep.first_non_full,
        });
    }
    Ok(rows)
}

fn build_model(
    inst: &Instance,
    geom: &PlateGeometry,
    plates: Option<usize>,
    relax: bool,
) -> Result<(usize, platepack_core::ilp::IlpModel)> {
    let p = match plates {
        Some(p) => p,
        None => {
            let initial = build_initial(inst, geom);
            initial.plates.len().max(1)
        }
    };
    let weights = ObjectiveWeights::linear(p);
    let model = build_ilp(inst, p, &weights, geom, relax)?;
    Ok((p, model))
}

fn load_instance(path: &Path) -> Result<Instance> {
    let text = read(path)?;
    let inst = formats::parse_instance(&text)
        .with_context(|| format!("reading {}", path.display()))?;
    let report = validate_instance(&inst);
    anyhow::ensure!(report.is_valid(), "invalid instance:\n{report}");
    Ok(inst)
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn emit(target: &Option<PathBuf>, text: &str) -> Result<()> {
    match target {
        Some(path) => {
            fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
        }
        None => {
            std::io::stdout()
                .write_all(text.as_bytes())
                .context("writing to stdout")?;
            Ok(())
        }
    }
}

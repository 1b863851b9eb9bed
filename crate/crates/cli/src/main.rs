//! `ldnf`: normal-form and limited-distinct analysis of CSV-backed schemas.

mod load;
mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ldnf_core::ingest::data_file_name;
use ldnf_core::ingest::{csv::write_csv, ddl::to_ddl, load_workload};
use ldnf_core::ldnf::{
    apply_plan, build_plan, emit_migration_sql, estimate_storage, third_nf_blockers, verify_lossless,
    verify_value_sets, DecompositionPlan,
};
use ldnf_core::pipeline::analyze;
use ldnf_core::sim::{benchmark_group_by, run_workload, ConceptMap, Mode, SimOptions};

use load::{load, read_tracked, write, InputError, Loaded};
use report::{render_analysis, render_anomaly, render_group_by, render_plan, PlanSummary, RunReport};

#[derive(Parser)]
#[command(
    name = "ldnf",
    version,
    about = "Normal-form and limited-distinct attribute analysis"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Inputs {
    /// CREATE TABLE statements.
    #[arg(long)]
    schema: PathBuf,
    /// Directory holding one `<relation>.csv` per relation.
    #[arg(long)]
    data_dir: PathBuf,
    /// Analysis configuration; defaults apply when absent.
    #[arg(long, env = "LDNF_CONFIG")]
    config: Option<PathBuf>,
}

impl Inputs {
    fn load(&self) -> Result<Loaded, InputError> {
        load(&self.schema, &self.data_dir, self.config.as_ref())
    }
}

#[derive(Args)]
struct ReportArgs {
    /// Write the JSON run report here.
    #[arg(long)]
    json: Option<PathBuf>,
    /// Omit the timestamp so reruns are byte-identical.
    #[arg(long)]
    deterministic: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Report normal forms, distinct attributes and LDNF status.
    Analyze {
        #[command(flatten)]
        inputs: Inputs,
        #[command(flatten)]
        report: ReportArgs,
        /// Exit 1 unless every relation passes 3NF and LDNF.
        #[arg(long)]
        check: bool,
    },
    /// Same as `analyze --check`.
    Verify {
        #[command(flatten)]
        inputs: Inputs,
        #[command(flatten)]
        report: ReportArgs,
    },
    /// Write a decomposition plan for every non-limited distinct attribute.
    Plan {
        #[command(flatten)]
        inputs: Inputs,
        /// Plan file to write
        #[arg(long)]
        out: PathBuf,
        /// Plan even when a target relation is below 3NF.
        #[arg(long)]
        force: bool,
    },
    /// Apply a plan, writing the new schema, data and migration SQL.
    Apply {
        #[command(flatten)]
        inputs: Inputs,
        /// Plan file written by `plan`, possibly hand-edited
        #[arg(long)]
        plan: PathBuf,
        /// Directory for the new `schema.sql` and one CSV per relation
        #[arg(long)]
        out_dir: PathBuf,
        /// Migration script to write
        #[arg(long)]
        sql: PathBuf,
    },
    /// Replay a workload and count anomalies.
    Simulate {
        #[command(flatten)]
        inputs: Inputs,
        #[command(flatten)]
        report: ReportArgs,
        /// JSON array of operations
        #[arg(long)]
        workload: PathBuf,
        /// `raw` runs on the inputs as given; `ldnf` applies the plan first
        #[arg(long, default_value = "raw")]
        mode: Mode,
        /// Plan supplying concepts; required in ldnf mode.
        #[arg(long)]
        plan: Option<PathBuf>,
        /// In raw mode, write only the first K matching rows per operation.
        #[arg(long, value_name = "K")]
        fault: Option<usize>,
        /// Also compare grouping by `relation.attribute` raw and canonicalized.
        #[arg(long, value_name = "RELATION.ATTRIBUTE")]
        group_by: Option<String>,
    },
}

/// Outcome of a successful run: clean or with findings.
enum Status {
    Clean,
    Findings,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(Status::Clean) => ExitCode::SUCCESS,
        Ok(Status::Findings) => ExitCode::from(1),
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> Result<Status, InputError> {
    match command {
        Command::Analyze { inputs, report, check } => cmd_analyze(&inputs, &report, check),
        Command::Verify { inputs, report } => cmd_analyze(&inputs, &report, true),
        Command::Plan { inputs, out, force } => cmd_plan(&inputs, &out, force),
        Command::Apply {
            inputs,
            plan,
            out_dir,
            sql,
        } => cmd_apply(&inputs, &plan, &out_dir, &sql),
        Command::Simulate {
            inputs,
            report,
            workload,
            mode,
            plan,
            fault,
            group_by,
        } => cmd_simulate(
            &inputs,
            &report,
            &workload,
            mode,
            plan.as_deref(),
            fault,
            group_by.as_deref(),
        ),
    }
}

fn finish(report: &RunReport, args: &ReportArgs) -> Result<(), InputError> {
    if let Some(path) = &args.json {
        write(path, &report.to_json())?;
    }
    Ok(())
}

fn cmd_analyze(inputs: &Inputs, args: &ReportArgs, check: bool) -> Result<Status, InputError> {
    let loaded = inputs.load()?;
    let analysis = analyze(&loaded.db, &loaded.config)?;
    let clean = analysis.is_clean();
    print!(
        "{}",
        render_analysis(&analysis.normal_forms, &analysis.attributes, &analysis.ldnf)
    );
    let report = RunReport::new("analyze", loaded.digests, analysis, args.deterministic);
    finish(&report, args)?;
    Ok(if check && !clean {
        Status::Findings
    } else {
        Status::Clean
    })
}

fn read_plan(path: &Path, digests: &mut Vec<load::InputDigest>) -> Result<DecompositionPlan, InputError> {
    let text = read_tracked(path, digests)?;
    DecompositionPlan::from_json(&text).map_err(|e| InputError::at(path, e))
}

fn cmd_plan(inputs: &Inputs, out: &Path, force: bool) -> Result<Status, InputError> {
    let Loaded { db, config, .. } = inputs.load()?;
    let plan = build_plan(&db, &config)?;
    let blockers = third_nf_blockers(&db, &config, &plan)?;
    if !blockers.is_empty() && !force {
        eprintln!(
            "refusing to plan: {} not in 3NF; normalize first or pass --force",
            blockers.join(", ")
        );
        return Ok(Status::Findings);
    }
    for b in &blockers {
        eprintln!("warning: {b} is not in 3NF");
    }
    write(out, &plan.to_json())?;
    print!("{}", render_plan(&plan));
    Ok(Status::Clean)
}

fn cmd_apply(inputs: &Inputs, plan_path: &Path, out_dir: &Path, sql: &Path) -> Result<Status, InputError> {
    let Loaded {
        db,
        config,
        mut digests,
        ..
    } = inputs.load()?;
    let plan = read_plan(plan_path, &mut digests)?;
    let transformed = apply_plan(&db, &plan).map_err(|e| InputError::at(plan_path, e))?;

    write(&out_dir.join("schema.sql"), &to_ddl(transformed.schema()))?;
    for inst in transformed.instances() {
        write(&out_dir.join(data_file_name(inst.name())), &write_csv(inst))?;
    }
    write(sql, &emit_migration_sql(&plan, db.schema()))?;

    let sets = verify_value_sets(&transformed, &config);
    let lossless = verify_lossless(&db, &transformed, &plan)?;
    print!("{}", render_plan(&plan));
    println!("value sets: {}", if sets.passed { "pass" } else { "FAIL" });
    for p in &sets.similar_pairs {
        println!("  {}.{}: `{}` and `{}` are similar", p.relation, p.attribute, p.a, p.b);
    }
    for d in &sets.dangling {
        println!(
            "  {}.{} row {}: `{}` not in {}",
            d.relation, d.attribute, d.row, d.value, d.value_set
        );
    }
    println!("lossless: {}", if lossless.passed { "pass" } else { "FAIL" });
    for f in &lossless.failures {
        println!("  {f}");
    }
    Ok(if sets.passed && lossless.passed {
        Status::Clean
    } else {
        Status::Findings
    })
}

fn cmd_simulate(
    inputs: &Inputs,
    args: &ReportArgs,
    workload_path: &Path,
    mode: Mode,
    plan_path: Option<&Path>,
    fault: Option<usize>,
    group_by: Option<&str>,
) -> Result<Status, InputError> {
    let Loaded {
        db,
        config,
        mut digests,
        ..
    } = inputs.load()?;
    let workload_text = read_tracked(workload_path, &mut digests)?;
    let workload = load_workload(&workload_text).map_err(|e| InputError::at(workload_path, e))?;
    let plan = match (plan_path, mode) {
        (Some(path), _) => read_plan(path, &mut digests)?,
        (None, Mode::Raw) => build_plan(&db, &config)?,
        (None, Mode::Ldnf) => return Err(InputError::usage("--mode ldnf requires --plan")),
    };
    let concepts = ConceptMap::from_plan(&db, &plan)?;
    let target = match mode {
        Mode::Raw => db.clone(),
        Mode::Ldnf => apply_plan(&db, &plan).map_err(|e| InputError::at(plan_path.expect("checked above"), e))?,
    };
    let anomaly = run_workload(&target, &workload, mode, &concepts, &SimOptions { fault })
        .map_err(|e| InputError::at(workload_path, e))?;
    print!("{}", render_anomaly(&anomaly));

    let bench = match group_by {
        Some(target) => {
            let (rel, attr) = target
                .split_once('.')
                .ok_or_else(|| InputError::usage(format!("--group-by expects RELATION.ATTRIBUTE, got `{target}`")))?;
            let inst = db.require(rel)?;
            let mut b = benchmark_group_by(inst, attr, concepts.clusters(rel, attr))?;
            if args.deterministic {
                b.wall_ns_raw = 0;
                b.wall_ns_ldnf = 0;
            }
            print!("{}", render_group_by(&b));
            Some(b)
        }
        None => None,
    };

    let analysis = analyze(&target, &config)?;
    let mut report = RunReport::new("simulate", digests, analysis, args.deterministic);
    report.plan = Some(PlanSummary::new(&plan, estimate_storage(&plan, &db)?));
    report.anomaly = Some(anomaly);
    report.group_by = bench;
    finish(&report, args)?;
    Ok(Status::Clean)
}

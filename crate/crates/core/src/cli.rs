//! Command-line front end.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::descent::{FormulaRule, Method, SinkhornAssignment};
use crate::error::{Error, Result};
use crate::experiments::{builtin, EXPERIMENT_NAMES};
use crate::gradient::Form;
use crate::io::{export_deformed_mesh, write_energy_csv, write_shape_csv, write_summary, Summary};
use crate::mesh::{generate_disk_mesh, DiskMesh};
use crate::optimizer::{run_with, RunConfig};
use crate::radial::RadialShape;

#[derive(Debug, Parser)]
#[command(name = "lipshape", version, about = "Lipschitz steepest descent for star-shaped domains")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one built-in experiment.
    Run(RunArgs),
    /// List the built-in experiments.
    List,
    /// Write the ring mesh of the given level in text format.
    Mesh {
        #[arg(long, default_value_t = 24)]
        level: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Args)]
struct RunArgs {
    #[arg(long)]
    experiment: String,
    #[arg(long, value_enum, default_value_t = Method::Formula)]
    method: Method,
    #[arg(long, value_enum, default_value_t = Form::Volume)]
    form: Form,
    /// Circle nodes.
    #[arg(long, default_value_t = 512)]
    n: usize,
    /// Ring count of the disk mesh (6·level² triangles).
    #[arg(long, default_value_t = 24)]
    mesh_level: usize,
    #[arg(long, default_value_t = 250)]
    max_it: usize,
    #[arg(long)]
    out: PathBuf,
    /// Write a shape snapshot every K iterations (0: initial and final only).
    #[arg(long, default_value_t = 10)]
    snapshot_every: usize,
    /// Reserved; the pipeline has no randomness.
    #[arg(long)]
    seed_free: bool,
    #[arg(long, value_enum, default_value_t = FormulaRule::Exact)]
    formula_rule: FormulaRule,
    #[arg(long, default_value_t = 0.05)]
    sinkhorn_delta: f64,
    #[arg(long, default_value_t = 2000)]
    sinkhorn_max_iter: usize,
    #[arg(long, default_value_t = 1e-6)]
    sinkhorn_tol: f64,
    #[arg(long, value_enum, default_value_t = SinkhornAssignment::CTransform)]
    sinkhorn_assignment: SinkhornAssignment,
    /// Record wall time in energy.csv (makes the log non-reproducible).
    #[arg(long)]
    record_time: bool,
}

/// Parses `argv` (including the program name) and runs; returns the exit code.
pub fn run_cli<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let outcome = match cli.command {
        Command::Run(args) => execute(&args),
        Command::List => {
            for name in EXPERIMENT_NAMES {
                let spec = builtin(name).expect("builtin names resolve");
                println!("{name:18} {}", spec.expected);
            }
            Ok(())
        }
        Command::Mesh { level, out } => generate_disk_mesh(level).save(out),
    };
    match outcome {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn snapshot(dir: &Path, iter: usize, shape: &RadialShape, mesh: &DiskMesh) -> Result<()> {
    write_shape_csv(dir.join(format!("shape_{iter:04}.csv")), shape)?;
    export_deformed_mesh(mesh, shape, dir.join(format!("deformed_{iter:04}.vtk")))
}

fn execute(args: &RunArgs) -> Result<()> {
    let spec = builtin(&args.experiment)?;
    let mut config = RunConfig::new(spec.data.clone(), spec.initial_shape(args.n)?, args.method, args.form);
    config.mesh_level = args.mesh_level;
    config.max_it = args.max_it;
    config.record_time = args.record_time;
    config.directions.formula_rule = args.formula_rule;
    config.directions.sinkhorn.delta = args.sinkhorn_delta;
    config.directions.sinkhorn.max_iter = args.sinkhorn_max_iter;
    config.directions.sinkhorn.tol = args.sinkhorn_tol;
    config.directions.sinkhorn.assignment = args.sinkhorn_assignment;
    config.validate()?;

    let dir = &args.out;
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let display = generate_disk_mesh(args.mesh_level);
    snapshot(dir, 0, &config.initial, &display)?;

    let mut last_written = 0;
    let result = run_with(&config, |record, shape| {
        if args.snapshot_every > 0 && record.iter % args.snapshot_every == 0 {
            snapshot(dir, record.iter, shape, &display)?;
            last_written = record.iter;
        }
        Ok(())
    })?;
    let last = result.records.last().map_or(0, |r| r.iter);
    if last != last_written {
        snapshot(dir, last, &result.final_shape, &display)?;
    }

    write_energy_csv(dir.join("energy.csv"), &result.records)?;
    write_summary(
        dir.join("summary.json"),
        &Summary {
            experiment: spec.name.to_string(),
            method: args.method.name().to_string(),
            form: args.form.name().to_string(),
            iterations: result.accepted_steps(),
            final_energy: result.final_energy,
            termination: result.termination.name().to_string(),
        },
    )?;
    Ok(())
}

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use inertia_bench::{
    enabled_methods, estimate_all, prepare, report, sweep, timevarying_study, BenchError, LoadProfile,
    SweepParam,
};
use inertia_core::{validate, AreaDataset, Method, ScenarioFile, Severity};

#[derive(Parser)]
#[command(name = "inertia", version, about = "Area inertia estimation benchmark")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output directory.
    #[arg(long, global = true, default_value = "./out")]
    out: PathBuf,
    /// Overrides the scenario's noise seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Sysid,
    Dmd,
    Osc,
    All,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a scenario and write machine and area trajectories.
    Simulate { scenario: PathBuf },
    /// Run the estimators on a scenario and write the error report.
    Estimate {
        scenario: PathBuf,
        #[arg(long, value_enum, default_value_t = MethodArg::All)]
        method: MethodArg,
        /// Also write the raw and conditioned area datasets.
        #[arg(long)]
        save_artifacts: bool,
    },
    /// Re-run one estimator over a list of hyperparameter values.
    Sweep {
        scenario: PathBuf,
        /// sysid.N_p, dmd.start_index or osc.bandwidth_B
        #[arg(long)]
        param: String,
        /// Comma-separated values; integer ranges as `a..b` (inclusive).
        #[arg(long)]
        values: String,
    },
    /// Repeat the scenario for every hour of a load/commitment profile.
    Timevary {
        scenario: PathBuf,
        #[arg(long)]
        profile: PathBuf,
    },
    /// Check a grid model for structural errors and range warnings.
    Validate { model: PathBuf },
}

/// Failure carrying its process exit code.
struct Exit(u8, String);

impl From<BenchError> for Exit {
    fn from(e: BenchError) -> Self {
        Exit(e.exit_code() as u8, e.to_string())
    }
}

fn config(msg: impl std::fmt::Display) -> Exit {
    Exit(1, format!("configuration error: {msg}"))
}

fn load(path: &Path, seed: Option<u64>) -> Result<ScenarioFile, Exit> {
    let mut file = ScenarioFile::load(path).map_err(|e| config(format!("{}: {e}", path.display())))?;
    if let (Some(seed), Some(noise)) = (seed, file.noise.as_mut()) {
        noise.seed = seed;
    }
    Ok(file)
}

fn write(dir: &Path, name: &str, text: &str) -> Result<PathBuf, Exit> {
    std::fs::create_dir_all(dir).map_err(|e| config(format!("{}: {e}", dir.display())))?;
    let path = dir.join(name);
    std::fs::write(&path, text).map_err(|e| config(format!("{}: {e}", path.display())))?;
    Ok(path)
}

fn json_text(v: &impl serde::Serialize) -> String {
    serde_json::to_string_pretty(v).expect("report values serialize") + "\n"
}

fn dataset_csv(data: &AreaDataset) -> String {
    let mut out = String::from("t");
    for id in data.area_ids() {
        let _ = write!(out, ",area_{id}_domega,area_{id}_dP");
    }
    out.push('\n');
    for k in 0..data.len() {
        let _ = write!(out, "{:.11e}", data.speed(0).time(k));
        for i in 0..data.n_areas() {
            let _ = write!(out, ",{:.11e},{:.11e}", data.speed(i).values()[k], data.power(i).values()[k]);
        }
        out.push('\n');
    }
    out
}

fn parse_values(text: &str) -> Result<Vec<f64>, Exit> {
    let mut values = Vec::new();
    for part in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        if let Some((a, b)) = part.split_once("..") {
            let (a, b): (i64, i64) = (
                a.trim().parse().map_err(|_| config(format!("bad range `{part}`")))?,
                b.trim().parse().map_err(|_| config(format!("bad range `{part}`")))?,
            );
            values.extend((a..=b).map(|v| v as f64));
        } else {
            values.push(part.parse().map_err(|_| config(format!("bad value `{part}`")))?);
        }
    }
    if values.is_empty() {
        return Err(config("no sweep values given"));
    }
    Ok(values)
}

fn run(cli: Cli) -> Result<(), Exit> {
    let ext = match cli.format {
        Format::Csv => "csv",
        Format::Json => "json",
    };
    match cli.command {
        Command::Simulate { scenario } => {
            let file = load(&scenario, cli.seed)?;
            let prepared = prepare(&file)?;
            let id = &prepared.scenario;
            let text = match cli.format {
                Format::Csv => prepared.sim.to_csv(),
                Format::Json => json_text(&prepared.sim),
            };
            let path = write(&cli.out, &format!("{id}_simulation.{ext}"), &text)?;
            write(&cli.out, &format!("{id}_dataset.csv"), &dataset_csv(&prepared.raw))?;
            println!("{id}: {} samples at {} s -> {}", prepared.sim.len(), prepared.sim.dt, path.display());
        }
        Command::Estimate { scenario, method, save_artifacts } => {
            let mut file = load(&scenario, cli.seed)?;
            if method != MethodArg::All {
                let keep = match method {
                    MethodArg::Sysid => Method::SysId,
                    MethodArg::Dmd => Method::Dmd,
                    _ => Method::Osc,
                };
                let est = &mut file.estimators;
                est.sysid.enabled = keep == Method::SysId;
                est.dmd.enabled = keep == Method::Dmd;
                est.osc.enabled = keep == Method::Osc;
            }
            let prepared = prepare(&file)?;
            let reports = estimate_all(&prepared, &file.estimators)?;
            let id = &prepared.scenario;
            let text = match cli.format {
                Format::Csv => report::reports_csv(&reports),
                Format::Json => json_text(&report::reports_json(&reports)),
            };
            let path = write(&cli.out, &format!("{id}_report.{ext}"), &text)?;
            if save_artifacts {
                write(&cli.out, &format!("{id}_dataset_raw.csv"), &dataset_csv(&prepared.raw))?;
                write(&cli.out, &format!("{id}_dataset.csv"), &dataset_csv(&prepared.data))?;
            }
            for r in &reports {
                let mee = r.mee_pct.map_or("n/a".to_string(), |m| format!("{m:.3}%"));
                let flag = if r.complete { "" } else { " (incomplete)" };
                println!("{id} {}: MEE {mee}{flag}", r.method);
            }
            println!("report -> {}", path.display());
            if reports.iter().all(|r| r.mee_pct.is_none()) {
                return Err(Exit(3, format!("every estimator failed on every area ({:?})", enabled_methods(&file.estimators))));
            }
        }
        Command::Sweep { scenario, param, values } => {
            let file = load(&scenario, cli.seed)?;
            let param: SweepParam = param.parse()?;
            let values = parse_values(&values)?;
            let prepared = prepare(&file)?;
            let result = sweep(&prepared, &file.estimators, param, &values)?;
            let text = match cli.format {
                Format::Csv => report::sweep_csv(&result),
                Format::Json => json_text(&report::sweep_json(&result)),
            };
            let name = format!("{}_sweep_{}.{ext}", prepared.scenario, param.name().replace('.', "_"));
            let path = write(&cli.out, &name, &text)?;
            for (row, mee) in result.rows.iter().zip(result.mee()) {
                println!("{param} = {}: MEE {mee:.3}%", row.value);
            }
            println!("sweep -> {}", path.display());
            if result.rows.iter().all(|r| r.report.mee_pct.is_none()) {
                return Err(Exit(3, "the estimator failed for every value".into()));
            }
        }
        Command::Timevary { scenario, profile } => {
            let file = load(&scenario, cli.seed)?;
            file.check_runnable().map_err(config)?;
            let profile = LoadProfile::load(&profile)?;
            let outcomes = timevarying_study(&file, &profile);
            let text = match cli.format {
                Format::Csv => report::timevary_csv(&outcomes),
                Format::Json => json_text(&report::timevary_json(&outcomes)),
            };
            let path = write(&cli.out, &format!("{}_timevary.{ext}", file.scenario_id()), &text)?;
            let skipped = outcomes.iter().filter(|h| h.result.is_err()).count();
            println!("{} hours ({skipped} skipped) -> {}", outcomes.len(), path.display());
            if skipped == outcomes.len() {
                return Err(Exit(2, "every hour was infeasible".into()));
            }
        }
        Command::Validate { model } => {
            let file = ScenarioFile::load(&model).map_err(|e| config(format!("{}: {e}", model.display())))?;
            let findings = validate(&file.grid);
            for f in &findings {
                let tag = match f.severity {
                    Severity::Error => "error",
                    Severity::Warning => "warning",
                };
                println!("{tag}: {}", f.message);
            }
            if findings.iter().any(|f| f.severity == Severity::Error) {
                return Err(Exit(1, "model has structural errors".into()));
            }
            if findings.is_empty() {
                println!("ok");
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Exit(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}

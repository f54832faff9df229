use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::anyhow;
use clap::{Parser, Subcommand};
use flexpark::dispatch::{
    check_dispatch, schedule_all_cases, schedule_dispatch, DispatchResult, FlexibleCase, TargetId,
};
use flexpark::evaluation::{mad, r_square, rmsd};
use flexpark::offline_db::{build_database, write_atomic, DbError, OfflineDatabase};
use flexpark::scenario::{augment_days, write_profiles_csv};
use flexpark::LoadProfile;

mod config;
mod svg;

use config::{read_days, RunConfig};

#[derive(Debug)]
pub enum CliError {
    /// Bad arguments or configuration (exit code 2).
    Usage(String),
    /// Failure while running a valid request (exit code 1).
    Runtime(anyhow::Error),
}

impl From<anyhow::Error> for CliError {
    fn from(e: anyhow::Error) -> Self {
        CliError::Runtime(e)
    }
}

type CliResult<T> = Result<T, CliError>;

#[derive(Parser)]
#[command(
    name = "flexpark",
    version,
    about = "Demand response planning for an industrial park"
)]
struct Cli {
    /// TOML run configuration; defaults to the bundled demo park.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Random seed for simulation and augmentation.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate the baseline day of each load and write one CSV per load.
    Simulate,
    /// Densify and augment load days.
    Augment {
        /// Load CSV to augment (repeatable); defaults to the baseline loads.
        #[arg(long)]
        input: Vec<PathBuf>,
        /// Days to generate per input, overriding the config.
        #[arg(long)]
        days: Option<usize>,
    },
    /// Dispatch the flexible loads of one case against one response target.
    Dispatch {
        #[arg(long)]
        target: String,
        /// Case label such as H-R-S or S.
        #[arg(long)]
        case: String,
    },
    /// Build the offline response database for every target and case.
    BuildDb,
    /// Print one entry of a saved database.
    QueryDb {
        /// Database file; defaults to offline_db.json in the output directory.
        #[arg(long)]
        db: Option<PathBuf>,
        #[arg(long)]
        target: String,
        #[arg(long)]
        case: String,
    },
    /// Render charts and a metrics table.
    Report {
        /// Reference and candidate CSV whose agreement goes into metrics.csv (repeatable).
        #[arg(long, num_args = 2, value_names = ["REFERENCE", "CANDIDATE"])]
        pair: Vec<PathBuf>,
    },
}

/// Files produced by a command, written only once the command has succeeded.
#[derive(Default)]
struct Outputs {
    files: Vec<(String, Vec<u8>)>,
}

impl Outputs {
    fn add(&mut self, name: impl Into<String>, bytes: impl Into<Vec<u8>>) {
        self.files.push((name.into(), bytes.into()));
    }

    fn commit(self, dir: &Path) -> CliResult<()> {
        if self.files.is_empty() {
            return Ok(());
        }
        std::fs::create_dir_all(dir)
            .map_err(|e| anyhow!("cannot create {}: {e}", dir.display()))?;
        for (name, bytes) in self.files {
            let path = dir.join(&name);
            write_atomic(&path, &bytes).map_err(|e| anyhow!(e))?;
            println!("wrote {}", path.display());
        }
        Ok(())
    }
}

fn csv_bytes(days: &[LoadProfile]) -> CliResult<Vec<u8>> {
    let mut buf = Vec::new();
    write_profiles_csv(&mut buf, days).map_err(|e| anyhow!(e))?;
    Ok(buf)
}

fn parse_target(s: &str) -> CliResult<TargetId> {
    s.parse()
        .map_err(|e| CliError::Usage(format!("--target: {e}")))
}

fn parse_case(s: &str) -> CliResult<FlexibleCase> {
    s.parse()
        .map_err(|e| CliError::Usage(format!("--case: {e}")))
}

fn simulate(cfg: &RunConfig) -> CliResult<Outputs> {
    let b = cfg.baselines()?;
    let mut out = Outputs::default();
    for (name, profile) in [
        ("heating", &b.heating),
        ("rotating", &b.rotating),
        ("storage", &b.storage),
    ] {
        out.add(
            format!("{name}.csv"),
            csv_bytes(std::slice::from_ref(profile))?,
        );
    }
    Ok(out)
}

fn augment(cfg: &RunConfig, inputs: &[PathBuf], days: Option<usize>) -> CliResult<Outputs> {
    let mut aug = cfg.augment.clone();
    if let Some(d) = days {
        aug.days_to_generate = d;
    }
    let mut sources = Vec::new();
    if inputs.is_empty() {
        let b = cfg.baselines()?;
        sources.extend([
            ("heating".to_string(), b.heating),
            ("rotating".into(), b.rotating),
            ("storage".into(), b.storage),
        ]);
    }
    for path in inputs {
        let stem = path
            .file_stem()
            .and_then(|s| s.to_str())
            .unwrap_or("load")
            .to_string();
        let day = read_days(path)?
            .into_iter()
            .next()
            .ok_or_else(|| CliError::Usage(format!("{} holds no complete day", path.display())))?;
        sources.push((stem, day));
    }
    let mut out = Outputs::default();
    for (name, day) in sources {
        aug.validate(day.len())
            .map_err(|e| CliError::Usage(format!("augment: {e}")))?;
        let generated = augment_days(&day, &aug).map_err(|e| anyhow!(e))?;
        if !generated.is_empty() {
            out.add(format!("{name}_augmented.csv"), csv_bytes(&generated)?);
        }
    }
    Ok(out)
}

fn dispatch_csv(r: &DispatchResult) -> String {
    let mut s = String::from("step,demand_kw,heating_kw,rotating_kw,storage_kw,delivered_kw,soc\n");
    for t in 0..r.horizon() {
        s.push_str(&format!(
            "{t},{},{},{},{},{},{}\n",
            r.demand[t],
            r.heating[t],
            r.rotating[t],
            r.storage_power[t],
            r.delivered(t),
            r.soc[t + 1]
        ));
    }
    s
}

fn dispatch(cfg: &RunConfig, target: &str, case: &str) -> CliResult<Outputs> {
    let (id, case) = (parse_target(target)?, parse_case(case)?);
    let targets = cfg.targets()?;
    let target = targets
        .iter()
        .find(|t| t.id() == id)
        .ok_or_else(|| CliError::Usage(format!("target {id} is not defined in the config")))?;
    let b = cfg.baselines()?;
    let r = schedule_dispatch(case, target, &b, &cfg.dispatch)
        .map_err(|e| CliError::Usage(format!("dispatch: {e}")))?;
    let violations = check_dispatch(&r, target, &b, &cfg.dispatch).map_err(|e| anyhow!(e))?;
    println!("target {id} case {case}");
    println!("F_pre {:.3} kWh", r.f_pre);
    println!("F_act {:.3} kWh", r.f_act);
    println!("F {:.3} kWh", r.unresponsiveness);
    for w in r.warnings.iter().chain(&violations) {
        println!("warning: {w}");
    }
    let mut out = Outputs::default();
    let stem = format!("dispatch_{id}_{case}");
    let json = serde_json::to_string_pretty(&r).map_err(|e| anyhow!(e))? + "\n";
    out.add(format!("{stem}.json"), json);
    out.add(format!("{stem}.csv"), dispatch_csv(&r));
    Ok(out)
}

fn build_db(cfg: &RunConfig) -> CliResult<Outputs> {
    let b = cfg.baselines()?;
    let targets = cfg.targets()?;
    let db = build_database(&b, &cfg.dispatch, &targets, cfg.seed, cfg.park.start_time())
        .map_err(|e| CliError::Usage(format!("build-db: {e}")))?;
    println!("{} entries", db.len());
    for (key, e) in &db.entries {
        println!(
            "{key}: response {:.3} kWh, unresponsiveness {:.3} kWh",
            e.response_value_kwh, e.unresponsiveness_kwh
        );
        for w in &e.dispatch.warnings {
            println!("warning: {key}: {w}");
        }
    }
    let mut out = Outputs::default();
    out.add("offline_db.json", db.to_canonical_json());
    Ok(out)
}

fn query_db(cfg: &RunConfig, db: Option<&Path>, target: &str, case: &str) -> CliResult<()> {
    let path = db
        .map(Path::to_path_buf)
        .unwrap_or_else(|| cfg.out_dir.join("offline_db.json"));
    let db = OfflineDatabase::load(&path).map_err(|e| match e {
        DbError::Io { .. } => CliError::Usage(e.to_string()),
        other => CliError::Runtime(anyhow!(other)),
    })?;
    let entry = db
        .query_str(target, case)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let r = &entry.dispatch;
    println!("target {} case {}", r.target, r.case);
    println!("response_value {:.3} kWh", entry.response_value_kwh);
    println!("unresponsiveness {:.3} kWh", entry.unresponsiveness_kwh);
    println!("F_pre {:.3} kWh", r.f_pre);
    println!("F_act {:.3} kWh", r.f_act);
    println!("constraints_ok {}", entry.constraints_ok);
    for w in &r.warnings {
        println!("warning: {w}");
    }
    Ok(())
}

fn fmt_metric(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.6}")).unwrap_or_default()
}

fn report(cfg: &RunConfig, pairs: &[PathBuf]) -> CliResult<Outputs> {
    let mut out = Outputs::default();
    let mut table = String::from("series,rmsd_kw,mad_kw,r_square\n");
    for (i, pair) in pairs.chunks(2).enumerate() {
        let load = |p: &PathBuf| -> CliResult<Vec<f64>> {
            if !p.is_file() {
                return Err(CliError::Usage(format!("missing series {}", p.display())));
            }
            Ok(read_days(p)?
                .iter()
                .flat_map(|d| d.values().to_vec())
                .collect())
        };
        let (reference, candidate) = (load(&pair[0])?, load(&pair[1])?);
        let name = pair[1]
            .file_stem()
            .and_then(|s| s.to_str())
            .unwrap_or("series");
        if reference.len() != candidate.len() || reference.is_empty() {
            return Err(CliError::Usage(format!(
                "{} and {} differ in length ({} vs {})",
                pair[0].display(),
                pair[1].display(),
                reference.len(),
                candidate.len()
            )));
        }
        table.push_str(&format!(
            "{name},{},{},{}\n",
            fmt_metric(rmsd(&reference, &candidate).ok()),
            fmt_metric(mad(&reference, &candidate).ok()),
            fmt_metric(r_square(&reference, &candidate).ok())
        ));
        out.add(
            format!("pair_{}_{name}.svg", i + 1),
            svg::line_chart(
                name,
                "kW",
                &[
                    svg::Series {
                        name: "reference",
                        values: &reference,
                    },
                    svg::Series {
                        name,
                        values: &candidate,
                    },
                ],
            ),
        );
    }
    out.add("metrics.csv", table);

    let b = cfg.baselines()?;
    out.add(
        "baselines.svg",
        svg::line_chart(
            "Baseline load",
            "kW",
            &[
                svg::Series {
                    name: "heating",
                    values: b.heating.values(),
                },
                svg::Series {
                    name: "rotating",
                    values: b.rotating.values(),
                },
                svg::Series {
                    name: "storage",
                    values: b.storage.values(),
                },
            ],
        ),
    );
    let targets = cfg.targets()?;
    let mut per_target = Vec::new();
    for t in &targets {
        let all = schedule_all_cases(t, &b, &cfg.dispatch)
            .map_err(|e| CliError::Usage(format!("dispatch: {e}")))?;
        let hrs = &all[0];
        out.add(
            format!("dispatch_{}.svg", t.id()),
            svg::line_chart(
                &format!("Response for {} (H-R-S)", t.id()),
                "kW",
                &[
                    svg::Series {
                        name: "demand",
                        values: &hrs.demand,
                    },
                    svg::Series {
                        name: "delivered",
                        values: &hrs.delivered_series(),
                    },
                ],
            ),
        );
        per_target.push((
            t.id().to_string(),
            all.iter().map(|r| r.unresponsiveness).collect::<Vec<_>>(),
        ));
    }
    let cases: Vec<String> = FlexibleCase::ALL.iter().map(|c| c.to_string()).collect();
    let series: Vec<svg::Series> = per_target
        .iter()
        .map(|(n, v)| svg::Series { name: n, values: v })
        .collect();
    out.add(
        "unresponsiveness.svg",
        svg::bar_chart("Unresponsiveness by flexible case", "kWh", &cases, &series),
    );
    Ok(out)
}

fn run(cli: Cli) -> CliResult<()> {
    let cfg = RunConfig::load(cli.config.as_deref(), cli.seed, cli.out)?;
    let outputs = match &cli.command {
        Command::Simulate => simulate(&cfg)?,
        Command::Augment { input, days } => augment(&cfg, input, *days)?,
        Command::Dispatch { target, case } => dispatch(&cfg, target, case)?,
        Command::BuildDb => build_db(&cfg)?,
        Command::QueryDb { db, target, case } => {
            return query_db(&cfg, db.as_deref(), target, case)
        }
        Command::Report { pair } => report(&cfg, pair)?,
    };
    outputs.commit(&cfg.out_dir)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

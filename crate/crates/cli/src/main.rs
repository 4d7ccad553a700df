//! `skygs`: validate scenarios, generate contact plans, run simulations,
//! compare policies and sweep V.

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use log::{error, info};
use rayon::prelude::*;
use serde::Serialize;
use skygs_core::baselines::PolicyKind;
use skygs_core::engine::run_observed;
use skygs_core::scheduler::{weight_table, AntennaTarget};
use skygs_core::{run, ContactPlanError, ContactTable, RunSummary, Scenario, ScenarioError, SimError};

#[derive(Parser)]
#[command(
    name = "skygs",
    version,
    about = "Federated ground-station downlink scheduler and simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a scenario file and print "OK" or the first error.
    Validate {
        #[arg(long)]
        scenario: PathBuf,
    },
    /// Propagate orbits and write the contact-plan CSV.
    GenContacts {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run one simulation and write records.csv and summary.json.
    Simulate {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        policy: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
        /// Also write every slot's edge weights to weights.csv.
        #[arg(long)]
        dump_weights: bool,
    },
    /// Run policies × seeds and write one summary row per run.
    Compare {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',', default_value = "skygs,sg,bg,br,bwg,ilp")]
        policies: Vec<String>,
        #[arg(long, value_delimiter = ',')]
        seeds: Vec<u64>,
        /// Output CSV file (or directory, receiving compare.csv); stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run SkyGS over a list of V values, averaging over seeds.
    SweepV {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',', required = true)]
        v_list: Vec<f64>,
        #[arg(long, value_delimiter = ',')]
        seeds: Vec<u64>,
        /// Output CSV file (or directory, receiving sweep_v.csv); stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    scenario: PathBuf,
    #[arg(long)]
    v: Option<f64>,
    #[arg(long)]
    xi: Option<f64>,
    /// Contact-plan CSV replacing the scenario's contact source.
    #[arg(long)]
    contacts: Option<PathBuf>,
}

#[derive(Debug)]
enum CliError {
    Validation(String),
    Runtime(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Runtime(_) => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Validation(m) | CliError::Runtime(m) => f.write_str(m),
        }
    }
}

impl From<ScenarioError> for CliError {
    fn from(e: ScenarioError) -> Self {
        match e {
            ScenarioError::Io { .. } => CliError::Runtime(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<ContactPlanError> for CliError {
    fn from(e: ContactPlanError) -> Self {
        match e {
            ContactPlanError::Io { .. } => CliError::Runtime(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        match e {
            SimError::Scenario(e) => e.into(),
            SimError::ContactPlan(e) => e.into(),
            e => CliError::Runtime(e.to_string()),
        }
    }
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Runtime(format!("{}: {e}", path.display()))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("SKYGS_LOG", "warn")).init();
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}

fn dispatch(command: Command) -> Result<(), CliError> {
    match command {
        Command::Validate { scenario } => {
            Scenario::load(&scenario)?;
            println!("OK");
            Ok(())
        }
        Command::GenContacts { scenario, seed, out } => {
            let mut sc = Scenario::load(&scenario)?;
            if let Some(seed) = seed {
                sc.sim.seed = seed;
            }
            let table = ContactTable::propagate(&sc);
            info!("{} contacts over {} slots", table.len(), table.horizon());
            write_output(out.as_deref(), None, &table.to_csv_bytes(&sc))
        }
        Command::Simulate {
            common,
            policy,
            seed,
            out,
            dump_weights,
        } => simulate(&common, policy.as_deref(), seed, &out, dump_weights),
        Command::Compare {
            common,
            policies,
            seeds,
            out,
        } => {
            let csv = compare(&common, &policies, &seeds)?;
            write_output(out.as_deref(), Some("compare.csv"), &csv)
        }
        Command::SweepV {
            common,
            v_list,
            seeds,
            out,
        } => {
            let csv = sweep_v(&common, &v_list, &seeds)?;
            write_output(out.as_deref(), Some("sweep_v.csv"), &csv)
        }
    }
}

/// Loads the scenario and applies the V and ξ overrides.
fn load(common: &Common) -> Result<Scenario, CliError> {
    let mut sc = Scenario::load(&common.scenario)?;
    if let Some(v) = common.v {
        if !(v.is_finite() && v >= 0.0) {
            return Err(CliError::Validation(format!(
                "invalid `--v`: {v} must be finite and >= 0"
            )));
        }
        sc.sim.v = v;
    }
    if let Some(xi) = common.xi {
        if !(xi.is_finite() && xi > 0.0) {
            return Err(CliError::Validation(format!(
                "invalid `--xi`: {xi} must be finite and > 0"
            )));
        }
        sc.sim.xi = xi;
    }
    Ok(sc)
}

fn contacts_for(common: &Common, sc: &Scenario) -> Result<ContactTable, CliError> {
    Ok(match &common.contacts {
        Some(path) => ContactTable::load_csv(path, sc)?,
        None => ContactTable::build(sc)?,
    })
}

fn with_seed(sc: &Scenario, seed: u64) -> Scenario {
    let mut sc = sc.clone();
    sc.sim.seed = seed;
    sc
}

fn simulate(common: &Common, policy: Option<&str>, seed: Option<u64>, out: &Path, dump: bool) -> Result<(), CliError> {
    let mut sc = load(common)?;
    if let Some(seed) = seed {
        sc.sim.seed = seed;
    }
    if let Some(name) = policy {
        sc.set_policy(name)?;
    }
    let contacts = contacts_for(common, &sc)?;
    fs::create_dir_all(out).map_err(|e| io_err(out, e))?;

    let mut weights = Vec::new();
    let output = if dump {
        let mut w = csv::Writer::from_writer(&mut weights);
        w.write_record(WEIGHT_HEADER).expect("writing to memory");
        let mut observe = |ctx: &skygs_core::SlotContext<'_>| {
            for e in weight_table(ctx) {
                let AntennaTarget::Real(a) = e.antenna else { continue };
                w.write_record([
                    ctx.slot.to_string(),
                    sc.satellites[e.satellite].id.clone(),
                    sc.ground_stations[a.station].id.clone(),
                    a.index.to_string(),
                    e.data_center.map(|d| sc.data_centers[d].id.clone()).unwrap_or_default(),
                    e.amount.to_string(),
                    e.weight.to_string(),
                    ctx.q.to_string(),
                ])
                .expect("writing to memory");
            }
        };
        let output = run_observed(&sc, &contacts, &sc.sim.policy, &mut observe)?;
        w.flush().expect("writing to memory");
        drop(w);
        output
    } else {
        run(&sc, &contacts, &sc.sim.policy)?
    };

    write_file(&out.join("records.csv"), &output.records_csv(&sc))?;
    write_file(&out.join("summary.json"), output.summary_json().as_bytes())?;
    if dump {
        write_file(&out.join("weights.csv"), &weights)?;
    }
    println!("{}", output.summary_json());
    Ok(())
}

const WEIGHT_HEADER: [&str; 8] = [
    "slot",
    "satellite",
    "ground_station",
    "antenna",
    "data_center",
    "amount_mb",
    "weight",
    "q",
];

#[derive(Serialize)]
struct CompareRow {
    policy: String,
    seed: u64,
    total_cost: Option<f64>,
    avg_latency_min_per_mb: Option<f64>,
    violation_rate: Option<f64>,
    final_backlog_mb: Option<f64>,
    mean_q: Option<f64>,
    max_q: Option<f64>,
    status: String,
}

impl CompareRow {
    fn from_result(policy: &str, seed: u64, r: Result<RunSummary, CliError>) -> Self {
        match r {
            Ok(s) => CompareRow {
                policy: s.policy,
                seed: s.seed,
                total_cost: Some(s.total_cost),
                avg_latency_min_per_mb: s.avg_latency_min_per_mb,
                violation_rate: Some(s.violation_rate),
                final_backlog_mb: Some(s.final_backlog_mb),
                mean_q: Some(s.mean_q),
                max_q: Some(s.max_q),
                status: "ok".into(),
            },
            Err(e) => {
                error!("{policy} seed {seed}: {e}");
                CompareRow {
                    policy: policy.to_string(),
                    seed,
                    total_cost: None,
                    avg_latency_min_per_mb: None,
                    violation_rate: None,
                    final_backlog_mb: None,
                    mean_q: None,
                    max_q: None,
                    status: format!("failed: {e}"),
                }
            }
        }
    }
}

fn seeds_or_default(seeds: &[u64], sc: &Scenario) -> Vec<u64> {
    if seeds.is_empty() {
        vec![sc.sim.seed]
    } else {
        seeds.to_vec()
    }
}

fn compare(common: &Common, policies: &[String], seeds: &[u64]) -> Result<Vec<u8>, CliError> {
    let sc = load(common)?;
    let seeds = seeds_or_default(seeds, &sc);
    let policies: Vec<PolicyKind> = policies
        .iter()
        .map(|p| PolicyKind::resolve(p, &sc.sim.policy_params, &sc))
        .collect::<Result<_, _>>()?;

    // Paired sample paths: every policy of a seed shares that seed's contacts.
    let runs: Vec<(Scenario, Result<ContactTable, String>)> = seeds
        .par_iter()
        .map(|&seed| {
            let sc = with_seed(&sc, seed);
            let contacts = contacts_for(common, &sc).map_err(|e| e.to_string());
            (sc, contacts)
        })
        .collect();
    let jobs: Vec<(usize, &PolicyKind)> = (0..runs.len())
        .flat_map(|i| policies.iter().map(move |p| (i, p)))
        .collect();
    let rows: Vec<CompareRow> = jobs
        .par_iter()
        .map(|&(i, policy)| {
            let (sc, contacts) = &runs[i];
            let result = match contacts {
                Ok(c) => run(sc, c, policy).map(|o| o.summary()).map_err(CliError::from),
                Err(e) => Err(CliError::Runtime(e.clone())),
            };
            CompareRow::from_result(policy.name(), sc.sim.seed, result)
        })
        .collect();
    Ok(to_csv(&rows))
}

#[derive(Serialize)]
struct SweepRow {
    v: f64,
    seeds: usize,
    total_cost: f64,
    avg_latency_min_per_mb: Option<f64>,
    violation_rate: f64,
    mean_q: f64,
}

fn sweep_v(common: &Common, v_list: &[f64], seeds: &[u64]) -> Result<Vec<u8>, CliError> {
    let sc = load(common)?;
    if let Some(v) = v_list.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
        return Err(CliError::Validation(format!(
            "invalid `--v-list`: {v} must be finite and >= 0"
        )));
    }
    let seeds = seeds_or_default(seeds, &sc);
    let bases: Vec<(Scenario, ContactTable)> = seeds
        .par_iter()
        .map(|&seed| {
            let sc = with_seed(&sc, seed);
            contacts_for(common, &sc).map(|c| (sc, c))
        })
        .collect::<Result<_, _>>()?;

    let rows: Vec<SweepRow> = v_list
        .par_iter()
        .map(|&v| {
            let summaries: Vec<RunSummary> = bases
                .par_iter()
                .map(|(sc, contacts)| {
                    let mut sc = sc.clone();
                    sc.sim.v = v;
                    run(&sc, contacts, &PolicyKind::SkyGs).map(|o| o.summary())
                })
                .collect::<Result<_, _>>()?;
            let n = summaries.len() as f64;
            let mean = |f: fn(&RunSummary) -> f64| summaries.iter().map(f).sum::<f64>() / n;
            let latencies: Vec<f64> = summaries.iter().filter_map(|s| s.avg_latency_min_per_mb).collect();
            Ok(SweepRow {
                v,
                seeds: summaries.len(),
                total_cost: mean(|s| s.total_cost),
                avg_latency_min_per_mb: (!latencies.is_empty())
                    .then(|| latencies.iter().sum::<f64>() / latencies.len() as f64),
                violation_rate: mean(|s| s.violation_rate),
                mean_q: mean(|s| s.mean_q),
            })
        })
        .collect::<Result<_, SimError>>()?;
    Ok(to_csv(&rows))
}

fn to_csv<T: Serialize>(rows: &[T]) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row).expect("writing to memory");
    }
    w.into_inner().expect("writing to memory")
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let file = File::create(path).map_err(|e| io_err(path, e))?;
    let mut w = BufWriter::new(file);
    w.write_all(bytes).and_then(|_| w.flush()).map_err(|e| io_err(path, e))
}

fn write_output(out: Option<&Path>, dir_name: Option<&str>, bytes: &[u8]) -> Result<(), CliError> {
    match out {
        None => io::stdout()
            .write_all(bytes)
            .map_err(|e| CliError::Runtime(e.to_string())),
        Some(path) => {
            let path = match dir_name {
                Some(name) if path.is_dir() => path.join(name),
                _ => path.to_path_buf(),
            };
            if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                fs::create_dir_all(parent).map_err(|e| io_err(parent, e))?;
            }
            write_file(&path, bytes)
        }
    }
}

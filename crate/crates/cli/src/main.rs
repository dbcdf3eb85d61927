//! `echelon-rq`: calibrate, simulate and benchmark two-echelon (R,Q) networks.

mod report;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use echelon_core::harness::{
    generate_grid, outcome_rows, resolve_central, run_grid_experiment, run_trace_experiment, write_results,
    CentralRule, CentralScenario, ExperimentConfig, ExperimentPlan, RecalibrationOptions, ResultRow,
    DEFAULT_HISTORY_WINDOW,
};
use echelon_core::model::{CentralModel, NetworkConfig, UnitMode};
use echelon_core::planning::local_reorder_points;
use echelon_core::sim::{run_experiment, DemandSource, DemandTrace, SimConfig};
use echelon_core::wait_time::Method;
use echelon_core::Error;

#[derive(Parser, Debug)]
#[command(name = "echelon-rq", version, about = "Two-echelon (R,Q) inventory calibration and simulation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compute central and local reorder points.
    Calibrate(CalibrateArgs),
    /// Calibrate, then simulate the calibrated network.
    Simulate(SimulateArgs),
    /// Run the full scenario grid for every method.
    Experiment(ExperimentArgs),
    /// Summarise a results file.
    Report(ReportArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Axs,
    Kksl,
    Bf,
    Nb,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Axs => Method::Axs,
            MethodArg::Kksl => Method::Kksl,
            MethodArg::Bf => Method::Bf,
            MethodArg::Nb => Method::Nb,
        }
    }
}

#[derive(Args, Debug)]
struct NetworkArgs {
    /// Network/experiment config (TOML). Defaults to the built-in base network.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Central scenario name from the config (or low, medium_low, medium_high, high).
    #[arg(long)]
    scenario: Option<String>,
    /// Wait-time method; repeat or comma-separate for several. Default: all.
    #[arg(long, value_enum, value_delimiter = ',')]
    method: Vec<MethodArg>,
    /// Analytic central fill-rate target.
    #[arg(long, conflicts_with = "central_r")]
    central_target: Option<f64>,
    /// Fixed central reorder point.
    #[arg(long = "central-R", id = "central_r", allow_negative_numbers = true)]
    central_r: Option<i64>,
    /// Output CSV (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SimArgs {
    #[arg(long, help = "Replications [default: 100]")]
    replications: Option<u32>,
    #[arg(long, help = "Simulated days [default: 2000]")]
    horizon: Option<u32>,
    #[arg(long, help = "Warm-up days [default: 500]")]
    warmup: Option<u32>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args, Debug)]
struct CalibrateArgs {
    #[command(flatten)]
    net: NetworkArgs,
    /// Replications per evaluation for simulation-based central targets.
    #[arg(long)]
    search_replications: Option<u32>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[command(flatten)]
    net: NetworkArgs,
    #[command(flatten)]
    sim: SimArgs,
    /// Replay customer demand from a `day,warehouse_id,quantity` CSV.
    #[arg(long)]
    demand_trace: Option<PathBuf>,
    /// Recompute reorder points every N days from the trace seen so far.
    #[arg(long, requires = "demand_trace")]
    recalibrate_every: Option<u32>,
}

#[derive(Args, Debug)]
struct ExperimentArgs {
    #[command(flatten)]
    net: NetworkArgs,
    #[command(flatten)]
    sim: SimArgs,
}

#[derive(Args, Debug)]
struct ReportArgs {
    /// Results CSV to summarise.
    #[arg(long = "results", alias = "in")]
    results: PathBuf,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Failure of a command, mapped to the process exit code.
#[derive(Debug)]
enum Failure {
    /// Bad input: exit code 2.
    Config(Error),
    /// The run went wrong: exit code 1.
    Run(Error),
    /// Output written, but some units failed: exit code 1.
    Partial(usize),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(_) | Error::Schema(_) | Error::UnknownMethod(_) | Error::Io(_) | Error::TraceExhausted { .. } => {
                Failure::Config(e)
            }
            _ => Failure::Run(e),
        }
    }
}

type CmdResult = std::result::Result<(), Failure>;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Calibrate(a) => calibrate(a),
        Command::Simulate(a) => simulate(a),
        Command::Experiment(a) => experiment(a),
        Command::Report(a) => report::run(&a.results, a.out.as_deref()).map_err(Failure::from),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(Failure::Run(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(Failure::Partial(n)) => {
            eprintln!("{n} unit(s) failed; see log");
            ExitCode::from(1)
        }
    }
}

fn load_config(path: Option<&Path>) -> Result<ExperimentConfig, Error> {
    match path {
        Some(p) => ExperimentConfig::from_path(p),
        None => Ok(ExperimentConfig::reference()),
    }
}

fn methods(args: &NetworkArgs) -> Vec<Method> {
    if args.method.is_empty() {
        Method::ALL.to_vec()
    } else {
        let mut m: Vec<Method> = args.method.iter().map(|&m| m.into()).collect();
        m.dedup();
        m
    }
}

fn check_target(t: f64) -> Result<f64, Error> {
    if t > 0.0 && t < 1.0 {
        Ok(t)
    } else {
        Err(Error::Config(format!("--central-target {t} must lie in (0,1)")))
    }
}

/// Scenario selected on the command line, if any.
fn explicit_scenario(cfg: &ExperimentConfig, args: &NetworkArgs) -> Result<Option<CentralScenario>, Error> {
    if let Some(r) = args.central_r {
        return Ok(Some(CentralScenario::fixed(args.scenario.as_deref().unwrap_or("custom"), r)));
    }
    if let Some(t) = args.central_target {
        return Ok(Some(CentralScenario::analytic(args.scenario.as_deref().unwrap_or("custom"), check_target(t)?)));
    }
    match &args.scenario {
        Some(name) => cfg
            .scenarios_or_default()
            .into_iter()
            .find(|s| &s.name == name)
            .map(Some)
            .ok_or_else(|| Error::Config(format!("unknown scenario `{name}`"))),
        None => Ok(None),
    }
}

/// The single scenario used by `calibrate` and `simulate`.
fn single_scenario(cfg: &ExperimentConfig, args: &NetworkArgs) -> Result<CentralScenario, Error> {
    if let Some(s) = explicit_scenario(cfg, args)? {
        return Ok(s);
    }
    if let Some(r) = cfg.central.central_r_override {
        return Ok(CentralScenario::fixed("override", r));
    }
    Err(Error::Config("choose a central level with --scenario, --central-target or --central-R".into()))
}

fn sim_config(cfg: &ExperimentConfig, args: &SimArgs) -> Result<SimConfig, Error> {
    let mut sim = cfg.simulation.sim_config();
    sim.replications = args.replications.unwrap_or(sim.replications);
    sim.horizon = args.horizon.unwrap_or(sim.horizon);
    sim.warmup = args.warmup.unwrap_or(sim.warmup);
    sim.seed = args.seed.unwrap_or(sim.seed);
    sim.validate()?;
    Ok(sim)
}

fn search_config(cfg: &ExperimentConfig, sim: &SimConfig, replications: Option<u32>) -> SimConfig {
    SimConfig { replications: replications.unwrap_or(cfg.simulation.search_replications).max(1), ..*sim }
}

fn emit(rows: &[ResultRow], out: Option<&Path>) -> Result<(), Error> {
    match out {
        Some(p) => echelon_core::harness::write_results_file(rows, p),
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            write_results(rows, &mut lock)?;
            lock.flush()?;
            Ok(())
        }
    }
}

fn central_fill(net: &NetworkConfig, r0: i64) -> Result<f64, Error> {
    Ok(CentralModel::new(net, UnitMode::Subbatch)?.fill_rate(r0))
}

fn calibrate(a: CalibrateArgs) -> CmdResult {
    let cfg = load_config(a.net.config.as_deref())?;
    let net = cfg.network()?;
    let scenario = single_scenario(&cfg, &a.net)?;
    let rule = scenario.rule()?;
    let mut base = cfg.simulation.sim_config();
    base.seed = a.seed.unwrap_or(base.seed);
    let r0 = resolve_central(&net, rule, &search_config(&cfg, &base, a.search_replications))?;
    let fill = central_fill(&net, r0)?;
    let mut rows = Vec::new();
    for method in methods(&a.net) {
        let cal = local_reorder_points(&net, r0, method)?;
        rows.extend(outcome_rows(&scenario.name, "base", &net, Some(fill), &cal, None));
    }
    emit(&rows, a.net.out.as_deref())?;
    Ok(())
}

fn simulate(a: SimulateArgs) -> CmdResult {
    let cfg = load_config(a.net.config.as_deref())?;
    let net = cfg.network()?;
    let scenario = single_scenario(&cfg, &a.net)?;
    let rule = scenario.rule()?;
    let sim = sim_config(&cfg, &a.sim)?;
    let search = search_config(&cfg, &sim, None);
    let mut rows = Vec::new();
    if let Some(path) = &a.demand_trace {
        if a.recalibrate_every == Some(0) {
            return Err(Failure::Config(Error::Config("--recalibrate-every must be at least 1".into())));
        }
        let trace = DemandTrace::from_path(path)?;
        for method in methods(&a.net) {
            let opts = RecalibrationOptions {
                method,
                central: rule,
                every: a.recalibrate_every,
                history_window: DEFAULT_HISTORY_WINDOW,
            };
            let (outcome, plan) = run_trace_experiment(&net, &trace, &opts, &sim)?;
            let first = &plan[0];
            let fill = central_fill(&first.net, first.calibration.r0)?;
            let simulated = first.calibration.apply(&first.net);
            rows.extend(outcome_rows(&scenario.name, "trace", &simulated, Some(fill), &first.calibration, Some(&outcome)));
            for p in plan.iter().skip(1) {
                let case = format!("trace_day_{}", p.day);
                let fill = central_fill(&p.net, p.calibration.r0)?;
                rows.extend(outcome_rows(&scenario.name, &case, &p.net, Some(fill), &p.calibration, None));
            }
        }
    } else {
        let r0 = resolve_central(&net, rule, &search)?;
        let fill = central_fill(&net, r0)?;
        let sources = DemandSource::random_sources(&net)?;
        for method in methods(&a.net) {
            let cal = local_reorder_points(&net, r0, method)?;
            let calibrated = cal.apply(&net);
            let outcome = run_experiment(&calibrated, &sources, &sim)?;
            rows.extend(outcome_rows(&scenario.name, "base", &calibrated, Some(fill), &cal, Some(&outcome)));
        }
    }
    emit(&rows, a.net.out.as_deref())?;
    Ok(())
}

fn experiment(a: ExperimentArgs) -> CmdResult {
    let cfg = load_config(a.net.config.as_deref())?;
    let net = cfg.network()?;
    let sim = sim_config(&cfg, &a.sim)?;
    let scenarios = match explicit_scenario(&cfg, &a.net)? {
        Some(s) => vec![s],
        None => cfg.scenarios_or_default(),
    };
    for s in &scenarios {
        if let CentralRule::AnalyticTarget(t) | CentralRule::SimulatedTarget(t) = s.rule()? {
            if !(t > 0.0 && t <= 1.0) {
                return Err(Failure::Config(Error::Config(format!("scenario `{}` target {t} outside (0,1]", s.name))));
            }
        }
    }
    let plan = ExperimentPlan {
        grid: generate_grid(&net, &cfg.variations_or_default())?,
        scenarios,
        methods: methods(&a.net),
        sim,
        search_replications: cfg.simulation.search_replications,
    };
    let results = run_grid_experiment(&plan)?;
    emit(&results.rows, a.net.out.as_deref())?;
    for f in &results.failures {
        let method = f.method.map(|m| m.to_string()).unwrap_or_else(|| "-".into());
        eprintln!("failed: scenario={} case={} method={} error={}", f.scenario, f.case, method, f.error);
    }
    if results.failures.is_empty() {
        Ok(())
    } else {
        Err(Failure::Partial(results.failures.len()))
    }
}

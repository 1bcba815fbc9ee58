//! `tollnet` command line: simulate, solve equilibria, sweep parameters.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use tollnet::equilibrium::{perturbed_equilibrium, social_optimum, wardrop};
use tollnet::plot::{emit_sweep_plots, emit_trajectory_plots};
use tollnet::scenario::{load_scenario, Model, TollKind};
use tollnet::simulator::{classify_convergence, l1, simulate, DEFAULT_AMPLITUDE_THRESHOLD, DEFAULT_TAIL_FRACTION};
use tollnet::sweep::{sweep, write_sweep_csv, Axis, Mode, SweepRow, DELAY_SWEEP_HORIZON};
use tollnet::{Error, PathPreference, Scenario, SimConfig, SimState, TollPolicy};

#[derive(Parser)]
#[command(name = "tollnet", version, about = "Dynamical flow networks with feedback congestion pricing")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate the coupled density / route-choice dynamics.
    Simulate(SimulateArgs),
    /// Solve for the social optimum, a Wardrop or a perturbed equilibrium.
    Equilibrium(EquilibriumArgs),
    /// Run a grid of simulations or perturbed equilibria.
    Sweep(SweepArgs),
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum TollArg {
    None,
    Marginal,
    Constant,
    File,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Kind {
    Social,
    Wardrop,
    Perturbed,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum SweepMode {
    Simulate,
    Perturbed,
}

#[derive(Args)]
struct Common {
    /// Built-in scenario name (fig1, fig4) or path to a JSON scenario.
    #[arg(long, default_value = "fig4")]
    scenario: String,
    /// Override the scenario throughput.
    #[arg(long)]
    lambda: Option<f64>,
    /// CSV with `entity,id,value` rows; `toll` rows give per-link constant tolls.
    #[arg(long)]
    toll_file: Option<PathBuf>,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long)]
    delay: Option<f64>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    horizon: Option<f64>,
    #[arg(long, value_enum)]
    tolls: Option<TollArg>,
    /// Record every n-th integration step.
    #[arg(long, default_value_t = 10)]
    record_every: usize,
    /// Directory for plot CSV and SVG files.
    #[arg(long)]
    plot_dir: Option<PathBuf>,
}

#[derive(Args)]
struct EquilibriumArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, value_enum, default_value = "social")]
    kind: Kind,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long, value_enum)]
    tolls: Option<TollArg>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    common: Common,
    /// Comma-separated values of β.
    #[arg(long, value_delimiter = ',', conflicts_with = "delay_grid", required_unless_present = "delay_grid")]
    beta_grid: Option<Vec<f64>>,
    /// Comma-separated values of the information delay.
    #[arg(long, value_delimiter = ',')]
    delay_grid: Option<Vec<f64>>,
    #[arg(long, value_enum, default_value = "simulate")]
    mode: SweepMode,
    /// Toll policies to sweep, comma-separated.
    #[arg(long, value_enum, value_delimiter = ',', default_value = "marginal,constant")]
    tolls: Vec<TollArg>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long)]
    delay: Option<f64>,
    #[arg(long)]
    dt: Option<f64>,
    /// Defaults to the scenario horizon for β grids and to a longer horizon
    /// for delay grids.
    #[arg(long)]
    horizon: Option<f64>,
    #[arg(long)]
    plot_dir: Option<PathBuf>,
}

struct Loaded {
    scenario: Scenario,
    model: Model,
    init: SimState,
}

fn load(common: &Common) -> Result<Loaded, Error> {
    let mut scenario = load_scenario(&common.scenario)?;
    let mut model = scenario.model()?;
    let mut init = scenario.initial_state(&model)?;
    if let Some(lambda) = common.lambda {
        if !(lambda >= 0.0 && lambda.is_finite()) {
            return Err(Error::Scenario(format!("--lambda {lambda} must be finite and nonnegative")));
        }
        let old = scenario.lambda;
        let z = if old > 0.0 {
            init.z.values().iter().map(|v| v * lambda / old).collect()
        } else {
            PathPreference::uniform(init.z.len(), lambda).into_values()
        };
        init.z = PathPreference::new(z, lambda)?;
        scenario.lambda = lambda;
        model.lambda = lambda;
    }
    Ok(Loaded { scenario, model, init })
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.display().to_string(),
        source,
    }
}

fn read_toll_file(path: &Path, model: &Model) -> Result<Vec<f64>, Error> {
    let file = File::open(path).map_err(io_err(path))?;
    let mut reader = csv::Reader::from_reader(file);
    let ids = model.network.topology().link_ids();
    let mut w = vec![None; ids.len()];
    for rec in reader.records() {
        let rec = rec.map_err(|e| Error::Scenario(format!("{}: {e}", path.display())))?;
        if rec.get(0) != Some("toll") {
            continue;
        }
        let id = rec.get(1).unwrap_or("");
        let i = ids
            .iter()
            .position(|l| *l == id)
            .ok_or_else(|| Error::Scenario(format!("{}: unknown link '{id}'", path.display())))?;
        let v: f64 = rec
            .get(2)
            .unwrap_or("")
            .trim()
            .parse()
            .map_err(|_| Error::Scenario(format!("{}: bad toll value for '{id}'", path.display())))?;
        w[i] = Some(v);
    }
    w.into_iter()
        .zip(&ids)
        .map(|(v, id)| v.ok_or_else(|| Error::Scenario(format!("{}: no toll for link '{id}'", path.display()))))
        .collect()
}

fn policy(arg: Option<TollArg>, loaded: &Loaded, toll_file: Option<&Path>) -> Result<TollPolicy, Error> {
    let d = &loaded.scenario.defaults;
    match arg {
        None => loaded.model.toll_policy(d.tolls, d.constant_tolls.as_deref()),
        Some(TollArg::None) => loaded.model.toll_policy(TollKind::None, None),
        Some(TollArg::Marginal) => loaded.model.toll_policy(TollKind::Marginal, None),
        Some(TollArg::Constant) => loaded.model.toll_policy(TollKind::Constant, d.constant_tolls.as_deref()),
        Some(TollArg::File) => {
            let path = toll_file.ok_or_else(|| Error::Scenario("--tolls file needs --toll-file".into()))?;
            let w = read_toll_file(path, &loaded.model)?;
            loaded.model.toll_policy(TollKind::Constant, Some(&w))
        }
    }
}

fn output(out: Option<&Path>) -> Result<Box<dyn Write>, Error> {
    Ok(match out {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(io_err(p))?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn finish(mut w: Box<dyn Write>, out: Option<&Path>) -> Result<(), Error> {
    let target = out.unwrap_or(Path::new("<stdout>"));
    w.flush().map_err(io_err(target))
}

fn run_simulate(args: &SimulateArgs) -> Result<(), Error> {
    let loaded = load(&args.common)?;
    let mut cfg = loaded.scenario.sim_config(&loaded.model)?;
    cfg.lambda = loaded.model.lambda;
    cfg.toll_policy = policy(args.tolls, &loaded, args.common.toll_file.as_deref())?;
    cfg.beta = args.beta.unwrap_or(cfg.beta);
    cfg.eta = args.eta.unwrap_or(cfg.eta);
    cfg.delay = args.delay.unwrap_or(cfg.delay);
    cfg.dt = args.dt.unwrap_or(cfg.dt);
    cfg.horizon = args.horizon.unwrap_or(cfg.horizon);
    cfg.record_every = args.record_every;
    let m = &loaded.model;
    let traj = simulate(&m.network, &m.cells, &cfg, &loaded.init)?;
    let y_star = m.social_optimum()?;
    let out = args.common.out.as_deref();
    let mut w = output(out)?;
    traj.write_csv(&mut w, &m.network, &m.cells, &y_star)
        .map_err(io_err(out.unwrap_or(Path::new("<stdout>"))))?;
    finish(w, out)?;
    if let Some(dir) = &args.plot_dir {
        emit_trajectory_plots(&traj, &m.network, &m.cells, &y_star, dir)?;
    }
    let report = classify_convergence(&traj, DEFAULT_TAIL_FRACTION, DEFAULT_AMPLITUDE_THRESHOLD);
    let last = traj.last().expect("trajectory has the initial record");
    eprintln!(
        "{} beta={} eta={} delay={} tolls={} t={} final_l1_to_social_optimum={:.6e} clamp_events={} amplitude={:.3e} {}",
        loaded.scenario.name,
        cfg.beta,
        cfg.eta,
        cfg.delay,
        cfg.toll_policy.name(),
        last.t,
        l1(&last.y, &y_star),
        traj.clamp_events,
        report.amplitude,
        report.class.as_str()
    );
    Ok(())
}

fn run_equilibrium(args: &EquilibriumArgs) -> Result<(), Error> {
    let loaded = load(&args.common)?;
    let m = &loaded.model;
    let pol = policy(args.tolls, &loaded, args.common.toll_file.as_deref())?;
    let beta = args.beta.unwrap_or(loaded.scenario.defaults.beta);
    let result = match args.kind {
        Kind::Social => social_optimum(&m.network, &m.cells, m.lambda)?,
        Kind::Wardrop => wardrop(&m.network, &m.cells, m.lambda, &pol)?,
        Kind::Perturbed => perturbed_equilibrium(&m.network, &m.cells, m.lambda, beta, &pol)?,
    };
    let out = args.common.out.as_deref();
    let mut w = output(out)?;
    result.write_csv(&mut w, &m.network, &m.cells, &pol)?;
    finish(w, out)?;
    let y: Vec<String> = result.y.iter().map(|v| format!("{v:.9}")).collect();
    eprintln!(
        "{} kind={} y=({}) objective={:.12e} {}={:.3e} iterations={}",
        loaded.scenario.name,
        match args.kind {
            Kind::Social => "social",
            Kind::Wardrop => "wardrop",
            Kind::Perturbed => "perturbed",
        },
        y.join(","),
        result.objective,
        result.certificate.kind(),
        result.certificate.value(),
        result.iterations
    );
    Ok(())
}

fn run_sweep(args: &SweepArgs) -> Result<(), Error> {
    let loaded = load(&args.common)?;
    let m = &loaded.model;
    let (axis, grid) = match (&args.beta_grid, &args.delay_grid) {
        (Some(g), _) => (Axis::Beta, g.clone()),
        (None, Some(g)) => (Axis::Delay, g.clone()),
        (None, None) => unreachable!("clap requires one grid"),
    };
    let mode = match args.mode {
        SweepMode::Simulate => Mode::Simulate,
        SweepMode::Perturbed => Mode::Perturbed,
    };
    let mut base: SimConfig = loaded.scenario.sim_config(m)?;
    base.lambda = m.lambda;
    base.beta = args.beta.unwrap_or(base.beta);
    base.eta = args.eta.unwrap_or(base.eta);
    base.delay = args.delay.unwrap_or(base.delay);
    base.dt = args.dt.unwrap_or(base.dt);
    base.horizon = match (args.horizon, axis) {
        (Some(h), _) => h,
        (None, Axis::Delay) => DELAY_SWEEP_HORIZON,
        (None, Axis::Beta) => base.horizon,
    };
    let y_star = m.social_optimum()?;
    let mut rows: Vec<SweepRow> = Vec::new();
    for t in &args.tolls {
        let cfg = SimConfig {
            toll_policy: policy(Some(*t), &loaded, args.common.toll_file.as_deref())?,
            ..base.clone()
        };
        rows.extend(sweep(m, &cfg, &loaded.init, &y_star, axis, &grid, mode)?);
    }
    let out = args.common.out.as_deref();
    let mut w = output(out)?;
    write_sweep_csv(&rows, &mut w).map_err(io_err(out.unwrap_or(Path::new("<stdout>"))))?;
    finish(w, out)?;
    if let Some(dir) = &args.plot_dir {
        emit_sweep_plots(&rows, dir)?;
    }
    for r in &rows {
        eprintln!(
            "{}={} tolls={} final_l1={:.6e} latency_loss={:.6e} {}",
            r.axis.as_str(),
            r.value,
            r.tolls,
            r.final_distance,
            r.latency_loss,
            r.label()
        );
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 4 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match &cli.command {
        Command::Simulate(a) => run_simulate(a),
        Command::Equilibrium(a) => run_equilibrium(a),
        Command::Sweep(a) => run_sweep(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

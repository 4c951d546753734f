use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::error::CliError;
use crate::jobs::{execute, metadata, plan, Output};
use crate::scenario::{
    load_scenario, parse_kv, parse_range, reject_leftovers, take_num, BoundsSpec, ChannelSpec, DynamicsSpec,
    Format, RegionSpec, Scenario, StateSpec, SweepSpec, WitnessSpec,
};

pub const THREADS_ENV: &str = "PRIVWIT_THREADS";

#[derive(Debug, Parser)]
#[command(name = "privwit", version, about = "Leakage bounds, attack sweeps and markovianity checks for private states")]
pub struct Cli {
    /// Worker threads; overrides PRIVWIT_THREADS.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Seed for sampled states and witnesses.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output file (stdout when omitted).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Attack a private state's shield and sweep the channel strength.
    Attack(AttackArgs),
    /// Membership grid for the δ-bound regions.
    Regions(RegionsArgs),
    /// Evaluate every leakage bound for the given entropies and dimensions.
    Bounds(BoundsArgs),
    /// Private-randomness rate regions of a bipartite state.
    Randomness(RandomnessArgs),
    /// Trace-norm witness trajectory and non-markovianity report.
    Markov(MarkovArgs),
    /// Built-in worked examples.
    Demo {
        #[command(subcommand)]
        which: Demo,
    },
    /// Run a TOML or JSON scenario file.
    Run { scenario: PathBuf },
}

#[derive(Debug, Subcommand)]
pub enum Demo {
    /// Key rate of the superdense-coding state before and after leaking A'.
    Superdense,
}

#[derive(Debug, Args)]
pub struct AttackArgs {
    #[arg(long, default_value = "gamma-swap")]
    pub state: String,
    #[arg(long, default_value_t = 2)]
    pub ds: usize,
    /// bit-flip, depolarizing, amplitude-damping or dephasing.
    #[arg(long)]
    pub channel: String,
    #[arg(long)]
    pub alpha: Option<f64>,
    /// alpha:start:stop:points
    #[arg(long)]
    pub sweep: Option<String>,
    #[arg(long)]
    pub p_points: Option<usize>,
}

#[derive(Debug, Args)]
pub struct RegionsArgs {
    /// fig2 or fig4.
    #[arg(long, default_value = "fig2")]
    pub kind: String,
    #[arg(long, default_value_t = 2)]
    pub da: usize,
    /// Information values, start:stop:points.
    #[arg(long, default_value = "0:1:51")]
    pub x: String,
    /// Entropy values, start:stop:points.
    #[arg(long, default_value = "0:2:51")]
    pub y: String,
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    #[arg(long)]
    pub s_a: Option<f64>,
    #[arg(long)]
    pub log_a: Option<f64>,
    #[arg(long)]
    pub s_b: Option<f64>,
    #[arg(long)]
    pub s_x: Option<f64>,
    #[arg(long, conflicts_with = "cmi")]
    pub delta: Option<f64>,
    /// I(a:BE|A); δ is derived from it.
    #[arg(long)]
    pub cmi: Option<f64>,
    /// Dimension of the leaked system a.
    #[arg(long)]
    pub d_a: Option<usize>,
    /// Dimension of Alice's remaining system A.
    #[arg(long)]
    pub d_alice: Option<usize>,
    #[arg(long)]
    pub d_b: Option<usize>,
    #[arg(long)]
    pub d_x: Option<usize>,
    #[arg(long)]
    pub s_sigma_c: Option<f64>,
    #[arg(long)]
    pub s_sigma_d: Option<f64>,
    #[arg(long)]
    pub cmi_a_c_given_b: Option<f64>,
    #[arg(long)]
    pub er_inf: Option<f64>,
    #[arg(long)]
    pub log_x: Option<f64>,
}

#[derive(Debug, Args)]
pub struct RandomnessArgs {
    /// bell, isotropic:p=P, gamma-swap:ds=D or random:da=2,db=2,rank=R.
    #[arg(long, default_value = "bell")]
    pub state: String,
}

#[derive(Debug, Args)]
pub struct MarkovArgs {
    /// semigroup:gamma=G or oscillating:gamma=G,omega=W.
    #[arg(long)]
    pub dynamics: String,
    /// start:stop:points
    #[arg(long)]
    pub grid: String,
    /// coherence or random:norm=N.
    #[arg(long, default_value = "coherence")]
    pub witness: String,
    #[arg(long)]
    pub deriv_tol: Option<f64>,
}

fn state_from_flag(s: &str) -> Result<StateSpec, CliError> {
    let (family, mut m) = parse_kv(s, "state")?;
    let spec = StateSpec {
        family,
        ds: take_num(&mut m, "ds", "state")?,
        p: take_num(&mut m, "p", "state")?,
        da: take_num(&mut m, "da", "state")?,
        db: take_num(&mut m, "db", "state")?,
        rank: take_num(&mut m, "rank", "state")?,
    };
    reject_leftovers(&m, "state")?;
    Ok(spec)
}

fn sweep(range: &str, field: &str, default_var: &str) -> Result<SweepSpec, CliError> {
    let (var, r) = parse_range(range, field)?;
    Ok(SweepSpec {
        variable: var.unwrap_or_else(|| default_var.to_string()),
        start: r.start,
        stop: r.stop,
        points: r.points,
    })
}

/// Translate flags into a scenario.
pub fn scenario_from_cli(cli: &Cli) -> Result<Scenario, CliError> {
    let mut sc = match &cli.command {
        Command::Run { scenario } => load_scenario(scenario)?,
        Command::Attack(a) => {
            let mut state = state_from_flag(&a.state)?;
            state.ds.get_or_insert(a.ds);
            Scenario {
                command: "attack".into(),
                state: Some(state),
                channel: Some(ChannelSpec {
                    kind: a.channel.clone(),
                    alpha: a.alpha,
                    p_points: a.p_points,
                }),
                sweep: a.sweep.as_deref().map(|s| sweep(s, "sweep", "alpha")).transpose()?,
                ..Default::default()
            }
        }
        Command::Regions(r) => Scenario {
            command: "regions".into(),
            region: Some(RegionSpec {
                kind: r.kind.clone(),
                d_a: r.da,
                x: parse_range(&r.x, "region.x")?.1,
                y: parse_range(&r.y, "region.y")?.1,
            }),
            ..Default::default()
        },
        Command::Bounds(b) => Scenario {
            command: "bounds".into(),
            bounds: Some(BoundsSpec {
                s_a: b.s_a,
                log_a: b.log_a,
                s_b: b.s_b,
                s_x: b.s_x,
                delta: b.delta,
                cmi: b.cmi,
                d_a: b.d_a,
                d_alice: b.d_alice,
                d_b: b.d_b,
                d_x: b.d_x,
                s_sigma_c: b.s_sigma_c,
                s_sigma_d: b.s_sigma_d,
                cmi_a_c_given_b: b.cmi_a_c_given_b,
                er_inf: b.er_inf,
                log_x: b.log_x,
            }),
            ..Default::default()
        },
        Command::Randomness(r) => Scenario {
            command: "randomness".into(),
            state: Some(state_from_flag(&r.state)?),
            ..Default::default()
        },
        Command::Markov(m) => {
            let (kind, mut kv) = parse_kv(&m.dynamics, "dynamics")?;
            let gamma = take_num(&mut kv, "gamma", "dynamics")?
                .ok_or_else(|| CliError::field("dynamics.gamma", "required"))?;
            let omega = take_num(&mut kv, "omega", "dynamics")?;
            reject_leftovers(&kv, "dynamics")?;
            let (wkind, mut wkv) = parse_kv(&m.witness, "witness")?;
            let norm = take_num(&mut wkv, "norm", "witness")?;
            reject_leftovers(&wkv, "witness")?;
            Scenario {
                command: "markov".into(),
                dynamics: Some(DynamicsSpec { kind, gamma, omega }),
                sweep: Some(sweep(&m.grid, "grid", "t")?),
                witness: Some(WitnessSpec {
                    kind: wkind,
                    norm,
                    deriv_tol: m.deriv_tol,
                }),
                ..Default::default()
            }
        }
        Command::Demo { which: Demo::Superdense } => Scenario {
            command: "superdense".into(),
            ..Default::default()
        },
    };
    if cli.seed.is_some() {
        sc.seed = cli.seed;
    }
    if cli.out.is_some() {
        sc.output.path = cli.out.clone();
    }
    if cli.format.is_some() {
        sc.output.format = cli.format;
    }
    Ok(sc.with_defaults())
}

/// `--threads`, then `PRIVWIT_THREADS`, then the available parallelism.
pub fn resolve_threads(flag: Option<usize>) -> Result<usize, CliError> {
    if let Some(n) = flag {
        return if n == 0 {
            Err(CliError::field("--threads", "must be at least 1"))
        } else {
            Ok(n)
        };
    }
    if let Ok(v) = std::env::var(THREADS_ENV) {
        return match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(n),
            _ => Err(CliError::field(THREADS_ENV, format!("`{v}` is not a positive integer"))),
        };
    }
    Ok(std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1))
}

/// Render the result of a scenario in the requested format.
pub fn render(sc: &Scenario) -> Result<String, CliError> {
    let job = plan(sc)?;
    let out = execute(&job, metadata(sc))?;
    let format = sc.output.format.unwrap_or(match out {
        Output::Table(_) => Format::Csv,
        Output::Json(_) => Format::Json,
    });
    Ok(match (out, format) {
        (Output::Table(t), Format::Csv) => t.to_csv(),
        (Output::Table(t), Format::Json) => format!("{}\n", t.to_json()),
        (Output::Json(v), _) => format!("{v}\n"),
    })
}

fn run(cli: Cli) -> Result<(), CliError> {
    let threads = resolve_threads(cli.threads)?;
    let sc = scenario_from_cli(&cli)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Validation(format!("cannot start {threads} worker threads: {e}")))?;
    let text = pool.install(|| render(&sc))?;
    match &sc.output.path {
        Some(p) => std::fs::write(p, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

/// Entry point shared by the binary and tests; returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

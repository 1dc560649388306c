use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

use uniband_cli::commands::{
    cmd_bound, cmd_index, cmd_simulate, cmd_verify, BoundKind, VerifyTask,
};
use uniband_cli::CliError;

#[derive(Parser)]
#[command(
    name = "uniband",
    version,
    about = "Simulation, regret bounds, and inequality verifiers for uniform-reward bandits"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a scenario file and write regret curves as CSV (and SVG).
    Simulate {
        /// Scenario JSON file.
        scenario: PathBuf,
        /// CSV output path.
        #[arg(long)]
        out: PathBuf,
        /// Optional SVG chart path.
        #[arg(long)]
        svg: Option<PathBuf>,
        /// Worker threads; defaults to UNIBAND_WORKERS, then all cores.
        #[arg(long, env = "UNIBAND_WORKERS")]
        workers: Option<usize>,
    },
    /// Print a regret bound and its per-arm decomposition as CSV.
    Bound {
        /// Scenario JSON file (only its arms are used).
        scenario: PathBuf,
        #[arg(long, value_enum)]
        which: WhichBound,
        /// Horizon to evaluate at (required for thm1 and thm3).
        #[arg(long)]
        n: Option<u64>,
        /// Slack eps for thm1: one value, or one per arm, comma separated.
        #[arg(long, value_delimiter = ',')]
        eps: Option<Vec<f64>>,
        /// Slack delta for thm1: one value, or one per arm, comma separated.
        #[arg(long, value_delimiter = ',')]
        delta: Option<Vec<f64>>,
    },
    /// Check an analytic inequality on a grid; exits 3 on any violation.
    Verify(VerifyArgs),
    /// Print one index value from explicit statistics.
    Index {
        /// ucb-uniform, bk-ucb (alias bk), chk-normal (alias chk), or kr.
        #[arg(long)]
        policy: String,
        /// Global time n >= 1.
        #[arg(long)]
        n: f64,
        /// Sample count for the arm.
        #[arg(long)]
        t: u64,
        /// Smallest observed reward (support rules).
        #[arg(long, allow_negative_numbers = true)]
        vmin: Option<f64>,
        /// Largest observed reward (support rules).
        #[arg(long, allow_negative_numbers = true)]
        vmax: Option<f64>,
        /// Sample mean (moment rules).
        #[arg(long, allow_negative_numbers = true)]
        mean: Option<f64>,
        /// Population standard deviation (moment rules).
        #[arg(long, allow_negative_numbers = true)]
        sd: Option<f64>,
    },
}

#[derive(Copy, Clone, ValueEnum)]
enum WhichBound {
    /// Asymptotic lower-bound constant.
    Mbk,
    /// Finite-time bound under explicit slack.
    Thm1,
    /// Slack-free finite-time bound.
    Thm3,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    select: VerifySelect,
    /// prop1 decay rates, comma separated.
    #[arg(long, value_delimiter = ',')]
    alpha: Option<Vec<f64>>,
    /// prop1 horizons, comma separated.
    #[arg(long, value_delimiter = ',')]
    n: Option<Vec<u64>>,
    /// prop2 Q values, comma separated.
    #[arg(long, value_delimiter = ',')]
    q: Option<Vec<f64>>,
    /// prop2 eps values, comma separated.
    #[arg(long, value_delimiter = ',')]
    eps: Option<Vec<f64>>,
    /// lemma2 draw counts, comma separated.
    #[arg(long, value_delimiter = ',')]
    k: Option<Vec<u32>>,
    /// klinf random case count.
    #[arg(long)]
    cases: Option<u64>,
    /// klinf RNG seed.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct VerifySelect {
    /// Tail-sum cap over an (alpha, n) grid.
    #[arg(long)]
    prop1: bool,
    /// Log-slack expansion over a (Q, eps) grid.
    #[arg(long)]
    prop2: bool,
    /// Joint (min, max) density normalization.
    #[arg(long)]
    lemma2: bool,
    /// Grid-search infimum vs closed form on random cases.
    #[arg(long)]
    klinf: bool,
}

fn to_task(args: VerifyArgs) -> Result<VerifyTask, CliError> {
    let stray = |flag: &str, present: bool| {
        if present {
            Err(CliError::Validation(format!(
                "--{flag} does not apply to this inequality"
            )))
        } else {
            Ok(())
        }
    };
    if args.select.prop1 {
        stray("q", args.q.is_some())?;
        stray("eps", args.eps.is_some())?;
        stray("k", args.k.is_some())?;
        stray("cases", args.cases.is_some())?;
        stray("seed", args.seed.is_some())?;
        let default = VerifyTask::default_prop1();
        let (d_alpha, d_n) = match default {
            VerifyTask::Prop1 { alpha, n } => (alpha, n),
            _ => unreachable!(),
        };
        Ok(VerifyTask::Prop1 {
            alpha: args.alpha.unwrap_or(d_alpha),
            n: args.n.unwrap_or(d_n),
        })
    } else if args.select.prop2 {
        stray("alpha", args.alpha.is_some())?;
        stray("n", args.n.is_some())?;
        stray("k", args.k.is_some())?;
        stray("cases", args.cases.is_some())?;
        stray("seed", args.seed.is_some())?;
        let (d_q, d_eps) = match VerifyTask::default_prop2() {
            VerifyTask::Prop2 { q, eps } => (q, eps),
            _ => unreachable!(),
        };
        Ok(VerifyTask::Prop2 {
            q: args.q.unwrap_or(d_q),
            eps: args.eps.unwrap_or(d_eps),
        })
    } else if args.select.lemma2 {
        stray("alpha", args.alpha.is_some())?;
        stray("n", args.n.is_some())?;
        stray("q", args.q.is_some())?;
        stray("eps", args.eps.is_some())?;
        stray("cases", args.cases.is_some())?;
        stray("seed", args.seed.is_some())?;
        Ok(VerifyTask::Lemma2 {
            k: args.k.unwrap_or_else(|| vec![2, 5, 10]),
        })
    } else {
        stray("alpha", args.alpha.is_some())?;
        stray("n", args.n.is_some())?;
        stray("q", args.q.is_some())?;
        stray("eps", args.eps.is_some())?;
        stray("k", args.k.is_some())?;
        Ok(VerifyTask::Klinf {
            cases: args.cases.unwrap_or(20),
            seed: args.seed.unwrap_or(0x0075_EED5),
        })
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.cmd {
        Cmd::Simulate {
            scenario,
            out,
            svg,
            workers,
        } => cmd_simulate(&scenario, &out, svg.as_deref(), workers),
        Cmd::Bound {
            scenario,
            which,
            n,
            eps,
            delta,
        } => {
            let which = match which {
                WhichBound::Mbk => BoundKind::Mbk,
                WhichBound::Thm1 => BoundKind::Thm1,
                WhichBound::Thm3 => BoundKind::Thm3,
            };
            cmd_bound(&scenario, which, n, eps, delta)
        }
        Cmd::Verify(args) => cmd_verify(&to_task(args)?),
        Cmd::Index {
            policy,
            n,
            t,
            vmin,
            vmax,
            mean,
            sd,
        } => cmd_index(&policy, n, t, vmin, vmax, mean, sd),
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    if let Err(e) = run(cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use ssgmanip::experiment::{run_experiment, write_csv, ExperimentConfig};
use ssgmanip::gen::{generate_instance, GenConfig};
use ssgmanip::io::{
    load_instance, load_policy, policy_to_json, qr_policy_to_json, Instance, LoadedPolicy,
};
use ssgmanip::policy::{
    eop_with, qr_policy_from, sse_policy_from, OptimalPolicySolver, SseTable, DEFAULT_DELTA,
};
use ssgmanip::solvers::DEFAULT_TOL;
use ssgmanip::{maximin, optimal_report, shift_nonnegative, solve_sse, Result};

/// Stackelberg security games under attacker manipulation.
#[derive(Parser)]
#[command(name = "ssgmanip", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random instance.
    Gen(GenArgs),
    /// Strong Stackelberg equilibrium against one attacker type.
    Sse {
        #[arg(long)]
        game: PathBuf,
        /// Type index (0-based).
        #[arg(long = "type")]
        type_index: usize,
    },
    /// Maximin coverage of the defender.
    Maximin {
        #[arg(long)]
        game: PathBuf,
    },
    /// Optimal fake report of one type against an SSE-learning defender.
    Attack {
        #[arg(long)]
        game: PathBuf,
        #[arg(long = "type")]
        type_index: usize,
    },
    /// Compute a defender policy over the instance's type set.
    Policy {
        #[command(subcommand)]
        kind: PolicyCmd,
    },
    /// Efficiency of a policy file or of a built-in policy (sse, optimal, qr).
    Eop {
        #[arg(long)]
        game: PathBuf,
        #[arg(long)]
        policy: String,
        #[arg(long, default_value_t = 100.0)]
        phi: f64,
        #[arg(long, default_value_t = DEFAULT_DELTA)]
        delta: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Run a batch experiment and write CSV.
    Experiment {
        #[arg(long)]
        config: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Leave the wall_time_ms column blank.
        #[arg(long)]
        no_timing: bool,
    },
}

#[derive(Subcommand)]
enum PolicyCmd {
    /// Efficiency-maximizing policy, or the policy reaching a given efficiency
    Optimal {
        #[arg(long)]
        game: PathBuf,
        #[arg(
            long,
            conflicts_with = "maximize",
            required_unless_present = "maximize"
        )]
        xi: Option<f64>,
        #[arg(long)]
        maximize: bool,
        #[arg(long, default_value_t = DEFAULT_DELTA)]
        delta: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Quantal-response policy with temperature phi
    Qr {
        #[arg(long)]
        game: PathBuf,
        #[arg(long)]
        phi: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Commit to the SSE of each reported type
    Sse {
        #[arg(long)]
        game: PathBuf,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args)]
struct Common {
    /// Shift defender payoffs to be non-negative first.
    #[arg(long)]
    shift: bool,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    m: usize,
    #[arg(long)]
    lambda: usize,
    #[arg(long)]
    rho: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Do not append the zero-sum type.
    #[arg(long)]
    no_zero_sum: bool,
    #[arg(long, default_value_t = 0.0)]
    payoff_low: f64,
    #[arg(long, default_value_t = 1.0)]
    payoff_high: f64,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

fn emit(text: &str, output: Option<&PathBuf>) -> Result<()> {
    match output {
        Some(path) => fs::write(path, format!("{text}\n"))?,
        None => writeln!(io::stdout().lock(), "{text}")?,
    }
    Ok(())
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("json values serialize")
}

fn load(path: &PathBuf, shift: bool) -> Result<Instance> {
    let mut inst = load_instance(path)?;
    if shift {
        inst.game = shift_nonnegative(&inst.game).0;
    }
    Ok(inst)
}

fn run(cli: Cli) -> Result<()> {
    match cli.cmd {
        Command::Gen(a) => {
            let cfg = GenConfig {
                n: a.n,
                m: a.m,
                lambda: a.lambda,
                rho: a.rho,
                seed: a.seed,
                include_zero_sum: !a.no_zero_sum,
                payoff_low: a.payoff_low,
                payoff_high: a.payoff_high,
            };
            let (game, types) = generate_instance(&cfg)?;
            let inst = Instance {
                game,
                types,
                meta: Some(cfg),
            };
            emit(&inst.to_json(), a.output.as_ref())
        }
        Command::Sse { game, type_index } => {
            let inst = load(&game, false)?;
            let theta = inst.types.get(type_index)?;
            let r = solve_sse(&inst.game, theta, DEFAULT_TOL);
            emit(
                &pretty(&json!({
                    "coverage": r.coverage,
                    "target": r.target + 1,
                    "def_value": r.def_value,
                    "atk_value": r.atk_value,
                })),
                None,
            )
        }
        Command::Maximin { game } => {
            let inst = load(&game, false)?;
            let r = maximin(&inst.game, DEFAULT_TOL);
            emit(&pretty(&serde_json::to_value(r)?), None)
        }
        Command::Attack { game, type_index } => {
            let inst = load(&game, false)?;
            let r = optimal_report(&inst.game, inst.types.get(type_index)?);
            emit(
                &pretty(&json!({
                    "fake_type": r.fake_type,
                    "coverage": r.induced.coverage,
                    "target": r.induced.target + 1,
                    "atk_true_value": r.atk_true_value,
                    "truthful_atk_value": r.truthful_atk_value,
                    "truthful_def_value": r.truthful_def_value,
                    "manip_def_value": r.manip_def_value,
                    "defender_loss": r.defender_loss(),
                })),
                None,
            )
        }
        Command::Policy { kind } => match kind {
            PolicyCmd::Optimal {
                game,
                xi,
                maximize: _,
                delta,
                common,
            } => {
                let inst = load(&game, common.shift)?;
                let solver = OptimalPolicySolver::new(&inst.game, &inst.types)?;
                match xi {
                    Some(xi) => match solver.decide(xi)? {
                        Some(policy) => emit(&policy_to_json(&policy), common.output.as_ref()),
                        None => {
                            eprintln!("no policy reaches efficiency {xi}");
                            emit("null", common.output.as_ref())
                        }
                    },
                    None => {
                        let (policy, xi) = solver.maximize(delta)?;
                        eprintln!("xi = {xi}");
                        emit(&policy_to_json(&policy), common.output.as_ref())
                    }
                }
            }
            PolicyCmd::Qr { game, phi, common } => {
                let inst = load(&game, common.shift)?;
                let sse = SseTable::compute(&inst.game, &inst.types)?;
                let policy = qr_policy_from(&inst.game, &inst.types, &sse, phi)?;
                emit(&qr_policy_to_json(&policy), common.output.as_ref())
            }
            PolicyCmd::Sse { game, common } => {
                let inst = load(&game, common.shift)?;
                let sse = SseTable::compute(&inst.game, &inst.types)?;
                emit(
                    &policy_to_json(&sse_policy_from(&sse)),
                    common.output.as_ref(),
                )
            }
        },
        Command::Eop {
            game,
            policy,
            phi,
            delta,
            common,
        } => {
            let inst = load(&game, common.shift)?;
            let (g, types) = (&inst.game, &inst.types);
            let sse = SseTable::compute(g, types)?;
            let report = match policy.as_str() {
                "sse" => eop_with(&sse_policy_from(&sse), g, types, &sse)?,
                "optimal" => {
                    let (p, _) =
                        OptimalPolicySolver::with_sse(g, types, sse.clone()).maximize(delta)?;
                    eop_with(&p, g, types, &sse)?
                }
                "qr" => eop_with(&qr_policy_from(g, types, &sse, phi)?, g, types, &sse)?,
                path => match load_policy(path, g, types)? {
                    LoadedPolicy::Deterministic(p) => eop_with(&p, g, types, &sse)?,
                    LoadedPolicy::Stochastic(p) => eop_with(&p, g, types, &sse)?,
                },
            };
            emit(
                &pretty(&serde_json::to_value(report)?),
                common.output.as_ref(),
            )
        }
        Command::Experiment {
            config,
            output,
            no_timing,
        } => {
            let mut cfg = ExperimentConfig::load(&config)?;
            if no_timing {
                cfg.timing = false;
            }
            let rows = run_experiment(&cfg)?;
            match output {
                Some(path) => write_csv(&rows, fs::File::create(path)?),
                None => write_csv(&rows, io::stdout().lock()),
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_validation() { 2 } else { 1 })
        }
    }
}

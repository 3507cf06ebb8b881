use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use cmd_core::eval::{Measure, MeasureKind};
use cmd_core::game::JointPolicy;
use cmd_core::games::{exhaustive_optimum, list_games, make_game, GameSpec};
use cmd_core::harness::{run_with, table_defaults, write_outputs, ExperimentConfig};

#[derive(Parser)]
#[command(
    name = "cmdbench",
    version,
    about = "Mirror-descent solvers for extensive-form games"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment described by a TOML config.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Override the config's seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory for records.csv, summary.json and policy.json.
        #[arg(long, default_value = "results")]
        out: PathBuf,
        /// Do not print a line per evaluation.
        #[arg(long)]
        quiet: bool,
    },
    /// List the constructible games.
    ListGames,
    /// Show the structure and defaults of a game.
    DescribeGame {
        /// Game spec such as `kuhn_poker(players=3)`.
        game: String,
    },
    /// Evaluate a policy file on a game.
    Eval {
        #[arg(long)]
        game: String,
        #[arg(long)]
        policy: PathBuf,
        #[arg(long, default_value = "nash_conv")]
        measure: String,
    },
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            let solver = e
                .chain()
                .find_map(|c| c.downcast_ref::<cmd_core::Error>())
                .is_some_and(|e| e.is_solver_error());
            ExitCode::from(if solver { 2 } else { 1 })
        }
    }
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run {
            config,
            seed,
            out,
            quiet,
        } => run(config, seed, out, quiet),
        Command::ListGames => {
            for g in list_games() {
                println!("{:<24} {}", g.name, g.description);
                if !g.params.is_empty() {
                    println!("{:<24}   params: {}", "", g.params);
                }
            }
            Ok(())
        }
        Command::DescribeGame { game } => describe(&game),
        Command::Eval {
            game,
            policy,
            measure,
        } => eval(&game, policy, &measure),
    }
}

fn run(config: PathBuf, seed: Option<u64>, out: PathBuf, quiet: bool) -> Result<()> {
    let text = std::fs::read_to_string(&config)
        .with_context(|| format!("cannot read {}", config.display()))?;
    let mut cfg = ExperimentConfig::from_toml(&text)?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    let exp = cfg.resolve()?;
    let output = run_with(&exp, |r| {
        if !quiet {
            println!("{:>8} {} {:.6e}", r.iteration, r.measure, r.value);
        }
    })?;
    write_outputs(&out, &exp.game.tree, &output)?;
    println!(
        "{} on {}: final {} = {}; results in {}",
        output.summary.algorithm,
        output.summary.game,
        output.summary.measure,
        output
            .summary
            .final_value
            .map_or("n/a".into(), |v| format!("{v:.6e}")),
        out.display()
    );
    Ok(())
}

fn describe(game: &str) -> Result<()> {
    let spec: GameSpec = game.parse()?;
    let built = make_game(&spec)?;
    let tree = &built.tree;
    let counts = tree.decision_points();
    println!("game:            {}", tree.name());
    println!("category:        {}", built.category);
    println!("players:         {}", tree.num_players());
    println!("decision points: {} {:?}", counts.total, counts.per_player);
    println!("nodes:           {}", tree.num_nodes());
    if let Some(teams) = &built.teams {
        println!("teams:           {teams:?}");
    }
    let (m, mu) = table_defaults(&spec);
    println!("default M, mu:   {m}, {mu}");
    Ok(())
}

fn eval(game: &str, policy: PathBuf, measure: &str) -> Result<()> {
    let built = make_game(&game.parse()?)?;
    let tree = &built.tree;
    let text = std::fs::read_to_string(&policy)
        .with_context(|| format!("cannot read {}", policy.display()))?;
    let joint = JointPolicy::from_json(tree, &text)?;
    let mut m = Measure::new(measure.parse()?);
    m.teams = built.teams.clone();
    if m.kind == MeasureKind::OptGap {
        m.reference_value = Some(exhaustive_optimum(tree)?.0);
    }
    println!("{} = {:.12e}", m.kind, m.evaluate(tree, &joint)?);
    Ok(())
}

//! `checkers`: train, evaluate and inspect six-player Chinese Checkers agents.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(name = "checkers", version, about = "Six-player Chinese Checkers: PPO self-play and evaluation")]
struct Cli {
    /// Worker threads for rollouts and games (default: one per core).
    #[arg(long, global = true, default_value_t = 0)]
    workers: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Train a policy with PPO self-play.
    Train(TrainArgs),
    /// Evaluate a checkpoint against five random seats.
    Eval(EvalArgs),
    /// Three-way match, two seats per checkpoint.
    Match(MatchArgs),
    /// Peg-occupancy heatmaps of a checkpoint against random seats.
    Heatmap(HeatmapArgs),
    /// Count submove sequences from the initial position.
    Perft(PerftArgs),
    /// Print one board diagram per submove of a game log.
    Render(RenderArgs),
    /// Speak the JSON-lines environment protocol on stdin/stdout.
    Serve,
    /// Play one game between six agents and write its log.
    Play(PlayArgs),
}

#[derive(Args, Debug)]
pub struct TrainArgs {
    /// Run directory for checkpoints, logs and reports.
    #[arg(long, default_value = "run")]
    pub out: PathBuf,
    /// key=value config file; flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Continue from the run directory's latest checkpoint.
    #[arg(long)]
    pub resume: bool,
    #[arg(long)]
    pub n: Option<u32>,
    /// independent, shared-encoder or fully-shared.
    #[arg(long)]
    pub sharing: Option<String>,
    /// sparse, sparse-goal, sparse-move or positive-sum.
    #[arg(long)]
    pub scheme: Option<String>,
    #[arg(long)]
    pub iterations: Option<usize>,
    /// Environment steps per iteration.
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long)]
    pub epochs: Option<usize>,
    #[arg(long)]
    pub minibatch: Option<usize>,
    #[arg(long)]
    pub lr: Option<f32>,
    #[arg(long)]
    pub clip: Option<f32>,
    #[arg(long)]
    pub gamma: Option<f32>,
    #[arg(long)]
    pub lambda: Option<f32>,
    #[arg(long)]
    pub entropy_coef: Option<f32>,
    #[arg(long)]
    pub value_coef: Option<f32>,
    /// Total player-turns before a training game is truncated.
    #[arg(long)]
    pub turn_limit: Option<u32>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Parallel environments per rollout.
    #[arg(long)]
    pub envs: Option<usize>,
    #[arg(long)]
    pub eval_games: Option<usize>,
    #[arg(long)]
    pub eval_turn_limit: Option<u32>,
    /// Evaluate every k iterations; 0 turns evaluation off.
    #[arg(long)]
    pub eval_every: Option<u64>,
}

#[derive(Args, Debug)]
pub struct EvalArgs {
    #[arg(long)]
    pub checkpoint: PathBuf,
    #[arg(long, default_value_t = 30)]
    pub games: usize,
    #[arg(long, default_value_t = 150)]
    pub turn_limit: u32,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Take the most likely action instead of sampling.
    #[arg(long)]
    pub deterministic: bool,
    /// Write the full per-game report here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct MatchArgs {
    /// Exactly three checkpoints.
    #[arg(long, num_args = 3, required = true)]
    pub checkpoints: Vec<PathBuf>,
    #[arg(long, default_value_t = 20)]
    pub games: usize,
    #[arg(long, default_value_t = 200)]
    pub turn_limit: u32,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub deterministic: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct HeatmapArgs {
    #[arg(long)]
    pub checkpoint: PathBuf,
    #[arg(long, default_value_t = 100)]
    pub games: usize,
    /// Snapshot turns of the evaluated player, ascending.
    #[arg(long, value_delimiter = ',', default_value = "5,10,15,20")]
    pub turns: Vec<u32>,
    #[arg(long, default_value_t = 150)]
    pub turn_limit: u32,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub deterministic: bool,
    /// CSV output file; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct PerftArgs {
    #[arg(long, default_value_t = 2)]
    pub n: u32,
    #[arg(long, default_value_t = 3)]
    pub depth: u32,
}

#[derive(Args, Debug)]
pub struct RenderArgs {
    /// Game log file.
    pub log: PathBuf,
}

#[derive(Args, Debug)]
pub struct PlayArgs {
    #[arg(long, default_value_t = 2)]
    pub n: u32,
    /// Six comma-separated agents: random, greedy, or a checkpoint path
    /// (prefix `argmax:` for deterministic play).
    #[arg(long, value_delimiter = ',', default_value = "greedy,random,random,random,random,random")]
    pub agents: Vec<String>,
    #[arg(long)]
    pub turn_limit: Option<u32>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Log file; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = checkers_core::par::set_threads(cli.workers).and_then(|()| match cli.command {
        Command::Train(a) => commands::train(a),
        Command::Eval(a) => commands::eval(a),
        Command::Match(a) => commands::head_to_head(a),
        Command::Heatmap(a) => commands::heatmap(a),
        Command::Perft(a) => commands::perft(a),
        Command::Render(a) => commands::render(a),
        Command::Serve => commands::serve(),
        Command::Play(a) => commands::play(a),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

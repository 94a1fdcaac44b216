use std::fmt::Write as _;
use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::{SystemTime, UNIX_EPOCH};

use checkers_core::agents::{act, ActMode, AgentKind, Scratch};
use checkers_core::checkpoint::Checkpoint;
use checkers_core::env::{decode_action, step_in_place};
use checkers_core::eval::{collect_heatmaps, evaluate_vs_random, head_to_head as run_match, EvalConfig, EvalReport};
use checkers_core::gamelog::GameLog;
use checkers_core::ppo::{run, IterationStats, Trainer};
use checkers_core::rules::{default_turn_limit, initial_state, perft as count_perft, PlayerId};
use checkers_core::{par, protocol, render, seeding, Error, Result};

use crate::config::RunConfig;
use crate::{EvalArgs, HeatmapArgs, MatchArgs, PerftArgs, PlayArgs, RenderArgs, TrainArgs};

const CONFIG_FILE: &str = "config.txt";
const META_FILE: &str = "run.meta";
const METRICS_FILE: &str = "metrics.log";
const LATEST: &str = "latest.ckpt";
const EVAL_STREAM: u64 = 0xE7A1;

const METRICS_HEADER: &str = "iteration\tenv_steps\tepisodes\twins\ttruncations\tmean_episode_turns\tloss\tpolicy_loss\tvalue_loss\tentropy\tapprox_kl\tclip_fraction\tinitial_ratio_dev\twin_rate_incl\twin_rate_decided\tmean_length\tmean_win_length\tmean_reward";

fn now() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

fn flag_pairs(a: &TrainArgs) -> Vec<(String, String)> {
    let mut v: Vec<(String, String)> = Vec::new();
    let mut put = |k: &str, x: Option<String>| {
        if let Some(x) = x {
            v.push((k.to_string(), x));
        }
    };
    put("n", a.n.map(|x| x.to_string()));
    put("sharing", a.sharing.clone());
    put("scheme", a.scheme.clone());
    put("iterations", a.iterations.map(|x| x.to_string()));
    put("steps", a.steps.map(|x| x.to_string()));
    put("epochs", a.epochs.map(|x| x.to_string()));
    put("minibatch", a.minibatch.map(|x| x.to_string()));
    put("lr", a.lr.map(|x| x.to_string()));
    put("clip", a.clip.map(|x| x.to_string()));
    put("gamma", a.gamma.map(|x| x.to_string()));
    put("lambda", a.lambda.map(|x| x.to_string()));
    put("entropy-coef", a.entropy_coef.map(|x| x.to_string()));
    put("value-coef", a.value_coef.map(|x| x.to_string()));
    put("turn-limit", a.turn_limit.map(|x| x.to_string()));
    put("seed", a.seed.map(|x| x.to_string()));
    put("envs", a.envs.map(|x| x.to_string()));
    put("eval-games", a.eval_games.map(|x| x.to_string()));
    put("eval-turn-limit", a.eval_turn_limit.map(|x| x.to_string()));
    put("eval-every", a.eval_every.map(|x| x.to_string()));
    v
}

fn metrics_row(s: &IterationStats, eval: Option<&EvalReport>) -> String {
    let r = &s.rollout;
    let l = &s.loss;
    let mut row = format!(
        "{}\t{}\t{}\t{}\t{}\t{:.3}\t{:.6}\t{:.6}\t{:.6}\t{:.6}\t{:.6}\t{:.6}\t{:.3e}",
        s.iteration,
        s.env_steps,
        r.episodes,
        r.wins.iter().sum::<usize>(),
        r.truncations,
        r.episode_turns as f64 / r.episodes.max(1) as f64,
        l.loss,
        l.policy_loss,
        l.value_loss,
        l.entropy,
        l.approx_kl,
        l.clip_fraction,
        s.initial_ratio_deviation,
    );
    match eval {
        Some(e) => {
            let win_len = e.mean_win_length().map_or("-".to_string(), |x| format!("{x:.3}"));
            let _ = write!(
                row,
                "\t{:.4}\t{:.4}\t{:.3}\t{win_len}\t{:.4}",
                e.win_rate_incl(),
                e.win_rate_decided(),
                e.mean_length(),
                e.mean_reward()
            );
        }
        None => row.push_str("\t-\t-\t-\t-\t-"),
    }
    row
}

fn write_meta(dir: &Path, started: u64, finished: Option<u64>, resumed_from: u64) -> Result<()> {
    let mut s = format!("started_unix={started}\n");
    if let Some(f) = finished {
        let _ = writeln!(s, "finished_unix={f}");
    }
    let _ = writeln!(s, "resumed_from_iteration={resumed_from}");
    let _ = writeln!(s, "parallel={}", par::is_parallel());
    let _ = writeln!(s, "version={}", env!("CARGO_PKG_VERSION"));
    fs::write(dir.join(META_FILE), s)?;
    Ok(())
}

/// Metrics lines kept when resuming: the header plus rows up to `iteration`.
fn kept_metrics(path: &Path, iteration: u64) -> String {
    let mut out = format!("{METRICS_HEADER}\n");
    if let Ok(text) = fs::read_to_string(path) {
        for line in text.lines().skip(1) {
            let it = line.split('\t').next().and_then(|x| x.parse::<u64>().ok());
            if it.is_some_and(|it| it <= iteration) {
                out.push_str(line);
                out.push('\n');
            }
        }
    }
    out
}

pub fn train(a: TrainArgs) -> Result<()> {
    let dir = a.out.clone();
    let ckpt_dir = dir.join("checkpoints");
    // on resume the persisted config stands in for a missing --config
    let file_pairs = match (&a.config, a.resume) {
        (Some(p), _) => RunConfig::load_pairs(p)?,
        (None, true) => RunConfig::load_pairs(&dir.join(CONFIG_FILE))?,
        (None, false) => Vec::new(),
    };
    let cfg = RunConfig::resolve(&file_pairs, &flag_pairs(&a))?;
    for d in [&dir, &ckpt_dir, &dir.join("eval")] {
        fs::create_dir_all(d)?;
    }
    let started = now();
    let mut trainer = if a.resume {
        let ck = Checkpoint::load(&ckpt_dir.join(LATEST))?;
        Trainer::resume(cfg.train.clone(), ck)?
    } else {
        Trainer::new(cfg.train.clone())?
    };
    let resumed_from = trainer.iteration();
    fs::write(dir.join(CONFIG_FILE), cfg.to_text())?;
    write_meta(&dir, started, None, resumed_from)?;
    let metrics_path = dir.join(METRICS_FILE);
    let mut metrics = kept_metrics(&metrics_path, resumed_from);
    fs::write(&metrics_path, &metrics)?;

    let eval_seed = seeding::derive(cfg.train.seed, EVAL_STREAM);
    let mut hook = |t: &Trainer, s: &IterationStats| -> Result<()> {
        let ck = t.checkpoint();
        ck.save(&ckpt_dir.join(format!("iter_{:04}.ckpt", s.iteration)))?;
        ck.save(&ckpt_dir.join(LATEST))?;
        let report = if cfg.eval_every > 0 && s.iteration.is_multiple_of(cfg.eval_every) {
            let agent = AgentKind::policy(Arc::new(t.policy().clone()), ActMode::Sample);
            let ecfg = EvalConfig {
                n: cfg.train.n,
                games: cfg.eval_games,
                turn_limit: cfg.eval_turn_limit,
                seed: seeding::derive(eval_seed, s.iteration),
                scheme: cfg.train.scheme,
            };
            let r = evaluate_vs_random(&agent, &ecfg)?;
            fs::write(dir.join("eval").join(format!("iter_{:04}.txt", s.iteration)), r.to_text())?;
            Some(r)
        } else {
            None
        };
        metrics.push_str(&metrics_row(s, report.as_ref()));
        metrics.push('\n');
        fs::write(&metrics_path, &metrics)?;
        let win = report.as_ref().map_or(String::new(), |r| {
            format!(" win_rate_decided={:.3} win_rate_incl={:.3}", r.win_rate_decided(), r.win_rate_incl())
        });
        eprintln!("iteration {} env_steps {}{win}", s.iteration, s.env_steps);
        Ok(())
    };
    run(&mut trainer, &mut hook)?;
    write_meta(&dir, started, Some(now()), resumed_from)?;
    Ok(())
}

fn load_agent(path: &Path, deterministic: bool) -> Result<AgentKind> {
    if !path.exists() {
        return Err(Error::Config(format!("checkpoint {} does not exist", path.display())));
    }
    let ck = Checkpoint::load(path)?;
    let mode = if deterministic { ActMode::Argmax } else { ActMode::Sample };
    Ok(AgentKind::policy(Arc::new(ck.policy), mode))
}

fn board_of(agent: &AgentKind) -> u32 {
    match agent {
        AgentKind::Policy(p) => p.params.n,
        _ => 2,
    }
}

fn write_or_print(out: Option<&PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(p) => {
            if let Some(parent) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(parent)?;
            }
            fs::write(p, text)?;
        }
        None => print!("{text}"),
    }
    Ok(())
}

pub fn eval(a: EvalArgs) -> Result<()> {
    let agent = load_agent(&a.checkpoint, a.deterministic)?;
    let cfg = EvalConfig { n: board_of(&agent), games: a.games, turn_limit: a.turn_limit, seed: a.seed, ..Default::default() };
    let report = evaluate_vs_random(&agent, &cfg)?;
    let text = report.to_text();
    if let Some(p) = &a.out {
        write_or_print(Some(p), &text)?;
    }
    // summary rows only on stdout
    for line in text.lines().filter(|l| !l.starts_with("game=")) {
        println!("{line}");
    }
    Ok(())
}

pub fn head_to_head(a: MatchArgs) -> Result<()> {
    let agents = a
        .checkpoints
        .iter()
        .map(|p| load_agent(p, a.deterministic))
        .collect::<Result<Vec<_>>>()?;
    let n = board_of(&agents[0]);
    if agents.iter().any(|x| board_of(x) != n) {
        return Err(Error::Config("checkpoints are for different board sizes".into()));
    }
    let names: Vec<String> = a
        .checkpoints
        .iter()
        .enumerate()
        .map(|(i, p)| format!("{}{}", (b'a' + i as u8) as char, p.file_stem().map_or(String::new(), |s| format!(":{}", s.to_string_lossy()))))
        .collect();
    let cfg = EvalConfig { n, games: a.games, turn_limit: a.turn_limit, seed: a.seed, ..Default::default() };
    let report = run_match([&agents[0], &agents[1], &agents[2]], &cfg)?;
    let text = report.to_text([&names[0], &names[1], &names[2]]);
    if let Some(p) = &a.out {
        write_or_print(Some(p), &text)?;
    }
    for line in text.lines().filter(|l| !l.starts_with("game=")) {
        println!("{line}");
    }
    Ok(())
}

pub fn heatmap(a: HeatmapArgs) -> Result<()> {
    let agent = load_agent(&a.checkpoint, a.deterministic)?;
    let cfg = EvalConfig { n: board_of(&agent), games: a.games, turn_limit: a.turn_limit, seed: a.seed, ..Default::default() };
    let grid = collect_heatmaps(&agent, &a.turns, &cfg)?;
    write_or_print(a.out.as_ref(), &grid.to_csv())
}

pub fn perft(a: PerftArgs) -> Result<()> {
    let s = initial_state(a.n, default_turn_limit(a.n), PlayerId::ALL[0])?;
    for d in 1..=a.depth {
        println!("depth {d}: {}", count_perft(&s, d));
    }
    Ok(())
}

pub fn render(a: RenderArgs) -> Result<()> {
    let text = fs::read_to_string(&a.log)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", a.log.display())))?;
    let log = GameLog::parse(&text)?;
    let stdout = io::stdout();
    let mut w = BufWriter::new(stdout.lock());
    for s in log.replay()? {
        writeln!(w, "{}", render::frame(&s))?;
    }
    w.flush()?;
    Ok(())
}

pub fn serve() -> Result<()> {
    let stdin = io::stdin();
    let stdout = io::stdout();
    protocol::serve(stdin.lock(), stdout.lock())
}

fn parse_agent(desc: &str) -> Result<AgentKind> {
    match desc {
        "random" => Ok(AgentKind::Random),
        "greedy" => Ok(AgentKind::GreedyForward),
        _ => match desc.strip_prefix("argmax:") {
            Some(path) => load_agent(Path::new(path), true),
            None => load_agent(Path::new(desc), false),
        },
    }
}

pub fn play(a: PlayArgs) -> Result<()> {
    if a.agents.len() != 6 {
        return Err(Error::Config(format!("need six agents, got {}", a.agents.len())));
    }
    let agents = a.agents.iter().map(|s| parse_agent(s)).collect::<Result<Vec<_>>>()?;
    for x in &agents {
        x.check_board(a.n)?;
    }
    let mut rng = seeding::rng(a.seed, 0);
    let start = PlayerId::ALL[(seeding::derive(a.seed, 1) % 6) as usize];
    let limit = a.turn_limit.unwrap_or(default_turn_limit(a.n));
    let mut state = initial_state(a.n, limit, start)?;
    let mut log = GameLog::new(a.n, limit, start);
    let mut scratch = Scratch::default();
    while state.is_running() {
        let mover = state.current();
        let action = act(&agents[mover.index()], &state, &mut rng, &mut scratch)?;
        let m = decode_action(action, a.n)?.rotated(mover.index() as i32);
        step_in_place(&mut state, action, Default::default())?;
        log.push(mover, m);
    }
    write_or_print(a.out.as_ref(), &log.to_text())?;
    eprintln!("result: {:?} after {} turns", state.status(), state.turn_count());
    Ok(())
}

//! Drives the `checkers` binary end to end.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_checkers"))
}

fn scratch(name: &str) -> PathBuf {
    let d = Path::new(env!("CARGO_TARGET_TMPDIR")).join(name);
    let _ = fs::remove_dir_all(&d);
    fs::create_dir_all(&d).unwrap();
    d
}

fn ok(out: Output) -> String {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn perft_counts() {
    let out = ok(bin().args(["perft", "--n", "2", "--depth", "3"]).output().unwrap());
    assert_eq!(out, "depth 1: 6\ndepth 2: 25\ndepth 3: 107\n");
}

#[test]
fn play_then_render() {
    let d = scratch("play");
    let log = d.join("game.log");
    ok(bin().args(["play", "--seed", "4", "--out"]).arg(&log).output().unwrap());
    let text = fs::read_to_string(&log).unwrap();
    assert!(text.starts_with("ccgame v1 n=2"));
    let moves = text.lines().filter(|l| !l.starts_with('#') && !l.starts_with("ccgame")).count();
    let frames = ok(bin().arg("render").arg(&log).output().unwrap());
    // one frame for the start plus one per submove; the last one is final
    let headers: Vec<&str> = frames.lines().filter(|l| l.starts_with("turn ")).collect();
    assert_eq!(headers.len(), moves + 1);
    assert!(headers[..moves].iter().all(|h| h.contains("to move")));
    assert!(headers[moves].contains("won by") || headers[moves].contains("truncated"));
}

#[test]
fn malformed_log_reports_the_line() {
    let d = scratch("badlog");
    let log = d.join("bad.log");
    fs::write(&log, "ccgame v1 n=2 turn_limit=200 start=0\n0 1 -3 5 0\n0 nonsense\n").unwrap();
    let out = bin().arg("render").arg(&log).output().unwrap();
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 3"), "{err}");
}

#[test]
fn train_resume_eval_match_heatmap() {
    let d = scratch("train");
    let run = d.join("run");
    let small = ["--steps", "256", "--minibatch", "64", "--envs", "2", "--eval-games", "6", "--seed", "3"];
    ok(bin().args(["train", "--iterations", "2"]).args(small).arg("--out").arg(&run).output().unwrap());
    let metrics = fs::read_to_string(run.join("metrics.log")).unwrap();
    assert_eq!(metrics.lines().count(), 3, "{metrics}");
    assert!(run.join("checkpoints/iter_0002.ckpt").exists());
    assert!(run.join("eval/iter_0001.txt").exists());
    assert!(fs::read_to_string(run.join("config.txt")).unwrap().contains("steps=256"));

    ok(bin().args(["train", "--resume", "--iterations", "3", "--out"]).arg(&run).output().unwrap());
    let metrics = fs::read_to_string(run.join("metrics.log")).unwrap();
    assert_eq!(metrics.lines().count(), 4, "{metrics}");
    assert!(fs::read_to_string(run.join("run.meta")).unwrap().contains("resumed_from_iteration=2"));

    let ckpt = run.join("checkpoints/latest.ckpt");
    let eval = ok(bin().args(["eval", "--games", "6", "--checkpoint"]).arg(&ckpt).output().unwrap());
    assert!(eval.contains("games=6") && eval.contains("win_rate_decided="), "{eval}");

    let c1 = run.join("checkpoints/iter_0001.ckpt");
    let c2 = run.join("checkpoints/iter_0002.ckpt");
    let m = ok(bin().args(["match", "--games", "3", "--checkpoints"]).arg(&c1).arg(&c2).arg(&ckpt).output().unwrap());
    assert!(m.contains("games=3") && m.contains("truncations="), "{m}");

    let csv = ok(bin().args(["heatmap", "--games", "6", "--turns", "0,5", "--checkpoint"]).arg(&ckpt).output().unwrap());
    assert_eq!(csv.matches("# turn=").count(), 2);
    let first: u64 = csv
        .lines()
        .skip(1)
        .take_while(|l| !l.starts_with('#'))
        .flat_map(|l| l.split(',').map(|x| x.parse::<u64>().unwrap()))
        .sum();
    assert_eq!(first, 18);

    let play = ok(bin().args(["play", "--agents"]).arg(format!("argmax:{},random,random,greedy,random,random", ckpt.display())).output().unwrap());
    assert!(play.starts_with("ccgame v1"));
}

#[test]
fn missing_checkpoint_fails_cleanly() {
    let out = bin().args(["eval", "--checkpoint", "/nonexistent/x.ckpt"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
}

#[test]
fn bad_config_is_rejected() {
    let d = scratch("badcfg");
    let cfg = d.join("c.txt");
    fs::write(&cfg, "iterations=1\nbogus=3\n").unwrap();
    let out = bin().args(["train", "--config"]).arg(&cfg).arg("--out").arg(d.join("run")).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bogus"));
}

#[test]
fn serve_speaks_json_lines() {
    let mut child = bin().arg("serve").stdin(Stdio::piped()).stdout(Stdio::piped()).spawn().unwrap();
    let mut stdin = child.stdin.take().unwrap();
    stdin
        .write_all(b"{\"cmd\":\"reset\",\"n\":2,\"start\":1}\n{\"cmd\":\"mask\"}\n{\"cmd\":\"step\",\"action\":0}\n{\"cmd\":\"state\"}\n")
        .unwrap();
    drop(stdin);
    let out = ok(child.wait_with_output().unwrap());
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 4);
    assert!(lines[0].contains("\"ok\":true") && lines[0].contains("\"agent\":1"));
    assert!(lines[1].contains("\"legal\""));
    assert!(lines[2].contains("\"ok\":false"));
    assert!(lines[3].contains("\"current\":1"));
}

//! JSON-lines environment protocol: one request object per input line, one
//! response object per output line. See `docs/PROTOCOL.md`.

use std::io::{BufRead, Write};

use serde::Deserialize;
use serde_json::{json, Value};

use crate::env::{action_mask, encode_observation, legal_actions, step_in_place, RewardScheme};
use crate::error::{Error, Result};
use crate::render;
use crate::rules::{default_turn_limit, initial_state, BoardState, PlayerId, Status};

#[derive(Debug, Deserialize)]
#[serde(tag = "cmd", rename_all = "lowercase", deny_unknown_fields)]
enum Request {
    Reset {
        #[serde(default = "default_n")]
        n: u32,
        turn_limit: Option<u32>,
        #[serde(default)]
        start: u8,
        #[serde(default)]
        scheme: RewardScheme,
    },
    Step {
        action: usize,
    },
    Observe {
        agent: Option<u8>,
    },
    Mask,
    State,
}

fn default_n() -> u32 {
    2
}

/// One protocol session; holds at most one game.
#[derive(Debug, Default)]
pub struct Session {
    game: Option<(BoardState, RewardScheme)>,
}

impl Session {
    pub fn new() -> Self {
        Self::default()
    }

    /// Answers one request line. Failures become `{"ok": false, ...}`
    /// responses; the session stays usable.
    pub fn handle_line(&mut self, line: &str) -> String {
        let resp = match serde_json::from_str::<Request>(line) {
            Ok(req) => self.handle(req).unwrap_or_else(|e| json!({"ok": false, "error": e.to_string()})),
            Err(e) => json!({"ok": false, "error": format!("bad request: {e}")}),
        };
        resp.to_string()
    }

    fn game(&mut self) -> Result<&mut (BoardState, RewardScheme)> {
        self.game.as_mut().ok_or_else(|| Error::Contract("no game; send reset first".into()))
    }

    fn handle(&mut self, req: Request) -> Result<Value> {
        match req {
            Request::Reset { n, turn_limit, start, scheme } => {
                let start = PlayerId::new(start)?;
                let s = initial_state(n, turn_limit.unwrap_or(default_turn_limit(n)), start)?;
                let resp = json!({"ok": true, "agent": start.index(), "n": n, "turn_limit": s.turn_limit()});
                self.game = Some((s, scheme));
                Ok(resp)
            }
            Request::Step { action } => {
                let (s, scheme) = self.game()?;
                let r = step_in_place(s, action, *scheme)?;
                Ok(json!({
                    "ok": true,
                    "rewards": r.rewards,
                    "terminated": r.terminated,
                    "truncated": r.truncated,
                    "next_agent": r.next_agent.index(),
                }))
            }
            Request::Observe { agent } => {
                let (s, _) = self.game()?;
                let p = match agent {
                    Some(a) => PlayerId::new(a)?,
                    None => s.current(),
                };
                let obs: Vec<u8> = encode_observation(s, p).iter().map(|&x| x as u8).collect();
                Ok(json!({"ok": true, "agent": p.index(), "observation": obs}))
            }
            Request::Mask => {
                let (s, _) = self.game()?;
                Ok(json!({"ok": true, "mask": action_mask(s)?, "legal": legal_actions(s)?}))
            }
            Request::State => {
                let (s, _) = self.game()?;
                let (status, winner) = match s.status() {
                    Status::Running => ("running", None),
                    Status::Won(w) => ("won", Some(w.index())),
                    Status::Truncated => ("truncated", None),
                };
                let pegs: Vec<Vec<[i32; 2]>> =
                    PlayerId::ALL.iter().map(|&p| s.pegs(p).iter().map(|c| [c.q, c.r]).collect()).collect();
                Ok(json!({
                    "ok": true,
                    "current": s.current().index(),
                    "status": status,
                    "winner": winner,
                    "turn_count": s.turn_count(),
                    "active_peg": s.active_peg().map(|c| [c.q, c.r]),
                    "pegs": pegs,
                    "board": render::board(s),
                }))
            }
        }
    }
}

/// Serves requests from `input` until end-of-input.
pub fn serve<R: BufRead, W: Write>(input: R, mut output: W) -> Result<()> {
    let mut session = Session::new();
    for line in input.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        writeln!(output, "{}", session.handle_line(&line))?;
        output.flush()?;
    }
    Ok(())
}

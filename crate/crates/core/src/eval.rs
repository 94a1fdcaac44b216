//! Evaluation harnesses: a policy against five random seats, three-way
//! matches between architectures, and peg-occupancy heatmaps.
//!
//! Every game draws from its own RNG derived from `(seed, game index)`, so
//! reports do not depend on how games are scheduled across threads.

use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::agents::{act, AgentKind, Scratch};
use crate::env::{decode_action, step_in_place, RewardScheme};
use crate::error::{Error, Result};
use crate::hexgrid::grid_side;
use crate::par;
use crate::rules::{initial_state, BoardState, PlayerId, Status, NUM_PLAYERS};
use crate::seeding;

/// How one game went.
#[derive(Debug, Clone, PartialEq)]
pub struct GameOutcome {
    pub start: PlayerId,
    pub winner: Option<PlayerId>,
    /// Completed player-turns over the whole game.
    pub turns: u32,
    /// Completed turns per seat.
    pub seat_turns: [u32; NUM_PLAYERS],
    pub returns: [f32; NUM_PLAYERS],
}

/// Plays one game to the end. `observer` sees the state after every turn
/// completed by any seat.
pub fn play_game<R: Rng>(
    seats: [&AgentKind; NUM_PLAYERS],
    mut state: BoardState,
    scheme: RewardScheme,
    rng: &mut R,
    mut observer: impl FnMut(&BoardState, PlayerId),
) -> Result<GameOutcome> {
    for s in seats {
        s.check_board(state.n())?;
    }
    let start = state.current();
    let mut seat_turns = [0u32; NUM_PLAYERS];
    let mut returns = [0.0f32; NUM_PLAYERS];
    let mut scratch = Scratch::default();
    while state.is_running() {
        let mover = state.current();
        let a = act(seats[mover.index()], &state, rng, &mut scratch)?;
        let ends_turn = !decode_action(a, state.n())?.is_jump();
        let res = step_in_place(&mut state, a, scheme)?;
        for p in 0..NUM_PLAYERS {
            returns[p] += res.rewards[p];
        }
        if ends_turn {
            seat_turns[mover.index()] += 1;
            observer(&state, mover);
        }
    }
    let winner = match state.status() {
        Status::Won(w) => Some(w),
        _ => None,
    };
    Ok(GameOutcome { start, winner, turns: state.turn_count(), seat_turns, returns })
}

fn random_start<R: Rng>(rng: &mut R) -> PlayerId {
    PlayerId::ALL[rng.gen_range(0..NUM_PLAYERS)]
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalConfig {
    pub n: u32,
    pub games: usize,
    pub turn_limit: u32,
    pub seed: u64,
    pub scheme: RewardScheme,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig { n: 2, games: 30, turn_limit: 150, seed: 0, scheme: RewardScheme::PositiveSum }
    }
}

/// One game of a random-opponent evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalGame {
    pub seed: u64,
    pub eval_seat: PlayerId,
    pub outcome: GameOutcome,
}

impl EvalGame {
    pub fn won(&self) -> bool {
        self.outcome.winner == Some(self.eval_seat)
    }

    pub fn eval_turns(&self) -> u32 {
        self.outcome.seat_turns[self.eval_seat.index()]
    }

    pub fn eval_return(&self) -> f32 {
        self.outcome.returns[self.eval_seat.index()]
    }
}

/// Result of [`evaluate_vs_random`].
#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub games: usize,
    /// Wins by the evaluated policy.
    pub wins: usize,
    /// Wins by any random seat.
    pub opponent_wins: usize,
    pub truncations: usize,
    pub records: Vec<EvalGame>,
}

impl EvalReport {
    /// Wins over all games; truncations count as non-wins.
    pub fn win_rate_incl(&self) -> f64 {
        ratio(self.wins, self.games)
    }

    /// Wins over games that produced a winner. 0 when none did.
    pub fn win_rate_decided(&self) -> f64 {
        ratio(self.wins, self.games - self.truncations)
    }

    /// Turns taken by the evaluated policy, per game.
    pub fn lengths(&self) -> Vec<u32> {
        self.records.iter().map(EvalGame::eval_turns).collect()
    }

    pub fn mean_length(&self) -> f64 {
        mean(self.records.iter().map(|g| g.eval_turns() as f64))
    }

    /// Mean own-turn count over the games the evaluated policy won.
    pub fn mean_win_length(&self) -> Option<f64> {
        (self.wins > 0).then(|| mean(self.records.iter().filter(|g| g.won()).map(|g| g.eval_turns() as f64)))
    }

    pub fn mean_reward(&self) -> f64 {
        mean(self.records.iter().map(|g| g.eval_return() as f64))
    }

    /// One record per game followed by summary rows.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (g, r) in self.records.iter().enumerate() {
            let winner = r.outcome.winner.map_or("none".to_string(), |w| w.to_string());
            let _ = writeln!(
                s,
                "game={g} seed={} eval_seat={} start={} winner={winner} turns={} eval_turns={} eval_return={:.4}",
                r.seed,
                r.eval_seat,
                r.outcome.start,
                r.outcome.turns,
                r.eval_turns(),
                r.eval_return()
            );
        }
        let _ = writeln!(s, "games={}", self.games);
        let _ = writeln!(s, "wins={}", self.wins);
        let _ = writeln!(s, "opponent_wins={}", self.opponent_wins);
        let _ = writeln!(s, "truncations={}", self.truncations);
        let _ = writeln!(s, "win_rate_incl={:.6}", self.win_rate_incl());
        let _ = writeln!(s, "win_rate_decided={:.6}", self.win_rate_decided());
        let _ = writeln!(s, "mean_length={:.4}", self.mean_length());
        match self.mean_win_length() {
            Some(l) => {
                let _ = writeln!(s, "mean_win_length={l:.4}");
            }
            None => s.push_str("mean_win_length=none\n"),
        }
        let _ = writeln!(s, "mean_reward={:.6}", self.mean_reward());
        s
    }
}

fn ratio(a: usize, b: usize) -> f64 {
    if b == 0 {
        0.0
    } else {
        a as f64 / b as f64
    }
}

fn mean(it: impl Iterator<Item = f64>) -> f64 {
    let (mut sum, mut k) = (0.0, 0usize);
    for x in it {
        sum += x;
        k += 1;
    }
    if k == 0 {
        0.0
    } else {
        sum / k as f64
    }
}

/// Evaluates `agent` against five uniform-random seats. The evaluated seat
/// cycles through all six positions across games, so a multi-head policy
/// has every head measured.
pub fn evaluate_vs_random(agent: &AgentKind, cfg: &EvalConfig) -> Result<EvalReport> {
    if cfg.games == 0 {
        return Err(Error::Config("evaluation needs at least one game".into()));
    }
    agent.check_board(cfg.n)?;
    let random = AgentKind::Random;
    let records = par::map_range(cfg.games, |g| -> Result<EvalGame> {
        let seed = seeding::derive(cfg.seed, g as u64);
        let mut rng = seeding::rng(seed, 0);
        let eval_seat = PlayerId::ALL[g % NUM_PLAYERS];
        let mut seats = [&random; NUM_PLAYERS];
        seats[eval_seat.index()] = agent;
        let state = initial_state(cfg.n, cfg.turn_limit, random_start(&mut rng))?;
        let outcome = play_game(seats, state, cfg.scheme, &mut rng, |_, _| {})?;
        Ok(EvalGame { seed, eval_seat, outcome })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let wins = records.iter().filter(|g| g.won()).count();
    let truncations = records.iter().filter(|g| g.outcome.winner.is_none()).count();
    Ok(EvalReport { games: cfg.games, wins, opponent_wins: cfg.games - wins - truncations, truncations, records })
}

/// One game of a three-way match.
#[derive(Debug, Clone, PartialEq)]
pub struct MatchGame {
    pub seed: u64,
    /// Architecture index (0..3) occupying each seat.
    pub seating: [usize; NUM_PLAYERS],
    pub outcome: GameOutcome,
}

impl MatchGame {
    pub fn winning_arch(&self) -> Option<usize> {
        self.outcome.winner.map(|w| self.seating[w.index()])
    }
}

/// Result of [`head_to_head`].
#[derive(Debug, Clone, PartialEq)]
pub struct MatchReport {
    pub games: usize,
    pub wins: [usize; 3],
    pub truncations: usize,
    pub records: Vec<MatchGame>,
}

impl MatchReport {
    /// Wins over all games for each architecture; truncations are no one's.
    pub fn win_share(&self, arch: usize) -> f64 {
        ratio(self.wins[arch], self.games)
    }

    /// Mean own-turn count of each architecture's seats when it won.
    pub fn mean_win_length(&self, arch: usize) -> Option<f64> {
        let v: Vec<f64> = self
            .records
            .iter()
            .filter(|g| g.winning_arch() == Some(arch))
            .map(|g| g.outcome.seat_turns[g.outcome.winner.expect("won").index()] as f64)
            .collect();
        (!v.is_empty()).then(|| mean(v.into_iter()))
    }

    pub fn to_text(&self, names: [&str; 3]) -> String {
        let mut s = String::new();
        for (g, r) in self.records.iter().enumerate() {
            let seats: Vec<&str> = r.seating.iter().map(|&a| names[a]).collect();
            let winner = r.outcome.winner.map_or("none".to_string(), |w| w.to_string());
            let _ = writeln!(
                s,
                "game={g} seed={} seats={} start={} winner={winner} turns={}",
                r.seed,
                seats.join(","),
                r.outcome.start,
                r.outcome.turns
            );
        }
        let _ = writeln!(s, "games={}", self.games);
        for (a, name) in names.iter().enumerate() {
            let _ = writeln!(s, "wins.{name}={} share.{name}={:.6}", self.wins[a], self.win_share(a));
        }
        let _ = writeln!(s, "truncations={}", self.truncations);
        s
    }
}

/// Six-seat games with two seats per architecture at random positions.
pub fn head_to_head(archs: [&AgentKind; 3], cfg: &EvalConfig) -> Result<MatchReport> {
    if cfg.games == 0 {
        return Err(Error::Config("a match needs at least one game".into()));
    }
    for a in archs {
        a.check_board(cfg.n)?;
    }
    let records = par::map_range(cfg.games, |g| -> Result<MatchGame> {
        let seed = seeding::derive(cfg.seed, g as u64);
        let mut rng = seeding::rng(seed, 0);
        let mut seating = [0, 0, 1, 1, 2, 2];
        seating.shuffle(&mut rng);
        let seats = seating.map(|a| archs[a]);
        let state = initial_state(cfg.n, cfg.turn_limit, random_start(&mut rng))?;
        let outcome = play_game(seats, state, cfg.scheme, &mut rng, |_, _| {})?;
        Ok(MatchGame { seed, seating, outcome })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let mut wins = [0; 3];
    for r in &records {
        if let Some(a) = r.winning_arch() {
            wins[a] += 1;
        }
    }
    let truncations = records.iter().filter(|r| r.outcome.winner.is_none()).count();
    Ok(MatchReport { games: cfg.games, wins, truncations, records })
}

/// Peg occupancy counts of the evaluated player, canonical frame, one
/// `(4N+1)^2` grid per snapshot turn.
#[derive(Debug, Clone, PartialEq)]
pub struct HeatmapGrid {
    pub n: u32,
    pub snapshot_turns: Vec<u32>,
    /// Row-major by grid index `i = q + 2N`, `j = r + 2N`.
    pub counts: Vec<Vec<u64>>,
}

impl HeatmapGrid {
    pub fn total(&self, snapshot: usize) -> u64 {
        self.counts[snapshot].iter().sum()
    }

    /// Mass on the evaluated player's target corner.
    pub fn mass_in_target(&self, snapshot: usize) -> u64 {
        let geo = crate::rules::Geometry::get(self.n);
        geo.target(PlayerId::ALL[0]).iter().map(|&c| self.counts[snapshot][c as usize]).sum()
    }

    /// Mass on the evaluated player's home corner.
    pub fn mass_in_home(&self, snapshot: usize) -> u64 {
        let geo = crate::rules::Geometry::get(self.n);
        geo.home(PlayerId::ALL[0]).iter().map(|&c| self.counts[snapshot][c as usize]).sum()
    }

    /// Comma-separated grids, each preceded by a `# turn=t` line. Grid rows
    /// run over `r` (top to bottom), columns over `q`.
    pub fn to_csv(&self) -> String {
        let side = grid_side(self.n);
        let mut s = String::new();
        for (k, t) in self.snapshot_turns.iter().enumerate() {
            let _ = writeln!(s, "# turn={t}");
            for j in 0..side {
                let row: Vec<String> = (0..side).map(|i| self.counts[k][i * side + j].to_string()).collect();
                s.push_str(&row.join(","));
                s.push('\n');
            }
        }
        s
    }
}

/// Plays `cfg.games` games of `agent` against five random seats and
/// snapshots its pegs after its `t`-th completed turn for each requested
/// `t`. Games that end early contribute their final position.
pub fn collect_heatmaps(agent: &AgentKind, snapshot_turns: &[u32], cfg: &EvalConfig) -> Result<HeatmapGrid> {
    if cfg.games == 0 {
        return Err(Error::Config("heatmaps need at least one game".into()));
    }
    if snapshot_turns.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Config("snapshot turns must be strictly ascending".into()));
    }
    agent.check_board(cfg.n)?;
    let geo = crate::rules::Geometry::get(cfg.n);
    let random = AgentKind::Random;
    let per_game = par::map_range(cfg.games, |g| -> Result<Vec<Vec<u16>>> {
        let seed = seeding::derive(cfg.seed, g as u64);
        let mut rng = seeding::rng(seed, 0);
        let eval_seat = PlayerId::ALL[g % NUM_PLAYERS];
        let mut seats = [&random; NUM_PLAYERS];
        seats[eval_seat.index()] = agent;
        let state = initial_state(cfg.n, cfg.turn_limit, random_start(&mut rng))?;
        let canon = |s: &BoardState| -> Vec<u16> {
            let k = -(eval_seat.index() as i32);
            s.peg_cells(eval_seat).iter().map(|&c| geo.rotate_cell(c as usize, k) as u16).collect()
        };
        let mut snaps: Vec<Vec<u16>> = Vec::with_capacity(snapshot_turns.len());
        let mut next = 0;
        while next < snapshot_turns.len() && snapshot_turns[next] == 0 {
            snaps.push(canon(&state));
            next += 1;
        }
        let mut own = 0u32;
        let mut last = state.clone();
        play_game(seats, state, cfg.scheme, &mut rng, |s, mover| {
            if mover == eval_seat {
                own += 1;
                while next < snapshot_turns.len() && snapshot_turns[next] == own {
                    snaps.push(canon(s));
                    next += 1;
                }
            }
            last = s.clone();
        })?;
        while snaps.len() < snapshot_turns.len() {
            snaps.push(canon(&last));
        }
        Ok(snaps)
    });
    let side = grid_side(cfg.n);
    let mut counts = vec![vec![0u64; side * side]; snapshot_turns.len()];
    for snaps in per_game {
        for (k, cells) in snaps?.into_iter().enumerate() {
            for c in cells {
                counts[k][c as usize] += 1;
            }
        }
    }
    Ok(HeatmapGrid { n: cfg.n, snapshot_turns: snapshot_turns.to_vec(), counts })
}

//! Game state and legality for six-player Chinese Checkers.
//!
//! A turn is a sequence of submoves: either a single step to an adjacent
//! empty hole, or a chain of jumps by one peg (never landing on a hole that
//! peg already occupied this turn) closed by an end-turn. A player with no
//! step or jump available passes with an end-turn.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};
use crate::hexgrid::{
    axial_to_grid, grid_side, grid_to_axial, on_board, CubeCoord, Direction, GridIndex,
};

pub const NUM_PLAYERS: usize = 6;

/// Seat index 0..6. Seat `p`'s home corner is the top corner rotated
/// clockwise by `p * 60°`, and turns pass clockwise in ascending order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PlayerId(u8);

impl PlayerId {
    pub const ALL: [PlayerId; 6] = [
        PlayerId(0),
        PlayerId(1),
        PlayerId(2),
        PlayerId(3),
        PlayerId(4),
        PlayerId(5),
    ];

    pub fn new(p: u8) -> Result<Self> {
        if (p as usize) < NUM_PLAYERS {
            Ok(PlayerId(p))
        } else {
            Err(Error::Range(format!("player {p} outside 0..6")))
        }
    }

    pub const fn index(self) -> usize {
        self.0 as usize
    }

    /// The seat `k` places clockwise from this one.
    pub fn offset(self, k: usize) -> PlayerId {
        PlayerId(((self.0 as usize + k) % NUM_PLAYERS) as u8)
    }

    pub fn next(self) -> PlayerId {
        self.offset(1)
    }
}

impl fmt::Display for PlayerId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Submove {
    Move { src: CubeCoord, dir: Direction },
    Jump { src: CubeCoord, dir: Direction },
    EndTurn,
}

impl Submove {
    pub fn is_jump(&self) -> bool {
        matches!(self, Submove::Jump { .. })
    }

    /// Landing cell for moves and jumps.
    pub fn target(&self) -> Option<CubeCoord> {
        match *self {
            Submove::Move { src, dir } => Some(src + dir.vector()),
            Submove::Jump { src, dir } => Some(src + dir.vector() * 2),
            Submove::EndTurn => None,
        }
    }

    pub fn source(&self) -> Option<CubeCoord> {
        match *self {
            Submove::Move { src, .. } | Submove::Jump { src, .. } => Some(src),
            Submove::EndTurn => None,
        }
    }

    /// The same submove with every coordinate rotated `k` steps clockwise.
    pub fn rotated(&self, k: i32) -> Submove {
        let rot_dir = |d: Direction| {
            Direction::new(((d.index() as i32 - k).rem_euclid(6)) as u8).expect("in range")
        };
        match *self {
            Submove::Move { src, dir } => Submove::Move { src: src.rotate60cw(k), dir: rot_dir(dir) },
            Submove::Jump { src, dir } => Submove::Jump { src: src.rotate60cw(k), dir: rot_dir(dir) },
            Submove::EndTurn => Submove::EndTurn,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Status {
    Running,
    Won(PlayerId),
    Truncated,
}

/// Precomputed per-size lookup tables. Cells are addressed by their
/// row-major index in the `(4N+1)^2` grid.
#[derive(Debug)]
pub struct Geometry {
    n: u32,
    side: usize,
    on_board: Vec<bool>,
    coords: Vec<CubeCoord>,
    /// Neighbour cell per direction, `u16::MAX` when off the board.
    neighbor: Vec<[u16; 6]>,
    /// Cell reached by `k` clockwise rotations, for on-board cells.
    rotation: [Vec<u16>; 6],
    home: [Vec<u16>; 6],
    target: [Vec<u16>; 6],
    is_target: [Vec<bool>; 6],
}

pub(crate) const NONE: u16 = u16::MAX;

impl Geometry {
    /// Shared tables for board size `n`, built once per size.
    pub fn get(n: u32) -> Arc<Geometry> {
        static CACHE: OnceLock<Mutex<HashMap<u32, Arc<Geometry>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(Default::default);
        let mut guard = cache.lock().expect("geometry cache poisoned");
        guard.entry(n).or_insert_with(|| Arc::new(Geometry::build(n))).clone()
    }

    fn build(n: u32) -> Geometry {
        let side = grid_side(n);
        let cells = side * side;
        let coords: Vec<CubeCoord> = (0..cells)
            .map(|k| grid_to_axial(GridIndex { i: k / side, j: k % side }, n).expect("in grid"))
            .collect();
        let on: Vec<bool> = coords.iter().map(|&c| on_board(c, n)).collect();
        let index_of = |c: CubeCoord| -> u16 {
            match axial_to_grid(c, n) {
                Ok(g) if on_board(c, n) => g.flat(n) as u16,
                _ => NONE,
            }
        };
        let neighbor = coords
            .iter()
            .map(|&c| {
                let mut row = [NONE; 6];
                for d in Direction::ALL {
                    row[d.index() as usize] = index_of(c + d.vector());
                }
                row
            })
            .collect();
        let rotation: [Vec<u16>; 6] = std::array::from_fn(|k| {
            coords
                .iter()
                .zip(&on)
                .map(|(&c, &b)| if b { index_of(c.rotate60cw(k as i32)) } else { NONE })
                .collect()
        });
        let top: Vec<CubeCoord> = coords
            .iter()
            .zip(&on)
            .filter(|&(c, &b)| b && c.r <= -(n as i32 + 1))
            .map(|(&c, _)| c)
            .collect();
        let corner = |k: i32| -> Vec<u16> {
            let mut v: Vec<u16> = top.iter().map(|c| index_of(c.rotate60cw(k))).collect();
            v.sort_unstable();
            v
        };
        let home: [Vec<u16>; 6] = std::array::from_fn(|p| corner(p as i32));
        let target: [Vec<u16>; 6] = std::array::from_fn(|p| corner(p as i32 + 3));
        let is_target = std::array::from_fn(|p| {
            let mut mask = vec![false; cells];
            for &c in &target[p] {
                mask[c as usize] = true;
            }
            mask
        });
        Geometry { n, side, on_board: on, coords, neighbor, rotation, home, target, is_target }
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn side(&self) -> usize {
        self.side
    }

    /// Total grid cells, `(4N+1)^2`.
    pub fn grid_len(&self) -> usize {
        self.side * self.side
    }

    pub fn is_on_board(&self, cell: usize) -> bool {
        self.on_board[cell]
    }

    pub fn coord(&self, cell: usize) -> CubeCoord {
        self.coords[cell]
    }

    /// Flat cell index of an on-board coordinate.
    pub fn cell(&self, c: CubeCoord) -> Option<usize> {
        let g = axial_to_grid(c, self.n).ok()?;
        let k = g.flat(self.n);
        self.on_board[k].then_some(k)
    }

    pub(crate) fn neighbor(&self, cell: usize, dir: usize) -> u16 {
        self.neighbor[cell][dir]
    }

    /// Image of an on-board cell under `k` clockwise rotations.
    pub fn rotate_cell(&self, cell: usize, k: i32) -> usize {
        self.rotation[k.rem_euclid(6) as usize][cell] as usize
    }

    pub fn home(&self, p: PlayerId) -> &[u16] {
        &self.home[p.index()]
    }

    pub fn target(&self, p: PlayerId) -> &[u16] {
        &self.target[p.index()]
    }

    pub fn is_target(&self, p: PlayerId, cell: usize) -> bool {
        self.is_target[p.index()][cell]
    }

    pub fn pegs_per_player(&self) -> usize {
        pegs_per_player(self.n)
    }
}

pub fn pegs_per_player(n: u32) -> usize {
    (n * (n + 1) / 2) as usize
}

/// Home corner of `p`: the canonical top corner `{r <= -(N+1)}` rotated
/// clockwise `p` times.
pub fn home_cells(p: PlayerId, n: u32) -> Vec<CubeCoord> {
    let geo = Geometry::get(n);
    geo.home(p).iter().map(|&c| geo.coord(c as usize)).collect()
}

/// The corner diametrically opposite `p`'s home.
pub fn target_cells(p: PlayerId, n: u32) -> Vec<CubeCoord> {
    let geo = Geometry::get(n);
    geo.target(p).iter().map(|&c| geo.coord(c as usize)).collect()
}

/// Fixed-size bitset over grid cells.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CellSet {
    words: Vec<u64>,
}

impl CellSet {
    fn with_capacity(cells: usize) -> Self {
        CellSet { words: vec![0; cells.div_ceil(64)] }
    }

    pub fn contains(&self, cell: usize) -> bool {
        self.words[cell / 64] >> (cell % 64) & 1 == 1
    }

    fn insert(&mut self, cell: usize) {
        self.words[cell / 64] |= 1 << (cell % 64);
    }

    fn clear(&mut self) {
        self.words.iter_mut().for_each(|w| *w = 0);
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Member cells in ascending order.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            (0..64).filter(move |b| w >> b & 1 == 1).map(move |b| wi * 64 + b)
        })
    }
}

/// Per-turn jump bookkeeping.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JumpContext {
    active: Option<u16>,
    visited: CellSet,
    origins: CellSet,
}

impl JumpContext {
    fn new(cells: usize) -> Self {
        JumpContext {
            active: None,
            visited: CellSet::with_capacity(cells),
            origins: CellSet::with_capacity(cells),
        }
    }

    fn clear(&mut self) {
        self.active = None;
        self.visited.clear();
        self.origins.clear();
    }

    /// Cell of the peg that has jumped this turn, if any.
    pub fn active_cell(&self) -> Option<usize> {
        self.active.map(usize::from)
    }

    /// Every cell the jumping peg occupied this turn, including its start.
    pub fn visited(&self) -> &CellSet {
        &self.visited
    }

    /// Cells the jumping peg departed from this turn.
    pub fn origins(&self) -> &CellSet {
        &self.origins
    }
}

#[derive(Debug, Clone)]
pub struct BoardState {
    geo: Arc<Geometry>,
    /// Occupant per grid cell, -1 when empty.
    cells: Vec<i8>,
    pegs: [Vec<u16>; 6],
    current: PlayerId,
    turn_count: u32,
    submove_count: u32,
    turn_limit: u32,
    status: Status,
    jump: JumpContext,
}

impl PartialEq for BoardState {
    fn eq(&self, other: &Self) -> bool {
        self.geo.n == other.geo.n
            && self.cells == other.cells
            && self.current == other.current
            && self.turn_count == other.turn_count
            && self.submove_count == other.submove_count
            && self.turn_limit == other.turn_limit
            && self.status == other.status
            && self.jump == other.jump
    }
}

impl Eq for BoardState {}

/// Default turn limit for a board size: 200 at N=2, 1000 at N=4.
pub fn default_turn_limit(n: u32) -> u32 {
    match n {
        0..=2 => 200,
        3 => 600,
        _ => 1000,
    }
}

pub fn initial_state(n: u32, turn_limit: u32, starting_player: PlayerId) -> Result<BoardState> {
    if n < 1 {
        return Err(Error::Config("board size N must be at least 1".into()));
    }
    if turn_limit < 1 {
        return Err(Error::Config("turn limit must be at least 1".into()));
    }
    let geo = Geometry::get(n);
    let pegs = std::array::from_fn(|p| geo.home[p].clone());
    BoardState::assemble(geo, pegs, starting_player, turn_limit, false)
}

impl BoardState {
    fn assemble(
        geo: Arc<Geometry>,
        mut pegs: [Vec<u16>; 6],
        current: PlayerId,
        turn_limit: u32,
        allow_empty: bool,
    ) -> Result<BoardState> {
        let mut cells = vec![-1i8; geo.grid_len()];
        for (p, list) in pegs.iter_mut().enumerate() {
            if list.len() != geo.pegs_per_player() && !(allow_empty && list.is_empty()) {
                return Err(Error::Config(format!(
                    "player {p} has {} pegs, expected {}",
                    list.len(),
                    geo.pegs_per_player()
                )));
            }
            list.sort_unstable();
            for &c in list.iter() {
                if cells[c as usize] != -1 {
                    return Err(Error::Config(format!("two pegs on {}", geo.coord(c as usize))));
                }
                cells[c as usize] = p as i8;
            }
        }
        let jump = JumpContext::new(geo.grid_len());
        Ok(BoardState {
            geo,
            cells,
            pegs,
            current,
            turn_count: 0,
            submove_count: 0,
            turn_limit,
            status: Status::Running,
            jump,
        })
    }

    /// A position with arbitrary peg placement (each player must still own
    /// exactly `N(N+1)/2` pegs). Turn counters start at zero.
    pub fn from_pegs(
        n: u32,
        turn_limit: u32,
        current: PlayerId,
        pegs: [Vec<CubeCoord>; 6],
    ) -> Result<BoardState> {
        if n < 1 || turn_limit < 1 {
            return Err(Error::Config("N and turn limit must be at least 1".into()));
        }
        let geo = Geometry::get(n);
        let mut cells: [Vec<u16>; 6] = Default::default();
        for (p, list) in pegs.iter().enumerate() {
            for &c in list {
                let cell = geo
                    .cell(c)
                    .ok_or_else(|| Error::Range(format!("{c} is not on the N={n} board")))?;
                cells[p].push(cell as u16);
            }
        }
        let mut s = Self::assemble(geo, cells, current, turn_limit, false)?;
        if let Some(p) = PlayerId::ALL.into_iter().find(|&p| s.is_winner(p)) {
            s.status = Status::Won(p);
        }
        Ok(s)
    }

    /// Only `player` has pegs, on its home corner; it moves first. Every
    /// other seat is empty and therefore passes each turn.
    pub fn solo(n: u32, turn_limit: u32, player: PlayerId) -> Result<BoardState> {
        if n < 1 || turn_limit < 1 {
            return Err(Error::Config("N and turn limit must be at least 1".into()));
        }
        let geo = Geometry::get(n);
        let mut pegs: [Vec<u16>; 6] = Default::default();
        pegs[player.index()] = geo.home[player.index()].clone();
        Self::assemble(geo, pegs, player, turn_limit, true)
    }

    pub fn n(&self) -> u32 {
        self.geo.n
    }

    pub fn geometry(&self) -> &Arc<Geometry> {
        &self.geo
    }

    pub fn current(&self) -> PlayerId {
        self.current
    }

    pub fn status(&self) -> Status {
        self.status
    }

    pub fn is_running(&self) -> bool {
        self.status == Status::Running
    }

    /// Completed player-turns so far (passes included).
    pub fn turn_count(&self) -> u32 {
        self.turn_count
    }

    pub fn submove_count(&self) -> u32 {
        self.submove_count
    }

    pub fn turn_limit(&self) -> u32 {
        self.turn_limit
    }

    pub fn jump_context(&self) -> &JumpContext {
        &self.jump
    }

    /// Current position of the peg that has jumped this turn.
    pub fn active_peg(&self) -> Option<CubeCoord> {
        self.jump.active.map(|c| self.geo.coord(c as usize))
    }

    /// Owner of the peg on `c`; `None` for empty or off-board cells.
    pub fn occupant(&self, c: CubeCoord) -> Option<PlayerId> {
        self.geo.cell(c).and_then(|k| self.occupant_cell(k))
    }

    pub fn occupant_cell(&self, cell: usize) -> Option<PlayerId> {
        let v = self.cells[cell];
        (v >= 0).then_some(PlayerId(v as u8))
    }

    /// Cells holding `p`'s pegs, ascending.
    pub fn peg_cells(&self, p: PlayerId) -> &[u16] {
        &self.pegs[p.index()]
    }

    pub fn pegs(&self, p: PlayerId) -> Vec<CubeCoord> {
        self.pegs[p.index()].iter().map(|&c| self.geo.coord(c as usize)).collect()
    }

    pub fn is_winner(&self, p: PlayerId) -> bool {
        // both lists are sorted
        self.pegs[p.index()] == self.geo.target[p.index()]
    }

    fn require_running(&self) -> Result<()> {
        if self.status != Status::Running {
            return Err(Error::Contract(format!("game already finished ({:?})", self.status)));
        }
        Ok(())
    }

    /// Every submove the current player may make.
    pub fn legal_submoves(&self) -> Result<Vec<Submove>> {
        let mut out = Vec::with_capacity(32);
        self.legal_submoves_into(&mut out)?;
        Ok(out)
    }

    /// Allocation-free variant of [`legal_submoves`](Self::legal_submoves).
    /// Ordering: by source cell, then direction, steps before jumps,
    /// end-turn last.
    pub fn legal_submoves_into(&self, out: &mut Vec<Submove>) -> Result<()> {
        self.require_running()?;
        out.clear();
        let geo = &*self.geo;
        match self.jump.active {
            Some(active) => {
                let src = active as usize;
                for d in 0..6 {
                    if let Some(to) = self.jump_target(src, d) {
                        if !self.jump.visited.contains(to) {
                            out.push(Submove::Jump { src: geo.coord(src), dir: Direction::ALL[d] });
                        }
                    }
                }
                out.push(Submove::EndTurn);
            }
            None => {
                for &src in &self.pegs[self.current.index()] {
                    let src = src as usize;
                    for d in 0..6 {
                        let mid = geo.neighbor(src, d);
                        if mid == NONE {
                            continue;
                        }
                        if self.cells[mid as usize] < 0 {
                            out.push(Submove::Move { src: geo.coord(src), dir: Direction::ALL[d] });
                        } else if let Some(_to) = self.jump_target(src, d) {
                            out.push(Submove::Jump { src: geo.coord(src), dir: Direction::ALL[d] });
                        }
                    }
                }
                if out.is_empty() {
                    out.push(Submove::EndTurn);
                }
            }
        }
        Ok(())
    }

    /// Landing cell of a jump from `src` in direction `d` if the hop is
    /// over an occupied hole onto an empty on-board hole.
    fn jump_target(&self, src: usize, d: usize) -> Option<usize> {
        let mid = self.geo.neighbor(src, d);
        if mid == NONE || self.cells[mid as usize] < 0 {
            return None;
        }
        let to = self.geo.neighbor(mid as usize, d);
        (to != NONE && self.cells[to as usize] < 0).then_some(to as usize)
    }

    fn has_any_step_or_jump(&self) -> bool {
        let geo = &*self.geo;
        self.pegs[self.current.index()].iter().any(|&src| {
            (0..6).any(|d| {
                let mid = geo.neighbor(src as usize, d);
                mid != NONE
                    && (self.cells[mid as usize] < 0 || self.jump_target(src as usize, d).is_some())
            })
        })
    }

    /// Applies a submove and returns the successor.
    pub fn apply_submove(&self, m: Submove) -> Result<BoardState> {
        let mut next = self.clone();
        next.apply_in_place(m)?;
        Ok(next)
    }

    /// In-place [`apply_submove`](Self::apply_submove). On error the state is
    /// left unchanged.
    pub fn apply_in_place(&mut self, m: Submove) -> Result<()> {
        self.require_running()?;
        let mover = self.current;
        match m {
            Submove::EndTurn => {
                if self.jump.active.is_none() && self.has_any_step_or_jump() {
                    return Err(Error::Illegal(
                        "end-turn without a prior jump is only allowed when no move exists".into(),
                    ));
                }
                self.submove_count += 1;
                self.finish_turn(mover);
            }
            Submove::Move { src, dir } => {
                if self.jump.active.is_some() {
                    return Err(Error::Illegal(
                        "a step is not allowed after jumping this turn".into(),
                    ));
                }
                let from = self.own_peg_cell(src)?;
                let to = self.geo.neighbor(from, dir.index() as usize);
                if to == NONE {
                    return Err(Error::Illegal(format!("step from {src} leaves the board")));
                }
                if self.cells[to as usize] >= 0 {
                    return Err(Error::Illegal(format!("step target of {src} is occupied")));
                }
                self.relocate(from, to as usize);
                self.submove_count += 1;
                self.finish_turn(mover);
            }
            Submove::Jump { src, dir } => {
                let from = self.own_peg_cell(src)?;
                if let Some(active) = self.jump.active {
                    if active as usize != from {
                        return Err(Error::Illegal(format!(
                            "only the peg on {} may continue jumping",
                            self.geo.coord(active as usize)
                        )));
                    }
                }
                let d = dir.index() as usize;
                let mid = self.geo.neighbor(from, d);
                if mid == NONE || self.cells[mid as usize] < 0 {
                    return Err(Error::Illegal(format!("no peg to jump over from {src}")));
                }
                let to = self
                    .jump_target(from, d)
                    .ok_or_else(|| Error::Illegal(format!("jump landing from {src} is blocked or off board")))?;
                if self.jump.visited.contains(to) {
                    return Err(Error::Illegal(format!(
                        "jump from {src} revisits a hole occupied this turn"
                    )));
                }
                self.relocate(from, to);
                self.jump.visited.insert(from);
                self.jump.origins.insert(from);
                self.jump.visited.insert(to);
                self.jump.active = Some(to as u16);
                self.submove_count += 1;
            }
        }
        Ok(())
    }

    fn own_peg_cell(&self, src: CubeCoord) -> Result<usize> {
        let cell = self
            .geo
            .cell(src)
            .ok_or_else(|| Error::Illegal(format!("{src} is not on the board")))?;
        if self.cells[cell] != self.current.0 as i8 {
            return Err(Error::Illegal(format!(
                "{src} does not hold a peg of player {}",
                self.current
            )));
        }
        Ok(cell)
    }

    fn relocate(&mut self, from: usize, to: usize) {
        let p = self.cells[from];
        self.cells[from] = -1;
        self.cells[to] = p;
        let list = &mut self.pegs[p as usize];
        let pos = list.iter().position(|&c| c as usize == from).expect("peg list in sync");
        list[pos] = to as u16;
        list.sort_unstable();
    }

    fn finish_turn(&mut self, mover: PlayerId) {
        self.jump.clear();
        self.turn_count += 1;
        if self.is_winner(mover) {
            self.status = Status::Won(mover);
        } else if self.turn_count >= self.turn_limit {
            self.status = Status::Truncated;
        }
        self.current = mover.next();
    }

    /// Every coordinate rotated `k` steps clockwise, jump context included.
    /// Seats keep their identities; only positions move.
    pub fn rotated(&self, k: i32) -> BoardState {
        let geo = &self.geo;
        let rot = |c: u16| geo.rotate_cell(c as usize, k) as u16;
        let mut out = self.clone();
        out.cells.iter_mut().for_each(|c| *c = -1);
        for p in 0..NUM_PLAYERS {
            out.pegs[p] = self.pegs[p].iter().map(|&c| rot(c)).collect();
            out.pegs[p].sort_unstable();
            for &c in &out.pegs[p] {
                out.cells[c as usize] = p as i8;
            }
        }
        out.jump.clear();
        out.jump.active = self.jump.active.map(rot);
        for c in self.jump.visited.iter() {
            out.jump.visited.insert(rot(c as u16) as usize);
        }
        for c in self.jump.origins.iter() {
            out.jump.origins.insert(rot(c as u16) as usize);
        }
        out
    }
}

/// Number of legal submove sequences of exactly `depth` submoves. Sequences
/// stop early at finished games (a finished game contributes 0 below depth).
pub fn perft(s: &BoardState, depth: u32) -> u64 {
    if depth == 0 {
        return 1;
    }
    let Ok(moves) = s.legal_submoves() else { return 0 };
    if depth == 1 {
        return moves.len() as u64;
    }
    crate::par::map_collect(&moves, |&m| {
        let next = s.apply_submove(m).expect("generated move is legal");
        perft_serial(&next, depth - 1)
    })
    .into_iter()
    .sum()
}

fn perft_serial(s: &BoardState, depth: u32) -> u64 {
    if depth == 0 {
        return 1;
    }
    let Ok(moves) = s.legal_submoves() else { return 0 };
    if depth == 1 {
        return moves.len() as u64;
    }
    let mut total = 0;
    let mut next = s.clone();
    for m in moves {
        next.clone_from(s);
        next.apply_in_place(m).expect("generated move is legal");
        total += perft_serial(&next, depth - 1);
    }
    total
}

//! Naive reference move generator: hash maps and plain coordinate
//! arithmetic, no precomputed tables.

use std::collections::{BTreeSet, HashMap, HashSet};

use checkers_core::env::legal_actions;
use checkers_core::{initial_state, BoardState, CubeCoord, PlayerId, Submove};
use rand::seq::SliceRandom;
use rand::Rng;

pub type Hex = (i32, i32);

pub const DIRS: [Hex; 6] = [(1, 0), (1, -1), (0, -1), (-1, 0), (-1, 1), (0, 1)];

pub fn on_star(n: i32, (q, r): Hex) -> bool {
    let s = -q - r;
    (q <= n && r <= n && s <= n) || (q >= -n && r >= -n && s >= -n)
}

/// (q, r, s) -> (-r, -s, -q), applied `k` times (mod 6).
pub fn cw(c: Hex, k: i32) -> Hex {
    let mut c = c;
    for _ in 0..k.rem_euclid(6) {
        let s = -c.0 - c.1;
        c = (-c.1, -s);
    }
    c
}

pub fn corner(n: i32, p: i32) -> Vec<Hex> {
    let mut v = Vec::new();
    for q in -2 * n..=2 * n {
        for r in -2 * n..=2 * n {
            if on_star(n, (q, r)) && r <= -(n + 1) {
                v.push(cw((q, r), p));
            }
        }
    }
    v.sort();
    v
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Naive {
    Step(Hex, usize),
    Hop(Hex, usize),
    End,
}

#[derive(Clone, Debug)]
pub struct Oracle {
    n: i32,
    board: HashMap<Hex, u8>,
    current: u8,
    active: Option<Hex>,
    visited: HashSet<Hex>,
    won: bool,
}

impl Oracle {
    pub fn start(n: i32, first: u8) -> Self {
        let mut board = HashMap::new();
        for p in 0..6u8 {
            for c in corner(n, p as i32) {
                board.insert(c, p);
            }
        }
        Oracle { n, board, current: first, active: None, visited: HashSet::new(), won: false }
    }

    pub fn from_engine(s: &BoardState) -> Self {
        let mut board = HashMap::new();
        for p in PlayerId::ALL {
            for c in s.pegs(p) {
                board.insert((c.q, c.r), p.index() as u8);
            }
        }
        let geo = s.geometry();
        let visited = s.jump_context().visited().iter().map(|k| geo.coord(k)).map(|c| (c.q, c.r)).collect();
        Oracle {
            n: s.n() as i32,
            board,
            current: s.current().index() as u8,
            active: s.active_peg().map(|c| (c.q, c.r)),
            visited,
            won: false,
        }
    }

    fn empty(&self, c: Hex) -> bool {
        on_star(self.n, c) && !self.board.contains_key(&c)
    }

    pub fn moves(&self) -> BTreeSet<Naive> {
        let mut out = BTreeSet::new();
        let add = |c: Hex, d: Hex| (c.0 + d.0, c.1 + d.1);
        if let Some(a) = self.active {
            for (k, &d) in DIRS.iter().enumerate() {
                let (mid, to) = (add(a, d), add(add(a, d), d));
                if self.board.contains_key(&mid) && self.empty(to) && !self.visited.contains(&to) {
                    out.insert(Naive::Hop(a, k));
                }
            }
            out.insert(Naive::End);
            return out;
        }
        for (&c, &p) in &self.board {
            if p != self.current {
                continue;
            }
            for (k, &d) in DIRS.iter().enumerate() {
                let mid = add(c, d);
                if self.empty(mid) {
                    out.insert(Naive::Step(c, k));
                } else if self.board.contains_key(&mid) && self.empty(add(mid, d)) {
                    out.insert(Naive::Hop(c, k));
                }
            }
        }
        if out.is_empty() {
            out.insert(Naive::End);
        }
        out
    }

    fn end_turn(&mut self) {
        let me = self.current;
        let target = corner(self.n, me as i32 + 3);
        self.won = target.iter().all(|c| self.board.get(c) == Some(&me));
        self.active = None;
        self.visited.clear();
        self.current = (me + 1) % 6;
    }

    pub fn play(&mut self, m: Naive) {
        match m {
            Naive::End => self.end_turn(),
            Naive::Step(c, k) => {
                let p = self.board.remove(&c).unwrap();
                self.board.insert((c.0 + DIRS[k].0, c.1 + DIRS[k].1), p);
                self.end_turn();
            }
            Naive::Hop(c, k) => {
                let p = self.board.remove(&c).unwrap();
                let to = (c.0 + 2 * DIRS[k].0, c.1 + 2 * DIRS[k].1);
                self.board.insert(to, p);
                self.visited.insert(c);
                self.visited.insert(to);
                self.active = Some(to);
            }
        }
    }

    pub fn perft(&self, depth: u32) -> u64 {
        if depth == 0 {
            return 1;
        }
        if self.won {
            return 0;
        }
        self.moves()
            .into_iter()
            .map(|m| {
                let mut next = self.clone();
                next.play(m);
                next.perft(depth - 1)
            })
            .sum()
    }

    /// Action index in the mover's canonical frame.
    pub fn encode(&self, m: Naive) -> usize {
        let side = (4 * self.n + 1) as usize;
        let back = -(self.current as i32);
        let idx = |c: Hex, k: usize, jump: usize| {
            let (q, r) = cw(c, back);
            let d = DIRS.iter().position(|&v| v == cw(DIRS[k], back)).unwrap();
            let (i, j) = ((q + 2 * self.n) as usize, (r + 2 * self.n) as usize);
            ((i * side + j) * 6 + d) * 2 + jump
        };
        match m {
            Naive::Step(c, k) => idx(c, k, 0),
            Naive::Hop(c, k) => idx(c, k, 1),
            Naive::End => side * side * 12,
        }
    }
}

pub fn naive_of(m: &Submove) -> Naive {
    let dir = |d: checkers_core::Direction| {
        let v = d.vector();
        DIRS.iter().position(|&x| x == (v.q, v.r)).unwrap()
    };
    match *m {
        Submove::Move { src, dir: d } => Naive::Step((src.q, src.r), dir(d)),
        Submove::Jump { src, dir: d } => Naive::Hop((src.q, src.r), dir(d)),
        Submove::EndTurn => Naive::End,
    }
}

pub fn engine_moves(s: &BoardState) -> BTreeSet<Naive> {
    s.legal_submoves().unwrap().iter().map(naive_of).collect()
}

/// `None` when the engine and the oracle agree on both the submoves and
/// their canonical action indices.
pub fn disagreement(s: &BoardState) -> Option<String> {
    let o = Oracle::from_engine(s);
    let expect = o.moves();
    let got = engine_moves(s);
    if got != expect {
        return Some(format!("submoves differ: engine {got:?}, oracle {expect:?}"));
    }
    let got: BTreeSet<usize> = legal_actions(s).unwrap().into_iter().map(|a| a as usize).collect();
    let want: BTreeSet<usize> = expect.iter().map(|&m| o.encode(m)).collect();
    (got != want).then(|| format!("action indices differ: engine {got:?}, oracle {want:?}"))
}

/// Random placement of every player's pegs, then a few random submoves so
/// that some states sit mid-jump.
pub fn scattered(n: u32, rng: &mut impl Rng) -> BoardState {
    let cells: Vec<CubeCoord> = checkers_core::hexgrid::board_cells(n);
    let per = (n * (n + 1) / 2) as usize;
    loop {
        let mut pick = cells.clone();
        pick.shuffle(rng);
        let pegs: [Vec<CubeCoord>; 6] = std::array::from_fn(|p| pick[p * per..(p + 1) * per].to_vec());
        let first = PlayerId::new(rng.gen_range(0..6)).unwrap();
        let Ok(mut s) = BoardState::from_pegs(n, 1000, first, pegs) else { continue };
        for _ in 0..rng.gen_range(0..4) {
            if !s.is_running() {
                break;
            }
            let moves = s.legal_submoves().unwrap();
            s.apply_in_place(*moves.choose(rng).unwrap()).unwrap();
        }
        if s.is_running() {
            return s;
        }
    }
}

pub fn played(n: u32, rng: &mut impl Rng) -> BoardState {
    loop {
        let first = PlayerId::new(rng.gen_range(0..6)).unwrap();
        let mut s = initial_state(n, 1000, first).unwrap();
        for _ in 0..rng.gen_range(0..400) {
            if !s.is_running() {
                break;
            }
            let moves = s.legal_submoves().unwrap();
            s.apply_in_place(*moves.choose(rng).unwrap()).unwrap();
        }
        if s.is_running() {
            return s;
        }
    }
}


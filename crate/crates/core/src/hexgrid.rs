//! Cube/axial hex coordinates for the star-shaped board.
//!
//! Screen convention: `q` grows to the right and `r` grows downward, so the
//! six unit directions run counterclockwise starting due-right.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// A lattice position with `q + r + s = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CubeCoord {
    pub q: i32,
    pub r: i32,
    pub s: i32,
}

impl CubeCoord {
    pub const ORIGIN: CubeCoord = CubeCoord { q: 0, r: 0, s: 0 };

    /// Builds a coordinate, rejecting triples off the plane.
    pub fn new(q: i32, r: i32, s: i32) -> Result<Self> {
        if q + r + s != 0 {
            return Err(Error::Range(format!(
                "cube coordinate ({q},{r},{s}) violates q+r+s=0"
            )));
        }
        Ok(CubeCoord { q, r, s })
    }

    /// Builds a coordinate from its axial pair.
    pub const fn axial(q: i32, r: i32) -> Self {
        CubeCoord { q, r, s: -q - r }
    }

    /// Hex (Manhattan-on-cube) distance.
    pub fn distance(self, other: CubeCoord) -> i32 {
        let d = self - other;
        (d.q.abs() + d.r.abs() + d.s.abs()) / 2
    }

    /// Rotates `k` steps of 60° clockwise about the origin. Negative `k`
    /// rotates counterclockwise.
    pub fn rotate60cw(self, k: i32) -> CubeCoord {
        rotate60cw(self, k)
    }
}

impl fmt::Display for CubeCoord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.q, self.r, self.s)
    }
}

impl Add for CubeCoord {
    type Output = CubeCoord;
    fn add(self, o: CubeCoord) -> CubeCoord {
        CubeCoord { q: self.q + o.q, r: self.r + o.r, s: self.s + o.s }
    }
}

impl Sub for CubeCoord {
    type Output = CubeCoord;
    fn sub(self, o: CubeCoord) -> CubeCoord {
        CubeCoord { q: self.q - o.q, r: self.r - o.r, s: self.s - o.s }
    }
}

impl Neg for CubeCoord {
    type Output = CubeCoord;
    fn neg(self) -> CubeCoord {
        CubeCoord { q: -self.q, r: -self.r, s: -self.s }
    }
}

impl Mul<i32> for CubeCoord {
    type Output = CubeCoord;
    fn mul(self, k: i32) -> CubeCoord {
        CubeCoord { q: self.q * k, r: self.r * k, s: self.s * k }
    }
}

/// One of the six unit directions. 0 is due-right, 1 is up-right, and the
/// rest follow counterclockwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Direction(u8);

// Counterclockwise from due-right. Flipping the handedness only needs this table.
const DIRECTION_TABLE: [CubeCoord; 6] = [
    CubeCoord { q: 1, r: 0, s: -1 },
    CubeCoord { q: 1, r: -1, s: 0 },
    CubeCoord { q: 0, r: -1, s: 1 },
    CubeCoord { q: -1, r: 0, s: 1 },
    CubeCoord { q: -1, r: 1, s: 0 },
    CubeCoord { q: 0, r: 1, s: -1 },
];

impl Direction {
    pub const ALL: [Direction; 6] = [
        Direction(0),
        Direction(1),
        Direction(2),
        Direction(3),
        Direction(4),
        Direction(5),
    ];

    pub fn new(d: u8) -> Result<Self> {
        if d < 6 {
            Ok(Direction(d))
        } else {
            Err(Error::Range(format!("direction {d} outside 0..6")))
        }
    }

    pub const fn index(self) -> u8 {
        self.0
    }

    pub fn vector(self) -> CubeCoord {
        direction_vector(self)
    }

    pub fn opposite(self) -> Direction {
        Direction((self.0 + 3) % 6)
    }
}

pub fn direction_vector(d: Direction) -> CubeCoord {
    DIRECTION_TABLE[d.0 as usize]
}

/// `k` clockwise 60° steps: `(q,r,s) -> (-r,-s,-q)` per step.
pub fn rotate60cw(c: CubeCoord, k: i32) -> CubeCoord {
    let mut out = c;
    for _ in 0..k.rem_euclid(6) {
        out = CubeCoord { q: -out.r, r: -out.s, s: -out.q };
    }
    out
}

/// Star membership: the union of the two side-(3N+1) triangles.
pub fn on_board(c: CubeCoord, n: u32) -> bool {
    let n = n as i32;
    (c.q <= n && c.r <= n && c.s <= n) || (c.q >= -n && c.r >= -n && c.s >= -n)
}

/// Number of holes on a size-`n` star.
pub fn cell_count(n: u32) -> usize {
    let n = n as usize;
    6 * n * n + 6 * n + 1
}

/// Side length of the square grid enclosing the board, `4N + 1`.
pub fn grid_side(n: u32) -> usize {
    4 * n as usize + 1
}

/// Row/column position in the `(4N+1) x (4N+1)` grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GridIndex {
    pub i: usize,
    pub j: usize,
}

impl GridIndex {
    /// Row-major flat index.
    pub fn flat(self, n: u32) -> usize {
        self.i * grid_side(n) + self.j
    }
}

pub fn axial_to_grid(c: CubeCoord, n: u32) -> Result<GridIndex> {
    let r = 2 * n as i32;
    if c.q.abs() > r || c.r.abs() > r {
        return Err(Error::Range(format!("{c} outside the grid for N={n}")));
    }
    Ok(GridIndex { i: (c.q + r) as usize, j: (c.r + r) as usize })
}

pub fn grid_to_axial(g: GridIndex, n: u32) -> Result<CubeCoord> {
    let side = grid_side(n);
    if g.i >= side || g.j >= side {
        return Err(Error::Range(format!(
            "grid index ({},{}) outside {side}x{side}",
            g.i, g.j
        )));
    }
    let r = 2 * n as i32;
    Ok(CubeCoord::axial(g.i as i32 - r, g.j as i32 - r))
}

/// Every on-board coordinate for size `n`, in grid row-major order.
pub fn board_cells(n: u32) -> Vec<CubeCoord> {
    let side = grid_side(n);
    (0..side * side)
        .filter_map(|k| {
            let c = grid_to_axial(GridIndex { i: k / side, j: k % side }, n).ok()?;
            on_board(c, n).then_some(c)
        })
        .collect()
}

//! Fixed-width text diagrams of the board in the absolute frame, player 0
//! at the top. Pegs are letters `A`..`F` for players 0..5, empty holes `.`.

use crate::hexgrid::{on_board, CubeCoord};
use crate::rules::{BoardState, Status};

pub fn player_letter(p: usize) -> char {
    (b'A' + p as u8) as char
}

/// Board diagram only: `4N+1` rows, each `8N+1` characters wide.
pub fn board(s: &BoardState) -> String {
    let n = s.n() as i32;
    let width = (8 * n + 1) as usize;
    let mut out = String::new();
    for r in -2 * n..=2 * n {
        let mut row = vec![' '; width];
        for q in -2 * n..=2 * n {
            let c = CubeCoord::axial(q, r);
            if !on_board(c, n as u32) {
                continue;
            }
            let x = (2 * q + r + 4 * n) as usize;
            row[x] = match s.occupant(c) {
                Some(p) => player_letter(p.index()),
                None => '.',
            };
        }
        out.extend(row);
        out.push('\n');
    }
    out
}

/// Status line followed by the diagram.
pub fn frame(s: &BoardState) -> String {
    let status = match s.status() {
        Status::Running => format!("to move {}", player_letter(s.current().index())),
        Status::Won(w) => format!("won by {}", player_letter(w.index())),
        Status::Truncated => "truncated".to_string(),
    };
    let active = s.active_peg().map(|c| format!(" jumping {c}")).unwrap_or_default();
    format!("turn {} submove {} {status}{active}\n{}", s.turn_count(), s.submove_count(), board(s))
}

//! Six-player Chinese Checkers engine with multi-agent PPO self-play.
//!
//! The crate is layered bottom-up: [`hexgrid`] coordinates, [`rules`] for
//! legality, [`env`] for the agent-facing encoding and stepping, [`nn`] and
//! [`ppo`] for learning, [`agents`] and [`eval`] for play and measurement.

pub mod agents;
pub mod checkpoint;
pub mod env;
pub mod error;
pub mod eval;
pub mod gamelog;
pub mod hexgrid;
pub mod nn;
pub mod par;
pub mod ppo;
pub mod protocol;
pub mod render;
pub mod rules;
pub mod seeding;

pub use error::{Error, Result};
pub use hexgrid::{CubeCoord, Direction, GridIndex};
pub use rules::{initial_state, BoardState, PlayerId, Status, Submove};

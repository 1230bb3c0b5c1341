//! The three cooperative games.
//!
//! Each module owns its instance type, its optimal-dual "Owen" imputations,
//! leximin/leximax computation, and membership checking. Imputations are
//! plain share vectors indexed by the game's agent order (edge ids for the
//! flow game, non-root vertices for the branching game, `U` then `V`
//! vertices for the matching game); naming is the CLI's business.

pub mod bmatching;
pub mod branching;
pub mod maxflow;

use crate::rational::Rational;

/// A division of the grand coalition's worth among the agents.
pub type Imputation = Vec<Rational>;

//! Equitable profit and cost sharing for three cooperative games built on
//! combinatorial optimization: the max-flow game, the min-cost branching
//! (and MST) game, and the max-weight bipartite b-matching game.
//!
//! Arbitrary core imputations of these games can be grossly unfair to
//! individual agents. This crate computes the *Owen set* imputations — core
//! points induced by optimal dual LP solutions — and, within the Owen set,
//! the unique leximin and leximax (equitable) imputations. Everything runs
//! in exact rational arithmetic; feasibility, optimality, and imputation
//! sums are checked as exact equalities.
//!
//! Layout:
//! - [`rational`]: the exact scalar type and helpers.
//! - [`graph`]: directed multigraph kernel (max-flow, residual graphs, SCC
//!   condensation, DAG longest paths).
//! - [`lp`]: exact-rational simplex with primal and dual certificates, plus
//!   constraint generation against separation oracles.
//! - [`leximin`]: the generic iterative leximin/leximax engine over the
//!   optimal face of an LP.
//! - [`games`]: the three game modules.
//! - [`verify`]: brute-force coalition oracles and seeded instance
//!   generators for desk-scale validation.


pub mod graph;
pub mod verify;
pub mod leximin;
pub mod lp;
pub mod games;
pub mod rational;


pub use rational::Rational;

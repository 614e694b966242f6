//! Synthetic inequality theorems over ordered fields.
//!
//! The crate is organised bottom-up:
//!
//! * [`expr`]: entities, statements, canonical text form, node addressing;
//! * [`axioms`]: the eighteen-axiom calculus with rewrite and extension rules;
//! * [`kernel`]: proof states, step semantics and proof verification;
//! * [`generator`]: theorem generation with exact-length proofs, and the
//!   generalization splits built on it;
//! * [`env`]: the step-limited theorem-proving MDP;
//! * [`search`]: PUCT Monte-Carlo tree search over the axiom space;
//! * [`io`]: JSONL datasets, statistics and the NDJSON environment server;
//! * [`numeric`]: exact-rational spot checks of generated theorems.

pub mod axioms;
pub mod env;
pub mod expr;
pub mod generator;
pub mod io;
pub mod kernel;
pub mod numeric;
pub mod search;

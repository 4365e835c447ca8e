//! Topology of directed graphs and finite-state automata, unionless
//! Kleene expressions, and finite semigroup expansions.
//!
//! The crate revolves around rooted graphs with the unique simple path
//! property: graphs whose every vertex is the target of exactly one
//! simple path from the root.  [`digraph`] provides the graph layer
//! (strong components, frames, linearity, coverings), [`uspp`] the
//! property itself with bold arrows, cutting and closure, and
//! [`mccammond`] the universal simple cover that forces the property.
//! [`kleene`] synthesizes union-free expressions for trim acceptors
//! with the property.  On the algebraic side, [`semigroup`] handles
//! finite A-semigroups (Green's relations, straightline and Cayley
//! automata, stabilizers, algebraic rank) and [`expansion`] the derived
//! expansions: Karnofsky-Rhodes, Rhodes, Birget-Rhodes and a bounded
//! Mal'cev engine.

pub mod automaton;
pub mod congruence;
pub mod digraph;
pub mod gen;
pub mod io;
pub mod kleene;
pub mod mccammond;
pub mod semigroup;
pub mod uspp;
pub mod verify;
pub mod words;

pub mod expansion;

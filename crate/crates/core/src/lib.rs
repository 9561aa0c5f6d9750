//! Finite Kripke frames for tense logic.
//!
//! The crate covers frame construction and structural parameters, tense
//! formulas and their semantics, t-morphisms and their bounded variants,
//! Jankov formulas, pre-skeletons and c-irreducibility, the generalized
//! Thue-Morse sequences and the umbrella frames built from them, and
//! enumeration of small closed frames up to isomorphism.

pub mod catalog;
pub mod classify;
pub mod enumeration;
pub mod formulas;
pub mod frames;
pub mod io;
pub mod jankov;
pub mod morphisms;
pub mod papercheck;
pub mod semantics;
pub mod sequences;
pub mod umbrella;

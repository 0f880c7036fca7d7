//! Executable clubs in `Cat`.
//!
//! Finite categories and diagrams in `Cat`, the semi-direct product of
//! diagrams with its monoidal coherence data, operads encoded as clubs, and
//! the club structure on truncated simplicial sets given by diagonals of
//! bisimplicial sets.

pub mod error;
pub mod algebra;
pub mod diagram;
pub mod fincat;
pub mod fixtures;
pub mod io;
pub mod operads;
pub mod semidirect;
pub mod simpset;
pub mod sset_club;
pub mod suite;

pub use error::{Error, Result};

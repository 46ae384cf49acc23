//! Nilpotent Lie rings of small coexponent over prime-power residues, their
//! census, and the passage to finite p-groups through a truncated BCH law.

pub mod bch;
pub mod census;
pub mod construct;
pub mod derivation;
pub mod equivalence;
pub mod error;
pub mod extremal;
pub mod free;
pub mod graded;
pub mod group;
pub mod lazard;
pub mod liering;
pub mod persist;
pub mod residue;
pub mod search;
pub mod smith;
pub mod subgroup;
pub mod verify;

pub use error::{Error, Result};

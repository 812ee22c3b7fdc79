//! Toggling-frame analysis of piecewise rotation sequences.
//!
//! Sequences of rotations `(β_i, e_i)` are mapped to their toggling frames,
//! checked for cyclicity, expanded into error terms, simulated as
//! dynamical-decoupling blocks and searched for over discrete axis sets.

pub mod averaging;
pub mod catalog;
pub mod ddsim;
pub mod error;
pub mod par;
pub mod profiles;
pub mod rotcore;
pub mod search;
pub mod seqmodel;
pub mod toggling;
pub mod verify;
pub mod virtualmas;

pub use error::{Error, Result};
pub use par::Exec;
pub use rotcore::{compose, Rotation, RotationVector, UnitVector3};
pub use seqmodel::{nest, PulseElement, RotationSequence};

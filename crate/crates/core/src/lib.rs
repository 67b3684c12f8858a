//! 2D finite-element fluid-structure interaction on a channel with elastic
//! leaflets: a semi-implicit partitioned solver (Chorin-Temam projection with
//! Robin interface coupling in an ALE frame) plus the projection-based
//! reduced-order pipeline built on top of it (snapshots, nested POD,
//! harmonically extended displacement bases, online Galerkin loop).

pub mod ale;
pub mod error;
pub mod fem;
pub mod io;
pub mod la2;
pub mod mesh;
pub mod offline;
pub mod online;
pub mod pod;
pub mod sparse;

pub use error::{Error, Result};

//! Decoders for surface-code memories and logical Clifford circuits built from
//! fold-transversal gates.

pub mod circuit;
pub mod dem;
pub mod detectors;
pub mod encode;
pub mod error;
pub mod f2;
pub mod harness;
pub mod layout;
pub mod lom;
pub mod matching;
pub mod pauli;
pub mod tableau;
pub mod window;

pub use error::{Error, Result};

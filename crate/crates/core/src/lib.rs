//! Immersed Nedelec finite elements for 2D H(curl)-elliptic interface problems.

pub mod analysis;
pub mod assembly;
pub mod config;
pub mod diagnostics;
pub mod error;
pub mod ife;
pub mod interface;
pub mod mesh;
pub mod nedelec;
pub mod quadrature;
pub mod solve;
pub mod sparse;
pub mod study;

pub use error::{Error, Result};

//! Sequential sharing of entanglement witnesses between independent
//! observers using unsharp measurements in mutually unbiased bases.

pub mod analytic;
pub mod cli;
pub mod error;
pub mod figure;
pub mod linalg;
pub mod mub;
pub mod oracle;
pub mod pointer;
pub mod scenario;
pub mod solver;
pub mod verify;

pub use error::{Error, Result};
pub use pointer::{PointerKind, PointerModel, QualityCurve};
pub use scenario::{Observable, Scenario};

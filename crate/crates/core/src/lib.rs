//! Numerical laboratory for s-numbers of finite matrices, H-operator
//! certification, sequence-space quasi-norms, real interpolation and
//! dyadic operator representations.

pub mod battery;
pub mod corpus;
pub mod error;
pub mod exec;
pub mod hop;
pub mod interp;
pub mod io;
pub mod lethargy;
pub mod operators;
pub mod report;
pub mod represent;
pub mod search;
pub mod seqspace;
pub mod snumbers;

pub use error::{Error, Result};
pub use exec::Exec;

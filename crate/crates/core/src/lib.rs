#[cfg(doctest)]
#[doc = include_str!("../../../README.md")]
struct ReadmeDoctests;

pub mod barrier;
pub mod baselines;
pub mod error;
pub mod harness;
pub mod kkt;
pub mod model;
pub mod outer;
pub mod stationarity;
pub mod subsolver;
pub mod suite;

pub use error::{Error, Result};
pub use model::{Matrix, NlpProblem, Vector};
pub use outer::{regip_solve, RegipConfig, SolveReport, SolveStatus};
pub use suite::{get_problem, list_problems, ProblemRecord, Tag};

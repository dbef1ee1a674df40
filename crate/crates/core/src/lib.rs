//! Optimal timesharing over parallel unreliable links.
//!
//! A sender splits prioritized messages across several links that each fail
//! outright with a known probability. This crate evaluates inter-link erasure
//! codes exactly over small prime fields, abstracts them as matroid rank
//! functions, enumerates candidate codes and rank functions, and solves the
//! timesharing linear program that maximizes expected recovered worth.
//!
//! The probability/payoff/LP lane is generic over the floating scalar via
//! [`real::Real`]; `f64` is the default everywhere and the aliases below pin
//! the common instantiations.

pub mod code;
pub mod experiments;
pub mod gf;
pub mod lp;
pub mod matroid;
pub mod model;
pub mod real;

pub use code::{Code, CodeSymbol, PortionId};
pub use gf::FieldOrder;
pub use lp::{build_17_code_library, build_lp, solve_lp, CodeLibrary};
pub use matroid::{enumerate_rank_functions, GroundSet, RankFunction};
pub use model::{LinkSpec, MessageSpec, Scenario, UpSet};
pub use real::Real;

/// Double-precision instantiations (the defaults).
pub type Scenario64 = model::Scenario<f64>;
pub type LpProblem64 = lp::LpProblem<f64>;
pub type LpSolution64 = lp::LpSolution<f64>;

/// Single-precision instantiations.
pub type Scenario32 = model::Scenario<f32>;
pub type LpProblem32 = lp::LpProblem<f32>;
pub type LpSolution32 = lp::LpSolution<f32>;

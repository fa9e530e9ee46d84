//! Phase-space solvers for the one-dimensional Wigner–Poisson system.
//!
//! Two time integrators share the same building blocks: a full-rank solver
//! on dense `Nx × Nv` matrices and an adaptive-rank solver that keeps the
//! solution as `U Σ Vᵀ` and rebuilds it every stage by cross approximation.

pub mod advection;
pub mod config;
pub mod diagnostics;
pub mod distribution;
pub mod error;
pub mod grid;
pub mod io;
pub mod lowrank;
pub mod poisson;
pub mod solver;
pub mod wigner;

pub use distribution::DistributionMatrix;
pub use error::{Result, WignerError};
pub use grid::PhaseSpaceGrid;
pub use lowrank::LowRankFactors;
pub use solver::{Mode, Problem, Simulation, SolverConfig, TimeStep};

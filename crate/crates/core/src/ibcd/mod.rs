//! Inexact block coordinate descent on the weighted-MMSE reformulation of
//! the secrecy-rate problem, for any number of streams.
//!
//! Each iteration refreshes the receive filter `U` and the weights
//! `W_I`, `W_E` in closed form, then updates `V` by solving a convex
//! quadratic program in which the harvesting constraint is linearized at the
//! current point. The linearization is a lower bound on the true harvested
//! power, so every iterate stays feasible and the rate never decreases.

mod aux;
mod kkt;
mod solve;
mod subproblem;
mod trace;
mod warm;

pub use aux::{mmse_matrix, objective_f, update_aux, AuxVars};
pub use kkt::kkt_residual;
pub use solve::{ibcd_solve, IbcdOptions, DEFAULT_EPS};
pub use subproblem::{solve_linearized_subproblem, LinearizedSubproblem, SubproblemSolution};
pub use trace::ConvergenceTrace;
pub use warm::{fallback_start, naive_start, warmstart, WARM_DRAWS};

pub(crate) use solve::check_feasible_start;
pub(crate) use subproblem::{BlockQp, QpBlock};

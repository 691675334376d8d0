//! Joint design of the information beamformer `V` and an artificial-noise
//! factor `V_E` (noise covariance `Z = V_E V_E^H`).
//!
//! The secrecy rate with noise splits into three log-determinants, each of
//! which has a weighted-MMSE variational form. The descent alternates
//! closed-form updates of the five auxiliaries with a two-block convex QP in
//! `(V, V_E)` under the linearized harvesting constraint, so it inherits the
//! monotonicity and feasibility guarantees of [`crate::ibcd`].

mod aux;
mod solve;
mod subproblem;

pub use aux::{an_objective, an_update_aux, mmse_e1, mmse_e2, AnAuxVars};
pub use solve::{an_ibcd_solve, an_warmstart, AnState};
pub use subproblem::{an_solve_subproblem, AnLinearizedSubproblem, AnSubproblemSolution};

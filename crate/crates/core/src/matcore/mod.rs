//! Dense complex-Hermitian linear algebra kernels.
//!
//! Everything here is a pure function of its inputs. Matrices claimed to be
//! Hermitian are symmetrized before they are factored.

mod eig;
mod factor;
mod matrix;

pub use eig::{eig_extremes, hermitian_eig, is_psd, HermitianEig, RANK_TOL};
pub use factor::{inverse_hpd, logdet_hpd, min_rayleigh_vec, solve_general, solve_hpd, Cholesky, Lu};
pub use matrix::ComplexMatrix;

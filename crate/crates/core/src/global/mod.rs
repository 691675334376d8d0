//! Globally optimal designs for two special cases: a single data stream,
//! and `d = N_T` streams when `F = H_I^H H_I - H_E^H H_E` is PSD.

mod barrier;
mod full;
mod identity;
mod single;

pub use full::{solve_full_stream, FullStreamSolution};
pub use identity::{concave_form_identity_check, gram_difference_is_psd, lmi_block, schur_residual};
pub use single::{solve_single_stream, solve_single_stream_sdr, Branch, SingleStreamSolution};

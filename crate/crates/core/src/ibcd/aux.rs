use crate::error::Result;
use crate::matcore::{inverse_hpd, logdet_hpd, solve_hpd, ComplexMatrix};
use crate::model::ChannelPair;
use crate::scalar::Real;

/// Receive filter and weights paired with a beamformer.
#[derive(Clone, Debug)]
pub struct AuxVars<T> {
    /// `N_I x d` MMSE receiver.
    pub u: ComplexMatrix<T>,
    /// `d x d`.
    pub w_i: ComplexMatrix<T>,
    /// `N_E x N_E`.
    pub w_e: ComplexMatrix<T>,
}

/// Closed-form optimal `U`, `W_I`, `W_E` for a fixed `V`.
///
/// `W_I = I + V^H H_I^H H_I V` is the inverse of the MMSE matrix at the
/// optimal `U`.
pub fn update_aux<T: Real>(ch: &ChannelPair<T>, v: &ComplexMatrix<T>) -> Result<AuxVars<T>> {
    ch.check_tx_rows(v, "V")?;
    v.ensure_finite("V")?;
    let hiv = ch.h_i().matmul(v);
    let n_i = hiv.outer_gram().add_scaled_identity(T::one());
    let u = solve_hpd(&n_i, &hiv)?;
    let w_i = hiv.gram().add_scaled_identity(T::one());
    let hev = ch.h_e().matmul(v);
    let w_e = inverse_hpd(&hev.outer_gram().add_scaled_identity(T::one()))?;
    Ok(AuxVars { u, w_i, w_e })
}

/// `(I - U^H H_I V)(I - U^H H_I V)^H + U^H U`.
pub fn mmse_matrix<T: Real>(ch: &ChannelPair<T>, u: &ComplexMatrix<T>, v: &ComplexMatrix<T>) -> ComplexMatrix<T> {
    let d = v.cols();
    let e = ComplexMatrix::identity(d) - u.adjoint().matmul(&ch.h_i().matmul(v));
    let mut m = &e.outer_gram() + &u.gram();
    m.force_hermitian();
    m
}

/// Weighted-MMSE objective in nats; equals the secrecy rate when the
/// auxiliaries come from [`update_aux`].
pub fn objective_f<T: Real>(ch: &ChannelPair<T>, v: &ComplexMatrix<T>, aux: &AuxVars<T>) -> Result<T> {
    ch.check_tx_rows(v, "V")?;
    let d = v.cols();
    let e = mmse_matrix(ch, &aux.u, v);
    let n_e = ch.h_e().congruence(&v.outer_gram()).add_scaled_identity(T::one());
    Ok(
        logdet_hpd(&aux.w_i)? - aux.w_i.trace_mul(&e).re + T::from_usize_lossy(d) + logdet_hpd(&aux.w_e)?
            - aux.w_e.trace_mul(&n_e).re
            + T::from_usize_lossy(ch.n_e()),
    )
}

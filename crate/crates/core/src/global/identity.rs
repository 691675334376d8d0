use crate::error::{Error, Result};
use crate::matcore::{eig_extremes, hermitian_eig, logdet_hpd, solve_general, solve_hpd, ComplexMatrix};
use crate::model::{log_det_gain, ChannelPair};
use crate::scalar::Real;

/// `lambda_min(F) >= -1e-9 lambda_max(F)` for `F = H_I^H H_I - H_E^H H_E`.
pub fn gram_difference_is_psd<T: Real>(ch: &ChannelPair<T>) -> Result<bool> {
    let (lo, hi) = eig_extremes(&ch.gram_difference())?;
    Ok(lo >= -T::lit(1e-9) * hi.abs())
}

/// `X - Y - X H_E^H (I + H_E X H_E^H)^{-1} H_E X`.
pub fn schur_residual<T: Real>(
    ch: &ChannelPair<T>,
    x: &ComplexMatrix<T>,
    y: &ComplexMatrix<T>,
) -> Result<ComplexMatrix<T>> {
    let mut r = &reduced_inverse_form(ch, x)? - y;
    r.force_hermitian();
    Ok(r)
}

/// The block matrix `[[X - Y, X H_E^H], [H_E X, I + H_E X H_E^H]]`; it is
/// PSD exactly when [`schur_residual`] is.
pub fn lmi_block<T: Real>(ch: &ChannelPair<T>, x: &ComplexMatrix<T>, y: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
    ch.check_tx_rows(x, "X")?;
    ch.check_tx_rows(y, "Y")?;
    let n = ch.n_t();
    let ne = ch.n_e();
    let he = ch.h_e();
    let hex = he.matmul(x);
    let mut out = ComplexMatrix::zeros(n + ne, n + ne);
    out.set_block(0, 0, &(x - y));
    out.set_block(0, n, &hex.adjoint());
    out.set_block(n, 0, &hex);
    out.set_block(n, n, &he.congruence(x).add_scaled_identity(T::one()));
    out.force_hermitian();
    Ok(out)
}

/// `X - X H_E^H (I + H_E X H_E^H)^{-1} H_E X`.
fn reduced_inverse_form<T: Real>(ch: &ChannelPair<T>, x: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
    let he = ch.h_e();
    let hex = he.matmul(x);
    let n_mat = he.congruence(x).add_scaled_identity(T::one());
    let mut r = x - &hex.adjoint().matmul(&solve_hpd(&n_mat, &hex)?);
    r.force_hermitian();
    Ok(r)
}

/// Numerically checks the two matrix identities behind the concave
/// reformulation of the full-stream problem at `X`:
///
/// * `phi(X) = log det(I + F^{1/2} (I + X K)^{-1} X F^{1/2})`, `K = H_E^H H_E`;
/// * `(I + X K)^{-1} X = X - X H_E^H (I + H_E X H_E^H)^{-1} H_E X`.
///
/// Returns the larger of the absolute rate deviation (nats) and the
/// max-entry deviation of the second identity relative to `max(1, |Y|)`.
pub fn concave_form_identity_check<T: Real>(ch: &ChannelPair<T>, x: &ComplexMatrix<T>) -> Result<T> {
    ch.check_tx_rows(x, "X")?;
    if !gram_difference_is_psd(ch)? {
        return Err(Error::Precondition(
            "H_I^H H_I - H_E^H H_E is not positive semidefinite".into(),
        ));
    }
    let n = ch.n_t();
    let phi = log_det_gain(ch.h_i(), x)? - log_det_gain(ch.h_e(), x)?;
    let lhs = ComplexMatrix::identity(n) + x.matmul(ch.gram_e());
    let mut y1 = solve_general(&lhs, x)?;
    y1.force_hermitian();
    let y2 = reduced_inverse_form(ch, x)?;
    let f_half = hermitian_eig(&ch.gram_difference())?.psd_sqrt();
    let concave = logdet_hpd(&f_half.congruence(&y1).add_scaled_identity(T::one()))?;
    let rate_dev = (phi - concave).abs();
    let inv_dev = (&y1 - &y2).max_abs() / T::one().max(y2.max_abs());
    Ok(rate_dev.max(inv_dev))
}

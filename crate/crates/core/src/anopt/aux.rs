use crate::error::Result;
use crate::matcore::{inverse_hpd, logdet_hpd, solve_hpd, ComplexMatrix};
use crate::model::ChannelPair;
use crate::scalar::Real;

/// Receive filters and weights for the three log-det terms.
#[derive(Clone, Debug)]
pub struct AnAuxVars<T> {
    /// `N_I x d`, MMSE receiver of the IR in noise `I + H_I Z H_I^H`.
    pub u1: ComplexMatrix<T>,
    /// `N_E x N_T`, MMSE receiver of the noise signal at the ER.
    pub u2: ComplexMatrix<T>,
    /// `d x d`.
    pub w1: ComplexMatrix<T>,
    /// `N_T x N_T`.
    pub w2: ComplexMatrix<T>,
    /// `N_E x N_E`.
    pub w3: ComplexMatrix<T>,
}

/// `(I - U_1^H H_I V)(I - U_1^H H_I V)^H + U_1^H (I + H_I Z H_I^H) U_1`.
pub fn mmse_e1<T: Real>(
    ch: &ChannelPair<T>,
    u1: &ComplexMatrix<T>,
    v: &ComplexMatrix<T>,
    v_e: &ComplexMatrix<T>,
) -> ComplexMatrix<T> {
    let d = v.cols();
    let e = ComplexMatrix::identity(d) - u1.adjoint().matmul(&ch.h_i().matmul(v));
    let noise = ch.h_i().matmul(v_e).outer_gram().add_scaled_identity(T::one());
    let mut m = &e.outer_gram() + &u1.adjoint().congruence(&noise);
    m.force_hermitian();
    m
}

/// `(I - U_2^H H_E V_E)(I - U_2^H H_E V_E)^H + U_2^H U_2`.
pub fn mmse_e2<T: Real>(ch: &ChannelPair<T>, u2: &ComplexMatrix<T>, v_e: &ComplexMatrix<T>) -> ComplexMatrix<T> {
    let n = v_e.cols();
    let e = ComplexMatrix::identity(n) - u2.adjoint().matmul(&ch.h_e().matmul(v_e));
    let mut m = &e.outer_gram() + &u2.gram();
    m.force_hermitian();
    m
}

/// Closed-form maximizers of the variational objective at fixed `(V, V_E)`.
///
/// The weights use the MMSE identities `W_1 = I + V^H H_I^H N^{-1} H_I V`
/// (with `N = I + H_I Z H_I^H`) and `W_2 = I + V_E^H H_E^H H_E V_E`, which
/// equal `E_1^{-1}` and `E_2^{-1}` at the optimal receivers.
pub fn an_update_aux<T: Real>(
    ch: &ChannelPair<T>,
    v: &ComplexMatrix<T>,
    v_e: &ComplexMatrix<T>,
) -> Result<AnAuxVars<T>> {
    ch.check_tx_rows(v, "V")?;
    ch.check_tx_rows(v_e, "V_E")?;
    v.ensure_finite("V")?;
    v_e.ensure_finite("V_E")?;

    let hiv = ch.h_i().matmul(v);
    let noise_i = ch.h_i().matmul(v_e).outer_gram().add_scaled_identity(T::one());
    let u1 = solve_hpd(&(&noise_i + &hiv.outer_gram()), &hiv)?;
    let mut w1 = hiv
        .adjoint()
        .matmul(&solve_hpd(&noise_i, &hiv)?)
        .add_scaled_identity(T::one());
    w1.force_hermitian();

    let heve = ch.h_e().matmul(v_e);
    let noise_e = heve.outer_gram().add_scaled_identity(T::one());
    let u2 = solve_hpd(&noise_e, &heve)?;
    let w2 = heve.gram().add_scaled_identity(T::one());

    let hev = ch.h_e().matmul(v);
    let w3 = inverse_hpd(&(&noise_e + &hev.outer_gram()))?;
    Ok(AnAuxVars { u1, u2, w1, w2, w3 })
}

/// Variational objective in nats. It equals the secrecy rate with noise
/// when the auxiliaries come from [`an_update_aux`] and is smaller for any
/// other choice.
pub fn an_objective<T: Real>(
    ch: &ChannelPair<T>,
    v: &ComplexMatrix<T>,
    v_e: &ComplexMatrix<T>,
    aux: &AnAuxVars<T>,
) -> Result<T> {
    ch.check_tx_rows(v, "V")?;
    ch.check_tx_rows(v_e, "V_E")?;
    let f1 = logdet_hpd(&aux.w1)? - aux.w1.trace_mul(&mmse_e1(ch, &aux.u1, v, v_e)).re + T::from_usize_lossy(v.cols());
    let f2 = logdet_hpd(&aux.w2)? - aux.w2.trace_mul(&mmse_e2(ch, &aux.u2, v_e)).re + T::from_usize_lossy(v_e.cols());
    let cov = &v.outer_gram() + &v_e.outer_gram();
    let n3 = ch.h_e().congruence(&cov).add_scaled_identity(T::one());
    let f3 = logdet_hpd(&aux.w3)? - aux.w3.trace_mul(&n3).re + T::from_usize_lossy(ch.n_e());
    Ok(f1 + f2 + f3)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ibcd::{objective_f, update_aux};
    use crate::model::an_secrecy_rate_nats;
    use num_complex::Complex;

    type M = ComplexMatrix<f64>;

    fn channel() -> ChannelPair<f64> {
        let hi = M::from_fn(2, 3, |i, j| {
            Complex::new(1.0 + i as f64 - 0.5 * j as f64, 0.3 * (i + j) as f64)
        });
        let he = M::from_fn(2, 3, |i, j| Complex::new(0.4 * j as f64 - 0.2, 0.7 - 0.3 * i as f64));
        ChannelPair::new(hi, he, 1.0, 1.0, 0.5).unwrap()
    }

    fn point() -> (M, M) {
        let v = M::from_fn(3, 2, |i, j| Complex::new(0.3 * i as f64 - 0.1, 0.2 * j as f64 + 0.05));
        let v_e = M::from_fn(3, 3, |i, j| {
            Complex::new(0.1 * (i as f64 - j as f64), 0.05 * (i + 2 * j) as f64)
        });
        (v, v_e)
    }

    #[test]
    fn zero_point_gives_identity_weights() {
        let ch = channel();
        let aux = an_update_aux(&ch, &M::zeros(3, 2), &M::zeros(3, 3)).unwrap();
        assert_eq!(aux.u1, M::zeros(2, 2));
        assert_eq!(aux.u2, M::zeros(2, 3));
        assert_eq!(aux.w1, M::identity(2));
        assert_eq!(aux.w2, M::identity(3));
        assert_eq!(aux.w3, M::identity(2));
    }

    #[test]
    fn objective_matches_rate_and_weights_invert_mmse() {
        let ch = channel();
        let (v, v_e) = point();
        let aux = an_update_aux(&ch, &v, &v_e).unwrap();
        let f = an_objective(&ch, &v, &v_e, &aux).unwrap();
        let c = an_secrecy_rate_nats(&ch, &v, &v_e.outer_gram()).unwrap();
        assert!((f - c).abs() < 1e-12, "{f} vs {c}");
        let p1 = aux.w1.matmul(&mmse_e1(&ch, &aux.u1, &v, &v_e));
        assert!((&p1 - &M::identity(2)).fro_norm() < 1e-12);
        let p2 = aux.w2.matmul(&mmse_e2(&ch, &aux.u2, &v_e));
        assert!((&p2 - &M::identity(3)).fro_norm() < 1e-12);
    }

    #[test]
    fn reduces_to_plain_objective_without_noise() {
        let ch = channel();
        let (v, _) = point();
        let z = M::zeros(3, 3);
        let aux = an_update_aux(&ch, &v, &z).unwrap();
        let plain = update_aux(&ch, &v).unwrap();
        assert!((&aux.u1 - &plain.u).fro_norm() < 1e-14);
        assert!((&aux.w1 - &plain.w_i).fro_norm() < 1e-14);
        assert!((&aux.w3 - &plain.w_e).fro_norm() < 1e-14);
        let f2 = logdet_hpd(&aux.w2).unwrap() - aux.w2.trace_mul(&mmse_e2(&ch, &aux.u2, &z)).re + 3.0;
        assert_eq!(f2, 0.0);
        let f = an_objective(&ch, &v, &z, &aux).unwrap();
        assert!((f - objective_f(&ch, &v, &plain).unwrap()).abs() < 1e-13);
    }

    #[test]
    fn perturbing_any_weight_lowers_objective() {
        let ch = channel();
        let (v, v_e) = point();
        let aux = an_update_aux(&ch, &v, &v_e).unwrap();
        let best = an_objective(&ch, &v, &v_e, &aux).unwrap();
        for k in 0..5 {
            for s in [-0.05, 0.05] {
                let mut a = aux.clone();
                let w = match k {
                    0 => &mut a.w1,
                    1 => &mut a.w2,
                    2 => &mut a.w3,
                    3 => &mut a.u1,
                    _ => &mut a.u2,
                };
                let n = w.cols().min(w.rows());
                for i in 0..n {
                    w[(i, i)].re += s * (1.0 + i as f64);
                }
                let f = an_objective(&ch, &v, &v_e, &a).unwrap();
                assert!(f < best, "block {k} step {s}: {f} >= {best}");
            }
        }
    }
}

use crate::error::{Error, Result};
use crate::matcore::{eig_extremes, logdet_hpd, ComplexMatrix};
use crate::scalar::Real;

use super::{AnBeamformer, Beamformer, ChannelPair, DesignBudget};

/// Nats to bits: `x / ln 2`.
pub fn nats_to_bits<T: Real>(nats: T) -> T {
    nats / T::LN_2()
}

/// `log det(I + H Cov H^H)` in nats.
pub fn log_det_gain<T: Real>(h: &ComplexMatrix<T>, cov: &ComplexMatrix<T>) -> Result<T> {
    if cov.shape() != (h.cols(), h.cols()) {
        return Err(Error::Dimension(format!(
            "covariance is {}x{}, channel has {} columns",
            cov.rows(),
            cov.cols(),
            h.cols()
        )));
    }
    logdet_hpd(&h.congruence(cov).add_scaled_identity(T::one()))
}

/// Secrecy rate of `V` in nats (may be negative).
pub fn secrecy_rate_nats<T: Real>(ch: &ChannelPair<T>, v: &ComplexMatrix<T>) -> Result<T> {
    ch.check_tx_rows(v, "V")?;
    let cov = v.outer_gram();
    Ok(log_det_gain(ch.h_i(), &cov)? - log_det_gain(ch.h_e(), &cov)?)
}

/// Secrecy rate in bits per channel use.
pub fn secrecy_rate<T: Real>(ch: &ChannelPair<T>, bf: &Beamformer<T>) -> Result<T> {
    secrecy_rate_nats(ch, bf.v()).map(nats_to_bits)
}

/// Secrecy rate with artificial noise covariance `z`, nats.
pub fn an_secrecy_rate_nats<T: Real>(ch: &ChannelPair<T>, v: &ComplexMatrix<T>, z: &ComplexMatrix<T>) -> Result<T> {
    ch.check_tx_rows(v, "V")?;
    ch.check_tx_rows(z, "Z")?;
    let s = v.outer_gram();
    let term = |h: &ComplexMatrix<T>| -> Result<T> {
        let noise = h.congruence(z).add_scaled_identity(T::one());
        let total = &noise + &h.congruence(&s);
        Ok(logdet_hpd(&total)? - logdet_hpd(&noise)?)
    };
    Ok(term(ch.h_i())? - term(ch.h_e())?)
}

pub fn an_secrecy_rate<T: Real>(ch: &ChannelPair<T>, bf: &AnBeamformer<T>) -> Result<T> {
    an_secrecy_rate_nats(ch, bf.v(), &bf.noise_covariance()).map(nats_to_bits)
}

/// Power collected at the energy receiver, watts.
pub fn harvested_power<T: Real>(ch: &ChannelPair<T>, cov: &ComplexMatrix<T>) -> Result<T> {
    ch.check_tx_rows(cov, "covariance")?;
    if !cov.is_square() {
        return Err(Error::Dimension("covariance must be square".into()));
    }
    Ok(ch.zeta() * ch.sigma2_e() * ch.gram_e().trace_mul(cov).re)
}

/// Outcome of the feasibility test; `margin` is in watts.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Feasibility<T> {
    pub feasible: bool,
    pub margin: T,
}

impl<T: Real> Feasibility<T> {
    pub fn into_result(self) -> Result<()> {
        if self.feasible {
            Ok(())
        } else {
            Err(Error::Infeasible {
                margin: self.margin.as_f64(),
            })
        }
    }
}

/// The problem is feasible iff beaming all power along the strongest ER
/// eigenmode meets the harvesting target.
pub fn feasibility<T: Real>(ch: &ChannelPair<T>, budget: &DesignBudget<T>) -> Feasibility<T> {
    let lmax = eig_extremes(ch.gram_e())
        .map(|(_, hi)| hi)
        .unwrap_or_else(|_| T::zero());
    let margin = ch.zeta() * ch.sigma2_e() * budget.p_t * lmax - budget.p_e;
    Feasibility {
        feasible: margin >= T::zero(),
        margin,
    }
}

/// True when every transmit direction at full power meets the target.
pub fn eh_vacuous<T: Real>(ch: &ChannelPair<T>, budget: &DesignBudget<T>) -> bool {
    let lmin = eig_extremes(ch.gram_e())
        .map(|(lo, _)| lo)
        .unwrap_or_else(|_| T::zero());
    ch.zeta() * ch.sigma2_e() * budget.p_t * lmin.max(T::zero()) >= budget.p_e
}

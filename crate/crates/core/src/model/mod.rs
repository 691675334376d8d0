//! System model: channels, budgets, secrecy rate, harvested power and
//! feasibility of the design problem.

mod json;
mod rate;

pub use json::{ChannelPairJson, MatrixJson};
pub use rate::{
    an_secrecy_rate, an_secrecy_rate_nats, eh_vacuous, feasibility, harvested_power, log_det_gain, nats_to_bits,
    secrecy_rate, secrecy_rate_nats, Feasibility,
};

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::matcore::ComplexMatrix;
use crate::scalar::Real;

/// `10^((dbm - 30) / 10)`.
pub fn dbm_to_watts<T: Real>(dbm: T) -> T {
    T::lit(10.0).powf((dbm - T::lit(30.0)) / T::lit(10.0))
}

pub fn watts_to_dbm<T: Real>(watts: T) -> T {
    T::lit(10.0) * watts.log10() + T::lit(30.0)
}

/// Raw and noise-normalized channels to the information receiver (IR) and
/// energy receiver (ER).
///
/// The normalized channels `H = H_raw / sigma` are what every solver works
/// with; Gram matrices `H^H H` are cached because nearly every routine
/// needs them.
#[derive(Clone, Debug)]
pub struct ChannelPair<T> {
    h_i_raw: ComplexMatrix<T>,
    h_e_raw: ComplexMatrix<T>,
    sigma2_i: T,
    sigma2_e: T,
    zeta: T,
    h_i: ComplexMatrix<T>,
    h_e: ComplexMatrix<T>,
    gram_i: ComplexMatrix<T>,
    gram_e: ComplexMatrix<T>,
}

impl<T: Real> ChannelPair<T> {
    /// `h_i_raw` is `N_I x N_T`, `h_e_raw` is `N_E x N_T`; noise powers in
    /// watts, `zeta` in `(0, 1]`.
    pub fn new(
        h_i_raw: ComplexMatrix<T>,
        h_e_raw: ComplexMatrix<T>,
        sigma2_i: T,
        sigma2_e: T,
        zeta: T,
    ) -> Result<Self> {
        if h_i_raw.cols() != h_e_raw.cols() {
            return Err(Error::Dimension(format!(
                "IR channel has {} transmit antennas, ER channel has {}",
                h_i_raw.cols(),
                h_e_raw.cols()
            )));
        }
        if h_i_raw.rows() == 0 || h_e_raw.rows() == 0 || h_i_raw.cols() == 0 {
            return Err(Error::Dimension("antenna counts must be positive".into()));
        }
        if !(sigma2_i > T::zero()) || !(sigma2_e > T::zero()) {
            return Err(Error::Invalid("noise powers must be positive".into()));
        }
        if !(zeta > T::zero() && zeta <= T::one()) {
            return Err(Error::Invalid(format!("conversion efficiency {zeta} outside (0, 1]")));
        }
        h_i_raw.ensure_finite("IR channel")?;
        h_e_raw.ensure_finite("ER channel")?;
        let h_i = h_i_raw.scale(T::one() / sigma2_i.sqrt());
        let h_e = h_e_raw.scale(T::one() / sigma2_e.sqrt());
        h_i.ensure_finite("normalized IR channel")?;
        h_e.ensure_finite("normalized ER channel")?;
        let gram_i = h_i.gram();
        let gram_e = h_e.gram();
        Ok(Self {
            h_i_raw,
            h_e_raw,
            sigma2_i,
            sigma2_e,
            zeta,
            h_i,
            h_e,
            gram_i,
            gram_e,
        })
    }

    /// Builds from already-normalized channels `H_I`, `H_E`.
    pub fn from_normalized(
        h_i: ComplexMatrix<T>,
        h_e: ComplexMatrix<T>,
        sigma2_i: T,
        sigma2_e: T,
        zeta: T,
    ) -> Result<Self> {
        let h_i_raw = h_i.scale(sigma2_i.sqrt());
        let h_e_raw = h_e.scale(sigma2_e.sqrt());
        Self::new(h_i_raw, h_e_raw, sigma2_i, sigma2_e, zeta)
    }

    pub fn n_t(&self) -> usize {
        self.h_i.cols()
    }

    pub fn n_i(&self) -> usize {
        self.h_i.rows()
    }

    pub fn n_e(&self) -> usize {
        self.h_e.rows()
    }

    pub fn h_i_raw(&self) -> &ComplexMatrix<T> {
        &self.h_i_raw
    }

    pub fn h_e_raw(&self) -> &ComplexMatrix<T> {
        &self.h_e_raw
    }

    /// Normalized IR channel `H_I`.
    pub fn h_i(&self) -> &ComplexMatrix<T> {
        &self.h_i
    }

    /// Normalized ER channel `H_E`.
    pub fn h_e(&self) -> &ComplexMatrix<T> {
        &self.h_e
    }

    /// `H_I^H H_I`.
    pub fn gram_i(&self) -> &ComplexMatrix<T> {
        &self.gram_i
    }

    /// `H_E^H H_E`.
    pub fn gram_e(&self) -> &ComplexMatrix<T> {
        &self.gram_e
    }

    pub fn sigma2_i(&self) -> T {
        self.sigma2_i
    }

    pub fn sigma2_e(&self) -> T {
        self.sigma2_e
    }

    pub fn zeta(&self) -> T {
        self.zeta
    }

    /// `P_E / (zeta sigma_E^2)`: the harvesting target expressed against the
    /// normalized channel, i.e. the bound on `Tr(V^H H_E^H H_E V)`.
    pub fn eh_threshold(&self, budget: &DesignBudget<T>) -> T {
        budget.p_e / (self.zeta * self.sigma2_e)
    }

    /// `F = H_I^H H_I - H_E^H H_E`.
    pub fn gram_difference(&self) -> ComplexMatrix<T> {
        &self.gram_i - &self.gram_e
    }

    pub(crate) fn check_tx_rows(&self, m: &ComplexMatrix<T>, what: &str) -> Result<()> {
        if m.rows() != self.n_t() {
            return Err(Error::Dimension(format!(
                "{what} has {} rows, expected N_T = {}",
                m.rows(),
                self.n_t()
            )));
        }
        Ok(())
    }
}

/// Transmit power budget and harvesting target, in watts.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DesignBudget<T> {
    pub p_t: T,
    pub p_e: T,
}

impl<T: Real> DesignBudget<T> {
    pub fn new(p_t: T, p_e: T) -> Result<Self> {
        if !(p_t > T::zero()) || !p_t.is_finite() {
            return Err(Error::Invalid(format!("power budget {p_t} must be positive")));
        }
        if !(p_e >= T::zero()) || !p_e.is_finite() {
            return Err(Error::Invalid(format!("harvesting target {p_e} must be nonnegative")));
        }
        Ok(Self { p_t, p_e })
    }

    pub fn from_dbm(p_t_dbm: T, p_e_dbm: T) -> Result<Self> {
        Self::new(dbm_to_watts(p_t_dbm), dbm_to_watts(p_e_dbm))
    }
}

/// Transmit beamforming matrix `V` (`N_T x d`, amplitude in sqrt-watts).
#[derive(Clone, Debug, PartialEq)]
pub struct Beamformer<T> {
    v: ComplexMatrix<T>,
}

impl<T: Real> Beamformer<T> {
    pub fn new(v: ComplexMatrix<T>) -> Result<Self> {
        if v.cols() == 0 || v.cols() > v.rows() {
            return Err(Error::Dimension(format!(
                "stream count {} must lie in 1..={}",
                v.cols(),
                v.rows()
            )));
        }
        v.ensure_finite("beamformer")?;
        Ok(Self { v })
    }

    /// Single-stream beamformer from a vector.
    pub fn from_vector(v: &[Complex<T>]) -> Result<Self> {
        Self::new(ComplexMatrix::column(v))
    }

    pub fn v(&self) -> &ComplexMatrix<T> {
        &self.v
    }

    pub fn into_inner(self) -> ComplexMatrix<T> {
        self.v
    }

    pub fn streams(&self) -> usize {
        self.v.cols()
    }

    /// `Tr(V V^H)`.
    pub fn power(&self) -> T {
        self.v.fro_norm_sqr()
    }

    /// `V V^H`.
    pub fn covariance(&self) -> ComplexMatrix<T> {
        self.v.outer_gram()
    }
}

/// Beamformer plus artificial-noise factor `V_E` (`N_T x N_T`); the noise
/// covariance is `Z = V_E V_E^H`.
#[derive(Clone, Debug, PartialEq)]
pub struct AnBeamformer<T> {
    v: ComplexMatrix<T>,
    v_e: ComplexMatrix<T>,
}

impl<T: Real> AnBeamformer<T> {
    pub fn new(v: ComplexMatrix<T>, v_e: ComplexMatrix<T>) -> Result<Self> {
        let bf = Beamformer::new(v)?;
        if v_e.shape() != (bf.v.rows(), bf.v.rows()) {
            return Err(Error::Dimension(format!(
                "noise factor must be {n}x{n}",
                n = bf.v.rows()
            )));
        }
        v_e.ensure_finite("noise factor")?;
        Ok(Self { v: bf.v, v_e })
    }

    /// Zero artificial noise.
    pub fn without_noise(bf: Beamformer<T>) -> Self {
        let n = bf.v.rows();
        Self {
            v: bf.v,
            v_e: ComplexMatrix::zeros(n, n),
        }
    }

    pub fn v(&self) -> &ComplexMatrix<T> {
        &self.v
    }

    pub fn v_e(&self) -> &ComplexMatrix<T> {
        &self.v_e
    }

    pub fn streams(&self) -> usize {
        self.v.cols()
    }

    /// `Z = V_E V_E^H`.
    pub fn noise_covariance(&self) -> ComplexMatrix<T> {
        self.v_e.outer_gram()
    }

    /// `V V^H + Z`.
    pub fn total_covariance(&self) -> ComplexMatrix<T> {
        &self.v.outer_gram() + &self.noise_covariance()
    }

    pub fn signal_power(&self) -> T {
        self.v.fro_norm_sqr()
    }

    pub fn noise_power(&self) -> T {
        self.v_e.fro_norm_sqr()
    }

    pub fn power(&self) -> T {
        self.signal_power() + self.noise_power()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type M = ComplexMatrix<f64>;

    #[test]
    fn dbm_conversions() {
        assert!((dbm_to_watts(30.0_f64) - 1.0).abs() < 1e-15);
        assert!((dbm_to_watts(-50.0_f64) - 1e-8).abs() < 1e-23);
        assert!((dbm_to_watts(10.0_f64) - 0.01).abs() < 1e-17);
        assert!((watts_to_dbm(dbm_to_watts(17.5_f64)) - 17.5).abs() < 1e-12);
    }

    #[test]
    fn channel_pair_validates() {
        let h = M::identity(2);
        assert!(ChannelPair::new(h.clone(), h.clone(), 1.0, 1.0, 0.5).is_ok());
        assert!(ChannelPair::new(h.clone(), M::zeros(2, 3), 1.0, 1.0, 0.5).is_err());
        assert!(ChannelPair::new(h.clone(), h.clone(), 0.0, 1.0, 0.5).is_err());
        assert!(ChannelPair::new(h.clone(), h.clone(), 1.0, 1.0, 1.5).is_err());
        assert!(ChannelPair::new(h.clone(), h.clone(), 1.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn normalization_divides_by_sigma() {
        let ch = ChannelPair::new(M::identity(2), M::identity(2), 4.0, 0.25, 1.0).unwrap();
        assert!((ch.h_i()[(0, 0)].re - 0.5).abs() < 1e-15);
        assert!((ch.h_e()[(1, 1)].re - 2.0).abs() < 1e-15);
        let back = ChannelPair::from_normalized(ch.h_i().clone(), ch.h_e().clone(), 4.0, 0.25, 1.0).unwrap();
        assert!((back.h_i_raw() - ch.h_i_raw()).fro_norm() < 1e-15);
    }

    #[test]
    fn beamformer_stream_bounds() {
        assert!(Beamformer::new(M::zeros(2, 3)).is_err());
        assert!(Beamformer::new(M::zeros(2, 0)).is_err());
        assert_eq!(Beamformer::new(M::zeros(3, 2)).unwrap().streams(), 2);
    }

    #[test]
    fn budget_validates() {
        assert!(DesignBudget::new(0.0, 0.0).is_err());
        assert!(DesignBudget::new(1.0, -1.0).is_err());
        let b = DesignBudget::<f64>::from_dbm(20.0, -30.0).unwrap();
        assert!((b.p_t - 0.1).abs() < 1e-15 && (b.p_e - 1e-6).abs() < 1e-20);
    }
}

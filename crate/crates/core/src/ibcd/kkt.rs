use crate::error::Result;
use crate::matcore::{inverse_hpd, ComplexMatrix};
use crate::model::{ChannelPair, DesignBudget};
use crate::scalar::Real;

/// KKT residual of the original problem at `V` with multipliers `lambda`
/// (power) and `mu` (harvesting), in normalized-channel units.
///
/// Maximum of the stationarity residual
/// `||(-H_I^H N_I^{-1} H_I + H_E^H N_E^{-1} H_E + lambda I - mu K) V|| / max(1, ||V||)`,
/// the two complementarity products and the two primal violations.
pub fn kkt_residual<T: Real>(
    ch: &ChannelPair<T>,
    budget: &DesignBudget<T>,
    v: &ComplexMatrix<T>,
    lambda: T,
    mu: T,
) -> Result<T> {
    ch.check_tx_rows(v, "V")?;
    let cov = v.outer_gram();
    let curv = |h: &ComplexMatrix<T>| -> Result<ComplexMatrix<T>> {
        let inv = inverse_hpd(&h.congruence(&cov).add_scaled_identity(T::one()))?;
        Ok(h.adjoint().congruence(&inv))
    };
    let mut m = &curv(ch.h_e())? - &curv(ch.h_i())?;
    m.axpy(-mu, ch.gram_e());
    let m = m.add_scaled_identity(lambda);
    let stat = m.matmul(v).fro_norm() / T::one().max(v.fro_norm());

    let power = v.fro_norm_sqr();
    let eh = ch.gram_e().trace_mul(&cov).re;
    let target = ch.eh_threshold(budget);
    let comp_p = (lambda * (power - budget.p_t)).abs();
    let comp_e = (mu * (eh - target)).abs();
    let viol_p = (power - budget.p_t).max(T::zero());
    let viol_e = (target - eh).max(T::zero());
    Ok(stat.max(comp_p).max(comp_e).max(viol_p).max(viol_e))
}

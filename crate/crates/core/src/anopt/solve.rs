use rand::Rng;

use crate::error::Result;
use crate::ibcd::{check_feasible_start, warmstart, ConvergenceTrace, IbcdOptions};
use crate::matcore::{hermitian_eig, ComplexMatrix};
use crate::model::{an_secrecy_rate_nats, harvested_power, AnBeamformer, ChannelPair, DesignBudget};
use crate::scalar::Real;

use super::aux::{an_update_aux, AnAuxVars};
use super::subproblem::AnLinearizedSubproblem;

/// An iterate with its auxiliaries and rate.
#[derive(Clone, Debug)]
pub struct AnState<T> {
    pub v: ComplexMatrix<T>,
    pub v_e: ComplexMatrix<T>,
    pub aux: AnAuxVars<T>,
    pub rate_nats: T,
}

impl<T: Real> AnState<T> {
    pub fn new(ch: &ChannelPair<T>, v: ComplexMatrix<T>, v_e: ComplexMatrix<T>) -> Result<Self> {
        let aux = an_update_aux(ch, &v, &v_e)?;
        let rate_nats = an_secrecy_rate_nats(ch, &v, &v_e.outer_gram())?;
        Ok(Self { v, v_e, aux, rate_nats })
    }

    pub fn covariance(&self) -> ComplexMatrix<T> {
        &self.v.outer_gram() + &self.v_e.outer_gram()
    }
}

fn record<T: Real>(
    trace: &mut ConvergenceTrace<T>,
    ch: &ChannelPair<T>,
    budget: &DesignBudget<T>,
    st: &AnState<T>,
) -> Result<()> {
    let cov = st.covariance();
    trace.push(st.rate_nats, cov.re_trace(), harvested_power(ch, &cov)? - budget.p_e);
    trace.an_power.push(st.v_e.fro_norm_sqr());
    Ok(())
}

/// Joint descent over `(V, V_E)` from a feasible start until one iteration
/// improves the rate by at most `opts.eps` nats.
///
/// Started with `V_E = 0` the noise block stays at zero and the run
/// reproduces [`crate::ibcd::ibcd_solve`].
pub fn an_ibcd_solve<T: Real>(
    ch: &ChannelPair<T>,
    budget: &DesignBudget<T>,
    init: &AnBeamformer<T>,
    opts: &IbcdOptions<T>,
) -> Result<(AnBeamformer<T>, ConvergenceTrace<T>)> {
    ch.check_tx_rows(init.v(), "V0")?;
    ch.check_tx_rows(init.v_e(), "V_E0")?;
    let mut st = AnState::new(ch, init.v().clone(), init.v_e().clone())?;
    check_feasible_start(ch, budget, &st.covariance())?;

    let mut trace = ConvergenceTrace::default();
    record(&mut trace, ch, budget, &st)?;
    for _ in 0..opts.max_iter {
        let sub = AnLinearizedSubproblem::new(ch, &st.v, &st.v_e, &st.aux, budget)?;
        let sol = sub.solve(opts.bisection_eps)?;
        trace.lambda = sol.lambda;
        trace.mu = sol.mu;
        if sub.objective(&sol.v, &sol.v_e) > sub.objective(&st.v, &st.v_e) {
            trace.converged = true;
            break;
        }
        let next = AnState::new(ch, sol.v, sol.v_e)?;
        if next.rate_nats < st.rate_nats {
            trace.converged = true;
            break;
        }
        let gain = next.rate_nats - st.rate_nats;
        st = next;
        record(&mut trace, ch, budget, &st)?;
        if gain <= opts.eps {
            trace.converged = true;
            break;
        }
    }
    Ok((AnBeamformer::new(st.v, st.v_e)?, trace))
}

/// Feasible start with a small isotropic noise seed.
///
/// `V` comes from [`warmstart`] rescaled to 95% of the budget and
/// `V_E = sqrt(0.05 P_T / N_T) I`. If that misses the harvesting target the
/// noise is steered along the strongest ER eigenmode instead, and if even
/// that fails the plain warmstart is returned with `V_E = 0`.
pub fn an_warmstart<T: Real, R: Rng + ?Sized>(
    ch: &ChannelPair<T>,
    d: usize,
    budget: &DesignBudget<T>,
    rng: &mut R,
) -> Result<AnBeamformer<T>> {
    let v0 = warmstart(ch, d, budget, rng)?.into_inner();
    let n_t = ch.n_t();
    let p0 = v0.fro_norm_sqr();
    let signal = T::lit(0.95) * budget.p_t;
    let noise = budget.p_t - signal;
    let v = if p0 > T::zero() {
        v0.scale((signal / p0).sqrt())
    } else {
        v0.clone()
    };
    let feasible = |v: &ComplexMatrix<T>, v_e: &ComplexMatrix<T>| -> Result<bool> {
        let cov = &v.outer_gram() + &v_e.outer_gram();
        Ok(check_feasible_start(ch, budget, &cov).is_ok())
    };

    let iso = ComplexMatrix::scaled_identity(n_t, (noise / T::from_usize_lossy(n_t)).sqrt());
    if feasible(&v, &iso)? {
        return AnBeamformer::new(v, iso);
    }
    let k = hermitian_eig(ch.gram_e())?;
    let q1 = k.vector(n_t - 1);
    let mut steered = ComplexMatrix::zeros(n_t, n_t);
    steered.set_col(0, &q1);
    let steered = steered.scale(noise.sqrt());
    if feasible(&v, &steered)? {
        return AnBeamformer::new(v, steered);
    }
    AnBeamformer::new(v0, ComplexMatrix::zeros(n_t, n_t))
}

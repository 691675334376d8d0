use crate::error::{Error, Result};
use crate::matcore::ComplexMatrix;
use crate::model::{harvested_power, secrecy_rate_nats, Beamformer, ChannelPair, DesignBudget};
use crate::scalar::Real;

use super::aux::update_aux;
use super::subproblem::LinearizedSubproblem;
use super::trace::ConvergenceTrace;

pub const DEFAULT_EPS: f64 = 1e-6;
const MAX_ITER: usize = 5000;

/// Stopping parameters; both tolerances default to `1e-6`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IbcdOptions<T> {
    /// Outer loop stops when one iteration gains at most this many nats.
    pub eps: T,
    /// Width of the final power-multiplier bracket.
    pub bisection_eps: T,
    pub max_iter: usize,
}

impl<T: Real> Default for IbcdOptions<T> {
    fn default() -> Self {
        Self {
            eps: T::lit(DEFAULT_EPS),
            bisection_eps: T::lit(DEFAULT_EPS),
            max_iter: MAX_ITER,
        }
    }
}

impl<T: Real> IbcdOptions<T> {
    pub fn with_eps(eps: T) -> Self {
        Self {
            eps,
            bisection_eps: eps,
            ..Self::default()
        }
    }
}

pub(crate) fn check_feasible_start<T: Real>(
    ch: &ChannelPair<T>,
    budget: &DesignBudget<T>,
    cov: &ComplexMatrix<T>,
) -> Result<()> {
    let power = cov.re_trace();
    if power > budget.p_t * T::lit(1.0 + 1e-8) {
        return Err(Error::Precondition(format!(
            "initial point uses {power} W, budget is {} W",
            budget.p_t
        )));
    }
    let eh = harvested_power(ch, cov)?;
    if eh < budget.p_e * T::lit(1.0 - 1e-7) {
        return Err(Error::Precondition(format!(
            "initial point harvests {eh} W, target is {} W",
            budget.p_e
        )));
    }
    Ok(())
}

/// Runs the descent from a feasible `V0` until one iteration improves the
/// secrecy rate by at most `opts.eps` nats.
///
/// Every iterate is feasible and the recorded rates never decrease: an
/// update that would lower the rate (possible only through rounding once
/// converged) is rejected and the run stops.
pub fn ibcd_solve<T: Real>(
    ch: &ChannelPair<T>,
    budget: &DesignBudget<T>,
    v0: &Beamformer<T>,
    opts: &IbcdOptions<T>,
) -> Result<(Beamformer<T>, ConvergenceTrace<T>)> {
    let mut v = v0.v().clone();
    ch.check_tx_rows(&v, "V0")?;
    let cov = v.outer_gram();
    check_feasible_start(ch, budget, &cov)?;

    let mut trace = ConvergenceTrace::default();
    let mut rate = secrecy_rate_nats(ch, &v)?;
    trace.push(rate, cov.re_trace(), harvested_power(ch, &cov)? - budget.p_e);

    for _ in 0..opts.max_iter {
        let aux = update_aux(ch, &v)?;
        let sub = LinearizedSubproblem::new(ch, &v, &aux, budget)?;
        let sol = sub.solve(opts.bisection_eps)?;
        trace.lambda = sol.lambda;
        trace.mu = sol.mu;
        if sub.objective(&sol.v) > sub.objective(&v) {
            trace.converged = true;
            break;
        }
        let new_rate = secrecy_rate_nats(ch, &sol.v)?;
        if new_rate < rate {
            trace.converged = true;
            break;
        }
        let gain = new_rate - rate;
        v = sol.v;
        rate = new_rate;
        let cov = v.outer_gram();
        trace.push(rate, cov.re_trace(), harvested_power(ch, &cov)? - budget.p_e);
        if gain <= opts.eps {
            trace.converged = true;
            break;
        }
    }
    Ok((Beamformer::new(v)?, trace))
}

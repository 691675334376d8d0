use crate::error::{Error, Result};
use crate::matcore::{hermitian_eig, inverse_hpd, ComplexMatrix};
use crate::model::{feasibility, log_det_gain, nats_to_bits, ChannelPair, DesignBudget};
use crate::scalar::Real;
use crate::sdp::{solve_sdp, SdpProblem, SdpStatus, Sense};

use super::barrier::barrier_polish;
use super::identity::gram_difference_is_psd;

const MAX_ITER: usize = 50_000;
/// Plain conditional-gradient steps before switching to barrier refinement.
const PLAIN_ITER: usize = 50;
const LINE_TOL: f64 = 1e-10;

#[derive(Clone, Debug)]
pub struct FullStreamSolution<T> {
    /// Optimal transmit covariance.
    pub x: ComplexMatrix<T>,
    /// `U Lambda^{1/2}` from the eigendecomposition of `x`.
    pub v: ComplexMatrix<T>,
    pub rate: T,
    pub rate_nats: T,
    /// Final linearization gap, nats; an upper bound on suboptimality.
    pub fw_gap: T,
    pub iterations: usize,
    /// Objective (nats) after each iteration, starting at the initial point.
    pub objective_history: Vec<T>,
    pub nonpositive_rate: bool,
}

fn phi<T: Real>(ch: &ChannelPair<T>, x: &ComplexMatrix<T>) -> Result<T> {
    Ok(log_det_gain(ch.h_i(), x)? - log_det_gain(ch.h_e(), x)?)
}

fn gradient<T: Real>(ch: &ChannelPair<T>, x: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
    let term = |h: &ComplexMatrix<T>| -> Result<ComplexMatrix<T>> {
        let inv = inverse_hpd(&h.congruence(x).add_scaled_identity(T::one()))?;
        Ok(h.adjoint().congruence(&inv))
    };
    let mut g = &term(ch.h_i())? - &term(ch.h_e())?;
    g.force_hermitian();
    Ok(g)
}

/// Maximizes `Tr(G S)` over the feasible covariances.
fn linear_oracle<T: Real>(
    ch: &ChannelPair<T>,
    budget: &DesignBudget<T>,
    g: &ComplexMatrix<T>,
) -> Result<ComplexMatrix<T>> {
    let n = ch.n_t();
    let mut p = SdpProblem::new(g.scale(-T::one()))?.with(ComplexMatrix::identity(n), Sense::Le, budget.p_t)?;
    if budget.p_e > T::zero() {
        p.add(ch.gram_e().clone(), Sense::Ge, ch.eh_threshold(budget))?;
    }
    let sol = solve_sdp(&p)?;
    match sol.status {
        SdpStatus::Optimal => Ok(sol.x),
        SdpStatus::Infeasible => Err(Error::Solver("direction-finding SDP reported infeasible".into())),
        SdpStatus::MaxIter => Err(Error::Solver("direction-finding SDP hit the iteration limit".into())),
    }
}

/// Golden-section maximization of a unimodal `f` on `[0, 1]`.
fn golden_max<T: Real>(mut f: impl FnMut(T) -> Result<T>) -> Result<(T, T)> {
    let r = (T::lit(5.0).sqrt() - T::one()) / T::lit(2.0);
    let (mut a, mut b) = (T::zero(), T::one());
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    while b - a > T::lit(LINE_TOL) {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d)?;
        }
    }
    // Endpoints are candidates too: the maximum often sits at gamma = 1.
    let mut best = if fc >= fd { (c, fc) } else { (d, fd) };
    for t in [T::zero(), T::one()] {
        let ft = f(t)?;
        if ft > best.1 {
            best = (t, ft);
        }
    }
    Ok(best)
}

/// Globally optimal covariance for `d = N_T` when `H_I^H H_I - H_E^H H_E` is
/// PSD, where the secrecy rate is concave in `X = V V^H`.
///
/// Conditional gradient: each step maximizes the linearized rate over the
/// feasible set with an SDP, then does an exact line search. The gap
/// `Tr(grad (S - X))` bounds the distance to the optimum and is the
/// stopping rule.
pub fn solve_full_stream<T: Real>(
    ch: &ChannelPair<T>,
    budget: &DesignBudget<T>,
    tol_nats: T,
) -> Result<FullStreamSolution<T>> {
    if !gram_difference_is_psd(ch)? {
        return Err(Error::Precondition(
            "H_I^H H_I - H_E^H H_E is indefinite; use the block coordinate descent solver".into(),
        ));
    }
    feasibility(ch, budget).into_result()?;

    let e = hermitian_eig(ch.gram_e())?;
    let q = ComplexMatrix::column(&e.vector(e.dim() - 1));
    let mut x = q.outer_gram().scale(budget.p_t);
    let mut f = phi(ch, &x)?;
    let mut history = vec![f];
    let mut gap = T::infinity();
    let mut iterations = 0;
    let mut polished = false;
    while iterations < MAX_ITER {
        let g = gradient(ch, &x)?;
        let s = linear_oracle(ch, budget, &g)?;
        let dir = &s - &x;
        gap = g.trace_mul(&dir).re;
        if gap <= tol_nats {
            break;
        }
        iterations += 1;
        if !polished && iterations > PLAIN_ITER {
            polished = true;
            if let Some(y) = barrier_polish(ch, budget, &x, tol_nats / T::lit(10.0))? {
                let fy = phi(ch, &y)?;
                if fy >= f {
                    x = y;
                    f = fy;
                    history.push(f);
                    continue;
                }
            }
        }
        let (gamma, f_new) = golden_max(|t| phi(ch, &(&x + &dir.scale(t))))?;
        if f_new < f {
            break;
        }
        x.axpy(gamma, &dir);
        x.force_hermitian();
        f = f_new;
        history.push(f);
    }
    if !(gap <= tol_nats) {
        return Err(Error::Solver(format!(
            "conditional gradient stopped with gap {gap} nats above the requested {tol_nats}"
        )));
    }

    let ex = hermitian_eig(&x)?;
    let n = ex.dim();
    let v = ComplexMatrix::from_fn(n, n, |i, j| {
        let k = n - 1 - j;
        ex.vectors[(i, k)].scale(ex.values[k].max(T::zero()).sqrt())
    });
    let rate_nats = f;
    Ok(FullStreamSolution {
        x,
        v,
        rate: nats_to_bits(rate_nats),
        rate_nats,
        fw_gap: gap,
        iterations,
        objective_history: history,
        nonpositive_rate: rate_nats <= T::zero(),
    })
}

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::matcore::{min_rayleigh_vec, ComplexMatrix};
use crate::model::{eh_vacuous, feasibility, nats_to_bits, secrecy_rate_nats, ChannelPair, DesignBudget};
use crate::scalar::Real;
use crate::sdp::{extract_rank_one, rank_reduce, solve_sdp, SdpProblem, SdpStatus, Sense};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Branch {
    /// Harvesting constraint is inactive; generalized eigenvector.
    EigenBranch,
    /// Semidefinite relaxation followed by rank reduction.
    SdrBranch,
}

#[derive(Clone, Debug)]
pub struct SingleStreamSolution<T> {
    pub v: Vec<Complex<T>>,
    pub rate: T,
    pub rate_nats: T,
    pub branch: Branch,
    pub nonpositive_rate: bool,
}

impl<T: Real> SingleStreamSolution<T> {
    pub fn v_matrix(&self) -> ComplexMatrix<T> {
        ComplexMatrix::column(&self.v)
    }
}

/// Optimal single-stream beamformer.
///
/// At full power the rate is `log(u^H Q_I u / u^H Q_E u)` with
/// `Q_x = I / P_T + H_x^H H_x`, and the harvesting constraint becomes
/// `u^H G u <= 0`. Without an active harvesting constraint the optimum is the
/// minimizer of the pencil `(Q_E, Q_I)`; otherwise the two-constraint SDR is
/// tight after rank reduction.
pub fn solve_single_stream<T: Real>(ch: &ChannelPair<T>, budget: &DesignBudget<T>) -> Result<SingleStreamSolution<T>> {
    solve(ch, budget, false)
}

/// As [`solve_single_stream`] but always through the SDR.
pub fn solve_single_stream_sdr<T: Real>(
    ch: &ChannelPair<T>,
    budget: &DesignBudget<T>,
) -> Result<SingleStreamSolution<T>> {
    solve(ch, budget, true)
}

fn solve<T: Real>(ch: &ChannelPair<T>, budget: &DesignBudget<T>, force_sdr: bool) -> Result<SingleStreamSolution<T>> {
    feasibility(ch, budget).into_result()?;
    let inv_pt = T::one() / budget.p_t;
    let q_e = ch.gram_e().add_scaled_identity(inv_pt);
    let q_i = ch.gram_i().add_scaled_identity(inv_pt);

    let (u, branch) = if !force_sdr && eh_vacuous(ch, budget) {
        (min_rayleigh_vec(&q_e, &q_i)?.0, Branch::EigenBranch)
    } else {
        let g = ch
            .gram_e()
            .scale(-T::one())
            .add_scaled_identity(ch.eh_threshold(budget) * inv_pt);
        let p = SdpProblem::new(q_e)?
            .with(q_i, Sense::Eq, T::one())?
            .with(g, Sense::Le, T::zero())?;
        let sol = solve_sdp(&p)?;
        match sol.status {
            SdpStatus::Optimal => {}
            SdpStatus::Infeasible => return Err(Error::Solver("single-stream SDR reported infeasible".into())),
            SdpStatus::MaxIter => return Err(Error::Solver("single-stream SDR hit the iteration limit".into())),
        }
        let red = rank_reduce(&sol, &p)?;
        (extract_rank_one(&red.x)?, Branch::SdrBranch)
    };

    let norm = u.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
    if !(norm > T::zero()) {
        return Err(Error::Solver("single-stream direction vanished".into()));
    }
    let s = budget.p_t.sqrt() / norm;
    let v: Vec<Complex<T>> = u.iter().map(|z| z.scale(s)).collect();
    let rate_nats = secrecy_rate_nats(ch, &ComplexMatrix::column(&v))?;
    Ok(SingleStreamSolution {
        v,
        rate: nats_to_bits(rate_nats),
        rate_nats,
        branch,
        nonpositive_rate: rate_nats <= T::zero(),
    })
}

use num_complex::Complex;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::matcore::{hermitian_eig, ComplexMatrix};
use crate::model::{feasibility, harvested_power, secrecy_rate_nats, Beamformer, ChannelPair, DesignBudget};
use crate::scalar::Real;
use crate::sdp::{extract_rank_one, rank_reduce, solve_sdp, SdpProblem, SdpStatus, Sense};

use super::aux::update_aux;
use super::subproblem::LinearizedSubproblem;

/// Random draws tried by [`warmstart`].
pub const WARM_DRAWS: usize = 32;

/// Entries i.i.d. `CN(0, 1)`.
pub(crate) fn standard_normal_matrix<T: Real, R: Rng + ?Sized>(
    rows: usize,
    cols: usize,
    rng: &mut R,
) -> ComplexMatrix<T> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex::new(T::lit(re * h), T::lit(im * h))
    })
}

fn scaled_to<T: Real>(v: &ComplexMatrix<T>, p_t: T) -> Option<ComplexMatrix<T>> {
    let p = v.fro_norm_sqr();
    (p > T::zero() && p.is_finite()).then(|| v.scale((p_t / p).sqrt()))
}

fn meets_target<T: Real>(ch: &ChannelPair<T>, budget: &DesignBudget<T>, v: &ComplexMatrix<T>) -> Result<bool> {
    Ok(harvested_power(ch, &v.outer_gram())? >= budget.p_e)
}

fn check_streams<T: Real>(ch: &ChannelPair<T>, d: usize) -> Result<()> {
    if d == 0 || d > ch.n_t() {
        return Err(Error::Dimension(format!("stream count {d} outside 1..={}", ch.n_t())));
    }
    Ok(())
}

/// Full-power start along the strongest energy-receiver eigenmodes:
/// column 1 on `q_1`, the rest spread over `q_2..q_d` with as much power as
/// the harvesting target allows (capped at an even split).
pub fn fallback_start<T: Real>(ch: &ChannelPair<T>, d: usize, budget: &DesignBudget<T>) -> Result<Beamformer<T>> {
    check_streams(ch, d)?;
    feasibility(ch, budget).into_result()?;
    let n = ch.n_t();
    let e = hermitian_eig(ch.gram_e())?;
    let lam = |k: usize| e.values[n - 1 - k].max(T::zero());
    let delta = if d == 1 {
        T::zero()
    } else {
        let even = T::from_usize_lossy(d - 1) / T::from_usize_lossy(d);
        let rest = (1..d).map(lam).sum::<T>() / T::from_usize_lossy(d - 1);
        let slack = budget.p_t * lam(0) - ch.eh_threshold(budget);
        let drop = budget.p_t * (lam(0) - rest);
        if drop > T::zero() {
            even.min(T::lit(0.99) * slack / drop)
        } else {
            even
        }
    };
    let share = |k: usize| {
        if k == 0 {
            (budget.p_t * (T::one() - delta)).sqrt()
        } else {
            (budget.p_t * delta / T::from_usize_lossy(d - 1)).sqrt()
        }
    };
    let v = ComplexMatrix::from_fn(n, d, |i, k| e.vectors[(i, n - 1 - k)].scale(share(k)));
    Beamformer::new(v)
}

/// Moves `v` toward the fallback point until the harvesting target holds,
/// keeping full power.
fn blend_to_feasible<T: Real>(
    ch: &ChannelPair<T>,
    budget: &DesignBudget<T>,
    v: &ComplexMatrix<T>,
) -> Result<ComplexMatrix<T>> {
    let d = v.cols();
    let target = fallback_start(ch, d, budget)?.into_inner();
    let steps = [0.0, 1e-6, 1e-4, 1e-2, 0.05, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9];
    for t in steps {
        let t = T::lit(t);
        let mut mix = v.scale(T::one() - t);
        mix.axpy(t, &target);
        if let Some(w) = scaled_to(&mix, budget.p_t) {
            if meets_target(ch, budget, &w)? {
                return Ok(w);
            }
        }
    }
    Ok(target)
}

/// Random full-power start pulled toward the strongest energy-receiver
/// eigenmode just far enough to satisfy the harvesting target.
pub fn naive_start<T: Real, R: Rng + ?Sized>(
    ch: &ChannelPair<T>,
    d: usize,
    budget: &DesignBudget<T>,
    rng: &mut R,
) -> Result<Beamformer<T>> {
    check_streams(ch, d)?;
    feasibility(ch, budget).into_result()?;
    let v = scaled_to(&standard_normal_matrix(ch.n_t(), d, rng), budget.p_t)
        .ok_or_else(|| Error::Solver("random start vanished".into()))?;
    Beamformer::new(blend_to_feasible(ch, budget, &v)?)
}

/// Feasible starting point from one exact block update.
///
/// Draws a random `V`, computes its auxiliaries, and solves the resulting
/// nonconvex `V`-subproblem (exact harvesting constraint) through the SDR of
/// its homogenized vector form: with `v = vec(V)`,
/// `z = [v; 1]` and `Z = z z^H`,
/// `min Tr(Q Z)` s.t. `Z_nn = 1`, `Tr(V V^H) <= P_T`,
/// `Tr(V^H K V) >= P_E / (zeta sigma_E^2)`. Three constraints make the
/// rank-reduced solution rank one. The result is scaled to full power.
///
/// A single update from one random draw often lands below the draw itself,
/// so the update is run from [`WARM_DRAWS`] draws and the best rate kept. If
/// every SDR fails the start comes from [`fallback_start`].
pub fn warmstart<T: Real, R: Rng + ?Sized>(
    ch: &ChannelPair<T>,
    d: usize,
    budget: &DesignBudget<T>,
    rng: &mut R,
) -> Result<Beamformer<T>> {
    check_streams(ch, d)?;
    feasibility(ch, budget).into_result()?;
    let mut best: Option<(T, ComplexMatrix<T>)> = None;
    for _ in 0..WARM_DRAWS {
        let v_rand = scaled_to(&standard_normal_matrix(ch.n_t(), d, rng), budget.p_t)
            .ok_or_else(|| Error::Solver("random start vanished".into()))?;
        let Some(v) = lifted_sdr(ch, d, budget, &v_rand)? else {
            continue;
        };
        let v = blend_to_feasible(ch, budget, &v)?;
        let rate = secrecy_rate_nats(ch, &v)?;
        if best.as_ref().is_none_or(|(r, _)| rate > *r) {
            best = Some((rate, v));
        }
    }
    match best {
        Some((_, v)) => Beamformer::new(v),
        None => fallback_start(ch, d, budget),
    }
}

fn lifted_sdr<T: Real>(
    ch: &ChannelPair<T>,
    d: usize,
    budget: &DesignBudget<T>,
    v_rand: &ComplexMatrix<T>,
) -> Result<Option<ComplexMatrix<T>>> {
    let n_t = ch.n_t();
    let aux = update_aux(ch, v_rand)?;
    let sub = LinearizedSubproblem::new(ch, v_rand, &aux, budget)?;
    let nv = n_t * d;
    let beta = sub.b().vec();

    let mut q = ComplexMatrix::zeros(nv + 1, nv + 1);
    q.set_block(0, 0, &sub.a().block_diag_repeat(d));
    for (i, &bi) in beta.iter().enumerate() {
        q[(i, nv)] = -bi;
        q[(nv, i)] = -bi.conj();
    }
    let mut corner = ComplexMatrix::zeros(nv + 1, nv + 1);
    corner[(nv, nv)] = Complex::new(T::one(), T::zero());
    let mut power = ComplexMatrix::identity(nv + 1);
    power[(nv, nv)] = Complex::new(T::zero(), T::zero());
    let mut p = SdpProblem::new(q)?
        .with(corner, Sense::Eq, T::one())?
        .with(power, Sense::Le, budget.p_t)?;
    let thr = ch.eh_threshold(budget);
    if thr > T::zero() {
        let mut eh = ComplexMatrix::zeros(nv + 1, nv + 1);
        eh.set_block(0, 0, &ch.gram_e().block_diag_repeat(d));
        p.add(eh, Sense::Ge, thr)?;
    }

    let sol = solve_sdp(&p)?;
    if sol.status != SdpStatus::Optimal {
        return Ok(None);
    }
    let red = rank_reduce(&sol, &p)?;
    let Ok(z) = extract_rank_one(&red.x) else {
        return Ok(None);
    };
    let last = z[nv];
    if last.norm() <= T::lit(1e-12) * z.iter().map(|w| w.norm()).fold(T::zero(), T::max) {
        return Ok(None);
    }
    let v: Vec<Complex<T>> = z[..nv].iter().map(|w| w / last).collect();
    Ok(scaled_to(&ComplexMatrix::unvec(&v, n_t, d), budget.p_t))
}

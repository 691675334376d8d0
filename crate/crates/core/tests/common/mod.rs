#![allow(dead_code)]

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use secbeam::{CMat, ChannelPair, ConvergenceTrace, DesignBudget, C64};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Entries i.i.d. CN(0, var).
pub fn cn_matrix(rng: &mut impl Rng, rows: usize, cols: usize, var: f64) -> CMat {
    let s = (var / 2.0).sqrt();
    CMat::from_fn(rows, cols, |_, _| {
        let a: f64 = StandardNormal.sample(rng);
        let b: f64 = StandardNormal.sample(rng);
        Complex::new(a * s, b * s)
    })
}

pub fn random_psd(rng: &mut impl Rng, n: usize, rank: usize, scale: f64) -> CMat {
    cn_matrix(rng, n, rank, scale).outer_gram()
}

/// Unit-noise channel with entries of variance `var` after normalization.
pub fn unit_channel(rng: &mut impl Rng, n_t: usize, n_i: usize, n_e: usize, var: f64) -> ChannelPair {
    let hi = cn_matrix(rng, n_i, n_t, var);
    let he = cn_matrix(rng, n_e, n_t, var);
    ChannelPair::new(hi, he, 1.0, 1.0, 0.5).unwrap()
}

/// Simulation-scale channel: path loss 50 dB, noise -50 dBm, zeta 0.5.
pub fn sim_channel(rng: &mut impl Rng, n_t: usize, n_i: usize, n_e: usize) -> ChannelPair {
    let hi = cn_matrix(rng, n_i, n_t, 1e-5);
    let he = cn_matrix(rng, n_e, n_t, 1e-5);
    ChannelPair::new(hi, he, 1e-8, 1e-8, 0.5).unwrap()
}

/// The 2x2 example channels (already normalized, unit noise).
pub fn example_channels() -> ChannelPair {
    let c = C64::new;
    let hi = CMat::from_vec(
        2,
        2,
        vec![
            c(-0.8355, -0.4547),
            c(1.5249, 0.9305),
            c(1.1033, -0.9940),
            c(1.6232, -1.0196),
        ],
    )
    .unwrap();
    let he = CMat::from_vec(
        2,
        2,
        vec![
            c(0.1409, -0.1914),
            c(0.3241, 0.2328),
            c(0.7981, 0.7771),
            c(-0.9295, 0.0945),
        ],
    )
    .unwrap();
    ChannelPair::from_normalized(hi, he, 1.0, 1.0, 0.5).unwrap()
}

/// Monotone within 1e-9 nats and feasible at every iterate.
pub fn assert_trace_ok(trace: &ConvergenceTrace, budget: &DesignBudget) {
    assert!(
        trace.max_decrease_nats() <= 1e-9,
        "trace decreased by {}",
        trace.max_decrease_nats()
    );
    assert_eq!(
        trace.feasibility_violations(budget.p_t, budget.p_e),
        0,
        "infeasible iterate"
    );
}

/// Optimum of the multi-block convex QP
/// `min sum_k Tr(V_k^H A_k V_k) - 2 Re Tr(B_k^H V_k)` subject to
/// `sum_k ||V_k||^2 <= p_t` and `sum_k 2 Re Tr(C_k^H V_k) >= rhs`,
/// computed from its homogenized semidefinite relaxation, which is tight
/// for a convex QCQP.
pub fn qp_oracle(blocks: &[(&CMat, &CMat, &CMat)], rhs: f64, p_t: f64) -> f64 {
    use secbeam::sdp::{solve_sdp, SdpProblem, SdpStatus, Sense};
    let sizes: Vec<usize> = blocks.iter().map(|(_, b, _)| b.rows() * b.cols()).collect();
    let nv: usize = sizes.iter().sum();
    let mut q = CMat::zeros(nv + 1, nv + 1);
    let mut lin = CMat::zeros(nv + 1, nv + 1);
    let mut off = 0;
    for ((a, b, c), &sz) in blocks.iter().zip(&sizes) {
        q.set_block(off, off, &a.block_diag_repeat(b.cols()));
        for (i, (&bi, &ci)) in b.vec().iter().zip(c.vec().iter()).enumerate() {
            q[(off + i, nv)] = -bi;
            q[(nv, off + i)] = -bi.conj();
            lin[(off + i, nv)] = ci;
            lin[(nv, off + i)] = ci.conj();
        }
        off += sz;
    }
    let mut corner = CMat::zeros(nv + 1, nv + 1);
    corner[(nv, nv)] = C64::new(1.0, 0.0);
    let mut power = CMat::identity(nv + 1);
    power[(nv, nv)] = C64::new(0.0, 0.0);
    let p = SdpProblem::new(q)
        .unwrap()
        .with(corner, Sense::Eq, 1.0)
        .unwrap()
        .with(power, Sense::Le, p_t)
        .unwrap()
        .with(lin, Sense::Ge, rhs)
        .unwrap();
    let sol = solve_sdp(&p).unwrap();
    assert_eq!(sol.status, SdpStatus::Optimal);
    sol.objective
}

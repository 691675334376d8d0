mod common;

use common::*;
use proptest::prelude::*;
use secbeam::ibcd::*;
use secbeam::matcore::logdet_hpd;
use secbeam::model::{feasibility, harvested_power, secrecy_rate_nats};
use secbeam::{Beamformer, CMat, ChannelPair, DesignBudget, Error};

#[test]
fn wmmse_identities_on_random_instances() {
    let mut r = rng(20);
    for k in 0..200 {
        let n_t = 2 + k % 3;
        let d = 1 + k % n_t;
        let ch = unit_channel(&mut r, n_t, 1 + k % 3, 1 + (k / 3) % 3, 1.0);
        let v = cn_matrix(&mut r, n_t, d, 0.2 + (k % 5) as f64);
        let aux = update_aux(&ch, &v).unwrap();
        let c = secrecy_rate_nats(&ch, &v).unwrap();
        let f = objective_f(&ch, &v, &aux).unwrap();
        assert!((f - c).abs() <= 1e-9 * c.abs().max(1.0), "instance {k}: {f} vs {c}");
        let prod = aux.w_i.matmul(&mmse_matrix(&ch, &aux.u, &v));
        assert!((&prod - &CMat::identity(d)).max_abs() <= 1e-9, "instance {k}");
    }
}

#[test]
fn weights_are_local_maximizers() {
    let mut r = rng(21);
    let ch = unit_channel(&mut r, 3, 2, 2, 1.0);
    let v = cn_matrix(&mut r, 3, 2, 0.5);
    let aux = update_aux(&ch, &v).unwrap();
    let best = objective_f(&ch, &v, &aux).unwrap();
    for _ in 0..20 {
        let bump = random_psd(&mut r, 2, 1, 0.01);
        let mut a = aux.clone();
        a.w_i = &a.w_i + &bump;
        assert!(objective_f(&ch, &v, &a).unwrap() < best);
        let mut a = aux.clone();
        a.w_e = &a.w_e + &bump;
        assert!(objective_f(&ch, &v, &a).unwrap() < best);
        let mut a = aux.clone();
        a.u = &a.u + &cn_matrix(&mut r, 2, 2, 1e-4);
        assert!(objective_f(&ch, &v, &a).unwrap() < best);
    }
    // Zero beamformer with the closed-form weights.
    let z = CMat::zeros(3, 2);
    assert_eq!(objective_f(&ch, &z, &update_aux(&ch, &z).unwrap()).unwrap(), 0.0);
}

fn subproblem_instance(
    r: &mut impl rand::Rng,
    k: usize,
) -> (ChannelPair, DesignBudget, CMat, LinearizedSubproblem<f64>) {
    let n_t = 2 + k % 2;
    let d = 1 + k % 2;
    let ch = unit_channel(r, n_t, 2, 2, 1.0);
    let lmax = secbeam::matcore::eig_extremes(ch.gram_e()).unwrap().1;
    // Harvest targets from slack to nearly tight.
    let frac = [0.0, 0.2, 0.5, 0.8, 0.95][k % 5];
    let p_t = 0.5 + (k % 7) as f64;
    let b = DesignBudget::new(p_t, frac * 0.5 * p_t * lmax).unwrap();
    let v = naive_start(&ch, d, &b, r).unwrap().into_inner();
    let aux = update_aux(&ch, &v).unwrap();
    let sub = LinearizedSubproblem::new(&ch, &v, &aux, &b).unwrap();
    (ch, b, v, sub)
}

#[test]
fn bisection_matches_convex_oracle() {
    let mut r = rng(22);
    let eps = 1e-6;
    for k in 0..50 {
        let (_ch, b, v_tilde, sub) = subproblem_instance(&mut r, k);
        let sol = sub.solve(eps).unwrap();
        let got = sub.objective(&sol.v);
        let want = qp_oracle(&[(sub.a(), sub.b(), sub.c())], sub.rhs(), b.p_t);
        assert!((got - want).abs() <= 1e-5, "instance {k}: {got} vs oracle {want}");
        assert!(got <= sub.objective(&v_tilde) + 1e-12);

        let power = sol.v.fro_norm_sqr();
        assert!(power <= b.p_t * (1.0 + 1e-6));
        assert!(sub.linearized_eh(&sol.v) >= sub.rhs() * (1.0 - 1e-7));
        assert!((sol.lambda * (power - b.p_t)).abs() <= 1e-5 * b.p_t, "instance {k}");
        assert!(sol.lambda >= 0.0 && sol.mu >= 0.0);
        // The returned multiplier is the top of a bracket at most eps wide.
        if sol.lambda > 0.0 {
            let (below, _) = sub.point_at((sol.lambda - eps).max(0.0)).unwrap();
            assert!(below.fro_norm_sqr() >= b.p_t * (1.0 - 1e-9));
        }
    }
}

#[test]
fn power_is_nonincreasing_in_lambda() {
    let mut r = rng(23);
    for k in 0..10 {
        let (_, _, _, sub) = subproblem_instance(&mut r, k);
        let mut last = f64::INFINITY;
        for i in 0..60 {
            let lambda = 1e-3 * 1.3f64.powi(i);
            let (v, _) = sub.point_at(lambda).unwrap();
            let p = v.fro_norm_sqr();
            assert!(p <= last * (1.0 + 1e-12));
            last = p;
        }
    }
}

#[test]
fn unconstrained_stationary_point_is_returned_when_feasible() {
    let mut r = rng(24);
    let ch = unit_channel(&mut r, 2, 2, 2, 1.0);
    let b = DesignBudget::new(1e6, 0.0).unwrap();
    let v = naive_start(&ch, 2, &b, &mut r).unwrap().into_inner();
    let aux = update_aux(&ch, &v).unwrap();
    let sub = LinearizedSubproblem::new(&ch, &v, &aux, &b).unwrap();
    let sol = sub.solve(1e-6).unwrap();
    assert_eq!(sol.lambda, 0.0);
    assert_eq!(sol.bisection_steps, 0);
    let (v0, _) = sub.point_at(0.0).unwrap();
    assert_eq!(sol.v, v0);
}

#[test]
fn unreachable_linearization_is_reported() {
    let mut r = rng(25);
    let ch = unit_channel(&mut r, 3, 2, 2, 1.0);
    let b = DesignBudget::new(1.0, 0.1).unwrap();
    let zero = CMat::zeros(3, 1);
    let aux = update_aux(&ch, &zero).unwrap();
    let err = solve_linearized_subproblem(&ch, &zero, &aux, &b, 1e-6).unwrap_err();
    assert!(matches!(err, Error::UnreachableLinearization));
}

#[test]
fn identical_channels_keep_zero_rate() {
    let mut r = rng(26);
    let h = cn_matrix(&mut r, 2, 3, 1.0);
    let ch = ChannelPair::new(h.clone(), h, 1.0, 1.0, 0.5).unwrap();
    let b = DesignBudget::new(1.0, 0.1).unwrap();
    let v0 = warmstart(&ch, 2, &b, &mut r).unwrap();
    let (_, trace) = ibcd_solve(&ch, &b, &v0, &IbcdOptions::default()).unwrap();
    assert_trace_ok(&trace, &b);
    assert!(trace.iterations() <= 2);
    assert!(trace.rates_nats.iter().all(|&c| c.abs() < 1e-12));
}

#[test]
fn infeasible_start_is_rejected() {
    let mut r = rng(27);
    let ch = unit_channel(&mut r, 3, 2, 2, 1.0);
    let b = DesignBudget::new(1.0, 0.01).unwrap();
    let big = Beamformer::new(CMat::scaled_identity(3, 1.0)).unwrap();
    assert!(matches!(
        ibcd_solve(&ch, &b, &big, &IbcdOptions::default()),
        Err(Error::Precondition(_))
    ));
    let tiny = Beamformer::new(CMat::scaled_identity(3, 1e-6)).unwrap();
    assert!(matches!(
        ibcd_solve(&ch, &b, &tiny, &IbcdOptions::default()),
        Err(Error::Precondition(_))
    ));
}

#[test]
fn single_stream_setup_reaches_global_optimum_and_kkt() {
    let b = DesignBudget::from_dbm(10.0, -40.0).unwrap();
    let opts = IbcdOptions::with_eps(1e-13);
    let mut r = rng(28);
    let mut runs = 0;
    while runs < 5 {
        let ch = sim_channel(&mut r, 4, 2, 2);
        if !feasibility(&ch, &b).feasible {
            continue;
        }
        let opt = secbeam::global::solve_single_stream(&ch, &b).unwrap();
        for _ in 0..2 {
            let v0 = warmstart(&ch, 1, &b, &mut r).unwrap();
            let (v, trace) = ibcd_solve(&ch, &b, &v0, &opts).unwrap();
            assert_trace_ok(&trace, &b);
            assert!(trace.converged);
            assert!((trace.final_rate_bits() - opt.rate).abs() <= 1e-3);
            assert!(kkt_residual(&ch, &b, v.v(), trace.lambda, trace.mu).unwrap() <= 1e-4);
        }
        runs += 1;
    }
}

#[test]
fn warmstart_postconditions() {
    let mut r = rng(29);
    for k in 0..20 {
        let ch = sim_channel(&mut r, 4, 2, 2);
        let b = DesignBudget::from_dbm(10.0, if k % 2 == 0 { -40.0 } else { -27.0 }).unwrap();
        if !feasibility(&ch, &b).feasible {
            continue;
        }
        for d in 1..=3 {
            let v = warmstart(&ch, d, &b, &mut r).unwrap();
            assert!((v.power() - b.p_t).abs() <= 1e-9 * b.p_t);
            assert!(harvested_power(&ch, &v.covariance()).unwrap() >= b.p_e);
            let fb = fallback_start(&ch, d, &b).unwrap();
            assert!(fb.power() <= b.p_t * (1.0 + 1e-12));
            assert!(harvested_power(&ch, &fb.covariance()).unwrap() >= b.p_e);
        }
    }
    let one = CMat::from_vec(1, 1, vec![secbeam::C64::new(2.0, 1.0)]).unwrap();
    let ch = ChannelPair::new(one.clone(), one.scale(0.5), 1.0, 1.0, 0.5).unwrap();
    let b = DesignBudget::new(3.0, 0.1).unwrap();
    let v = warmstart(&ch, 1, &b, &mut r).unwrap();
    assert!((v.v()[(0, 0)].norm() - 3.0f64.sqrt()).abs() < 1e-12);
}

#[test]
fn warmstart_needs_no_more_iterations_than_naive_start() {
    let b = DesignBudget::from_dbm(10.0, -40.0).unwrap();
    let opts = IbcdOptions::default();
    let mut r = rng(30);
    let (mut wins, mut total) = (0, 0);
    while total < 50 {
        let ch = sim_channel(&mut r, 4, 2, 2);
        if !feasibility(&ch, &b).feasible {
            continue;
        }
        let opt = secbeam::global::solve_single_stream(&ch, &b).unwrap();
        let (_, tw) = ibcd_solve(&ch, &b, &warmstart(&ch, 1, &b, &mut r).unwrap(), &opts).unwrap();
        let (_, tn) = ibcd_solve(&ch, &b, &naive_start(&ch, 1, &b, &mut r).unwrap(), &opts).unwrap();
        assert_trace_ok(&tw, &b);
        assert_trace_ok(&tn, &b);
        let reached = (tw.final_rate_bits() - opt.rate).abs() <= 1e-3;
        if reached && tw.iterations() <= tn.iterations() {
            wins += 1;
        }
        total += 1;
    }
    assert!(wins * 10 >= total * 8, "warmstart won {wins} of {total}");
}

#[test]
fn kkt_residual_flags_non_stationary_points() {
    let mut r = rng(31);
    let ch = unit_channel(&mut r, 3, 2, 2, 1.0);
    let b = DesignBudget::new(1.0, 0.0).unwrap();
    let v = naive_start(&ch, 2, &b, &mut r).unwrap();
    let res = kkt_residual(&ch, &b, v.v(), 0.0, 0.0).unwrap();
    assert!(res > 0.0);
    // A scaled copy outside the budget shows up through the primal term.
    let big = v.v().scale(2.0);
    assert!(kkt_residual(&ch, &b, &big, 0.0, 0.0).unwrap() >= 3.0 - 1e-12);
    assert!(logdet_hpd(&CMat::identity(2)).unwrap() == 0.0);
}

#[test]
fn trace_csv_layout() {
    let mut r = rng(32);
    let ch = unit_channel(&mut r, 3, 2, 2, 1.0);
    let b = DesignBudget::new(1.0, 0.05).unwrap();
    let v0 = warmstart(&ch, 2, &b, &mut r).unwrap();
    let (_, trace) = ibcd_solve(&ch, &b, &v0, &IbcdOptions::default()).unwrap();
    let csv = trace.to_csv();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("iter,rate_bits,power_w,eh_margin_w"));
    assert_eq!(lines.count(), trace.rates_bits.len());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn traces_are_monotone_and_feasible(seed in any::<u64>(), d in 1usize..4, frac in 0.0f64..0.9) {
        let mut r = rng(seed);
        let ch = unit_channel(&mut r, 3, 2, 2, 1.0);
        let lmax = secbeam::matcore::eig_extremes(ch.gram_e()).unwrap().1;
        let b = DesignBudget::new(2.0, frac * 0.5 * 2.0 * lmax).unwrap();
        let v0 = if seed % 2 == 0 {
            warmstart(&ch, d, &b, &mut r).unwrap()
        } else {
            naive_start(&ch, d, &b, &mut r).unwrap()
        };
        let (_, trace) = ibcd_solve(&ch, &b, &v0, &IbcdOptions::default()).unwrap();
        prop_assert!(trace.max_decrease_nats() <= 1e-9);
        prop_assert_eq!(trace.feasibility_violations(b.p_t, b.p_e), 0);
    }
}

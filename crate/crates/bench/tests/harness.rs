use std::process::Command;

use secbeam::{CMat, ChannelPair, Error, C64};
use secbeam_bench::{run_sweep, run_trace, Axis, Method, ScenarioConfig};

fn example_channels() -> ChannelPair {
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

fn single_stream_scenario() -> ScenarioConfig {
    ScenarioConfig {
        d: 1,
        p_t_dbm: 10.0,
        p_e_dbm: -40.0,
        seeds: vec![5],
        ..ScenarioConfig::default()
    }
}

#[test]
fn single_stream_traces_reach_the_global_optimum() {
    let cfg = single_stream_scenario();
    let ch = secbeam_bench::gen_channels(&cfg, 5).unwrap();
    let run = run_trace(&cfg, &ch, 3).unwrap();
    let opt = run.reference_bits.expect("d = 1 has a reference");
    assert_eq!(run.traces.len(), 3);
    for t in &run.traces {
        assert!(t.max_decrease_nats() <= 1e-9);
        assert!(
            (t.final_rate_bits() - opt).abs() <= 1e-3,
            "{} vs {opt}",
            t.final_rate_bits()
        );
    }
}

#[test]
fn full_stream_traces_reach_the_global_optimum() {
    let cfg = ScenarioConfig {
        n_t: 2,
        n_i: 2,
        n_e: 2,
        d: 2,
        p_t_dbm: 20.0,
        p_e_dbm: -30.0,
        ..ScenarioConfig::default()
    };
    // The example channels are normalized to unit noise, so the budget is
    // read as plain watts after the dBm conversion.
    let run = run_trace(&cfg, &example_channels(), 2).unwrap();
    let opt = run.reference_bits.expect("degraded channel has a reference");
    for t in &run.traces {
        assert!(t.max_decrease_nats() <= 1e-9);
        assert!(
            (t.final_rate_bits() - opt).abs() <= 1e-3,
            "{} vs {opt}",
            t.final_rate_bits()
        );
    }
}

#[test]
fn trace_rejects_closed_form_methods_and_infeasible_scenarios() {
    let mut cfg = single_stream_scenario();
    let ch = secbeam_bench::gen_channels(&cfg, 5).unwrap();
    cfg.method = Method::SingleStream;
    assert!(matches!(run_trace(&cfg, &ch, 1), Err(Error::Invalid(_))));
    cfg.method = Method::Ibcd;
    cfg.p_e_dbm = 20.0;
    assert!(matches!(run_trace(&cfg, &ch, 1), Err(Error::Infeasible { .. })));
}

fn small_sweep() -> (ScenarioConfig, Vec<f64>) {
    let cfg = ScenarioConfig {
        n_t: 3,
        d: 1,
        p_e_dbm: -40.0,
        seeds: vec![11],
        ..ScenarioConfig::default()
    };
    (cfg, vec![10.0, 20.0])
}

#[test]
fn sweep_is_deterministic_across_thread_counts() {
    let (cfg, values) = small_sweep();
    let arms = [Method::Ibcd, Method::AnIbcd];
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| run_sweep(&cfg, Axis::PtDbm, &values, 4, &arms).unwrap())
    };
    let a = run(1);
    let b = run(3);
    assert_eq!(a, b);
    assert_eq!(a.to_csv(), b.to_csv());
}

#[test]
fn sweep_accounting_and_pairing() {
    let (mut cfg, _) = small_sweep();
    cfg.p_t_dbm = 10.0;
    // The top harvest target is infeasible for most draws.
    let values = [-40.0, -30.0];
    let arms = [Method::SingleStream, Method::Ibcd];
    let res = run_sweep(&cfg, Axis::PeDbm, &values, 6, &arms).unwrap();
    for p in 0..values.len() {
        assert_eq!(res.n_used[p] + res.n_skipped[p], 6);
        let used: Vec<bool> = res.per_seed_rates[0][p].iter().map(Option::is_some).collect();
        let used_b: Vec<bool> = res.per_seed_rates[1][p].iter().map(Option::is_some).collect();
        assert_eq!(used, used_b);
        assert_eq!(used.iter().filter(|&&u| u).count(), res.n_used[p]);
        for (g, l) in res.per_seed_rates[0][p].iter().zip(&res.per_seed_rates[1][p]) {
            if let (Some(g), Some(l)) = (g, l) {
                // the global optimum bounds the local solver
                assert!(*l <= g + 1e-6);
            }
        }
    }
    assert!(res.n_skipped[1] > 0);
    let csv = res.to_csv();
    assert!(csv
        .starts_with("axis_value,mean_rate_bits,n_used,n_skipped,mean_rate_bits_single_stream,mean_rate_bits_ibcd\n"));
    assert_eq!(csv.lines().count(), 3);
}

#[test]
fn antenna_axis_and_argument_checks() {
    let cfg = ScenarioConfig {
        d: 1,
        p_t_dbm: 20.0,
        p_e_dbm: -40.0,
        ..ScenarioConfig::default()
    };
    let res = run_sweep(&cfg, Axis::NT, &[2.0, 4.0], 2, &[Method::SingleStream]).unwrap();
    assert_eq!(res.values, vec![2.0, 4.0]);
    assert!(res.mean(Method::SingleStream).is_some());
    assert!(res.mean(Method::Ibcd).is_none());
    assert!(run_sweep(&cfg, Axis::PtDbm, &[20.0, 10.0], 2, &[Method::Ibcd]).is_err());
    assert!(run_sweep(&cfg, Axis::PtDbm, &[10.0], 2, &[]).is_err());
    let too_few = ScenarioConfig { d: 3, ..cfg };
    assert!(run_sweep(&too_few, Axis::NT, &[2.0], 1, &[Method::Ibcd]).is_err());
}

fn cli(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_secbeam")).args(args).output().unwrap();
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

#[test]
fn cli_round_trip_and_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let ch = dir.path().join("ch.json");
    let ch_s = ch.to_str().unwrap();
    let (code, _, err) = cli(&["gen-channels", "--seed", "3", "--out", ch_s]);
    assert_eq!(code, 0, "{err}");

    let sol = dir.path().join("sol.json");
    let (code, _, err) = cli(&[
        "solve",
        "--channels",
        ch_s,
        "--streams",
        "1",
        "--pt-dbm",
        "10",
        "--pe-dbm",
        "-40",
        "--method",
        "single-stream",
        "--out",
        sol.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{err}");
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&sol).unwrap()).unwrap();
    assert_eq!(report["method"], "single_stream");
    assert!(report["rate_bits"].as_f64().unwrap() > 0.0);
    assert!(report["power_w"].as_f64().unwrap() <= 0.01 * (1.0 + 1e-8));

    let (code, _, _) = cli(&["solve", "--channels", ch_s, "--pt-dbm", "10", "--pe-dbm", "10"]);
    assert_eq!(code, 2);

    // A config file supplies the scenario and flags override it.
    let cfg = dir.path().join("cfg.json");
    std::fs::write(
        &cfg,
        r#"{"d": 1, "p_t_dbm": 10, "p_e_dbm": 10, "method": "single_stream"}"#,
    )
    .unwrap();
    let (code, _, _) = cli(&["solve", "--config", cfg.to_str().unwrap(), "--seed", "3"]);
    assert_eq!(code, 2);
    let (code, out, err) = cli(&[
        "solve",
        "--config",
        cfg.to_str().unwrap(),
        "--seed",
        "3",
        "--pe-dbm",
        "-40",
    ]);
    assert_eq!(code, 0, "{err}");
    assert!(out.contains("\"rate_bits\""));

    // The full-stream solver refuses a channel whose gram difference is indefinite.
    let (code, _, err) = cli(&[
        "solve",
        "--channels",
        ch_s,
        "--streams",
        "4",
        "--pe-dbm",
        "-40",
        "--method",
        "full-stream",
    ]);
    assert_eq!(code, 3, "{err}");

    let (code, out, err) = cli(&[
        "trace",
        "--seed",
        "3",
        "--streams",
        "1",
        "--pt-dbm",
        "10",
        "--pe-dbm",
        "-40",
        "--starts",
        "2",
    ]);
    assert_eq!(code, 0, "{err}");
    assert!(out.starts_with("start,iter,rate_bits,power_w,eh_margin_w\n"));
    assert!(err.contains("global optimum"));
    let trace_dir = dir.path().join("traces");
    let (code, _, _) = cli(&[
        "trace",
        "--seed",
        "3",
        "--streams",
        "2",
        "--pt-dbm",
        "10",
        "--pe-dbm",
        "-40",
        "--method",
        "an-ibcd",
        "--starts",
        "2",
        "--out-dir",
        trace_dir.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let first = std::fs::read_to_string(trace_dir.join("start_1.csv")).unwrap();
    assert!(first.starts_with("iter,rate_bits,power_w,eh_margin_w,an_power_w\n"));

    let (code, out, err) = cli(&[
        "sweep",
        "--axis",
        "pt-dbm",
        "--values",
        "10,20",
        "--channels-per-point",
        "2",
        "--streams",
        "1",
        "--pe-dbm",
        "-40",
        "--method",
        "single-stream",
    ]);
    assert_eq!(code, 0, "{err}");
    assert_eq!(out.lines().count(), 3);
}

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use secbeam::anopt::{an_ibcd_solve, an_warmstart};
use secbeam::global::{gram_difference_is_psd, solve_full_stream, solve_single_stream};
use secbeam::ibcd::{ibcd_solve, warmstart, IbcdOptions};
use secbeam::model::{an_secrecy_rate, feasibility, secrecy_rate};
use secbeam::{CMat, ChannelPair, ConvergenceTrace, DesignBudget, Error, Result};

use crate::scenario::{gen_channels, instance_seed, Method, ScenarioConfig};

/// Outcome of one solve.
#[derive(Clone, Debug)]
pub struct Solved {
    pub method: Method,
    pub rate_bits: f64,
    pub v: CMat,
    /// Noise factor; `None` for the noise-free methods.
    pub v_e: Option<CMat>,
    pub trace: Option<ConvergenceTrace>,
}

fn opts(cfg: &ScenarioConfig) -> IbcdOptions<f64> {
    IbcdOptions::with_eps(cfg.eps)
}

/// Solves one instance with `cfg.method`; `rng` seeds the warm starts.
pub fn solve_instance(cfg: &ScenarioConfig, ch: &ChannelPair, rng: &mut ChaCha8Rng) -> Result<Solved> {
    let budget = cfg.budget()?;
    feasibility(ch, &budget).into_result()?;
    match cfg.method {
        Method::SingleStream => {
            let s = solve_single_stream(ch, &budget)?;
            Ok(Solved {
                method: cfg.method,
                rate_bits: s.rate,
                v: s.v_matrix(),
                v_e: None,
                trace: None,
            })
        }
        Method::FullStream => {
            let s = solve_full_stream(ch, &budget, cfg.eps)?;
            Ok(Solved {
                method: cfg.method,
                rate_bits: s.rate,
                v: s.v,
                v_e: None,
                trace: None,
            })
        }
        Method::Ibcd => {
            let init = warmstart(ch, cfg.d, &budget, rng)?;
            let (bf, trace) = ibcd_solve(ch, &budget, &init, &opts(cfg))?;
            Ok(Solved {
                method: cfg.method,
                rate_bits: secrecy_rate(ch, &bf)?,
                v: bf.into_inner(),
                v_e: None,
                trace: Some(trace),
            })
        }
        Method::AnIbcd => {
            let init = an_warmstart(ch, cfg.d, &budget, rng)?;
            let (bf, trace) = an_ibcd_solve(ch, &budget, &init, &opts(cfg))?;
            Ok(Solved {
                method: cfg.method,
                rate_bits: an_secrecy_rate(ch, &bf)?,
                v: bf.v().clone(),
                v_e: Some(bf.v_e().clone()),
                trace: Some(trace),
            })
        }
    }
}

/// Traces from several warm starts plus the global optimum when one of
/// the global solvers applies.
#[derive(Clone, Debug)]
pub struct TraceRun {
    pub traces: Vec<ConvergenceTrace>,
    pub reference_bits: Option<f64>,
}

/// Global optimum for `d = 1` or for full streams on a degraded channel.
pub fn reference_rate(ch: &ChannelPair, budget: &DesignBudget, d: usize, tol_nats: f64) -> Result<Option<f64>> {
    if d == 1 {
        return Ok(Some(solve_single_stream(ch, budget)?.rate));
    }
    if d == ch.n_t() && gram_difference_is_psd(ch)? {
        return Ok(Some(solve_full_stream(ch, budget, tol_nats)?.rate));
    }
    Ok(None)
}

/// Runs `n_starts` warm starts of the iterative solver on `ch`.
pub fn run_trace(cfg: &ScenarioConfig, ch: &ChannelPair, n_starts: usize) -> Result<TraceRun> {
    cfg.validate()?;
    if !matches!(cfg.method, Method::Ibcd | Method::AnIbcd) {
        return Err(Error::Invalid(format!(
            "traces need an iterative method, got {}",
            cfg.method
        )));
    }
    let budget = cfg.budget()?;
    feasibility(ch, &budget).into_result()?;
    let master = cfg.master_seed();
    let traces = (0..n_starts)
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(instance_seed(master, k as u64));
            solve_instance(cfg, ch, &mut rng).map(|s| s.trace.expect("iterative methods record a trace"))
        })
        .collect::<Result<Vec<_>>>()?;
    let reference_bits = reference_rate(ch, &budget, cfg.d, 1e-6)?;
    Ok(TraceRun { traces, reference_bits })
}

/// Swept scenario parameter.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    PtDbm,
    PeDbm,
    NT,
}

impl Axis {
    pub fn name(self) -> &'static str {
        match self {
            Axis::PtDbm => "pt_dbm",
            Axis::PeDbm => "pe_dbm",
            Axis::NT => "n_t",
        }
    }

    fn apply(self, cfg: &mut ScenarioConfig, value: f64) {
        match self {
            Axis::PtDbm => cfg.p_t_dbm = value,
            Axis::PeDbm => cfg.p_e_dbm = value,
            Axis::NT => cfg.n_t = value.round() as usize,
        }
    }
}

impl std::str::FromStr for Axis {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.replace('-', "_").to_ascii_lowercase().as_str() {
            "pt_dbm" | "p_t_dbm" | "pt" => Ok(Axis::PtDbm),
            "pe_dbm" | "p_e_dbm" | "pe" => Ok(Axis::PeDbm),
            "n_t" | "nt" => Ok(Axis::NT),
            other => Err(format!("unknown sweep axis `{other}`")),
        }
    }
}

/// Averages per axis value and solver arm.
///
/// Every arm sees the same channels. An instance is skipped for all arms
/// when it is infeasible, when any arm fails, or when any arm ends at a
/// nonpositive rate, so arm means stay paired.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub axis: Axis,
    pub values: Vec<f64>,
    pub arms: Vec<Method>,
    /// `[arm][point]`, over used instances only.
    pub mean_rate_bits: Vec<Vec<f64>>,
    /// `[arm][point][instance]`; `None` where the instance was skipped.
    pub per_seed_rates: Vec<Vec<Vec<Option<f64>>>>,
    pub n_used: Vec<usize>,
    pub n_skipped: Vec<usize>,
}

impl SweepResult {
    pub fn mean(&self, arm: Method) -> Option<&[f64]> {
        let k = self.arms.iter().position(|&a| a == arm)?;
        Some(&self.mean_rate_bits[k])
    }

    /// `axis_value,mean_rate_bits,n_used,n_skipped` then one mean column
    /// per arm. `mean_rate_bits` repeats the first arm.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("axis_value,mean_rate_bits,n_used,n_skipped");
        for a in &self.arms {
            out.push_str(&format!(",mean_rate_bits_{a}"));
        }
        out.push('\n');
        for (p, v) in self.values.iter().enumerate() {
            let first = self.mean_rate_bits.first().map_or(f64::NAN, |m| m[p]);
            out.push_str(&format!("{v},{first:e},{},{}", self.n_used[p], self.n_skipped[p]));
            for m in &self.mean_rate_bits {
                out.push_str(&format!(",{:e}", m[p]));
            }
            out.push('\n');
        }
        out
    }
}

fn solve_arms(cfg: &ScenarioConfig, arms: &[Method], point: usize, instance: usize) -> Option<Vec<f64>> {
    let master = cfg.master_seed();
    let ch = gen_channels(cfg, instance_seed(master, instance as u64)).ok()?;
    if !feasibility(&ch, &cfg.budget().ok()?).feasible {
        return None;
    }
    let mut rates = Vec::with_capacity(arms.len());
    for (k, &m) in arms.iter().enumerate() {
        let stream = ((k as u64 + 1) << 48) | ((point as u64) << 32) | instance as u64;
        let mut rng = ChaCha8Rng::seed_from_u64(instance_seed(master, stream));
        let arm_cfg = ScenarioConfig {
            method: m,
            ..cfg.clone()
        };
        let r = solve_instance(&arm_cfg, &ch, &mut rng).ok()?.rate_bits;
        if !(r > 0.0) {
            return None;
        }
        rates.push(r);
    }
    Some(rates)
}

/// Sweeps `axis` over `values` with `n_channels` channel draws per point.
/// Instance `i` uses the same channel seed at every point. Points and
/// instances run in parallel; results do not depend on scheduling.
pub fn run_sweep(
    cfg: &ScenarioConfig,
    axis: Axis,
    values: &[f64],
    n_channels: usize,
    arms: &[Method],
) -> Result<SweepResult> {
    if values.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::Invalid("sweep values must be strictly ascending".into()));
    }
    if arms.is_empty() {
        return Err(Error::Invalid("a sweep needs at least one arm".into()));
    }
    let configs = values
        .iter()
        .map(|&v| {
            let mut c = cfg.clone();
            axis.apply(&mut c, v);
            c.validate().map(|_| c)
        })
        .collect::<Result<Vec<_>>>()?;

    let tasks: Vec<(usize, usize)> = (0..values.len())
        .flat_map(|p| (0..n_channels).map(move |i| (p, i)))
        .collect();
    let results: Vec<Option<Vec<f64>>> = tasks
        .par_iter()
        .map(|&(p, i)| solve_arms(&configs[p], arms, p, i))
        .collect();

    let mut per_seed_rates = vec![vec![vec![None; n_channels]; values.len()]; arms.len()];
    let mut n_used = vec![0; values.len()];
    for (&(p, i), r) in tasks.iter().zip(&results) {
        if let Some(rates) = r {
            n_used[p] += 1;
            for (k, &x) in rates.iter().enumerate() {
                per_seed_rates[k][p][i] = Some(x);
            }
        }
    }
    let mean_rate_bits = per_seed_rates
        .iter()
        .map(|arm| {
            arm.iter()
                .zip(&n_used)
                .map(|(pt, &n)| pt.iter().flatten().sum::<f64>() / n as f64)
                .collect()
        })
        .collect();
    let n_skipped = n_used.iter().map(|&u| n_channels - u).collect();
    Ok(SweepResult {
        axis,
        values: values.to_vec(),
        arms: arms.to_vec(),
        mean_rate_bits,
        per_seed_rates,
        n_used,
        n_skipped,
    })
}

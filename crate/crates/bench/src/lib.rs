//! Simulation harness for the `secbeam` solvers: Rayleigh channel
//! generation, convergence traces and parameter sweeps with paired solver
//! arms. The `secbeam` binary wraps these with a CLI.

// `!(x > 0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod experiment;
mod scenario;

pub use experiment::{reference_rate, run_sweep, run_trace, solve_instance, Axis, Solved, SweepResult, TraceRun};
pub use scenario::{gen_channels, instance_seed, Method, ScenarioConfig};

use serde::{Deserialize, Serialize};

use secbeam::model::{harvested_power, MatrixJson};
use secbeam::{ChannelPair, Result};

/// JSON body written by `secbeam solve`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SolveReport {
    pub method: Method,
    pub rate_bits: f64,
    pub power_w: f64,
    pub harvested_w: f64,
    pub iterations: Option<usize>,
    pub v: MatrixJson,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub v_e: Option<MatrixJson>,
}

impl SolveReport {
    pub fn new(ch: &ChannelPair, s: &Solved) -> Result<Self> {
        let mut cov = s.v.outer_gram();
        if let Some(v_e) = &s.v_e {
            cov = &cov + &v_e.outer_gram();
        }
        Ok(Self {
            method: s.method,
            rate_bits: s.rate_bits,
            power_w: cov.re_trace(),
            harvested_w: harvested_power(ch, &cov)?,
            iterations: s.trace.as_ref().map(|t| t.iterations()),
            v: MatrixJson::from_matrix(&s.v),
            v_e: s.v_e.as_ref().map(MatrixJson::from_matrix),
        })
    }
}

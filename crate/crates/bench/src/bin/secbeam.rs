use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use secbeam::model::ChannelPairJson;
use secbeam::ChannelPair;
use secbeam_bench::{
    gen_channels, instance_seed, run_sweep, run_trace, solve_instance, Axis, Method, ScenarioConfig, SolveReport,
};

#[derive(Parser)]
#[command(name = "secbeam", version, about = "Secrecy-rate beamforming experiments")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Solve one instance and write the beamformer as JSON.
    Solve {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Channel file from `gen-channels`; otherwise drawn from --seed.
        #[arg(long)]
        channels: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Convergence traces from several warm starts, one CSV per start.
    Trace {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[arg(long)]
        channels: Option<PathBuf>,
        #[arg(long, default_value_t = 3)]
        starts: usize,
        /// Directory for `start_<k>.csv`; without it all starts go to stdout
        /// with a leading `start` column.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Average rates over random channels along one parameter.
    Sweep {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[arg(long)]
        axis: Axis,
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<f64>,
        #[arg(long, default_value_t = 20)]
        channels_per_point: usize,
        /// Solver arms sharing each channel; defaults to --method.
        #[arg(long, value_delimiter = ',')]
        arms: Vec<Method>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the full per-instance result as JSON.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Draw a channel pair and write it as JSON.
    GenChannels {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Scenario flags. A JSON config supplies the base; flags override it.
#[derive(Args)]
struct ScenarioArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    nt: Option<usize>,
    #[arg(long)]
    ni: Option<usize>,
    #[arg(long)]
    ne: Option<usize>,
    #[arg(long)]
    streams: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    pt_dbm: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pe_dbm: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    sigma2_dbm: Option<f64>,
    #[arg(long)]
    zeta: Option<f64>,
    #[arg(long)]
    pathloss_db: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    method: Option<Method>,
    #[arg(long)]
    eps: Option<f64>,
}

impl ScenarioArgs {
    fn resolve(&self) -> Result<ScenarioConfig> {
        let mut cfg = match &self.config {
            Some(p) => {
                let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
                serde_json::from_str(&text).with_context(|| format!("parsing {}", p.display()))?
            }
            None => ScenarioConfig::default(),
        };
        macro_rules! set {
            ($($flag:ident => $field:ident),*) => {
                $(if let Some(x) = self.$flag { cfg.$field = x; })*
            };
        }
        set!(nt => n_t, ni => n_i, ne => n_e, streams => d, pt_dbm => p_t_dbm, pe_dbm => p_e_dbm,
             sigma2_dbm => sigma2_dbm, zeta => zeta, pathloss_db => pathloss_db, method => method, eps => eps);
        if let Some(s) = self.seed {
            cfg.seeds = vec![s];
        }
        Ok(cfg)
    }
}

fn load_channels(cfg: &mut ScenarioConfig, file: Option<&Path>) -> Result<ChannelPair> {
    let ch = match file {
        Some(p) => {
            let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            let j: ChannelPairJson = serde_json::from_str(&text).with_context(|| format!("parsing {}", p.display()))?;
            j.to_channel()?
        }
        None => gen_channels(cfg, cfg.master_seed())?,
    };
    cfg.n_t = ch.n_t();
    cfg.n_i = ch.n_i();
    cfg.n_e = ch.n_e();
    cfg.validate()?;
    Ok(ch)
}

fn emit(out: Option<&Path>, body: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, body).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.cmd {
        Cmd::Solve {
            scenario,
            channels,
            out,
        } => {
            let mut cfg = scenario.resolve()?;
            let ch = load_channels(&mut cfg, channels.as_deref())?;
            let mut rng = ChaCha8Rng::seed_from_u64(instance_seed(cfg.master_seed(), 0));
            let solved = solve_instance(&cfg, &ch, &mut rng)?;
            let report = SolveReport::new(&ch, &solved)?;
            emit(out.as_deref(), &(serde_json::to_string_pretty(&report)? + "\n"))
        }
        Cmd::Trace {
            scenario,
            channels,
            starts,
            out_dir,
        } => {
            let mut cfg = scenario.resolve()?;
            let ch = load_channels(&mut cfg, channels.as_deref())?;
            let run = run_trace(&cfg, &ch, starts)?;
            if let Some(r) = run.reference_bits {
                eprintln!("global optimum: {r:.6} bits");
            }
            match out_dir {
                Some(dir) => {
                    fs::create_dir_all(&dir)?;
                    for (k, t) in run.traces.iter().enumerate() {
                        emit(Some(&dir.join(format!("start_{k}.csv"))), &t.to_csv())?;
                    }
                }
                None => {
                    let mut body = String::new();
                    for (k, t) in run.traces.iter().enumerate() {
                        for (i, line) in t.to_csv().lines().enumerate() {
                            if i == 0 && k > 0 {
                                continue;
                            }
                            let head = if i == 0 { "start".to_string() } else { k.to_string() };
                            body.push_str(&format!("{head},{line}\n"));
                        }
                    }
                    emit(None, &body)?;
                }
            }
            Ok(())
        }
        Cmd::Sweep {
            scenario,
            axis,
            values,
            channels_per_point,
            arms,
            out,
            json,
        } => {
            let cfg = scenario.resolve()?;
            let arms = if arms.is_empty() { vec![cfg.method] } else { arms };
            let res = run_sweep(&cfg, axis, &values, channels_per_point, &arms)?;
            if let Some(p) = json {
                emit(Some(&p), &serde_json::to_string_pretty(&res)?)?;
            }
            emit(out.as_deref(), &res.to_csv())
        }
        Cmd::GenChannels { scenario, out } => {
            let cfg = scenario.resolve()?;
            let ch = gen_channels(&cfg, cfg.master_seed())?;
            let body = serde_json::to_string_pretty(&ChannelPairJson::from_channel(&ch))?;
            emit(out.as_deref(), &(body + "\n"))
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            match e.downcast_ref::<secbeam::Error>() {
                Some(secbeam::Error::Infeasible { .. }) => ExitCode::from(2),
                Some(_) => ExitCode::from(3),
                None => ExitCode::FAILURE,
            }
        }
    }
}

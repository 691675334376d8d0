use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use secbeam::model::dbm_to_watts;
use secbeam::{CMat, ChannelPair, DesignBudget, Error, Result, C64};

/// Which solver a run uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    SingleStream,
    FullStream,
    Ibcd,
    AnIbcd,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::SingleStream => "single_stream",
            Method::FullStream => "full_stream",
            Method::Ibcd => "ibcd",
            Method::AnIbcd => "an_ibcd",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.replace('-', "_").as_str() {
            "single_stream" => Ok(Method::SingleStream),
            "full_stream" => Ok(Method::FullStream),
            "ibcd" => Ok(Method::Ibcd),
            "an_ibcd" => Ok(Method::AnIbcd),
            other => Err(format!("unknown method `{other}`")),
        }
    }
}

/// One simulation scenario. Powers are in dBm, path loss in dB.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ScenarioConfig {
    pub n_t: usize,
    pub n_i: usize,
    pub n_e: usize,
    pub d: usize,
    pub p_t_dbm: f64,
    pub p_e_dbm: f64,
    pub sigma2_dbm: f64,
    pub zeta: f64,
    pub pathloss_db: f64,
    pub seeds: Vec<u64>,
    pub method: Method,
    /// Stopping tolerance in nats for the iterative solvers.
    pub eps: f64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            n_t: 4,
            n_i: 2,
            n_e: 2,
            d: 2,
            p_t_dbm: 20.0,
            p_e_dbm: -30.0,
            sigma2_dbm: -50.0,
            zeta: 0.5,
            pathloss_db: 50.0,
            seeds: vec![0],
            method: Method::Ibcd,
            eps: 1e-6,
        }
    }
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_t == 0 || self.n_i == 0 || self.n_e == 0 {
            return Err(Error::Invalid("antenna counts must be at least 1".into()));
        }
        if self.d == 0 || self.d > self.n_t {
            return Err(Error::Invalid(format!(
                "stream count {} outside 1..={}",
                self.d, self.n_t
            )));
        }
        if !(self.eps > 0.0) {
            return Err(Error::Invalid(format!("tolerance {} must be positive", self.eps)));
        }
        Ok(())
    }

    pub fn budget(&self) -> Result<DesignBudget> {
        DesignBudget::from_dbm(self.p_t_dbm, self.p_e_dbm)
    }

    /// Per-entry channel variance `10^(-pathloss/10)`.
    pub fn channel_variance(&self) -> f64 {
        10f64.powf(-self.pathloss_db / 10.0)
    }

    pub fn master_seed(&self) -> u64 {
        self.seeds.first().copied().unwrap_or(0)
    }
}

/// Seed of instance `index` under `master`, mixed with SplitMix64 so
/// neighbouring indices give unrelated streams.
pub fn instance_seed(master: u64, index: u64) -> u64 {
    let mut z = master ^ index.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn cscg(rng: &mut ChaCha8Rng, rows: usize, cols: usize, var: f64) -> CMat {
    let s = (var / 2.0).sqrt();
    CMat::from_fn(rows, cols, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        C64::new(re * s, im * s)
    })
}

/// Rayleigh-fading channel pair: raw entries i.i.d. `CN(0, 10^(-PL/10))`,
/// IR channel drawn first.
pub fn gen_channels(cfg: &ScenarioConfig, seed: u64) -> Result<ChannelPair> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let var = cfg.channel_variance();
    let h_i = cscg(&mut rng, cfg.n_i, cfg.n_t, var);
    let h_e = cscg(&mut rng, cfg.n_e, cfg.n_t, var);
    let s2 = dbm_to_watts(cfg.sigma2_dbm);
    ChannelPair::new(h_i, h_e, s2, s2, cfg.zeta)
}

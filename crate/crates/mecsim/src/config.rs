//! System parameters and the on-disk configuration format.
//!
//! All physical quantities carry their unit in the field name
//! (`total_bandwidth_hz`, `user_cycles_per_sec`, ...). Configuration files
//! are TOML; every key is optional and falls back to the simulation
//! defaults below.

use serde::{Deserialize, Serialize};

use crate::bandwidth::BandwidthPolicy;
use crate::cap_select::CapSelection;
use crate::error::{Error, Result};

/// Per-user CPU capacities in cycles/s for the six reference users.
pub const DEFAULT_USER_CYCLES: [f64; 6] = [1.4e8, 0.21e8, 0.95e8, 0.13e8, 0.53e8, 0.52e8];

/// Task sizes in million bits for the six reference users.
///
/// Only five sizes are published for the six reference users; the sixth
/// entry is this crate's documented extension (4.0 Mbit).
pub const DEFAULT_TASK_MBITS: [f64; 6] = [5.3, 3.5, 4.6, 3.0, 4.2, 4.0];

/// Reference CAP capacity in cycles/s.
pub const DEFAULT_CAP_CYCLES: f64 = 6.3e8;

/// Physical and objective parameters of one offloading network.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SystemConfig {
    /// Number of users N.
    pub n_users: usize,
    /// Number of CAPs (edge servers) M.
    pub n_caps: usize,
    /// Task sizes l_n in million bits, one per user.
    pub task_mbits: Vec<f64>,
    /// Conversion from million bits to bits (gamma).
    pub bits_per_mbit: f64,
    /// CPU cycles required per bit of task (omega).
    pub cycles_per_bit: f64,
    /// Local CPU capacity f_n in cycles/s, one per user.
    pub user_cycles_per_sec: Vec<f64>,
    /// CAP CPU capacity F_m in cycles/s, one per CAP.
    pub cap_cycles_per_sec: Vec<f64>,
    /// Transmit power per user in watts.
    pub p_tran_watts: Vec<f64>,
    /// Local computing power per user in watts.
    pub p_local_watts: Vec<f64>,
    /// Receiver noise power sigma^2 in watts.
    pub noise_power: f64,
    /// Total wireless bandwidth shared by all users, in Hz.
    pub total_bandwidth_hz: f64,
    /// Latency/energy weight lambda in [0, 1]; 1 = pure latency.
    pub lambda_weight: f64,
    /// Keep the cycles-per-bit factor inside the transmission time.
    ///
    /// The dimensionally consistent default divides offloaded bits by the
    /// link rate. Enabling this multiplies the transmission time by
    /// `cycles_per_bit` as well, for comparison runs.
    pub literal_transmission_formula: bool,
}

impl Default for SystemConfig {
    fn default() -> Self {
        Self::reference(5, 2)
    }
}

impl SystemConfig {
    /// Reference setup: the first `n_users` of the six tabulated users and
    /// `n_caps` identical CAPs at 6.3e8 cycles/s, 10 MHz total bandwidth,
    /// 2 W transmit / 3 W local power, lambda = 0.5.
    ///
    /// Panics if `n_users > 6`; larger systems need explicit per-user lists.
    pub fn reference(n_users: usize, n_caps: usize) -> Self {
        assert!(
            (1..=6).contains(&n_users),
            "reference setup defines 6 users, asked for {n_users}"
        );
        assert!(n_caps >= 1);
        Self {
            n_users,
            n_caps,
            task_mbits: DEFAULT_TASK_MBITS[..n_users].to_vec(),
            bits_per_mbit: 1e6,
            cycles_per_bit: 100.0,
            user_cycles_per_sec: DEFAULT_USER_CYCLES[..n_users].to_vec(),
            cap_cycles_per_sec: vec![DEFAULT_CAP_CYCLES; n_caps],
            p_tran_watts: vec![2.0; n_users],
            p_local_watts: vec![3.0; n_users],
            noise_power: 1.0,
            total_bandwidth_hz: 1e7,
            lambda_weight: 0.5,
            literal_transmission_formula: false,
        }
    }

    /// Checks counts, list lengths, signs and the weight range.
    pub fn validate(&self) -> Result<()> {
        if self.n_users < 1 {
            return Err(Error::InvalidConfig("n_users must be >= 1".into()));
        }
        if self.n_caps < 1 {
            return Err(Error::InvalidConfig("n_caps must be >= 1".into()));
        }
        let per_user: [(&str, &Vec<f64>); 4] = [
            ("task_mbits", &self.task_mbits),
            ("user_cycles_per_sec", &self.user_cycles_per_sec),
            ("p_tran_watts", &self.p_tran_watts),
            ("p_local_watts", &self.p_local_watts),
        ];
        for (name, list) in per_user {
            if list.len() != self.n_users {
                return Err(Error::InvalidConfig(format!(
                    "{name} has {} entries, expected n_users = {}",
                    list.len(),
                    self.n_users
                )));
            }
            if let Some(v) = list.iter().find(|v| !v.is_finite() || **v <= 0.0) {
                return Err(Error::InvalidConfig(format!(
                    "{name} entries must be finite and > 0, got {v}"
                )));
            }
        }
        if self.cap_cycles_per_sec.len() != self.n_caps {
            return Err(Error::InvalidConfig(format!(
                "cap_cycles_per_sec has {} entries, expected n_caps = {}",
                self.cap_cycles_per_sec.len(),
                self.n_caps
            )));
        }
        let scalars = [
            ("bits_per_mbit", self.bits_per_mbit),
            ("cycles_per_bit", self.cycles_per_bit),
            ("noise_power", self.noise_power),
            ("total_bandwidth_hz", self.total_bandwidth_hz),
        ];
        for (name, v) in scalars {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::InvalidConfig(format!(
                    "{name} must be finite and > 0, got {v}"
                )));
            }
        }
        if let Some(v) = self
            .cap_cycles_per_sec
            .iter()
            .find(|v| !v.is_finite() || **v <= 0.0)
        {
            return Err(Error::InvalidConfig(format!(
                "cap_cycles_per_sec entries must be finite and > 0, got {v}"
            )));
        }
        if !self.lambda_weight.is_finite() || !(0.0..=1.0).contains(&self.lambda_weight) {
            return Err(Error::InvalidConfig(format!(
                "lambda_weight must lie in [0, 1], got {}",
                self.lambda_weight
            )));
        }
        Ok(())
    }

    /// Restricts the system to its first `n` users.
    pub fn truncated_to_users(&self, n: usize) -> Result<SystemConfig> {
        if n < 1 || n > self.n_users {
            return Err(Error::InvalidConfig(format!(
                "cannot truncate a {}-user system to {n} users; extend the per-user \
                 lists in the config to sweep beyond them",
                self.n_users
            )));
        }
        let mut cfg = self.clone();
        cfg.n_users = n;
        cfg.task_mbits.truncate(n);
        cfg.user_cycles_per_sec.truncate(n);
        cfg.p_tran_watts.truncate(n);
        cfg.p_local_watts.truncate(n);
        Ok(cfg)
    }
}

/// Environment (MDP) knobs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnvConfig {
    /// Offloading-ratio increment per action.
    pub delta: f64,
    /// Steps per episode.
    pub horizon: usize,
    /// Infeasible steps cost `penalty_multiplier` times the all-local cost.
    pub penalty_multiplier: f64,
    /// Use the printed reward sign (+1 when the cost grows).
    pub literal_reward: bool,
    /// Mean squared channel gain E[|h|^2] used when drawing episodes.
    pub mean_gain: f64,
}

impl Default for EnvConfig {
    fn default() -> Self {
        Self {
            delta: 0.1,
            horizon: 50,
            penalty_multiplier: 10.0,
            literal_reward: false,
            mean_gain: 2.0,
        }
    }
}

impl EnvConfig {
    pub fn validate(&self) -> Result<()> {
        if !self.delta.is_finite() || self.delta <= 0.0 || self.delta > 1.0 {
            return Err(Error::InvalidConfig(format!(
                "delta must lie in (0, 1], got {}",
                self.delta
            )));
        }
        if self.horizon == 0 {
            return Err(Error::InvalidConfig("horizon must be >= 1".into()));
        }
        if !self.penalty_multiplier.is_finite() || self.penalty_multiplier <= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "penalty_multiplier must be > 0, got {}",
                self.penalty_multiplier
            )));
        }
        if !self.mean_gain.is_finite() || self.mean_gain <= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "mean_gain must be > 0, got {}",
                self.mean_gain
            )));
        }
        Ok(())
    }
}

/// Hyper-parameters of the Q-learning agent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AgentConfig {
    /// Exploration rate at step 0.
    pub epsilon_start: f64,
    /// Exploration rate after the decay window.
    pub epsilon_end: f64,
    /// Steps over which epsilon decays linearly.
    pub epsilon_decay_steps: usize,
    /// Discount factor, strictly below 1.
    pub discount: f64,
    /// Minibatch size per learning step.
    pub batch_size: usize,
    /// Learning steps between target-network synchronizations.
    pub sync_interval: usize,
    /// Replay buffer capacity.
    pub buffer_capacity: usize,
    /// SGD learning rate.
    pub learning_rate: f64,
    /// Environment steps per training run.
    pub total_steps: usize,
    /// Hidden-layer widths of the Q network.
    pub hidden_dims: [usize; 2],
    /// Follow the printed argmin forms: greedy selection minimizes Q and
    /// the bootstrap uses the minimum of the target network's outputs.
    pub literal_argmin: bool,
}

impl Default for AgentConfig {
    fn default() -> Self {
        Self {
            epsilon_start: 1.0,
            epsilon_end: 0.05,
            epsilon_decay_steps: 5000,
            discount: 0.9,
            batch_size: 32,
            sync_interval: 200,
            buffer_capacity: 10_000,
            learning_rate: 1e-3,
            total_steps: 20_000,
            hidden_dims: [64, 64],
            literal_argmin: false,
        }
    }
}

impl AgentConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.epsilon_end)
            || !(0.0..=1.0).contains(&self.epsilon_start)
            || self.epsilon_end > self.epsilon_start
        {
            return Err(Error::InvalidConfig(format!(
                "need 0 <= epsilon_end <= epsilon_start <= 1, got start {} end {}",
                self.epsilon_start, self.epsilon_end
            )));
        }
        if !self.discount.is_finite() || !(0.0..1.0).contains(&self.discount) {
            return Err(Error::InvalidConfig(format!(
                "discount must lie in [0, 1), got {}",
                self.discount
            )));
        }
        for (name, v) in [
            ("epsilon_decay_steps", self.epsilon_decay_steps),
            ("batch_size", self.batch_size),
            ("sync_interval", self.sync_interval),
            ("buffer_capacity", self.buffer_capacity),
            ("total_steps", self.total_steps),
        ] {
            if v == 0 {
                return Err(Error::InvalidConfig(format!("{name} must be >= 1")));
            }
        }
        if self.buffer_capacity < self.batch_size {
            return Err(Error::InvalidConfig(format!(
                "buffer_capacity {} below batch_size {}",
                self.buffer_capacity, self.batch_size
            )));
        }
        if !self.learning_rate.is_finite() || self.learning_rate <= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "learning_rate must be > 0, got {}",
                self.learning_rate
            )));
        }
        if self.hidden_dims.iter().any(|&d| d == 0) {
            return Err(Error::InvalidConfig("hidden_dims must be >= 1".into()));
        }
        Ok(())
    }
}

/// Full simulation configuration: system + policies + MDP + agent.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimConfig {
    pub bandwidth_policy: BandwidthPolicy,
    pub cap_selection: CapSelection,
    pub system: SystemConfig,
    pub env: EnvConfig,
    pub agent: AgentConfig,
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        self.system.validate()?;
        self.env.validate()?;
        self.agent.validate()?;
        if let CapSelection::Fixed(m) = self.cap_selection {
            if m >= self.system.n_caps {
                return Err(Error::InvalidConfig(format!(
                    "cap_selection index {m} out of range for {} CAPs",
                    self.system.n_caps
                )));
            }
        }
        Ok(())
    }

    /// Parses a TOML configuration; missing keys take defaults.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: SimConfig =
            toml::from_str(text).map_err(|e| Error::ConfigParse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_toml_file(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml_str(&text)
    }

    /// Serializes the fully resolved configuration.
    pub fn to_toml_string(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_config_is_valid() {
        for n in 1..=6 {
            SystemConfig::reference(n, 2).validate().unwrap();
        }
        SimConfig::default().validate().unwrap();
    }

    #[test]
    fn rejects_mismatched_list_lengths() {
        let mut cfg = SystemConfig::reference(5, 2);
        cfg.task_mbits.pop();
        assert!(matches!(cfg.validate(), Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn rejects_nonpositive_entries_and_bad_lambda() {
        let mut cfg = SystemConfig::reference(3, 1);
        cfg.user_cycles_per_sec[1] = 0.0;
        assert!(cfg.validate().is_err());

        let mut cfg = SystemConfig::reference(3, 1);
        cfg.lambda_weight = 1.5;
        assert!(cfg.validate().is_err());

        let mut cfg = SystemConfig::reference(3, 1);
        cfg.noise_power = -1.0;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn truncation_keeps_prefix() {
        let cfg = SystemConfig::reference(6, 2);
        let small = cfg.truncated_to_users(2).unwrap();
        small.validate().unwrap();
        assert_eq!(small.task_mbits, &DEFAULT_TASK_MBITS[..2]);
        assert!(cfg.truncated_to_users(7).is_err());
        assert!(cfg.truncated_to_users(0).is_err());
    }

    #[test]
    fn toml_roundtrip_and_partial_parse() {
        let cfg = SimConfig::default();
        let text = cfg.to_toml_string();
        let back = SimConfig::from_toml_str(&text).unwrap();
        assert_eq!(cfg, back);

        // A minimal file only overrides what it names.
        let partial = r#"
            bandwidth_policy = "ratio"
            cap_selection = "random"

            [system]
            lambda_weight = 0.9

            [agent]
            total_steps = 1234
        "#;
        let cfg = SimConfig::from_toml_str(partial).unwrap();
        assert_eq!(cfg.bandwidth_policy, BandwidthPolicy::RatioProportional);
        assert_eq!(cfg.cap_selection, CapSelection::Random);
        assert_eq!(cfg.system.lambda_weight, 0.9);
        assert_eq!(cfg.agent.total_steps, 1234);
        assert_eq!(cfg.env.horizon, 50);
    }

    #[test]
    fn fixed_cap_index_is_range_checked() {
        let mut cfg = SimConfig::default();
        cfg.cap_selection = CapSelection::Fixed(5);
        assert!(cfg.validate().is_err());
        let parsed = SimConfig::from_toml_str("cap_selection = 1").unwrap();
        assert_eq!(parsed.cap_selection, CapSelection::Fixed(1));
    }
}

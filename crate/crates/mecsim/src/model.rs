//! Latency/energy cost model of the offloading network.
//!
//! A task of `l` million bits splits between local execution and one edge
//! server (CAP). The per-user components are
//!
//! ```text
//! rate      = W_n * log2(1 + P_tran * g / sigma^2)        (bits/s)
//! t_local   = l * gamma * omega * (1 - A_n) / f_n
//! t_tran    = l * gamma * A_n / rate                      (times omega when
//!                                                          the literal flag
//!                                                          is set)
//! t_cap     = l * gamma * omega * A_n / f_eff
//! e_local   = t_local * P_local,   e_tran = t_tran * P_tran
//! ```
//!
//! and the scalar objective is `phi = lambda * T_total + (1 - lambda) *
//! E_total` with both totals summed over users. A CAP serving several
//! active users splits its capacity equally among them.

use crate::config::SystemConfig;
use crate::error::{Error, Result};

/// Relative tolerance on the bandwidth-conservation constraint.
pub const BANDWIDTH_SUM_REL_TOL: f64 = 1e-9;

/// N x M matrix of offloading fractions, one row per user.
///
/// Each row holds at most one positive entry: a user offloads to a single
/// CAP (or to none).
#[derive(Debug, Clone, PartialEq)]
pub struct OffloadMatrix {
    n_users: usize,
    n_caps: usize,
    alpha: Vec<f64>, // row-major
}

impl OffloadMatrix {
    /// All-local strategy (all fractions zero).
    pub fn zeros(n_users: usize, n_caps: usize) -> Self {
        Self {
            n_users,
            n_caps,
            alpha: vec![0.0; n_users * n_caps],
        }
    }

    /// Every user offloads `ratios[n]` of its task to CAP `cap`.
    pub fn single_cap(n_users: usize, n_caps: usize, cap: usize, ratios: &[f64]) -> Result<Self> {
        if cap >= n_caps {
            return Err(Error::Shape(format!(
                "cap index {cap} out of range for {n_caps} CAPs"
            )));
        }
        if ratios.len() != n_users {
            return Err(Error::Shape(format!(
                "{} ratios for {} users",
                ratios.len(),
                n_users
            )));
        }
        let mut m = Self::zeros(n_users, n_caps);
        for (n, &r) in ratios.iter().enumerate() {
            m.alpha[n * n_caps + cap] = r;
        }
        m.validate()?;
        Ok(m)
    }

    /// Builds from row-major entries and checks the invariants.
    pub fn from_rows(rows: &[Vec<f64>], n_caps: usize) -> Result<Self> {
        let n_users = rows.len();
        let mut alpha = Vec::with_capacity(n_users * n_caps);
        for row in rows {
            if row.len() != n_caps {
                return Err(Error::Shape(format!(
                    "row of length {} in a {}-CAP matrix",
                    row.len(),
                    n_caps
                )));
            }
            alpha.extend_from_slice(row);
        }
        let m = Self {
            n_users,
            n_caps,
            alpha,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn n_users(&self) -> usize {
        self.n_users
    }

    pub fn n_caps(&self) -> usize {
        self.n_caps
    }

    pub fn get(&self, user: usize, cap: usize) -> f64 {
        self.alpha[user * self.n_caps + cap]
    }

    /// Total offloaded fraction A_n of one user.
    pub fn row_sum(&self, user: usize) -> f64 {
        self.row(user).iter().sum()
    }

    /// The CAP user `n` offloads to, if any fraction is positive.
    pub fn target_cap(&self, user: usize) -> Option<usize> {
        self.row(user).iter().position(|&a| a > 0.0)
    }

    fn row(&self, user: usize) -> &[f64] {
        &self.alpha[user * self.n_caps..(user + 1) * self.n_caps]
    }

    /// Entries in [0, 1] and at most one positive entry per row.
    pub fn validate(&self) -> Result<()> {
        for n in 0..self.n_users {
            let mut positive = 0usize;
            for (m, &a) in self.row(n).iter().enumerate() {
                if !a.is_finite() || !(0.0..=1.0).contains(&a) {
                    return Err(Error::constraint(
                        "C1",
                        format!("alpha[{n}][{m}] = {a} outside [0, 1]"),
                    ));
                }
                if a > 0.0 {
                    positive += 1;
                }
            }
            if positive > 1 {
                return Err(Error::constraint(
                    "C1",
                    format!("user {n} offloads to {positive} CAPs; at most one allowed"),
                ));
            }
        }
        Ok(())
    }
}

/// N x M matrix of squared channel magnitudes |h|^2.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelGains {
    n_users: usize,
    n_caps: usize,
    g: Vec<f64>, // row-major
}

impl ChannelGains {
    pub fn from_flat(n_users: usize, n_caps: usize, g: Vec<f64>) -> Result<Self> {
        if g.len() != n_users * n_caps {
            return Err(Error::Shape(format!(
                "{} gains for a {n_users}x{n_caps} matrix",
                g.len()
            )));
        }
        if let Some(v) = g.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(Error::Numeric(format!(
                "channel gains must be finite and >= 0, got {v}"
            )));
        }
        Ok(Self { n_users, n_caps, g })
    }

    pub fn zeros(n_users: usize, n_caps: usize) -> Self {
        Self {
            n_users,
            n_caps,
            g: vec![0.0; n_users * n_caps],
        }
    }

    pub fn n_users(&self) -> usize {
        self.n_users
    }

    pub fn n_caps(&self) -> usize {
        self.n_caps
    }

    pub fn get(&self, user: usize, cap: usize) -> f64 {
        self.g[user * self.n_caps + cap]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.g
    }

    /// Gains of one CAP column across users.
    pub fn column(&self, cap: usize) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_users).map(move |n| self.get(n, cap))
    }
}

/// Per-user cost components for one evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct UserCost {
    pub t_local: f64,
    pub t_tran: f64,
    pub t_cap: f64,
    pub e_local: f64,
    pub e_tran: f64,
}

/// Totals of one system evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct CostBreakdown {
    /// Total latency in seconds (sum over users of all time components).
    pub t_total: f64,
    /// Total energy in joules.
    pub e_total: f64,
    /// Weighted objective `lambda * t_total + (1 - lambda) * e_total`.
    pub phi: f64,
    pub per_user: Vec<UserCost>,
}

/// Shannon rate of one user-CAP link in bits/s. Zero bandwidth gives zero.
pub fn transmission_rate(w_hz: f64, p_watts: f64, gain: f64, noise: f64) -> Result<f64> {
    for (name, v) in [
        ("bandwidth", w_hz),
        ("transmit power", p_watts),
        ("gain", gain),
        ("noise", noise),
    ] {
        if !v.is_finite() || v < 0.0 {
            return Err(Error::domain(
                "transmission_rate",
                format!("{name} must be finite and >= 0, got {v}"),
            ));
        }
    }
    if noise <= 0.0 {
        return Err(Error::domain(
            "transmission_rate",
            format!("noise power must be > 0, got {noise}"),
        ));
    }
    Ok(w_hz * (1.0 + p_watts * gain / noise).log2())
}

/// Time and energy to compute the non-offloaded share locally.
pub fn local_cost(
    l_mbits: f64,
    alpha_n: f64,
    f_n: f64,
    gamma_bits: f64,
    omega_cpb: f64,
    p_local: f64,
) -> Result<(f64, f64)> {
    check_ratio("local_cost", alpha_n)?;
    if !f_n.is_finite() || f_n <= 0.0 {
        return Err(Error::domain(
            "local_cost",
            format!("local capacity must be > 0, got {f_n}"),
        ));
    }
    let time = l_mbits * gamma_bits * omega_cpb * (1.0 - alpha_n) / f_n;
    Ok((time, time * p_local))
}

/// Time and energy to push the offloaded share over the wireless link.
///
/// `literal` keeps the cycles-per-bit factor inside the transmission time.
pub fn offload_cost(
    l_mbits: f64,
    alpha_n: f64,
    rate_bps: f64,
    gamma_bits: f64,
    omega_cpb: f64,
    p_tran: f64,
    literal: bool,
) -> Result<(f64, f64)> {
    check_ratio("offload_cost", alpha_n)?;
    if alpha_n == 0.0 || l_mbits == 0.0 {
        return Ok((0.0, 0.0));
    }
    if rate_bps <= 0.0 {
        return Err(Error::InfeasibleOffload(format!(
            "offloading fraction {alpha_n} over a link with rate {rate_bps} bits/s"
        )));
    }
    let cycles_factor = if literal { omega_cpb } else { 1.0 };
    let time = l_mbits * gamma_bits * cycles_factor * alpha_n / rate_bps;
    Ok((time, time * p_tran))
}

/// Time to execute the offloaded share on the CAP at `f_eff` cycles/s.
pub fn cap_compute_time(
    l_mbits: f64,
    alpha_n: f64,
    f_eff: f64,
    gamma_bits: f64,
    omega_cpb: f64,
) -> Result<f64> {
    check_ratio("cap_compute_time", alpha_n)?;
    if alpha_n == 0.0 {
        return Ok(0.0);
    }
    if !f_eff.is_finite() || f_eff <= 0.0 {
        return Err(Error::domain(
            "cap_compute_time",
            format!("allocated CAP capacity must be > 0, got {f_eff}"),
        ));
    }
    Ok(l_mbits * gamma_bits * omega_cpb * alpha_n / f_eff)
}

/// Equal share of a CAP among its active offloaders.
pub fn effective_cap_capacity(cap_f: f64, n_active: usize) -> f64 {
    cap_f / n_active.max(1) as f64
}

fn check_ratio(op: &'static str, alpha: f64) -> Result<()> {
    if !alpha.is_finite() || !(0.0..=1.0).contains(&alpha) {
        return Err(Error::domain(
            op,
            format!("offload ratio must lie in [0, 1], got {alpha}"),
        ));
    }
    Ok(())
}

/// Evaluates the full system cost for one offloading matrix, one channel
/// realization and one per-user bandwidth split.
///
/// Checks constraint C1 (valid offloading matrix) and C2 (the bandwidth
/// split sums to the total within [`BANDWIDTH_SUM_REL_TOL`]). Deterministic:
/// identical inputs give bit-identical outputs.
pub fn evaluate(
    config: &SystemConfig,
    alpha: &OffloadMatrix,
    gains: &ChannelGains,
    bandwidth_hz: &[f64],
) -> Result<CostBreakdown> {
    let n = config.n_users;
    let m = config.n_caps;
    if alpha.n_users() != n || alpha.n_caps() != m {
        return Err(Error::Shape(format!(
            "offload matrix is {}x{}, system is {n}x{m}",
            alpha.n_users(),
            alpha.n_caps()
        )));
    }
    if gains.n_users() != n || gains.n_caps() != m {
        return Err(Error::Shape(format!(
            "gain matrix is {}x{}, system is {n}x{m}",
            gains.n_users(),
            gains.n_caps()
        )));
    }
    if bandwidth_hz.len() != n {
        return Err(Error::Shape(format!(
            "{} bandwidth entries for {n} users",
            bandwidth_hz.len()
        )));
    }
    alpha.validate()?;
    let w_sum: f64 = bandwidth_hz.iter().sum();
    if (w_sum - config.total_bandwidth_hz).abs()
        > BANDWIDTH_SUM_REL_TOL * config.total_bandwidth_hz
    {
        return Err(Error::constraint(
            "C2",
            format!(
                "bandwidth sums to {w_sum} Hz, expected {} Hz",
                config.total_bandwidth_hz
            ),
        ));
    }

    // Active offloaders per CAP decide the capacity split.
    let mut active = vec![0usize; m];
    for user in 0..n {
        if let Some(cap) = alpha.target_cap(user) {
            active[cap] += 1;
        }
    }

    let mut per_user = Vec::with_capacity(n);
    let mut t_total = 0.0;
    let mut e_total = 0.0;
    for user in 0..n {
        let a_n = alpha.row_sum(user);
        let (t_local, e_local) = local_cost(
            config.task_mbits[user],
            a_n,
            config.user_cycles_per_sec[user],
            config.bits_per_mbit,
            config.cycles_per_bit,
            config.p_local_watts[user],
        )?;
        let mut cost = UserCost {
            t_local,
            e_local,
            ..UserCost::default()
        };
        if let Some(cap) = alpha.target_cap(user) {
            let rate = transmission_rate(
                bandwidth_hz[user],
                config.p_tran_watts[user],
                gains.get(user, cap),
                config.noise_power,
            )?;
            let (t_tran, e_tran) = offload_cost(
                config.task_mbits[user],
                a_n,
                rate,
                config.bits_per_mbit,
                config.cycles_per_bit,
                config.p_tran_watts[user],
                config.literal_transmission_formula,
            )?;
            let f_eff = effective_cap_capacity(config.cap_cycles_per_sec[cap], active[cap]);
            let t_cap = cap_compute_time(
                config.task_mbits[user],
                a_n,
                f_eff,
                config.bits_per_mbit,
                config.cycles_per_bit,
            )?;
            cost.t_tran = t_tran;
            cost.e_tran = e_tran;
            cost.t_cap = t_cap;
        }
        t_total += cost.t_local + cost.t_tran + cost.t_cap;
        e_total += cost.e_local + cost.e_tran;
        per_user.push(cost);
    }
    let lambda = config.lambda_weight;
    Ok(CostBreakdown {
        t_total,
        e_total,
        phi: lambda * t_total + (1.0 - lambda) * e_total,
        per_user,
    })
}

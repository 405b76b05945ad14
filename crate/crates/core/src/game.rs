//! The normal-form channel game: SIR, both utilities, the potential
//! function and its generalized form, best response and pure-Nash checks.
//!
//! All quantities are linear power units; dB conversion happens only at
//! the coding-table boundary. Summations always run in ascending user
//! index so that floating-point results are reproducible and tie
//! detection in `best_response` is exact.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::topology::Network;

/// 1-based channel index, 1..=K.
pub type Channel = u32;

/// Default cap on K^N for exhaustive equilibrium enumeration.
pub const DEFAULT_ENUM_CAP: u128 = 1_000_000;

/// The channel choices of all N transmitters.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StrategyProfile {
    channels: Vec<Channel>,
}

impl StrategyProfile {
    pub fn new(channels: Vec<Channel>, n_channels: u32) -> Result<Self> {
        if channels.iter().any(|&c| c < 1 || c > n_channels) {
            return Err(Error::InvalidParameter(format!(
                "channels must lie in 1..={n_channels}"
            )));
        }
        Ok(StrategyProfile { channels })
    }

    /// Uniform random assignment over 1..=K.
    pub fn random<R: Rng>(n: usize, n_channels: u32, rng: &mut R) -> Self {
        let channels = (0..n).map(|_| rng.gen_range(1..=n_channels)).collect();
        StrategyProfile { channels }
    }

    /// All users on channel 1.
    pub fn all_same(n: usize) -> Self {
        StrategyProfile {
            channels: vec![1; n],
        }
    }

    pub fn len(&self) -> usize {
        self.channels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.channels.is_empty()
    }

    #[inline]
    pub fn channel(&self, user: usize) -> Channel {
        self.channels[user]
    }

    pub fn set_channel(&mut self, user: usize, channel: Channel) {
        self.channels[user] = channel;
    }

    pub fn channels(&self) -> &[Channel] {
        &self.channels
    }

    /// CSV row `s_1,...,s_N`.
    pub fn to_csv_row(&self) -> String {
        let cells: Vec<String> = self.channels.iter().map(|c| c.to_string()).collect();
        cells.join(",")
    }
}

/// Which utility the adaptation engines optimize.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UtilityKind {
    /// Negated incoming interference only.
    Selfish,
    /// Negated incoming plus outgoing interference.
    Cooperative,
}

/// Static parameters of the game.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GameConfig {
    pub n_channels: u32,
    pub utility: UtilityKind,
}

impl GameConfig {
    pub fn new(n_channels: u32, utility: UtilityKind) -> Result<Self> {
        if n_channels < 1 {
            return Err(Error::InvalidParameter("need at least one channel".into()));
        }
        Ok(GameConfig {
            n_channels,
            utility,
        })
    }
}

/// Interference indicator: 1 iff both users transmit on the same channel.
#[inline]
pub fn co_channel(s_i: Channel, s_j: Channel) -> u32 {
    u32::from(s_i == s_j)
}

/// SIR at the receiver of pair `i` under `profile`. Returns `f64::INFINITY`
/// when no other user shares the channel (the model has no noise term).
pub fn sir(i: usize, profile: &StrategyProfile, net: &Network) -> f64 {
    let own = net.powers[i] * net.gain(i, i);
    let mut interference = 0.0;
    let s_i = profile.channel(i);
    for k in 0..net.len() {
        if k != i && profile.channel(k) == s_i {
            interference += net.powers[k] * net.gain(k, i);
        }
    }
    if interference == 0.0 {
        f64::INFINITY
    } else {
        own / interference
    }
}

/// Selfish utility: negated total co-channel interference arriving at the
/// receiver of pair `i`. Always <= 0.
pub fn utility_selfish(i: usize, profile: &StrategyProfile, net: &Network) -> f64 {
    let s_i = profile.channel(i);
    let mut incoming = 0.0;
    for j in 0..net.len() {
        if j != i && profile.channel(j) == s_i {
            incoming += net.powers[j] * net.gain(j, i);
        }
    }
    -incoming
}

/// Cooperative utility: negated incoming plus outgoing co-channel
/// interference for pair `i`. Always <= 0.
pub fn utility_cooperative(i: usize, profile: &StrategyProfile, net: &Network) -> f64 {
    let s_i = profile.channel(i);
    let mut incoming = 0.0;
    let mut outgoing = 0.0;
    for j in 0..net.len() {
        if j != i && profile.channel(j) == s_i {
            incoming += net.powers[j] * net.gain(j, i);
            outgoing += net.powers[i] * net.gain(i, j);
        }
    }
    -(incoming + outgoing)
}

/// Utility dispatch on the configured kind.
pub fn utility(i: usize, profile: &StrategyProfile, net: &Network, kind: UtilityKind) -> f64 {
    match kind {
        UtilityKind::Selfish => utility_selfish(i, profile, net),
        UtilityKind::Cooperative => utility_cooperative(i, profile, net),
    }
}

/// Per-user (incoming, outgoing) co-channel interference sums, the building
/// blocks of the potential function.
fn interference_sums(i: usize, profile: &StrategyProfile, net: &Network) -> (f64, f64) {
    let s_i = profile.channel(i);
    let mut incoming = 0.0;
    let mut outgoing = 0.0;
    for j in 0..net.len() {
        if j != i && profile.channel(j) == s_i {
            incoming += net.powers[j] * net.gain(j, i);
            outgoing += net.powers[i] * net.gain(i, j);
        }
    }
    (incoming, outgoing)
}

fn weighted_potential(profile: &StrategyProfile, net: &Network, a: f64) -> f64 {
    let mut total = 0.0;
    for i in 0..net.len() {
        let (incoming, outgoing) = interference_sums(i, profile, net);
        total += -a * incoming - (1.0 - a) * outgoing;
    }
    total
}

/// The exact potential of the cooperative game; equals half the sum of all
/// cooperative utilities.
pub fn potential(profile: &StrategyProfile, net: &Network) -> f64 {
    weighted_potential(profile, net, 0.5)
}

/// Generalized potential with incoming weight `a` and outgoing weight
/// `1 - a`, valid for 0 < a < 1. At a = 1/2 it coincides with `potential`.
pub fn generalized_potential(profile: &StrategyProfile, net: &Network, a: f64) -> Result<f64> {
    if !(a > 0.0 && a < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "potential weight must lie in (0, 1), got {a}"
        )));
    }
    Ok(weighted_potential(profile, net, a))
}

/// Utility of user `i` if it unilaterally switched to `candidate`.
fn utility_with(
    i: usize,
    candidate: Channel,
    profile: &mut StrategyProfile,
    net: &Network,
    kind: UtilityKind,
) -> f64 {
    let original = profile.channel(i);
    profile.set_channel(i, candidate);
    let u = utility(i, profile, net, kind);
    profile.set_channel(i, original);
    u
}

/// The set of channels maximizing user `i`'s utility, opponents fixed.
/// Ties are detected by exact comparison; all sums run in user-index order.
pub fn best_response_set(
    i: usize,
    profile: &StrategyProfile,
    net: &Network,
    cfg: &GameConfig,
) -> Vec<Channel> {
    let mut scratch = profile.clone();
    let mut best = f64::NEG_INFINITY;
    let mut set = Vec::new();
    for k in 1..=cfg.n_channels {
        let u = utility_with(i, k, &mut scratch, net, cfg.utility);
        if u > best {
            best = u;
            set.clear();
            set.push(k);
        } else if u == best {
            set.push(k);
        }
    }
    set
}

/// Best response of user `i`, with uniform random tie-breaking.
pub fn best_response<R: Rng>(
    i: usize,
    profile: &StrategyProfile,
    net: &Network,
    cfg: &GameConfig,
    rng: &mut R,
) -> Channel {
    let set = best_response_set(i, profile, net, cfg);
    if set.len() == 1 {
        set[0]
    } else {
        set[rng.gen_range(0..set.len())]
    }
}

/// True iff no user can strictly improve its utility by a unilateral
/// channel change.
pub fn is_pure_nash(profile: &StrategyProfile, net: &Network, cfg: &GameConfig) -> bool {
    let mut scratch = profile.clone();
    for i in 0..net.len() {
        let current = utility(i, profile, net, cfg.utility);
        for k in 1..=cfg.n_channels {
            if k == profile.channel(i) {
                continue;
            }
            if utility_with(i, k, &mut scratch, net, cfg.utility) > current {
                return false;
            }
        }
    }
    true
}

/// Exhaustively enumerate all pure Nash equilibria. Errors when K^N exceeds
/// `cap` (see [`DEFAULT_ENUM_CAP`]).
pub fn enumerate_pure_nash_capped(
    net: &Network,
    cfg: &GameConfig,
    cap: u128,
) -> Result<Vec<StrategyProfile>> {
    let n = net.len();
    let k = cfg.n_channels as u128;
    let mut space: u128 = 1;
    for _ in 0..n {
        space = space
            .checked_mul(k)
            .ok_or_else(|| Error::TooLarge(format!("K^N overflows with K={k}, N={n}")))?;
        if space > cap {
            return Err(Error::TooLarge(format!(
                "K^N = {k}^{n} exceeds enumeration cap {cap}"
            )));
        }
    }
    let mut profile = StrategyProfile::all_same(n);
    let mut found = Vec::new();
    loop {
        if is_pure_nash(&profile, net, cfg) {
            found.push(profile.clone());
        }
        // Odometer increment over channels.
        let mut pos = 0;
        loop {
            if pos == n {
                return Ok(found);
            }
            let c = profile.channel(pos);
            if c < cfg.n_channels {
                profile.set_channel(pos, c + 1);
                break;
            }
            profile.set_channel(pos, 1);
            pos += 1;
        }
    }
}

/// Enumerate pure Nash equilibria with the default size cap.
pub fn enumerate_pure_nash(net: &Network, cfg: &GameConfig) -> Result<Vec<StrategyProfile>> {
    enumerate_pure_nash_capped(net, cfg, DEFAULT_ENUM_CAP)
}

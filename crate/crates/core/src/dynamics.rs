//! Adaptation engines: Bernoulli-scheduled best-response play of the
//! potential game, and exponential-weights no-regret learning with
//! counterfactual reward accounting, plus convergence detection for both.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{
    best_response, is_pure_nash, potential, utility, Channel, GameConfig, StrategyProfile,
    UtilityKind,
};
use crate::topology::Network;

/// Default multiplier applied to utilities inside the weight exponent.
///
/// Path-loss gains on a 200 m square sit around 1e-6, so raw cumulative
/// utilities barely move the exponential weights within any reasonable
/// horizon. The default rescales typical per-slot utilities to order one:
/// large enough that cooperative learners settle on a channel within a few
/// hundred slots, small enough that contested selfish learners can hold a
/// mixed strategy instead of snapping between vertices. Set it to 1.0 to
/// reproduce the raw update.
pub const DEFAULT_UTILITY_SCALE: f64 = 4.5e6;

/// Default number of unchanged slots before a profile counts as settled.
pub const DEFAULT_STABILITY_WINDOW: u64 = 50;

/// Who gets to act each slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScheduleMode {
    /// Each user independently wins decision rights with probability p_a.
    Bernoulli,
    /// Exactly one user acts per slot, round-robin by index.
    StrictSequential,
}

/// Slot-level access scheduler.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scheduler {
    pub mode: ScheduleMode,
    pub p_a: f64,
}

impl Scheduler {
    pub fn bernoulli(p_a: f64) -> Result<Self> {
        if !(p_a > 0.0 && p_a <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "p_a must lie in (0, 1], got {p_a}"
            )));
        }
        Ok(Scheduler {
            mode: ScheduleMode::Bernoulli,
            p_a,
        })
    }

    pub fn strict_sequential() -> Self {
        Scheduler {
            mode: ScheduleMode::StrictSequential,
            p_a: 1.0,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.p_a > 0.0 && self.p_a <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "p_a must lie in (0, 1], got {}",
                self.p_a
            )));
        }
        Ok(())
    }
}

/// Draw the set of users acting this slot; each user is included
/// independently with probability `p_a`. Returned indices are ascending.
pub fn bernoulli_actors<R: Rng>(rng: &mut R, n: usize, p_a: f64) -> Vec<usize> {
    (0..n).filter(|_| rng.gen_bool(p_a)).collect()
}

/// One slot of the potential game: every scheduled actor simultaneously
/// adopts its best response against the incoming profile. `slot` selects
/// the round-robin actor in strict-sequential mode.
pub fn potential_game_step<R: Rng>(
    profile: &StrategyProfile,
    net: &Network,
    cfg: &GameConfig,
    scheduler: &Scheduler,
    slot: u64,
    rng: &mut R,
) -> Result<StrategyProfile> {
    if cfg.utility != UtilityKind::Cooperative {
        return Err(Error::UnsupportedConfiguration(
            "the potential-game engine requires the cooperative utility".into(),
        ));
    }
    let actors = match scheduler.mode {
        ScheduleMode::Bernoulli => bernoulli_actors(rng, net.len(), scheduler.p_a),
        ScheduleMode::StrictSequential => vec![(slot % net.len() as u64) as usize],
    };
    let mut next = profile.clone();
    for &i in &actors {
        next.set_channel(i, best_response(i, profile, net, cfg, rng));
    }
    Ok(next)
}

/// Final state of a run: a settled pure profile or per-user mixed weights.
#[derive(Debug, Clone, PartialEq)]
pub enum FinalOutcome {
    Pure(StrategyProfile),
    Mixed(Vec<Vec<f64>>),
}

/// Per-slot record of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunTrace {
    /// Slot 0 is the initial profile.
    pub profiles: Vec<StrategyProfile>,
    /// Potential of the profile at each slot; same length as `profiles`.
    pub potential_series: Vec<f64>,
    /// (slot, N x K weights), sampled periodically during learning runs.
    pub weight_snapshots: Vec<(u64, Vec<Vec<f64>>)>,
    pub converged_at: Option<u64>,
    pub final_outcome: FinalOutcome,
}

impl RunTrace {
    pub fn slots_run(&self) -> u64 {
        (self.profiles.len() - 1) as u64
    }
}

/// Knobs for a potential-game run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PotentialRunConfig {
    pub scheduler: Scheduler,
    pub max_slots: u64,
    /// Unchanged-profile slots required before the Nash check runs.
    pub stability_window: u64,
}

impl PotentialRunConfig {
    pub fn new(scheduler: Scheduler) -> Self {
        PotentialRunConfig {
            scheduler,
            max_slots: 5000,
            stability_window: DEFAULT_STABILITY_WINDOW,
        }
    }
}

/// Iterate the potential game until the profile has been stable for the
/// configured window and passes the pure-Nash check, or until `max_slots`.
/// Non-convergence is reported through the trace, not as an error.
pub fn run_potential_game<R: Rng>(
    net: &Network,
    cfg: &GameConfig,
    initial: &StrategyProfile,
    run_cfg: &PotentialRunConfig,
    rng: &mut R,
) -> Result<RunTrace> {
    if cfg.utility != UtilityKind::Cooperative {
        return Err(Error::UnsupportedConfiguration(
            "the potential-game engine requires the cooperative utility".into(),
        ));
    }
    run_cfg.scheduler.validate()?;
    if run_cfg.max_slots == 0 {
        return Err(Error::InvalidParameter("max_slots must be > 0".into()));
    }
    let mut profile = initial.clone();
    let mut profiles = vec![profile.clone()];
    let mut potential_series = vec![potential(&profile, net)];
    let mut converged_at = None;
    let mut last_change: u64 = 0;
    for slot in 1..=run_cfg.max_slots {
        let next = potential_game_step(&profile, net, cfg, &run_cfg.scheduler, slot - 1, rng)?;
        if next != profile {
            last_change = slot;
        }
        profile = next;
        profiles.push(profile.clone());
        potential_series.push(potential(&profile, net));
        if slot - last_change >= run_cfg.stability_window && is_pure_nash(&profile, net, cfg) {
            converged_at = Some(slot);
            break;
        }
    }
    Ok(RunTrace {
        profiles,
        potential_series,
        weight_snapshots: Vec::new(),
        converged_at,
        final_outcome: FinalOutcome::Pure(profile),
    })
}

/// Row-stochastic weights from one user's cumulative utilities, computed in
/// the log domain with max-subtraction. Invariant under adding a constant
/// to every entry of the row.
pub fn weights_from_cum_utils(row: &[f64], beta: f64) -> Vec<f64> {
    assert!(beta > 0.0, "beta must be positive");
    let ln_base = (1.0 + beta).ln();
    let max_exp = row
        .iter()
        .map(|u| u * ln_base)
        .fold(f64::NEG_INFINITY, f64::max);
    let mut weights: Vec<f64> = row
        .iter()
        .map(|u| (u * ln_base - max_exp).exp().max(f64::MIN_POSITIVE))
        .collect();
    let sum: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= sum;
    }
    weights
}

/// Per-user cumulative utilities and the exponential weights they induce.
#[derive(Debug, Clone, PartialEq)]
pub struct LearnerState {
    cum_utils: Vec<Vec<f64>>,
    weights: Vec<Vec<f64>>,
    beta: f64,
    utility_scale: f64,
    slot: u64,
}

impl LearnerState {
    pub fn new(n_users: usize, n_channels: u32, beta: f64, utility_scale: f64) -> Result<Self> {
        if !(beta > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "beta must be > 0, got {beta}"
            )));
        }
        if !(utility_scale > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "utility_scale must be > 0, got {utility_scale}"
            )));
        }
        let k = n_channels as usize;
        let cum_utils = vec![vec![0.0; k]; n_users];
        let weights = vec![vec![1.0 / k as f64; k]; n_users];
        Ok(LearnerState {
            cum_utils,
            weights,
            beta,
            utility_scale,
            slot: 0,
        })
    }

    pub fn weights(&self) -> &[Vec<f64>] {
        &self.weights
    }

    pub fn cum_utils(&self) -> &[Vec<f64>] {
        &self.cum_utils
    }

    pub fn slot(&self) -> u64 {
        self.slot
    }

    pub fn n_channels(&self) -> u32 {
        self.cum_utils[0].len() as u32
    }

    fn sample_channel<R: Rng>(&self, user: usize, rng: &mut R) -> Channel {
        let r: f64 = rng.gen();
        let mut acc = 0.0;
        let row = &self.weights[user];
        for (idx, w) in row.iter().enumerate() {
            acc += w;
            if r < acc {
                return (idx + 1) as Channel;
            }
        }
        row.len() as Channel
    }

    /// Draw every user's channel from its current weight row.
    pub fn sample_profile<R: Rng>(&self, rng: &mut R) -> StrategyProfile {
        let n = self.cum_utils.len();
        let mut profile = StrategyProfile::all_same(n);
        for i in 0..n {
            profile.set_channel(i, self.sample_channel(i, rng));
        }
        profile
    }

    /// Credit every user with the utility each channel would have earned
    /// against the opponents' played channels, then refresh all weights.
    pub fn update_counterfactual(
        &mut self,
        played: &StrategyProfile,
        net: &Network,
        kind: UtilityKind,
    ) {
        let n = self.cum_utils.len();
        let k = self.n_channels();
        let mut scratch = played.clone();
        for i in 0..n {
            for c in 1..=k {
                scratch.set_channel(i, c);
                self.cum_utils[i][(c - 1) as usize] += utility(i, &scratch, net, kind);
            }
            scratch.set_channel(i, played.channel(i));
        }
        for i in 0..n {
            let scaled: Vec<f64> = self.cum_utils[i]
                .iter()
                .map(|u| u * self.utility_scale)
                .collect();
            self.weights[i] = weights_from_cum_utils(&scaled, self.beta);
        }
        self.slot += 1;
    }

    /// True when every user puts more than `threshold` on one channel.
    pub fn all_at_vertex(&self, threshold: f64) -> bool {
        self.weights
            .iter()
            .all(|row| row.iter().cloned().fold(0.0, f64::max) > threshold)
    }

    /// The per-user argmax channels.
    pub fn vertex_profile(&self) -> StrategyProfile {
        let n = self.cum_utils.len();
        let mut profile = StrategyProfile::all_same(n);
        for (i, row) in self.weights.iter().enumerate() {
            let mut best = 0;
            for (idx, w) in row.iter().enumerate() {
                if *w > row[best] {
                    best = idx;
                }
            }
            profile.set_channel(i, (best + 1) as Channel);
        }
        profile
    }
}

/// One learning slot: every user samples its channel from its weights,
/// then all cumulative utilities are updated counterfactually.
pub fn learning_step<R: Rng>(
    state: &mut LearnerState,
    net: &Network,
    cfg: &GameConfig,
    rng: &mut R,
) -> StrategyProfile {
    let played = state.sample_profile(rng);
    state.update_counterfactual(&played, net, cfg.utility);
    played
}

/// Gated variant: only `actors` resample; everyone else keeps its previous
/// channel. Utilities still accumulate for all users (measurement is
/// passive).
pub fn learning_step_gated<R: Rng>(
    state: &mut LearnerState,
    net: &Network,
    cfg: &GameConfig,
    prev: &StrategyProfile,
    actors: &[usize],
    rng: &mut R,
) -> StrategyProfile {
    let mut played = prev.clone();
    for &i in actors {
        played.set_channel(i, state.sample_channel(i, rng));
    }
    state.update_counterfactual(&played, net, cfg.utility);
    played
}

/// Knobs for a learning run.
#[derive(Debug, Clone, PartialEq)]
pub struct LearningConfig {
    pub beta: f64,
    pub utility_scale: f64,
    pub max_slots: u64,
    /// Weight snapshot cadence in slots.
    pub snapshot_every: u64,
    /// When set, action resampling is gated by this scheduler.
    pub gate: Option<Scheduler>,
    /// Pure-outcome threshold on the max weight of every row.
    pub vertex_threshold: f64,
    /// Mixed-outcome window length in slots.
    pub stability_window: u64,
    /// Mixed-outcome tolerance on weight movement across the window.
    pub stability_tol: f64,
}

impl Default for LearningConfig {
    fn default() -> Self {
        LearningConfig {
            beta: 0.1,
            utility_scale: DEFAULT_UTILITY_SCALE,
            max_slots: 5000,
            snapshot_every: 10,
            gate: None,
            vertex_threshold: 0.99,
            stability_window: 100,
            stability_tol: 1e-3,
        }
    }
}

impl LearningConfig {
    fn validate(&self) -> Result<()> {
        if !(self.beta > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "beta must be > 0, got {}",
                self.beta
            )));
        }
        if self.max_slots == 0 {
            return Err(Error::InvalidParameter("max_slots must be > 0".into()));
        }
        if self.snapshot_every == 0 {
            return Err(Error::InvalidParameter("snapshot_every must be > 0".into()));
        }
        if self.stability_window == 0 {
            return Err(Error::InvalidParameter(
                "stability_window must be > 0".into(),
            ));
        }
        if !(self.vertex_threshold > 0.0 && self.vertex_threshold < 1.0) {
            return Err(Error::InvalidParameter(
                "vertex_threshold must lie in (0, 1)".into(),
            ));
        }
        if let Some(gate) = &self.gate {
            gate.validate()?;
        }
        Ok(())
    }
}

/// Iterate learning steps until every user passes the vertex threshold
/// (pure outcome), every weight row has moved less than `stability_tol`
/// over the last `stability_window` slots (mixed outcome), or `max_slots`.
pub fn run_learning<R: Rng>(
    net: &Network,
    cfg: &GameConfig,
    initial: &StrategyProfile,
    lcfg: &LearningConfig,
    rng: &mut R,
) -> Result<RunTrace> {
    lcfg.validate()?;
    let n = net.len();
    let mut state = LearnerState::new(n, cfg.n_channels, lcfg.beta, lcfg.utility_scale)?;
    let mut profiles = vec![initial.clone()];
    let mut potential_series = vec![potential(initial, net)];
    let mut weight_snapshots = vec![(0, state.weights().to_vec())];
    let mut converged_at = None;
    let mut outcome = None;
    let mut prev = initial.clone();
    // Ring buffer of the last `stability_window` weight matrices; entry
    // (slot - 1) % window holds the weights from `window` slots ago.
    let window = lcfg.stability_window as usize;
    let mut ring: Vec<Vec<Vec<f64>>> = Vec::with_capacity(window);
    for slot in 1..=lcfg.max_slots {
        let played = match &lcfg.gate {
            None => learning_step(&mut state, net, cfg, rng),
            Some(scheduler) => {
                let actors = match scheduler.mode {
                    ScheduleMode::Bernoulli => bernoulli_actors(rng, n, scheduler.p_a),
                    ScheduleMode::StrictSequential => vec![((slot - 1) % n as u64) as usize],
                };
                learning_step_gated(&mut state, net, cfg, &prev, &actors, rng)
            }
        };
        potential_series.push(potential(&played, net));
        profiles.push(played.clone());
        prev = played;
        if slot % lcfg.snapshot_every == 0 {
            weight_snapshots.push((slot, state.weights().to_vec()));
        }
        if state.all_at_vertex(lcfg.vertex_threshold) {
            converged_at = Some(slot);
            outcome = Some(FinalOutcome::Pure(state.vertex_profile()));
        } else {
            let idx = ((slot - 1) as usize) % window;
            if ring.len() == window {
                let moved = state
                    .weights()
                    .iter()
                    .zip(ring[idx].iter())
                    .flat_map(|(row, old_row)| row.iter().zip(old_row.iter()))
                    .map(|(w, r)| (w - r).abs())
                    .fold(0.0, f64::max);
                if moved < lcfg.stability_tol {
                    converged_at = Some(slot);
                    outcome = Some(FinalOutcome::Mixed(state.weights().to_vec()));
                }
                ring[idx] = state.weights().to_vec();
            } else {
                ring.push(state.weights().to_vec());
            }
        }
        if converged_at.is_some() {
            if weight_snapshots.last().map(|(s, _)| *s) != Some(slot) {
                weight_snapshots.push((slot, state.weights().to_vec()));
            }
            break;
        }
    }
    let final_outcome = outcome.unwrap_or_else(|| FinalOutcome::Mixed(state.weights().to_vec()));
    if converged_at.is_none() {
        let last = lcfg.max_slots;
        if weight_snapshots.last().map(|(s, _)| *s) != Some(last) {
            weight_snapshots.push((last, state.weights().to_vec()));
        }
    }
    Ok(RunTrace {
        profiles,
        potential_series,
        weight_snapshots,
        converged_at,
        final_outcome,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{rng_for, stream};
    use crate::topology::{generate_network, Network, TopologyParams};

    fn cfg(k: u32, kind: UtilityKind) -> GameConfig {
        GameConfig::new(k, kind).unwrap()
    }

    fn random_net(seed: u64, n: usize) -> Network {
        generate_network(
            seed,
            &TopologyParams {
                n_pairs: n,
                area_side: 60.0,
                ..TopologyParams::default()
            },
        )
        .unwrap()
    }

    #[test]
    fn bernoulli_extremes() {
        let mut rng = rng_for(1, 80);
        assert_eq!(bernoulli_actors(&mut rng, 5, 1.0), vec![0, 1, 2, 3, 4]);
        assert!(bernoulli_actors(&mut rng, 5, 0.0).is_empty());
    }

    #[test]
    fn bernoulli_mean_set_size() {
        let mut rng = rng_for(2, 81);
        let draws = 100_000;
        let mut total = 0usize;
        for _ in 0..draws {
            total += bernoulli_actors(&mut rng, 30, 1.0 / 30.0).len();
        }
        let mean = total as f64 / draws as f64;
        assert!((mean - 1.0).abs() < 0.05, "mean = {mean}");
    }

    #[test]
    fn scheduler_validation() {
        assert!(Scheduler::bernoulli(0.0).is_err());
        assert!(Scheduler::bernoulli(1.5).is_err());
        assert!(Scheduler::bernoulli(1.0 / 30.0).is_ok());
    }

    #[test]
    fn step_rejects_selfish_utility() {
        let net = random_net(3, 4);
        let profile = StrategyProfile::all_same(4);
        let mut rng = rng_for(3, 82);
        let err = potential_game_step(
            &profile,
            &net,
            &cfg(2, UtilityKind::Selfish),
            &Scheduler::strict_sequential(),
            0,
            &mut rng,
        );
        assert!(matches!(err, Err(Error::UnsupportedConfiguration(_))));
    }

    #[test]
    fn step_with_empty_actor_set_is_identity() {
        let net = random_net(14, 6);
        let profile = StrategyProfile::random(6, 3, &mut rng_for(14, 79));
        // p_a small enough that no user ever wins the coin flip.
        let scheduler = Scheduler::bernoulli(1e-12).unwrap();
        let mut rng = rng_for(14, 78);
        for slot in 0..20 {
            let next = potential_game_step(
                &profile,
                &net,
                &cfg(3, UtilityKind::Cooperative),
                &scheduler,
                slot,
                &mut rng,
            )
            .unwrap();
            assert_eq!(next, profile);
        }
    }

    #[test]
    fn step_fixed_point_when_actor_settled() {
        let net =
            Network::from_gains(vec![vec![1.0, 0.3], vec![0.3, 1.0]], vec![1.0, 1.0]).unwrap();
        let profile = StrategyProfile::new(vec![1, 2], 2).unwrap();
        let mut rng = rng_for(4, 83);
        let next = potential_game_step(
            &profile,
            &net,
            &cfg(2, UtilityKind::Cooperative),
            &Scheduler::strict_sequential(),
            0,
            &mut rng,
        )
        .unwrap();
        assert_eq!(next, profile);
    }

    #[test]
    fn strict_sequential_is_monotone_and_terminates() {
        let c = cfg(2, UtilityKind::Cooperative);
        for seed in 0..10 {
            let net = random_net(seed, 6);
            let mut rng = rng_for(seed, 84);
            let initial = StrategyProfile::random(6, 2, &mut rng);
            let run_cfg = PotentialRunConfig {
                scheduler: Scheduler::strict_sequential(),
                max_slots: 500,
                stability_window: 12,
            };
            let trace = run_potential_game(&net, &c, &initial, &run_cfg, &mut rng).unwrap();
            for w in trace.potential_series.windows(2) {
                assert!(w[1] >= w[0] - 1e-12, "potential decreased: {w:?}");
            }
            assert!(trace.converged_at.is_some());
            let final_profile = match &trace.final_outcome {
                FinalOutcome::Pure(p) => p.clone(),
                FinalOutcome::Mixed(_) => unreachable!(),
            };
            assert!(is_pure_nash(&final_profile, &net, &c));
        }
    }

    #[test]
    fn bernoulli_runs_allow_transient_potential_dips() {
        // With simultaneous actors the potential can drop within a slot;
        // the run still ends at least as high as it started.
        let c = cfg(2, UtilityKind::Cooperative);
        let mut saw_dip = false;
        for seed in 0..20u64 {
            let net = random_net(seed, 12);
            let mut rng = rng_for(seed, 77);
            let initial = StrategyProfile::random(12, 2, &mut rng);
            let run_cfg = PotentialRunConfig {
                scheduler: Scheduler::bernoulli(0.9).unwrap(),
                max_slots: 600,
                stability_window: 30,
            };
            let trace = run_potential_game(&net, &c, &initial, &run_cfg, &mut rng).unwrap();
            saw_dip |= trace
                .potential_series
                .windows(2)
                .any(|w| w[1] < w[0] - 1e-15);
            if trace.converged_at.is_some() {
                assert!(trace.potential_series.last().unwrap() >= &trace.potential_series[0]);
            }
        }
        assert!(saw_dip, "no simultaneous-actor dip observed in any run");
    }

    #[test]
    fn run_from_equilibrium_converges_within_window() {
        let net =
            Network::from_gains(vec![vec![1.0, 0.3], vec![0.3, 1.0]], vec![1.0, 1.0]).unwrap();
        let c = cfg(2, UtilityKind::Cooperative);
        let ne = StrategyProfile::new(vec![1, 2], 2).unwrap();
        let mut rng = rng_for(5, 85);
        let run_cfg = PotentialRunConfig::new(Scheduler::strict_sequential());
        let trace = run_potential_game(&net, &c, &ne, &run_cfg, &mut rng).unwrap();
        assert_eq!(trace.converged_at, Some(DEFAULT_STABILITY_WINDOW));
        assert_eq!(trace.final_outcome, FinalOutcome::Pure(ne));
    }

    #[test]
    fn traces_reproduce_bit_for_bit() {
        let net = random_net(7, 8);
        let c = cfg(3, UtilityKind::Cooperative);
        let initial = StrategyProfile::random(8, 3, &mut rng_for(7, stream::INITIAL_PROFILE));
        let run_cfg = PotentialRunConfig {
            scheduler: Scheduler::bernoulli(1.0 / 8.0).unwrap(),
            max_slots: 400,
            stability_window: 25,
        };
        let t1 = run_potential_game(&net, &c, &initial, &run_cfg, &mut rng_for(7, 86)).unwrap();
        let t2 = run_potential_game(&net, &c, &initial, &run_cfg, &mut rng_for(7, 86)).unwrap();
        assert_eq!(t1, t2);
        let lcfg = LearningConfig {
            max_slots: 300,
            ..LearningConfig::default()
        };
        let l1 = run_learning(&net, &c, &initial, &lcfg, &mut rng_for(7, 87)).unwrap();
        let l2 = run_learning(&net, &c, &initial, &lcfg, &mut rng_for(7, 87)).unwrap();
        assert_eq!(l1, l2);
    }

    #[test]
    fn weights_uniform_for_equal_utilities() {
        let w = weights_from_cum_utils(&[3.0, 3.0, 3.0, 3.0], 0.1);
        for x in &w {
            assert!((x - 0.25).abs() < 1e-15);
        }
    }

    #[test]
    fn weights_match_direct_evaluation() {
        // (1.1)^0 / ((1.1)^0 + (1.1)^-10) evaluated directly.
        let w = weights_from_cum_utils(&[0.0, -10.0], 0.1);
        let direct0 = 1.0 / (1.0 + 1.1f64.powi(-10));
        assert!((w[0] - direct0).abs() < 1e-12);
        assert!((w[0] - 0.7217).abs() < 1e-4);
        assert!((w[1] - 0.2783).abs() < 1e-4);
    }

    #[test]
    fn weights_shift_invariant() {
        let a = weights_from_cum_utils(&[0.0, -10.0], 0.1);
        let b = weights_from_cum_utils(&[5.0, -5.0], 0.1);
        for (x, y) in a.iter().zip(b.iter()) {
            assert!((x - y).abs() <= 1e-12);
        }
        let c = weights_from_cum_utils(&[1.25, 0.5, -3.0], 0.3);
        let d = weights_from_cum_utils(&[1.25 + 7.5, 0.5 + 7.5, -3.0 + 7.5], 0.3);
        for (x, y) in c.iter().zip(d.iter()) {
            assert!((x - y).abs() <= 1e-12);
        }
    }

    #[test]
    fn weights_survive_extreme_spread() {
        let w = weights_from_cum_utils(&[0.0, -1e6], 0.1);
        assert!(w[0] > 0.0 && w[1] > 0.0);
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        assert!(w[1] < 1e-300);
    }

    #[test]
    fn single_channel_learning_is_constant() {
        let net = random_net(8, 3);
        let c = cfg(1, UtilityKind::Selfish);
        let mut state = LearnerState::new(3, 1, 0.1, 1.0).unwrap();
        let mut rng = rng_for(8, 88);
        for _ in 0..5 {
            let played = learning_step(&mut state, &net, &c, &mut rng);
            assert_eq!(played.channels(), &[1, 1, 1]);
            for row in state.weights() {
                assert_eq!(row, &[1.0]);
            }
        }
    }

    #[test]
    fn collision_pushes_weight_to_free_channel() {
        let net =
            Network::from_gains(vec![vec![1.0, 0.3], vec![0.3, 1.0]], vec![1.0, 1.0]).unwrap();
        let mut state = LearnerState::new(2, 2, 0.1, 1.0).unwrap();
        let both_on_one = StrategyProfile::new(vec![1, 1], 2).unwrap();
        state.update_counterfactual(&both_on_one, &net, UtilityKind::Selfish);
        for i in 0..2 {
            assert!(state.cum_utils()[i][1] > state.cum_utils()[i][0]);
            assert!(state.weights()[i][1] > 0.5);
        }
    }

    #[test]
    fn scripted_slots_match_handrolled_update() {
        // Independent re-implementation of the cumulative update and the
        // exponential-weights rule, replayed over three scripted slots.
        let g = vec![
            vec![1.0, 0.3, 0.05, 0.2, 0.08, 0.12],
            vec![0.25, 1.0, 0.1, 0.07, 0.3, 0.02],
            vec![0.06, 0.15, 1.0, 0.22, 0.04, 0.09],
            vec![0.18, 0.03, 0.2, 1.0, 0.11, 0.25],
            vec![0.09, 0.28, 0.05, 0.13, 1.0, 0.07],
            vec![0.14, 0.02, 0.11, 0.3, 0.06, 1.0],
        ];
        let net = Network::from_gains(g.clone(), vec![1.0; 6]).unwrap();
        let beta = 0.1f64;
        let script = [
            vec![1u32, 2, 1, 2, 1, 2],
            vec![2, 2, 1, 1, 2, 1],
            vec![1, 1, 2, 2, 2, 1],
        ];

        let mut state = LearnerState::new(6, 2, beta, 1.0).unwrap();
        let mut oracle_cum = [[0.0f64; 2]; 6];
        for channels in &script {
            let played = StrategyProfile::new(channels.clone(), 2).unwrap();
            state.update_counterfactual(&played, &net, UtilityKind::Cooperative);

            // Oracle: direct double loop over users and candidate channels.
            for i in 0..6 {
                for (slot_k, cand) in [1u32, 2].iter().enumerate() {
                    let mut incoming = 0.0;
                    let mut outgoing = 0.0;
                    for j in 0..6 {
                        if j != i && channels[j] == *cand {
                            incoming += g[j][i];
                            outgoing += g[i][j];
                        }
                    }
                    oracle_cum[i][slot_k] += -(incoming + outgoing);
                }
            }
        }
        for i in 0..6 {
            for k in 0..2 {
                assert!((state.cum_utils()[i][k] - oracle_cum[i][k]).abs() <= 1e-12);
            }
            // Oracle weights straight from the textbook form.
            let raw0 = (1.0 + beta).powf(oracle_cum[i][0]);
            let raw1 = (1.0 + beta).powf(oracle_cum[i][1]);
            let w0 = raw0 / (raw0 + raw1);
            assert!((state.weights()[i][0] - w0).abs() <= 1e-12);
        }
    }

    #[test]
    fn learning_rejects_bad_beta() {
        let net = random_net(9, 4);
        let c = cfg(2, UtilityKind::Selfish);
        let initial = StrategyProfile::all_same(4);
        for beta in [0.0, -0.5] {
            let lcfg = LearningConfig {
                beta,
                ..LearningConfig::default()
            };
            let res = run_learning(&net, &c, &initial, &lcfg, &mut rng_for(9, 89));
            assert!(matches!(res, Err(Error::InvalidParameter(_))));
        }
    }

    #[test]
    fn weight_rows_stay_valid_during_learning() {
        let net = random_net(10, 6);
        let c = cfg(3, UtilityKind::Cooperative);
        let mut state = LearnerState::new(6, 3, 0.1, DEFAULT_UTILITY_SCALE).unwrap();
        let mut rng = rng_for(10, 90);
        for _ in 0..200 {
            learning_step(&mut state, &net, &c, &mut rng);
            for row in state.weights() {
                let sum: f64 = row.iter().sum();
                assert!((sum - 1.0).abs() <= 1e-9);
                assert!(row.iter().all(|&w| w > 0.0));
            }
        }
    }

    #[test]
    fn gated_learning_keeps_idle_channels() {
        let net = random_net(11, 5);
        let c = cfg(3, UtilityKind::Cooperative);
        let mut state = LearnerState::new(5, 3, 0.1, DEFAULT_UTILITY_SCALE).unwrap();
        let prev = StrategyProfile::new(vec![1, 2, 3, 1, 2], 3).unwrap();
        let mut rng = rng_for(11, 91);
        let played = learning_step_gated(&mut state, &net, &c, &prev, &[2], &mut rng);
        for i in [0usize, 1, 3, 4] {
            assert_eq!(played.channel(i), prev.channel(i));
        }
    }
}

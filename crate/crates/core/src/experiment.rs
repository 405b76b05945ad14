//! Scenario orchestration: run one allocation scheme to convergence,
//! evaluate it over a post-convergence horizon, compute the metrics suite,
//! compare schemes from a shared start, and write the plot-ready CSVs.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::coding::RateTable;
use crate::dynamics::{
    run_learning, run_potential_game, FinalOutcome, LearningConfig, PotentialRunConfig, RunTrace,
    ScheduleMode, Scheduler, DEFAULT_STABILITY_WINDOW, DEFAULT_UTILITY_SCALE,
};
use crate::error::{Error, Result};
use crate::game::{potential, sir, GameConfig, StrategyProfile, UtilityKind};
use crate::io::fmt_sig;
use crate::rng::{rng_for, stream};
use crate::topology::{generate_network, Network, Placement, TopologyParams};

/// The channel-allocation schemes under comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    /// Best-response play of the cooperative potential game.
    Potential,
    /// Exponential-weights learning with the selfish utility.
    LearnU1,
    /// Exponential-weights learning with the cooperative utility.
    LearnU2,
    /// Uniform random channel choice every slot.
    Random,
}

impl Scheme {
    pub fn label(&self) -> &'static str {
        match self {
            Scheme::Potential => "potential",
            Scheme::LearnU1 => "learn_u1",
            Scheme::LearnU2 => "learn_u2",
            Scheme::Random => "random",
        }
    }

    pub fn parse(s: &str) -> Result<Scheme> {
        match s {
            "potential" => Ok(Scheme::Potential),
            "learn_u1" => Ok(Scheme::LearnU1),
            "learn_u2" => Ok(Scheme::LearnU2),
            "random" => Ok(Scheme::Random),
            other => Err(Error::InvalidParameter(format!(
                "unknown scheme '{other}' (expected potential|learn_u1|learn_u2|random)"
            ))),
        }
    }

    fn id(&self) -> u64 {
        match self {
            Scheme::Potential => 0,
            Scheme::LearnU1 => 1,
            Scheme::LearnU2 => 2,
            Scheme::Random => 3,
        }
    }
}

fn default_n_pairs() -> usize {
    30
}
fn default_area_side() -> f64 {
    200.0
}
fn default_n_channels() -> u32 {
    4
}
fn default_beta() -> f64 {
    0.1
}
fn default_alpha() -> f64 {
    4.0
}
fn default_ref_dist() -> f64 {
    1.0
}
fn default_eval_slots() -> u64 {
    1000
}
fn default_max_slots() -> u64 {
    5000
}
fn default_utility_scale() -> f64 {
    DEFAULT_UTILITY_SCALE
}
fn default_snapshot_every() -> u64 {
    10
}
fn default_scheduler_mode() -> ScheduleMode {
    ScheduleMode::Bernoulli
}
fn default_stability_window() -> u64 {
    DEFAULT_STABILITY_WINDOW
}

/// Everything needed to reproduce one scenario run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ScenarioConfig {
    pub seed: u64,
    pub n_pairs: usize,
    pub area_side: f64,
    pub n_channels: u32,
    pub scheme: Scheme,
    pub beta: f64,
    /// Decision probability per slot; None means 1/N.
    pub p_a: Option<f64>,
    pub scheduler_mode: ScheduleMode,
    pub placement: Placement,
    pub alpha: f64,
    pub ref_dist: f64,
    pub eval_slots: u64,
    pub max_slots: u64,
    pub utility_scale: f64,
    pub snapshot_every: u64,
    /// Gate learning-action resampling by the scheduler instead of letting
    /// every user act every slot.
    pub learner_gated: bool,
    pub stability_window: u64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            seed: 1,
            n_pairs: default_n_pairs(),
            area_side: default_area_side(),
            n_channels: default_n_channels(),
            scheme: Scheme::Potential,
            beta: default_beta(),
            p_a: None,
            scheduler_mode: default_scheduler_mode(),
            placement: Placement::default(),
            alpha: default_alpha(),
            ref_dist: default_ref_dist(),
            eval_slots: default_eval_slots(),
            max_slots: default_max_slots(),
            utility_scale: default_utility_scale(),
            snapshot_every: default_snapshot_every(),
            learner_gated: false,
            stability_window: default_stability_window(),
        }
    }
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        self.topology_params().validate_public()?;
        if self.n_channels < 1 {
            return Err(Error::InvalidParameter("n_channels must be >= 1".into()));
        }
        if !(self.beta > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "beta must be > 0, got {}",
                self.beta
            )));
        }
        if self.eval_slots == 0 {
            return Err(Error::InvalidParameter("eval_slots must be > 0".into()));
        }
        if self.max_slots == 0 {
            return Err(Error::InvalidParameter("max_slots must be > 0".into()));
        }
        if !(self.utility_scale > 0.0) {
            return Err(Error::InvalidParameter("utility_scale must be > 0".into()));
        }
        if let Some(p) = self.p_a {
            if !(p > 0.0 && p <= 1.0) {
                return Err(Error::InvalidParameter(format!(
                    "p_a must lie in (0, 1], got {p}"
                )));
            }
        }
        Ok(())
    }

    pub fn topology_params(&self) -> TopologyParams {
        TopologyParams {
            n_pairs: self.n_pairs,
            area_side: self.area_side,
            placement: self.placement,
            alpha: self.alpha,
            ref_dist: self.ref_dist,
        }
    }

    fn effective_p_a(&self) -> f64 {
        self.p_a.unwrap_or(1.0 / self.n_pairs as f64)
    }

    fn scheduler(&self) -> Result<Scheduler> {
        match self.scheduler_mode {
            ScheduleMode::Bernoulli => Scheduler::bernoulli(self.effective_p_a()),
            ScheduleMode::StrictSequential => Ok(Scheduler::strict_sequential()),
        }
    }

    fn learning_config(&self) -> LearningConfig {
        LearningConfig {
            beta: self.beta,
            utility_scale: self.utility_scale,
            max_slots: self.max_slots,
            snapshot_every: self.snapshot_every,
            gate: if self.learner_gated {
                self.scheduler().ok()
            } else {
                None
            },
            ..LearningConfig::default()
        }
    }
}

impl TopologyParams {
    fn validate_public(&self) -> Result<()> {
        // Reuse generation-time validation without generating.
        if self.n_pairs < 2 {
            return Err(Error::InvalidParameter(format!(
                "n_pairs must be >= 2, got {}",
                self.n_pairs
            )));
        }
        if !(self.area_side > 0.0) {
            return Err(Error::InvalidParameter("area_side must be > 0".into()));
        }
        if !(self.alpha > 0.0) {
            return Err(Error::InvalidParameter("alpha must be > 0".into()));
        }
        if !(self.ref_dist > 0.0) {
            return Err(Error::InvalidParameter("ref_dist must be > 0".into()));
        }
        Ok(())
    }
}

/// Post-convergence per-user averages and their summary statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalStats {
    /// Time-average SIR in dB over finite-SIR slots; +inf when every slot
    /// was interference-free.
    pub per_user_avg_sir_db: Vec<f64>,
    pub per_user_avg_throughput: Vec<f64>,
    pub total_throughput: f64,
    pub mean_throughput: f64,
    pub variance_throughput: f64,
}

/// Result of one scheme on one scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemeResult {
    pub scheme: Scheme,
    pub stats: EvalStats,
    pub converged_at: Option<u64>,
    pub trace: RunTrace,
}

/// How channels are drawn during the evaluation horizon.
enum EvalPolicy<'a> {
    Replay(&'a StrategyProfile),
    SampleWeights(&'a [Vec<f64>]),
    UniformRandom,
}

fn evaluate(
    net: &Network,
    n_channels: u32,
    policy: EvalPolicy<'_>,
    eval_slots: u64,
    rng: &mut rand_chacha::ChaCha8Rng,
) -> EvalStats {
    use rand::Rng;
    let n = net.len();
    let table = RateTable::standard();
    let mut throughput_sum = vec![0.0f64; n];
    let mut sir_db_sum = vec![0.0f64; n];
    let mut finite_slots = vec![0u64; n];
    let mut scratch = StrategyProfile::all_same(n);
    for _ in 0..eval_slots {
        let profile: &StrategyProfile = match &policy {
            EvalPolicy::Replay(p) => p,
            EvalPolicy::SampleWeights(weights) => {
                for (i, row) in weights.iter().enumerate() {
                    let r: f64 = rng.gen();
                    let mut acc = 0.0;
                    let mut chosen = row.len() as u32;
                    for (idx, w) in row.iter().enumerate() {
                        acc += w;
                        if r < acc {
                            chosen = (idx + 1) as u32;
                            break;
                        }
                    }
                    scratch.set_channel(i, chosen);
                }
                &scratch
            }
            EvalPolicy::UniformRandom => {
                for i in 0..n {
                    scratch.set_channel(i, rng.gen_range(1..=n_channels));
                }
                &scratch
            }
        };
        for i in 0..n {
            let s = sir(i, profile, net);
            if s.is_finite() {
                let db = 10.0 * s.log10();
                sir_db_sum[i] += db;
                finite_slots[i] += 1;
                throughput_sum[i] += table.normalized_throughput(db);
            } else {
                // Interference-free slot: top rate, excluded from dB average.
                throughput_sum[i] += table.rows()[0].rate;
            }
        }
    }
    let per_user_avg_throughput: Vec<f64> = throughput_sum
        .iter()
        .map(|t| t / eval_slots as f64)
        .collect();
    let per_user_avg_sir_db: Vec<f64> = sir_db_sum
        .iter()
        .zip(finite_slots.iter())
        .map(|(s, &c)| if c == 0 { f64::INFINITY } else { s / c as f64 })
        .collect();
    let (mean, variance, total) =
        summary_stats(&per_user_avg_throughput).expect("eval produces at least one user");
    EvalStats {
        per_user_avg_sir_db,
        per_user_avg_throughput,
        total_throughput: total,
        mean_throughput: mean,
        variance_throughput: variance,
    }
}

fn run_dynamics(
    cfg: &ScenarioConfig,
    net: &Network,
    initial: &StrategyProfile,
) -> Result<RunTrace> {
    let mut rng = rng_for(cfg.seed, stream::DYNAMICS + cfg.scheme.id());
    match cfg.scheme {
        Scheme::Potential => {
            let game = GameConfig::new(cfg.n_channels, UtilityKind::Cooperative)?;
            let run_cfg = PotentialRunConfig {
                scheduler: cfg.scheduler()?,
                max_slots: cfg.max_slots,
                stability_window: cfg.stability_window,
            };
            run_potential_game(net, &game, initial, &run_cfg, &mut rng)
        }
        Scheme::LearnU1 => {
            let game = GameConfig::new(cfg.n_channels, UtilityKind::Selfish)?;
            run_learning(net, &game, initial, &cfg.learning_config(), &mut rng)
        }
        Scheme::LearnU2 => {
            let game = GameConfig::new(cfg.n_channels, UtilityKind::Cooperative)?;
            run_learning(net, &game, initial, &cfg.learning_config(), &mut rng)
        }
        Scheme::Random => {
            // No adaptation: the trace records the shared initial profile
            // and the evaluation samples uniformly each slot.
            Ok(RunTrace {
                profiles: vec![initial.clone()],
                potential_series: vec![potential(initial, net)],
                weight_snapshots: Vec::new(),
                converged_at: Some(0),
                final_outcome: FinalOutcome::Pure(initial.clone()),
            })
        }
    }
}

/// Build the network, run the configured scheme to convergence and evaluate
/// it over the post-convergence horizon.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<SchemeResult> {
    cfg.validate()?;
    let net = generate_network(cfg.seed, &cfg.topology_params())?;
    let mut init_rng = rng_for(cfg.seed, stream::INITIAL_PROFILE);
    let initial = StrategyProfile::random(cfg.n_pairs, cfg.n_channels, &mut init_rng);
    let trace = run_dynamics(cfg, &net, &initial)?;
    let mut eval_rng = rng_for(cfg.seed, stream::EVAL + cfg.scheme.id());
    let policy = match (cfg.scheme, &trace.final_outcome) {
        (Scheme::Random, _) => EvalPolicy::UniformRandom,
        (_, FinalOutcome::Pure(p)) => EvalPolicy::Replay(p),
        (_, FinalOutcome::Mixed(w)) => EvalPolicy::SampleWeights(w),
    };
    let stats = evaluate(&net, cfg.n_channels, policy, cfg.eval_slots, &mut eval_rng);
    Ok(SchemeResult {
        scheme: cfg.scheme,
        stats,
        converged_at: trace.converged_at,
        trace,
    })
}

/// A multi-scheme comparison sharing one network and one initial profile.
#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub network: Network,
    pub initial: StrategyProfile,
    /// Baseline: the shared initial assignment replayed unchanged.
    pub initial_stats: EvalStats,
    pub results: Vec<SchemeResult>,
}

/// Run every scheme from the same network, seed and initial assignment.
pub fn compare_schemes(cfg: &ScenarioConfig, schemes: &[Scheme]) -> Result<Comparison> {
    if schemes.len() < 2 {
        return Err(Error::InvalidParameter(
            "compare needs at least 2 schemes".into(),
        ));
    }
    cfg.validate()?;
    let net = generate_network(cfg.seed, &cfg.topology_params())?;
    let mut init_rng = rng_for(cfg.seed, stream::INITIAL_PROFILE);
    let initial = StrategyProfile::random(cfg.n_pairs, cfg.n_channels, &mut init_rng);
    let mut baseline_rng = rng_for(cfg.seed, stream::EVAL);
    let initial_stats = evaluate(
        &net,
        cfg.n_channels,
        EvalPolicy::Replay(&initial),
        cfg.eval_slots,
        &mut baseline_rng,
    );
    let mut results = Vec::with_capacity(schemes.len());
    for &scheme in schemes {
        let mut scheme_cfg = cfg.clone();
        scheme_cfg.scheme = scheme;
        results.push(run_scenario(&scheme_cfg)?);
    }
    Ok(Comparison {
        network: net,
        initial,
        initial_stats,
        results,
    })
}

/// Right-continuous empirical CDF over the sorted distinct values.
pub fn empirical_cdf(values: &[f64]) -> Result<Vec<(f64, f64)>> {
    if values.is_empty() {
        return Err(Error::InvalidParameter("empty sample for CDF".into()));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let mut out = Vec::new();
    let mut idx = 0;
    while idx < sorted.len() {
        let x = sorted[idx];
        let mut end = idx + 1;
        while end < sorted.len() && sorted[end] == x {
            end += 1;
        }
        out.push((x, end as f64 / n));
        idx = end;
    }
    Ok(out)
}

/// (arithmetic mean, population variance, sum).
pub fn summary_stats(values: &[f64]) -> Result<(f64, f64, f64)> {
    if values.is_empty() {
        return Err(Error::InvalidParameter("empty sample for stats".into()));
    }
    let total: f64 = values.iter().sum();
    let mean = total / values.len() as f64;
    let variance = values
        .iter()
        .map(|v| {
            let d = v - mean;
            d * d
        })
        .sum::<f64>()
        / values.len() as f64;
    Ok((mean, variance, total))
}

// ---------------------------------------------------------------------------
// Output writers
// ---------------------------------------------------------------------------

fn write_file(path: &Path, body: impl FnOnce(&mut Vec<u8>) -> std::io::Result<()>) -> Result<()> {
    let mut buf = Vec::new();
    body(&mut buf)?;
    fs::write(path, buf)?;
    Ok(())
}

fn write_trace_files(dir: &Path, trace: &RunTrace, net: &Network) -> Result<()> {
    write_file(&dir.join("potential.csv"), |w| {
        writeln!(w, "slot,potential")?;
        for (slot, pot) in trace.potential_series.iter().enumerate() {
            writeln!(w, "{},{}", slot, fmt_sig(*pot))?;
        }
        Ok(())
    })?;
    write_file(&dir.join("actions.csv"), |w| {
        let header: Vec<String> = (1..=net.len()).map(|i| format!("s_{i}")).collect();
        writeln!(w, "slot,{}", header.join(","))?;
        for (slot, profile) in trace.profiles.iter().enumerate() {
            writeln!(w, "{},{}", slot, profile.to_csv_row())?;
        }
        Ok(())
    })?;
    if !trace.weight_snapshots.is_empty() {
        let k = trace.weight_snapshots[0].1[0].len();
        for user in 0..net.len() {
            let path = dir.join(format!("weights_u{}.csv", user + 1));
            write_file(&path, |w| {
                let header: Vec<String> = (1..=k).map(|c| format!("w_{c}")).collect();
                writeln!(w, "slot,{}", header.join(","))?;
                for (slot, weights) in &trace.weight_snapshots {
                    let row: Vec<String> = weights[user].iter().map(|x| fmt_sig(*x)).collect();
                    writeln!(w, "{},{}", slot, row.join(","))?;
                }
                Ok(())
            })?;
        }
    }
    Ok(())
}

fn write_eval_files(dir: &Path, stats: &EvalStats) -> Result<()> {
    write_file(&dir.join("per_user.csv"), |w| {
        writeln!(w, "id,avg_sir_db,avg_throughput")?;
        for (i, (db, thr)) in stats
            .per_user_avg_sir_db
            .iter()
            .zip(stats.per_user_avg_throughput.iter())
            .enumerate()
        {
            writeln!(w, "{},{},{}", i + 1, fmt_sig(*db), fmt_sig(*thr))?;
        }
        Ok(())
    })?;
    let sir_cdf = empirical_cdf(&stats.per_user_avg_sir_db)?;
    write_file(&dir.join("cdf_sir.csv"), |w| {
        writeln!(w, "sir_db,fraction")?;
        for (x, f) in &sir_cdf {
            writeln!(w, "{},{}", fmt_sig(*x), fmt_sig(*f))?;
        }
        Ok(())
    })?;
    let thr_cdf = empirical_cdf(&stats.per_user_avg_throughput)?;
    write_file(&dir.join("cdf_throughput.csv"), |w| {
        writeln!(w, "throughput,fraction")?;
        for (x, f) in &thr_cdf {
            writeln!(w, "{},{}", fmt_sig(*x), fmt_sig(*f))?;
        }
        Ok(())
    })?;
    Ok(())
}

fn summary_row(label: &str, stats: &EvalStats, converged_at: Option<u64>) -> String {
    let converged = converged_at.map(|s| s.to_string()).unwrap_or_default();
    format!(
        "{},{},{},{},{}",
        label,
        fmt_sig(stats.total_throughput),
        fmt_sig(stats.mean_throughput),
        fmt_sig(stats.variance_throughput),
        converged
    )
}

/// Write the full output set for one scenario run into `dir`.
pub fn write_run_outputs(dir: &Path, net: &Network, result: &SchemeResult) -> Result<()> {
    fs::create_dir_all(dir)?;
    write_file(&dir.join("topology.csv"), |w| net.write_topology_csv(w))?;
    write_file(&dir.join("gains.csv"), |w| net.write_gains_csv(w))?;
    write_trace_files(dir, &result.trace, net)?;
    write_eval_files(dir, &result.stats)?;
    write_file(&dir.join("summary.csv"), |w| {
        writeln!(w, "scheme,total,mean,variance,converged_at")?;
        writeln!(
            w,
            "{}",
            summary_row(result.scheme.label(), &result.stats, result.converged_at)
        )?;
        Ok(())
    })?;
    Ok(())
}

/// Write a comparison: shared topology at the root, one subdirectory per
/// scheme, and a combined summary with the initial-assignment baseline.
pub fn write_compare_outputs(dir: &Path, comparison: &Comparison) -> Result<()> {
    fs::create_dir_all(dir)?;
    write_file(&dir.join("topology.csv"), |w| {
        comparison.network.write_topology_csv(w)
    })?;
    write_file(&dir.join("gains.csv"), |w| {
        comparison.network.write_gains_csv(w)
    })?;
    for result in &comparison.results {
        let sub = dir.join(result.scheme.label());
        fs::create_dir_all(&sub)?;
        write_trace_files(&sub, &result.trace, &comparison.network)?;
        write_eval_files(&sub, &result.stats)?;
    }
    write_file(&dir.join("summary.csv"), |w| {
        writeln!(w, "scheme,total,mean,variance,converged_at")?;
        writeln!(
            w,
            "{}",
            summary_row("initial", &comparison.initial_stats, None)
        )?;
        for result in &comparison.results {
            writeln!(
                w,
                "{}",
                summary_row(result.scheme.label(), &result.stats, result.converged_at)
            )?;
        }
        Ok(())
    })?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_cfg(scheme: Scheme) -> ScenarioConfig {
        ScenarioConfig {
            seed: 5,
            n_pairs: 6,
            area_side: 60.0,
            n_channels: 2,
            scheme,
            eval_slots: 100,
            max_slots: 800,
            ..ScenarioConfig::default()
        }
    }

    #[test]
    fn cdf_cases() {
        assert_eq!(empirical_cdf(&[5.0]).unwrap(), vec![(5.0, 1.0)]);
        let cdf = empirical_cdf(&[1.0, 2.0, 2.0, 4.0]).unwrap();
        assert_eq!(cdf, vec![(1.0, 0.25), (2.0, 0.75), (4.0, 1.0)]);
        assert!(empirical_cdf(&[]).is_err());
    }

    #[test]
    fn cdf_is_valid_distribution() {
        let values = [0.3, -1.0, 2.5, 2.5, 0.0, 7.1, 0.3];
        let cdf = empirical_cdf(&values).unwrap();
        let mut prev = 0.0;
        for (_, f) in &cdf {
            assert!(*f > prev && *f <= 1.0);
            prev = *f;
        }
        assert_eq!(cdf.last().unwrap().1, 1.0);
        for w in cdf.windows(2) {
            assert!(w[0].0 < w[1].0);
        }
    }

    #[test]
    fn stats_cases() {
        assert_eq!(summary_stats(&[1.0, 1.0, 1.0]).unwrap(), (1.0, 0.0, 3.0));
        assert_eq!(summary_stats(&[0.0, 2.0]).unwrap(), (1.0, 1.0, 2.0));
        assert!(summary_stats(&[]).is_err());
    }

    #[test]
    fn scenario_is_deterministic() {
        let cfg = tiny_cfg(Scheme::Potential);
        let a = run_scenario(&cfg).unwrap();
        let b = run_scenario(&cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn totals_equal_mean_times_n() {
        for scheme in [Scheme::Potential, Scheme::LearnU2, Scheme::Random] {
            let result = run_scenario(&tiny_cfg(scheme)).unwrap();
            let n = result.stats.per_user_avg_throughput.len() as f64;
            assert!(
                (result.stats.total_throughput - result.stats.mean_throughput * n).abs() <= 1e-9
            );
            assert!(result.stats.variance_throughput >= 0.0);
        }
    }

    #[test]
    fn single_channel_schemes_coincide() {
        let mut cfg = tiny_cfg(Scheme::Potential);
        cfg.n_channels = 1;
        cfg.max_slots = 100;
        let comparison = compare_schemes(
            &cfg,
            &[
                Scheme::Potential,
                Scheme::LearnU2,
                Scheme::LearnU1,
                Scheme::Random,
            ],
        )
        .unwrap();
        let reference = comparison.initial_stats.total_throughput;
        for result in &comparison.results {
            assert_eq!(result.stats.total_throughput, reference);
            assert_eq!(
                result.stats.per_user_avg_throughput,
                comparison.initial_stats.per_user_avg_throughput
            );
        }
    }

    #[test]
    fn comparison_shares_network_and_start() {
        let cfg = tiny_cfg(Scheme::Potential);
        let comparison = compare_schemes(&cfg, &[Scheme::Potential, Scheme::Random]).unwrap();
        let net = generate_network(cfg.seed, &cfg.topology_params()).unwrap();
        assert_eq!(comparison.network, net);
        let mut init_rng = rng_for(cfg.seed, stream::INITIAL_PROFILE);
        let initial = StrategyProfile::random(cfg.n_pairs, cfg.n_channels, &mut init_rng);
        assert_eq!(comparison.initial, initial);
        for result in &comparison.results {
            assert_eq!(result.trace.profiles[0], initial);
        }
    }

    #[test]
    fn compare_requires_two_schemes() {
        let cfg = tiny_cfg(Scheme::Potential);
        assert!(compare_schemes(&cfg, &[Scheme::Potential]).is_err());
    }

    #[test]
    fn invalid_configs_rejected() {
        let mut cfg = tiny_cfg(Scheme::Potential);
        cfg.n_pairs = 1;
        assert!(run_scenario(&cfg).is_err());
        let mut cfg = tiny_cfg(Scheme::LearnU2);
        cfg.beta = 0.0;
        assert!(run_scenario(&cfg).is_err());
        let mut cfg = tiny_cfg(Scheme::Potential);
        cfg.p_a = Some(1.5);
        assert!(run_scenario(&cfg).is_err());
    }

    #[test]
    fn config_json_round_trip() {
        let cfg = ScenarioConfig::default();
        let json = serde_json::to_string(&cfg).unwrap();
        let back: ScenarioConfig = serde_json::from_str(&json).unwrap();
        assert_eq!(cfg, back);
        // Partial configs fill in defaults.
        let partial: ScenarioConfig =
            serde_json::from_str(r#"{"seed": 9, "scheme": "learn_u1"}"#).unwrap();
        assert_eq!(partial.seed, 9);
        assert_eq!(partial.scheme, Scheme::LearnU1);
        assert_eq!(partial.n_pairs, 30);
        assert_eq!(partial.n_channels, 4);
    }

    #[test]
    fn run_outputs_written_once() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = tiny_cfg(Scheme::LearnU2);
        let net = generate_network(cfg.seed, &cfg.topology_params()).unwrap();
        let result = run_scenario(&cfg).unwrap();
        write_run_outputs(dir.path(), &net, &result).unwrap();
        for name in [
            "topology.csv",
            "gains.csv",
            "potential.csv",
            "actions.csv",
            "per_user.csv",
            "summary.csv",
            "cdf_sir.csv",
            "cdf_throughput.csv",
            "weights_u1.csv",
            "weights_u6.csv",
        ] {
            assert!(dir.path().join(name).exists(), "{name} missing");
        }
    }
}

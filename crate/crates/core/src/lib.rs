//! Deterministic simulator for distributed channel allocation among
//! cognitive radios: a potential-game formulation with best-response
//! dynamics, exponential-weights no-regret learning for selfish and
//! cooperative utilities, the control-channel signaling protocol that
//! feeds the cooperative utility, adaptive-coding throughput mapping,
//! and a seeded experiment harness with plot-ready CSV output.

pub mod coding;
pub mod dynamics;
pub mod error;
pub mod experiment;
pub mod game;
pub mod io;
pub mod rng;
pub mod signaling;
pub mod topology;

pub use coding::{RateRow, RateTable};
pub use dynamics::{
    bernoulli_actors, learning_step, potential_game_step, run_learning, run_potential_game,
    weights_from_cum_utils, FinalOutcome, LearnerState, LearningConfig, PotentialRunConfig,
    RunTrace, ScheduleMode, Scheduler,
};
pub use error::{Error, Result};
pub use experiment::{
    compare_schemes, empirical_cdf, run_scenario, summary_stats, write_compare_outputs,
    write_run_outputs, Comparison, EvalStats, ScenarioConfig, Scheme, SchemeResult,
};
pub use game::{
    best_response, best_response_set, co_channel, enumerate_pure_nash, generalized_potential,
    is_pure_nash, potential, sir, utility_cooperative, utility_selfish, Channel, GameConfig,
    StrategyProfile, UtilityKind,
};
pub use signaling::{
    observe_probe, ChannelStatusTable, CstEntry, CstSide, PacketKind, ProbePowerConfig,
    SignalingPacket, SignalingWorld,
};
pub use topology::{
    generate_network, link_gain, Network, NodePair, Placement, Point, TopologyParams,
};

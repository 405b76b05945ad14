//! Shared fixtures for the benchmarks.

use chanalloc::game::StrategyProfile;
use chanalloc::rng::{rng_for, stream};
use chanalloc::topology::{generate_network, Network, TopologyParams};

/// The default-scale network: 30 pairs on a 200 m square.
pub fn default_scale_network(seed: u64) -> Network {
    generate_network(seed, &TopologyParams::default()).unwrap()
}

pub fn random_profile(seed: u64, n: usize, k: u32) -> StrategyProfile {
    StrategyProfile::random(n, k, &mut rng_for(seed, stream::INITIAL_PROFILE))
}

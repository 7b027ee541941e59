//! Shared fixtures for the benchmarks in `benches/`.

use relaylab_core::{
    cf_rate, make_channel, CfMode, ChannelRecipe, CodingDistribution, DecoderKind, Metric,
    RelayChannelSpec, SearchConfig, SimParams,
};

pub fn orthogonal_bsc() -> RelayChannelSpec {
    make_channel(&ChannelRecipe::OrthogonalBsc { p2: 0.05, p3: 0.2 }).unwrap()
}

/// The compress-forward argmax on a coarse grid.
pub fn argmax_distribution(ch: &RelayChannelSpec) -> CodingDistribution {
    let cfg = SearchConfig {
        grid_resolution: 4,
        yhat_max_size: 2,
        include_degenerate: true,
    };
    cf_rate(ch, &cfg, CfMode::MinForm).unwrap().distribution
}

pub fn sim_params(n: usize, decoder: DecoderKind) -> SimParams {
    SimParams {
        n,
        blocks: 3,
        rate: 0.25,
        r2: 1.15,
        epsilon: 0.5,
        seed: 0,
        decoder,
        metric: Metric::MaxScore,
        last_block_multiplier: 1,
    }
}

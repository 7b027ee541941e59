//! Relay-channel laboratory: exact rate bounds for short-message
//! quantize-forward on discrete memoryless relay channels, and a Monte Carlo
//! simulator of the block protocol itself.
//!
//! - [`info`]: probability tables, entropies, mutual informations, typicality.
//! - [`region`]: the relay channel model, every rate bound, the projected
//!   rate check and the compress-forward grid search.
//! - [`sim`]: random per-block codebooks, relay quantization, sliding-window,
//!   backward and exhaustive sink decoders, and the trial harness.
//! - [`zoo`]: canonical channels, the channel file format and the codeword
//!   census for implicit hashing.

pub mod error;
pub mod info;
pub mod region;
pub mod sim;
pub mod zoo;

pub use error::{Error, Result};
pub use info::{Alphabet, JointPmf, TypicalityParams};
pub use region::{
    build_joint, cf_rate, evaluate_bounds, fme_oracle_check, CfMode, CfResult, CodingDistribution,
    RegionReport, RelayChannelSpec, SearchConfig,
};
pub use sim::{run_monte_carlo, DecoderKind, ErrorStats, Metric, Protocol, SimParams};
pub use zoo::{
    implicit_hashing_census, interference_relay, load_channel_file, make_channel, ChannelRecipe,
};
